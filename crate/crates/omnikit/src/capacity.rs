//! Secrecy capacity and the minimum omniscience rate.
//!
//! The normative route is a pair of exact rate LPs: ρ over the trusted vocal
//! users (recover everything given the untrusted sources and any single
//! active observer) and ρ̄ over the untrusted users (reveal their sources to
//! every active user without exceeding their own entropy). Then
//! C_S = H(Z_{V∖D∖S} | Z_D) − ρ and R_CO = ρ + ρ̄.
//!
//! Independent characterizations (the partition minimization when everyone is
//! active, the fractional-partition LP without silent users, the silent-user
//! minimum-mutual-information formula) are recomputed as cross-checks and a
//! mismatch is an internal error.


use crate::error::{KitError, Result};
use crate::entropy::EntropyOracle;
use crate::ground::{bits, popcount, submasks, Mask, UserId};
use crate::lp::{self, Cmp, LpStatus, RationalLP};
use crate::partition::{self, FractionalPartition};
use crate::scenario::Scenario;
use crate::value::{eq_within, Rat, Value};
use num_traits::{One, Zero};

/// Folded constraint family for the ρ LP: for each nonempty B ⊆ V∖D∖S with
/// some active user outside B, the binding right-hand side
/// max_{j ∈ A∖B} H(Z_B | Z_{V∖S∖B}, Z_j).
pub fn rho_constraints(scn: &Scenario) -> Vec<(Mask, Rat)> {
    rho_constraints_with(scn, &scn.oracle())
}

pub fn rho_constraints_with(scn: &Scenario, o: &EntropyOracle) -> Vec<(Mask, Rat)> {
    let vocal = scn.vocal();
    let free = scn.discussers();
    let mut rows = Vec::new();
    for b in submasks(free) {
        if b == 0 {
            continue;
        }
        let outside_active = scn.active() & !b;
        if outside_active == 0 {
            continue;
        }
        let mut rhs: Option<Rat> = None;
        for j in bits(outside_active) {
            let jbit = 1 << j;
            let cond = (vocal & !b) | jbit;
            let h = o.cond(b, cond);
            rhs = Some(match rhs {
                None => h,
                Some(r) => r.max(h),
            });
        }
        rows.push((b, rhs.expect("nonempty active set outside B")));
    }
    rows
}

/// Constraint family for the ρ̄ LP over B ⊆ D: lower bounds
/// max_{j ∈ A} H(Z_B | Z_{D∖B}, Z_j) and the entropy caps r(B) ≤ H(Z_B).
pub fn rho_bar_constraints(scn: &Scenario) -> Vec<(Mask, Rat, Rat)> {
    rho_bar_constraints_with(scn, &scn.oracle())
}

pub fn rho_bar_constraints_with(scn: &Scenario, o: &EntropyOracle) -> Vec<(Mask, Rat, Rat)> {
    let d = scn.untrusted();
    let mut rows = Vec::new();
    for b in submasks(d) {
        if b == 0 {
            continue;
        }
        let mut rhs: Option<Rat> = None;
        for j in bits(scn.active()) {
            let h = o.cond(b, (d & !b) | (1 << j));
            rhs = Some(match rhs {
                None => h,
                Some(r) => r.max(h),
            });
        }
        rows.push((b, rhs.expect("active set nonempty"), o.h(b).clone()));
    }
    rows
}

fn sum_lp(
    vars: Mask,
    ground: &crate::ground::Ground,
    lower: &[(Mask, Rat)],
    caps: Option<&[(Mask, Rat)]>,
) -> Result<(Rat, Vec<(UserId, Rat)>)> {
    let var_bits: Vec<usize> = bits(vars).collect();
    if var_bits.is_empty() {
        return Ok((Rat::zero(), Vec::new()));
    }
    let names = var_bits.iter().map(|&i| format!("r_{}", ground.ids()[i])).collect();
    let col_of = |bit: usize| var_bits.iter().position(|&b| b == bit).unwrap();
    let mut lp = RationalLP::minimize(names);
    lp.objective = vec![Rat::one(); var_bits.len()];
    for (b, rhs) in lower {
        let terms = bits(*b).map(|i| (col_of(i), Rat::one())).collect();
        lp.constrain(terms, Cmp::Ge, rhs.clone());
    }
    if let Some(caps) = caps {
        for (b, cap) in caps {
            let terms = bits(*b).map(|i| (col_of(i), Rat::one())).collect();
            lp.constrain(terms, Cmp::Le, cap.clone());
        }
    }
    let sol = lp::solve_lex_min(&lp)?;
    match sol.status {
        LpStatus::Optimal => {
            let x = sol.x.unwrap();
            let rates = var_bits
                .iter()
                .zip(x)
                .map(|(&i, v)| (ground.ids()[i], v))
                .collect();
            Ok((sol.value.unwrap(), rates))
        }
        LpStatus::Infeasible => Err(KitError::Internal(
            "rate LP infeasible: the entropy oracle violates the polymatroid assumptions".into(),
        )),
        LpStatus::Unbounded => {
            Err(KitError::Internal("rate LP unbounded: missing lower bounds".into()))
        }
    }
}

/// Minimum total rate for the trusted vocal users.
pub fn rho(scn: &Scenario) -> Result<(Rat, Vec<(UserId, Rat)>)> {
    rho_with(scn, &scn.oracle())
}

pub fn rho_with(scn: &Scenario, o: &EntropyOracle) -> Result<(Rat, Vec<(UserId, Rat)>)> {
    let rows = rho_constraints_with(scn, o);
    sum_lp(scn.discussers(), scn.ground(), &rows, None)
}

/// Minimum total rate for the untrusted users; zero when D is empty.
pub fn rho_bar(scn: &Scenario) -> Result<(Rat, Vec<(UserId, Rat)>)> {
    rho_bar_with(scn, &scn.oracle())
}

pub fn rho_bar_with(scn: &Scenario, o: &EntropyOracle) -> Result<(Rat, Vec<(UserId, Rat)>)> {
    let rows = rho_bar_constraints_with(scn, o);
    let lower: Vec<(Mask, Rat)> = rows.iter().map(|(b, lo, _)| (*b, lo.clone())).collect();
    let caps: Vec<(Mask, Rat)> = rows.iter().map(|(b, _, hi)| (*b, hi.clone())).collect();
    sum_lp(scn.untrusted(), scn.ground(), &lower, Some(&caps))
}

#[derive(Clone, Debug)]
pub struct CrossCheck {
    pub route: &'static str,
    pub value: Rat,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct CapacityResult {
    pub c_s: Value,
    pub rho: Value,
    pub rho_bar: Value,
    pub r_co: Value,
    /// Lexicographically smallest optimal rate vector over the vocal users.
    pub rate_vector: Vec<(UserId, Value)>,
    pub cross_checks: Vec<CrossCheck>,
}

/// Bound below which the cross-characterizations are recomputed. The
/// partition minimization is exponential; above this size only the LP runs.
const CROSS_CHECK_LIMIT: usize = 8;

pub fn secrecy_capacity(scn: &Scenario) -> Result<CapacityResult> {
    let o = scn.oracle();
    let exact = scn.is_exact();
    let (rho_v, rho_rates) = rho(scn)?;
    let (rho_bar_v, rho_bar_rates) = rho_bar(scn)?;
    let c_s = o.cond(scn.discussers(), scn.untrusted()) - &rho_v;
    let r_co = &rho_v + &rho_bar_v;
    let tol = if exact { Rat::zero() } else { crate::value::float_tolerance() };
    if c_s < -tol.clone() || r_co < -tol {
        return Err(KitError::Internal(format!(
            "negative capacity or omniscience rate (C_S = {c_s}, R_CO = {r_co}); \
             the entropy oracle is not a polymatroid"
        )));
    }

    let mut cross_checks = Vec::new();
    let helpers = scn.all() & !scn.active() & !scn.untrusted();
    let u = scn.all() & !scn.untrusted();
    if popcount(u) <= CROSS_CHECK_LIMIT {
        let d = scn.untrusted();
        if scn.silent() == 0 && helpers == 0 {
            // Everyone (given D) active and vocal: capacity is the MMI.
            let m = partition::mmi(&o, u, d)?;
            cross_checks.push(CrossCheck {
                route: "partition-minimization",
                ok: eq_within(&m.value, &c_s, exact),
                value: m.value,
            });
        }
        if scn.silent() == 0 && popcount(u) <= 10 {
            let f = capacity_fractional_lp(scn)?;
            cross_checks.push(CrossCheck {
                route: "fractional-partition-lp",
                ok: eq_within(&f.optimum, &c_s, exact),
                value: f.optimum,
            });
        }
        if scn.silent() != 0 && helpers == 0 {
            let s = alpha_and_sstar(scn)?;
            cross_checks.push(CrossCheck {
                route: "silent-user-formula",
                ok: eq_within(&s.c_s, &c_s, exact),
                value: s.c_s,
            });
        }
    }
    if let Some(bad) = cross_checks.iter().find(|c| !c.ok) {
        return Err(KitError::Internal(format!(
            "capacity characterizations disagree: LP gives {c_s}, {} gives {}",
            bad.route, bad.value
        )));
    }

    let mut rate_vector: Vec<(UserId, Value)> = rho_rates
        .into_iter()
        .chain(rho_bar_rates)
        .map(|(id, r)| (id, Value::with_exactness(r, exact)))
        .collect();
    rate_vector.sort_by_key(|(id, _)| scn.ground().index_of(*id));
    Ok(CapacityResult {
        c_s: Value::with_exactness(c_s, exact),
        rho: Value::with_exactness(rho_v, exact),
        rho_bar: Value::with_exactness(rho_bar_v, exact),
        r_co: Value::with_exactness(r_co, exact),
        rate_vector,
        cross_checks,
    })
}

/// R_CO = ρ + ρ̄.
pub fn rco(scn: &Scenario) -> Result<Value> {
    Ok(secrecy_capacity(scn)?.r_co)
}

#[derive(Clone, Debug)]
pub struct FractionalLpResult {
    pub optimum: Rat,
    /// Subsets carrying positive weight in some optimal fractional partition.
    pub support_union: Vec<Mask>,
    /// The family {B, U∖B : B in the support union} over U = V∖D.
    pub h_family: Vec<Mask>,
    /// One optimal fractional partition (a vertex).
    pub witness: FractionalPartition,
    /// The feasible support family {∅ ≠ B ⊆ U : B ⊉ A}.
    pub feasible_family: Vec<Mask>,
}

/// Capacity via fractional partitions when no user is silent: minimize
/// I_λ(Z_{V∖D} | Z_D) over fractional partitions supported on subsets not
/// covering A. A second stage maximizes each candidate weight subject to
/// optimality to recover the union of optimal supports.
pub fn capacity_fractional_lp(scn: &Scenario) -> Result<FractionalLpResult> {
    if scn.silent() != 0 {
        return Err(KitError::Validation(
            "fractional-partition capacity requires no silent users".into(),
        ));
    }
    let o = scn.oracle();
    let d = scn.untrusted();
    let u = scn.all() & !d;
    if popcount(u) > 10 {
        return Err(KitError::TooLarge { got: popcount(u), cap: 10 });
    }
    let a = scn.active();
    let family: Vec<Mask> = submasks(u)
        .filter(|&b| b != 0 && a & !b != 0)
        .collect();
    // I_λ = H(Z_U|Z_D) − Σ λ(B) c_B with c_B = H(Z_B | Z_{U∖B}, Z_D);
    // minimizing I_λ maximizes Σ λ(B) c_B.
    let coefs: Vec<Rat> = family.iter().map(|&b| o.cond(b, (u & !b) | d)).collect();
    let mut lp = RationalLP::maximize(family.iter().map(|b| format!("l_{b:b}")).collect());
    lp.objective = coefs.clone();
    for i in bits(u) {
        let terms: Vec<(usize, Rat)> = family
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >> i & 1 == 1)
            .map(|(k, _)| (k, Rat::one()))
            .collect();
        lp.constrain(terms, Cmp::Eq, Rat::one());
    }
    let sol = lp::solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(KitError::Internal("fractional-partition LP did not solve".into()));
    }
    let best_sub = sol.value.clone().unwrap();
    let optimum = o.cond(u, d) - &best_sub;
    let witness_weights: Vec<(Mask, Rat)> = family
        .iter()
        .zip(sol.x.as_ref().unwrap())
        .map(|(&b, w)| (b, w.clone()))
        .collect();
    let witness = FractionalPartition::new(u, witness_weights)?;

    // Second stage: B belongs to some optimal λ iff max λ(B) > 0 on the
    // optimal face.
    let mut support_union = Vec::new();
    for (k, &b) in family.iter().enumerate() {
        let mut stage = lp.clone();
        let obj_terms: Vec<(usize, Rat)> = coefs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j, c.clone()))
            .collect();
        stage.constrain(obj_terms, Cmp::Eq, best_sub.clone());
        stage.objective = vec![Rat::zero(); family.len()];
        stage.objective[k] = Rat::one();
        let s = lp::solve(&stage)?;
        if s.status != LpStatus::Optimal {
            return Err(KitError::Internal("support-maximization LP did not solve".into()));
        }
        if !s.value.unwrap().is_zero() {
            support_union.push(b);
        }
    }
    let mut h_family: Vec<Mask> = support_union
        .iter()
        .flat_map(|&b| [b, u & !b])
        .filter(|&b| b != 0 && b != u)
        .collect();
    h_family.sort();
    h_family.dedup();
    Ok(FractionalLpResult { optimum, support_union, h_family, witness, feasible_family: family })
}

/// Check whether a given fractional partition is optimal for the capacity
/// characterization (feasible support and I_λ equal to the optimum).
pub fn verify_lambda_optimal(
    scn: &Scenario,
    lambda: &FractionalPartition,
    frac: &FractionalLpResult,
) -> Result<bool> {
    let o = scn.oracle();
    let d = scn.untrusted();
    if lambda.universe() != scn.all() & !d {
        return Ok(false);
    }
    if !lambda.support().iter().all(|b| frac.feasible_family.contains(b)) {
        return Ok(false);
    }
    let v = partition::fractional_info(&o, lambda, d)?;
    Ok(eq_within(&v, &frac.optimum, scn.is_exact()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SilentBranch {
    /// Only one vocal user remains: capacity is α outright.
    SingleVocal,
    /// I(Z_{vocal}) < α.
    InteriorBelowAlpha,
    /// I(Z_{vocal}) > α.
    InteriorAboveAlpha,
    /// I(Z_{vocal}) = α.
    InteriorAtAlpha,
}

impl SilentBranch {
    pub fn label(&self) -> &'static str {
        match self {
            SilentBranch::SingleVocal => "|V\\S|=1",
            SilentBranch::InteriorBelowAlpha => "I<alpha",
            SilentBranch::InteriorAboveAlpha => "I>alpha",
            SilentBranch::InteriorAtAlpha => "I=alpha",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SilentCapacity {
    pub alpha: Rat,
    /// Silent users attaining α.
    pub s_star: Mask,
    pub branch: SilentBranch,
    pub c_s: Rat,
    /// I(Z_{vocal} | Z_D) when more than one vocal user remains.
    pub vocal_mmi: Option<Rat>,
}

/// Capacity formula for S ⊊ A = V∖D: α is the smallest mutual information
/// between the vocal pool and a silent user (conditioned on Z_D).
pub fn alpha_and_sstar(scn: &Scenario) -> Result<SilentCapacity> {
    let d = scn.untrusted();
    if scn.active() != scn.all() & !d {
        return Err(KitError::Validation(
            "silent-user capacity formula needs every non-wiretapped user active".into(),
        ));
    }
    if scn.silent() == 0 {
        return Err(KitError::Validation("no silent users in this scenario".into()));
    }
    let o = scn.oracle();
    let vocal_pool = scn.all() & !d & !scn.silent();
    let exact = scn.is_exact();
    let mut alpha: Option<Rat> = None;
    for i in bits(scn.silent()) {
        let mi = o.mutual(vocal_pool, 1 << i, d)?;
        alpha = Some(match alpha {
            None => mi,
            Some(a) => a.min(mi),
        });
    }
    let alpha = alpha.expect("nonempty silent set");
    let mut s_star = 0;
    for i in bits(scn.silent()) {
        if eq_within(&o.mutual(vocal_pool, 1 << i, d)?, &alpha, exact) {
            s_star |= 1 << i;
        }
    }
    if popcount(vocal_pool) == 1 {
        return Ok(SilentCapacity {
            c_s: alpha.clone(),
            alpha,
            s_star,
            branch: SilentBranch::SingleVocal,
            vocal_mmi: None,
        });
    }
    let vocal_i = partition::mmi(&o, vocal_pool, d)?.value;
    let branch = if eq_within(&vocal_i, &alpha, exact) {
        SilentBranch::InteriorAtAlpha
    } else if vocal_i < alpha {
        SilentBranch::InteriorBelowAlpha
    } else {
        SilentBranch::InteriorAboveAlpha
    };
    Ok(SilentCapacity {
        c_s: alpha.clone().min(vocal_i.clone()),
        alpha,
        s_star,
        branch,
        vocal_mmi: Some(vocal_i),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::hypergraph::unit_edges;
    use crate::entropy::{HypergraphSource, SourceModel};
    use crate::ground::Ground;
    use crate::value::{rat, rat_int};

    pub fn chain_scenario(active: &[UserId], untrusted: &[UserId]) -> Scenario {
        let g = Ground::new(vec![1, 2, 3, 4]).unwrap();
        let h =
            HypergraphSource::new(g, unit_edges(&[("a", &[1, 2, 4]), ("b", &[2, 3, 4])])).unwrap();
        Scenario::new(SourceModel::Hypergraph(h), active, &[], untrusted).unwrap()
    }

    fn slack_scenario(active: &[UserId], silent: &[UserId], untrusted: &[UserId]) -> Scenario {
        let g = Ground::new(vec![1, 2, 3]).unwrap();
        let h = HypergraphSource::new(
            g,
            unit_edges(&[("a", &[1, 2]), ("b", &[2, 3]), ("c", &[2, 3])]),
        )
        .unwrap();
        Scenario::new(SourceModel::Hypergraph(h), active, silent, untrusted).unwrap()
    }

    fn pin3_scenario(active: &[UserId], silent: &[UserId]) -> Scenario {
        let g = Ground::new(vec![1, 2, 3]).unwrap();
        let h = HypergraphSource::new(g, unit_edges(&[("a", &[1, 2]), ("b", &[2, 3])])).unwrap();
        Scenario::new(SourceModel::Hypergraph(h), active, silent, &[]).unwrap()
    }

    #[test]
    fn chain_rates_with_wiretapped_relay() {
        let s = chain_scenario(&[2, 4], &[3]);
        let cap = secrecy_capacity(&s).unwrap();
        assert_eq!(cap.rho.rat, rat_int(0));
        assert_eq!(cap.rho_bar.rat, rat_int(0));
        assert_eq!(cap.r_co.rat, rat_int(0));
        assert_eq!(cap.c_s.rat, rat_int(1));

        let s = chain_scenario(&[1, 2, 4], &[3]);
        let cap = secrecy_capacity(&s).unwrap();
        assert_eq!(cap.rho.rat, rat_int(0));
        assert_eq!(cap.rho_bar.rat, rat_int(1));
        assert_eq!(cap.r_co.rat, rat_int(1));
        assert_eq!(cap.c_s.rat, rat_int(1));
    }

    #[test]
    fn wiretapped_pin_capacity() {
        let s = slack_scenario(&[2, 3], &[], &[1]);
        let cap = secrecy_capacity(&s).unwrap();
        assert_eq!(cap.c_s.rat, rat_int(2));
        assert_eq!(cap.rho.rat, rat_int(0));
        assert_eq!(cap.rho_bar.rat, rat_int(1));
        assert_eq!(cap.r_co.rat, rat_int(1));
    }

    #[test]
    fn silent_branches_on_two_edge_pin() {
        // S = {3}: alpha = 1 = I(vocal pool).
        let s = pin3_scenario(&[1, 2, 3], &[3]);
        let sc = alpha_and_sstar(&s).unwrap();
        assert_eq!(sc.alpha, rat_int(1));
        assert_eq!(sc.branch, SilentBranch::InteriorAtAlpha);
        assert_eq!(sc.s_star, s.ground().mask_of(&[3]).unwrap());
        assert_eq!(sc.c_s, rat_int(1));

        // S = {2}: alpha = 2 > I = 0.
        let s = pin3_scenario(&[1, 2, 3], &[2]);
        let sc = alpha_and_sstar(&s).unwrap();
        assert_eq!(sc.alpha, rat_int(2));
        assert_eq!(sc.branch, SilentBranch::InteriorBelowAlpha);
        assert_eq!(sc.c_s, rat_int(0));
        let cap = secrecy_capacity(&s).unwrap();
        assert_eq!(cap.c_s.rat, rat_int(0));
        assert_eq!(cap.r_co.rat, rat_int(2));

        // S = {1,3}: single vocal user, alpha = 1.
        let s = pin3_scenario(&[1, 2, 3], &[1, 3]);
        let sc = alpha_and_sstar(&s).unwrap();
        assert_eq!(sc.alpha, rat_int(1));
        assert_eq!(sc.branch, SilentBranch::SingleVocal);
        assert_eq!(sc.s_star, s.ground().mask_of(&[1, 3]).unwrap());
    }

    #[test]
    fn fractional_lp_on_path_pin_with_helper() {
        let s = pin3_scenario(&[1, 3], &[]);
        let f = capacity_fractional_lp(&s).unwrap();
        assert_eq!(f.optimum, rat_int(1));
        let g = s.ground();
        let expect: Vec<Mask> = vec![
            g.mask_of(&[1]).unwrap(),
            g.mask_of(&[3]).unwrap(),
            g.mask_of(&[1, 2]).unwrap(),
            g.mask_of(&[2, 3]).unwrap(),
        ]
        .into_iter()
        .collect();
        let mut support = f.support_union.clone();
        support.sort();
        let mut expect_sorted = expect.clone();
        expect_sorted.sort();
        assert_eq!(support, expect_sorted);
        // Both stated extreme solutions are optimal.
        let lam1 = FractionalPartition::new(
            0b111,
            vec![(g.mask_of(&[1, 2]).unwrap(), Rat::one()), (g.mask_of(&[3]).unwrap(), Rat::one())],
        )
        .unwrap();
        let lam2 = FractionalPartition::new(
            0b111,
            vec![(g.mask_of(&[1]).unwrap(), Rat::one()), (g.mask_of(&[2, 3]).unwrap(), Rat::one())],
        )
        .unwrap();
        assert!(verify_lambda_optimal(&s, &lam1, &f).unwrap());
        assert!(verify_lambda_optimal(&s, &lam2, &f).unwrap());
    }

    #[test]
    fn two_user_fractional_lp_is_mutual_information() {
        let g = Ground::new(vec![1, 2]).unwrap();
        let h = HypergraphSource::new(
            g,
            unit_edges(&[("a", &[1, 2]), ("b", &[1]), ("c", &[2])]),
        )
        .unwrap();
        let s = Scenario::new(SourceModel::Hypergraph(h), &[1, 2], &[], &[]).unwrap();
        let f = capacity_fractional_lp(&s).unwrap();
        assert_eq!(f.optimum, rat_int(1));
    }

    #[test]
    fn identical_sources_need_no_discussion() {
        let g = Ground::new(vec![1, 2, 3]).unwrap();
        let h = HypergraphSource::new(g, unit_edges(&[("a", &[1, 2, 3])])).unwrap();
        let s = Scenario::new(SourceModel::Hypergraph(h), &[1, 2, 3], &[1, 2], &[]).unwrap();
        let cap = secrecy_capacity(&s).unwrap();
        assert_eq!(cap.rho.rat, rat_int(0));
        assert_eq!(cap.r_co.rat, rat_int(0));
        assert_eq!(cap.c_s.rat, rat_int(1));
    }

    #[test]
    fn specialization_matches_direct_family_when_no_silent_users() {
        // With S = ∅ the folded right-hand sides must equal H(Z_B | Z_{V∖B})
        // over the family {∅ ≠ B ⊆ V∖D : B ⊉ A}.
        for scn in [chain_scenario(&[2, 4], &[3]), chain_scenario(&[1, 2, 4], &[3])] {
            let o = scn.oracle();
            let mut expected: Vec<(Mask, Rat)> = Vec::new();
            for b in submasks(scn.all() & !scn.untrusted()) {
                if b == 0 || scn.active() & !b == 0 {
                    continue;
                }
                expected.push((b, o.cond(b, scn.all() & !b)));
            }
            let mut got = rho_constraints(&scn);
            got.sort_by_key(|(b, _)| *b);
            expected.sort_by_key(|(b, _)| *b);
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn specialization_matches_silent_corollary_family() {
        // With S ⊊ A = V and D = ∅ the folded family must agree with the
        // reduction r(B∖S) ≥ H(Z_{B∖S} | Z_{V∖B}) over B ⊉ A, maximized over
        // placements of the silent users.
        let scn = pin3_scenario(&[1, 2, 3], &[3]);
        let o = scn.oracle();
        let v = scn.all();
        let s = scn.silent();
        let mut expected: std::collections::BTreeMap<Mask, Rat> = Default::default();
        for b in submasks(v) {
            if b == 0 || scn.active() & !b == 0 {
                continue;
            }
            let b_vocal = b & !s;
            if b_vocal == 0 {
                continue;
            }
            let rhs = o.cond(b_vocal, v & !b);
            expected
                .entry(b_vocal)
                .and_modify(|r| {
                    if rhs > *r {
                        *r = rhs.clone()
                    }
                })
                .or_insert(rhs);
        }
        let expected: Vec<(Mask, Rat)> = expected.into_iter().collect();
        let mut got = rho_constraints(&scn);
        got.sort_by_key(|(b, _)| *b);
        assert_eq!(got, expected);
    }

    #[test]
    fn xor_triple_capacity() {
        let g = Ground::new(vec![1, 2, 3]).unwrap();
        let l = crate::entropy::FiniteLinearSource::new(
            g,
            2,
            2,
            vec![vec![vec![1, 0]], vec![vec![0, 1]], vec![vec![1, 1]]],
        )
        .unwrap();
        let s = Scenario::new(SourceModel::Linear(l), &[1, 2, 3], &[], &[]).unwrap();
        let cap = secrecy_capacity(&s).unwrap();
        assert_eq!(cap.c_s.rat, rat(1, 2));
        assert_eq!(cap.r_co.rat, rat(3, 2));
        assert!(cap.cross_checks.iter().all(|c| c.ok));
    }
}
