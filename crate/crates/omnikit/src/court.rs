//! Bounds on the discussion rate of capacity-achieving schemes and the
//! verdict on whether omniscience attains it.
//!
//! Everything here compares against R_CO = ρ + ρ̄. Untrusted helpers are
//! handled by conditioning on Z_D; for hypergraphical sources that equals
//! deleting the wiretapped edges, which leaves ρ unchanged, zeroes ρ̄, and
//! preserves the achievable discussion rate. A decisive check on the reduced
//! scenario therefore pins R_S at ρ exactly when it passes; whether that is
//! optimal depends on ρ̄ alone.

use crate::capacity::{self, CapacityResult, SilentBranch};
use crate::entropy::{gk_common_part, mixture_oracle, EntropyOracle, HypergraphSource, SourceModel};
use crate::error::{KitError, Result};
use crate::ground::{bits, popcount, submasks, Ground, Mask, UserId};
use crate::lp::{self, Cmp, LpStatus, RationalLP};
use crate::partition::{
    enumerate_partitions, fractional_info, partition_info, FractionalPartition, Partition,
};
use crate::scenario::{PlanSpec, Scenario, TransformSpec};
use crate::value::{eq_within, float_tolerance, Rat, Value};
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value as Json};
use std::collections::{BTreeMap, BTreeSet};

pub const GK_EXPANSION_CAP: usize = 1 << 20;

// ---------------------------------------------------------------------------
// Evidence and condition records
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EvidenceKind {
    Lower,
    Upper,
    Decisive,
}

impl EvidenceKind {
    pub fn label(&self) -> &'static str {
        match self {
            EvidenceKind::Lower => "lower",
            EvidenceKind::Upper => "upper",
            EvidenceKind::Decisive => "decisive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Evidence {
    pub kind: EvidenceKind,
    pub tag: String,
    pub value: Option<Value>,
    pub witness: Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CondStatus {
    Pass,
    Fail,
    Unevaluated,
    NotApplicable,
}

impl CondStatus {
    pub fn label(&self) -> &'static str {
        match self {
            CondStatus::Pass => "PASS",
            CondStatus::Fail => "FAIL",
            CondStatus::Unevaluated => "UNEVALUATED",
            CondStatus::NotApplicable => "NOT_APPLICABLE",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Condition {
    pub tag: String,
    pub status: CondStatus,
    pub witness: Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictStatus {
    Optimal,
    Suboptimal,
    Undecided,
}

impl VerdictStatus {
    pub fn label(&self) -> &'static str {
        match self {
            VerdictStatus::Optimal => "OO_OPTIMAL",
            VerdictStatus::Suboptimal => "OO_SUBOPTIMAL",
            VerdictStatus::Undecided => "UNDECIDED",
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub scenario: String,
    pub exact: bool,
    pub capacity: CapacityResult,
    pub verdict: VerdictStatus,
    /// [max lower bound, min upper bound] for R_S; upper includes R_CO.
    pub bracket: (Value, Value),
    pub flags: Vec<String>,
    pub evidence: Vec<Evidence>,
    pub conditions: Vec<Condition>,
}

// ---------------------------------------------------------------------------
// Conditioned view of a scenario
// ---------------------------------------------------------------------------

/// The scenario after conditioning on the wiretapped sources: ground V∖D,
/// conditioned oracle, role masks on the sub-ground, and (for hypergraph
/// backends) the normalized hypergraph with wiretap-incident and
/// silent-only edges removed.
struct View {
    ground: Ground,
    oracle: EntropyOracle,
    active: Mask,
    silent: Mask,
    hyper: Option<HypergraphSource>,
}

impl View {
    fn build(scn: &Scenario) -> Result<View> {
        let d = scn.untrusted();
        let oracle = scn.oracle().condition(d);
        let ground = oracle.ground().clone();
        let active = scn.ground().project(scn.active(), &ground)?;
        let silent = scn.ground().project(scn.silent(), &ground)?;
        let hyper = match &scn.source {
            SourceModel::Hypergraph(h) => Some(
                h.remove_edges_meeting(d)
                    .remove_edges_within(scn.silent())
                    .restrict(ground.ids())?,
            ),
            _ => None,
        };
        Ok(View { ground, oracle, active, silent, hyper })
    }

    fn full(&self) -> Mask {
        self.ground.full_mask()
    }

    fn vocal_pool(&self) -> Mask {
        self.full() & !self.silent
    }

    /// True when every user of the conditioned ground is active.
    fn all_active(&self) -> bool {
        self.active == self.full()
    }
}

fn partition_json(ground: &Ground, p: &Partition) -> Json {
    json!(p.to_ids(ground))
}

fn lambda_json(ground: &Ground, lam: &FractionalPartition) -> Json {
    let rows: Vec<Json> = lam
        .weights()
        .iter()
        .map(|(b, w)| json!({"B": ground.ids_of(*b), "w": w.to_string()}))
        .collect();
    json!(rows)
}

// ---------------------------------------------------------------------------
// Entropic bounds on common information
// ---------------------------------------------------------------------------

/// Dual-total-correlation style quantity for a partition or a general
/// fractional partition: H(Z_U|Z_W) − Σ_B λ(B) H(Z_B | Z_{U∖B}, Z_W).
/// Never exceeds H(Z_U|Z_W).
pub enum BlockWeighting<'a> {
    Blocks(&'a Partition),
    Fractional(&'a FractionalPartition),
}

pub fn jd_partition(oracle: &EntropyOracle, arg: &BlockWeighting, w: Mask) -> Result<Rat> {
    let (value, universe) = match arg {
        BlockWeighting::Blocks(p) => {
            let lam = FractionalPartition::from_partition(p)?;
            (fractional_info(oracle, &lam, w)?, p.universe())
        }
        BlockWeighting::Fractional(lam) => (fractional_info(oracle, lam, w)?, lam.universe()),
    };
    let cap = oracle.cond(universe, w);
    let tol = if oracle.is_exact() { Rat::zero() } else { float_tolerance() };
    if &value - &cap > tol {
        return Err(KitError::Internal(format!(
            "dual total correlation {value} exceeds H = {cap}"
        )));
    }
    Ok(value)
}

/// Common-information value of a partition on a hypergraphical source: the
/// total weight of the edges of U that cross the partition. Both sides of
/// the identity are re-verified on every call: the value must equal the
/// dual total correlation, and conditioning on the crossing edge variables
/// must zero the partition information.
pub fn jw_hypergraph(
    h: &HypergraphSource,
    p: &Partition,
    u: Mask,
) -> Result<(Rat, Vec<String>)> {
    if p.universe() != u {
        return Err(KitError::Validation("partition does not cover the requested set".into()));
    }
    let (weight, labels) = h.crossing_weight(u, p.blocks());
    let oracle = h.oracle();
    let jd = jd_partition(&oracle, &BlockWeighting::Blocks(p), 0)?;
    if jd != weight {
        return Err(KitError::Internal(format!(
            "crossing weight {weight} disagrees with dual total correlation {jd}"
        )));
    }
    let label_set: BTreeSet<String> = labels.iter().cloned().collect();
    let (ext, aux) = h.with_aux_vertex(&label_set)?;
    let ext_oracle = ext.oracle();
    let aux_bit = ext_oracle.ground().singleton(aux)?;
    let residual = partition_info(&ext_oracle, p, aux_bit)?;
    if !residual.is_zero() {
        return Err(KitError::Internal(format!(
            "crossing edges do not break the blocks apart: residual information {residual}"
        )));
    }
    Ok((weight, labels))
}

// ---------------------------------------------------------------------------
// Lower bounds
// ---------------------------------------------------------------------------

fn clamp_nonneg(r: Rat) -> Rat {
    if r.is_negative() {
        Rat::zero()
    } else {
        r
    }
}

/// Every applicable single-letter lower bound on R_S, computed on the
/// wiretap-conditioned scenario.
pub fn lower_bound_rs(scn: &Scenario) -> Result<Vec<Evidence>> {
    let view = View::build(scn)?;
    let exact = scn.is_exact();
    let mut out = Vec::new();
    let mk = |tag: &str, value: Rat, witness: Json| Evidence {
        kind: EvidenceKind::Lower,
        tag: tag.into(),
        value: Some(Value::with_exactness(clamp_nonneg(value), exact)),
        witness,
    };

    let helpers = view.full() & !view.active;
    if view.silent == 0 && helpers == 0 {
        // All users active and vocal: bound through the fundamental partition.
        let m = crate::partition::mmi(&view.oracle, view.full(), 0)?;
        let p_star = &m.fundamental;
        match &view.hyper {
            Some(h) => {
                let (jw, labels) = jw_hypergraph(h, p_star, view.full())?;
                out.push(mk(
                    "thm-lb-no-helper",
                    &jw - &m.value,
                    json!({
                        "partition": partition_json(&view.ground, p_star),
                        "crossing_edges": labels,
                    }),
                ));
            }
            None => {
                let jd = jd_partition(&view.oracle, &BlockWeighting::Blocks(p_star), 0)?;
                out.push(mk(
                    "thm-lb-no-helper",
                    &jd - &m.value,
                    json!({"partition": partition_json(&view.ground, p_star)}),
                ));
            }
        }
    } else if view.silent == 0 {
        // Trusted helpers present: bound via fractional partitions supported
        // on the optimal-support family. All masks here live on the scenario
        // ground (the fractional LP is stated there).
        let frac = capacity::capacity_fractional_lp(scn)?;
        let c_s = frac.optimum.clone();
        let full_oracle = scn.oracle();
        let u = scn.all() & !scn.untrusted();
        let d = scn.untrusted();
        if let Some((best, witness)) =
            max_fractional_info(&full_oracle, u, d, &frac.h_family)?
        {
            out.push(mk(
                "thm-lb-helpers",
                &best - &c_s,
                json!({
                    "family": frac.h_family.iter().map(|&b| scn.ground().ids_of(b)).collect::<Vec<_>>(),
                    "lambda": lambda_json(scn.ground(), &witness),
                }),
            ));
        }
        if let SourceModel::Hypergraph(h) = &scn.source {
            // Strongest form when some optimal fractional partition has
            // partition (or co-partition) shape.
            let reduced = h.remove_edges_meeting(d);
            let mut best: Option<(Rat, Partition)> = None;
            for p in enumerate_partitions(u)? {
                for lam in [
                    FractionalPartition::from_partition(&p),
                    FractionalPartition::co_partition(&p),
                ] {
                    let Ok(lam) = lam else { continue };
                    if !capacity::verify_lambda_optimal(scn, &lam, &frac)? {
                        continue;
                    }
                    let (jw, _) = jw_hypergraph(&reduced, &p, u)?;
                    if best.as_ref().is_none_or(|(b, _)| &jw > b) {
                        best = Some((jw, p.clone()));
                    }
                }
            }
            if let Some((jw, p)) = best {
                out.push(mk(
                    "thm-lb-helpers-jw",
                    &jw - &c_s,
                    json!({"partition": partition_json(scn.ground(), &p)}),
                ));
            }
        }
    } else if helpers == 0 {
        // Silent users, everyone active: branch on alpha.
        let sc = capacity::alpha_and_sstar(scn)?;
        let w_pool = view.vocal_pool();
        let s_star = scn.ground().project(sc.s_star, &view.ground)?;
        match sc.branch {
            SilentBranch::InteriorBelowAlpha => {
                let m = crate::partition::mmi(&view.oracle, w_pool, 0)?;
                let p_star = &m.fundamental;
                match &view.hyper {
                    Some(h) => {
                        let (jw, labels) = jw_hypergraph(h, p_star, w_pool)?;
                        out.push(mk(
                            "thm-lb-hyp-silent-1",
                            &jw - &m.value,
                            json!({
                                "partition": partition_json(&view.ground, p_star),
                                "crossing_edges": labels,
                            }),
                        ));
                    }
                    None => {
                        let jd =
                            jd_partition(&view.oracle, &BlockWeighting::Blocks(p_star), 0)?;
                        out.push(mk(
                            "thm-lb-silent-1",
                            &jd - &m.value,
                            json!({"partition": partition_json(&view.ground, p_star)}),
                        ));
                    }
                }
            }
            SilentBranch::SingleVocal | SilentBranch::InteriorAboveAlpha => {
                match &view.hyper {
                    Some(h) => {
                        let mut blocks = vec![w_pool];
                        blocks.extend(bits(s_star).map(|i| 1u32 << i));
                        let p = Partition::new(blocks)?;
                        let (jw, labels) = jw_hypergraph(h, &p, w_pool | s_star)?;
                        out.push(mk(
                            "thm-lb-hyp-silent-2",
                            &jw - &sc.alpha,
                            json!({
                                "partition": partition_json(&view.ground, &p),
                                "crossing_edges": labels,
                            }),
                        ));
                    }
                    None => {
                        // The entropic weakening collapses to zero: the pair
                        // partition's dual total correlation is alpha itself.
                        let mut best = Rat::zero();
                        let mut wit = json!(null);
                        for i in bits(s_star) {
                            let p = Partition::new(vec![w_pool, 1 << i])?;
                            let jd =
                                jd_partition(&view.oracle, &BlockWeighting::Blocks(&p), 0)?;
                            let v = &jd - &sc.alpha;
                            if v > best {
                                best = v;
                                wit = partition_json(&view.ground, &p);
                            }
                        }
                        out.push(mk("thm-lb-silent-2", best, json!({"partition": wit})));
                    }
                }
            }
            SilentBranch::InteriorAtAlpha => {
                let m = crate::partition::mmi(&view.oracle, w_pool, 0)?;
                let p_star = &m.fundamental;
                match &view.hyper {
                    Some(h) => {
                        let mut blocks = p_star.blocks().to_vec();
                        blocks.extend(bits(s_star).map(|i| 1u32 << i));
                        let p = Partition::new(blocks)?;
                        let (jw, labels) = jw_hypergraph(h, &p, w_pool | s_star)?;
                        out.push(mk(
                            "thm-lb-hyp-silent-3",
                            &jw - &sc.alpha,
                            json!({
                                "partition": partition_json(&view.ground, &p),
                                "crossing_edges": labels,
                            }),
                        ));
                    }
                    None => {
                        let mut best: Option<(Rat, Partition)> = None;
                        for i in bits(s_star) {
                            let mut blocks = p_star.blocks().to_vec();
                            blocks.push(1 << i);
                            let p = Partition::new(blocks)?;
                            let jd =
                                jd_partition(&view.oracle, &BlockWeighting::Blocks(&p), 0)?;
                            let v = &jd - &sc.alpha;
                            if best.as_ref().is_none_or(|(b, _)| &v > b) {
                                best = Some((v, p));
                            }
                        }
                        let (v, p) = best.expect("S* nonempty");
                        out.push(mk(
                            "thm-lb-silent-3",
                            v,
                            json!({"partition": partition_json(&view.ground, &p)}),
                        ));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Maximize I_λ(Z_U | Z_D) over fractional partitions on the ground set `u`
/// supported on `family`, all masks relative to `oracle`'s ground. Returns
/// None when the family cannot cover some user.
fn max_fractional_info(
    oracle: &EntropyOracle,
    u: Mask,
    d: Mask,
    family: &[Mask],
) -> Result<Option<(Rat, FractionalPartition)>> {
    for i in bits(u) {
        if !family.iter().any(|&b| b >> i & 1 == 1) {
            return Ok(None);
        }
    }
    // Maximizing I_λ = H − Σ λ(B) c_B means minimizing the weighted sum.
    let coefs: Vec<Rat> = family.iter().map(|&b| oracle.cond(b, (u & !b) | d)).collect();
    let mut lp = RationalLP::minimize(family.iter().map(|b| format!("l_{b:b}")).collect());
    lp.objective = coefs;
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
        return Ok(None);
    }
    let value = oracle.cond(u, d) - sol.value.unwrap();
    let weights: Vec<(Mask, Rat)> = family
        .iter()
        .zip(sol.x.unwrap())
        .map(|(&b, w)| (b, w))
        .collect();
    Ok(Some((value, FractionalPartition::new(u, weights)?)))
}

// ---------------------------------------------------------------------------
// Sufficient conditions
// ---------------------------------------------------------------------------

/// Sufficient conditions for the omniscience strategy to attain the least
/// capacity-achieving discussion rate on the wiretap-conditioned scenario.
/// A PASS certifies R_S ≥ ρ; it settles optimality outright only when
/// ρ̄ = 0 (in particular whenever D is empty).
pub fn check_oo_sufficient(scn: &Scenario) -> Result<Vec<Condition>> {
    let view = View::build(scn)?;
    let exact = scn.is_exact();
    let zero = |r: &Rat| eq_within(r, &Rat::zero(), exact);
    let mut out = Vec::new();

    let helpers = view.full() & !view.active;
    if view.silent == 0 && helpers == 0 {
        let m = crate::partition::mmi(&view.oracle, view.full(), 0)?;
        let mut witness = json!({"partition": partition_json(&view.ground, &m.fundamental)});
        let mut status = CondStatus::Pass;
        for &c in m.fundamental.blocks() {
            let residual = view.oracle.cond(c, view.full() & !c);
            if !zero(&residual) {
                status = CondStatus::Fail;
                witness = json!({
                    "partition": partition_json(&view.ground, &m.fundamental),
                    "block": view.ground.ids_of(c),
                    "residual_entropy": Value::with_exactness(residual, exact).render(),
                });
                break;
            }
        }
        out.push(Condition { tag: "thm-oo-no-helper".into(), status, witness });
    } else if view.silent == 0 {
        // Scenario-ground masks throughout, matching the fractional LP.
        let frac = capacity::capacity_fractional_lp(scn)?;
        let full_oracle = scn.oracle();
        let u = scn.all() & !scn.untrusted();
        let d = scn.untrusted();
        let zero_family: Vec<Mask> = frac
            .h_family
            .iter()
            .copied()
            .filter(|&b| zero(&full_oracle.cond(b, (u & !b) | d)))
            .collect();
        let feasible = coverage_feasible(u, &zero_family)?;
        let (status, witness) = match feasible {
            Some(lam) => (CondStatus::Pass, json!({"lambda": lambda_json(scn.ground(), &lam)})),
            None => (
                CondStatus::Fail,
                json!({
                    "zero_entropy_family": zero_family
                        .iter()
                        .map(|&b| scn.ground().ids_of(b))
                        .collect::<Vec<_>>(),
                }),
            ),
        };
        out.push(Condition { tag: "thm-oo-helpers".into(), status, witness });
    } else if helpers == 0 {
        let sc = capacity::alpha_and_sstar(scn)?;
        let w_pool = view.vocal_pool();
        let s_star = scn.ground().project(sc.s_star, &view.ground)?;
        match sc.branch {
            SilentBranch::InteriorBelowAlpha => {
                let m = crate::partition::mmi(&view.oracle, w_pool, 0)?;
                let mut status = CondStatus::Pass;
                let mut witness =
                    json!({"partition": partition_json(&view.ground, &m.fundamental)});
                for &c in m.fundamental.blocks() {
                    let residual = view.oracle.cond(c, w_pool & !c);
                    if !zero(&residual) {
                        status = CondStatus::Fail;
                        witness = json!({
                            "block": view.ground.ids_of(c),
                            "residual_entropy": Value::with_exactness(residual, exact).render(),
                        });
                        break;
                    }
                }
                out.push(Condition { tag: "thm-oo-silent-1".into(), status, witness });
            }
            SilentBranch::SingleVocal | SilentBranch::InteriorAboveAlpha => {
                let hit = bits(s_star)
                    .find(|&i| zero(&view.oracle.cond(w_pool, 1 << i)));
                let (status, witness) = match hit {
                    Some(i) => (CondStatus::Pass, json!({"silent_user": view.ground.ids()[i]})),
                    None => (CondStatus::Fail, json!({"s_star": view.ground.ids_of(s_star)})),
                };
                out.push(Condition { tag: "thm-oo-silent-2".into(), status, witness });
            }
            SilentBranch::InteriorAtAlpha => {
                let m = crate::partition::mmi(&view.oracle, w_pool, 0)?;
                let mut pass_user = None;
                for i in bits(s_star) {
                    let all_zero = m
                        .fundamental
                        .blocks()
                        .iter()
                        .all(|&c| zero(&view.oracle.cond(c, (w_pool & !c) | 1 << i)));
                    if all_zero {
                        pass_user = Some(i);
                        break;
                    }
                }
                let (status, witness) = match pass_user {
                    Some(i) => (
                        CondStatus::Pass,
                        json!({
                            "silent_user": view.ground.ids()[i],
                            "partition": partition_json(&view.ground, &m.fundamental),
                        }),
                    ),
                    None => (
                        CondStatus::Fail,
                        json!({
                            "partition": partition_json(&view.ground, &m.fundamental),
                            "s_star": view.ground.ids_of(s_star),
                        }),
                    ),
                };
                out.push(Condition { tag: "thm-oo-silent-3".into(), status, witness });
            }
        }
    }
    Ok(out)
}

/// Does some fractional partition live on `family`? Decided by an LP
/// feasibility test on the coverage equalities.
fn coverage_feasible(u: Mask, family: &[Mask]) -> Result<Option<FractionalPartition>> {
    if family.is_empty() {
        return Ok(None);
    }
    let mut lp = RationalLP::minimize(family.iter().map(|b| format!("l_{b:b}")).collect());
    lp.objective = vec![Rat::zero(); family.len()];
    for i in bits(u) {
        let terms: Vec<(usize, Rat)> = family
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >> i & 1 == 1)
            .map(|(k, _)| (k, Rat::one()))
            .collect();
        if terms.is_empty() {
            return Ok(None);
        }
        lp.constrain(terms, Cmp::Eq, Rat::one());
    }
    let sol = lp::solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Ok(None);
    }
    let weights: Vec<(Mask, Rat)> =
        family.iter().zip(sol.x.unwrap()).map(|(&b, w)| (b, w)).collect();
    Ok(Some(FractionalPartition::new(u, weights)?))
}

// ---------------------------------------------------------------------------
// Decisive checks for hypergraphical sources
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct HypergraphIff {
    pub applicable: bool,
    pub tag: String,
    /// When applicable: does the reduced scenario attain its omniscience
    /// rate, i.e. R_S = ρ?
    pub pinned_at_rho: Option<bool>,
    pub witness: Json,
}

/// Complete characterization for hypergraphical sources with every
/// non-wiretapped user active. On PASS the discussion rate is exactly ρ; on
/// FAIL it is strictly below ρ. Whether omniscience (rate ρ + ρ̄) is optimal
/// then follows by comparing with ρ̄.
pub fn check_oo_hypergraph(scn: &Scenario) -> Result<HypergraphIff> {
    let not_applicable = |why: &str| HypergraphIff {
        applicable: false,
        tag: "thm-hyp-iff".into(),
        pinned_at_rho: None,
        witness: json!({ "reason": why }),
    };
    let view = View::build(scn)?;
    let Some(h) = &view.hyper else {
        return Ok(not_applicable("backend is not hypergraphical"));
    };
    if !view.all_active() {
        return Ok(not_applicable("trusted helpers present"));
    }
    if view.silent == 0 {
        let m = crate::partition::mmi(&view.oracle, view.full(), 0)?;
        let verdict = match h.first_edge_inside(view.full(), m.fundamental.blocks()) {
            Some(e) => HypergraphIff {
                applicable: true,
                tag: "thm-hyp-iff".into(),
                pinned_at_rho: Some(false),
                witness: json!({
                    "edge": e.label,
                    "inside_block": view.ground.ids_of(
                        *m.fundamental.blocks().iter().find(|&&c| e.on & view.full() & !c == 0).unwrap()
                    ),
                    "partition": partition_json(&view.ground, &m.fundamental),
                }),
            },
            None => HypergraphIff {
                applicable: true,
                tag: "thm-hyp-iff".into(),
                pinned_at_rho: Some(true),
                witness: json!({
                    "partition": partition_json(&view.ground, &m.fundamental),
                    "every_edge_crosses": true,
                }),
            },
        };
        return Ok(verdict);
    }
    // Silent users present (S ⊊ A = V∖D), hypergraph branches.
    let sc = capacity::alpha_and_sstar(scn)?;
    let w_pool = view.vocal_pool();
    let s_star = scn.ground().project(sc.s_star, &view.ground)?;
    let (tag, offender): (&str, Option<Json>) = match sc.branch {
        SilentBranch::InteriorBelowAlpha => {
            let m = crate::partition::mmi(&view.oracle, w_pool, 0)?;
            let bad = h.first_edge_inside(w_pool, m.fundamental.blocks());
            (
                "thm-hyp-silent-iff-1",
                bad.map(|e| {
                    json!({
                        "edge": e.label,
                        "partition": partition_json(&view.ground, &m.fundamental),
                    })
                }),
            )
        }
        SilentBranch::SingleVocal | SilentBranch::InteriorAboveAlpha => {
            // H(Z_{vocal} | Z_{S*}) = 0 iff every remaining edge meets S*.
            let bad = h
                .edges()
                .iter()
                .find(|e| e.on & w_pool != 0 && e.on & s_star == 0);
            (
                "thm-hyp-silent-iff-2",
                bad.map(|e| json!({"edge": e.label, "s_star": view.ground.ids_of(s_star)})),
            )
        }
        SilentBranch::InteriorAtAlpha => {
            let m = crate::partition::mmi(&view.oracle, w_pool, 0)?;
            let ground_aug = w_pool | s_star;
            let bad = m.fundamental.blocks().iter().find_map(|&c| {
                h.edges()
                    .iter()
                    .find(|e| e.on & c != 0 && e.on & (ground_aug & !c) == 0)
            });
            (
                "thm-hyp-silent-iff-3",
                bad.map(|e| {
                    json!({
                        "edge": e.label,
                        "partition": partition_json(&view.ground, &m.fundamental),
                        "s_star": view.ground.ids_of(s_star),
                    })
                }),
            )
        }
    };
    Ok(match offender {
        Some(witness) => HypergraphIff {
            applicable: true,
            tag: tag.into(),
            pinned_at_rho: Some(false),
            witness,
        },
        None => HypergraphIff {
            applicable: true,
            tag: tag.into(),
            pinned_at_rho: Some(true),
            witness: json!({"branch": sc.branch.label()}),
        },
    })
}

// ---------------------------------------------------------------------------
// Necessary conditions
// ---------------------------------------------------------------------------

/// Necessary conditions for R_S = R_CO. A FAIL disproves optimality. The
/// common-function check may also pin R_S = 0, returned as upper evidence.
pub fn check_oo_necessary(scn: &Scenario) -> Result<(Vec<Condition>, Vec<Evidence>)> {
    let exact = scn.is_exact();
    let cap = capacity::secrecy_capacity(scn)?;
    let mut conds = Vec::new();
    let mut evidence = Vec::new();

    // Two-user rule: with exactly two users, both active, nothing silent or
    // wiretapped, optimality forces R_CO = 0.
    if scn.ground().len() == 2
        && scn.active() == scn.all()
        && scn.silent() == 0
        && scn.untrusted() == 0
    {
        let ok = eq_within(&cap.r_co.rat, &Rat::zero(), exact);
        conds.push(Condition {
            tag: "pro-two-user".into(),
            status: if ok { CondStatus::Pass } else { CondStatus::Fail },
            witness: json!({"R_CO": cap.r_co.render()}),
        });
    }

    // Silencing vocal active users and dropping the trusted helpers must not
    // shrink the vocal pool's entropy while the capacity is preserved.
    let a = scn.active();
    let s = scn.silent();
    let v_prime_ids = scn.ground().ids_of(a | scn.untrusted());
    let o = scn.oracle();
    let mut violation = None;
    let vocal_actives = a & !s;
    'search: for extra in submasks(vocal_actives) {
        let s_prime = s | extra;
        if s_prime == a {
            continue; // at least one vocal active user must remain
        }
        let v_prime_mask = a | scn.untrusted();
        if s_prime == s && v_prime_mask == scn.all() {
            continue; // identity change
        }
        let source_p = scn.source.restrict(&v_prime_ids)?;
        let scn_p = Scenario::new(
            source_p,
            &scn.ground().ids_of(a),
            &scn.ground().ids_of(s_prime),
            &scn.ground().ids_of(scn.untrusted()),
        )?;
        let cap_p = capacity::secrecy_capacity(&scn_p)?;
        if !eq_within(&cap_p.c_s.rat, &cap.c_s.rat, exact) {
            continue;
        }
        let kept = o.h(scn.all() & !s);
        let shrunk = o.h(v_prime_mask & !s_prime);
        if !eq_within(kept, &shrunk, exact) {
            violation = Some((s_prime, v_prime_mask, kept - shrunk));
            break 'search;
        }
    }
    if popcount(vocal_actives) >= 1 {
        let (status, witness) = match violation {
            Some((s_prime, v_prime, gap)) => (
                CondStatus::Fail,
                json!({
                    "s_prime": scn.ground().ids_of(s_prime),
                    "v_prime": scn.ground().ids_of(v_prime),
                    "entropy_gap": Value::with_exactness(gap, exact).render(),
                }),
            ),
            None => (CondStatus::Pass, json!({"searched": true})),
        };
        conds.push(Condition { tag: "cor-ub-s".into(), status, witness });
    }

    // Common-function route: if the active users share a common variable at
    // least as informative as the capacity, no discussion is needed at all.
    match scn.source.tabularize(GK_EXPANSION_CAP) {
        Ok(tab) => {
            let gk = gk_common_part(&tab, &scn.ground().ids_of(scn.active()))?;
            let h_u_given_d = gk.cond_entropy_given(&scn.ground().ids_of(scn.untrusted()))?;
            // Tabular expansion is float-backed even for exact sources.
            if crate::value::le_within(&cap.c_s.rat, &h_u_given_d.rat, false) {
                evidence.push(Evidence {
                    kind: EvidenceKind::Upper,
                    tag: "cor-ub-o".into(),
                    value: Some(Value::with_exactness(Rat::zero(), exact)),
                    witness: json!({
                        "common_function_entropy_given_wiretap": h_u_given_d.render(),
                        "C_S": cap.c_s.render(),
                    }),
                });
                let ok = eq_within(&cap.r_co.rat, &Rat::zero(), exact);
                conds.push(Condition {
                    tag: "cor-ub-o".into(),
                    status: if ok { CondStatus::Pass } else { CondStatus::Fail },
                    witness: json!({"R_CO": cap.r_co.render()}),
                });
            } else {
                conds.push(Condition {
                    tag: "cor-ub-o".into(),
                    status: CondStatus::NotApplicable,
                    witness: json!({
                        "common_function_entropy_given_wiretap": h_u_given_d.render(),
                    }),
                });
            }
        }
        Err(_) => {
            conds.push(Condition {
                tag: "cor-ub-o".into(),
                status: CondStatus::Unevaluated,
                witness: json!({"reason": "source does not admit tabular expansion"}),
            });
        }
    }
    Ok((conds, evidence))
}

// ---------------------------------------------------------------------------
// Processing upper bound
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum ProcessingOutcome {
    /// The plan satisfies both hypotheses: R_S ≤ R_CO' for the processed
    /// block-mixed source.
    Bound { r_co_prime: Value, evidence: Evidence },
    /// A hypothesis failed; nothing can be concluded from this plan.
    Rejected { hypothesis: String, detail: Json },
}

struct ProcessedBlock {
    prob: Rat,
    source: SourceModel,
}

fn parse_plan_blocks(scn: &Scenario, plan: &PlanSpec) -> Result<Vec<(String, ProcessedBlock)>> {
    if plan.labels.is_empty() {
        return Err(KitError::Malformed("processing plan with no blocks".into()));
    }
    let mut total = Rat::zero();
    let mut blocks = Vec::new();
    for label in &plan.labels {
        let prob = crate::scenario::parse_weight(&label.p)?;
        if prob.is_negative() {
            return Err(KitError::Malformed("negative block probability".into()));
        }
        total += &prob;
        let source = match &scn.source {
            SourceModel::Hypergraph(h) => {
                if !label.map.is_empty() {
                    return Err(KitError::Malformed(
                        "lookup tables do not apply to a hypergraph backend".into(),
                    ));
                }
                let keep: BTreeMap<UserId, BTreeSet<String>> =
                    crate::scenario::plan_user_map(&label.keep)?
                        .into_iter()
                        .map(|(k, v)| (k, v.into_iter().collect()))
                        .collect();
                SourceModel::Hypergraph(h.apply_retention(&keep)?)
            }
            SourceModel::Tabular(t) => {
                if !label.keep.is_empty() {
                    return Err(KitError::Malformed(
                        "edge retention does not apply to a tabular backend".into(),
                    ));
                }
                let maps = crate::scenario::plan_user_map(&label.map)?;
                SourceModel::Tabular(t.apply_tables(&maps)?)
            }
            SourceModel::Linear(_) => {
                return Err(KitError::Unsupported(
                    "processing plans are defined for hypergraph and tabular backends".into(),
                ));
            }
        };
        blocks.push((label.q.clone(), ProcessedBlock { prob, source }));
    }
    if !total.is_one() {
        return Err(KitError::Malformed(format!("block probabilities sum to {total}, not 1")));
    }
    Ok(blocks)
}

/// I(Z'_{V∖D} ∧ Z_D | Z'_D) on the joint (original, processed) source.
fn secrecy_leak(scn: &Scenario, label: &crate::scenario::PlanLabel) -> Result<Rat> {
    let d_ids = scn.ground().ids_of(scn.untrusted());
    let rest_ids = scn.ground().ids_of(scn.all() & !scn.untrusted());
    let (joint_oracle, shift) = match &scn.source {
        SourceModel::Hypergraph(h) => {
            let keep: BTreeMap<UserId, BTreeSet<String>> =
                crate::scenario::plan_user_map(&label.keep)?
                    .into_iter()
                    .map(|(k, v)| (k, v.into_iter().collect()))
                    .collect();
            let (joint, shift) = h.joint_with_processed(&keep)?;
            (joint.oracle(), shift)
        }
        SourceModel::Tabular(t) => {
            let maps = crate::scenario::plan_user_map(&label.map)?;
            let (joint, shift) = t.joint_with_processed(&maps)?;
            (joint.oracle(), shift)
        }
        SourceModel::Linear(_) => {
            return Err(KitError::Unsupported("no processing for linear backends".into()));
        }
    };
    let g = joint_oracle.ground();
    let processed_rest: Vec<UserId> = rest_ids.iter().map(|&i| shift + i).collect();
    let processed_d: Vec<UserId> = d_ids.iter().map(|&i| shift + i).collect();
    let x = g.mask_of(&processed_rest)?;
    let y = g.mask_of(&d_ids)?;
    let w = g.mask_of(&processed_d)?;
    joint_oracle.mutual(x, y, w)
}

/// Verify a processing plan and, when its hypotheses hold, return the
/// omniscience rate of the processed block-mixture as an upper bound on R_S.
pub fn processing_upper_bound(scn: &Scenario, plan: &PlanSpec) -> Result<ProcessingOutcome> {
    let exact = scn.is_exact();
    let blocks = parse_plan_blocks(scn, plan)?;

    // Secrecy hypothesis, per block: processing must not re-expose the
    // wiretapped sources.
    for (label_spec, (name, _)) in plan.labels.iter().zip(&blocks) {
        if scn.untrusted() != 0 {
            let leak = secrecy_leak(scn, label_spec)?;
            if !eq_within(&leak, &Rat::zero(), exact) {
                return Ok(ProcessingOutcome::Rejected {
                    hypothesis: "secrecy".into(),
                    detail: json!({
                        "block": name,
                        "leak": Value::with_exactness(leak, exact).render(),
                    }),
                });
            }
        }
    }

    // Omniscience rate of the block mixture, with the block label known.
    let parts: Vec<(Rat, EntropyOracle)> = blocks
        .iter()
        .map(|(_, b)| (b.prob.clone(), b.source.oracle()))
        .collect();
    let mix = mixture_oracle(&parts)?;
    let (rho_v, _) = capacity::rho_with(scn, &mix)?;
    let (rho_bar_v, _) = capacity::rho_bar_with(scn, &mix)?;
    let r_co_prime = &rho_v + &rho_bar_v;

    // Capacity hypothesis: the processed mixture must still support a key of
    // the original capacity rate.
    let cap = capacity::secrecy_capacity(scn)?;
    let budget = mix.cond(scn.vocal(), 0) - &r_co_prime;
    let holds = if exact { cap.c_s.rat <= budget } else { cap.c_s.rat <= &budget + float_tolerance() };
    if !holds {
        return Ok(ProcessingOutcome::Rejected {
            hypothesis: "capacity".into(),
            detail: json!({
                "C_S": cap.c_s.render(),
                "key_rate_after_processing": Value::with_exactness(budget, exact).render(),
            }),
        });
    }
    let value = Value::with_exactness(r_co_prime, exact);
    let evidence = Evidence {
        kind: EvidenceKind::Upper,
        tag: "thm-ub-processing".into(),
        value: Some(value.clone()),
        witness: json!({
            "plan": plan.name,
            "blocks": blocks.iter().map(|(n, b)| json!({"q": n, "p": b.prob.to_string()})).collect::<Vec<_>>(),
        }),
    };
    Ok(ProcessingOutcome::Bound { r_co_prime: value, evidence })
}

// ---------------------------------------------------------------------------
// Scenario transforms
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CapacityClaim {
    /// C_S' ≤ C_S; equality transfers upper bounds from the new scenario.
    NonIncreasing,
    /// C_S' ≥ C_S; equality transfers lower bounds from the new scenario.
    NonDecreasing,
    /// C_S and R_S both unchanged: everything transfers.
    Invariant,
}

#[derive(Clone, Debug)]
pub struct TransformClaim {
    pub tag: String,
    pub capacity: CapacityClaim,
    pub detail: Json,
}

/// Apply a scenario change backed by a monotonicity statement. The claim
/// says how (C_S, R_S) move; the verdict engine must recompute C_S before
/// exploiting any equality-conditioned direction.
pub fn transform_scenario(
    scn: &Scenario,
    spec: &TransformSpec,
) -> Result<(Scenario, TransformClaim)> {
    let g = scn.ground().clone();
    match spec {
        TransformSpec::SilenceActive { user, copy_id } => {
            let bit = g.singleton(*user)?;
            if scn.active() & bit == 0 || scn.silent() & bit != 0 {
                return Err(KitError::Validation(format!(
                    "user {user} is not a vocal active user"
                )));
            }
            let source = scn.source.duplicate_user(*user, *copy_id)?;
            let mut silent = g.ids_of(scn.silent());
            silent.push(*user);
            let next = Scenario::new(
                source,
                &g.ids_of(scn.active()),
                &silent,
                &g.ids_of(scn.untrusted()),
            )?;
            Ok((
                next,
                TransformClaim {
                    tag: "thm-user-i".into(),
                    capacity: CapacityClaim::NonIncreasing,
                    detail: json!({"silenced": user, "helper_copy": copy_id}),
                },
            ))
        }
        TransformSpec::RemoveTrustedHelper { user } => {
            let bit = g.singleton(*user)?;
            if scn.trusted_helpers() & bit == 0 {
                return Err(KitError::Validation(format!("user {user} is not a trusted helper")));
            }
            let next = remove_user(scn, *user)?;
            Ok((
                next,
                TransformClaim {
                    tag: "thm-user-ii".into(),
                    capacity: CapacityClaim::NonIncreasing,
                    detail: json!({"removed": user}),
                },
            ))
        }
        TransformSpec::RemoveDeterminedHelper { user, by } => {
            let bit = g.singleton(*user)?;
            if scn.trusted_helpers() & bit == 0 {
                return Err(KitError::Validation(format!("user {user} is not a trusted helper")));
            }
            let by_bit = g.singleton(*by)?;
            if scn.silent() & by_bit != 0 {
                return Err(KitError::Validation(format!("witness user {by} must be vocal")));
            }
            let o = scn.oracle();
            let residual = o.cond(bit, by_bit);
            if !eq_within(&residual, &Rat::zero(), scn.is_exact()) {
                return Err(KitError::Validation(format!(
                    "H(Z_{user} | Z_{by}) = {residual} is not zero; the helper is not determined"
                )));
            }
            let next = remove_user(scn, *user)?;
            Ok((
                next,
                TransformClaim {
                    tag: "thm-lb-user1-ii".into(),
                    capacity: CapacityClaim::Invariant,
                    detail: json!({"removed": user, "determined_by": by}),
                },
            ))
        }
        TransformSpec::RemoveSilent { user } => {
            let bit = g.singleton(*user)?;
            if scn.silent() & bit == 0 {
                return Err(KitError::Validation(format!("user {user} is not silent")));
            }
            let keep: Vec<UserId> = g.ids().iter().copied().filter(|&i| i != *user).collect();
            let source = scn.source.restrict(&keep)?;
            let next = Scenario::new(
                source,
                &g.ids_of(scn.active() & !bit),
                &g.ids_of(scn.silent() & !bit),
                &g.ids_of(scn.untrusted()),
            )?;
            Ok((
                next,
                TransformClaim {
                    tag: "thm-lb-user2-i".into(),
                    capacity: CapacityClaim::NonDecreasing,
                    detail: json!({"removed": user}),
                },
            ))
        }
        TransformSpec::VocalizeSilent { user } => {
            let bit = g.singleton(*user)?;
            if scn.silent() & bit == 0 {
                return Err(KitError::Validation(format!("user {user} is not silent")));
            }
            let next = scn.with_roles(
                scn.source.clone(),
                &g.ids_of(scn.active()),
                &g.ids_of(scn.silent() & !bit),
                &g.ids_of(scn.untrusted()),
            )?;
            Ok((
                next,
                TransformClaim {
                    tag: "thm-lb-user2-ii".into(),
                    capacity: CapacityClaim::NonDecreasing,
                    detail: json!({"vocalized": user}),
                },
            ))
        }
        TransformSpec::UntrustedToSilent { .. } => Err(KitError::Unsupported(
            "silencing an untrusted user yields a silent untrusted user, outside the supported \
             scenario shapes"
                .into(),
        )),
        TransformSpec::DropWiretappedEdges => {
            let SourceModel::Hypergraph(h) = &scn.source else {
                return Err(KitError::Unsupported("edge removal needs a hypergraph".into()));
            };
            let next =
                scn.with_source(SourceModel::Hypergraph(h.remove_edges_meeting(scn.untrusted())))?;
            Ok((
                next,
                TransformClaim {
                    tag: "cor-dx".into(),
                    capacity: CapacityClaim::Invariant,
                    detail: json!({"dropped_edges_meeting": g.ids_of(scn.untrusted())}),
                },
            ))
        }
        TransformSpec::DropSilentOnlyEdges => {
            let SourceModel::Hypergraph(h) = &scn.source else {
                return Err(KitError::Unsupported("edge removal needs a hypergraph".into()));
            };
            let next =
                scn.with_source(SourceModel::Hypergraph(h.remove_edges_within(scn.silent())))?;
            Ok((
                next,
                TransformClaim {
                    tag: "pro-hypred".into(),
                    capacity: CapacityClaim::Invariant,
                    detail: json!({"dropped_edges_within": g.ids_of(scn.silent())}),
                },
            ))
        }
    }
}

fn remove_user(scn: &Scenario, user: UserId) -> Result<Scenario> {
    let g = scn.ground();
    let keep: Vec<UserId> = g.ids().iter().copied().filter(|&i| i != user).collect();
    let source = scn.source.restrict(&keep)?;
    Scenario::new(
        source,
        &g.ids_of(scn.active()),
        &g.ids_of(scn.silent()),
        &g.ids_of(scn.untrusted()),
    )
}

// ---------------------------------------------------------------------------
// The verdict engine
// ---------------------------------------------------------------------------

struct Decider {
    exact: bool,
    sensitive: bool,
}

impl Decider {
    fn new(exact: bool) -> Self {
        Decider { exact, sensitive: false }
    }

    fn eq(&mut self, a: &Rat, b: &Rat) -> bool {
        if self.exact {
            return a == b;
        }
        let gap = (a - b).abs();
        if gap <= float_tolerance() {
            return true;
        }
        if gap <= float_tolerance() * Rat::from(num_bigint::BigInt::from(10)) {
            self.sensitive = true;
        }
        false
    }

    fn lt(&mut self, a: &Rat, b: &Rat) -> bool {
        !self.eq(a, b) && a < b
    }
}

pub fn analyze(
    scn: &Scenario,
    extra_plans: &[PlanSpec],
    extra_transforms: &[TransformSpec],
) -> Result<AnalysisReport> {
    analyze_inner(scn, extra_plans, extra_transforms, true)
}

fn analyze_inner(
    scn: &Scenario,
    extra_plans: &[PlanSpec],
    extra_transforms: &[TransformSpec],
    follow_transforms: bool,
) -> Result<AnalysisReport> {
    let exact = scn.is_exact();
    let mut dec = Decider::new(exact);
    let cap = capacity::secrecy_capacity(scn)?;
    let mut evidence: Vec<Evidence> = Vec::new();
    let mut conditions: Vec<Condition> = Vec::new();
    let mut flags: Vec<String> = Vec::new();
    let zero = Rat::zero();

    // Omniscience for free: nothing can beat a zero rate.
    if dec.eq(&cap.r_co.rat, &zero) {
        evidence.push(Evidence {
            kind: EvidenceKind::Decisive,
            tag: "rco-zero".into(),
            value: Some(cap.r_co.clone()),
            witness: json!({}),
        });
        let bracket = (Value::with_exactness(zero.clone(), exact), cap.r_co.clone());
        return Ok(AnalysisReport {
            scenario: scn.summary(),
            exact,
            capacity: cap,
            verdict: VerdictStatus::Optimal,
            bracket,
            flags,
            evidence,
            conditions,
        });
    }

    // Zero capacity: the empty scheme achieves it, so R_S = 0.
    if dec.eq(&cap.c_s.rat, &zero) {
        evidence.push(Evidence {
            kind: EvidenceKind::Upper,
            tag: "cs-zero".into(),
            value: Some(Value::with_exactness(zero.clone(), exact)),
            witness: json!({"C_S": cap.c_s.render()}),
        });
    }

    // Wiretap normalization: dropping wiretapped edges preserves C_S and R_S
    // but can shrink the omniscience rate, which upper-bounds R_S.
    if let SourceModel::Hypergraph(h) = &scn.source {
        if scn.untrusted() != 0 || scn.silent() != 0 {
            let reduced = h
                .remove_edges_meeting(scn.untrusted())
                .remove_edges_within(scn.silent());
            let norm = scn.with_source(SourceModel::Hypergraph(reduced))?;
            let norm_cap = capacity::secrecy_capacity(&norm)?;
            if norm_cap.c_s.rat != cap.c_s.rat {
                return Err(KitError::Internal(format!(
                    "edge normalization changed the capacity: {} vs {}",
                    cap.c_s.rat, norm_cap.c_s.rat
                )));
            }
            if norm_cap.r_co.rat < cap.r_co.rat {
                evidence.push(Evidence {
                    kind: EvidenceKind::Upper,
                    tag: "cor-dx".into(),
                    value: Some(norm_cap.r_co.clone()),
                    witness: json!({"normalized_R_CO": norm_cap.r_co.render()}),
                });
            }
        }
    }

    // Decisive characterization for hypergraphical sources.
    let mut decisive_optimal = false;
    let mut decisive_suboptimal = false;
    let iff = check_oo_hypergraph(scn)?;
    if iff.applicable {
        match iff.pinned_at_rho {
            Some(true) => {
                // R_S is exactly rho; omniscience is optimal iff rho_bar = 0.
                evidence.push(Evidence {
                    kind: EvidenceKind::Lower,
                    tag: iff.tag.clone(),
                    value: Some(cap.rho.clone()),
                    witness: iff.witness.clone(),
                });
                evidence.push(Evidence {
                    kind: EvidenceKind::Upper,
                    tag: iff.tag.clone(),
                    value: Some(cap.rho.clone()),
                    witness: iff.witness.clone(),
                });
                if dec.eq(&cap.rho_bar.rat, &zero) {
                    decisive_optimal = true;
                    evidence.push(Evidence {
                        kind: EvidenceKind::Decisive,
                        tag: iff.tag.clone(),
                        value: Some(cap.rho.clone()),
                        witness: iff.witness.clone(),
                    });
                } else {
                    decisive_suboptimal = true;
                }
            }
            Some(false) => {
                decisive_suboptimal = true;
                evidence.push(Evidence {
                    kind: EvidenceKind::Decisive,
                    tag: iff.tag.clone(),
                    value: None,
                    witness: iff.witness.clone(),
                });
            }
            None => {}
        }
    }

    // Sufficient conditions: a PASS pins R_S at rho or better, which settles
    // optimality whenever nothing must be spent on the wiretapped users.
    let sufficient = check_oo_sufficient(scn)?;
    let sufficient_pass = sufficient.iter().any(|c| c.status == CondStatus::Pass);
    let rho_bar_zero = dec.eq(&cap.rho_bar.rat, &zero);
    for c in &sufficient {
        if c.status == CondStatus::Pass && rho_bar_zero {
            evidence.push(Evidence {
                kind: EvidenceKind::Decisive,
                tag: c.tag.clone(),
                value: None,
                witness: c.witness.clone(),
            });
        }
    }
    conditions.extend(sufficient);

    // Necessary conditions: a FAIL disproves optimality.
    let (necessary, nec_evidence) = check_oo_necessary(scn)?;
    let necessary_fail = necessary
        .iter()
        .any(|c| c.status == CondStatus::Fail);
    for c in &necessary {
        if c.status == CondStatus::Fail {
            evidence.push(Evidence {
                kind: EvidenceKind::Decisive,
                tag: c.tag.clone(),
                value: None,
                witness: c.witness.clone(),
            });
        }
    }
    conditions.extend(necessary);
    evidence.extend(nec_evidence);

    // Single-letter lower bounds.
    evidence.extend(lower_bound_rs(scn)?);

    // User-supplied processing plans.
    for plan in scn.plans.iter().chain(extra_plans) {
        match processing_upper_bound(scn, plan)? {
            ProcessingOutcome::Bound { evidence: e, .. } => evidence.push(e),
            ProcessingOutcome::Rejected { hypothesis, detail } => {
                conditions.push(Condition {
                    tag: format!("plan-rejected-{hypothesis}"),
                    status: CondStatus::Unevaluated,
                    witness: detail,
                });
            }
        }
    }

    // Transform chain: analyze the transformed scenario and carry its
    // bracket back across the certified monotonicity claims.
    if follow_transforms {
        let chain: Vec<TransformSpec> =
            scn.transforms.iter().chain(extra_transforms).cloned().collect();
        if !chain.is_empty() {
            if let Some(ev) = transform_chain_evidence(scn, &cap, &chain, &mut dec)? {
                evidence.extend(ev);
            }
        }
    }

    // Aggregate.
    let mut lower = zero.clone();
    let mut upper = cap.r_co.rat.clone();
    for e in &evidence {
        let Some(v) = &e.value else { continue };
        match e.kind {
            EvidenceKind::Lower => {
                if v.rat > lower {
                    lower = v.rat.clone();
                }
            }
            EvidenceKind::Upper => {
                if v.rat < upper {
                    upper = v.rat.clone();
                }
            }
            EvidenceKind::Decisive => {}
        }
    }
    if lower > &upper + if exact { zero.clone() } else { float_tolerance() } {
        return Err(KitError::Internal(format!(
            "evidence conflict: lower bound {lower} exceeds upper bound {upper}"
        )));
    }
    if dec.eq(&lower, &cap.r_co.rat) {
        decisive_optimal = true;
    }
    if dec.lt(&upper, &cap.r_co.rat) {
        decisive_suboptimal = true;
    }
    if sufficient_pass && rho_bar_zero {
        decisive_optimal = true;
    }
    if necessary_fail {
        decisive_suboptimal = true;
    }
    if decisive_optimal && decisive_suboptimal {
        return Err(KitError::Internal(
            "conflicting evidence: optimality both proved and refuted".into(),
        ));
    }
    let mut verdict = if decisive_optimal {
        VerdictStatus::Optimal
    } else if decisive_suboptimal {
        VerdictStatus::Suboptimal
    } else {
        VerdictStatus::Undecided
    };
    if dec.sensitive {
        flags.push("TOLERANCE_SENSITIVE".into());
        verdict = VerdictStatus::Undecided;
    }
    if verdict == VerdictStatus::Optimal {
        // R_S = R_CO proved: collapse the bracket.
        lower = cap.r_co.rat.clone();
        upper = cap.r_co.rat.clone();
    }
    evidence.sort_by(|a, b| (a.kind, &a.tag).cmp(&(b.kind, &b.tag)));
    Ok(AnalysisReport {
        scenario: scn.summary(),
        exact,
        capacity: cap,
        verdict,
        bracket: (
            Value::with_exactness(lower, exact),
            Value::with_exactness(upper, exact),
        ),
        flags,
        evidence,
        conditions,
    })
}

/// Walk a transform chain, certifying each claim, and translate the final
/// scenario's bracket into evidence about the original one.
fn transform_chain_evidence(
    scn: &Scenario,
    cap: &CapacityResult,
    chain: &[TransformSpec],
    dec: &mut Decider,
) -> Result<Option<Vec<Evidence>>> {
    let mut current = scn.clone();
    current.plans.clear();
    current.transforms.clear();
    let mut transfer_upper = true;
    let mut transfer_lower = true;
    let mut steps = Vec::new();
    let mut prev_c_s = cap.c_s.rat.clone();
    for spec in chain {
        let (next, claim) = transform_scenario(&current, spec)?;
        let next_cap = capacity::secrecy_capacity(&next)?;
        let equal = dec.eq(&next_cap.c_s.rat, &prev_c_s);
        match claim.capacity {
            CapacityClaim::Invariant => {
                if !equal {
                    return Err(KitError::Internal(format!(
                        "transform {} claims capacity invariance but C_S moved",
                        claim.tag
                    )));
                }
            }
            CapacityClaim::NonIncreasing => {
                if !equal {
                    // Capacity dropped: the new scenario says nothing about R_S.
                    return Ok(None);
                }
                transfer_lower = false;
            }
            CapacityClaim::NonDecreasing => {
                if !equal {
                    return Ok(None);
                }
                transfer_upper = false;
            }
        }
        steps.push(json!({"transform": claim.tag, "detail": claim.detail}));
        prev_c_s = next_cap.c_s.rat;
        current = next;
    }
    let report = analyze_inner(&current, &[], &[], false)?;
    let mut out = Vec::new();
    if transfer_lower {
        out.push(Evidence {
            kind: EvidenceKind::Lower,
            tag: "transform-chain".into(),
            value: Some(report.bracket.0.clone()),
            witness: json!({"steps": steps, "final_scenario": report.scenario}),
        });
    }
    if transfer_upper {
        out.push(Evidence {
            kind: EvidenceKind::Upper,
            tag: "transform-chain".into(),
            value: Some(report.bracket.1.clone()),
            witness: json!({"steps": steps, "final_scenario": report.scenario}),
        });
    }
    Ok(Some(out))
}
