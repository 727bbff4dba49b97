//! Exact rational linear programming.
//!
//! Two-phase dense simplex with Bland's anti-cycling rule over `BigRational`.
//! Every optimal solve carries a dual certificate: the multipliers are
//! recovered from the final basis and checked for dual feasibility and strong
//! duality in exact arithmetic. `--trace-lp` dumps variables, tableau sizes
//! and pivots to stderr.

use crate::error::{KitError, Result};
use crate::value::Rat;
use num_traits::{One, Signed, Zero};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

static TRACE_LP: AtomicBool = AtomicBool::new(false);
static CERTIFIED_SOLVES: AtomicU64 = AtomicU64::new(0);

pub fn set_trace(enabled: bool) {
    TRACE_LP.store(enabled, Ordering::Relaxed);
}

fn tracing() -> bool {
    TRACE_LP.load(Ordering::Relaxed)
}

/// Number of optimal solves whose dual certificate checked out. Every
/// optimal solve must certify or error, so this counts them all.
pub fn certified_solve_count() -> u64 {
    CERTIFIED_SOLVES.load(Ordering::Relaxed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    /// Sparse row: (variable index, coefficient).
    pub terms: Vec<(usize, Rat)>,
    pub cmp: Cmp,
    pub rhs: Rat,
}

/// A finite LP with named variables. Variables are nonnegative unless marked
/// free; free variables are split internally.
#[derive(Clone, Debug)]
pub struct RationalLP {
    pub names: Vec<String>,
    pub free: Vec<bool>,
    pub maximize: bool,
    pub objective: Vec<Rat>,
    pub constraints: Vec<Constraint>,
}

impl RationalLP {
    pub fn minimize(names: Vec<String>) -> Self {
        let n = names.len();
        RationalLP {
            names,
            free: vec![false; n],
            maximize: false,
            objective: vec![Rat::zero(); n],
            constraints: Vec::new(),
        }
    }

    pub fn maximize(names: Vec<String>) -> Self {
        let mut lp = Self::minimize(names);
        lp.maximize = true;
        lp
    }

    pub fn constrain(&mut self, terms: Vec<(usize, Rat)>, cmp: Cmp, rhs: Rat) {
        self.constraints.push(Constraint { terms, cmp, rhs });
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value in the user's orientation (present iff Optimal).
    pub value: Option<Rat>,
    pub x: Option<Vec<Rat>>,
    /// Dual certificate verified (strong duality + dual feasibility).
    pub dual_certified: bool,
}

/// Standard-form program: min c·x s.t. Ax = b, x >= 0, b >= 0.
struct Standard {
    rows: usize,
    cols: usize,
    a: Vec<Vec<Rat>>,
    b: Vec<Rat>,
    c: Vec<Rat>,
    /// For each original variable: (positive-part col, optional negative-part col).
    var_map: Vec<(usize, Option<usize>)>,
}

fn build_standard(lp: &RationalLP) -> Standard {
    let n = lp.names.len();
    let mut cols = 0usize;
    let mut var_map = Vec::with_capacity(n);
    for j in 0..n {
        if lp.free[j] {
            var_map.push((cols, Some(cols + 1)));
            cols += 2;
        } else {
            var_map.push((cols, None));
            cols += 1;
        }
    }
    let slack_base = cols;
    let n_slacks = lp
        .constraints
        .iter()
        .filter(|r| r.cmp != Cmp::Eq)
        .count();
    cols += n_slacks;

    let rows = lp.constraints.len();
    let mut a = vec![vec![Rat::zero(); cols]; rows];
    let mut b = Vec::with_capacity(rows);
    let mut slack = slack_base;
    for (i, con) in lp.constraints.iter().enumerate() {
        for (j, coef) in &con.terms {
            let (pos, neg) = &var_map[*j];
            a[i][*pos] += coef.clone();
            if let Some(negc) = neg {
                a[i][*negc] -= coef.clone();
            }
        }
        match con.cmp {
            Cmp::Le => {
                a[i][slack] = Rat::one();
                slack += 1;
            }
            Cmp::Ge => {
                a[i][slack] = -Rat::one();
                slack += 1;
            }
            Cmp::Eq => {}
        }
        b.push(con.rhs.clone());
    }
    // Normalize to b >= 0.
    for i in 0..rows {
        if b[i].is_negative() {
            b[i] = -b[i].clone();
            for v in a[i].iter_mut() {
                *v = -v.clone();
            }
        }
    }
    let mut c = vec![Rat::zero(); cols];
    for j in 0..n {
        let sign = if lp.maximize { -Rat::one() } else { Rat::one() };
        let (pos, neg) = &var_map[j];
        c[*pos] = &sign * &lp.objective[j];
        if let Some(negc) = neg {
            c[*negc] = -c[*pos].clone();
        }
    }
    Standard { rows, cols, a, b, c, var_map }
}

/// Dense tableau simplex state. The tableau holds the constraint rows plus a
/// cost row; `basis[i]` is the column basic in row `i`.
struct Tableau {
    rows: usize,
    cols: usize,
    t: Vec<Vec<Rat>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        if tracing() {
            eprintln!("lp: pivot row {r} col {c} (leaving {})", self.basis[r]);
        }
        let piv = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v /= &piv;
        }
        for i in 0..=self.rows {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let factor = self.t[i][c].clone();
            for j in 0..=self.cols {
                let delta = &factor * &self.t[r][j];
                self.t[i][j] -= delta;
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule: entering = lowest-index column with negative reduced
    /// cost; leaving = lowest ratio, ties broken by lowest basis column.
    fn run(&mut self, active_cols: usize) -> LpStatus {
        loop {
            let mut enter = None;
            for j in 0..active_cols {
                if self.t[self.rows][j].is_negative() {
                    enter = Some(j);
                    break;
                }
            }
            let Some(c) = enter else {
                return LpStatus::Optimal;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows {
                if self.t[i][c].is_positive() {
                    let ratio = &self.t[i][self.cols] / &self.t[i][c];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return LpStatus::Unbounded;
            };
            self.pivot(r, c);
        }
    }
}

fn solve_standard(std_form: &Standard) -> (LpStatus, Option<(Rat, Vec<Rat>, Vec<usize>)>) {
    let m = std_form.rows;
    let n = std_form.cols;
    if tracing() {
        eprintln!("lp: standard form {m} rows x {n} cols");
        if m <= 24 && n <= 24 {
            for i in 0..m {
                let row: Vec<String> =
                    std_form.a[i].iter().map(|v| v.to_string()).collect();
                eprintln!("lp: [{}] = {}", row.join(" "), std_form.b[i]);
            }
            let costs: Vec<String> = std_form.c.iter().map(|v| v.to_string()).collect();
            eprintln!("lp: cost [{}]", costs.join(" "));
        }
    }
    // Phase 1 tableau with artificial columns n..n+m.
    let total = n + m;
    let mut t = vec![vec![Rat::zero(); total + 1]; m + 1];
    for i in 0..m {
        for j in 0..n {
            t[i][j] = std_form.a[i][j].clone();
        }
        t[i][n + i] = Rat::one();
        t[i][total] = std_form.b[i].clone();
    }
    // Phase-1 cost: minimize sum of artificials; express in reduced form.
    for j in 0..=total {
        let mut s = Rat::zero();
        for i in 0..m {
            s += &t[i][j];
        }
        t[m][j] = if j < n || j == total { -s } else { Rat::zero() };
    }
    let mut tab = Tableau { rows: m, cols: total, t, basis: (n..n + m).collect() };
    let st = tab.run(total);
    debug_assert_eq!(st, LpStatus::Optimal, "phase 1 cannot be unbounded");
    if !tab.t[m][total].is_zero() {
        return (LpStatus::Infeasible, None);
    }
    // Drive remaining artificials out of the basis where possible.
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(c) = (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                tab.pivot(i, c);
            }
        }
    }
    // Phase 2: replace the cost row by reduced costs of the real objective.
    for j in 0..=total {
        tab.t[m][j] = if j < n { std_form.c[j].clone() } else { Rat::zero() };
    }
    for i in 0..m {
        let bj = tab.basis[i];
        if bj < n && !std_form.c[bj].is_zero() {
            let factor = std_form.c[bj].clone();
            for j in 0..=total {
                let delta = &factor * &tab.t[i][j];
                tab.t[m][j] -= delta;
            }
        }
        // Rows still basic in an artificial have zero b; their cost stays 0.
    }
    // Artificial columns stay out of the active range so they never re-enter.
    let st = tab.run(n);
    if st == LpStatus::Unbounded {
        return (LpStatus::Unbounded, None);
    }
    let mut x = vec![Rat::zero(); n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.t[i][total].clone();
        }
    }
    let mut value = Rat::zero();
    for j in 0..n {
        value += &std_form.c[j] * &x[j];
    }
    (LpStatus::Optimal, Some((value, x, tab.basis.clone())))
}

/// Recover dual multipliers for the equality-form program from the final
/// basis by solving Bᵀy = c_B, then verify Aᵀy <= c and yᵀb = optimum.
fn certify_dual(std_form: &Standard, basis: &[usize], optimum: &Rat) -> Result<()> {
    let m = std_form.rows;
    // Build Bᵀ | c_B, treating artificial basis columns as unit columns with
    // zero cost (valid: their rows carry zero b after a feasible phase 1).
    let mut mat = vec![vec![Rat::zero(); m + 1]; m];
    for (k, &bj) in basis.iter().enumerate() {
        for i in 0..m {
            // row k of Bᵀ is column `bj` of A (or unit e_i for artificials)
            mat[k][i] = if bj < std_form.cols {
                std_form.a[i][bj].clone()
            } else if bj - std_form.cols == i {
                Rat::one()
            } else {
                Rat::zero()
            };
        }
        mat[k][m] = if bj < std_form.cols { std_form.c[bj].clone() } else { Rat::zero() };
    }
    let y = gaussian_solve(&mut mat, m)
        .ok_or_else(|| KitError::Internal("singular basis in dual recovery".into()))?;
    // Dual feasibility: c_j - a_jᵀ y >= 0 for every column.
    for j in 0..std_form.cols {
        let mut red = std_form.c[j].clone();
        for i in 0..m {
            red -= &std_form.a[i][j] * &y[i];
        }
        if red.is_negative() {
            return Err(KitError::Internal(format!(
                "dual infeasibility at column {j}: reduced cost {red}"
            )));
        }
    }
    let mut dual_value = Rat::zero();
    for i in 0..m {
        dual_value += &y[i] * &std_form.b[i];
    }
    if &dual_value != optimum {
        return Err(KitError::Internal(format!(
            "strong duality failed: primal {optimum} vs dual {dual_value}"
        )));
    }
    Ok(())
}

/// Solve an n x n system given as rows of [A | b]; returns None if singular.
fn gaussian_solve(mat: &mut [Vec<Rat>], n: usize) -> Option<Vec<Rat>> {
    for col in 0..n {
        let pivot = (col..n).find(|&r| !mat[r][col].is_zero())?;
        mat.swap(col, pivot);
        let piv = mat[col][col].clone();
        for v in mat[col].iter_mut() {
            *v /= &piv;
        }
        for r in 0..n {
            if r != col && !mat[r][col].is_zero() {
                let f = mat[r][col].clone();
                for j in 0..=n {
                    let delta = &f * &mat[col][j];
                    mat[r][j] -= delta;
                }
            }
        }
    }
    Some((0..n).map(|i| mat[i][n].clone()).collect())
}

/// Solve the LP; status encodes infeasibility/unboundedness. Optimal solves
/// are dual-certified in exact arithmetic.
pub fn solve(lp: &RationalLP) -> Result<LpSolution> {
    if tracing() {
        eprintln!(
            "lp: {} {} vars, {} constraints: [{}]",
            if lp.maximize { "maximize" } else { "minimize" },
            lp.names.len(),
            lp.constraints.len(),
            lp.names.join(", ")
        );
    }
    let std_form = build_standard(lp);
    let (status, sol) = solve_standard(&std_form);
    match status {
        LpStatus::Optimal => {
            let (value, xs, basis) = sol.unwrap();
            certify_dual(&std_form, &basis, &value)?;
            CERTIFIED_SOLVES.fetch_add(1, Ordering::Relaxed);
            let mut x = Vec::with_capacity(lp.names.len());
            for (pos, neg) in &std_form.var_map {
                let mut v = xs[*pos].clone();
                if let Some(n) = neg {
                    v -= xs[*n].clone();
                }
                x.push(v);
            }
            let user_value = if lp.maximize { -value } else { value };
            Ok(LpSolution {
                status: LpStatus::Optimal,
                value: Some(user_value),
                x: Some(x),
                dual_certified: true,
            })
        }
        st => Ok(LpSolution { status: st, value: None, x: None, dual_certified: false }),
    }
}

/// Solve, then refine to the lexicographically smallest optimal solution by
/// minimizing each variable in turn on the optimal face. Intended for the
/// small rate LPs whose vertex is reported.
pub fn solve_lex_min(lp: &RationalLP) -> Result<LpSolution> {
    let first = solve(lp)?;
    if first.status != LpStatus::Optimal {
        return Ok(first);
    }
    let opt = first.value.clone().unwrap();
    let mut work = lp.clone();
    let n = lp.names.len();
    // Pin the objective, then minimize variables one by one.
    let obj_terms: Vec<(usize, Rat)> = lp
        .objective
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| (j, c.clone()))
        .collect();
    work.constrain(obj_terms, Cmp::Eq, opt.clone());
    work.maximize = false;
    let mut fixed = Vec::new();
    for j in 0..n {
        work.objective = vec![Rat::zero(); n];
        work.objective[j] = Rat::one();
        let step = solve(&work)?;
        let xj = match (&step.status, &step.x) {
            (LpStatus::Optimal, Some(x)) => x[j].clone(),
            _ => return Err(KitError::Internal("lexicographic refinement lost feasibility".into())),
        };
        work.constrain(vec![(j, Rat::one())], Cmp::Eq, xj.clone());
        fixed.push(xj);
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value: Some(opt),
        x: Some(fixed),
        dual_certified: first.dual_certified,
    })
}
