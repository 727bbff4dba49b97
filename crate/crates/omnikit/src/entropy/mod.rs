//! Source models and the entropy oracle they induce.
//!
//! An oracle is a dense table of h(B) over all subsets of its ground set,
//! built once at construction. Hypergraph and GF(2)-linear backends are
//! exact; tabular (and odd-prime linear) backends carry float provenance and
//! a 1e-9 comparison tolerance.

pub mod hypergraph;
pub mod linear;
pub mod tabular;

pub use hypergraph::HypergraphSource;
pub use linear::FiniteLinearSource;
pub use tabular::{gk_common_part, Channel, GkCommonPart, TabularSource};

use crate::error::{KitError, Result};
use crate::ground::{bits, submasks, Ground, Mask, UserId};
use crate::value::{float_tolerance, Rat, Value};
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueKind {
    Exact,
    Float,
}

impl ValueKind {
    pub fn merge(self, other: ValueKind) -> ValueKind {
        if self == ValueKind::Exact && other == ValueKind::Exact {
            ValueKind::Exact
        } else {
            ValueKind::Float
        }
    }
}

/// Entropy oracle over a ground set: `table[mask] = h(mask)` in bits.
#[derive(Clone, Debug)]
pub struct EntropyOracle {
    ground: Ground,
    table: Vec<Rat>,
    kind: ValueKind,
}

impl EntropyOracle {
    pub fn from_table(ground: Ground, table: Vec<Rat>, kind: ValueKind) -> Result<Self> {
        if table.len() != 1 << ground.len() {
            return Err(KitError::Internal(format!(
                "oracle table length {} does not match ground size {}",
                table.len(),
                ground.len()
            )));
        }
        if !table[0].is_zero() {
            return Err(KitError::Validation("h(empty set) must be 0".into()));
        }
        Ok(EntropyOracle { ground, table, kind })
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    pub fn is_exact(&self) -> bool {
        self.kind == ValueKind::Exact
    }

    pub fn h(&self, b: Mask) -> &Rat {
        &self.table[b as usize]
    }

    /// H(Z_B | Z_C) = h(B ∪ C) − h(C).
    pub fn cond(&self, b: Mask, c: Mask) -> Rat {
        self.h(b | c) - self.h(c)
    }

    /// I(Z_B ∧ Z_C | Z_W) for disjoint B, C, W.
    pub fn mutual(&self, b: Mask, c: Mask, w: Mask) -> Result<Rat> {
        if b & c != 0 || b & w != 0 || c & w != 0 {
            return Err(KitError::Validation(
                "mutual information arguments must be pairwise disjoint".into(),
            ));
        }
        Ok(self.h(b | w) + self.h(c | w) - self.h(b | c | w) - self.h(w))
    }

    pub fn value(&self, r: Rat) -> Value {
        Value::with_exactness(r, self.is_exact())
    }

    pub fn entropy_ids(&self, ids: &[UserId]) -> Result<Value> {
        let m = self.ground.mask_of(ids)?;
        Ok(self.value(self.h(m).clone()))
    }

    /// Oracle conditioned on Z_D: ground V∖D with h_D(B) = h(B ∪ D) − h(D).
    pub fn condition(&self, d: Mask) -> EntropyOracle {
        let keep = self.ground.full_mask() & !d;
        let sub = self.ground.restrict(keep);
        let keep_bits: Vec<usize> = bits(keep).collect();
        let mut table = Vec::with_capacity(1 << sub.len());
        for m in 0u32..(1 << sub.len()) {
            let mut orig = 0u32;
            for (i, &bit) in keep_bits.iter().enumerate() {
                if m >> i & 1 == 1 {
                    orig |= 1 << bit;
                }
            }
            table.push(self.cond(orig, d));
        }
        EntropyOracle { ground: sub, table, kind: self.kind }
    }

    fn violation_tolerance(&self) -> Rat {
        match self.kind {
            ValueKind::Exact => Rat::zero(),
            ValueKind::Float => float_tolerance(),
        }
    }

    /// Exhaustive polymatroid check: h(∅)=0, monotone, submodular.
    pub fn validate_submodular(&self) -> SubmodularReport {
        let tol = self.violation_tolerance();
        let full = self.ground.full_mask();
        if self.table[0].abs() > tol {
            return SubmodularReport::fail(SubmodularViolation::EmptyNonzero {
                value: self.table[0].clone(),
            });
        }
        for b in submasks(full) {
            for i in bits(full & !b) {
                let with_i = b | 1 << i;
                // Monotonicity h(B) <= h(B ∪ {i}).
                if self.h(b) - self.h(with_i) > tol {
                    return SubmodularReport::fail(SubmodularViolation::Monotonicity {
                        smaller: self.ground.ids_of(b),
                        larger: self.ground.ids_of(with_i),
                        h_smaller: self.h(b).clone(),
                        h_larger: self.h(with_i).clone(),
                    });
                }
                // Submodularity via the pairwise form.
                for j in bits(full & !b) {
                    if j <= i {
                        continue;
                    }
                    let with_j = b | 1 << j;
                    let with_ij = b | 1 << i | 1 << j;
                    let lhs = self.h(with_i) + self.h(with_j);
                    let rhs = self.h(with_ij) + self.h(b);
                    if &rhs - &lhs > tol {
                        return SubmodularReport::fail(SubmodularViolation::Submodularity {
                            set_b: self.ground.ids_of(with_i),
                            set_c: self.ground.ids_of(with_j),
                            lhs,
                            rhs,
                        });
                    }
                }
            }
        }
        SubmodularReport { ok: true, witness: None }
    }
}

#[derive(Clone, Debug)]
pub enum SubmodularViolation {
    EmptyNonzero { value: Rat },
    Monotonicity { smaller: Vec<UserId>, larger: Vec<UserId>, h_smaller: Rat, h_larger: Rat },
    Submodularity { set_b: Vec<UserId>, set_c: Vec<UserId>, lhs: Rat, rhs: Rat },
}

#[derive(Clone, Debug)]
pub struct SubmodularReport {
    pub ok: bool,
    pub witness: Option<SubmodularViolation>,
}

impl SubmodularReport {
    fn fail(witness: SubmodularViolation) -> Self {
        SubmodularReport { ok: false, witness: Some(witness) }
    }
}

/// One private-source backend. A scenario carries exactly one.
#[derive(Clone, Debug)]
pub enum SourceModel {
    Hypergraph(HypergraphSource),
    Linear(FiniteLinearSource),
    Tabular(TabularSource),
}

impl SourceModel {
    pub fn ground(&self) -> &Ground {
        match self {
            SourceModel::Hypergraph(s) => s.ground(),
            SourceModel::Linear(s) => s.ground(),
            SourceModel::Tabular(s) => s.ground(),
        }
    }

    pub fn oracle(&self) -> EntropyOracle {
        match self {
            SourceModel::Hypergraph(s) => s.oracle(),
            SourceModel::Linear(s) => s.oracle(),
            SourceModel::Tabular(s) => s.oracle(),
        }
    }

    pub fn kind(&self) -> ValueKind {
        match self {
            SourceModel::Hypergraph(_) => ValueKind::Exact,
            SourceModel::Linear(s) => s.kind(),
            SourceModel::Tabular(_) => ValueKind::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.kind() == ValueKind::Exact
    }

    /// Restrict the source to the users in `keep` (order preserved).
    pub fn restrict(&self, keep: &[UserId]) -> Result<SourceModel> {
        Ok(match self {
            SourceModel::Hypergraph(s) => SourceModel::Hypergraph(s.restrict(keep)?),
            SourceModel::Linear(s) => SourceModel::Linear(s.restrict(keep)?),
            SourceModel::Tabular(s) => SourceModel::Tabular(s.restrict(keep)?),
        })
    }

    /// Append a new user observing exactly the same variable as `src`.
    pub fn duplicate_user(&self, src: UserId, new: UserId) -> Result<SourceModel> {
        Ok(match self {
            SourceModel::Hypergraph(s) => SourceModel::Hypergraph(s.duplicate_user(src, new)?),
            SourceModel::Linear(s) => SourceModel::Linear(s.duplicate_user(src, new)?),
            SourceModel::Tabular(s) => SourceModel::Tabular(s.duplicate_user(src, new)?),
        })
    }

    /// Expand to an explicit joint table. Refused above `cap` outcomes.
    pub fn tabularize(&self, cap: usize) -> Result<TabularSource> {
        match self {
            SourceModel::Hypergraph(s) => s.tabularize(cap),
            SourceModel::Linear(s) => s.tabularize(cap),
            SourceModel::Tabular(s) => Ok(s.clone()),
        }
    }
}

/// Conditioning result: the generic conditioned oracle plus, for hypergraph
/// backends, the wiretap-reduced hypergraph (edges meeting D deleted), the
/// two verified to agree on every subset.
pub struct ConditionedSource {
    pub oracle: EntropyOracle,
    pub reduced_hypergraph: Option<HypergraphSource>,
}

pub fn condition_on_wiretap(source: &SourceModel, d_ids: &[UserId]) -> Result<ConditionedSource> {
    let ground = source.ground();
    let d = ground.mask_of(d_ids)?;
    let oracle = source.oracle().condition(d);
    let reduced = match source {
        SourceModel::Hypergraph(h) => {
            let reduced = h.remove_edges_meeting(d).restrict(oracle.ground().ids())?;
            let red_oracle = reduced.oracle();
            for m in 0..oracle.table.len() {
                if oracle.table[m] != red_oracle.table[m] {
                    return Err(KitError::Internal(format!(
                        "conditioned oracle and edge-deleted hypergraph disagree on mask {m:#b}"
                    )));
                }
            }
            Some(reduced)
        }
        _ => None,
    };
    Ok(ConditionedSource { oracle, reduced_hypergraph: reduced })
}

/// Weighted mixture of oracles over a common ground (used for block-processed
/// sources with a shared time-sharing variable).
pub fn mixture_oracle(parts: &[(Rat, EntropyOracle)]) -> Result<EntropyOracle> {
    let Some(((_, first), rest)) = parts.split_first() else {
        return Err(KitError::Malformed("mixture of zero oracles".into()));
    };
    let mut table = vec![Rat::zero(); first.table.len()];
    let mut kind = ValueKind::Exact;
    let mut total = Rat::zero();
    for (w, oracle) in parts.iter() {
        if oracle.ground() != first.ground() {
            return Err(KitError::Malformed("mixture parts on different grounds".into()));
        }
        if w.is_negative() {
            return Err(KitError::Malformed("negative mixture weight".into()));
        }
        total += w;
        kind = kind.merge(oracle.kind());
        for (acc, v) in table.iter_mut().zip(&oracle.table) {
            *acc += w * v;
        }
    }
    if !total.is_one() {
        return Err(KitError::Malformed(format!("mixture weights sum to {total}, not 1")));
    }
    let _ = rest;
    EntropyOracle::from_table(first.ground().clone(), table, kind)
}
