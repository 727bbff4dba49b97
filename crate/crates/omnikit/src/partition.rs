//! Partitions, fractional partitions, and the multivariate mutual
//! information built on them.
//!
//! The minimization domain is every partition of the ground set into at
//! least two blocks, enumerated by restricted growth strings. The optimizer
//! set forms a lower semilattice under refinement; its meet is the finest
//! optimal partition, which the enumeration verifies on every call.

use crate::entropy::EntropyOracle;
use crate::error::{KitError, Result};
use crate::ground::{bits, popcount, Ground, Mask, UserId};
use crate::value::{float_tolerance, Rat};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

pub const MAX_ENUM_USERS: usize = 12;

/// A partition of `universe` into disjoint nonempty blocks, canonicalized by
/// ascending minimum element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    universe: Mask,
    blocks: Vec<Mask>,
}

impl Partition {
    pub fn new(blocks: Vec<Mask>) -> Result<Self> {
        let mut universe = 0;
        for &b in &blocks {
            if b == 0 {
                return Err(KitError::Validation("empty partition block".into()));
            }
            if universe & b != 0 {
                return Err(KitError::Validation("overlapping partition blocks".into()));
            }
            universe |= b;
        }
        let mut blocks = blocks;
        blocks.sort_by_key(|b| b.trailing_zeros());
        Ok(Partition { universe, blocks })
    }

    pub fn from_ids(ground: &Ground, blocks: &[Vec<UserId>]) -> Result<Self> {
        let masks = blocks
            .iter()
            .map(|ids| ground.mask_of(ids))
            .collect::<Result<Vec<_>>>()?;
        Self::new(masks)
    }

    pub fn universe(&self) -> Mask {
        self.universe
    }

    pub fn blocks(&self) -> &[Mask] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Blocks as sorted id lists, sorted by leading id.
    pub fn to_ids(&self, ground: &Ground) -> Vec<Vec<UserId>> {
        let mut blocks: Vec<Vec<UserId>> = self
            .blocks
            .iter()
            .map(|&b| {
                let mut ids = ground.ids_of(b);
                ids.sort_unstable();
                ids
            })
            .collect();
        blocks.sort();
        blocks
    }

    /// Common refinement. Finer than both operands under the refinement
    /// order (every block of the meet lies inside a block of each operand).
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        if self.universe != other.universe {
            return Err(KitError::Validation("meet of partitions on different sets".into()));
        }
        let mut blocks = Vec::new();
        for &b in &self.blocks {
            for &c in &other.blocks {
                if b & c != 0 {
                    blocks.push(b & c);
                }
            }
        }
        Partition::new(blocks)
    }

    /// True when every block of `self` is contained in a block of `other`.
    pub fn finer_or_equal(&self, other: &Partition) -> bool {
        self.universe == other.universe
            && self
                .blocks
                .iter()
                .all(|&b| other.blocks.iter().any(|&c| b & !c == 0))
    }
}

/// Iterator over all partitions of `universe` with at least two blocks,
/// via restricted growth strings. Each partition appears exactly once.
pub struct PartitionIter {
    positions: Vec<usize>,
    rgs: Vec<u8>,
    max: Vec<u8>,
    done: bool,
}

pub fn enumerate_partitions(universe: Mask) -> Result<PartitionIter> {
    let n = popcount(universe);
    if !(2..=MAX_ENUM_USERS).contains(&n) {
        return Err(KitError::TooLarge { got: n, cap: MAX_ENUM_USERS });
    }
    Ok(PartitionIter {
        positions: bits(universe).collect(),
        rgs: vec![0; n],
        max: vec![0; n],
        done: false,
    })
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        loop {
            if self.done {
                return None;
            }
            let n = self.rgs.len();
            let k = *self.max.iter().max().unwrap() as usize + 1;
            let current = if k >= 2 {
                let mut blocks = vec![0 as Mask; k];
                for (i, &b) in self.rgs.iter().enumerate() {
                    blocks[b as usize] |= 1 << self.positions[i];
                }
                Some(Partition::new(blocks).expect("rgs blocks are disjoint"))
            } else {
                None
            };
            // Advance the restricted growth string.
            let mut i = n;
            loop {
                if i == 1 {
                    self.done = true;
                    break;
                }
                i -= 1;
                if self.rgs[i] <= self.max[i - 1] {
                    self.rgs[i] += 1;
                    self.max[i] = self.max[i].max(self.rgs[i]);
                    for j in i + 1..n {
                        self.rgs[j] = 0;
                        self.max[j] = self.max[i];
                    }
                    break;
                }
            }
            if let Some(p) = current {
                return Some(p);
            }
        }
    }
}

/// I_P(Z_U | Z_W) = (Σ_C H(Z_C|Z_W) − H(Z_U|Z_W)) / (|P| − 1).
pub fn partition_info(oracle: &EntropyOracle, p: &Partition, w: Mask) -> Result<Rat> {
    if p.len() < 2 {
        return Err(KitError::Validation("partition information needs >= 2 blocks".into()));
    }
    if p.universe() & w != 0 {
        return Err(KitError::Validation("conditioning set overlaps the partitioned set".into()));
    }
    let mut total = Rat::zero();
    for &c in p.blocks() {
        total += oracle.cond(c, w);
    }
    total -= oracle.cond(p.universe(), w);
    Ok(total / Rat::from(num_bigint::BigInt::from(p.len() as i64 - 1)))
}

#[derive(Clone, Debug)]
pub struct MmiResult {
    pub value: Rat,
    /// Every optimal partition (ties resolved within tolerance for
    /// float-backed oracles).
    pub optimal: Vec<Partition>,
    /// The unique finest optimal partition: meet of `optimal`.
    pub fundamental: Partition,
    /// Set when a float-backed tie made the argmin set tolerance-dependent.
    pub tolerance_sensitive: bool,
}

/// Multivariate mutual information I(Z_U | Z_W): minimum of `partition_info`
/// over all multi-block partitions of `u`.
pub fn mmi(oracle: &EntropyOracle, u: Mask, w: Mask) -> Result<MmiResult> {
    let tol = if oracle.is_exact() { Rat::zero() } else { float_tolerance() };
    let mut best: Option<Rat> = None;
    for p in enumerate_partitions(u)? {
        let v = partition_info(oracle, &p, w)?;
        match &best {
            None => best = Some(v),
            Some(b) if &v < b => best = Some(v),
            _ => {}
        }
    }
    let best = best.expect("at least one partition for |U| >= 2");
    let mut optimal = Vec::new();
    let mut sensitive = false;
    for p in enumerate_partitions(u)? {
        let v = partition_info(oracle, &p, w)?;
        let gap = &v - &best;
        if gap <= tol {
            optimal.push(p);
        } else if !oracle.is_exact()
            && gap <= &float_tolerance() * Rat::from(num_bigint::BigInt::from(10))
        {
            sensitive = true;
        }
    }
    let mut fundamental = optimal[0].clone();
    for p in optimal.iter().skip(1) {
        fundamental = fundamental.meet(p)?;
    }
    // The semilattice property: the meet of the optimizers is itself optimal.
    let meet_value = partition_info(oracle, &fundamental, w)?;
    if &meet_value - &best > tol {
        if oracle.is_exact() {
            return Err(KitError::Internal(format!(
                "meet of optimal partitions is not optimal ({meet_value} vs {best})"
            )));
        }
        sensitive = true;
    }
    if !optimal.contains(&fundamental) {
        optimal.push(fundamental.clone());
        optimal.sort_by_key(|p| p.blocks().to_vec());
    }
    Ok(MmiResult { value: best, optimal, fundamental, tolerance_sensitive: sensitive })
}

/// A nonnegative set function on 2^U \ {∅, U} whose weights cover every
/// element exactly once, with an optional declared support family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalPartition {
    universe: Mask,
    /// Sorted by mask; weights are strictly positive.
    weights: Vec<(Mask, Rat)>,
}

impl FractionalPartition {
    pub fn new(universe: Mask, weights: Vec<(Mask, Rat)>) -> Result<Self> {
        Self::with_family(universe, weights, None)
    }

    pub fn with_family(
        universe: Mask,
        weights: Vec<(Mask, Rat)>,
        family: Option<&[Mask]>,
    ) -> Result<Self> {
        let mut merged: BTreeMap<Mask, Rat> = BTreeMap::new();
        for (b, w) in weights {
            if w.is_negative() {
                return Err(KitError::Validation("negative fractional-partition weight".into()));
            }
            if w.is_zero() {
                continue;
            }
            if b == 0 || b == universe || b & !universe != 0 {
                return Err(KitError::Validation(
                    "fractional-partition support must consist of proper nonempty subsets".into(),
                ));
            }
            if let Some(fam) = family {
                if !fam.contains(&b) {
                    return Err(KitError::Validation(
                        "fractional-partition support leaves its declared family".into(),
                    ));
                }
            }
            *merged.entry(b).or_insert_with(Rat::zero) += w;
        }
        for i in bits(universe) {
            let mut row = Rat::zero();
            for (b, w) in &merged {
                if b >> i & 1 == 1 {
                    row += w;
                }
            }
            if !row.is_one() {
                return Err(KitError::Validation(format!(
                    "element at bit {i} is covered with total weight {row}, not 1"
                )));
            }
        }
        Ok(FractionalPartition { universe, weights: merged.into_iter().collect() })
    }

    /// Indicator of a partition: weight 1 on each block.
    pub fn from_partition(p: &Partition) -> Result<Self> {
        let weights = p.blocks().iter().map(|&b| (b, Rat::one())).collect();
        Self::new(p.universe(), weights)
    }

    /// Co-partition: weight 1/(|P|−1) on each block complement.
    pub fn co_partition(p: &Partition) -> Result<Self> {
        let k = p.len() as i64;
        if k < 2 {
            return Err(KitError::Validation("co-partition needs >= 2 blocks".into()));
        }
        let w = Rat::new(1.into(), num_bigint::BigInt::from(k - 1));
        let weights = p
            .blocks()
            .iter()
            .map(|&b| (p.universe() & !b, w.clone()))
            .collect();
        Self::new(p.universe(), weights)
    }

    pub fn universe(&self) -> Mask {
        self.universe
    }

    pub fn weights(&self) -> &[(Mask, Rat)] {
        &self.weights
    }

    pub fn support(&self) -> Vec<Mask> {
        self.weights.iter().map(|(b, _)| *b).collect()
    }

    /// Recognize partition shape (all weights 1, blocks partition U).
    pub fn as_partition(&self) -> Option<Partition> {
        if !self.weights.iter().all(|(_, w)| w.is_one()) {
            return None;
        }
        let blocks: Vec<Mask> = self.support();
        let p = Partition::new(blocks).ok()?;
        (p.universe() == self.universe).then_some(p)
    }

    /// Recognize co-partition shape; returns the underlying partition.
    pub fn as_co_partition(&self) -> Option<Partition> {
        let blocks: Vec<Mask> = self.weights.iter().map(|(b, _)| self.universe & !b).collect();
        let p = Partition::new(blocks).ok()?;
        if p.universe() != self.universe {
            return None;
        }
        let expect = Rat::new(1.into(), num_bigint::BigInt::from(p.len() as i64 - 1));
        self.weights.iter().all(|(_, w)| w == &expect).then_some(p)
    }
}

/// I_λ(Z_U | Z_W) = H(Z_U|Z_W) − Σ_B λ(B) H(Z_B | Z_{U∖B}, Z_W).
pub fn fractional_info(
    oracle: &EntropyOracle,
    lambda: &FractionalPartition,
    w: Mask,
) -> Result<Rat> {
    let u = lambda.universe();
    if u & w != 0 {
        return Err(KitError::Validation("conditioning set overlaps the ground set".into()));
    }
    let mut total = oracle.cond(u, w);
    for (b, weight) in lambda.weights() {
        total -= weight * oracle.cond(*b, (u & !b) | w);
    }
    Ok(total)
}

/// Shearer-type sandwich: max_B λ(B)·I(Z_B ∧ Z_{U∖B}|Z_W) ≤ I_λ ≤
/// Σ_B λ(B)·I(Z_B ∧ Z_{U∖B}|Z_W). Returns (lower, value, upper).
pub fn shearer_bounds(
    oracle: &EntropyOracle,
    lambda: &FractionalPartition,
    w: Mask,
) -> Result<(Rat, Rat, Rat)> {
    let u = lambda.universe();
    let value = fractional_info(oracle, lambda, w)?;
    let mut lower = Rat::zero();
    let mut upper = Rat::zero();
    for (b, weight) in lambda.weights() {
        let mi = oracle.mutual(*b, u & !b, w)?;
        let term = weight * mi;
        if term > lower {
            lower = term.clone();
        }
        upper += term;
    }
    let tol = if oracle.is_exact() { Rat::zero() } else { float_tolerance() };
    if &lower - &value > tol || &value - &upper > tol {
        return Err(KitError::Internal(format!(
            "fractional-information sandwich violated: {lower} <= {value} <= {upper}"
        )));
    }
    Ok((lower, value, upper))
}
