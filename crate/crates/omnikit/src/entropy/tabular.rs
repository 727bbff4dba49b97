//! Tabular sources: an explicit joint pmf with exact rational probabilities.
//! Marginal entropies are computed in double precision (base 2) and
//! rationalized once; the oracle carries float provenance.

use super::{EntropyOracle, ValueKind};
use crate::error::{KitError, Result};
use crate::ground::{bits, Ground, Mask, UserId};
use crate::value::{rationalize, to_f64, Rat, Value};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct TabularSource {
    ground: Ground,
    /// Per-user alphabet, in first-seen order from the support.
    alphabets: Vec<Vec<String>>,
    /// Support: (symbol index per user, probability > 0). Sorted by outcome.
    support: Vec<(Vec<u16>, Rat)>,
}

impl TabularSource {
    /// Build from explicit outcomes; zero-probability rows are dropped,
    /// duplicates merged, and the total must be exactly 1.
    pub fn from_outcomes(ground: Ground, outcomes: Vec<(Vec<String>, Rat)>) -> Result<Self> {
        let n = ground.len();
        let mut alphabets: Vec<Vec<String>> = vec![Vec::new(); n];
        let mut merged: BTreeMap<Vec<u16>, Rat> = BTreeMap::new();
        let mut total = Rat::zero();
        for (z, p) in outcomes {
            if z.len() != n {
                return Err(KitError::Validation(format!(
                    "outcome lists {} symbols for {n} users",
                    z.len()
                )));
            }
            if p.is_negative() {
                return Err(KitError::Validation("negative probability".into()));
            }
            total += &p;
            if p.is_zero() {
                continue;
            }
            let mut key = Vec::with_capacity(n);
            for (i, sym) in z.iter().enumerate() {
                let idx = match alphabets[i].iter().position(|s| s == sym) {
                    Some(k) => k,
                    None => {
                        alphabets[i].push(sym.clone());
                        alphabets[i].len() - 1
                    }
                };
                key.push(idx as u16);
            }
            *merged.entry(key).or_insert_with(Rat::zero) += p;
        }
        if !total.is_one() {
            return Err(KitError::Validation(format!("pmf sums to {total}, not 1")));
        }
        Ok(TabularSource {
            ground,
            alphabets,
            support: merged.into_iter().collect(),
        })
    }

    /// Declare alphabets up front (order fixed by the declaration).
    pub fn with_alphabets(
        ground: Ground,
        alphabets: Vec<Vec<String>>,
        outcomes: Vec<(Vec<String>, Rat)>,
    ) -> Result<Self> {
        let mut src = Self::from_outcomes(ground, outcomes)?;
        if alphabets.len() != src.ground.len() {
            return Err(KitError::Validation("one alphabet required per user".into()));
        }
        // Remap symbol indices onto the declared alphabets.
        let mut remap: Vec<Vec<u16>> = Vec::with_capacity(src.alphabets.len());
        for (i, seen) in src.alphabets.iter().enumerate() {
            let mut m = Vec::with_capacity(seen.len());
            for sym in seen {
                let idx = alphabets[i]
                    .iter()
                    .position(|s| s == sym)
                    .ok_or_else(|| {
                        KitError::Validation(format!(
                            "symbol {sym:?} for user {} is outside its declared alphabet",
                            src.ground.ids()[i]
                        ))
                    })?;
                m.push(idx as u16);
            }
            remap.push(m);
        }
        for (key, _) in src.support.iter_mut() {
            for (i, v) in key.iter_mut().enumerate() {
                *v = remap[i][*v as usize];
            }
        }
        src.support.sort();
        src.alphabets = alphabets;
        Ok(src)
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn alphabets(&self) -> &[Vec<String>] {
        &self.alphabets
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    /// Support rows as (symbols, probability), in canonical order.
    pub fn outcome_rows(&self) -> Vec<(Vec<String>, Rat)> {
        self.support
            .iter()
            .map(|(z, p)| {
                let row = z
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| self.alphabets[i][s as usize].clone())
                    .collect();
                (row, p.clone())
            })
            .collect()
    }

    /// Shannon entropy (bits) of the marginal on `b`, rationalized.
    fn marginal_entropy(&self, b: Mask) -> Rat {
        if b == 0 {
            return Rat::zero();
        }
        let idxs: Vec<usize> = bits(b).collect();
        let mut groups: BTreeMap<Vec<u16>, Rat> = BTreeMap::new();
        for (z, p) in &self.support {
            let key: Vec<u16> = idxs.iter().map(|&i| z[i]).collect();
            *groups.entry(key).or_insert_with(Rat::zero) += p;
        }
        let mut h = 0f64;
        for p in groups.values() {
            let pf = to_f64(p);
            if pf > 0.0 {
                h -= pf * pf.log2();
            }
        }
        rationalize(h.max(0.0))
    }

    pub fn oracle(&self) -> EntropyOracle {
        let n = self.ground.len();
        let table: Vec<Rat> = (0u32..(1 << n)).map(|m| self.marginal_entropy(m)).collect();
        EntropyOracle::from_table(self.ground.clone(), table, ValueKind::Float)
            .expect("marginal table is well formed")
    }

    pub fn restrict(&self, keep: &[UserId]) -> Result<TabularSource> {
        let sub = Ground::new(keep.to_vec())?;
        let idxs: Vec<usize> = keep
            .iter()
            .map(|&id| self.ground.index_of(id).ok_or(KitError::UnknownUser(id)))
            .collect::<Result<_>>()?;
        let outcomes = self
            .support
            .iter()
            .map(|(z, p)| {
                let row: Vec<String> = idxs
                    .iter()
                    .map(|&i| self.alphabets[i][z[i] as usize].clone())
                    .collect();
                (row, p.clone())
            })
            .collect();
        TabularSource::from_outcomes(sub, outcomes)
    }

    pub fn duplicate_user(&self, src: UserId, new: UserId) -> Result<TabularSource> {
        let idx = self.ground.index_of(src).ok_or(KitError::UnknownUser(src))?;
        let mut ids = self.ground.ids().to_vec();
        if ids.contains(&new) {
            return Err(KitError::Validation(format!("user id {new} already present")));
        }
        ids.push(new);
        let ground = Ground::new(ids)?;
        let outcomes = self
            .support
            .iter()
            .map(|(z, p)| {
                let mut row: Vec<String> = z
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| self.alphabets[i][s as usize].clone())
                    .collect();
                row.push(self.alphabets[idx][z[idx] as usize].clone());
                (row, p.clone())
            })
            .collect();
        TabularSource::from_outcomes(ground, outcomes)
    }

    /// Apply per-user lookup tables (total on each alphabet). Users absent
    /// from the map are passed through unchanged.
    pub fn apply_tables(
        &self,
        maps: &BTreeMap<UserId, BTreeMap<String, String>>,
    ) -> Result<TabularSource> {
        self.check_tables_total(maps)?;
        let outcomes = self
            .support
            .iter()
            .map(|(z, p)| {
                let row: Vec<String> = z
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| {
                        let sym = &self.alphabets[i][s as usize];
                        match maps.get(&self.ground.ids()[i]) {
                            Some(table) => table[sym].clone(),
                            None => sym.clone(),
                        }
                    })
                    .collect();
                (row, p.clone())
            })
            .collect();
        TabularSource::from_outcomes(self.ground.clone(), outcomes)
    }

    /// Joint source over (original users, processed copies); processed copy
    /// of user i gets id `shift + i`.
    pub fn joint_with_processed(
        &self,
        maps: &BTreeMap<UserId, BTreeMap<String, String>>,
    ) -> Result<(TabularSource, u32)> {
        self.check_tables_total(maps)?;
        let shift = self.ground.ids().iter().copied().max().unwrap_or(0) + 1;
        let mut ids = self.ground.ids().to_vec();
        ids.extend(self.ground.ids().iter().map(|&i| shift + i));
        let ground = Ground::new(ids)?;
        let outcomes = self
            .support
            .iter()
            .map(|(z, p)| {
                let mut row: Vec<String> = z
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| self.alphabets[i][s as usize].clone())
                    .collect();
                let processed: Vec<String> = z
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| {
                        let sym = &self.alphabets[i][s as usize];
                        match maps.get(&self.ground.ids()[i]) {
                            Some(table) => table[sym].clone(),
                            None => sym.clone(),
                        }
                    })
                    .collect();
                row.extend(processed);
                (row, p.clone())
            })
            .collect();
        Ok((TabularSource::from_outcomes(ground, outcomes)?, shift))
    }

    fn check_tables_total(
        &self,
        maps: &BTreeMap<UserId, BTreeMap<String, String>>,
    ) -> Result<()> {
        for (&uid, table) in maps {
            let idx = self.ground.index_of(uid).ok_or(KitError::UnknownUser(uid))?;
            for sym in &self.alphabets[idx] {
                if !table.contains_key(sym) {
                    return Err(KitError::Malformed(format!(
                        "lookup table for user {uid} misses symbol {sym:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Extend with an auxiliary variable drawn from a channel on the
    /// coordinates in `inputs`. Rows map each reachable input projection to a
    /// distribution over `outputs` (missing rows are an error).
    pub fn extend_with_channel(&self, inputs: Mask, channel: &Channel) -> Result<(TabularSource, UserId)> {
        let aux = self.ground.ids().iter().copied().max().unwrap_or(0) + 1;
        let mut ids = self.ground.ids().to_vec();
        ids.push(aux);
        let ground = Ground::new(ids)?;
        let idxs: Vec<usize> = bits(inputs).collect();
        let mut outcomes = Vec::new();
        for (z, p) in &self.support {
            let key: Vec<String> = idxs
                .iter()
                .map(|&i| self.alphabets[i][z[i] as usize].clone())
                .collect();
            let row = channel.rows.get(&key).ok_or_else(|| {
                KitError::Malformed(format!("channel misses input row {key:?}"))
            })?;
            let mut row_total = Rat::zero();
            for (y, py) in channel.outputs.iter().zip(row) {
                if py.is_negative() {
                    return Err(KitError::Malformed("negative channel probability".into()));
                }
                row_total += py;
                if py.is_zero() {
                    continue;
                }
                let mut full: Vec<String> = z
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| self.alphabets[i][s as usize].clone())
                    .collect();
                full.push(y.clone());
                outcomes.push((full, p * py));
            }
            if !row_total.is_one() {
                return Err(KitError::Malformed(format!(
                    "channel row {key:?} sums to {row_total}, not 1"
                )));
            }
        }
        Ok((TabularSource::from_outcomes(ground, outcomes)?, aux))
    }
}

/// A discrete channel: distributions over `outputs`, one row per reachable
/// projection of the input coordinates.
#[derive(Clone, Debug)]
pub struct Channel {
    pub outputs: Vec<String>,
    pub rows: BTreeMap<Vec<String>, Vec<Rat>>,
}

/// Maximal common function of { Z_i : i in A }: outcomes of the support are
/// joined whenever they agree on some coordinate of A; the component label is
/// the common variable.
pub struct GkCommonPart {
    /// Joint table over (original users, label user).
    pub joint: TabularSource,
    pub label_user: UserId,
    /// H(U) as a float-backed value.
    pub entropy: Value,
    /// Component label of each support outcome, in support order.
    pub labels: Vec<usize>,
}

impl GkCommonPart {
    /// H(U | Z_C) computed on the joint table.
    pub fn cond_entropy_given(&self, c_ids: &[UserId]) -> Result<Value> {
        let o = self.joint.oracle();
        let u = o.ground().singleton(self.label_user)?;
        let c = o.ground().mask_of(c_ids)?;
        Ok(o.value(o.cond(u, c)))
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub fn gk_common_part(source: &TabularSource, a_ids: &[UserId]) -> Result<GkCommonPart> {
    if a_ids.len() < 2 {
        return Err(KitError::Validation("common part needs at least two users".into()));
    }
    let a_idxs: Vec<usize> = a_ids
        .iter()
        .map(|&id| source.ground.index_of(id).ok_or(KitError::UnknownUser(id)))
        .collect::<Result<_>>()?;
    let m = source.support.len();
    let mut dsu = Dsu::new(m);
    for &i in &a_idxs {
        let mut by_symbol: BTreeMap<u16, usize> = BTreeMap::new();
        for (k, (z, _)) in source.support.iter().enumerate() {
            match by_symbol.get(&z[i]) {
                Some(&first) => dsu.union(first, k),
                None => {
                    by_symbol.insert(z[i], k);
                }
            }
        }
    }
    // Canonical labels in first-appearance order.
    let mut label_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut labels = Vec::with_capacity(m);
    for k in 0..m {
        let root = dsu.find(k);
        let next = label_of_root.len();
        let label = *label_of_root.entry(root).or_insert(next);
        labels.push(label);
    }
    let label_user = source.ground.ids().iter().copied().max().unwrap_or(0) + 1;
    let mut ids = source.ground.ids().to_vec();
    ids.push(label_user);
    let ground = Ground::new(ids)?;
    let outcomes = source
        .support
        .iter()
        .zip(&labels)
        .map(|((z, p), &label)| {
            let mut row: Vec<String> = z
                .iter()
                .enumerate()
                .map(|(i, &s)| source.alphabets[i][s as usize].clone())
                .collect();
            row.push(format!("u{label}"));
            (row, p.clone())
        })
        .collect();
    let joint = TabularSource::from_outcomes(ground, outcomes)?;
    let o = joint.oracle();
    let u = o.ground().singleton(label_user)?;
    let entropy = o.value(o.h(u).clone());
    Ok(GkCommonPart { joint, label_user, entropy, labels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::{eq_within, parse_rat, rat, rat_int};

    /// Two users observing the same uniform bit.
    fn identical_bit() -> TabularSource {
        let g = Ground::new(vec![1, 2]).unwrap();
        TabularSource::from_outcomes(
            g,
            vec![
                (vec!["0".into(), "0".into()], rat(1, 2)),
                (vec!["1".into(), "1".into()], rat(1, 2)),
            ],
        )
        .unwrap()
    }

    fn independent_bits() -> TabularSource {
        let g = Ground::new(vec![1, 2]).unwrap();
        let mut rows = Vec::new();
        for a in ["0", "1"] {
            for b in ["0", "1"] {
                rows.push((vec![a.to_string(), b.to_string()], rat(1, 4)));
            }
        }
        TabularSource::from_outcomes(g, rows).unwrap()
    }

    /// User 1 sees two fresh bits, user 2 sees one of them plus its index.
    pub fn xj_source() -> TabularSource {
        let g = Ground::new(vec![1, 2]).unwrap();
        let mut rows = Vec::new();
        for x0 in 0u8..2 {
            for x1 in 0u8..2 {
                for j in 0u8..2 {
                    let xj = if j == 0 { x0 } else { x1 };
                    rows.push((
                        vec![format!("{x0}{x1}"), format!("{xj}{j}")],
                        rat(1, 8),
                    ));
                }
            }
        }
        TabularSource::from_outcomes(g, rows).unwrap()
    }

    #[test]
    fn xj_marginals() {
        let o = xj_source().oracle();
        assert_eq!(o.entropy_ids(&[1, 2]).unwrap().rat, rat_int(3));
        assert_eq!(o.entropy_ids(&[1]).unwrap().rat, rat_int(2));
        assert_eq!(o.entropy_ids(&[2]).unwrap().rat, rat_int(2));
        let g = o.ground().clone();
        let b1 = g.mask_of(&[1]).unwrap();
        let b2 = g.mask_of(&[2]).unwrap();
        assert_eq!(o.cond(b1, b2), rat_int(1));
        assert_eq!(o.mutual(b1, b2, 0).unwrap(), rat_int(1));
    }

    #[test]
    fn pmf_must_sum_to_one() {
        let g = Ground::new(vec![1]).unwrap();
        let bad = TabularSource::from_outcomes(g, vec![(vec!["0".into()], rat(1, 2))]);
        assert!(bad.is_err());
    }

    #[test]
    fn gk_identical_and_independent() {
        let gk = gk_common_part(&identical_bit(), &[1, 2]).unwrap();
        assert!(eq_within(&gk.entropy.rat, &rat_int(1), false));
        assert!(eq_within(
            &gk.cond_entropy_given(&[1]).unwrap().rat,
            &rat_int(0),
            false
        ));

        let gk = gk_common_part(&independent_bits(), &[1, 2]).unwrap();
        assert!(eq_within(&gk.entropy.rat, &rat_int(0), false));
    }

    #[test]
    fn channel_extension_checks_rows() {
        let src = identical_bit();
        let mut rows = BTreeMap::new();
        rows.insert(vec!["0".into()], vec![parse_rat("1").unwrap(), Rat::zero()]);
        rows.insert(vec!["1".into()], vec![Rat::zero(), parse_rat("1").unwrap()]);
        let chan = Channel { outputs: vec!["y0".into(), "y1".into()], rows };
        let inputs = src.ground().mask_of(&[1]).unwrap();
        let (ext, aux) = src.extend_with_channel(inputs, &chan).unwrap();
        let o = ext.oracle();
        let y = o.ground().singleton(aux).unwrap();
        let z1 = o.ground().mask_of(&[1]).unwrap();
        // Deterministic copy channel: H(Y | Z_1) = 0 and H(Y) = 1.
        assert!(eq_within(&o.cond(y, z1), &Rat::zero(), false));
        assert!(eq_within(o.h(y), &rat_int(1), false));
    }
}
