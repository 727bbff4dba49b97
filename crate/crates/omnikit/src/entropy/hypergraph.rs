//! Hypergraphical sources: independent edge variables, user i observes the
//! edges incident to i. Entropy is the coverage function
//! h(B) = Σ { w_e : ξ(e) ∩ B ≠ ∅ }, exact in rationals.

use super::{EntropyOracle, TabularSource, ValueKind};
use crate::error::{KitError, Result};
use crate::ground::{Ground, Mask, UserId};
use crate::value::Rat;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug)]
pub struct Edge {
    pub label: String,
    pub on: Mask,
    pub weight: Rat,
}

#[derive(Clone, Debug)]
pub struct HypergraphSource {
    ground: Ground,
    edges: Vec<Edge>,
}

impl HypergraphSource {
    pub fn new(ground: Ground, edges: Vec<(String, Vec<UserId>, Rat)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (label, on_ids, weight) in edges {
            if !seen.insert(label.clone()) {
                return Err(KitError::Validation(format!("duplicate edge label {label:?}")));
            }
            if on_ids.is_empty() {
                return Err(KitError::Validation(format!("edge {label:?} has empty incidence")));
            }
            if !weight.is_positive() {
                return Err(KitError::Validation(format!(
                    "edge {label:?} must have positive weight"
                )));
            }
            let on = ground.mask_of(&on_ids)?;
            out.push(Edge { label, on, weight });
        }
        Ok(HypergraphSource { ground, edges: out })
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, label: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.label == label)
    }

    pub fn oracle(&self) -> EntropyOracle {
        let n = self.ground.len();
        let mut table = vec![Rat::zero(); 1 << n];
        for (m, slot) in table.iter_mut().enumerate() {
            let mask = m as Mask;
            for e in &self.edges {
                if e.on & mask != 0 {
                    *slot += &e.weight;
                }
            }
        }
        EntropyOracle::from_table(self.ground.clone(), table, ValueKind::Exact)
            .expect("coverage table is well formed")
    }

    /// Drop every edge incident to `d` (wiretap reduction).
    pub fn remove_edges_meeting(&self, d: Mask) -> HypergraphSource {
        HypergraphSource {
            ground: self.ground.clone(),
            edges: self.edges.iter().filter(|e| e.on & d == 0).cloned().collect(),
        }
    }

    /// Drop every edge observed only inside `s` (silent-only reduction).
    pub fn remove_edges_within(&self, s: Mask) -> HypergraphSource {
        HypergraphSource {
            ground: self.ground.clone(),
            edges: self.edges.iter().filter(|e| e.on & !s != 0).cloned().collect(),
        }
    }

    /// Restrict to a sub-ground: incidences are intersected, edges that lose
    /// all their vertices disappear.
    pub fn restrict(&self, keep: &[UserId]) -> Result<HypergraphSource> {
        let sub = Ground::new(keep.to_vec())?;
        let keep_mask = self.ground.mask_of(keep)?;
        let mut edges = Vec::new();
        for e in &self.edges {
            let inter = e.on & keep_mask;
            if inter != 0 {
                let on = self.ground.project(inter, &sub)?;
                edges.push(Edge { label: e.label.clone(), on, weight: e.weight.clone() });
            }
        }
        Ok(HypergraphSource { ground: sub, edges })
    }

    pub fn duplicate_user(&self, src: UserId, new: UserId) -> Result<HypergraphSource> {
        let src_bit = self.ground.singleton(src)?;
        let mut ids = self.ground.ids().to_vec();
        if ids.contains(&new) {
            return Err(KitError::Validation(format!("user id {new} already present")));
        }
        ids.push(new);
        let ground = Ground::new(ids)?;
        let new_bit = ground.singleton(new)?;
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let mut on = e.on;
                if e.on & src_bit != 0 {
                    on |= new_bit;
                }
                Edge { label: e.label.clone(), on, weight: e.weight.clone() }
            })
            .collect();
        Ok(HypergraphSource { ground, edges })
    }

    /// Total weight of the edges of `u` that cross the partition `blocks`
    /// (restricted incidence nonempty and not inside a single block), plus
    /// the crossing edge labels.
    pub fn crossing_weight(&self, u: Mask, blocks: &[Mask]) -> (Rat, Vec<String>) {
        let mut total = Rat::zero();
        let mut labels = Vec::new();
        for e in &self.edges {
            let inter = e.on & u;
            if inter == 0 {
                continue;
            }
            if !blocks.iter().any(|&c| inter & !c == 0) {
                total += &e.weight;
                labels.push(e.label.clone());
            }
        }
        (total, labels)
    }

    /// Extend with one auxiliary vertex observing exactly the listed edges.
    /// Used to check feasibility claims of the form "W = X_{E*}".
    pub fn with_aux_vertex(&self, labels: &BTreeSet<String>) -> Result<(HypergraphSource, UserId)> {
        let aux = self.ground.ids().iter().copied().max().unwrap_or(0) + 1;
        let mut ids = self.ground.ids().to_vec();
        ids.push(aux);
        let ground = Ground::new(ids)?;
        let aux_bit = ground.singleton(aux)?;
        for l in labels {
            if self.edge(l).is_none() {
                return Err(KitError::Malformed(format!("unknown edge label {l:?}")));
            }
        }
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let mut on = e.on;
                if labels.contains(&e.label) {
                    on |= aux_bit;
                }
                Edge { label: e.label.clone(), on, weight: e.weight.clone() }
            })
            .collect();
        Ok((HypergraphSource { ground, edges }, aux))
    }

    /// Per-user edge retention: user i keeps only the listed incident edges.
    /// Users absent from the map keep everything.
    pub fn apply_retention(
        &self,
        keep: &BTreeMap<UserId, BTreeSet<String>>,
    ) -> Result<HypergraphSource> {
        for (&uid, kept) in keep {
            let bit = self.ground.singleton(uid)?;
            for l in kept {
                let e = self
                    .edge(l)
                    .ok_or_else(|| KitError::Malformed(format!("unknown edge label {l:?}")))?;
                if e.on & bit == 0 {
                    return Err(KitError::Malformed(format!(
                        "edge {l:?} is not incident to user {uid}"
                    )));
                }
            }
        }
        let mut edges = Vec::new();
        for e in &self.edges {
            let mut on = 0;
            for idx in crate::ground::bits(e.on) {
                let uid = self.ground.ids()[idx];
                let retained = match keep.get(&uid) {
                    Some(set) => set.contains(&e.label),
                    None => true,
                };
                if retained {
                    on |= 1 << idx;
                }
            }
            if on != 0 {
                edges.push(Edge { label: e.label.clone(), on, weight: e.weight.clone() });
            }
        }
        Ok(HypergraphSource { ground: self.ground.clone(), edges })
    }

    /// Joint source over (original users, processed copies). Processed copy
    /// of user i gets id `shift + i` and observes the retained edges.
    pub fn joint_with_processed(
        &self,
        keep: &BTreeMap<UserId, BTreeSet<String>>,
    ) -> Result<(HypergraphSource, u32)> {
        let shift = self.ground.ids().iter().copied().max().unwrap_or(0) + 1;
        let mut ids = self.ground.ids().to_vec();
        ids.extend(self.ground.ids().iter().map(|&i| shift + i));
        let ground = Ground::new(ids)?;
        let n = self.ground.len();
        let mut edges = Vec::new();
        for e in &self.edges {
            let mut on = e.on;
            for idx in crate::ground::bits(e.on) {
                let uid = self.ground.ids()[idx];
                let retained = match keep.get(&uid) {
                    Some(set) => set.contains(&e.label),
                    None => true,
                };
                if retained {
                    on |= 1 << (n + idx);
                }
            }
            edges.push(Edge { label: e.label.clone(), on, weight: e.weight.clone() });
        }
        Ok((HypergraphSource { ground, edges }, shift))
    }

    /// Explicit joint table; requires integer bit weights so each edge is a
    /// uniform variable over 2^w values.
    pub fn tabularize(&self, cap: usize) -> Result<TabularSource> {
        let mut bit_counts = Vec::with_capacity(self.edges.len());
        let mut total_bits = 0u32;
        for e in &self.edges {
            if !e.weight.is_integer() {
                return Err(KitError::Unsupported(format!(
                    "tabular expansion needs integer edge weights; edge {:?} has {}",
                    e.label, e.weight
                )));
            }
            let w = e.weight.to_integer().to_u32().ok_or_else(|| {
                KitError::Unsupported(format!("edge {:?} weight too large", e.label))
            })?;
            bit_counts.push(w);
            total_bits += w;
        }
        if total_bits > 20 || (1usize << total_bits) > cap {
            return Err(KitError::TooLarge { got: 1 << total_bits.min(30), cap });
        }
        // User alphabet: tuple of incident edge values, rendered in edge order.
        let n = self.ground.len();
        let outcomes = 1u64 << total_bits;
        let mut support = Vec::with_capacity(outcomes as usize);
        let prob = Rat::new(1.into(), num_bigint::BigInt::from(outcomes));
        for world in 0..outcomes {
            let mut per_edge = Vec::with_capacity(self.edges.len());
            let mut off = 0u32;
            for &w in &bit_counts {
                per_edge.push((world >> off) & ((1u64 << w) - 1));
                off += w;
            }
            let mut z = Vec::with_capacity(n);
            for idx in 0..n {
                let mut sym = String::new();
                for (e, val) in self.edges.iter().zip(&per_edge) {
                    if e.on >> idx & 1 == 1 {
                        sym.push_str(&format!("{}={};", e.label, val));
                    }
                }
                z.push(sym);
            }
            support.push((z, prob.clone()));
        }
        TabularSource::from_outcomes(self.ground.clone(), support)
    }

    /// Largest block an edge restricted to `u` fits inside, if any: the edge
    /// violating the crossing condition for the given partition.
    pub fn first_edge_inside(&self, u: Mask, blocks: &[Mask]) -> Option<&Edge> {
        self.edges.iter().find(|e| {
            let inter = e.on & u;
            inter != 0 && blocks.iter().any(|&c| inter & !c == 0)
        })
    }
}

pub fn unit_edges(pairs: &[(&str, &[UserId])]) -> Vec<(String, Vec<UserId>, Rat)> {
    pairs
        .iter()
        .map(|(l, on)| (l.to_string(), on.to_vec(), Rat::from(num_bigint::BigInt::from(1))))
        .collect()
}
