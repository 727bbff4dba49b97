//! Finite linear sources: user i observes M_i · s for a uniform seed s over
//! GF(q)^m. Entropy is rank(stacked rows) · log2(q); exact for q = 2, float
//! provenance otherwise (log2 of an odd prime is irrational).

use super::{EntropyOracle, TabularSource, ValueKind};
use crate::error::{KitError, Result};
use crate::ground::{bits, Ground, Mask, UserId};
use crate::value::{rationalize, Rat};


#[derive(Clone, Debug)]
pub struct FiniteLinearSource {
    ground: Ground,
    q: u64,
    seed_dim: usize,
    /// Per-user row blocks over GF(q), each row of length `seed_dim`.
    mats: Vec<Vec<Vec<u64>>>,
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FiniteLinearSource {
    pub fn new(ground: Ground, q: u64, seed_dim: usize, mats: Vec<Vec<Vec<u64>>>) -> Result<Self> {
        if !is_prime(q) {
            return Err(KitError::Validation(format!("field order {q} is not prime")));
        }
        if mats.len() != ground.len() {
            return Err(KitError::Validation(
                "one matrix required per user, in ground order".into(),
            ));
        }
        for (i, m) in mats.iter().enumerate() {
            for row in m {
                if row.len() != seed_dim {
                    return Err(KitError::Validation(format!(
                        "matrix for user {} has a row of length {} (seed dimension is {seed_dim})",
                        ground.ids()[i],
                        row.len()
                    )));
                }
                if row.iter().any(|&v| v >= q) {
                    return Err(KitError::Validation(format!(
                        "matrix entries for user {} must lie in 0..{q}",
                        ground.ids()[i]
                    )));
                }
            }
        }
        Ok(FiniteLinearSource { ground, q, seed_dim, mats })
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn seed_dim(&self) -> usize {
        self.seed_dim
    }

    pub fn rows_of(&self, idx: usize) -> &[Vec<u64>] {
        &self.mats[idx]
    }

    pub fn kind(&self) -> ValueKind {
        if self.q == 2 {
            ValueKind::Exact
        } else {
            ValueKind::Float
        }
    }

    fn rank(&self, b: Mask) -> usize {
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for idx in bits(b) {
            rows.extend(self.mats[idx].iter().cloned());
        }
        rank_mod(&mut rows, self.q, self.seed_dim)
    }

    pub fn oracle(&self) -> EntropyOracle {
        let n = self.ground.len();
        let per_symbol = if self.q == 2 {
            Rat::from(num_bigint::BigInt::from(1))
        } else {
            rationalize((self.q as f64).log2())
        };
        let mut table = Vec::with_capacity(1 << n);
        for m in 0u32..(1 << n) {
            let r = self.rank(m);
            table.push(&per_symbol * Rat::from(num_bigint::BigInt::from(r as i64)));
        }
        EntropyOracle::from_table(self.ground.clone(), table, self.kind())
            .expect("rank table is well formed")
    }

    pub fn restrict(&self, keep: &[UserId]) -> Result<FiniteLinearSource> {
        let sub = Ground::new(keep.to_vec())?;
        let mut mats = Vec::with_capacity(keep.len());
        for &id in keep {
            let idx = self.ground.index_of(id).ok_or(KitError::UnknownUser(id))?;
            mats.push(self.mats[idx].clone());
        }
        Ok(FiniteLinearSource { ground: sub, q: self.q, seed_dim: self.seed_dim, mats })
    }

    pub fn duplicate_user(&self, src: UserId, new: UserId) -> Result<FiniteLinearSource> {
        let idx = self.ground.index_of(src).ok_or(KitError::UnknownUser(src))?;
        let mut ids = self.ground.ids().to_vec();
        if ids.contains(&new) {
            return Err(KitError::Validation(format!("user id {new} already present")));
        }
        ids.push(new);
        let ground = Ground::new(ids)?;
        let mut mats = self.mats.clone();
        mats.push(self.mats[idx].clone());
        Ok(FiniteLinearSource { ground, q: self.q, seed_dim: self.seed_dim, mats })
    }

    /// Expand to the explicit joint distribution of (M_i s)_i over uniform s.
    pub fn tabularize(&self, cap: usize) -> Result<TabularSource> {
        let outcomes = (self.q as u128).checked_pow(self.seed_dim as u32).ok_or(
            KitError::TooLarge { got: usize::MAX, cap },
        )?;
        if outcomes > cap as u128 {
            return Err(KitError::TooLarge { got: outcomes as usize, cap });
        }
        let n = self.ground.len();
        let mut acc: std::collections::BTreeMap<Vec<String>, u64> = Default::default();
        let mut seed = vec![0u64; self.seed_dim];
        loop {
            let mut z = Vec::with_capacity(n);
            for m in &self.mats {
                let sym: Vec<String> = m
                    .iter()
                    .map(|row| {
                        let mut v = 0u64;
                        for (a, s) in row.iter().zip(&seed) {
                            v = (v + a * s) % self.q;
                        }
                        v.to_string()
                    })
                    .collect();
                z.push(sym.join(","));
            }
            *acc.entry(z).or_insert(0) += 1;
            // Odometer over GF(q)^m.
            let mut pos = 0;
            loop {
                if pos == self.seed_dim {
                    break;
                }
                seed[pos] += 1;
                if seed[pos] < self.q {
                    break;
                }
                seed[pos] = 0;
                pos += 1;
            }
            if pos == self.seed_dim {
                break;
            }
        }
        let total = num_bigint::BigInt::from(outcomes as u64);
        let support = acc
            .into_iter()
            .map(|(z, count)| {
                (z, Rat::new(num_bigint::BigInt::from(count), total.clone()))
            })
            .collect();
        TabularSource::from_outcomes(self.ground.clone(), support)
    }
}

/// Row-reduce over GF(q) and return the rank.
fn rank_mod(rows: &mut Vec<Vec<u64>>, q: u64, width: usize) -> usize {
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] % q != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = mod_inverse(rows[rank][col] % q, q);
        for v in rows[rank].iter_mut() {
            *v = (*v * inv) % q;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] % q != 0 {
                let f = rows[r][col] % q;
                for c in 0..width {
                    let sub = (f * rows[rank][c]) % q;
                    rows[r][c] = (rows[r][c] + q - sub) % q;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mod_inverse(a: u64, q: u64) -> u64 {
    // Fermat: a^(q-2) mod q for prime q.
    let mut base = a % q;
    let mut exp = q - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        exp >>= 1;
    }
    acc
}
