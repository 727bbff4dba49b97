//! Ordered ground sets of user ids and bitmask subsets over them.
//!
//! All set machinery works on `Mask` values relative to a `Ground`; user ids
//! only appear at the API and serialization boundaries. Ground sets are capped
//! (default 12 users, hard ceiling 14 via `OMNIKIT_MAX_USERS`).

use crate::error::{KitError, Result};

pub type UserId = u32;
pub type Mask = u32;

pub const DEFAULT_MAX_USERS: usize = 12;
pub const HARD_MAX_USERS: usize = 14;

/// Effective ground-set cap: `OMNIKIT_MAX_USERS` can raise it to at most 14.
pub fn max_users() -> usize {
    match std::env::var("OMNIKIT_MAX_USERS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n <= HARD_MAX_USERS => n,
            Ok(n) => {
                eprintln!(
                    "warning: OMNIKIT_MAX_USERS={n} exceeds the hard ceiling {HARD_MAX_USERS}; clamping"
                );
                HARD_MAX_USERS
            }
            Err(_) => DEFAULT_MAX_USERS,
        },
        Err(_) => DEFAULT_MAX_USERS,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ground {
    ids: Vec<UserId>,
}

impl Ground {
    pub fn new(ids: Vec<UserId>) -> Result<Self> {
        if ids.len() > max_users() {
            return Err(KitError::TooLarge { got: ids.len(), cap: max_users() });
        }
        let mut seen = std::collections::BTreeSet::new();
        for &id in &ids {
            if !seen.insert(id) {
                return Err(KitError::Validation(format!("duplicate user id {id}")));
            }
        }
        Ok(Ground { ids })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[UserId] {
        &self.ids
    }

    pub fn full_mask(&self) -> Mask {
        if self.ids.is_empty() {
            0
        } else {
            (1u32 << self.ids.len()) - 1
        }
    }

    pub fn index_of(&self, id: UserId) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    pub fn singleton(&self, id: UserId) -> Result<Mask> {
        self.index_of(id)
            .map(|i| 1u32 << i)
            .ok_or(KitError::UnknownUser(id))
    }

    pub fn mask_of(&self, ids: &[UserId]) -> Result<Mask> {
        let mut m = 0;
        for &id in ids {
            m |= self.singleton(id)?;
        }
        Ok(m)
    }

    pub fn ids_of(&self, mask: Mask) -> Vec<UserId> {
        bits(mask).map(|i| self.ids[i]).collect()
    }

    /// Sub-ground keeping only the users in `keep`, preserving order.
    pub fn restrict(&self, keep: Mask) -> Ground {
        Ground { ids: self.ids_of(keep) }
    }

    /// Translate a mask on this ground to the corresponding mask on a
    /// sub-ground (every member of `mask` must survive in `sub`).
    pub fn project(&self, mask: Mask, sub: &Ground) -> Result<Mask> {
        sub.mask_of(&self.ids_of(mask))
    }
}

pub fn bits(mask: Mask) -> impl Iterator<Item = usize> {
    (0..u32::BITS as usize).filter(move |i| mask >> i & 1 == 1)
}

pub fn popcount(mask: Mask) -> usize {
    mask.count_ones() as usize
}

/// All submasks of `mask`, including the empty set and `mask` itself.
pub fn submasks(mask: Mask) -> impl Iterator<Item = Mask> {
    let mut cur = 0u32;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = cur;
        if cur == mask {
            done = true;
        } else {
            cur = (cur.wrapping_sub(mask)) & mask;
        }
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masks_round_trip() {
        let g = Ground::new(vec![1, 2, 4]).unwrap();
        let m = g.mask_of(&[4, 1]).unwrap();
        assert_eq!(g.ids_of(m), vec![1, 4]);
        assert!(g.mask_of(&[3]).is_err());
        assert_eq!(g.full_mask(), 0b111);
    }

    #[test]
    fn submask_enumeration_is_complete() {
        let all: Vec<Mask> = submasks(0b1011).collect();
        assert_eq!(all.len(), 8);
        assert!(all.contains(&0));
        assert!(all.contains(&0b1011));
        assert!(all.iter().all(|s| s & !0b1011 == 0));
    }

    #[test]
    fn rejects_oversized_grounds() {
        let ids: Vec<UserId> = (1..=13).collect();
        assert!(matches!(Ground::new(ids), Err(KitError::TooLarge { .. })));
    }
}
