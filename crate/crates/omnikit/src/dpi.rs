//! Data-processing checks for the fractional partition information.
//!
//! Given a tabular source, an auxiliary variable Y' produced by a channel
//! from Z_{U∪W'}, a fractional partition λ and a coordinate i, two
//! inequalities are verified numerically:
//!
//!   I_λ(Z_U|W') ≥ I_λ(Z''_U|W') − δ          (Z'' replaces coordinate i by Y')
//!   I_λ(Z_U|W') ≥ I_λ(Z_U|W',Y') − δ + γ
//!
//! with δ = (Σ_B λ(B) − 1) · I(Y' ∧ Z_{U∖i} | W', Z_i) and
//! γ = min_{B ∈ supp(λ), i ∈ B} max_{j ∈ U∖B} I(Y' ∧ Z_j | W').

use crate::entropy::{Channel, TabularSource};
use crate::error::{KitError, Result};
use crate::ground::{bits, Mask, UserId};
use crate::partition::FractionalPartition;
use crate::value::{float_tolerance, Rat};
use num_traits::{One, Zero};

#[derive(Clone, Debug)]
pub struct DpiReport {
    pub base: Rat,
    pub processed: Rat,
    pub conditioned: Rat,
    pub delta: Rat,
    pub gamma: Rat,
    /// base − (processed − δ); nonnegative up to tolerance when the first
    /// inequality holds.
    pub slack1: Rat,
    /// base − (conditioned − δ + γ).
    pub slack2: Rat,
    pub ok: bool,
}

pub fn dpi_check(
    source: &TabularSource,
    lambda: &FractionalPartition,
    replaced: UserId,
    w: Mask,
    channel_inputs: Mask,
    channel: &Channel,
) -> Result<DpiReport> {
    let u = lambda.universe();
    let ground = source.ground().clone();
    let i_bit = ground.singleton(replaced)?;
    if i_bit & u == 0 {
        return Err(KitError::Validation(
            "replaced coordinate must belong to the partitioned set".into(),
        ));
    }
    if u & w != 0 {
        return Err(KitError::Validation("conditioning set overlaps the ground set".into()));
    }
    if channel_inputs & !(u | w) != 0 {
        return Err(KitError::Validation(
            "channel inputs must lie inside the partitioned and conditioning sets".into(),
        ));
    }
    let (ext, aux) = source.extend_with_channel(channel_inputs, channel)?;
    let o = ext.oracle();
    let eg = o.ground().clone();
    // Masks translate unchanged: the extension appends the auxiliary user.
    let y = eg.singleton(aux)?;

    let base = crate::partition::fractional_info(&o, lambda, w)?;

    // I_λ with coordinate i replaced by Y'. Every H-term is evaluated on the
    // extended table with i's bit swapped for the auxiliary bit.
    let swap = |m: Mask| if m & i_bit != 0 { (m & !i_bit) | y } else { m };
    let u_swapped = swap(u);
    let mut processed = o.cond(u_swapped, w);
    for (b, weight) in lambda.weights() {
        processed -= weight * o.cond(swap(*b), (u_swapped & !swap(*b)) | w);
    }

    let conditioned = crate::partition::fractional_info(&o, lambda, w | y)?;

    let mut weight_sum = Rat::zero();
    for (_, weight) in lambda.weights() {
        weight_sum += weight;
    }
    let delta = (weight_sum - Rat::one()) * o.mutual(y, u & !i_bit, w | i_bit)?;

    let mut gamma: Option<Rat> = None;
    for (b, _) in lambda.weights() {
        if b & i_bit == 0 {
            continue;
        }
        let mut inner: Option<Rat> = None;
        for j in bits(u & !b) {
            let mi = o.mutual(y, 1 << j, w)?;
            inner = Some(match inner {
                None => mi,
                Some(x) => x.max(mi),
            });
        }
        let inner = inner.unwrap_or_else(Rat::zero);
        gamma = Some(match gamma {
            None => inner,
            Some(g) => g.min(inner),
        });
    }
    let gamma = gamma.unwrap_or_else(Rat::zero);

    let slack1 = &base - (&processed - &delta);
    let slack2 = &base - (&conditioned - &delta + &gamma);
    let tol = float_tolerance();
    let ok = slack1 >= -tol.clone() && slack2 >= -tol;
    Ok(DpiReport { base, processed, conditioned, delta, gamma, slack1, slack2, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::Ground;
    use crate::partition::Partition;
    use crate::value::rat;
    use num_traits::Signed;
    use std::collections::BTreeMap;

    fn correlated_pair() -> TabularSource {
        // P(z1 = z2) = 3/4, uniform marginals.
        let g = Ground::new(vec![1, 2]).unwrap();
        TabularSource::from_outcomes(
            g,
            vec![
                (vec!["0".into(), "0".into()], rat(3, 8)),
                (vec!["1".into(), "1".into()], rat(3, 8)),
                (vec!["0".into(), "1".into()], rat(1, 8)),
                (vec!["1".into(), "0".into()], rat(1, 8)),
            ],
        )
        .unwrap()
    }

    fn copy_channel(src: &TabularSource, of: UserId) -> (Mask, Channel) {
        let inputs = src.ground().mask_of(&[of]).unwrap();
        let mut rows = BTreeMap::new();
        rows.insert(vec!["0".into()], vec![Rat::one(), Rat::zero()]);
        rows.insert(vec!["1".into()], vec![Rat::zero(), Rat::one()]);
        (inputs, Channel { outputs: vec!["0".into(), "1".into()], rows })
    }

    fn constant_channel(src: &TabularSource, of: UserId) -> (Mask, Channel) {
        let inputs = src.ground().mask_of(&[of]).unwrap();
        let mut rows = BTreeMap::new();
        rows.insert(vec!["0".into()], vec![Rat::one()]);
        rows.insert(vec!["1".into()], vec![Rat::one()]);
        (inputs, Channel { outputs: vec!["y".into()], rows })
    }

    #[test]
    fn identity_processing_has_zero_delta_and_slack1() {
        let src = correlated_pair();
        let p = Partition::new(vec![0b01, 0b10]).unwrap();
        let lam = FractionalPartition::from_partition(&p).unwrap();
        let (inputs, chan) = copy_channel(&src, 2);
        let rep = dpi_check(&src, &lam, 2, 0, inputs, &chan).unwrap();
        assert!(rep.ok, "{rep:?}");
        assert!(rep.delta.clone().abs() <= float_tolerance());
        // Y' = Z_2 exactly, so the processed value matches the base value.
        assert!(rep.slack1.clone().abs() <= float_tolerance());
    }

    #[test]
    fn constant_processing_degenerates() {
        let src = correlated_pair();
        let p = Partition::new(vec![0b01, 0b10]).unwrap();
        let lam = FractionalPartition::from_partition(&p).unwrap();
        let (inputs, chan) = constant_channel(&src, 2);
        let rep = dpi_check(&src, &lam, 2, 0, inputs, &chan).unwrap();
        assert!(rep.ok, "{rep:?}");
        // Constant Y': the processed information is zero, base >= 0.
        assert!(rep.processed.clone().abs() <= float_tolerance());
    }
}
