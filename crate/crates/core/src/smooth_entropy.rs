//! Smooth max entropy and majorization.
//!
//! `H^δ(P)` is `log2` of the smallest number of atoms carrying mass at least `1 - δ`.
//! Sorting the law in non-increasing order makes the optimal set a prefix, so the
//! whole computation is a sort plus a scan.

use core::cmp::Ordering;

use crate::error::{LossyError, Result};
use crate::prob::{Prob, TAU_MASS};

/// A law sorted non-increasingly, with the original index of each entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedLaw<P> {
    probs_desc: Vec<P>,
    permutation: Vec<usize>,
}

impl<P: Prob> SortedLaw<P> {
    /// Stable sort: ties keep their original order.
    pub fn new(law: &[P]) -> Self {
        let mut permutation: Vec<usize> = (0..law.len()).collect();
        permutation.sort_by(|&a, &b| law[b].partial_cmp(&law[a]).unwrap_or(Ordering::Equal));
        let probs_desc = permutation.iter().map(|&i| law[i].clone()).collect();
        Self { probs_desc, permutation }
    }

    pub fn probs_desc(&self) -> &[P] {
        &self.probs_desc
    }

    /// `permutation()[r]` is the original index of the entry ranked `r`.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// Prefix sums of the sorted law: entry `k` is the mass of the `k + 1` heaviest atoms.
    pub fn prefix_sums(&self) -> Vec<P> {
        let mut acc = P::zero();
        self.probs_desc
            .iter()
            .map(|p| {
                acc = acc.clone() + p.clone();
                acc.clone()
            })
            .collect()
    }

    /// Smallest `k` such that the `k` heaviest atoms carry mass `>= 1 - delta`.
    pub fn min_cover_count(&self, delta: &P) -> usize {
        let target = P::one() - delta.clone();
        let mut acc = P::zero();
        for (k, p) in self.probs_desc.iter().enumerate() {
            acc = acc + p.clone();
            if acc.at_least(&target) {
                return k + 1;
            }
        }
        // Float totals a hair below one: the full support is the best available set.
        self.probs_desc.iter().filter(|p| **p > P::zero()).count().max(1)
    }
}

fn check_law<P: Prob>(law: &[P]) -> Result<()> {
    if law.is_empty() {
        return Err(LossyError::Domain("empty probability vector".into()));
    }
    if let Some(p) = law.iter().find(|p| !(**p >= P::zero())) {
        return Err(LossyError::Domain(format!("negative probability {p}")));
    }
    Ok(())
}

fn check_delta<P: Prob>(delta: &P) -> Result<()> {
    if *delta >= P::zero() && *delta < P::one() {
        Ok(())
    } else {
        Err(LossyError::Domain(format!("delta = {delta} is outside [0, 1)")))
    }
}

/// Cardinality `|Z|` of the smallest set with `Pr{Z} >= 1 - delta`.
pub fn smooth_max_support<P: Prob>(law: &[P], delta: &P) -> Result<usize> {
    check_law(law)?;
    check_delta(delta)?;
    Ok(SortedLaw::new(law).min_cover_count(delta))
}

/// Smooth max entropy `H^δ` in bits.
pub fn smooth_max_entropy<P: Prob>(law: &[P], delta: &P) -> Result<f64> {
    Ok((smooth_max_support(law, delta)? as f64).log2())
}

/// Whether `b` majorizes `a`: after sorting both non-increasingly (padding the shorter
/// with zeros), every prefix sum of `a` is at most the matching prefix sum of `b`, and
/// the totals agree.
pub fn majorizes<P: Prob>(b: &[P], a: &[P]) -> Result<bool> {
    let m = a.len().max(b.len());
    let pad = |v: &[P]| {
        let mut out = v.to_vec();
        out.resize(m, P::zero());
        SortedLaw::new(&out).prefix_sums()
    };
    let (sa, sb) = (pad(a), pad(b));
    let (ta, tb) = (sa.last().cloned().unwrap_or_else(P::zero), sb.last().cloned().unwrap_or_else(P::zero));
    let totals_agree = if P::EXACT { ta == tb } else { (ta.to_f64() - tb.to_f64()).abs() <= TAU_MASS };
    if !totals_agree {
        return Err(LossyError::Domain(format!("totals differ: {ta} vs {tb}")));
    }
    // Float prefix sums are compared with the mass tolerance; accumulated rounding in
    // induced laws is far above the threshold-comparison slack.
    Ok(sa.iter().zip(&sb).all(|(pa, pb)| if P::EXACT { pa <= pb } else { pa.to_f64() <= pb.to_f64() + TAU_MASS }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Exact;

    const LAW: [f64; 3] = [0.5, 0.25, 0.25];

    #[test]
    fn entropy_examples() {
        assert!((smooth_max_entropy(&LAW, &0.0).unwrap() - 3f64.log2()).abs() < 1e-15);
        assert_eq!(smooth_max_entropy(&LAW, &0.25).unwrap(), 1.0);
        assert_eq!(smooth_max_entropy(&LAW, &0.6).unwrap(), 0.0);
        assert!(smooth_max_entropy(&LAW, &1.0).is_err());
        assert!(smooth_max_entropy(&LAW, &-0.1).is_err());
    }

    #[test]
    fn exact_boundary() {
        let law: Vec<Exact> = [1u64, 1, 2].iter().map(|&n| Exact::from_ratio(n, 4)).collect();
        assert_eq!(smooth_max_support(&law, &Exact::from_ratio(1, 4)).unwrap(), 2);
        assert_eq!(smooth_max_support(&law, &Exact::from_ratio(1, 5)).unwrap(), 3);
    }

    #[test]
    fn zero_delta_counts_support() {
        let law = [0.0, 0.3, 0.0, 0.7];
        assert_eq!(smooth_max_support(&law, &0.0).unwrap(), 2);
    }

    #[test]
    fn sorted_law_is_stable() {
        let s = SortedLaw::new(&[0.2, 0.4, 0.2, 0.2]);
        assert_eq!(s.permutation(), &[1, 0, 2, 3]);
        assert_eq!(s.probs_desc(), &[0.4, 0.2, 0.2, 0.2]);
    }

    #[test]
    fn majorization_examples() {
        assert!(majorizes(&[1.0, 0.0], &[0.5, 0.5]).unwrap());
        assert!(majorizes(&[0.5, 0.5], &[0.5, 0.5]).unwrap());
        assert!(majorizes(&[0.6, 0.2, 0.2], &[0.4, 0.4, 0.2]).unwrap());
        assert!(!majorizes(&[0.4, 0.4, 0.2], &[0.6, 0.2, 0.2]).unwrap());
        assert!(majorizes(&[1.0], &[0.25, 0.25, 0.25, 0.25]).unwrap());
        assert!(majorizes(&[0.5, 0.5], &[0.5, 0.4]).is_err());
    }
}
