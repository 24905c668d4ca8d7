//! SOS bookkeeping and the Beale–Tomlin style split.

use crate::model::{LpModel, SosSet, SosType};
use crate::scalar::Scalar;

/// Positions (within the set) of the first and last member above `zero_tol`,
/// and how many members are above it.
pub fn nonzero_span<T: Scalar>(set: &SosSet<T>, values: &[T], zero_tol: T) -> Option<(usize, usize, usize)> {
    let mut span: Option<(usize, usize, usize)> = None;
    for (p, &j) in set.members.iter().enumerate() {
        if values[j] > zero_tol {
            span = Some(match span {
                None => (p, p, 1),
                Some((first, _, count)) => (first, p, count + 1),
            });
        }
    }
    span
}

/// How far the set is from its SOS condition; 0 means satisfied.
///
/// SOS1 counts nonzeros beyond the first. SOS2 counts the width of the
/// nonzero span beyond two adjacent members, so (x, 0, x) scores 1 and
/// (x, x, x, x) scores 2.
pub fn violation<T: Scalar>(set: &SosSet<T>, values: &[T], zero_tol: T) -> usize {
    match (nonzero_span(set, values, zero_tol), set.sos_type) {
        (None, _) => 0,
        (Some((_, _, count)), SosType::Sos1) => count - 1,
        (Some((first, last, _)), SosType::Sos2) => (last - first + 1).saturating_sub(2),
    }
}

pub fn is_satisfied<T: Scalar>(set: &SosSet<T>, values: &[T], zero_tol: T) -> bool {
    violation(set, values, zero_tol) == 0
}

/// Set with the largest violation; ties go to the lowest index.
pub fn most_violated<T: Scalar>(model: &LpModel<T>, values: &[T], zero_tol: T) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for (s, set) in model.sos_sets.iter().enumerate() {
        let v = violation(set, values, zero_tol);
        if v > 0 && best.is_none_or(|(_, bv)| v > bv) {
            best = Some((s, v));
        }
    }
    best.map(|(s, _)| s)
}

/// `sum w_j x_j / sum x_j` over the set, `None` when the set is all zero.
pub fn weighted_average<T: Scalar>(set: &SosSet<T>, values: &[T]) -> Option<T> {
    let (mut num, mut den) = (T::zero(), T::zero());
    for (&j, &w) in set.members.iter().zip(&set.weights) {
        let x = values[j].max(T::zero());
        num += w * x;
        den += x;
    }
    (den > T::zero()).then(|| num / den)
}

/// Largest position whose weight does not exceed `w_bar`.
pub fn weight_position<T: Scalar>(set: &SosSet<T>, w_bar: T) -> usize {
    set.weights.iter().rposition(|&w| w <= w_bar).unwrap_or(0)
}

/// The two children of a branch on one set, as columns to fix at zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub set: usize,
    /// Split position r within the set.
    pub split: usize,
    /// Left child keeps positions `..=r` free.
    pub left_zero: Vec<usize>,
    /// Right child keeps `r+1..` (SOS1) or `r..` (SOS2) free.
    pub right_zero: Vec<usize>,
}

/// Splits a violated set at the weighted average of its LP values.
///
/// When the raw split would leave one child with all nonzeros (so the LP
/// point survives in it), r is shifted one step toward the interior of the
/// nonzero span. Returns `None` for a satisfied set.
pub fn sos_branch<T: Scalar>(set_index: usize, set: &SosSet<T>, values: &[T], zero_tol: T) -> Option<Branch> {
    if is_satisfied(set, values, zero_tol) {
        return None;
    }
    let (first, last, _) = nonzero_span(set, values, zero_tol)?;
    let w_bar = weighted_average(set, values)?;
    let r = weight_position(set, w_bar);
    let (lo, hi) = match set.sos_type {
        SosType::Sos1 => (first, last - 1),
        SosType::Sos2 => (first + 1, last - 1),
    };
    let r = r.clamp(lo, hi);
    let left_zero = set.members[r + 1..].to_vec();
    let right_zero = match set.sos_type {
        SosType::Sos1 => set.members[..=r].to_vec(),
        SosType::Sos2 => set.members[..r].to_vec(),
    };
    Some(Branch { set: set_index, split: r, left_zero, right_zero })
}
