//! Hot-start fixings applied before tree search.

use super::branch::{is_satisfied, nonzero_span, weight_position, weighted_average};
use super::fixing::{FixingSet, Permanence};
use crate::model::{LpModel, SosType};
use crate::scalar::Scalar;
use crate::simplex::{resolve, Bounds, LpSolution, LpStatus, SimplexOptions};

/// Strategy 1: for each set with a member at or above `near_one_tol`, fix
/// that member to 1 and the rest to 0 when either the member is the set's
/// first (do-nothing) member, or raising any other member would strictly
/// worsen the objective (reduced cost beyond `rc_tol` in the non-improving
/// direction).
pub fn strategy1_fix<T: Scalar>(model: &LpModel<T>, lp: &LpSolution<T>, near_one_tol: T, rc_tol: T) -> FixingSet<T> {
    let sign = model.sense.sign::<T>();
    let mut fixes = FixingSet::new();
    for set in &model.sos_sets {
        let Some(p) = set.members.iter().position(|&j| lp.primal[j] >= near_one_tol) else {
            continue;
        };
        let others_worse = set
            .members
            .iter()
            .enumerate()
            .filter(|&(q, _)| q != p)
            .all(|(_, &j)| sign * lp.reduced_costs[j] < -rc_tol);
        if p == 0 || others_worse {
            fix_one_hot(&mut fixes, &set.members, p);
        }
    }
    fixes
}

/// Strategy 2: a set with exactly one member above `zero_tol` is fixed
/// one-hot; otherwise members outside the nonzero span are fixed to 0.
pub fn strategy2_fix<T: Scalar>(model: &LpModel<T>, lp: &LpSolution<T>, zero_tol: T) -> FixingSet<T> {
    let mut fixes = FixingSet::new();
    for set in &model.sos_sets {
        match nonzero_span(set, &lp.primal, zero_tol) {
            Some((p, _, 1)) => fix_one_hot(&mut fixes, &set.members, p),
            Some((first, last, _)) => fix_exterior(&mut fixes, &set.members, first, last),
            None => {}
        }
    }
    fixes
}

fn fix_one_hot<T: Scalar>(fixes: &mut FixingSet<T>, members: &[usize], p: usize) {
    for (q, &j) in members.iter().enumerate() {
        fixes.fix(j, if q == p { T::one() } else { T::zero() }, Permanence::Permanent);
    }
}

fn fix_exterior<T: Scalar>(fixes: &mut FixingSet<T>, members: &[usize], first: usize, last: usize) {
    for (q, &j) in members.iter().enumerate() {
        if q < first || q > last {
            fixes.fix(j, T::zero(), Permanence::Permanent);
        }
    }
}

/// Withdraws every heuristic fix after the fixed problem turned out
/// infeasible (`lp` is the failed solve). Rollback is total: the search
/// restarts from the unfixed root.
pub fn rollback_on_infeasible<T: Scalar>(_fixes: &FixingSet<T>, _lp: &LpSolution<T>) -> FixingSet<T> {
    FixingSet::new()
}

/// Same model with every set typed SOS2.
pub fn relax_to_sos2<T: Scalar>(model: &LpModel<T>) -> LpModel<T> {
    let mut relaxed = model.clone();
    for set in &mut relaxed.sos_sets {
        set.sos_type = SosType::Sos2;
    }
    relaxed
}

/// Outcome of the SOS2 hot start.
#[derive(Debug, Clone)]
pub struct HotStart<T> {
    /// Permanent zero flags followed by the temporary current-interval fixes
    /// used for the resolve.
    pub fixes: FixingSet<T>,
    /// The resolved LP, when feasible and SOS2-satisfied.
    pub incumbent: Option<LpSolution<T>>,
    /// Status of the resolve with all fixes applied.
    pub resolve_status: LpStatus,
}

/// Strategy 3: zero-flag members outside each set's nonzero span
/// (permanent), pin each unsatisfied set to its current interval
/// (temporary), and resolve. A feasible resolve is an SOS2 solution.
///
/// The current interval is the adjacent pair (r, r+1) where r is the last
/// member whose weight does not exceed the set's weighted average; (r-1, r)
/// when r is the last member.
pub fn strategy3_hotstart<T: Scalar>(
    model: &LpModel<T>,
    lp: &LpSolution<T>,
    bounds: &Bounds<T>,
    zero_tol: T,
    options: &SimplexOptions<T>,
) -> HotStart<T> {
    let mut fixes = FixingSet::new();
    let mut temporary = Vec::new();
    for set in &model.sos_sets {
        let Some((first, last, _)) = nonzero_span(set, &lp.primal, zero_tol) else {
            continue;
        };
        fix_exterior(&mut fixes, &set.members, first, last);
        if is_satisfied(set, &lp.primal, zero_tol) {
            continue;
        }
        let w_bar = weighted_average(set, &lp.primal).unwrap_or(T::zero());
        let mut r = weight_position(set, w_bar).clamp(first, last);
        if r == last {
            r -= 1;
        }
        for q in first..=last {
            if q != r && q != r + 1 {
                temporary.push(set.members[q]);
            }
        }
    }
    for j in temporary {
        fixes.fix(j, T::zero(), Permanence::Temporary);
    }

    let mut fixed = bounds.clone();
    if !fixes.apply(&mut fixed) {
        return HotStart { fixes, incumbent: None, resolve_status: LpStatus::Infeasible };
    }
    let sol = resolve(model, lp, &fixed, options);
    let status = sol.status;
    let ok = sol.is_optimal() && model.sos_sets.iter().all(|s| is_satisfied(s, &sol.primal, zero_tol));
    HotStart { fixes, incumbent: ok.then_some(sol), resolve_status: status }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, toy};
    use crate::simplex::solve_lp;

    fn t1_root() -> (LpModel<f64>, LpSolution<f64>) {
        let m = build_model(&toy::t1()).unwrap();
        let lp = solve_lp(&m, &Bounds::from_model(&m), &SimplexOptions::default());
        (m, lp)
    }

    fn with_primal(lp: &LpSolution<f64>, x: &[f64]) -> LpSolution<f64> {
        LpSolution { primal: x.to_vec(), ..lp.clone() }
    }

    #[test]
    fn strategy1_on_t1_fixes_nothing() {
        let (m, lp) = t1_root();
        assert!(strategy1_fix(&m, &lp, 0.95, 1e-5).is_empty());
    }

    #[test]
    fn strategy1_slack_member_at_one() {
        let (m, lp) = t1_root();
        let lp = with_primal(&lp, &[1.0, 0.0, 0.0]);
        let f = strategy1_fix(&m, &lp, 0.95, 1e-5);
        assert_eq!(f.len(), 3);
        assert_eq!([f.value_of(0), f.value_of(1), f.value_of(2)], [Some(1.0), Some(0.0), Some(0.0)]);
    }

    #[test]
    fn strategy1_reduced_cost_clause() {
        let (m, lp) = t1_root();
        let mut lp = with_primal(&lp, &[0.0, 0.03, 0.97]);
        lp.reduced_costs = vec![-5.0, -1e-7, 0.0];
        assert!(strategy1_fix(&m, &lp, 0.95, 1e-5).is_empty());
        lp.reduced_costs = vec![-5.0, -2.0, 0.0];
        let f = strategy1_fix(&m, &lp, 0.95, 1e-5);
        assert_eq!(f.value_of(2), Some(1.0));
    }

    #[test]
    fn strategy2_cases() {
        let (m, lp) = t1_root();
        let f = strategy2_fix(&m, &lp, 1e-6);
        assert_eq!(f.len(), 1);
        assert_eq!(f.value_of(0), Some(0.0));

        let f = strategy2_fix(&m, &with_primal(&lp, &[0.0, 1.0, 0.0]), 1e-6);
        assert_eq!([f.value_of(0), f.value_of(1), f.value_of(2)], [Some(0.0), Some(1.0), Some(0.0)]);

        assert!(strategy2_fix(&m, &with_primal(&lp, &[0.5, 0.0, 0.5]), 1e-6).is_empty());
    }

    #[test]
    fn relax_flips_types_only() {
        let (m, _) = t1_root();
        let r = relax_to_sos2(&m);
        assert_eq!(r.rows, m.rows);
        assert_eq!(r.columns, m.columns);
        assert!(r.sos_sets.iter().all(|s| s.sos_type == SosType::Sos2));
    }

    #[test]
    fn strategy3_on_t1_is_the_lp_optimum() {
        let (m, _) = t1_root();
        let m = relax_to_sos2(&m);
        let b = Bounds::from_model(&m);
        let lp = solve_lp(&m, &b, &SimplexOptions::default());
        let h = strategy3_hotstart(&m, &lp, &b, 1e-6, &SimplexOptions::default());
        assert_eq!(h.fixes.len(), 1);
        assert_eq!(h.fixes.value_of(0), Some(0.0));
        assert_eq!(h.fixes.entries()[0].permanence, Permanence::Permanent);
        let inc = h.incumbent.unwrap();
        assert!((inc.objective - 900.0 / 11.0).abs() < 1e-9);
    }

    #[test]
    fn rollback_is_total() {
        let (m, lp) = t1_root();
        let f = strategy2_fix(&m, &lp, 1e-6);
        let mut infeasible = lp.clone();
        infeasible.status = LpStatus::Infeasible;
        assert!(rollback_on_infeasible(&f, &infeasible).is_empty());
    }
}
