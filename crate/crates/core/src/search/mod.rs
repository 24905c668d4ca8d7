//! SOS branch-and-bound with hot-start strategies.
//!
//! The driver solves the root LP, applies the chosen strategy's fixings,
//! rolls them back if they make the problem infeasible (or leave a tree with
//! no solution), and then searches depth-first until the first incumbent and
//! best-bound afterwards.

pub mod branch;
mod fixing;
mod strategy;

use std::fmt;
use std::rc::Rc;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::model::{Campaign, Instance, LpModel, Row, SosType};
use crate::scalar::Scalar;
use crate::simplex::{resolve, resolve_from_basis, solve_lp, Basis, Bounds, LpSolution, LpStatus, SimplexOptions};

pub use branch::{sos_branch, Branch};
pub use fixing::{Fix, FixingSet, Permanence};
pub use strategy::{relax_to_sos2, rollback_on_infeasible, strategy1_fix, strategy2_fix, strategy3_hotstart, HotStart};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    None,
    /// Fix near-one members backed by reduced costs.
    One,
    /// Fix zeros outside each set's nonzero span.
    Two,
    /// SOS2 relaxation with a current-interval hot start.
    Three,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::None => "none",
            Strategy::One => "1",
            Strategy::Two => "2",
            Strategy::Three => "3",
        }
    }

    /// Set type actually searched: strategy 3 always works on SOS2.
    pub fn sos_type(self, requested: SosType) -> SosType {
        match self {
            Strategy::Three => SosType::Sos2,
            _ => requested,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" | "0" => Ok(Strategy::None),
            "1" => Ok(Strategy::One),
            "2" => Ok(Strategy::Two),
            "3" => Ok(Strategy::Three),
            _ => Err(format!("unknown strategy '{s}' (expected 1, 2, 3 or none)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Limits {
    pub time: Option<Duration>,
    pub nodes: Option<usize>,
    /// Relative optimality gap used to prune once an incumbent exists.
    pub gap: f64,
    /// Stop at the first incumbent.
    pub first_solution: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { time: None, nodes: None, gap: 1e-4, first_solution: true }
    }
}

impl Limits {
    /// Run to proven optimality with no gap and no limits.
    pub fn prove() -> Self {
        Limits { time: None, nodes: None, gap: 0.0, first_solution: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions<T> {
    pub strategy: Strategy,
    pub sos_type: SosType,
    pub near_one_tol: T,
    pub zero_tol: T,
    pub rc_tol: T,
    pub limits: Limits,
    pub simplex: SimplexOptions<T>,
}

impl<T: Scalar> Default for SearchOptions<T> {
    fn default() -> Self {
        SearchOptions {
            strategy: Strategy::None,
            sos_type: SosType::Sos1,
            near_one_tol: T::of(0.95),
            zero_tol: T::of(1e-6),
            rc_tol: T::of(1e-5),
            limits: Limits::default(),
            simplex: SimplexOptions::default(),
        }
    }
}

impl<T: Scalar> SearchOptions<T> {
    pub fn with_strategy(strategy: Strategy) -> Self {
        SearchOptions { strategy, sos_type: strategy.sos_type(SosType::Sos1), ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchStatus {
    /// Tree exhausted; incumbent optimal within the gap.
    Optimal,
    /// Stopped at the first incumbent.
    FirstSolution,
    /// A limit stopped the search after an incumbent was found.
    Feasible,
    Infeasible,
    /// A limit stopped the search before any incumbent.
    LimitReached,
    Unbounded,
}

impl SearchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchStatus::Optimal => "optimal",
            SearchStatus::FirstSolution => "first-solution",
            SearchStatus::Feasible => "feasible",
            SearchStatus::Infeasible => "infeasible",
            SearchStatus::LimitReached => "limit",
            SearchStatus::Unbounded => "unbounded",
        }
    }

    pub fn has_solution(self) -> bool {
        matches!(self, SearchStatus::Optimal | SearchStatus::FirstSolution | SearchStatus::Feasible)
    }
}

impl fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SearchStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [
            SearchStatus::Optimal,
            SearchStatus::FirstSolution,
            SearchStatus::Feasible,
            SearchStatus::Infeasible,
            SearchStatus::LimitReached,
            SearchStatus::Unbounded,
        ]
        .into_iter()
        .find(|st| st.as_str() == s)
        .ok_or_else(|| format!("unknown status '{s}'"))
    }
}

/// Gap between the LP relaxation and an incumbent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Degradation {
    /// `100 (lp - incumbent) / |lp|`.
    Percent(f64),
    /// The LP objective is 0 and the incumbent is not: absolute difference.
    UndefinedRelative(f64),
}

impl Degradation {
    pub fn between(lp: f64, incumbent: f64) -> Self {
        if lp != 0.0 {
            Degradation::Percent(100.0 * (lp - incumbent) / lp.abs())
        } else if incumbent == 0.0 {
            Degradation::Percent(0.0)
        } else {
            Degradation::UndefinedRelative(lp - incumbent)
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Degradation::Percent(v) | Degradation::UndefinedRelative(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SearchStatus,
    pub incumbent_objective: Option<f64>,
    /// Root LP objective before any fixing.
    pub lp_relaxation_objective: f64,
    pub degradation: Option<Degradation>,
    pub first_solution_seconds: Option<f64>,
    pub total_seconds: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub sos_count: usize,
    pub strategy: Strategy,
    pub sos_type_used: SosType,
    /// Heuristic fixings were withdrawn during the search.
    pub rolled_back: bool,
    /// The incumbent came straight from the strategy 3 hot start.
    pub hot_start_incumbent: bool,
}

impl SolveReport {
    pub fn degradation_pct(&self) -> Option<f64> {
        self.degradation.map(Degradation::value)
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult<T> {
    pub report: SolveReport,
    /// Column values of the incumbent.
    pub solution: Option<Vec<T>>,
}

/// Hook for root cut separation. Returned rows are appended to the working
/// model and the root LP is re-solved; an empty vector ends the loop.
pub trait CutCallback<T> {
    fn separate(&mut self, model: &LpModel<T>, lp: &LpSolution<T>) -> Vec<Row<T>>;
}

/// The shipped callback: never cuts.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoCuts;

impl<T> CutCallback<T> for NoCuts {
    fn separate(&mut self, _: &LpModel<T>, _: &LpSolution<T>) -> Vec<Row<T>> {
        Vec::new()
    }
}

const MAX_CUT_ROUNDS: usize = 10;

pub fn branch_and_bound<T: Scalar>(model: &LpModel<T>, options: &SearchOptions<T>) -> SearchResult<T> {
    branch_and_bound_with_cuts(model, options, &mut NoCuts)
}

/// Searches `model` with every set retyped to the strategy's SOS type.
/// Cuts are requested only for SOS1 searches outside strategy 3, which runs
/// cut-free.
pub fn branch_and_bound_with_cuts<T: Scalar>(
    model: &LpModel<T>,
    options: &SearchOptions<T>,
    cuts: &mut dyn CutCallback<T>,
) -> SearchResult<T> {
    let clock = Instant::now();
    let sos_type = options.strategy.sos_type(options.sos_type);
    let mut work = model.clone();
    for set in &mut work.sos_sets {
        set.sos_type = sos_type;
    }
    let root_bounds = Bounds::from_model(&work);
    let mut root = solve_lp(&work, &root_bounds, &options.simplex);

    let mut search = Search {
        model: work,
        opts: options,
        clock,
        incumbent: None,
        first_seconds: None,
        nodes: 1,
        iterations: root.iterations,
        unreliable: false,
        created: 0,
    };
    let early = match root.status {
        LpStatus::Optimal => None,
        LpStatus::Infeasible => Some(SearchStatus::Infeasible),
        LpStatus::Unbounded => Some(SearchStatus::Unbounded),
        LpStatus::IterationLimit => Some(SearchStatus::LimitReached),
    };
    let lp_bound = root.objective;
    let mut report = SolveReport {
        status: SearchStatus::Infeasible,
        incumbent_objective: None,
        lp_relaxation_objective: lp_bound.as_f64(),
        degradation: None,
        first_solution_seconds: None,
        total_seconds: 0.0,
        nodes: 1,
        lp_iterations: 0,
        sos_count: model.sos_sets.len(),
        strategy: options.strategy,
        sos_type_used: sos_type,
        rolled_back: false,
        hot_start_incumbent: false,
    };
    if let Some(status) = early {
        report.status = status;
        return search.finish(report, None);
    }

    if options.strategy != Strategy::Three && sos_type == SosType::Sos1 {
        for round in 0..MAX_CUT_ROUNDS {
            let rows = cuts.separate(&search.model, &root);
            if rows.is_empty() {
                break;
            }
            for (i, r) in rows.into_iter().enumerate() {
                search.model.add_row(format!("CUT_{round}_{i}"), r.sense, r.rhs, r.coefficients);
            }
            root = solve_lp(&search.model, &root_bounds, &options.simplex);
            search.iterations += root.iterations;
            if !root.is_optimal() {
                report.status = SearchStatus::Infeasible;
                return search.finish(report, None);
            }
        }
    }

    let fixes = match options.strategy {
        Strategy::None => FixingSet::new(),
        Strategy::One => strategy1_fix(&search.model, &root, options.near_one_tol, options.rc_tol),
        Strategy::Two => strategy2_fix(&search.model, &root, options.zero_tol),
        Strategy::Three => {
            let hot = strategy3_hotstart(&search.model, &root, &root_bounds, options.zero_tol, &options.simplex);
            if let Some(sol) = &hot.incumbent {
                search.iterations += sol.iterations;
                search.offer(&sol.primal);
                report.hot_start_incumbent = search.incumbent.is_some();
            }
            hot.fixes.without_temporary()
        }
    };
    if search.incumbent.is_some() && options.limits.first_solution {
        report.status = SearchStatus::FirstSolution;
        return search.finish(report, Some(lp_bound));
    }

    let mut bounds = root_bounds.clone();
    let mut start = None;
    if !fixes.is_empty() {
        if fixes.apply(&mut bounds) {
            let lp = resolve(&search.model, &root, &bounds, &options.simplex);
            search.iterations += lp.iterations;
            start = Some(lp);
        }
        let failed = start.as_ref().is_none_or(|lp| lp.status == LpStatus::Infeasible);
        if failed {
            let dead = start.take().unwrap_or_else(|| LpSolution { status: LpStatus::Infeasible, ..root.clone() });
            rollback_on_infeasible(&fixes, &dead);
            report.rolled_back = true;
            bounds = root_bounds.clone();
        }
    }
    let heuristic_tree = start.is_some();
    let start = start.unwrap_or_else(|| root.clone());

    let mut end = search.tree(&bounds, start);
    if end == TreeEnd::Exhausted && search.incumbent.is_none() && heuristic_tree {
        // the fixed tree held no solution: withdraw the fixes and start over
        rollback_on_infeasible(&fixes, &root);
        report.rolled_back = true;
        end = search.tree(&root_bounds, root);
    }
    report.status = match (end, search.incumbent.is_some()) {
        (TreeEnd::FirstSolution, _) => SearchStatus::FirstSolution,
        (TreeEnd::Exhausted, true) if search.unreliable => SearchStatus::Feasible,
        (TreeEnd::Exhausted, true) => SearchStatus::Optimal,
        (TreeEnd::Exhausted, false) if search.unreliable => SearchStatus::LimitReached,
        (TreeEnd::Exhausted, false) => SearchStatus::Infeasible,
        (TreeEnd::Limit, true) => SearchStatus::Feasible,
        (TreeEnd::Limit, false) => SearchStatus::LimitReached,
    };
    search.finish(report, Some(lp_bound))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TreeEnd {
    Exhausted,
    FirstSolution,
    Limit,
}

struct Node<T> {
    /// Columns fixed at zero on top of the tree's base bounds.
    zeros: Vec<usize>,
    bound: T,
    depth: usize,
    order: usize,
    basis: Option<Rc<Basis>>,
}

struct Search<'a, T> {
    model: LpModel<T>,
    opts: &'a SearchOptions<T>,
    clock: Instant,
    incumbent: Option<(T, Vec<T>)>,
    first_seconds: Option<f64>,
    nodes: usize,
    iterations: usize,
    /// Some node LP stopped on its iteration limit, so exhaustion proves
    /// nothing.
    unreliable: bool,
    created: usize,
}

impl<T: Scalar> Search<'_, T> {
    fn sign(&self) -> T {
        self.model.sense.sign()
    }

    /// True when a node with this LP bound cannot beat the incumbent by more
    /// than the gap.
    fn pruned(&self, bound: T) -> bool {
        let Some((inc, _)) = &self.incumbent else {
            return false;
        };
        let slack = (T::of(self.opts.limits.gap) * inc.abs()).max(T::of(1e-9) * (T::one() + inc.abs()));
        self.sign() * (bound - *inc) <= slack
    }

    /// Snaps an SOS-satisfying LP point and keeps it if it improves.
    fn offer(&mut self, primal: &[T]) {
        let x = snap(&self.model, primal, self.opts.zero_tol);
        let obj = self.model.objective_value(&x);
        let better = match &self.incumbent {
            None => true,
            Some((inc, _)) => self.sign() * (obj - *inc) > T::zero(),
        };
        if better {
            self.incumbent = Some((obj, x));
            self.first_seconds.get_or_insert(self.clock.elapsed().as_secs_f64());
        }
    }

    fn limit_hit(&self) -> bool {
        let l = &self.opts.limits;
        l.time.is_some_and(|t| self.clock.elapsed() >= t) || l.nodes.is_some_and(|n| self.nodes >= n)
    }

    fn tree(&mut self, base: &Bounds<T>, root: LpSolution<T>) -> TreeEnd {
        let mut open: Vec<Node<T>> = Vec::new();
        self.process(&mut open, Vec::new(), 0, root);
        loop {
            if self.incumbent.is_some() && self.opts.limits.first_solution {
                return TreeEnd::FirstSolution;
            }
            let pick = if self.incumbent.is_none() {
                open.len().checked_sub(1)
            } else {
                let sign = self.sign();
                (0..open.len()).reduce(|a, b| {
                    let (ka, kb) = (sign * open[a].bound, sign * open[b].bound);
                    if kb > ka || (kb == ka && open[b].order < open[a].order) {
                        b
                    } else {
                        a
                    }
                })
            };
            let Some(i) = pick else {
                return TreeEnd::Exhausted;
            };
            let node = open.swap_remove(i);
            if self.pruned(node.bound) {
                continue;
            }
            if self.limit_hit() {
                return TreeEnd::Limit;
            }
            let mut bounds = base.clone();
            if !node.zeros.iter().all(|&j| bounds.tighten(j, T::neg_infinity(), T::zero())) {
                continue;
            }
            let lp = resolve_from_basis(&self.model, node.basis.as_deref(), &bounds, &self.opts.simplex);
            self.nodes += 1;
            self.iterations += lp.iterations;
            self.process(&mut open, node.zeros, node.depth, lp);
        }
    }

    fn process(&mut self, open: &mut Vec<Node<T>>, zeros: Vec<usize>, depth: usize, mut lp: LpSolution<T>) {
        match lp.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return,
            LpStatus::Unbounded | LpStatus::IterationLimit => {
                self.unreliable = true;
                return;
            }
        }
        if self.pruned(lp.objective) {
            return;
        }
        let zero_tol = self.opts.zero_tol;
        let Some(s) = branch::most_violated(&self.model, &lp.primal, zero_tol) else {
            self.offer(&lp.primal);
            return;
        };
        let set = &self.model.sos_sets[s];
        let b = sos_branch(s, set, &lp.primal, zero_tol).expect("violated set splits");
        let lost = |cols: &[usize]| cols.iter().fold(T::zero(), |acc, &j| acc + lp.primal[j].max(T::zero()));
        // explore the child that keeps more of the LP mass first
        let left_first = lost(&b.left_zero) <= lost(&b.right_zero);
        let basis = lp.basis.take().map(Rc::new);
        let child = |extra: &[usize], created: &mut usize| {
            let mut z = zeros.clone();
            z.extend_from_slice(extra);
            *created += 1;
            Node { zeros: z, bound: lp.objective, depth: depth + 1, order: *created, basis: basis.clone() }
        };
        let left = child(&b.left_zero, &mut self.created);
        let right = child(&b.right_zero, &mut self.created);
        // depth-first pops from the back
        if left_first {
            open.push(right);
            open.push(left);
        } else {
            open.push(left);
            open.push(right);
        }
    }

    fn finish(self, mut report: SolveReport, lp_bound: Option<T>) -> SearchResult<T> {
        report.total_seconds = self.clock.elapsed().as_secs_f64();
        report.nodes = self.nodes;
        report.lp_iterations = self.iterations;
        report.first_solution_seconds = self.first_seconds;
        let solution = self.incumbent.map(|(obj, x)| {
            report.incumbent_objective = Some(obj.as_f64());
            if let Some(lp) = lp_bound {
                report.degradation = Some(Degradation::between(lp.as_f64(), obj.as_f64()));
            }
            x
        });
        SearchResult { report, solution }
    }
}

/// Clears members at or below `zero_tol`, then rescales each set's
/// remaining members so the set keeps its original total. Set totals are 1
/// on bid models, so SOS1 incumbents come out exactly one-hot.
fn snap<T: Scalar>(model: &LpModel<T>, primal: &[T], zero_tol: T) -> Vec<T> {
    let mut x: Vec<T> = primal
        .iter()
        .zip(&model.columns)
        .map(|(&v, c)| v.max(c.lower).min(c.upper))
        .collect();
    for set in &model.sos_sets {
        let total = set.members.iter().fold(T::zero(), |acc, &j| acc + x[j]);
        let mut kept = T::zero();
        for &j in &set.members {
            if x[j].abs() <= zero_tol {
                x[j] = T::zero();
            }
            kept += x[j];
        }
        let near_one = (total - T::one()).abs() <= T::of(1e-6);
        if near_one && kept > T::zero() {
            for &j in &set.members {
                x[j] /= kept;
            }
        }
    }
    x
}

/// Bid implied by one campaign's level values: the value-weighted mean of
/// the bids of its nonzero levels, with the do-nothing level bidding 0.
/// Absent when only the do-nothing level is used or a used level has no bid.
pub fn interpolate_bid<T: Scalar>(campaign: &Campaign, values: &[T], zero_tol: T) -> Option<f64> {
    let (mut num, mut den, mut any_bid) = (0.0, 0.0, false);
    for (level, &v) in campaign.levels.iter().zip(values) {
        if v <= zero_tol {
            continue;
        }
        let v = v.as_f64();
        let bid = match (level.level_index, level.bid) {
            (_, Some(b)) => b,
            (0, None) => 0.0,
            (_, None) => return None,
        };
        any_bid |= level.level_index > 0;
        num += v * bid;
        den += v;
    }
    (any_bid && den > 0.0).then(|| num / den)
}

/// Interpolated bid of every campaign, in instance order. `solution` is
/// indexed like the columns of `build_model(instance)`.
pub fn campaign_bids<T: Scalar>(instance: &Instance, model: &LpModel<T>, solution: &[T], zero_tol: T) -> Vec<(String, Option<f64>)> {
    instance
        .campaigns
        .iter()
        .map(|c| {
            let values: Option<Vec<T>> = c
                .levels
                .iter()
                .map(|l| model.column(&crate::model::column_name(&c.id, l.level_index)).map(|j| solution[j]))
                .collect();
            (c.id.clone(), values.and_then(|v| interpolate_bid(c, &v, zero_tol)))
        })
        .collect()
}
