use super::lu::LuFactors;
use super::{Basis, Bounds, LpSolution, LpStatus, SimplexOptions};
use crate::model::{LpModel, ObjectiveSense, RowSense};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable held at zero.
    Free,
}

enum Step<T> {
    Flip(T),
    Pivot { pos: usize, theta: T, to_upper: bool },
    Unbounded,
}

pub(crate) struct Simplex<'a, T> {
    model: &'a LpModel<T>,
    opts: &'a SimplexOptions<T>,
    m: usize,
    n: usize,
    col_start: Vec<usize>,
    col_row: Vec<usize>,
    col_val: Vec<T>,
    row_scale: Vec<T>,
    rhs: Vec<T>,
    lo: Vec<T>,
    hi: Vec<T>,
    cost: Vec<T>,
    x: Vec<T>,
    status: Vec<VarStatus>,
    head: Vec<usize>,
    lu: Option<LuFactors<T>>,
    iterations: usize,
}

fn pow2_scale<T: Scalar>(max_abs: T) -> T {
    if max_abs == T::zero() || !max_abs.is_finite() {
        return T::one();
    }
    let e = max_abs.log2().ceil().to_i32().unwrap_or(0);
    T::of(2.0).powi(-e)
}

impl<'a, T: Scalar> Simplex<'a, T> {
    pub fn new(model: &'a LpModel<T>, bounds: &Bounds<T>, opts: &'a SimplexOptions<T>) -> Self {
        let m = model.rows.len();
        let n = model.columns.len();
        let row_scale: Vec<T> = model.rows.iter().map(|r| pow2_scale(r.max_abs_coefficient())).collect();

        let mut counts = vec![0usize; n + 1];
        for r in &model.rows {
            for &(j, _) in &r.coefficients {
                counts[j + 1] += 1;
            }
        }
        for j in 0..n {
            counts[j + 1] += counts[j];
        }
        let col_start = counts;
        let nnz = col_start[n];
        let mut fill = col_start.clone();
        let mut col_row = vec![0; nnz];
        let mut col_val = vec![T::zero(); nnz];
        for (i, r) in model.rows.iter().enumerate() {
            for &(j, a) in &r.coefficients {
                col_row[fill[j]] = i;
                col_val[fill[j]] = a * row_scale[i];
                fill[j] += 1;
            }
        }

        let rhs = model.rows.iter().zip(&row_scale).map(|(r, &s)| r.rhs * s).collect();
        let mut lo = bounds.lower.clone();
        let mut hi = bounds.upper.clone();
        for r in &model.rows {
            let (l, h) = match r.sense {
                RowSense::Le => (T::zero(), T::infinity()),
                RowSense::Eq => (T::zero(), T::zero()),
                RowSense::Ge => (T::neg_infinity(), T::zero()),
            };
            lo.push(l);
            hi.push(h);
        }
        let sigma: T = match model.sense {
            ObjectiveSense::Maximize => -T::one(),
            ObjectiveSense::Minimize => T::one(),
        };
        let mut cost: Vec<T> = model.columns.iter().map(|c| c.objective * sigma).collect();
        cost.resize(n + m, T::zero());

        Simplex {
            model,
            opts,
            m,
            n,
            col_start,
            col_row,
            col_val,
            row_scale,
            rhs,
            lo,
            hi,
            cost,
            x: vec![T::zero(); n + m],
            status: vec![VarStatus::AtLower; n + m],
            head: Vec::new(),
            lu: None,
            iterations: 0,
        }
    }

    fn column(&self, j: usize) -> Vec<(usize, T)> {
        if j < self.n {
            (self.col_start[j]..self.col_start[j + 1]).map(|e| (self.col_row[e], self.col_val[e])).collect()
        } else {
            vec![(j - self.n, T::one())]
        }
    }

    fn scatter_column(&self, j: usize, out: &mut [T]) {
        out.iter_mut().for_each(|v| *v = T::zero());
        if j < self.n {
            for e in self.col_start[j]..self.col_start[j + 1] {
                out[self.col_row[e]] = self.col_val[e];
            }
        } else {
            out[j - self.n] = T::one();
        }
    }

    fn nonbasic_status(&self, j: usize) -> VarStatus {
        if self.lo[j].is_finite() {
            VarStatus::AtLower
        } else if self.hi[j].is_finite() {
            VarStatus::AtUpper
        } else {
            VarStatus::Free
        }
    }

    fn value_for(&self, j: usize, s: VarStatus) -> T {
        match s {
            VarStatus::AtLower => self.lo[j],
            VarStatus::AtUpper => self.hi[j],
            VarStatus::Free => T::zero(),
            VarStatus::Basic => self.x[j],
        }
    }

    fn cold_start(&mut self) {
        let (n, m) = (self.n, self.m);
        for j in 0..n {
            self.status[j] = self.nonbasic_status(j);
        }
        self.head = (n..n + m).collect();
        for i in 0..m {
            self.status[n + i] = VarStatus::Basic;
        }
        // crash: an equality row whose logical is pinned at zero takes a
        // structural column that appears in that row only
        for (i, row) in self.model.rows.iter().enumerate() {
            if row.sense != RowSense::Eq {
                continue;
            }
            let pick = row.coefficients.iter().map(|&(j, _)| j).find(|&j| {
                self.col_start[j + 1] - self.col_start[j] == 1 && self.status[j] != VarStatus::Basic && self.lo[j] < self.hi[j]
            });
            if let Some(j) = pick {
                self.head[i] = j;
                self.status[j] = VarStatus::Basic;
                self.status[n + i] = VarStatus::AtLower;
            }
        }
        for j in 0..n + m {
            if self.status[j] != VarStatus::Basic {
                self.x[j] = self.value_for(j, self.status[j]);
            }
        }
    }

    fn warm_start(&mut self, basis: &Basis) -> bool {
        let total = self.n + self.m;
        if basis.status.len() != total || basis.head.len() != self.m {
            return false;
        }
        self.status.clone_from(&basis.status);
        self.head.clone_from(&basis.head);
        for j in 0..total {
            let s = self.status[j];
            let s = match s {
                VarStatus::Basic => continue,
                VarStatus::AtLower if self.lo[j].is_finite() => s,
                VarStatus::AtUpper if self.hi[j].is_finite() => s,
                _ => self.nonbasic_status(j),
            };
            self.status[j] = s;
            self.x[j] = self.value_for(j, s);
        }
        true
    }

    /// Factorizes the current basis, swapping in logicals for any columns the
    /// factorization could not pivot.
    fn refactor(&mut self) {
        loop {
            let cols: Vec<Vec<(usize, T)>> = self.head.iter().map(|&j| self.column(j)).collect();
            match LuFactors::factorize(self.m, &cols) {
                Ok(lu) => {
                    self.lu = Some(lu);
                    return;
                }
                Err(singular) => {
                    for (&pos, &row) in singular.positions.iter().zip(&singular.rows) {
                        let out = self.head[pos];
                        let s = self.nearest_bound_status(out);
                        self.status[out] = s;
                        self.x[out] = self.value_for(out, s);
                        let logical = self.n + row;
                        self.head[pos] = logical;
                        self.status[logical] = VarStatus::Basic;
                    }
                }
            }
        }
    }

    fn nearest_bound_status(&self, j: usize) -> VarStatus {
        let (l, h, v) = (self.lo[j], self.hi[j], self.x[j]);
        match (l.is_finite(), h.is_finite()) {
            (true, true) => {
                if (v - l).abs() <= (h - v).abs() {
                    VarStatus::AtLower
                } else {
                    VarStatus::AtUpper
                }
            }
            (true, false) => VarStatus::AtLower,
            (false, true) => VarStatus::AtUpper,
            (false, false) => VarStatus::Free,
        }
    }

    fn compute_basic_values(&mut self) {
        let mut r = self.rhs.clone();
        for j in 0..self.n + self.m {
            if self.status[j] == VarStatus::Basic {
                continue;
            }
            let v = self.x[j];
            if v == T::zero() {
                continue;
            }
            if j < self.n {
                for e in self.col_start[j]..self.col_start[j + 1] {
                    r[self.col_row[e]] -= self.col_val[e] * v;
                }
            } else {
                r[j - self.n] -= v;
            }
        }
        let mut xb = vec![T::zero(); self.m];
        self.lu.as_ref().expect("factorized").ftran(&mut r, &mut xb);
        for (pos, &j) in self.head.iter().enumerate() {
            self.x[j] = xb[pos];
        }
    }

    /// Phase-1 cost of basic variable `j`: -1 below its lower bound, +1 above
    /// its upper bound.
    fn infeasibility_cost(&self, j: usize) -> T {
        let tol = self.opts.feasibility_tol;
        if self.x[j] < self.lo[j] - tol {
            -T::one()
        } else if self.x[j] > self.hi[j] + tol {
            T::one()
        } else {
            T::zero()
        }
    }

    fn reduced_cost(&self, j: usize, cj: T, y: &[T]) -> T {
        if j < self.n {
            let mut d = cj;
            for e in self.col_start[j]..self.col_start[j + 1] {
                d -= self.col_val[e] * y[self.col_row[e]];
            }
            d
        } else {
            cj - y[j - self.n]
        }
    }

    /// Picks an entering variable and its direction (+1 increase, -1 decrease).
    fn price(&self, y: &[T], phase1: bool, bland: bool, rejected: &[usize]) -> Option<(usize, T)> {
        let tol = self.opts.optimality_tol;
        let mut best: Option<(usize, T, T)> = None;
        for j in 0..self.n + self.m {
            let s = self.status[j];
            if s == VarStatus::Basic || self.lo[j] == self.hi[j] || rejected.contains(&j) {
                continue;
            }
            let cj = if phase1 { T::zero() } else { self.cost[j] };
            let d = self.reduced_cost(j, cj, y);
            let (score, dir) = match s {
                VarStatus::AtLower if d < -tol => (-d, T::one()),
                VarStatus::AtUpper if d > tol => (d, -T::one()),
                VarStatus::Free if d.abs() > tol => (d.abs(), -d.signum()),
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(_, bs, _)| score > bs) {
                best = Some((j, score, dir));
            }
        }
        best.map(|(j, _, dir)| (j, dir))
    }

    fn ratio_test(&self, q: usize, dir: T, alpha: &[T], bland: bool) -> Step<T> {
        let tol = self.opts.feasibility_tol;
        let piv = T::pivot_tol();
        // (position, exact ratio, relaxed ratio, leaves at upper)
        let mut blocks: Vec<(usize, T, T, bool)> = Vec::new();
        for (pos, &a) in alpha.iter().enumerate() {
            if a.abs() <= piv {
                continue;
            }
            let k = self.head[pos];
            let rate = -dir * a;
            let (x, lo, hi) = (self.x[k], self.lo[k], self.hi[k]);
            if rate < T::zero() {
                let r = -rate;
                if x > hi + tol {
                    blocks.push((pos, (x - hi) / r, (x - hi + tol) / r, true));
                } else if lo.is_finite() && x >= lo - tol {
                    blocks.push((pos, (x - lo) / r, (x - lo + tol) / r, false));
                }
            } else if x < lo - tol {
                blocks.push((pos, (lo - x) / rate, (lo - x + tol) / rate, false));
            } else if hi.is_finite() && x <= hi + tol {
                blocks.push((pos, (hi - x) / rate, (hi - x + tol) / rate, true));
            }
        }
        let flip = self.hi[q] - self.lo[q];

        if bland {
            let min = blocks.iter().fold(T::infinity(), |m, b| m.min(b.1));
            if flip.is_finite() && flip <= min {
                return Step::Flip(flip);
            }
            if !min.is_finite() {
                return Step::Unbounded;
            }
            let slack = T::epsilon() * T::of(64.0) * (T::one() + min.abs());
            let chosen = blocks
                .iter()
                .filter(|b| b.1 <= min + slack)
                .min_by_key(|b| self.head[b.0])
                .expect("min is attained");
            return Step::Pivot { pos: chosen.0, theta: chosen.1.max(T::zero()), to_upper: chosen.3 };
        }

        // Harris two-pass: bound the step with relaxed bounds, then take the
        // largest pivot among the candidates inside that bound.
        let theta_max = blocks.iter().fold(T::infinity(), |m, b| m.min(b.2));
        if flip.is_finite() && flip <= theta_max {
            return Step::Flip(flip);
        }
        if !theta_max.is_finite() {
            return Step::Unbounded;
        }
        let mut chosen: Option<&(usize, T, T, bool)> = None;
        for b in blocks.iter().filter(|b| b.1 <= theta_max) {
            if chosen.is_none_or(|c| alpha[b.0].abs() > alpha[c.0].abs()) {
                chosen = Some(b);
            }
        }
        let c = chosen.expect("theta_max is attained by some block");
        Step::Pivot { pos: c.0, theta: c.1.max(T::zero()), to_upper: c.3 }
    }

    pub fn run(mut self, warm: Option<&Basis>) -> LpSolution<T> {
        let tol = self.opts.feasibility_tol;
        if (0..self.n).any(|j| self.lo[j] > self.hi[j] + tol) {
            return self.finish(LpStatus::Infeasible, false);
        }
        if !warm.is_some_and(|b| self.warm_start(b)) {
            self.cold_start();
        }
        self.refactor();
        self.compute_basic_values();

        let (m, total) = (self.m, self.n + self.m);
        let mut cb = vec![T::zero(); m];
        let mut y = vec![T::zero(); m];
        let mut alpha = vec![T::zero(); m];
        let mut work = vec![T::zero(); m];
        let mut rejected: Vec<usize> = Vec::new();
        let mut streak = 0usize;
        let mut bland = false;
        let mut fresh = false;

        let status = loop {
            if self.iterations >= self.opts.iteration_limit {
                break LpStatus::IterationLimit;
            }
            let mut phase1 = false;
            for (pos, &j) in self.head.iter().enumerate() {
                let c = self.infeasibility_cost(j);
                phase1 |= c != T::zero();
                cb[pos] = c;
            }
            if !phase1 {
                for (pos, &j) in self.head.iter().enumerate() {
                    cb[pos] = self.cost[j];
                }
            }
            let lu = self.lu.as_ref().expect("factorized");
            lu.btran(&mut cb, &mut y);

            let Some((q, dir)) = self.price(&y, phase1, bland, &rejected) else {
                let stale = self.lu.as_ref().is_some_and(|lu| lu.num_updates() > 0) || !rejected.is_empty();
                if stale && !fresh {
                    // confirm with fresh factors before concluding
                    rejected.clear();
                    self.refactor();
                    self.compute_basic_values();
                    fresh = true;
                    continue;
                }
                break if phase1 { LpStatus::Infeasible } else { LpStatus::Optimal };
            };

            self.scatter_column(q, &mut work);
            self.lu.as_ref().expect("factorized").ftran(&mut work, &mut alpha);

            let step = self.ratio_test(q, dir, &alpha, bland);
            let theta = match step {
                Step::Unbounded => {
                    if phase1 {
                        rejected.push(q);
                        continue;
                    }
                    break LpStatus::Unbounded;
                }
                Step::Flip(t) => t,
                Step::Pivot { theta, .. } => theta,
            };

            let delta = dir * theta;
            if delta != T::zero() {
                self.x[q] += delta;
                for (pos, &a) in alpha.iter().enumerate() {
                    if a != T::zero() {
                        let k = self.head[pos];
                        self.x[k] -= a * delta;
                    }
                }
            }
            match step {
                Step::Flip(_) => {
                    let s = if dir > T::zero() { VarStatus::AtUpper } else { VarStatus::AtLower };
                    self.status[q] = s;
                    self.x[q] = self.value_for(q, s);
                }
                Step::Pivot { pos, to_upper, .. } => {
                    let out = self.head[pos];
                    let s = if to_upper { VarStatus::AtUpper } else { VarStatus::AtLower };
                    self.status[out] = s;
                    self.x[out] = if to_upper { self.hi[out] } else { self.lo[out] };
                    self.head[pos] = q;
                    self.status[q] = VarStatus::Basic;
                    self.lu.as_mut().expect("factorized").update(pos, &alpha);
                }
                Step::Unbounded => unreachable!(),
            }
            self.iterations += 1;
            rejected.clear();
            fresh = false;

            if theta <= T::epsilon() * T::of(16.0) {
                streak += 1;
                if streak >= self.opts.bland_after {
                    bland = true;
                }
            } else {
                streak = 0;
                bland = false;
            }

            if self.lu.as_ref().is_some_and(|lu| lu.num_updates() >= self.opts.refactor_interval) {
                self.refactor();
                self.compute_basic_values();
            }
            debug_assert!(self.head.len() == m && self.status.len() == total);
        };

        self.finish(status, true)
    }

    fn finish(self, status: LpStatus, have_basis: bool) -> LpSolution<T> {
        let (n, m) = (self.n, self.m);
        let sigma: T = match self.model.sense {
            ObjectiveSense::Maximize => -T::one(),
            ObjectiveSense::Minimize => T::one(),
        };
        let primal: Vec<T> = self.x[..n].to_vec();
        let objective = self.model.objective_value(&primal);
        if !have_basis {
            return LpSolution {
                status,
                objective,
                primal,
                reduced_costs: vec![T::zero(); n],
                duals: vec![T::zero(); m],
                iterations: self.iterations,
                basis: None,
            };
        }

        let mut cb: Vec<T> = self.head.iter().map(|&j| self.cost[j]).collect();
        let mut y = vec![T::zero(); m];
        self.lu.as_ref().expect("factorized").btran(&mut cb, &mut y);
        let reduced_costs = (0..n)
            .map(|j| if self.status[j] == VarStatus::Basic { T::zero() } else { sigma * self.reduced_cost(j, self.cost[j], &y) })
            .collect();
        let duals = y.iter().zip(&self.row_scale).map(|(&v, &s)| sigma * v * s).collect();
        LpSolution {
            status,
            objective,
            primal,
            reduced_costs,
            duals,
            iterations: self.iterations,
            basis: Some(Basis { status: self.status, head: self.head }),
        }
    }
}
