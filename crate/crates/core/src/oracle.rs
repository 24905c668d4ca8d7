//! Brute-force reference solvers and an independent feasibility check.
//!
//! Everything here works from the raw [`Instance`]: spend, clicks and
//! impressions are recomputed from the level data rather than read from an
//! `LpModel`, so mistakes in model construction show up as disagreements.

use crate::model::{Instance, SosType};

/// Default limit on the number of assignments enumerated.
pub const DEFAULT_CAP: f64 = 1e7;

/// Feasibility slack per unit of row scale used by the enumerators.
const ORACLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("{count:.0} assignments exceed the enumeration cap {cap:.0}")]
    CapExceeded { count: f64, cap: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sos1Optimum {
    pub objective: f64,
    /// Chosen level per campaign, in instance order.
    pub levels: Vec<usize>,
}

/// Levels used by one campaign in an SOS2 solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Interval {
    Single(usize),
    /// Levels `lower` and `lower + 1` with the given weights (summing to 1).
    Pair { lower: usize, weights: (f64, f64) },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sos2Optimum {
    pub objective: f64,
    pub intervals: Vec<Interval>,
}

impl Sos2Optimum {
    /// Per-campaign level values.
    pub fn values(&self, instance: &Instance) -> Vec<Vec<f64>> {
        instance
            .campaigns
            .iter()
            .zip(&self.intervals)
            .map(|(c, iv)| {
                let mut v = vec![0.0; c.levels.len()];
                match *iv {
                    Interval::Single(j) => v[j] = 1.0,
                    Interval::Pair { lower, weights } => {
                        v[lower] = weights.0;
                        v[lower + 1] = weights.1;
                    }
                }
                v
            })
            .collect()
    }
}

/// Per-level contributions of one campaign to the coupling rows, laid out as
/// `[BUD_k, CLK_k for each business..., IMP]`.
struct Coupling {
    /// `rows[i][j]` = sparse (row, coefficient) of campaign i at level j.
    rows: Vec<Vec<Vec<(usize, f64)>>>,
    rhs: Vec<f64>,
    scale: Vec<f64>,
    ret: Vec<Vec<f64>>,
}

fn coupling(instance: &Instance) -> Coupling {
    let nb = instance.businesses.len();
    let imp = 2 * nb;
    let mut rhs = Vec::with_capacity(imp + 1);
    for b in &instance.businesses {
        rhs.push(b.budget);
        rhs.push(0.0);
    }
    rhs.push(instance.impression_budget);
    let mut scale = vec![1.0f64; imp + 1];
    let mut rows = Vec::with_capacity(instance.campaigns.len());
    let mut ret = Vec::with_capacity(instance.campaigns.len());
    for c in &instance.campaigns {
        let k = instance.businesses.iter().position(|b| b.id == c.business_id).expect("campaign owner exists");
        let cpc = instance.businesses[k].cpc;
        let per_level: Vec<Vec<(usize, f64)>> = c
            .levels
            .iter()
            .map(|l| {
                let entries = [
                    (2 * k, l.impressions * l.ad_value),
                    (2 * k + 1, l.impressions * (l.ad_value - cpc * c.ctr)),
                    (imp, l.impressions),
                ];
                entries.into_iter().filter(|&(_, a)| a != 0.0).collect()
            })
            .collect();
        for lv in &per_level {
            for &(r, a) in lv {
                scale[r] = scale[r].max(a.abs());
            }
        }
        rows.push(per_level);
        ret.push(c.levels.iter().map(|l| l.ret).collect());
    }
    Coupling { rows, rhs, scale, ret }
}

impl Coupling {
    fn fits(&self, activity: &[f64]) -> bool {
        activity.iter().zip(&self.rhs).zip(&self.scale).all(|((a, b), s)| *a <= b + ORACLE_TOL * s)
    }
}

fn check_cap(count: f64, cap: f64) -> Result<(), OracleError> {
    if count > cap {
        Err(OracleError::CapExceeded { count, cap })
    } else {
        Ok(())
    }
}

/// Best one-level-per-campaign assignment. Ties go to the lexicographically
/// smallest level vector.
pub fn enumerate_sos1(instance: &Instance, cap: f64) -> Result<Sos1Optimum, OracleError> {
    check_cap(instance.assignment_count(), cap)?;
    let cp = coupling(instance);
    // spend and impressions never decrease as campaigns are added, so a
    // partial assignment already over B_k or V is dead
    let monotone: Vec<bool> = (0..cp.rhs.len()).map(|r| r == cp.rhs.len() - 1 || r % 2 == 0).collect();
    let mut best = Sos1Optimum { objective: f64::NEG_INFINITY, levels: Vec::new() };
    let mut levels = vec![0usize; instance.campaigns.len()];
    let mut activity = vec![0.0; cp.rhs.len()];
    dfs1(&cp, &monotone, 0, 0.0, &mut levels, &mut activity, &mut best);
    Ok(best)
}

fn dfs1(
    cp: &Coupling,
    monotone: &[bool],
    i: usize,
    value: f64,
    levels: &mut [usize],
    activity: &mut [f64],
    best: &mut Sos1Optimum,
) {
    if i == levels.len() {
        if cp.fits(activity) && value > best.objective {
            *best = Sos1Optimum { objective: value, levels: levels.to_vec() };
        }
        return;
    }
    for j in 0..cp.rows[i].len() {
        for &(r, a) in &cp.rows[i][j] {
            activity[r] += a;
        }
        let alive = (0..activity.len()).all(|r| !monotone[r] || activity[r] <= cp.rhs[r] + ORACLE_TOL * cp.scale[r]);
        if alive {
            levels[i] = j;
            dfs1(cp, monotone, i + 1, value + cp.ret[i][j], levels, activity, best);
        }
        for &(r, a) in &cp.rows[i][j] {
            activity[r] -= a;
        }
    }
}

/// Best solution in which every campaign uses one level or two adjacent
/// levels. Within each pattern combination the pair weights solve a small LP,
/// whose optimum is found among the vertices where every pair weight is
/// strictly inside (0, 1); weights at 0 or 1 are covered by the single-level
/// patterns. Ties go to the first pattern combination in enumeration order.
pub fn enumerate_sos2(instance: &Instance, cap: f64) -> Result<Sos2Optimum, OracleError> {
    let count: f64 = instance.campaigns.iter().map(|c| (2 * c.levels.len() - 1) as f64).product();
    check_cap(count, cap)?;
    let cp = coupling(instance);
    let n = instance.campaigns.len();
    let patterns: Vec<Vec<Interval>> = instance
        .campaigns
        .iter()
        .map(|c| {
            let j = c.levels.len();
            let mut p: Vec<Interval> = (0..j).map(Interval::Single).collect();
            p.extend((0..j - 1).map(|lower| Interval::Pair { lower, weights: (0.5, 0.5) }));
            p
        })
        .collect();

    let mut best = Sos2Optimum { objective: f64::NEG_INFINITY, intervals: Vec::new() };
    let mut pick = vec![0usize; n];
    loop {
        let chosen: Vec<Interval> = pick.iter().enumerate().map(|(i, &p)| patterns[i][p]).collect();
        if let Some((obj, iv)) = best_weights(&cp, &chosen) {
            if obj > best.objective {
                best = Sos2Optimum { objective: obj, intervals: iv };
            }
        }
        // odometer, last campaign fastest
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(best);
            }
            i -= 1;
            pick[i] += 1;
            if pick[i] < patterns[i].len() {
                break;
            }
            pick[i] = 0;
        }
    }
}

/// Optimal interior pair weights for one pattern combination, if any.
fn best_weights(cp: &Coupling, chosen: &[Interval]) -> Option<(f64, Vec<Interval>)> {
    let m = cp.rhs.len();
    // activity and value with every pair weight t = 0 (all on the lower level)
    let mut base = vec![0.0; m];
    let mut value = 0.0;
    let mut pairs = Vec::new();
    for (i, iv) in chosen.iter().enumerate() {
        let j = match *iv {
            Interval::Single(j) => j,
            Interval::Pair { lower, .. } => {
                pairs.push(i);
                lower
            }
        };
        for &(r, a) in &cp.rows[i][j] {
            base[r] += a;
        }
        value += cp.ret[i][j];
    }
    let p = pairs.len();
    if p == 0 {
        return cp.fits(&base).then(|| (value, chosen.to_vec()));
    }
    if p > m {
        return None;
    }
    // d(row)/dt and d(value)/dt per pair
    let mut grad = vec![vec![0.0; p]; m];
    let mut gain = vec![0.0; p];
    for (q, &i) in pairs.iter().enumerate() {
        let Interval::Pair { lower, .. } = chosen[i] else { unreachable!() };
        for &(r, a) in &cp.rows[i][lower + 1] {
            grad[r][q] += a;
        }
        for &(r, a) in &cp.rows[i][lower] {
            grad[r][q] -= a;
        }
        gain[q] = cp.ret[i][lower + 1] - cp.ret[i][lower];
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    for active in subsets(m, p) {
        let mut a: Vec<Vec<f64>> = active.iter().map(|&r| grad[r].clone()).collect();
        let mut b: Vec<f64> = active.iter().map(|&r| cp.rhs[r] - base[r]).collect();
        let Some(t) = gauss(&mut a, &mut b) else { continue };
        if t.iter().any(|&x| x <= 0.0 || x >= 1.0) {
            continue;
        }
        let act: Vec<f64> = (0..m).map(|r| base[r] + (0..p).map(|q| grad[r][q] * t[q]).sum::<f64>()).collect();
        if !cp.fits(&act) {
            continue;
        }
        let v = value + (0..p).map(|q| gain[q] * t[q]).sum::<f64>();
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, t));
        }
    }
    let (v, t) = best?;
    let mut out = chosen.to_vec();
    for (q, &i) in pairs.iter().enumerate() {
        if let Interval::Pair { lower, .. } = chosen[i] {
            out[i] = Interval::Pair { lower, weights: (1.0 - t[q], t[q]) };
        }
    }
    Some((v, out))
}

/// All size-`k` subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..n {
            cur.push(s);
            rec(s + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn gauss(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for i in 0..n {
            if i != c {
                let f = a[i][c] / a[c][c];
                if f != 0.0 {
                    let pivot = a[c].clone();
                    for (x, p) in a[i][c..].iter_mut().zip(&pivot[c..]) {
                        *x -= f * p;
                    }
                    b[i] -= f * b[c];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Splits a flat column vector (campaign-major, level order) into
/// per-campaign level values. `None` when the length does not match.
pub fn split_by_campaign(instance: &Instance, flat: &[f64]) -> Option<Vec<Vec<f64>>> {
    let total: usize = instance.campaigns.iter().map(|c| c.levels.len()).sum();
    if flat.len() != total {
        return None;
    }
    let mut rest = flat;
    Some(
        instance
            .campaigns
            .iter()
            .map(|c| {
                let (head, tail) = rest.split_at(c.levels.len());
                rest = tail;
                head.to_vec()
            })
            .collect(),
    )
}

/// Objective of per-campaign level values, summed from the instance.
pub fn objective(instance: &Instance, values: &[Vec<f64>]) -> f64 {
    instance.campaigns.iter().zip(values).map(|(c, v)| c.levels.iter().zip(v).map(|(l, x)| l.ret * x).sum::<f64>()).sum()
}

/// Checks level values against every constraint and the SOS condition.
///
/// Row tolerance is `tol` times the row's largest coefficient (at least 1),
/// so a 1e-6 check means the same thing for a budget in dollars and a row in
/// impressions. Values above `zero_tol` count as nonzero. Returns one message
/// per problem; empty means feasible.
pub fn verify(instance: &Instance, values: &[Vec<f64>], sos: SosType, zero_tol: f64, tol: f64) -> Vec<String> {
    let mut problems = Vec::new();
    if values.len() != instance.campaigns.len() {
        problems.push(format!("expected {} campaigns, got {}", instance.campaigns.len(), values.len()));
        return problems;
    }
    for (c, v) in instance.campaigns.iter().zip(values) {
        if v.len() != c.levels.len() {
            problems.push(format!("campaign {}: expected {} levels, got {}", c.id, c.levels.len(), v.len()));
            continue;
        }
        for (j, &x) in v.iter().enumerate() {
            if !(-tol..=1.0 + tol).contains(&x) {
                problems.push(format!("campaign {} level {j}: value {x} outside [0, 1]", c.id));
            }
        }
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > tol {
            problems.push(format!("campaign {}: levels sum to {sum}, not 1", c.id));
        }
        let nz: Vec<usize> = (0..v.len()).filter(|&j| v[j] > zero_tol).collect();
        let ok = match sos {
            SosType::Sos1 => nz.len() <= 1,
            SosType::Sos2 => nz.len() <= 1 || (nz.len() == 2 && nz[1] == nz[0] + 1),
        };
        if !ok {
            problems.push(format!("campaign {}: nonzero levels {nz:?} break SOS{}", c.id, sos.as_u8()));
        }
    }

    let mut check = |name: String, activity: f64, rhs: f64, scale: f64| {
        if activity > rhs + tol * scale.max(1.0) {
            problems.push(format!("{name}: activity {activity} exceeds {rhs}"));
        }
    };
    let mut impressions = (0.0, 0.0f64);
    for b in &instance.businesses {
        let (mut spend, mut clicks) = ((0.0, 0.0f64), (0.0, 0.0f64));
        for (c, v) in instance.campaigns.iter().zip(values).filter(|(c, _)| c.business_id == b.id) {
            for (l, &x) in c.levels.iter().zip(v) {
                let s = l.impressions * l.ad_value;
                let k = l.impressions * (l.ad_value - b.cpc * c.ctr);
                spend = (spend.0 + s * x, spend.1.max(s.abs()));
                clicks = (clicks.0 + k * x, clicks.1.max(k.abs()));
            }
        }
        check(format!("budget of business {}", b.id), spend.0, b.budget, spend.1);
        check(format!("click value of business {}", b.id), clicks.0, 0.0, clicks.1);
    }
    for (c, v) in instance.campaigns.iter().zip(values) {
        for (l, &x) in c.levels.iter().zip(v) {
            impressions = (impressions.0 + l.impressions * x, impressions.1.max(l.impressions));
        }
    }
    check("impression budget".into(), impressions.0, instance.impression_budget, impressions.1);
    problems
}
