use proptest::prelude::*;

use super::*;
use crate::model::{build_model, toy, LpModel, ObjectiveSense, RowSense};

fn t1() -> LpModel<f64> {
    build_model(&toy::t1()).unwrap()
}

fn opts() -> SimplexOptions<f64> {
    SimplexOptions::default()
}

/// Independent vertex enumeration for tiny LPs: every choice of `n` active
/// constraints (rows at equality or bounds) is solved by Gaussian elimination
/// and the best feasible point kept. Returns `None` when no vertex is
/// feasible.
fn brute_force_lp(model: &LpModel<f64>, bounds: &Bounds<f64>) -> Option<f64> {
    let n = model.num_columns();
    // each candidate constraint as (coefficients, rhs)
    let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
    for (i, r) in model.rows.iter().enumerate() {
        cons.push((model.dense_row(i), r.rhs));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        if bounds.lower[j].is_finite() {
            cons.push((e.clone(), bounds.lower[j]));
        }
        if bounds.upper[j].is_finite() {
            cons.push((e, bounds.upper[j]));
        }
    }
    let mut best: Option<f64> = None;
    let k = cons.len();
    let mut pick: Vec<usize> = (0..n).collect();
    if n > k {
        return None;
    }
    loop {
        let mut a: Vec<Vec<f64>> = pick.iter().map(|&c| cons[c].0.clone()).collect();
        let mut b: Vec<f64> = pick.iter().map(|&c| cons[c].1).collect();
        if let Some(x) = gauss(&mut a, &mut b) {
            let feasible = (0..n).all(|j| x[j] >= bounds.lower[j] - 1e-9 && x[j] <= bounds.upper[j] + 1e-9)
                && model.rows.iter().all(|r| r.violation(r.activity(&x)) <= 1e-9 * (1.0 + r.max_abs_coefficient()));
            if feasible {
                let obj = model.objective_value(&x);
                let better = match (best, model.sense) {
                    (None, _) => true,
                    (Some(v), ObjectiveSense::Maximize) => obj > v,
                    (Some(v), ObjectiveSense::Minimize) => obj < v,
                };
                if better {
                    best = Some(obj);
                }
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < k - n + i {
                pick[i] += 1;
                for t in i + 1..n {
                    pick[t] = pick[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn gauss(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for i in 0..n {
            if i != c {
                let f = a[i][c] / a[c][c];
                let pivot = a[c].clone();
                for (x, p) in a[i][c..].iter_mut().zip(&pivot[c..]) {
                    *x -= f * p;
                }
                b[i] -= f * b[c];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn assert_optimality_conditions(model: &LpModel<f64>, bounds: &Bounds<f64>, sol: &LpSolution<f64>) {
    assert_eq!(sol.status, LpStatus::Optimal);
    let tol = 1e-7;
    for j in 0..model.num_columns() {
        assert!(sol.primal[j] >= bounds.lower[j] - tol && sol.primal[j] <= bounds.upper[j] + tol);
    }
    assert!(model.max_scaled_row_violation(&sol.primal) <= 1e-7);
    let sign = model.sense.sign::<f64>();
    for j in 0..model.num_columns() {
        let d = sign * sol.reduced_costs[j];
        if bounds.lower[j] == bounds.upper[j] {
            continue;
        }
        match sol.column_status(j).unwrap() {
            VarStatus::AtLower => assert!(d <= tol, "column {j} at lower with reduced cost {d}"),
            VarStatus::AtUpper => assert!(d >= -tol, "column {j} at upper with reduced cost {d}"),
            _ => {}
        }
    }
    let dual = sol.dual_objective(model);
    assert!((dual - sol.objective).abs() <= 1e-6 * (1.0 + sol.objective.abs()), "primal {} dual {}", sol.objective, dual);
}

#[test]
fn t1_relaxation() {
    let m = t1();
    let b = Bounds::from_model(&m);
    let sol = solve_lp(&m, &b, &opts());
    assert_optimality_conditions(&m, &b, &sol);
    assert!((sol.objective - 900.0 / 11.0).abs() < 1e-9);
    assert!(sol.primal[0].abs() < 1e-9);
    assert!((sol.primal[1] - 6.0 / 11.0).abs() < 1e-9);
    assert!((sol.primal[2] - 5.0 / 11.0).abs() < 1e-9);
    assert!((brute_force_lp(&m, &b).unwrap() - 900.0 / 11.0).abs() < 1e-9);
}

#[test]
fn t1_with_top_level_fixed_out() {
    let m = t1();
    let mut b = Bounds::from_model(&m);
    b.fix(2, 0.0);
    let sol = solve_lp(&m, &b, &opts());
    assert_optimality_conditions(&m, &b, &sol);
    assert!((sol.objective - 50.0).abs() < 1e-9);
    assert!((sol.primal[1] - 1.0).abs() < 1e-9);
}

#[test]
fn t1_two_levels_fixed_to_one_is_infeasible() {
    let m = t1();
    let mut b = Bounds::from_model(&m);
    b.fix(1, 1.0);
    b.fix(2, 1.0);
    assert_eq!(solve_lp(&m, &b, &opts()).status, LpStatus::Infeasible);
}

#[test]
fn inverted_bounds_are_infeasible() {
    let m = t1();
    let mut b = Bounds::from_model(&m);
    b.set(1, 1.0, 0.0);
    assert!(!b.is_consistent());
    assert_eq!(solve_lp(&m, &b, &opts()).status, LpStatus::Infeasible);
}

#[test]
fn resolve_contract() {
    let m = t1();
    let b = Bounds::from_model(&m);
    let first = solve_lp(&m, &b, &opts());

    let again = resolve(&m, &first, &b, &opts());
    assert!((again.objective - first.objective).abs() < 1e-9);
    assert_eq!(again.iterations, 0);

    let mut fixed = b.clone();
    fixed.fix(0, 0.0);
    let warm = resolve(&m, &first, &fixed, &opts());
    assert!((warm.objective - 900.0 / 11.0).abs() < 1e-9);

    let mut dead = b.clone();
    dead.fix(0, 0.0);
    dead.fix(1, 0.0);
    dead.set(2, 0.0, 0.5);
    assert_eq!(resolve(&m, &first, &dead, &opts()).status, LpStatus::Infeasible);

    // warm and cold agree after branching-style tightening
    let mut branch = b.clone();
    branch.fix(2, 0.0);
    let w = resolve(&m, &first, &branch, &opts());
    let c = solve_lp(&m, &branch, &opts());
    assert!((w.objective - c.objective).abs() < 1e-9);
    assert_optimality_conditions(&m, &branch, &w);
}

#[test]
fn determinism() {
    let m: LpModel<f64> = build_model(&toy::two_business()).unwrap();
    let b = Bounds::from_model(&m);
    let a = solve_lp(&m, &b, &opts());
    let c = solve_lp(&m, &b, &opts());
    assert_eq!(a, c);
}

#[test]
fn f32_solve_of_t1() {
    let m: LpModel<f32> = build_model(&toy::t1()).unwrap();
    let b = Bounds::from_model(&m);
    let sol = solve_lp(&m, &b, &SimplexOptions::default());
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!((sol.objective - 900.0 / 11.0).abs() < 1e-3);
}

#[test]
fn unbounded_detected() {
    let mut m = LpModel::<f64>::new("u", ObjectiveSense::Maximize);
    let x = m.add_column("x", 1.0, 0.0, f64::INFINITY).unwrap();
    let y = m.add_column("y", 0.0, 0.0, f64::INFINITY).unwrap();
    m.add_row("r", RowSense::Le, 1.0, [(x, 1.0), (y, -1.0)]);
    let sol = solve_lp(&m, &Bounds::from_model(&m), &opts());
    assert_eq!(sol.status, LpStatus::Unbounded);
}

#[test]
fn beale_cycling_example_terminates() {
    // classic instance on which textbook Dantzig pricing cycles
    let mut m = LpModel::<f64>::new("beale", ObjectiveSense::Minimize);
    let inf = f64::INFINITY;
    let x4 = m.add_column("x4", -0.75, 0.0, inf).unwrap();
    let x5 = m.add_column("x5", 20.0, 0.0, inf).unwrap();
    let x6 = m.add_column("x6", -0.5, 0.0, inf).unwrap();
    let x7 = m.add_column("x7", 6.0, 0.0, inf).unwrap();
    m.add_row("r1", RowSense::Le, 0.0, [(x4, 0.25), (x5, -8.0), (x6, -1.0), (x7, 9.0)]);
    m.add_row("r2", RowSense::Le, 0.0, [(x4, 0.5), (x5, -12.0), (x6, -0.5), (x7, 3.0)]);
    m.add_row("r3", RowSense::Le, 1.0, [(x6, 1.0)]);
    let b = Bounds::from_model(&m);
    let sol = solve_lp(&m, &b, &opts());
    assert_optimality_conditions(&m, &b, &sol);
    assert!((sol.objective + 1.25).abs() < 1e-9);
}

#[test]
fn greater_equal_rows_and_free_columns() {
    // min x + y  s.t. x + 2y >= 4, x - y = 1, y free
    let mut m = LpModel::<f64>::new("ge", ObjectiveSense::Minimize);
    let x = m.add_column("x", 1.0, 0.0, 10.0).unwrap();
    let y = m.add_column("y", 1.0, f64::NEG_INFINITY, f64::INFINITY).unwrap();
    m.add_row("a", RowSense::Ge, 4.0, [(x, 1.0), (y, 2.0)]);
    m.add_row("b", RowSense::Eq, 1.0, [(x, 1.0), (y, -1.0)]);
    let b = Bounds::from_model(&m);
    let sol = solve_lp(&m, &b, &opts());
    assert_optimality_conditions(&m, &b, &sol);
    // x = 2, y = 1
    assert!((sol.objective - 3.0).abs() < 1e-9);
}

fn random_lp() -> impl Strategy<Value = LpModel<f64>> {
    let n = 1usize..=4;
    n.prop_flat_map(|n| {
        (
            prop::collection::vec(-5i32..=5, n),
            prop::collection::vec((prop::collection::vec(-4i32..=4, n), 0i32..3, -3i32..=10), 1..=4),
            prop::collection::vec(1i32..=4, n),
            any::<bool>(),
        )
    })
    .prop_map(|(obj, rows, ups, maximize)| {
        let sense = if maximize { ObjectiveSense::Maximize } else { ObjectiveSense::Minimize };
        let mut m = LpModel::new("rand", sense);
        for (j, (&c, &u)) in obj.iter().zip(&ups).enumerate() {
            m.add_column(format!("x{j}"), c as f64, 0.0, u as f64).unwrap();
        }
        for (i, (coef, kind, rhs)) in rows.into_iter().enumerate() {
            let sense = [RowSense::Le, RowSense::Ge, RowSense::Eq][kind as usize];
            m.add_row(format!("r{i}"), sense, rhs as f64, coef.into_iter().enumerate().map(|(j, a)| (j, a as f64)));
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_vertex_enumeration(m in random_lp()) {
        let b = Bounds::from_model(&m);
        let sol = solve_lp(&m, &b, &opts());
        match brute_force_lp(&m, &b) {
            None => prop_assert_eq!(sol.status, LpStatus::Infeasible),
            Some(best) => {
                assert_optimality_conditions(&m, &b, &sol);
                prop_assert!((sol.objective - best).abs() <= 1e-7 * (1.0 + best.abs()), "simplex {} brute {}", sol.objective, best);
            }
        }
    }

    #[test]
    fn tightening_never_improves(m in random_lp(), col in 0usize..4, up in 0i32..3) {
        let b = Bounds::from_model(&m);
        let base = solve_lp(&m, &b, &opts());
        prop_assume!(base.status == LpStatus::Optimal);
        let col = col % m.num_columns();
        let mut t = b.clone();
        t.upper[col] = t.upper[col].min(up as f64);
        let warm = resolve(&m, &base, &t, &opts());
        let cold = solve_lp(&m, &t, &opts());
        prop_assert_eq!(warm.status, cold.status);
        if cold.status == LpStatus::Optimal {
            let s = m.sense.sign::<f64>();
            prop_assert!(s * cold.objective <= s * base.objective + 1e-9);
            prop_assert!((warm.objective - cold.objective).abs() <= 1e-7 * (1.0 + cold.objective.abs()));
        }
    }
}
