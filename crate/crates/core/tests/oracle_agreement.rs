use sosbid::generate::{generate_instance, CountRange, CurveShape, GenParams};
use sosbid::model::{build_model, Instance, LpModel, SosType};
use sosbid::oracle::{enumerate_sos1, enumerate_sos2, split_by_campaign, verify, DEFAULT_CAP};
use sosbid::search::{branch_and_bound, Limits, SearchOptions, Strategy};
use sosbid::simplex::{solve_lp, Bounds, SimplexOptions};

fn instance(seed: u64, max_campaigns: usize) -> Instance {
    let tightness = [0.3, 0.7, 1.5][(seed % 3) as usize];
    let shape = [CurveShape::Uniform, CurveShape::FrontLoaded, CurveShape::BackLoaded][(seed / 3 % 3) as usize];
    let businesses = 1 + (seed % 3) as usize;
    let per = CountRange::between(1, max_campaigns.div_ceil(businesses));
    let p = GenParams {
        businesses,
        campaigns_per_business: per,
        levels_per_campaign: CountRange::between(2, 5),
        budget_tightness: tightness,
        impression_tightness: tightness + 0.2,
        curve_shape: shape,
        seed,
    };
    generate_instance(&p).unwrap()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn prove(strategy: Strategy, sos: SosType) -> SearchOptions<f64> {
    SearchOptions { sos_type: sos, limits: Limits::prove(), ..SearchOptions::with_strategy(strategy) }
}

#[test]
fn sos1_search_matches_enumeration() {
    for seed in 0..60 {
        let inst = instance(seed, 6);
        let m: LpModel<f64> = build_model(&inst).unwrap();
        let oracle = enumerate_sos1(&inst, DEFAULT_CAP).unwrap();
        let r = branch_and_bound(&m, &prove(Strategy::None, SosType::Sos1));
        let got = r.report.incumbent_objective.unwrap();
        assert!(rel_close(got, oracle.objective, 1e-6), "seed {seed}: search {got} oracle {}", oracle.objective);
        let v = split_by_campaign(&inst, &r.solution.unwrap()).unwrap();
        assert_eq!(verify(&inst, &v, SosType::Sos1, 1e-6, 1e-6), Vec::<String>::new());
    }
}

#[test]
fn sos2_search_matches_enumeration() {
    for seed in 0..60 {
        let inst = instance(seed, 4);
        let m: LpModel<f64> = build_model(&inst).unwrap();
        let oracle = enumerate_sos2(&inst, DEFAULT_CAP).unwrap();
        let r = branch_and_bound(&m, &prove(Strategy::None, SosType::Sos2));
        let got = r.report.incumbent_objective.unwrap();
        assert!(rel_close(got, oracle.objective, 1e-6), "seed {seed}: search {got} oracle {}", oracle.objective);
        let v = split_by_campaign(&inst, &r.solution.unwrap()).unwrap();
        assert_eq!(verify(&inst, &v, SosType::Sos2, 1e-6, 1e-6), Vec::<String>::new());
        let lp = solve_lp(&m, &Bounds::from_model(&m), &SimplexOptions::default()).objective;
        let s1 = enumerate_sos1(&inst, DEFAULT_CAP).unwrap().objective;
        assert!(lp >= oracle.objective - 1e-9 * lp.abs().max(1.0) && oracle.objective >= s1 - 1e-9 * s1.abs().max(1.0));
    }
}

#[test]
fn heuristics_return_feasible_points() {
    for seed in 0..60 {
        let inst = instance(seed, 6);
        let m: LpModel<f64> = build_model(&inst).unwrap();
        for s in [Strategy::One, Strategy::Two, Strategy::Three] {
            let r = branch_and_bound(&m, &SearchOptions::with_strategy(s));
            let v = split_by_campaign(&inst, &r.solution.expect("do-nothing is always feasible")).unwrap();
            let problems = verify(&inst, &v, r.report.sos_type_used, 1e-6, 1e-6);
            assert!(problems.is_empty(), "seed {seed} strategy {s}: {problems:?}");
        }
    }
}
