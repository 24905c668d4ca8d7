use sosbid::generate::{generate_instance, CountRange, CurveShape, GenParams, SLACK_TIGHTNESS};
use sosbid::model::{build_model, decompose_by_business, toy, validate_instance, Instance, LpModel, SosType};
use sosbid::oracle::{enumerate_sos1, DEFAULT_CAP};
use sosbid::search::{branch_and_bound, Limits, SearchOptions};
use sosbid::simplex::{solve_lp, Bounds, SimplexOptions};

fn params(seed: u64, tightness: f64) -> GenParams {
    GenParams {
        businesses: 1 + (seed % 3) as usize,
        campaigns_per_business: CountRange::between(1, 3),
        levels_per_campaign: CountRange::between(2, 5),
        budget_tightness: tightness,
        impression_tightness: SLACK_TIGHTNESS,
        curve_shape: [CurveShape::Uniform, CurveShape::FrontLoaded, CurveShape::BackLoaded][(seed % 3) as usize],
        seed,
    }
}

fn greedy(inst: &Instance) -> f64 {
    inst.campaigns.iter().map(|c| c.levels.iter().map(|l| l.ret).fold(0.0, f64::max)).sum()
}

#[test]
fn loose_budget_picks_every_max_return_level() {
    let single = GenParams {
        businesses: 1,
        campaigns_per_business: CountRange::exactly(1),
        levels_per_campaign: CountRange::exactly(3),
        budget_tightness: 10.0,
        seed: 7,
        ..GenParams::default()
    };
    let inst = generate_instance(&single).unwrap();
    let best = enumerate_sos1(&inst, DEFAULT_CAP).unwrap();
    assert_eq!(best.objective, greedy(&inst));

    for seed in 0..40 {
        for t in [SLACK_TIGHTNESS, 3.0] {
            let inst = generate_instance(&params(seed, t)).unwrap();
            assert!(validate_instance(&inst).is_empty());
            let best = enumerate_sos1(&inst, DEFAULT_CAP).unwrap();
            assert!((best.objective - greedy(&inst)).abs() < 1e-9, "seed {seed} tightness {t}");
        }
    }
}

#[test]
fn tight_budget_binds_at_the_lp_optimum() {
    for seed in 0..40 {
        for t in [0.5, 0.3] {
            let inst = generate_instance(&params(seed, t)).unwrap();
            let m: LpModel<f64> = build_model(&inst).unwrap();
            let lp = solve_lp(&m, &Bounds::from_model(&m), &SimplexOptions::default());
            let act = m.row_activities(&lp.primal);
            let tight = m
                .rows
                .iter()
                .zip(&act)
                .any(|(r, &a)| r.name.starts_with("BUD_") && a >= r.rhs - 1e-6 * r.rhs.abs().max(1.0));
            assert!(tight, "seed {seed} tightness {t}: no budget row binds");
        }
    }
}

#[test]
fn businesses_split_when_impressions_are_slack() {
    let mut cases = vec![toy::two_business()];
    cases.extend((0..20).map(|s| generate_instance(&GenParams { businesses: 3, ..params(s, 0.7) }).unwrap()));
    for inst in cases {
        let opts = SearchOptions { sos_type: SosType::Sos1, limits: Limits::prove(), ..SearchOptions::default() };
        let joint = branch_and_bound(&build_model::<f64>(&inst).unwrap(), &opts).report.incumbent_objective.unwrap();
        let parts: f64 = decompose_by_business(&inst)
            .iter()
            .map(|p| enumerate_sos1(p, DEFAULT_CAP).unwrap().objective)
            .sum();
        assert!((joint - parts).abs() <= 1e-6 * joint.abs().max(1.0), "joint {joint} vs parts {parts}");
    }
}
