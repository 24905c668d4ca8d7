//! Benchmark runner producing the degradation/timing table as CSV.
//!
//! Columns: `model, sos_count, strategy, degradation_pct,
//! first_solution_seconds, best_known_degradation_pct`.
//!
//! * `degradation_pct` is the first (or only) incumbent's gap to the root LP,
//!   four decimals; `????` when a limit stopped the run before any incumbent.
//! * `first_solution_seconds` has three decimals, `>limit` on a limit hit and
//!   `NA` when timing is suppressed.
//! * `best_known_degradation_pct` is the smallest degradation any strategy
//!   reached on the same model and set type within this run (SOS1 and SOS2
//!   rows are compared separately, since they solve different problems).

use crate::model::{build_model, BuildError, Instance, LpModel, SosType};
use crate::search::{branch_and_bound, SearchOptions, SearchStatus, SolveReport, Strategy};

pub struct BenchCase<'a> {
    pub name: String,
    pub instance: &'a Instance,
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub model: String,
    pub report: SolveReport,
}

/// Solves every case under every strategy, sequentially and in order.
pub fn run_cases(cases: &[BenchCase<'_>], strategies: &[Strategy], options: &SearchOptions<f64>) -> Result<Vec<BenchRow>, BuildError> {
    let mut rows = Vec::new();
    for case in cases {
        let model: LpModel<f64> = build_model(case.instance)?;
        for &strategy in strategies {
            let opts = SearchOptions { strategy, sos_type: strategy.sos_type(options.sos_type), ..options.clone() };
            let result = branch_and_bound(&model, &opts);
            rows.push(BenchRow { model: case.name.clone(), report: result.report });
        }
    }
    Ok(rows)
}

pub fn format_csv(rows: &[BenchRow], timing: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["model", "sos_count", "strategy", "degradation_pct", "first_solution_seconds", "best_known_degradation_pct"])
        .expect("in-memory write");
    for row in rows {
        let r = &row.report;
        let stopped = matches!(r.status, SearchStatus::LimitReached);
        let degradation = match r.degradation_pct() {
            Some(d) => format!("{d:.4}"),
            None => "????".to_string(),
        };
        let seconds = match (timing, r.first_solution_seconds) {
            (false, _) => "NA".to_string(),
            (true, Some(s)) => format!("{s:.3}"),
            (true, None) if stopped => ">limit".to_string(),
            (true, None) => "NA".to_string(),
        };
        let best = best_known(rows, &row.model, r.sos_type_used).map_or_else(|| "????".to_string(), |d| format!("{d:.4}"));
        w.write_record([row.model.clone(), r.sos_count.to_string(), r.strategy.to_string(), degradation, seconds, best])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

fn best_known(rows: &[BenchRow], model: &str, sos: SosType) -> Option<f64> {
    rows.iter()
        .filter(|r| r.model == model && r.report.sos_type_used == sos)
        .filter_map(|r| r.report.degradation_pct())
        .reduce(f64::min)
}

/// [`run_cases`] followed by [`format_csv`].
pub fn run_benchmark(cases: &[BenchCase<'_>], strategies: &[Strategy], options: &SearchOptions<f64>, timing: bool) -> Result<String, BuildError> {
    Ok(format_csv(&run_cases(cases, strategies, options)?, timing))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::toy;
    use crate::search::{Degradation, Limits};

    #[test]
    fn t1_table() {
        let t1 = toy::t1();
        let cases = [BenchCase { name: "t1".into(), instance: &t1 }];
        let opts = SearchOptions { limits: Limits::prove(), ..SearchOptions::default() };
        let csv = run_benchmark(&cases, &[Strategy::None, Strategy::One, Strategy::Three], &opts, false).unwrap();
        let expected = "\
model,sos_count,strategy,degradation_pct,first_solution_seconds,best_known_degradation_pct
t1,1,none,38.8889,NA,38.8889
t1,1,1,38.8889,NA,38.8889
t1,1,3,0.0000,NA,0.0000
";
        assert_eq!(csv, expected);
    }

    #[test]
    fn limit_rows_use_markers() {
        let report = SolveReport {
            status: SearchStatus::LimitReached,
            incumbent_objective: None,
            lp_relaxation_objective: 10.0,
            degradation: None,
            first_solution_seconds: None,
            total_seconds: 5.0,
            nodes: 7,
            lp_iterations: 0,
            sos_count: 16259,
            strategy: Strategy::One,
            sos_type_used: SosType::Sos1,
            rolled_back: false,
            hot_start_incumbent: false,
        };
        let other = SolveReport {
            strategy: Strategy::Two,
            status: SearchStatus::FirstSolution,
            degradation: Some(Degradation::Percent(1.5)),
            first_solution_seconds: Some(2.0),
            ..report.clone()
        };
        let rows = [BenchRow { model: "6".into(), report }, BenchRow { model: "6".into(), report: other }];
        let csv = format_csv(&rows, true);
        assert!(csv.contains("6,16259,1,????,>limit,1.5000\n"), "{csv}");
        assert!(csv.contains("6,16259,2,1.5000,2.000,1.5000\n"));
    }
}
