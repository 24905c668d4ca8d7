//! Plain-text solution file.
//!
//! ```text
//! STATUS first-solution
//! OBJECTIVE 50.000000000000
//! LP_BOUND 81.818181818182
//! DEGRADATION_PCT 38.888888888889
//! STRATEGY none
//! SOS_TYPE 1
//! SECONDS 0.000412000000
//! NODES 3
//! COLUMN D_c1_1 1.000000000000
//! BID c1 0.400000000000
//! ```
//!
//! Values carry twelve decimals. Missing values (no incumbent, timing
//! suppressed) print as `NA`. When the LP bound is 0 and the incumbent is not,
//! `DEGRADATION_PCT` is `NA` and a `DEGRADATION_ABS` line follows with the
//! absolute difference. `COLUMN` lines list values above the zero tolerance
//! in column order, leaving out the do-nothing member (first member of each
//! set), so an all-slack solution has no `COLUMN` lines; readers recover it
//! as one minus the campaign's listed levels. `BID` lines list campaigns that
//! place a bid.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::model::{column_name, Instance, LpModel, SosType};
use crate::scalar::Scalar;
use crate::search::{Degradation, SearchStatus, SolveReport, Strategy};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct SolutionError {
    pub line: usize,
    pub message: String,
}

pub fn fmt_value(v: f64) -> String {
    format!("{v:.12}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), fmt_value)
}

/// Renders a solve. `timing = false` prints `SECONDS NA` so repeated runs
/// produce identical bytes.
pub fn write_solution<T: Scalar>(
    report: &SolveReport,
    solution: Option<&[T]>,
    model: &LpModel<T>,
    bids: &[(String, Option<f64>)],
    zero_tol: T,
    timing: bool,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "STATUS {}", report.status);
    let _ = writeln!(out, "OBJECTIVE {}", opt(report.incumbent_objective));
    let _ = writeln!(out, "LP_BOUND {}", fmt_value(report.lp_relaxation_objective));
    match report.degradation {
        Some(Degradation::Percent(p)) => {
            let _ = writeln!(out, "DEGRADATION_PCT {}", fmt_value(p));
        }
        Some(Degradation::UndefinedRelative(d)) => {
            let _ = writeln!(out, "DEGRADATION_PCT NA\nDEGRADATION_ABS {}", fmt_value(d));
        }
        None => out.push_str("DEGRADATION_PCT NA\n"),
    }
    let _ = writeln!(out, "STRATEGY {}", report.strategy);
    let _ = writeln!(out, "SOS_TYPE {}", report.sos_type_used);
    let _ = writeln!(out, "SECONDS {}", opt(timing.then_some(report.total_seconds)));
    let _ = writeln!(out, "NODES {}", report.nodes);
    if let Some(x) = solution {
        let mut slack = vec![false; model.num_columns()];
        for set in &model.sos_sets {
            if let Some(&j) = set.members.first() {
                slack[j] = true;
            }
        }
        for ((c, &v), is_slack) in model.columns.iter().zip(x).zip(slack) {
            if v > zero_tol && !is_slack {
                let _ = writeln!(out, "COLUMN {} {}", c.name, fmt_value(v.as_f64()));
            }
        }
        for (campaign, bid) in bids {
            if let Some(b) = bid {
                let _ = writeln!(out, "BID {campaign} {}", fmt_value(*b));
            }
        }
    }
    out
}

/// A parsed solution file.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFile {
    pub status: SearchStatus,
    pub objective: Option<f64>,
    pub lp_bound: f64,
    pub degradation_pct: Option<f64>,
    pub degradation_abs: Option<f64>,
    pub strategy: Strategy,
    pub sos_type: SosType,
    pub seconds: Option<f64>,
    pub nodes: usize,
    pub columns: Vec<(String, f64)>,
    pub bids: Vec<(String, f64)>,
}

pub fn parse_solution(text: &str) -> Result<SolutionFile, SolutionError> {
    let mut fields: HashMap<&str, (usize, &str)> = HashMap::new();
    let mut columns = Vec::new();
    let mut bids = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let err = |message: String| SolutionError { line, message };
        let parts: Vec<&str> = raw.split_whitespace().collect();
        match parts.as_slice() {
            [] => {}
            ["COLUMN", name, v] | ["BID", name, v] => {
                let v: f64 = v.parse().map_err(|_| err(format!("'{v}' is not a number")))?;
                if parts[0] == "COLUMN" {
                    columns.push((name.to_string(), v));
                } else {
                    bids.push((name.to_string(), v));
                }
            }
            [key, v] => {
                if fields.insert(key, (line, v)).is_some() {
                    return Err(err(format!("duplicate {key} line")));
                }
            }
            _ => return Err(err(format!("malformed line '{raw}'"))),
        }
    }

    fn get<'a>(fields: &HashMap<&str, (usize, &'a str)>, key: &str) -> Result<(usize, &'a str), SolutionError> {
        fields.get(key).copied().ok_or_else(|| SolutionError { line: 0, message: format!("missing {key} line") })
    }
    fn number(fields: &HashMap<&str, (usize, &str)>, key: &str) -> Result<Option<f64>, SolutionError> {
        let (line, v) = get(fields, key)?;
        if v == "NA" {
            return Ok(None);
        }
        v.parse().map(Some).map_err(|_| SolutionError { line, message: format!("{key}: '{v}' is not a number") })
    }
    let parse_with = |key: &str| -> Result<(usize, &str), SolutionError> { get(&fields, key) };

    let (line, s) = parse_with("STATUS")?;
    let status = s.parse().map_err(|message| SolutionError { line, message })?;
    let (line, s) = parse_with("STRATEGY")?;
    let strategy = s.parse().map_err(|message| SolutionError { line, message })?;
    let (line, s) = parse_with("SOS_TYPE")?;
    let sos_type = match s {
        "1" => SosType::Sos1,
        "2" => SosType::Sos2,
        _ => return Err(SolutionError { line, message: format!("SOS_TYPE: '{s}' is not 1 or 2") }),
    };
    let (line, s) = parse_with("NODES")?;
    let nodes = s.parse().map_err(|_| SolutionError { line, message: format!("NODES: '{s}' is not a count") })?;
    let lp_bound = number(&fields, "LP_BOUND")?.ok_or_else(|| SolutionError { line: 0, message: "LP_BOUND is NA".into() })?;
    Ok(SolutionFile {
        status,
        objective: number(&fields, "OBJECTIVE")?,
        lp_bound,
        degradation_pct: number(&fields, "DEGRADATION_PCT")?,
        degradation_abs: if fields.contains_key("DEGRADATION_ABS") { number(&fields, "DEGRADATION_ABS")? } else { None },
        strategy,
        sos_type,
        seconds: number(&fields, "SECONDS")?,
        nodes,
        columns,
        bids,
    })
}

/// Per-campaign level values from `COLUMN` lines. Unlisted levels are 0
/// except the do-nothing level, which takes whatever the listed levels leave
/// of 1 (unless it is listed itself).
pub fn values_from_columns(instance: &Instance, columns: &[(String, f64)]) -> Result<Vec<Vec<f64>>, String> {
    let mut index = HashMap::new();
    for (i, c) in instance.campaigns.iter().enumerate() {
        for l in &c.levels {
            index.insert(column_name(&c.id, l.level_index), (i, l.level_index));
        }
    }
    let mut values: Vec<Vec<f64>> = instance.campaigns.iter().map(|c| vec![0.0; c.levels.len()]).collect();
    for (name, v) in columns {
        let &(i, j) = index.get(name).ok_or_else(|| format!("column '{name}' is not in the instance"))?;
        values[i][j] = *v;
    }
    let listed_slack: Vec<bool> = instance
        .campaigns
        .iter()
        .map(|c| columns.iter().any(|(n, _)| *n == column_name(&c.id, 0)))
        .collect();
    for (v, listed) in values.iter_mut().zip(listed_slack) {
        if !listed {
            v[0] = (1.0 - v[1..].iter().sum::<f64>()).max(0.0);
        }
    }
    Ok(values)
}
