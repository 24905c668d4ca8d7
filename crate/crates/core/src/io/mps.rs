//! Fixed-format MPS with an SOS section.
//!
//! Layout written by [`write_mps`]:
//!
//! ```text
//! * OBJSENSE MAX
//! NAME          BIDOPT
//! ROWS
//!  N  OBJ
//!  E  CVX_c1
//!  L  BUD_k1
//! COLUMNS
//!     D_c1_0    OBJ       0
//!     D_c1_0    CVX_c1    1
//! RHS
//!     RHS       CVX_c1    1
//! BOUNDS
//!  UP BND       D_c1_0    1
//! SOS
//!  S1 SOS       S_c1
//!     D_c1_0    0
//! ENDATA
//! ```
//!
//! Fields start at the classic fixed columns (2, 5, 15, 25) and names longer
//! than eight characters push later fields right, always leaving at least two
//! spaces. The reader splits on whitespace, so names must not contain any.
//! Every column gets an objective entry (possibly 0) so columns with no row
//! entries survive a round trip. Numbers use the shortest representation that
//! parses back to the same `f64`. Bounds omitted mean `[0, +inf)`; the
//! `* OBJSENSE MAX` comment marks maximization and anything else reads as
//! minimization.

use std::fmt::Write as _;

use crate::model::{LpModel, ObjectiveSense, RowSense, SosType};
use crate::scalar::Scalar;

const OBJ: &str = "OBJ";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct MpsError {
    pub line: usize,
    /// 1-based character position of the offending token.
    pub column: usize,
    pub message: String,
}

fn num<T: Scalar>(v: T) -> String {
    format!("{}", v.as_f64())
}

/// Pads `s` to `width`, leaving at least `gap` spaces after it.
fn field(out: &mut String, s: &str, width: usize, gap: usize) {
    out.push_str(s);
    let pad = width.saturating_sub(s.len()).max(gap);
    out.extend(std::iter::repeat_n(' ', pad));
}

fn data_line(out: &mut String, code: &str, a: &str, b: &str, value: Option<&str>) {
    out.push(' ');
    field(out, code, 3, 1);
    match value {
        Some(v) => {
            field(out, a, 10, 2);
            field(out, b, 10, 2);
            out.push_str(v);
        }
        None => {
            field(out, a, 10, 2);
            out.push_str(b);
        }
    }
    let trimmed = out.trim_end_matches(' ').len();
    out.truncate(trimmed);
    out.push('\n');
}

pub fn write_mps<T: Scalar>(model: &LpModel<T>) -> String {
    let mut out = String::new();
    if model.sense == ObjectiveSense::Maximize {
        out.push_str("* OBJSENSE MAX\n");
    }
    let _ = writeln!(out, "NAME          {}", model.name);
    out.push_str("ROWS\n");
    data_line(&mut out, "N", OBJ, "", None);
    for r in &model.rows {
        let code = match r.sense {
            RowSense::Le => "L",
            RowSense::Eq => "E",
            RowSense::Ge => "G",
        };
        data_line(&mut out, code, &r.name, "", None);
    }

    let mut by_column: Vec<Vec<(usize, T)>> = vec![Vec::new(); model.num_columns()];
    for (i, r) in model.rows.iter().enumerate() {
        for &(j, a) in &r.coefficients {
            by_column[j].push((i, a));
        }
    }
    out.push_str("COLUMNS\n");
    for (c, entries) in model.columns.iter().zip(&by_column) {
        data_line(&mut out, "", &c.name, OBJ, Some(&num(c.objective)));
        for &(i, a) in entries {
            data_line(&mut out, "", &c.name, &model.rows[i].name, Some(&num(a)));
        }
    }

    out.push_str("RHS\n");
    for r in model.rows.iter().filter(|r| r.rhs != T::zero()) {
        data_line(&mut out, "", "RHS", &r.name, Some(&num(r.rhs)));
    }

    out.push_str("BOUNDS\n");
    for c in &model.columns {
        let (lo, up) = (c.lower, c.upper);
        if lo == up {
            data_line(&mut out, "FX", "BND", &c.name, Some(&num(lo)));
            continue;
        }
        if lo == T::neg_infinity() && up == T::infinity() {
            data_line(&mut out, "FR", "BND", &c.name, None);
            continue;
        }
        if lo == T::neg_infinity() {
            data_line(&mut out, "MI", "BND", &c.name, None);
        } else if lo != T::zero() {
            data_line(&mut out, "LO", "BND", &c.name, Some(&num(lo)));
        }
        if up != T::infinity() {
            data_line(&mut out, "UP", "BND", &c.name, Some(&num(up)));
        }
    }

    if !model.sos_sets.is_empty() {
        out.push_str("SOS\n");
        for s in &model.sos_sets {
            let code = match s.sos_type {
                SosType::Sos1 => "S1",
                SosType::Sos2 => "S2",
            };
            data_line(&mut out, code, "SOS", &s.name, None);
            for (&j, &w) in s.members.iter().zip(&s.weights) {
                data_line(&mut out, "", &model.columns[j].name, &num(w), None);
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Bounds,
    Sos,
    End,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<(usize, &'a str)>,
}

impl Line<'_> {
    fn err(&self, token: usize, message: impl Into<String>) -> MpsError {
        let column = self.tokens.get(token).or(self.tokens.last()).map_or(1, |t| t.0);
        MpsError { line: self.number, column, message: message.into() }
    }

    fn expect_len(&self, lens: &[usize], what: &str) -> Result<(), MpsError> {
        if lens.contains(&self.tokens.len()) {
            Ok(())
        } else {
            Err(self.err(lens.iter().copied().min().unwrap_or(0).min(self.tokens.len()), format!("malformed {what} line")))
        }
    }

    fn number<T: Scalar>(&self, token: usize) -> Result<T, MpsError> {
        let s = self.tokens[token].1;
        s.parse::<f64>().map(T::of).map_err(|_| self.err(token, format!("'{s}' is not a number")))
    }
}

fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

struct PendingSos<T> {
    name: String,
    sos_type: SosType,
    members: Vec<usize>,
    weights: Vec<T>,
}

/// Name, sense, rhs and coefficients of a row still being read.
type PendingRow<T> = (String, RowSense, T, Vec<(usize, T)>);

pub fn read_mps<T: Scalar>(text: &str) -> Result<LpModel<T>, MpsError> {
    let mut sense = ObjectiveSense::Minimize;
    let mut name = String::new();
    let mut section = Section::None;
    let mut objective_row: Option<String> = None;
    let mut rows: Vec<PendingRow<T>> = Vec::new();
    let mut row_index = std::collections::HashMap::new();
    let mut model = LpModel::<T>::new("", ObjectiveSense::Minimize);
    let mut sos: Vec<PendingSos<T>> = Vec::new();
    let mut expect_sense = false;

    for (k, raw) in text.lines().enumerate() {
        let number = k + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('*') {
            let words: Vec<&str> = comment.split_whitespace().collect();
            if words.len() == 2 && words[0].eq_ignore_ascii_case("OBJSENSE") {
                sense = parse_sense(words[1]).unwrap_or(sense);
            }
            continue;
        }
        let line = Line { number, tokens: tokenize(raw) };
        let header = !raw.starts_with(char::is_whitespace);
        if expect_sense {
            expect_sense = false;
            if let Some(s) = parse_sense(line.tokens[0].1) {
                sense = s;
                continue;
            }
        }
        if header {
            let word = line.tokens[0].1;
            section = match word {
                "NAME" => {
                    name = line.tokens.get(1).map_or("", |t| t.1).to_string();
                    Section::None
                }
                "OBJSENSE" => {
                    match line.tokens.get(1) {
                        Some(t) => sense = parse_sense(t.1).ok_or_else(|| line.err(1, "unknown objective sense"))?,
                        None => expect_sense = true,
                    }
                    Section::None
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "SOS" => Section::Sos,
                "ENDATA" => Section::End,
                "RANGES" => return Err(line.err(0, "RANGES section is not supported")),
                _ => return Err(line.err(0, format!("unknown section '{word}'"))),
            };
            if section == Section::End {
                break;
            }
            continue;
        }

        match section {
            Section::None | Section::End => return Err(line.err(0, "data line outside a section")),
            Section::Rows => {
                line.expect_len(&[2], "ROWS")?;
                let (code, rname) = (line.tokens[0].1, line.tokens[1].1);
                let rs = match code {
                    "N" => {
                        if objective_row.is_some() {
                            return Err(line.err(1, "only one objective row is supported"));
                        }
                        objective_row = Some(rname.to_string());
                        continue;
                    }
                    "L" => RowSense::Le,
                    "E" => RowSense::Eq,
                    "G" => RowSense::Ge,
                    _ => return Err(line.err(0, format!("unknown row type '{code}'"))),
                };
                if row_index.insert(rname.to_string(), rows.len()).is_some() {
                    return Err(line.err(1, format!("duplicate row '{rname}'")));
                }
                rows.push((rname.to_string(), rs, T::zero(), Vec::new()));
            }
            Section::Columns => {
                if line.tokens.len() != 3 && line.tokens.len() != 5 {
                    return Err(line.err(0, "malformed COLUMNS line"));
                }
                let cname = line.tokens[0].1;
                let j = match model.column(cname) {
                    Some(j) if j + 1 == model.num_columns() => j,
                    Some(_) => return Err(line.err(0, format!("entries for column '{cname}' are not contiguous"))),
                    None => model
                        .add_column(cname, T::zero(), T::zero(), T::infinity())
                        .map_err(|e| line.err(0, e.to_string()))?,
                };
                for t in [1, 3].into_iter().filter(|&t| t < line.tokens.len()) {
                    let rname = line.tokens[t].1;
                    let a: T = line.number(t + 1)?;
                    if objective_row.as_deref() == Some(rname) {
                        model.columns[j].objective = a;
                    } else {
                        let &i = row_index.get(rname).ok_or_else(|| line.err(t, format!("unknown row '{rname}'")))?;
                        rows[i].3.push((j, a));
                    }
                }
            }
            Section::Rhs => {
                if line.tokens.len() != 3 && line.tokens.len() != 5 {
                    return Err(line.err(0, "malformed RHS line"));
                }
                for t in [1, 3].into_iter().filter(|&t| t < line.tokens.len()) {
                    let rname = line.tokens[t].1;
                    let v: T = line.number(t + 1)?;
                    if objective_row.as_deref() == Some(rname) {
                        return Err(line.err(t, "objective constants are not supported"));
                    }
                    let &i = row_index.get(rname).ok_or_else(|| line.err(t, format!("unknown row '{rname}'")))?;
                    rows[i].2 = v;
                }
            }
            Section::Bounds => {
                let code = line.tokens[0].1;
                let valued = matches!(code, "UP" | "LO" | "FX");
                line.expect_len(if valued { &[4] } else { &[3] }, "BOUNDS")?;
                let cname = line.tokens[2].1;
                let j = model.column(cname).ok_or_else(|| line.err(2, format!("unknown column '{cname}'")))?;
                let c = &mut model.columns[j];
                match code {
                    "UP" => c.upper = line.number(3)?,
                    "LO" => c.lower = line.number(3)?,
                    "FX" => {
                        let v = line.number(3)?;
                        c.lower = v;
                        c.upper = v;
                    }
                    "MI" => c.lower = T::neg_infinity(),
                    "PL" => c.upper = T::infinity(),
                    "FR" => {
                        c.lower = T::neg_infinity();
                        c.upper = T::infinity();
                    }
                    _ => return Err(line.err(0, format!("unknown bound type '{code}'"))),
                }
            }
            Section::Sos => {
                line.expect_len(&[2, 3], "SOS")?;
                let first = line.tokens[0].1;
                if line.tokens.len() == 3 {
                    let sos_type = match first {
                        "S1" => SosType::Sos1,
                        "S2" => SosType::Sos2,
                        _ => return Err(line.err(0, format!("unknown SOS type '{first}'"))),
                    };
                    sos.push(PendingSos { name: line.tokens[2].1.to_string(), sos_type, members: Vec::new(), weights: Vec::new() });
                    continue;
                }
                let set = sos.last_mut().ok_or_else(|| line.err(0, "SOS member before any set header"))?;
                let j = model.column(first).ok_or_else(|| line.err(0, format!("unknown column '{first}'")))?;
                let w: T = line.number(1)?;
                if set.weights.last().is_some_and(|&p| w <= p) {
                    return Err(line.err(1, "reference weights must be strictly increasing"));
                }
                set.members.push(j);
                set.weights.push(w);
            }
        }
    }
    if section != Section::End {
        return Err(MpsError { line: text.lines().count(), column: 1, message: "missing ENDATA".into() });
    }

    model.name = name;
    model.sense = sense;
    for (rname, rs, rhs, coefs) in rows {
        model.add_row(rname, rs, rhs, coefs);
    }
    for s in sos {
        model.add_sos(s.name, s.sos_type, s.members, s.weights);
    }
    Ok(model)
}

fn parse_sense(word: &str) -> Option<ObjectiveSense> {
    match word.to_ascii_uppercase().as_str() {
        "MAX" | "MAXIMIZE" => Some(ObjectiveSense::Maximize),
        "MIN" | "MINIMIZE" => Some(ObjectiveSense::Minimize),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, toy};

    const T1_MPS: &str = "\
* OBJSENSE MAX
NAME          BIDOPT
ROWS
 N  OBJ
 E  CVX_c1
 L  BUD_k1
 L  CLK_k1
 L  IMP
COLUMNS
    D_c1_0    OBJ       0
    D_c1_0    CVX_c1    1
    D_c1_1    OBJ       50
    D_c1_1    CVX_c1    1
    D_c1_1    BUD_k1    50
    D_c1_1    CLK_k1    -30.000000000000004
    D_c1_1    IMP       100
    D_c1_2    OBJ       120
    D_c1_2    CVX_c1    1
    D_c1_2    BUD_k1    160
    D_c1_2    IMP       200
RHS
    RHS       CVX_c1    1
    RHS       BUD_k1    100
    RHS       IMP       1000
BOUNDS
 UP BND       D_c1_0    1
 UP BND       D_c1_1    1
 UP BND       D_c1_2    1
SOS
 S1 SOS       S_c1
    D_c1_0    0
    D_c1_1    1
    D_c1_2    2
ENDATA
";

    #[test]
    fn t1_golden() {
        let m: LpModel<f64> = build_model(&toy::t1()).unwrap();
        assert_eq!(write_mps(&m), T1_MPS);
        assert_eq!(read_mps::<f64>(T1_MPS).unwrap(), m);
    }

    #[test]
    fn long_names_keep_two_spaces() {
        let mut m = LpModel::<f64>::new("long", ObjectiveSense::Minimize);
        let j = m.add_column("a_very_long_column_name", -1.5, f64::NEG_INFINITY, 4.0).unwrap();
        let k = m.add_column("free", 0.0, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let l = m.add_column("lo", 0.0, 2.0, f64::INFINITY).unwrap();
        let f = m.add_column("fx", 0.0, 3.0, 3.0).unwrap();
        m.add_row("another_long_row_name", RowSense::Ge, -2.5, [(j, 1e-7), (k, 1e300)]);
        m.add_row("e", RowSense::Eq, 1.0, [(l, 1.0), (f, 1.0)]);
        m.add_sos("s2", SosType::Sos2, vec![j, k, l], vec![0.5, 1.5, 7.0]);
        let text = write_mps(&m);
        assert!(text.contains("a_very_long_column_name  another_long_row_name  0.0000001"));
        assert!(!text.contains("OBJSENSE"));
        assert_eq!(read_mps::<f64>(&text).unwrap(), m);
    }

    #[test]
    fn free_format_objsense_section() {
        let text = T1_MPS.replace("* OBJSENSE MAX\n", "OBJSENSE\n    MAX\n");
        assert_eq!(read_mps::<f64>(&text).unwrap().sense, ObjectiveSense::Maximize);
    }

    fn error_of(text: &str) -> MpsError {
        read_mps::<f64>(text).unwrap_err()
    }

    #[test]
    fn errors_name_the_line() {
        let e = error_of(&T1_MPS.replace("    D_c1_0    0\n    D_c1_1    1\n", "    D_c1_0    0\n    D_c1_9    1\n"));
        assert_eq!((e.line, e.column), (32, 5));
        assert!(e.message.contains("unknown column 'D_c1_9'"));

        let e = error_of(&T1_MPS.replace("    D_c1_2    2\n", "    D_c1_2    1\n"));
        assert_eq!(e.line, 33);
        assert_eq!(e.message, "reference weights must be strictly increasing");

        let e = error_of(&T1_MPS.replace("D_c1_2    IMP       200", "D_c1_2    IMQ       200"));
        assert_eq!(e.line, 20);
        assert!(e.message.contains("unknown row 'IMQ'"));

        let e = error_of(&T1_MPS.replace("BUD_k1    100", "BUD_k1    x100"));
        assert!(e.message.contains("not a number"));

        let e = error_of(&T1_MPS.replace("ENDATA\n", ""));
        assert_eq!(e.message, "missing ENDATA");

        let e = error_of(&T1_MPS.replace("BOUNDS", "BOUNDZ"));
        assert!(e.message.contains("unknown section"));
    }

    #[test]
    fn f32_round_trip() {
        let m: LpModel<f32> = build_model(&toy::two_business()).unwrap();
        assert_eq!(read_mps::<f32>(&write_mps(&m)).unwrap(), m);
    }
}
