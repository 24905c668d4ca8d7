//! Sparse LP representation with special-ordered-set descriptors.

use std::collections::HashMap;
use std::fmt;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectiveSense {
    Maximize,
    Minimize,
}

impl ObjectiveSense {
    /// +1 for maximization, -1 for minimization.
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            ObjectiveSense::Maximize => T::one(),
            ObjectiveSense::Minimize => -T::one(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SosType {
    Sos1,
    Sos2,
}

impl SosType {
    /// Maximum number of nonzero members.
    pub fn allowed(self) -> usize {
        match self {
            SosType::Sos1 => 1,
            SosType::Sos2 => 2,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            SosType::Sos1 => 1,
            SosType::Sos2 => 2,
        }
    }
}

impl fmt::Display for SosType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column<T> {
    pub name: String,
    pub objective: T,
    pub lower: T,
    pub upper: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row<T> {
    pub name: String,
    pub sense: RowSense,
    pub rhs: T,
    /// `(column, coefficient)` pairs sorted by column, no explicit zeros.
    pub coefficients: Vec<(usize, T)>,
}

impl<T: Scalar> Row<T> {
    pub fn activity(&self, values: &[T]) -> T {
        self.coefficients.iter().fold(T::zero(), |acc, &(j, a)| acc + a * values[j])
    }

    /// Amount by which `activity` breaks the row; zero when satisfied.
    pub fn violation(&self, activity: T) -> T {
        match self.sense {
            RowSense::Le => (activity - self.rhs).max(T::zero()),
            RowSense::Ge => (self.rhs - activity).max(T::zero()),
            RowSense::Eq => (activity - self.rhs).abs(),
        }
    }

    pub fn max_abs_coefficient(&self) -> T {
        self.coefficients.iter().fold(T::zero(), |m, &(_, a)| m.max(a.abs()))
    }
}

/// Ordered set of columns of which at most one (SOS1) or two adjacent (SOS2)
/// may be nonzero. `weights` are the reference weights used for branching and
/// must be strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SosSet<T> {
    pub name: String,
    pub sos_type: SosType,
    pub members: Vec<usize>,
    pub weights: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpModel<T> {
    pub name: String,
    pub sense: ObjectiveSense,
    pub columns: Vec<Column<T>>,
    pub rows: Vec<Row<T>>,
    pub sos_sets: Vec<SosSet<T>>,
    pub column_index: HashMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("duplicate column name {0}")]
    DuplicateColumn(String),
    #[error("row {row} references column {column} out of range")]
    ColumnOutOfRange { row: String, column: usize },
    #[error("column {0} has lower bound above upper bound")]
    InvertedBounds(String),
    #[error("SOS set {0}: reference weights must be strictly increasing")]
    NonMonotoneWeights(String),
    #[error("SOS set {0}: member and weight counts differ")]
    WeightCount(String),
    #[error("SOS set {set} references column {column} out of range")]
    SosMemberOutOfRange { set: String, column: usize },
}

impl<T: Scalar> LpModel<T> {
    pub fn new(name: impl Into<String>, sense: ObjectiveSense) -> Self {
        LpModel {
            name: name.into(),
            sense,
            columns: Vec::new(),
            rows: Vec::new(),
            sos_sets: Vec::new(),
            column_index: HashMap::new(),
        }
    }

    pub fn add_column(&mut self, name: impl Into<String>, objective: T, lower: T, upper: T) -> Result<usize, ModelError> {
        let name = name.into();
        let idx = self.columns.len();
        if self.column_index.insert(name.clone(), idx).is_some() {
            return Err(ModelError::DuplicateColumn(name));
        }
        self.columns.push(Column { name, objective, lower, upper });
        Ok(idx)
    }

    /// Adds a row; zero coefficients are dropped and the rest sorted by column.
    pub fn add_row(&mut self, name: impl Into<String>, sense: RowSense, rhs: T, coefficients: impl IntoIterator<Item = (usize, T)>) -> usize {
        let mut coefficients: Vec<(usize, T)> = coefficients.into_iter().filter(|&(_, a)| a != T::zero()).collect();
        coefficients.sort_by_key(|&(j, _)| j);
        self.rows.push(Row { name: name.into(), sense, rhs, coefficients });
        self.rows.len() - 1
    }

    pub fn add_sos(&mut self, name: impl Into<String>, sos_type: SosType, members: Vec<usize>, weights: Vec<T>) -> usize {
        self.sos_sets.push(SosSet { name: name.into(), sos_type, members, weights });
        self.sos_sets.len() - 1
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.column_index.get(name).copied()
    }

    pub fn row_by_name(&self, name: &str) -> Option<&Row<T>> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Row coefficients expanded over all columns (zeros included).
    pub fn dense_row(&self, row: usize) -> Vec<T> {
        let mut out = vec![T::zero(); self.columns.len()];
        for &(j, a) in &self.rows[row].coefficients {
            out[j] = a;
        }
        out
    }

    pub fn objective_value(&self, values: &[T]) -> T {
        self.columns.iter().zip(values).fold(T::zero(), |acc, (c, &x)| acc + c.objective * x)
    }

    pub fn row_activities(&self, values: &[T]) -> Vec<T> {
        self.rows.iter().map(|r| r.activity(values)).collect()
    }

    /// Largest row violation, each divided by `max(1, largest |coefficient|)`.
    pub fn max_scaled_row_violation(&self, values: &[T]) -> T {
        self.rows.iter().fold(T::zero(), |m, r| {
            let scale = r.max_abs_coefficient().max(T::one());
            m.max(r.violation(r.activity(values)) / scale)
        })
    }

    pub fn max_bound_violation(&self, values: &[T]) -> T {
        self.columns.iter().zip(values).fold(T::zero(), |m, (c, &x)| m.max(c.lower - x).max(x - c.upper))
    }

    /// Structural checks: index ranges, bounds, SOS weights.
    pub fn check(&self) -> Result<(), ModelError> {
        for c in &self.columns {
            if c.lower > c.upper {
                return Err(ModelError::InvertedBounds(c.name.clone()));
            }
        }
        for r in &self.rows {
            if let Some(&(j, _)) = r.coefficients.iter().find(|&&(j, _)| j >= self.columns.len()) {
                return Err(ModelError::ColumnOutOfRange { row: r.name.clone(), column: j });
            }
        }
        for s in &self.sos_sets {
            if s.members.len() != s.weights.len() {
                return Err(ModelError::WeightCount(s.name.clone()));
            }
            if let Some(&j) = s.members.iter().find(|&&j| j >= self.columns.len()) {
                return Err(ModelError::SosMemberOutOfRange { set: s.name.clone(), column: j });
            }
            if s.weights.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ModelError::NonMonotoneWeights(s.name.clone()));
            }
        }
        Ok(())
    }

    /// Converts every coefficient, bound and weight to another scalar type.
    pub fn cast<U: Scalar>(&self) -> LpModel<U> {
        let c = |v: T| U::of(v.as_f64());
        LpModel {
            name: self.name.clone(),
            sense: self.sense,
            columns: self
                .columns
                .iter()
                .map(|col| Column { name: col.name.clone(), objective: c(col.objective), lower: c(col.lower), upper: c(col.upper) })
                .collect(),
            rows: self
                .rows
                .iter()
                .map(|r| Row {
                    name: r.name.clone(),
                    sense: r.sense,
                    rhs: c(r.rhs),
                    coefficients: r.coefficients.iter().map(|&(j, a)| (j, c(a))).collect(),
                })
                .collect(),
            sos_sets: self
                .sos_sets
                .iter()
                .map(|s| SosSet {
                    name: s.name.clone(),
                    sos_type: s.sos_type,
                    members: s.members.clone(),
                    weights: s.weights.iter().map(|&w| c(w)).collect(),
                })
                .collect(),
            column_index: self.column_index.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_drop_zeros_and_sort() {
        let mut m = LpModel::<f64>::new("m", ObjectiveSense::Maximize);
        let a = m.add_column("a", 1.0, 0.0, 1.0).unwrap();
        let b = m.add_column("b", 1.0, 0.0, 1.0).unwrap();
        m.add_row("r", RowSense::Le, 3.0, [(b, 2.0), (a, 0.0), (a, 1.0)]);
        assert_eq!(m.rows[0].coefficients, vec![(a, 1.0), (b, 2.0)]);
        assert_eq!(m.dense_row(0), vec![1.0, 2.0]);
        assert!(m.add_column("a", 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn check_rejects_bad_weights() {
        let mut m = LpModel::<f64>::new("m", ObjectiveSense::Maximize);
        let a = m.add_column("a", 1.0, 0.0, 1.0).unwrap();
        let b = m.add_column("b", 1.0, 0.0, 1.0).unwrap();
        m.add_sos("s", SosType::Sos1, vec![a, b], vec![1.0, 1.0]);
        assert_eq!(m.check(), Err(ModelError::NonMonotoneWeights("s".into())));
    }

    #[test]
    fn violation_by_sense() {
        let r = Row { name: "r".into(), sense: RowSense::Le, rhs: 1.0, coefficients: vec![] };
        assert_eq!(r.violation(0.5), 0.0);
        assert_eq!(r.violation(1.5), 0.5);
        let r = Row { sense: RowSense::Eq, ..r };
        assert_eq!(r.violation(0.5), 0.5);
        let r = Row { sense: RowSense::Ge, ..r };
        assert_eq!(r.violation(1.5), 0.0);
    }
}
