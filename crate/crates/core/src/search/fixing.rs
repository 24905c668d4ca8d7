use crate::simplex::Bounds;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Permanence {
    /// Kept for the whole subtree.
    Permanent,
    /// Withdrawn as a group by [`FixingSet::without_temporary`].
    Temporary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fix<T> {
    pub column: usize,
    pub lower: T,
    pub upper: T,
    pub permanence: Permanence,
}

/// Bound overrides produced by the hot-start strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct FixingSet<T> {
    entries: Vec<Fix<T>>,
}

impl<T> Default for FixingSet<T> {
    fn default() -> Self {
        FixingSet { entries: Vec::new() }
    }
}

impl<T: Scalar> FixingSet<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fix(&mut self, column: usize, value: T, permanence: Permanence) {
        self.entries.push(Fix { column, lower: value, upper: value, permanence });
    }

    pub fn entries(&self) -> &[Fix<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Value a column is fixed to, if any (last entry wins).
    pub fn value_of(&self, column: usize) -> Option<T> {
        self.entries.iter().rev().find(|f| f.column == column && f.lower == f.upper).map(|f| f.lower)
    }

    pub fn extend(&mut self, other: FixingSet<T>) {
        self.entries.extend(other.entries);
    }

    pub fn without_temporary(&self) -> Self {
        FixingSet { entries: self.entries.iter().copied().filter(|f| f.permanence == Permanence::Permanent).collect() }
    }

    /// Intersects every entry into `bounds`; false if some range became empty.
    pub fn apply(&self, bounds: &mut Bounds<T>) -> bool {
        let mut ok = true;
        for f in &self.entries {
            ok &= bounds.tighten(f.column, f.lower, f.upper);
        }
        ok
    }
}
