//! Sparse LU factorization of the simplex basis with product-form updates.
//!
//! Factorization runs in two stages. Row and column singletons are peeled off
//! first with lazy deletion; these steps never change the remaining entries,
//! so the leftover "bump" still holds original values and is factored densely
//! with partial pivoting. For bid-level models the bump is bounded by the
//! number of coupling rows, so it stays small even for very large bases.
//!
//! Positions (`c`) index basis columns, rows (`r`) index constraint rows.

use crate::scalar::Scalar;

/// Rows and basis positions left without a pivot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Singular {
    pub rows: Vec<usize>,
    pub positions: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Eta<T> {
    pos: usize,
    pivot: T,
    entries: Vec<(usize, T)>,
}

/// Elimination record: step `k` pivots row `pivot_row[k]` on basis position
/// `pivot_pos[k]`; `L_k` lists the rows that had a multiple of the pivot row
/// subtracted, `U_k` the pivot row's entries in later-pivoted positions.
#[derive(Debug, Clone)]
pub(crate) struct LuFactors<T> {
    m: usize,
    pivot_row: Vec<usize>,
    pivot_pos: Vec<usize>,
    pivot_val: Vec<T>,
    l_start: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<T>,
    u_start: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<T>,
    etas: Vec<Eta<T>>,
}

impl<T: Scalar> LuFactors<T> {
    /// Factorizes the `m x m` basis given as sparse columns of `(row, value)`.
    pub fn factorize(m: usize, columns: &[Vec<(usize, T)>]) -> Result<Self, Singular> {
        debug_assert_eq!(columns.len(), m);
        let mut lu = LuFactors {
            m,
            pivot_row: Vec::with_capacity(m),
            pivot_pos: Vec::with_capacity(m),
            pivot_val: Vec::with_capacity(m),
            l_start: vec![0],
            l_idx: Vec::new(),
            l_val: Vec::new(),
            u_start: vec![0],
            u_idx: Vec::new(),
            u_val: Vec::new(),
            etas: Vec::new(),
        };

        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); m];
        let mut cols: Vec<Vec<(usize, T)>> = vec![Vec::new(); m];
        for (c, col) in columns.iter().enumerate() {
            for &(r, v) in col {
                if v.abs() > T::drop_tol() {
                    rows[r].push((c, v));
                    cols[c].push((r, v));
                }
            }
        }
        let mut row_cnt: Vec<usize> = rows.iter().map(Vec::len).collect();
        let mut col_cnt: Vec<usize> = cols.iter().map(Vec::len).collect();
        let mut row_on = vec![true; m];
        let mut col_on = vec![true; m];

        let mut col_queue: Vec<usize> = (0..m).rev().filter(|&c| col_cnt[c] == 1).collect();
        let mut row_queue: Vec<usize> = (0..m).rev().filter(|&r| row_cnt[r] == 1).collect();

        loop {
            if let Some(c) = col_queue.pop() {
                if !col_on[c] || col_cnt[c] != 1 {
                    continue;
                }
                let &(r, v) = cols[c].iter().find(|&&(r, _)| row_on[r]).expect("count says one live entry");
                if v.abs() < T::pivot_tol() {
                    continue;
                }
                for &(j, u) in &rows[r] {
                    if j != c && col_on[j] {
                        lu.u_idx.push(j);
                        lu.u_val.push(u);
                        col_cnt[j] -= 1;
                        if col_cnt[j] == 1 {
                            col_queue.push(j);
                        }
                    }
                }
                lu.close_step(r, c, v);
                row_on[r] = false;
                col_on[c] = false;
                continue;
            }
            if let Some(r) = row_queue.pop() {
                if !row_on[r] || row_cnt[r] != 1 {
                    continue;
                }
                let &(c, v) = rows[r].iter().find(|&&(c, _)| col_on[c]).expect("count says one live entry");
                if v.abs() < T::pivot_tol() {
                    continue;
                }
                for &(i, a) in &cols[c] {
                    if i != r && row_on[i] {
                        lu.l_idx.push(i);
                        lu.l_val.push(a / v);
                        row_cnt[i] -= 1;
                        if row_cnt[i] == 1 {
                            row_queue.push(i);
                        }
                    }
                }
                lu.close_step(r, c, v);
                row_on[r] = false;
                col_on[c] = false;
                continue;
            }
            break;
        }

        let bump_rows: Vec<usize> = (0..m).filter(|&r| row_on[r]).collect();
        let bump_cols: Vec<usize> = (0..m).filter(|&c| col_on[c]).collect();
        if bump_rows.is_empty() {
            return Ok(lu);
        }
        lu.factor_bump(&bump_rows, &bump_cols, &cols)?;
        Ok(lu)
    }

    fn close_step(&mut self, r: usize, c: usize, v: T) {
        self.l_start.push(self.l_idx.len());
        self.u_start.push(self.u_idx.len());
        self.pivot_row.push(r);
        self.pivot_pos.push(c);
        self.pivot_val.push(v);
    }

    /// Dense Gaussian elimination with partial pivoting on the leftover block.
    fn factor_bump(&mut self, rows: &[usize], cols: &[usize], entries: &[Vec<(usize, T)>]) -> Result<(), Singular> {
        let b = rows.len();
        let mut local_row = vec![usize::MAX; self.m];
        for (i, &r) in rows.iter().enumerate() {
            local_row[r] = i;
        }
        let mut d = vec![T::zero(); b * b];
        for (t, &c) in cols.iter().enumerate() {
            for &(r, v) in &entries[c] {
                let i = local_row[r];
                if i != usize::MAX {
                    d[i * b + t] = v;
                }
            }
        }

        let mut row_done = vec![false; b];
        let mut dead_cols = Vec::new();
        for t in 0..b {
            let mut best: Option<(usize, T)> = None;
            for i in (0..b).filter(|&i| !row_done[i]) {
                let v = d[i * b + t].abs();
                if v >= T::pivot_tol() && best.is_none_or(|(_, bv)| v > bv) {
                    best = Some((i, v));
                }
            }
            let Some((p, _)) = best else {
                dead_cols.push(cols[t]);
                continue;
            };
            let pivot = d[p * b + t];
            for i in (0..b).filter(|&i| !row_done[i] && i != p) {
                let a = d[i * b + t];
                if a == T::zero() {
                    continue;
                }
                let l = a / pivot;
                self.l_idx.push(rows[i]);
                self.l_val.push(l);
                for u in t + 1..b {
                    let pu = d[p * b + u];
                    if pu != T::zero() {
                        d[i * b + u] -= l * pu;
                    }
                }
                d[i * b + t] = T::zero();
            }
            for u in t + 1..b {
                let pu = d[p * b + u];
                if pu.abs() > T::drop_tol() {
                    self.u_idx.push(cols[u]);
                    self.u_val.push(pu);
                }
            }
            row_done[p] = true;
            self.close_step(rows[p], cols[t], pivot);
        }

        if dead_cols.is_empty() {
            Ok(())
        } else {
            Err(Singular { rows: (0..b).filter(|&i| !row_done[i]).map(|i| rows[i]).collect(), positions: dead_cols })
        }
    }

    pub fn num_updates(&self) -> usize {
        self.etas.len()
    }

    /// Solves `B x = rhs`. `rhs` is indexed by row and is consumed as scratch;
    /// the result is indexed by basis position.
    pub fn ftran(&self, rhs: &mut [T], out: &mut [T]) {
        for k in 0..self.m {
            let br = rhs[self.pivot_row[k]];
            if br != T::zero() {
                for e in self.l_start[k]..self.l_start[k + 1] {
                    rhs[self.l_idx[e]] -= self.l_val[e] * br;
                }
            }
        }
        for k in (0..self.m).rev() {
            let mut v = rhs[self.pivot_row[k]];
            for e in self.u_start[k]..self.u_start[k + 1] {
                v -= self.u_val[e] * out[self.u_idx[e]];
            }
            out[self.pivot_pos[k]] = v / self.pivot_val[k];
        }
        for eta in &self.etas {
            let xp = out[eta.pos] / eta.pivot;
            out[eta.pos] = xp;
            if xp != T::zero() {
                for &(i, a) in &eta.entries {
                    out[i] -= a * xp;
                }
            }
        }
    }

    /// Solves `B^T y = d`. `d` is indexed by basis position and consumed as
    /// scratch; the result is indexed by row.
    pub fn btran(&self, d: &mut [T], out: &mut [T]) {
        for eta in self.etas.iter().rev() {
            let mut v = d[eta.pos];
            for &(i, a) in &eta.entries {
                v -= a * d[i];
            }
            d[eta.pos] = v / eta.pivot;
        }
        for k in 0..self.m {
            let z = d[self.pivot_pos[k]] / self.pivot_val[k];
            out[self.pivot_row[k]] = z;
            if z != T::zero() {
                for e in self.u_start[k]..self.u_start[k + 1] {
                    d[self.u_idx[e]] -= self.u_val[e] * z;
                }
            }
        }
        for k in (0..self.m).rev() {
            let mut acc = T::zero();
            for e in self.l_start[k]..self.l_start[k + 1] {
                acc += self.l_val[e] * out[self.l_idx[e]];
            }
            out[self.pivot_row[k]] -= acc;
        }
    }

    /// Records the replacement of basis position `pos` by a column whose
    /// FTRAN image is `alpha`.
    pub fn update(&mut self, pos: usize, alpha: &[T]) {
        let entries = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &a)| i != pos && a.abs() > T::drop_tol())
            .map(|(i, &a)| (i, a))
            .collect();
        self.etas.push(Eta { pos, pivot: alpha[pos], entries });
    }
}
