//! Sparse symmetric operators assembled from quadratic-form contributions.
//!
//! Assembly accumulates weighted rank-one terms w * r r^T (one per
//! quadrature site). Off-diagonal pairs (i, j) and (j, i) receive the
//! *same* rounded product, and duplicate merging is stable, so the stored
//! matrix is symmetric bit for bit, not merely up to roundoff.

use std::io::Write;

/// Triplet accumulator for building a [`SparseSymOp`].
pub struct Triplets {
    dim: usize,
    entries: Vec<(u32, u32, f64)>,
}

impl Triplets {
    pub fn new(dim: usize) -> Triplets {
        assert!(dim <= u32::MAX as usize, "operator dimension exceeds u32 index space");
        Triplets { dim, entries: Vec::new() }
    }

    /// Add w * r r^T for a sparse row r given as (index, coefficient) pairs.
    pub fn add_quadratic_row(&mut self, w: f64, row: &[(usize, f64)]) {
        for (a, &(ia, ca)) in row.iter().enumerate() {
            for &(ib, cb) in &row[a..] {
                let v = w * ca * cb;
                if v == 0.0 {
                    continue;
                }
                self.entries.push((ia as u32, ib as u32, v));
                if ia != ib {
                    self.entries.push((ib as u32, ia as u32, v));
                }
            }
        }
    }

    /// Add v to the diagonal entry (i, i).
    pub fn add_diag(&mut self, i: usize, v: f64) {
        if v != 0.0 {
            self.entries.push((i as u32, i as u32, v));
        }
    }

    /// Merge duplicates and freeze into compressed sparse rows, attaching
    /// the diagonal of the discrete inner product this operator is paired
    /// with.
    pub fn into_operator(mut self, mass_diag: Vec<f64>) -> SparseSymOp {
        assert_eq!(mass_diag.len(), self.dim);
        // Stable sort keeps insertion order within duplicate groups, so
        // mirrored (i, j)/(j, i) runs sum in the same order and stay
        // bitwise equal.
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut col_idx: Vec<u32> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut it = self.entries.iter().peekable();
        while let Some(&(r, c, v)) = it.next() {
            let mut acc = v;
            while let Some(&&(r2, c2, v2)) = it.peek() {
                if r2 == r && c2 == c {
                    acc += v2;
                    it.next();
                } else {
                    break;
                }
            }
            row_ptr[r as usize + 1] += 1;
            col_idx.push(c);
            values.push(acc);
        }
        for r in 0..self.dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseSymOp { dim: self.dim, row_ptr, col_idx, values, mass_diag }
    }
}

/// Symmetric sparse matrix in CSR form, paired with a diagonal mass.
#[derive(Clone, Debug)]
pub struct SparseSymOp {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
    mass_diag: Vec<f64>,
}

impl SparseSymOp {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Diagonal of the discrete L2 inner product paired with this operator.
    pub fn mass_diag(&self) -> &[f64] {
        &self.mass_diag
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for r in 0..self.dim {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k] as usize];
            }
            y[r] = acc;
        }
    }

    /// x^T A x.
    pub fn quadratic(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.dim {
            let mut row = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                row += self.values[k] * x[self.col_idx[k] as usize];
            }
            acc += x[r] * row;
        }
        acc
    }

    /// Entry (i, j) by binary search within row i.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&(j as u32)) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    /// max |A_ij - A_ji| over stored entries; 0.0 exactly for assembled forms.
    pub fn max_asymmetry(&self) -> f64 {
        let mut m = 0.0f64;
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k] as usize;
                if c > r {
                    m = m.max((self.values[k] - self.get(c, r)).abs());
                }
            }
        }
        m
    }

    /// Half bandwidth: max |i - j| over stored entries.
    pub fn bandwidth(&self) -> usize {
        let mut bw = 0usize;
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k] as usize;
                bw = bw.max(r.abs_diff(c));
            }
        }
        bw
    }

    /// Visit stored entries in CSR order.
    pub fn for_each(&self, mut f: impl FnMut(usize, usize, f64)) {
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                f(r, self.col_idx[k] as usize, self.values[k]);
            }
        }
    }

    /// Extract the matrix diagonal.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Write 1-indexed (row, col, value) triplets, one per line.
    pub fn write_triplets(&self, out: &mut impl Write) -> std::io::Result<()> {
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                writeln!(out, "{} {} {:.17e}", r + 1, self.col_idx[k] as usize + 1, self.values[k])?;
            }
        }
        Ok(())
    }
}
