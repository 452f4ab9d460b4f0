//! Compressed-row complex matrices for operators and superoperators.

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<C64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed
    /// and exact zeros dropped.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, C64)>,
    ) -> Self {
        assert!(ncols <= u32::MAX as usize);
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut row_of = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c as u32);
                values.push(v);
                row_of.push(r);
                last = Some((r, c));
            }
        }
        // drop entries that cancelled exactly
        let mut k = 0;
        for j in 0..values.len() {
            if values[j] != C64::new(0.0, 0.0) {
                values[k] = values[j];
                indices[k] = indices[j];
                row_of[k] = row_of[j];
                k += 1;
            }
        }
        values.truncate(k);
        indices.truncate(k);
        row_of.truncate(k);
        for &r in &row_of {
            indptr[r + 1] += 1;
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        Self {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::from_triplets(nrows, ncols, Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_triplets(
            n,
            n,
            values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.indptr[r]..self.indptr[r + 1])
                .map(move |k| (r, self.indices[k] as usize, self.values[k]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let span = self.indptr[row]..self.indptr[row + 1];
        match self.indices[span.clone()].binary_search(&(col as u32)) {
            Ok(k) => self.values[span.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.iter().map(|(r, c, v)| (c, r, v.conj())).collect(),
        )
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.iter().map(|(r, c, v)| (c, r, v)).collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Self::from_triplets(
            self.nrows,
            self.ncols,
            self.iter().chain(other.iter()).collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut triplets = Vec::new();
        for (r, k, a) in self.iter() {
            for j in other.indptr[k]..other.indptr[k + 1] {
                triplets.push((r, other.indices[j] as usize, a * other.values[j]));
            }
        }
        Self::from_triplets(self.nrows, other.ncols, triplets)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut triplets = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, a) in self.iter() {
            for (r2, c2, b) in other.iter() {
                triplets.push((r1 * other.nrows + r2, c1 * other.ncols + c2, a * b));
            }
        }
        Self::from_triplets(self.nrows * other.nrows, self.ncols * other.ncols, triplets)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.nrows * self.ncols];
        for (r, c, v) in self.iter() {
            out[r * self.ncols + c] = v;
        }
        out
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (out, w) in y.iter_mut().zip(self.indptr.windows(2)) {
            let cols = &self.indices[w[0]..w[1]];
            let vals = &self.values[w[0]..w[1]];
            let (mut re, mut im) = (0.0, 0.0);
            for (&c, v) in cols.iter().zip(vals) {
                let xv = x[c as usize];
                re += v.re * xv.re - v.im * xv.im;
                im += v.re * xv.im + v.im * xv.re;
            }
            *out = C64::new(re, im);
        }
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other)
            .values
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn triplets_sum_and_drop_zeros() {
        let m = SparseMatrix::from_triplets(
            2,
            3,
            vec![
                (0, 1, c(1.0, 0.0)),
                (1, 2, c(2.0, 1.0)),
                (0, 1, c(-1.0, 0.0)),
                (1, 0, c(0.5, 0.0)),
            ],
        );
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), c(0.0, 0.0));
        assert_eq!(m.get(1, 2), c(2.0, 1.0));
        assert_eq!(m.get(1, 0), c(0.5, 0.0));
    }

    #[test]
    fn matmul_matches_dense() {
        let a = SparseMatrix::from_triplets(
            2,
            2,
            vec![
                (0, 0, c(1.0, 1.0)),
                (0, 1, c(2.0, 0.0)),
                (1, 1, c(0.0, -1.0)),
            ],
        );
        let b = SparseMatrix::from_triplets(2, 2, vec![(0, 1, c(3.0, 0.0)), (1, 0, c(1.0, 2.0))]);
        let p = a.matmul(&b);
        assert_eq!(p.get(0, 0), c(2.0, 4.0));
        assert_eq!(p.get(0, 1), c(3.0, 3.0));
        assert_eq!(p.get(1, 0), c(2.0, -1.0));
        assert_eq!(p.get(1, 1), c(0.0, 0.0));
        let x = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let y = a.mul_vec(&x);
        assert_eq!(y, vec![c(1.0, 3.0), c(1.0, 0.0)]);
    }

    #[test]
    fn kron_layout() {
        let a = SparseMatrix::diagonal(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let b = SparseMatrix::from_triplets(2, 2, vec![(0, 1, c(1.0, 0.0))]);
        let k = a.kron(&b);
        assert_eq!(k.get(0, 1), c(1.0, 0.0));
        assert_eq!(k.get(2, 3), c(2.0, 0.0));
        assert_eq!(k.nnz(), 2);
    }
}
