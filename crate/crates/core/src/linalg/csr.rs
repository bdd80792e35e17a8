//! Compressed sparse row matrices.

use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use std::io::Write;

/// Sparse matrix in CSR form. Column indices are sorted and unique within
/// each row; duplicate triplets are summed at construction in a canonical
/// order, so assembly results do not depend on element processing order.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from (row, col, value) triplets, summing duplicates. Triplets
    /// are sorted by (row, col, value) first so the summation order, and
    /// hence the floating-point result, is independent of input order.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> CsrMatrix {
        let mut trip: Vec<(usize, usize, f64)> = triplets.to_vec();
        trip.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));

        let mut row_offsets = vec![0usize; nrows + 1];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        let mut i = 0;
        while i < trip.len() {
            let (r, c, _) = trip[i];
            assert!(r < nrows && c < ncols, "triplet ({r},{c}) out of bounds");
            let mut sum = 0.0;
            while i < trip.len() && trip[i].0 == r && trip[i].1 == c {
                sum += trip[i].2;
                i += 1;
            }
            col_indices.push(c);
            values.push(sum);
            row_offsets[r + 1] += 1;
        }
        for r in 0..nrows {
            row_offsets[r + 1] += row_offsets[r];
        }
        CsrMatrix {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> CsrMatrix {
        CsrMatrix::from_triplets(nrows, ncols, &[])
    }

    pub fn identity(n: usize) -> CsrMatrix {
        let trip: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        CsrMatrix::from_triplets(n, n, &trip)
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

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.row_offsets[r]..self.row_offsets[r + 1];
        (&self.col_indices[span.clone()], &self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn mul_vec(&self, x: &DenseVector) -> Result<DenseVector> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                context: "spmv",
                expected: self.ncols,
                got: x.len(),
            });
        }
        let mut y = DenseVector::zeros(self.nrows);
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            y[r] = acc;
        }
        Ok(y)
    }

    pub fn transpose(&self) -> CsrMatrix {
        let trip: Vec<_> = self.iter().map(|(r, c, v)| (c, r, v)).collect();
        CsrMatrix::from_triplets(self.ncols, self.nrows, &trip)
    }

    pub fn scaled(&self, alpha: f64) -> CsrMatrix {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= alpha;
        }
        out
    }

    /// Assembles a block matrix from (row offset, col offset, scale, block).
    pub fn from_blocks(
        nrows: usize,
        ncols: usize,
        blocks: &[(usize, usize, f64, &CsrMatrix)],
    ) -> CsrMatrix {
        let mut trip = Vec::new();
        for &(r0, c0, s, m) in blocks {
            assert!(r0 + m.nrows() <= nrows && c0 + m.ncols() <= ncols);
            trip.extend(m.iter().map(|(r, c, v)| (r0 + r, c0 + c, s * v)));
        }
        CsrMatrix::from_triplets(nrows, ncols, &trip)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Infinity norm: maximum row sum of absolute values.
    pub fn inf_norm(&self) -> f64 {
        (0..self.nrows)
            .map(|r| self.row(r).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0f64, f64::max)
    }

    /// Largest |A_ij - A_ji| over all entries.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for (r, c, v) in self.iter() {
            worst = worst.max((v - self.get(c, r)).abs());
        }
        worst
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }

    /// Coordinate-format text dump, one `row col value` line per entry.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (r, c, v) in self.iter() {
            writeln!(w, "{} {} {:.17e}", r, c, v)?;
        }
        Ok(())
    }
}
