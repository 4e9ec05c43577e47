//! Minimal dense row-major matrix used by the LCP core and GNEP assembly.

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Mat {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat { nrows, ncols, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.ncols + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.ncols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.ncols);
        (0..self.nrows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// Transposed product `A^T v`.
    pub fn tr_matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.nrows);
        let mut out = vec![0.0; self.ncols];
        for i in 0..self.nrows {
            let row = self.row(i);
            let vi = v[i];
            if vi != 0.0 {
                for (j, &a) in row.iter().enumerate() {
                    out[j] += a * vi;
                }
            }
        }
        out
    }

    /// Quadratic form `v^T A v` for square matrices.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let av = self.matvec(v);
        v.iter().zip(&av).map(|(&a, &b)| a * b).sum()
    }

    /// Copies `other` into this matrix with its top-left corner at (`r`, `c`).
    pub fn paste(&mut self, r: usize, c: usize, other: &Mat) {
        assert!(r + other.nrows <= self.nrows && c + other.ncols <= self.ncols);
        for i in 0..other.nrows {
            for j in 0..other.ncols {
                self.set(r + i, c + j, other.get(i, j));
            }
        }
    }
}
