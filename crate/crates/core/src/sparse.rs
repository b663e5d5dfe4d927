use nalgebra::DMatrix;
use num_complex::Complex64;

/// Real symmetric matrix stored as a diagonal plus CSR off-diagonal part.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHamiltonian {
    diagonal: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl SparseHamiltonian {
    pub fn from_rows(diagonal: Vec<f64>, rows: Vec<Vec<(usize, f64)>>) -> Self {
        assert_eq!(diagonal.len(), rows.len());
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                values.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self {
            diagonal,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn from_diagonal(diagonal: Vec<f64>) -> Self {
        let n = diagonal.len();
        Self::from_rows(diagonal, vec![Vec::new(); n])
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Copy with `shift` added to the diagonal.
    pub fn with_diagonal_shift(&self, shift: &[f64]) -> Self {
        assert_eq!(shift.len(), self.dim());
        let mut out = self.clone();
        for (d, s) in out.diagonal.iter_mut().zip(shift) {
            *d += s;
        }
        out
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim())
            .map(|r| {
                self.diagonal[r].abs()
                    + self.values[self.row_ptr[r]..self.row_ptr[r + 1]]
                        .iter()
                        .map(|v| v.abs())
                        .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.dim() {
            let mut acc = self.diagonal[r] * x[r];
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[p] * x[self.cols[p]];
            }
            y[r] = acc;
        }
    }

    pub fn apply_complex(&self, x: &[Complex64], y: &mut [Complex64]) {
        for r in 0..self.dim() {
            let mut acc = x[r] * self.diagonal[r];
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.cols[p]] * self.values[p];
            }
            y[r] = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for r in 0..n {
            m[(r, r)] = self.diagonal[r];
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[p])] += self.values[p];
            }
        }
        m
    }
}
