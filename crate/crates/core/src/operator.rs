//! Compressed sparse row operators over a sector basis.

use std::fmt::Debug;
use std::ops::AddAssign;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Matrix entry type: `f64` for real operators (the Hamiltonian, number
/// operators) and `Complex64` for currents.
pub trait Entry: Copy + Send + Sync + Debug + PartialEq + Zero + AddAssign + 'static {
    fn conj(self) -> Self;
    fn to_c64(self) -> Complex64;
}

impl Entry for f64 {
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Entry for Complex64 {
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn to_c64(self) -> Complex64 {
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
    hermitian: bool,
}

impl<T: Entry> SparseOperator<T> {
    /// Assembles a CSR matrix from `(row, col, value)` triplets.
    ///
    /// Duplicate coordinates are summed; entries that sum to exactly zero
    /// are dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, T)>, hermitian: bool) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: r.max(c) + 1 });
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));

        let mut merged: Vec<(usize, usize, T)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|(_, _, v)| !v.is_zero());

        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(merged.len());
        let mut vals = Vec::with_capacity(merged.len());
        for (r, c, v) in merged {
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self { dim, row_ptr, cols, vals, hermitian })
    }

    pub fn diagonal(values: Vec<T>) -> Self {
        let dim = values.len();
        let triplets = values.into_iter().enumerate().map(|(i, v)| (i, i, v)).collect();
        Self::from_triplets(dim, triplets, true).expect("diagonal entries are in range")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Stored entries of one row as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    /// All stored entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => T::zero(),
        }
    }

    /// Largest `|A_rc - conj(A_cr)|` over stored entries.
    pub fn hermiticity_defect(&self) -> f64 {
        self.entries().map(|(r, c, v)| (v.to_c64() - self.get(c, r).conj().to_c64()).norm()).fold(0.0, f64::max)
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = Complex64::zero();
            for (c, v) in self.row(r) {
                acc += v.to_c64() * x[c];
            }
            *out = acc;
        }
    }

    pub fn apply_new(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::zero(); self.dim];
        self.apply(x, &mut y);
        y
    }

    /// `<x|A|x>` without allocating.
    pub fn expectation(&self, x: &[Complex64]) -> Result<Complex64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        let mut total = Complex64::zero();
        for (r, xr) in x.iter().enumerate() {
            let mut acc = Complex64::zero();
            for (c, v) in self.row(r) {
                acc += v.to_c64() * x[c];
            }
            total += xr.conj() * acc;
        }
        Ok(total)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v.to_c64();
        }
        m
    }

    /// Maximum absolute row sum, an upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim).map(|r| self.row(r).map(|(_, v)| v.to_c64().norm()).sum::<f64>()).fold(0.0, f64::max)
    }
}

impl SparseOperator<f64> {
    pub fn to_dense_real(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn to_complex(&self) -> SparseOperator<Complex64> {
        SparseOperator {
            dim: self.dim,
            row_ptr: self.row_ptr.clone(),
            cols: self.cols.clone(),
            vals: self.vals.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            hermitian: self.hermitian,
        }
    }
}
