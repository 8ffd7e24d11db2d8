//! Subspaces of `F^N` stored by their reduced row echelon basis, so equal
//! subspaces have equal representations.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use super::field::Field;
use super::matrix::{is_zero_vector, Matrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace<F: Field> {
    basis: Matrix<F>,
}

impl<F: Field> Subspace<F> {
    /// Span of the given vectors.
    pub fn span(field: F, ambient: usize, vectors: &[Vec<F::Elem>]) -> Self {
        let m = Matrix::from_rows(field.clone(), ambient, vectors);
        let (r, piv) = m.rref();
        let rows: Vec<Vec<F::Elem>> = (0..piv.len()).map(|i| r.row(i).to_vec()).collect();
        Self { basis: Matrix::from_rows(field, ambient, &rows) }
    }

    pub fn zero(field: F, ambient: usize) -> Self {
        Self::span(field, ambient, &[])
    }

    pub fn full(field: F, ambient: usize) -> Self {
        let id = Matrix::identity(field.clone(), ambient);
        Self::span(field, ambient, &id.row_vectors())
    }

    /// Row space of a matrix.
    pub fn row_space(m: &Matrix<F>) -> Self {
        Self::span(m.field().clone(), m.cols(), &m.row_vectors())
    }

    /// `{v : m · v = 0}`.
    pub fn kernel(m: &Matrix<F>) -> Self {
        Self::span(m.field().clone(), m.cols(), &m.kernel_vectors())
    }

    /// Column space of `m`.
    pub fn image(m: &Matrix<F>) -> Self {
        Self::row_space(&m.transpose())
    }

    pub fn field(&self) -> &F {
        self.basis.field()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// Canonical (reduced echelon) basis as rows.
    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vec<F::Elem>> {
        self.basis.row_vectors()
    }

    pub fn canonicalize(&self) -> Self {
        Self::span(self.field().clone(), self.ambient(), &self.vectors())
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient() != other.ambient() {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of F^{} and F^{}",
                self.ambient(),
                other.ambient()
            )));
        }
        Ok(())
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        if is_zero_vector(self.field(), v) {
            return true;
        }
        let mut rows = self.vectors();
        rows.push(v.to_vec());
        Matrix::from_rows(self.field().clone(), self.ambient(), &rows).rank() == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ambient() == other.ambient() && self.vectors().iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let mut rows = self.vectors();
        rows.extend(other.vectors());
        Ok(Self::span(self.field().clone(), self.ambient(), &rows))
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let f = self.field().clone();
        let (a, b) = (self.dim(), other.dim());
        if a == 0 || b == 0 {
            return Ok(Self::zero(f, self.ambient()));
        }
        // x·A = y·B  <=>  [A^T | -B^T] (x, y) = 0
        let n = self.ambient();
        let mut m = Matrix::zeros(f.clone(), n, a + b);
        for i in 0..n {
            for j in 0..a {
                m.set(i, j, self.basis.get(j, i).clone());
            }
            for j in 0..b {
                m.set(i, a + j, f.neg(other.basis.get(j, i)));
            }
        }
        let vecs: Vec<Vec<F::Elem>> = m
            .kernel_vectors()
            .into_iter()
            .map(|k| combine(&f, &self.basis, &k[..a]))
            .collect();
        Ok(Self::span(f, n, &vecs))
    }

    /// Image of this subspace under `m`.
    pub fn map(&self, m: &Matrix<F>) -> Result<Self> {
        if m.cols() != self.ambient() {
            return Err(Error::DimensionMismatch("map domain".into()));
        }
        let vecs: Vec<Vec<F::Elem>> = self.vectors().iter().map(|v| m.apply(v)).collect();
        Ok(Self::span(m.field().clone(), m.rows(), &vecs))
    }

    /// `{v : m · v ∈ self}`.
    pub fn preimage(&self, m: &Matrix<F>) -> Result<Self> {
        if m.rows() != self.ambient() {
            return Err(Error::DimensionMismatch("map codomain".into()));
        }
        let f = self.field().clone();
        // v ↦ m·v modulo self: compose with a projection killing self
        let complement_test = Matrix::from_rows(f.clone(), self.ambient(), &self.annihilator());
        let composed = complement_test.mul(m)?;
        Ok(Self::kernel(&composed))
    }

    /// Rows spanning the linear functionals vanishing on this subspace.
    pub fn annihilator(&self) -> Vec<Vec<F::Elem>> {
        self.basis.kernel_vectors()
    }
}

/// `Σ coeffs[i] · rows[i]`
pub fn combine<F: Field>(f: &F, rows: &Matrix<F>, coeffs: &[F::Elem]) -> Vec<F::Elem> {
    let mut out = vec![f.zero(); rows.cols()];
    for (i, c) in coeffs.iter().enumerate() {
        if f.is_zero(c) {
            continue;
        }
        for (j, x) in rows.row(i).iter().enumerate() {
            out[j] = f.add(&out[j], &f.mul(c, x));
        }
    }
    out
}

impl<F: Field> Ord for Subspace<F> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.ambient(), self.dim())
            .cmp(&(other.ambient(), other.dim()))
            .then_with(|| self.basis.entries().cmp(other.basis.entries()))
    }
}

impl<F: Field> PartialOrd for Subspace<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<F: Field> Hash for Subspace<F> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ambient().hash(state);
        self.basis.entries().hash(state);
    }
}

/// Coordinates with respect to a fixed (not necessarily echelon) basis,
/// precomputed so each lookup is a single vector-matrix product.
#[derive(Clone, Debug)]
pub struct Coordinates<F: Field> {
    basis: Matrix<F>,
    pivots: Vec<usize>,
    inv: Matrix<F>,
}

impl<F: Field> Coordinates<F> {
    /// `basis` rows must be linearly independent.
    pub fn new(basis: Matrix<F>) -> Result<Self> {
        let (_, pivots) = basis.rref();
        if pivots.len() != basis.rows() {
            return Err(Error::Precondition("coordinate basis is dependent".into()));
        }
        let f = basis.field().clone();
        let m = basis.rows();
        let mut sq = Matrix::zeros(f, m, m);
        for i in 0..m {
            for (j, &p) in pivots.iter().enumerate() {
                sq.set(i, j, basis.get(i, p).clone());
            }
        }
        let inv = sq.inverse().expect("pivot minor is invertible");
        Ok(Self { basis, pivots, inv })
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    /// Coordinates of `v`, or `None` when `v` is outside the span.
    pub fn of(&self, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let f = self.basis.field();
        let m = self.basis.rows();
        let picked: Vec<F::Elem> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let coeffs: Vec<F::Elem> = (0..m)
            .map(|j| {
                (0..m).fold(f.zero(), |acc, i| f.add(&acc, &f.mul(&picked[i], self.inv.get(i, j))))
            })
            .collect();
        let back = combine(f, &self.basis, &coeffs);
        (back == v).then_some(coeffs)
    }
}
