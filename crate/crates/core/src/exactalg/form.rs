//! Symmetric and alternate bilinear forms, orthogonal complements and
//! isotropic line enumeration.
//!
//! Isotropy is always bilinear: `B(v,v) = 0`. In characteristic 2 this makes
//! a symmetric form behave like an alternate one on the hyperplane it cuts
//! out; no quadratic refinement is carried.

use serde::{Deserialize, Serialize};

use super::field::Field;
use super::matrix::{dot, Matrix};
use super::subspace::{combine, Subspace};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    Symmetric,
    Alternate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearForm<F: Field> {
    kind: FormKind,
    gram: Matrix<F>,
}

impl<F: Field> BilinearForm<F> {
    pub fn symmetric(gram: Matrix<F>) -> Result<Self> {
        check_square(&gram)?;
        let n = gram.rows();
        for i in 0..n {
            for j in 0..i {
                if gram.get(i, j) != gram.get(j, i) {
                    return Err(Error::Precondition("Gram matrix is not symmetric".into()));
                }
            }
        }
        Ok(Self { kind: FormKind::Symmetric, gram })
    }

    pub fn alternate(gram: Matrix<F>) -> Result<Self> {
        check_square(&gram)?;
        let f = gram.field().clone();
        let n = gram.rows();
        for i in 0..n {
            if !f.is_zero(gram.get(i, i)) {
                return Err(Error::Precondition("alternate Gram matrix has a nonzero diagonal".into()));
            }
            for j in 0..i {
                if *gram.get(i, j) != f.neg(gram.get(j, i)) {
                    return Err(Error::Precondition("Gram matrix is not antisymmetric".into()));
                }
            }
        }
        Ok(Self { kind: FormKind::Alternate, gram })
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn gram(&self) -> &Matrix<F> {
        &self.gram
    }

    pub fn field(&self) -> &F {
        self.gram.field()
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    /// `B(v, w)`
    pub fn eval(&self, v: &[F::Elem], w: &[F::Elem]) -> F::Elem {
        dot(self.field(), v, &self.gram.apply(w))
    }

    pub fn is_isotropic_vector(&self, v: &[F::Elem]) -> bool {
        match self.kind {
            FormKind::Alternate => true,
            FormKind::Symmetric => {
                self.field().is_zero(&self.eval(v, v))
            }
        }
    }

    pub fn is_totally_isotropic(&self, s: &Subspace<F>) -> bool {
        let f = self.field();
        let vs = s.vectors();
        for (i, a) in vs.iter().enumerate() {
            if !self.is_isotropic_vector(a) {
                return false;
            }
            for b in &vs[i + 1..] {
                if !f.is_zero(&self.eval(a, b)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.gram.rank() == self.dim()
    }

    /// `{v : B(v, s) = 0}`
    pub fn perp(&self, s: &Subspace<F>) -> Result<Subspace<F>> {
        if s.ambient() != self.dim() {
            return Err(Error::DimensionMismatch("perp: ambient vs form".into()));
        }
        if !self.is_nondegenerate() {
            return Err(Error::DegenerateForm);
        }
        Ok(self.perp_unchecked(s))
    }

    fn perp_unchecked(&self, s: &Subspace<F>) -> Subspace<F> {
        let f = self.field().clone();
        if s.dim() == 0 {
            return Subspace::full(f, self.dim());
        }
        let m = s.basis().mul(&self.gram).expect("dimensions checked");
        Subspace::kernel(&m)
    }

    /// Form on the span of `rows` in the coordinates given by `rows`.
    pub fn restrict(&self, rows: &Matrix<F>) -> Self {
        let f = self.field().clone();
        let m = rows.rows();
        let vs = rows.row_vectors();
        let mut g = Matrix::zeros(f.clone(), m, m);
        for i in 0..m {
            for j in 0..m {
                g.set(i, j, self.eval(&vs[i], &vs[j]));
            }
        }
        Self { kind: self.kind, gram: g }
    }

    /// Rank of the form restricted to `s`.
    pub fn rank_on(&self, s: &Subspace<F>) -> usize {
        self.restrict(s.basis()).gram.rank()
    }

    /// Same form with the Gram matrix negated; used to compare sign
    /// conventions of the symplectic block.
    pub fn negated(&self) -> Self {
        let f = self.field().clone();
        let minus = f.neg(&f.one());
        Self {
            kind: self.kind,
            gram: self.gram.scale(&minus),
        }
    }
}

fn check_square<F: Field>(m: &Matrix<F>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("Gram matrix must be square".into()));
    }
    Ok(())
}

/// All vectors of `F^dim` whose first nonzero coordinate is 1. Panics for
/// infinite fields.
pub fn projective_points<F: Field>(f: &F, dim: usize) -> Vec<Vec<F::Elem>> {
    let elems = f.elements().expect("projective enumeration needs a finite field");
    let q = elems.len();
    let mut out = Vec::new();
    for lead in 0..dim {
        let tail = dim - lead - 1;
        let count = q.pow(tail as u32);
        for mut code in 0..count {
            let mut v = vec![f.zero(); dim];
            v[lead] = f.one();
            for slot in v[lead + 1..].iter_mut().rev() {
                *slot = elems[code % q].clone();
                code /= q;
            }
            out.push(v);
        }
    }
    out
}

/// Every isotropic line inside `s`, once each, represented canonically.
pub fn isotropic_lines<'a, F: Field>(
    s: &'a Subspace<F>,
    form: &'a BilinearForm<F>,
) -> impl Iterator<Item = Subspace<F>> + 'a {
    let f = s.field().clone();
    projective_points(&f, s.dim()).into_iter().filter_map(move |c| {
        let v = combine(&f, s.basis(), &c);
        form.is_isotropic_vector(&v)
            .then(|| Subspace::span(f.clone(), s.ambient(), &[v]))
    })
}
