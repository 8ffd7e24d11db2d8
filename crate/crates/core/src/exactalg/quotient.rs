//! Restriction of an odd map `(u, u*)` to `S^⊥/S` for a totally isotropic,
//! stable, graded subspace `S = S₀ ⊕ S₁`.

use super::field::Field;
use super::form::BilinearForm;
use super::matrix::Matrix;
use super::subspace::{Coordinates, Subspace};
use crate::error::{Error, Result};

/// One sector of a quotient `S^⊥/S`: representatives of a basis of the
/// quotient (as rows in the ambient space) plus coordinates on `S^⊥`.
#[derive(Clone, Debug)]
pub struct SectorQuotient<F: Field> {
    reps: Matrix<F>,
    coords: Coordinates<F>,
}

impl<F: Field> SectorQuotient<F> {
    /// `s` must be totally isotropic for `form`.
    pub fn new(form: &BilinearForm<F>, s: &Subspace<F>) -> Result<Self> {
        if !form.is_totally_isotropic(s) {
            return Err(Error::NotIsotropic);
        }
        let perp = form.perp(s)?;
        let f = form.field().clone();
        let mut span = s.clone();
        let mut reps = Vec::new();
        for v in perp.vectors() {
            if !span.contains(&v) {
                span = span.sum(&Subspace::span(f.clone(), s.ambient(), std::slice::from_ref(&v)))?;
                reps.push(v);
            }
        }
        let mut all = reps.clone();
        all.extend(s.vectors());
        let reps = Matrix::from_rows(f.clone(), s.ambient(), &reps);
        let coords = Coordinates::new(Matrix::from_rows(f, s.ambient(), &all))?;
        Ok(Self { reps, coords })
    }

    /// Basis representatives of the quotient, as rows.
    pub fn reps(&self) -> &Matrix<F> {
        &self.reps
    }

    pub fn dim(&self) -> usize {
        self.reps.rows()
    }

    /// Quotient coordinates of `v ∈ S^⊥`; `None` when `v ∉ S^⊥`.
    pub fn project(&self, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        self.coords.of(v).map(|mut c| {
            c.truncate(self.dim());
            c
        })
    }

    /// A representative in the ambient space of a quotient vector.
    pub fn lift(&self, w: &[F::Elem]) -> Vec<F::Elem> {
        super::subspace::combine(self.reps.field(), &self.reps, w)
    }
}

/// Induced forms and map on `S^⊥/S`, with the data needed to project into
/// and lift out of the quotient.
#[derive(Clone, Debug)]
pub struct QuotientRestriction<F: Field> {
    pub phi: BilinearForm<F>,
    pub psi: BilinearForm<F>,
    /// Induced `u`, a `dim W₁ × dim W₀` matrix.
    pub u: Matrix<F>,
    pub sector0: SectorQuotient<F>,
    pub sector1: SectorQuotient<F>,
}

/// `u* = φ⁻¹ uᵗ ψ`
pub fn adjoint<F: Field>(phi: &BilinearForm<F>, psi: &BilinearForm<F>, u: &Matrix<F>) -> Result<Matrix<F>> {
    let phi_inv = phi.gram().inverse().ok_or(Error::DegenerateForm)?;
    phi_inv.mul(&u.transpose())?.mul(psi.gram())
}

/// Restricts `(φ, ψ, u)` to `(S₀^⊥/S₀) ⊕ (S₁^⊥/S₁)`. Requires both pieces
/// totally isotropic, `u(S₀) ⊆ S₁` and `u*(S₁) ⊆ S₀`.
pub fn quotient_restriction<F: Field>(
    s0: &Subspace<F>,
    s1: &Subspace<F>,
    phi: &BilinearForm<F>,
    psi: &BilinearForm<F>,
    u: &Matrix<F>,
) -> Result<QuotientRestriction<F>> {
    if s0.ambient() != phi.dim() || s1.ambient() != psi.dim() || u.rows() != psi.dim() || u.cols() != phi.dim() {
        return Err(Error::DimensionMismatch("quotient restriction".into()));
    }
    let ustar = adjoint(phi, psi, u)?;
    if !s0.map(u)?.is_subspace_of(s1) || !s1.map(&ustar)?.is_subspace_of(s0) {
        return Err(Error::Precondition("subspace is not stable under the map".into()));
    }
    let sector0 = SectorQuotient::new(phi, s0)?;
    let sector1 = SectorQuotient::new(psi, s1)?;
    let f = phi.field().clone();
    let mut induced = Matrix::zeros(f, sector1.dim(), sector0.dim());
    for j in 0..sector0.dim() {
        let image = u.apply(sector0.reps().row(j));
        let c = sector1
            .project(&image)
            .ok_or_else(|| Error::Inconsistent("u does not map S₀^⊥ into S₁^⊥".into()))?;
        for (i, x) in c.into_iter().enumerate() {
            induced.set(i, j, x);
        }
    }
    let phi_q = phi.restrict(sector0.reps());
    let psi_q = psi.restrict(sector1.reps());
    if !phi_q.is_nondegenerate() || !psi_q.is_nondegenerate() {
        return Err(Error::DegenerateForm);
    }
    Ok(QuotientRestriction { phi: phi_q, psi: psi_q, u: induced, sector0, sector1 })
}

/// Quotient by a single isotropic line `x` in sector `eps` (0 for `V₀`).
pub fn quotient_by_line<F: Field>(
    x: &Subspace<F>,
    eps: u8,
    phi: &BilinearForm<F>,
    psi: &BilinearForm<F>,
    u: &Matrix<F>,
) -> Result<QuotientRestriction<F>> {
    if x.dim() != 1 {
        return Err(Error::NotALine(x.dim()));
    }
    let f = phi.field().clone();
    match eps {
        0 => quotient_restriction(x, &Subspace::zero(f, psi.dim()), phi, psi, u),
        _ => quotient_restriction(&Subspace::zero(f, phi.dim()), x, phi, psi, u),
    }
}
