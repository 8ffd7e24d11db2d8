//! Explicit odd nilpotents `X = (u, u*)` on `V = V₀ ⊕ V₁`, their diagrams,
//! and restriction to `x^⊥/x`.
//!
//! Vectors of `V₀` and `V₁` are handled in sector-local coordinates; `u` is a
//! `dim V₁ × dim V₀` matrix and `u* = φ⁻¹ uᵗ ψ`.

use serde::{Deserialize, Serialize};

use crate::diagram::{diagram_from_kernel_profile, is_admissible, KernelProfile, Line, MarkedDiagram, Parity};
use crate::error::{Error, Result};
use crate::exactalg::{adjoint, quotient_by_line, BilinearForm, Field, Fp, Matrix, QuotientRestriction, Subspace};
use crate::slicing::RemovalMode;

#[derive(Clone, Debug)]
pub struct Realization<F: Field> {
    pub phi: BilinearForm<F>,
    pub psi: BilinearForm<F>,
    /// `V₀ → V₁`
    pub u: Matrix<F>,
    /// `V₁ → V₀`
    pub ustar: Matrix<F>,
    pub diagram: MarkedDiagram,
}

impl<F: Field> Realization<F> {
    /// Wraps `(φ, ψ, u)`, computing `u*` and the diagram.
    pub fn new(phi: BilinearForm<F>, psi: BilinearForm<F>, u: Matrix<F>) -> Result<Self> {
        if u.rows() != psi.dim() || u.cols() != phi.dim() {
            return Err(Error::DimensionMismatch(format!(
                "u is {}×{} but the sectors have dimensions ({}, {})",
                u.rows(),
                u.cols(),
                phi.dim(),
                psi.dim()
            )));
        }
        let ustar = adjoint(&phi, &psi, &u)?;
        let mut r = Realization { phi, psi, u, ustar, diagram: MarkedDiagram::empty() };
        r.diagram = diagram_of(&r)?;
        Ok(r)
    }

    pub fn field(&self) -> &F {
        self.phi.field()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.phi.dim(), self.psi.dim())
    }

    pub fn dim(&self, eps: Parity) -> usize {
        match eps {
            Parity::Even => self.phi.dim(),
            Parity::Odd => self.psi.dim(),
        }
    }

    pub fn form(&self, eps: Parity) -> &BilinearForm<F> {
        match eps {
            Parity::Even => &self.phi,
            Parity::Odd => &self.psi,
        }
    }

    /// `X` restricted to `V_ε`, landing in `V_{1−ε}`.
    pub fn map_from(&self, eps: Parity) -> &Matrix<F> {
        match eps {
            Parity::Even => &self.u,
            Parity::Odd => &self.ustar,
        }
    }

    /// `X^j` as a map `V_{ε+j} → V_ε`.
    pub fn power_into(&self, eps: Parity, j: usize) -> Matrix<F> {
        let mut m = Matrix::identity(self.field().clone(), self.dim(eps));
        let mut target = eps;
        for _ in 0..j {
            let source = target.flip();
            m = m.mul(self.map_from(source)).expect("sector dimensions agree");
            target = source;
        }
        m
    }

    /// `Ker X ∩ V_ε`
    pub fn kernel(&self, eps: Parity) -> Subspace<F> {
        Subspace::kernel(self.map_from(eps))
    }

    /// `Im X^j ∩ V_ε`
    pub fn image_power(&self, eps: Parity, j: usize) -> Subspace<F> {
        Subspace::image(&self.power_into(eps, j))
    }

    /// `Ker X^j ∩ V_ε`
    pub fn kernel_power(&self, eps: Parity, j: usize) -> Subspace<F> {
        let src = if j.is_multiple_of(2) { eps } else { eps.flip() };
        // X^j on V_ε lands in V_{ε+j}; that is power_into(ε+j, j)
        Subspace::kernel(&self.power_into(src, j))
    }
}

/// Recovers the diagram from `dim(Ker X ∩ Im X^{k−1} ∩ V_ε)`.
pub fn diagram_of<F: Field>(r: &Realization<F>) -> Result<MarkedDiagram> {
    let (d0, d1) = r.dims();
    let total = d0 + d1;
    for eps in Parity::BOTH {
        if !r.power_into(eps, total + 1).is_zero() {
            return Err(Error::NotNilpotent);
        }
    }
    let mut profile = KernelProfile::new();
    for eps in Parity::BOTH {
        let ker = r.kernel(eps);
        for k in 1..=total {
            let dim = ker.intersect(&r.image_power(eps, k - 1))?.dim();
            if dim == 0 {
                break;
            }
            profile.set(eps, k, dim);
        }
    }
    let d = diagram_from_kernel_profile(&profile)?;
    if d.size() != (d0, d1) {
        return Err(Error::Inconsistent(format!("diagram {d} does not account for dimensions ({d0}, {d1})")));
    }
    Ok(d)
}

/// A Jordan string `v₁ ← v₂ ← … ← v_L` with `X v₁ = 0`; `v₁` lies in the
/// sector given by the line parity.
struct Block {
    line: Line,
    /// Global index of each string vector.
    start: usize,
}

impl Block {
    fn sector(&self, i: usize) -> Parity {
        Parity::from_u8(self.line.label(i)).unwrap()
    }
}

/// Builds a realization of an admissible diagram of any size with a parity.
///
/// Lines are grouped into blocks: equal lines that cannot stand alone are
/// paired hyperbolically, even-length lines pair an `e` with an `o` line, and
/// lines of a self-dual shape are paired two at a time where possible, the
/// leftover one carrying a form on itself. Pairings satisfy
/// `B(Xa, b) = (−1)^{|a|} B(a, Xb)`; the result is checked by
/// recomputing its diagram.
pub fn build_nilpotent<F: Field>(d: &MarkedDiagram, field: F) -> Result<Realization<F>> {
    if !is_admissible(d) {
        return Err(Error::NotAdmissible(d.to_string()));
    }
    // lay out strings
    let mut blocks = Vec::new();
    let mut next = 0;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut singles: Vec<usize> = Vec::new();
    for (line, mult) in d.multiplicities() {
        if line.len % 2 == 0 && line.parity == Parity::Odd {
            continue; // placed together with their even partners
        }
        let self_dual = matches!(
            (line.parity, line.len % 4),
            (Parity::Even, 1) | (Parity::Odd, 3)
        );
        let partner = if line.len % 2 == 0 { Line::new(line.len, Parity::Odd) } else { line };
        let mut remaining = mult;
        while remaining >= 2 || (line.len % 2 == 0 && remaining >= 1) {
            let a = blocks.len();
            blocks.push(Block { line, start: next });
            next += line.len;
            blocks.push(Block { line: partner, start: next });
            next += line.len;
            pairs.push((a, a + 1));
            remaining -= if line.len % 2 == 0 { 1 } else { 2 };
        }
        if remaining == 1 {
            if !self_dual {
                return Err(Error::Inconsistent(format!("unpaired line {line} in {d}")));
            }
            singles.push(blocks.len());
            blocks.push(Block { line, start: next });
            next += line.len;
        }
    }
    let total = next;
    let f = field.clone();
    let one = f.one();
    let sign = |s: Parity, c: &F::Elem| if s == Parity::Odd { f.neg(c) } else { c.clone() };

    // Gram matrix and X on the string basis
    let mut gram = Matrix::zeros(f.clone(), total, total);
    let mut x = Matrix::zeros(f.clone(), total, total);
    for b in &blocks {
        for i in 1..b.line.len {
            x.set(b.start + i - 1, b.start + i, one.clone());
        }
    }
    let put = |g: &mut Matrix<F>, i: usize, j: usize, c: F::Elem, sector: Parity| {
        // symmetric on V₀, alternating on V₁
        g.set(j, i, if sector == Parity::Odd { f.neg(&c) } else { c.clone() });
        g.set(i, j, c);
    };
    for &(a, b) in &pairs {
        let (ba, bb) = (&blocks[a], &blocks[b]);
        let len = ba.line.len;
        let mut c = one.clone();
        for i in 0..len {
            if i > 0 {
                c = sign(ba.sector(i), &c);
            }
            let j = len - 1 - i;
            put(&mut gram, ba.start + i, bb.start + j, c.clone(), ba.sector(i));
        }
    }
    for &s in &singles {
        let bl = &blocks[s];
        let len = bl.line.len;
        let mut c = one.clone();
        for i in 0..len {
            if i > 0 {
                c = sign(bl.sector(i), &c);
            }
            let j = len - 1 - i;
            if i <= j {
                put(&mut gram, bl.start + i, bl.start + j, c.clone(), bl.sector(i));
            }
        }
    }

    // split into sectors
    let mut idx: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for b in &blocks {
        for i in 0..b.line.len {
            idx[b.sector(i).as_u8() as usize].push(b.start + i);
        }
    }
    let sub = |m: &Matrix<F>, rows: &[usize], cols: &[usize]| {
        let mut out = Matrix::zeros(f.clone(), rows.len(), cols.len());
        for (a, &r) in rows.iter().enumerate() {
            for (b, &c) in cols.iter().enumerate() {
                out.set(a, b, m.get(r, c).clone());
            }
        }
        out
    };
    let phi = BilinearForm::symmetric(sub(&gram, &idx[0], &idx[0]))?;
    let psi = BilinearForm::alternate(sub(&gram, &idx[1], &idx[1]))?;
    if !phi.is_nondegenerate() || !psi.is_nondegenerate() {
        return Err(Error::DegenerateForm);
    }
    let u = sub(&x, &idx[1], &idx[0]);
    let r = Realization::new(phi, psi, u)?;
    if r.ustar != sub(&x, &idx[0], &idx[1]) {
        return Err(Error::Inconsistent(format!("pairing for {d} is not compatible with X")));
    }
    if r.diagram != *d {
        return Err(Error::Inconsistent(format!("built {} instead of {d}", r.diagram)));
    }
    Ok(r)
}

/// Largest `k` with `⟨v⟩ ⊆ Ker X ∩ Im X^{k−1} ∩ V_ε` for an isotropic `v`;
/// `None` if `v` is zero, not isotropic or not killed by `X`.
pub fn sector_stratum<F: Field>(r: &Realization<F>, eps: Parity, v: &[F::Elem]) -> Option<usize> {
    let f = r.field();
    if v.iter().all(|c| f.is_zero(c)) || !r.form(eps).is_isotropic_vector(v) {
        return None;
    }
    if !r.map_from(eps).apply(v).iter().all(|c| f.is_zero(c)) {
        return None;
    }
    let mut k = 1;
    while k <= r.dim(eps) + r.dim(eps.flip()) && r.power_into(eps, k).solve(v).is_some() {
        k += 1;
    }
    Some(k)
}

/// The `(ε, k)` with `x ∈ 𝒦_ε(X, k)` for a line `x` of `V = V₀ ⊕ V₁`
/// (coordinates of `V₀` first), or `None`.
pub fn membership_stratum<F: Field>(r: &Realization<F>, x: &Subspace<F>) -> Option<(Parity, usize)> {
    let (d0, d1) = r.dims();
    if x.dim() != 1 || x.ambient() != d0 + d1 {
        return None;
    }
    let v = &x.vectors()[0];
    let f = r.field();
    let even_part = v[d0..].iter().all(|c| f.is_zero(c));
    let odd_part = v[..d0].iter().all(|c| f.is_zero(c));
    if even_part {
        sector_stratum(r, Parity::Even, &v[..d0]).map(|k| (Parity::Even, k))
    } else if odd_part {
        sector_stratum(r, Parity::Odd, &v[d0..]).map(|k| (Parity::Odd, k))
    } else {
        None
    }
}

/// Result of restricting to `x^⊥/x`.
#[derive(Clone, Debug)]
pub struct Restriction<F: Field> {
    pub realization: Realization<F>,
    pub mode: RemovalMode,
    pub quotient: QuotientRestriction<F>,
}

/// Restricts to `x^⊥/x` for `x ∈ 𝒦_ε(X, k)` (a line of `V_ε`, sector-local),
/// recording whether two boxes left one line or two.
pub fn restrict_at<F: Field>(r: &Realization<F>, eps: Parity, x: &Subspace<F>, k: usize) -> Result<Restriction<F>> {
    if x.dim() != 1 {
        return Err(Error::NotALine(x.dim()));
    }
    let v = x.vectors().remove(0);
    match sector_stratum(r, eps, &v) {
        Some(kk) if kk == k => {}
        other => {
            return Err(Error::Precondition(format!("line is in stratum {other:?}, not k = {k}")));
        }
    }
    let f = r.field();
    let pw = r.power_into(eps, k - 1);
    let y = pw.solve(&v).ok_or_else(|| Error::Inconsistent("no preimage under X^{k-1}".into()))?;
    let same_sector = (k - 1).is_multiple_of(2);
    let pairing = if same_sector { r.form(eps).eval(&v, &y) } else { f.zero() };
    if same_sector {
        // y is defined up to Ker X^{k−1}, which must lie in x^⊥
        for z in Subspace::kernel(&pw).vectors() {
            if !f.is_zero(&r.form(eps).eval(&v, &z)) {
                return Err(Error::Inconsistent("Ker X^{k-1} is not orthogonal to x".into()));
            }
        }
    }
    let mode = if f.is_zero(&pairing) { RemovalMode::TwoLines } else { RemovalMode::SameLine };
    let quotient = quotient_by_line(x, eps.as_u8(), &r.phi, &r.psi, &r.u)?;
    let realization = Realization::new(quotient.phi.clone(), quotient.psi.clone(), quotient.u.clone())?;
    Ok(Restriction { realization, mode, quotient })
}

/// The standard forms on `F^{2n+1}` and `F^{2n}`: `(e_i, e_j) = δ_{i+j, 2n+2}`
/// and `(f_i, f_j) = ±1` for `i + j = 2n+1`, positive when `i < j`.
pub fn standard_forms<F: Field>(field: &F, n: usize) -> Result<(BilinearForm<F>, BilinearForm<F>)> {
    let f = field.clone();
    let mut g0 = Matrix::zeros(f.clone(), 2 * n + 1, 2 * n + 1);
    for i in 0..=2 * n {
        g0.set(i, 2 * n - i, f.one());
    }
    let mut g1 = Matrix::zeros(f.clone(), 2 * n, 2 * n);
    for i in 0..2 * n {
        let j = 2 * n - 1 - i;
        g1.set(i, j, if i < j { f.one() } else { f.neg(&f.one()) });
    }
    Ok((BilinearForm::symmetric(g0)?, BilinearForm::alternate(g1)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub n: usize,
    pub field: u64,
    pub u: Vec<Vec<i64>>,
    pub diagram: String,
}

impl Fixture {
    pub fn named(name: &str) -> Result<Self> {
        let text = match name {
            "osp76_O2" => include_str!("../fixtures/osp76_O2.json"),
            "osp76_O3" => include_str!("../fixtures/osp76_O3.json"),
            _ => return Err(Error::OutOfRange(format!("unknown fixture `{name}`"))),
        };
        Ok(serde_json::from_str(text)?)
    }

    pub const NAMES: [&'static str; 2] = ["osp76_O2", "osp76_O3"];

    /// Realization in the standard bases over `F_p` for the given `p`.
    pub fn realization_over(&self, p: u64) -> Result<Realization<Fp>> {
        let f = Fp::new(p)?;
        let (phi, psi) = standard_forms(&f, self.n)?;
        if self.u.len() != 2 * self.n || self.u.iter().any(|r| r.len() != 2 * self.n + 1) {
            return Err(Error::DimensionMismatch("fixture matrix shape".into()));
        }
        let u = Matrix::from_i64_rows(f, 2 * self.n + 1, &self.u);
        Realization::new(phi, psi, u)
    }

    pub fn realization(&self) -> Result<Realization<Fp>> {
        self.realization_over(self.field)
    }
}
