//! Exact linear algebra over prime fields and the rationals.

pub mod field;
pub mod form;
pub mod matrix;
pub mod quotient;
pub mod subspace;

pub use field::{Field, Fp, Rationals};
pub use form::{isotropic_lines, projective_points, BilinearForm, FormKind};
pub use matrix::{Matrix, MatrixJson};
pub use quotient::{adjoint, quotient_by_line, quotient_restriction, QuotientRestriction, SectorQuotient};
pub use subspace::{Coordinates, Subspace};
