//! Exact commutative algebra for universal homeomorphisms, multiplicative
//! perfections, fiber-product pushouts and Milnor patching.
//!
//! Every decision procedure returns a [`certificate::Certificate`] whose
//! witnesses can be re-checked by [`certificate::replay`] using normal forms
//! and evaluation only.

pub mod algebra;
pub mod certificate;
pub mod coeff;
pub mod error;
pub mod expr;
pub mod groebner;
pub mod linalg;
pub mod monomial;
pub mod par;
pub mod patching;
pub mod perfection;
pub mod points;
pub mod poly;
pub mod pushout;
pub mod ratfunc;
pub mod univhomeo;

pub use coeff::{Coeff, CoeffRing};
pub use error::{AlgebraError, Result};
pub use monomial::{Monomial, MonomialOrder};
pub use poly::Polynomial;
