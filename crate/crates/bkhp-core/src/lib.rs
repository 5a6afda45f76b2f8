//! Finite-precision algebra for Breuil–Kisin φ/𝔖-modules and Hodge-Pink
//! structures.
//!
//! Every algorithm is generic over the coefficient field `F: CoeffField`;
//! the two instantiations are Q_p (`PadicField`, mixed characteristic) and
//! F_q((π)) (`FqField`, equal characteristic).

pub mod admissibility;
pub mod error;
pub mod fontaine;
pub mod hodge_pink;
pub mod kisin;
pub mod lattices;
pub mod padic_series;

pub use error::{Error, Result};
pub use padic_series::{Coeff, CoeffField, EqualCtx, FqField, MixedCtx, PadicField, PrecCtx};
