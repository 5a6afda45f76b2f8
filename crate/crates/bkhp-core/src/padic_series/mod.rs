//! Coefficient rings, the truncated ring 𝔖 = W[[u]] with its Frobenius,
//! E-jets for Ŝ[1/E], the element λ and Gauss-norm diagnostics.

pub mod coeff;
pub mod ctx;
pub mod fq;
pub mod gf;
pub mod jet;
pub mod lambda;
pub mod lognorm;
pub mod padic;
pub mod poly;
pub mod series;

pub use coeff::{Coeff, CoeffField, CoeffRepr, EXACT};
pub use ctx::{ctx0, ctx1, ctx_equal3, equal_context, mixed_context, EqualCtx, MixedCtx, Mode, PrecCtx};
pub use fq::{FqField, FqLaurent};
pub use jet::{Jet, JetRing};
pub use lambda::lambda_truncated;
pub use lognorm::LogNorm;
pub use padic::{Padic, PadicField};
pub use poly::Poly;
pub use series::SeriesElt;
