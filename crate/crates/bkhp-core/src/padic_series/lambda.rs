use crate::error::Result;
use crate::padic_series::coeff::{Coeff, CoeffField};
use crate::padic_series::ctx::PrecCtx;
use crate::padic_series::poly::Poly;
use crate::padic_series::series::SeriesElt;

/// E/E(0) as a polynomial with constant term 1.
pub fn e_normalized<F: CoeffField>(ctx: &PrecCtx<F>) -> Result<Poly<F>> {
    let inv = ctx.e0().inv()?;
    Ok(ctx.e_poly().scale(&inv))
}

/// λ = ∏_{m≥0} φ^m(E/E(0)) modulo u^{M_u}: only factors with q^m < M_u
/// differ from 1 in the window.
pub fn lambda_truncated<F: CoeffField>(ctx: &PrecCtx<F>) -> Result<SeriesElt<F>> {
    lambda_mod(ctx, ctx.m_u())
}

/// λ modulo u^n for n ≤ M_u.
pub fn lambda_mod<F: CoeffField>(ctx: &PrecCtx<F>, n: usize) -> Result<SeriesElt<F>> {
    let q = ctx.q() as usize;
    let base = e_normalized(ctx)?;
    let mut acc = Poly::one(ctx.field());
    let mut factor = base;
    let mut qm = 1usize;
    while qm < n {
        acc = acc.mul_trunc(&factor, n);
        factor = factor.frobenius_trunc(q, n);
        qm = qm.saturating_mul(q);
    }
    Ok(SeriesElt::from_truncated(ctx, acc.truncate(n)))
}

/// The finite product ∏_{m<n} φ^m(E/E(0)) as an exact polynomial.
pub fn lambda_partial<F: CoeffField>(ctx: &PrecCtx<F>, n: u32) -> Result<Poly<F>> {
    let q = ctx.q() as usize;
    let mut factor = e_normalized(ctx)?;
    let mut acc = Poly::one(ctx.field());
    for _ in 0..n {
        acc = acc.mul(&factor);
        factor = factor.frobenius(q);
    }
    Ok(acc)
}

/// E(0)-denominator accumulated by λ modulo u^n: one per factor used.
pub fn lambda_factor_count(q: u64, n: usize) -> u32 {
    let mut k = 0;
    let mut qm = 1u64;
    while (qm as usize) < n {
        k += 1;
        qm = qm.saturating_mul(q);
    }
    k
}
