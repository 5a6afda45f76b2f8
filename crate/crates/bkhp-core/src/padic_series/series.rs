use std::fmt;

use crate::error::{Error, Result};
use crate::padic_series::coeff::CoeffField;
use crate::padic_series::ctx::PrecCtx;
use crate::padic_series::jet::{Jet, JetRing};
use crate::padic_series::lognorm::LogNorm;
use crate::padic_series::poly::Poly;

/// Element E^{−d_e}·P of 𝔖[1/p][1/E] with P stored modulo u^{M_u}.
///
/// `truncated` is false when P is an exact polynomial of degree < M_u and
/// true once terms of degree ≥ M_u have been dropped.
#[derive(Clone)]
pub struct SeriesElt<F: CoeffField> {
    ctx: PrecCtx<F>,
    d_e: i64,
    p: Poly<F>,
    truncated: bool,
}

impl<F: CoeffField> fmt::Debug for SeriesElt<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d_e != 0 {
            write!(f, "E^{}·", -self.d_e)?;
        }
        write!(f, "[{:?}]", self.p)?;
        if self.truncated {
            write!(f, " + O(u^{})", self.ctx.m_u())?;
        }
        Ok(())
    }
}

impl<F: CoeffField> SeriesElt<F> {
    /// Exact polynomial; fails when its degree reaches M_u.
    pub fn from_poly(ctx: &PrecCtx<F>, p: Poly<F>) -> Result<Self> {
        if p.degree().is_some_and(|d| d >= ctx.m_u()) {
            return Err(Error::domain("padic_series", "polynomial degree exceeds the u-truncation"));
        }
        Ok(SeriesElt { ctx: ctx.clone(), d_e: 0, p: p.truncate(ctx.m_u()), truncated: false })
    }
    /// Power series known modulo u^{M_u}.
    pub fn from_truncated(ctx: &PrecCtx<F>, p: Poly<F>) -> Self {
        SeriesElt { ctx: ctx.clone(), d_e: 0, p: p.truncate(ctx.m_u()), truncated: true }
    }
    pub fn from_parts(ctx: &PrecCtx<F>, d_e: i64, p: Poly<F>, truncated: bool) -> Self {
        let over = p.degree().is_some_and(|d| d >= ctx.m_u());
        let mut s = SeriesElt { ctx: ctx.clone(), d_e, p: p.truncate(ctx.m_u()), truncated: truncated || over };
        s.canonicalize();
        s
    }
    pub fn zero(ctx: &PrecCtx<F>) -> Self {
        SeriesElt { ctx: ctx.clone(), d_e: 0, p: Poly::zero(ctx.field()), truncated: false }
    }
    pub fn one(ctx: &PrecCtx<F>) -> Self {
        Self::constant(ctx, ctx.field().one())
    }
    pub fn constant(ctx: &PrecCtx<F>, c: F::Elt) -> Self {
        SeriesElt { ctx: ctx.clone(), d_e: 0, p: Poly::constant(c), truncated: false }
    }
    pub fn from_i64(ctx: &PrecCtx<F>, n: i64) -> Self {
        Self::constant(ctx, ctx.field().from_i64(n))
    }
    pub fn u(ctx: &PrecCtx<F>) -> Self {
        SeriesElt { ctx: ctx.clone(), d_e: 0, p: Poly::u(ctx.field()), truncated: false }
    }
    /// E^k for any integer k.
    pub fn e_pow(ctx: &PrecCtx<F>, k: i64) -> Self {
        if k >= 0 {
            let p = ctx.e_poly().pow(k as u64);
            Self::from_parts(ctx, 0, p, false)
        } else {
            SeriesElt { ctx: ctx.clone(), d_e: -k, p: Poly::one(ctx.field()), truncated: false }
        }
    }

    pub fn ctx(&self) -> &PrecCtx<F> {
        &self.ctx
    }
    /// E-denominator exponent.
    pub fn d_e(&self) -> i64 {
        self.d_e
    }
    /// p-denominator exponent of the numerator: max(0, −min coefficient valuation).
    pub fn d_p(&self) -> i64 {
        self.p.valuation().map_or(0, |v| (-v).max(0))
    }
    pub fn poly(&self) -> &Poly<F> {
        &self.p
    }
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }
    pub fn coeff(&self, i: usize) -> F::Elt {
        self.p.coeff(i)
    }
    /// Guaranteed absolute coefficient precision.
    pub fn prec_abs(&self) -> i64 {
        self.p.abs_prec()
    }
    pub fn is_zero(&self) -> bool {
        self.p.is_zero()
    }

    /// Pull E-factors out of an exact numerator so d_e is minimal.
    fn canonicalize(&mut self) {
        if self.truncated {
            return;
        }
        if self.p.is_exact_zero() {
            self.d_e = 0;
            return;
        }
        let e = self.ctx.e_poly().clone();
        while self.d_e > 0 && !self.p.is_zero() {
            let (q, r) = self.p.divrem_monic(&e);
            if !r.is_zero() {
                break;
            }
            self.p = q;
            self.d_e -= 1;
        }
    }

    fn check_ctx(&self, o: &Self) -> Result<()> {
        if !self.ctx.same(&o.ctx) {
            return Err(Error::domain("padic_series", "context mismatch"));
        }
        Ok(())
    }

    /// Numerator over E^d for d ≥ d_e.
    fn numerator_at(&self, d: i64) -> (Poly<F>, bool) {
        let k = d - self.d_e;
        debug_assert!(k >= 0);
        let m = self.ctx.m_u();
        let ek = self.ctx.e_poly().pow(k as u64);
        let over = self.p.product_exceeds(&ek, m);
        (self.p.mul_trunc(&ek, m), over)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_ctx(o)?;
        let d = self.d_e.max(o.d_e);
        let (a, ta) = self.numerator_at(d);
        let (b, tb) = o.numerator_at(d);
        let truncated = self.truncated || o.truncated || ta || tb;
        Ok(Self::from_parts(&self.ctx, d, a.add(&b), truncated))
    }
    pub fn neg(&self) -> Self {
        SeriesElt { ctx: self.ctx.clone(), d_e: self.d_e, p: self.p.neg(), truncated: self.truncated }
    }
    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_ctx(o)?;
        let m = self.ctx.m_u();
        let over = self.p.product_exceeds(&o.p, m);
        let p = self.p.mul_trunc(&o.p, m);
        Ok(Self::from_parts(&self.ctx, self.d_e + o.d_e, p, self.truncated || o.truncated || over))
    }
    pub fn scale(&self, c: &F::Elt) -> Self {
        Self::from_parts(&self.ctx, self.d_e, self.p.scale(c), self.truncated)
    }
    /// Multiply by E^k.
    pub fn mul_e_pow(&self, k: i64) -> Self {
        if k <= self.d_e {
            let mut s = self.clone();
            s.d_e -= k;
            s.canonicalize();
            return s;
        }
        let extra = k - self.d_e;
        let m = self.ctx.m_u();
        let ek = self.ctx.e_poly().pow(extra as u64);
        let over = self.p.product_exceeds(&ek, m);
        Self::from_parts(&self.ctx, 0, self.p.mul_trunc(&ek, m), self.truncated || over)
    }
    /// Exact division by E (one more E-denominator).
    pub fn div_e(&self) -> Self {
        self.mul_e_pow(-1)
    }
    /// Expand the E-denominator as a u-adic power series (E(0) is invertible
    /// in K_0), producing an element with d_e = 0.
    pub fn expand_denominator(&self) -> Result<Self> {
        if self.d_e <= 0 {
            return Ok(self.mul_e_pow(0));
        }
        let m = self.ctx.m_u();
        let inv = self.ctx.e_poly().pow(self.d_e as u64).inv_series(m)?;
        Ok(Self::from_parts(&self.ctx, 0, self.p.mul_trunc(&inv, m), true))
    }

    /// u·d/du, with the product rule on the E-denominator.
    pub fn u_derive(&self) -> Self {
        if self.d_e == 0 {
            return Self::from_parts(&self.ctx, 0, self.p.u_derive(), self.truncated);
        }
        let m = self.ctx.m_u();
        let e = self.ctx.e_poly();
        let d = self.ctx.field().from_i64(self.d_e);
        let a = self.p.u_derive().mul_trunc(e, m);
        let b = e.u_derive().mul_trunc(&self.p, m).scale(&d);
        let over = self.p.degree().is_some_and(|x| x + e.len() > m);
        Self::from_parts(&self.ctx, self.d_e + 1, a.sub(&b), self.truncated || over)
    }

    /// φ: coefficient Frobenius and u ↦ u^q; E-denominators become series.
    pub fn frobenius(&self) -> Result<Self> {
        let m = self.ctx.m_u();
        let q = self.ctx.q() as usize;
        let over = self.p.degree().is_some_and(|d| d * q >= m);
        let fp = self.p.frobenius_trunc(q, m);
        if self.d_e == 0 {
            return Ok(Self::from_parts(&self.ctx, 0, fp, self.truncated || over));
        }
        let fe = self.ctx.e_poly().frobenius_trunc(q, m);
        if self.d_e < 0 {
            let k = fe.pow((-self.d_e) as u64);
            let over2 = fp.product_exceeds(&k, m);
            return Ok(Self::from_parts(&self.ctx, 0, fp.mul_trunc(&k, m), self.truncated || over || over2));
        }
        let inv = fe.pow(self.d_e as u64).inv_series(m)?;
        Ok(Self::from_parts(&self.ctx, 0, fp.mul_trunc(&inv, m), true))
    }
    pub fn frobenius_n(&self, n: u32) -> Result<Self> {
        let mut x = self.clone();
        for _ in 0..n {
            x = x.frobenius()?;
        }
        Ok(x)
    }

    /// Multiplicative inverse as a u-adic series (constant term must be
    /// invertible in K_0 after clearing E-denominators).
    pub fn inv(&self) -> Result<Self> {
        let m = self.ctx.m_u();
        let num_inv = self.p.inv_series(m)?;
        let x = Self::from_parts(&self.ctx, 0, num_inv, true);
        Ok(x.mul_e_pow(self.d_e))
    }

    /// Reduction into a jet ring Ŝ/F^h. Exact polynomials reduce exactly;
    /// for a truncated series the unknown tail u^{M_u}·(…) is accounted for by
    /// lowering coefficient precision to the valuation of u^{M_u} in the jet
    /// ring plus the smallest stored coefficient valuation.
    pub fn to_jet(&self, ring: &JetRing<F>) -> Result<Jet<F>> {
        let num = if self.truncated {
            let cap = ring.u_pow_valuation(self.ctx.m_u()) + self.p.valuation().unwrap_or(0);
            ring.from_poly(&self.p.with_abs_prec(cap))
        } else {
            ring.from_poly(&self.p)
        };
        if self.d_e == 0 {
            return Ok(num);
        }
        let e = ring.from_poly(self.ctx.e_poly());
        num.mul(&e.pow_i(-self.d_e)?)
    }

    /// Log-base-|p| Gauss norm on the stored window at radius |π_K|^{q^{−n}}.
    pub fn lognorm(&self, n: u32) -> LogNorm {
        let num = LogNorm::of_poly(&self.p, self.ctx.e(), self.ctx.q(), n);
        if self.d_e == 0 {
            return num;
        }
        let e = LogNorm::of_poly(self.ctx.e_poly(), self.ctx.e(), self.ctx.q(), n);
        num.div(&e.pow(self.d_e))
    }

    /// Equality of representatives to joint precision.
    pub fn eq_prec(&self, o: &Self) -> bool {
        match self.sub(o) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic_series::ctx::{ctx0, ctx1};
    use crate::padic_series::jet::JetRing;

    fn s(ctx: &crate::padic_series::ctx::MixedCtx, c: &[i64]) -> SeriesElt<crate::padic_series::padic::PadicField> {
        SeriesElt::from_poly(ctx, Poly::from_i64s(ctx.field(), c)).unwrap()
    }

    #[test]
    fn ring_examples() {
        let c = ctx0();
        let x = SeriesElt::u(&c).add(&SeriesElt::from_i64(&c, 3)).unwrap();
        assert!(x.eq_prec(&s(&c, &[3, 1])));
        let y = s(&c, &[-3, 1]).mul(&s(&c, &[3, 1])).unwrap();
        assert!(y.eq_prec(&s(&c, &[-9, 0, 1])));
        assert!(s(&c, &[1, 1, 1]).u_derive().eq_prec(&s(&c, &[0, 1, 2])));
    }

    #[test]
    fn frobenius_examples() {
        let c = ctx0();
        assert!(SeriesElt::u(&c).frobenius().unwrap().eq_prec(&s(&c, &[0, 0, 0, 1])));
        assert!(s(&c, &[-3, 1]).frobenius().unwrap().eq_prec(&s(&c, &[-3, 0, 0, 1])));
        let c1 = ctx1();
        assert!(s(&c1, &[-2, 0, 1]).frobenius().unwrap().eq_prec(&s(&c1, &[-2, 0, 0, 0, 1])));
    }

    #[test]
    fn e_denominators_cancel() {
        let c = ctx0();
        let e = SeriesElt::e_pow(&c, 1);
        let einv = SeriesElt::e_pow(&c, -1);
        let one = e.mul(&einv).unwrap();
        assert_eq!(one.d_e(), 0);
        assert!(one.eq_prec(&SeriesElt::one(&c)));
        assert!(!one.is_truncated());
    }

    #[test]
    fn jets_of_series() {
        let c = ctx0();
        let ring = JetRing::at_e(&c, 2);
        let j = SeriesElt::u(&c).to_jet(&ring).unwrap().inv().unwrap();
        // 1/u ≡ 1/3 − E/9 mod E²
        let expect = ring
            .from_poly(&Poly::constant(ratio(&c, 1, 3)))
            .sub(&ring.e().mul(&ring.from_poly(&Poly::constant(ratio(&c, 1, 9)))).unwrap())
            .unwrap();
        assert!(j.sub(&expect).unwrap().is_zero());
    }

    fn ratio(
        c: &crate::padic_series::ctx::MixedCtx,
        n: i64,
        d: i64,
    ) -> <crate::padic_series::padic::PadicField as CoeffField>::Elt {
        crate::padic_series::ctx::ratio(c.field(), n, d).unwrap()
    }
}
