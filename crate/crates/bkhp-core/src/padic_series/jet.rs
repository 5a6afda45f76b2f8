use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattices::linalg::Mat;
use crate::padic_series::coeff::{Coeff, CoeffField};
use crate::padic_series::ctx::PrecCtx;
use crate::padic_series::poly::Poly;

/// Jet order standing in for "exact" on zero jets.
pub const JET_EXACT: i64 = i64::MAX / 8;

struct RingInner<F: CoeffField> {
    ctx: PrecCtx<F>,
    frob: u32,
    modulus: Poly<F>,
    deg: usize,
    h: i64,
    /// u·dF/du.
    u_dmod: Poly<F>,
}

/// The jet ring Ŝ_n[1/F]/F^h for the monic irreducible modulus
/// F = φ^n(E) = E(u^{q^n}); n = 0 is the completion at E.
pub struct JetRing<F: CoeffField>(Arc<RingInner<F>>);

impl<F: CoeffField> Clone for JetRing<F> {
    fn clone(&self) -> Self {
        JetRing(self.0.clone())
    }
}

impl<F: CoeffField> fmt::Debug for JetRing<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JetRing(φ^{}(E), order {})", self.0.frob, self.0.h)
    }
}

impl<F: CoeffField> PartialEq for JetRing<F> {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || (self.0.frob == o.0.frob && self.0.h == o.0.h && self.0.ctx == o.0.ctx)
    }
}

type Digits<F> = Vec<Poly<F>>;

impl<F: CoeffField> JetRing<F> {
    pub fn at_e(ctx: &PrecCtx<F>, h: i64) -> Self {
        Self::at_frob_e(ctx, 0, h)
    }
    pub fn at_frob_e(ctx: &PrecCtx<F>, n: u32, h: i64) -> Self {
        let q = ctx.q() as usize;
        let mut modulus = ctx.e_poly().clone();
        for _ in 0..n {
            modulus = modulus.frobenius(q);
        }
        let deg = modulus.len() - 1;
        let u_dmod = modulus.u_derive();
        JetRing(Arc::new(RingInner { ctx: ctx.clone(), frob: n, modulus, deg, h, u_dmod }))
    }
    /// Same modulus, different order.
    pub fn with_order(&self, h: i64) -> Self {
        Self::at_frob_e(&self.0.ctx, self.0.frob, h)
    }
    /// The ring at φ(F).
    pub fn frobenius_ring(&self) -> Self {
        Self::at_frob_e(&self.0.ctx, self.0.frob + 1, self.0.h)
    }
    pub fn ctx(&self) -> &PrecCtx<F> {
        &self.0.ctx
    }
    pub fn field(&self) -> &F {
        self.0.ctx.field()
    }
    pub fn order(&self) -> i64 {
        self.0.h
    }
    pub fn frob_index(&self) -> u32 {
        self.0.frob
    }
    pub fn modulus(&self) -> &Poly<F> {
        &self.0.modulus
    }
    /// Degree of the modulus, the K_0-dimension of the residue field.
    pub fn deg(&self) -> usize {
        self.0.deg
    }

    /// Carry-normalizes Σ_k F^k·p_k into n digits of degree < deg F.
    fn normalize(&self, polys: &[Poly<F>], n: usize) -> Digits<F> {
        let mut out = Vec::with_capacity(n);
        let mut carry = Poly::zero(self.field());
        for k in 0..n {
            let p = match polys.get(k) {
                Some(p) => p.add(&carry),
                None => carry.clone(),
            };
            let (q, r) = p.divrem_monic(&self.0.modulus);
            out.push(r);
            carry = q;
        }
        out
    }
    /// First n digits of the product of two digit expansions.
    fn mul_digits(&self, a: &[Poly<F>], b: &[Poly<F>], n: usize) -> Digits<F> {
        let mut acc = vec![Poly::zero(self.field()); n];
        for (i, x) in a.iter().enumerate().take(n) {
            if x.is_exact_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(n - i) {
                acc[i + j] = acc[i + j].add(&x.mul(y));
            }
        }
        self.normalize(&acc, n)
    }

    pub fn zero(&self) -> Jet<F> {
        self.zero_prec(JET_EXACT)
    }
    pub fn zero_prec(&self, prec: i64) -> Jet<F> {
        Jet { ring: self.clone(), v: prec.min(JET_EXACT), dig: Vec::new() }
    }
    pub fn one(&self) -> Jet<F> {
        self.e_pow(0)
    }
    pub fn constant(&self, c: F::Elt) -> Jet<F> {
        self.from_poly(&Poly::constant(c))
    }
    pub fn from_i64(&self, n: i64) -> Jet<F> {
        self.constant(self.field().from_i64(n))
    }
    /// The uniformizer F itself.
    pub fn e(&self) -> Jet<F> {
        self.e_pow(1)
    }
    pub fn u(&self) -> Jet<F> {
        self.from_poly(&Poly::u(self.field()))
    }
    /// F^k.
    pub fn e_pow(&self, k: i64) -> Jet<F> {
        let mut dig = vec![Poly::zero(self.field()); self.0.h.max(0) as usize];
        if let Some(d) = dig.first_mut() {
            *d = Poly::one(self.field());
        }
        self.make(k, dig, self.0.h)
    }
    /// Jet of a polynomial, with relative order h.
    pub fn from_poly(&self, p: &Poly<F>) -> Jet<F> {
        if p.is_exact_zero() {
            return self.zero();
        }
        let h = self.0.h.max(0) as usize;
        let mut r = p.clone();
        let mut v = 0;
        let mut dig = Vec::with_capacity(h);
        while dig.len() < h {
            if dig.is_empty() && r.is_zero() {
                return self.zero_prec(v + self.0.h);
            }
            let (q, d) = r.divrem_monic(&self.0.modulus);
            if dig.is_empty() && d.is_zero() {
                v += 1;
            } else {
                dig.push(d);
            }
            r = q;
        }
        Jet { ring: self.clone(), v, dig }
    }
    /// Jet of Σ frob^m(c_j)·u^{q^m·j}, the m-th Frobenius of a polynomial,
    /// evaluated through jet powers of u.
    pub fn from_poly_frob(&self, p: &Poly<F>, m: u32) -> Result<Jet<F>> {
        let q = self.ctx().q();
        let mut um = self.u();
        for _ in 0..m {
            um = um.pow(q)?;
        }
        let mut acc = self.zero();
        let mut pw = self.one();
        for (j, c) in p.coeffs().iter().enumerate() {
            if j > 0 {
                pw = pw.mul(&um)?;
            }
            if c.is_exact_zero() {
                continue;
            }
            let mut fc = c.clone();
            for _ in 0..m {
                fc = fc.frobenius();
            }
            acc = acc.add(&pw.scale(&fc))?;
        }
        Ok(acc)
    }
    /// Jet from F-adic digits: Σ_k F^{lo+k}·digits[k], known modulo F^prec.
    pub fn from_digits(&self, lo: i64, digits: &[Poly<F>], prec: i64) -> Jet<F> {
        let n = (prec - lo).max(0) as usize;
        self.make(lo, self.normalize(digits, n), prec - lo)
    }
    /// Minimal coefficient valuation among the F-adic digits of u^m.
    pub fn u_pow_valuation(&self, m: usize) -> i64 {
        match self.u().pow(m as u64) {
            Ok(j) => j.dig.iter().filter_map(|d| d.valuation()).min().unwrap_or(0),
            Err(_) => 0,
        }
    }

    /// Canonical jet F^v·Σ_k F^k·dig[k] known modulo F^{v+rel}; `dig` must be
    /// normalized.
    fn make(&self, mut v: i64, mut dig: Digits<F>, rel: i64) -> Jet<F> {
        let rel = rel.min(self.0.h).max(0) as usize;
        dig.truncate(rel);
        let lead = dig.iter().position(|d| !d.is_zero());
        match lead {
            None => self.zero_prec(v + rel as i64),
            Some(k) => {
                v += k as i64;
                dig.drain(..k);
                Jet { ring: self.clone(), v, dig }
            }
        }
    }

    /// Inverse of a unit of K = K_0[u]/F via the multiplication matrix.
    fn inv_mod_f(&self, a: &Poly<F>) -> Result<Poly<F>> {
        let d = self.0.deg;
        let f = self.field();
        let a = a.rem_monic(&self.0.modulus);
        let mut cols = Vec::with_capacity(d);
        let mut cur = a.clone();
        for _ in 0..d {
            let v: Vec<F::Elt> = (0..d).map(|i| cur.coeff(i)).collect();
            cols.push(v);
            cur = cur.shift(1).rem_monic(&self.0.modulus);
        }
        let m = Mat::from_cols(f, d, &cols);
        let mut rhs = vec![f.zero(); d];
        rhs[0] = f.one();
        let x = m
            .solve(&rhs)
            .ok_or_else(|| Error::precision("padic_series", "jet is not a unit modulo E at precision"))?;
        Ok(Poly::from_coeffs(f.clone(), x))
    }
}

/// Element F^v·Σ_k F^k·dig[k] of Ŝ[1/F] with F-adic digits of degree
/// < deg F and dig[0] ≠ 0, known modulo F^{v+rel} where rel = dig.len().
/// A zero jet has no digits and is known modulo F^v.
#[derive(Clone)]
pub struct Jet<F: CoeffField> {
    ring: JetRing<F>,
    v: i64,
    dig: Digits<F>,
}

impl<F: CoeffField> fmt::Debug for Jet<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dig.is_empty() {
            return write!(f, "0 + O(E^{})", self.v);
        }
        write!(f, "E^{}·{:?} + O(E^{})", self.v, self.dig, self.prec())
    }
}

impl<F: CoeffField> Jet<F> {
    pub fn ring(&self) -> &JetRing<F> {
        &self.ring
    }
    pub fn is_zero(&self) -> bool {
        self.dig.is_empty()
    }
    pub fn is_exact_zero(&self) -> bool {
        self.dig.is_empty() && self.v >= JET_EXACT
    }
    /// F-adic valuation, None for zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.dig.is_empty()).then_some(self.v)
    }
    /// Absolute jet order: the value is known modulo F^prec.
    pub fn prec(&self) -> i64 {
        self.v + self.rel()
    }
    /// Leading F-adic digit, the residue of the unit part (zero for zero).
    pub fn leading_digit(&self) -> Poly<F> {
        self.dig.first().cloned().unwrap_or_else(|| Poly::zero(self.ring.field()))
    }
    pub fn rel(&self) -> i64 {
        self.dig.len() as i64
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.ring != o.ring {
            return Err(Error::domain("padic_series", "jets live in different rings"));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        if self.is_exact_zero() {
            return Ok(o.clone());
        }
        if o.is_exact_zero() {
            return Ok(self.clone());
        }
        let prec = self.prec().min(o.prec());
        let v = match (self.valuation(), o.valuation()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => return Ok(self.ring.zero_prec(prec)),
        };
        if v >= prec {
            return Ok(self.ring.zero_prec(prec));
        }
        let n = (prec - v) as usize;
        let mut acc = vec![Poly::zero(self.ring.field()); n];
        for x in [self, o] {
            let off = (x.v - v) as usize;
            for (k, d) in x.dig.iter().enumerate() {
                if off + k < n {
                    acc[off + k] = acc[off + k].add(d);
                }
            }
        }
        Ok(self.ring.make(v, acc, n as i64))
    }
    pub fn neg(&self) -> Self {
        Jet { ring: self.ring.clone(), v: self.v, dig: self.dig.iter().map(|d| d.neg()).collect() }
    }
    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        if self.is_exact_zero() || o.is_exact_zero() {
            return Ok(self.ring.zero());
        }
        match (self.valuation(), o.valuation()) {
            (None, None) => Ok(self.ring.zero_prec(self.v.saturating_add(o.v).min(JET_EXACT))),
            (None, Some(b)) => Ok(self.ring.zero_prec(self.v + b)),
            (Some(a), None) => Ok(self.ring.zero_prec(o.v + a)),
            (Some(a), Some(b)) => {
                let rel = self.rel().min(o.rel());
                let dig = self.ring.mul_digits(&self.dig, &o.dig, rel as usize);
                Ok(self.ring.make(a + b, dig, rel))
            }
        }
    }
    pub fn scale(&self, c: &F::Elt) -> Self {
        if self.dig.is_empty() {
            return self.clone();
        }
        let dig = self.dig.iter().map(|d| d.scale(c)).collect();
        self.ring.make(self.v, dig, self.rel())
    }
    /// Multiply by F^k.
    pub fn mul_e_pow(&self, k: i64) -> Self {
        if self.is_exact_zero() {
            return self.clone();
        }
        Jet { ring: self.ring.clone(), v: self.v + k, dig: self.dig.clone() }
    }
    pub fn inv(&self) -> Result<Self> {
        if self.dig.is_empty() {
            return Err(Error::precision("padic_series", "inversion of a jet that is zero to precision"));
        }
        let rel = self.dig.len();
        let mut b = vec![self.ring.inv_mod_f(&self.dig[0])?];
        let two = Poly::constant(self.ring.field().from_i64(2));
        let mut k = 1;
        while k < rel {
            k = (2 * k).min(rel);
            let mut t: Digits<F> = self.ring.mul_digits(&self.dig, &b, k).iter().map(|d| d.neg()).collect();
            t[0] = t[0].add(&two);
            b = self.ring.mul_digits(&b, &t, k);
        }
        Ok(self.ring.make(-self.v, b, rel as i64))
    }
    pub fn div(&self, o: &Self) -> Result<Self> {
        self.mul(&o.inv()?)
    }
    pub fn pow(&self, k: u64) -> Result<Self> {
        let mut acc = self.ring.one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }
    pub fn pow_i(&self, k: i64) -> Result<Self> {
        if k >= 0 {
            self.pow(k as u64)
        } else {
            self.inv()?.pow((-k) as u64)
        }
    }
    /// Lower the absolute jet order to at most `prec`.
    pub fn truncate(&self, prec: i64) -> Self {
        if prec >= self.prec() {
            return self.clone();
        }
        if self.dig.is_empty() {
            return self.ring.zero_prec(prec);
        }
        self.ring.make(self.v, self.dig.clone(), prec - self.v)
    }
    /// Reduce every digit modulo p^abs (π^abs in equal characteristic);
    /// digits that vanish there are dropped.
    pub fn with_abs_prec(&self, abs: i64) -> Self {
        if self.dig.is_empty() {
            return self.clone();
        }
        let dig: Digits<F> = self.dig.iter().map(|d| d.with_abs_prec(abs)).collect();
        let rel = dig.len() as i64;
        self.ring.make(self.v, dig, rel)
    }
    /// u·d/du; costs one order of F.
    pub fn u_derive(&self) -> Result<Self> {
        if self.dig.is_empty() {
            return Ok(self.ring.zero_prec(self.v.saturating_sub(1)));
        }
        // u·d/du(F^{v+k}·d_k) = (v+k)·F^{v+k−1}·(u·F′)·d_k + F^{v+k}·u·d_k′
        let rel = self.dig.len();
        let f = self.ring.field();
        let mut acc = vec![Poly::zero(f); rel];
        for (k, d) in self.dig.iter().enumerate() {
            let c = f.from_i64(self.v + k as i64);
            acc[k] = acc[k].add(&self.ring.0.u_dmod.mul(d).scale(&c));
            if k + 1 < rel {
                acc[k + 1] = acc[k + 1].add(&d.u_derive());
            }
        }
        let dig = self.ring.normalize(&acc, rel);
        Ok(self.ring.make(self.v - 1, dig, rel as i64))
    }
    /// Image under φ in the ring at φ(F).
    pub fn frob_into(&self, target: &JetRing<F>) -> Result<Self> {
        if target.frob_index() != self.ring.frob_index() + 1 || target.ctx() != self.ring.ctx() {
            return Err(Error::domain("padic_series", "Frobenius target ring mismatch"));
        }
        if self.dig.is_empty() {
            return Ok(target.zero_prec(self.v));
        }
        let q = self.ring.ctx().q() as usize;
        let dig: Digits<F> = self.dig.iter().map(|d| d.frobenius(q)).collect();
        let n = dig.len();
        Ok(target.make(self.v, target.normalize(&dig, n), n as i64))
    }
    /// F-adic digits of the value for levels lo..hi (each of degree < deg F);
    /// levels at or above prec are reported as zero.
    pub fn digits(&self, lo: i64, hi: i64) -> Result<Vec<Poly<F>>> {
        let f = self.ring.field();
        if self.dig.is_empty() {
            return Ok(vec![Poly::zero(f); (hi - lo).max(0) as usize]);
        }
        if self.v < lo {
            return Err(Error::domain("padic_series", "jet has a pole below the window"));
        }
        Ok((lo..hi)
            .map(|k| {
                if k < self.v || k >= self.prec() {
                    Poly::zero(f)
                } else {
                    self.dig[(k - self.v) as usize].clone()
                }
            })
            .collect())
    }
    /// Residue modulo F of an integral jet (an element of K).
    pub fn residue(&self) -> Result<Poly<F>> {
        Ok(self.digits(0, 1)?.pop().expect("one digit"))
    }
    pub fn eq_prec(&self, o: &Self) -> bool {
        self.sub(o).is_ok_and(|d| d.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic_series::ctx::{ctx0, ctx1, ratio};

    #[test]
    fn e_is_canonical() {
        let c = ctx0();
        let r = JetRing::at_e(&c, 6);
        let e = r.from_poly(c.e_poly());
        assert_eq!(e.valuation(), Some(1));
        let einv = e.inv().unwrap();
        assert_eq!(einv.valuation(), Some(-1));
        assert!(e.mul(&einv).unwrap().eq_prec(&r.one()));
    }

    #[test]
    fn inverse_of_u() {
        let c = ctx0();
        let r = JetRing::at_e(&c, 2);
        let inv = r.u().inv().unwrap();
        let third = r.constant(ratio(c.field(), 1, 3).unwrap());
        let ninth = r.constant(ratio(c.field(), 1, 9).unwrap());
        let want = third.sub(&r.e().mul(&ninth).unwrap()).unwrap();
        assert!(inv.eq_prec(&want));
        assert_eq!(inv.prec(), 2);
    }

    #[test]
    fn ramified_inverse() {
        let c = ctx1();
        let r = JetRing::at_e(&c, 4);
        let x = r.from_poly(&Poly::from_i64s(c.field(), &[1, 1, 1]));
        let y = x.inv().unwrap();
        assert!(x.mul(&y).unwrap().eq_prec(&r.one()));
    }

    #[test]
    fn derivation_and_frobenius() {
        let c = ctx0();
        let r = JetRing::at_e(&c, 4);
        // u d/du(E) = u
        assert!(r.e().u_derive().unwrap().eq_prec(&r.u().truncate(3)));
        let r1 = r.frobenius_ring();
        let fe = r.e().frob_into(&r1).unwrap();
        assert!(fe.eq_prec(&r1.e()));
        let fu = r.u().frob_into(&r1).unwrap();
        assert!(fu.eq_prec(&r1.u().pow(3).unwrap()));
    }

    #[test]
    fn digits_roundtrip() {
        let c = ctx0();
        let r = JetRing::at_e(&c, 4);
        let x = r.from_poly(&Poly::from_i64s(c.field(), &[5, 1, 2, 7]));
        let d = x.digits(0, 4).unwrap();
        let y = r.from_digits(0, &d, 4);
        assert!(x.eq_prec(&y));
    }
}
