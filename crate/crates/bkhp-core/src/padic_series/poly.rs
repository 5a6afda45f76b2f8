use std::fmt;

use crate::error::{Error, Result};
use crate::padic_series::coeff::{Coeff, CoeffField, EXACT};

/// Dense polynomial in u over K_0, lowest degree first. Only exact zeros are
/// trimmed from the top, so coefficients that are zero to some precision keep
/// their precision certificate.
#[derive(Clone)]
pub struct Poly<F: CoeffField> {
    f: F,
    c: Vec<F::Elt>,
}

impl<F: CoeffField> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_exact_zero())
            .map(|(i, c)| format!("({})u^{}", c.repr(), i))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl<F: CoeffField> Poly<F> {
    pub fn zero(f: &F) -> Self {
        Poly { f: f.clone(), c: Vec::new() }
    }
    pub fn one(f: &F) -> Self {
        Self::constant(f.one())
    }
    pub fn constant(c: F::Elt) -> Self {
        let f = c.field().clone();
        Self::from_coeffs(f, vec![c])
    }
    pub fn monomial(c: F::Elt, k: usize) -> Self {
        let f = c.field().clone();
        let mut v = vec![f.zero(); k];
        v.push(c);
        Self::from_coeffs(f, v)
    }
    /// The polynomial u.
    pub fn u(f: &F) -> Self {
        Self::monomial(f.one(), 1)
    }
    pub fn from_coeffs(f: F, c: Vec<F::Elt>) -> Self {
        let mut p = Poly { f, c };
        p.trim_exact();
        p
    }
    pub fn from_i64s(f: &F, c: &[i64]) -> Self {
        Self::from_coeffs(f.clone(), c.iter().map(|x| f.from_i64(*x)).collect())
    }

    fn trim_exact(&mut self) {
        while self.c.last().is_some_and(|x| x.is_exact_zero()) {
            self.c.pop();
        }
    }

    pub fn field(&self) -> &F {
        &self.f
    }
    pub fn coeffs(&self) -> &[F::Elt] {
        &self.c
    }
    pub fn into_coeffs(self) -> Vec<F::Elt> {
        self.c
    }
    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.c.len()
    }
    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }
    pub fn coeff(&self, i: usize) -> F::Elt {
        self.c.get(i).cloned().unwrap_or_else(|| self.f.zero())
    }
    /// Degree ignoring coefficients that are zero to precision.
    pub fn degree(&self) -> Option<usize> {
        self.c.iter().rposition(|x| !x.is_zero())
    }
    /// Zero to the tracked coefficient precision.
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
    pub fn is_exact_zero(&self) -> bool {
        self.c.is_empty()
    }
    /// Minimum coefficient valuation, None if zero to precision.
    pub fn valuation(&self) -> Option<i64> {
        self.c.iter().filter_map(|x| x.valuation()).min()
    }
    /// Minimum absolute precision over stored coefficients.
    pub fn abs_prec(&self) -> i64 {
        self.c.iter().map(|x| x.abs_prec()).min().unwrap_or(EXACT)
    }
    /// u-adic valuation: index of the first coefficient nonzero to precision.
    pub fn u_valuation(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| match (self.c.get(i), o.c.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Self::from_coeffs(self.f.clone(), c)
    }
    pub fn neg(&self) -> Self {
        Poly { f: self.f.clone(), c: self.c.iter().map(|x| x.neg()).collect() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn scale(&self, k: &F::Elt) -> Self {
        Self::from_coeffs(self.f.clone(), self.c.iter().map(|x| x.mul(k)).collect())
    }
    /// Multiply by uniformizer^k.
    pub fn mul_pow(&self, k: i64) -> Self {
        Poly { f: self.f.clone(), c: self.c.iter().map(|x| x.mul_pow(k)).collect() }
    }
    pub fn mul(&self, o: &Self) -> Self {
        self.mul_trunc(o, usize::MAX)
    }
    /// Product modulo u^n.
    pub fn mul_trunc(&self, o: &Self, n: usize) -> Self {
        if self.c.is_empty() || o.c.is_empty() {
            return Self::zero(&self.f);
        }
        let len = (self.c.len() + o.c.len() - 1).min(n);
        let mut out: Vec<Option<F::Elt>> = vec![None; len];
        for (i, a) in self.c.iter().enumerate() {
            if i >= len || a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if b.is_exact_zero() {
                    continue;
                }
                let t = a.mul(b);
                out[i + j] = Some(match out[i + j].take() {
                    Some(s) => s.add(&t),
                    None => t,
                });
            }
        }
        let c = out.into_iter().map(|x| x.unwrap_or_else(|| self.f.zero())).collect();
        Self::from_coeffs(self.f.clone(), c)
    }
    /// Whether the full product would have terms of degree ≥ n.
    pub fn product_exceeds(&self, o: &Self, n: usize) -> bool {
        match (self.degree(), o.degree()) {
            (Some(a), Some(b)) => a + b >= n,
            _ => false,
        }
    }
    /// Multiply by u^k.
    pub fn shift(&self, k: usize) -> Self {
        if self.c.is_empty() {
            return self.clone();
        }
        let mut c = vec![self.f.zero(); k];
        c.extend(self.c.iter().cloned());
        Poly { f: self.f.clone(), c }
    }
    /// Drop terms of degree ≥ n.
    pub fn truncate(&self, n: usize) -> Self {
        let c = self.c.iter().take(n).cloned().collect();
        Self::from_coeffs(self.f.clone(), c)
    }
    /// Drop terms of degree < k and divide by u^k.
    pub fn unshift(&self, k: usize) -> Self {
        let c = self.c.iter().skip(k).cloned().collect();
        Self::from_coeffs(self.f.clone(), c)
    }
    pub fn pow(&self, k: u64) -> Self {
        let mut acc = Self::one(&self.f);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
    pub fn eval(&self, x: &F::Elt) -> F::Elt {
        self.c.iter().rev().fold(self.f.zero(), |acc, c| acc.mul(x).add(c))
    }
    /// u·d/du: Σ c_j u^j ↦ Σ j·c_j u^j.
    pub fn u_derive(&self) -> Self {
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(j, x)| x.mul(&self.f.from_i64(j as i64)))
            .collect();
        Self::from_coeffs(self.f.clone(), c)
    }
    /// Coefficient Frobenius and u ↦ u^q, keeping degrees < n.
    pub fn frobenius_trunc(&self, q: usize, n: usize) -> Self {
        if self.c.is_empty() {
            return self.clone();
        }
        let len = ((self.c.len() - 1) * q + 1).min(n);
        let mut c = vec![self.f.zero(); len];
        for (j, x) in self.c.iter().enumerate() {
            if j * q < len {
                c[j * q] = x.frobenius();
            }
        }
        Self::from_coeffs(self.f.clone(), c)
    }
    pub fn frobenius(&self, q: usize) -> Self {
        self.frobenius_trunc(q, usize::MAX)
    }
    /// Division by a monic polynomial: (quotient, remainder).
    pub fn divrem_monic(&self, m: &Self) -> (Self, Self) {
        let dm = m.c.len() - 1;
        debug_assert!(m.c[dm].is_one());
        if self.c.len() <= dm {
            return (Self::zero(&self.f), self.clone());
        }
        let mut r = self.c.clone();
        let mut q = vec![self.f.zero(); r.len() - dm];
        for shift in (0..q.len()).rev() {
            let c = r[shift + dm].clone();
            if c.is_exact_zero() {
                continue;
            }
            for (j, mj) in m.c.iter().enumerate().take(dm) {
                if !mj.is_exact_zero() {
                    r[shift + j] = r[shift + j].sub(&c.mul(mj));
                }
            }
            r[shift + dm] = self.f.zero();
            q[shift] = c;
        }
        r.truncate(dm);
        (Self::from_coeffs(self.f.clone(), q), Self::from_coeffs(self.f.clone(), r))
    }
    pub fn rem_monic(&self, m: &Self) -> Self {
        self.divrem_monic(m).1
    }
    /// Exact division by a monic polynomial, failing on a nonzero remainder.
    pub fn div_exact_monic(&self, m: &Self) -> Result<Self> {
        let (q, r) = self.divrem_monic(m);
        if !r.is_zero() {
            return Err(Error::domain("padic_series", "polynomial is not divisible"));
        }
        Ok(q)
    }
    /// Power series inverse modulo u^n; the constant term must be invertible.
    pub fn inv_series(&self, n: usize) -> Result<Self> {
        let a0 = self.coeff(0);
        let a0i = a0.inv()?;
        let mut out = vec![a0i.clone()];
        for m in 1..n {
            let mut s = self.f.zero();
            for j in 1..=m.min(self.c.len().saturating_sub(1)) {
                s = s.add(&self.c[j].mul(&out[m - j]));
            }
            out.push(s.mul(&a0i).neg());
        }
        Ok(Self::from_coeffs(self.f.clone(), out))
    }
    /// Lower every coefficient's absolute precision to at most `abs`.
    pub fn with_abs_prec(&self, abs: i64) -> Self {
        Self::from_coeffs(self.f.clone(), self.c.iter().map(|x| x.with_abs_prec(abs)).collect())
    }
    /// Equality to joint precision.
    pub fn eq_prec(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic_series::padic::PadicField;

    #[test]
    fn ring_ops() {
        let f = PadicField::new(3, 12).unwrap();
        let a = Poly::from_i64s(&f, &[-3, 1]);
        let b = Poly::from_i64s(&f, &[3, 1]);
        assert!(a.mul(&b).eq_prec(&Poly::from_i64s(&f, &[-9, 0, 1])));
        let (q, r) = Poly::from_i64s(&f, &[-9, 0, 1]).divrem_monic(&a);
        assert!(q.eq_prec(&b) && r.is_zero());
        let d = Poly::from_i64s(&f, &[1, 1, 1]).u_derive();
        assert!(d.eq_prec(&Poly::from_i64s(&f, &[0, 1, 2])));
        let e = Poly::from_i64s(&f, &[-2, 0, 1]).frobenius(2);
        assert!(e.eq_prec(&Poly::from_i64s(&f, &[-2, 0, 0, 0, 1])));
    }

    #[test]
    fn series_inverse() {
        let f = PadicField::new(3, 12).unwrap();
        let a = Poly::from_i64s(&f, &[1, -1]);
        let inv = a.inv_series(6).unwrap();
        assert!(inv.eq_prec(&Poly::from_i64s(&f, &[1, 1, 1, 1, 1, 1])));
    }
}
