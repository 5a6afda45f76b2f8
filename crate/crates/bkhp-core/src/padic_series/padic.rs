use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::padic_series::coeff::{Coeff, CoeffField, CoeffRepr, EXACT};
use crate::padic_series::gf::{is_prime_u64, Gf};

#[derive(Debug)]
struct PadicInner {
    p: u64,
    cap: i64,
    p_big: BigInt,
    pows: Vec<BigInt>,
    residue: Gf,
}

/// Q_p with relative precision capped at `cap` digits.
#[derive(Clone, Debug)]
pub struct PadicField(Arc<PadicInner>);

impl PartialEq for PadicField {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || (self.0.p == o.0.p && self.0.cap == o.0.cap)
    }
}

impl PadicField {
    pub fn new(p: u64, cap: i64) -> Result<PadicField> {
        if !is_prime_u64(p) {
            return Err(Error::domain("padic_series", format!("{} is not prime", p)));
        }
        if cap < 1 {
            return Err(Error::domain("padic_series", "precision cap must be positive"));
        }
        let p_big = BigInt::from(p);
        let mut pows = Vec::with_capacity(cap as usize + 2);
        let mut acc = BigInt::one();
        for _ in 0..=cap + 1 {
            pows.push(acc.clone());
            acc *= &p_big;
        }
        let residue = Gf::new(p)?;
        Ok(PadicField(Arc::new(PadicInner { p, cap, p_big, pows, residue })))
    }

    fn pow(&self, k: i64) -> BigInt {
        debug_assert!(k >= 0);
        match self.0.pows.get(k as usize) {
            Some(v) => v.clone(),
            None => num_traits::pow(self.0.p_big.clone(), k as usize),
        }
    }

    /// Normal form of raw·p^val known modulo p^abs.
    fn make(&self, mut val: i64, mut raw: BigInt, abs: i64) -> Padic {
        if raw.is_zero() {
            return self.zero_prec(abs);
        }
        let p = &self.0.p_big;
        loop {
            let (q, r) = raw.div_rem(p);
            if !r.is_zero() {
                break;
            }
            raw = q;
            val += 1;
        }
        if val >= abs {
            return self.zero_prec(abs);
        }
        let rel = if abs >= EXACT { self.0.cap } else { (abs - val).min(self.0.cap) };
        let m = self.pow(rel);
        let unit = raw.mod_floor(&m);
        Padic { f: self.clone(), val, unit, rel }
    }

    pub fn from_bigint(&self, n: &BigInt) -> Padic {
        self.make(0, n.clone(), EXACT)
    }
}

/// Capped-relative p-adic number: unit·p^val with unit known modulo p^rel.
/// A value with rel = 0 is zero known modulo p^val (exact when val = EXACT).
#[derive(Clone)]
pub struct Padic {
    f: PadicField,
    val: i64,
    unit: BigInt,
    rel: i64,
}

impl fmt::Debug for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.repr())
    }
}

impl Padic {
    fn is_zero_raw(&self) -> bool {
        self.rel == 0
    }
    /// Balanced integer representative of the unit part.
    fn balanced_unit(&self) -> BigInt {
        let m = self.f.pow(self.rel);
        let half = &m >> 1;
        if self.unit > half {
            &self.unit - &m
        } else {
            self.unit.clone()
        }
    }
    pub fn unit_part(&self) -> &BigInt {
        &self.unit
    }
}

impl CoeffField for PadicField {
    type Elt = Padic;

    fn zero(&self) -> Padic {
        self.zero_prec(EXACT)
    }
    fn zero_prec(&self, abs: i64) -> Padic {
        Padic { f: self.clone(), val: abs.min(EXACT), unit: BigInt::zero(), rel: 0 }
    }
    fn from_i64(&self, n: i64) -> Padic {
        self.make(0, BigInt::from(n), EXACT)
    }
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<Padic> {
        if den.is_zero() {
            return Err(Error::domain("padic_series", "zero denominator"));
        }
        let n = self.make(0, num.clone(), EXACT);
        let d = self.make(0, den.clone(), EXACT);
        n.div(&d)
    }
    fn uniformizer(&self) -> Padic {
        self.make(1, BigInt::one(), EXACT)
    }
    fn char_p(&self) -> u64 {
        self.0.p
    }
    fn q(&self) -> u64 {
        self.0.p
    }
    fn cap(&self) -> i64 {
        self.0.cap
    }
    fn residue_field(&self) -> &Gf {
        &self.0.residue
    }
    fn residue_lift(&self, idx: u32) -> Padic {
        self.from_i64(idx as i64)
    }
    fn is_equal_char(&self) -> bool {
        false
    }
}

impl Coeff for Padic {
    type Field = PadicField;

    fn field(&self) -> &PadicField {
        &self.f
    }

    fn add(&self, o: &Padic) -> Padic {
        if self.is_exact_zero() {
            return o.clone();
        }
        if o.is_exact_zero() {
            return self.clone();
        }
        let abs = self.abs_prec().min(o.abs_prec());
        match (self.is_zero_raw(), o.is_zero_raw()) {
            (true, true) => return self.f.zero_prec(abs),
            (true, false) => return self.f.make(o.val, o.unit.clone(), abs),
            (false, true) => return self.f.make(self.val, self.unit.clone(), abs),
            _ => {}
        }
        let v = self.val.min(o.val);
        let mut raw = BigInt::zero();
        for x in [self, o] {
            let sh = x.val - v;
            if sh < abs - v {
                raw += &x.unit * self.f.pow(sh);
            }
        }
        self.f.make(v, raw, abs)
    }

    fn sub(&self, o: &Padic) -> Padic {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Padic) -> Padic {
        if self.is_exact_zero() || o.is_exact_zero() {
            return self.f.zero();
        }
        if self.is_zero_raw() || o.is_zero_raw() {
            return self.f.zero_prec(self.val + o.val);
        }
        let rel = self.rel.min(o.rel);
        let m = self.f.pow(rel);
        let unit = (&self.unit * &o.unit).mod_floor(&m);
        Padic { f: self.f.clone(), val: self.val + o.val, unit, rel }
    }

    fn neg(&self) -> Padic {
        if self.is_zero_raw() {
            return self.clone();
        }
        let m = self.f.pow(self.rel);
        let unit = (&m - &self.unit).mod_floor(&m);
        Padic { f: self.f.clone(), val: self.val, unit, rel: self.rel }
    }

    fn inv(&self) -> Result<Padic> {
        if self.is_zero_raw() {
            return Err(Error::precision("padic_series", "inversion of a value that is zero to precision"));
        }
        let m = self.f.pow(self.rel);
        let g = self.unit.extended_gcd(&m);
        let unit = g.x.mod_floor(&m);
        Ok(Padic { f: self.f.clone(), val: -self.val, unit, rel: self.rel })
    }

    fn valuation(&self) -> Option<i64> {
        (!self.is_zero_raw()).then_some(self.val)
    }

    fn abs_prec(&self) -> i64 {
        if self.is_zero_raw() {
            self.val
        } else {
            self.val + self.rel
        }
    }

    fn mul_pow(&self, k: i64) -> Padic {
        if self.is_exact_zero() {
            return self.clone();
        }
        Padic { f: self.f.clone(), val: self.val + k, unit: self.unit.clone(), rel: self.rel }
    }

    fn frobenius(&self) -> Padic {
        self.clone()
    }

    fn with_abs_prec(&self, abs: i64) -> Padic {
        if abs >= self.abs_prec() {
            return self.clone();
        }
        if self.is_zero_raw() {
            return self.f.zero_prec(abs);
        }
        self.f.make(self.val, self.unit.clone(), abs)
    }

    fn residue(&self) -> Option<u32> {
        if self.is_zero_raw() {
            return (self.val >= 1).then_some(0);
        }
        match self.val {
            v if v > 0 => Some(0),
            0 => {
                let p = BigInt::from(self.f.0.p);
                let r = self.unit.mod_floor(&p);
                Some(r.to_string().parse().unwrap_or(0))
            }
            _ => None,
        }
    }

    fn repr(&self) -> CoeffRepr {
        let abs = self.abs_prec();
        let abs_prec = (abs < EXACT).then_some(abs);
        if self.is_zero_raw() {
            return CoeffRepr::Rational { value: BigRational::zero(), abs_prec };
        }
        let u = self.balanced_unit();
        let value = if self.val >= 0 {
            BigRational::from_integer(u * self.f.pow(self.val))
        } else {
            BigRational::new(u, self.f.pow(-self.val))
        };
        CoeffRepr::Rational { value, abs_prec }
    }
}

impl Padic {
    /// Exact rational value of the stored representative.
    pub fn to_rational(&self) -> BigRational {
        match self.repr() {
            CoeffRepr::Rational { value, .. } => value,
            _ => unreachable!(),
        }
    }
    pub fn is_negative_repr(&self) -> bool {
        self.to_rational().is_negative()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q3() -> PadicField {
        PadicField::new(3, 10).unwrap()
    }

    #[test]
    fn basic_arithmetic() {
        let f = q3();
        let a = f.from_i64(5);
        let b = f.from_i64(-2);
        assert!(a.add(&b).eq_prec(&f.from_i64(3)));
        assert!(a.mul(&b).eq_prec(&f.from_i64(-10)));
        assert_eq!(f.from_i64(18).valuation(), Some(2));
        let third = f.from_ratio(&BigInt::from(1), &BigInt::from(3)).unwrap();
        assert_eq!(third.valuation(), Some(-1));
        assert!(third.mul(&f.from_i64(3)).is_one());
    }

    #[test]
    fn precision_is_tracked() {
        let f = q3();
        let a = f.from_i64(1).with_abs_prec(4);
        let b = f.from_i64(1 + 81);
        // equal modulo 3^4
        assert!(a.sub(&b).is_zero());
        assert_eq!(a.sub(&b).abs_prec(), 4);
        // cancellation leaves abs precision, not more
        let c = f.from_i64(1).sub(&f.from_i64(1));
        assert!(c.is_zero());
        assert_eq!(c.abs_prec(), 10);
    }

    #[test]
    fn inverse_and_repr() {
        let f = q3();
        let x = f.from_i64(-7);
        let y = x.inv().unwrap();
        assert!(x.mul(&y).is_one());
        assert_eq!(f.from_i64(-3).to_rational(), BigRational::from_integer(BigInt::from(-3)));
        assert!(f.zero().inv().is_err());
    }

    #[test]
    fn residue_classes() {
        let f = q3();
        assert_eq!(f.from_i64(5).residue(), Some(2));
        assert_eq!(f.from_i64(6).residue(), Some(0));
        assert_eq!(f.uniformizer().inv().unwrap().residue(), None);
    }
}
