use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::padic_series::coeff::{Coeff, CoeffField, CoeffRepr, EXACT};
use crate::padic_series::gf::Gf;

#[derive(Debug)]
struct FqInner {
    gf: Gf,
    cap: i64,
}

/// F_q((π)) with relative precision capped at `cap` π-digits.
#[derive(Clone, Debug)]
pub struct FqField(Arc<FqInner>);

impl PartialEq for FqField {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || (self.0.gf.q() == o.0.gf.q() && self.0.cap == o.0.cap)
    }
}

impl FqField {
    pub fn new(q: u64, cap: i64) -> Result<FqField> {
        if cap < 1 {
            return Err(Error::domain("padic_series", "precision cap must be positive"));
        }
        let gf = Gf::new(q)?;
        Ok(FqField(Arc::new(FqInner { gf, cap })))
    }

    pub fn gf(&self) -> &Gf {
        &self.0.gf
    }

    /// Element Σ digits[i] π^(val+i) known modulo π^abs.
    pub fn from_digits(&self, val: i64, digits: Vec<u32>, abs: i64) -> FqLaurent {
        let mut val = val;
        let mut digits = digits;
        let lead = digits.iter().position(|d| *d != 0);
        match lead {
            None => return self.zero_prec(abs),
            Some(k) => {
                digits.drain(..k);
                val += k as i64;
            }
        }
        if val >= abs {
            return self.zero_prec(abs);
        }
        let rel = if abs >= EXACT { self.0.cap } else { (abs - val).min(self.0.cap) } as usize;
        digits.resize(rel, 0);
        FqLaurent { f: self.clone(), val, digits }
    }
}

/// Truncated Laurent series in π over F_q: Σ digits[i] π^(val+i), known
/// modulo π^(val + digits.len()). An empty digit vector is zero known modulo
/// π^val.
#[derive(Clone)]
pub struct FqLaurent {
    f: FqField,
    val: i64,
    digits: Vec<u32>,
}

impl fmt::Debug for FqLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.repr())
    }
}

impl FqLaurent {
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }
    fn gf(&self) -> &Gf {
        &self.f.0.gf
    }
}

impl CoeffField for FqField {
    type Elt = FqLaurent;

    fn zero(&self) -> FqLaurent {
        self.zero_prec(EXACT)
    }
    fn zero_prec(&self, abs: i64) -> FqLaurent {
        FqLaurent { f: self.clone(), val: abs.min(EXACT), digits: Vec::new() }
    }
    fn from_i64(&self, n: i64) -> FqLaurent {
        let d = self.0.gf.from_i64(n);
        self.from_digits(0, vec![d], EXACT)
    }
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<FqLaurent> {
        let p = BigInt::from(self.0.gf.p());
        let n = num.mod_floor(&p).to_i64().unwrap_or(0);
        let d = den.mod_floor(&p).to_i64().unwrap_or(0);
        if d == 0 {
            return Err(Error::domain(
                "padic_series",
                "denominator vanishes in the residue characteristic",
            ));
        }
        self.from_i64(n).div(&self.from_i64(d))
    }
    fn uniformizer(&self) -> FqLaurent {
        self.from_digits(1, vec![1], EXACT)
    }
    fn char_p(&self) -> u64 {
        self.0.gf.p() as u64
    }
    fn q(&self) -> u64 {
        self.0.gf.q() as u64
    }
    fn cap(&self) -> i64 {
        self.0.cap
    }
    fn residue_field(&self) -> &Gf {
        &self.0.gf
    }
    fn residue_lift(&self, idx: u32) -> FqLaurent {
        self.from_digits(0, vec![idx], EXACT)
    }
    fn is_equal_char(&self) -> bool {
        true
    }
}

impl Coeff for FqLaurent {
    type Field = FqField;

    fn field(&self) -> &FqField {
        &self.f
    }

    fn add(&self, o: &FqLaurent) -> FqLaurent {
        if self.is_exact_zero() {
            return o.clone();
        }
        if o.is_exact_zero() {
            return self.clone();
        }
        let abs = self.abs_prec().min(o.abs_prec());
        let v = self.val.min(o.val);
        if v >= abs {
            return self.f.zero_prec(abs);
        }
        let len = (abs - v) as usize;
        let k = self.gf();
        let mut out = vec![0u32; len];
        for x in [self, o] {
            for (i, d) in x.digits.iter().enumerate() {
                let pos = (x.val - v) as usize + i;
                if pos < len {
                    out[pos] = k.add(out[pos], *d);
                }
            }
        }
        self.f.from_digits(v, out, abs)
    }

    fn sub(&self, o: &FqLaurent) -> FqLaurent {
        self.add(&o.neg())
    }

    fn mul(&self, o: &FqLaurent) -> FqLaurent {
        if self.is_exact_zero() || o.is_exact_zero() {
            return self.f.zero();
        }
        if self.digits.is_empty() || o.digits.is_empty() {
            return self.f.zero_prec(self.val + o.val);
        }
        let rel = self.digits.len().min(o.digits.len());
        let k = self.gf();
        let mut out = vec![0u32; rel];
        for (i, a) in self.digits.iter().take(rel).enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.digits.iter().take(rel - i).enumerate() {
                out[i + j] = k.add(out[i + j], k.mul(*a, *b));
            }
        }
        FqLaurent { f: self.f.clone(), val: self.val + o.val, digits: out }
    }

    fn neg(&self) -> FqLaurent {
        let k = self.gf();
        let digits = self.digits.iter().map(|d| k.neg(*d)).collect();
        FqLaurent { f: self.f.clone(), val: self.val, digits }
    }

    fn inv(&self) -> Result<FqLaurent> {
        if self.digits.is_empty() {
            return Err(Error::precision("padic_series", "inversion of a value that is zero to precision"));
        }
        let k = self.gf();
        let n = self.digits.len();
        let a0_inv = k.inv(self.digits[0]).expect("leading digit is nonzero");
        let mut out = vec![0u32; n];
        out[0] = a0_inv;
        for m in 1..n {
            let mut s = 0u32;
            for j in 1..=m {
                s = k.add(s, k.mul(self.digits[j], out[m - j]));
            }
            out[m] = k.neg(k.mul(s, a0_inv));
        }
        Ok(FqLaurent { f: self.f.clone(), val: -self.val, digits: out })
    }

    fn valuation(&self) -> Option<i64> {
        (!self.digits.is_empty()).then_some(self.val)
    }

    fn abs_prec(&self) -> i64 {
        self.val + self.digits.len() as i64
    }

    fn mul_pow(&self, k: i64) -> FqLaurent {
        if self.is_exact_zero() {
            return self.clone();
        }
        FqLaurent { f: self.f.clone(), val: self.val + k, digits: self.digits.clone() }
    }

    fn frobenius(&self) -> FqLaurent {
        self.clone()
    }

    fn with_abs_prec(&self, abs: i64) -> FqLaurent {
        if abs >= self.abs_prec() {
            return self.clone();
        }
        self.f.from_digits(self.val, self.digits.clone(), abs)
    }

    fn residue(&self) -> Option<u32> {
        if self.digits.is_empty() {
            return (self.val >= 1).then_some(0);
        }
        match self.val {
            v if v > 0 => Some(0),
            0 => Some(self.digits[0]),
            _ => None,
        }
    }

    fn repr(&self) -> CoeffRepr {
        let abs = self.abs_prec();
        let abs_prec = (abs < EXACT).then_some(abs);
        let mut digits = self.digits.clone();
        while digits.last() == Some(&0) {
            digits.pop();
        }
        CoeffRepr::Series { val: self.val.min(EXACT), digits, abs_prec }
    }
}
