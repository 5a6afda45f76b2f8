use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::Result;
use crate::padic_series::gf::Gf;

/// Sentinel absolute precision of exact values.
pub const EXACT: i64 = i64::MAX / 4;

/// Exact description of a coefficient for reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffRepr {
    /// Mixed characteristic: a rational representative known modulo p^abs_prec.
    Rational { value: BigRational, abs_prec: Option<i64> },
    /// Equal characteristic: sum of digits[i]·π^(val+i), digits indexing F_q.
    Series { val: i64, digits: Vec<u32>, abs_prec: Option<i64> },
}

impl fmt::Display for CoeffRepr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffRepr::Rational { value, abs_prec } => {
                write!(f, "{}", value)?;
                if let Some(a) = abs_prec {
                    write!(f, " + O(p^{})", a)?;
                }
                Ok(())
            }
            CoeffRepr::Series { val, digits, abs_prec } => {
                let mut terms = Vec::new();
                for (i, d) in digits.iter().enumerate() {
                    if *d == 0 {
                        continue;
                    }
                    let k = val + i as i64;
                    terms.push(match k {
                        0 => format!("{}", d),
                        1 => format!("{}*pi", d),
                        _ => format!("{}*pi^{}", d, k),
                    });
                }
                if terms.is_empty() {
                    terms.push("0".to_string());
                }
                write!(f, "{}", terms.join(" + "))?;
                if let Some(a) = abs_prec {
                    write!(f, " + O(pi^{})", a)?;
                }
                Ok(())
            }
        }
    }
}

/// Runtime parameters of a coefficient field K_0 = Frac W.
///
/// The field data (prime, precision cap, residue field tables) is only known
/// at runtime, so constants are produced from a field handle rather than from
/// context-free `Zero`/`One` impls.
pub trait CoeffField: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elt: Coeff<Field = Self>;

    /// Exact zero.
    fn zero(&self) -> Self::Elt;
    /// Zero known modulo uniformizer^abs.
    fn zero_prec(&self, abs: i64) -> Self::Elt;
    fn one(&self) -> Self::Elt {
        self.from_i64(1)
    }
    fn from_i64(&self, n: i64) -> Self::Elt;
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<Self::Elt>;
    /// The uniformizer of W (p, or π in equal characteristic).
    fn uniformizer(&self) -> Self::Elt;
    /// Residue characteristic.
    fn char_p(&self) -> u64;
    /// Cardinality q of the residue field; Frobenius on 𝔖 sends u to u^q.
    fn q(&self) -> u64;
    /// Relative precision cap.
    fn cap(&self) -> i64;
    fn residue_field(&self) -> &Gf;
    /// A lift of the residue class with index `idx`.
    fn residue_lift(&self, idx: u32) -> Self::Elt;
    /// Whether W has characteristic p (equal characteristic).
    fn is_equal_char(&self) -> bool;
}

/// Element of K_0 with capped relative precision.
///
/// Every value carries an absolute precision `abs_prec`: it is known modulo
/// uniformizer^abs_prec. Digits beyond that are never reported.
pub trait Coeff: Clone + fmt::Debug + Send + Sync + 'static {
    type Field: CoeffField<Elt = Self>;

    fn field(&self) -> &Self::Field;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Inverse; fails when the value is zero to precision.
    fn inv(&self) -> Result<Self>;
    /// Valuation, or None when indistinguishable from zero.
    fn valuation(&self) -> Option<i64>;
    /// Absolute precision; `EXACT` for exact zero.
    fn abs_prec(&self) -> i64;
    /// Multiply by uniformizer^k.
    fn mul_pow(&self, k: i64) -> Self;
    /// Coefficient Frobenius; identity when the residue field is the prime
    /// field in mixed characteristic or F_q in equal characteristic.
    fn frobenius(&self) -> Self;
    /// Lower the absolute precision to at most `abs`.
    fn with_abs_prec(&self, abs: i64) -> Self;
    /// Residue class index of an integral element.
    fn residue(&self) -> Option<u32>;
    fn repr(&self) -> CoeffRepr;

    fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }
    fn is_exact_zero(&self) -> bool {
        self.valuation().is_none() && self.abs_prec() >= EXACT
    }
    fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }
    /// Equality up to the joint tracked precision.
    fn eq_prec(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }
    fn is_one(&self) -> bool {
        self.eq_prec(&self.field().one())
    }
    fn zero_like(&self) -> Self {
        self.field().zero()
    }
    fn one_like(&self) -> Self {
        self.field().one()
    }
    /// Relative precision, zero for values indistinguishable from zero.
    fn rel_prec(&self) -> i64 {
        match self.valuation() {
            Some(v) => self.abs_prec() - v,
            None => 0,
        }
    }
}
