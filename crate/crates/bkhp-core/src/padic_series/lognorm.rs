use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::padic_series::coeff::{Coeff, CoeffField};
use crate::padic_series::poly::Poly;

/// |x| = |p|^{q_exp}, logarithm taken base |p|; larger exponents mean smaller
/// norms. `Zero` is the norm of 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LogNorm {
    Zero,
    Finite(BigRational),
}

impl fmt::Display for LogNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogNorm::Zero => write!(f, "zero"),
            LogNorm::Finite(q) => write!(f, "|p|^{}", q),
        }
    }
}

impl LogNorm {
    pub fn from_ratio(n: i64, d: i64) -> Self {
        LogNorm::Finite(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }
    pub fn exponent(&self) -> Option<&BigRational> {
        match self {
            LogNorm::Zero => None,
            LogNorm::Finite(q) => Some(q),
        }
    }
    /// Naive Gauss norm of Σ c_j u^j at r = |π_K|^{q^{−n}}:
    /// min_j v(c_j) + j·q^{−n}/e over the stored window.
    pub fn of_poly<F: CoeffField>(p: &Poly<F>, e: usize, q: u64, n: u32) -> Self {
        let den = BigInt::from(e as u64) * num_traits::pow(BigInt::from(q), n as usize);
        let mut best: Option<BigRational> = None;
        for (j, c) in p.coeffs().iter().enumerate() {
            if let Some(v) = c.valuation() {
                let t = BigRational::from_integer(BigInt::from(v)) + BigRational::new(BigInt::from(j), den.clone());
                if best.as_ref().is_none_or(|b| t < *b) {
                    best = Some(t);
                }
            }
        }
        best.map_or(LogNorm::Zero, LogNorm::Finite)
    }
    pub fn mul(&self, o: &Self) -> Self {
        match (self, o) {
            (LogNorm::Finite(a), LogNorm::Finite(b)) => LogNorm::Finite(a + b),
            _ => LogNorm::Zero,
        }
    }
    /// Quotient; dividing by the zero norm is treated as zero.
    pub fn div(&self, o: &Self) -> Self {
        match (self, o) {
            (LogNorm::Finite(a), LogNorm::Finite(b)) => LogNorm::Finite(a - b),
            _ => LogNorm::Zero,
        }
    }
    pub fn pow(&self, k: i64) -> Self {
        match self {
            LogNorm::Zero => LogNorm::Zero,
            LogNorm::Finite(a) => LogNorm::Finite(a * BigRational::from_integer(BigInt::from(k))),
        }
    }
    /// Compare norms (not exponents): Less means |self| < |o|.
    pub fn cmp_norm(&self, o: &Self) -> Ordering {
        match (self, o) {
            (LogNorm::Zero, LogNorm::Zero) => Ordering::Equal,
            (LogNorm::Zero, _) => Ordering::Less,
            (_, LogNorm::Zero) => Ordering::Greater,
            (LogNorm::Finite(a), LogNorm::Finite(b)) => b.cmp(a),
        }
    }
    pub fn is_zero(&self) -> bool {
        matches!(self, LogNorm::Zero)
    }
    /// −q_exp, the log-base-(1/|p|) size; zero norm maps to None.
    pub fn size(&self) -> Option<BigRational> {
        self.exponent().map(|q| -q.clone())
    }
    pub fn zero_exp() -> Self {
        LogNorm::Finite(BigRational::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic_series::ctx::ctx0;

    #[test]
    fn gauss_norm_examples() {
        let c = ctx0();
        let p = Poly::from_i64s(c.field(), &[3]);
        for n in 0..4 {
            assert_eq!(LogNorm::of_poly(&p, 1, 3, n), LogNorm::from_ratio(1, 1));
        }
        let e = c.e_poly();
        assert_eq!(LogNorm::of_poly(e, 1, 3, 1), LogNorm::from_ratio(1, 3));
        assert_eq!(LogNorm::of_poly(e, 1, 3, 0), LogNorm::from_ratio(1, 1));
        assert!(LogNorm::of_poly(&Poly::zero(c.field()), 1, 3, 0).is_zero());
    }
}
