use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::padic_series::coeff::{Coeff, CoeffField};
use crate::padic_series::fq::FqField;
use crate::padic_series::padic::PadicField;
use crate::padic_series::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Mixed,
    Equal,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Mixed => "mixed",
            Mode::Equal => "equal",
        })
    }
}

#[derive(Debug)]
struct CtxInner<F: CoeffField> {
    field: F,
    mode: Mode,
    e: usize,
    e_poly: Poly<F>,
    n_c: i64,
    m_u: usize,
    h_e: i64,
}

/// Global parameters: coefficient field, Eisenstein polynomial E and the
/// three truncation levels (coefficient digits N_c, u-order M_u, E-order h_E).
#[derive(Debug)]
pub struct PrecCtx<F: CoeffField>(Arc<CtxInner<F>>);

impl<F: CoeffField> Clone for PrecCtx<F> {
    fn clone(&self) -> Self {
        PrecCtx(self.0.clone())
    }
}

impl<F: CoeffField> PartialEq for PrecCtx<F> {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.0, &o.0)
            || (self.0.field == o.0.field
                && self.0.e_poly.eq_prec(&o.0.e_poly)
                && self.0.n_c == o.0.n_c
                && self.0.m_u == o.0.m_u
                && self.0.h_e == o.0.h_e)
    }
}

impl<F: CoeffField> PrecCtx<F> {
    /// Validates E (monic Eisenstein) and the truncation inequalities
    /// M_u ≥ e·h_E and M_u ≥ q.
    pub fn new(field: F, e_coeffs: Vec<F::Elt>, n_c: i64, m_u: usize, h_e: i64) -> Result<Self> {
        let origin = "padic_series";
        if e_coeffs.len() < 2 {
            return Err(Error::domain(origin, "E must have degree at least 1"));
        }
        let e = e_coeffs.len() - 1;
        if !e_coeffs[e].is_one() {
            return Err(Error::domain(origin, "E must be monic"));
        }
        if e_coeffs[0].valuation() != Some(1) {
            return Err(Error::domain(
                origin,
                format!(
                    "E is not Eisenstein: constant term has valuation {}",
                    e_coeffs[0].valuation().map_or("infinite".to_string(), |v| v.to_string())
                ),
            ));
        }
        for (i, c) in e_coeffs.iter().enumerate().take(e).skip(1) {
            if c.valuation().is_some_and(|v| v < 1) {
                return Err(Error::domain(
                    origin,
                    format!("E is not Eisenstein: coefficient of u^{} is not divisible by the uniformizer", i),
                ));
            }
        }
        if n_c < 1 || h_e < 1 {
            return Err(Error::domain(origin, "N_c and h_E must be positive"));
        }
        if (m_u as i64) < e as i64 * h_e {
            return Err(Error::domain(origin, format!("M_u = {} < e·h_E = {}", m_u, e as i64 * h_e)));
        }
        if (m_u as u64) < field.q() {
            return Err(Error::domain(origin, format!("M_u = {} < q = {}", m_u, field.q())));
        }
        let mode = if field.is_equal_char() { Mode::Equal } else { Mode::Mixed };
        let e_poly = Poly::from_coeffs(field.clone(), e_coeffs);
        Ok(PrecCtx(Arc::new(CtxInner { field, mode, e, e_poly, n_c, m_u, h_e })))
    }

    pub fn field(&self) -> &F {
        &self.0.field
    }
    pub fn mode(&self) -> Mode {
        self.0.mode
    }
    pub fn p(&self) -> u64 {
        self.0.field.char_p()
    }
    /// Frobenius exponent: u ↦ u^q.
    pub fn q(&self) -> u64 {
        self.0.field.q()
    }
    pub fn e(&self) -> usize {
        self.0.e
    }
    pub fn e_poly(&self) -> &Poly<F> {
        &self.0.e_poly
    }
    pub fn e0(&self) -> F::Elt {
        self.0.e_poly.coeff(0)
    }
    pub fn n_c(&self) -> i64 {
        self.0.n_c
    }
    pub fn m_u(&self) -> usize {
        self.0.m_u
    }
    pub fn h_e(&self) -> i64 {
        self.0.h_e
    }
    pub fn same(&self, o: &Self) -> bool {
        self == o
    }
}

/// Headroom digits carried beyond N_c.
pub fn headroom(n_c: i64) -> i64 {
    n_c
}

pub type MixedCtx = PrecCtx<PadicField>;
pub type EqualCtx = PrecCtx<FqField>;

/// Mixed characteristic context over Q_p with integer E coefficients.
pub fn mixed_context(p: u64, e_coeffs: &[i64], n_c: i64, m_u: usize, h_e: i64) -> Result<MixedCtx> {
    let f = PadicField::new(p, n_c + headroom(n_c))?;
    let cs = e_coeffs.iter().map(|c| f.from_i64(*c)).collect();
    PrecCtx::new(f, cs, n_c, m_u, h_e)
}

/// Equal characteristic context over F_q((π)); E coefficients are given as
/// (residue digit, π-exponent) term lists.
pub fn equal_context(
    q: u64,
    e_coeffs: &[Vec<(u32, i64)>],
    n_c: i64,
    m_u: usize,
    h_e: i64,
) -> Result<EqualCtx> {
    let f = FqField::new(q, n_c + headroom(n_c))?;
    let mut cs = Vec::new();
    for terms in e_coeffs {
        let mut acc = f.zero();
        for (d, k) in terms {
            acc = acc.add(&f.residue_lift(*d).mul_pow(*k));
        }
        cs.push(acc);
    }
    PrecCtx::new(f, cs, n_c, m_u, h_e)
}

/// ctx₀: p = 3, E = u − 3.
pub fn ctx0() -> MixedCtx {
    mixed_context(3, &[-3, 1], 12, 32, 6).expect("valid context")
}

/// ctx₁: p = 2, E = u² − 2.
pub fn ctx1() -> MixedCtx {
    mixed_context(2, &[-2, 0, 1], 12, 32, 6).expect("valid context")
}

/// F_3[[π]] with E = u − π.
pub fn ctx_equal3() -> EqualCtx {
    equal_context(3, &[vec![(2, 1)], vec![(1, 0)]], 12, 32, 6).expect("valid context")
}

/// Rational helper shared by constructors.
pub fn ratio<F: CoeffField>(f: &F, n: i64, d: i64) -> Result<F::Elt> {
    f.from_ratio(&BigInt::from(n), &BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_contexts() {
        let c0 = ctx0();
        assert_eq!((c0.p(), c0.e(), c0.m_u(), c0.h_e()), (3, 1, 32, 6));
        let c1 = ctx1();
        assert_eq!(c1.e(), 2);
        let ce = ctx_equal3();
        assert_eq!(ce.mode(), Mode::Equal);
        assert_eq!(ce.e0().valuation(), Some(1));
    }

    #[test]
    fn rejects_bad_contexts() {
        assert!(mixed_context(3, &[-9, 1], 12, 32, 6).is_err());
        assert!(mixed_context(3, &[-3, 1], 12, 4, 6).is_err());
        assert!(mixed_context(4, &[-2, 1], 12, 32, 6).is_err());
        assert!(mixed_context(3, &[-3, 1, 1], 12, 32, 6).is_err());
        assert!(mixed_context(2, &[-2, 1, 1], 12, 32, 6).is_err());
        assert!(mixed_context(3, &[-3, 1], 12, 2, 1).is_err());
    }
}
