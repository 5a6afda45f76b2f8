use crate::error::{Error, Result};
use crate::padic_series::coeff::{Coeff, CoeffField};
use crate::padic_series::ctx::PrecCtx;
use crate::padic_series::jet::JetRing;
use crate::padic_series::poly::Poly;

/// The residue field K = K_0[u]/E of Ŝ, elements stored as polynomials of
/// degree < e. Its valuation ring O_K = W[u]/E consists of the polynomials
/// with integral coefficients, and u is a uniformizer.
#[derive(Clone, Debug)]
pub struct KField<F: CoeffField> {
    ring: JetRing<F>,
}

impl<F: CoeffField> KField<F> {
    pub fn new(ctx: &PrecCtx<F>) -> Self {
        KField { ring: JetRing::at_e(ctx, 1) }
    }
    pub fn e(&self) -> usize {
        self.ring.deg()
    }
    pub fn field(&self) -> &F {
        self.ring.field()
    }
    pub fn zero(&self) -> Poly<F> {
        Poly::zero(self.field())
    }
    pub fn one(&self) -> Poly<F> {
        Poly::one(self.field())
    }
    pub fn reduce(&self, a: &Poly<F>) -> Poly<F> {
        a.rem_monic(self.ring.modulus())
    }
    pub fn add(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        a.add(b)
    }
    pub fn sub(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        a.sub(b)
    }
    pub fn mul(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        self.reduce(&a.mul(b))
    }
    pub fn inv(&self, a: &Poly<F>) -> Result<Poly<F>> {
        let j = self.ring.from_poly(a);
        if j.valuation() != Some(0) {
            return Err(Error::precision("lattices", "element of K is zero to precision"));
        }
        j.inv()?.residue()
    }
    pub fn is_zero(&self, a: &Poly<F>) -> bool {
        self.reduce(a).is_zero()
    }
    /// v_π(Σ a_j u^j) = min_j (e·v(a_j) + j) for deg < e.
    pub fn val(&self, a: &Poly<F>) -> Option<i64> {
        let e = self.e() as i64;
        self.reduce(a)
            .coeffs()
            .iter()
            .enumerate()
            .filter_map(|(j, c)| c.valuation().map(|v| e * v + j as i64))
            .min()
    }
    /// Whether a lies in O_K.
    pub fn is_integral(&self, a: &Poly<F>) -> bool {
        self.val(a).is_none_or(|v| v >= 0)
    }
    /// π^k for the uniformizer π = u.
    pub fn pi_pow(&self, k: i64) -> Result<Poly<F>> {
        let u = self.ring.u();
        u.pow_i(k)?.residue()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic_series::ctx::{ctx0, ctx1};

    #[test]
    fn valuations() {
        let k = KField::new(&ctx1());
        let f = k.field().clone();
        // u² = 2 in K, so v_π(2) = 2 = v_π(u²)
        assert_eq!(k.val(&Poly::from_i64s(&f, &[2])), Some(2));
        assert_eq!(k.val(&Poly::from_i64s(&f, &[0, 1])), Some(1));
        assert_eq!(k.val(&Poly::from_i64s(&f, &[0, 0, 1])), Some(2));
        let x = Poly::from_i64s(&f, &[1, 1]);
        let y = k.inv(&x).unwrap();
        assert!(k.mul(&x, &y).eq_prec(&k.one()));
        let k0 = KField::new(&ctx0());
        assert_eq!(k0.val(&Poly::from_i64s(k0.field(), &[0, 1])), Some(1));
    }
}
