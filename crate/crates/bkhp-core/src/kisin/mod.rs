//! Breuil–Kisin modules: amplitude, the (PIM) witness, the ξ series, the
//! functor 𝔻_iso, reconstruction checks and extensions.

mod theta;
mod xi;

pub use theta::{build_extension, theta_apply, theta_resum_check, theta_solve, Extension, ThetaSolution};
pub use xi::{
    diso, lambda_log_norm, reconstruct_verify, xi_compute, xi_inverse_numerator, xi_jets, xi_residual, Diso, ReconRecord, ReconReport,
    XiMatrix,
};

use crate::error::{Error, Result};
use crate::lattices::{series_det_class, Mat, SMat};
use crate::padic_series::coeff::{Coeff, CoeffField};
use crate::padic_series::ctx::PrecCtx;
use crate::padic_series::jet::JetRing;
use crate::padic_series::series::SeriesElt;

/// Free 𝔖-module of rank r with Frobenius matrix Phi over 𝔖[1/p][1/E].
#[derive(Clone, Debug)]
pub struct BKModule<F: CoeffField> {
    phi: SMat<F>,
    declared: Option<(i64, i64)>,
    tight: (i64, i64),
    det_class: (i64, i64),
}

/// Outcome of the amplitude certification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Amplitude {
    pub declared: Option<(i64, i64)>,
    pub tight: (i64, i64),
}

impl Amplitude {
    /// The declared window contains the tight one.
    pub fn holds(&self) -> bool {
        match self.declared {
            None => true,
            Some((s, t)) => s <= self.tight.0 && t >= self.tight.1,
        }
    }
    /// The certified window: the declared one when it holds, else the tight one.
    pub fn window(&self) -> (i64, i64) {
        match self.declared {
            Some(w) if self.holds() => w,
            _ => self.tight,
        }
    }
}

/// E-adic valuation of an element of 𝔖[1/p][1/E]; None for zero.
pub(crate) fn e_valuation<F: CoeffField>(x: &SeriesElt<F>) -> Result<Option<i64>> {
    if x.poly().is_zero() {
        if x.is_truncated() {
            return Err(Error::precision("kisin", "entry is zero to precision"));
        }
        return Ok(None);
    }
    let ctx = x.ctx();
    if !x.is_truncated() {
        let e = ctx.e_poly();
        let mut p = x.poly().clone();
        let mut k = 0;
        loop {
            let (q, r) = p.divrem_monic(e);
            if !r.is_zero() {
                break;
            }
            p = q;
            k += 1;
        }
        return Ok(Some(k - x.d_e()));
    }
    let ring = JetRing::at_e(ctx, ctx.h_e());
    let j = x.to_jet(&ring)?;
    match j.valuation() {
        Some(v) => Ok(Some(v)),
        None => Err(Error::precision("kisin", "E-valuation exceeds the jet order")),
    }
}

impl<F: CoeffField> BKModule<F> {
    /// Certifies det Phi = unit·p^a·E^b and computes the tight amplitude.
    pub fn new(phi: SMat<F>, declared: Option<(i64, i64)>) -> Result<Self> {
        if phi.rows() != phi.cols() || phi.rows() == 0 {
            return Err(Error::domain("kisin", "Frobenius matrix must be square of positive rank"));
        }
        let det = phi.det()?;
        let det_class = series_det_class(&det)?;
        let b = det_class.1;
        let mut s = i64::MAX;
        for x in phi.entries() {
            if let Some(v) = e_valuation(x)? {
                s = s.min(v);
            }
        }
        let adj = phi.adjugate()?;
        let mut t = i64::MIN;
        for x in adj.entries() {
            if let Some(v) = e_valuation(x)? {
                t = t.max(b - v);
            }
        }
        Ok(BKModule { phi, declared, tight: (s, t), det_class })
    }
    pub fn phi(&self) -> &SMat<F> {
        &self.phi
    }
    pub fn ctx(&self) -> &PrecCtx<F> {
        self.phi.ctx()
    }
    pub fn rank(&self) -> usize {
        self.phi.rows()
    }
    /// (a, b) with det Phi = unit·p^a·E^b.
    pub fn det_class(&self) -> (i64, i64) {
        self.det_class
    }
    /// Tight amplitude (s, t): E^t·𝔐 ⊆ φ(^φ𝔐) ⊆ E^s·𝔐.
    pub fn amplitude(&self) -> (i64, i64) {
        self.tight
    }
    pub fn declared_amplitude(&self) -> Option<(i64, i64)> {
        self.declared
    }
    /// φ_D = Phi mod u.
    pub fn phi_d(&self) -> Result<Mat<F>> {
        self.phi.at_zero()
    }
    /// Phi⁻¹ = adj(Phi)/det(Phi) as a matrix over 𝔖[1/p][1/E] with
    /// u-adically expanded unit part.
    pub fn phi_inverse(&self) -> Result<SMat<F>> {
        self.phi_inverse_e(0)
    }
    /// E^k·Phi⁻¹; the E-power is applied to the exact adjugate before the
    /// truncated unit inverse so that E-factors cancel exactly.
    pub fn phi_inverse_e(&self, k: i64) -> Result<SMat<F>> {
        let (a, b) = self.det_class;
        let det = self.phi.det()?;
        let unit = det.mul_e_pow(-b).scale(&self.ctx().field().one().mul_pow(-a));
        let uinv = unit.inv()?.scale(&self.ctx().field().one().mul_pow(-a));
        self.phi.adjugate()?.mul_e_pow(k - b).scale(&uinv)
    }
}


/// Certifies the declared amplitude or returns the tightest one.
pub fn amplitude_check<F: CoeffField>(b: &BKModule<F>) -> Amplitude {
    Amplitude { declared: b.declared, tight: b.tight }
}

/// Per-n p-denominators of the normalized Frobenius products.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PimRecord {
    pub n: u32,
    pub forward: i64,
    pub inverse: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PimOutcome {
    Ok,
    Counterexample(u32),
}

/// Finite-n evidence for the (PIM) condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PimReport {
    pub c: i64,
    pub records: Vec<PimRecord>,
    pub outcome: PimOutcome,
}

impl PimReport {
    pub fn is_ok(&self) -> bool {
        self.outcome == PimOutcome::Ok
    }
    /// Smallest C for which the observed records pass.
    pub fn observed(&self) -> i64 {
        self.records.iter().map(|r| r.forward.max(r.inverse)).max().unwrap_or(0)
    }
}

fn max_d_p<F: CoeffField>(m: &SMat<F>) -> Result<i64> {
    let mut d = 0;
    for x in m.entries() {
        if x.d_e() > 0 {
            return Err(Error::internal("kisin", "normalized product kept an E-denominator"));
        }
        d = d.max(x.d_p());
    }
    Ok(d)
}

/// Checks that E^{−s}Phi·φ(E^{−s}Phi)⋯ and φ^{n−1}(E^tPhi⁻¹)⋯E^tPhi⁻¹ have
/// p-denominators at most C for every n ≤ n_max, in the standard frame.
pub fn pim_witness<F: CoeffField>(b: &BKModule<F>, c: i64, n_max: u32) -> Result<PimReport> {
    let ctx = b.ctx();
    let q = ctx.q();
    if q.checked_pow(n_max).is_none_or(|v| v > ctx.m_u() as u64) {
        return Err(Error::precision("kisin", "u-truncation is consumed before n_max Frobenius twists"));
    }
    let (s, t) = amplitude_check(b).window();
    let p_mat = b.phi.mul_e_pow(-s);
    let q_mat = b.phi_inverse_e(t)?;
    max_d_p(&p_mat)?;
    max_d_p(&q_mat)?;
    let r = b.rank();
    let mut fwd = SMat::identity(ctx, r);
    let mut inv = SMat::identity(ctx, r);
    let mut records = Vec::new();
    let mut outcome = PimOutcome::Ok;
    for n in 1..=n_max {
        fwd = fwd.mul(&p_mat.frobenius_n(n - 1)?)?;
        inv = q_mat.frobenius_n(n - 1)?.mul(&inv)?;
        let rec = PimRecord { n, forward: max_d_p(&fwd)?, inverse: max_d_p(&inv)? };
        if outcome == PimOutcome::Ok && rec.forward.max(rec.inverse) > c {
            outcome = PimOutcome::Counterexample(n);
        }
        records.push(rec);
    }
    Ok(PimReport { c, records, outcome })
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use crate::padic_series::ctx::ctx0;
    use crate::padic_series::padic::PadicField;
    use crate::padic_series::poly::Poly;

    pub fn sp(ctx: &PrecCtx<PadicField>, c: &[i64]) -> SeriesElt<PadicField> {
        SeriesElt::from_poly(ctx, Poly::from_i64s(ctx.field(), c)).unwrap()
    }

    /// [[1, u], [0, E]] over ctx₀.
    pub fn remark_shape() -> BKModule<PadicField> {
        let c = ctx0();
        let phi = SMat::from_rows(
            &c,
            vec![vec![sp(&c, &[1]), sp(&c, &[0, 1])], vec![sp(&c, &[0]), SeriesElt::e_pow(&c, 1)]],
        );
        BKModule::new(phi, None).unwrap()
    }

    /// ((p/E(0))·E)^t in rank 1.
    pub fn rank_one_bk<F: CoeffField>(ctx: &PrecCtx<F>, t: i64) -> BKModule<F> {
        let f = ctx.field();
        let c = f.uniformizer().div(&ctx.e0()).unwrap();
        let base = SeriesElt::e_pow(ctx, t);
        let scale = if t >= 0 { pow_elt(f, &c, t as u64) } else { pow_elt(f, &c.inv().unwrap(), (-t) as u64) };
        BKModule::new(SMat::diag(ctx, vec![base.scale(&scale)]), None).unwrap()
    }

    pub fn pow_elt<F: CoeffField>(f: &F, c: &F::Elt, k: u64) -> F::Elt {
        (0..k).fold(f.one(), |a, _| a.mul(c))
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use crate::padic_series::ctx::{ctx0, ctx1};
    use proptest::prelude::*;

    #[test]
    fn amplitude_examples() {
        let c = ctx0();
        assert_eq!(remark_shape().amplitude(), (0, 1));
        let id = BKModule::new(SMat::identity(&c, 2), None).unwrap();
        assert_eq!(id.amplitude(), (0, 0));
        for s in -2..=2 {
            let b = rank_one_bk(&c, s);
            assert_eq!(b.amplitude(), (s, s));
            assert_eq!(b.det_class(), (0, s));
        }
        let declared = BKModule::new(remark_shape().phi().clone(), Some((0, 0))).unwrap();
        assert!(!amplitude_check(&declared).holds());
        assert_eq!(amplitude_check(&declared).window(), (0, 1));
        let wide = BKModule::new(remark_shape().phi().clone(), Some((-1, 2))).unwrap();
        assert_eq!(amplitude_check(&wide).window(), (-1, 2));
    }

    #[test]
    fn non_unit_determinant_rejected() {
        let c = ctx0();
        let phi = SMat::diag(&c, vec![sp(&c, &[3, 0, 1])]);
        assert!(BKModule::new(phi, None).is_err());
    }

    #[test]
    fn pim_examples() {
        let c = ctx0();
        assert!(pim_witness(&remark_shape(), 0, 3).unwrap().is_ok());
        assert!(pim_witness(&BKModule::new(SMat::identity(&c, 2), None).unwrap(), 0, 3).unwrap().is_ok());
        // p⁻¹E accumulates p^{−n}
        let f = c.field();
        let phi = SMat::diag(&c, vec![SeriesElt::e_pow(&c, 1).scale(&f.one().mul_pow(-1))]);
        let b = BKModule::new(phi, None).unwrap();
        let rep = pim_witness(&b, 2, 3).unwrap();
        assert_eq!(rep.outcome, PimOutcome::Counterexample(3));
        assert_eq!(rep.records.iter().map(|r| r.forward).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(pim_witness(&b, 0, 4).is_err());
    }

    #[test]
    fn phi_inverse_is_inverse() {
        for b in [remark_shape(), rank_one_bk(&ctx0(), -2)] {
            let prod = b.phi().mul(&b.phi_inverse().unwrap()).unwrap();
            assert!(prod.eq_prec(&SMat::identity(b.ctx(), b.rank())));
        }
        let b = rank_one_bk(&ctx1(), 1);
        assert_eq!(b.amplitude(), (1, 1));
    }

    proptest! {
        #[test]
        fn triangular_amplitude(a in 0i64..3, d in 0i64..3, x in -4i64..5) {
            let c = ctx0();
            let phi = SMat::from_rows(&c, vec![
                vec![SeriesElt::e_pow(&c, a), sp(&c, &[0, x])],
                vec![sp(&c, &[0]), SeriesElt::e_pow(&c, d)],
            ]);
            let b = BKModule::new(phi, None).unwrap();
            let (s, t) = b.amplitude();
            prop_assert!(s <= a.min(d));
            prop_assert!(t >= a.max(d));
            prop_assert_eq!(b.det_class(), (0, a + d));
            // E^{−s}Phi and E^tPhi⁻¹ are E-integral
            prop_assert!(b.phi().mul_e_pow(-s).entries().iter().all(|e| e.d_e() == 0));
            prop_assert!(b.phi_inverse_e(t).unwrap().entries().iter().all(|e| e.d_e() == 0));
        }
    }
}
