use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hodge_pink::{default_ring, t_hodge, t_newton, HPStruct, PhiMod};
use crate::kisin::BKModule;
use crate::lattices::{EJetLattice, JetMat, Mat, SMat};
use crate::padic_series::coeff::{Coeff, CoeffField};
use crate::padic_series::jet::{Jet, JetRing};
use crate::padic_series::lambda::{e_normalized, lambda_truncated};
use crate::padic_series::series::SeriesElt;

/// ξ = λ^{−C}·Ξ with Ξ ∈ M_r(K_0[[u]]) known modulo u^{M_u}.
///
/// Ξ solves Ξ·φ_D = (E/E(0))^C·Phi·φ(Ξ) and Ξ ≡ 1 mod u.
#[derive(Clone, Debug)]
pub struct XiMatrix<F: CoeffField> {
    num: SMat<F>,
    c: i64,
    iterations: u32,
}

impl<F: CoeffField> XiMatrix<F> {
    /// The λ-denominator exponent C.
    pub fn lambda_pow(&self) -> i64 {
        self.c
    }
    /// Ξ = λ^C·ξ.
    pub fn numerator(&self) -> &SMat<F> {
        &self.num
    }
    pub fn iterations(&self) -> u32 {
        self.iterations
    }
    /// Minimal absolute coefficient precision of Ξ.
    pub fn prec(&self) -> i64 {
        self.num.entries().iter().map(|x| x.prec_abs()).min().unwrap_or(i64::MAX)
    }
    /// Minimal number of guaranteed p-adic digits over the nonzero
    /// coefficients of Ξ.
    pub fn digits(&self) -> i64 {
        self.num
            .entries()
            .iter()
            .flat_map(|x| x.poly().coeffs().iter())
            .filter(|c| c.valuation().is_some())
            .map(|c| c.rel_prec())
            .min()
            .unwrap_or(i64::MAX)
    }
    /// ξ itself as a u-adic series matrix.
    pub fn series(&self) -> Result<SMat<F>> {
        let ctx = self.num.ctx();
        let li = lambda_truncated(ctx)?.inv()?;
        let mut k = SeriesElt::one(ctx);
        for _ in 0..self.c {
            k = k.mul(&li)?;
        }
        self.num.scale(&k)
    }
}

fn phi_c<F: CoeffField>(b: &BKModule<F>, c: i64) -> Result<SMat<F>> {
    let k = b.ctx().e0().inv()?;
    let kc = (0..c).fold(b.ctx().field().one(), |a, _| a.mul(&k));
    let m = b.phi().mul_e_pow(c).map(|x| Ok(x.scale(&kc)))?;
    if m.max_d_e() > 0 {
        return Err(Error::internal("kisin", "E^C·Phi kept an E-denominator"));
    }
    Ok(m)
}

fn residual<F: CoeffField>(xi: &SMat<F>, pc: &SMat<F>, pd: &SMat<F>) -> Result<SMat<F>> {
    xi.mul(pd)?.sub(&pc.mul(&xi.frobenius()?)?)
}

/// Iterates Ξ ← (E/E(0))^C·Phi·φ(Ξ)·φ_D⁻¹ from λ^C·s₀ until the increment
/// vanishes modulo u^{M_u}, then verifies Ξ ≡ 1 mod u and the functional
/// equation residual.
pub fn xi_compute<F: CoeffField>(b: &BKModule<F>, seed: Option<&SMat<F>>) -> Result<XiMatrix<F>> {
    let ctx = b.ctx();
    let r = b.rank();
    let c = (-b.amplitude().0).max(0);
    let phi_d = b.phi_d()?;
    let pd_inv = SMat::from_mat(ctx, &phi_d.inverse()?);
    let pd = SMat::from_mat(ctx, &phi_d);
    let pc = phi_c(b, c)?;
    let id = Mat::identity(ctx.field(), r);
    let s0 = match seed {
        Some(s) => {
            if s.rows() != r || s.cols() != r || !s.at_zero()?.eq_prec(&id) {
                return Err(Error::domain("kisin", "seed must be congruent to the identity modulo u"));
            }
            s.clone()
        }
        None => SMat::identity(ctx, r),
    };
    let lam = lambda_truncated(ctx)?;
    let mut lc = SeriesElt::one(ctx);
    for _ in 0..c {
        lc = lc.mul(&lam)?;
    }
    let mut xi = s0.scale(&lc)?;
    let q = ctx.q() as usize;
    let mut bound = 3u32;
    let mut qn = 1usize;
    while qn < ctx.m_u() {
        qn = qn.saturating_mul(q);
        bound += 1;
    }
    let mut iterations = 0;
    loop {
        let next = pc.mul(&xi.frobenius()?)?.mul(&pd_inv)?;
        let done = next.sub(&xi)?.is_zero();
        xi = next;
        iterations += 1;
        if done {
            break;
        }
        if iterations >= bound {
            return Err(Error::precision(
                "kisin",
                format!("ξ iteration did not stabilize modulo u^{} (precision {})", ctx.m_u(), min_prec(&xi)),
            ));
        }
    }
    let out = XiMatrix { num: xi, c, iterations };
    if out.digits() <= 0 {
        return Err(Error::precision(
            "kisin",
            format!("denominator growth exhausted precision at (M, prec) = ({}, {})", ctx.m_u(), out.prec()),
        ));
    }
    if !out.num.at_zero()?.eq_prec(&id) {
        return Err(Error::internal("kisin", "Ξ is not the identity modulo u"));
    }
    if !residual(&out.num, &pc, &pd)?.is_zero() {
        return Err(Error::precision("kisin", "functional-equation residual is not zero at precision"));
    }
    Ok(out)
}

/// ξ⁻¹ = λ^{−t}·Y with t the upper amplitude. Y solves
/// Y = φ_D·φ(Y)·(E/E(0))^t·Phi⁻¹ with Y ≡ 1 mod u, iterated without any
/// division by a non-unit series.
pub fn xi_inverse_numerator<F: CoeffField>(b: &BKModule<F>) -> Result<(SMat<F>, i64)> {
    let ctx = b.ctx();
    let t = b.amplitude().1;
    let k = ctx.e0().inv()?;
    let kt = if t >= 0 {
        (0..t).fold(ctx.field().one(), |a, _| a.mul(&k))
    } else {
        (0..-t).fold(ctx.field().one(), |a, _| a.mul(&ctx.e0()))
    };
    let psi = b.phi_inverse_e(t)?.map(|x| Ok(x.scale(&kt)))?;
    if psi.max_d_e() > 0 {
        return Err(Error::internal("kisin", "E^t·Phi⁻¹ kept an E-denominator"));
    }
    let pd = SMat::from_mat(ctx, &b.phi_d()?);
    let q = ctx.q() as usize;
    let mut bound = 3u32;
    let mut qn = 1usize;
    while qn < ctx.m_u() {
        qn = qn.saturating_mul(q);
        bound += 1;
    }
    let mut y = SMat::identity(ctx, b.rank());
    for _ in 0..bound {
        let next = pd.mul(&y.frobenius()?)?.mul(&psi)?;
        let done = next.sub(&y)?.is_zero();
        y = next;
        if done {
            return Ok((y, t));
        }
    }
    Err(Error::precision("kisin", format!("ξ⁻¹ iteration did not stabilize modulo u^{}", ctx.m_u())))
}

fn min_prec<F: CoeffField>(m: &SMat<F>) -> i64 {
    m.entries().iter().map(|x| x.prec_abs()).min().unwrap_or(i64::MAX)
}

/// Residual ξφ_D − Phi·φ(ξ), expressed through Ξ: Ξφ_D − (E/E(0))^C·Phi·φ(Ξ).
pub fn xi_residual<F: CoeffField>(b: &BKModule<F>, xi: &XiMatrix<F>) -> Result<SMat<F>> {
    let pd = SMat::from_mat(b.ctx(), &b.phi_d()?);
    residual(&xi.num, &phi_c(b, xi.c)?, &pd)
}

/// Jet of φ^m(x) for a u-series x without E-denominator. A truncated tail
/// u^{M}·(…) becomes u^{q^m·M}·(…), which lowers the coefficient precision
/// to the valuation of u^{q^m·M} plus the smallest stored valuation.
pub(crate) fn frob_jet<F: CoeffField>(ring: &JetRing<F>, x: &SeriesElt<F>, m: u32) -> Result<Jet<F>> {
    if x.d_e() != 0 {
        return Err(Error::internal("kisin", "Frobenius jet of an E-denominator"));
    }
    if !x.is_truncated() {
        return ring.from_poly_frob(x.poly(), m);
    }
    let ctx = ring.ctx();
    let qm = (ctx.q() as usize).pow(m);
    let cap = ring.u_pow_valuation(qm * ctx.m_u()) + x.poly().valuation().unwrap_or(0);
    ring.from_poly_frob(&x.poly().with_abs_prec(cap), m)
}

/// ∏_{m ≥ m0} φ^m(E/E(0)) in the jet ring, m0 ≥ 1 or the ring away from the
/// zero of the factor; stops once factors are 1 to precision.
pub(crate) fn lambda_tail_jet<F: CoeffField>(ring: &JetRing<F>, m0: u32) -> Result<Jet<F>> {
    let en = e_normalized(ring.ctx())?;
    let one = ring.one();
    let mut acc = ring.one();
    for m in m0..m0 + 64 {
        let f = ring.from_poly_frob(&en, m)?;
        if f.sub(&one)?.is_zero() {
            return Ok(acc);
        }
        acc = acc.mul(&f)?;
    }
    Err(Error::precision("kisin", "λ product did not converge in the jet ring"))
}

fn const_jets<F: CoeffField>(ring: &JetRing<F>, m: &Mat<F>) -> JetMat<F> {
    let d = (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .map(|(i, j)| ring.constant(m.get(i, j).clone()))
        .collect();
    JetMat::from_vec(ring, m.rows(), m.cols(), d)
}

/// φ_D·σ(φ_D)⋯σ^{k−1}(φ_D).
pub(crate) fn phi_d_product<F: CoeffField>(a: &Mat<F>, k: u32) -> Mat<F> {
    let mut acc = Mat::identity(a.field(), a.rows());
    let mut cur = a.clone();
    for _ in 0..k {
        acc = acc.mul(&cur);
        cur = cur.frobenius();
    }
    acc
}

/// Jets of ξ in the ring at φ^n(E), through the functional equation
/// ξ = Phi⋯φ^n(Phi)·φ^{n+1}(λ)^{−C}·φ^{n+1}(Ξ)·(φ_D⋯σ^n(φ_D))⁻¹; the
/// Frobenius-shifted Ξ converges far better than Ξ itself near φ^n(E).
pub fn xi_jets<F: CoeffField>(b: &BKModule<F>, xi: &XiMatrix<F>, ring: &JetRing<F>) -> Result<JetMat<F>> {
    let n = ring.frob_index();
    let r = b.rank();
    let mut p = JetMat::identity(ring, r);
    for m in 0..=n {
        p = p.mul(&b.phi().frob_to_jets(ring, m)?)?;
    }
    let lt = lambda_tail_jet(ring, n + 1)?.pow(xi.c as u64)?.inv()?;
    let d: Vec<Jet<F>> = xi.num.entries().iter().map(|x| frob_jet(ring, x, n + 1)).collect::<Result<_>>()?;
    let fx = JetMat::from_vec(ring, r, r, d).scale(&lt)?;
    let pd = phi_d_product(&b.phi_d()?, n + 1).inverse()?;
    p.mul(&fx)?.mul(&const_jets(ring, &pd))
}

/// (D, φ_D, V_D) = 𝔻_iso(B) with its ξ and both invariants.
#[derive(Clone, Debug)]
pub struct Diso<F: CoeffField> {
    pub hp: HPStruct<F>,
    pub xi: XiMatrix<F>,
    pub t_n: i64,
    pub t_h: i64,
}

impl<F: CoeffField> Diso<F> {
    pub fn balanced(&self) -> bool {
        self.t_n == self.t_h
    }
}

/// D = 𝔑/u𝔑 with φ_D = Phi(0); V_D = (ξ·φ_D)⁻¹(Ŝ^r) = φ(ξ)⁻¹Phi⁻¹(Ŝ^r).
pub fn diso<F: CoeffField>(b: &BKModule<F>) -> Result<Diso<F>> {
    let xi = xi_compute(b, None)?;
    let ctx = b.ctx();
    let ring = default_ring(ctx);
    let phi_d = b.phi_d()?;
    let xj = xi_jets(b, &xi, &ring)?;
    let v = xj.mul(&const_jets(&ring, &phi_d))?.inverse()?;
    let hp = HPStruct::new(PhiMod::new(ctx, phi_d)?, EJetLattice::new(v)?)?;
    let t_n = t_newton(hp.phi())?;
    let t_h = t_hodge(&hp)?;
    let (a, e) = b.det_class();
    if t_h != e || t_n != a + e {
        return Err(Error::internal(
            "kisin",
            format!("𝔻_iso invariants (t_N, t_H) = ({t_n}, {t_h}) disagree with det Phi = p^{a}·E^{e}·unit"),
        ));
    }
    Ok(Diso { hp, xi, t_n, t_h })
}

/// One n of the reconstruction check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReconRecord {
    pub n: u32,
    /// ξ·φ_D⋯σ^n(φ_D)·φ^n(V_D) equals Ŝ_n^r.
    pub c1: bool,
    /// Log-base-|p| norm exponent of (φ_D⋯σ^{n−1}(φ_D))⁻¹ξ⁻¹ at |π_K|^{q^{−n}};
    /// None when every entry vanishes on the stored window.
    pub c2_exponent: Option<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReconReport {
    pub records: Vec<ReconRecord>,
    /// Smallest c ≥ 0 with every norm ≤ |p|^{−c}.
    pub constant: BigRational,
}

impl ReconReport {
    pub fn c1_holds(&self) -> bool {
        self.records.iter().all(|r| r.c1)
    }
    pub fn c2_holds(&self, c_cut: &BigRational) -> bool {
        self.records.iter().all(|r| r.c2_exponent.is_some()) && self.constant <= *c_cut
    }
}

/// log_{|p|} |λ|_{|π_K|^{q^{−n}}} = (q^{−1}+⋯+q^{−n}) − n.
pub fn lambda_log_norm(q: u64, n: u32) -> BigRational {
    let mut s = BigRational::zero();
    let mut den = BigInt::one();
    for _ in 0..n {
        den *= BigInt::from(q);
        s += BigRational::new(BigInt::one(), den.clone());
    }
    s - BigRational::from_integer(BigInt::from(n))
}

/// Finite-n check of (C1) and (C2) for a candidate H against B.
pub fn reconstruct_verify<F: CoeffField>(b: &BKModule<F>, h: &HPStruct<F>, n_max: u32) -> Result<ReconReport> {
    let ctx = b.ctx();
    if h.rank() != b.rank() {
        return Err(Error::domain("kisin", "candidate has the wrong rank"));
    }
    if n_max < 1 || ctx.q().checked_pow(n_max).is_none_or(|v| v > ctx.m_u() as u64) {
        return Err(Error::precision("kisin", "u-truncation too small for the requested n"));
    }
    let xi = xi_compute(b, None)?;
    let phi_d = h.phi().a().clone();
    let (y, t) = xi_inverse_numerator(b)?;
    let mut records = Vec::new();
    let mut vn = h.basis().clone();
    let mut worst = BigRational::zero();
    for n in 0..=n_max {
        let ring = if n == 0 { h.ring().clone() } else { JetRing::at_frob_e(ctx, n, h.ring().order()) };
        if n > 0 {
            vn = vn.frob_into(&ring)?;
        }
        let m = xi_jets(b, &xi, &ring)?.mul(&const_jets(&ring, &phi_d_product(&phi_d, n + 1)))?.mul(&vn)?;
        let integral = m.min_valuation().is_none_or(|v| v >= 0);
        let c1 = integral && m.det()?.valuation() == Some(0);
        let pinv = SMat::from_mat(ctx, &phi_d_product(&phi_d, n).inverse()?);
        let z = pinv.mul(&y)?;
        let mut best: Option<BigRational> = None;
        for x in z.entries() {
            if let Some(e) = x.lognorm(n).exponent() {
                if best.as_ref().is_none_or(|b| e < b) {
                    best = Some(e.clone());
                }
            }
        }
        let c2 = best.map(|e| e - BigRational::from_integer(BigInt::from(t)) * lambda_log_norm(ctx.q(), n));
        if let Some(e) = &c2 {
            if -e.clone() > worst {
                worst = -e.clone();
            }
        }
        records.push(ReconRecord { n, c1, c2_exponent: c2 });
    }
    Ok(ReconReport { records, constant: worst })
}
