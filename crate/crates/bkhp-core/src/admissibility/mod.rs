//! The β_n/γ_n iteration, elementary-divisor profiles of γ_n against a base
//! W-lattice, and the boundedness detector built on them.

mod enumerate;

pub use enumerate::{enumerate_polygon_sequences, polygon_conditions_direct, PolygonSweep};

use crate::error::{Error, Result};
use crate::hodge_pink::{t_hodge, t_newton, twist, HPStruct};
use crate::lattices::{elementary_divisors, intersect_with_ejet_lattice, DivisorProfile, Mat, SLattice, SMat, WLattice};
use crate::padic_series::coeff::CoeffField;

/// Twist by the smallest k ≥ 0 making V ⊆ U_D; returns the twisted
/// structure and k.
pub fn anti_effective<F: CoeffField>(h: &HPStruct<F>) -> Result<(HPStruct<F>, i64)> {
    let (s, _) = h.sandwich()?;
    let k = (-s).max(0);
    Ok((twist(h, k)?, k))
}

fn require_anti_effective<F: CoeffField>(h: &HPStruct<F>) -> Result<i64> {
    let (s, t) = h.sandwich()?;
    if s < 0 {
        return Err(Error::domain("admissibility", "V is not contained in U_D; twist to anti-effective first"));
    }
    if 2 * t > h.ring().order() {
        return Err(Error::precision("admissibility", "jet order is below twice the sandwich bound of V"));
    }
    Ok(t)
}

/// One β step split into its factors: the Frobenius-pushed basis, the
/// intersection with V, and φ_D applied to it.
struct BetaParts<F: CoeffField> {
    pushed: SMat<F>,
    cut: SMat<F>,
    next: SLattice<F>,
}

fn beta_parts<F: CoeffField>(l: &SLattice<F>, h: &HPStruct<F>, bound: i64) -> Result<BetaParts<F>> {
    if l.rank() != h.rank() || l.ctx() != h.ctx() {
        return Err(Error::domain("admissibility", "lattice and structure disagree in rank or context"));
    }
    let pushed = l.basis().frobenius()?;
    if pushed.entries().iter().all(|x| x.is_truncated() && x.poly().is_zero()) {
        return Err(Error::precision("admissibility", "u-truncation consumed by the Frobenius push"));
    }
    let cut = intersect_with_ejet_lattice(&SLattice::new(pushed.clone())?, h.lattice(), bound)?;
    let pd = SMat::from_mat(h.ctx(), h.phi().a());
    let next = SLattice::new(pd.mul(cut.basis())?)?;
    Ok(BetaParts { pushed, cut: cut.basis().clone(), next })
}

/// β_{n+1} = (φ_D ⊗ 1)(^φβ_n ∩ V), expressed in the fixed D-frame.
pub fn beta_step<F: CoeffField>(l: &SLattice<F>, h: &HPStruct<F>) -> Result<SLattice<F>> {
    let bound = require_anti_effective(h)?;
    Ok(beta_parts(l, h, bound)?.next)
}

/// ^φβ_n ∩ V ⊆ ^φβ_n, tested in the two localizations available at finite
/// precision: modulo u over W and at E over Ŝ.
fn cut_inside<F: CoeffField>(pushed: &SMat<F>, cut: &SMat<F>, h: &HPStruct<F>) -> Result<bool> {
    let a0 = pushed.at_zero()?;
    let b0 = cut.at_zero()?;
    let t0 = a0.inverse()?.mul(&b0);
    if t0.valuation().is_some_and(|v| v < 0) {
        return Ok(false);
    }
    let ring = h.ring();
    let tj = pushed.to_jets(ring)?.solve_mat(&cut.to_jets(ring)?)?;
    Ok(tj.min_valuation().is_none_or(|v| v >= 0))
}

/// γ_n and its diagnostics.
#[derive(Clone, Debug)]
pub struct GammaRecord<F: CoeffField> {
    pub n: u32,
    pub gamma: WLattice<F>,
    /// l(Δ, γ_n).
    pub profile: DivisorProfile,
    /// det γ_n = p^{n(t_N − t_H)}·det Δ.
    pub det_ok: bool,
    /// β_n ⊆ (φ_D ⊗ 1)(^φβ_{n−1}).
    pub inclusion_ok: bool,
    /// Smallest C ≥ 0 with γ_n ⊆ p^{−C}·γ_{n−1}.
    pub step: i64,
}

#[derive(Clone, Debug)]
pub struct GammaProfile<F: CoeffField> {
    pub base: WLattice<F>,
    pub t_n: i64,
    pub t_h: i64,
    pub records: Vec<GammaRecord<F>>,
}

impl<F: CoeffField> GammaProfile<F> {
    /// max_n max_i |l_i(Δ, γ_n)|.
    pub fn c_obs(&self) -> i64 {
        self.records.iter().map(|r| r.profile.max_abs()).max().unwrap_or(0)
    }
    pub fn det_ok(&self) -> bool {
        self.records.iter().all(|r| r.det_ok)
    }
    pub fn inclusion_ok(&self) -> bool {
        self.records.iter().all(|r| r.inclusion_ok)
    }
    /// Largest observed one-step constant.
    pub fn step_bound(&self) -> i64 {
        self.records.iter().map(|r| r.step).max().unwrap_or(0)
    }
    /// l^0 = 0, l^1, …, l^{n_max}.
    pub fn sequence(&self) -> Vec<DivisorProfile> {
        let mut v = vec![DivisorProfile::zeros(self.base.rank())];
        v.extend(self.records.iter().map(|r| r.profile.clone()));
        v
    }
    pub fn last_gamma(&self) -> &WLattice<F> {
        self.records.last().map_or(&self.base, |r| &r.gamma)
    }
}

fn check_depth<F: CoeffField>(h: &HPStruct<F>, n: u32) -> Result<()> {
    let ctx = h.ctx();
    if ctx.q().checked_pow(n).is_none_or(|v| v > ctx.m_u() as u64) {
        return Err(Error::precision("admissibility", format!("q^{n} exceeds the u-truncation M_u = {}", ctx.m_u())));
    }
    Ok(())
}

/// Iterates β from Δ ⊗ 𝔖 and profiles γ_n = β_n mod u against Δ.
pub fn gamma_profile<F: CoeffField>(h: &HPStruct<F>, delta: &WLattice<F>, n_max: u32) -> Result<GammaProfile<F>> {
    check_depth(h, n_max)?;
    let bound = require_anti_effective(h)?;
    if delta.rank() != h.rank() {
        return Err(Error::domain("admissibility", "base lattice has the wrong rank"));
    }
    let t_n = t_newton(h.phi())?;
    let t_h = t_hodge(h)?;
    let d0 = delta.det_valuation()?;
    let mut beta = SLattice::new(SMat::from_mat(h.ctx(), delta.basis()))?;
    let mut prev = delta.clone();
    let mut records = Vec::new();
    for n in 1..=n_max {
        let parts = beta_parts(&beta, h, bound)?;
        let inclusion_ok = cut_inside(&parts.pushed, &parts.cut, h)?;
        beta = parts.next;
        let gamma = WLattice::new(beta.basis().at_zero()?)?;
        let profile = elementary_divisors(delta, &gamma)?;
        let det_ok = gamma.det_valuation()? - d0 == n as i64 * (t_n - t_h);
        let step = elementary_divisors(&prev, &gamma)?.values().first().copied().unwrap_or(0).max(0);
        prev = gamma.clone();
        records.push(GammaRecord { n, gamma, profile, det_ok, inclusion_ok, step });
    }
    Ok(GammaProfile { base: delta.clone(), t_n, t_h, records })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }
}

/// Finite-n evidence; never a proof of admissibility.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdmissibilityVerdict {
    /// max |l_i| = c_obs ≤ C_cut for every n ≤ n_max.
    Bounded { c_obs: i64 },
    /// t_N ≠ t_H: the determinant alone drifts by t_N − t_H per step.
    DeterminantDrift { direction: Direction },
    /// The partial sum l_1 + ⋯ + l_index moves monotonically by at least
    /// one per step over the last half of the run.
    Drift { index: usize, direction: Direction },
    Inconclusive { c_obs: i64 },
}

impl AdmissibilityVerdict {
    pub fn is_bounded(&self) -> bool {
        matches!(self, AdmissibilityVerdict::Bounded { .. })
    }
    pub fn is_drift(&self) -> bool {
        matches!(self, AdmissibilityVerdict::Drift { .. } | AdmissibilityVerdict::DeterminantDrift { .. })
    }
}

/// Monotone drift of a partial sum over steps ⌊n_max/2⌋ … n_max (at least
/// two steps).
pub fn detect_drift(seq: &[DivisorProfile]) -> Option<(usize, Direction)> {
    let n_max = seq.len().checked_sub(1)?;
    if n_max < 2 {
        return None;
    }
    let start = (n_max / 2).min(n_max - 2);
    let r = seq[0].rank();
    for i in 1..=r {
        let ps: Vec<i64> = seq[start..].iter().map(|p| p.values()[..i].iter().sum()).collect();
        let diffs: Vec<i64> = ps.windows(2).map(|w| w[1] - w[0]).collect();
        if diffs.iter().all(|d| *d >= 1) {
            return Some((i, Direction::Up));
        }
        if diffs.iter().all(|d| *d <= -1) {
            return Some((i, Direction::Down));
        }
    }
    None
}

/// Boundedness detector: determinant drift if t_N ≠ t_H; otherwise bounded
/// if max |l_i| ≤ C_cut, drift if a partial sum drifts, inconclusive else.
pub fn admissibility_verdict<F: CoeffField>(
    h: &HPStruct<F>,
    delta: &WLattice<F>,
    n_max: u32,
    c_cut: i64,
) -> Result<(AdmissibilityVerdict, Option<GammaProfile<F>>)> {
    let t_n = t_newton(h.phi())?;
    let t_h = t_hodge(h)?;
    if t_n != t_h {
        let direction = if t_n > t_h { Direction::Down } else { Direction::Up };
        return Ok((AdmissibilityVerdict::DeterminantDrift { direction }, None));
    }
    let prof = gamma_profile(h, delta, n_max)?;
    let c_obs = prof.c_obs();
    let v = if c_obs <= c_cut {
        AdmissibilityVerdict::Bounded { c_obs }
    } else if let Some((index, direction)) = detect_drift(&prof.sequence()) {
        AdmissibilityVerdict::Drift { index, direction }
    } else {
        AdmissibilityVerdict::Inconclusive { c_obs }
    };
    Ok((v, Some(prof)))
}

/// Smallest C with p^C·γ_{n+n′}(Δ) ⊆ γ_n(γ_{n′}(Δ)) ⊆ p^{−C}·γ_{n+n′}(Δ).
pub fn gamma_compose_check<F: CoeffField>(h: &HPStruct<F>, delta: &WLattice<F>, n: u32, n2: u32) -> Result<i64> {
    if n == 0 || n2 == 0 {
        return Ok(0);
    }
    check_depth(h, n + n2)?;
    let inner = gamma_profile(h, delta, n2)?;
    let composed = gamma_profile(h, inner.last_gamma(), n)?;
    let direct = gamma_profile(h, delta, n + n2)?;
    Ok(elementary_divisors(direct.last_gamma(), composed.last_gamma())?.max_abs())
}

/// W-lattice spanned by the columns of an integer matrix.
pub fn w_lattice_from_i64<F: CoeffField>(f: &F, rows: &[&[i64]]) -> Result<WLattice<F>> {
    WLattice::new(Mat::from_i64(f, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hodge_pink::{default_ring, PhiMod};
    use crate::kisin::{diso, BKModule};
    use crate::lattices::{EJetLattice, JetMat};
    use crate::padic_series::ctx::{ctx0, ctx1, PrecCtx};
    use crate::padic_series::coeff::Coeff;
    use crate::padic_series::series::SeriesElt;
    use crate::PadicField;

    fn rank_one<F: CoeffField>(ctx: &PrecCtx<F>, t_n: i64, t_h: i64) -> HPStruct<F> {
        let f = ctx.field();
        let ring = default_ring(ctx);
        let phi = PhiMod::new(ctx, Mat::diag(f, &[f.one().mul_pow(t_n)])).unwrap();
        HPStruct::new(phi, EJetLattice::new(JetMat::diag(&ring, vec![ring.e_pow(-t_h)])).unwrap()).unwrap()
    }

    fn alpha_twisted(alpha: i64) -> HPStruct<PadicField> {
        let h = crate::hodge_pink::testutil::alpha_example(alpha);
        anti_effective(&h).unwrap().0
    }

    #[test]
    fn rank_one_closed_forms() {
        for ctx in [ctx0(), ctx1()] {
            let f = ctx.field().clone();
            for (t_n, t_h) in [(0i64, 0i64), (1, 1), (1, 0), (2, -1)] {
                let (h, k) = anti_effective(&rank_one(&ctx, t_n, t_h)).unwrap();
                assert_eq!(t_hodge(&h).unwrap(), t_h - k);
                let d = WLattice::standard(&f, 1);
                let prof = gamma_profile(&h, &d, 3).unwrap();
                for rec in &prof.records {
                    assert_eq!(rec.profile.values(), &[-(rec.n as i64) * (t_n - t_h)]);
                    assert!(rec.det_ok && rec.inclusion_ok);
                }
            }
        }
    }

    #[test]
    fn beta_one_matches_product_formula() {
        let ctx = ctx0();
        let h = rank_one(&ctx, 1, -2);
        let b1 = beta_step(&SLattice::standard(&ctx, 1), &h).unwrap();
        // p^{t_N}·E^{−t_H}
        let want = SeriesElt::e_pow(&ctx, 2).scale(&ctx.field().one().mul_pow(1));
        assert!(b1.basis().get(0, 0).eq_prec(&want));
    }

    #[test]
    fn trivial_v_is_bare_push() {
        let ctx = ctx0();
        let f = ctx.field().clone();
        let a = Mat::from_i64(&f, &[&[0, 1], &[3, 0]]);
        let h = HPStruct::standard(PhiMod::new(&ctx, a.clone()).unwrap()).unwrap();
        let l = SLattice::standard(&ctx, 2);
        let b1 = beta_step(&l, &h).unwrap();
        assert!(b1.basis().eq_prec(&SMat::from_mat(&ctx, &a)));
        let d = WLattice::standard(&f, 2);
        assert_eq!(gamma_compose_check(&h, &d, 1, 2).unwrap(), 0);
    }

    #[test]
    fn not_anti_effective_is_refused() {
        let h = crate::hodge_pink::testutil::alpha_example(1);
        assert!(beta_step(&SLattice::standard(h.ctx(), 2), &h).is_err());
    }

    #[test]
    fn rank_one_verdicts() {
        let ctx = ctx0();
        let f = ctx.field().clone();
        let d = WLattice::standard(&f, 1);
        let (h, _) = anti_effective(&rank_one(&ctx, 1, 1)).unwrap();
        assert_eq!(admissibility_verdict(&h, &d, 3, 2).unwrap().0, AdmissibilityVerdict::Bounded { c_obs: 0 });
        let (h, _) = anti_effective(&rank_one(&ctx, 1, 0)).unwrap();
        assert!(admissibility_verdict(&h, &d, 3, 2).unwrap().0.is_drift());
        assert_eq!(gamma_compose_check(&h, &d, 1, 2).unwrap(), 0);
    }

    #[test]
    fn alpha_example_verdicts() {
        let f = ctx0().field().clone();
        let d = WLattice::standard(&f, 2);
        let (v0, p0) = admissibility_verdict(&alpha_twisted(0), &d, 3, 2).unwrap();
        assert!(v0.is_drift(), "{v0:?}");
        assert!(p0.unwrap().det_ok());
        let (v1, p1) = admissibility_verdict(&alpha_twisted(1), &d, 3, 2).unwrap();
        assert!(v1.is_bounded(), "{v1:?}");
        let p1 = p1.unwrap();
        assert!(p1.det_ok() && p1.inclusion_ok());
    }

    #[test]
    fn remark_shape_diso_is_bounded() {
        let c = ctx0();
        let e = |k| SeriesElt::e_pow(&c, k);
        let u = SeriesElt::u(&c);
        let phi = SMat::from_rows(&c, vec![vec![SeriesElt::one(&c), u], vec![SeriesElt::zero(&c), e(1)]]);
        let b = BKModule::new(phi, None).unwrap();
        let (h, _) = anti_effective(&diso(&b).unwrap().hp).unwrap();
        let d = WLattice::standard(c.field(), 2);
        let (v, p) = admissibility_verdict(&h, &d, 3, 2).unwrap();
        let p = p.unwrap();
        assert!(v.is_bounded(), "{v:?} {:?}", p.sequence());
        assert!(p.det_ok() && p.inclusion_ok());
        let c1 = gamma_compose_check(&h, &d, 1, 1).unwrap();
        let c2 = gamma_compose_check(&h, &d, 1, 2).unwrap();
        assert!(c2 <= c1.max(2));
    }

    #[test]
    fn drift_detector() {
        let seq: Vec<DivisorProfile> = (0..4).map(|n| DivisorProfile::new(vec![n, -n])).collect();
        assert_eq!(detect_drift(&seq), Some((1, Direction::Up)));
        let flat = vec![DivisorProfile::new(vec![1, -1]); 4];
        assert_eq!(detect_drift(&flat), None);
    }
}
