use crate::error::{Error, Result};
use crate::hodge_pink::{default_ring, induced_sub_hp, SubSpec};
use crate::kisin::xi::{diso, xi_jets, Diso};
use crate::kisin::{pim_witness, BKModule, PimReport};
use crate::lattices::{JetMat, Mat, SMat};
use crate::padic_series::coeff::CoeffField;
use crate::padic_series::ctx::PrecCtx;
use crate::padic_series::jet::{Jet, JetRing};
use crate::padic_series::poly::Poly;
use crate::padic_series::series::SeriesElt;

/// Solution X of θ(X) ≡ target modulo Ŝ^r.
#[derive(Clone, Debug)]
pub struct ThetaSolution<F: CoeffField> {
    /// X_j = E^{−C}·u^{ek}·w_j with deg w_j < e·C summed over iterations.
    pub x: Vec<SeriesElt<F>>,
    /// Working u-offset exponent k.
    pub k: i64,
    pub iterations: u32,
}

fn check_ring<F: CoeffField>(ring: &JetRing<F>, ctx: &PrecCtx<F>) -> Result<()> {
    if ring.frob_index() != 0 || ring.ctx() != ctx {
        return Err(Error::domain("kisin", "targets must be jets at E in the module's context"));
    }
    Ok(())
}

/// Jet of φ^m(x) for an exact element of 𝔖[1/p][1/E].
fn exact_frob_jet<F: CoeffField>(ring: &JetRing<F>, x: &SeriesElt<F>, m: u32) -> Result<Jet<F>> {
    if x.is_truncated() {
        return Err(Error::domain("kisin", "θ needs exact polynomial entries"));
    }
    let num = ring.from_poly_frob(x.poly(), m)?;
    if x.d_e() == 0 {
        return Ok(num);
    }
    let fe = ring.from_poly_frob(x.ctx().e_poly(), m)?;
    num.mul(&fe.pow_i(-x.d_e())?)
}

/// θ(X) = Σ_i Phi·φ(Phi)⋯φ^{i−1}(Phi)·φ^i(X) in jets at E, summed until two
/// consecutive terms vanish at precision.
pub fn theta_apply<F: CoeffField>(phi: &SMat<F>, x: &[SeriesElt<F>], ring: &JetRing<F>) -> Result<Vec<Jet<F>>> {
    let r = phi.rows();
    let abs = ring.field().cap();
    let q = ring.ctx().q();
    let mut acc: Vec<Jet<F>> = vec![ring.zero(); r];
    let mut prod = JetMat::identity(ring, r);
    let mut quiet = 0;
    for i in 0..64u32 {
        if q.checked_pow(i).is_none_or(|v| v > 1 << 24) {
            break;
        }
        let fx: Vec<Jet<F>> = x.iter().map(|xj| exact_frob_jet(ring, xj, i)).collect::<Result<_>>()?;
        let term: Vec<Jet<F>> = prod.mul_vec(&fx)?.iter().map(|t| t.with_abs_prec(abs)).collect();
        for (a, t) in acc.iter_mut().zip(&term) {
            *a = a.add(t)?;
        }
        if i > 0 && term.iter().all(|t| t.is_zero()) {
            quiet += 1;
            if quiet >= 2 {
                return Ok(acc);
            }
        } else {
            quiet = 0;
        }
        prod = prod.mul(&phi.frob_to_jets(ring, i)?)?;
    }
    Err(Error::precision("kisin", "θ series did not converge in the jet ring"))
}

fn polar<F: CoeffField>(v: &[Jet<F>]) -> Result<Vec<Jet<F>>> {
    v.iter()
        .map(|x| {
            if x.prec() < 0 {
                Err(Error::precision("kisin", "polar part is not determined at jet precision"))
            } else {
                Ok(x.truncate(0))
            }
        })
        .collect()
}

/// Solves θ(X) ≡ target modulo Ŝ^r for X ∈ (u/E^C)·𝔖[1/p]^r. Each step
/// lifts the residual R through θ₀ = id with a correction u^{ek}E^{−C}w,
/// w ≡ u^{−ek}E^C·R mod E^C; the higher terms of θ shrink the correction by
/// the u-adic contraction once k > C². The offset k is raised when the
/// iteration stalls.
pub fn theta_solve<F: CoeffField>(phi: &SMat<F>, c: i64, target: &[Jet<F>]) -> Result<ThetaSolution<F>> {
    let ctx = phi.ctx().clone();
    let r = phi.rows();
    if phi.cols() != r || target.len() != r {
        return Err(Error::domain("kisin", "θ dimensions disagree"));
    }
    if c < 1 || 2 * c > ctx.h_e() {
        return Err(Error::domain("kisin", "θ needs 1 ≤ C and 2C ≤ h_E"));
    }
    for x in phi.entries() {
        if x.is_truncated() || x.d_e() > c || x.d_p() > c {
            return Err(Error::domain("kisin", "θ matrix must be exact and lie in p^{−C}E^{−C}·𝔖"));
        }
    }
    let ring = JetRing::at_e(&ctx, ctx.h_e());
    let mut tgt = Vec::with_capacity(r);
    for t in target {
        check_ring(t.ring(), &ctx)?;
        if t.valuation().is_some_and(|v| v < -c) {
            return Err(Error::domain("kisin", "target pole order exceeds C"));
        }
        let d = t.digits(-c, 0)?;
        tgt.push(ring.from_digits(-c, &d, 0));
    }
    let e = ctx.e() as i64;
    let f = ctx.field().clone();
    let epoly = ctx.e_poly().clone();
    let abs = f.cap();
    let k0 = c * c + 1;
    for k in k0..k0 + 4 {
        let shift = (e * k) as usize;
        if shift + (e * c) as usize >= ctx.m_u() {
            break;
        }
        let uinv = ring.u().pow(shift as u64)?.inv()?;
        let mut x: Vec<SeriesElt<F>> = vec![SeriesElt::zero(&ctx); r];
        for it in 0..80u32 {
            let th = theta_apply(phi, &x, &ring)?;
            let res: Vec<Jet<F>> = tgt.iter().zip(&th).map(|(t, h)| t.sub(h)).collect::<Result<_>>()?;
            let res: Vec<Jet<F>> = polar(&res)?.iter().map(|j| j.with_abs_prec(abs)).collect();
            if res.iter().all(|j| j.is_zero()) {
                return Ok(ThetaSolution { x, k, iterations: it });
            }
            for (xj, rj) in x.iter_mut().zip(&res) {
                if rj.is_zero() {
                    continue;
                }
                let y = rj.mul_e_pow(c).mul(&uinv)?;
                let digs = y.digits(0, c)?;
                let mut w = Poly::zero(&f);
                let mut ep = Poly::one(&f);
                for d in &digs {
                    w = w.add(&d.mul(&ep));
                    ep = ep.mul(&epoly);
                }
                let corr = SeriesElt::from_parts(&ctx, c, w.shift(shift), false);
                *xj = xj.add(&corr)?;
            }
        }
    }
    Err(Error::precision("kisin", "θ iteration did not converge within the u-truncation"))
}

fn rebase<F: CoeffField>(ctx: &PrecCtx<F>, x: &SeriesElt<F>) -> SeriesElt<F> {
    SeriesElt::from_parts(ctx, x.d_e(), x.poly().clone(), x.is_truncated())
}

/// Independent check of θ(X) ≡ target: sums the series with u-adic
/// arithmetic at doubled truncation, reduces the sum to jets and compares
/// polar parts.
pub fn theta_resum_check<F: CoeffField>(phi: &SMat<F>, x: &[SeriesElt<F>], target: &[Jet<F>]) -> Result<bool> {
    let ctx = phi.ctx();
    let big = PrecCtx::new(ctx.field().clone(), ctx.e_poly().coeffs().to_vec(), ctx.n_c(), 2 * ctx.m_u(), ctx.h_e())?;
    let r = phi.rows();
    let rows: Vec<Vec<SeriesElt<F>>> =
        (0..r).map(|i| (0..r).map(|j| rebase(&big, phi.get(i, j))).collect()).collect();
    let phi2 = SMat::from_rows(&big, rows);
    let xcol = SMat::from_rows(&big, x.iter().map(|v| vec![rebase(&big, v)]).collect());
    let mut acc = xcol.clone();
    let mut prod = SMat::identity(&big, r);
    let mut fpow = phi2.clone();
    let mut fx = xcol;
    for _ in 1..64 {
        prod = prod.mul(&fpow)?;
        fpow = fpow.frobenius()?;
        fx = fx.frobenius()?;
        let term = prod.mul(&fx)?;
        if term.is_zero() {
            break;
        }
        acc = acc.add(&term)?;
    }
    let ring = JetRing::at_e(&big, ctx.h_e());
    for (i, t) in target.iter().enumerate() {
        let s = acc.get(i, 0).to_jet(&ring)?;
        let lo = t.valuation().unwrap_or(0).min(0);
        let t2 = ring.from_digits(lo, &t.digits(lo, 0)?, 0);
        let d = s.sub(&t2)?;
        if d.prec() < 0 || !d.truncate(0).with_abs_prec(ctx.field().cap()).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Output of the extension builder.
#[derive(Clone, Debug)]
pub struct Extension<F: CoeffField> {
    pub module: BKModule<F>,
    pub x: ThetaSolution<F>,
    pub c: i64,
    pub pim: PimReport,
    pub pim_bound: i64,
    pub diso: Diso<F>,
    /// Class of the extension read back from 𝔻_iso.
    pub class: Vec<Jet<F>>,
    pub class_matches: bool,
    /// The induced sub-structure on D′ equals 𝔻_iso(B′).
    pub sub_matches: bool,
}

/// Extension 0 → B′ → B → 𝔖 → 0 with Phi = [[Phi′, X], [0, 1]] whose
/// 𝔻_iso has class T modulo V_{D′}. With Y = 0 the unknown Z of the top-right
/// block of ξ equals θ(X), and the class is −(ξ′φ_{D′})⁻¹θ(X), so X solves
/// θ(X) ≡ −ξ′·φ_{D′}·T modulo Ŝ.
pub fn build_extension<F: CoeffField>(bp: &BKModule<F>, t: &[Jet<F>]) -> Result<Extension<F>> {
    let ctx = bp.ctx().clone();
    let r = bp.rank();
    if t.len() != r {
        return Err(Error::domain("kisin", "class has the wrong rank"));
    }
    let dp = diso(bp)?;
    let ring = default_ring(&ctx);
    for x in t {
        check_ring(x.ring(), &ctx)?;
    }
    let phi_d = dp.hp.phi().a().clone();
    let xj = xi_jets(bp, &dp.xi, &ring)?;
    let pd = JetMat::from_vec(
        &ring,
        r,
        r,
        (0..r).flat_map(|i| (0..r).map(move |j| (i, j))).map(|(i, j)| ring.constant(phi_d.get(i, j).clone())).collect(),
    );
    let tr: Vec<Jet<F>> = t
        .iter()
        .map(|x| {
            let lo = x.valuation().unwrap_or(0).min(0);
            Ok(ring.from_digits(lo, &x.digits(lo, ring.order())?, x.prec().min(ring.order())))
        })
        .collect::<Result<_>>()?;
    let z = xj.mul(&pd)?.mul_vec(&tr)?;
    let target: Vec<Jet<F>> = z.iter().map(|x| x.neg()).collect();
    let pole = target.iter().filter_map(|x| x.valuation()).map(|v| -v).max().unwrap_or(0);
    let mut c = pole.max(1);
    for x in bp.phi().entries() {
        c = c.max(x.d_e()).max(x.d_p());
    }
    if 2 * c > ctx.h_e() {
        return Err(Error::precision("kisin", "class is not representable at the jet order"));
    }
    let sol = theta_solve(bp.phi(), c, &target)?;
    let n = r + 1;
    let mut phi = SMat::zeros(&ctx, n, n);
    for i in 0..r {
        for j in 0..r {
            phi.set(i, j, bp.phi().get(i, j).clone());
        }
        phi.set(i, r, sol.x[i].clone());
    }
    phi.set(r, r, SeriesElt::one(&ctx));
    let module = BKModule::new(phi, None)?;
    let q = ctx.q();
    let mut n_max = 0;
    while q.checked_pow(n_max + 1).is_some_and(|v| v <= ctx.m_u() as u64) {
        n_max += 1;
    }
    let base = pim_witness(bp, 0, n_max)?.observed();
    let xden = sol.x.iter().map(|x| x.d_p()).max().unwrap_or(0);
    let pim_bound = base + xden;
    let pim = pim_witness(&module, pim_bound, n_max)?;
    let d = diso(&module)?;
    let vb = d.hp.basis();
    let col = (0..n)
        .filter(|&j| vb.get(r, j).valuation() == Some(0))
        .min_by_key(|&j| (0..r).filter_map(|i| vb.get(i, j).valuation()).min().map(|v| -v).unwrap_or(0))
        .ok_or_else(|| Error::internal("kisin", "quotient of the extension lattice is not Ŝ"))?;
    let lead = vb.get(r, col).inv()?;
    let class: Vec<Jet<F>> = (0..r).map(|i| vb.get(i, col).mul(&lead)).collect::<Result<_>>()?;
    let diff: Vec<Jet<F>> = class.iter().zip(&tr).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
    let class_matches = dp.hp.lattice().contains(&diff)?;
    let f = ctx.field().clone();
    let mut emb = Mat::zeros(&f, n, r);
    for i in 0..r {
        emb.set(i, i, f.one());
    }
    let sub = induced_sub_hp(&d.hp, &SubSpec::new(d.hp.phi(), emb)?)?;
    let sub_matches = lattices_equal(sub.basis(), dp.hp.basis())?;
    Ok(Extension { module, x: sol, c, pim, pim_bound, diso: d, class, class_matches, sub_matches })
}

fn lattices_equal<F: CoeffField>(a: &JetMat<F>, b: &JetMat<F>) -> Result<bool> {
    let t = a.solve_mat(b)?;
    Ok(t.min_valuation().is_none_or(|v| v >= 0) && t.det()?.valuation() == Some(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kisin::testutil::*;
    use crate::padic_series::coeff::Coeff;
    use crate::padic_series::ctx::{ctx0, ctx_equal3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ring0() -> JetRing<crate::PadicField> {
        default_ring(&ctx0())
    }

    #[test]
    fn zero_target_gives_zero() {
        let c = ctx0();
        let phi = SMat::diag(&c, vec![SeriesElt::e_pow(&c, -1)]);
        let ring = ring0();
        let sol = theta_solve(&phi, 1, &[ring.zero()]).unwrap();
        assert!(sol.x[0].is_zero());
    }

    #[test]
    fn zero_matrix_is_identity_theta() {
        let c = ctx0();
        let phi = SMat::zeros(&c, 1, 1);
        let ring = ring0();
        let target = ring.u().mul_e_pow(-1);
        let sol = theta_solve(&phi, 1, &[target.clone()]).unwrap();
        let back = theta_apply(&phi, &sol.x, &ring).unwrap();
        assert!(back[0].sub(&target).unwrap().truncate(0).is_zero());
        assert!(theta_resum_check(&phi, &sol.x, &[target]).unwrap());
    }

    #[test]
    fn inverse_pe_example() {
        let c = ctx0();
        let f = c.field();
        let phi = SMat::diag(&c, vec![SeriesElt::e_pow(&c, -1).scale(&f.one().mul_pow(-1))]);
        let ring = ring0();
        let target = ring.u().mul_e_pow(-1);
        let sol = theta_solve(&phi, 1, &[target.clone()]).unwrap();
        let back = theta_apply(&phi, &sol.x, &ring).unwrap();
        assert!(back[0].sub(&target).unwrap().truncate(0).is_zero());
        assert!(theta_resum_check(&phi, &sol.x, &[target.clone()]).unwrap());
        // a perturbed X fails the independent check
        let bad = vec![sol.x[0].add(&SeriesElt::e_pow(&c, -1).mul(&SeriesElt::u(&c)).unwrap()).unwrap()];
        assert!(!theta_resum_check(&phi, &bad, &[target]).unwrap());
    }

    #[test]
    fn random_rank_two_targets() {
        let c = ctx0();
        let ring = ring0();
        let f = c.field();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let phi = SMat::from_rows(
            &c,
            vec![
                vec![SeriesElt::e_pow(&c, -1), sp(&c, &[0, 1])],
                vec![sp(&c, &[0]), SeriesElt::e_pow(&c, -2).scale(&f.one().mul_pow(-1))],
            ],
        );
        for _ in 0..2 {
            let t: Vec<Jet<_>> = (0..2)
                .map(|_| {
                    let a = ring.from_i64(rng.gen_range(-4..5)).mul_e_pow(-2);
                    let b = ring.from_i64(rng.gen_range(-4..5)).mul_e_pow(-1);
                    a.add(&b).unwrap()
                })
                .collect();
            let sol = theta_solve(&phi, 2, &t).unwrap();
            let back = theta_apply(&phi, &sol.x, &ring).unwrap();
            for (b, x) in back.iter().zip(&t) {
                assert!(b.sub(x).unwrap().truncate(0).is_zero());
            }
            assert!(theta_resum_check(&phi, &sol.x, &t).unwrap());
        }
    }

    #[test]
    fn preconditions() {
        let c = ctx0();
        let ring = ring0();
        let phi = SMat::diag(&c, vec![SeriesElt::e_pow(&c, -3)]);
        assert!(theta_solve(&phi, 1, &[ring.zero()]).is_err());
        assert!(theta_solve(&SMat::zeros(&c, 1, 1), 4, &[ring.zero()]).is_err());
        assert!(theta_solve(&SMat::zeros(&c, 1, 1), 1, &[ring.e_pow(-2)]).is_err());
    }

    #[test]
    fn split_extension() {
        let c = ctx0();
        let bp = rank_one_bk(&c, -1);
        let ring = ring0();
        let ext = build_extension(&bp, &[ring.zero()]).unwrap();
        assert!(ext.x.x[0].is_zero());
        assert!(ext.class_matches && ext.sub_matches);
    }

    #[test]
    fn rank_one_extension_class() {
        let c = ctx0();
        let bp = rank_one_bk(&c, -1);
        let ring = ring0();
        let t = ring.e_pow(-1);
        let ext = build_extension(&bp, &[t]).unwrap();
        assert!(ext.class_matches);
        assert!(ext.sub_matches);
        assert!(ext.pim.is_ok());
        assert_eq!(ext.module.rank(), 2);
        assert!(ext.diso.balanced());
    }

    #[test]
    fn remark_shape_extension_pim() {
        let b = remark_shape();
        let ring = ring0();
        let t = vec![ring.e_pow(-1), ring.from_i64(2).mul_e_pow(-1)];
        let ext = build_extension(&b, &t).unwrap();
        assert!(ext.class_matches);
        assert!(ext.pim.is_ok());
        assert!(ext.pim_bound <= 1 + ext.x.x.iter().map(|x| x.d_p()).max().unwrap());
    }

    #[test]
    fn equal_char_theta() {
        let c = ctx_equal3();
        let ring = default_ring(&c);
        let phi = SMat::diag(&c, vec![SeriesElt::e_pow(&c, -1)]);
        let target = ring.u().mul_e_pow(-1);
        let sol = theta_solve(&phi, 1, &[target.clone()]).unwrap();
        assert!(theta_resum_check(&phi, &sol.x, &[target]).unwrap());
    }
}
