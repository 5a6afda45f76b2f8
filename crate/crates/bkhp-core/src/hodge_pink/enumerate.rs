use num_integer::Integer;

use crate::error::{Error, Result};
use crate::hodge_pink::{PhiMod, SubSpec};
use crate::lattices::Mat;
use crate::padic_series::coeff::{Coeff, CoeffField};
use crate::padic_series::gf::{poly as gfp, Gf};
use crate::padic_series::poly::Poly;

/// Atoms beyond this count would produce more than 4096 subspaces.
const MAX_ATOMS: usize = 12;

pub(crate) const REFUSAL: &str = "supply subspaces explicitly or use scalar-line analysis";

fn refuse(why: &str) -> Error {
    Error::domain("hodge_pink", format!("{why}; {REFUSAL}"))
}

/// Root valuations h/e of the Newton polygon of a monic polynomial (lowest
/// degree first), with the segment lengths.
fn newton_slopes<F: CoeffField>(c: &[F::Elt]) -> Result<Vec<(i64, i64, usize)>> {
    let pts: Vec<(i64, i64)> =
        c.iter().enumerate().filter_map(|(i, x)| x.valuation().map(|v| (i as i64, v))).collect();
    if pts.first().map(|p| p.0) != Some(0) {
        return Err(Error::precision("hodge_pink", "constant term of the characteristic polynomial is zero to precision"));
    }
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b unless it lies strictly below the chord a–p
            if (b.1 - a.1) * (p.0 - a.0) >= (p.1 - a.1) * (b.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    Ok(hull
        .windows(2)
        .map(|w| {
            let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            let g = dx.gcd(&dy);
            (-dy / g, dx / g, dx as usize)
        })
        .collect())
}

fn lift<F: CoeffField>(f: &F, v: &[u32]) -> Poly<F> {
    Poly::from_coeffs(f.clone(), v.iter().map(|i| f.residue_lift(*i)).collect())
}

/// Residues of π^{−k}·p, which must be integral.
fn reduce<F: CoeffField>(p: &Poly<F>, k: i64) -> Result<Vec<u32>> {
    let out: Option<Vec<u32>> = p
        .coeffs()
        .iter()
        .map(|c| if c.is_zero() { Some(0) } else { c.mul_pow(-k).residue() })
        .collect();
    out.map(gfp::trim).ok_or_else(|| Error::internal("hodge_pink", "non-integral coefficient in Hensel lifting"))
}

/// Monic factor G₁ ≡ f1 of an integral polynomial g ≡ f1·f2 (mod π) with
/// f1 monic and coprime to f2, by linear Hensel lifting.
pub(crate) fn hensel<F: CoeffField>(k: &Gf, g: &Poly<F>, f1: &[u32], f2: &[u32]) -> Result<Poly<F>> {
    let f = g.field().clone();
    let (gg, _, t) = gfp::ext_gcd(k, f1, f2);
    if gg != [1] {
        return Err(Error::internal("hodge_pink", "Hensel factors are not coprime"));
    }
    let (mut g1, mut g2) = (lift(&f, f1), lift(&f, f2));
    for step in 1..=f.cap() {
        let err = g.sub(&g1.mul(&g2));
        if err.is_zero() {
            break;
        }
        let e = reduce(&err, step)?;
        let d1 = gfp::divrem(k, &gfp::mul(k, &t, &e), f1).1;
        let (d2, rem) = gfp::divrem(k, &gfp::sub(k, &e, &gfp::mul(k, f2, &d1)), f1);
        if !rem.is_empty() {
            return Err(Error::internal("hodge_pink", "Hensel correction is not exact"));
        }
        g1 = g1.add(&lift(&f, &d1).mul_pow(step));
        g2 = g2.add(&lift(&f, &d2).mul_pow(step));
    }
    Ok(g1)
}

fn eval_mat<F: CoeffField>(p: &Poly<F>, b: &Mat<F>) -> Mat<F> {
    let f = b.field();
    let n = b.rows();
    p.coeffs()
        .iter()
        .rev()
        .fold(Mat::zeros(f, n, n), |acc, c| acc.mul(b).add(&Mat::scalar(f, n, c)))
}

/// φ-stable irreducible pieces of D: for each Newton slope h/e of A, the
/// reduced unit-root part of χ(π^{−h}A^e) must be ∏P_j^e with distinct
/// irreducible P_j; each P_j lifts to an A-stable kernel.
fn atoms<F: CoeffField>(m: &PhiMod<F>) -> Result<Vec<Vec<Vec<F::Elt>>>> {
    let f = m.field();
    if !f.is_equal_char() && f.q() != f.char_p() {
        return Err(refuse("φ_D is semilinear over this residue field"));
    }
    let k = f.residue_field().clone();
    let a = m.a();
    let n = m.rank();
    let mut out = Vec::new();
    for (h, e, _len) in newton_slopes::<F>(&a.charpoly())? {
        let mut b = Mat::identity(f, n);
        for _ in 0..e {
            b = b.mul(a);
        }
        let b = b.mul_pow(-h);
        let chi = b.charpoly();
        let kmin = chi
            .iter()
            .filter_map(|c| c.valuation())
            .min()
            .ok_or_else(|| Error::precision("hodge_pink", "characteristic polynomial is zero to precision"))?;
        let g = Poly::from_coeffs(f.clone(), chi).mul_pow(-kmin);
        let gbar = reduce(&g, 0)?;
        let low = gbar.iter().position(|c| *c != 0).unwrap_or(0);
        let unit_part = gbar[low..].to_vec();
        for (pj, mult) in gfp::factor(&k, &unit_part) {
            if mult as i64 != e {
                return Err(refuse("characteristic polynomial is not regular modulo p"));
            }
            let f1 = (0..e).fold(vec![1u32], |acc, _| gfp::mul(&k, &acc, &pj));
            let (f2, rem) = gfp::divrem(&k, &gbar, &f1);
            if !rem.is_empty() {
                return Err(Error::internal("hodge_pink", "residual factor does not divide"));
            }
            let hj = hensel(&k, &g, &f1, &f2)?;
            let ker = eval_mat(&hj, &b).kernel();
            let want = e as usize * (pj.len() - 1);
            if ker.len() != want {
                return Err(Error::precision(
                    "hodge_pink",
                    format!("invariant piece has dimension {} instead of {want} at precision", ker.len()),
                ));
            }
            out.push(ker);
        }
    }
    if out.iter().map(|v| v.len()).sum::<usize>() != n {
        return Err(Error::precision("hodge_pink", "invariant pieces do not span D at precision"));
    }
    Ok(out)
}

/// All φ-stable subspaces of D when φ_D is linear and its characteristic
/// polynomial is regular modulo p; ordered by dimension, then by the subset
/// of irreducible pieces.
pub fn enumerate_invariant_subspaces<F: CoeffField>(m: &PhiMod<F>) -> Result<Vec<SubSpec<F>>> {
    let f = m.field();
    let n = m.rank();
    if n == 0 {
        return Ok(vec![SubSpec::new(m, Mat::zeros(f, 0, 0))?]);
    }
    let at = atoms(m)?;
    if at.len() > MAX_ATOMS {
        return Err(refuse("too many irreducible φ-stable pieces"));
    }
    let mut subs = Vec::new();
    for mask in 0u32..(1 << at.len()) {
        let cols: Vec<Vec<F::Elt>> =
            at.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).flat_map(|(_, v)| v.clone()).collect();
        let basis = if cols.is_empty() { Mat::zeros(f, n, 0) } else { Mat::from_cols(f, n, &cols) };
        subs.push((cols.len(), mask, SubSpec::new(m, basis)?));
    }
    subs.sort_by_key(|(d, mask, _)| (*d, *mask));
    Ok(subs.into_iter().map(|(_, _, s)| s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattices::Subspace;
    use crate::padic_series::ctx::{ctx0, ctx_equal3};

    #[test]
    fn diagonal_distinct_slopes() {
        let c = ctx0();
        let f = c.field().clone();
        let phi = PhiMod::new(&c, Mat::from_i64(&f, &[&[1, 0], &[0, 3]])).unwrap();
        let subs = enumerate_invariant_subspaces(&phi).unwrap();
        assert_eq!(subs.len(), 4);
        let dims: Vec<usize> = subs.iter().map(|s| s.dim()).collect();
        assert_eq!(dims, vec![0, 1, 1, 2]);
        let e1 = Subspace::span(&f, 2, &[vec![f.one(), f.zero()]]);
        let e2 = Subspace::span(&f, 2, &[vec![f.zero(), f.one()]]);
        assert!(subs[1..3].iter().any(|s| s.subspace().eq_space(&e1)));
        assert!(subs[1..3].iter().any(|s| s.subspace().eq_space(&e2)));
    }

    #[test]
    fn identity_refuses() {
        let c = ctx0();
        let f = c.field().clone();
        let phi = PhiMod::new(&c, Mat::identity(&f, 2)).unwrap();
        let err = enumerate_invariant_subspaces(&phi).unwrap_err();
        assert!(err.to_string().contains(REFUSAL));
    }

    #[test]
    fn eisenstein_is_irreducible() {
        let c = ctx0();
        let f = c.field().clone();
        let phi = PhiMod::new(&c, Mat::from_i64(&f, &[&[0, 3], &[1, 0]])).unwrap();
        let subs = enumerate_invariant_subspaces(&phi).unwrap();
        assert_eq!(subs.iter().map(|s| s.dim()).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn same_slope_distinct_residues() {
        let c = ctx0();
        let f = c.field().clone();
        // eigenvalues 1 and 2 + 3: unit roots with distinct reductions, plus
        // a non-diagonal basis change
        let a = Mat::from_i64(&f, &[&[1, 4], &[0, 5]]);
        let phi = PhiMod::new(&c, a.clone()).unwrap();
        let subs = enumerate_invariant_subspaces(&phi).unwrap();
        assert_eq!(subs.len(), 4);
        for s in &subs {
            let img = s.subspace().map(&a);
            assert!(img.eq_space(&s.subspace()));
        }
    }

    #[test]
    fn equal_characteristic_enumeration() {
        let c = ctx_equal3();
        let f = c.field().clone();
        // diag(1, π) in F_3((π))
        let a = Mat::diag(&f, &[f.one(), f.uniformizer()]);
        let phi = PhiMod::new(&c, a).unwrap();
        assert_eq!(enumerate_invariant_subspaces(&phi).unwrap().len(), 4);
    }

    #[test]
    fn newton_polygon_of_x2_minus_p() {
        let f = ctx0().field().clone();
        let c = vec![f.from_i64(-3), f.zero(), f.one()];
        assert_eq!(newton_slopes::<crate::PadicField>(&c).unwrap(), vec![(1, 2, 2)]);
        let c = vec![f.from_i64(3), f.from_i64(-4), f.one()];
        assert_eq!(newton_slopes::<crate::PadicField>(&c).unwrap(), vec![(1, 1, 1), (0, 1, 1)]);
    }

    #[test]
    fn hensel_splits_known_product() {
        let f = ctx0().field().clone();
        let k = f.residue_field().clone();
        // (x − 4)(x − 2) = x² − 6x + 8 lifts x − 1 against x − 2 over F_3
        let g = Poly::from_i64s(&f, &[8, -6, 1]);
        let h = hensel(&k, &g, &[2, 1], &[1, 1]).unwrap();
        assert!(h.eq_prec(&Poly::from_i64s(&f, &[-4, 1])));
    }
}
