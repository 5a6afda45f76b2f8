use std::mem::discriminant;

use crate::error::{Error, Result};
use crate::fontaine::{hp_functor, FilteredPhiN};
use crate::hodge_pink::lines::{subsets, wedge_annihilator};
use crate::hodge_pink::{
    enumerate_invariant_subspaces, t_newton, weakly_admissible, FiltrationJumps, PhiMod, Quantifier, Scope, SubSpec,
    Verdict,
};
use crate::lattices::{KField, KSpace, Mat, Subspace};
use crate::padic_series::coeff::{Coeff, CoeffField};
use crate::padic_series::poly::Poly;

/// Determinant over K of the square matrix with the given columns.
fn k_det<F: CoeffField>(kf: &KField<F>, cols: &[Vec<Poly<F>>]) -> Result<Poly<F>> {
    let n = cols.len();
    let mut m: Vec<Vec<Poly<F>>> = (0..n).map(|i| cols.iter().map(|c| kf.reduce(&c[i])).collect()).collect();
    let mut det = kf.one();
    for c in 0..n {
        let piv = (c..n)
            .filter_map(|i| kf.val(&m[i][c]).map(|v| (i, v)))
            .min_by_key(|(_, v)| *v)
            .map(|(i, _)| i);
        let Some(pr) = piv else { return Ok(kf.zero()) };
        if pr != c {
            m.swap(pr, c);
            det = det.neg();
        }
        det = kf.mul(&det, &m[c][c]);
        let inv = kf.inv(&m[c][c])?;
        for i in c + 1..n {
            let fct = kf.mul(&m[i][c], &inv);
            for j in c..n {
                let y = kf.sub(&m[i][j], &kf.mul(&fct, &m[c][j]));
                m[i][j] = y;
            }
        }
    }
    Ok(det)
}

/// Basis of D_K adapted to the filtration, with weights: b ∈ Fil^w.
fn adapted_basis<F: CoeffField>(fil: &FiltrationJumps<F>) -> Result<Vec<(Vec<Poly<F>>, i64)>> {
    let kf = fil.kfield();
    let n = fil.rank();
    let mut cur = KSpace::zero(kf, n);
    let mut out = Vec::new();
    for i in (fil.lo()..fil.hi()).rev() {
        for v in fil.fil(i).basis() {
            if !cur.contains(v)? {
                cur = cur.sum(&KSpace::span(kf, n, std::slice::from_ref(v))?)?;
                out.push((v.clone(), i));
            }
        }
    }
    Ok(out)
}

/// Fil^k of Λ^m D_K in the lexicographic subset basis.
fn wedge_fil<F: CoeffField>(fil: &FiltrationJumps<F>, m: usize, k: i64) -> Result<KSpace<F>> {
    let kf = fil.kfield();
    let r = fil.rank();
    let ad = adapted_basis(fil)?;
    let idx = subsets(r, m);
    let mut gens = Vec::new();
    for sel in subsets(r, m) {
        if sel.iter().map(|i| ad[*i].1).sum::<i64>() < k {
            continue;
        }
        let mut coords = Vec::with_capacity(idx.len());
        for rows in &idx {
            let cols: Vec<Vec<Poly<F>>> = sel.iter().map(|i| rows.iter().map(|t| ad[*i].0[*t].clone()).collect()).collect();
            coords.push(k_det(kf, &cols)?);
        }
        gens.push(coords);
    }
    KSpace::span(kf, idx.len(), &gens)
}

/// K_0-rational points W ∩ K_0^n.
fn k0_points<F: CoeffField>(w: &KSpace<F>) -> Result<Subspace<F>> {
    let kf = w.kfield();
    let f = kf.field();
    let n = w.ambient();
    let mut rows = Vec::new();
    for l in w.annihilator()? {
        for t in 0..kf.e() {
            rows.push(l.iter().map(|x| x.coeff(t)).collect::<Vec<_>>());
        }
    }
    if rows.is_empty() {
        return Ok(Subspace::full(f, n));
    }
    Ok(Subspace::span(f, n, &Mat::from_rows(f, rows).kernel()))
}

fn sub_invariants<F: CoeffField>(fp: &FilteredPhiN<F>, s: &SubSpec<F>) -> Result<(i64, i64)> {
    let th = fp.fil().restrict(s.basis())?.t_h();
    let tn = t_newton(&PhiMod::new(fp.phi().ctx(), s.a_sub().clone())?)?;
    Ok((th, tn))
}

fn is_n_stable<F: CoeffField>(n: &Mat<F>, s: &SubSpec<F>) -> bool {
    let sp = s.subspace();
    n.mul(s.basis()).col_vecs().iter().all(|v| sp.contains(v))
}

fn check_subs<F: CoeffField>(fp: &FilteredPhiN<F>, subs: &[SubSpec<F>], scope: Scope) -> Result<Verdict<F>> {
    for s in subs {
        let (th, tn) = sub_invariants(fp, s)?;
        if th > tn {
            return Ok(Verdict::False { witness: s.clone(), t_h: th, t_n: tn, scope });
        }
    }
    Ok(Verdict::True { scope })
}

/// Scalar φ_D forces N = 0, so every subspace is a sub-(φ, N)-module; a
/// D′ of dimension m violates iff its m-vector is a K_0-rational point of
/// Fil^{m·v(c)+1} Λ^m D_K.
fn scalar_tier<F: CoeffField>(fp: &FilteredPhiN<F>) -> Result<Verdict<F>> {
    let r = fp.rank();
    let f = fp.phi().field().clone();
    let vc = fp
        .phi()
        .a()
        .get(0, 0)
        .valuation()
        .ok_or_else(|| Error::precision("fontaine", "scalar φ is zero to precision"))?;
    for m in 1..r {
        let pts = k0_points(&wedge_fil(fp.fil(), m, m as i64 * vc + 1)?)?;
        if pts.dim() == 0 {
            continue;
        }
        let Some(ann) = pts.basis().iter().map(|w| wedge_annihilator(&f, r, m, w)).find(|a| a.dim() == m) else {
            if m == 1 || m + 1 == r {
                return Err(Error::internal("fontaine", "line of Λ^m D is not decomposable"));
            }
            return Ok(Verdict::Refused {
                reason: format!("Λ^{m} D contains violating vectors, none of the basis vectors is decomposable"),
            });
        };
        let witness = SubSpec::new(fp.phi(), ann.basis_matrix())?;
        let (th, tn) = sub_invariants(fp, &witness)?;
        if th <= tn {
            return Err(Error::internal("fontaine", "exterior-power witness does not violate"));
        }
        return Ok(Verdict::False { witness, t_h: th, t_n: tn, scope: Scope::ScalarLines });
    }
    Ok(Verdict::True { scope: Scope::ScalarLines })
}

/// Weak admissibility of a filtered (φ, N)-module over sub-(φ, N)-modules
/// in the quantifier scope.
pub fn filtered_weak_admissibility<F: CoeffField>(fp: &FilteredPhiN<F>, q: &Quantifier<F>) -> Result<Verdict<F>> {
    let r = fp.rank();
    let (th, tn) = (fp.fil().t_h(), t_newton(fp.phi())?);
    if th != tn {
        let full = SubSpec::new(fp.phi(), Mat::identity(fp.phi().field(), r))?;
        return Ok(Verdict::False { witness: full, t_h: th, t_n: tn, scope: Scope::Global });
    }
    match q {
        Quantifier::Supplied(subs) => {
            if let Some(bad) = subs.iter().position(|s| !is_n_stable(fp.monodromy(), s)) {
                return Err(Error::domain("fontaine", format!("supplied subspace {bad} is not N-stable")));
            }
            check_subs(fp, subs, Scope::Supplied(subs.len()))
        }
        Quantifier::Auto => {
            if r <= 1 {
                return Ok(Verdict::True { scope: Scope::Enumerated(r + 1) });
            }
            match enumerate_invariant_subspaces(fp.phi()) {
                Ok(subs) => {
                    let subs: Vec<_> = subs.into_iter().filter(|s| is_n_stable(fp.monodromy(), s)).collect();
                    check_subs(fp, &subs, Scope::Enumerated(subs.len()))
                }
                Err(e) if e.is_precision() => Err(e),
                Err(e) => {
                    if fp.phi().is_scalar() {
                        scalar_tier(fp)
                    } else {
                        Ok(Verdict::Refused { reason: e.to_string() })
                    }
                }
            }
        }
    }
}

/// Both verdicts of the equivalence between filtered and Hodge-Pink weak
/// admissibility under one quantifier strategy.
#[derive(Clone, Debug)]
pub struct CrossCheck<F: CoeffField> {
    pub filtered: Verdict<F>,
    pub hodge_pink: Verdict<F>,
    pub agree: bool,
}

pub fn lemma14_crosscheck<F: CoeffField>(fp: &FilteredPhiN<F>, q: &Quantifier<F>) -> Result<CrossCheck<F>> {
    let filtered = filtered_weak_admissibility(fp, q)?;
    let h = hp_functor(fp)?;
    let hodge_pink = weakly_admissible(&h, q)?;
    let (sf, sh) = (filtered.scope(), hodge_pink.scope());
    let same_kind = match (sf, sh) {
        (Some(a), Some(b)) => {
            discriminant(&a) == discriminant(&b) || matches!(a, Scope::Global) || matches!(b, Scope::Global)
        }
        (None, None) => true,
        _ => false,
    };
    if !same_kind {
        return Err(Error::domain("fontaine", format!("quantifier scopes differ: {sf:?} against {sh:?}")));
    }
    let agree = filtered.is_true() == hodge_pink.is_true() && filtered.is_false() == hodge_pink.is_false();
    Ok(CrossCheck { filtered, hodge_pink, agree })
}
