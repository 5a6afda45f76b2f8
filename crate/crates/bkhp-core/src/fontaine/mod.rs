//! Filtered (φ, N)-modules, the Hodge-Pink lattice they determine, and the
//! comparison of the two weak admissibility notions.

pub mod admissible;

use std::fmt;

use crate::error::{Error, Result};
use crate::hodge_pink::{default_ring, hodge_filtration, residue_vec, FiltrationJumps, HPStruct, PhiMod};
use crate::lattices::{k_kernel, EJetLattice, JetMat, KSpace, Mat};
use crate::padic_series::coeff::{Coeff, CoeffField};
use crate::padic_series::jet::JetRing;
use crate::padic_series::poly::Poly;

pub use admissible::{filtered_weak_admissibility, lemma14_crosscheck, CrossCheck};

/// (D, φ_D, N_D, Fil^• D_K).
#[derive(Clone, Debug)]
pub struct FilteredPhiN<F: CoeffField> {
    phi: PhiMod<F>,
    n: Mat<F>,
    fil: FiltrationJumps<F>,
}

/// Outcome of [`check_filtered`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FilteredCheck {
    Ok,
    /// Entry (i, j) of N·A − p·A·σ(N) is nonzero.
    Relation { row: usize, col: usize },
    /// Shape mismatch between A, N and the filtration.
    Shape(String),
}

impl fmt::Display for FilteredCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilteredCheck::Ok => write!(f, "ok"),
            FilteredCheck::Relation { row, col } => write!(f, "N·A ≠ p·A·σ(N) at entry ({row}, {col})"),
            FilteredCheck::Shape(s) => write!(f, "{s}"),
        }
    }
}

impl<F: CoeffField> FilteredPhiN<F> {
    /// Unchecked assembly; see [`check_filtered`].
    pub fn new(phi: PhiMod<F>, n: Mat<F>, fil: FiltrationJumps<F>) -> Self {
        FilteredPhiN { phi, n, fil }
    }
    /// Assembly that fails unless [`check_filtered`] passes.
    pub fn checked(phi: PhiMod<F>, n: Mat<F>, fil: FiltrationJumps<F>) -> Result<Self> {
        let fp = Self::new(phi, n, fil);
        match check_filtered(&fp) {
            FilteredCheck::Ok => Ok(fp),
            bad => Err(Error::domain("fontaine", bad.to_string())),
        }
    }
    pub fn phi(&self) -> &PhiMod<F> {
        &self.phi
    }
    pub fn monodromy(&self) -> &Mat<F> {
        &self.n
    }
    pub fn fil(&self) -> &FiltrationJumps<F> {
        &self.fil
    }
    pub fn rank(&self) -> usize {
        self.phi.rank()
    }
}

/// N·A = p·A·σ(N) at precision, and shapes agree.
pub fn check_filtered<F: CoeffField>(fp: &FilteredPhiN<F>) -> FilteredCheck {
    let r = fp.rank();
    if fp.n.rows() != r || fp.n.cols() != r {
        return FilteredCheck::Shape(format!("N must be {r}×{r}"));
    }
    if fp.fil.rank() != r {
        return FilteredCheck::Shape(format!("filtration lives in dimension {} instead of {r}", fp.fil.rank()));
    }
    let f = fp.phi.field();
    let p = f.from_i64(f.char_p() as i64);
    let a = fp.phi.a();
    let diff = fp.n.mul(a).sub(&a.mul(&fp.n.frobenius()).scale(&p));
    for i in 0..r {
        for j in 0..r {
            if !diff.get(i, j).is_zero() {
                return FilteredCheck::Relation { row: i, col: j };
            }
        }
    }
    FilteredCheck::Ok
}

fn const_jets<F: CoeffField>(ring: &JetRing<F>, m: &Mat<F>) -> JetMat<F> {
    let d = (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .map(|(i, j)| ring.constant(m.get(i, j).clone()))
        .collect();
    JetMat::from_vec(ring, m.rows(), m.cols(), d)
}

/// Connection matrix G with ∇(B·c) = B·(G·c + u·dc/du) for
/// ∇ = p·σ(N) + u·d/du.
fn connection<F: CoeffField>(b: &JetMat<F>, pn: &JetMat<F>) -> Result<JetMat<F>> {
    b.inverse()?.mul(&pn.mul(b)?.add(&b.u_derive()?)?)
}

/// Hodge-Pink lattice of a filtered (φ, N)-module, starting the downward
/// recursion at the top full index.
pub fn hp_functor<F: CoeffField>(fp: &FilteredPhiN<F>) -> Result<HPStruct<F>> {
    hp_functor_from(fp, fp.fil.top_full())
}

/// The recursion L_{i+1} = {x ∈ L_i : ∇x ∈ L_i, x mod E ∈ φ_D⁻¹Fil^{i+1}}
/// from L_start = U_D (start ≤ top full index), returning V = E^{−b}·L_b for
/// b the top nonzero index. The result is certified to reproduce the
/// filtration and to satisfy ∇V ⊆ E⁻¹V.
pub fn hp_functor_from<F: CoeffField>(fp: &FilteredPhiN<F>, start: i64) -> Result<HPStruct<F>> {
    let chk = check_filtered(fp);
    if chk != FilteredCheck::Ok {
        return Err(Error::domain("fontaine", chk.to_string()));
    }
    let r = fp.rank();
    let ctx = fp.phi.ctx();
    let ring = default_ring(ctx);
    if r == 0 {
        return HPStruct::standard(fp.phi.clone());
    }
    let a = start.min(fp.fil.top_full());
    let b = fp.fil.top_nonzero();
    if ring.order() < b - a + 2 {
        return Err(Error::precision(
            "fontaine",
            format!("jet order {} is below the recursion headroom {}", ring.order(), b - a + 2),
        ));
    }
    let kf = fp.fil.kfield().clone();
    let f = ctx.field();
    let ainv = fp.phi.a().inverse()?;
    let pn = const_jets(&ring, &fp.n.frobenius().scale(&f.from_i64(f.char_p() as i64)));
    let mut basis = JetMat::identity(&ring, r);
    for i in a..b {
        let target = fp.fil.fil(i + 1).map_k0(&ainv)?;
        let bbar: Vec<Vec<Poly<F>>> =
            (0..r).map(|k| residue_vec(&(0..r).map(|j| basis.get(k, j).clone()).collect::<Vec<_>>())).collect::<Result<_>>()?;
        let mut rows: Vec<Vec<Poly<F>>> = Vec::new();
        for l in target.annihilator()? {
            rows.push(
                (0..r)
                    .map(|j| (0..r).fold(kf.zero(), |acc, k| kf.add(&acc, &kf.mul(&l[k], &bbar[k][j]))))
                    .collect(),
            );
        }
        let g = connection(&basis, &pn)?;
        for k in 0..r {
            let mut row = Vec::with_capacity(r);
            for j in 0..r {
                let d = g
                    .get(k, j)
                    .digits(-1, 0)
                    .map_err(|_| Error::internal("fontaine", "connection has a pole of order ≥ 2"))?;
                row.push(kf.reduce(&d[0]));
            }
            rows.push(row);
        }
        let sol = k_kernel(&kf, &rows, r)?;
        let s = KSpace::span(&kf, r, &sol)?;
        let d = s.dim();
        let mut cols: Vec<Vec<Poly<F>>> = s.basis().to_vec();
        for k in (0..r).filter(|k| !s.pivots().contains(k)) {
            let mut v = vec![kf.zero(); r];
            v[k] = kf.one();
            cols.push(v);
        }
        let c = JetMat::from_cols(
            &ring,
            r,
            &cols.iter().map(|v| v.iter().map(|x| ring.from_poly(x)).collect()).collect::<Vec<_>>(),
        );
        let scale: Vec<_> = (0..r).map(|k| if k < d { ring.one() } else { ring.e() }).collect();
        basis = basis.mul(&c)?.mul(&JetMat::diag(&ring, scale))?;
    }
    let v = basis.mul_e_pow(-b);
    let h = HPStruct::new(fp.phi.clone(), EJetLattice::new(v)?)?;
    if !hodge_filtration(&h)?.eq_filtration(&fp.fil)? {
        return Err(Error::internal("fontaine", "recursion does not reproduce the filtration"));
    }
    if !griffiths_transversal(&h, &fp.n)? {
        return Err(Error::internal("fontaine", "recursion output violates Griffiths transversality"));
    }
    Ok(h)
}

/// (p·σ(N) + u·d/du)(V) ⊆ E⁻¹·V, generator by generator.
pub fn griffiths_transversal<F: CoeffField>(h: &HPStruct<F>, n: &Mat<F>) -> Result<bool> {
    let f = h.ctx().field();
    let pn = const_jets(h.ring(), &n.frobenius().scale(&f.from_i64(f.char_p() as i64)));
    let g = connection(h.basis(), &pn)?;
    Ok(g.entries().iter().all(|x| x.valuation().is_none_or(|v| v >= -1)))
}

/// Filtration from K_0-rational spanning vectors, in the step format of
/// [`FiltrationJumps::from_steps`].
pub fn k0_filtration<F: CoeffField>(
    phi: &PhiMod<F>,
    steps: &[(i64, Vec<Vec<F::Elt>>)],
) -> Result<FiltrationJumps<F>> {
    let kf = crate::lattices::KField::new(phi.ctx());
    let r = phi.rank();
    let mut sp = Vec::new();
    for (i, vs) in steps {
        let pv: Vec<Vec<Poly<F>>> = vs.iter().map(|v| v.iter().map(|c| Poly::constant(c.clone())).collect()).collect();
        sp.push((*i, KSpace::span(&kf, r, &pv)?));
    }
    FiltrationJumps::from_steps(&kf, r, &sp)
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use crate::padic_series::ctx::ctx0;
    use crate::padic_series::padic::PadicField;

    /// A = Id, N = 0, Fil⁻¹ = D_K, Fil⁰ = Fil¹ = K·e₁, Fil² = 0.
    pub fn alpha_filtered() -> FilteredPhiN<PadicField> {
        let c = ctx0();
        let f = c.field().clone();
        let phi = PhiMod::new(&c, Mat::identity(&f, 2)).unwrap();
        let e1 = vec![f.one(), f.zero()];
        let fil = k0_filtration(&phi, &[(-1, vec![e1.clone(), vec![f.zero(), f.one()]]), (0, vec![e1]), (2, vec![])]).unwrap();
        FilteredPhiN::checked(phi, Mat::zeros(&f, 2, 2), fil).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::alpha_filtered;
    use super::*;
    use crate::hodge_pink::testutil::{alpha_example, rank_one};
    use crate::hodge_pink::t_hodge;
    use crate::lattices::KField;
    use crate::padic_series::ctx::{ctx0, ctx1};
    use crate::padic_series::padic::PadicField;
    use proptest::prelude::*;

    fn same_lattice(a: &JetMat<PadicField>, b: &JetMat<PadicField>) -> bool {
        let t = a.solve_mat(b).unwrap();
        t.min_valuation().is_some_and(|v| v >= 0) && t.det().unwrap().valuation() == Some(0)
    }

    #[test]
    fn relation_checks() {
        let c = ctx0();
        let f = c.field().clone();
        let kf = KField::new(&c);
        let triv = FiltrationJumps::trivial(&kf, 2);
        let id = PhiMod::new(&c, Mat::identity(&f, 2)).unwrap();
        let n0 = Mat::zeros(&f, 2, 2);
        assert_eq!(check_filtered(&FilteredPhiN::new(id.clone(), n0, triv.clone())), FilteredCheck::Ok);
        let n = Mat::from_i64(&f, &[&[0, 1], &[0, 0]]);
        assert!(matches!(check_filtered(&FilteredPhiN::new(id, n, triv.clone())), FilteredCheck::Relation { .. }));
        // A = diag(p, 1) with N: e₁ ↦ e₂
        let a = PhiMod::new(&c, Mat::from_i64(&f, &[&[3, 0], &[0, 1]])).unwrap();
        let n = Mat::from_i64(&f, &[&[0, 0], &[1, 0]]);
        assert_eq!(check_filtered(&FilteredPhiN::new(a.clone(), n, triv.clone())), FilteredCheck::Ok);
        let n = Mat::from_i64(&f, &[&[0, 1], &[0, 0]]);
        assert!(matches!(check_filtered(&FilteredPhiN::new(a, n, triv)), FilteredCheck::Relation { .. }));
    }

    #[test]
    fn trivial_filtration_gives_standard_lattice() {
        let c = ctx0();
        let f = c.field().clone();
        let kf = KField::new(&c);
        let a = PhiMod::new(&c, Mat::from_i64(&f, &[&[3, 0], &[0, 1]])).unwrap();
        let n = Mat::from_i64(&f, &[&[0, 0], &[1, 0]]);
        let fp = FilteredPhiN::checked(a, n, FiltrationJumps::trivial(&kf, 2)).unwrap();
        let h = hp_functor(&fp).unwrap();
        assert!(same_lattice(h.basis(), &JetMat::identity(h.ring(), 2)));
    }

    #[test]
    fn alpha_filtration_gives_v0() {
        let fp = alpha_filtered();
        let h = hp_functor(&fp).unwrap();
        assert!(same_lattice(h.basis(), alpha_example(0).basis()));
        assert!(!same_lattice(h.basis(), alpha_example(1).basis()));
        // uniqueness: an earlier start gives the same lattice
        let h2 = hp_functor_from(&fp, -3).unwrap();
        assert!(same_lattice(h.basis(), h2.basis()));
        assert!(griffiths_transversal(&h, fp.monodromy()).unwrap());
        assert!(!griffiths_transversal(&alpha_example(1), fp.monodromy()).unwrap());
    }

    #[test]
    fn rank_one_recursion() {
        let c = ctx0();
        let f = c.field().clone();
        let phi = PhiMod::new(&c, Mat::identity(&f, 1)).unwrap();
        let one = vec![vec![f.one()]];
        // Fil¹ = D_K, Fil² = 0 ↔ V = E⁻¹U
        let fil = k0_filtration(&phi, &[(1, one.clone()), (2, vec![])]).unwrap();
        let h = hp_functor(&FilteredPhiN::checked(phi.clone(), Mat::zeros(&f, 1, 1), fil).unwrap()).unwrap();
        assert!(same_lattice(h.basis(), rank_one(0, -1).basis()));
        // Fil⁻¹ = D_K, Fil⁰ = 0 ↔ V = E·U
        let fil = k0_filtration(&phi, &[(-1, one), (0, vec![])]).unwrap();
        let h = hp_functor(&FilteredPhiN::checked(phi, Mat::zeros(&f, 1, 1), fil).unwrap()).unwrap();
        assert!(same_lattice(h.basis(), rank_one(0, 1).basis()));
    }

    #[test]
    fn headroom_is_enforced() {
        let c = ctx0();
        let f = c.field().clone();
        let phi = PhiMod::new(&c, Mat::identity(&f, 2)).unwrap();
        let e1 = vec![f.one(), f.zero()];
        // full through −1, nonzero through 4: needs order 4 + 1 + 2 = 7 > 6
        let fil = k0_filtration(&phi, &[(-1, vec![e1.clone(), vec![f.zero(), f.one()]]), (0, vec![e1]), (5, vec![])]).unwrap();
        let fp = FilteredPhiN::checked(phi, Mat::zeros(&f, 2, 2), fil).unwrap();
        assert!(hp_functor(&fp).unwrap_err().is_precision());
    }

    #[test]
    fn ramified_context() {
        // K = Q_2(√2): the line spanned by (1, u) is not K_0-rational
        let c = ctx1();
        let f = c.field().clone();
        let kf = KField::new(&c);
        let phi = PhiMod::new(&c, Mat::identity(&f, 2)).unwrap();
        let line = KSpace::span(&kf, 2, &[vec![Poly::one(&f), Poly::u(&f)]]).unwrap();
        let fil = FiltrationJumps::from_steps(&kf, 2, &[(0, KSpace::full(&kf, 2)), (1, line), (2, KSpace::zero(&kf, 2))]).unwrap();
        let fp = FilteredPhiN::checked(phi, Mat::zeros(&f, 2, 2), fil).unwrap();
        let h = hp_functor(&fp).unwrap();
        assert_eq!(t_hodge(&h).unwrap(), 1);
    }

    fn random_filtered(seed: [i64; 6], n_on: bool) -> FilteredPhiN<PadicField> {
        let c = ctx0();
        let f = c.field().clone();
        let (a, n) = if n_on {
            (Mat::from_i64(&f, &[&[3, 0], &[0, 1]]), Mat::from_i64(&f, &[&[0, 0], &[seed[5], 0]]))
        } else {
            (Mat::from_i64(&f, &[&[1 + 3 * seed[4].abs(), 0], &[0, 3]]), Mat::zeros(&f, 2, 2))
        };
        let phi = PhiMod::new(&c, a).unwrap();
        // weights within [−1, 2] keep the lattice sandwich inside h_E = 6
        let lo = seed[0].rem_euclid(2) - 1;
        let gap = seed[1].rem_euclid(2);
        let mut line = vec![f.from_i64(seed[2]), f.from_i64(seed[3])];
        if line.iter().all(|x| x.is_zero()) {
            line[0] = f.one();
        }
        let full = vec![vec![f.one(), f.zero()], vec![f.zero(), f.one()]];
        let fil = k0_filtration(&phi, &[(lo, full), (lo + 1, vec![line]), (lo + 2 + gap, vec![])]).unwrap();
        FilteredPhiN::checked(phi, n, fil).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn recursion_reproduces_filtration(seed in proptest::array::uniform6(-4i64..5), n_on in any::<bool>()) {
            let fp = random_filtered(seed, n_on);
            // certification inside hp_functor checks filtration recovery and transversality
            let h = hp_functor(&fp).unwrap();
            prop_assert_eq!(t_hodge(&h).unwrap(), fp.fil().t_h());
            let h2 = hp_functor_from(&fp, fp.fil().top_full() - 1).unwrap();
            prop_assert!(same_lattice(h.basis(), h2.basis()));
        }
    }
}
