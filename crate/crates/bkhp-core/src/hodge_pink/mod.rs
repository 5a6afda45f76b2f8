//! φ-modules over K_0, Hodge-Pink lattices, the invariants t_N and t_H, the
//! induced Hodge filtration, substructures and weak admissibility.

pub mod admissible;
pub mod enumerate;
pub mod lines;
pub mod sub;

use crate::error::{Error, Result};
use crate::lattices::{EJetLattice, JetMat, KField, KSpace, Mat};
use crate::padic_series::coeff::{Coeff, CoeffField};
use crate::padic_series::ctx::PrecCtx;
use crate::padic_series::jet::{Jet, JetRing};
use crate::padic_series::poly::Poly;

pub use admissible::{weakly_admissible, Quantifier, Scope, Verdict};
pub use enumerate::enumerate_invariant_subspaces;
pub use lines::{scalar_line_jump_analysis, LineJump};
pub use sub::{induced_quotient_hp, induced_sub_hp, SubSpec};

/// (D, φ_D) with φ_D given by its matrix A in a fixed basis; over k = F_q
/// the twist ^φD is identified with D.
#[derive(Clone, Debug)]
pub struct PhiMod<F: CoeffField> {
    ctx: PrecCtx<F>,
    a: Mat<F>,
}

impl<F: CoeffField> PhiMod<F> {
    pub fn new(ctx: &PrecCtx<F>, a: Mat<F>) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::domain("hodge_pink", "φ-matrix must be square"));
        }
        if a.rows() > 0 && a.det().valuation().is_none() {
            return Err(Error::precision("hodge_pink", "φ-matrix is singular to precision"));
        }
        Ok(PhiMod { ctx: ctx.clone(), a })
    }
    pub fn ctx(&self) -> &PrecCtx<F> {
        &self.ctx
    }
    pub fn field(&self) -> &F {
        self.ctx.field()
    }
    pub fn a(&self) -> &Mat<F> {
        &self.a
    }
    pub fn rank(&self) -> usize {
        self.a.rows()
    }
    pub fn is_scalar(&self) -> bool {
        self.a.is_scalar()
    }
}

/// p-adic valuation of det A.
pub fn t_newton<F: CoeffField>(m: &PhiMod<F>) -> Result<i64> {
    if m.rank() == 0 {
        return Ok(0);
    }
    m.a
        .det()
        .valuation()
        .ok_or_else(|| Error::precision("hodge_pink", "det A is zero to precision"))
}

/// Decreasing exhaustive separated filtration of K^n: `spaces[k]` is
/// Fil^{lo+k}; the first entry is K^n, the last is zero.
#[derive(Clone, Debug)]
pub struct FiltrationJumps<F: CoeffField> {
    kf: KField<F>,
    n: usize,
    lo: i64,
    spaces: Vec<KSpace<F>>,
}

impl<F: CoeffField> FiltrationJumps<F> {
    pub fn new(kf: &KField<F>, n: usize, lo: i64, spaces: Vec<KSpace<F>>) -> Result<Self> {
        let bad = |m: &str| Err(Error::domain("hodge_pink", m.to_string()));
        if spaces.is_empty() || !spaces[0].is_full() || !spaces.last().expect("nonempty").is_zero() {
            return bad("filtration must start full and end at zero");
        }
        for w in spaces.windows(2) {
            if !w[0].contains_space(&w[1])? {
                return bad("filtration is not decreasing");
            }
        }
        Ok(FiltrationJumps { kf: kf.clone(), n, lo, spaces })
    }
    /// From steps (i, S): Fil^j = S for the largest listed i ≤ j, K^n below
    /// the first step; the last listed space must be zero.
    pub fn from_steps(kf: &KField<F>, n: usize, steps: &[(i64, KSpace<F>)]) -> Result<Self> {
        let mut steps = steps.to_vec();
        steps.sort_by_key(|(i, _)| *i);
        let Some((first, s0)) = steps.first().cloned() else {
            return Err(Error::domain("hodge_pink", "empty filtration"));
        };
        let lo = if s0.is_full() { first } else { first - 1 };
        let hi = steps.last().expect("nonempty").0;
        let mut spaces = Vec::new();
        for j in lo..=hi {
            let s = steps
                .iter()
                .rev()
                .find(|(i, _)| *i <= j)
                .map(|(_, s)| s.clone())
                .unwrap_or_else(|| KSpace::full(kf, n));
            spaces.push(s);
        }
        Self::new(kf, n, lo, spaces)
    }
    /// Fil^0 = K^n, Fil^1 = 0.
    pub fn trivial(kf: &KField<F>, n: usize) -> Self {
        FiltrationJumps { kf: kf.clone(), n, lo: 0, spaces: vec![KSpace::full(kf, n), KSpace::zero(kf, n)] }
    }
    pub fn kfield(&self) -> &KField<F> {
        &self.kf
    }
    pub fn rank(&self) -> usize {
        self.n
    }
    /// Lowest index with Fil = K^n in the stored window.
    pub fn lo(&self) -> i64 {
        self.lo
    }
    /// Index of the stored zero space.
    pub fn hi(&self) -> i64 {
        self.lo + self.spaces.len() as i64 - 1
    }
    pub fn fil(&self, i: i64) -> KSpace<F> {
        if i <= self.lo {
            return self.spaces[0].clone();
        }
        if i >= self.hi() {
            return KSpace::zero(&self.kf, self.n);
        }
        self.spaces[(i - self.lo) as usize].clone()
    }
    /// max{i : Fil^i = K^n}.
    pub fn top_full(&self) -> i64 {
        let mut i = self.lo;
        while self.fil(i + 1).is_full() && i + 1 < self.hi() {
            i += 1;
        }
        if self.n == 0 {
            return self.hi();
        }
        i
    }
    /// max{i : Fil^i ≠ 0}.
    pub fn top_nonzero(&self) -> i64 {
        let mut i = self.hi() - 1;
        while i > self.lo && self.fil(i).is_zero() {
            i -= 1;
        }
        i
    }
    /// (i, dim gr^i) for the nonzero graded pieces.
    pub fn jumps(&self) -> Vec<(i64, usize)> {
        (self.lo..self.hi())
            .filter_map(|i| {
                let d = self.fil(i).dim() - self.fil(i + 1).dim();
                (d > 0).then_some((i, d))
            })
            .collect()
    }
    /// Σ i·dim gr^i, the Hodge invariant of the filtration.
    pub fn t_h(&self) -> i64 {
        self.jumps().iter().map(|(i, d)| i * *d as i64).sum()
    }
    pub fn eq_filtration(&self, o: &Self) -> Result<bool> {
        if self.n != o.n {
            return Ok(false);
        }
        for i in self.lo.min(o.lo)..=self.hi().max(o.hi()) {
            if !self.fil(i).eq_space(&o.fil(i))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
    /// Induced filtration Fil^i ∩ D′_K on a subspace with basis columns `b`,
    /// in the coordinates of that basis.
    pub fn restrict(&self, b: &Mat<F>) -> Result<Self> {
        let dk = KSpace::from_k0_cols(&self.kf, b)?;
        let d = b.cols();
        let mut spaces = Vec::new();
        for i in self.lo..=self.hi() {
            spaces.push(self.fil(i).intersect(&dk)?.coords_in(b)?);
        }
        Self::new(&self.kf, d, self.lo, spaces)
    }
    /// Image under a K_0-isomorphism.
    pub fn map_k0(&self, m: &Mat<F>) -> Result<Self> {
        let spaces: Result<Vec<_>> = self.spaces.iter().map(|s| s.map_k0(m)).collect();
        Self::new(&self.kf, self.n, self.lo, spaces?)
    }
}

/// (D, φ_D, V) with V an Ŝ-lattice in ^φD ⊗ Ŝ[1/E] given relative to
/// U_D = ^φD ⊗ Ŝ (identity frame).
#[derive(Clone, Debug)]
pub struct HPStruct<F: CoeffField> {
    phi: PhiMod<F>,
    v: EJetLattice<F>,
}

impl<F: CoeffField> HPStruct<F> {
    pub fn new(phi: PhiMod<F>, v: EJetLattice<F>) -> Result<Self> {
        if phi.rank() != v.rank() {
            return Err(Error::domain("hodge_pink", "lattice rank differs from the φ-module rank"));
        }
        if v.ring().frob_index() != 0 {
            return Err(Error::domain("hodge_pink", "Hodge-Pink lattices live at E"));
        }
        let h = HPStruct { phi, v };
        let (s, t) = h.sandwich()?;
        if 2 * s.abs().max(t.abs()) > h.ring().order() {
            return Err(Error::precision("hodge_pink", "lattice sandwich exceeds the jet order"));
        }
        Ok(h)
    }
    /// V = U_D.
    pub fn standard(phi: PhiMod<F>) -> Result<Self> {
        let ring = default_ring(phi.ctx());
        let v = EJetLattice::standard(&ring, phi.rank());
        Self::new(phi, v)
    }
    pub fn phi(&self) -> &PhiMod<F> {
        &self.phi
    }
    pub fn lattice(&self) -> &EJetLattice<F> {
        &self.v
    }
    pub fn basis(&self) -> &JetMat<F> {
        self.v.basis()
    }
    pub fn ring(&self) -> &JetRing<F> {
        self.v.ring()
    }
    pub fn rank(&self) -> usize {
        self.phi.rank()
    }
    pub fn ctx(&self) -> &PrecCtx<F> {
        self.phi.ctx()
    }
    /// (s, t) with E^t·U_D ⊆ V ⊆ E^s·U_D tight.
    pub fn sandwich(&self) -> Result<(i64, i64)> {
        if self.rank() == 0 {
            return Ok((0, 0));
        }
        let e = self.v.exponents()?;
        Ok((e[0], *e.last().expect("nonempty")))
    }
}

/// Jet ring of order h_E at E for a context.
pub fn default_ring<F: CoeffField>(ctx: &PrecCtx<F>) -> JetRing<F> {
    JetRing::at_e(ctx, ctx.h_e())
}

/// −l where det V = E^l·unit.
pub fn t_hodge<F: CoeffField>(h: &HPStruct<F>) -> Result<i64> {
    if h.rank() == 0 {
        return Ok(0);
    }
    let d = h.basis().det()?;
    let l = d
        .valuation()
        .ok_or_else(|| Error::precision("hodge_pink", "det V is zero to precision"))?;
    Ok(-l)
}

/// Residue modulo E of an integral jet vector.
pub(crate) fn residue_vec<F: CoeffField>(v: &[Jet<F>]) -> Result<Vec<Poly<F>>> {
    v.iter()
        .map(|x| x.residue().map_err(|_| Error::internal("hodge_pink", "expected an integral jet")))
        .collect()
}

/// Hodge filtration of V: φ_D⁻¹(Fil^i) = (E^iV ∩ U_D)/(E^iV ∩ EU_D).
pub fn hodge_filtration<F: CoeffField>(h: &HPStruct<F>) -> Result<FiltrationJumps<F>> {
    let n = h.rank();
    let kf = KField::new(h.ctx());
    if n == 0 {
        return FiltrationJumps::new(&kf, 0, 0, vec![KSpace::zero(&kf, 0)]);
    }
    let sm = h.basis().smith_full()?;
    if sm.exps.len() < n {
        return Err(Error::precision("hodge_pink", "V is singular to precision"));
    }
    let p = sm.pinv.inverse()?;
    let cols: Vec<Vec<Poly<F>>> = (0..n).map(|j| residue_vec(&p.col(j))).collect::<Result<_>>()?;
    let amax = *sm.exps.iter().max().expect("nonempty");
    let amin = *sm.exps.iter().min().expect("nonempty");
    let (lo, hi) = (-amax, -amin + 1);
    let mut spaces = Vec::new();
    for i in lo..=hi {
        let vs: Vec<Vec<Poly<F>>> =
            cols.iter().zip(&sm.exps).filter(|(_, a)| **a + i <= 0).map(|(c, _)| c.clone()).collect();
        let s = KSpace::span(&kf, n, &vs)?;
        spaces.push(s.map_k0(h.phi().a())?);
    }
    FiltrationJumps::new(&kf, n, lo, spaces)
}

/// φ_D ↦ π^{−k}·φ_D, V ↦ E^k·V; t_N and t_H drop by k·r.
pub fn twist<F: CoeffField>(h: &HPStruct<F>, k: i64) -> Result<HPStruct<F>> {
    let a = h.phi().a().mul_pow(-k);
    let phi = PhiMod::new(h.ctx(), a)?;
    let v = EJetLattice::new(h.basis().mul_e_pow(k))?;
    HPStruct::new(phi, v)
}

/// Jet E^k·p for an exact polynomial p.
pub fn jet_e_poly<F: CoeffField>(ring: &JetRing<F>, k: i64, p: &Poly<F>) -> Jet<F> {
    ring.from_poly(p).mul_e_pow(k)
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use crate::padic_series::ctx::ctx0;
    use crate::padic_series::padic::PadicField;

    /// The α-example: A = Id, V^α spanned by E⁻¹e₁ + α·e₂ and E·e₂.
    pub fn alpha_example(alpha: i64) -> HPStruct<PadicField> {
        let c = ctx0();
        let f = c.field().clone();
        let ring = default_ring(&c);
        let phi = PhiMod::new(&c, Mat::identity(&f, 2)).unwrap();
        let v = JetMat::from_vec(
            &ring,
            2,
            2,
            vec![ring.e_pow(-1), ring.zero(), ring.from_i64(alpha), ring.e()],
        );
        HPStruct::new(phi, EJetLattice::new(v).unwrap()).unwrap()
    }

    pub fn rank_one(a_val: i64, l: i64) -> HPStruct<PadicField> {
        let c = ctx0();
        let f = c.field().clone();
        let ring = default_ring(&c);
        let phi = PhiMod::new(&c, Mat::diag(&f, &[f.one().mul_pow(a_val)])).unwrap();
        let v = JetMat::diag(&ring, vec![ring.e_pow(l)]);
        HPStruct::new(phi, EJetLattice::new(v).unwrap()).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use crate::padic_series::ctx::ctx0;
    use proptest::prelude::*;

    #[test]
    fn newton_invariant() {
        let c = ctx0();
        let f = c.field().clone();
        assert_eq!(t_newton(&PhiMod::new(&c, Mat::diag(&f, &[f.from_i64(3)])).unwrap()).unwrap(), 1);
        assert_eq!(t_newton(&PhiMod::new(&c, Mat::identity(&f, 2)).unwrap()).unwrap(), 0);
        let a = Mat::from_i64(&f, &[&[1, 0], &[0, -3]]);
        assert_eq!(t_newton(&PhiMod::new(&c, a).unwrap()).unwrap(), 1);
    }

    #[test]
    fn hodge_invariant() {
        assert_eq!(t_hodge(&rank_one(0, 0)).unwrap(), 0);
        assert_eq!(t_hodge(&rank_one(0, -2)).unwrap(), 2);
        assert_eq!(t_hodge(&alpha_example(1)).unwrap(), 0);
        assert_eq!(t_hodge(&alpha_example(0)).unwrap(), 0);
    }

    #[test]
    fn filtration_of_standard_and_rank_one() {
        let f0 = hodge_filtration(&rank_one(0, 0)).unwrap();
        assert!(f0.fil(0).is_full() && f0.fil(1).is_zero());
        // V = E⁻¹U: Fil¹ = D_K, Fil² = 0
        let f1 = hodge_filtration(&rank_one(0, -1)).unwrap();
        assert!(f1.fil(1).is_full() && f1.fil(2).is_zero());
        assert_eq!(f1.t_h(), 1);
        // V = E·U: Fil⁻¹ = D_K, Fil⁰ = 0
        let f2 = hodge_filtration(&rank_one(0, 1)).unwrap();
        assert!(f2.fil(-1).is_full() && f2.fil(0).is_zero());
    }

    #[test]
    fn alpha_filtration() {
        for alpha in [0, 1, 2, 5] {
            let h = alpha_example(alpha);
            let fil = hodge_filtration(&h).unwrap();
            let kf = fil.kfield().clone();
            let f = h.ctx().field().clone();
            let e1 = KSpace::span(&kf, 2, &[vec![Poly::one(&f), Poly::zero(&f)]]).unwrap();
            assert!(fil.fil(-1).is_full());
            assert!(fil.fil(0).eq_space(&e1).unwrap());
            assert!(fil.fil(1).eq_space(&e1).unwrap());
            assert!(fil.fil(2).is_zero());
            assert_eq!(fil.t_h(), t_hodge(&h).unwrap());
        }
    }

    #[test]
    fn twist_roundtrip() {
        let h = alpha_example(1);
        let t = twist(&h, 1).unwrap();
        assert_eq!(t_newton(t.phi()).unwrap(), -2);
        assert_eq!(t_hodge(&t).unwrap(), -2);
        assert_eq!(t.sandwich().unwrap(), (0, 2));
        let back = twist(&t, -1).unwrap();
        assert!(back.basis().eq_prec(h.basis()));
        assert!(back.phi().a().eq_prec(h.phi().a()));
        let r1 = rank_one(1, -1);
        let r1t = twist(&r1, 1).unwrap();
        assert_eq!((t_newton(r1t.phi()).unwrap(), t_hodge(&r1t).unwrap()), (0, 0));
    }

    proptest! {
        /// det V against U equals the total filtration weight.
        #[test]
        fn filtration_weight_matches_determinant(vals in proptest::array::uniform4(-4i64..5), k in proptest::array::uniform3(-2i64..3)) {
            let c = ctx0();
            let f = c.field().clone();
            let ring = default_ring(&c);
            let phi = PhiMod::new(&c, Mat::from_i64(&f, &[&[1, 1], &[0, 3]])).unwrap();
            let jets = vec![
                ring.from_i64(vals[0]).add(&ring.e()).unwrap().mul_e_pow(k[0]),
                ring.from_i64(vals[1]).mul_e_pow(k[2]),
                ring.from_i64(vals[2]).add(&ring.u()).unwrap(),
                ring.from_i64(vals[3]).add(&ring.e()).unwrap().mul_e_pow(k[1]),
            ];
            let Ok(lat) = EJetLattice::new(JetMat::from_vec(&ring, 2, 2, jets)) else { return Ok(()) };
            let Ok(h) = HPStruct::new(phi, lat) else { return Ok(()) };
            let fil = hodge_filtration(&h).unwrap();
            prop_assert_eq!(fil.t_h(), t_hodge(&h).unwrap());
        }

        #[test]
        fn twist_inverts(alpha in 1i64..9, k in -2i64..3) {
            let h = alpha_example(alpha);
            let t = twist(&twist(&h, k).unwrap(), -k).unwrap();
            prop_assert!(t.basis().eq_prec(h.basis()));
            prop_assert!(t.phi().a().eq_prec(h.phi().a()));
            let tk = twist(&h, k).unwrap();
            prop_assert_eq!(t_hodge(&tk).unwrap(), t_hodge(&h).unwrap() - 2 * k);
        }
    }
}
