use crate::error::{Error, Result};
use crate::hodge_pink::{HPStruct, PhiMod};
use crate::lattices::{EJetLattice, JetMat, Mat, Subspace};
use crate::padic_series::coeff::CoeffField;
use crate::padic_series::jet::JetRing;

/// A φ-stable K_0-subspace D′ ⊆ D given by basis columns, together with the
/// matrix of φ_{D′} in that basis.
#[derive(Clone, Debug)]
pub struct SubSpec<F: CoeffField> {
    basis: Mat<F>,
    a_sub: Mat<F>,
}

impl<F: CoeffField> SubSpec<F> {
    /// Verifies A·σ(B) = B·A′ at precision.
    pub fn new(m: &PhiMod<F>, basis: Mat<F>) -> Result<Self> {
        if basis.rows() != m.rank() {
            return Err(Error::domain("hodge_pink", "subspace basis has the wrong ambient dimension"));
        }
        if basis.rank() != basis.cols() {
            return Err(Error::domain("hodge_pink", "subspace basis is not linearly independent"));
        }
        let img = m.a().mul(&basis.frobenius());
        let a_sub = basis
            .solve_mat(&img)
            .filter(|x| basis.mul(x).eq_prec(&img))
            .ok_or_else(|| Error::domain("hodge_pink", "subspace is not φ-stable at precision"))?;
        Ok(SubSpec { basis, a_sub })
    }
    /// From spanning vectors (duplicates and dependencies allowed).
    pub fn from_span(m: &PhiMod<F>, vs: &[Vec<F::Elt>]) -> Result<Self> {
        let s = Subspace::span(m.field(), m.rank(), vs);
        Self::new(m, s.basis_matrix())
    }
    pub fn basis(&self) -> &Mat<F> {
        &self.basis
    }
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
    pub fn ambient(&self) -> usize {
        self.basis.rows()
    }
    /// Matrix of φ_{D′} in the chosen basis.
    pub fn a_sub(&self) -> &Mat<F> {
        &self.a_sub
    }
    pub fn subspace(&self) -> Subspace<F> {
        Subspace::span(self.basis.field(), self.ambient(), &self.basis.col_vecs())
    }
    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }
    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient()
    }
}

fn const_jets<F: CoeffField>(ring: &JetRing<F>, m: &Mat<F>) -> JetMat<F> {
    let d = (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .map(|(i, j)| ring.constant(m.get(i, j).clone()))
        .collect();
    JetMat::from_vec(ring, m.rows(), m.cols(), d)
}

/// Frames [σ(B) | C] of ^φD and [B | C] of D with C standard complement
/// vectors (σ fixes them and the pivots of σ(B) agree with those of B).
fn frames<F: CoeffField>(s: &SubSpec<F>) -> (Mat<F>, Mat<F>, usize) {
    let f = s.basis.field();
    let comp = s.subspace().complement_coords();
    let n = s.ambient();
    let mut cols = s.basis.col_vecs();
    let mut cols_phi = s.basis.frobenius().col_vecs();
    for &k in &comp {
        let mut v = vec![f.zero(); n];
        v[k] = f.one();
        cols.push(v.clone());
        cols_phi.push(v);
    }
    (Mat::from_cols(f, n, &cols_phi), Mat::from_cols(f, n, &cols), s.dim())
}

/// Sub-structure (D′, φ_{D′}, V ∩ ^φD′⊗Ŝ[1/E]) in the coordinates of the
/// basis of D′.
pub fn induced_sub_hp<F: CoeffField>(h: &HPStruct<F>, s: &SubSpec<F>) -> Result<HPStruct<F>> {
    if s.ambient() != h.rank() {
        return Err(Error::domain("hodge_pink", "subspace lives in a different module"));
    }
    let d = s.dim();
    let phi = PhiMod::new(h.ctx(), s.a_sub.clone())?;
    let ring = h.ring();
    if d == 0 {
        return HPStruct::new(phi, EJetLattice::new(JetMat::zeros(ring, 0, 0))?);
    }
    let (mphi, _, _) = frames(s);
    let x = const_jets(ring, &mphi).solve_mat(h.basis())?;
    let y = x.inverse()?;
    let y_top = y.submatrix(0, h.rank(), 0, d);
    // y′ ∈ V iff Y·(y′, 0) is integral; Smith form pinv·Y′·q = diag(E^c·unit)
    let sm = y_top.smith_full()?;
    if sm.exps.len() < d {
        return Err(Error::precision("hodge_pink", "induced lattice is degenerate to precision"));
    }
    let inv_d: Vec<_> = (0..d).map(|j| sm.d.get(j, j).inv()).collect::<Result<_>>()?;
    let v = sm.q.mul(&JetMat::diag(ring, inv_d))?;
    HPStruct::new(phi, EJetLattice::new(v)?)
}

/// Quotient structure (D/D′, φ, image of V) in the basis of complement
/// standard vectors.
pub fn induced_quotient_hp<F: CoeffField>(h: &HPStruct<F>, s: &SubSpec<F>) -> Result<HPStruct<F>> {
    let r = h.rank();
    let d = s.dim();
    let (mphi, m0, _) = frames(s);
    let blk = m0.inverse()?.mul(h.phi().a()).mul(&mphi);
    let idx: Vec<usize> = (d..r).collect();
    let phi = PhiMod::new(h.ctx(), blk.submatrix(&idx, &idx))?;
    let ring = h.ring();
    if d == r {
        return HPStruct::new(phi, EJetLattice::new(JetMat::zeros(ring, 0, 0))?);
    }
    let x = const_jets(ring, &mphi).solve_mat(h.basis())?;
    let bottom = x.submatrix(d, r, 0, r);
    let sm = bottom.smith_full()?;
    if sm.exps.len() < r - d {
        return Err(Error::precision("hodge_pink", "quotient lattice is degenerate to precision"));
    }
    let p = sm.pinv.inverse()?;
    let diag: Vec<_> = (0..r - d).map(|j| sm.d.get(j, j).clone()).collect();
    let v = p.mul(&JetMat::diag(ring, diag))?;
    HPStruct::new(phi, EJetLattice::new(v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hodge_pink::testutil::alpha_example;
    use crate::hodge_pink::{default_ring, t_hodge, t_newton};
    use crate::padic_series::ctx::ctx0;
    use crate::padic_series::padic::PadicField;
    use proptest::prelude::*;

    fn e1(h: &HPStruct<PadicField>) -> SubSpec<PadicField> {
        let f = h.ctx().field().clone();
        SubSpec::new(h.phi(), Mat::from_i64(&f, &[&[1], &[0]])).unwrap()
    }

    #[test]
    fn alpha_line_e1() {
        let h1 = alpha_example(1);
        let s1 = induced_sub_hp(&h1, &e1(&h1)).unwrap();
        assert_eq!(t_hodge(&s1).unwrap(), 0);
        assert_eq!(s1.sandwich().unwrap(), (0, 0));
        let h0 = alpha_example(0);
        let s0 = induced_sub_hp(&h0, &e1(&h0)).unwrap();
        assert_eq!(t_hodge(&s0).unwrap(), 1);
        assert_eq!(s0.sandwich().unwrap(), (-1, -1));
    }

    #[test]
    fn full_subspace_is_identity() {
        let h = alpha_example(2);
        let f = h.ctx().field().clone();
        let s = SubSpec::new(h.phi(), Mat::identity(&f, 2)).unwrap();
        let hs = induced_sub_hp(&h, &s).unwrap();
        let t = hs.basis().solve_mat(h.basis()).unwrap();
        assert!(hs.lattice().exponents().unwrap().iter().zip(h.lattice().exponents().unwrap()).all(|(a, b)| *a == b));
        assert_eq!(t.det().unwrap().valuation(), Some(0));
        assert_eq!(induced_quotient_hp(&h, &s).unwrap().rank(), 0);
    }

    #[test]
    fn non_stable_rejected() {
        let c = ctx0();
        let f = c.field().clone();
        let phi = PhiMod::new(&c, Mat::from_i64(&f, &[&[1, 0], &[0, 3]])).unwrap();
        assert!(SubSpec::new(&phi, Mat::from_i64(&f, &[&[1], &[1]])).is_err());
        assert!(SubSpec::new(&phi, Mat::from_i64(&f, &[&[0], &[1]])).is_ok());
    }

    fn random_hp(a: [i64; 3], v: [i64; 4], k: [i64; 2]) -> Option<(HPStruct<PadicField>, SubSpec<PadicField>)> {
        let c = ctx0();
        let f = c.field().clone();
        let ring = default_ring(&c);
        // upper triangular A keeps K_0 e₁ stable
        let am = Mat::from_i64(&f, &[&[a[0], a[1]], &[0, a[2]]]);
        if a[0] == 0 || a[2] == 0 {
            return None;
        }
        let phi = PhiMod::new(&c, am).ok()?;
        let jets = vec![
            ring.from_i64(v[0]).mul_e_pow(k[0]),
            ring.from_i64(v[1]),
            ring.from_i64(v[2]).add(&ring.u()).ok()?,
            ring.from_i64(v[3]).mul_e_pow(k[1]),
        ];
        let lat = EJetLattice::new(JetMat::from_vec(&ring, 2, 2, jets)).ok()?;
        let h = HPStruct::new(phi.clone(), lat).ok()?;
        let s = SubSpec::new(&phi, Mat::from_i64(&f, &[&[1], &[0]])).ok()?;
        Some((h, s))
    }

    proptest! {
        #[test]
        fn additivity_in_exact_sequences(a in proptest::array::uniform3(-9i64..10), v in proptest::array::uniform4(-5i64..6), k in proptest::array::uniform2(-1i64..2)) {
            let Some((h, s)) = random_hp(a, v, k) else { return Ok(()) };
            let Ok(sub) = induced_sub_hp(&h, &s) else { return Ok(()) };
            let quo = induced_quotient_hp(&h, &s).unwrap();
            prop_assert_eq!(t_newton(h.phi()).unwrap(), t_newton(sub.phi()).unwrap() + t_newton(quo.phi()).unwrap());
            prop_assert_eq!(t_hodge(&h).unwrap(), t_hodge(&sub).unwrap() + t_hodge(&quo).unwrap());
        }
    }
}
