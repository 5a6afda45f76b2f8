use std::fmt;

use crate::error::{Error, Result};
use crate::hodge_pink::lines::{wedge_annihilator, wedge_line_space};
use crate::hodge_pink::{
    enumerate_invariant_subspaces, induced_sub_hp, t_hodge, t_newton, HPStruct, SubSpec,
};
use crate::lattices::Mat;
use crate::padic_series::coeff::{Coeff, CoeffField};

/// Which sub-φ-modules a verdict quantified over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    /// Only the global equality t_H(D) = t_N(D) was needed.
    Global,
    /// The listed subspaces, and nothing else.
    Supplied(usize),
    /// All φ-stable subspaces, enumerated from the regular factorization.
    Enumerated(usize),
    /// All subspaces, via lines of Λ^m D for scalar φ_D.
    ScalarLines,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Global => write!(f, "global"),
            Scope::Supplied(n) => write!(f, "supplied({n})"),
            Scope::Enumerated(n) => write!(f, "enumerated({n})"),
            Scope::ScalarLines => write!(f, "scalar-lines"),
        }
    }
}

/// Quantifier strategy for sub-φ-modules.
#[derive(Clone, Debug)]
pub enum Quantifier<F: CoeffField> {
    Supplied(Vec<SubSpec<F>>),
    Auto,
}

#[derive(Clone, Debug)]
pub enum Verdict<F: CoeffField> {
    True { scope: Scope },
    False { witness: SubSpec<F>, t_h: i64, t_n: i64, scope: Scope },
    Refused { reason: String },
}

impl<F: CoeffField> Verdict<F> {
    pub fn is_true(&self) -> bool {
        matches!(self, Verdict::True { .. })
    }
    pub fn is_false(&self) -> bool {
        matches!(self, Verdict::False { .. })
    }
    pub fn witness(&self) -> Option<&SubSpec<F>> {
        match self {
            Verdict::False { witness, .. } => Some(witness),
            _ => None,
        }
    }
    pub fn scope(&self) -> Option<Scope> {
        match self {
            Verdict::True { scope } | Verdict::False { scope, .. } => Some(*scope),
            Verdict::Refused { .. } => None,
        }
    }
}

fn check_subs<F: CoeffField>(h: &HPStruct<F>, subs: &[SubSpec<F>], scope: Scope) -> Result<Verdict<F>> {
    for s in subs {
        let sub = induced_sub_hp(h, s)?;
        let (th, tn) = (t_hodge(&sub)?, t_newton(sub.phi())?);
        if th > tn {
            return Ok(Verdict::False { witness: s.clone(), t_h: th, t_n: tn, scope });
        }
    }
    Ok(Verdict::True { scope })
}

/// Scalar φ_D = c: a D′ of dimension m violates iff its m-vector lies in
/// S_{m·v(c)+1} ⊆ Λ^m D and is decomposable. Every vector is decomposable
/// for m ∈ {1, r−1, r}; otherwise a nonzero S with no decomposable basis
/// vector refuses.
fn scalar_tier<F: CoeffField>(h: &HPStruct<F>) -> Result<Verdict<F>> {
    let r = h.rank();
    let f = h.ctx().field().clone();
    let vc = h
        .phi()
        .a()
        .get(0, 0)
        .valuation()
        .ok_or_else(|| Error::precision("hodge_pink", "scalar φ is zero to precision"))?;
    for m in 1..r {
        let threshold = m as i64 * vc + 1;
        let space = wedge_line_space(h, m, threshold)?;
        if space.dim() == 0 {
            continue;
        }
        let mut found = None;
        for w in space.basis() {
            let ann = wedge_annihilator(&f, r, m, w);
            if ann.dim() == m {
                found = Some(ann);
                break;
            }
        }
        let Some(ann) = found else {
            if m == 1 || m + 1 == r {
                return Err(Error::internal("hodge_pink", "line of Λ^m D is not decomposable"));
            }
            return Ok(Verdict::Refused {
                reason: format!("Λ^{m} D contains violating vectors, none of the basis vectors is decomposable"),
            });
        };
        let witness = SubSpec::new(h.phi(), ann.basis_matrix())?;
        let sub = induced_sub_hp(h, &witness)?;
        let (th, tn) = (t_hodge(&sub)?, t_newton(sub.phi())?);
        if th <= tn {
            return Err(Error::internal("hodge_pink", "exterior-power witness does not violate"));
        }
        return Ok(Verdict::False { witness, t_h: th, t_n: tn, scope: Scope::ScalarLines });
    }
    Ok(Verdict::True { scope: Scope::ScalarLines })
}

/// t_H(D) = t_N(D) and t_H(D′) ≤ t_N(D′) over the quantifier scope.
pub fn weakly_admissible<F: CoeffField>(h: &HPStruct<F>, q: &Quantifier<F>) -> Result<Verdict<F>> {
    let (th, tn) = (t_hodge(h)?, t_newton(h.phi())?);
    if th != tn {
        let full = SubSpec::new(h.phi(), Mat::identity(h.ctx().field(), h.rank()))?;
        return Ok(Verdict::False { witness: full, t_h: th, t_n: tn, scope: Scope::Global });
    }
    match q {
        Quantifier::Supplied(subs) => check_subs(h, subs, Scope::Supplied(subs.len())),
        Quantifier::Auto => {
            if h.rank() <= 1 {
                return Ok(Verdict::True { scope: Scope::Enumerated(h.rank() + 1) });
            }
            match enumerate_invariant_subspaces(h.phi()) {
                Ok(subs) => check_subs(h, &subs, Scope::Enumerated(subs.len())),
                Err(e) if e.is_precision() => Err(e),
                Err(e) => {
                    if h.phi().is_scalar() {
                        scalar_tier(h)
                    } else {
                        Ok(Verdict::Refused { reason: e.to_string() })
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hodge_pink::testutil::{alpha_example, rank_one};
    use crate::hodge_pink::{default_ring, twist, PhiMod};
    use crate::lattices::{EJetLattice, JetMat, Subspace};
    use crate::padic_series::ctx::ctx0;
    use crate::padic_series::padic::PadicField;
    use proptest::prelude::*;

    #[test]
    fn alpha_verdicts() {
        let v1 = weakly_admissible(&alpha_example(1), &Quantifier::Auto).unwrap();
        assert!(v1.is_true());
        assert_eq!(v1.scope(), Some(Scope::ScalarLines));
        let v0 = weakly_admissible(&alpha_example(0), &Quantifier::Auto).unwrap();
        let Verdict::False { witness, t_h, t_n, scope } = v0 else { panic!("expected failure") };
        let f = witness.basis().field().clone();
        assert!(witness.subspace().eq_space(&Subspace::span(&f, 2, &[vec![f.one(), f.zero()]])));
        assert_eq!((t_h, t_n, scope), (1, 0, Scope::ScalarLines));
    }

    #[test]
    fn rank_one_balanced_is_true() {
        assert!(weakly_admissible(&rank_one(1, -1), &Quantifier::Auto).unwrap().is_true());
        let v = weakly_admissible(&rank_one(1, 0), &Quantifier::Auto).unwrap();
        assert_eq!(v.scope(), Some(Scope::Global));
        assert!(v.is_false());
    }

    #[test]
    fn supplied_scope_is_reported() {
        let h = alpha_example(0);
        let v = weakly_admissible(&h, &Quantifier::Supplied(vec![])).unwrap();
        assert_eq!(v.scope(), Some(Scope::Supplied(0)));
        assert!(v.is_true());
    }

    #[test]
    fn enumerated_tier() {
        let c = ctx0();
        let f = c.field().clone();
        let ring = default_ring(&c);
        let phi = PhiMod::new(&c, Mat::from_i64(&f, &[&[1, 0], &[0, 3]])).unwrap();
        // V = diag(1, E⁻¹): t_H(e₂) = 1 = t_N(e₂), admissible
        let v = JetMat::diag(&ring, vec![ring.one(), ring.e_pow(-1)]);
        let h = HPStruct::new(phi.clone(), EJetLattice::new(v).unwrap()).unwrap();
        let verdict = weakly_admissible(&h, &Quantifier::Auto).unwrap();
        assert!(verdict.is_true());
        assert_eq!(verdict.scope(), Some(Scope::Enumerated(4)));
        // V = diag(E⁻¹, 1): t_H(e₁) = 1 > 0 = t_N(e₁)
        let v = JetMat::diag(&ring, vec![ring.e_pow(-1), ring.one()]);
        let h = HPStruct::new(phi, EJetLattice::new(v).unwrap()).unwrap();
        let verdict = weakly_admissible(&h, &Quantifier::Auto).unwrap();
        assert!(verdict.is_false());
        assert_eq!(verdict.witness().unwrap().dim(), 1);
    }

    #[test]
    fn non_scalar_irregular_refuses() {
        let c = ctx0();
        let f = c.field().clone();
        let phi = PhiMod::new(&c, Mat::from_i64(&f, &[&[1, 1], &[0, 1]])).unwrap();
        let h = HPStruct::standard(phi).unwrap();
        assert!(matches!(weakly_admissible(&h, &Quantifier::Auto).unwrap(), Verdict::Refused { .. }));
    }

    /// Rank 3, A = Id: V spanned by E⁻²(e₁ + u·e₂), E·e₂, E·e₃. No line
    /// violates, the plane ⟨e₁, e₂⟩ has t_H = 1.
    #[test]
    fn plane_witness_in_rank_three() {
        let c = ctx0();
        let f = c.field().clone();
        let ring = default_ring(&c);
        let phi = PhiMod::new(&c, Mat::identity(&f, 3)).unwrap();
        let z = ring.zero();
        let v = JetMat::from_vec(
            &ring,
            3,
            3,
            vec![
                ring.e_pow(-2), z.clone(), z.clone(),
                ring.u().mul_e_pow(-2), ring.e(), z.clone(),
                z.clone(), z.clone(), ring.e(),
            ],
        );
        let h = HPStruct::new(phi, EJetLattice::new(v).unwrap()).unwrap();
        assert_eq!(t_hodge(&h).unwrap(), 0);
        let verdict = weakly_admissible(&h, &Quantifier::Auto).unwrap();
        let Verdict::False { witness, t_h, .. } = verdict else { panic!("expected failure") };
        assert_eq!(witness.dim(), 2);
        assert_eq!(t_h, 1);
        let plane = Subspace::span(&f, 3, &[vec![f.one(), f.zero(), f.zero()], vec![f.zero(), f.one(), f.zero()]]);
        assert!(witness.subspace().eq_space(&plane));
    }

    fn scalar_hp(vals: [i64; 4], k: [i64; 2]) -> Option<HPStruct<PadicField>> {
        let c = ctx0();
        let f = c.field().clone();
        let ring = default_ring(&c);
        let phi = PhiMod::new(&c, Mat::identity(&f, 2)).ok()?;
        let jets = vec![
            ring.from_i64(vals[0]).mul_e_pow(k[0]),
            ring.from_i64(vals[1]),
            ring.from_i64(vals[2]).add(&ring.u()).ok()?,
            ring.from_i64(vals[3]).mul_e_pow(k[1]),
        ];
        HPStruct::new(phi, EJetLattice::new(JetMat::from_vec(&ring, 2, 2, jets)).ok()?).ok()
    }

    proptest! {
        #[test]
        fn verdict_invariant_under_twist(vals in proptest::array::uniform4(-4i64..5), k in proptest::array::uniform2(-1i64..2), tw in -1i64..2) {
            let Some(h) = scalar_hp(vals, k) else { return Ok(()) };
            let Ok(t) = twist(&h, tw) else { return Ok(()) };
            let a = weakly_admissible(&h, &Quantifier::Auto).unwrap();
            let b = weakly_admissible(&t, &Quantifier::Auto).unwrap();
            prop_assert_eq!(a.is_true(), b.is_true());
            prop_assert_eq!(a.is_false(), b.is_false());
        }
    }
}
