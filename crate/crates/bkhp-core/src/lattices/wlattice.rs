use std::fmt;

use crate::error::{Error, Result};
use crate::lattices::linalg::Mat;
use crate::padic_series::coeff::{Coeff, CoeffField};

/// Weakly decreasing elementary divisors l_1 ≥ … ≥ l_r.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivisorProfile(Vec<i64>);

impl DivisorProfile {
    /// Sorts into weakly decreasing order.
    pub fn new(mut l: Vec<i64>) -> Self {
        l.sort_unstable_by(|a, b| b.cmp(a));
        DivisorProfile(l)
    }
    /// Wraps an already sorted sequence; fails if it is not weakly decreasing.
    pub fn from_sorted(l: Vec<i64>) -> Result<Self> {
        if l.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::domain("lattices", "divisor profile is not weakly decreasing"));
        }
        Ok(DivisorProfile(l))
    }
    pub fn zeros(r: usize) -> Self {
        DivisorProfile(vec![0; r])
    }
    pub fn values(&self) -> &[i64] {
        &self.0
    }
    pub fn rank(&self) -> usize {
        self.0.len()
    }
    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }
    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for DivisorProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(", "))
    }
}

/// W-lattice in K_0^r given by the columns of an invertible basis matrix.
#[derive(Clone, Debug)]
pub struct WLattice<F: CoeffField> {
    basis: Mat<F>,
}

impl<F: CoeffField> WLattice<F> {
    pub fn new(basis: Mat<F>) -> Result<Self> {
        if basis.rows() != basis.cols() {
            return Err(Error::domain("lattices", "lattice basis must be square"));
        }
        if basis.rows() > 0 && basis.det().is_zero() {
            return Err(Error::precision("lattices", "lattice basis is singular to precision"));
        }
        Ok(WLattice { basis })
    }
    pub fn standard(f: &F, r: usize) -> Self {
        WLattice { basis: Mat::identity(f, r) }
    }
    pub fn basis(&self) -> &Mat<F> {
        &self.basis
    }
    pub fn rank(&self) -> usize {
        self.basis.rows()
    }
    pub fn field(&self) -> &F {
        self.basis.field()
    }
    /// Image under a K_0-linear map.
    pub fn image(&self, m: &Mat<F>) -> Result<Self> {
        Self::new(m.mul(&self.basis))
    }
    /// Valuation of the basis determinant.
    pub fn det_valuation(&self) -> Result<i64> {
        self.basis
            .det()
            .valuation()
            .ok_or_else(|| Error::precision("lattices", "lattice determinant is zero to precision"))
    }
    /// Equality of lattices: the transition matrix is in GL_r(W).
    pub fn same_lattice(&self, o: &Self) -> Result<bool> {
        Ok(elementary_divisors(self, o)?.values().iter().all(|x| *x == 0))
    }
}

/// Smith exponents a_i of a square matrix over the valuation ring:
/// minimal-valuation pivots, ties to the lowest row then column. Each pivot
/// valuation must be strictly below its absolute precision.
pub fn smith_exponents<F: CoeffField>(m: &Mat<F>) -> Result<Vec<i64>> {
    let n = m.rows();
    let mut w = m.clone();
    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        let mut best: Option<(usize, usize, i64)> = None;
        for i in t..n {
            for j in t..n {
                if let Some(v) = w.get(i, j).valuation() {
                    if best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let (pi, pj, v) = best.ok_or_else(|| {
            Error::precision("lattices", "Smith pivot cannot be certified at the working precision")
        })?;
        if v >= w.get(pi, pj).abs_prec() {
            return Err(Error::precision("lattices", "Smith pivot valuation exceeds its precision"));
        }
        for c in 0..n {
            let (a, b) = (w.get(t, c).clone(), w.get(pi, c).clone());
            w.set(t, c, b);
            w.set(pi, c, a);
        }
        for r in 0..n {
            let (a, b) = (w.get(r, t).clone(), w.get(r, pj).clone());
            w.set(r, t, b);
            w.set(r, pj, a);
        }
        let piv_inv = w.get(t, t).inv()?;
        for r in t + 1..n {
            if w.get(r, t).is_exact_zero() {
                continue;
            }
            let f = w.get(r, t).mul(&piv_inv);
            for c in t..n {
                let y = w.get(r, c).sub(&f.mul(w.get(t, c)));
                w.set(r, c, y);
            }
        }
        // Row t beyond the pivot has valuation ≥ v and is cleared by
        // integral column operations.
        for c in t + 1..n {
            let z = w.get(t, c).zero_like();
            w.set(t, c, z);
        }
        out.push(v);
    }
    Ok(out)
}

/// Elementary divisors l(Δ, Δ′): Δ′ has a basis p^{−l_i}·e_i for a suitable
/// basis e_i of Δ, sorted weakly decreasing.
pub fn elementary_divisors<F: CoeffField>(d: &WLattice<F>, d2: &WLattice<F>) -> Result<DivisorProfile> {
    if d.rank() != d2.rank() {
        return Err(Error::domain("lattices", "lattices of different rank"));
    }
    let m = d.basis.inverse()?.mul(&d2.basis);
    let a = smith_exponents(&m)?;
    Ok(DivisorProfile::new(a.into_iter().map(|x| -x).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic_series::padic::PadicField;
    use proptest::prelude::*;

    fn f() -> PadicField {
        PadicField::new(3, 24).unwrap()
    }

    #[test]
    fn diagonal_profiles() {
        let f = f();
        let d = WLattice::standard(&f, 2);
        assert_eq!(elementary_divisors(&d, &d).unwrap().values(), &[0, 0]);
        let m = Mat::diag(&f, &[f.from_i64(1).mul_pow(-2), f.from_i64(3)]);
        let d2 = WLattice::new(m).unwrap();
        assert_eq!(elementary_divisors(&d, &d2).unwrap().values(), &[2, -1]);
    }

    #[test]
    fn singular_is_precision_error() {
        let f = f();
        let m = Mat::from_i64(&f, &[&[1, 2], &[2, 4]]);
        assert!(smith_exponents(&m).unwrap_err().is_precision());
    }

    /// Determinantal divisors: a_1 = min entry valuation, a_1 + a_2 = v(det).
    fn oracle_2x2(m: &[[i64; 2]; 2], p: i64) -> Vec<i64> {
        let v = |x: i64| -> i64 {
            let mut x = x.abs();
            let mut k = 0;
            while x % p == 0 {
                x /= p;
                k += 1;
            }
            k
        };
        let entries = [m[0][0], m[0][1], m[1][0], m[1][1]];
        let a1 = entries.iter().filter(|x| **x != 0).map(|x| v(*x)).min().unwrap();
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let mut l = vec![-a1, -(v(det) - a1)];
        l.sort_by(|a, b| b.cmp(a));
        l
    }

    #[test]
    fn upper_triangular_against_oracle() {
        let f = f();
        let m = [[1, 1], [0, 3]];
        let d = WLattice::standard(&f, 2);
        let d2 = d.image(&Mat::from_i64(&f, &[&[1, 1], &[0, 3]])).unwrap();
        assert_eq!(elementary_divisors(&d, &d2).unwrap().values(), oracle_2x2(&m, 3).as_slice());
        assert_eq!(elementary_divisors(&d, &d2).unwrap().values(), &[0, -1]);
    }

    proptest! {
        #[test]
        fn matches_determinantal_oracle(a in -40i64..40, b in -40i64..40, c in -40i64..40, dd in -40i64..40) {
            prop_assume!(a * dd - b * c != 0);
            let f = f();
            let m = [[a, b], [c, dd]];
            let d = WLattice::standard(&f, 2);
            let d2 = d.image(&Mat::from_i64(&f, &[&[a, b], &[c, dd]])).unwrap();
            let got = elementary_divisors(&d, &d2).unwrap();
            prop_assert_eq!(got.values().to_vec(), oracle_2x2(&m, 3));
        }

        #[test]
        fn antisymmetric_and_sums_to_det(xs in proptest::collection::vec(-30i64..30, 9), ys in proptest::collection::vec(-30i64..30, 9)) {
            let f = f();
            let rows = |v: &[i64]| Mat::from_i64(&f, &[&v[0..3], &v[3..6], &v[6..9]]);
            let (ma, mb) = (rows(&xs), rows(&ys));
            prop_assume!(!ma.det().is_zero() && !mb.det().is_zero());
            let (da, db) = (WLattice::new(ma).unwrap(), WLattice::new(mb).unwrap());
            let l = elementary_divisors(&da, &db).unwrap();
            let lr = elementary_divisors(&db, &da).unwrap();
            let r = l.rank();
            for i in 0..r {
                prop_assert_eq!(l.values()[i], -lr.values()[r - 1 - i]);
            }
            prop_assert_eq!(-l.sum(), db.det_valuation().unwrap() - da.det_valuation().unwrap());
        }
    }
}
