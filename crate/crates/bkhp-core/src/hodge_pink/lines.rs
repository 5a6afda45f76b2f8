use crate::error::{Error, Result};
use crate::hodge_pink::HPStruct;
use crate::lattices::{JetMat, Mat, Subspace};
use crate::padic_series::coeff::{Coeff, CoeffField};
use crate::padic_series::jet::Jet;

/// Lines L ⊆ S with V_L = E^{−t_h}·U_L for every L ⊆ space not in the next
/// jump; with `at_depth` the value is only a lower bound.
#[derive(Clone, Debug)]
pub struct LineJump<F: CoeffField> {
    pub space: Subspace<F>,
    pub t_h: i64,
    pub at_depth: bool,
}

/// Sorted m-subsets of 0..r in lexicographic order.
pub fn subsets(r: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, r: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..r {
            cur.push(i);
            go(i + 1, r, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, r, m, &mut Vec::new(), &mut out);
    out
}

/// Λ^m of a square jet matrix in the lexicographic subset basis.
pub fn wedge_jets<F: CoeffField>(x: &JetMat<F>, m: usize) -> Result<JetMat<F>> {
    let ring = x.ring();
    let idx = subsets(x.rows(), m);
    let mut d = Vec::with_capacity(idx.len() * idx.len());
    for i in &idx {
        for j in &idx {
            let sub: Vec<Jet<F>> = i.iter().flat_map(|a| j.iter().map(move |b| x.get(*a, *b).clone())).collect();
            d.push(JetMat::from_vec(ring, m, m, sub).det()?);
        }
    }
    Ok(JetMat::from_vec(ring, idx.len(), idx.len(), d))
}

/// Subspace {x ∈ K_0^r : x ∧ ω = 0} for ω ∈ Λ^m K_0^r; it has dimension m
/// exactly when ω is decomposable and nonzero.
pub fn wedge_annihilator<F: CoeffField>(f: &F, r: usize, m: usize, omega: &[F::Elt]) -> Subspace<F> {
    let small = subsets(r, m);
    let big = subsets(r, m + 1);
    let mut rows = Vec::with_capacity(big.len());
    for k in &big {
        let mut row = vec![f.zero(); r];
        for (pos, &c) in k.iter().enumerate() {
            let rest: Vec<usize> = k.iter().copied().filter(|x| *x != c).collect();
            let w = &omega[small.iter().position(|s| *s == rest).expect("subset")];
            row[c] = if pos % 2 == 0 { w.clone() } else { w.neg() };
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Subspace::full(f, r);
    }
    Subspace::span(f, r, &Mat::from_rows(f, rows).kernel())
}

/// Minimal E-valuation among the nonzero entries.
fn min_val<F: CoeffField>(x: &JetMat<F>) -> Option<i64> {
    x.entries().iter().filter_map(|e| e.valuation()).min()
}

/// S_j = {v ∈ K_0^n : every entry of X⁻¹·v has E-valuation ≥ j}, where
/// `xinv` = X⁻¹ for a lattice basis X.
pub fn line_space<F: CoeffField>(xinv: &JetMat<F>, j: i64) -> Result<Subspace<F>> {
    let f = xinv.ring().field().clone();
    let n = xinv.cols();
    let Some(lo) = min_val(xinv) else {
        return Err(Error::precision("hodge_pink", "inverse lattice frame is zero to precision"));
    };
    if j <= lo {
        return Ok(Subspace::full(&f, n));
    }
    let deg = xinv.ring().deg();
    let mut rows = Vec::new();
    for i in 0..xinv.rows() {
        let mut dig = Vec::with_capacity(n);
        for k in 0..n {
            let e = xinv.get(i, k);
            if e.prec() < j {
                return Err(Error::precision("hodge_pink", "jet order too small for the requested depth"));
            }
            dig.push(e.digits(lo, j)?);
        }
        for m in 0..(j - lo) as usize {
            for t in 0..deg {
                rows.push((0..n).map(|k| dig[k][m].coeff(t)).collect::<Vec<_>>());
            }
        }
    }
    Ok(Subspace::span(&f, n, &Mat::from_rows(&f, rows).kernel()))
}

/// t_H(K_0·v): the minimal E-valuation of X⁻¹·v.
pub fn line_t_hodge<F: CoeffField>(h: &HPStruct<F>, v: &[F::Elt]) -> Result<i64> {
    let ring = h.ring();
    let xinv = h.basis().inverse()?;
    let vj: Vec<Jet<F>> = v.iter().map(|c| ring.constant(c.clone())).collect();
    xinv.mul_vec(&vj)?
        .iter()
        .filter_map(|e| e.valuation())
        .min()
        .ok_or_else(|| Error::domain("hodge_pink", "zero vector spans no line"))
}

fn require_scalar<F: CoeffField>(h: &HPStruct<F>) -> Result<()> {
    let f = h.ctx().field();
    if !h.phi().is_scalar() {
        return Err(Error::domain("hodge_pink", "scalar-line analysis needs a scalar φ-matrix"));
    }
    if !f.is_equal_char() && f.q() != f.char_p() {
        return Err(Error::domain("hodge_pink", "scalar-line analysis needs a linear φ_D"));
    }
    Ok(())
}

/// Jump data of t_H on lines of D for scalar φ_D, down to `depth`.
pub fn scalar_line_jump_analysis<F: CoeffField>(h: &HPStruct<F>, depth: i64) -> Result<Vec<LineJump<F>>> {
    require_scalar(h)?;
    if 2 * depth > h.ctx().h_e() {
        return Err(Error::domain("hodge_pink", "depth exceeds half the jet order"));
    }
    if h.rank() == 0 {
        return Ok(vec![]);
    }
    let xinv = h.basis().inverse()?;
    let lo = min_val(&xinv).ok_or_else(|| Error::precision("hodge_pink", "degenerate lattice frame"))?;
    // t_H of a line never exceeds −s for V ⊆ E^s·U
    let (s, _) = h.sandwich()?;
    let f = h.ctx().field().clone();
    let space = |j: i64| -> Result<Subspace<F>> {
        if j > -s {
            Ok(Subspace::zero(&f, h.rank()))
        } else {
            line_space(&xinv, j)
        }
    };
    let mut out = Vec::new();
    let mut cur = space(lo)?;
    for j in lo..=depth {
        let next = space(j + 1)?;
        if cur.dim() > next.dim() {
            out.push(LineJump { space: cur.clone(), t_h: j, at_depth: false });
        }
        cur = next;
    }
    if cur.dim() > 0 {
        out.push(LineJump { space: cur, t_h: (depth + 1).max(lo), at_depth: true });
    }
    Ok(out)
}

/// S_j inside Λ^m D for scalar φ_D: the m-vectors ω with t_H(K_0·ω) ≥ j.
pub(crate) fn wedge_line_space<F: CoeffField>(h: &HPStruct<F>, m: usize, j: i64) -> Result<Subspace<F>> {
    require_scalar(h)?;
    let xinv = h.basis().inverse()?;
    let w = wedge_jets(&xinv, m)?;
    let (s, _) = h.sandwich()?;
    // Λ^m V ⊆ E^{m·s}·Λ^m U
    if j > -s * m as i64 {
        return Ok(Subspace::zero(h.ctx().field(), w.cols()));
    }
    line_space(&w, j)
}
