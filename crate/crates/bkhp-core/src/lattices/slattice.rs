use crate::error::{Error, Result};
use crate::lattices::jetmat::JetMat;
use crate::lattices::kfield::KField;
use crate::lattices::smat::SMat;
use crate::padic_series::coeff::{Coeff, CoeffField};
use crate::padic_series::ctx::PrecCtx;
use crate::padic_series::jet::{Jet, JetRing};
use crate::padic_series::poly::Poly;
use crate::padic_series::series::SeriesElt;

/// Free 𝔖-submodule of full rank, given by the columns of its basis matrix.
#[derive(Clone, Debug)]
pub struct SLattice<F: CoeffField> {
    basis: SMat<F>,
}

impl<F: CoeffField> SLattice<F> {
    pub fn new(basis: SMat<F>) -> Result<Self> {
        if basis.rows() != basis.cols() {
            return Err(Error::domain("lattices", "lattice basis must be square"));
        }
        Ok(SLattice { basis })
    }
    pub fn standard(ctx: &PrecCtx<F>, r: usize) -> Self {
        SLattice { basis: SMat::identity(ctx, r) }
    }
    pub fn basis(&self) -> &SMat<F> {
        &self.basis
    }
    pub fn rank(&self) -> usize {
        self.basis.rows()
    }
    pub fn ctx(&self) -> &PrecCtx<F> {
        self.basis.ctx()
    }
    pub fn det_class(&self) -> Result<(i64, i64)> {
        series_det_class(&self.basis.det()?)
    }
}

/// Ŝ-lattice in Ŝ[1/E]^r relative to the reference lattice Ŝ^r, given by the
/// columns of a basis matrix of jets.
#[derive(Clone, Debug)]
pub struct EJetLattice<F: CoeffField> {
    basis: JetMat<F>,
}

impl<F: CoeffField> EJetLattice<F> {
    pub fn new(basis: JetMat<F>) -> Result<Self> {
        if basis.rows() != basis.cols() {
            return Err(Error::domain("lattices", "lattice basis must be square"));
        }
        Ok(EJetLattice { basis })
    }
    pub fn standard(ring: &JetRing<F>, r: usize) -> Self {
        EJetLattice { basis: JetMat::identity(ring, r) }
    }
    pub fn basis(&self) -> &JetMat<F> {
        &self.basis
    }
    pub fn ring(&self) -> &JetRing<F> {
        self.basis.ring()
    }
    pub fn rank(&self) -> usize {
        self.basis.rows()
    }
    /// Membership of a vector: its coordinates in the basis are integral.
    pub fn contains(&self, x: &[Jet<F>]) -> Result<bool> {
        let col = JetMat::from_cols(self.ring(), self.rank(), &[x.to_vec()]);
        let y = self.basis.solve_mat(&col)?;
        Ok(y.entries().iter().all(|j| j.valuation().is_none_or(|v| v >= 0)))
    }
    /// E-exponents of the lattice relative to the reference: the basis is
    /// P·diag(E^{exps}) with P invertible, exps sorted increasingly.
    pub fn exponents(&self) -> Result<Vec<i64>> {
        let mut e = self.basis.smith()?.exps;
        e.sort_unstable();
        Ok(e)
    }
    pub fn det_class(&self) -> Result<(i64, i64)> {
        let d = self.basis.det()?;
        let b = d
            .valuation()
            .ok_or_else(|| Error::precision("lattices", "lattice determinant is zero to precision"))?;
        let res = d.residue_unit()?;
        let a = res
            .valuation()
            .ok_or_else(|| Error::precision("lattices", "determinant unit vanishes to precision"))?;
        Ok((a, b))
    }
}

trait ResidueUnit<F: CoeffField> {
    fn residue_unit(&self) -> Result<Poly<F>>;
}

impl<F: CoeffField> ResidueUnit<F> for Jet<F> {
    /// Unit part reduced modulo the jet modulus.
    fn residue_unit(&self) -> Result<Poly<F>> {
        Ok(self.leading_digit())
    }
}

/// (a, b) with x = unit·p^a·E^b in 𝔖[1/p][1/E].
///
/// For the numerator P: b is its E-valuation, a its minimal coefficient
/// valuation, and P/(p^a·E^b) is a unit exactly when the first coefficient
/// reaching valuation a sits at index e·b (Weierstrass degree).
pub fn series_det_class<F: CoeffField>(x: &SeriesElt<F>) -> Result<(i64, i64)> {
    let ctx = x.ctx();
    let p = x.poly();
    let ring = JetRing::at_e(ctx, ctx.h_e().max(2 * ctx.n_c()));
    let j = ring.from_poly(&p.with_abs_prec(p.abs_prec()));
    let b = j
        .valuation()
        .ok_or_else(|| Error::precision("lattices", "determinant is zero to precision"))?;
    let a = p
        .valuation()
        .ok_or_else(|| Error::precision("lattices", "determinant is zero to precision"))?;
    let j0 = p
        .coeffs()
        .iter()
        .position(|c| c.valuation() == Some(a))
        .expect("minimal valuation is attained");
    for c in &p.coeffs()[..j0] {
        if c.abs_prec() <= a && c.valuation().is_none() {
            return Err(Error::precision("lattices", "determinant class cannot be certified"));
        }
    }
    if j0 as i64 != ctx.e() as i64 * b {
        return Err(Error::domain("lattices", "determinant is not a unit times p^a·E^b"));
    }
    Ok((a, b - x.d_e()))
}

/// Modification at E: the 𝔖-lattice 𝔐′ ⊆ 𝔐[1/E] with 𝔐′⊗Ŝ = V.
///
/// With V′ = B_𝔐⁻¹V = P·diag(E^{a_i}) and c = max(0, −min a_i), the lattice
/// E^c·𝔐′ is the end of the chain M_k = {x ∈ 𝔖^r : x ∈ E^cV′ + E^kŜ^r},
/// k = 0..N. Each step M_{k+1}/E·M_k is the saturated O_K-submodule cut out
/// by the E^k-digits of P⁻¹x, so the basis changes by a lifted O_K-unimodular
/// matrix times diag(E,…,E,1,…,1).
pub fn intersect_with_ejet_lattice<F: CoeffField>(
    m: &SLattice<F>,
    v: &EJetLattice<F>,
    b: i64,
) -> Result<SLattice<F>> {
    let ring = v.ring().clone();
    let ctx = m.ctx().clone();
    let r = m.rank();
    if v.rank() != r {
        return Err(Error::domain("lattices", "lattices of different rank"));
    }
    if ring.frob_index() != 0 {
        return Err(Error::domain("lattices", "modification is only supported at E"));
    }
    if 2 * b > ring.order() {
        return Err(Error::domain("lattices", "jet order is below twice the modification bound"));
    }
    let bm = m.basis().to_jets(&ring)?;
    let vp = bm.solve_mat(v.basis())?;
    let smith = vp.smith()?;
    let amin = smith.exps.iter().copied().min().unwrap_or(0);
    let amax = smith.exps.iter().copied().max().unwrap_or(0);
    if amin < -b || amax > b {
        return Err(Error::domain("lattices", "lattice is not sandwiched between E^±b·𝔐"));
    }
    let c = (-amin).max(0);
    let shifted: Vec<i64> = smith.exps.iter().map(|a| a + c).collect();
    let n_steps = shifted.iter().copied().max().unwrap_or(0);
    let kf = KField::new(&ctx);
    let f = ctx.field().clone();
    let mut y: Vec<Vec<Poly<F>>> =
        (0..r).map(|i| (0..r).map(|j| if i == j { Poly::one(&f) } else { Poly::zero(&f) }).collect()).collect();
    for k in 0..n_steps {
        let yj = JetMat::from_vec(&ring, r, r, y.iter().flatten().map(|p| ring.from_poly(p)).collect());
        let z = smith.pinv.mul(&yj)?;
        let mut kmat: Vec<Vec<Poly<F>>> = Vec::new();
        for (i, a) in shifted.iter().enumerate() {
            if *a <= k {
                continue;
            }
            let mut row = Vec::with_capacity(r);
            for j in 0..r {
                let zij = z.get(i, j);
                if zij.prec() <= k {
                    return Err(Error::precision("lattices", "jet order exhausted in the intersection"));
                }
                let d = zij
                    .digits(k, k + 1)
                    .map_err(|_| Error::precision("lattices", "intersection chain left the lattice"))?;
                row.push(d.into_iter().next().expect("one digit"));
            }
            kmat.push(row);
        }
        let (cmat, rank) = saturated_kernel_frame(&kf, kmat, r)?;
        // T = C·diag(E (pivot columns), 1 (kernel columns))
        let e = ctx.e_poly().clone();
        let mut t = cmat;
        for row in t.iter_mut() {
            for cell in row.iter_mut().take(rank) {
                *cell = cell.mul(&e);
            }
        }
        y = poly_mat_mul(&y, &t);
    }
    let ys = SMat::from_rows(
        &ctx,
        y.into_iter()
            .map(|row| row.into_iter().map(|p| SeriesElt::from_parts(&ctx, 0, p, false)).collect())
            .collect(),
    );
    let out = m.basis().mul(&ys)?.mul_e_pow(-c);
    SLattice::new(out)
}

fn poly_mat_mul<F: CoeffField>(a: &[Vec<Poly<F>>], b: &[Vec<Poly<F>>]) -> Vec<Vec<Poly<F>>> {
    let n = a.len();
    let m = b.first().map_or(0, |x| x.len());
    let f = a[0][0].field().clone();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = Poly::zero(&f);
                    for (k, bk) in b.iter().enumerate() {
                        if a[i][k].is_exact_zero() || bk[j].is_exact_zero() {
                            continue;
                        }
                        s = s.add(&a[i][k].mul(&bk[j]));
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// For a K-matrix `rows` (each of length r), returns C ∈ GL_r(O_K) and the
/// rank ρ such that the last r − ρ columns of C are an O_K-basis of
/// ker(rows) ∩ O_K^r. Column operations are O_K-integral (minimal v_π
/// pivots), row operations are arbitrary K-linear.
fn saturated_kernel_frame<F: CoeffField>(
    kf: &KField<F>,
    mut rows: Vec<Vec<Poly<F>>>,
    r: usize,
) -> Result<(Vec<Vec<Poly<F>>>, usize)> {
    let mut cm: Vec<Vec<Poly<F>>> =
        (0..r).map(|i| (0..r).map(|j| if i == j { kf.one() } else { kf.zero() }).collect()).collect();
    for row in rows.iter_mut() {
        for x in row.iter_mut() {
            *x = kf.reduce(x);
        }
    }
    let mut used = vec![false; rows.len()];
    let mut t = 0;
    while t < r {
        let mut best: Option<(usize, usize, i64)> = None;
        for (i, row) in rows.iter().enumerate() {
            if used[i] {
                continue;
            }
            for (j, x) in row.iter().enumerate().skip(t) {
                if kf.is_zero(x) {
                    continue;
                }
                if let Some(v) = kf.val(x) {
                    if best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        for row in rows.iter_mut() {
            row.swap(t, pj);
        }
        for row in cm.iter_mut() {
            row.swap(t, pj);
        }
        let inv = kf.inv(&rows[pi][t])?;
        rows[pi] = rows[pi].iter().map(|x| kf.mul(x, &inv)).collect();
        let prow = rows[pi].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == pi || kf.is_zero(&row[t]) {
                continue;
            }
            let fct = row[t].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                *x = kf.sub(x, &kf.mul(&fct, y));
            }
        }
        for j in t + 1..r {
            let a = prow[j].clone();
            if kf.is_zero(&a) {
                continue;
            }
            debug_assert!(kf.is_integral(&a));
            for row in rows.iter_mut() {
                let y = kf.sub(&row[j], &kf.mul(&a, &row[t]));
                row[j] = y;
            }
            for row in cm.iter_mut() {
                let y = kf.sub(&row[j], &kf.mul(&a, &row[t]));
                row[j] = y;
            }
        }
        used[pi] = true;
        t += 1;
    }
    Ok((cm, t))
}
