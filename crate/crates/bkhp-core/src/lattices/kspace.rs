use std::fmt;

use crate::error::Result;
use crate::lattices::kfield::KField;
use crate::lattices::linalg::Mat;
use crate::padic_series::coeff::CoeffField;
use crate::padic_series::poly::Poly;

/// Reduced row echelon form over K with minimal-v_π pivots per column.
pub fn k_rref<F: CoeffField>(kf: &KField<F>, rows: &[Vec<Poly<F>>], ncols: usize) -> Result<(Vec<Vec<Poly<F>>>, Vec<usize>)> {
    let mut m: Vec<Vec<Poly<F>>> = rows.iter().map(|r| r.iter().map(|x| kf.reduce(x)).collect()).collect();
    let mut pivots = Vec::new();
    let mut top = 0;
    for c in 0..ncols {
        if top == m.len() {
            break;
        }
        let mut best: Option<(usize, i64)> = None;
        for (i, row) in m.iter().enumerate().skip(top) {
            if kf.is_zero(&row[c]) {
                continue;
            }
            if let Some(v) = kf.val(&row[c]) {
                if best.is_none_or(|(_, bv)| v < bv) {
                    best = Some((i, v));
                }
            }
        }
        let Some((pi, _)) = best else { continue };
        m.swap(top, pi);
        let inv = kf.inv(&m[top][c])?;
        m[top] = m[top].iter().map(|x| kf.mul(x, &inv)).collect();
        let prow = m[top].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == top || kf.is_zero(&row[c]) {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                *x = kf.sub(x, &kf.mul(&f, y));
            }
            row[c] = kf.zero();
        }
        m[top][c] = kf.one();
        pivots.push(c);
        top += 1;
    }
    m.truncate(top);
    Ok((m, pivots))
}

/// Basis of {y ∈ K^n : rows·y = 0}.
pub fn k_kernel<F: CoeffField>(kf: &KField<F>, rows: &[Vec<Poly<F>>], ncols: usize) -> Result<Vec<Vec<Poly<F>>>> {
    let (r, piv) = k_rref(kf, rows, ncols)?;
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !piv.contains(c)) {
        let mut v = vec![kf.zero(); ncols];
        v[free] = kf.one();
        for (row, &pc) in r.iter().zip(&piv) {
            v[pc] = row[free].neg();
        }
        out.push(v);
    }
    Ok(out)
}

/// K-subspace of K^n stored as an RREF basis.
#[derive(Clone)]
pub struct KSpace<F: CoeffField> {
    kf: KField<F>,
    n: usize,
    rows: Vec<Vec<Poly<F>>>,
    pivots: Vec<usize>,
}

impl<F: CoeffField> fmt::Debug for KSpace<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KSpace(dim {} in K^{}: {:?})", self.dim(), self.n, self.rows)
    }
}

impl<F: CoeffField> KSpace<F> {
    pub fn span(kf: &KField<F>, n: usize, vs: &[Vec<Poly<F>>]) -> Result<Self> {
        let (rows, pivots) = k_rref(kf, vs, n)?;
        Ok(KSpace { kf: kf.clone(), n, rows, pivots })
    }
    pub fn zero(kf: &KField<F>, n: usize) -> Self {
        KSpace { kf: kf.clone(), n, rows: vec![], pivots: vec![] }
    }
    pub fn full(kf: &KField<F>, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { kf.one() } else { kf.zero() }).collect())
            .collect();
        KSpace { kf: kf.clone(), n, rows, pivots: (0..n).collect() }
    }
    /// Span of the columns of a K_0-matrix.
    pub fn from_k0_cols(kf: &KField<F>, m: &Mat<F>) -> Result<Self> {
        let vs: Vec<Vec<Poly<F>>> = (0..m.cols())
            .map(|j| (0..m.rows()).map(|i| Poly::constant(m.get(i, j).clone())).collect())
            .collect();
        Self::span(kf, m.rows(), &vs)
    }
    pub fn kfield(&self) -> &KField<F> {
        &self.kf
    }
    pub fn ambient(&self) -> usize {
        self.n
    }
    pub fn dim(&self) -> usize {
        self.rows.len()
    }
    pub fn basis(&self) -> &[Vec<Poly<F>>] {
        &self.rows
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }
    pub fn is_full(&self) -> bool {
        self.rows.len() == self.n
    }
    /// Linear forms vanishing exactly on the space.
    pub fn annihilator(&self) -> Result<Vec<Vec<Poly<F>>>> {
        k_kernel(&self.kf, &self.rows, self.n)
    }
    pub fn contains(&self, v: &[Poly<F>]) -> Result<bool> {
        let mut vs = self.rows.clone();
        vs.push(v.to_vec());
        Ok(k_rref(&self.kf, &vs, self.n)?.0.len() == self.dim())
    }
    pub fn contains_space(&self, o: &Self) -> Result<bool> {
        Ok(self.sum(o)?.dim() == self.dim())
    }
    pub fn eq_space(&self, o: &Self) -> Result<bool> {
        Ok(self.dim() == o.dim() && self.contains_space(o)?)
    }
    pub fn sum(&self, o: &Self) -> Result<Self> {
        let mut vs = self.rows.clone();
        vs.extend(o.rows.iter().cloned());
        Self::span(&self.kf, self.n, &vs)
    }
    pub fn intersect(&self, o: &Self) -> Result<Self> {
        let mut ann = self.annihilator()?;
        ann.extend(o.annihilator()?);
        let k = k_kernel(&self.kf, &ann, self.n)?;
        Self::span(&self.kf, self.n, &k)
    }
    /// Image under a K_0-linear map.
    pub fn map_k0(&self, m: &Mat<F>) -> Result<Self> {
        let vs: Vec<Vec<Poly<F>>> = self.rows.iter().map(|v| apply_k0(&self.kf, m, v)).collect();
        Self::span(&self.kf, m.rows(), &vs)
    }
    /// Preimage-free restriction: coordinates of the space inside a K_0
    /// subspace with basis columns `b`, assuming containment.
    pub fn coords_in(&self, b: &Mat<F>) -> Result<Self> {
        // solve b·x = v for each basis vector via an extended basis
        let d = b.cols();
        let kb: Vec<Vec<Poly<F>>> = (0..d)
            .map(|j| (0..b.rows()).map(|i| Poly::constant(b.get(i, j).clone())).collect())
            .collect();
        let mut vs = Vec::new();
        for v in &self.rows {
            vs.push(solve_in_span(&self.kf, &kb, v)?);
        }
        Self::span(&self.kf, d, &vs)
    }
}

/// m·v for a K_0-matrix m and v ∈ K^n.
pub fn apply_k0<F: CoeffField>(kf: &KField<F>, m: &Mat<F>, v: &[Poly<F>]) -> Vec<Poly<F>> {
    (0..m.rows())
        .map(|i| {
            let mut s = kf.zero();
            for (j, x) in v.iter().enumerate() {
                s = s.add(&x.scale(m.get(i, j)));
            }
            kf.reduce(&s)
        })
        .collect()
}

/// Coefficients c with Σ c_j·gens[j] = v (gens linearly independent).
pub fn solve_in_span<F: CoeffField>(kf: &KField<F>, gens: &[Vec<Poly<F>>], v: &[Poly<F>]) -> Result<Vec<Poly<F>>> {
    let n = v.len();
    let d = gens.len();
    // rows of the system: for each coordinate i, Σ_j gens[j][i]·c_j − v_i = 0
    let rows: Vec<Vec<Poly<F>>> = (0..n)
        .map(|i| {
            let mut r: Vec<Poly<F>> = gens.iter().map(|g| g[i].clone()).collect();
            r.push(v[i].neg());
            r
        })
        .collect();
    let ker = k_kernel(kf, &rows, d + 1)?;
    for k in ker {
        if !kf.is_zero(&k[d]) {
            let inv = kf.inv(&k[d])?;
            return Ok(k[..d].iter().map(|x| kf.mul(x, &inv)).collect());
        }
    }
    Err(crate::error::Error::precision("lattices", "vector is not in the span at precision"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic_series::ctx::ctx1;

    #[test]
    fn spans_and_intersections() {
        let c = ctx1();
        let kf = KField::new(&c);
        let f = c.field().clone();
        let p = |v: &[i64]| Poly::from_i64s(&f, v);
        // u·(1, 1) and (2, 0) in K^2, K = Q_2(√2)
        let a = KSpace::span(&kf, 2, &[vec![p(&[0, 1]), p(&[0, 1])]]).unwrap();
        let b = KSpace::span(&kf, 2, &[vec![p(&[2]), p(&[0])]]).unwrap();
        assert_eq!(a.dim(), 1);
        assert_eq!(a.sum(&b).unwrap().dim(), 2);
        assert_eq!(a.intersect(&b).unwrap().dim(), 0);
        assert!(a.contains(&[p(&[3]), p(&[3])]).unwrap());
        assert!(!a.contains(&[p(&[1]), p(&[0])]).unwrap());
        let full = KSpace::full(&kf, 2);
        assert!(full.intersect(&a).unwrap().eq_space(&a).unwrap());
        assert_eq!(a.annihilator().unwrap().len(), 1);
    }
}
