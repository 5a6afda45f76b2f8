use std::fmt;

use crate::error::{Error, Result};
use crate::padic_series::coeff::{Coeff, CoeffField, EXACT};

/// Dense matrix over K_0, row-major.
#[derive(Clone)]
pub struct Mat<F: CoeffField> {
    f: F,
    rows: usize,
    cols: usize,
    d: Vec<F::Elt>,
}

impl<F: CoeffField> fmt::Debug for Mat<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).repr().to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Index of the entry of minimal valuation among `cands`, lowest index on ties.
fn min_val_index<C: Coeff>(cands: impl Iterator<Item = (usize, C)>) -> Option<usize> {
    let mut best: Option<(usize, i64)> = None;
    for (i, x) in cands {
        if let Some(v) = x.valuation() {
            if best.is_none_or(|(_, bv)| v < bv) {
                best = Some((i, v));
            }
        }
    }
    best.map(|(i, _)| i)
}

impl<F: CoeffField> Mat<F> {
    pub fn zeros(f: &F, rows: usize, cols: usize) -> Self {
        Mat { f: f.clone(), rows, cols, d: vec![f.zero(); rows * cols] }
    }
    pub fn identity(f: &F, n: usize) -> Self {
        let mut m = Self::zeros(f, n, n);
        for i in 0..n {
            m.set(i, i, f.one());
        }
        m
    }
    pub fn scalar(f: &F, n: usize, c: &F::Elt) -> Self {
        let mut m = Self::zeros(f, n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }
    pub fn diag(f: &F, ds: &[F::Elt]) -> Self {
        let mut m = Self::zeros(f, ds.len(), ds.len());
        for (i, x) in ds.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }
    pub fn from_rows(f: &F, rows: Vec<Vec<F::Elt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut d = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            d.extend(row);
        }
        Mat { f: f.clone(), rows: r, cols: c, d }
    }
    pub fn from_i64(f: &F, rows: &[&[i64]]) -> Self {
        Self::from_rows(f, rows.iter().map(|r| r.iter().map(|x| f.from_i64(*x)).collect()).collect())
    }
    /// Matrix whose columns are the given vectors.
    pub fn from_cols(f: &F, n: usize, cols: &[Vec<F::Elt>]) -> Self {
        let mut m = Self::zeros(f, n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m.set(i, j, c[i].clone());
            }
        }
        m
    }

    pub fn field(&self) -> &F {
        &self.f
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> &F::Elt {
        &self.d[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, x: F::Elt) {
        self.d[i * self.cols + j] = x;
    }
    pub fn row(&self, i: usize) -> Vec<F::Elt> {
        self.d[i * self.cols..(i + 1) * self.cols].to_vec()
    }
    pub fn col(&self, j: usize) -> Vec<F::Elt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }
    pub fn col_vecs(&self) -> Vec<Vec<F::Elt>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut m = Self::zeros(&self.f, self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut s = self.f.zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_exact_zero() {
                        continue;
                    }
                    s = s.add(&a.mul(o.get(k, j)));
                }
                m.set(i, j, s);
            }
        }
        m
    }
    pub fn mul_vec(&self, v: &[F::Elt]) -> Vec<F::Elt> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(self.f.zero(), |s, k| s.add(&self.get(i, k).mul(&v[k]))))
            .collect()
    }
    fn zip(&self, o: &Self, op: impl Fn(&F::Elt, &F::Elt) -> F::Elt) -> Self {
        assert!(self.rows == o.rows && self.cols == o.cols, "dimension mismatch");
        let d = self.d.iter().zip(&o.d).map(|(a, b)| op(a, b)).collect();
        Mat { f: self.f.clone(), rows: self.rows, cols: self.cols, d }
    }
    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }
    pub fn neg(&self) -> Self {
        self.map(|x| x.neg())
    }
    pub fn scale(&self, c: &F::Elt) -> Self {
        self.map(|x| x.mul(c))
    }
    pub fn mul_pow(&self, k: i64) -> Self {
        self.map(|x| x.mul_pow(k))
    }
    pub fn map(&self, op: impl Fn(&F::Elt) -> F::Elt) -> Self {
        Mat { f: self.f.clone(), rows: self.rows, cols: self.cols, d: self.d.iter().map(op).collect() }
    }
    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(&self.f, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut m = Self::zeros(&self.f, rows.len(), cols.len());
        for (a, i) in rows.iter().enumerate() {
            for (b, j) in cols.iter().enumerate() {
                m.set(a, b, self.get(*i, *j).clone());
            }
        }
        m
    }
    pub fn hstack(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows);
        let mut m = Self::zeros(&self.f, self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..o.cols {
                m.set(i, self.cols + j, o.get(i, j).clone());
            }
        }
        m
    }
    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|x| x.is_zero())
    }
    pub fn eq_prec(&self, o: &Self) -> bool {
        self.rows == o.rows && self.cols == o.cols && self.sub(o).is_zero()
    }
    /// Minimal entry valuation, None for the zero matrix.
    pub fn valuation(&self) -> Option<i64> {
        self.d.iter().filter_map(|x| x.valuation()).min()
    }
    pub fn abs_prec(&self) -> i64 {
        self.d.iter().map(|x| x.abs_prec()).min().unwrap_or(EXACT)
    }
    pub fn is_scalar(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let c = self.get(0, 0).clone();
        (0..self.rows).all(|i| {
            (0..self.cols).all(|j| if i == j { self.get(i, j).eq_prec(&c) } else { self.get(i, j).is_zero() })
        })
    }

    /// Row echelon reduction with minimal-valuation pivots; returns the fully
    /// reduced matrix and its pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = min_val_index((r..m.rows).map(|i| (i, m.get(i, c).clone()))) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = m.get(r, c).inv().expect("pivot is nonzero");
            for j in 0..m.cols {
                let x = m.get(r, j).mul(&inv);
                m.set(r, j, x);
            }
            m.set(r, c, m.f.one());
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let fct = m.get(i, c).clone();
                if fct.is_exact_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let x = m.get(i, j).sub(&fct.mul(m.get(r, j)));
                    m.set(i, j, x);
                }
                m.set(i, c, m.f.zero());
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.d.swap(a * self.cols + j, b * self.cols + j);
        }
    }
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }
    /// Basis of {x : Mx = 0}, as vectors.
    pub fn kernel(&self) -> Vec<Vec<F::Elt>> {
        let (m, piv) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![self.f.zero(); self.cols];
                v[fc] = self.f.one();
                for (r, &pc) in piv.iter().enumerate() {
                    v[pc] = m.get(r, fc).neg();
                }
                v
            })
            .collect()
    }
    /// A solution of Mx = b, or None.
    pub fn solve(&self, b: &[F::Elt]) -> Option<Vec<F::Elt>> {
        let bm = Mat::from_cols(&self.f, self.rows, &[b.to_vec()]);
        let (m, piv) = self.hstack(&bm).rref();
        if piv.contains(&self.cols) {
            return None;
        }
        let mut x = vec![self.f.zero(); self.cols];
        for (r, &pc) in piv.iter().enumerate() {
            x[pc] = m.get(r, self.cols).clone();
        }
        Some(x)
    }
    /// Solve MX = B column by column.
    pub fn solve_mat(&self, b: &Self) -> Option<Self> {
        let cols: Option<Vec<_>> = b.col_vecs().iter().map(|c| self.solve(c)).collect();
        Some(Mat::from_cols(&self.f, self.cols, &cols?))
    }
    pub fn det(&self) -> F::Elt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = self.f.one();
        for c in 0..n {
            let Some(pr) = min_val_index((c..n).map(|i| (i, m.get(i, c).clone()))) else {
                let prec = m.col(c).iter().map(|x| x.abs_prec()).min().unwrap_or(EXACT);
                return self.f.zero_prec(det.valuation().map_or(prec, |v| v + prec));
            };
            if pr != c {
                m.swap_rows(pr, c);
                det = det.neg();
            }
            let piv = m.get(c, c).clone();
            det = det.mul(&piv);
            let inv = piv.inv().expect("pivot is nonzero");
            for i in c + 1..n {
                let fct = m.get(i, c).mul(&inv);
                if fct.is_exact_zero() {
                    continue;
                }
                for j in c..n {
                    let x = m.get(i, j).sub(&fct.mul(m.get(c, j)));
                    m.set(i, j, x);
                }
            }
        }
        det
    }
    pub fn inverse(&self) -> Result<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let (m, piv) = self.hstack(&Self::identity(&self.f, n)).rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return Err(Error::precision("lattices", "matrix is singular to precision"));
        }
        Ok(m.submatrix(&(0..n).collect::<Vec<_>>(), &(n..2 * n).collect::<Vec<_>>()))
    }
    /// Column-space basis as vectors.
    pub fn image(&self) -> Vec<Vec<F::Elt>> {
        Subspace::span(&self.f, self.rows, &self.col_vecs()).basis().to_vec()
    }
    /// Entrywise coefficient Frobenius.
    pub fn frobenius(&self) -> Self {
        self.map(|x| x.frobenius())
    }
    /// Characteristic polynomial det(X − M) by Berkowitz's division-free
    /// algorithm; coefficients lowest degree first, monic.
    pub fn charpoly(&self) -> Vec<F::Elt> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let f = &self.f;
        // Berkowitz: vector of coefficients highest degree first.
        let mut c: Vec<F::Elt> = vec![f.one(), self.get(0, 0).neg()];
        for k in 1..n {
            // partition leading (k+1)x(k+1) block: [[A, R],[S, a]] with a = M[k][k]
            let a = self.get(k, k).clone();
            let r: Vec<F::Elt> = (0..k).map(|j| self.get(k, j).clone()).collect(); // row
            let s: Vec<F::Elt> = (0..k).map(|i| self.get(i, k).clone()).collect(); // column
            let blk = self.submatrix(&(0..k).collect::<Vec<_>>(), &(0..k).collect::<Vec<_>>());
            // Toeplitz column: [1, −a, −R·S, −R·A·S, …, −R·A^{k−1}·S]
            let mut t = vec![f.one(), a.neg()];
            let mut v = s.clone();
            for _ in 0..k {
                let rs = r.iter().zip(&v).fold(f.zero(), |acc, (x, y)| acc.add(&x.mul(y)));
                t.push(rs.neg());
                v = blk.mul_vec(&v);
            }
            // new coefficients = T (k+2 × k+1 lower-triangular Toeplitz) · c
            let mut nc = vec![f.zero(); k + 2];
            for (i, slot) in nc.iter_mut().enumerate() {
                let mut acc = f.zero();
                for (j, cj) in c.iter().enumerate() {
                    if i >= j && i - j < t.len() {
                        acc = acc.add(&t[i - j].mul(cj));
                    }
                }
                *slot = acc;
            }
            c = nc;
        }
        c.reverse();
        c
    }
}

/// A K_0-subspace of K_0^n in reduced row echelon form with pivots ascending.
#[derive(Clone)]
pub struct Subspace<F: CoeffField> {
    f: F,
    n: usize,
    rows: Vec<Vec<F::Elt>>,
    pivots: Vec<usize>,
}

impl<F: CoeffField> fmt::Debug for Subspace<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}, pivots {:?})", self.rows.len(), self.n, self.pivots)
    }
}

impl<F: CoeffField> Subspace<F> {
    pub fn zero(f: &F, n: usize) -> Self {
        Subspace { f: f.clone(), n, rows: Vec::new(), pivots: Vec::new() }
    }
    pub fn full(f: &F, n: usize) -> Self {
        let id = Mat::identity(f, n);
        Self::span(f, n, &id.col_vecs())
    }
    pub fn span(f: &F, n: usize, vs: &[Vec<F::Elt>]) -> Self {
        if vs.is_empty() {
            return Self::zero(f, n);
        }
        let m = Mat::from_rows(f, vs.to_vec());
        let (r, piv) = m.rref();
        let rows = (0..piv.len()).map(|i| r.row(i)).collect();
        Subspace { f: f.clone(), n, rows, pivots: piv }
    }
    pub fn ambient(&self) -> usize {
        self.n
    }
    pub fn dim(&self) -> usize {
        self.rows.len()
    }
    pub fn basis(&self) -> &[Vec<F::Elt>] {
        &self.rows
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    pub fn field(&self) -> &F {
        &self.f
    }
    /// Remainder of v after elimination against the echelon basis.
    pub fn reduce(&self, v: &[F::Elt]) -> Vec<F::Elt> {
        let mut w = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = w[pc].clone();
            if c.is_exact_zero() {
                continue;
            }
            for j in 0..self.n {
                w[j] = w[j].sub(&c.mul(&row[j]));
            }
            w[pc] = self.f.zero();
        }
        w
    }
    pub fn contains(&self, v: &[F::Elt]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }
    pub fn contains_space(&self, o: &Self) -> bool {
        o.rows.iter().all(|v| self.contains(v))
    }
    pub fn eq_space(&self, o: &Self) -> bool {
        self.dim() == o.dim() && self.contains_space(o)
    }
    pub fn sum(&self, o: &Self) -> Self {
        let mut vs = self.rows.clone();
        vs.extend(o.rows.iter().cloned());
        Self::span(&self.f, self.n, &vs)
    }
    pub fn intersect(&self, o: &Self) -> Self {
        if self.dim() == 0 || o.dim() == 0 {
            return Self::zero(&self.f, self.n);
        }
        // a·B_self = b·B_o  ⇔  (a, −b) in kernel of the stacked transpose
        let mut cols = self.rows.clone();
        cols.extend(o.rows.iter().map(|v| v.iter().map(|x| x.neg()).collect()));
        let m = Mat::from_cols(&self.f, self.n, &cols);
        let ker = m.kernel();
        let vs: Vec<Vec<F::Elt>> = ker
            .iter()
            .map(|k| {
                let mut v = vec![self.f.zero(); self.n];
                for (i, row) in self.rows.iter().enumerate() {
                    for j in 0..self.n {
                        v[j] = v[j].add(&k[i].mul(&row[j]));
                    }
                }
                v
            })
            .collect();
        Self::span(&self.f, self.n, &vs)
    }
    /// Image under a linear map given as a matrix acting on columns.
    pub fn map(&self, m: &Mat<F>) -> Self {
        let vs: Vec<_> = self.rows.iter().map(|v| m.mul_vec(v)).collect();
        Self::span(&self.f, m.rows(), &vs)
    }
    /// Basis vectors as the columns of an n × dim matrix.
    pub fn basis_matrix(&self) -> Mat<F> {
        Mat::from_cols(&self.f, self.n, &self.rows)
    }
    /// Standard coordinates completing the pivots to a basis of K_0^n.
    pub fn complement_coords(&self) -> Vec<usize> {
        (0..self.n).filter(|c| !self.pivots.contains(c)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic_series::padic::PadicField;

    #[test]
    fn inverse_det_kernel() {
        let f = PadicField::new(3, 12).unwrap();
        let m = Mat::from_i64(&f, &[&[1, 2], &[3, 4]]);
        assert!(m.det().eq_prec(&f.from_i64(-2)));
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).eq_prec(&Mat::identity(&f, 2)));
        let s = Mat::from_i64(&f, &[&[1, 2], &[2, 4]]);
        assert_eq!(s.rank(), 1);
        let k = s.kernel();
        assert_eq!(k.len(), 1);
        assert!(s.mul_vec(&k[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn charpoly_berkowitz() {
        let f = PadicField::new(3, 12).unwrap();
        let m = Mat::from_i64(&f, &[&[0, 3], &[1, 0]]);
        let c = m.charpoly();
        // X² − 3
        assert!(c[0].eq_prec(&f.from_i64(-3)) && c[1].is_zero() && c[2].is_one());
        let m3 = Mat::from_i64(&f, &[&[2, 1, 0], &[0, 2, 0], &[1, 0, 5]]);
        let c3 = m3.charpoly();
        // (X−2)²(X−5) = X³ − 9X² + 24X − 20
        let want = [-20, 24, -9, 1];
        for (a, b) in c3.iter().zip(want) {
            assert!(a.eq_prec(&f.from_i64(b)));
        }
    }

    #[test]
    fn subspace_ops() {
        let f = PadicField::new(3, 12).unwrap();
        let v = |xs: &[i64]| xs.iter().map(|x| f.from_i64(*x)).collect::<Vec<_>>();
        let a = Subspace::span(&f, 3, &[v(&[1, 0, 0]), v(&[0, 1, 0])]);
        let b = Subspace::span(&f, 3, &[v(&[0, 1, 1]), v(&[1, 1, 0])]);
        let c = a.intersect(&b);
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&v(&[1, 1, 0])));
        assert_eq!(a.sum(&b).dim(), 3);
    }
}
