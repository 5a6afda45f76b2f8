use std::fmt;

use crate::error::{Error, Result};
use crate::lattices::jetmat::JetMat;
use crate::lattices::linalg::Mat;
use crate::padic_series::coeff::CoeffField;
use crate::padic_series::ctx::PrecCtx;
use crate::padic_series::jet::JetRing;
use crate::padic_series::poly::Poly;
use crate::padic_series::series::SeriesElt;

/// Matrix over 𝔖[1/p][1/E] with `SeriesElt` entries.
#[derive(Clone)]
pub struct SMat<F: CoeffField> {
    ctx: PrecCtx<F>,
    rows: usize,
    cols: usize,
    d: Vec<SeriesElt<F>>,
}

impl<F: CoeffField> fmt::Debug for SMat<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:?}", self.get(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<F: CoeffField> SMat<F> {
    pub fn zeros(ctx: &PrecCtx<F>, rows: usize, cols: usize) -> Self {
        SMat { ctx: ctx.clone(), rows, cols, d: vec![SeriesElt::zero(ctx); rows * cols] }
    }
    pub fn identity(ctx: &PrecCtx<F>, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, SeriesElt::one(ctx));
        }
        m
    }
    pub fn from_rows(ctx: &PrecCtx<F>, rows: Vec<Vec<SeriesElt<F>>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut d = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            d.extend(row);
        }
        SMat { ctx: ctx.clone(), rows: r, cols: c, d }
    }
    /// Constant matrix.
    pub fn from_mat(ctx: &PrecCtx<F>, m: &Mat<F>) -> Self {
        let mut s = Self::zeros(ctx, m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                s.set(i, j, SeriesElt::constant(ctx, m.get(i, j).clone()));
            }
        }
        s
    }
    pub fn diag(ctx: &PrecCtx<F>, ds: Vec<SeriesElt<F>>) -> Self {
        let n = ds.len();
        let mut m = Self::zeros(ctx, n, n);
        for (i, x) in ds.into_iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    pub fn ctx(&self) -> &PrecCtx<F> {
        &self.ctx
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> &SeriesElt<F> {
        &self.d[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, x: SeriesElt<F>) {
        self.d[i * self.cols + j] = x;
    }
    pub fn entries(&self) -> &[SeriesElt<F>] {
        &self.d
    }
    pub fn col(&self, j: usize) -> Vec<SeriesElt<F>> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::domain("lattices", "dimension mismatch"));
        }
        let mut m = Self::zeros(&self.ctx, self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut s = SeriesElt::zero(&self.ctx);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.poly().is_exact_zero() {
                        continue;
                    }
                    s = s.add(&a.mul(o.get(k, j))?)?;
                }
                m.set(i, j, s);
            }
        }
        Ok(m)
    }
    pub fn add(&self, o: &Self) -> Result<Self> {
        let d: Result<Vec<_>> = self.d.iter().zip(&o.d).map(|(a, b)| a.add(b)).collect();
        Ok(SMat { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, d: d? })
    }
    pub fn sub(&self, o: &Self) -> Result<Self> {
        let d: Result<Vec<_>> = self.d.iter().zip(&o.d).map(|(a, b)| a.sub(b)).collect();
        Ok(SMat { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, d: d? })
    }
    pub fn map(&self, op: impl Fn(&SeriesElt<F>) -> Result<SeriesElt<F>>) -> Result<Self> {
        let d: Result<Vec<_>> = self.d.iter().map(op).collect();
        Ok(SMat { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, d: d? })
    }
    pub fn scale(&self, c: &SeriesElt<F>) -> Result<Self> {
        self.map(|x| x.mul(c))
    }
    pub fn mul_e_pow(&self, k: i64) -> Self {
        self.map(|x| Ok(x.mul_e_pow(k))).expect("infallible")
    }
    pub fn frobenius(&self) -> Result<Self> {
        self.map(|x| x.frobenius())
    }
    pub fn frobenius_n(&self, n: u32) -> Result<Self> {
        self.map(|x| x.frobenius_n(n))
    }
    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(&self.ctx, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }
    pub fn is_truncated(&self) -> bool {
        self.d.iter().any(|x| x.is_truncated())
    }
    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|x| x.is_zero())
    }
    /// Largest E-denominator among entries.
    pub fn max_d_e(&self) -> i64 {
        self.d.iter().map(|x| x.d_e()).max().unwrap_or(0)
    }
    /// Reduction modulo u of an E-denominator-free matrix.
    pub fn at_zero(&self) -> Result<Mat<F>> {
        let f = self.ctx.field();
        let mut m = Mat::zeros(f, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.get(i, j).expand_denominator()?;
                m.set(i, j, x.coeff(0));
            }
        }
        Ok(m)
    }
    pub fn to_jets(&self, ring: &JetRing<F>) -> Result<JetMat<F>> {
        let d: Result<Vec<_>> = self.d.iter().map(|x| x.to_jet(ring)).collect();
        Ok(JetMat::from_vec(ring, self.rows, self.cols, d?))
    }
    /// Jets of φ^m of this matrix (exact entries only).
    pub fn frob_to_jets(&self, ring: &JetRing<F>, m: u32) -> Result<JetMat<F>> {
        let mut d = Vec::with_capacity(self.d.len());
        let fe = ring.from_poly_frob(self.ctx.e_poly(), m)?;
        for x in &self.d {
            if x.is_truncated() {
                return Err(Error::domain("lattices", "Frobenius jets need exact entries"));
            }
            let num = ring.from_poly_frob(x.poly(), m)?;
            let j = if x.d_e() == 0 { num } else { num.mul(&fe.pow_i(-x.d_e())?)? };
            d.push(j);
        }
        Ok(JetMat::from_vec(ring, self.rows, self.cols, d))
    }
    /// Determinant by cofactor expansion (ranks here are small).
    pub fn det(&self) -> Result<SeriesElt<F>> {
        if self.rows != self.cols {
            return Err(Error::domain("lattices", "determinant of a non-square matrix"));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(SeriesElt::one(&self.ctx));
        }
        if n == 1 {
            return Ok(self.get(0, 0).clone());
        }
        let mut acc = SeriesElt::zero(&self.ctx);
        for j in 0..n {
            let a = self.get(0, j);
            if a.poly().is_exact_zero() {
                continue;
            }
            let minor = self.minor(0, j);
            let t = a.mul(&minor.det()?)?;
            acc = if j % 2 == 0 { acc.add(&t)? } else { acc.sub(&t)? };
        }
        Ok(acc)
    }
    fn minor(&self, r: usize, c: usize) -> Self {
        let rows: Vec<Vec<SeriesElt<F>>> = (0..self.rows)
            .filter(|i| *i != r)
            .map(|i| (0..self.cols).filter(|j| *j != c).map(|j| self.get(i, j).clone()).collect())
            .collect();
        Self::from_rows(&self.ctx, rows)
    }
    /// Adjugate matrix.
    pub fn adjugate(&self) -> Result<Self> {
        let n = self.rows;
        let mut m = Self::zeros(&self.ctx, n, n);
        if n == 1 {
            m.set(0, 0, SeriesElt::one(&self.ctx));
            return Ok(m);
        }
        for i in 0..n {
            for j in 0..n {
                let d = self.minor(i, j).det()?;
                m.set(j, i, if (i + j) % 2 == 0 { d } else { d.neg() });
            }
        }
        Ok(m)
    }
    /// Matrix of exact polynomials (numerators; requires d_e = 0 entries).
    pub fn polys(&self) -> Result<Vec<Poly<F>>> {
        self.d
            .iter()
            .map(|x| {
                if x.d_e() != 0 {
                    Err(Error::domain("lattices", "entry has an E-denominator"))
                } else {
                    Ok(x.poly().clone())
                }
            })
            .collect()
    }
    pub fn eq_prec(&self, o: &Self) -> bool {
        self.rows == o.rows && self.cols == o.cols && self.sub(o).is_ok_and(|d| d.is_zero())
    }
}
