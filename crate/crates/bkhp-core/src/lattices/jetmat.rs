use std::fmt;

use crate::error::{Error, Result};
use crate::padic_series::coeff::CoeffField;
use crate::padic_series::jet::{Jet, JetRing};

/// Matrix over a jet ring Ŝ_n[1/F]/F^h.
#[derive(Clone)]
pub struct JetMat<F: CoeffField> {
    ring: JetRing<F>,
    rows: usize,
    cols: usize,
    d: Vec<Jet<F>>,
}

impl<F: CoeffField> fmt::Debug for JetMat<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:?}", self.get(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Row-side Smith data: `pinv·A·Q = diag(F^{exps[t]}·unit)` for some
/// invertible Q, so the column span of A is `P·diag(F^{exps})` with P = pinv⁻¹.
#[derive(Clone, Debug)]
pub struct JetSmith<F: CoeffField> {
    pub pinv: JetMat<F>,
    pub exps: Vec<i64>,
}

/// Two-sided Smith data, see [`JetMat::smith_full`].
#[derive(Clone, Debug)]
pub struct JetSmithFull<F: CoeffField> {
    pub pinv: JetMat<F>,
    pub q: JetMat<F>,
    pub exps: Vec<i64>,
    pub d: JetMat<F>,
}

impl<F: CoeffField> JetMat<F> {
    pub fn zeros(ring: &JetRing<F>, rows: usize, cols: usize) -> Self {
        JetMat { ring: ring.clone(), rows, cols, d: vec![ring.zero(); rows * cols] }
    }
    pub fn identity(ring: &JetRing<F>, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }
    pub fn diag(ring: &JetRing<F>, ds: Vec<Jet<F>>) -> Self {
        let n = ds.len();
        let mut m = Self::zeros(ring, n, n);
        for (i, x) in ds.into_iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }
    pub fn from_vec(ring: &JetRing<F>, rows: usize, cols: usize, d: Vec<Jet<F>>) -> Self {
        assert_eq!(d.len(), rows * cols, "entry count mismatch");
        JetMat { ring: ring.clone(), rows, cols, d }
    }
    pub fn from_cols(ring: &JetRing<F>, rows: usize, cols: &[Vec<Jet<F>>]) -> Self {
        let mut m = Self::zeros(ring, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn ring(&self) -> &JetRing<F> {
        &self.ring
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> &Jet<F> {
        &self.d[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, x: Jet<F>) {
        self.d[i * self.cols + j] = x;
    }
    pub fn col(&self, j: usize) -> Vec<Jet<F>> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }
    pub fn entries(&self) -> &[Jet<F>] {
        &self.d
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::domain("lattices", "dimension mismatch"));
        }
        let mut m = Self::zeros(&self.ring, self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut s = self.ring.zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_exact_zero() {
                        continue;
                    }
                    s = s.add(&a.mul(o.get(k, j))?)?;
                }
                m.set(i, j, s);
            }
        }
        Ok(m)
    }
    pub fn mul_vec(&self, v: &[Jet<F>]) -> Result<Vec<Jet<F>>> {
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut s = self.ring.zero();
            for (k, x) in v.iter().enumerate() {
                s = s.add(&self.get(i, k).mul(x)?)?;
            }
            out.push(s);
        }
        Ok(out)
    }
    pub fn map(&self, op: impl Fn(&Jet<F>) -> Result<Jet<F>>) -> Result<Self> {
        let d: Result<Vec<_>> = self.d.iter().map(op).collect();
        Ok(JetMat { ring: self.ring.clone(), rows: self.rows, cols: self.cols, d: d? })
    }
    pub fn add(&self, o: &Self) -> Result<Self> {
        let d: Result<Vec<_>> = self.d.iter().zip(&o.d).map(|(a, b)| a.add(b)).collect();
        Ok(JetMat { ring: self.ring.clone(), rows: self.rows, cols: self.cols, d: d? })
    }
    pub fn sub(&self, o: &Self) -> Result<Self> {
        let d: Result<Vec<_>> = self.d.iter().zip(&o.d).map(|(a, b)| a.sub(b)).collect();
        Ok(JetMat { ring: self.ring.clone(), rows: self.rows, cols: self.cols, d: d? })
    }
    pub fn neg(&self) -> Self {
        self.map(|x| Ok(x.neg())).expect("infallible")
    }
    pub fn mul_e_pow(&self, k: i64) -> Self {
        self.map(|x| Ok(x.mul_e_pow(k))).expect("infallible")
    }
    pub fn scale(&self, c: &Jet<F>) -> Result<Self> {
        self.map(|x| x.mul(c))
    }
    pub fn u_derive(&self) -> Result<Self> {
        self.map(|x| x.u_derive())
    }
    pub fn truncate(&self, prec: i64) -> Self {
        self.map(|x| Ok(x.truncate(prec))).expect("infallible")
    }
    /// Entrywise φ into the ring at φ(F).
    pub fn frob_into(&self, target: &JetRing<F>) -> Result<Self> {
        let d: Result<Vec<_>> = self.d.iter().map(|x| x.frob_into(target)).collect();
        Ok(JetMat { ring: target.clone(), rows: self.rows, cols: self.cols, d: d? })
    }
    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }
    pub fn hstack(&self, o: &Self) -> Self {
        let mut m = Self::zeros(&self.ring, self.rows, self.cols + o.cols);
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
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut m = Self::zeros(&self.ring, r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                m.set(i - r0, j - c0, self.get(i, j).clone());
            }
        }
        m
    }
    /// Smallest F-valuation among nonzero entries.
    pub fn min_valuation(&self) -> Option<i64> {
        self.d.iter().filter_map(|x| x.valuation()).min()
    }
    /// Smallest absolute jet order among entries.
    pub fn prec(&self) -> i64 {
        self.d.iter().map(|x| x.prec()).min().unwrap_or(i64::MAX)
    }
    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|x| x.is_zero())
    }
    pub fn eq_prec(&self, o: &Self) -> bool {
        self.rows == o.rows && self.cols == o.cols && self.sub(o).is_ok_and(|d| d.is_zero())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.d.swap(a * self.cols + j, b * self.cols + j);
        }
    }
    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.d.swap(i * self.cols + a, i * self.cols + b);
        }
    }
    /// row_i ← row_i − f·row_t.
    fn row_axpy(&mut self, i: usize, t: usize, f: &Jet<F>) -> Result<()> {
        for j in 0..self.cols {
            let x = self.get(t, j);
            if x.is_exact_zero() {
                continue;
            }
            let y = self.get(i, j).sub(&f.mul(x)?)?;
            self.set(i, j, y);
        }
        Ok(())
    }

    /// Minimal-valuation pivot in the block rows ≥ t, cols ≥ t; ties go to
    /// the lowest row, then the lowest column.
    fn pivot(&self, t: usize) -> Option<(usize, usize, i64)> {
        let mut best: Option<(usize, usize, i64)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                if let Some(v) = self.get(i, j).valuation() {
                    if best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        best
    }

    /// Smith reduction over the discrete valuation ring of jets, tracking
    /// row operations only.
    pub fn smith(&self) -> Result<JetSmith<F>> {
        if self.rows != self.cols {
            return Err(Error::domain("lattices", "Smith reduction of a non-square matrix"));
        }
        let n = self.rows;
        let mut w = self.clone();
        let mut pinv = Self::identity(&self.ring, n);
        let mut exps = Vec::with_capacity(n);
        for t in 0..n {
            let (i, j, v) = w
                .pivot(t)
                .ok_or_else(|| Error::precision("lattices", "jet matrix is singular to precision"))?;
            w.swap_rows(t, i);
            pinv.swap_rows(t, i);
            w.swap_cols(t, j);
            let piv_inv = w.get(t, t).inv()?;
            for r in t + 1..n {
                if w.get(r, t).is_exact_zero() {
                    continue;
                }
                let f = w.get(r, t).mul(&piv_inv)?;
                w.row_axpy(r, t, &f)?;
                pinv.row_axpy(r, t, &f)?;
            }
            // The column operations clearing row t only touch row t.
            for c in t + 1..n {
                w.set(t, c, self.ring.zero());
            }
            exps.push(v);
        }
        Ok(JetSmith { pinv, exps })
    }

    /// Two-sided Smith reduction of a rectangular matrix: `pinv·A·q = D` with
    /// D diagonal, D_tt = F^{exps[t]}·unit for t < rank and zero beyond.
    pub fn smith_full(&self) -> Result<JetSmithFull<F>> {
        let (r, c) = (self.rows, self.cols);
        let mut w = self.clone();
        let mut pinv = Self::identity(&self.ring, r);
        let mut q = Self::identity(&self.ring, c);
        let mut exps = Vec::new();
        for t in 0..r.min(c) {
            let Some((i, j, v)) = w.pivot(t) else { break };
            w.swap_rows(t, i);
            pinv.swap_rows(t, i);
            w.swap_cols(t, j);
            q.swap_cols(t, j);
            let piv_inv = w.get(t, t).inv()?;
            for rr in t + 1..r {
                if w.get(rr, t).is_exact_zero() {
                    continue;
                }
                let f = w.get(rr, t).mul(&piv_inv)?;
                w.row_axpy(rr, t, &f)?;
                pinv.row_axpy(rr, t, &f)?;
            }
            for cc in t + 1..c {
                if w.get(t, cc).is_exact_zero() {
                    continue;
                }
                let f = w.get(t, cc).mul(&piv_inv)?;
                w.col_axpy(cc, t, &f)?;
                q.col_axpy(cc, t, &f)?;
            }
            exps.push(v);
        }
        Ok(JetSmithFull { pinv, q, exps, d: w })
    }
    /// col_j ← col_j − f·col_t.
    fn col_axpy(&mut self, j: usize, t: usize, f: &Jet<F>) -> Result<()> {
        for i in 0..self.rows {
            let x = self.get(i, t);
            if x.is_exact_zero() {
                continue;
            }
            let y = self.get(i, j).sub(&x.mul(f)?)?;
            self.set(i, j, y);
        }
        Ok(())
    }

    /// Solve self·X = rhs for square invertible self.
    pub fn solve_mat(&self, rhs: &Self) -> Result<Self> {
        if self.rows != self.cols || rhs.rows != self.rows {
            return Err(Error::domain("lattices", "dimension mismatch"));
        }
        let n = self.rows;
        let mut a = self.hstack(rhs);
        let mut perm: Vec<usize> = (0..n).collect();
        for t in 0..n {
            // pivot restricted to the left block
            let mut best: Option<(usize, usize, i64)> = None;
            for i in t..n {
                for j in t..n {
                    if let Some(v) = a.get(i, j).valuation() {
                        if best.is_none_or(|(_, _, bv)| v < bv) {
                            best = Some((i, j, v));
                        }
                    }
                }
            }
            let (i, j, _) =
                best.ok_or_else(|| Error::precision("lattices", "jet matrix is singular to precision"))?;
            a.swap_rows(t, i);
            a.swap_cols(t, j);
            perm.swap(t, j);
            let piv_inv = a.get(t, t).inv()?;
            for c in 0..a.cols {
                let y = a.get(t, c).mul(&piv_inv)?;
                a.set(t, c, y);
            }
            for r in 0..n {
                if r == t || a.get(r, t).is_exact_zero() {
                    continue;
                }
                let f = a.get(r, t).clone();
                a.row_axpy(r, t, &f)?;
            }
        }
        // a = [I | X'] where X' solves the column-permuted system
        let mut x = Self::zeros(&self.ring, n, rhs.cols);
        for t in 0..n {
            for c in 0..rhs.cols {
                x.set(perm[t], c, a.get(t, n + c).clone());
            }
        }
        Ok(x)
    }
    pub fn inverse(&self) -> Result<Self> {
        self.solve_mat(&Self::identity(&self.ring, self.rows))
    }
    pub fn det(&self) -> Result<Jet<F>> {
        if self.rows != self.cols {
            return Err(Error::domain("lattices", "determinant of a non-square matrix"));
        }
        let n = self.rows;
        let mut w = self.clone();
        let mut det = self.ring.one();
        for t in 0..n {
            let Some((i, j, _)) = w.pivot(t) else {
                return Ok(self.ring.zero_prec(det.prec()));
            };
            if i != t {
                w.swap_rows(t, i);
                det = det.neg();
            }
            if j != t {
                w.swap_cols(t, j);
                det = det.neg();
            }
            let piv = w.get(t, t).clone();
            let piv_inv = piv.inv()?;
            for r in t + 1..n {
                if w.get(r, t).is_exact_zero() {
                    continue;
                }
                let f = w.get(r, t).mul(&piv_inv)?;
                w.row_axpy(r, t, &f)?;
            }
            det = det.mul(&piv)?;
        }
        Ok(det)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic_series::ctx::ctx0;

    #[test]
    fn inverse_and_smith() {
        let c = ctx0();
        let r = JetRing::at_e(&c, 6);
        let e = r.e();
        let u = r.u();
        // [[E, u], [0, 1]]
        let m = JetMat::from_vec(&r, 2, 2, vec![e.clone(), u.clone(), r.zero(), r.one()]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().eq_prec(&JetMat::identity(&r, 2)));
        assert_eq!(m.det().unwrap().valuation(), Some(1));
        let s = m.smith().unwrap();
        let mut ex = s.exps.clone();
        ex.sort();
        assert_eq!(ex, vec![0, 1]);
        // pinv·m has columns spanning diag(E^exps) up to a unit change
        let pm = s.pinv.mul(&m).unwrap();
        assert!(pm.det().unwrap().valuation() == Some(1));
    }
}
