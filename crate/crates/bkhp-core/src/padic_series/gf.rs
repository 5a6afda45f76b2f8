use crate::error::{Error, Result};

/// The finite field F_q, q = p^f ≤ 2^16.
///
/// Elements are indices in [0, q): the base-p digits of an index are the
/// coefficients of a polynomial in the generator modulo the defining
/// polynomial. The defining polynomial is the smallest primitive one, so the
/// generator also generates the multiplicative group and exp/log tables give
/// multiplication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf {
    p: u32,
    f: u32,
    q: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits q into (p, f) with q = p^f, p prime.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while q % p != 0 {
        p += 1;
    }
    if !is_prime(p) {
        return None;
    }
    let (mut r, mut f) = (q, 0);
    while r % p == 0 {
        r /= p;
        f += 1;
    }
    (r == 1).then_some((p, f))
}

pub fn is_prime_u64(n: u64) -> bool {
    is_prime(n)
}

impl Gf {
    pub fn new(q: u64) -> Result<Gf> {
        let (p, f) = prime_power(q)
            .ok_or_else(|| Error::domain("padic_series", format!("{} is not a prime power", q)))?;
        if q > 1 << 16 {
            return Err(Error::domain("padic_series", "residue field larger than 2^16"));
        }
        let (p, q) = (p as u32, q as u32);
        // Search the monic degree-f polynomials x^f + Σ c_i x^i (encoded by the
        // index of their low part) for one in which x has order q-1.
        for low in 0..q {
            if f > 1 && low % p == 0 {
                continue;
            }
            let digits: Vec<u32> = (0..f).map(|i| (low / p.pow(i)) % p).collect();
            if let Some(exp) = Self::try_generator(p, f, q, &digits) {
                let mut log = vec![0u32; q as usize];
                for (i, e) in exp.iter().enumerate() {
                    log[*e as usize] = i as u32;
                }
                return Ok(Gf { p, f, q, exp, log });
            }
        }
        Err(Error::internal("padic_series", "no primitive polynomial found"))
    }

    /// Powers of x modulo x^f + Σ low_i x^i, if x is primitive.
    fn try_generator(p: u32, f: u32, q: u32, low: &[u32]) -> Option<Vec<u32>> {
        let f = f as usize;
        // For f = 1 the polynomial x + c identifies x with -c.
        let mut cur = vec![0u32; f];
        cur[0] = 1;
        let mut exp = Vec::with_capacity(q as usize - 1);
        let enc = |v: &[u32]| v.iter().rev().fold(0u32, |a, d| a * p + d);
        for i in 0..(q - 1) {
            let code = enc(&cur);
            if i > 0 && code == 1 {
                return None;
            }
            exp.push(code);
            // multiply by x
            if f == 1 {
                let x = (p - low[0] % p) % p;
                cur[0] = (cur[0] * x) % p;
            } else {
                let top = cur[f - 1];
                for j in (1..f).rev() {
                    cur[j] = cur[j - 1];
                }
                cur[0] = 0;
                for j in 0..f {
                    cur[j] = (cur[j] + (p - (top * low[j]) % p)) % p;
                }
            }
            if cur.iter().all(|d| *d == 0) {
                return None;
            }
        }
        (enc(&cur) == 1).then_some(exp)
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.f
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.f == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b, mut out, mut scale) = (a, b, 0, 1);
        for _ in 0..self.f {
            out += ((a % self.p + b % self.p) % self.p) * scale;
            a /= self.p;
            b /= self.p;
            scale *= self.p;
        }
        out
    }
    pub fn neg(&self, a: u32) -> u32 {
        if self.f == 1 {
            return (self.p - a % self.p) % self.p;
        }
        let (mut a, mut out, mut scale) = (a, 0, 1);
        for _ in 0..self.f {
            out += ((self.p - a % self.p) % self.p) * scale;
            a /= self.p;
            scale *= self.p;
        }
        out
    }
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.q - 1;
        self.exp[((self.log[a as usize] + self.log[b as usize]) % n) as usize]
    }
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.q - 1;
        Some(self.exp[((n - self.log[a as usize]) % n) as usize])
    }
    pub fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }
    /// The generator of F_q over F_p.
    pub fn generator(&self) -> u32 {
        self.exp[1 % (self.q as usize - 1).max(1)]
    }
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }
}

/// Polynomials over F_q, coefficient vectors with lowest degree first.
pub mod poly {
    use super::Gf;

    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn degree(a: &[u32]) -> Option<usize> {
        a.iter().rposition(|c| *c != 0)
    }

    pub fn eval(k: &Gf, a: &[u32], x: u32) -> u32 {
        a.iter().rev().fold(0, |acc, c| k.add(k.mul(acc, x), *c))
    }

    pub fn derivative(k: &Gf, a: &[u32]) -> Vec<u32> {
        let out = (1..a.len()).map(|i| k.mul(k.from_i64(i as i64), a[i])).collect();
        trim(out)
    }

    /// Remainder and quotient of a by a nonzero b.
    pub fn divrem(k: &Gf, a: &[u32], b: &[u32]) -> (Vec<u32>, Vec<u32>) {
        let b = trim(b.to_vec());
        let db = b.len() - 1;
        let lead_inv = k.inv(b[db]).expect("nonzero divisor");
        let mut r = trim(a.to_vec());
        if r.len() <= db {
            return (vec![], r);
        }
        let mut qt = vec![0u32; r.len() - db];
        while r.len() > db {
            let shift = r.len() - 1 - db;
            let c = k.mul(*r.last().unwrap(), lead_inv);
            qt[shift] = c;
            for (j, bj) in b.iter().enumerate() {
                r[shift + j] = k.sub(r[shift + j], k.mul(c, *bj));
            }
            r = trim(r);
        }
        (trim(qt), r)
    }

    pub fn gcd(k: &Gf, a: &[u32], b: &[u32]) -> Vec<u32> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let (_, r) = divrem(k, &a, &b);
            a = b;
            b = r;
        }
        a
    }

    /// Squarefree test; constants count as squarefree.
    pub fn is_squarefree(k: &Gf, a: &[u32]) -> bool {
        let a = trim(a.to_vec());
        if a.len() <= 2 {
            return true;
        }
        let d = derivative(k, &a);
        if d.is_empty() {
            return false;
        }
        gcd(k, &a, &d).len() == 1
    }

    pub fn roots(k: &Gf, a: &[u32]) -> Vec<u32> {
        k.elements().filter(|x| eval(k, a, *x) == 0).collect()
    }

    fn monic_of_degree(k: &Gf, d: usize, idx: u64) -> Vec<u32> {
        let q = k.q() as u64;
        let mut v = Vec::with_capacity(d + 1);
        let mut i = idx;
        for _ in 0..d {
            v.push((i % q) as u32);
            i /= q;
        }
        v.push(1);
        v
    }

    pub fn add(k: &Gf, a: &[u32], b: &[u32]) -> Vec<u32> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| k.add(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0)))
            .collect();
        trim(out)
    }

    pub fn sub(k: &Gf, a: &[u32], b: &[u32]) -> Vec<u32> {
        let nb: Vec<u32> = b.iter().map(|c| k.neg(*c)).collect();
        add(k, a, &nb)
    }

    pub fn mul(k: &Gf, a: &[u32], b: &[u32]) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = k.add(out[i + j], k.mul(*x, *y));
            }
        }
        trim(out)
    }

    /// Scale to a monic polynomial.
    pub fn monic(k: &Gf, a: &[u32]) -> Vec<u32> {
        let a = trim(a.to_vec());
        match a.last() {
            None => a,
            Some(l) => {
                let li = k.inv(*l).expect("nonzero leading coefficient");
                a.iter().map(|c| k.mul(*c, li)).collect()
            }
        }
    }

    /// (g, s, t) with s·a + t·b = g = gcd(a, b) monic.
    pub fn ext_gcd(k: &Gf, a: &[u32], b: &[u32]) -> (Vec<u32>, Vec<u32>, Vec<u32>) {
        let (mut r0, mut r1) = (trim(a.to_vec()), trim(b.to_vec()));
        let (mut s0, mut s1) = (vec![1u32], vec![]);
        let (mut t0, mut t1) = (vec![], vec![1u32]);
        while !r1.is_empty() {
            let (qt, r) = divrem(k, &r0, &r1);
            let s2 = sub(k, &s0, &mul(k, &qt, &s1));
            let t2 = sub(k, &t0, &mul(k, &qt, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        let l = *r0.last().expect("gcd of zero polynomials");
        let li = k.inv(l).expect("nonzero");
        let sc = |v: &[u32]| trim(v.iter().map(|c| k.mul(*c, li)).collect());
        (sc(&r0), sc(&s0), sc(&t0))
    }

    /// Monic irreducible factors with multiplicities, by trial division.
    pub fn factor(k: &Gf, a: &[u32]) -> Vec<(Vec<u32>, usize)> {
        let mut rest = monic(k, a);
        let mut out: Vec<(Vec<u32>, usize)> = Vec::new();
        let mut d = 1;
        while rest.len() > 1 {
            let n = rest.len() - 1;
            if 2 * d > n {
                out.push((rest.clone(), 1));
                break;
            }
            let count = (k.q() as u64).pow(d as u32);
            let mut found = false;
            for idx in 0..count {
                let m = monic_of_degree(k, d, idx);
                let (qt, r) = divrem(k, &rest, &m);
                if r.is_empty() {
                    rest = qt;
                    match out.iter_mut().find(|(f, _)| *f == m) {
                        Some((_, e)) => *e += 1,
                        None => out.push((m, 1)),
                    }
                    found = true;
                    break;
                }
            }
            if !found {
                d += 1;
            }
        }
        // a leftover factor may repeat one found earlier
        let mut merged: Vec<(Vec<u32>, usize)> = Vec::new();
        for (f, e) in out {
            match merged.iter_mut().find(|(g, _)| *g == f) {
                Some((_, m)) => *m += e,
                None => merged.push((f, e)),
            }
        }
        merged
    }

    /// Degrees of the irreducible factors of a squarefree polynomial, by
    /// trial division with monic polynomials of increasing degree.
    pub fn factor_degrees(k: &Gf, a: &[u32]) -> Vec<usize> {
        let mut rest = trim(a.to_vec());
        let mut out = Vec::new();
        let mut d = 1;
        while rest.len() > 1 {
            let n = rest.len() - 1;
            if 2 * d > n {
                out.push(n);
                break;
            }
            let count = (k.q() as u64).pow(d as u32);
            let mut found = false;
            for idx in 0..count {
                let m = monic_of_degree(k, d, idx);
                let (qt, r) = divrem(k, &rest, &m);
                if r.is_empty() {
                    out.push(d);
                    rest = qt;
                    found = true;
                    break;
                }
            }
            if !found {
                d += 1;
            }
        }
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_tables() {
        let k = Gf::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(k.mul(a, k.inv(a).unwrap()), 1);
        }
        assert_eq!(k.mul(3, 5), 1);
    }

    #[test]
    fn extension_field_is_a_field() {
        let k = Gf::new(9).unwrap();
        assert_eq!(k.degree(), 2);
        for a in 1..9 {
            assert_eq!(k.mul(a, k.inv(a).unwrap()), 1);
            for b in 0..9 {
                for c in 0..9 {
                    assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
                }
            }
        }
        // Frobenius x -> x^9 fixes F_9.
        for a in 0..9u32 {
            let mut x = 1;
            for _ in 0..9 {
                x = k.mul(x, a);
            }
            assert_eq!(x, a);
        }
    }

    #[test]
    fn squarefree_and_factor_degrees() {
        let k = Gf::new(3).unwrap();
        // X^2 - 1 = (X-1)(X+1)
        assert!(poly::is_squarefree(&k, &[2, 0, 1]));
        assert_eq!(poly::factor_degrees(&k, &[2, 0, 1]), vec![1, 1]);
        // X^2 + 1 is irreducible mod 3
        assert_eq!(poly::factor_degrees(&k, &[1, 0, 1]), vec![2]);
        // X^2 is not squarefree
        assert!(!poly::is_squarefree(&k, &[0, 0, 1]));
        // X^3 - X + 1 is irreducible mod 3 and has zero derivative-free form
        assert_eq!(poly::factor_degrees(&k, &[1, 2, 0, 1]), vec![3]);
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(2), Some((2, 1)));
    }

    #[test]
    fn factor_with_multiplicity() {
        let k = Gf::new(3).unwrap();
        // (x − 1)²·(x² + 1) over F_3; x² + 1 is irreducible
        let a = poly::mul(&k, &poly::mul(&k, &[2, 1], &[2, 1]), &[1, 0, 1]);
        let mut fs = poly::factor(&k, &a);
        fs.sort();
        assert_eq!(fs, vec![(vec![1, 0, 1], 1), (vec![2, 1], 2)]);
        let (g, s, t) = poly::ext_gcd(&k, &[2, 1], &[1, 0, 1]);
        assert_eq!(g, vec![1]);
        let lhs = poly::add(&k, &poly::mul(&k, &s, &[2, 1]), &poly::mul(&k, &t, &[1, 0, 1]));
        assert_eq!(lhs, vec![1]);
    }
}
