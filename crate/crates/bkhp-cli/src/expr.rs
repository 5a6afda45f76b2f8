//! Exact entry expressions: sums of c·u^a·E^b·p^k with rational c.

use std::collections::BTreeMap;
use std::fmt;

use bkhp::lattices::Mat;
use bkhp::padic_series::{Coeff, CoeffField, Jet, JetRing, Poly, PrecCtx, SeriesElt};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Monomial key (u-exponent, E-exponent, uniformizer exponent).
pub type Key = (u32, i64, i64);

/// A finite sum of rational multiples of u^a·E^b·p^k, kept in canonical
/// form (no zero coefficients, keys sorted).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Expr(BTreeMap<Key, BigRational>);

impl Expr {
    pub fn zero() -> Self {
        Expr(BTreeMap::new())
    }
    pub fn constant(c: BigRational) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert((0, 0, 0), c);
        }
        Expr(m)
    }
    pub fn integer(n: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(n)))
    }
    fn monomial(k: Key) -> Self {
        let mut m = BTreeMap::new();
        m.insert(k, BigRational::one());
        Expr(m)
    }
    pub fn terms(&self) -> impl Iterator<Item = (&Key, &BigRational)> {
        self.0.iter()
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let mut m = self.0.clone();
        for (k, c) in &o.0 {
            let s = m.get(k).cloned().unwrap_or_else(BigRational::zero) + c;
            if s.is_zero() {
                m.remove(k);
            } else {
                m.insert(*k, s);
            }
        }
        Expr(m)
    }
    fn neg(&self) -> Self {
        Expr(self.0.iter().map(|(k, c)| (*k, -c.clone())).collect())
    }
    fn mul(&self, o: &Self) -> Self {
        let mut acc = Expr::zero();
        for (ka, ca) in &self.0 {
            for (kb, cb) in &o.0 {
                let k = (ka.0 + kb.0, ka.1 + kb.1, ka.2 + kb.2);
                acc = acc.add(&Expr([(k, ca * cb)].into_iter().collect()));
            }
        }
        acc
    }
    /// Inverse of a single monomial free of u.
    fn inv(&self) -> Option<Self> {
        let mut it = self.0.iter();
        let (k, c) = it.next()?;
        if it.next().is_some() || k.0 != 0 {
            return None;
        }
        Some(Expr([((0, -k.1, -k.2), c.recip())].into_iter().collect()))
    }
    fn pow(&self, n: i64) -> Option<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = Expr::integer(1);
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Some(acc)
    }
    pub fn is_constant(&self) -> bool {
        self.0.keys().all(|k| k.0 == 0 && k.1 == 0)
    }
    pub fn max_e_pole(&self) -> i64 {
        self.0.keys().map(|k| -k.1).max().unwrap_or(0).max(0)
    }

    fn coeff<F: CoeffField>(f: &F, c: &BigRational, k: i64) -> bkhp::Result<F::Elt> {
        Ok(f.from_ratio(c.numer(), c.denom())?.mul_pow(k))
    }
    /// Value in K_0; fails if u or E occur.
    pub fn to_elt<F: CoeffField>(&self, f: &F) -> bkhp::Result<F::Elt> {
        if !self.is_constant() {
            return Err(bkhp::Error::domain(
                "input",
                format!("`{self}` must be a constant"),
            ));
        }
        let mut acc = f.zero();
        for ((_, _, k), c) in &self.0 {
            acc = acc.add(&Self::coeff(f, c, *k)?);
        }
        Ok(acc)
    }
    /// Element of 𝔖[1/p][1/E] with exact numerator.
    pub fn to_series<F: CoeffField>(&self, ctx: &PrecCtx<F>) -> bkhp::Result<SeriesElt<F>> {
        let f = ctx.field();
        let d = self.max_e_pole();
        let mut num = Poly::zero(f);
        for ((a, b, k), c) in &self.0 {
            let mono = Poly::monomial(Self::coeff(f, c, *k)?, *a as usize)
                .mul(&ctx.e_poly().pow((b + d) as u64));
            num = num.add(&mono);
        }
        if num.len() > ctx.m_u() {
            return Err(bkhp::Error::precision(
                "input",
                format!("`{self}` exceeds the u-truncation M_u"),
            ));
        }
        Ok(SeriesElt::from_parts(ctx, d, num, false))
    }
    /// Jet at E.
    pub fn to_jet<F: CoeffField>(&self, ring: &JetRing<F>) -> bkhp::Result<Jet<F>> {
        let f = ring.field();
        let mut acc = ring.zero();
        for ((a, b, k), c) in &self.0 {
            let t = ring
                .from_poly(&Poly::monomial(Self::coeff(f, c, *k)?, *a as usize))
                .mul_e_pow(*b);
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }
    /// Element of K = K_0[u]/E given by a polynomial in u (E ≡ 0).
    pub fn to_k_poly<F: CoeffField>(&self, ctx: &PrecCtx<F>) -> bkhp::Result<Poly<F>> {
        let f = ctx.field();
        let mut acc = Poly::zero(f);
        for ((a, b, k), c) in &self.0 {
            if *b < 0 {
                return Err(bkhp::Error::domain(
                    "input",
                    format!("`{self}` has an E-pole; expected an element of K"),
                ));
            }
            if *b > 0 {
                continue;
            }
            acc = acc.add(&Poly::monomial(Self::coeff(f, c, *k)?, *a as usize));
        }
        Ok(acc.rem_monic(ctx.e_poly()))
    }
    /// Integer value (for indices and parameters).
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_zero() {
            return Some(0);
        }
        let (k, c) = self.0.iter().next()?;
        if self.0.len() != 1 || *k != (0, 0, 0) || !c.is_integer() {
            return None;
        }
        c.to_integer().to_i64()
    }
}

fn fmt_factor(f: &mut fmt::Formatter<'_>, name: &str, e: i64, first: &mut bool) -> fmt::Result {
    if e == 0 {
        return Ok(());
    }
    if !*first {
        write!(f, "*")?;
    }
    *first = false;
    if e == 1 {
        write!(f, "{name}")
    } else {
        write!(f, "{name}^{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, ((a, b, k), c)) in self.0.iter().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            } else if neg {
                write!(f, "-")?;
            }
            let m = c.abs();
            let bare = *a == 0 && *b == 0 && *k == 0;
            let mut first = true;
            if !m.is_one() || bare {
                if m.is_integer() {
                    write!(f, "{}", m.numer())?;
                } else {
                    write!(f, "{}/{}", m.numer(), m.denom())?;
                }
                first = false;
            }
            fmt_factor(f, "p", *k, &mut first)?;
            fmt_factor(f, "u", *a as i64, &mut first)?;
            fmt_factor(f, "E", *b, &mut first)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, (usize, String)> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push((st, Tok::Num(t.parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((st, Tok::Ident(cs[st..i].iter().collect())));
        } else if "+-*/^(){},".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err((i, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct P {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

type PResult<T> = Result<T, (usize, String)>;

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }
    fn at(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len, |t| t.0)
    }
    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn expr(&mut self) -> PResult<Expr> {
        let mut acc = if self.eat('-') {
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.add(&self.term()?.neg());
            } else {
                return Ok(acc);
            }
        }
    }
    fn term(&mut self) -> PResult<Expr> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.power()?);
            } else if self.eat('/') {
                let at = self.at();
                let d = self.power()?;
                let inv = d.inv().ok_or((
                    at,
                    "division is only by a nonzero monomial free of u".to_string(),
                ))?;
                acc = acc.mul(&inv);
            } else {
                return Ok(acc);
            }
        }
    }
    fn exponent(&mut self) -> PResult<i64> {
        let at = self.at();
        let neg = self.eat('-');
        let paren = !neg && self.eat('(');
        let neg = neg || (paren && self.eat('-'));
        let v = match self.toks.get(self.pos).map(|t| t.1.clone()) {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                n.to_i64()
                    .ok_or((at, "exponent out of range".to_string()))?
            }
            _ => return Err((at, "expected an integer exponent".to_string())),
        };
        if paren && !self.eat(')') {
            return Err((self.at(), "expected `)`".to_string()));
        }
        Ok(if neg { -v } else { v })
    }
    fn power(&mut self) -> PResult<Expr> {
        let at = self.at();
        let base = self.atom()?;
        if self.eat('^') {
            let n = self.exponent()?;
            return base
                .pow(n)
                .ok_or((at, "negative powers need a monomial free of u".to_string()));
        }
        Ok(base)
    }
    fn atom(&mut self) -> PResult<Expr> {
        let at = self.at();
        match self.toks.get(self.pos).map(|t| t.1.clone()) {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::constant(BigRational::from_integer(n)))
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                match id.as_str() {
                    "u" => Ok(Expr::monomial((1, 0, 0))),
                    "E" => Ok(Expr::monomial((0, 1, 0))),
                    "p" | "pi" => Ok(Expr::monomial((0, 0, 1))),
                    _ => Err((
                        at,
                        format!("unknown symbol `{id}` (expected u, E, p or pi)"),
                    )),
                }
            }
            Some(Tok::Op('{')) => {
                // integer pair {a, v} = a·p^v
                self.pos += 1;
                let a = self.exponent()?;
                if !self.eat(',') {
                    return Err((self.at(), "expected `,` in integer pair".to_string()));
                }
                let v = self.exponent()?;
                if !self.eat('}') {
                    return Err((self.at(), "expected `}`".to_string()));
                }
                Ok(Expr::integer(a).mul(&Expr::monomial((0, 0, v))))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err((self.at(), "expected `)`".to_string()));
                }
                Ok(e)
            }
            _ => Err((at, "expected a number, symbol or `(`".to_string())),
        }
    }
}

/// Parses an entry expression; errors carry a 0-based character offset.
pub fn parse_expr(s: &str) -> Result<Expr, (usize, String)> {
    let toks = tokenize(s)?;
    let mut p = P {
        toks,
        pos: 0,
        len: s.chars().count(),
    };
    if p.toks.is_empty() {
        return Err((0, "empty expression".to_string()));
    }
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err((p.at(), "trailing input".to_string()));
    }
    Ok(e)
}

/// K_0-matrix from rows of constant expressions.
pub fn const_matrix<F: CoeffField>(f: &F, rows: &[Vec<Expr>]) -> bkhp::Result<Mat<F>> {
    let data = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| x.to_elt(f))
                .collect::<bkhp::Result<Vec<_>>>()
        })
        .collect::<bkhp::Result<Vec<_>>>()?;
    Ok(Mat::from_rows(f, data))
}
