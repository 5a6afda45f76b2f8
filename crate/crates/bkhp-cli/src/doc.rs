//! Problem documents: a `context` block, `object NAME KIND` blocks and an
//! optional `task` block, each followed by indented `key: value` lines.

use std::collections::BTreeSet;
use std::fmt;

use crate::expr::{parse_expr, Expr};

/// Positioned parse or validation error; line and column are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DocError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for DocError {}

fn err<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T, DocError> {
    Err(DocError {
        line,
        col,
        msg: msg.into(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Mixed,
    Equal,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Mixed => "mixed",
            Mode::Equal => "equal",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextSpec {
    pub mode: Mode,
    /// p in mixed characteristic, q = p in equal characteristic.
    pub p: u64,
    /// Monic Eisenstein polynomial in u with constant coefficients.
    pub e_poly: Expr,
    pub n_c: i64,
    pub m_u: usize,
    pub h_e: i64,
}

impl ContextSpec {
    /// Degree of E in u.
    pub fn degree(&self) -> u32 {
        self.e_poly.terms().map(|(k, _)| k.0).max().unwrap_or(0)
    }
}

/// Rows of entry expressions.
pub type Matrix = Vec<Vec<Expr>>;
/// A list of vectors.
pub type Vectors = Vec<Vec<Expr>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Kind {
    BkModule,
    HodgePink,
    FilteredPhiN,
    WLattice,
    SubList,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::BkModule => "bk-module",
            Kind::HodgePink => "hodge-pink",
            Kind::FilteredPhiN => "filtered-phiN",
            Kind::WLattice => "w-lattice",
            Kind::SubList => "sub-list",
        }
    }
    fn parse(s: &str) -> Option<Kind> {
        [
            Kind::BkModule,
            Kind::HodgePink,
            Kind::FilteredPhiN,
            Kind::WLattice,
            Kind::SubList,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    BkModule {
        phi: Matrix,
        amplitude: Option<(i64, i64)>,
    },
    HodgePink {
        phi: Matrix,
        v: Matrix,
    },
    FilteredPhiN {
        phi: Matrix,
        n: Option<Matrix>,
        fil: Vec<(i64, Vectors)>,
    },
    WLattice {
        basis: Matrix,
    },
    SubList {
        subs: Vec<Vectors>,
    },
}

impl Body {
    pub fn kind(&self) -> Kind {
        match self {
            Body::BkModule { .. } => Kind::BkModule,
            Body::HodgePink { .. } => Kind::HodgePink,
            Body::FilteredPhiN { .. } => Kind::FilteredPhiN,
            Body::WLattice { .. } => Kind::WLattice,
            Body::SubList { .. } => Kind::SubList,
        }
    }
}

/// Equality ignores source positions.
#[derive(Clone, Debug, Eq)]
pub struct Object {
    pub name: String,
    pub line: usize,
    pub body: Body,
}

impl PartialEq for Object {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name && self.body == o.body
    }
}

/// Equality ignores source positions.
#[derive(Clone, Debug, Eq)]
pub struct Param {
    pub key: String,
    pub value: String,
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Param {
    fn eq(&self, o: &Self) -> bool {
        self.key == o.key && self.value == o.value
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Task {
    pub command: Option<String>,
    pub params: Vec<Param>,
}

impl Task {
    pub fn get(&self, key: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.key == key)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Doc {
    pub context: ContextSpec,
    pub objects: Vec<Object>,
    pub task: Option<Task>,
}

impl Doc {
    pub fn object(&self, name: &str) -> Option<&Object> {
        self.objects.iter().find(|o| o.name == name)
    }
}

pub const COMMANDS: [&str; 13] = [
    "info",
    "tn-th",
    "wa-check",
    "hp-from-filtered",
    "crosscheck-14",
    "diso",
    "xi",
    "recon-verify",
    "gamma",
    "verdict",
    "ext-build",
    "theta-solve",
    "polygon-check",
];

/// Task parameters that name objects, with the kinds they accept.
const REFS: [(&str, &[Kind]); 4] = [
    (
        "target",
        &[
            Kind::BkModule,
            Kind::HodgePink,
            Kind::FilteredPhiN,
            Kind::WLattice,
            Kind::SubList,
        ],
    ),
    ("base", &[Kind::WLattice]),
    ("subs", &[Kind::SubList]),
    ("candidate", &[Kind::HodgePink]),
];

const TASK_KEYS: [&str; 15] = [
    "command",
    "target",
    "base",
    "subs",
    "candidate",
    "n_max",
    "c_cut",
    "depth",
    "c",
    "vector",
    "sequence",
    "n",
    "n2",
    "r",
    "length",
];

// ---------------------------------------------------------------- values

/// A bracketed list value or a bare item, with the column of its start.
#[derive(Clone, Debug)]
enum Tree {
    Item(String, usize),
    List(Vec<Tree>, usize),
}

impl Tree {
    fn col(&self) -> usize {
        match self {
            Tree::Item(_, c) | Tree::List(_, c) => *c,
        }
    }
}

fn parse_tree(s: &str, line: usize, col0: usize) -> Result<Tree, DocError> {
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    let t = tree_at(&cs, &mut i, line, col0)?;
    while i < cs.len() && cs[i].is_whitespace() {
        i += 1;
    }
    if i < cs.len() {
        return err(line, col0 + i, "trailing input after value");
    }
    Ok(t)
}

fn tree_at(cs: &[char], i: &mut usize, line: usize, col0: usize) -> Result<Tree, DocError> {
    while *i < cs.len() && cs[*i].is_whitespace() {
        *i += 1;
    }
    let start = *i;
    if cs.get(*i) == Some(&'[') {
        *i += 1;
        let mut items = Vec::new();
        loop {
            while *i < cs.len() && cs[*i].is_whitespace() {
                *i += 1;
            }
            if cs.get(*i) == Some(&']') {
                *i += 1;
                return Ok(Tree::List(items, col0 + start));
            }
            if !items.is_empty() {
                if cs.get(*i) != Some(&',') {
                    return err(line, col0 + *i, "expected `,` or `]`");
                }
                *i += 1;
            }
            items.push(tree_at(cs, i, line, col0)?);
        }
    }
    // bare item: up to a `,` or `]` outside parentheses and braces
    let mut depth = 0i32;
    while *i < cs.len() {
        match cs[*i] {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            ',' | ']' if depth <= 0 => break,
            '[' => return err(line, col0 + *i, "unexpected `[` inside an entry"),
            _ => {}
        }
        *i += 1;
    }
    let text: String = cs[start..*i].iter().collect();
    let lead = text.len() - text.trim_start().len();
    let text = text.trim().to_string();
    if text.is_empty() {
        return err(line, col0 + start, "empty entry");
    }
    Ok(Tree::Item(text, col0 + start + lead))
}

fn expr_of(t: &Tree, line: usize) -> Result<Expr, DocError> {
    match t {
        Tree::Item(s, c) => parse_expr(s).or_else(|(off, m)| err(line, c + off, m)),
        Tree::List(_, c) => err(line, *c, "expected an entry, found a list"),
    }
}

fn vector_of(t: &Tree, line: usize) -> Result<Vec<Expr>, DocError> {
    match t {
        Tree::List(xs, _) => xs.iter().map(|x| expr_of(x, line)).collect(),
        Tree::Item(_, c) => err(line, *c, "expected a bracketed vector"),
    }
}

fn rows_of(t: &Tree, line: usize) -> Result<Vec<Vec<Expr>>, DocError> {
    match t {
        Tree::List(xs, _) => xs.iter().map(|x| vector_of(x, line)).collect(),
        Tree::Item(_, c) => err(line, *c, "expected a list of bracketed rows"),
    }
}

fn matrix_of(t: &Tree, line: usize) -> Result<Matrix, DocError> {
    let m = rows_of(t, line)?;
    if let Some(w) = m.first().map(|r| r.len()) {
        if m.iter().any(|r| r.len() != w) {
            return err(line, t.col(), "matrix rows have different lengths");
        }
    }
    Ok(m)
}

/// Parses a bracketed list of integers.
pub fn int_list(s: &str, line: usize, col: usize) -> Result<Vec<i64>, DocError> {
    match parse_tree(s, line, col)? {
        Tree::List(xs, _) => xs.iter().map(|x| int_item(x, line)).collect(),
        Tree::Item(_, c) => err(line, c, "expected a bracketed list of integers"),
    }
}

fn int_item(t: &Tree, line: usize) -> Result<i64, DocError> {
    let c = t.col();
    expr_of(t, line)?
        .to_i64()
        .map_or_else(|| err(line, c, "expected an integer"), Ok)
}

/// Parses a list of integer vectors.
pub fn int_rows(s: &str, line: usize, col: usize) -> Result<Vec<Vec<i64>>, DocError> {
    match parse_tree(s, line, col)? {
        Tree::List(xs, _) => xs
            .iter()
            .map(|x| match x {
                Tree::List(ys, _) => ys.iter().map(|y| int_item(y, line)).collect(),
                Tree::Item(_, c) => err(line, *c, "expected a bracketed vector"),
            })
            .collect(),
        Tree::Item(_, c) => err(line, c, "expected a list of vectors"),
    }
}

/// Parses a bracketed vector of entry expressions.
pub fn expr_vector(s: &str, line: usize, col: usize) -> Result<Vec<Expr>, DocError> {
    vector_of(&parse_tree(s, line, col)?, line)
}

/// Parses a single entry expression.
pub fn expr_value(s: &str, line: usize, col: usize) -> Result<Expr, DocError> {
    parse_expr(s).or_else(|(off, m)| err(line, col + off, m))
}

// ---------------------------------------------------------------- lines

struct Entry {
    key: String,
    value: String,
    line: usize,
    key_col: usize,
    val_col: usize,
}

struct Block {
    header: Vec<(String, usize)>,
    line: usize,
    entries: Vec<Entry>,
}

fn strip_comment(s: &str) -> &str {
    s.find('#').map_or(s, |i| &s[..i])
}

fn bracket_depth(s: &str) -> i64 {
    s.chars()
        .map(|c| {
            if c == '[' {
                1
            } else if c == ']' {
                -1
            } else {
                0
            }
        })
        .sum()
}

fn words(s: &str) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices().chain(std::iter::once((s.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(st)) => {
                out.push((s[st..i].to_string(), s[..st].chars().count() + 1));
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn blocks(text: &str) -> Result<Vec<Block>, DocError> {
    let mut out: Vec<Block> = Vec::new();
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let ln = i + 1;
        let raw = strip_comment(lines[i]).trim_end();
        i += 1;
        if raw.trim().is_empty() {
            continue;
        }
        if !raw.starts_with(char::is_whitespace) {
            out.push(Block {
                header: words(raw),
                line: ln,
                entries: Vec::new(),
            });
            continue;
        }
        let Some(block) = out.last_mut() else {
            return err(ln, 1, "indented line before any block header");
        };
        let indent = raw.chars().take_while(|c| c.is_whitespace()).count();
        let body = raw.trim_start();
        let Some(colon) = body.find(':') else {
            return err(ln, indent + 1, "expected `key: value`");
        };
        let key = body[..colon]
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ");
        let after = &body[colon + 1..];
        let lead = after.chars().take_while(|c| c.is_whitespace()).count();
        let mut value = after.trim().to_string();
        let val_col = indent + body[..colon].chars().count() + 1 + lead + 1;
        // continuation lines while brackets are open
        let mut depth = bracket_depth(&value);
        while depth > 0 && i < lines.len() {
            let more = strip_comment(lines[i]).trim();
            i += 1;
            value.push(' ');
            value.push_str(more);
            depth = bracket_depth(&value);
        }
        if depth != 0 {
            return err(ln, val_col, "unbalanced brackets");
        }
        block.entries.push(Entry {
            key,
            value,
            line: ln,
            key_col: indent + 1,
            val_col,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------- blocks

fn int_value<T: std::str::FromStr>(e: &Entry) -> Result<T, DocError> {
    e.value
        .parse()
        .or_else(|_| err(e.line, e.val_col, format!("`{}` expects an integer", e.key)))
}

fn context_block(b: &Block) -> Result<ContextSpec, DocError> {
    let mut mode = None;
    let mut p = None;
    let mut e_poly = None;
    let mut deg = None;
    let (mut n_c, mut m_u, mut h_e) = (12i64, 32usize, 6i64);
    let mut seen = BTreeSet::new();
    for e in &b.entries {
        if !seen.insert(e.key.clone()) {
            return err(e.line, e.key_col, format!("duplicate key `{}`", e.key));
        }
        match e.key.as_str() {
            "mode" => {
                mode = Some(match e.value.as_str() {
                    "mixed" => Mode::Mixed,
                    "equal" => Mode::Equal,
                    _ => return err(e.line, e.val_col, "mode is `mixed` or `equal`"),
                })
            }
            "p" | "q" => {
                if p.is_some() {
                    return err(e.line, e.key_col, "give only one of `p` and `q`");
                }
                p = Some(int_value::<u64>(e)?)
            }
            "e" => deg = Some((int_value::<u32>(e)?, e.line, e.val_col)),
            "E" => e_poly = Some((expr_value(&e.value, e.line, e.val_col)?, e.line, e.val_col)),
            "N_c" => n_c = int_value(e)?,
            "M_u" => m_u = int_value(e)?,
            "h_E" => h_e = int_value(e)?,
            _ => {
                return err(
                    e.line,
                    e.key_col,
                    format!("unknown context key `{}`", e.key),
                )
            }
        }
    }
    let Some(mode) = mode else {
        return err(b.line, 1, "context needs `mode`");
    };
    let Some(p) = p else {
        return err(b.line, 1, "context needs `p` or `q`");
    };
    let Some((e_poly, el, ec)) = e_poly else {
        return err(b.line, 1, "context needs `E`");
    };
    if e_poly
        .terms()
        .any(|(k, c)| k.1 != 0 || k.2 < 0 || (k.2 > 0 && !c.is_integer()))
    {
        return err(
            el,
            ec,
            "E must be a polynomial in u with integral coefficients",
        );
    }
    let ctx = ContextSpec {
        mode,
        p,
        e_poly,
        n_c,
        m_u,
        h_e,
    };
    if let Some((d, l, c)) = deg {
        if d != ctx.degree() {
            return err(
                l,
                c,
                format!("`e` = {d} disagrees with deg E = {}", ctx.degree()),
            );
        }
    }
    Ok(ctx)
}

fn object_block(b: &Block) -> Result<Object, DocError> {
    let [_, (name, _), (kind, kc)] = b.header.as_slice() else {
        return err(b.line, 1, "expected `object NAME KIND`");
    };
    let Some(kind) = Kind::parse(kind) else {
        return err(b.line, *kc, format!("unknown object kind `{kind}`"));
    };
    let mut phi = None;
    let mut v = None;
    let mut n = None;
    let mut basis = None;
    let mut amplitude = None;
    let mut fil: Vec<(i64, Vectors)> = Vec::new();
    let mut subs = Vec::new();
    let mut seen = BTreeSet::new();
    for e in &b.entries {
        if e.key != "sub" && !seen.insert(e.key.clone()) {
            return err(e.line, e.key_col, format!("duplicate key `{}`", e.key));
        }
        let allowed = match kind {
            Kind::BkModule => ["phi", "amplitude"].contains(&e.key.as_str()),
            Kind::HodgePink => ["phi", "V"].contains(&e.key.as_str()),
            Kind::FilteredPhiN => {
                ["phi", "N"].contains(&e.key.as_str()) || e.key.starts_with("fil ")
            }
            Kind::WLattice => e.key == "basis",
            Kind::SubList => e.key == "sub",
        };
        if !allowed {
            return err(
                e.line,
                e.key_col,
                format!("key `{}` is not valid for {}", e.key, kind.as_str()),
            );
        }
        let tree = || parse_tree(&e.value, e.line, e.val_col);
        match e.key.as_str() {
            "phi" => phi = Some((matrix_of(&tree()?, e.line)?, e.line)),
            "V" => v = Some((matrix_of(&tree()?, e.line)?, e.line)),
            "N" => n = Some((matrix_of(&tree()?, e.line)?, e.line)),
            "basis" => basis = Some((matrix_of(&tree()?, e.line)?, e.line)),
            "sub" => subs.push((rows_of(&tree()?, e.line)?, e.line)),
            "amplitude" => {
                let w: Vec<&str> = e.value.split_whitespace().collect();
                let parsed = match w.as_slice() {
                    [s, t] => s.parse::<i64>().ok().zip(t.parse::<i64>().ok()),
                    _ => None,
                };
                let Some((s, t)) = parsed.filter(|(s, t)| s <= t) else {
                    return err(e.line, e.val_col, "amplitude is `s t` with integers s ≤ t");
                };
                amplitude = Some((s, t));
            }
            k => {
                let idx = k["fil ".len()..].trim();
                let Ok(i) = idx.parse::<i64>() else {
                    return err(e.line, e.key_col, "expected `fil <integer>`");
                };
                fil.push((i, rows_of(&tree()?, e.line)?));
            }
        }
    }
    let need = |m: Option<(Matrix, usize)>, key: &str| match m {
        Some(x) => Ok(x),
        None => err(
            b.line,
            1,
            format!("{} `{}` needs `{key}`", kind.as_str(), name),
        ),
    };
    let square = |(m, l): &(Matrix, usize), what: &str| -> Result<usize, DocError> {
        let r = m.len();
        if r == 0 || m[0].len() != r {
            return err(*l, 1, format!("`{what}` must be a nonempty square matrix"));
        }
        Ok(r)
    };
    let body = match kind {
        Kind::BkModule => {
            let phi = need(phi, "phi")?;
            square(&phi, "phi")?;
            Body::BkModule {
                phi: phi.0,
                amplitude,
            }
        }
        Kind::HodgePink => {
            let phi = need(phi, "phi")?;
            let v = need(v, "V")?;
            let r = square(&phi, "phi")?;
            if square(&v, "V")? != r {
                return err(v.1, 1, "`V` and `phi` have different sizes");
            }
            Body::HodgePink { phi: phi.0, v: v.0 }
        }
        Kind::FilteredPhiN => {
            let phi = need(phi, "phi")?;
            let r = square(&phi, "phi")?;
            if let Some(nm) = &n {
                if square(nm, "N")? != r {
                    return err(nm.1, 1, "`N` and `phi` have different sizes");
                }
            }
            if fil.is_empty() {
                return err(
                    b.line,
                    1,
                    format!("filtered-phiN `{name}` needs `fil <i>` lines"),
                );
            }
            for e in b.entries.iter().filter(|e| e.key.starts_with("fil ")) {
                let i: i64 = e.key["fil ".len()..].trim().parse().expect("checked");
                let vs = &fil.iter().find(|(j, _)| *j == i).expect("present").1;
                if vs.iter().any(|x| x.len() != r) {
                    return err(
                        e.line,
                        e.val_col,
                        format!("filtration vectors must have length {r}"),
                    );
                }
            }
            fil.sort_by_key(|(i, _)| *i);
            Body::FilteredPhiN {
                phi: phi.0,
                n: n.map(|x| x.0),
                fil,
            }
        }
        Kind::WLattice => {
            let basis = need(basis, "basis")?;
            square(&basis, "basis")?;
            Body::WLattice { basis: basis.0 }
        }
        Kind::SubList => {
            for (s, l) in &subs {
                if s.windows(2).any(|w| w[0].len() != w[1].len()) {
                    return err(*l, 1, "spanning vectors have different lengths");
                }
            }
            Body::SubList {
                subs: subs.into_iter().map(|s| s.0).collect(),
            }
        }
    };
    Ok(Object {
        name: name.clone(),
        line: b.line,
        body,
    })
}

fn task_block(b: &Block) -> Result<Task, DocError> {
    let mut t = Task::default();
    for e in &b.entries {
        if !TASK_KEYS.contains(&e.key.as_str()) {
            return err(
                e.line,
                e.key_col,
                format!("unknown task parameter `{}`", e.key),
            );
        }
        if t.get(&e.key).is_some() || (e.key == "command" && t.command.is_some()) {
            return err(
                e.line,
                e.key_col,
                format!("duplicate task parameter `{}`", e.key),
            );
        }
        if e.key == "command" {
            if !COMMANDS.contains(&e.value.as_str()) {
                return err(e.line, e.val_col, format!("unknown command `{}`", e.value));
            }
            t.command = Some(e.value.clone());
        } else {
            t.params.push(Param {
                key: e.key.clone(),
                value: e.value.clone(),
                line: e.line,
                col: e.val_col,
            });
        }
    }
    Ok(t)
}

/// Parses and validates a problem document.
pub fn parse_problem(text: &str) -> Result<Doc, DocError> {
    let mut context = None;
    let mut objects: Vec<Object> = Vec::new();
    let mut task = None;
    for b in blocks(text)? {
        match b.header[0].0.as_str() {
            "context" if b.header.len() == 1 => {
                if context.is_some() {
                    return err(b.line, 1, "duplicate context block");
                }
                context = Some(context_block(&b)?);
            }
            "object" => {
                let o = object_block(&b)?;
                if let Some(prev) = objects.iter().find(|p| p.name == o.name) {
                    return err(
                        b.line,
                        b.header[1].1,
                        format!("object `{}` already defined on line {}", o.name, prev.line),
                    );
                }
                objects.push(o);
            }
            "task" if b.header.len() == 1 => {
                if task.is_some() {
                    return err(b.line, 1, "duplicate task block");
                }
                task = Some(task_block(&b)?);
            }
            h => return err(b.line, 1, format!("unknown block header `{h}`")),
        }
    }
    let Some(context) = context else {
        return err(1, 1, "missing context block");
    };
    let doc = Doc {
        context,
        objects,
        task,
    };
    if let Some(t) = &doc.task {
        for (key, kinds) in REFS {
            if let Some(p) = t.get(key) {
                let Some(o) = doc.object(&p.value) else {
                    return err(p.line, p.col, format!("undefined object `{}`", p.value));
                };
                if !kinds.contains(&o.body.kind()) {
                    return err(
                        p.line,
                        p.col,
                        format!(
                            "`{key}` cannot be {} object `{}`",
                            o.body.kind().as_str(),
                            p.value
                        ),
                    );
                }
            }
        }
    }
    Ok(doc)
}

// ---------------------------------------------------------------- printing

fn fmt_rows(m: &[Vec<Expr>]) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|r| {
            format!(
                "[{}]",
                r.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

impl fmt::Display for Doc {
    /// Canonical text form; parsing it yields an equal document.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.context;
        writeln!(f, "context")?;
        writeln!(f, "  mode: {}", c.mode.as_str())?;
        writeln!(
            f,
            "  {}: {}",
            if c.mode == Mode::Mixed { "p" } else { "q" },
            c.p
        )?;
        writeln!(f, "  e: {}", c.degree())?;
        writeln!(f, "  E: {}", c.e_poly)?;
        writeln!(f, "  N_c: {}", c.n_c)?;
        writeln!(f, "  M_u: {}", c.m_u)?;
        writeln!(f, "  h_E: {}", c.h_e)?;
        for o in &self.objects {
            writeln!(f)?;
            writeln!(f, "object {} {}", o.name, o.body.kind().as_str())?;
            match &o.body {
                Body::BkModule { phi, amplitude } => {
                    writeln!(f, "  phi: {}", fmt_rows(phi))?;
                    if let Some((s, t)) = amplitude {
                        writeln!(f, "  amplitude: {s} {t}")?;
                    }
                }
                Body::HodgePink { phi, v } => {
                    writeln!(f, "  phi: {}", fmt_rows(phi))?;
                    writeln!(f, "  V: {}", fmt_rows(v))?;
                }
                Body::FilteredPhiN { phi, n, fil } => {
                    writeln!(f, "  phi: {}", fmt_rows(phi))?;
                    if let Some(n) = n {
                        writeln!(f, "  N: {}", fmt_rows(n))?;
                    }
                    for (i, vs) in fil {
                        writeln!(f, "  fil {i}: {}", fmt_rows(vs))?;
                    }
                }
                Body::WLattice { basis } => writeln!(f, "  basis: {}", fmt_rows(basis))?,
                Body::SubList { subs } => {
                    for s in subs {
                        writeln!(f, "  sub: {}", fmt_rows(s))?;
                    }
                }
            }
        }
        if let Some(t) = &self.task {
            writeln!(f)?;
            writeln!(f, "task")?;
            if let Some(c) = &t.command {
                writeln!(f, "  command: {c}")?;
            }
            for p in &t.params {
                writeln!(f, "  {}: {}", p.key, p.value)?;
            }
        }
        Ok(())
    }
}
