//! Command dispatch: builds core objects from a document and renders the
//! results of one module operation into a report.

use bkhp::admissibility::{
    admissibility_verdict, anti_effective, enumerate_polygon_sequences, gamma_compose_check,
    gamma_profile, AdmissibilityVerdict, GammaProfile,
};
use bkhp::fontaine::{griffiths_transversal, hp_functor, lemma14_crosscheck, FilteredPhiN};
use bkhp::hodge_pink::{
    hodge_filtration, scalar_line_jump_analysis, t_hodge, t_newton, weakly_admissible,
    FiltrationJumps, HPStruct, PhiMod, Quantifier, SubSpec, Verdict,
};
use bkhp::kisin::{
    build_extension, diso, reconstruct_verify, theta_resum_check, theta_solve, xi_compute,
    xi_residual, BKModule, PimOutcome,
};
use bkhp::lattices::{
    polygon_sequence_check, DivisorProfile, EJetLattice, JetMat, KField, KSpace, Mat,
    PolygonVerdict, SMat, WLattice,
};
use bkhp::padic_series::ctx::headroom;
use bkhp::padic_series::jet::JET_EXACT;
use bkhp::padic_series::{
    Coeff, CoeffField, FqField, Jet, PadicField, Poly, PrecCtx, SeriesElt, EXACT,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::doc::{
    expr_value, expr_vector, int_rows, Body, Doc, DocError, Kind, Matrix, Mode, Object, Param,
};
use crate::expr::Expr;
use crate::report::{Node, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_PRECISION: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

/// Command-line overrides of task parameters.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub n_max: Option<u32>,
    pub c_cut: Option<BigRational>,
    pub depth: Option<i64>,
}

/// A failed run with its exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub msg: String,
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Self {
        Failure {
            code: EXIT_INPUT,
            msg: format!("input error: {e}"),
        }
    }
}

impl From<bkhp::Error> for Failure {
    fn from(e: bkhp::Error) -> Self {
        let code = match e {
            bkhp::Error::Domain { .. } => EXIT_INPUT,
            bkhp::Error::Precision { .. } | bkhp::Error::Internal { .. } => EXIT_PRECISION,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

type Res<T> = Result<T, Failure>;

fn input<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure {
        code: EXIT_INPUT,
        msg: format!("input error: {}", msg.into()),
    })
}

/// A successful run: the report and whether the verdict was negative.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub negative: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.negative {
            EXIT_NEGATIVE
        } else {
            EXIT_OK
        }
    }
}

/// Runs `command` on the document.
pub fn run(command: &str, doc: &Doc, opts: &Options) -> Res<Outcome> {
    if !crate::doc::COMMANDS.contains(&command) {
        return input(format!("unknown command `{command}`"));
    }
    if let Some(c) = doc.task.as_ref().and_then(|t| t.command.as_deref()) {
        if c != command {
            return input(format!(
                "the task block names command `{c}`, not `{command}`"
            ));
        }
    }
    let spec = &doc.context;
    let cap = spec.n_c + headroom(spec.n_c);
    match spec.mode {
        Mode::Mixed => Runner::new(PadicField::new(spec.p, cap)?, doc, opts)?.run(command),
        Mode::Equal => Runner::new(FqField::new(spec.p, cap)?, doc, opts)?.run(command),
    }
}

// ---------------------------------------------------------------- rendering

/// Precisions at or above the exact sentinels render as `exact`.
fn prec_node(p: i64) -> Node {
    if p >= EXACT.min(JET_EXACT) {
        Node::str("exact")
    } else {
        Node::Int(p)
    }
}

fn elt<C: Coeff>(x: &C) -> Node {
    Node::Str(x.repr().to_string())
}

fn elts<C: Coeff>(xs: &[C]) -> Node {
    Node::List(xs.iter().map(elt).collect())
}

fn mat<F: CoeffField>(m: &Mat<F>) -> Node {
    Node::List((0..m.rows()).map(|i| elts(&m.row(i))).collect())
}

fn poly<F: CoeffField>(p: &Poly<F>) -> Node {
    if p.is_empty() {
        return Node::List(vec![Node::str("0")]);
    }
    elts(p.coeffs())
}

fn series<F: CoeffField>(x: &SeriesElt<F>) -> Node {
    Node::map()
        .with("E_denominator", Node::Int(x.d_e()))
        .with("u_coefficients", poly(x.poly()))
        .with("truncated", Node::Bool(x.is_truncated()))
        .with("abs_prec", prec_node(x.prec_abs()))
}

fn smat<F: CoeffField>(m: &SMat<F>) -> Node {
    Node::List(
        (0..m.rows())
            .map(|i| Node::List((0..m.cols()).map(|j| series(m.get(i, j))).collect()))
            .collect(),
    )
}

fn jet<F: CoeffField>(j: &Jet<F>) -> Res<Node> {
    let Some(v) = j.valuation() else {
        return Ok(Node::map().with("zero_to_order", prec_node(j.prec())));
    };
    let digits = j.digits(v, j.prec())?;
    Ok(Node::map()
        .with("valuation", Node::Int(v))
        .with("jet_order", Node::Int(j.prec()))
        .with("E_digits", Node::List(digits.iter().map(poly).collect())))
}

fn jetmat<F: CoeffField>(m: &JetMat<F>) -> Res<Node> {
    let mut rows = Vec::new();
    for i in 0..m.rows() {
        rows.push(Node::List(
            (0..m.cols())
                .map(|j| jet(m.get(i, j)))
                .collect::<Res<Vec<_>>>()?,
        ));
    }
    Ok(Node::List(rows))
}

fn pair(a: i64, b: i64) -> Node {
    Node::ints(&[a, b])
}

fn jumps<F: CoeffField>(f: &FiltrationJumps<F>) -> Node {
    Node::List(f.jumps().iter().map(|(i, d)| pair(*i, *d as i64)).collect())
}

fn profile_table(prof: &GammaProfile<impl CoeffField>) -> Node {
    let r = prof.base.rank();
    let mut cols = vec![Node::str("n")];
    cols.extend((1..=r).map(|i| Node::Str(format!("l{i}"))));
    let rows = prof
        .records
        .iter()
        .map(|rec| {
            let mut row = vec![rec.n as i64];
            row.extend(rec.profile.values());
            Node::ints(&row)
        })
        .collect();
    Node::map()
        .with("columns", Node::List(cols))
        .with("rows", Node::List(rows))
}

fn verdict_node<F: CoeffField>(v: &Verdict<F>) -> Node {
    match v {
        Verdict::True { scope } => Node::map()
            .with("verdict", Node::Bool(true))
            .with("scope", Node::Str(scope.to_string())),
        Verdict::False {
            witness,
            t_h,
            t_n,
            scope,
        } => Node::map()
            .with("verdict", Node::Bool(false))
            .with("scope", Node::Str(scope.to_string()))
            .with(
                "witness",
                Node::map()
                    .with("dim", Node::Int(witness.dim() as i64))
                    .with(
                        "spanned_by",
                        Node::List(witness.basis().col_vecs().iter().map(|c| elts(c)).collect()),
                    )
                    .with("t_H", Node::Int(*t_h))
                    .with("t_N", Node::Int(*t_n)),
            ),
        Verdict::Refused { reason } => Node::map()
            .with("verdict", Node::str("refused"))
            .with("reason", Node::str(reason)),
    }
}

// ---------------------------------------------------------------- runner

struct Runner<'a, F: CoeffField> {
    ctx: PrecCtx<F>,
    doc: &'a Doc,
    opts: &'a Options,
}

fn param<'a>(doc: &'a Doc, key: &str) -> Option<&'a Param> {
    doc.task.as_ref().and_then(|t| t.get(key))
}

impl<'a, F: CoeffField> Runner<'a, F> {
    fn new(field: F, doc: &'a Doc, opts: &'a Options) -> Res<Self> {
        let spec = &doc.context;
        let deg = spec.degree() as usize;
        let mut coeffs = vec![field.zero(); deg + 1];
        for ((a, _, k), c) in spec.e_poly.terms() {
            coeffs[*a as usize] = field.from_ratio(c.numer(), c.denom())?.mul_pow(*k);
        }
        let ctx = PrecCtx::new(field, coeffs, spec.n_c, spec.m_u, spec.h_e)?;
        Ok(Runner { ctx, doc, opts })
    }

    fn f(&self) -> &F {
        self.ctx.field()
    }

    // ---- parameters

    fn get(&self, key: &str) -> Option<&'a Param> {
        param(self.doc, key)
    }
    fn int_param(&self, key: &str) -> Res<Option<i64>> {
        match self.get(key) {
            None => Ok(None),
            Some(p) => match expr_value(&p.value, p.line, p.col)?.to_i64() {
                Some(v) => Ok(Some(v)),
                None => input(format!("line {}: `{key}` expects an integer", p.line)),
            },
        }
    }
    fn rational_param(&self, key: &str) -> Res<Option<BigRational>> {
        match self.get(key) {
            None => Ok(None),
            Some(p) => {
                let e = expr_value(&p.value, p.line, p.col)?;
                let mut it = e.terms();
                match (it.next(), it.next()) {
                    (None, _) => Ok(Some(BigRational::zero())),
                    (Some(((0, 0, 0), c)), None) => Ok(Some(c.clone())),
                    _ => input(format!(
                        "line {}: `{key}` expects a rational number",
                        p.line
                    )),
                }
            }
        }
    }
    /// Largest n with q^n ≤ M_u unless given.
    fn n_max(&self) -> Res<u32> {
        if let Some(n) = self.opts.n_max {
            return Ok(n);
        }
        if let Some(n) = self.int_param("n_max")? {
            return u32::try_from(n).or_else(|_| input("`n_max` must be nonnegative"));
        }
        let q = self.ctx.q() as usize;
        let mut n = 0u32;
        let mut qn = q;
        while qn <= self.ctx.m_u() {
            n += 1;
            qn *= q;
        }
        Ok(n.max(1))
    }
    fn c_cut(&self) -> Res<BigRational> {
        if let Some(c) = &self.opts.c_cut {
            return Ok(c.clone());
        }
        Ok(self
            .rational_param("c_cut")?
            .unwrap_or_else(|| BigRational::from_integer(BigInt::from(2))))
    }
    fn depth(&self) -> Res<i64> {
        if let Some(d) = self.opts.depth {
            return Ok(d);
        }
        Ok(self.int_param("depth")?.unwrap_or(2))
    }
    fn object(&self, key: &str, kind: Kind) -> Res<Option<&'a Object>> {
        let Some(p) = self.get(key) else {
            return Ok(None);
        };
        let o = self
            .doc
            .object(&p.value)
            .expect("references validated at parse time");
        if o.body.kind() != kind {
            return input(format!(
                "line {}: this command needs `{key}` to be a {} object, `{}` is {}",
                p.line,
                kind.as_str(),
                o.name,
                o.body.kind().as_str()
            ));
        }
        Ok(Some(o))
    }
    fn required(&self, key: &str, kind: Kind) -> Res<&'a Object> {
        match self.object(key, kind)? {
            Some(o) => Ok(o),
            None => input(format!(
                "this command needs task parameter `{key}` ({})",
                kind.as_str()
            )),
        }
    }

    // ---- object construction

    fn const_mat(&self, m: &Matrix) -> Res<Mat<F>> {
        Ok(crate::expr::const_matrix(self.f(), m)?)
    }
    fn series_mat(&self, m: &Matrix) -> Res<SMat<F>> {
        let rows = m
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.to_series(&self.ctx))
                    .collect::<bkhp::Result<Vec<_>>>()
            })
            .collect::<bkhp::Result<Vec<_>>>()?;
        Ok(SMat::from_rows(&self.ctx, rows))
    }
    fn jet_mat(&self, m: &Matrix) -> Res<JetMat<F>> {
        let ring = bkhp::hodge_pink::default_ring(&self.ctx);
        let n = m.len();
        let d = m
            .iter()
            .flatten()
            .map(|x| x.to_jet(&ring))
            .collect::<bkhp::Result<Vec<_>>>()?;
        Ok(JetMat::from_vec(&ring, n, n, d))
    }
    fn jets(&self, xs: &[Expr]) -> Res<Vec<Jet<F>>> {
        let ring = bkhp::hodge_pink::default_ring(&self.ctx);
        Ok(xs
            .iter()
            .map(|x| x.to_jet(&ring))
            .collect::<bkhp::Result<Vec<_>>>()?)
    }
    fn phi_mod(&self, m: &Matrix) -> Res<PhiMod<F>> {
        Ok(PhiMod::new(&self.ctx, self.const_mat(m)?)?)
    }
    fn hp(&self, o: &Object) -> Res<HPStruct<F>> {
        let Body::HodgePink { phi, v } = &o.body else {
            unreachable!("kind checked")
        };
        Ok(HPStruct::new(
            self.phi_mod(phi)?,
            EJetLattice::new(self.jet_mat(v)?)?,
        )?)
    }
    fn bk(&self, o: &Object) -> Res<BKModule<F>> {
        let Body::BkModule { phi, amplitude } = &o.body else {
            unreachable!("kind checked")
        };
        Ok(BKModule::new(self.series_mat(phi)?, *amplitude)?)
    }
    fn filtered(&self, o: &Object) -> Res<FilteredPhiN<F>> {
        let Body::FilteredPhiN { phi, n, fil } = &o.body else {
            unreachable!("kind checked")
        };
        let pm = self.phi_mod(phi)?;
        let r = pm.rank();
        let nm = match n {
            Some(n) => self.const_mat(n)?,
            None => Mat::zeros(self.f(), r, r),
        };
        let kf = KField::new(&self.ctx);
        let mut steps = Vec::new();
        for (i, vs) in fil {
            let pv = vs
                .iter()
                .map(|v| {
                    v.iter()
                        .map(|x| x.to_k_poly(&self.ctx))
                        .collect::<bkhp::Result<Vec<_>>>()
                })
                .collect::<bkhp::Result<Vec<_>>>()?;
            steps.push((*i, KSpace::span(&kf, r, &pv)?));
        }
        let fj = FiltrationJumps::from_steps(&kf, r, &steps)?;
        Ok(FilteredPhiN::checked(pm, nm, fj)?)
    }
    fn w_lattice(&self, o: &Object) -> Res<WLattice<F>> {
        let Body::WLattice { basis } = &o.body else {
            unreachable!("kind checked")
        };
        Ok(WLattice::new(self.const_mat(basis)?)?)
    }
    fn quantifier(&self, phi: &PhiMod<F>) -> Res<Quantifier<F>> {
        let Some(o) = self.object("subs", Kind::SubList)? else {
            return Ok(Quantifier::Auto);
        };
        let Body::SubList { subs } = &o.body else {
            unreachable!("kind checked")
        };
        let mut out = Vec::new();
        for s in subs {
            if s.iter().any(|v| v.len() != phi.rank()) {
                return input(format!(
                    "sub-list `{}` has vectors of the wrong length",
                    o.name
                ));
            }
            let vs = s
                .iter()
                .map(|v| v.iter().map(|x| x.to_elt(self.f())).collect())
                .collect::<bkhp::Result<Vec<_>>>()?;
            out.push(SubSpec::from_span(phi, &vs)?);
        }
        Ok(Quantifier::Supplied(out))
    }

    // ---- report sections

    fn context_node(&self) -> Node {
        let s = &self.doc.context;
        Node::map()
            .with("mode", Node::str(s.mode.as_str()))
            .with(
                if s.mode == Mode::Mixed { "p" } else { "q" },
                Node::Int(s.p as i64),
            )
            .with("e", Node::Int(self.ctx.e() as i64))
            .with("E", Node::Str(s.e_poly.to_string()))
            .with("N_c", Node::Int(s.n_c))
            .with("M_u", Node::Int(s.m_u as i64))
            .with("h_E", Node::Int(s.h_e))
            .with("field_cap", Node::Int(self.f().cap()))
    }

    fn invariants(&self, o: &Object) -> Res<Node> {
        let mut n = Node::map().with("kind", Node::str(o.body.kind().as_str()));
        match o.body.kind() {
            Kind::HodgePink => {
                let h = self.hp(o)?;
                let (s, t) = h.sandwich()?;
                n.push("rank", Node::Int(h.rank() as i64));
                n.push("t_N", Node::Int(t_newton(h.phi())?));
                n.push("t_H", Node::Int(t_hodge(&h)?));
                n.push("sandwich", pair(s, t));
                n.push("hodge_jumps", jumps(&hodge_filtration(&h)?));
                n.push("jet_order", Node::Int(h.ring().order()));
            }
            Kind::BkModule => {
                let b = self.bk(o)?;
                let (dp, de) = b.det_class();
                let (s, t) = b.amplitude();
                n.push("rank", Node::Int(b.rank() as i64));
                n.push("det_p_exponent", Node::Int(dp));
                n.push("det_E_exponent", Node::Int(de));
                n.push("amplitude", pair(s, t));
                if let Some((ds, dt)) = b.declared_amplitude() {
                    n.push("declared_amplitude", pair(ds, dt));
                    n.push("declared_amplitude_holds", Node::Bool(ds <= s && t <= dt));
                }
                n.push("u_truncation", Node::Int(self.ctx.m_u() as i64));
            }
            Kind::FilteredPhiN => {
                let fp = self.filtered(o)?;
                n.push("rank", Node::Int(fp.rank() as i64));
                n.push("t_N", Node::Int(t_newton(fp.phi())?));
                n.push("t_H", Node::Int(fp.fil().t_h()));
                n.push("hodge_jumps", jumps(fp.fil()));
                n.push("monodromy_zero", Node::Bool(fp.monodromy().is_zero()));
            }
            Kind::WLattice => {
                let w = self.w_lattice(o)?;
                n.push("rank", Node::Int(w.rank() as i64));
                n.push("det_valuation", Node::Int(w.det_valuation()?));
            }
            Kind::SubList => {
                let Body::SubList { subs } = &o.body else {
                    unreachable!()
                };
                n.push("count", Node::Int(subs.len() as i64));
            }
        }
        Ok(n)
    }

    fn run(&self, command: &str) -> Res<Outcome> {
        let mut report = Report::new(command);
        report.body.push("context", self.context_node());
        let refs: Vec<&Object> = if command == "info" {
            self.doc.objects.iter().collect()
        } else {
            ["target", "candidate", "base", "subs"]
                .iter()
                .filter_map(|k| self.get(k))
                .map(|p| self.doc.object(&p.value).expect("validated"))
                .collect()
        };
        let mut objs = Node::map();
        for o in refs {
            objs.push(&o.name, self.invariants(o)?);
        }
        report.body.push("objects", objs);
        let mut disclosures = Vec::new();
        let (result, negative) = match command {
            "info" => (Node::map(), false),
            "tn-th" => self.tn_th()?,
            "wa-check" => self.wa_check()?,
            "hp-from-filtered" => self.hp_from_filtered()?,
            "crosscheck-14" => self.crosscheck()?,
            "diso" => self.diso()?,
            "xi" => self.xi()?,
            "recon-verify" => self.recon(&mut disclosures)?,
            "gamma" => self.gamma(&mut disclosures, false)?,
            "verdict" => self.gamma(&mut disclosures, true)?,
            "ext-build" => self.ext_build()?,
            "theta-solve" => self.theta()?,
            "polygon-check" => self.polygon()?,
            _ => unreachable!("command validated"),
        };
        report.body.push("result", result);
        report.body.push(
            "disclosures",
            Node::List(disclosures.into_iter().map(Node::Str).collect()),
        );
        Ok(Outcome { report, negative })
    }

    // ---- commands

    fn tn_th(&self) -> Res<(Node, bool)> {
        let p = self.get("target").map(|p| &p.value);
        let o = p.and_then(|n| self.doc.object(n));
        let (t_n, t_h) = match o.map(|o| o.body.kind()) {
            Some(Kind::HodgePink) => {
                let h = self.hp(o.expect("present"))?;
                (t_newton(h.phi())?, t_hodge(&h)?)
            }
            Some(Kind::FilteredPhiN) => {
                let fp = self.filtered(o.expect("present"))?;
                (t_newton(fp.phi())?, fp.fil().t_h())
            }
            _ => return input("tn-th needs a hodge-pink or filtered-phiN `target`"),
        };
        Ok((
            Node::map()
                .with("t_N", Node::Int(t_n))
                .with("t_H", Node::Int(t_h))
                .with("equal", Node::Bool(t_n == t_h)),
            false,
        ))
    }

    fn wa_check(&self) -> Res<(Node, bool)> {
        let h = self.hp(self.required("target", Kind::HodgePink)?)?;
        let q = self.quantifier(h.phi())?;
        let v = weakly_admissible(&h, &q)?;
        let mut n = verdict_node(&v);
        if h.phi().is_scalar() {
            let depth = self.depth()?;
            let lines = scalar_line_jump_analysis(&h, depth)?;
            let rows = lines
                .iter()
                .map(|l| {
                    Node::map()
                        .with("dim", Node::Int(l.space.dim() as i64))
                        .with(
                            "spanned_by",
                            Node::List(l.space.basis().iter().map(|b| elts(b)).collect()),
                        )
                        .with("t_H", Node::Int(l.t_h))
                        .with("at_depth", Node::Bool(l.at_depth))
                })
                .collect();
            n.push(
                "scalar_line_analysis",
                Node::map()
                    .with("depth", Node::Int(depth))
                    .with("jumps", Node::List(rows)),
            );
        }
        if let Verdict::Refused { reason } = &v {
            return Err(Failure {
                code: EXIT_PRECISION,
                msg: format!("weak admissibility refused: {reason}"),
            });
        }
        Ok((n, v.is_false()))
    }

    fn hp_from_filtered(&self) -> Res<(Node, bool)> {
        let fp = self.filtered(self.required("target", Kind::FilteredPhiN)?)?;
        let h = hp_functor(&fp)?;
        let recovered = hodge_filtration(&h)?.eq_filtration(fp.fil())?;
        Ok((
            Node::map()
                .with("V", jetmat(h.basis())?)
                .with("t_N", Node::Int(t_newton(h.phi())?))
                .with("t_H", Node::Int(t_hodge(&h)?))
                .with("filtration_recovered", Node::Bool(recovered))
                .with(
                    "griffiths_transversal",
                    Node::Bool(griffiths_transversal(&h, fp.monodromy())?),
                ),
            false,
        ))
    }

    fn crosscheck(&self) -> Res<(Node, bool)> {
        let fp = self.filtered(self.required("target", Kind::FilteredPhiN)?)?;
        let q = self.quantifier(fp.phi())?;
        let cc = lemma14_crosscheck(&fp, &q)?;
        Ok((
            Node::map()
                .with("filtered", verdict_node(&cc.filtered))
                .with("hodge_pink", verdict_node(&cc.hodge_pink))
                .with("agree", Node::Bool(cc.agree)),
            !cc.agree,
        ))
    }

    fn diso(&self) -> Res<(Node, bool)> {
        let b = self.bk(self.required("target", Kind::BkModule)?)?;
        let d = diso(&b)?;
        Ok((
            Node::map()
                .with("phi_D", mat(d.hp.phi().a()))
                .with("V", jetmat(d.hp.basis())?)
                .with("t_N", Node::Int(d.t_n))
                .with("t_H", Node::Int(d.t_h))
                .with("balanced", Node::Bool(d.balanced()))
                .with("xi_lambda_power", Node::Int(d.xi.lambda_pow()))
                .with("xi_iterations", Node::Int(d.xi.iterations() as i64))
                .with("xi_guaranteed_digits", prec_node(d.xi.digits())),
            false,
        ))
    }

    fn xi(&self) -> Res<(Node, bool)> {
        let b = self.bk(self.required("target", Kind::BkModule)?)?;
        let x = xi_compute(&b, None)?;
        let res = xi_residual(&b, &x)?;
        Ok((
            Node::map()
                .with("lambda_power", Node::Int(x.lambda_pow()))
                .with("iterations", Node::Int(x.iterations() as i64))
                .with("abs_prec", prec_node(x.prec()))
                .with("guaranteed_digits", prec_node(x.digits()))
                .with("residual_zero", Node::Bool(res.is_zero()))
                .with("numerator", smat(x.numerator())),
            false,
        ))
    }

    fn recon(&self, disc: &mut Vec<String>) -> Res<(Node, bool)> {
        let b = self.bk(self.required("target", Kind::BkModule)?)?;
        let h = match self.object("candidate", Kind::HodgePink)? {
            Some(o) => self.hp(o)?,
            None => {
                disc.push(
                    "no candidate given; verified against the structure computed by diso".into(),
                );
                diso(&b)?.hp
            }
        };
        let n_max = self.n_max()?;
        let c_cut = self.c_cut()?;
        let rep = reconstruct_verify(&b, &h, n_max)?;
        disc.push(format!(
            "(C1) and (C2) are checked for 1 ≤ n ≤ {n_max} only"
        ));
        let rows = rep
            .records
            .iter()
            .map(|r| {
                Node::map()
                    .with("n", Node::Int(r.n as i64))
                    .with("c1", Node::Bool(r.c1))
                    .with(
                        "c2_exponent",
                        r.c2_exponent
                            .as_ref()
                            .map_or(Node::str("vanishes"), Node::rational),
                    )
            })
            .collect();
        let ok = rep.c1_holds() && rep.c2_holds(&c_cut);
        Ok((
            Node::map()
                .with("n_max", Node::Int(n_max as i64))
                .with("records", Node::List(rows))
                .with("observed_constant", Node::rational(&rep.constant))
                .with("c_cut", Node::rational(&c_cut))
                .with("c1_holds", Node::Bool(rep.c1_holds()))
                .with("c2_holds", Node::Bool(rep.c2_holds(&c_cut))),
            !ok,
        ))
    }

    fn gamma(&self, disc: &mut Vec<String>, verdict: bool) -> Res<(Node, bool)> {
        let h0 = self.hp(self.required("target", Kind::HodgePink)?)?;
        let (h, k) = anti_effective(&h0)?;
        if k > 0 {
            disc.push(format!("twisted by E^{k} to make V anti-effective"));
        }
        let delta = match self.object("base", Kind::WLattice)? {
            Some(o) => self.w_lattice(o)?,
            None => WLattice::standard(self.f(), h.rank()),
        };
        let n_max = self.n_max()?;
        disc.push(format!("profiles computed for 1 ≤ n ≤ {n_max} only"));
        let mut n = Node::map()
            .with("twist", Node::Int(k))
            .with("n_max", Node::Int(n_max as i64));
        if !verdict {
            let prof = gamma_profile(&h, &delta, n_max)?;
            push_profile(&mut n, &prof);
            if let (Some(a), Some(b)) = (self.int_param("n")?, self.int_param("n2")?) {
                let (Ok(a), Ok(b)) = (u32::try_from(a), u32::try_from(b)) else {
                    return input("`n` and `n2` must be nonnegative");
                };
                let c = gamma_compose_check(&h, &delta, a, b)?;
                n.push(
                    "compose",
                    Node::map()
                        .with("n", Node::Int(a as i64))
                        .with("n2", Node::Int(b as i64))
                        .with("C", Node::Int(c)),
                );
            }
            return Ok((n, false));
        }
        let c = self.c_cut()?;
        let c_cut = c
            .floor()
            .to_integer()
            .to_i64()
            .map_or_else(|| input("`c_cut` out of range"), Ok)?;
        n.push("c_cut", Node::Int(c_cut));
        let (v, prof) = admissibility_verdict(&h, &delta, n_max, c_cut)?;
        let (name, detail) = match &v {
            AdmissibilityVerdict::Bounded { c_obs } => {
                ("bounded", Node::map().with("c_obs", Node::Int(*c_obs)))
            }
            AdmissibilityVerdict::Inconclusive { c_obs } => {
                ("inconclusive", Node::map().with("c_obs", Node::Int(*c_obs)))
            }
            AdmissibilityVerdict::DeterminantDrift { direction } => (
                "determinant-drift",
                Node::map().with("direction", Node::str(direction.as_str())),
            ),
            AdmissibilityVerdict::Drift { index, direction } => (
                "drift",
                Node::map()
                    .with("index", Node::Int(*index as i64))
                    .with("direction", Node::str(direction.as_str())),
            ),
        };
        n.push("verdict", Node::str(name));
        n.push("detail", detail);
        if let Some(p) = prof {
            push_profile(&mut n, &p);
        }
        if matches!(v, AdmissibilityVerdict::Inconclusive { .. }) {
            disc.push("no drift pattern and C_obs above the cut; raise n_max or M_u".into());
        }
        Ok((
            n,
            v.is_drift() || matches!(v, AdmissibilityVerdict::DeterminantDrift { .. }),
        ))
    }

    fn vector(&self) -> Res<Vec<Expr>> {
        match self.get("vector") {
            Some(p) => Ok(expr_vector(&p.value, p.line, p.col)?),
            None => input("this command needs task parameter `vector`"),
        }
    }

    fn ext_build(&self) -> Res<(Node, bool)> {
        let b = self.bk(self.required("target", Kind::BkModule)?)?;
        let t = self.jets(&self.vector()?)?;
        if t.len() != b.rank() {
            return input(format!("`vector` must have {} entries", b.rank()));
        }
        let ext = build_extension(&b, &t)?;
        let pim = match ext.pim.outcome {
            PimOutcome::Ok => Node::str("ok"),
            PimOutcome::Counterexample(n) => Node::Str(format!("fails at n = {n}")),
        };
        let ok = ext.class_matches && ext.sub_matches && ext.pim.is_ok();
        Ok((
            Node::map()
                .with("C", Node::Int(ext.c))
                .with("X", Node::List(ext.x.x.iter().map(series).collect()))
                .with("theta_offset", Node::Int(ext.x.k))
                .with("theta_iterations", Node::Int(ext.x.iterations as i64))
                .with("phi", smat(ext.module.phi()))
                .with("pim", pim)
                .with("pim_bound", Node::Int(ext.pim_bound))
                .with("pim_observed", Node::Int(ext.pim.observed()))
                .with(
                    "class",
                    Node::List(ext.class.iter().map(jet).collect::<Res<Vec<_>>>()?),
                )
                .with("class_matches", Node::Bool(ext.class_matches))
                .with("sub_matches", Node::Bool(ext.sub_matches))
                .with("t_N", Node::Int(ext.diso.t_n))
                .with("t_H", Node::Int(ext.diso.t_h)),
            !ok,
        ))
    }

    fn theta(&self) -> Res<(Node, bool)> {
        let o = self.required("target", Kind::BkModule)?;
        let Body::BkModule { phi, .. } = &o.body else {
            unreachable!()
        };
        let phi = self.series_mat(phi)?;
        let Some(c) = self.int_param("c")? else {
            return input("theta-solve needs task parameter `c`");
        };
        let t = self.jets(&self.vector()?)?;
        if t.len() != phi.rows() {
            return input(format!("`vector` must have {} entries", phi.rows()));
        }
        let sol = theta_solve(&phi, c, &t)?;
        let resum = theta_resum_check(&phi, &sol.x, &t)?;
        Ok((
            Node::map()
                .with("C", Node::Int(c))
                .with("X", Node::List(sol.x.iter().map(series).collect()))
                .with("offset", Node::Int(sol.k))
                .with("iterations", Node::Int(sol.iterations as i64))
                .with("resummed_check", Node::Bool(resum)),
            !resum,
        ))
    }

    fn polygon(&self) -> Res<(Node, bool)> {
        let c = match self.rational_param("c")? {
            Some(c) => c,
            None => self.c_cut()?,
        };
        if let Some(p) = self.get("sequence") {
            let seq = int_rows(&p.value, p.line, p.col)?;
            let mut profs = Vec::new();
            for v in &seq {
                match DivisorProfile::from_sorted(v.clone()) {
                    Ok(d) => profs.push(d),
                    Err(_) => {
                        return Ok((
                            Node::map()
                                .with("C", Node::rational(&c))
                                .with("verdict", Node::str("violation"))
                                .with(
                                    "detail",
                                    Node::Str(format!(
                                        "vector ({}) is not weakly decreasing",
                                        join(v)
                                    )),
                                ),
                            true,
                        ))
                    }
                }
            }
            let mut n = Node::map().with("C", Node::rational(&c));
            let neg = match polygon_sequence_check(&profs, &c) {
                PolygonVerdict::Ok { bound, respected } => {
                    n.push("verdict", Node::str("ok"));
                    n.push("bound", Node::rational(&bound));
                    n.push("bound_respected", Node::Bool(respected));
                    !respected
                }
                PolygonVerdict::Violation {
                    step,
                    index,
                    hypothesis,
                } => {
                    n.push("verdict", Node::str("violation"));
                    n.push("step", Node::Int(step as i64));
                    n.push("index", Node::Int(index as i64));
                    n.push("hypothesis", Node::Str(format!("{hypothesis:?}")));
                    true
                }
            };
            return Ok((n, neg));
        }
        let (Some(r), Some(len)) = (self.int_param("r")?, self.int_param("length")?) else {
            return input("polygon-check needs `sequence`, or `r` and `length`");
        };
        if !c.is_integer() || !(1..=4).contains(&r) || !(1..=8).contains(&len) {
            return input("enumeration needs an integral `c`, 1 ≤ r ≤ 4 and 1 ≤ length ≤ 8");
        }
        let ci = c.to_integer().to_i64().unwrap_or(0);
        let s = enumerate_polygon_sequences(r as usize, ci, len as usize);
        Ok((
            Node::map()
                .with("C", Node::rational(&c))
                .with("cases", Node::Int(s.cases as i64))
                .with("satisfying", Node::Int(s.satisfying as i64))
                .with("disagreements", Node::Int(s.disagreements as i64))
                .with("bound_violations", Node::Int(s.bound_violations as i64))
                .with("max_abs_satisfying", Node::Int(s.max_abs_satisfying)),
            s.disagreements > 0 || s.bound_violations > 0,
        ))
    }
}

fn join(v: &[i64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn push_profile<F: CoeffField>(n: &mut Node, prof: &GammaProfile<F>) {
    n.push("t_N", Node::Int(prof.t_n));
    n.push("t_H", Node::Int(prof.t_h));
    n.push("divisors", profile_table(prof));
    n.push("c_obs", Node::Int(prof.c_obs()));
    n.push("step_bound", Node::Int(prof.step_bound()));
    n.push("determinant_conserved", Node::Bool(prof.det_ok()));
    n.push("beta_inclusion", Node::Bool(prof.inclusion_ok()));
}
