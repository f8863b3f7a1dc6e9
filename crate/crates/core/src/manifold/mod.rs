//! Invariant records for closed oriented 4-manifolds and the operations that
//! combine them: connected sum, blow-up and fiber sum along square-zero tori.
//!
//! Nothing here models smooth or symplectic structure directly. A class is a
//! bookkeeping record (χ, σ, b₁, b⁺, flags, a π₁ descriptor, marked tori)
//! attached to the expression tree that produced it.

mod checks;
mod construct;
mod pi1;

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::presentation::Word;

pub use checks::{derived_checks, CheckStatus, DerivedCheck, DerivedChecks};
pub use construct::{
    odd_rank_construct, stipsicz_member, theorem1_construct, theorem2_construct, theorem2_trace,
    z3_construct, Monodromy, Pi1Check,
};
pub use pi1::Pi1;

/// Three-valued flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl Tri {
    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::No, _) | (_, Tri::No) => Tri::No,
            (Tri::Yes, Tri::Yes) => Tri::Yes,
            _ => Tri::Unknown,
        }
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tri::Yes => "yes",
            Tri::No => "no",
            Tri::Unknown => "unknown",
        })
    }
}

/// Node of a construction expression.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expr {
    /// `atom`, `connected_sum`, `blow_up`, `fiber_sum`, or `base`.
    pub op: String,
    /// Human-readable name, e.g. `Sym2(3)`.
    pub label: String,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub params: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Expr>,
    pub chi: i64,
    pub sigma: i64,
    pub pi1_effect: String,
}

impl Expr {
    fn leaf(op: &str, label: String, params: Value, chi: i64, sigma: i64, effect: String) -> Expr {
        Expr { op: op.into(), label, params, children: Vec::new(), chi, sigma, pi1_effect: effect }
    }

    /// Infix rendering of the whole tree.
    pub fn render(&self) -> String {
        match self.op.as_str() {
            "connected_sum" => format!("({} # {})", self.children[0].render(), self.children[1].render()),
            "blow_up" => format!("blowup({})", self.children[0].render()),
            "fiber_sum" => {
                let glue = self.params.get("glue").and_then(Value::as_str).unwrap_or("T");
                format!("({} #[{}] {})", self.children[0].render(), glue, self.children[1].render())
            }
            _ => self.label.clone(),
        }
    }

    /// Post-order list of nodes, leaves first.
    pub fn post_order(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        let mut stack = vec![(self, false)];
        while let Some((e, expanded)) = stack.pop() {
            if expanded {
                out.push(e);
            } else {
                stack.push((e, true));
                for c in e.children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }
}

/// What the complement of a marked torus contributes to π₁ when the torus is
/// used as the far side of a fiber sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Complement {
    /// Simply connected complement: the sum kills the whole image of the
    /// other torus.
    Trivial,
    /// π₁ of the complement is ℤ, mapped isomorphically onto the host, and
    /// the torus surjects onto it with the slot `kernel_slot` of its image
    /// in the kernel. Summing kills exactly that slot of the other torus.
    #[serde(rename = "infinite_cyclic_surjected_by_torus")]
    InfiniteCyclic { kernel_slot: usize },
    /// The complement carries the host's whole group; no killing rule is
    /// available from this side.
    Host,
}

/// A torus inside a class, with the data the fiber-sum rule needs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarkedTorus {
    pub label: String,
    pub self_intersection: i64,
    pub complement_pi1: Complement,
    pub symplectic: bool,
    /// Images of the two generators of π₁(T²), as words in the host's
    /// generators.
    pub image: Vec<Word>,
}

impl MarkedTorus {
    fn new(label: &str, complement: Complement, image: Vec<Word>) -> Self {
        MarkedTorus {
            label: label.into(),
            self_intersection: 0,
            complement_pi1: complement,
            symplectic: true,
            image,
        }
    }
}

/// Invariant record of a (possibly hypothetical) closed 4-manifold.
#[derive(Clone, Debug, Serialize)]
pub struct ManifoldClass {
    pub expr: Expr,
    pub chi: i64,
    pub sigma: i64,
    pub b1: usize,
    pub b_plus: Option<u64>,
    pub spin: Tri,
    pub minimal: Tri,
    pub symplectic: bool,
    pub pi1: Pi1,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tori: Vec<MarkedTorus>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// b⁺ from χ + σ = 2 − 2b₁ + 2b⁺, when that yields a nonnegative integer.
pub fn b_plus_from_identity(chi: i64, sigma: i64, b1: usize) -> Option<u64> {
    let twice = chi + sigma - 2 + 2 * b1 as i64;
    (twice >= 0 && twice.is_even()).then(|| (twice / 2) as u64)
}

impl ManifoldClass {
    /// Display name of the whole construction.
    pub fn name(&self) -> String {
        self.expr.render()
    }

    /// 2χ + 3σ.
    pub fn k_squared(&self) -> i64 {
        2 * self.chi + 3 * self.sigma
    }

    pub fn b2(&self) -> i64 {
        self.chi - 2 + 2 * self.b1 as i64
    }

    pub fn torus(&self, label: &str) -> Result<&MarkedTorus, Error> {
        self.tori.iter().find(|t| t.label == label).ok_or_else(|| {
            Error::IllegalMark { label: label.into(), reason: format!("no such torus in {}", self.name()) }
        })
    }

    fn with_pi1(expr: Expr, chi: i64, sigma: i64, pi1: Pi1) -> Self {
        let b1 = pi1.b1();
        ManifoldClass {
            expr,
            chi,
            sigma,
            b1,
            b_plus: b_plus_from_identity(chi, sigma, b1),
            spin: Tri::Unknown,
            minimal: Tri::Unknown,
            symplectic: false,
            pi1,
            tori: Vec::new(),
            notes: Vec::new(),
        }
    }
}

impl fmt::Display for ManifoldClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: chi={} sigma={} pi1={}", self.name(), self.chi, self.sigma, self.pi1)
    }
}

/// Named building blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    S4,
    CP2,
    CP2bar,
    S2xS2,
    K3,
    E1,
    T4,
    S2xT2,
    /// S² × Σ_g.
    S2xSigma(u64),
    /// Symmetric square of a genus-g surface.
    Sym2(u64),
    /// E(1) with log transforms of multiplicities p and q.
    Dolgachev(u64, u64),
    /// The ℤ-group manifold with a torus whose complement has group ℤ.
    LemmaK,
}

impl Atom {
    pub const NAMES: &'static [&'static str] = &[
        "S4", "CP2", "CP2bar", "S2xS2", "K3", "E1", "T4", "S2xT2", "S2xSigma(g)", "Sym2(g)",
        "dolgachev(p,q)", "lemma_K",
    ];
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::S4 => write!(f, "S4"),
            Atom::CP2 => write!(f, "CP2"),
            Atom::CP2bar => write!(f, "CP2bar"),
            Atom::S2xS2 => write!(f, "S2xS2"),
            Atom::K3 => write!(f, "K3"),
            Atom::E1 => write!(f, "E1"),
            Atom::T4 => write!(f, "T4"),
            Atom::S2xT2 => write!(f, "S2xT2"),
            Atom::S2xSigma(g) => write!(f, "S2xSigma({g})"),
            Atom::Sym2(g) => write!(f, "Sym2({g})"),
            Atom::Dolgachev(p, q) => write!(f, "dolgachev({p},{q})"),
            Atom::LemmaK => write!(f, "lemma_K"),
        }
    }
}

impl FromStr for Atom {
    type Err = Error;

    /// Accepts `Sym2(3)`, `sym2:3`, `dolgachev(2,3)`, `dolgachev:2,3`, and the
    /// plain names, case-insensitively.
    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        let (head, args) = match t.find(['(', ':']) {
            Some(i) => {
                let rest = t[i + 1..].trim_end_matches(')');
                (&t[..i], Some(rest))
            }
            None => (t, None),
        };
        let nums = |want: usize| -> Result<Vec<u64>, Error> {
            let a = args.ok_or_else(|| Error::InvalidParams(format!("`{t}` needs {want} parameter(s)")))?;
            let v: Result<Vec<u64>, _> = a.split(',').map(|x| x.trim().parse::<u64>()).collect();
            match v {
                Ok(v) if v.len() == want => Ok(v),
                _ => Err(Error::InvalidParams(format!("`{t}` needs {want} nonnegative integer parameter(s)"))),
            }
        };
        let no_args = |a: Atom| -> Result<Atom, Error> {
            match args {
                None => Ok(a),
                Some(_) => Err(Error::InvalidParams(format!("`{head}` takes no parameters"))),
            }
        };
        match head.to_ascii_lowercase().as_str() {
            "s4" => no_args(Atom::S4),
            "cp2" => no_args(Atom::CP2),
            "cp2bar" => no_args(Atom::CP2bar),
            "s2xs2" => no_args(Atom::S2xS2),
            "k3" => no_args(Atom::K3),
            "e1" => no_args(Atom::E1),
            "t4" => no_args(Atom::T4),
            "s2xt2" => no_args(Atom::S2xT2),
            "lemma_k" => no_args(Atom::LemmaK),
            "s2xsigma" => Ok(Atom::S2xSigma(nums(1)?[0])),
            "sym2" => Ok(Atom::Sym2(nums(1)?[0])),
            "dolgachev" => {
                let v = nums(2)?;
                Ok(Atom::Dolgachev(v[0], v[1]))
            }
            _ => Err(Error::UnknownAtom(t.to_string())),
        }
    }
}

fn binom2(n: i64) -> i64 {
    n * (n - 1) / 2
}

/// Invariant record of an atom.
pub fn atomic(atom: Atom) -> Result<ManifoldClass, Error> {
    let gen = Word::generator;
    let (chi, sigma, b_plus, spin, minimal, symplectic, pi1, tori, params) = match atom {
        Atom::S4 => (2, 0, 0, Tri::Yes, Tri::Yes, false, Pi1::Trivial, vec![], Value::Null),
        Atom::CP2 => (3, 1, 1, Tri::No, Tri::Yes, true, Pi1::Trivial, vec![], Value::Null),
        Atom::CP2bar => (3, -1, 0, Tri::No, Tri::No, false, Pi1::Trivial, vec![], Value::Null),
        Atom::S2xS2 => (4, 0, 1, Tri::Yes, Tri::Yes, true, Pi1::Trivial, vec![], Value::Null),
        Atom::K3 => {
            let f = MarkedTorus::new("F", Complement::Trivial, vec![Word::empty(), Word::empty()]);
            (24, -16, 3, Tri::Yes, Tri::Yes, true, Pi1::Trivial, vec![f], Value::Null)
        }
        Atom::E1 => {
            let f = MarkedTorus::new("F", Complement::Trivial, vec![Word::empty(), Word::empty()]);
            (12, -8, 1, Tri::No, Tri::No, true, Pi1::Trivial, vec![f], Value::Null)
        }
        Atom::T4 => {
            let names = ['a', 'b', 'c', 'd'];
            let mut tori = Vec::new();
            for i in 0..4 {
                for j in i + 1..4 {
                    let label = format!("T_{}{}", names[i], names[j]);
                    tori.push(MarkedTorus::new(&label, Complement::Host, vec![gen(i), gen(j)]));
                }
            }
            (0, 0, 3, Tri::Yes, Tri::Yes, true, Pi1::FreeAbelian(4), tori, Value::Null)
        }
        Atom::S2xT2 => {
            let t = MarkedTorus::new("T", Complement::Host, vec![gen(0), gen(1)]);
            (0, 0, 1, Tri::Yes, Tri::Yes, true, Pi1::FreeAbelian(2), vec![t], Value::Null)
        }
        Atom::S2xSigma(g) => {
            let g = g as i64;
            let params = json!({ "genus": g });
            (4 - 4 * g, 0, 1, Tri::Yes, Tri::Yes, true, Pi1::surface(g as usize), vec![], params)
        }
        Atom::Sym2(g) => {
            let gi = g as i64;
            let minimal = match g {
                0 | 1 => Tri::Yes,
                2 => Tri::No,
                _ => Tri::Unknown,
            };
            let spin = if g == 0 { Tri::No } else { Tri::Unknown };
            // γ₁ × γ₂ from two members of a symplectic basis; slot 1 holds γ₁.
            let tori = if g >= 1 {
                vec![MarkedTorus::new("T_gamma", Complement::Host, vec![gen(1), gen(0)])]
            } else {
                vec![]
            };
            let b_plus = (gi * gi - gi + 1) as u64;
            let pi1 = Pi1::free_abelian(2 * g as usize);
            (3 - 4 * gi + binom2(2 * gi), 1 - gi, b_plus, spin, minimal, true, pi1, tori, json!({ "genus": g }))
        }
        Atom::Dolgachev(p, q) => {
            if p == 0 || q == 0 {
                return Err(Error::InvalidParams("dolgachev(p,q) requires p, q >= 1".into()));
            }
            let n = p.gcd(&q);
            let minimal = Tri::from_bool(p >= 2 && q >= 2);
            let spin = if n == 1 { Tri::No } else { Tri::Unknown };
            (12, -8, 1, spin, minimal, true, Pi1::cyclic(n), vec![], json!({ "p": p, "q": q }))
        }
        Atom::LemmaK => {
            let t = MarkedTorus::new(
                "T",
                Complement::InfiniteCyclic { kernel_slot: 1 },
                vec![gen(0), Word::empty()],
            );
            (12, -8, 2, Tri::Unknown, Tri::Unknown, true, Pi1::FreeAbelian(1), vec![t], Value::Null)
        }
    };
    let effect = format!("pi1 = {pi1}");
    let expr = Expr::leaf("atom", atom.to_string(), params, chi, sigma, effect);
    Ok(ManifoldClass {
        expr,
        chi,
        sigma,
        b1: pi1.b1(),
        b_plus: Some(b_plus),
        spin,
        minimal,
        symplectic,
        pi1,
        tori,
        notes: Vec::new(),
    })
}

/// Parses an atom name and returns its record.
pub fn atom(name: &str) -> Result<ManifoldClass, Error> {
    atomic(name.parse()?)
}

fn is_atom(m: &ManifoldClass, a: Atom) -> bool {
    m.expr.op == "atom" && m.expr.label == a.to_string()
}

/// Group text for traces; long presentations are summarized by size.
fn brief(pi1: &Pi1) -> String {
    match pi1 {
        Pi1::Explicit(p) if p.relator_count() > 4 => {
            format!("<{} generators | {} relators>", p.generator_count(), p.relator_count())
        }
        other => other.to_string(),
    }
}

/// A # B.
pub fn connected_sum(a: &ManifoldClass, b: &ManifoldClass) -> ManifoldClass {
    let chi = a.chi + b.chi - 2;
    let sigma = a.sigma + b.sigma;
    let pi1 = Pi1::free_product([a.pi1.clone(), b.pi1.clone()]);
    let effect = format!("pi1 = {} * {} = {}", a.pi1, b.pi1, pi1);
    let expr = Expr {
        op: "connected_sum".into(),
        label: "#".into(),
        params: Value::Null,
        children: vec![a.expr.clone(), b.expr.clone()],
        chi,
        sigma,
        pi1_effect: effect,
    };
    let mut m = ManifoldClass::with_pi1(expr, chi, sigma, pi1);
    m.b1 = a.b1 + b.b1;
    m.b_plus = match (a.b_plus, b.b_plus) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    };
    m.spin = a.spin.and(b.spin);
    m.minimal = if is_atom(a, Atom::CP2bar) || is_atom(b, Atom::CP2bar) { Tri::No } else { Tri::Unknown };
    m
}

/// Connected sum with CP2bar, keeping symplecticity and marked tori.
pub fn blow_up(a: &ManifoldClass) -> ManifoldClass {
    let chi = a.chi + 1;
    let sigma = a.sigma - 1;
    let expr = Expr {
        op: "blow_up".into(),
        label: "blowup".into(),
        params: Value::Null,
        children: vec![a.expr.clone()],
        chi,
        sigma,
        pi1_effect: "unchanged".into(),
    };
    ManifoldClass {
        expr,
        chi,
        sigma,
        b1: a.b1,
        b_plus: a.b_plus,
        spin: Tri::No,
        minimal: Tri::No,
        symplectic: a.symplectic,
        pi1: a.pi1.clone(),
        tori: a.tori.clone(),
        notes: a.notes.clone(),
    }
}

fn check_mark(host: &ManifoldClass, t: &MarkedTorus) -> Result<(), Error> {
    let bad = |reason: String| Err(Error::IllegalMark { label: t.label.clone(), reason });
    if t.self_intersection != 0 {
        return bad(format!("self-intersection {} is not zero", t.self_intersection));
    }
    if !t.symplectic {
        return bad("torus is not symplectic".into());
    }
    if !host.symplectic {
        return bad(format!("host {} is not symplectic", host.name()));
    }
    Ok(())
}

fn describe_words(ws: &[Word], pi1: &Pi1) -> String {
    let names = pi1.to_presentation().names().to_vec();
    let shown: Vec<String> = ws
        .iter()
        .filter(|w| !w.is_empty())
        .map(|w| {
            if w.max_generator().is_some_and(|m| m >= names.len()) {
                format!("{w:?}")
            } else {
                w.display_with(&names).to_string()
            }
        })
        .collect();
    if shown.is_empty() {
        "nothing".into()
    } else {
        shown.join(", ")
    }
}

/// Symplectic sum of `a` and `b` along the marked tori `ta` and `tb`.
///
/// The surviving tori are the remaining marks of whichever side keeps its
/// fundamental group; the other side's marks are dropped.
pub fn fiber_sum_torus(a: &ManifoldClass, ta: &str, b: &ManifoldClass, tb: &str) -> Result<ManifoldClass, Error> {
    let mark_a = a.torus(ta)?;
    let mark_b = b.torus(tb)?;
    check_mark(a, mark_a)?;
    check_mark(b, mark_b)?;

    // Decide which side's group survives and which words die in it.
    let (host, host_mark, kill): (&ManifoldClass, &MarkedTorus, Vec<Word>) =
        match (mark_a.complement_pi1, mark_b.complement_pi1) {
            (_, Complement::Trivial) => (a, mark_a, mark_a.image.clone()),
            (Complement::Trivial, _) => (b, mark_b, mark_b.image.clone()),
            (_, Complement::InfiniteCyclic { kernel_slot }) => (a, mark_a, slot(mark_a, kernel_slot)?),
            (Complement::InfiniteCyclic { kernel_slot }, _) => (b, mark_b, slot(mark_b, kernel_slot)?),
            _ => {
                return Err(Error::NotExpressible(format!(
                    "neither `{ta}` nor `{tb}` has a complement whose group is known"
                )))
            }
        };

    let killed = host.pi1.kill(&kill)?;
    let pi1 = killed.pi1;
    let effect = format!("kill {} in {} -> {}", describe_words(&kill, &host.pi1), brief(&host.pi1), brief(&pi1));
    let mut tori: Vec<MarkedTorus> = host
        .tori
        .iter()
        .filter(|t| t.label != host_mark.label)
        .cloned()
        .collect();
    if let Some(map) = &killed.renumber {
        for t in &mut tori {
            t.image = t.image.iter().map(|w| w.map_generators(|g| map.get(g).copied().flatten())).collect();
        }
    }

    let chi = a.chi + b.chi;
    let sigma = a.sigma + b.sigma;
    let expr = Expr {
        op: "fiber_sum".into(),
        label: "#T".into(),
        params: json!({ "glue": format!("{ta}={tb}") }),
        children: vec![a.expr.clone(), b.expr.clone()],
        chi,
        sigma,
        pi1_effect: effect,
    };
    let mut m = ManifoldClass::with_pi1(expr, chi, sigma, pi1);
    m.symplectic = true;
    m.tori = tori;
    m.notes = a.notes.iter().chain(&b.notes).cloned().collect();
    m.notes.dedup();
    Ok(m)
}

fn slot(t: &MarkedTorus, k: usize) -> Result<Vec<Word>, Error> {
    t.image.get(k).map(|w| vec![w.clone()]).ok_or_else(|| Error::IllegalMark {
        label: t.label.clone(),
        reason: format!("image has no slot {k}"),
    })
}

/// One line of a construction trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    pub operation: String,
    pub params: Value,
    /// Absent for symbolic steps that build no manifold.
    pub chi: Option<i64>,
    pub sigma: Option<i64>,
    pub pi1_effect: String,
}

/// Ordered record of a construction and its result.
#[derive(Clone, Debug, Serialize)]
pub struct ConstructionTrace {
    pub format_version: u32,
    pub construction: String,
    pub steps: Vec<TraceStep>,
    #[serde(rename = "final")]
    pub final_class: ManifoldClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi1_check: Option<Pi1Check>,
}

pub const TRACE_FORMAT_VERSION: u32 = 1;

impl ConstructionTrace {
    /// Flattens the expression tree of `m`, leaves first.
    pub fn from_class(construction: &str, m: ManifoldClass) -> Self {
        let steps = m.expr.post_order().into_iter().map(step_of).collect();
        ConstructionTrace {
            format_version: TRACE_FORMAT_VERSION,
            construction: construction.into(),
            steps,
            final_class: m,
            pi1_check: None,
        }
    }

    /// The manifold steps only (those with χ and σ).
    pub fn manifold_steps(&self) -> impl Iterator<Item = &TraceStep> {
        self.steps.iter().filter(|s| s.chi.is_some())
    }
}

fn step_of(e: &Expr) -> TraceStep {
    let mut params = match &e.params {
        Value::Object(m) => m.clone(),
        _ => serde_json::Map::new(),
    };
    params.insert("label".into(), Value::String(e.label.clone()));
    TraceStep {
        operation: e.op.clone(),
        params: Value::Object(params),
        chi: Some(e.chi),
        sigma: Some(e.sigma),
        pi1_effect: e.pi1_effect.clone(),
    }
}
