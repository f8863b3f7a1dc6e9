//! The functions b ↦ inf χ + bσ over witness sets, their domains, and the
//! moves that make aχ + bσ unbounded below.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::error::Error;
use crate::manifold::{stipsicz_member, ManifoldClass};
use crate::parallel::{self, Exec};
use crate::rational::{fmt_q, frac, int, ser_q, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub chi: i64,
    pub sigma: i64,
    pub label: String,
}

impl Witness {
    pub fn new(label: impl Into<String>, chi: i64, sigma: i64) -> Self {
        Witness { chi, sigma, label: label.into() }
    }

    /// Orientation reversal.
    pub fn reversed(&self) -> Self {
        Witness::new(format!("{}-bar", self.label), self.chi, -self.sigma)
    }

    pub fn value(&self, b: &Q) -> Q {
        int(self.chi) + b * int(self.sigma)
    }
}

impl From<&ManifoldClass> for Witness {
    fn from(m: &ManifoldClass) -> Self {
        Witness::new(m.name(), m.chi, m.sigma)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum End {
    Closed(Q),
    Open(Q),
    Infinite,
}

impl End {
    pub fn value(&self) -> Option<&Q> {
        match self {
            End::Closed(q) | End::Open(q) => Some(q),
            End::Infinite => None,
        }
    }
}

impl Serialize for End {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("End", 2)?;
        match self {
            End::Closed(q) => {
                st.serialize_field("kind", "closed")?;
                st.serialize_field("value", &fmt_q(q))?;
            }
            End::Open(q) => {
                st.serialize_field("kind", "open")?;
                st.serialize_field("value", &fmt_q(q))?;
            }
            End::Infinite => {
                st.serialize_field("kind", "infinite")?;
                st.serialize_field("value", &None::<String>)?;
            }
        }
        st.end()
    }
}

/// An interval on the b-axis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub lo: End,
    pub hi: End,
}

impl Interval {
    pub fn closed(lo: Q, hi: Q) -> Self {
        Interval { lo: End::Closed(lo), hi: End::Closed(hi) }
    }

    pub fn all() -> Self {
        Interval { lo: End::Infinite, hi: End::Infinite }
    }

    pub fn contains(&self, b: &Q) -> bool {
        let lo_ok = match &self.lo {
            End::Closed(q) => b >= q,
            End::Open(q) => b > q,
            End::Infinite => true,
        };
        let hi_ok = match &self.hi {
            End::Closed(q) => b <= q,
            End::Open(q) => b < q,
            End::Infinite => true,
        };
        lo_ok && hi_ok
    }

    fn validate(&self) -> Result<(), Error> {
        if let (Some(l), Some(h)) = (self.lo.value(), self.hi.value()) {
            let degenerate_ok = matches!((&self.lo, &self.hi), (End::Closed(_), End::Closed(_)));
            if l > h || (l == h && !degenerate_ok) {
                return Err(Error::InvalidParams(format!("empty interval {self}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lo {
            End::Closed(q) => write!(f, "[{}", fmt_q(q))?,
            End::Open(q) => write!(f, "({}", fmt_q(q))?,
            End::Infinite => write!(f, "(-inf")?,
        }
        match &self.hi {
            End::Closed(q) => write!(f, ", {}]", fmt_q(q)),
            End::Open(q) => write!(f, ", {})", fmt_q(q)),
            End::Infinite => write!(f, ", inf)"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceStatus {
    /// Minimum over a finite witness set: an upper bound for the true infimum.
    UpperEnvelope,
    /// Known value of the infimum.
    Exact,
    /// Value unknown; the affine function is only an upper bound.
    UnknownAtMost,
}

impl PieceStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PieceStatus::UpperEnvelope => "upper_envelope",
            PieceStatus::Exact => "exact",
            PieceStatus::UnknownAtMost => "unknown_at_most",
        }
    }
}

/// value(b) = p + q·b
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub p: i64,
    pub q: i64,
    pub label: String,
    pub status: PieceStatus,
}

impl Piece {
    pub fn at(&self, b: &Q) -> Q {
        int(self.p) + b * int(self.q)
    }

    fn same_line(&self, other: &Piece) -> bool {
        self.p == other.p && self.q == other.q
    }
}

/// A known value at a single point, e.g. an exact value inside an
/// otherwise bound-only table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointValue {
    #[serde(serialize_with = "ser_q")]
    pub b: Q,
    pub value: i64,
    pub label: String,
}

/// Piecewise-affine function of b on an interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnvelopeFn {
    pub domain: Interval,
    #[serde(serialize_with = "ser_qs")]
    pub breakpoints: Vec<Q>,
    pub pieces: Vec<Piece>,
    /// −∞ outside the domain (tables) instead of undefined (envelopes).
    pub neg_infinity_outside: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointValue>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn ser_qs<S: serde::Serializer>(qs: &[Q], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(qs.iter().map(fmt_q))
}

/// Result of evaluating an envelope at one b.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Finite { value: Q, status: PieceStatus, label: String },
    NegInfinity,
    Undefined,
}

impl Value {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            Value::Finite { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn status_str(&self) -> &'static str {
        match self {
            Value::Finite { status, .. } => status.as_str(),
            Value::NegInfinity => "neg_infinity",
            Value::Undefined => "undefined",
        }
    }
}

impl EnvelopeFn {
    /// Index of the piece active at b (left piece at a breakpoint).
    fn piece_index(&self, b: &Q) -> usize {
        self.breakpoints.iter().take_while(|x| *x < b).count()
    }

    pub fn eval(&self, b: &Q) -> Value {
        if !self.domain.contains(b) {
            return if self.neg_infinity_outside { Value::NegInfinity } else { Value::Undefined };
        }
        if let Some(pt) = self.points.iter().find(|p| &p.b == b) {
            return Value::Finite { value: int(pt.value), status: PieceStatus::Exact, label: pt.label.clone() };
        }
        let mut i = self.piece_index(b);
        // at a breakpoint prefer the piece with a determined value
        if i < self.breakpoints.len() && &self.breakpoints[i] == b && self.pieces[i].status == PieceStatus::UnknownAtMost {
            i += 1;
        }
        let piece = &self.pieces[i];
        Value::Finite { value: piece.at(b), status: piece.status, label: piece.label.clone() }
    }

    /// Same function on a sub-interval of the domain.
    pub fn restrict(&self, iv: &Interval) -> Result<EnvelopeFn, Error> {
        iv.validate()?;
        let inside = |e: &End| e.value().is_none_or(|q| self.domain.contains(q));
        let lo_in = match (&iv.lo, &self.domain.lo) {
            (End::Infinite, End::Infinite) => true,
            (End::Infinite, _) => false,
            (e, _) => inside(e) || matches!((e, &self.domain.lo), (End::Open(a), End::Closed(b) | End::Open(b)) if a == b),
        };
        let hi_in = match (&iv.hi, &self.domain.hi) {
            (End::Infinite, End::Infinite) => true,
            (End::Infinite, _) => false,
            (e, _) => inside(e) || matches!((e, &self.domain.hi), (End::Open(a), End::Closed(b) | End::Open(b)) if a == b),
        };
        if !lo_in || !hi_in {
            return Err(Error::OutOfRange(format!("{iv} is not inside the domain {}", self.domain)));
        }
        let first = iv.lo.value().map_or(0, |l| {
            let mut i = self.piece_index(l);
            if i < self.breakpoints.len() && &self.breakpoints[i] == l {
                i += 1;
            }
            i
        });
        let last = iv.hi.value().map_or(self.pieces.len() - 1, |h| self.piece_index(h));
        let last = last.max(first);
        Ok(EnvelopeFn {
            domain: iv.clone(),
            breakpoints: self.breakpoints[first..last].to_vec(),
            pieces: self.pieces[first..=last].to_vec(),
            neg_infinity_outside: self.neg_infinity_outside,
            points: self.points.iter().filter(|p| iv.contains(&p.b)).cloned().collect(),
            notes: self.notes.clone(),
        })
    }

    /// Breakpoints and affine pieces agree, ignoring labels and status.
    pub fn same_values(&self, other: &EnvelopeFn) -> bool {
        self.domain == other.domain
            && self.breakpoints == other.breakpoints
            && self.pieces.len() == other.pieces.len()
            && self.pieces.iter().zip(&other.pieces).all(|(a, b)| a.same_line(b))
    }

    /// `n` evenly spaced points from `from` to `to` inclusive.
    pub fn sample(&self, from: &Q, to: &Q, n: usize, exec: Exec) -> Vec<(Q, Value)> {
        let pts = sample_points(from, to, n);
        parallel::map(exec, &pts, |b| (b.clone(), self.eval(b)))
    }
}

pub fn sample_points(from: &Q, to: &Q, n: usize) -> Vec<Q> {
    match n {
        0 => Vec::new(),
        1 => vec![from.clone()],
        _ => {
            let step = (to - from) / int(n as i64 - 1);
            (0..n).map(|i| from + &step * int(i as i64)).collect()
        }
    }
}

/// Minimum over `ws` of χ + bσ on `iv`.
pub fn upper_envelope(ws: &[Witness], iv: &Interval) -> Result<EnvelopeFn, Error> {
    if ws.is_empty() {
        return Err(Error::EmptyWitnessSet);
    }
    iv.validate()?;
    // one line per slope, lowest intercept, first label on ties
    let mut lines: Vec<&Witness> = Vec::new();
    for w in ws {
        match lines.iter_mut().find(|l| l.sigma == w.sigma) {
            Some(l) if w.chi < l.chi => *l = w,
            Some(_) => {}
            None => lines.push(w),
        }
    }
    let mut active: &Witness = match iv.lo.value() {
        None => lines.iter().copied().max_by(|a, b| a.sigma.cmp(&b.sigma)).expect("nonempty"),
        Some(lo) => lines
            .iter()
            .copied()
            .min_by(|a, b| a.value(lo).cmp(&b.value(lo)).then(a.sigma.cmp(&b.sigma)))
            .expect("nonempty"),
    };
    let mut pieces = vec![active];
    let mut breakpoints: Vec<Q> = Vec::new();
    loop {
        let mut next: Option<(Q, &Witness)> = None;
        for l in &lines {
            if l.sigma >= active.sigma {
                continue;
            }
            let x = Q::new(BigInt::from(l.chi - active.chi), BigInt::from(active.sigma - l.sigma));
            if let Some(b0) = breakpoints.last().or(iv.lo.value()) {
                if &x <= b0 {
                    continue;
                }
            }
            let better = match &next {
                None => true,
                Some((nx, nl)) => x < *nx || (&x == nx && l.sigma < nl.sigma),
            };
            if better {
                next = Some((x, l));
            }
        }
        let Some((x, l)) = next else { break };
        if iv.hi.value().is_some_and(|h| &x >= h) {
            break;
        }
        breakpoints.push(x);
        pieces.push(l);
        active = l;
    }
    Ok(EnvelopeFn {
        domain: iv.clone(),
        breakpoints,
        pieces: pieces
            .into_iter()
            .map(|w| Piece { p: w.chi, q: w.sigma, label: w.label.clone(), status: PieceStatus::UpperEnvelope })
            .collect(),
        neg_infinity_outside: false,
        points: Vec::new(),
        notes: vec!["upper envelope over a finite witness set".into()],
    })
}

/// Slopes strictly decrease and adjacent pieces meet at each breakpoint.
///
/// Bound-only pieces are skipped, since they do not determine values.
pub fn concavity_check(f: &EnvelopeFn) -> bool {
    if f.pieces.len() != f.breakpoints.len() + 1 {
        return false;
    }
    if f.breakpoints.windows(2).any(|w| w[0] >= w[1]) {
        return false;
    }
    let determined: Vec<(Option<&Q>, Option<&Q>, &Piece)> = f
        .pieces
        .iter()
        .enumerate()
        .filter(|(_, p)| p.status != PieceStatus::UnknownAtMost)
        .map(|(i, p)| {
            let left = if i == 0 { None } else { Some(&f.breakpoints[i - 1]) };
            (left, f.breakpoints.get(i), p)
        })
        .collect();
    determined.windows(2).all(|w| {
        let (_, right, a) = w[0];
        let (left, _, b) = w[1];
        // only adjacent pieces share a breakpoint
        match (right, left) {
            (Some(r), Some(l)) if r == l => b.q < a.q && a.at(r) == b.at(r),
            _ => b.q < a.q,
        }
    })
}

/// Labeled functions from the trivial-group and ℤ⁶ discussions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableClass {
    SmoothTrivial,
    SymplecticTrivial,
    MinimalTrivial,
    #[serde(rename = "smooth_Z6")]
    SmoothZ6,
}

impl TableClass {
    pub const ALL: [TableClass; 4] =
        [TableClass::SmoothTrivial, TableClass::SymplecticTrivial, TableClass::MinimalTrivial, TableClass::SmoothZ6];

    pub fn as_str(self) -> &'static str {
        match self {
            TableClass::SmoothTrivial => "smooth_trivial",
            TableClass::SymplecticTrivial => "symplectic_trivial",
            TableClass::MinimalTrivial => "minimal_trivial",
            TableClass::SmoothZ6 => "smooth_Z6",
        }
    }
}

impl fmt::Display for TableClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TableClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        TableClass::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownTable(s.to_string()))
    }
}

fn piece(p: i64, q: i64, label: &str, status: PieceStatus) -> Piece {
    Piece { p, q, label: label.into(), status }
}

/// The known functions b ↦ f(1, b), with unknown stretches as bound-only
/// pieces and −∞ outside the domain.
pub fn known_table(class: TableClass) -> EnvelopeFn {
    use PieceStatus::{Exact, UnknownAtMost};
    let (domain, breakpoints, pieces, points, notes): (Interval, Vec<Q>, Vec<Piece>, Vec<PointValue>, Vec<&str>) = match class {
        TableClass::SmoothTrivial => (
            Interval::closed(int(-1), int(1)),
            vec![],
            vec![piece(2, 0, "S4", Exact)],
            vec![],
            vec!["S4 minimizes for |b| <= 1; blow-ups and CP2 sums are unbounded outside"],
        ),
        TableClass::SymplecticTrivial => (
            Interval::closed(frac(-10, 3), int(1)),
            vec![int(-1)],
            vec![piece(3, 1, "CP2", UnknownAtMost), piece(3, 1, "CP2", Exact)],
            vec![],
            vec!["unknown but at most b+3 on [-10/3, -1)", "unbounded for b < -10/3 by the Stipsicz ray"],
        ),
        TableClass::MinimalTrivial => (
            Interval::closed(frac(-10, 3), frac(3, 2)),
            vec![int(-1), int(1)],
            vec![piece(3, 1, "CP2", UnknownAtMost), piece(3, 1, "CP2", Exact), piece(12, -8, "E1", Exact)],
            vec![],
            vec![
                "at most b+3 for b < -1",
                "unbounded for b > 3/2 by repeated K3 fiber sums",
                "E1 value realized in the minimal class by Dolgachev surfaces",
            ],
        ),
        TableClass::SmoothZ6 => (
            Interval::closed(int(-1), int(1)),
            vec![int(0)],
            vec![piece(6, 2, "Sym2(3)-bar", UnknownAtMost), piece(6, -2, "Sym2(3)", UnknownAtMost)],
            vec![PointValue { b: int(0), value: 6, label: "Sym2(3)".into() }],
            vec!["equality on both sides holds iff chi + sigma >= 4 for every smooth manifold with this group (open)"],
        ),
    };
    EnvelopeFn {
        domain,
        breakpoints,
        pieces,
        neg_infinity_outside: true,
        points,
        notes: notes.into_iter().map(String::from).collect(),
    }
}

/// A repeatable change of (χ, σ) preserving the class and the group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Move {
    pub label: String,
    pub delta_chi: i64,
    pub delta_sigma: i64,
    pub repeatable: bool,
}

impl Move {
    pub fn new(label: &str, delta_chi: i64, delta_sigma: i64) -> Self {
        Move { label: label.into(), delta_chi, delta_sigma, repeatable: true }
    }

    pub fn blow_up() -> Self {
        Move::new("blow-up", 1, -1)
    }

    pub fn cp2_sum() -> Self {
        Move::new("CP2 sum", 1, 1)
    }

    pub fn k3_fiber_sum() -> Self {
        Move::new("K3 fiber sum", 24, -16)
    }
}

/// coef_a·a + coef_b·b ≥ 0 (or > 0 when open).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HalfPlane {
    pub coef_a: i64,
    pub coef_b: i64,
    pub closed: bool,
    pub label: String,
}

/// What a half-plane says about b on the slice a = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BLimit {
    AtMost(Q),
    AtLeast(Q),
    Below(Q),
    Above(Q),
    Always,
    Never,
}

impl HalfPlane {
    pub fn contains(&self, a: &Q, b: &Q) -> bool {
        let v = a * int(self.coef_a) + b * int(self.coef_b);
        if self.closed {
            !v.is_negative()
        } else {
            v.is_positive()
        }
    }

    pub fn at_a1(&self) -> BLimit {
        let (ca, cb) = (self.coef_a, self.coef_b);
        if cb == 0 {
            let ok = if self.closed { ca >= 0 } else { ca > 0 };
            return if ok { BLimit::Always } else { BLimit::Never };
        }
        let x = frac(-ca, cb);
        match (cb > 0, self.closed) {
            (true, true) => BLimit::AtLeast(x),
            (true, false) => BLimit::Above(x),
            (false, true) => BLimit::AtMost(x),
            (false, false) => BLimit::Below(x),
        }
    }
}

fn term(c: i64, v: &str, first: bool) -> String {
    let sign = if c < 0 { "-" } else if first { "" } else { "+" };
    let mag = c.unsigned_abs();
    let body = if mag == 1 { v.to_string() } else { format!("{mag}{v}") };
    if first {
        format!("{sign}{body}")
    } else {
        format!(" {sign} {body}")
    }
}

impl fmt::Display for HalfPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.closed { ">=" } else { ">" };
        let (ca, cb) = (self.coef_a, self.coef_b);
        let g = ca.gcd(&cb).max(1);
        let (ca, cb) = (ca / g, cb / g);
        match (ca, cb) {
            (0, 0) => write!(f, "0 {op} 0"),
            (0, _) => write!(f, "{} {op} 0", term(cb, "b", true)),
            (_, 0) => write!(f, "{} {op} 0", term(ca, "a", true)),
            // a·ca ≥ −cb·b with ca = 1 reads "a >= ±kb"
            (1, _) => write!(f, "a {op} {}", term(-cb, "b", true)),
            (-1, _) => write!(f, "{} {op} a", term(cb, "b", true)),
            _ => write!(f, "{}{} {op} 0", term(ca, "a", true), term(cb, "b", false)),
        }
    }
}

/// For each repeatable move, aχ + bσ is bounded on its orbit only if
/// a·Δχ + b·Δσ ≥ 0.
pub fn unbounded_directions(moves: &[Move]) -> Vec<HalfPlane> {
    moves
        .iter()
        .filter(|m| m.repeatable)
        .map(|m| HalfPlane { coef_a: m.delta_chi, coef_b: m.delta_sigma, closed: true, label: m.label.clone() })
        .collect()
}

/// A cone of (a, b) given by half-planes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeDomain {
    pub constraints: Vec<HalfPlane>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ConeDomain {
    pub fn contains(&self, a: &Q, b: &Q) -> bool {
        self.constraints.iter().all(|h| h.contains(a, b))
    }

    /// Smooth manifolds with any group: a ≥ |b|.
    pub fn smooth() -> Self {
        ConeDomain { constraints: unbounded_directions(&[Move::blow_up(), Move::cp2_sum()]), notes: Vec::new() }
    }

    /// Symplectic manifolds: b ≤ a, a ≥ 0; the other edge is unknown.
    pub fn symplectic() -> Self {
        let mut constraints = unbounded_directions(&[Move::blow_up()]);
        constraints.push(HalfPlane { coef_a: 1, coef_b: 0, closed: true, label: "large signature".into() });
        ConeDomain { constraints, notes: vec!["second edge at an unknown angle theta_G in [-pi/2, -pi/4]".into()] }
    }

    /// Minimal symplectic manifolds: b ≤ 3a/2 and a ≥ −b are known to lie
    /// inside; the lower edge is unknown.
    pub fn minimal() -> Self {
        ConeDomain {
            constraints: unbounded_directions(&[Move::k3_fiber_sum()]),
            notes: vec!["contains the cone over [-1, 3/2]; the lower edge is unknown".into()],
        }
    }

    /// Positive combinations of sampled members stay inside, which holds
    /// for any intersection of half-planes through the origin.
    pub fn is_convex_cone_on_grid(&self, steps: i64) -> bool {
        let mut members = Vec::new();
        for i in -steps..=steps {
            for j in -steps..=steps {
                let (a, b) = (frac(i, steps), frac(j, steps));
                if self.contains(&a, &b) {
                    members.push((a, b));
                }
            }
        }
        for (x, y) in members.iter().zip(members.iter().rev()) {
            let (a, b) = (&x.0 + &y.0, &x.1 + &y.1);
            if !self.contains(&a, &b) || !self.contains(&(&x.0 * int(3)), &(&x.1 * int(3))) {
                return false;
            }
        }
        true
    }
}

/// Symbolic witness sequences with a known boundedness predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sequence {
    /// M_k = 2k² CP2bar # (k² − k) S2xS2.
    Mk,
    /// Simply connected symplectic manifolds along the direction (10, 3).
    StipsiczRay,
}

impl FromStr for Sequence {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "m_k" | "mk" | "stipsicz_mk" => Ok(Sequence::Mk),
            "stipsicz_ray" | "ray" | "stipsicz" => Ok(Sequence::StipsiczRay),
            _ => Err(Error::UnregisteredSequence(s.to_string())),
        }
    }
}

impl Sequence {
    /// (χ, σ) of the k-th member, k ≥ 1. The ray is modeled by its
    /// direction from CP2.
    pub fn member(self, k: u64) -> (i64, i64) {
        let k = k as i64;
        match self {
            Sequence::Mk => (2 + 4 * k * k - 2 * k, -2 * k * k),
            Sequence::StipsiczRay => (3 + 10 * k, 1 + 3 * k),
        }
    }

    /// The k-th member as an explicit construction where one exists.
    pub fn construct(self, k: u64) -> Option<ManifoldClass> {
        match self {
            Sequence::Mk => stipsicz_member(k).ok(),
            Sequence::StipsiczRay => None,
        }
    }
}

/// Whether aχ + bσ is bounded below along the sequence.
pub fn sequence_bounded(seq: Sequence, a: &Q, b: &Q) -> bool {
    match seq {
        Sequence::Mk => {
            let two_a = a * int(2);
            two_a > *b || (two_a == *b && !a.is_positive())
        }
        Sequence::StipsiczRay => !(a * int(10) + b * int(3)).is_negative(),
    }
}

/// Scales (a, b) to coprime integers with the same ratio and signs.
fn integer_direction(a: &Q, b: &Q) -> (i128, i128) {
    let l = a.denom().lcm(b.denom());
    let ai = (a * Q::from_integer(l.clone())).to_integer();
    let bi = (b * Q::from_integer(l)).to_integer();
    let to = |x: BigInt| x.to_i128().expect("grid values are small");
    (to(ai), to(bi))
}

/// Empirical probe over 1 ≤ k ≤ `kmax`: reports unbounded when the running
/// minimum is still being lowered at the last step.
pub fn empirical_bounded(seq: Sequence, a: &Q, b: &Q, kmax: u64) -> bool {
    let (ai, bi) = integer_direction(a, b);
    let v = |k: u64| {
        let (chi, sigma) = seq.member(k);
        ai * chi as i128 + bi * sigma as i128
    };
    let mut min = v(1);
    let mut prev = min;
    let mut falling = false;
    for k in 2..=kmax.max(2) {
        let cur = v(k);
        falling = cur < prev && cur < min;
        min = min.min(cur);
        prev = cur;
    }
    !falling
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_q;

    fn q(s: &str) -> Q {
        parse_q(s).unwrap()
    }

    fn lines(f: &EnvelopeFn) -> Vec<(i64, i64)> {
        f.pieces.iter().map(|p| (p.p, p.q)).collect()
    }

    #[test]
    fn cp2_e1_envelope() {
        let ws = [Witness::new("CP2", 3, 1), Witness::new("E1", 12, -8)];
        let f = upper_envelope(&ws, &Interval::closed(q("-1"), q("3/2"))).unwrap();
        assert_eq!(f.breakpoints, vec![q("1")]);
        assert_eq!(lines(&f), vec![(3, 1), (12, -8)]);
        assert_eq!(f.eval(&q("1")).finite(), Some(&q("4")));
        assert!(concavity_check(&f));
        let table = known_table(TableClass::MinimalTrivial).restrict(&Interval::closed(q("-1"), q("3/2"))).unwrap();
        assert!(f.same_values(&table));
    }

    #[test]
    fn envelope_examples() {
        let f = upper_envelope(&[Witness::new("S4", 2, 0)], &Interval::closed(q("-1"), q("1"))).unwrap();
        assert!(f.breakpoints.is_empty());
        assert_eq!(f.eval(&q("1/3")).finite(), Some(&q("2")));

        let s3 = Witness::new("Sym2(3)", 6, -2);
        let f = upper_envelope(&[s3.clone(), s3.reversed()], &Interval::closed(q("-1"), q("1"))).unwrap();
        assert_eq!(lines(&f), vec![(6, 2), (6, -2)]);
        assert_eq!(f.breakpoints, vec![q("0")]);
        for b in ["-1", "-1/2", "0", "1/2", "1"] {
            let v = q(b);
            assert_eq!(f.eval(&v).finite(), Some(&(q("6") - v.abs() * q("2"))));
        }
        assert_eq!(upper_envelope(&[], &Interval::all()), Err(Error::EmptyWitnessSet));
    }

    #[test]
    fn envelope_on_the_whole_line() {
        let ws = [Witness::new("A", 0, 1), Witness::new("B", 0, -1), Witness::new("C", 5, 0)];
        let f = upper_envelope(&ws, &Interval::all()).unwrap();
        assert_eq!(lines(&f), vec![(0, 1), (0, -1)]);
        assert!(concavity_check(&f));
    }

    #[test]
    fn concavity_controls() {
        let mut f = known_table(TableClass::MinimalTrivial);
        assert!(concavity_check(&f));
        f.pieces[2] = piece(-4, 8, "x", PieceStatus::Exact);
        assert!(!concavity_check(&f));
    }

    #[test]
    fn tables() {
        let s = known_table(TableClass::SmoothTrivial);
        assert_eq!(s.eval(&q("0")).finite(), Some(&q("2")));
        assert_eq!(s.eval(&q("2")), Value::NegInfinity);
        let y = known_table(TableClass::SymplecticTrivial);
        match y.eval(&q("-2")) {
            Value::Finite { value, status, .. } => {
                assert_eq!(value, q("1"));
                assert_eq!(status, PieceStatus::UnknownAtMost);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(y.eval(&q("-4")), Value::NegInfinity);
        let z6 = known_table(TableClass::SmoothZ6);
        assert!(matches!(z6.eval(&q("0")), Value::Finite { status: PieceStatus::Exact, .. }));
        assert!(matches!(z6.eval(&q("1/2")), Value::Finite { status: PieceStatus::UnknownAtMost, .. }));
        assert!("smooth_z6".parse::<TableClass>().is_ok());
        assert!("bogus".parse::<TableClass>().is_err());
    }

    #[test]
    fn moves_and_cones() {
        let hs = unbounded_directions(&[Move::blow_up(), Move::cp2_sum(), Move::k3_fiber_sum()]);
        assert_eq!(hs[0].to_string(), "a >= b");
        assert_eq!(hs[1].to_string(), "a >= -b");
        assert_eq!(hs[2].at_a1(), BLimit::AtMost(q("3/2")));
        let smooth = ConeDomain::smooth();
        assert!(smooth.contains(&q("1"), &q("-1")) && !smooth.contains(&q("1"), &q("2")));
        for c in [ConeDomain::smooth(), ConeDomain::symplectic(), ConeDomain::minimal()] {
            assert!(c.is_convex_cone_on_grid(6));
        }
    }

    #[test]
    fn mk_sequence() {
        assert!(!sequence_bounded(Sequence::Mk, &q("1"), &q("2")));
        assert!(sequence_bounded(Sequence::Mk, &q("-1"), &q("-2")));
        assert!(sequence_bounded(Sequence::Mk, &q("1"), &q("0")));
        assert!(!sequence_bounded(Sequence::StipsiczRay, &q("1"), &q("-4")));
        assert!(sequence_bounded(Sequence::StipsiczRay, &q("3"), &q("-10")));
        for k in 1..6 {
            let m = Sequence::Mk.construct(k).unwrap();
            assert_eq!((m.chi, m.sigma), Sequence::Mk.member(k));
        }
        assert!("nope".parse::<Sequence>().is_err());
        assert!(empirical_bounded(Sequence::Mk, &q("1"), &q("1"), 1000));
        assert!(!empirical_bounded(Sequence::Mk, &q("1"), &q("2"), 1000));
    }

    #[test]
    fn restrict_and_sample() {
        let t = known_table(TableClass::MinimalTrivial);
        let r = t.restrict(&Interval::closed(q("0"), q("3/2"))).unwrap();
        assert_eq!(r.breakpoints, vec![q("1")]);
        assert!(t.restrict(&Interval::closed(q("0"), q("2"))).is_err());
        let s = t.sample(&q("-1"), &q("3/2"), 11, Exec::Sequential);
        assert_eq!(s.len(), 11);
        assert_eq!(s[8].0, q("1"));
        assert_eq!(s[8].1.finite(), Some(&q("4")));
        assert_eq!(s, t.sample(&q("-1"), &q("3/2"), 11, Exec::Parallel));
    }
}
