//! Lower and upper bounds on χ and χ + σ over symplectic manifolds with a
//! given fundamental group, assembled into cited reports.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::linalg::AbelianInvariants;
use crate::manifold::{
    atomic, odd_rank_construct, theorem2_construct, z3_construct, Atom, Expr, ManifoldClass, Monodromy, Pi1, Tri,
};
use crate::parallel::{self, Exec};
use crate::presentation::{surface_relator, Presentation, Word};

/// The functional being minimized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    Chi,
    ChiPlusSigma,
}

impl Target {
    fn of(self, chi: i64, sigma: i64) -> i64 {
        match self {
            Target::Chi => chi,
            Target::ChiPlusSigma => chi + sigma,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Chi => "chi",
            Target::ChiPlusSigma => "chi+sigma",
        })
    }
}

impl FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().replace(' ', "").as_str() {
            "chi" => Ok(Target::Chi),
            "chi+sigma" | "chi_plus_sigma" => Ok(Target::ChiPlusSigma),
            _ => Err(Error::InvalidParams(format!("unknown target `{s}` (expected chi or chi+sigma)"))),
        }
    }
}

impl Serialize for Target {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn binom2(n: u64) -> i64 {
    (n * n.saturating_sub(1) / 2) as i64
}

/// χ ≥ 2 − 2b₁ + b₂ from comparing Betti numbers with K(G,1).
pub fn hopf_lower(b1: u64, b2: u64) -> i64 {
    2 - 2 * b1 as i64 + b2 as i64
}

/// χ + σ ≥ 4 − 2b₁ (b₁ even) or 6 − 2b₁ (b₁ odd) for symplectic manifolds.
pub fn chi_sigma_lower(b1: u64) -> i64 {
    let b = b1 as i64;
    if b1.is_even() {
        4 - 2 * b
    } else {
        6 - 2 * b
    }
}

/// (χ, σ) of the fibered construction for a presentation with `g`
/// generators and `r` relators.
pub fn thm1_upper(g: u64, r: u64) -> (i64, i64) {
    let k = (g + r + 1) as i64;
    (12 * k, -8 * k)
}

/// (χ, σ) of the surface-curve construction with `r` curves whose union
/// has `edges` edges; the spin variant doubles both.
pub fn gompf_upper(r: u64, edges: u64, spin: bool) -> (i64, i64) {
    let k = (r + 2 * edges + 1) as i64;
    if spin {
        (24 * k, -16 * k)
    } else {
        (12 * k, -8 * k)
    }
}

/// χ upper bound k + ℓ(g + r) from summing with hypothetical pieces of Euler
/// characteristic k (killing two generators) and ℓ (killing one).
///
/// Values below the best known pieces (k < 6 or ℓ < 12) are refused unless
/// `hypothetical` is set.
pub fn corvague_upper(k: u64, l: u64, g: u64, r: u64, hypothetical: bool) -> Result<i64, Error> {
    if !hypothetical && (k < 6 || l < 12) {
        return Err(Error::OutOfRange(format!(
            "k={k}, l={l}: needs k >= 6 and l >= 12 unless marked hypothetical"
        )));
    }
    Ok(k as i64 + l as i64 * (g + r) as i64)
}

/// Lower bound on χ for symplectic manifolds with π₁ = ℤⁿ.
pub fn free_abelian_chi_lower(n: u64) -> i64 {
    match n {
        0 => 3,
        1 => 2,
        3 => 3,
        5 => 7,
        _ => {
            let base = 2 - 2 * n as i64 + binom2(n);
            if matches!(n % 8, 1 | 4) {
                base
            } else {
                base + 1
            }
        }
    }
}

/// Groups with family-specific bounds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupFamily {
    Trivial,
    Free(u64),
    Cyclic(u64),
    FreeAbelian(u64),
    SurfaceGroup(u64),
    /// ℤ^rank ⊕ ℤ/t₁ ⊕ ... in invariant-factor form, not covered above.
    AbelianSum { rank: u64, torsion: Vec<u64> },
}

impl GroupFamily {
    /// Canonical member, so that e.g. ℤ/1 is trivial and ℤ¹ is `Free(1)`.
    pub fn normalized(self) -> Self {
        match self {
            GroupFamily::Free(0) | GroupFamily::Cyclic(1) | GroupFamily::FreeAbelian(0) | GroupFamily::SurfaceGroup(0) => {
                GroupFamily::Trivial
            }
            GroupFamily::Cyclic(0) | GroupFamily::FreeAbelian(1) => GroupFamily::Free(1),
            GroupFamily::SurfaceGroup(1) => GroupFamily::FreeAbelian(2),
            GroupFamily::AbelianSum { rank, torsion } => {
                let mut orders = torsion;
                orders.extend(std::iter::repeat(0).take(rank as usize));
                Self::from_abelian(&AbelianInvariants::from_cyclic_orders(&orders))
            }
            other => other,
        }
    }

    pub fn from_abelian(inv: &AbelianInvariants) -> Self {
        let torsion = inv.torsion_u64().unwrap_or_default();
        let rank = inv.rank as u64;
        match (rank, torsion.as_slice()) {
            (0, []) => GroupFamily::Trivial,
            (1, []) => GroupFamily::Free(1),
            (n, []) => GroupFamily::FreeAbelian(n),
            (0, [t]) => GroupFamily::Cyclic(*t),
            _ => GroupFamily::AbelianSum { rank, torsion },
        }
    }

    pub fn b1(&self) -> u64 {
        match self {
            GroupFamily::Trivial | GroupFamily::Cyclic(_) => 0,
            GroupFamily::Free(n) | GroupFamily::FreeAbelian(n) => *n,
            GroupFamily::SurfaceGroup(g) => 2 * g,
            GroupFamily::AbelianSum { rank, .. } => *rank,
        }
    }

    /// Rational b₂ of K(G,1).
    pub fn b2(&self) -> u64 {
        match self {
            GroupFamily::Trivial | GroupFamily::Cyclic(_) | GroupFamily::Free(_) => 0,
            GroupFamily::FreeAbelian(n) | GroupFamily::AbelianSum { rank: n, .. } => binom2(*n) as u64,
            GroupFamily::SurfaceGroup(_) => 1,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            GroupFamily::Trivial => "trivial",
            GroupFamily::Free(_) => "free",
            GroupFamily::Cyclic(_) => "cyclic",
            GroupFamily::FreeAbelian(_) => "free_abelian",
            GroupFamily::SurfaceGroup(_) => "surface",
            GroupFamily::AbelianSum { .. } => "abelian_sum",
        }
    }

    /// The family in the spec mini-language (`zn:6`, `gpf:2,4,inf`, ...).
    pub fn spec(&self) -> String {
        match self {
            GroupFamily::Trivial => "trivial".into(),
            GroupFamily::Free(n) => format!("free:{n}"),
            GroupFamily::Cyclic(n) => format!("cyclic:{n}"),
            GroupFamily::FreeAbelian(n) => format!("zn:{n}"),
            GroupFamily::SurfaceGroup(g) => format!("surface:{g}"),
            GroupFamily::AbelianSum { rank, torsion } => {
                let mut parts: Vec<String> = torsion.iter().map(u64::to_string).collect();
                parts.extend(std::iter::repeat("inf".to_string()).take(*rank as usize));
                format!("gpf:{}", parts.join(","))
            }
        }
    }

    /// (generators, relators) of the standard presentation.
    pub fn standard_size(&self) -> (u64, u64) {
        match self {
            GroupFamily::Trivial => (0, 0),
            GroupFamily::Free(n) => (*n, 0),
            GroupFamily::Cyclic(_) => (1, 1),
            GroupFamily::FreeAbelian(n) => (*n, binom2(*n) as u64),
            GroupFamily::SurfaceGroup(g) => (2 * g, 1),
            GroupFamily::AbelianSum { rank, torsion } => {
                let k = rank + torsion.len() as u64;
                (k, binom2(k) as u64 + torsion.len() as u64)
            }
        }
    }
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupFamily::Trivial => write!(f, "1"),
            GroupFamily::Free(1) => write!(f, "Z"),
            GroupFamily::Free(n) => write!(f, "F{n}"),
            GroupFamily::Cyclic(n) => write!(f, "Z/{n}"),
            GroupFamily::FreeAbelian(n) => write!(f, "Z^{n}"),
            GroupFamily::SurfaceGroup(g) => write!(f, "pi1(Sigma_{g})"),
            GroupFamily::AbelianSum { rank, torsion } => {
                let inv = AbelianInvariants {
                    rank: *rank as usize,
                    torsion: torsion.iter().map(|&t| t.into()).collect(),
                };
                write!(f, "{inv}")
            }
        }
    }
}

impl FromStr for GroupFamily {
    type Err = Error;

    /// `trivial`, `free:n`, `cyclic:n`, `zn:n`, `surface:g`, or
    /// `gpf:k,l,...` where `inf` or `0` stands for ℤ.
    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        let unknown = || Error::UnknownFamily(t.to_string());
        if t.eq_ignore_ascii_case("trivial") {
            return Ok(GroupFamily::Trivial);
        }
        let (head, arg) = t.split_once(':').ok_or_else(unknown)?;
        let num = |a: &str| -> Result<u64, Error> {
            a.trim().parse::<u64>().map_err(|_| Error::InvalidParams(format!("`{a}` is not a nonnegative integer in `{t}`")))
        };
        let fam = match head.trim().to_ascii_lowercase().as_str() {
            "free" => GroupFamily::Free(num(arg)?),
            "cyclic" => GroupFamily::Cyclic(num(arg)?),
            "zn" => GroupFamily::FreeAbelian(num(arg)?),
            "surface" => GroupFamily::SurfaceGroup(num(arg)?),
            "gpf" => {
                let mut rank = 0;
                let mut torsion = Vec::new();
                for part in arg.split(',') {
                    let p = part.trim();
                    if p.eq_ignore_ascii_case("inf") || p == "0" {
                        rank += 1;
                    } else {
                        torsion.push(num(p)?);
                    }
                }
                GroupFamily::AbelianSum { rank, torsion }
            }
            _ => return Err(unknown()),
        };
        Ok(fam.normalized())
    }
}

impl Serialize for GroupFamily {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GroupFamily", 5)?;
        st.serialize_field("tag", self.tag())?;
        st.serialize_field("spec", &self.spec())?;
        st.serialize_field("group", &self.to_string())?;
        st.serialize_field("b1", &self.b1())?;
        st.serialize_field("b2", &self.b2())?;
        st.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Proven,
    /// Depends on an unproven conjecture; only emitted on request.
    Conjectural,
    /// Uses inputs below the best known values; only emitted on request.
    Hypothetical,
}

/// One bound with its justification.
#[derive(Clone, Debug, Serialize)]
pub struct Contribution {
    pub name: String,
    pub side: Side,
    pub value: i64,
    pub citation: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ManifoldClass>,
}

/// Options that admit non-proven contributions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BoundOptions {
    /// Include the bounds that follow from the BMY inequality.
    pub assume_bmy: bool,
}

/// Layered bounds for one group and one target.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub target: Target,
    pub group: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<GroupFamily>,
    pub lower: Option<i64>,
    pub upper: Option<i64>,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub congruence: Option<Congruence>,
    pub contributions: Vec<Contribution>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub caveats: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Congruence {
    pub modulus: i64,
    pub residue: i64,
}

struct Builder {
    target: Target,
    contributions: Vec<Contribution>,
    caveats: Vec<String>,
}

impl Builder {
    fn new(target: Target) -> Self {
        Builder { target, contributions: Vec::new(), caveats: Vec::new() }
    }

    fn add(&mut self, side: Side, name: &str, value: i64, citation: &str) {
        self.contributions.push(Contribution {
            name: name.into(),
            side,
            value,
            citation: citation.into(),
            status: Status::Proven,
            witness: None,
        });
    }

    fn lower(&mut self, name: &str, value: i64, citation: &str) {
        self.add(Side::Lower, name, value, citation);
    }

    fn upper(&mut self, name: &str, value: i64, citation: &str) {
        self.add(Side::Upper, name, value, citation);
    }

    fn witness(&mut self, name: &str, m: ManifoldClass, citation: &str) {
        let value = self.target.of(m.chi, m.sigma);
        self.add(Side::Upper, name, value, citation);
        self.contributions.last_mut().expect("just pushed").witness = Some(m);
    }

    fn conjectural(&mut self, side: Side, name: &str, value: i64, citation: &str) {
        self.add(side, name, value, citation);
        self.contributions.last_mut().expect("just pushed").status = Status::Conjectural;
    }

    fn thm1(&mut self, g: u64, r: u64) {
        let (chi, sigma) = thm1_upper(g, r);
        let cite = "fibered construction over a finite-order surface rotation: chi = 12(g+r+1)";
        self.upper(&format!("presentation construction (g={g}, r={r})"), self.target.of(chi, sigma), cite);
    }

    fn generic(&mut self, b1: u64, b2: Option<u64>) {
        match self.target {
            Target::Chi => {
                self.lower(
                    "Betti comparison with K(G,1)",
                    hopf_lower(b1, b2.unwrap_or(0)),
                    "b2(M) >= b2(K(G,1)): chi >= 2 - 2 b1(G) + b2(G)",
                );
                let b_plus_min = if b1.is_even() { 1 } else { 2 };
                self.lower(
                    "b+ >= 1 with ASD parity",
                    2 - 2 * b1 as i64 + b_plus_min,
                    "symplectic forms give b+ >= 1; 1 - b1 + b+ is even",
                );
            }
            Target::ChiPlusSigma => {
                self.lower(
                    "chi+sigma parity bound",
                    chi_sigma_lower(b1),
                    "chi + sigma = 2 - 2 b1 + 2 b+ with b+ >= 1 and 1 - b1 + b+ even",
                );
            }
        }
    }

    fn finish(self, group: String, family: Option<GroupFamily>) -> Result<BoundReport, Error> {
        let congruence = (self.target == Target::ChiPlusSigma).then_some(Congruence { modulus: 4, residue: 0 });
        let mut contributions = self.contributions;
        let best = |side: Side, cs: &[Contribution]| {
            let vals = cs.iter().filter(|c| c.side == side).map(|c| c.value);
            match side {
                Side::Lower => vals.max(),
                Side::Upper => vals.min(),
            }
        };
        if let Some(c) = congruence {
            let lo = best(Side::Lower, &contributions);
            if let Some(lo) = lo {
                let up = lo + (c.residue - lo).rem_euclid(c.modulus);
                if up != lo {
                    contributions.push(Contribution {
                        name: "congruence rounding".into(),
                        side: Side::Lower,
                        value: up,
                        citation: "chi + sigma = 2(1 - b1 + b+) is divisible by 4".into(),
                        status: Status::Proven,
                        witness: None,
                    });
                }
            }
        }
        let lower = best(Side::Lower, &contributions);
        let upper = best(Side::Upper, &contributions);
        if let (Some(l), Some(u)) = (lower, upper) {
            if l > u {
                return Err(Error::Invariant(format!("{group}: {} lower bound {l} exceeds upper bound {u}", self.target)));
            }
        }
        Ok(BoundReport {
            target: self.target,
            group,
            family,
            lower,
            upper,
            exact: matches!((lower, upper), (Some(l), Some(u)) if l == u),
            congruence,
            contributions,
            caveats: self.caveats,
        })
    }
}

impl BoundReport {
    /// Contributions attaining the reported upper bound with a witness.
    pub fn upper_witnesses(&self) -> Vec<&ManifoldClass> {
        self.contributions
            .iter()
            .filter(|c| c.side == Side::Upper && Some(c.value) == self.upper)
            .filter_map(|c| c.witness.as_ref())
            .collect()
    }

    pub fn witnesses(&self) -> impl Iterator<Item = &ManifoldClass> {
        self.contributions.iter().filter_map(|c| c.witness.as_ref())
    }
}

/// A record for a manifold known from the literature whose construction is
/// not modeled here.
fn cited_class(label: &str, chi: i64, sigma: i64, pi1: Pi1, minimal: Tri) -> ManifoldClass {
    let b1 = pi1.b1();
    ManifoldClass {
        expr: Expr {
            op: "atom".into(),
            label: label.into(),
            params: serde_json::Value::Null,
            children: Vec::new(),
            chi,
            sigma,
            pi1_effect: format!("pi1 = {pi1}"),
        },
        chi,
        sigma,
        b1,
        b_plus: crate::manifold::b_plus_from_identity(chi, sigma, b1),
        spin: Tri::Unknown,
        minimal,
        symplectic: true,
        pi1,
        tori: Vec::new(),
        notes: vec!["cited construction; invariants recorded, not derived".into()],
    }
}

fn atom(a: Atom) -> Result<ManifoldClass, Error> {
    atomic(a)
}

/// Bounds for a recognized family.
pub fn family_report(f: &GroupFamily, target: Target, opts: BoundOptions) -> Result<BoundReport, Error> {
    let f = f.clone().normalized();
    let mut b = Builder::new(target);
    let (g, r) = f.standard_size();
    b.generic(f.b1(), Some(f.b2()));
    b.thm1(g, r);
    let chi_target = target == Target::Chi;

    match &f {
        GroupFamily::Trivial => {
            if chi_target {
                b.lower("b+ >= 1, odd", 3, "chi = 2 + b2 >= 2 + b+ >= 3");
            }
            b.witness("complex projective plane", atom(Atom::CP2)?, "CP2 is Kaehler with chi = 3, sigma = 1");
            b.witness("rational elliptic surface", atom(Atom::E1)?, "E(1): chi = 12, sigma = -8");
        }
        GroupFamily::Free(n) => {
            let n = *n;
            let e = (n % 2) as i64;
            let ni = n as i64;
            if chi_target {
                b.lower("free group parity bound", 3 - 2 * ni + e, "chi = 2 - 2n + b+ + b- with b+ >= 1, b+ even for n odd");
                let kot = num_integer::Integer::div_ceil(&(6 * (1 - ni)), &5);
                b.lower("2chi + 3sigma >= 0 refinement", kot, "minimal models satisfy 2chi + 3sigma >= 0, giving chi >= 6(1-n)/5");
            } else {
                b.lower("free group parity bound", 4 - 2 * ni + 2 * e, "chi + sigma = 2 - 2n + 2b+ with b+ >= 1, b+ even for n odd");
            }
            b.witness(
                "Dehn-twist mapping torus summed with E(1)",
                theorem2_construct(n as usize, &Monodromy::dehn_twists(n as usize))?,
                "coinvariants of twists along y_1..y_n form the free group on x_1..x_n",
            );
            if n == 1 {
                b.witness("torus-complement Z manifold", atom(Atom::LemmaK)?, "chi = 12, sigma = -8, pi1 = Z");
            }
        }
        GroupFamily::Cyclic(n) => {
            let n = *n;
            if chi_target {
                b.lower("finite group, b+ >= 1", 3, "chi = 2 + b2 >= 2 + b+ >= 3");
            }
            b.witness(
                "torus bundle with monodromy [[0,1],[-1,2-n]] summed with E(1)",
                theorem2_construct(1, &Monodromy::cyclic(n as i64))?,
                "H - I has Smith form diag(1, n)",
            );
            b.witness(
                &format!("log transforms of multiplicities ({n},{n}) on E(1)"),
                atom(Atom::Dolgachev(n, n))?,
                "pi1 = Z/gcd(p,q), chi = 12, sigma = -8",
            );
            let surface = match n {
                5 | 8 => Some(10),
                2 | 4 => Some(11),
                _ => None,
            };
            if let Some(chi) = surface {
                let sigma = 4 - chi;
                b.witness(
                    &format!("complex projective surface with pi1 = Z/{n}"),
                    cited_class(&format!("complex_surface(Z/{n}, chi={chi})"), chi, sigma, Pi1::Cyclic(n), Tri::Unknown),
                    "known smooth projective surface with chi + sigma = 4",
                );
            }
        }
        GroupFamily::FreeAbelian(n) => {
            let n = *n;
            if chi_target {
                let cite = match n {
                    3 => "intersection form has a 3-dimensional metabolizer; b+ even",
                    5 => "intersection form has a 7-dimensional metabolizer",
                    _ if matches!(n % 8, 1 | 4) => "H2(T^n) injects; even-form analysis leaves equality possible when n = 1, 4 mod 8",
                    _ => "H2(T^n) injects; equality would force an even form, impossible unless n = 1, 4 mod 8",
                };
                b.lower("free abelian mod-8 bound", free_abelian_chi_lower(n), cite);
            } else {
                match n {
                    3 => b.lower("metabolizer bound", 4, "3-dimensional metabolizer forces b+ >= 4"),
                    5 => b.lower("metabolizer bound", 8, "7-dimensional metabolizer"),
                    _ => {}
                }
            }
            // both χ and χ+σ are multiplicative in finite covers
            let cover_cite = "Z^n has self-covers of every index and chi, sigma are multiplicative";
            b.lower("finite covers", 0, cover_cite);
            if n % 2 == 0 {
                let g = n / 2;
                if n == 2 {
                    b.witness("S2 x T2", atom(Atom::S2xT2)?, "product Kaehler surface");
                }
                if n == 4 {
                    b.witness("four-torus", atom(Atom::T4)?, "T4 with product symplectic form");
                }
                b.witness(
                    &format!("symmetric square of a genus-{g} surface"),
                    atom(Atom::Sym2(g))?,
                    "Kaehler, pi1 = Z^2g, chi = 3 - 4g + C(2g,2), sigma = 1 - g",
                );
            } else {
                let m = (n + 1) / 2;
                b.witness(
                    &format!("Sym2({m}) summed with the torus-complement Z manifold"),
                    odd_rank_construct(m)?,
                    "kills one generator of Z^2m along a Lagrangian-perturbed torus",
                );
                if n == 3 {
                    b.witness("T4 summed with the torus-complement Z manifold", z3_construct()?, "kills one coordinate circle of T4");
                }
            }
        }
        GroupFamily::SurfaceGroup(gen) => {
            let gen = *gen;
            b.witness(
                &format!("S2 x Sigma_{gen}"),
                atom(Atom::S2xSigma(gen))?,
                "ruled surface with chi = 4 - 4g, sigma = 0",
            );
        }
        GroupFamily::AbelianSum { rank, torsion } => {
            let (rank, k) = (*rank, torsion.len() as u64);
            if rank >= 1 {
                b.lower("finite covers", 0, "abelian groups with b1 > 0 have isomorphic subgroups of every index");
            }
            let case1 = (rank + k <= 3 && !(rank == 3 && k == 0)) || (rank == 2 && k == 2);
            let case2 = (rank == 1 && k == 3) || (rank == 3 && k == 1);
            let pi1 = Pi1::abelian(AbelianInvariants {
                rank: rank as usize,
                torsion: torsion.iter().map(|&t| t.into()).collect(),
            });
            if case1 {
                b.witness(
                    "torus-bundle sum with E(1), abelian case (1)",
                    cited_class(&format!("torus_bundle_sum({pi1})"), 12, -8, pi1.clone(), Tri::Unknown),
                    "at most three cyclic summands (not Z^3), or Z^2 + Z/k + Z/l: chi = 12, chi + sigma = 4",
                );
            }
            if case2 {
                b.witness(
                    "torus-bundle sum with E(1), abelian case (2)",
                    cited_class(&format!("torus_bundle_sum({pi1})"), 24, -16, pi1, Tri::Unknown),
                    "Z + Z/k + Z/l + Z/n or Z^3 + Z/k: chi = 24, chi + sigma = 8",
                );
            }
            if !case1 && !case2 {
                b.caveats.push("no abelian-sum construction covers this shape; only the presentation construction applies".into());
            }
        }
    }

    if opts.assume_bmy && !matches!(f, GroupFamily::Trivial | GroupFamily::SurfaceGroup(_)) {
        let name = "BMY inequality (conjectural)";
        let cite = "chi - 3sigma >= 0 with 2chi + 3sigma >= 0 for minimal classes gives chi >= 0 and chi + sigma >= 0";
        b.conjectural(Side::Lower, name, 0, cite);
    }
    b.finish(f.to_string(), Some(f))
}

/// Conservative recognition of a family from a presentation.
pub fn recognize(p: &Presentation) -> Option<GroupFamily> {
    let g = p.generator_count();
    let rels: Vec<&Word> = p.relators().iter().filter(|w| !w.is_empty()).collect();
    if g == 0 {
        return Some(GroupFamily::Trivial);
    }
    if rels.is_empty() {
        return Some(GroupFamily::Free(g as u64).normalized());
    }
    if g == 1 {
        return Some(GroupFamily::from_abelian(&p.abelianize()));
    }
    if is_standard_commutator_set(g, &rels) {
        return Some(GroupFamily::FreeAbelian(g as u64).normalized());
    }
    if g % 2 == 0 && rels.len() == 1 && *rels[0] == surface_relator(g / 2, |i| 2 * i, |i| 2 * i + 1) {
        return Some(GroupFamily::SurfaceGroup(g as u64 / 2).normalized());
    }
    None
}

/// Every relator is a commutator of two distinct generators (either order,
/// possibly inverted or cyclically rotated) and every pair occurs.
fn is_standard_commutator_set(g: usize, rels: &[&Word]) -> bool {
    let mut seen = std::collections::BTreeSet::new();
    for w in rels {
        let s = w.syllables();
        if s.len() != 4 || s.iter().any(|x| x.exp.abs() != 1) {
            return false;
        }
        let (a, b) = (s[0].gen, s[1].gen);
        if a == b || s[2].gen != a || s[3].gen != b || s[0].exp != -s[2].exp || s[1].exp != -s[3].exp {
            return false;
        }
        seen.insert((a.min(b), a.max(b)));
    }
    seen.len() == g * (g - 1) / 2
}

/// Bounds for an arbitrary presentation: generic bounds from its
/// abelianization and size, merged with family bounds when recognized.
pub fn layered_report(p: &Presentation, target: Target, opts: BoundOptions) -> Result<BoundReport, Error> {
    let family = recognize(p);
    let ab = p.abelianize();
    let g = p.generator_count() as u64;
    let r = p.relator_count() as u64;

    let mut b = Builder::new(target);
    b.thm1(g, r);
    let group = match &family {
        Some(f) => {
            let fam = family_report(f, target, opts)?;
            for c in fam.contributions {
                if !b.contributions.iter().any(|d| d.name == c.name && d.value == c.value) {
                    b.contributions.push(c);
                }
            }
            b.caveats.extend(fam.caveats);
            format!("{p} = {f}")
        }
        None => {
            b.generic(ab.rank as u64, None);
            if target == Target::Chi {
                b.caveats.push("b2(K(G,1)) unknown for this group; taken as 0".into());
            }
            b.caveats.push(format!("group not recognized; abelianization {ab}"));
            if opts.assume_bmy {
                b.conjectural(
                    Side::Lower,
                    "BMY inequality (conjectural)",
                    0,
                    "chi - 3sigma >= 0 with 2chi + 3sigma >= 0 for minimal classes",
                );
            }
            p.to_string()
        }
    };
    let d = p.deficiency();
    b.caveats.push(format!(
        "a smooth (not necessarily symplectic) manifold with chi = {} exists from the handlebody double",
        2 - 2 * d
    ));
    b.finish(group, family)
}

/// Reports for a range of family parameters, computed with `exec`.
pub fn scan(kind: &str, params: std::ops::RangeInclusive<u64>, target: Target, exec: Exec) -> Result<Vec<BoundReport>, Error> {
    let fams: Vec<GroupFamily> = params
        .map(|n| format!("{kind}:{n}").parse())
        .collect::<Result<_, _>>()?;
    parallel::map(exec, &fams, |f| family_report(f, target, BoundOptions::default()))
        .into_iter()
        .collect()
}

fn fmt_opt(v: Option<i64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "group:  {}", self.group)?;
        writeln!(f, "target: {}", self.target)?;
        write!(f, "lower:  {}   upper: {}   exact: {}", fmt_opt(self.lower), fmt_opt(self.upper), if self.exact { "yes" } else { "no" })?;
        if let Some(c) = self.congruence {
            write!(f, "   congruence: {} mod {}", c.residue, c.modulus)?;
        }
        writeln!(f)?;
        let rows: Vec<[String; 5]> = self
            .contributions
            .iter()
            .map(|c| {
                let side = match c.side {
                    Side::Lower => "lower",
                    Side::Upper => "upper",
                };
                let status = match c.status {
                    Status::Proven => "",
                    Status::Conjectural => " [conjectural]",
                    Status::Hypothetical => " [hypothetical]",
                };
                let w = c.witness.as_ref().map_or_else(|| "-".to_string(), |m| m.name());
                [side.to_string(), c.value.to_string(), format!("{}{}", c.name, status), w, c.citation.clone()]
            })
            .collect();
        let head = ["side", "value", "bound", "witness", "justification"];
        let mut width = head.map(str::len);
        for r in &rows {
            for (i, cell) in r.iter().enumerate() {
                width[i] = width[i].max(cell.chars().count());
            }
        }
        let line = |cells: [&str; 5], f: &mut fmt::Formatter<'_>| -> fmt::Result {
            write!(f, " ")?;
            for (i, c) in cells.iter().enumerate() {
                if i == 4 {
                    write!(f, " {c}")?;
                } else if i == 1 {
                    write!(f, " {c:>w$}", w = width[i])?;
                } else {
                    write!(f, " {c:<w$}", w = width[i])?;
                }
            }
            writeln!(f)
        };
        line(head, f)?;
        for r in &rows {
            line([&r[0], &r[1], &r[2], &r[3], &r[4]], f)?;
        }
        for c in &self.caveats {
            writeln!(f, "note: {c}")?;
        }
        Ok(())
    }
}

/// Adds the χ upper bound k + ℓ(g + r) to a report for a presentation.
pub fn with_corvague(mut report: BoundReport, k: u64, l: u64, g: u64, r: u64, hypothetical: bool) -> Result<BoundReport, Error> {
    if report.target != Target::Chi {
        return Err(Error::InvalidParams("the k + l(g+r) bound applies to chi only".into()));
    }
    let value = corvague_upper(k, l, g, r, hypothetical)?;
    let status = if k < 6 || l < 12 { Status::Hypothetical } else { Status::Proven };
    report.contributions.push(Contribution {
        name: format!("sum with pieces of chi {k} and {l}"),
        side: Side::Upper,
        value,
        citation: "one piece kills two generators, each further piece kills one: chi <= k + l(g+r)".into(),
        status,
        witness: None,
    });
    let upper = report.contributions.iter().filter(|c| c.side == Side::Upper).map(|c| c.value).min();
    report.upper = upper;
    if let (Some(lo), Some(up)) = (report.lower, upper) {
        if lo > up {
            if status == Status::Hypothetical {
                report.caveats.push(format!("hypothetical upper bound {up} is below the proven lower bound {lo}"));
            } else {
                return Err(Error::Invariant(format!("upper bound {up} below lower bound {lo}")));
            }
        }
    }
    report.exact = matches!((report.lower, report.upper), (Some(l), Some(u)) if l == u);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    fn range(r: &BoundReport) -> (Option<i64>, Option<i64>) {
        (r.lower, r.upper)
    }

    #[test]
    fn primitive_bounds() {
        assert_eq!(hopf_lower(4, 6), 0);
        assert_eq!(hopf_lower(0, 0), 2);
        assert_eq!(hopf_lower(6, 15), 5);
        assert_eq!([chi_sigma_lower(0), chi_sigma_lower(1), chi_sigma_lower(2)], [4, 4, 0]);
        assert_eq!(thm1_upper(4, 6), (132, -88));
        assert_eq!(thm1_upper(0, 0), (12, -8));
        assert_eq!(thm1_upper(2, 1), (48, -32));
        assert_eq!(gompf_upper(10, 136, false).0, 3396);
        assert_eq!(gompf_upper(0, 0, false).0, 12);
        assert_eq!(gompf_upper(10, 136, true).0, 6792);
        assert_eq!(corvague_upper(12, 12, 4, 6, false).unwrap(), 132);
        assert_eq!(corvague_upper(12, 12, 0, 0, false).unwrap(), 12);
        assert!(corvague_upper(6, 6, 2, 1, false).is_err());
        assert_eq!(corvague_upper(6, 6, 2, 1, true).unwrap(), 24);
    }

    #[test]
    fn free_abelian_lower_values() {
        assert_eq!(free_abelian_chi_lower(6), 6);
        assert_eq!(free_abelian_chi_lower(5), 7);
        assert_eq!(free_abelian_chi_lower(9), 20);
        assert_eq!(free_abelian_chi_lower(3), 3);
        assert_eq!(free_abelian_chi_lower(1), 2);
    }

    #[test]
    fn family_parsing() {
        assert_eq!("zn:6".parse::<GroupFamily>().unwrap(), GroupFamily::FreeAbelian(6));
        assert_eq!("cyclic:0".parse::<GroupFamily>().unwrap(), GroupFamily::Free(1));
        assert_eq!("zn:1".parse::<GroupFamily>().unwrap(), GroupFamily::Free(1));
        assert_eq!("gpf:2,3".parse::<GroupFamily>().unwrap(), GroupFamily::Cyclic(6));
        assert_eq!("gpf:inf,inf".parse::<GroupFamily>().unwrap(), GroupFamily::FreeAbelian(2));
        assert_eq!(
            "gpf:2,4,inf".parse::<GroupFamily>().unwrap(),
            GroupFamily::AbelianSum { rank: 1, torsion: vec![2, 4] }
        );
        assert!(matches!("nope:3".parse::<GroupFamily>(), Err(Error::UnknownFamily(_))));
        assert!("zn:x".parse::<GroupFamily>().is_err());
        for f in ["free:3", "cyclic:5", "zn:4", "surface:2", "gpf:2,4,0", "trivial"] {
            let fam: GroupFamily = f.parse().unwrap();
            assert_eq!(fam.spec().parse::<GroupFamily>().unwrap(), fam);
        }
    }

    #[test]
    fn family_examples() {
        let o = BoundOptions::default();
        let z6 = family_report(&GroupFamily::FreeAbelian(6), Target::Chi, o).unwrap();
        assert_eq!(range(&z6), (Some(6), Some(6)));
        assert!(z6.exact);
        assert_eq!(z6.upper_witnesses()[0].name(), "Sym2(3)");
        let z6s = family_report(&GroupFamily::FreeAbelian(6), Target::ChiPlusSigma, o).unwrap();
        assert_eq!(range(&z6s), (Some(0), Some(4)));
        assert_eq!(z6s.congruence, Some(Congruence { modulus: 4, residue: 0 }));

        let c5 = family_report(&GroupFamily::Cyclic(5), Target::Chi, o).unwrap();
        assert_eq!(range(&c5), (Some(3), Some(10)));
        let c7 = family_report(&GroupFamily::Cyclic(7), Target::Chi, o).unwrap();
        assert_eq!(range(&c7), (Some(3), Some(12)));
        let c7s = family_report(&GroupFamily::Cyclic(7), Target::ChiPlusSigma, o).unwrap();
        assert!(c7s.exact && c7s.lower == Some(4));

        let z = family_report(&GroupFamily::Free(1), Target::Chi, o).unwrap();
        assert_eq!(range(&z), (Some(2), Some(12)));
        let zs = family_report(&GroupFamily::Free(1), Target::ChiPlusSigma, o).unwrap();
        assert_eq!(range(&zs), (Some(4), Some(4)));

        let f4 = family_report(&GroupFamily::Free(4), Target::Chi, o).unwrap();
        assert_eq!(range(&f4), (Some(-3), Some(12)));
    }

    #[test]
    fn abelian_sum_consequences() {
        let o = BoundOptions::default();
        for (spec, lower) in [("gpf:2,4,8", 3), ("gpf:2,4,inf", 2), ("gpf:3,inf,inf", 0)] {
            let f: GroupFamily = spec.parse().unwrap();
            let r = family_report(&f, Target::Chi, o).unwrap();
            assert_eq!(range(&r), (Some(lower), Some(12)), "{spec}");
        }
        let f: GroupFamily = "gpf:3,inf,inf".parse().unwrap();
        let r = family_report(&f, Target::ChiPlusSigma, o).unwrap();
        assert_eq!(range(&r), (Some(0), Some(4)));
        let f: GroupFamily = "gpf:2,inf,inf,inf".parse().unwrap();
        let r = family_report(&f, Target::Chi, o).unwrap();
        assert_eq!(r.upper, Some(24));
    }

    #[test]
    fn layered_examples() {
        let o = BoundOptions::default();
        let p = parse_presentation("<x,y|[x,y]>").unwrap();
        let r = layered_report(&p, Target::Chi, o).unwrap();
        assert_eq!(range(&r), (Some(0), Some(0)));
        assert_eq!(r.upper_witnesses()[0].name(), "S2xT2");

        let p = parse_presentation("<a|a^5>").unwrap();
        assert_eq!(range(&layered_report(&p, Target::Chi, o).unwrap()), (Some(3), Some(10)));

        let p = parse_presentation("<x|>").unwrap();
        assert_eq!(range(&layered_report(&p, Target::Chi, o).unwrap()), (Some(2), Some(12)));
        let r = layered_report(&p, Target::ChiPlusSigma, o).unwrap();
        assert!(r.exact && r.lower == Some(4));

        let p = parse_presentation("<x,y|x y x y^-1>").unwrap();
        let r = layered_report(&p, Target::Chi, o).unwrap();
        assert!(r.family.is_none());
        assert_eq!(r.upper, Some(48));
        assert!(r.caveats.iter().any(|c| c.contains("b2")));
    }

    #[test]
    fn bmy_only_on_request() {
        let f = GroupFamily::Free(9);
        let plain = family_report(&f, Target::Chi, BoundOptions::default()).unwrap();
        assert!(plain.contributions.iter().all(|c| c.status == Status::Proven));
        let bmy = family_report(&f, Target::Chi, BoundOptions { assume_bmy: true }).unwrap();
        assert!(bmy.contributions.iter().any(|c| c.status == Status::Conjectural));
        assert_eq!(bmy.lower, Some(0));
    }

    #[test]
    fn scans_agree_across_executors() {
        let a = scan("cyclic", 2..=12, Target::Chi, Exec::Sequential).unwrap();
        let b = scan("cyclic", 2..=12, Target::Chi, Exec::Parallel).unwrap();
        let ra: Vec<_> = a.iter().map(range).collect();
        let rb: Vec<_> = b.iter().map(range).collect();
        assert_eq!(ra, rb);
    }
}
