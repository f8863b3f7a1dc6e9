//! Consistency checks implied by the invariant identities.

use serde::Serialize;

use super::{b_plus_from_identity, ManifoldClass, Tri};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Unknown,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivedCheck {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivedChecks {
    pub chi_plus_sigma: i64,
    pub k_squared: i64,
    pub checks: Vec<DerivedCheck>,
}

impl DerivedChecks {
    pub fn failures(&self) -> Vec<&DerivedCheck> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail).collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn status(&self, name: &str) -> Option<CheckStatus> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.status)
    }
}

fn verdict(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

/// χ + σ, K² = 2χ + 3σ, and a verdict for each identity the record must
/// satisfy.
pub fn derived_checks(m: &ManifoldClass) -> DerivedChecks {
    let cs = m.chi + m.sigma;
    let k2 = m.k_squared();
    let mut checks = Vec::new();
    let mut push = |name: &'static str, status: CheckStatus, detail: String| {
        checks.push(DerivedCheck { name, status, detail });
    };

    match m.b_plus {
        Some(bp) => {
            let want = 2 - 2 * m.b1 as i64 + 2 * bp as i64;
            push("betti_identity", verdict(cs == want), format!("chi+sigma={cs}, 2-2b1+2b+={want}"));
            let b2 = m.b2();
            let b_minus = b2 - bp as i64;
            push(
                "betti_ranges",
                verdict(b2 >= 0 && b_minus >= 0 && bp as i64 - b_minus == m.sigma),
                format!("b2={b2}, b+={bp}, b-={b_minus}"),
            );
        }
        None => {
            let status = if b_plus_from_identity(m.chi, m.sigma, m.b1).is_none() {
                CheckStatus::Fail
            } else {
                CheckStatus::Unknown
            };
            push("betti_identity", status, "b+ not recorded".into());
        }
    }

    if m.symplectic {
        match m.b_plus {
            Some(bp) => {
                push("b_plus_positive", verdict(bp >= 1), format!("b+={bp}"));
                let idx = 1 - m.b1 as i64 + bp as i64;
                push("asd_parity", verdict(idx % 2 == 0), format!("1-b1+b+={idx}"));
            }
            None => {
                push("b_plus_positive", CheckStatus::Unknown, "b+ unknown".into());
                push("asd_parity", CheckStatus::Unknown, "b+ unknown".into());
            }
        }
        push("chi_plus_sigma_mod_4", verdict(cs.rem_euclid(4) == 0), format!("chi+sigma={cs}"));
    } else {
        for name in ["b_plus_positive", "asd_parity", "chi_plus_sigma_mod_4"] {
            push(name, CheckStatus::NotApplicable, "not symplectic".into());
        }
    }

    let k2_status = match (m.symplectic, m.minimal, m.pi1.is_surface_group()) {
        (true, Tri::Yes, Tri::No) => verdict(k2 >= 0),
        (true, Tri::Yes, Tri::Unknown) | (true, Tri::Unknown, Tri::No | Tri::Unknown) => {
            if k2 >= 0 {
                CheckStatus::Pass
            } else {
                CheckStatus::Unknown
            }
        }
        _ => CheckStatus::NotApplicable,
    };
    push("minimal_k_squared", k2_status, format!("2chi+3sigma={k2}"));

    DerivedChecks { chi_plus_sigma: cs, k_squared: k2, checks }
}
