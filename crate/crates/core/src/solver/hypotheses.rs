//! Step-size hypotheses for the `a/k`, `b·k` schedule family.

use std::fmt;

use super::{PenaltyFunction, StepSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisStatus {
    Pass,
    Fail,
    Unverified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub status: HypothesisStatus,
    /// Positive when satisfied with room to spare.
    pub margin: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<HypothesisCheck>,
}

impl ValidationReport {
    /// No hypothesis failed. Unverified ones do not block.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != HypothesisStatus::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{}: {:?}", c.name, c.status)?;
            if let Some(m) = c.margin {
                write!(f, " (margin {m:.6})")?;
            }
            writeln!(f, " {}", c.detail)?;
        }
        Ok(())
    }
}

/// Checks the step-size hypotheses for `αₖ = a/k`, `βₖ = b·scale·k`.
///
/// * H2 (`Σαₖ = ∞`, `Σαₖ² < ∞`) always holds for `a/k`.
/// * H3 needs `0 < αₖβₖ < 2/L_g`; the product is the constant
///   `a·b·scale`, so the test is strict and the margin is
///   `2/L_g - a·b·scale`.
/// * H4 is marked satisfied when `g` declares a quadratic growth constant
///   (together with `Σ 1/βₖ² < ∞`, which holds for linear `βₖ`), and
///   unverified otherwise.
pub fn validate_hypotheses(sched: &StepSchedule, g: &PenaltyFunction) -> ValidationReport {
    let h2 = HypothesisCheck {
        name: "H2",
        status: HypothesisStatus::Pass,
        margin: None,
        detail: format!("alpha_k = {}/k is divergent and square summable", sched.a()),
    };

    let product = sched.penalty_weight();
    let bound = 2.0 / g.lipschitz();
    let margin = bound - product;
    let h3 = HypothesisCheck {
        name: "H3",
        status: if product > 0.0 && product < bound {
            HypothesisStatus::Pass
        } else {
            HypothesisStatus::Fail
        },
        margin: Some(margin),
        detail: format!("alpha_k*beta_k = {product} vs 2/L_g = {bound}"),
    };

    let h4 = match g.growth_constant() {
        Some(a) => HypothesisCheck {
            name: "H4",
            status: HypothesisStatus::Pass,
            margin: None,
            detail: format!("quadratic growth with constant {a}; sum 1/beta_k^2 finite"),
        },
        None => HypothesisCheck {
            name: "H4",
            status: HypothesisStatus::Unverified,
            margin: None,
            detail: "no growth constant declared".into(),
        },
    };

    ValidationReport {
        checks: vec![h2, h3, h4],
    }
}
