//! Bell-inequality evaluation and local-polytope membership.
//!
//! The evaluators take coincidence estimates (analytic, inferred, or
//! empirical) and produce [`InequalityReport`]s in a uniform ≥-form: a report
//! is violated when `lhs − rhs` falls below zero by more than `k` propagated
//! standard errors. The submodules decide membership in the local (Boole)
//! polytope by exact feasibility search over deterministic assignments
//! ([`polytope`]) and enumerate its facets by the double description method
//! ([`facets`]) — two independent routes to the same geometry.

mod exact;
pub mod facets;
pub mod polytope;

pub use facets::{enumerate_boole_facets, BooleInequality, MAX_FACET_VARS};
pub use polytope::{
    check_local_polytope, instance_from_run, Assignment, Feasibility, PairConstraint,
    PolytopeInstance, Target, Witness, MAX_VARS,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::Run;
use crate::qm::{CoincidenceEstimate, EstimateKind};

/// Default width of the statistical guard band: an empirical margin must be
/// below −k·σ before a report claims violation.
pub const DEFAULT_K_SIGMA: f64 = 3.0;

/// The inequalities this crate knows by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityName {
    /// Four-analyzer form: p(E'=P) + p(P=E) + p(E=P') ≥ p(E'=P').
    Star,
    /// Three-analyzer form: p(P=E) + p(E=E') + p(E'=P) ≥ 1.
    DoubleStar,
    /// Min-max form: max(p(P=E), p(P=E')) ≥ (1 − p(E'=E))/2.
    Minmax,
    /// A facet of the local polytope evaluated as a report.
    CustomBoole,
}

impl InequalityName {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "star" => Ok(Self::Star),
            "double-star" | "double_star" => Ok(Self::DoubleStar),
            "minmax" | "min-max" => Ok(Self::Minmax),
            other => Err(Error::UnknownInequality(other.to_string())),
        }
    }

    /// Number of coincidence probabilities the inequality consumes.
    pub fn arity(self) -> usize {
        match self {
            Self::Star => 4,
            Self::DoubleStar | Self::Minmax => 3,
            Self::CustomBoole => 0,
        }
    }

    /// Canonical label pairs for each probability slot, in slot order.
    pub fn term_pairs(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Self::Star => &[("E'", "P"), ("P", "E"), ("E", "P'"), ("E'", "P'")],
            Self::DoubleStar => &[("P", "E"), ("E", "E'"), ("E'", "P")],
            Self::Minmax => &[("P", "E"), ("P", "E'"), ("E'", "E")],
            Self::CustomBoole => &[],
        }
    }
}

impl fmt::Display for InequalityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Star => "star",
            Self::DoubleStar => "double-star",
            Self::Minmax => "minmax",
            Self::CustomBoole => "custom-boole",
        };
        write!(f, "{s}")
    }
}

/// One probability slot of a report: which label pair it compares and the
/// estimate (with provenance) that filled it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermEstimate {
    pub pair: (String, String),
    pub estimate: CoincidenceEstimate,
}

/// An evaluated inequality in ≥-form.
///
/// `margin = lhs − rhs`; negative means the inequality failed. The verdict
/// requires the margin to clear the statistical guard band: violated iff
/// `margin < −k_sigma · uncertainty` (for purely analytic terms the
/// uncertainty is zero and the comparison is exact).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: InequalityName,
    pub terms: Vec<TermEstimate>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub uncertainty: f64,
    pub k_sigma: f64,
    pub violated: bool,
}

fn term(pair: (&str, &str), estimate: &CoincidenceEstimate) -> TermEstimate {
    TermEstimate {
        pair: (pair.0.to_string(), pair.1.to_string()),
        estimate: estimate.clone(),
    }
}

fn verdict(margin: f64, uncertainty: f64, k: f64) -> bool {
    margin < -k * uncertainty
}

/// p(E'=P) + p(P=E) + p(E=P') ≥ p(E'=P'), slots in that order.
pub fn eval_star(terms: &[CoincidenceEstimate; 4], k_sigma: f64) -> InequalityReport {
    let lhs = terms[0].value + terms[1].value + terms[2].value;
    let rhs = terms[3].value;
    let uncertainty = terms.iter().map(|t| t.std_error.powi(2)).sum::<f64>().sqrt();
    let margin = lhs - rhs;
    InequalityReport {
        name: InequalityName::Star,
        terms: InequalityName::Star
            .term_pairs()
            .iter()
            .zip(terms)
            .map(|(p, e)| term(*p, e))
            .collect(),
        lhs,
        rhs,
        margin,
        uncertainty,
        k_sigma,
        violated: verdict(margin, uncertainty, k_sigma),
    }
}

/// p(P=E) + p(E=E') + p(E'=P) ≥ 1, slots in that order.
pub fn eval_double_star(terms: &[CoincidenceEstimate; 3], k_sigma: f64) -> InequalityReport {
    let lhs = terms.iter().map(|t| t.value).sum();
    let rhs = 1.0;
    let uncertainty = terms.iter().map(|t| t.std_error.powi(2)).sum::<f64>().sqrt();
    let margin = lhs - rhs;
    InequalityReport {
        name: InequalityName::DoubleStar,
        terms: InequalityName::DoubleStar
            .term_pairs()
            .iter()
            .zip(terms)
            .map(|(p, e)| term(*p, e))
            .collect(),
        lhs,
        rhs,
        margin,
        uncertainty,
        k_sigma,
        violated: verdict(margin, uncertainty, k_sigma),
    }
}

/// max(p(P=E), p(P=E')) ≥ (1 − p(E'=E))/2, slots in that order.
///
/// The uncertainty combines the standard error of whichever term realizes
/// the max with half the standard error of the right-hand term.
pub fn eval_minmax(terms: &[CoincidenceEstimate; 3], k_sigma: f64) -> InequalityReport {
    let (lhs, lhs_err) = if terms[0].value >= terms[1].value {
        (terms[0].value, terms[0].std_error)
    } else {
        (terms[1].value, terms[1].std_error)
    };
    let rhs = (1.0 - terms[2].value) / 2.0;
    let uncertainty = (lhs_err.powi(2) + (terms[2].std_error / 2.0).powi(2)).sqrt();
    let margin = lhs - rhs;
    InequalityReport {
        name: InequalityName::Minmax,
        terms: InequalityName::Minmax
            .term_pairs()
            .iter()
            .zip(terms)
            .map(|(p, e)| term(*p, e))
            .collect(),
        lhs,
        rhs,
        margin,
        uncertainty,
        k_sigma,
        violated: verdict(margin, uncertainty, k_sigma),
    }
}

/// Evaluate a named inequality on pre-assembled slot estimates, in the slot
/// order given by [`InequalityName::term_pairs`].
pub fn eval_slots(
    name: InequalityName,
    estimates: &[CoincidenceEstimate],
    k_sigma: f64,
) -> Result<InequalityReport> {
    if estimates.len() != name.arity() {
        return Err(Error::ArityMismatch {
            inequality: name.to_string(),
            expected: name.arity(),
            got: estimates.len(),
        });
    }
    match name {
        InequalityName::Star => Ok(eval_star(
            &[
                estimates[0].clone(),
                estimates[1].clone(),
                estimates[2].clone(),
                estimates[3].clone(),
            ],
            k_sigma,
        )),
        InequalityName::DoubleStar => Ok(eval_double_star(
            &[
                estimates[0].clone(),
                estimates[1].clone(),
                estimates[2].clone(),
            ],
            k_sigma,
        )),
        InequalityName::Minmax => Ok(eval_minmax(
            &[
                estimates[0].clone(),
                estimates[1].clone(),
                estimates[2].clone(),
            ],
            k_sigma,
        )),
        InequalityName::CustomBoole => Err(Error::UnknownInequality(
            "custom-boole reports are built from facets, not by name".to_string(),
        )),
    }
}

/// Evaluate a named inequality on the raw empirical agreements of a run,
/// using the canonical label pairs for its slots.
pub fn eval_from_run(name: InequalityName, run: &Run, k_sigma: f64) -> Result<InequalityReport> {
    let estimates: Vec<CoincidenceEstimate> = name
        .term_pairs()
        .iter()
        .map(|(a, b)| run.agreement(a, b))
        .collect::<Result<_>>()?;
    eval_slots(name, &estimates, k_sigma)
}

/// Evaluate a polytope facet as a ≥-form report. `labels` names the variable
/// indices so term pairs read like the other reports.
pub fn eval_boole(
    facet: &BooleInequality,
    labels: &[String],
    estimates: &[CoincidenceEstimate],
    k_sigma: f64,
) -> InequalityReport {
    assert_eq!(facet.pairs.len(), estimates.len());
    // Facets arrive as Σ c·p ≤ rhs; report form is Σ (−c)·p ≥ −rhs.
    let lhs: f64 = facet
        .coeffs
        .iter()
        .zip(estimates)
        .map(|(c, e)| -(*c as f64) * e.value)
        .sum();
    let rhs = -(facet.rhs as f64);
    let uncertainty = facet
        .coeffs
        .iter()
        .zip(estimates)
        .map(|(c, e)| ((*c as f64) * e.std_error).powi(2))
        .sum::<f64>()
        .sqrt();
    let margin = lhs - rhs;
    InequalityReport {
        name: InequalityName::CustomBoole,
        terms: facet
            .pairs
            .iter()
            .zip(estimates)
            .map(|((i, j), e)| term((labels[*i].as_str(), labels[*j].as_str()), e))
            .collect(),
        lhs,
        rhs,
        margin,
        uncertainty,
        k_sigma,
        violated: verdict(margin, uncertainty, k_sigma),
    }
}

/// CLI-facing veneer: validate arity and ranges, then evaluate. All values
/// are treated as analytic unless `n_samples` marks them empirical.
pub fn evaluate_named(
    name: InequalityName,
    values: &[f64],
    n_samples: Option<u64>,
    k_sigma: f64,
) -> Result<InequalityReport> {
    if values.len() != name.arity() {
        return Err(Error::ArityMismatch {
            inequality: name.to_string(),
            expected: name.arity(),
            got: values.len(),
        });
    }
    let estimates: Vec<CoincidenceEstimate> = values
        .iter()
        .map(|&v| {
            let mut e = CoincidenceEstimate::checked(v, EstimateKind::Analytic)?;
            if let Some(n) = n_samples {
                e.kind = EstimateKind::Empirical;
                e.std_error = (v * (1.0 - v) / n as f64).sqrt();
                e.n_samples = Some(n);
            }
            Ok(e)
        })
        .collect::<Result<_>>()?;
    eval_slots(name, &estimates, k_sigma)
}

/// Exhaustive soundness check for the three-analyzer inequality: among any
/// three ±1 values at least one pairwise agreement holds, so every mixture
/// satisfies it. Returns a counterexample if one existed (it cannot).
pub fn double_star_pointwise_counterexample() -> Option<[i8; 3]> {
    for bits in 0u8..8 {
        let v = [0, 1, 2].map(|k| if bits >> k & 1 == 1 { 1i8 } else { -1 });
        let (p, e, e2) = (v[0], v[1], v[2]);
        let agreements = usize::from(p == e) + usize::from(e == e2) + usize::from(e2 == p);
        if agreements < 1 {
            return Some(v);
        }
    }
    None
}

/// Exhaustive soundness check for the four-analyzer inequality: whenever
/// E' = P', one of the three chained agreements must hold.
pub fn star_pointwise_counterexample() -> Option<[i8; 4]> {
    for bits in 0u8..16 {
        let v = [0, 1, 2, 3].map(|k| if bits >> k & 1 == 1 { 1i8 } else { -1 });
        let (e, e2, p, p2) = (v[0], v[1], v[2], v[3]);
        let lhs = usize::from(e2 == p) + usize::from(p == e) + usize::from(e == p2);
        let rhs = usize::from(e2 == p2);
        if lhs < rhs {
            return Some(v);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: f64 = 0.146_446_609_406_726_24;
    const B: f64 = 0.853_553_390_593_273_7;

    fn analytic(values: &[f64]) -> Vec<CoincidenceEstimate> {
        values.iter().map(|&v| CoincidenceEstimate::analytic(v)).collect()
    }

    #[test]
    fn star_flags_the_reference_contradiction() {
        let e = analytic(&[A, A, A, B]);
        let r = eval_star(&[e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone()], 3.0);
        assert!(r.violated);
        assert!((r.lhs - 0.439_339_828_220_178_6).abs() < 1e-12);
        assert!((r.rhs - B).abs() < 1e-12);
        assert!((r.margin + 0.414_213_562_373_095_1).abs() < 1e-12);
        assert_eq!(r.uncertainty, 0.0);
    }

    #[test]
    fn star_still_fails_against_one_half() {
        let e = analytic(&[A, A, A, 0.5]);
        let r = eval_star(&[e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone()], 3.0);
        assert!(r.violated);
        assert!((r.margin + 0.060_660_171_779_821_42).abs() < 1e-12);
    }

    #[test]
    fn star_boundary_is_not_a_violation() {
        let t = 1.0 / 3.0;
        let e = analytic(&[t, t, t, 1.0]);
        let r = eval_star(&[e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone()], 3.0);
        assert!(!r.violated);
        assert!(r.margin.abs() < 1e-12);
    }

    #[test]
    fn double_star_flags_the_reference_triple() {
        let e = analytic(&[A, 0.5, A]);
        let r = eval_double_star(&[e[0].clone(), e[1].clone(), e[2].clone()], 3.0);
        assert!(r.violated);
        assert!((r.lhs - 0.792_893_218_813_452_5).abs() < 1e-12);
        assert_eq!(r.rhs, 1.0);
    }

    #[test]
    fn double_star_accepts_a_saturating_triple() {
        let e = analytic(&[0.0, 1.0, 0.0]);
        let r = eval_double_star(&[e[0].clone(), e[1].clone(), e[2].clone()], 3.0);
        assert!(!r.violated);
        assert_eq!(r.lhs, 1.0);
    }

    #[test]
    fn minmax_flags_the_reference_triple_and_respects_the_boundary() {
        let e = analytic(&[A, A, 0.5]);
        let r = eval_minmax(&[e[0].clone(), e[1].clone(), e[2].clone()], 3.0);
        assert!(r.violated);
        assert!((r.lhs - A).abs() < 1e-15);
        assert!((r.rhs - 0.25).abs() < 1e-15);

        let e = analytic(&[0.5, 0.5, 0.0]);
        let r = eval_minmax(&[e[0].clone(), e[1].clone(), e[2].clone()], 3.0);
        assert!(!r.violated);
        assert_eq!(r.margin, 0.0);
    }

    #[test]
    fn empirical_margins_need_to_clear_the_guard_band() {
        let mut inside = CoincidenceEstimate::empirical(4_990, 10_000);
        inside.value = 0.499; // margin −0.003 on a σ ≈ 0.0087 stack: not a violation
        let others = CoincidenceEstimate::empirical(2_500, 10_000);
        let r = eval_double_star(&[others.clone(), inside, others.clone()], 3.0);
        assert!(r.margin < 0.0);
        assert!(!r.violated);

        let far = CoincidenceEstimate::empirical(1_464, 10_000);
        let half = CoincidenceEstimate::empirical(5_000, 10_000);
        let r = eval_double_star(&[far.clone(), half, far], 3.0);
        assert!(r.violated);
        assert!(r.uncertainty > 0.0);
    }

    #[test]
    fn pointwise_soundness_has_no_counterexamples() {
        assert_eq!(double_star_pointwise_counterexample(), None);
        assert_eq!(star_pointwise_counterexample(), None);
    }

    #[test]
    fn named_evaluation_validates_arity_and_range() {
        assert!(matches!(
            evaluate_named(InequalityName::DoubleStar, &[0.5, 0.5], None, 3.0),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(matches!(
            evaluate_named(InequalityName::DoubleStar, &[0.5, 1.5, 0.5], None, 3.0),
            Err(Error::InvalidProbability(_))
        ));
        let r = evaluate_named(InequalityName::DoubleStar, &[0.4, 0.4, 0.4], None, 3.0).unwrap();
        assert!(!r.violated);
        assert!((r.lhs - 1.2).abs() < 1e-12);
    }

    #[test]
    fn names_parse_and_round_trip() {
        assert_eq!(InequalityName::parse("double-star").unwrap(), InequalityName::DoubleStar);
        assert_eq!(InequalityName::parse("double_star").unwrap(), InequalityName::DoubleStar);
        assert_eq!(InequalityName::parse("minmax").unwrap(), InequalityName::Minmax);
        assert!(InequalityName::parse("chsh").is_err());
        assert_eq!(InequalityName::DoubleStar.to_string(), "double-star");
    }
}
