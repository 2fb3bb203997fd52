//! Reproducible experiment harness.
//!
//! An [`ExperimentPlan`] fixes generator, panel, pair count, seed, and the
//! comparisons and inequalities to evaluate; running it is deterministic —
//! the same plan serializes to the same result bytes on every machine
//! running the same crate version. Plans can be read from a TOML key-value
//! file (see [`ExperimentPlan::from_toml_str`]).

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::inequalities::{eval_slots, InequalityName, InequalityReport, TermEstimate};
use crate::models::{
    EVariant, GeneratorSpec, PanelEntry, PanelEntryEcho, RealistMode, Run, RunGenerator,
    SettingsPanel, Station,
};
use crate::qm::{singlet_agreement, CoincidenceEstimate, MeasurementSetting};

/// A fully pinned experiment: everything needed to reproduce a result.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    pub generator: GeneratorSpec,
    pub panel: SettingsPanel,
    pub n_pairs: usize,
    pub seed: u64,
    pub comparisons: Vec<(String, String)>,
    pub inequalities: Vec<InequalityName>,
    pub k_sigma: f64,
}

/// All unordered label pairs of a panel, in panel order.
pub fn all_pairs(panel: &SettingsPanel) -> Vec<(String, String)> {
    let labels: Vec<String> = panel.labels().map(str::to_string).collect();
    let mut pairs = Vec::new();
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            pairs.push((labels[i].clone(), labels[j].clone()));
        }
    }
    pairs
}

impl ExperimentPlan {
    /// Plan with the generator's default panel, every label pair as a
    /// comparison, and the inequalities the panel supports.
    pub fn with_defaults(generator: GeneratorSpec, n_pairs: usize, seed: u64) -> Self {
        let panel = generator.default_panel();
        let comparisons = all_pairs(&panel);
        let inequalities = if panel.entry("P'").is_some() {
            vec![
                InequalityName::Star,
                InequalityName::DoubleStar,
                InequalityName::Minmax,
            ]
        } else {
            vec![InequalityName::DoubleStar, InequalityName::Minmax]
        };
        Self {
            generator,
            panel,
            n_pairs,
            seed,
            comparisons,
            inequalities,
            k_sigma: crate::inequalities::DEFAULT_K_SIGMA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pairs == 0 {
            return Err(Error::ZeroPairs);
        }
        if !(self.k_sigma.is_finite() && self.k_sigma > 0.0) {
            return Err(Error::InvalidPlan(format!(
                "k_sigma must be positive, got {}",
                self.k_sigma
            )));
        }
        for (a, b) in &self.comparisons {
            self.panel.require(a)?;
            self.panel.require(b)?;
        }
        Ok(())
    }

    /// Read a plan from the TOML configuration format:
    ///
    /// ```toml
    /// generator = "qm-realist"     # lhv | nonlocal-eacp | control-*
    /// mode = "lemma-exact"         # qm-realist: or conditional-independence
    /// variant = "measured-e"       # qm-realist: or unmeasured-e
    /// # family = "sign"            # lhv only
    /// n_pairs = 1000000
    /// seed = 42
    /// k_sigma = 3.0                # optional
    /// comparisons = [["P", "E"], ["E", "E'"]]   # optional
    /// inequalities = ["double-star", "minmax"]  # optional
    ///
    /// [[panel]]                    # optional; generator default otherwise
    /// label = "P"
    /// station = "P"
    /// angle_deg = 45.0
    /// ```
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: PlanConfig =
            toml::from_str(text).map_err(|e| Error::InvalidPlan(e.to_string()))?;
        config.resolve()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanConfig {
    generator: String,
    variant: Option<EVariant>,
    mode: Option<RealistMode>,
    family: Option<String>,
    n_pairs: usize,
    seed: u64,
    k_sigma: Option<f64>,
    comparisons: Option<Vec<(String, String)>>,
    inequalities: Option<Vec<String>>,
    panel: Option<Vec<PanelEntryConfig>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PanelEntryConfig {
    label: String,
    station: Station,
    angle_deg: f64,
}

impl PlanConfig {
    fn resolve(self) -> Result<ExperimentPlan> {
        let generator = GeneratorSpec::from_parts(
            &self.generator,
            self.variant,
            self.mode,
            self.family.as_deref(),
        )?;
        let mut plan = ExperimentPlan::with_defaults(generator, self.n_pairs, self.seed);
        if let Some(entries) = self.panel {
            let entries = entries
                .into_iter()
                .map(|e| {
                    Ok(PanelEntry {
                        station: e.station,
                        setting: MeasurementSetting::new(e.label, Angle::from_degrees(e.angle_deg)?),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            plan.panel = SettingsPanel::new(entries)?;
            plan.comparisons = all_pairs(&plan.panel);
        }
        if let Some(comparisons) = self.comparisons {
            plan.comparisons = comparisons;
        }
        if let Some(names) = self.inequalities {
            plan.inequalities = names
                .iter()
                .map(|n| InequalityName::parse(n))
                .collect::<Result<_>>()?;
        }
        if let Some(k) = self.k_sigma {
            plan.k_sigma = k;
        }
        plan.validate()?;
        Ok(plan)
    }
}

/// The outcome of a plan: estimates for every requested comparison and one
/// report per requested inequality, plus the plan echo that pins provenance.
///
/// `estimates` are always raw measured frequencies from the run. Report
/// terms instead come from the generator's world-view
/// ([`RunGenerator::agreement_estimate`]): counterfactual constructions fill
/// the slots their sampler cannot realize with inferred values, and the
/// term provenance records which is which.
///
/// `wall_time_s` is measured, not derived from the plan, and is excluded
/// from serialization so that equal plans produce byte-identical output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub generator: GeneratorSpec,
    pub panel: Vec<PanelEntryEcho>,
    pub n_pairs: usize,
    pub seed: u64,
    pub k_sigma: f64,
    pub estimates: Vec<TermEstimate>,
    pub reports: Vec<InequalityReport>,
    #[serde(skip)]
    pub wall_time_s: Option<f64>,
}

/// Run a plan end to end.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    Ok(run_experiment_capturing(plan)?.0)
}

/// Run a plan and also hand back the generated records (for CSV export or
/// further analysis).
pub fn run_experiment_capturing(plan: &ExperimentPlan) -> Result<(ExperimentResult, Run)> {
    plan.validate()?;
    let start = Instant::now();
    let generator = plan.generator.build()?;
    let run = generator.generate(&plan.panel, plan.n_pairs, plan.seed)?;
    let estimates = plan
        .comparisons
        .iter()
        .map(|(a, b)| {
            Ok(TermEstimate {
                pair: (a.clone(), b.clone()),
                estimate: run.agreement(a, b)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let reports = plan
        .inequalities
        .iter()
        .map(|name| assembled_report(*name, generator.as_ref(), &run, &plan.panel, plan.k_sigma))
        .collect::<Result<Vec<_>>>()?;
    let result = ExperimentResult {
        generator: plan.generator.clone(),
        panel: plan.panel.echo(),
        n_pairs: plan.n_pairs,
        seed: plan.seed,
        k_sigma: plan.k_sigma,
        estimates,
        reports,
        wall_time_s: Some(start.elapsed().as_secs_f64()),
    };
    Ok((result, run))
}

/// Evaluate a named inequality with slots filled from the generator's
/// world-view over this run.
fn assembled_report(
    name: InequalityName,
    generator: &dyn RunGenerator,
    run: &Run,
    panel: &SettingsPanel,
    k_sigma: f64,
) -> Result<InequalityReport> {
    let estimates: Vec<CoincidenceEstimate> = name
        .term_pairs()
        .iter()
        .map(|(a, b)| generator.agreement_estimate(run, panel, a, b))
        .collect::<Result<_>>()?;
    eval_slots(name, &estimates, k_sigma)
}

/// One margin cell of a sweep row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginCell {
    pub name: InequalityName,
    pub margin: f64,
    pub violated: bool,
}

/// One row of an angle sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub angle_deg: f64,
    /// Reference values: the singlet agreement law evaluated at each
    /// comparison's relative angle under this row's panel.
    pub analytic: Vec<f64>,
    /// Sampled estimates, present when the plan has `n_pairs > 0`.
    pub empirical: Option<Vec<CoincidenceEstimate>>,
    /// Margins of the plan's inequalities — from the sampled run when one
    /// was taken, from the analytic reference values otherwise.
    pub margins: Vec<MarginCell>,
}

/// An angle sweep: the template plan re-run with one label's angle moved
/// across a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub swept_label: String,
    pub comparisons: Vec<(String, String)>,
    pub inequalities: Vec<InequalityName>,
    pub rows: Vec<SweepRow>,
}

/// Sweep `swept_label` through `angles`, one row per angle.
///
/// With `n_pairs = 0` the sweep is purely analytic: no sampling happens and
/// margins come from the reference values. With `n_pairs >= 1` each row runs
/// the full plan under the same seed, so a row whose angle equals the
/// template's produces bit-identical estimates to [`run_experiment`] on the
/// template itself.
pub fn angle_sweep(
    plan: &ExperimentPlan,
    swept_label: &str,
    angles: &[Angle],
) -> Result<SweepTable> {
    plan.panel.require(swept_label)?;
    if plan.n_pairs > 0 {
        plan.validate()?;
    }
    let mut rows = Vec::with_capacity(angles.len());
    for angle in angles {
        let panel = plan.panel.with_angle(swept_label, *angle)?;
        let analytic: Vec<f64> = plan
            .comparisons
            .iter()
            .map(|(a, b)| {
                Ok(singlet_agreement(
                    panel.angle_of(a)?.radians() - panel.angle_of(b)?.radians(),
                ))
            })
            .collect::<Result<_>>()?;
        let (empirical, margins) = if plan.n_pairs > 0 {
            let row_plan = ExperimentPlan {
                panel: panel.clone(),
                ..plan.clone()
            };
            let result = run_experiment(&row_plan)?;
            let margins = result
                .reports
                .iter()
                .map(|r| MarginCell {
                    name: r.name,
                    margin: r.margin,
                    violated: r.violated,
                })
                .collect();
            (
                Some(result.estimates.into_iter().map(|e| e.estimate).collect()),
                margins,
            )
        } else {
            let margins = plan
                .inequalities
                .iter()
                .map(|name| analytic_margin(*name, &panel, plan.k_sigma))
                .collect::<Result<Vec<_>>>()?;
            (None, margins)
        };
        rows.push(SweepRow {
            angle_deg: angle.degrees(),
            analytic,
            empirical,
            margins,
        });
    }
    Ok(SweepTable {
        swept_label: swept_label.to_string(),
        comparisons: plan.comparisons.clone(),
        inequalities: plan.inequalities.clone(),
        rows,
    })
}

/// Evaluate a named inequality on the singlet reference values of a panel.
fn analytic_margin(name: InequalityName, panel: &SettingsPanel, k_sigma: f64) -> Result<MarginCell> {
    let estimates: Vec<CoincidenceEstimate> = name
        .term_pairs()
        .iter()
        .map(|(a, b)| {
            Ok(CoincidenceEstimate::analytic(singlet_agreement(
                panel.angle_of(a)?.radians() - panel.angle_of(b)?.radians(),
            )))
        })
        .collect::<Result<_>>()?;
    let report = eval_slots(name, &estimates, k_sigma)?;
    Ok(MarginCell {
        name,
        margin: report.margin,
        violated: report.violated,
    })
}

impl SweepTable {
    /// CSV layout: `angle_deg`, one `analytic[a=b]` column per comparison,
    /// then (when sampled) `value[a=b]`,`stderr[a=b]` per comparison, then
    /// `margin[name]`,`violated[name]` per inequality.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("angle_deg");
        for (a, b) in &self.comparisons {
            out.push_str(&format!(",analytic[{a}={b}]"));
        }
        let sampled = self.rows.first().is_some_and(|r| r.empirical.is_some());
        if sampled {
            for (a, b) in &self.comparisons {
                out.push_str(&format!(",value[{a}={b}],stderr[{a}={b}]"));
            }
        }
        for name in &self.inequalities {
            out.push_str(&format!(",margin[{name}],violated[{name}]"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{}", row.angle_deg));
            for v in &row.analytic {
                out.push_str(&format!(",{v}"));
            }
            if let Some(est) = &row.empirical {
                for e in est {
                    out.push_str(&format!(",{},{}", e.value, e.std_error));
                }
            }
            for m in &row.margins {
                out.push_str(&format!(",{},{}", m.margin, m.violated));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::LhvFamily;

    const A45: f64 = 0.146_446_609_406_726_24;

    fn lemma_plan(n: usize, seed: u64) -> ExperimentPlan {
        ExperimentPlan::with_defaults(
            GeneratorSpec::QmRealist {
                variant: EVariant::MeasuredE,
                mode: RealistMode::LemmaExact,
            },
            n,
            seed,
        )
    }

    #[test]
    fn lemma_exact_plan_reports_the_contradiction() {
        let plan = lemma_plan(200_000, 4242);
        let result = run_experiment(&plan).unwrap();
        let report = result
            .reports
            .iter()
            .find(|r| r.name == InequalityName::DoubleStar)
            .unwrap();
        assert!(report.violated);
        let sigma = (3.0 * 0.25 / plan.n_pairs as f64).sqrt();
        assert!((report.lhs - 0.792_893_218_813_452_5).abs() < 3.0 * sigma);
        // The slot the sampler cannot realize is filled by inference and
        // says so; the other two are measured frequencies.
        use crate::qm::EstimateKind;
        let kinds: Vec<EstimateKind> =
            report.terms.iter().map(|t| t.estimate.kind).collect();
        assert_eq!(
            kinds,
            vec![
                EstimateKind::Empirical,
                EstimateKind::Empirical,
                EstimateKind::Inferred
            ]
        );
        assert!(result.wall_time_s.is_some());
    }

    #[test]
    fn conditional_independence_reports_the_same_assembled_contradiction() {
        let plan = ExperimentPlan::with_defaults(
            GeneratorSpec::QmRealist {
                variant: EVariant::MeasuredE,
                mode: RealistMode::ConditionalIndependence,
            },
            200_000,
            4242,
        );
        let result = run_experiment(&plan).unwrap();
        let report = result
            .reports
            .iter()
            .find(|r| r.name == InequalityName::DoubleStar)
            .unwrap();
        assert!(report.violated);
        let sigma = (3.0 * 0.25 / plan.n_pairs as f64).sqrt();
        assert!((report.lhs - 0.792_893_218_813_452_5).abs() < 3.0 * sigma);
        use crate::qm::EstimateKind;
        assert_eq!(report.terms[1].estimate.kind, EstimateKind::Inferred);
        assert_eq!(report.terms[1].estimate.value, 0.5);
    }

    #[test]
    fn raw_estimates_stay_empirical_and_satisfy_the_inequality() {
        // A single run's own frequencies can never violate the three-term
        // inequality: at least one of the three agreements holds per pair.
        let plan = lemma_plan(50_000, 8);
        let result = run_experiment(&plan).unwrap();
        let value = |a: &str, b: &str| {
            result
                .estimates
                .iter()
                .find(|e| e.pair == (a.to_string(), b.to_string()))
                .map(|e| e.estimate.value)
                .unwrap()
        };
        let raw_lhs = value("P", "E") + value("E", "E'") + value("P", "E'");
        assert!(raw_lhs >= 1.0);
        use crate::qm::EstimateKind;
        assert!(result
            .estimates
            .iter()
            .all(|e| e.estimate.kind == EstimateKind::Empirical));
    }

    #[test]
    fn lhv_plan_never_violates_the_three_term_inequality() {
        let plan = ExperimentPlan::with_defaults(
            GeneratorSpec::Lhv {
                family: LhvFamily::SIGN.to_string(),
            },
            200_000,
            7,
        );
        let result = run_experiment(&plan).unwrap();
        for report in &result.reports {
            assert!(!report.violated, "{:?}", report);
        }
    }

    #[test]
    fn identical_plans_serialize_identically() {
        let plan = lemma_plan(50_000, 99);
        let a = serde_json::to_string(&run_experiment(&plan).unwrap()).unwrap();
        let b = serde_json::to_string(&run_experiment(&plan).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(!a.contains("wall_time"));
    }

    #[test]
    fn plan_validation_catches_bad_inputs() {
        let mut plan = lemma_plan(0, 1);
        assert!(matches!(plan.validate(), Err(Error::ZeroPairs)));
        plan.n_pairs = 10;
        plan.comparisons.push(("P".into(), "Q".into()));
        assert!(matches!(plan.validate(), Err(Error::MissingLabel(_))));
        plan.comparisons.pop();
        plan.k_sigma = -1.0;
        assert!(matches!(plan.validate(), Err(Error::InvalidPlan(_))));
    }

    #[test]
    fn plans_load_from_toml() {
        let text = r#"
generator = "lhv"
family = "sign"
n_pairs = 1000
seed = 5
inequalities = ["double-star"]
comparisons = [["P", "E"], ["E", "E'"], ["E'", "P"]]
"#;
        let plan = ExperimentPlan::from_toml_str(text).unwrap();
        assert_eq!(plan.n_pairs, 1000);
        assert_eq!(plan.inequalities, vec![InequalityName::DoubleStar]);
        assert_eq!(plan.comparisons.len(), 3);
        run_experiment(&plan).unwrap();

        let custom_panel = r#"
generator = "lhv"
n_pairs = 100
seed = 1

[[panel]]
label = "E"
station = "E"
angle_deg = 0.0

[[panel]]
label = "P"
station = "P"
angle_deg = 30.0
"#;
        let plan = ExperimentPlan::from_toml_str(custom_panel).unwrap();
        assert_eq!(plan.panel.labels().count(), 2);
        assert_eq!(plan.comparisons, vec![("E".to_string(), "P".to_string())]);

        assert!(ExperimentPlan::from_toml_str("generator = \"lhv\"").is_err());
        assert!(ExperimentPlan::from_toml_str(
            "generator = \"nope\"\nn_pairs = 1\nseed = 0"
        )
        .is_err());
    }

    #[test]
    fn analytic_sweep_reproduces_the_singlet_law() {
        let mut plan = lemma_plan(0, 1);
        plan.comparisons = vec![("P".to_string(), "E".to_string())];
        plan.inequalities = vec![InequalityName::DoubleStar];
        let angles: Vec<Angle> = [0.0, 45.0, 90.0]
            .iter()
            .map(|&d| Angle::from_degrees(d).unwrap())
            .collect();
        let table = angle_sweep(&plan, "P", &angles).unwrap();
        let values: Vec<f64> = table.rows.iter().map(|r| r.analytic[0]).collect();
        assert!(values[0].abs() < 1e-12);
        assert!((values[1] - A45).abs() < 1e-12);
        assert!((values[2] - 0.5).abs() < 1e-12);
        assert!(table.rows.iter().all(|r| r.empirical.is_none()));
    }

    #[test]
    fn analytic_margin_is_deepest_at_the_reference_geometry() {
        let mut plan = lemma_plan(0, 1);
        plan.inequalities = vec![InequalityName::DoubleStar];
        let angles: Vec<Angle> = (0..=90)
            .map(|d| Angle::from_degrees(d as f64).unwrap())
            .collect();
        let table = angle_sweep(&plan, "P", &angles).unwrap();
        let (argmin, _) = table
            .rows
            .iter()
            .map(|r| (r.angle_deg, r.margins[0].margin))
            .fold((f64::NAN, f64::INFINITY), |acc, (a, m)| {
                if m < acc.1 {
                    (a, m)
                } else {
                    acc
                }
            });
        assert_eq!(argmin, 45.0);
    }

    #[test]
    fn sweep_row_at_the_template_angle_matches_the_fixed_plan() {
        let plan = lemma_plan(20_000, 31);
        let angles = [
            Angle::from_degrees(10.0).unwrap(),
            Angle::from_degrees(45.0).unwrap(),
        ];
        let table = angle_sweep(&plan, "P", &angles).unwrap();
        let fixed = run_experiment(&plan).unwrap();
        let row = &table.rows[1];
        let row_estimates = row.empirical.as_ref().unwrap();
        for (cell, fixed_est) in row_estimates.iter().zip(&fixed.estimates) {
            assert_eq!(cell, &fixed_est.estimate);
        }
    }

    #[test]
    fn empty_angle_list_gives_an_empty_table() {
        let plan = lemma_plan(0, 1);
        let table = angle_sweep(&plan, "P", &[]).unwrap();
        assert!(table.rows.is_empty());
        let csv = table.to_csv();
        assert_eq!(csv.lines().count(), 1);
    }

    #[test]
    fn sweep_csv_has_the_documented_header() {
        let mut plan = lemma_plan(0, 1);
        plan.comparisons = vec![("P".to_string(), "E".to_string())];
        plan.inequalities = vec![InequalityName::DoubleStar];
        let table = angle_sweep(&plan, "P", &[Angle::from_degrees(45.0).unwrap()]).unwrap();
        let csv = table.to_csv();
        assert!(csv.starts_with("angle_deg,analytic[P=E],margin[double-star],violated[double-star]\n"));
    }
}
