//! Counterfactual augmentation models.
//!
//! Each generator realizes one set of metaphysical assumptions as a concrete
//! sampler over counterfactual records: deterministic local hidden variables,
//! classical realism driven by wave-packet reduction from the P side, and a
//! maximally nonlocal model in which the two never-measured analyzers are
//! statistically independent. Two deliberately broken generators are shipped
//! as negative controls for the causality property checks.
//!
//! No joint law can satisfy all three pairwise agreement targets of the
//! classical-realist reading at once (the feasibility checker proves this),
//! so the realist generator exposes two modes that each satisfy a different
//! subset:
//!
//! * `conditional-independence` — E and E' drawn independently given P, each
//!   with the reduced-state agreement probability. Both P-anchored
//!   agreements match, while the E–E' agreement lands at exactly 0.75.
//! * `lemma-exact` — E' drawn as a fair coin independent of everything,
//!   pinning the E–E' agreement at ½ at the cost of the P–E' agreement.

mod panel;
mod records;

pub use panel::{PanelEntry, PanelEntryEcho, SettingsPanel, Station};
pub use records::{CounterfactualRecord, Run};

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qm::{singlet_agreement, CoincidenceEstimate};
use crate::rng::{fill_chunked, splitmix64, Execution, RunRng};

/// Whether the E-side analyzer is actually read out or left unperformed.
/// The sampled distribution is identical either way; only the measured
/// flags differ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EVariant {
    MeasuredE,
    UnmeasuredE,
}

/// Which pairwise constraint the classical-realist sampler satisfies for the
/// E-side counterfactual column (see the module docs).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RealistMode {
    LemmaExact,
    ConditionalIndependence,
}

/// Serializable description of a generator, used by experiment plans and
/// echoed into results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    QmRealist { variant: EVariant, mode: RealistMode },
    Lhv { family: String },
    NonlocalEacp,
    ControlSignaling,
    ControlEacp,
}

impl GeneratorSpec {
    /// Resolve a name plus optional parameters, as they arrive from a plan
    /// file or command line.
    pub fn from_parts(
        name: &str,
        variant: Option<EVariant>,
        mode: Option<RealistMode>,
        family: Option<&str>,
    ) -> Result<Self> {
        match name {
            "qm-realist" => Ok(GeneratorSpec::QmRealist {
                variant: variant.unwrap_or(EVariant::MeasuredE),
                mode: mode.unwrap_or(RealistMode::LemmaExact),
            }),
            "lhv" => Ok(GeneratorSpec::Lhv {
                family: family.unwrap_or(LhvFamily::SIGN).to_string(),
            }),
            "nonlocal-eacp" => Ok(GeneratorSpec::NonlocalEacp),
            "control-signaling" => Ok(GeneratorSpec::ControlSignaling),
            "control-eacp" => Ok(GeneratorSpec::ControlEacp),
            other => Err(Error::UnknownGenerator(other.to_string())),
        }
    }

    /// The panel this generator expects when none is given explicitly.
    pub fn default_panel(&self) -> SettingsPanel {
        match self {
            GeneratorSpec::QmRealist { .. } | GeneratorSpec::ControlEacp => {
                SettingsPanel::triple_default()
            }
            GeneratorSpec::Lhv { .. } | GeneratorSpec::NonlocalEacp => {
                SettingsPanel::quad_default()
            }
            GeneratorSpec::ControlSignaling => SettingsPanel::triple_default(),
        }
    }

    pub fn build(&self) -> Result<Box<dyn RunGenerator>> {
        Ok(match self {
            GeneratorSpec::QmRealist { variant, mode } => {
                Box::new(QmRealist::new(*variant, *mode))
            }
            GeneratorSpec::Lhv { family } => Box::new(Lhv::new(LhvFamily::by_name(family)?)),
            GeneratorSpec::NonlocalEacp => Box::new(NonlocalEacp),
            GeneratorSpec::ControlSignaling => Box::new(ControlSignaling),
            GeneratorSpec::ControlEacp => Box::new(ControlEacp),
        })
    }
}

/// A deterministic run sampler: `(panel, n, seed)` fixes the output
/// bit-for-bit regardless of execution mode.
pub trait RunGenerator: Sync {
    fn name(&self) -> &str;

    fn generate_with(
        &self,
        panel: &SettingsPanel,
        n: usize,
        seed: u64,
        exec: Execution,
    ) -> Result<Run>;

    fn generate(&self, panel: &SettingsPanel, n: usize, seed: u64) -> Result<Run> {
        self.generate_with(panel, n, seed, Execution::Parallel)
    }

    /// The agreement probability this model's world-view assigns to a pair
    /// of labels, given a run it generated.
    ///
    /// By default this is the measured frequency. Counterfactual
    /// constructions override it for pairs their sampler cannot realize
    /// jointly with the others: there the value is the one the augmentation
    /// licenses (reduced-state agreement, or the no-correlation value ½),
    /// reported with `inferred` provenance. No single run can realize every
    /// constraint at once — that impossibility is the whole point — so a
    /// report assembled from these estimates shows, term by term, which
    /// numbers were sampled and which were inferred.
    fn agreement_estimate(
        &self,
        run: &Run,
        _panel: &SettingsPanel,
        a: &str,
        b: &str,
    ) -> Result<CoincidenceEstimate> {
        run.agreement(a, b)
    }
}

fn coin(rng: &mut RunRng) -> i8 {
    if rng.random::<bool>() {
        1
    } else {
        -1
    }
}

/// Require that `panel` consists of exactly the given labels, in any order,
/// and return their column indices.
fn exact_labels(panel: &SettingsPanel, generator: &str, labels: &[&str]) -> Result<Vec<usize>> {
    for label in panel.labels() {
        if !labels.contains(&label) {
            return Err(Error::UnexpectedLabel(
                label.to_string(),
                generator.to_string(),
            ));
        }
    }
    labels
        .iter()
        .map(|label| {
            panel.require(label).map(|_| {
                panel
                    .entries()
                    .iter()
                    .position(|e| e.setting.label == *label)
                    .expect("label just validated")
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Classical realism via wave-packet reduction
// ---------------------------------------------------------------------------

/// Classical-realist sampler over the triple panel {P, E, E'}.
///
/// Per pair, P is drawn uniformly first; E then agrees with P with the
/// reduced-state probability for its own angle. The E' column follows the
/// selected [`RealistMode`]. Each pair consumes a fixed number of draws, so
/// the P column is unaffected by later E-side setting edits under one seed.
#[derive(Clone, Copy, Debug)]
pub struct QmRealist {
    pub variant: EVariant,
    pub mode: RealistMode,
}

impl QmRealist {
    pub fn new(variant: EVariant, mode: RealistMode) -> Self {
        Self { variant, mode }
    }

    fn measured(&self) -> &'static [&'static str] {
        match self.variant {
            EVariant::MeasuredE => &["P", "E"],
            EVariant::UnmeasuredE => &["P"],
        }
    }
}

impl RunGenerator for QmRealist {
    fn name(&self) -> &str {
        "qm-realist"
    }

    fn generate_with(
        &self,
        panel: &SettingsPanel,
        n: usize,
        seed: u64,
        exec: Execution,
    ) -> Result<Run> {
        let idx = exact_labels(panel, self.name(), &["P", "E", "E'"])?;
        let (ip, ie, ie2) = (idx[0], idx[1], idx[2]);
        let theta_p = panel.angle_of("P")?.radians();
        let agree_e = singlet_agreement(panel.angle_of("E")?.radians() - theta_p);
        let agree_e2 = singlet_agreement(panel.angle_of("E'")?.radians() - theta_p);
        let mode = self.mode;
        let columns = fill_chunked(n, 3, seed, exec, |rng, len, cols| {
            for _ in 0..len {
                let p = coin(rng);
                let e = if rng.random::<f64>() < agree_e { p } else { -p };
                let e2 = match mode {
                    RealistMode::ConditionalIndependence => {
                        if rng.random::<f64>() < agree_e2 {
                            p
                        } else {
                            -p
                        }
                    }
                    RealistMode::LemmaExact => coin(rng),
                };
                cols[ip].push(p);
                cols[ie].push(e);
                cols[ie2].push(e2);
            }
        });
        Run::from_columns(panel, self.measured(), columns)
    }

    /// The slot the selected mode sacrifices is filled by inference: the
    /// reduced-state agreement for P–E' under `lemma-exact`, the
    /// no-correlation value ½ for E–E' under `conditional-independence`.
    fn agreement_estimate(
        &self,
        run: &Run,
        panel: &SettingsPanel,
        a: &str,
        b: &str,
    ) -> Result<CoincidenceEstimate> {
        let pair = (a.min(b), a.max(b));
        match (self.mode, pair) {
            (RealistMode::LemmaExact, ("E'", "P")) => {
                let theta =
                    panel.angle_of("E'")?.radians() - panel.angle_of("P")?.radians();
                Ok(CoincidenceEstimate::inferred(singlet_agreement(theta)))
            }
            (RealistMode::ConditionalIndependence, ("E", "E'")) => {
                Ok(CoincidenceEstimate::inferred(0.5))
            }
            _ => run.agreement(a, b),
        }
    }
}

/// Convenience wrapper matching the generator registry entry.
pub fn generate_qm_realist_run(
    panel: &SettingsPanel,
    n: usize,
    variant: EVariant,
    mode: RealistMode,
    seed: u64,
) -> Result<Run> {
    QmRealist::new(variant, mode).generate(panel, n, seed)
}

// ---------------------------------------------------------------------------
// Local hidden variables
// ---------------------------------------------------------------------------

/// A deterministic local response family: one hidden direction λ on the unit
/// circle per pair, and a response rule that sees only the local station,
/// the local analyzer angle, and λ. Locality is structural — the rule has no
/// access to the remote setting.
#[derive(Clone)]
pub struct LhvFamily {
    name: String,
    response: Arc<dyn Fn(Station, f64, f64) -> i8 + Send + Sync>,
}

impl LhvFamily {
    pub const SIGN: &'static str = "sign";
    pub const SIGN_DOUBLED: &'static str = "sign-doubled";

    /// The canonical sign-response model: the E side answers with the sign
    /// of cos(λ − angle), the P side with its negation. Equal settings are
    /// perfectly anticorrelated; the agreement probability is linear in the
    /// relative angle, θ/π on [0, π].
    pub fn sign() -> Self {
        Self::custom(Self::SIGN, |station, angle, lambda| {
            let s = if (lambda - angle).cos() >= 0.0 { 1 } else { -1 };
            match station {
                Station::E => s,
                Station::P => -s,
            }
        })
    }

    /// Sign responses keyed to the doubled angle; agreement grows twice as
    /// fast, 2θ/π on [0, π/2]. Included as a second registry entry.
    pub fn sign_doubled() -> Self {
        Self::custom(Self::SIGN_DOUBLED, |station, angle, lambda| {
            let s = if (2.0 * (lambda - angle)).cos() >= 0.0 {
                1
            } else {
                -1
            };
            match station {
                Station::E => s,
                Station::P => -s,
            }
        })
    }

    /// Register-your-own entry point. `response(station, angle_rad, lambda)`
    /// must be deterministic and read only its arguments.
    pub fn custom(
        name: impl Into<String>,
        response: impl Fn(Station, f64, f64) -> i8 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            response: Arc::new(response),
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            Self::SIGN => Ok(Self::sign()),
            Self::SIGN_DOUBLED => Ok(Self::sign_doubled()),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }

    pub fn registered() -> &'static [&'static str] {
        &[Self::SIGN, Self::SIGN_DOUBLED]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn respond(&self, station: Station, angle_rad: f64, lambda: f64) -> i8 {
        (self.response)(station, angle_rad, lambda)
    }
}

/// Local hidden-variable sampler: one uniform λ per pair fills every column
/// of the panel through the family's local response rule. There is no
/// counterfactual gap, so every label counts as measured.
pub struct Lhv {
    family: LhvFamily,
}

impl Lhv {
    pub fn new(family: LhvFamily) -> Self {
        Self { family }
    }
}

impl RunGenerator for Lhv {
    fn name(&self) -> &str {
        "lhv"
    }

    fn generate_with(
        &self,
        panel: &SettingsPanel,
        n: usize,
        seed: u64,
        exec: Execution,
    ) -> Result<Run> {
        let entries: Vec<(Station, f64)> = panel
            .entries()
            .iter()
            .map(|e| (e.station, e.setting.angle.radians()))
            .collect();
        let family = self.family.clone();
        let columns = fill_chunked(n, entries.len(), seed, exec, |rng, len, cols| {
            for _ in 0..len {
                let lambda = rng.random::<f64>() * TAU;
                for (k, (station, angle)) in entries.iter().enumerate() {
                    cols[k].push(family.respond(*station, *angle, lambda));
                }
            }
        });
        let measured: Vec<&str> = panel.labels().collect();
        Run::from_columns(panel, &measured, columns)
    }
}

pub fn generate_lhv_run(panel: &SettingsPanel, n: usize, family: &str, seed: u64) -> Result<Run> {
    Lhv::new(LhvFamily::by_name(family)?).generate(panel, n, seed)
}

// ---------------------------------------------------------------------------
// Maximal nonlocality
// ---------------------------------------------------------------------------

/// Strongest-nonlocality sampler over the quad panel {P, P', E, E'}.
///
/// P is uniform; E and E' follow the reduced-state agreement with P for
/// their own angles; P' is a fair coin independent of everything, which
/// makes the pair (E', P') statistically independent — agreement exactly ½
/// in distribution — while the P-anchored agreements keep their reduced-state
/// values. There is no joint law that additionally matches the E–P'
/// agreement; this model keeps the two constraints the construction needs.
pub struct NonlocalEacp;

impl RunGenerator for NonlocalEacp {
    fn name(&self) -> &str {
        "nonlocal-eacp"
    }

    fn generate_with(
        &self,
        panel: &SettingsPanel,
        n: usize,
        seed: u64,
        exec: Execution,
    ) -> Result<Run> {
        let idx = exact_labels(panel, self.name(), &["P", "P'", "E", "E'"])?;
        let (ip, ip2, ie, ie2) = (idx[0], idx[1], idx[2], idx[3]);
        let theta_p = panel.angle_of("P")?.radians();
        let agree_e = singlet_agreement(panel.angle_of("E")?.radians() - theta_p);
        let agree_e2 = singlet_agreement(panel.angle_of("E'")?.radians() - theta_p);
        let columns = fill_chunked(n, 4, seed, exec, |rng, len, cols| {
            for _ in 0..len {
                let p = coin(rng);
                let e = if rng.random::<f64>() < agree_e { p } else { -p };
                let e2 = if rng.random::<f64>() < agree_e2 { p } else { -p };
                let p2 = coin(rng);
                cols[ip].push(p);
                cols[ip2].push(p2);
                cols[ie].push(e);
                cols[ie2].push(e2);
            }
        });
        Run::from_columns(panel, &["P", "E"], columns)
    }

    /// The E–P' agreement is not realized by this sampler (P' is the
    /// independent coin); its value is inferred from the reduced state.
    fn agreement_estimate(
        &self,
        run: &Run,
        panel: &SettingsPanel,
        a: &str,
        b: &str,
    ) -> Result<CoincidenceEstimate> {
        let pair = (a.min(b), a.max(b));
        if pair == ("E", "P'") {
            let theta = panel.angle_of("E")?.radians() - panel.angle_of("P'")?.radians();
            Ok(CoincidenceEstimate::inferred(singlet_agreement(theta)))
        } else {
            run.agreement(a, b)
        }
    }
}

pub fn generate_nonlocal_eacp_run(panel: &SettingsPanel, n: usize, seed: u64) -> Result<Run> {
    NonlocalEacp.generate(panel, n, seed)
}

// ---------------------------------------------------------------------------
// Negative controls
// ---------------------------------------------------------------------------

/// Signaling control: every E-station outcome copies the sign of the P
/// analyzer's angle. The E marginal tracks the remote setting choice, so the
/// no-signaling check must fail on this generator.
pub struct ControlSignaling;

impl RunGenerator for ControlSignaling {
    fn name(&self) -> &str {
        "control-signaling"
    }

    fn generate_with(
        &self,
        panel: &SettingsPanel,
        n: usize,
        seed: u64,
        exec: Execution,
    ) -> Result<Run> {
        let theta_p = panel.angle_of("P")?.radians();
        // Fold to (-π, π]; positive P angle -> +1 on every E column.
        let mut folded = theta_p.rem_euclid(TAU);
        if folded > std::f64::consts::PI {
            folded -= TAU;
        }
        let copy: i8 = if folded > 0.0 { 1 } else { -1 };
        let stations: Vec<Station> = panel.entries().iter().map(|e| e.station).collect();
        let columns = fill_chunked(n, stations.len(), seed, exec, |rng, len, cols| {
            for _ in 0..len {
                for (k, station) in stations.iter().enumerate() {
                    match station {
                        Station::P => cols[k].push(coin(rng)),
                        Station::E => cols[k].push(copy),
                    }
                }
            }
        });
        let measured: Vec<&str> = panel.labels().collect();
        Run::from_columns(panel, &measured, columns)
    }
}

/// Cause-after-effect control: the random stream behind the P column is
/// keyed to the E-side angles, so editing a later E-side setting rewrites
/// the earlier P outcomes. The causal-order check must fail on this
/// generator.
pub struct ControlEacp;

impl RunGenerator for ControlEacp {
    fn name(&self) -> &str {
        "control-eacp"
    }

    fn generate_with(
        &self,
        panel: &SettingsPanel,
        n: usize,
        seed: u64,
        exec: Execution,
    ) -> Result<Run> {
        let idx = exact_labels(panel, self.name(), &["P", "E", "E'"])?;
        let (ip, ie, ie2) = (idx[0], idx[1], idx[2]);
        let theta_p = panel.angle_of("P")?.radians();
        let agree_e = singlet_agreement(panel.angle_of("E")?.radians() - theta_p);
        let agree_e2 = singlet_agreement(panel.angle_of("E'")?.radians() - theta_p);
        let e_bits = panel.angle_of("E")?.radians().to_bits()
            ^ panel.angle_of("E'")?.radians().to_bits().rotate_left(17);
        let tainted_seed = splitmix64(seed ^ e_bits);
        let columns = fill_chunked(n, 3, tainted_seed, exec, |rng, len, cols| {
            for _ in 0..len {
                let p = coin(rng);
                let e = if rng.random::<f64>() < agree_e { p } else { -p };
                let e2 = if rng.random::<f64>() < agree_e2 { p } else { -p };
                cols[ip].push(p);
                cols[ie].push(e);
                cols[ie2].push(e2);
            }
        });
        Run::from_columns(panel, &["P", "E"], columns)
    }
}
