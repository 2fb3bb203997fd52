//! Event geometry for the two stations and mechanized causality checks.
//!
//! One spatial dimension (the separation axis) and units with c = 1 cover
//! everything needed here: the spacelike-separation test, boosted time
//! ordering for a moving observer, and two run-level property checks — a
//! causal-order check (an earlier station's outcomes must not change when a
//! later station's setting does) and a no-signaling check (a station's
//! marginal must not move with the remote setting choice).

use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::models::{RunGenerator, SettingsPanel, Station};
use crate::rng::{chunk_seed, Execution};

/// A measurement event on the separation axis, in units with c = 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeEvent {
    pub x: f64,
    pub t: f64,
    pub station: Station,
    pub pair_index: usize,
}

impl SpacetimeEvent {
    pub fn new(station: Station, x: f64, t: f64) -> Self {
        Self {
            x,
            t,
            station,
            pair_index: 0,
        }
    }
}

/// An inertial observer moving along the separation axis with velocity β
/// (|β| < 1, units of c).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzObserver {
    beta: f64,
}

impl LorentzObserver {
    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_finite() && beta.abs() < 1.0 {
            Ok(Self { beta })
        } else {
            Err(Error::InvalidConstraint(format!(
                "observer velocity must satisfy |beta| < 1, got {beta}"
            )))
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Time coordinate of an event in this observer's frame, t' = γ(t − βx).
    pub fn boosted_time(&self, event: &SpacetimeEvent) -> f64 {
        let gamma = 1.0 / (1.0 - self.beta * self.beta).sqrt();
        gamma * (event.t - self.beta * event.x)
    }
}

/// True when c²Δt² < Δx², i.e. no light signal connects the events.
pub fn spacelike_separated(a: &SpacetimeEvent, b: &SpacetimeEvent) -> bool {
    let dx = a.x - b.x;
    let dt = a.t - b.t;
    dt * dt < dx * dx
}

/// Which station measures first in a given frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventOrdering {
    /// E before P.
    EFirst,
    /// P before E.
    PFirst,
    Simultaneous,
}

impl EventOrdering {
    /// The station whose measurement comes first, when there is one.
    pub fn earlier(self) -> Option<Station> {
        match self {
            EventOrdering::EFirst => Some(Station::E),
            EventOrdering::PFirst => Some(Station::P),
            EventOrdering::Simultaneous => None,
        }
    }

    pub fn later(self) -> Option<Station> {
        match self {
            EventOrdering::EFirst => Some(Station::P),
            EventOrdering::PFirst => Some(Station::E),
            EventOrdering::Simultaneous => None,
        }
    }
}

/// Ordering of the two measurements as seen by `obs`, with a flag for the
/// degenerate case: for timelike-separated events the ordering is the same
/// in every frame, and the classification is still returned.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub ordering: EventOrdering,
    pub spacelike: bool,
    pub boosted_e_time: f64,
    pub boosted_p_time: f64,
}

/// Compare boosted times of the E and P measurement events for an observer.
pub fn observer_ordering(
    obs: &LorentzObserver,
    e_event: &SpacetimeEvent,
    p_event: &SpacetimeEvent,
) -> OrderingReport {
    let te = obs.boosted_time(e_event);
    let tp = obs.boosted_time(p_event);
    let ordering = if te < tp {
        EventOrdering::EFirst
    } else if tp < te {
        EventOrdering::PFirst
    } else {
        EventOrdering::Simultaneous
    };
    OrderingReport {
        ordering,
        spacelike: spacelike_separated(e_event, p_event),
        boosted_e_time: te,
        boosted_p_time: tp,
    }
}

/// Outcome of the causal-order check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EacpVerdict {
    pub pass: bool,
    pub ordering: EventOrdering,
    pub changed_label: String,
    /// Earlier-station labels whose columns were compared bit-for-bit.
    pub compared_labels: Vec<String>,
    pub n_pairs: usize,
}

/// Check that values already fixed at the earlier station survive a change
/// of choice at the later station.
///
/// The run is regenerated under the same seed with `changed_label` (a
/// later-station setting per the observer's ordering) moved to `new_angle`;
/// the check passes iff every earlier-station column is bit-identical across
/// the two runs. Errors if the events give no later station for this
/// observer, if the label sits at the wrong station, or if the generator is
/// not deterministic under a fixed seed.
pub fn check_eacp(
    generator: &dyn RunGenerator,
    panel: &SettingsPanel,
    n: usize,
    seed: u64,
    obs: &LorentzObserver,
    e_event: &SpacetimeEvent,
    p_event: &SpacetimeEvent,
    changed_label: &str,
    new_angle: Angle,
) -> Result<EacpVerdict> {
    let report = observer_ordering(obs, e_event, p_event);
    let later = report.ordering.later().ok_or(Error::AmbiguousOrdering)?;
    let earlier = report.ordering.earlier().expect("later implies earlier");
    let actual = panel.station_of(changed_label)?;
    if actual != later {
        return Err(Error::WrongStation {
            label: changed_label.to_string(),
            expected: later,
            actual,
        });
    }

    let base = generator.generate(panel, n, seed)?;
    let replay = generator.generate(panel, n, seed)?;
    if base != replay {
        return Err(Error::NonDeterministic(generator.name().to_string()));
    }
    let altered = generator.generate(&panel.with_angle(changed_label, new_angle)?, n, seed)?;

    let mut compared_labels = Vec::new();
    let mut pass = true;
    for (label, column) in base.station_columns(earlier) {
        compared_labels.push(label.to_string());
        if column != altered.column(label)? {
            pass = false;
        }
    }
    Ok(EacpVerdict {
        pass,
        ordering: report.ordering,
        changed_label: changed_label.to_string(),
        compared_labels,
        n_pairs: n,
    })
}

/// One marginal comparison inside a no-signaling verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalComparison {
    pub label: String,
    pub variant_a_deg: f64,
    pub variant_b_deg: f64,
    pub marginal_a: f64,
    pub marginal_b: f64,
    /// |difference| in units of the combined binomial standard error.
    pub z: f64,
}

/// Outcome of the no-signaling check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoSignalingVerdict {
    pub pass: bool,
    pub station: Station,
    pub k_sigma: f64,
    pub comparisons: Vec<MarginalComparison>,
}

/// Compare the marginal distribution at `station` across choices of a
/// remote-station setting.
///
/// The generator runs once per variant angle (independent derived
/// sub-seeds); the check passes iff, for every column at `station` and every
/// variant pair, the marginals differ by at most `k_sigma` combined standard
/// errors.
pub fn check_no_signaling(
    generator: &dyn RunGenerator,
    panel: &SettingsPanel,
    station: Station,
    remote_label: &str,
    variants: &[Angle],
    n: usize,
    seed: u64,
    k_sigma: f64,
) -> Result<NoSignalingVerdict> {
    let remote_station = panel.station_of(remote_label)?;
    if remote_station == station {
        return Err(Error::WrongStation {
            label: remote_label.to_string(),
            expected: match station {
                Station::E => Station::P,
                Station::P => Station::E,
            },
            actual: remote_station,
        });
    }
    if variants.len() < 2 {
        return Err(Error::InvalidConstraint(
            "no-signaling needs at least two remote-setting variants".into(),
        ));
    }

    let mut marginals: Vec<(f64, Vec<(String, f64)>)> = Vec::new();
    for (v, angle) in variants.iter().enumerate() {
        let variant_panel = panel.with_angle(remote_label, *angle)?;
        let run = generator.generate_with(
            &variant_panel,
            n,
            chunk_seed(seed, 0x5151_0000 + v as u64),
            Execution::Parallel,
        )?;
        let cols = run
            .station_columns(station)
            .iter()
            .map(|(label, _)| {
                let m = run.marginal_plus(label)?;
                Ok((label.to_string(), m))
            })
            .collect::<Result<Vec<_>>>()?;
        marginals.push((angle.degrees(), cols));
    }

    let mut comparisons = Vec::new();
    let mut pass = true;
    for a in 0..marginals.len() {
        for b in a + 1..marginals.len() {
            let (deg_a, cols_a) = &marginals[a];
            let (deg_b, cols_b) = &marginals[b];
            for ((label, ma), (_, mb)) in cols_a.iter().zip(cols_b) {
                let var = (ma * (1.0 - ma) + mb * (1.0 - mb)) / n as f64;
                let sigma = var.sqrt().max(f64::EPSILON);
                let z = (ma - mb).abs() / sigma;
                if z > k_sigma {
                    pass = false;
                }
                comparisons.push(MarginalComparison {
                    label: label.clone(),
                    variant_a_deg: *deg_a,
                    variant_b_deg: *deg_b,
                    marginal_a: *ma,
                    marginal_b: *mb,
                    z,
                });
            }
        }
    }
    Ok(NoSignalingVerdict {
        pass,
        station,
        k_sigma,
        comparisons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{
        ControlEacp, ControlSignaling, EVariant, Lhv, LhvFamily, NonlocalEacp, QmRealist,
        RealistMode,
    };

    fn events() -> (SpacetimeEvent, SpacetimeEvent) {
        (
            SpacetimeEvent::new(Station::E, -1.0, 0.0),
            SpacetimeEvent::new(Station::P, 1.0, 0.0),
        )
    }

    #[test]
    fn spacelike_test_matches_hand_values() {
        let (e, p) = events();
        assert!(spacelike_separated(&e, &p));
        let same_place = SpacetimeEvent::new(Station::P, 0.0, 1.0);
        let origin = SpacetimeEvent::new(Station::E, 0.0, 0.0);
        assert!(!spacelike_separated(&origin, &same_place));
        let close = SpacetimeEvent::new(Station::P, 1.0, 1.9);
        assert!(spacelike_separated(&e, &close));
    }

    #[test]
    fn boosted_ordering_flips_with_the_observer_direction() {
        let (e, p) = events();
        let fwd = LorentzObserver::new(0.5).unwrap();
        let report = observer_ordering(&fwd, &e, &p);
        assert_eq!(report.ordering, EventOrdering::PFirst);
        // γ(0 − 0.5·(−1)) = +γ/2 for E, −γ/2 for P.
        let gamma = 1.0 / (1.0f64 - 0.25).sqrt();
        assert!((report.boosted_e_time - 0.5 * gamma).abs() < 1e-12);
        assert!((report.boosted_p_time + 0.5 * gamma).abs() < 1e-12);

        let back = LorentzObserver::new(-0.5).unwrap();
        assert_eq!(observer_ordering(&back, &e, &p).ordering, EventOrdering::EFirst);

        let rest = LorentzObserver::new(0.0).unwrap();
        let report = observer_ordering(&rest, &e, &p);
        assert_eq!(report.ordering, EventOrdering::Simultaneous);
        assert!(report.spacelike);
    }

    #[test]
    fn timelike_order_is_frame_invariant() {
        let first = SpacetimeEvent::new(Station::E, 0.2, 0.0);
        let second = SpacetimeEvent::new(Station::P, 0.0, 5.0);
        for k in -9..=9 {
            let obs = LorentzObserver::new(k as f64 / 10.0).unwrap();
            let report = observer_ordering(&obs, &first, &second);
            assert_eq!(report.ordering, EventOrdering::EFirst);
            assert!(!report.spacelike);
        }
    }

    #[test]
    fn observer_velocity_is_validated() {
        assert!(LorentzObserver::new(1.0).is_err());
        assert!(LorentzObserver::new(-1.2).is_err());
        assert!(LorentzObserver::new(f64::NAN).is_err());
        assert!(LorentzObserver::new(0.999).is_ok());
    }

    #[test]
    fn local_and_reduction_generators_respect_causal_order() {
        let (e, p) = events();
        let p_first = LorentzObserver::new(0.5).unwrap();
        let new_angle = Angle::from_degrees(30.0).unwrap();

        // Hidden variables: any observer, any later-side change.
        let lhv = Lhv::new(LhvFamily::sign());
        let quad = SettingsPanel::quad_default();
        let v = check_eacp(&lhv, &quad, 20_000, 9, &p_first, &e, &p, "E'", new_angle).unwrap();
        assert!(v.pass);
        assert_eq!(v.ordering, EventOrdering::PFirst);
        let e_first = LorentzObserver::new(-0.5).unwrap();
        let v = check_eacp(&lhv, &quad, 20_000, 9, &e_first, &e, &p, "P'", new_angle).unwrap();
        assert!(v.pass);

        // Reduction sampler draws P before consulting any E-side choice.
        let qm = QmRealist::new(EVariant::MeasuredE, RealistMode::LemmaExact);
        let triple = SettingsPanel::triple_default();
        let v = check_eacp(&qm, &triple, 20_000, 9, &p_first, &e, &p, "E", new_angle).unwrap();
        assert!(v.pass);
        assert_eq!(v.compared_labels, vec!["P".to_string()]);

        let nl = NonlocalEacp;
        let v = check_eacp(&nl, &quad, 20_000, 9, &p_first, &e, &p, "E", new_angle).unwrap();
        assert!(v.pass);
    }

    #[test]
    fn eacp_control_fails_the_causal_order_check() {
        let (e, p) = events();
        let p_first = LorentzObserver::new(0.5).unwrap();
        let v = check_eacp(
            &ControlEacp,
            &SettingsPanel::triple_default(),
            20_000,
            9,
            &p_first,
            &e,
            &p,
            "E",
            Angle::from_degrees(30.0).unwrap(),
        )
        .unwrap();
        assert!(!v.pass);
    }

    #[test]
    fn eacp_check_validates_station_and_ordering() {
        let (e, p) = events();
        let rest = LorentzObserver::new(0.0).unwrap();
        let qm = QmRealist::new(EVariant::MeasuredE, RealistMode::LemmaExact);
        let triple = SettingsPanel::triple_default();
        let angle = Angle::from_degrees(30.0).unwrap();
        assert!(matches!(
            check_eacp(&qm, &triple, 100, 1, &rest, &e, &p, "E", angle),
            Err(Error::AmbiguousOrdering)
        ));
        let p_first = LorentzObserver::new(0.5).unwrap();
        assert!(matches!(
            check_eacp(&qm, &triple, 100, 1, &p_first, &e, &p, "P", angle),
            Err(Error::WrongStation { .. })
        ));
    }

    #[test]
    fn physical_generators_pass_no_signaling_and_the_control_fails() {
        let variants = [
            Angle::from_degrees(45.0).unwrap(),
            Angle::from_degrees(-45.0).unwrap(),
        ];
        let triple = SettingsPanel::triple_default();
        let quad = SettingsPanel::quad_default();
        let n = 50_000;

        let qm = QmRealist::new(EVariant::MeasuredE, RealistMode::LemmaExact);
        let v = check_no_signaling(&qm, &triple, Station::E, "P", &variants, n, 3, 3.0).unwrap();
        assert!(v.pass, "{:?}", v.comparisons);

        let lhv = Lhv::new(LhvFamily::sign());
        let v = check_no_signaling(&lhv, &quad, Station::E, "P", &variants, n, 3, 3.0).unwrap();
        assert!(v.pass);

        let v = check_no_signaling(
            &ControlSignaling,
            &triple,
            Station::E,
            "P",
            &variants,
            n,
            3,
            3.0,
        )
        .unwrap();
        assert!(!v.pass);
        assert!(v.comparisons.iter().any(|c| c.z > 100.0));
    }

    #[test]
    fn no_signaling_rejects_a_remote_label_at_the_probed_station() {
        let variants = [Angle::from_degrees(0.0).unwrap(), Angle::from_degrees(90.0).unwrap()];
        let lhv = Lhv::new(LhvFamily::sign());
        assert!(matches!(
            check_no_signaling(
                &lhv,
                &SettingsPanel::quad_default(),
                Station::E,
                "E",
                &variants,
                1000,
                1,
                3.0
            ),
            Err(Error::WrongStation { .. })
        ));
    }
}
