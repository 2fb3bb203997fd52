//! Exact predictions for spin-½ singlet pairs.
//!
//! Everything in this module is specific to the two-particle singlet state:
//! the spin-½ Malus law for identically prepared particles, the singlet
//! agreement probability, the explicit four-entry joint table, and a
//! two-step sampler that mimics wave-packet reduction (first side drawn
//! uniformly, second side drawn from the reduced product state).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Error, Result};

/// An analyzer direction together with a short display label such as
/// `"E"`, `"E'"`, `"P"`, `"P'"`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSetting {
    pub label: String,
    pub angle: Angle,
}

impl MeasurementSetting {
    pub fn new(label: impl Into<String>, angle: Angle) -> Self {
        Self {
            label: label.into(),
            angle,
        }
    }
}

/// Measured ±1 spin results for one pair: `e` at station E, `p` at station P.
///
/// Outcomes are coded ±1 throughout the crate. Sources that flip a 0/1-coded
/// outcome (like the complement of a binary sequence) correspond here to
/// negation of the ±1 value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomePair {
    pub e: i8,
    pub p: i8,
}

impl OutcomePair {
    pub fn new(e: i8, p: i8) -> Result<Self> {
        if (e == 1 || e == -1) && (p == 1 || p == -1) {
            Ok(Self { e, p })
        } else {
            Err(Error::InvalidConstraint(format!(
                "outcomes must be +1 or -1, got e={e}, p={p}"
            )))
        }
    }
}

/// How a coincidence probability was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateKind {
    /// Closed-form value; `std_error` is zero.
    Analytic,
    /// Frequency over a finite run; `std_error` is the binomial standard error.
    Empirical,
    /// Value assigned to an unperformed measurement by a counterfactual
    /// augmentation rather than by direct observation.
    Inferred,
}

/// A probability of agreement between two ±1 sequences, with provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceEstimate {
    pub value: f64,
    pub std_error: f64,
    pub kind: EstimateKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<u64>,
}

impl CoincidenceEstimate {
    /// Closed-form probability. Values a hair outside [0, 1] from floating
    /// point rounding are clamped back onto the interval.
    pub fn analytic(value: f64) -> Self {
        Self {
            value: value.clamp(0.0, 1.0),
            std_error: 0.0,
            kind: EstimateKind::Analytic,
            n_samples: None,
        }
    }

    /// Counterfactually assigned probability (same numeric contract as
    /// [`CoincidenceEstimate::analytic`], different provenance).
    pub fn inferred(value: f64) -> Self {
        Self {
            kind: EstimateKind::Inferred,
            ..Self::analytic(value)
        }
    }

    /// Frequency `agreements / n` with binomial standard error
    /// `sqrt(v(1-v)/n)`.
    pub fn empirical(agreements: u64, n: u64) -> Self {
        assert!(n > 0, "empirical estimate over an empty run");
        assert!(agreements <= n);
        let value = agreements as f64 / n as f64;
        Self {
            value,
            std_error: (value * (1.0 - value) / n as f64).sqrt(),
            kind: EstimateKind::Empirical,
            n_samples: Some(n),
        }
    }

    /// Validate an externally supplied probability.
    pub fn checked(value: f64, kind: EstimateKind) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidProbability(value));
        }
        Ok(Self {
            value,
            std_error: 0.0,
            kind,
            n_samples: None,
        })
    }
}

/// Spin-½ Malus law: agreement probability cos²(θ/2) between a preparation
/// axis and an analyzer at relative angle θ.
pub fn malus_same_prep_coincidence(theta: Angle) -> CoincidenceEstimate {
    CoincidenceEstimate::analytic((theta.radians() / 2.0).cos().powi(2))
}

/// Singlet agreement probability (1 − cos θ)/2 at relative angle
/// θ = angle(a) − angle(b).
///
/// Depends only on the angle difference: the singlet state is rotationally
/// invariant, so shifting both settings by a common offset changes nothing.
pub fn singlet_coincidence(a: &MeasurementSetting, b: &MeasurementSetting) -> CoincidenceEstimate {
    CoincidenceEstimate::analytic(singlet_agreement(a.angle.radians() - b.angle.radians()))
}

/// Agreement probability for a relative angle given in radians.
pub fn singlet_agreement(theta: f64) -> f64 {
    ((1.0 - theta.cos()) / 2.0).clamp(0.0, 1.0)
}

/// The four-entry joint law P(e, p) = (1 − e·p·cos θ)/4 for the singlet
/// state at relative angle θ.
///
/// The standard completion consistent with uniform marginals and the
/// correlation ⟨e·p⟩ = −cos θ; only this table reproduces both the Malus
/// agreement probability and perfect anticorrelation at θ = 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingletJoint {
    /// cos θ for the relative angle θ this table was built at.
    pub cos_theta: f64,
}

impl SingletJoint {
    /// Probability of the outcome pair (e, p); panics on values outside ±1.
    pub fn prob(&self, e: i8, p: i8) -> f64 {
        assert!(e == 1 || e == -1);
        assert!(p == 1 || p == -1);
        ((1.0 - (e as f64) * (p as f64) * self.cos_theta) / 4.0).clamp(0.0, 1.0)
    }

    /// The table as ((e, p), probability) entries in a fixed order.
    pub fn table(&self) -> [((i8, i8), f64); 4] {
        [
            ((1, 1), self.prob(1, 1)),
            ((1, -1), self.prob(1, -1)),
            ((-1, 1), self.prob(-1, 1)),
            ((-1, -1), self.prob(-1, -1)),
        ]
    }

    /// P(e = p), the coincidence probability implied by the table.
    pub fn coincidence(&self) -> f64 {
        self.prob(1, 1) + self.prob(-1, -1)
    }

    /// ⟨e·p⟩ implied by the table.
    pub fn correlation(&self) -> f64 {
        self.table()
            .iter()
            .map(|((e, p), q)| (*e as f64) * (*p as f64) * q)
            .sum()
    }

    /// Marginal P(e = +1); always ½ regardless of the other side's setting.
    pub fn marginal_e_plus(&self) -> f64 {
        self.prob(1, 1) + self.prob(1, -1)
    }

    /// Marginal P(p = +1).
    pub fn marginal_p_plus(&self) -> f64 {
        self.prob(1, 1) + self.prob(-1, 1)
    }
}

/// Joint outcome table for settings `a` (station E) and `b` (station P).
pub fn singlet_joint_distribution(a: &MeasurementSetting, b: &MeasurementSetting) -> SingletJoint {
    SingletJoint {
        cos_theta: (a.angle.radians() - b.angle.radians()).cos(),
    }
}

/// Draw one outcome pair by wave-packet reduction.
///
/// The P side is measured first and comes out uniform; the reduction leaves
/// the E-side particle prepared opposite to `p` along `b`, so the E outcome
/// follows the Malus law at relative angle θ = angle(a) − angle(b):
/// e = −p with probability cos²(θ/2), e = +p otherwise. The resulting joint
/// law equals [`singlet_joint_distribution`]. Exactly two draws are taken
/// from `rng` per call.
pub fn sample_pair_sequential(
    a: &MeasurementSetting,
    b: &MeasurementSetting,
    rng: &mut impl Rng,
) -> OutcomePair {
    let p: i8 = if rng.random::<bool>() { 1 } else { -1 };
    let theta = a.angle.radians() - b.angle.radians();
    let anti = (theta / 2.0).cos().powi(2);
    let e = if rng.random::<f64>() < anti { -p } else { p };
    OutcomePair { e, p }
}
