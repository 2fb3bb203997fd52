//! Analyzer angles in the plane orthogonal to the flight axis.
//!
//! Angles are stored in radians and treated modulo 2π everywhere; degrees are
//! a boundary representation for configuration files and the CLI.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// An analyzer direction, stored in radians.
///
/// Construction rejects non-finite values, so downstream trigonometry never
/// sees NaN or infinity. Two angles equal modulo 2π behave identically in
/// every operation that consumes them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Angle {
    radians: f64,
}

impl Angle {
    pub fn from_radians(radians: f64) -> Result<Self> {
        if radians.is_finite() {
            Ok(Self { radians })
        } else {
            Err(Error::NonFiniteAngle(radians))
        }
    }

    pub fn from_degrees(degrees: f64) -> Result<Self> {
        Self::from_radians(degrees.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.radians
    }

    pub fn degrees(self) -> f64 {
        self.radians.to_degrees()
    }

    /// Canonical representative in [0, 2π).
    pub fn normalized(self) -> f64 {
        self.radians.rem_euclid(TAU)
    }

    /// Unsigned separation folded into [0, π].
    pub fn separation(self, other: Angle) -> f64 {
        let d = (self.radians - other.radians).rem_euclid(TAU);
        d.min(TAU - d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_non_finite() {
        assert!(Angle::from_radians(f64::NAN).is_err());
        assert!(Angle::from_radians(f64::INFINITY).is_err());
        assert!(Angle::from_degrees(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn degree_radian_round_trip() {
        let a = Angle::from_degrees(45.0).unwrap();
        assert!((a.radians() - PI / 4.0).abs() < 1e-15);
        assert!((a.degrees() - 45.0).abs() < 1e-12);
    }

    #[test]
    fn normalization_wraps_to_principal_range() {
        let a = Angle::from_radians(-PI / 2.0).unwrap();
        assert!((a.normalized() - 1.5 * PI).abs() < 1e-12);
        let b = Angle::from_radians(5.0 * TAU + 0.25).unwrap();
        assert!((b.normalized() - 0.25).abs() < 1e-9);
    }

    #[test]
    fn separation_is_symmetric_and_folded() {
        let a = Angle::from_degrees(10.0).unwrap();
        let b = Angle::from_degrees(350.0).unwrap();
        assert!((a.separation(b) - 20.0_f64.to_radians()).abs() < 1e-12);
        assert!((b.separation(a) - 20.0_f64.to_radians()).abs() < 1e-12);
    }
}
