//! Measurement-settings panels for the two stations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::qm::MeasurementSetting;

/// Which measurement station an analyzer belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Station {
    E,
    P,
}

impl fmt::Display for Station {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Station::E => write!(f, "E"),
            Station::P => write!(f, "P"),
        }
    }
}

/// One analyzer of a panel: a labeled direction at a station.
#[derive(Clone, Debug, PartialEq)]
pub struct PanelEntry {
    pub station: Station,
    pub setting: MeasurementSetting,
}

/// The ordered collection of analyzer directions available to both stations.
///
/// Labels are unique across the panel and each station owns at least one
/// entry. The default panels use the reference geometry: E at 0°, E' at 90°,
/// P at +45°, P' at −45°.
#[derive(Clone, Debug, PartialEq)]
pub struct SettingsPanel {
    entries: Vec<PanelEntry>,
}

/// Serializable echo of a panel entry; angles are reported in both units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PanelEntryEcho {
    pub label: String,
    pub station: Station,
    pub angle_deg: f64,
    pub angle_rad: f64,
}

impl SettingsPanel {
    pub fn new(entries: Vec<PanelEntry>) -> Result<Self> {
        for station in [Station::E, Station::P] {
            if !entries.iter().any(|e| e.station == station) {
                return Err(Error::EmptyStation(station));
            }
        }
        for (i, e) in entries.iter().enumerate() {
            if entries[..i].iter().any(|o| o.setting.label == e.setting.label) {
                return Err(Error::DuplicateLabel(e.setting.label.clone()));
            }
        }
        Ok(Self { entries })
    }

    fn from_degrees(spec: &[(&str, Station, f64)]) -> Self {
        let entries = spec
            .iter()
            .map(|(label, station, deg)| PanelEntry {
                station: *station,
                setting: MeasurementSetting::new(*label, Angle::from_degrees(*deg).unwrap()),
            })
            .collect();
        Self::new(entries).unwrap()
    }

    /// P at +45°, E at 0°, E' at 90° — the three-analyzer geometry.
    pub fn triple_default() -> Self {
        Self::from_degrees(&[
            ("P", Station::P, 45.0),
            ("E", Station::E, 0.0),
            ("E'", Station::E, 90.0),
        ])
    }

    /// The triple plus P' at −45° — the four-analyzer geometry.
    pub fn quad_default() -> Self {
        Self::from_degrees(&[
            ("P", Station::P, 45.0),
            ("P'", Station::P, -45.0),
            ("E", Station::E, 0.0),
            ("E'", Station::E, 90.0),
        ])
    }

    pub fn entries(&self) -> &[PanelEntry] {
        &self.entries
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.setting.label.as_str())
    }

    pub fn entry(&self, label: &str) -> Option<&PanelEntry> {
        self.entries.iter().find(|e| e.setting.label == label)
    }

    pub fn require(&self, label: &str) -> Result<&PanelEntry> {
        self.entry(label)
            .ok_or_else(|| Error::MissingLabel(label.to_string()))
    }

    pub fn angle_of(&self, label: &str) -> Result<Angle> {
        Ok(self.require(label)?.setting.angle)
    }

    pub fn station_of(&self, label: &str) -> Result<Station> {
        Ok(self.require(label)?.station)
    }

    pub fn station_labels(&self, station: Station) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.station == station)
            .map(|e| e.setting.label.as_str())
            .collect()
    }

    /// Copy of the panel with one label's angle replaced.
    pub fn with_angle(&self, label: &str, angle: Angle) -> Result<Self> {
        self.require(label)?;
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let mut e = e.clone();
                if e.setting.label == label {
                    e.setting.angle = angle;
                }
                e
            })
            .collect();
        Ok(Self { entries })
    }

    pub fn echo(&self) -> Vec<PanelEntryEcho> {
        self.entries
            .iter()
            .map(|e| PanelEntryEcho {
                label: e.setting.label.clone(),
                station: e.station,
                angle_deg: e.setting.angle.degrees(),
                angle_rad: e.setting.angle.radians(),
            })
            .collect()
    }
}
