//! Counterfactual record runs.
//!
//! A [`Run`] stores one ±1 column per panel label. Every label has a value in
//! every row — that totality is exactly what a counterfactual augmentation
//! grants — while the `measured` flags record which columns were actually
//! read out rather than inferred. Storage is columnar; [`Run::record`] gives
//! the per-pair view.

use std::io::Write;

use crate::error::{Error, Result};
use crate::models::panel::{SettingsPanel, Station};
use crate::qm::CoincidenceEstimate;

/// A run of counterfactual records over a fixed panel.
#[derive(Clone, Debug, PartialEq)]
pub struct Run {
    labels: Vec<String>,
    stations: Vec<Station>,
    measured: Vec<bool>,
    columns: Vec<Vec<i8>>,
}

/// Per-pair view of a run: a total assignment of ±1 values to every label,
/// plus the subset of labels that were performed measurements.
#[derive(Clone, Debug, PartialEq)]
pub struct CounterfactualRecord {
    pub pair_index: usize,
    pub values: Vec<(String, i8)>,
    pub measured: Vec<String>,
}

impl Run {
    /// Assemble a run from generator output. Columns follow the panel's
    /// entry order; `measured_labels` flags the performed subset.
    pub fn from_columns(
        panel: &SettingsPanel,
        measured_labels: &[&str],
        columns: Vec<Vec<i8>>,
    ) -> Result<Self> {
        assert_eq!(panel.entries().len(), columns.len());
        for label in measured_labels {
            panel.require(label)?;
        }
        let n = columns.first().map_or(0, Vec::len);
        assert!(columns.iter().all(|c| c.len() == n));
        debug_assert!(columns.iter().flatten().all(|&v| v == 1 || v == -1));
        let labels: Vec<String> = panel.labels().map(str::to_string).collect();
        let stations = panel.entries().iter().map(|e| e.station).collect();
        let measured = labels
            .iter()
            .map(|l| measured_labels.contains(&l.as_str()))
            .collect();
        Ok(Self {
            labels,
            stations,
            measured,
            columns,
        })
    }

    pub fn n_pairs(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }

    fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn column(&self, label: &str) -> Result<&[i8]> {
        Ok(&self.columns[self.index_of(label)?])
    }

    pub fn station_of(&self, label: &str) -> Result<Station> {
        Ok(self.stations[self.index_of(label)?])
    }

    pub fn is_measured(&self, label: &str) -> Result<bool> {
        Ok(self.measured[self.index_of(label)?])
    }

    pub fn measured_labels(&self) -> Vec<&str> {
        self.labels
            .iter()
            .zip(&self.measured)
            .filter(|(_, &m)| m)
            .map(|(l, _)| l.as_str())
            .collect()
    }

    /// Columns belonging to one station, as (label, column) pairs.
    pub fn station_columns(&self, station: Station) -> Vec<(&str, &[i8])> {
        self.labels
            .iter()
            .zip(&self.stations)
            .zip(&self.columns)
            .filter(|((_, &s), _)| s == station)
            .map(|((l, _), c)| (l.as_str(), c.as_slice()))
            .collect()
    }

    /// Exact agreement count between two columns, as (agreements, n).
    pub fn agreement_counts(&self, a: &str, b: &str) -> Result<(u64, u64)> {
        let ca = self.column(a)?;
        let cb = self.column(b)?;
        let agreements = ca.iter().zip(cb).filter(|(x, y)| x == y).count() as u64;
        Ok((agreements, ca.len() as u64))
    }

    /// Empirical agreement probability between two columns.
    pub fn agreement(&self, a: &str, b: &str) -> Result<CoincidenceEstimate> {
        let (agreements, n) = self.agreement_counts(a, b)?;
        Ok(CoincidenceEstimate::empirical(agreements, n))
    }

    /// Fraction of +1 entries in a column.
    pub fn marginal_plus(&self, label: &str) -> Result<f64> {
        let col = self.column(label)?;
        let plus = col.iter().filter(|&&v| v == 1).count();
        Ok(plus as f64 / col.len() as f64)
    }

    pub fn record(&self, pair_index: usize) -> CounterfactualRecord {
        assert!(pair_index < self.n_pairs());
        CounterfactualRecord {
            pair_index,
            values: self
                .labels
                .iter()
                .zip(&self.columns)
                .map(|(l, c)| (l.clone(), c[pair_index]))
                .collect(),
            measured: self.measured_labels().iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Negate one column, the ±1 image of complementing a 0/1 sequence.
    ///
    /// An involution: flipping twice restores the run. For any run,
    /// agreement(a, b) before plus agreement(a, b) after sum to exactly 1.
    pub fn parity_flip(&self, label: &str) -> Result<Run> {
        let idx = self.index_of(label)?;
        let mut flipped = self.clone();
        for v in &mut flipped.columns[idx] {
            *v = -*v;
        }
        Ok(flipped)
    }

    /// Write the run as CSV: `pair_index`, one ±1 column per label, then one
    /// 0/1 `measured_<label>` flag column per label.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut header = String::from("pair_index");
        for l in &self.labels {
            header.push(',');
            header.push_str(l);
        }
        for l in &self.labels {
            header.push_str(",measured_");
            header.push_str(l);
        }
        writeln!(out, "{header}")?;
        let flags: Vec<&str> = self
            .measured
            .iter()
            .map(|&m| if m { "1" } else { "0" })
            .collect();
        for i in 0..self.n_pairs() {
            let mut line = i.to_string();
            for c in &self.columns {
                line.push(',');
                line.push_str(if c[i] == 1 { "+1" } else { "-1" });
            }
            for f in &flags {
                line.push(',');
                line.push_str(f);
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_run() -> Run {
        let panel = SettingsPanel::triple_default();
        Run::from_columns(
            &panel,
            &["P", "E"],
            vec![vec![1, 1, -1, -1], vec![1, -1, -1, 1], vec![1, 1, 1, 1]],
        )
        .unwrap()
    }

    #[test]
    fn agreement_counts_matching_entries() {
        let run = tiny_run();
        let est = run.agreement("P", "E").unwrap();
        assert_eq!(est.value, 0.5);
        assert_eq!(est.n_samples, Some(4));
        assert!(run.agreement("P", "nope").is_err());
    }

    #[test]
    fn parity_flip_is_an_involution_and_complements_agreement() {
        let run = tiny_run();
        let flipped = run.parity_flip("E'").unwrap();
        assert_eq!(flipped.parity_flip("E'").unwrap(), run);
        let before = run.agreement("E", "E'").unwrap().value;
        let after = flipped.agreement("E", "E'").unwrap().value;
        assert_eq!(before + after, 1.0);
        // Constant +1 column flips to constant -1.
        assert!(flipped.column("E'").unwrap().iter().all(|&v| v == -1));
        assert!(run.parity_flip("Q").is_err());
    }

    #[test]
    fn records_are_total_over_the_panel() {
        let run = tiny_run();
        let rec = run.record(2);
        assert_eq!(rec.pair_index, 2);
        assert_eq!(rec.values.len(), 3);
        assert_eq!(rec.measured, vec!["P".to_string(), "E".to_string()]);
    }

    #[test]
    fn csv_layout_is_pair_index_columns_then_flags() {
        let run = tiny_run();
        let csv = run.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "pair_index,P,E,E',measured_P,measured_E,measured_E'"
        );
        assert_eq!(lines.next().unwrap(), "0,+1,+1,+1,1,1,0");
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn station_columns_partition_by_station() {
        let run = tiny_run();
        let e_cols = run.station_columns(Station::E);
        assert_eq!(
            e_cols.iter().map(|(l, _)| *l).collect::<Vec<_>>(),
            vec!["E", "E'"]
        );
    }
}
