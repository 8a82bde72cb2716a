//! Estimate tables for a single observation pair.

use std::fmt::Write as _;

use serde::Serialize;

use crate::calibrate::Calibration;
use crate::error::Result;
use crate::estimate::{estimate, Estimate, EstimatorKind};
use crate::family::{LocationFamily, ObservationPair};
use crate::loss::LossSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub loss: String,
    pub natural: f64,
    pub stein: f64,
    pub b0: f64,
    pub brewster_zidek: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateTable {
    pub family: String,
    pub x1: f64,
    pub x2: f64,
    pub rows: Vec<TableRow>,
}

/// One row per loss with the natural, Stein, `b₀` and Brewster–Zidek
/// estimates.
pub fn run_estimate_table(
    pair: &ObservationPair,
    family: &LocationFamily,
    losses: &[LossSpec],
) -> Result<EstimateTable> {
    let rows = losses
        .iter()
        .map(|loss| {
            let cal = Calibration::new(family, loss)?;
            let v = |k| estimate(k, pair, &cal).map(|e| e.value);
            Ok(TableRow {
                loss: loss.to_string(),
                natural: v(EstimatorKind::Natural)?,
                stein: v(EstimatorKind::Stein)?,
                b0: v(EstimatorKind::B0)?,
                brewster_zidek: v(EstimatorKind::BrewsterZidek)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EstimateTable {
        family: family.to_string(),
        x1: pair.x1,
        x2: pair.x2,
        rows,
    })
}

impl EstimateTable {
    /// Aligned text rounded to two decimals.
    pub fn to_text(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.loss.len())
            .max()
            .unwrap_or(4)
            .max(4);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "family {}  x1 = {}  x2 = {}",
            self.family, self.x1, self.x2
        );
        let _ = writeln!(
            out,
            "{:<width$}  {:>10}  {:>10}  {:>10}  {:>10}",
            "loss", "natural", "stein", "b0", "bz"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:>10.2}  {:>10.2}  {:>10.2}  {:>10.2}",
                r.loss, r.natural, r.stein, r.b0, r.brewster_zidek
            );
        }
        out
    }
}

/// Every built-in estimator evaluated at `pair`.
pub fn estimate_all(pair: &ObservationPair, cal: &Calibration) -> Result<Vec<Estimate>> {
    EstimatorKind::BUILTIN
        .iter()
        .map(|&k| estimate(k, pair, cal))
        .collect()
}

/// Aligned two-decimal listing of [`estimate_all`] output.
pub fn estimates_to_text(estimates: &[Estimate]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<20}  {:>12}  {:>12}",
        "estimator", "value", "shrink"
    );
    for e in estimates {
        let _ = writeln!(
            out,
            "{:<20}  {:>12.2}  {:>12.4}",
            e.kind.as_str(),
            e.value,
            e.shrink
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::exponential_family;

    #[test]
    fn jute_rows_round_to_the_published_digits() {
        let fam = exponential_family(10.73).unwrap();
        let pair = ObservationPair::new(43.93, 42.66);
        let losses = [LossSpec::squared(), LossSpec::linex(-1.0).unwrap()];
        let table = run_estimate_table(&pair, &fam, &losses).unwrap();
        let text = table.to_text();
        assert!(text.contains("33.20"), "{text}");
        assert!(text.contains("41.47"), "{text}");
        assert!(text.contains("41.52"), "{text}");
        let json = serde_json::to_string(&table).unwrap();
        assert!(json.contains("\"brewster_zidek\""));
    }

    #[test]
    fn listing_covers_every_builtin() {
        let cal =
            Calibration::new(&exponential_family(1.0).unwrap(), &LossSpec::absolute()).unwrap();
        let all = estimate_all(&ObservationPair::new(1.0, 2.0), &cal).unwrap();
        assert_eq!(all.len(), EstimatorKind::BUILTIN.len());
        assert!(estimates_to_text(&all).contains("pitman_improved_c0"));
    }
}
