//! Invariant suites run by `ordloc check`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::calibrate::{closed, Calibration, NumericSettings};
use crate::error::{Error, Result};
use crate::estimate::{ierd_check, EstimatorKind};
use crate::family::{exponential_family, normal_family, LocationFamily};
use crate::loss::LossSpec;
use crate::risklab::{dominance_report, gpn_sweep, risk_sweep, theta_range, SweepConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Calibration,
    Dominance,
    Gpn,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "calibration" => Ok(Suite::Calibration),
            "dominance" => Ok(Suite::Dominance),
            "gpn" => Ok(Suite::Gpn),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidParameter(format!(
                "unknown suite '{other}' (expected calibration, dominance, gpn or all)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    /// 5000 replications on a θ step of 0.5.
    Quick,
    /// 50000 replications on a θ step of 0.25.
    Full,
}

impl FromStr for Budget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "quick" => Ok(Budget::Quick),
            "full" => Ok(Budget::Full),
            other => Err(Error::InvalidParameter(format!(
                "unknown budget '{other}' (expected quick or full)"
            ))),
        }
    }
}

impl Budget {
    fn reps(self) -> usize {
        match self {
            Budget::Quick => 5_000,
            Budget::Full => 50_000,
        }
    }

    fn theta_step(self) -> f64 {
        match self {
            Budget::Quick => 0.5,
            Budget::Full => 0.25,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CheckReport {
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    fn record(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.items.push(CheckItem {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            let tag = if item.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {}: {}", item.name, item.detail)?;
        }
        let failed = self.items.iter().filter(|i| !i.passed).count();
        write!(f, "{} checks, {failed} failed", self.items.len())
    }
}

fn losses() -> [LossSpec; 3] {
    [
        LossSpec::squared(),
        LossSpec::linex(1.0).expect("nonzero shape"),
        LossSpec::absolute(),
    ]
}

/// Built-in families paired with each loss. The exponential family under
/// linex(1) uses σ = 0.5 because its constants need aσ < 1.
pub fn builtin_cases() -> Vec<(LocationFamily, LossSpec)> {
    let mut out = Vec::new();
    for loss in losses() {
        out.push((normal_family(1.0).expect("valid sigma"), loss.clone()));
        let sigma = if loss.linex_a().is_some() { 0.5 } else { 1.0 };
        out.push((exponential_family(sigma).expect("valid sigma"), loss));
    }
    out
}

fn tag(fam: &LocationFamily, loss: &LossSpec) -> String {
    format!("{fam}/{loss}")
}

pub fn run_check(suite: Suite, budget: Budget) -> Result<CheckReport> {
    let mut report = CheckReport::default();
    if matches!(suite, Suite::Calibration | Suite::All) {
        calibration_suite(budget, &mut report)?;
    }
    if matches!(suite, Suite::Dominance | Suite::All) {
        dominance_suite(budget, &mut report)?;
    }
    if matches!(suite, Suite::Gpn | Suite::All) {
        gpn_suite(budget, &mut report)?;
    }
    Ok(report)
}

fn calibration_suite(budget: Budget, report: &mut CheckReport) -> Result<()> {
    let grid: &[f64] = match budget {
        Budget::Quick => &[0.0, 1.0, 5.0],
        Budget::Full => &[0.0, 0.5, 1.0, 2.0, 5.0],
    };
    let us: &[f64] = match budget {
        Budget::Quick => &[0.1, 1.0, 5.0],
        Budget::Full => &[0.1, 0.5, 1.0, 2.0, 5.0],
    };
    for (fam, loss) in builtin_cases() {
        let name = tag(&fam, &loss);
        let cal = Calibration::new(&fam, &loss)?;
        let num = Calibration::numeric_only(&fam, &loss, NumericSettings::default())?;

        let mut worst: f64 = 0.0;
        for (cf, nv) in [
            (closed::c0(&fam, &loss), num.c0()),
            (closed::b0(&fam, &loss), num.b0()),
            (closed::m0(&fam), num.m0()),
        ] {
            if let Some(v) = cf {
                worst = worst.max((v - nv).abs());
            }
        }
        for &u in us {
            worst = worst.max((cal.c_zero_u(u)? - num.c_zero_u(u)?).abs());
            worst = worst.max((cal.phi_bz(u)? - num.phi_bz(u)?).abs());
            worst = worst.max((cal.m_zero_u(u)? - num.m_zero_u(u)?).abs());
        }
        report.record(
            format!("calibration/closed_vs_numeric {name}"),
            worst <= 1e-6,
            format!("max gap {worst:.3e} (limit 1e-6)"),
        );

        let mut shrink_gap = f64::NEG_INFINITY;
        let mut median_gap = f64::NEG_INFINITY;
        for &u in us {
            let (c00, m00) = (cal.c_zero_u(u)?, cal.m_zero_u(u)?);
            for &th in grid {
                shrink_gap = shrink_gap.max(cal.c_theta_u(th, u)? - c00);
                median_gap = median_gap.max(cal.m_theta_u(th, u)? - m00);
            }
        }
        report.record(
            format!("calibration/shrinkage_order {name}"),
            shrink_gap <= 1e-8 && median_gap <= 1e-8,
            format!("max c(θ,u)-c(0,u) {shrink_gap:.3e}, max m(θ,u)-m(0,u) {median_gap:.3e}"),
        );

        let sigma = fam.scale();
        let mut band_ok = true;
        for &th in grid.iter().chain(&[50.0 * sigma]) {
            let b = cal.b_theta(th)?;
            band_ok &= cal.c0() - 1e-8 <= b && b <= cal.b0() + 1e-8;
        }
        let far = (cal.b_theta(50.0 * sigma)? - cal.c0()).abs();
        report.record(
            format!("calibration/admissible_band {name}"),
            band_ok && far <= 1e-4,
            format!(
                "band {}, |b(50σ)-c0| {far:.3e}",
                if band_ok { "holds" } else { "broken" }
            ),
        );

        let t_grid: Vec<f64> = (1..=50).map(|i| i as f64 * 0.2 * sigma).collect();
        let ierd = ierd_check(|t| cal.phi_bz(t).unwrap_or(f64::NAN), &cal, &t_grid)?;
        report.record(
            format!("calibration/bz_boundary {name}"),
            ierd.pass,
            format!(
                "monotone {}, |φ(50σ)-b0| {:.3e}, max k1 {:.3e}",
                ierd.monotone, ierd.limit_gap, ierd.max_k1
            ),
        );
    }
    Ok(())
}

fn sweep(
    fam: &LocationFamily,
    loss: &LossSpec,
    budget: Budget,
    estimators: Vec<EstimatorKind>,
) -> SweepConfig {
    let mut cfg = SweepConfig::new(fam.clone(), loss.clone());
    cfg.reps = budget.reps();
    cfg.theta_grid = theta_range(0.0, 5.0, budget.theta_step());
    cfg.estimators = estimators;
    cfg
}

fn dominance_suite(budget: Budget, report: &mut CheckReport) -> Result<()> {
    use EstimatorKind::*;
    for (fam, loss) in builtin_cases() {
        let name = tag(&fam, &loss);
        let curve = risk_sweep(&sweep(
            &fam,
            &loss,
            budget,
            vec![Natural, Stein, B0, BrewsterZidek],
        ))?;
        let stein_applies =
            fam.kind() == crate::family::FamilyKind::Exponential || loss.linex_a().is_some();
        if stein_applies {
            let rep = dominance_report(&curve, Natural, Stein)?;
            report.record(
                format!("dominance/stein_vs_natural {name}"),
                rep.never_worse() && rep.strictly_better_somewhere(),
                format!("overall {}", rep.overall),
            );
        }
        let rep = dominance_report(&curve, B0, BrewsterZidek)?;
        report.record(
            format!("dominance/bz_vs_b0 {name}"),
            rep.never_worse(),
            format!("overall {}", rep.overall),
        );
    }
    Ok(())
}

fn gpn_suite(budget: Budget, report: &mut CheckReport) -> Result<()> {
    use EstimatorKind::*;
    for (fam, loss) in builtin_cases() {
        let name = tag(&fam, &loss);
        let cfg = sweep(&fam, &loss, budget, Vec::new());
        let g = gpn_sweep(&cfg, PitmanImprovedM0, PitmanNearest)?;
        let floor_ok = g.gpn.iter().zip(&g.se).all(|(p, s)| *p >= 0.5 - 2.0 * s);
        let strict = g.gpn.iter().zip(&g.se).any(|(p, s)| *p > 0.5 + 2.0 * s);
        let min = g.gpn.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = g.gpn.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let passed = match fam.kind() {
            crate::family::FamilyKind::Normal => g.gpn.iter().all(|&p| p == 0.5),
            _ => floor_ok && strict,
        };
        report.record(
            format!("gpn/improved_pitman_vs_pitman {name}"),
            passed,
            format!("gpn range [{min:.4}, {max:.4}]"),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names() {
        assert_eq!("ALL".parse::<Suite>().unwrap(), Suite::All);
        assert_eq!("quick".parse::<Budget>().unwrap(), Budget::Quick);
        assert!("most".parse::<Suite>().is_err());
    }

    #[test]
    fn quick_calibration_suite_passes() {
        let report = run_check(Suite::Calibration, Budget::Quick).unwrap();
        assert!(report.passed(), "{report}");
        assert!(report.to_string().contains("checks, 0 failed"));
    }

    #[test]
    fn quick_simulation_suites_pass() {
        let report = run_check(Suite::Dominance, Budget::Quick).unwrap();
        assert!(report.passed(), "{report}");
        let report = run_check(Suite::Gpn, Budget::Quick).unwrap();
        assert!(report.passed(), "{report}");
    }
}
