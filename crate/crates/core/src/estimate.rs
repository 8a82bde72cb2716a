//! Equivariant estimators `X₍₂₎ − φ(U)` of the larger location parameter.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::calibrate::{Calibration, MIN_U};
use crate::error::{Error, Result};
use crate::family::ObservationPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Natural,
    Stein,
    B0,
    BrewsterZidek,
    PitmanNearest,
    PitmanImprovedM0,
    PitmanImprovedC0,
    CustomPhi,
}

impl EstimatorKind {
    /// Every kind computable from a [`Calibration`] alone.
    pub const BUILTIN: [EstimatorKind; 7] = [
        EstimatorKind::Natural,
        EstimatorKind::Stein,
        EstimatorKind::B0,
        EstimatorKind::BrewsterZidek,
        EstimatorKind::PitmanNearest,
        EstimatorKind::PitmanImprovedM0,
        EstimatorKind::PitmanImprovedC0,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorKind::Natural => "natural",
            EstimatorKind::Stein => "stein",
            EstimatorKind::B0 => "b0",
            EstimatorKind::BrewsterZidek => "brewster_zidek",
            EstimatorKind::PitmanNearest => "pitman_nearest",
            EstimatorKind::PitmanImprovedM0 => "pitman_improved_m0",
            EstimatorKind::PitmanImprovedC0 => "pitman_improved_c0",
            EstimatorKind::CustomPhi => "custom_phi",
        }
    }

    /// Shrink `φ(u)` subtracted from `X₍₂₎`.
    pub fn shrink(self, cal: &Calibration, u: f64) -> Result<f64> {
        let u = u.max(MIN_U);
        Ok(match self {
            EstimatorKind::Natural => cal.c0(),
            EstimatorKind::Stein => cal.c0().min(cal.c_zero_u(u)?),
            EstimatorKind::B0 => cal.b0(),
            EstimatorKind::BrewsterZidek => cal.phi_bz(u)?,
            EstimatorKind::PitmanNearest => cal.m0(),
            EstimatorKind::PitmanImprovedM0 => cal.m0().min(cal.m_zero_u(u)?),
            EstimatorKind::PitmanImprovedC0 => cal.c0().min(cal.m_zero_u(u)?),
            EstimatorKind::CustomPhi => {
                return Err(Error::InvalidParameter(
                    "custom_phi needs a shrink function; use custom_equivariant".into(),
                ))
            }
        })
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "natural" | "c0" => EstimatorKind::Natural,
            "stein" | "st" => EstimatorKind::Stein,
            "b0" => EstimatorKind::B0,
            "bz" | "brewster_zidek" => EstimatorKind::BrewsterZidek,
            "pn" | "pitman_nearest" => EstimatorKind::PitmanNearest,
            "pn_improved" | "pn_improved_m0" | "pitman_improved_m0" => EstimatorKind::PitmanImprovedM0,
            "pn_improved_c0" | "pitman_improved_c0" => EstimatorKind::PitmanImprovedC0,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown estimator '{other}' (expected natural, stein, b0, bz, pn, pn_improved_m0, pn_improved_c0)"
                )))
            }
        })
    }
}

/// An estimate `value = x_max − shrink`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub kind: EstimatorKind,
    pub value: f64,
    pub shrink: f64,
}

impl Estimate {
    fn from_shrink(kind: EstimatorKind, obs: &ObservationPair, shrink: f64) -> Self {
        Self {
            kind,
            value: obs.x_max() - shrink,
            shrink,
        }
    }
}

pub fn estimate(kind: EstimatorKind, obs: &ObservationPair, cal: &Calibration) -> Result<Estimate> {
    Ok(Estimate::from_shrink(kind, obs, kind.shrink(cal, obs.u())?))
}

pub fn natural(obs: &ObservationPair, cal: &Calibration) -> Estimate {
    Estimate::from_shrink(EstimatorKind::Natural, obs, cal.c0())
}

pub fn stein(obs: &ObservationPair, cal: &Calibration) -> Result<Estimate> {
    estimate(EstimatorKind::Stein, obs, cal)
}

pub fn b0_estimator(obs: &ObservationPair, cal: &Calibration) -> Estimate {
    Estimate::from_shrink(EstimatorKind::B0, obs, cal.b0())
}

pub fn brewster_zidek(obs: &ObservationPair, cal: &Calibration) -> Result<Estimate> {
    estimate(EstimatorKind::BrewsterZidek, obs, cal)
}

pub fn pitman_nearest(obs: &ObservationPair, cal: &Calibration) -> Estimate {
    Estimate::from_shrink(EstimatorKind::PitmanNearest, obs, cal.m0())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    M0,
    C0,
}

pub fn pitman_improved(
    obs: &ObservationPair,
    cal: &Calibration,
    anchor: Anchor,
) -> Result<Estimate> {
    let kind = match anchor {
        Anchor::M0 => EstimatorKind::PitmanImprovedM0,
        Anchor::C0 => EstimatorKind::PitmanImprovedC0,
    };
    estimate(kind, obs, cal)
}

pub fn custom_equivariant(obs: &ObservationPair, phi: impl Fn(f64) -> f64) -> Estimate {
    Estimate::from_shrink(EstimatorKind::CustomPhi, obs, phi(obs.u()))
}

/// Grid diagnostics for membership of `φ` in the improved class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IerdReport {
    /// `φ` nondecreasing on the grid.
    pub monotone: bool,
    /// `|φ(50σ) − b₀| ≤ 1e−3`.
    pub limit_ok: bool,
    pub limit_gap: f64,
    /// `k₁(φ(t) | t) ≤ 1e−8` at every grid point.
    pub k1_ok: bool,
    pub max_k1: f64,
    pub worst_t: Option<f64>,
    pub pass: bool,
}

const MONOTONE_SLACK: f64 = 1e-9;
const LIMIT_TOL: f64 = 1e-3;
const K1_TOL: f64 = 1e-8;

pub fn ierd_check(
    phi: impl Fn(f64) -> f64,
    cal: &Calibration,
    t_grid: &[f64],
) -> Result<IerdReport> {
    if t_grid.is_empty()
        || t_grid.iter().any(|t| !(*t > 0.0))
        || t_grid.windows(2).any(|w| w[0] > w[1])
    {
        return Err(Error::InvalidParameter(
            "t grid must be sorted and positive".into(),
        ));
    }
    let values: Vec<f64> = t_grid.iter().map(|&t| phi(t)).collect();
    let monotone = values.windows(2).all(|v| v[1] >= v[0] - MONOTONE_SLACK);
    let limit_gap = (phi(50.0 * cal.family().scale()) - cal.b0()).abs();
    let mut max_k1 = f64::NEG_INFINITY;
    let mut worst_t = None;
    for (&t, &v) in t_grid.iter().zip(&values) {
        let k = cal.k1(v, t)?;
        if k > max_k1 {
            max_k1 = k;
            worst_t = Some(t);
        }
    }
    let limit_ok = limit_gap <= LIMIT_TOL;
    let k1_ok = max_k1 <= K1_TOL;
    Ok(IerdReport {
        monotone,
        limit_ok,
        limit_gap,
        k1_ok,
        max_k1,
        worst_t,
        pass: monotone && limit_ok && k1_ok,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::LN_2;

    use proptest::prelude::*;

    use super::*;
    use crate::family::{exponential_family, normal_family};
    use crate::loss::LossSpec;

    fn jute(loss: LossSpec) -> (ObservationPair, Calibration) {
        let fam = exponential_family(10.73).unwrap();
        (
            ObservationPair::new(43.93, 42.66),
            Calibration::new(&fam, &loss).unwrap(),
        )
    }

    #[test]
    fn jute_squared_table() {
        let (obs, cal) = jute(LossSpec::squared());
        assert!((natural(&obs, &cal).value - 33.2).abs() < 1e-9);
        assert!((stein(&obs, &cal).unwrap().value - 37.295).abs() < 1e-9);
        assert!((b0_estimator(&obs, &cal).value - 27.835).abs() < 1e-9);
        assert!((brewster_zidek(&obs, &cal).unwrap().value - 37.94).abs() < 5e-3);
    }

    #[test]
    fn jute_linex_and_absolute() {
        let (obs, cal) = jute(LossSpec::linex(-1.0).unwrap());
        assert!((natural(&obs, &cal).value - 41.47).abs() < 5e-3);
        assert_eq!(stein(&obs, &cal).unwrap().value, natural(&obs, &cal).value);
        let (obs, cal) = jute(LossSpec::absolute());
        assert!((natural(&obs, &cal).value - 36.49).abs() < 5e-3);
        assert!((stein(&obs, &cal).unwrap().value - 38.94).abs() < 5e-3);
        assert!((b0_estimator(&obs, &cal).value - 30.75).abs() < 5e-3);
    }

    #[test]
    fn pitman_examples() {
        let cal =
            Calibration::new(&exponential_family(1.0).unwrap(), &LossSpec::absolute()).unwrap();
        let pn = pitman_nearest(&ObservationPair::new(2.0, 1.0), &cal);
        assert!((pn.value - (2.0 - LN_2)).abs() < 1e-15);
        let imp = pitman_improved(&ObservationPair::new(0.5, 0.2), &cal, Anchor::M0).unwrap();
        assert!((imp.shrink - (0.3 + 0.5 * LN_2)).abs() < 1e-12);
        assert!((imp.value - (0.2 - 0.5 * LN_2)).abs() < 1e-12);

        let normal = Calibration::new(&normal_family(2.0).unwrap(), &LossSpec::squared()).unwrap();
        let obs = ObservationPair::new(1.0, 3.5);
        assert_eq!(pitman_nearest(&obs, &normal).value, 3.5);
        assert_eq!(
            pitman_improved(&obs, &normal, Anchor::M0).unwrap().value,
            3.5
        );
        assert_eq!(
            stein(&obs, &normal).unwrap().value,
            natural(&obs, &normal).value
        );
    }

    #[test]
    fn custom_phi_reproduces_named_estimators() {
        let (obs, cal) = jute(LossSpec::squared());
        assert_eq!(custom_equivariant(&obs, |_| 0.0).value, obs.x_max());
        assert_eq!(
            custom_equivariant(&obs, |_| cal.c0()).value,
            natural(&obs, &cal).value
        );
        let bz = custom_equivariant(&obs, |u| cal.phi_bz(u).unwrap()).value;
        assert_eq!(bz, brewster_zidek(&obs, &cal).unwrap().value);
        assert!(EstimatorKind::CustomPhi.shrink(&cal, 1.0).is_err());
    }

    #[test]
    fn ierd_report_cases() {
        let cal =
            Calibration::new(&exponential_family(1.0).unwrap(), &LossSpec::squared()).unwrap();
        let grid: Vec<f64> = (1..=40).map(|i| i as f64 * 0.1).collect();
        let bz = ierd_check(|t| cal.phi_bz(t).unwrap(), &cal, &grid).unwrap();
        assert!(bz.pass, "{bz:?}");
        assert!(bz.max_k1.abs() < 1e-9);

        // a constant b₀ sits above φ_BZ, where k₁ is negative
        let b0 = ierd_check(|_| cal.b0(), &cal, &grid).unwrap();
        assert!(b0.monotone && b0.limit_ok && b0.k1_ok, "{b0:?}");
        assert!(cal.k1(cal.b0(), 0.1).unwrap() < 0.0);

        let mix = ierd_check(
            |t| 0.5 * cal.phi_bz(t).unwrap() + 0.5 * cal.b0(),
            &cal,
            &grid,
        )
        .unwrap();
        assert!(mix.pass, "{mix:?}");

        // the natural shrink c₀ lies below φ_BZ
        let c0 = ierd_check(|_| cal.c0(), &cal, &grid).unwrap();
        assert!(!c0.limit_ok && !c0.k1_ok);
        assert!(!c0.pass);

        let falling = ierd_check(|t| cal.b0() + 1.0 / t, &cal, &grid).unwrap();
        assert!(!falling.monotone);
        assert!(ierd_check(|t| t, &cal, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn names_round_trip() {
        for kind in EstimatorKind::BUILTIN {
            assert_eq!(kind.as_str().parse::<EstimatorKind>().unwrap(), kind);
        }
        assert_eq!(
            "bz".parse::<EstimatorKind>().unwrap(),
            EstimatorKind::BrewsterZidek
        );
        assert!("mle".parse::<EstimatorKind>().is_err());
    }

    fn calibrations() -> Vec<Calibration> {
        let mut out = Vec::new();
        for loss in [
            LossSpec::squared(),
            LossSpec::linex(0.5).unwrap(),
            LossSpec::absolute(),
        ] {
            out.push(Calibration::new(&exponential_family(1.0).unwrap(), &loss).unwrap());
            out.push(Calibration::new(&normal_family(1.5).unwrap(), &loss).unwrap());
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn equivariant_and_symmetric(x1 in -50.0..50.0f64, x2 in -50.0..50.0f64, c in -100.0..100.0f64) {
            for cal in calibrations() {
                for kind in EstimatorKind::BUILTIN {
                    let base = estimate(kind, &ObservationPair::new(x1, x2), &cal).unwrap();
                    let swapped = estimate(kind, &ObservationPair::new(x2, x1), &cal).unwrap();
                    prop_assert_eq!(base.value, swapped.value);
                    let shifted = estimate(kind, &ObservationPair::new(x1 + c, x2 + c), &cal).unwrap();
                    prop_assert!((shifted.value - (base.value + c)).abs() <= 1e-9 * (1.0 + c.abs() + x1.abs() + x2.abs()));
                    prop_assert_eq!(base.value, ObservationPair::new(x1, x2).x_max() - base.shrink);
                }
            }
        }

        #[test]
        fn improved_estimators_never_shrink_more(x1 in -10.0..10.0f64, x2 in -10.0..10.0f64) {
            let obs = ObservationPair::new(x1, x2);
            for cal in calibrations() {
                prop_assert!(stein(&obs, &cal).unwrap().value >= natural(&obs, &cal).value);
                prop_assert!(brewster_zidek(&obs, &cal).unwrap().value >= b0_estimator(&obs, &cal).value - 1e-9);
                prop_assert!(pitman_improved(&obs, &cal, Anchor::M0).unwrap().value >= pitman_nearest(&obs, &cal).value);
            }
        }
    }
}
