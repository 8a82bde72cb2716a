//! Calibration constants and curves for equivariant estimators
//! `X₍₂₎ − φ(U)`.
//!
//! Every quantity has a generic quadrature + root path (see [`generic`]).
//! For the built-in normal and exponential families the known closed forms
//! override it.

pub mod closed;
pub mod generic;
mod posterior;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{FamilyKind, LocationFamily};
use crate::loss::{LossKind, LossSpec};

pub use closed::ClosedCurve;
pub use generic::NumericSettings;
pub use posterior::ConditionalPosterior;

/// Smallest spacing used when evaluating the u-indexed curves; ties in the
/// data are evaluated at this value.
pub const MIN_U: f64 = 1e-9;

const CACHE_DIGITS: f64 = 1e12;
const CACHE_CAP: usize = 1 << 16;
const TABLE_NODES: usize = 1536;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Numeric,
    /// Numeric values on a grid, interpolated between nodes.
    Tabulated,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ClosedForm => "closed_form",
            Provenance::Numeric => "numeric",
            Provenance::Tabulated => "tabulated",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Item {
    C0,
    B0,
    M0,
    CZeroU,
    PhiBz,
    MZeroU,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CurveKind {
    CZeroU,
    PhiBz,
    MZeroU,
}

/// Uniform grid on `[0, hi]` with four-point Lagrange interpolation.
struct Table {
    h: f64,
    hi: f64,
    values: Vec<f64>,
}

impl Table {
    fn eval(&self, t: f64) -> Option<f64> {
        if !(t >= 0.0) || t > self.hi {
            return None;
        }
        let n = self.values.len();
        let i = ((t / self.h) as usize).min(n - 2);
        let j0 = i.saturating_sub(1).min(n - 4);
        let x = t / self.h - j0 as f64;
        let y = &self.values[j0..j0 + 4];
        // nodes at 0, 1, 2, 3 in local coordinates
        let l0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
        let l1 = x * (x - 2.0) * (x - 3.0) / 2.0;
        let l2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
        let l3 = x * (x - 1.0) * (x - 2.0) / 6.0;
        Some(l0 * y[0] + l1 * y[1] + l2 * y[2] + l3 * y[3])
    }
}

struct Curve {
    kind: CurveKind,
    closed: Option<ClosedCurve>,
    table: OnceLock<Table>,
    cache: RwLock<HashMap<i64, f64>>,
}

impl Curve {
    fn new(kind: CurveKind, closed: Option<ClosedCurve>) -> Self {
        Self {
            kind,
            closed,
            table: OnceLock::new(),
            cache: RwLock::new(HashMap::new()),
        }
    }

    fn provenance(&self) -> Provenance {
        if self.closed.is_some() {
            Provenance::ClosedForm
        } else if self.table.get().is_some() {
            Provenance::Tabulated
        } else {
            Provenance::Numeric
        }
    }
}

struct Inner {
    family: LocationFamily,
    loss: LossSpec,
    settings: NumericSettings,
    c0: (f64, Provenance),
    b0: (f64, Provenance),
    m0: (f64, Provenance),
    c_zero_u: Curve,
    phi_bz: Curve,
    m_zero_u: Curve,
}

/// Constants `c₀`, `b₀`, `m₀` and the curves `c(0,u)`, `φ_BZ(u)`, `m(0,u)`
/// for one (family, loss) pair. Cheap to clone and safe to share.
#[derive(Clone)]
pub struct Calibration {
    inner: Arc<Inner>,
}

impl fmt::Debug for Calibration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Calibration")
            .field("family", &self.inner.family)
            .field("loss", &self.inner.loss)
            .field("c0", &self.inner.c0)
            .field("b0", &self.inner.b0)
            .field("m0", &self.inner.m0)
            .finish()
    }
}

/// One row of the curve table emitted by `ordloc calibrate`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub u: f64,
    pub c0u: f64,
    pub phi_bz: f64,
    pub m0u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationSummary {
    pub c0: f64,
    pub b0: f64,
    pub m0: f64,
    pub curves: Vec<CurveRow>,
}

fn validate(family: &LocationFamily, loss: &LossSpec) -> Result<()> {
    if family.kind() == FamilyKind::Exponential && loss.kind() == LossKind::Linex {
        let a = loss.linex_a().unwrap_or(0.0);
        if a * family.scale() >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "exponential family with linex loss needs a*sigma < 1, got a={a}, sigma={}",
                family.scale()
            )));
        }
    }
    Ok(())
}

fn wrap(family: &LocationFamily, loss: &LossSpec, err: Error) -> Error {
    match err {
        Error::InvalidParameter(_) | Error::Calibration { .. } => err,
        other => Error::Calibration {
            family: family.to_string(),
            loss: loss.to_string(),
            source: Box::new(other),
        },
    }
}

fn scalar(closed: Option<f64>, numeric: impl FnOnce() -> Result<f64>) -> Result<(f64, Provenance)> {
    match closed {
        Some(v) => Ok((v, Provenance::ClosedForm)),
        None => Ok((numeric()?, Provenance::Numeric)),
    }
}

impl Calibration {
    pub fn new(family: &LocationFamily, loss: &LossSpec) -> Result<Self> {
        Self::with_settings(family, loss, NumericSettings::default())
    }

    pub fn with_settings(
        family: &LocationFamily,
        loss: &LossSpec,
        settings: NumericSettings,
    ) -> Result<Self> {
        Self::build(family, loss, settings, true)
    }

    /// Ignores closed forms; every item comes from the generic path.
    pub fn numeric_only(
        family: &LocationFamily,
        loss: &LossSpec,
        settings: NumericSettings,
    ) -> Result<Self> {
        Self::build(family, loss, settings, false)
    }

    fn build(
        family: &LocationFamily,
        loss: &LossSpec,
        settings: NumericSettings,
        closed_forms: bool,
    ) -> Result<Self> {
        validate(family, loss)?;
        let pick = |v: Option<f64>| if closed_forms { v } else { None };
        let pick_curve = |v: Option<ClosedCurve>| if closed_forms { v } else { None };
        let build = || -> Result<Inner> {
            let c0 = scalar(pick(closed::c0(family, loss)), || {
                generic::c0(family, loss, &settings)
            })?;
            let b0 = scalar(pick(closed::b0(family, loss)), || {
                generic::b0(family, loss, &settings)
            })?;
            let m0 = scalar(pick(closed::m0(family)), || generic::m0(family, &settings))?;
            Ok(Inner {
                family: family.clone(),
                loss: loss.clone(),
                settings: settings.clone(),
                c0,
                b0,
                m0,
                c_zero_u: Curve::new(
                    CurveKind::CZeroU,
                    pick_curve(closed::c_zero_u(family, loss)),
                ),
                phi_bz: Curve::new(CurveKind::PhiBz, pick_curve(closed::phi_bz(family, loss))),
                m_zero_u: Curve::new(CurveKind::MZeroU, pick_curve(closed::m_zero_u(family))),
            })
        };
        let inner = build().map_err(|e| wrap(family, loss, e))?;
        Ok(Self {
            inner: Arc::new(inner),
        })
    }

    pub fn family(&self) -> &LocationFamily {
        &self.inner.family
    }

    pub fn loss(&self) -> &LossSpec {
        &self.inner.loss
    }

    pub fn settings(&self) -> &NumericSettings {
        &self.inner.settings
    }

    pub fn c0(&self) -> f64 {
        self.inner.c0.0
    }

    pub fn b0(&self) -> f64 {
        self.inner.b0.0
    }

    pub fn m0(&self) -> f64 {
        self.inner.m0.0
    }

    pub fn provenance(&self, item: Item) -> Provenance {
        match item {
            Item::C0 => self.inner.c0.1,
            Item::B0 => self.inner.b0.1,
            Item::M0 => self.inner.m0.1,
            Item::CZeroU => self.inner.c_zero_u.provenance(),
            Item::PhiBz => self.inner.phi_bz.provenance(),
            Item::MZeroU => self.inner.m_zero_u.provenance(),
        }
    }

    /// `c(0, u)`.
    pub fn c_zero_u(&self, u: f64) -> Result<f64> {
        self.curve(&self.inner.c_zero_u, u)
    }

    /// `φ_BZ(t)`.
    pub fn phi_bz(&self, t: f64) -> Result<f64> {
        self.curve(&self.inner.phi_bz, t)
    }

    /// `m(0, u)`.
    pub fn m_zero_u(&self, u: f64) -> Result<f64> {
        self.curve(&self.inner.m_zero_u, u)
    }

    pub fn c_theta_u(&self, theta: f64, u: f64) -> Result<f64> {
        check_theta(theta)?;
        if theta == 0.0 {
            return self.c_zero_u(u);
        }
        let (fam, loss) = (&self.inner.family, &self.inner.loss);
        generic::c_theta_u(fam, loss, theta, u.max(MIN_U), &self.inner.settings)
            .map_err(|e| wrap(fam, loss, e))
    }

    pub fn m_theta_u(&self, theta: f64, u: f64) -> Result<f64> {
        check_theta(theta)?;
        if theta == 0.0 {
            return self.m_zero_u(u);
        }
        let fam = &self.inner.family;
        generic::m_theta_u(fam, theta, u.max(MIN_U), &self.inner.settings)
            .map_err(|e| wrap(fam, &self.inner.loss, e))
    }

    pub fn b_theta(&self, theta: f64) -> Result<f64> {
        check_theta(theta)?;
        if theta == 0.0 {
            return Ok(self.b0());
        }
        let (fam, loss) = (&self.inner.family, &self.inner.loss);
        generic::b_theta(fam, loss, theta, &self.inner.settings).map_err(|e| wrap(fam, loss, e))
    }

    /// `k₁(c | t)`; nonpositive exactly when `c ≥ φ_BZ(t)`.
    pub fn k1(&self, c: f64, t: f64) -> Result<f64> {
        let (fam, loss) = (&self.inner.family, &self.inner.loss);
        generic::k1(fam, loss, c, t.max(MIN_U), &self.inner.settings)
            .map_err(|e| wrap(fam, loss, e))
    }

    /// Tabulates every curve lacking a closed form on `[0, u_max]` so that
    /// Monte Carlo sweeps avoid a root solve per draw. Values beyond `u_max`
    /// are still computed exactly.
    pub fn prepare_for_sweep(&self, u_max: f64) -> Result<()> {
        if !(u_max > 0.0) || !u_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "u_max must be positive, got {u_max}"
            )));
        }
        for curve in [
            &self.inner.c_zero_u,
            &self.inner.phi_bz,
            &self.inner.m_zero_u,
        ] {
            if curve.closed.is_some() || curve.table.get().is_some() {
                continue;
            }
            let h = u_max / (TABLE_NODES - 1) as f64;
            let values = (0..TABLE_NODES)
                .map(|i| self.exact(curve.kind, i as f64 * h))
                .collect::<Result<Vec<_>>>()?;
            let _ = curve.table.set(Table {
                h,
                hi: u_max,
                values,
            });
        }
        Ok(())
    }

    /// Curve values at each `u`, as printed by `ordloc calibrate`.
    pub fn summary(&self, us: &[f64]) -> Result<CalibrationSummary> {
        let curves = us
            .iter()
            .map(|&u| {
                Ok(CurveRow {
                    u,
                    c0u: self.c_zero_u(u)?,
                    phi_bz: self.phi_bz(u)?,
                    m0u: self.m_zero_u(u)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CalibrationSummary {
            c0: self.c0(),
            b0: self.b0(),
            m0: self.m0(),
            curves,
        })
    }

    fn curve(&self, curve: &Curve, u: f64) -> Result<f64> {
        if u.is_nan() || u < 0.0 {
            return Err(Error::InvalidParameter(format!("u must be >= 0, got {u}")));
        }
        let u = u.max(MIN_U);
        if let Some(f) = &curve.closed {
            return Ok(f(u));
        }
        if let Some(v) = curve.table.get().and_then(|t| t.eval(u)) {
            return Ok(v);
        }
        let key = (u * CACHE_DIGITS).round() as i64;
        if let Some(v) = curve.cache.read().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let v = self.exact(curve.kind, key as f64 / CACHE_DIGITS)?;
        let mut cache = curve.cache.write().expect("cache lock");
        if cache.len() < CACHE_CAP {
            cache.insert(key, v);
        }
        Ok(v)
    }

    fn exact(&self, kind: CurveKind, u: f64) -> Result<f64> {
        let (fam, loss, s) = (&self.inner.family, &self.inner.loss, &self.inner.settings);
        let u = u.max(MIN_U);
        let v = match kind {
            CurveKind::CZeroU => generic::c_theta_u(fam, loss, 0.0, u, s),
            CurveKind::PhiBz => generic::phi_bz(fam, loss, u, s),
            CurveKind::MZeroU => generic::m_theta_u(fam, 0.0, u, s),
        };
        v.map_err(|e| wrap(fam, loss, e))
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta >= 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "theta must be >= 0, got {theta}"
        )))
    }
}

fn check_u(u: f64) -> Result<()> {
    if u > 0.0 && u.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("u must be > 0, got {u}")))
    }
}

pub fn c0(family: &LocationFamily, loss: &LossSpec) -> Result<f64> {
    validate(family, loss)?;
    match closed::c0(family, loss) {
        Some(v) => Ok(v),
        None => generic::c0(family, loss, &NumericSettings::default())
            .map_err(|e| wrap(family, loss, e)),
    }
}

pub fn b0(family: &LocationFamily, loss: &LossSpec) -> Result<f64> {
    validate(family, loss)?;
    match closed::b0(family, loss) {
        Some(v) => Ok(v),
        None => generic::b0(family, loss, &NumericSettings::default())
            .map_err(|e| wrap(family, loss, e)),
    }
}

pub fn m0(family: &LocationFamily) -> Result<f64> {
    Ok(closed::m0(family).unwrap_or_else(|| family.quantile(0.5)))
}

pub fn c_theta_u(family: &LocationFamily, loss: &LossSpec, theta: f64, u: f64) -> Result<f64> {
    validate(family, loss)?;
    check_theta(theta)?;
    check_u(u)?;
    if theta == 0.0 {
        if let Some(f) = closed::c_zero_u(family, loss) {
            return Ok(f(u));
        }
    }
    generic::c_theta_u(family, loss, theta, u, &NumericSettings::default())
        .map_err(|e| wrap(family, loss, e))
}

pub fn b_theta(family: &LocationFamily, loss: &LossSpec, theta: f64) -> Result<f64> {
    validate(family, loss)?;
    check_theta(theta)?;
    if theta == 0.0 {
        return b0(family, loss);
    }
    generic::b_theta(family, loss, theta, &NumericSettings::default())
        .map_err(|e| wrap(family, loss, e))
}

pub fn phi_bz(family: &LocationFamily, loss: &LossSpec, t: f64) -> Result<f64> {
    validate(family, loss)?;
    check_u(t)?;
    match closed::phi_bz(family, loss) {
        Some(f) => Ok(f(t)),
        None => generic::phi_bz(family, loss, t, &NumericSettings::default())
            .map_err(|e| wrap(family, loss, e)),
    }
}

pub fn m_theta_u(family: &LocationFamily, theta: f64, u: f64) -> Result<f64> {
    check_theta(theta)?;
    check_u(u)?;
    if theta == 0.0 {
        if let Some(f) = closed::m_zero_u(family) {
            return Ok(f(u));
        }
    }
    generic::m_theta_u(family, theta, u, &NumericSettings::default())
}
