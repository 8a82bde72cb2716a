//! Bowl-shaped invariant losses `W(a − θ₍₂₎)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar function handle used for custom losses and families.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Squared,
    Linex,
    Absolute,
    Custom,
}

impl LossKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LossKind::Squared => "squared",
            LossKind::Linex => "linex",
            LossKind::Absolute => "absolute",
            LossKind::Custom => "custom",
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "squared" | "sq" | "l1" => Ok(LossKind::Squared),
            "linex" | "l2" => Ok(LossKind::Linex),
            "absolute" | "abs" | "l3" => Ok(LossKind::Absolute),
            other => Err(Error::InvalidParameter(format!(
                "unknown loss '{other}' (expected squared, linex or absolute)"
            ))),
        }
    }
}

#[derive(Clone)]
enum Shape {
    Squared,
    Linex { a: f64 },
    Absolute,
    Custom { w: ScalarFn, w_prime: ScalarFn },
}

/// An immutable loss `W` together with its derivative `W′`.
///
/// For the absolute loss `W′(t) = sign(t)` with `W′(0) = 0`; calibrations
/// under that loss use half-mass (median) equations instead of `W′` roots.
#[derive(Clone)]
pub struct LossSpec {
    shape: Shape,
}

impl fmt::Debug for LossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            Shape::Linex { a } => write!(f, "LossSpec(linex, a = {a})"),
            _ => write!(f, "LossSpec({})", self.kind()),
        }
    }
}

impl fmt::Display for LossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            Shape::Linex { a } => write!(f, "linex(a={a})"),
            _ => write!(f, "{}", self.kind()),
        }
    }
}

/// Builds one of the named losses. `a` is the linex shape and is required
/// (and must be nonzero) for [`LossKind::Linex`].
pub fn make_loss(kind: LossKind, a: Option<f64>) -> Result<LossSpec> {
    let shape = match kind {
        LossKind::Squared => Shape::Squared,
        LossKind::Absolute => Shape::Absolute,
        LossKind::Linex => {
            let a = a.ok_or_else(|| {
                Error::InvalidParameter("linex loss requires the shape parameter a".into())
            })?;
            if a == 0.0 || !a.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "linex shape must be finite and nonzero, got {a}"
                )));
            }
            Shape::Linex { a }
        }
        LossKind::Custom => {
            return Err(Error::InvalidParameter(
                "custom losses are built with LossSpec::custom".into(),
            ))
        }
    };
    Ok(LossSpec { shape })
}

impl LossSpec {
    pub fn squared() -> Self {
        Self {
            shape: Shape::Squared,
        }
    }

    pub fn absolute() -> Self {
        Self {
            shape: Shape::Absolute,
        }
    }

    pub fn linex(a: f64) -> Result<Self> {
        make_loss(LossKind::Linex, Some(a))
    }

    /// A user-supplied loss. Both `w` and its derivative are required; use
    /// [`check_bowl`] to validate the shape on a probe grid.
    pub fn custom<W, D>(w: W, w_prime: D) -> Self
    where
        W: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            shape: Shape::Custom {
                w: Arc::new(w),
                w_prime: Arc::new(w_prime),
            },
        }
    }

    pub fn kind(&self) -> LossKind {
        match self.shape {
            Shape::Squared => LossKind::Squared,
            Shape::Linex { .. } => LossKind::Linex,
            Shape::Absolute => LossKind::Absolute,
            Shape::Custom { .. } => LossKind::Custom,
        }
    }

    /// Linex shape parameter, if any.
    pub fn linex_a(&self) -> Option<f64> {
        match self.shape {
            Shape::Linex { a } => Some(a),
            _ => None,
        }
    }

    #[inline]
    pub fn w(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::Squared => t * t,
            Shape::Linex { a } => {
                let at = a * t;
                // e^{at} − at − 1 without cancellation near 0
                at.exp_m1() - at
            }
            Shape::Absolute => t.abs(),
            Shape::Custom { w, .. } => w(t),
        }
    }

    #[inline]
    pub fn w_prime(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::Squared => 2.0 * t,
            Shape::Linex { a } => a * (a * t).exp_m1(),
            Shape::Absolute => {
                if t > 0.0 {
                    1.0
                } else if t < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            Shape::Custom { w_prime, .. } => w_prime(t),
        }
    }

    /// True for losses whose calibration equations are median equations.
    pub fn uses_half_mass(&self) -> bool {
        matches!(self.shape, Shape::Absolute)
    }
}

/// Probe-grid check of the bowl conditions: `W(0) = 0`, `W` strictly
/// decreasing left of 0 and strictly increasing right of it, and `W′`
/// nondecreasing across the grid.
pub fn check_bowl(loss: &LossSpec, grid: &[f64]) -> bool {
    if grid.len() < 3 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return false;
    }
    if !grid.contains(&0.0) || grid[0] >= 0.0 || grid[grid.len() - 1] <= 0.0 {
        return false;
    }
    if loss.w(0.0) != 0.0 {
        return false;
    }
    let values: Vec<f64> = grid.iter().map(|&t| loss.w(t)).collect();
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return false;
    }
    for (pair, vals) in grid.windows(2).zip(values.windows(2)) {
        let (t0, t1) = (pair[0], pair[1]);
        if t1 <= 0.0 && vals[1] >= vals[0] {
            return false;
        }
        if t0 >= 0.0 && vals[1] <= vals[0] {
            return false;
        }
    }
    let slopes: Vec<f64> = grid.iter().map(|&t| loss.w_prime(t)).collect();
    slopes.windows(2).all(|s| s[1] >= s[0])
}
