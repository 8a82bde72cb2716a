//! Standard (location-zero) densities and the observation pair.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc, erfc_inv};

use crate::error::{Error, Result};
use crate::loss::ScalarFn;
use crate::numerics::{integrate, solve_root, QuadSpec, RootSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Normal,
    Exponential,
    Custom,
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normal" | "gaussian" => Ok(FamilyKind::Normal),
            "exponential" | "exp" => Ok(FamilyKind::Exponential),
            other => Err(Error::InvalidParameter(format!(
                "unknown family '{other}' (expected normal or exponential)"
            ))),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::Normal => "normal",
            FamilyKind::Exponential => "exponential",
            FamilyKind::Custom => "custom",
        })
    }
}

struct CustomShape {
    name: String,
    pdf: ScalarFn,
    cdf: Option<ScalarFn>,
    quantile: Option<ScalarFn>,
    lo: f64,
    hi: f64,
    scale: f64,
}

#[derive(Clone)]
enum Shape {
    Normal { sigma: f64 },
    Exponential { sigma: f64 },
    Custom(Arc<CustomShape>),
}

/// The standard density `f` of a location family, with its cdf, quantile
/// function and sampler. The location itself is never stored: a draw at
/// location `θ` is `θ + family.sample(rng)`.
#[derive(Clone)]
pub struct LocationFamily {
    shape: Shape,
}

impl fmt::Debug for LocationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LocationFamily({self})")
    }
}

impl fmt::Display for LocationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            Shape::Normal { sigma } => write!(f, "normal(sigma={sigma})"),
            Shape::Exponential { sigma } => write!(f, "exponential(sigma={sigma})"),
            Shape::Custom(c) => write!(f, "{}", c.name),
        }
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "scale sigma must be positive and finite, got {sigma}"
        )))
    }
}

/// `N(0, σ²)`.
pub fn normal_family(sigma: f64) -> Result<LocationFamily> {
    check_sigma(sigma)?;
    Ok(LocationFamily {
        shape: Shape::Normal { sigma },
    })
}

/// Density `(1/σ) e^{−z/σ}` on `[0, ∞)`.
pub fn exponential_family(sigma: f64) -> Result<LocationFamily> {
    check_sigma(sigma)?;
    Ok(LocationFamily {
        shape: Shape::Exponential { sigma },
    })
}

/// Builder for a user-supplied family. Missing cdf and quantile functions
/// are derived by quadrature and bisection.
pub struct CustomFamilyBuilder {
    name: String,
    pdf: ScalarFn,
    cdf: Option<ScalarFn>,
    quantile: Option<ScalarFn>,
    lo: f64,
    hi: f64,
    scale: f64,
}

impl CustomFamilyBuilder {
    pub fn support(mut self, lo: f64, hi: f64) -> Self {
        self.lo = lo;
        self.hi = hi;
        self
    }

    /// Characteristic length of the density (used for integration maps and
    /// for "large t" limits, which are taken at 50 scales).
    pub fn scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn cdf(mut self, cdf: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.cdf = Some(Arc::new(cdf));
        self
    }

    pub fn quantile(mut self, q: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.quantile = Some(Arc::new(q));
        self
    }

    pub fn build(self) -> Result<LocationFamily> {
        check_sigma(self.scale)?;
        if !(self.lo < self.hi) {
            return Err(Error::InvalidParameter(format!(
                "empty support [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(LocationFamily {
            shape: Shape::Custom(Arc::new(CustomShape {
                name: self.name,
                pdf: self.pdf,
                cdf: self.cdf,
                quantile: self.quantile,
                lo: self.lo,
                hi: self.hi,
                scale: self.scale,
            })),
        })
    }
}

const FALLBACK_TOL: f64 = 1e-10;

// Ten-point Gauss–Legendre rule on [−1, 1] (positive half).
const GL_X: [f64; 5] = [
    0.148_874_338_981_631_210_9,
    0.433_395_394_129_247_190_8,
    0.679_409_568_299_024_406_2,
    0.865_063_366_688_984_510_7,
    0.973_906_528_517_171_720_1,
];
const GL_W: [f64; 5] = [
    0.295_524_224_714_752_870_2,
    0.269_266_719_309_996_355_1,
    0.219_086_362_515_982_044_0,
    0.149_451_349_150_580_593_1,
    0.066_671_344_308_688_137_6,
];

fn gauss_legendre10(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in GL_X.iter().zip(GL_W.iter()) {
        s += w * (f(c - h * x) + f(c + h * x));
    }
    s * h
}

impl LocationFamily {
    pub fn custom(
        name: impl Into<String>,
        pdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> CustomFamilyBuilder {
        CustomFamilyBuilder {
            name: name.into(),
            pdf: Arc::new(pdf),
            cdf: None,
            quantile: None,
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            scale: 1.0,
        }
    }

    pub fn kind(&self) -> FamilyKind {
        match self.shape {
            Shape::Normal { .. } => FamilyKind::Normal,
            Shape::Exponential { .. } => FamilyKind::Exponential,
            Shape::Custom(_) => FamilyKind::Custom,
        }
    }

    pub fn name(&self) -> &str {
        match &self.shape {
            Shape::Normal { .. } => "normal",
            Shape::Exponential { .. } => "exponential",
            Shape::Custom(c) => &c.name,
        }
    }

    /// σ for the built-ins, the declared scale for custom families.
    pub fn scale(&self) -> f64 {
        match &self.shape {
            Shape::Normal { sigma } | Shape::Exponential { sigma } => *sigma,
            Shape::Custom(c) => c.scale,
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        match &self.shape {
            Shape::Normal { sigma } | Shape::Exponential { sigma } => {
                m.insert("sigma".to_string(), *sigma);
            }
            Shape::Custom(c) => {
                m.insert("scale".to_string(), c.scale);
            }
        }
        m
    }

    pub fn support(&self) -> (f64, f64) {
        match &self.shape {
            Shape::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Shape::Exponential { .. } => (0.0, f64::INFINITY),
            Shape::Custom(c) => (c.lo, c.hi),
        }
    }

    #[inline]
    pub fn pdf(&self, z: f64) -> f64 {
        match &self.shape {
            Shape::Normal { sigma } => {
                let x = z / sigma;
                (-0.5 * x * x).exp() / (sigma * (2.0 * PI).sqrt())
            }
            Shape::Exponential { sigma } => {
                if z < 0.0 {
                    0.0
                } else {
                    (-z / sigma).exp() / sigma
                }
            }
            Shape::Custom(c) => {
                if z < c.lo || z > c.hi {
                    0.0
                } else {
                    (c.pdf)(z)
                }
            }
        }
    }

    #[inline]
    pub fn cdf(&self, z: f64) -> f64 {
        match &self.shape {
            Shape::Normal { sigma } => 0.5 * erfc(-z / (sigma * SQRT_2)),
            Shape::Exponential { sigma } => {
                if z <= 0.0 {
                    0.0
                } else {
                    -(-z / sigma).exp_m1()
                }
            }
            Shape::Custom(c) => {
                if z <= c.lo {
                    0.0
                } else if z >= c.hi {
                    1.0
                } else if let Some(cdf) = &c.cdf {
                    cdf(z)
                } else {
                    self.custom_cdf_by_quadrature(c, z)
                }
            }
        }
    }

    /// Upper tail `1 − F(z)` without cancellation for the built-ins.
    #[inline]
    pub fn sf(&self, z: f64) -> f64 {
        match &self.shape {
            Shape::Normal { sigma } => 0.5 * erfc(z / (sigma * SQRT_2)),
            Shape::Exponential { sigma } => {
                if z <= 0.0 {
                    1.0
                } else {
                    (-z / sigma).exp()
                }
            }
            Shape::Custom(_) => 1.0 - self.cdf(z),
        }
    }

    /// `P(a < Z ≤ b) = F(b) − F(a)`, evaluated in a form that keeps relative
    /// accuracy when `b − a` is small or both points sit in a tail.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match &self.shape {
            Shape::Normal { sigma } => {
                if b - a <= 0.5 * sigma {
                    gauss_legendre10(|z| self.pdf(z), a, b)
                } else if a >= 0.0 {
                    self.sf(a) - self.sf(b)
                } else if b <= 0.0 {
                    self.cdf(b) - self.cdf(a)
                } else {
                    0.5 * (erf(b / (sigma * SQRT_2)) - erf(a / (sigma * SQRT_2)))
                }
            }
            Shape::Exponential { sigma } => {
                if b <= 0.0 {
                    return 0.0;
                }
                let a = a.max(0.0);
                (-a / sigma).exp() * -(-(b - a) / sigma).exp_m1()
            }
            Shape::Custom(_) => self.cdf(b) - self.cdf(a),
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        if !(0.0..=1.0).contains(&p) {
            return f64::NAN;
        }
        match &self.shape {
            Shape::Normal { sigma } => -SQRT_2 * sigma * erfc_inv(2.0 * p),
            Shape::Exponential { sigma } => -sigma * (-p).ln_1p(),
            Shape::Custom(c) => {
                if let Some(q) = &c.quantile {
                    q(p)
                } else {
                    self.custom_quantile_by_bisection(c, p)
                }
            }
        }
    }

    /// One draw from the standard density, consuming exactly one `u64`
    /// from `rng` (inverse-cdf sampling).
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(open_unit(rng.next_u64()))
    }

    /// Quadrature hints for integrals against this density.
    pub fn quad_spec(&self, base: &QuadSpec) -> QuadSpec {
        let (lo, hi) = self.support();
        let mut spec = base.clone().with_scale(self.scale());
        spec.split_points = [lo, hi].into_iter().filter(|x| x.is_finite()).collect();
        spec
    }

    fn custom_cdf_by_quadrature(&self, c: &CustomShape, z: f64) -> f64 {
        let spec = QuadSpec::with_tol(FALLBACK_TOL * 1e-2).with_scale(c.scale);
        let pdf = |x: f64| (c.pdf)(x);
        let median_guess = if c.lo.is_finite() { c.lo } else { 0.0 };
        // Integrate from the nearer side so the tail stays accurate.
        let v = if z <= median_guess {
            integrate(pdf, c.lo, z, &spec)
        } else {
            integrate(pdf, z, c.hi, &spec).map(|upper| 1.0 - upper)
        };
        match v {
            Ok(p) => p.clamp(0.0, 1.0),
            Err(_) => f64::NAN,
        }
    }

    fn custom_quantile_by_bisection(&self, c: &CustomShape, p: f64) -> f64 {
        if p == 0.0 {
            return c.lo;
        }
        if p == 1.0 {
            return c.hi;
        }
        let start = if c.lo.is_finite() { c.lo } else { -c.scale };
        let end = if c.hi.is_finite() { c.hi } else { c.scale };
        let spec = RootSpec::with_tol(FALLBACK_TOL);
        solve_root(|x| self.cdf(x) - p, start, end, &spec).unwrap_or(f64::NAN)
    }
}

/// Maps 64 random bits to a double strictly inside (0, 1).
#[inline]
pub fn open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Grid check of the monotone-likelihood-ratio inequality
/// `f(x₁−η₁) f(x₂−η₂) ≥ f(x₁−η₂) f(x₂−η₁)` for all `x₁ < x₂`, `η₁ < η₂`.
pub fn mlr_check(fam: &LocationFamily, x_grid: &[f64], eta_grid: &[f64]) -> bool {
    find_mlr_violation(fam, x_grid, eta_grid).is_none()
}

/// First grid quadruple `(x₁, x₂, η₁, η₂)` violating the MLR inequality.
pub fn find_mlr_violation(
    fam: &LocationFamily,
    x_grid: &[f64],
    eta_grid: &[f64],
) -> Option<(f64, f64, f64, f64)> {
    for (i, &x1) in x_grid.iter().enumerate() {
        for &x2 in &x_grid[i + 1..] {
            if x2 <= x1 {
                continue;
            }
            for (j, &e1) in eta_grid.iter().enumerate() {
                for &e2 in &eta_grid[j + 1..] {
                    if e2 <= e1 {
                        continue;
                    }
                    let lhs = fam.pdf(x1 - e1) * fam.pdf(x2 - e2);
                    let rhs = fam.pdf(x1 - e2) * fam.pdf(x2 - e1);
                    if lhs < rhs - 1e-12 {
                        return Some((x1, x2, e1, e2));
                    }
                }
            }
        }
    }
    None
}

/// The data `(x₁, x₂)` with its order statistics and spacing `U`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationPair {
    pub x1: f64,
    pub x2: f64,
}

impl ObservationPair {
    pub fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    #[inline]
    pub fn x_min(&self) -> f64 {
        self.x1.min(self.x2)
    }

    #[inline]
    pub fn x_max(&self) -> f64 {
        self.x1.max(self.x2)
    }

    #[inline]
    pub fn u(&self) -> f64 {
        self.x_max() - self.x_min()
    }
}
