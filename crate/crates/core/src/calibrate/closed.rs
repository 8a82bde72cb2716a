//! Closed-form calibrations for the built-in normal and exponential
//! families. Each function returns `None` when no closed form is known for
//! the (family, loss) combination; the caller then falls back to the
//! generic quadrature path.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI, SQRT_2};
use std::sync::Arc;

use crate::family::{normal_family, FamilyKind, LocationFamily};
use crate::loss::{LossKind, LossSpec};

pub type ClosedCurve = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Standard normal pieces used by the closed forms.
fn std_normal() -> LocationFamily {
    normal_family(1.0).expect("unit sigma is valid")
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

fn shape(family: &LocationFamily, loss: &LossSpec) -> Option<(FamilyKind, LossKind, f64, f64)> {
    let kind = family.kind();
    if kind == FamilyKind::Custom || loss.kind() == LossKind::Custom {
        return None;
    }
    Some((
        kind,
        loss.kind(),
        family.scale(),
        loss.linex_a().unwrap_or(0.0),
    ))
}

pub fn c0(family: &LocationFamily, loss: &LossSpec) -> Option<f64> {
    let (fam, l, sigma, a) = shape(family, loss)?;
    Some(match (fam, l) {
        (FamilyKind::Normal, LossKind::Squared | LossKind::Absolute) => 0.0,
        (FamilyKind::Normal, LossKind::Linex) => a * sigma * sigma / 2.0,
        (FamilyKind::Exponential, LossKind::Squared) => sigma,
        (FamilyKind::Exponential, LossKind::Linex) => -(-a * sigma).ln_1p() / a,
        (FamilyKind::Exponential, LossKind::Absolute) => sigma * LN_2,
        _ => return None,
    })
}

pub fn b0(family: &LocationFamily, loss: &LossSpec) -> Option<f64> {
    let (fam, l, sigma, a) = shape(family, loss)?;
    Some(match (fam, l) {
        (FamilyKind::Normal, LossKind::Squared) => sigma / PI.sqrt(),
        (FamilyKind::Normal, LossKind::Linex) => {
            let phi = std_normal().cdf(a * sigma / SQRT_2);
            (LN_2 + a * a * sigma * sigma / 2.0 + phi.ln()) / a
        }
        // median of the maximum of two draws: F(b₀)² = ½
        (FamilyKind::Normal, LossKind::Absolute) => sigma * std_normal().quantile(FRAC_1_SQRT_2),
        (FamilyKind::Exponential, LossKind::Squared) => 1.5 * sigma,
        (FamilyKind::Exponential, LossKind::Linex) => {
            (LN_2 - (-a * sigma).ln_1p() - (2.0 - a * sigma).ln()) / a
        }
        (FamilyKind::Exponential, LossKind::Absolute) => -sigma * (1.0 - FRAC_1_SQRT_2).ln(),
        _ => return None,
    })
}

pub fn m0(family: &LocationFamily) -> Option<f64> {
    match family.kind() {
        FamilyKind::Normal => Some(0.0),
        FamilyKind::Exponential => Some(family.scale() * LN_2),
        FamilyKind::Custom => None,
    }
}

/// `c(0, u)`, the minimiser of the conditional risk at `θ = 0`.
pub fn c_zero_u(family: &LocationFamily, loss: &LossSpec) -> Option<ClosedCurve> {
    let (fam, l, sigma, a) = shape(family, loss)?;
    let f: ClosedCurve = match (fam, l) {
        (FamilyKind::Normal, LossKind::Squared | LossKind::Absolute) => Arc::new(|u| u / 2.0),
        (FamilyKind::Normal, LossKind::Linex) => {
            let shift = a * sigma * sigma / 4.0;
            Arc::new(move |u| u / 2.0 + shift)
        }
        (FamilyKind::Exponential, LossKind::Squared) => Arc::new(move |u| u + sigma / 2.0),
        (FamilyKind::Exponential, LossKind::Linex) => {
            let shift = (LN_2 - (2.0 - a * sigma).ln()) / a;
            Arc::new(move |u| u + shift)
        }
        (FamilyKind::Exponential, LossKind::Absolute) => Arc::new(move |u| u + sigma * LN_2 / 2.0),
        _ => return None,
    };
    Some(f)
}

/// `m(0, u)`, the conditional median of `X₍₂₎ − θ₍₂₎` given `U = u` at `θ = 0`.
pub fn m_zero_u(family: &LocationFamily) -> Option<ClosedCurve> {
    let sigma = family.scale();
    match family.kind() {
        FamilyKind::Normal => Some(Arc::new(|u| u / 2.0)),
        FamilyKind::Exponential => Some(Arc::new(move |u| u + sigma * LN_2 / 2.0)),
        FamilyKind::Custom => None,
    }
}

/// Brewster–Zidek shrink `φ_BZ(t)`.
pub fn phi_bz(family: &LocationFamily, loss: &LossSpec) -> Option<ClosedCurve> {
    let (fam, l, sigma, a) = shape(family, loss)?;
    let f: ClosedCurve = match (fam, l) {
        (FamilyKind::Normal, LossKind::Squared) => Arc::new(move |t| {
            let x = t / (SQRT_2 * sigma);
            // (1/√(2π) − φ(x)) / (Φ(x) − ½) in cancellation-free form
            let num = -std_normal_pdf(0.0) * (-0.5 * x * x).exp_m1();
            let den = 0.5 * statrs::function::erf::erf(x / SQRT_2);
            sigma / SQRT_2 * num / den
        }),
        (FamilyKind::Normal, LossKind::Linex) => {
            let z = std_normal();
            Arc::new(move |t| {
                let scale = SQRT_2 * sigma;
                let upper = a * sigma / SQRT_2;
                let lower = (a * sigma * sigma - t) / scale;
                let num = z.mass_between(lower, upper);
                let den = z.mass_between(-t / scale, 0.0);
                (a * a * sigma * sigma / 2.0 + num.ln() - den.ln()) / a
            })
        }
        (FamilyKind::Exponential, LossKind::Squared) => Arc::new(move |t| {
            let em1 = (-t / sigma).exp_m1();
            let p = (-t / sigma).exp();
            (-3.0 * sigma * em1 - 2.0 * t * p) / (-2.0 * em1)
        }),
        (FamilyKind::Exponential, LossKind::Linex) => {
            let base = LN_2 - (-a * sigma).ln_1p() - (2.0 - a * sigma).ln();
            Arc::new(move |t| {
                let rate = 1.0 / sigma - a;
                let num = (-(-t * rate).exp_m1()).ln();
                let den = (-(-t / sigma).exp_m1()).ln();
                (base + num - den) / a
            })
        }
        // Half-mass point of [F(z) − F(z−t)] f(z); for t < σ ln 2 the median
        // lies beyond t, otherwise inside [0, t].
        (FamilyKind::Exponential, LossKind::Absolute) => Arc::new(move |t| {
            if t < sigma * LN_2 {
                t / 2.0 + sigma * LN_2 / 2.0
            } else {
                let half_mass = -(-t / sigma).exp_m1() / 2.0;
                -sigma * (-half_mass.sqrt()).ln_1p()
            }
        }),
        _ => return None,
    };
    Some(f)
}
