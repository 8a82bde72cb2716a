//! Generic calibration by quadrature and root finding. Works for any
//! family/loss pair; the closed forms in `closed` are checked against it.

use crate::error::Result;
use crate::family::LocationFamily;
use crate::loss::LossSpec;
use crate::numerics::{integrate, solve_root_fallible, QuadSpec, RootSpec};

/// Tolerances shared by every integral and root in a calibration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NumericSettings {
    pub quad: QuadSpec,
    pub root: RootSpec,
}

impl NumericSettings {
    pub fn new(quad_tol: f64, root_tol: f64) -> Self {
        Self {
            quad: QuadSpec::with_tol(quad_tol),
            root: RootSpec::with_tol(root_tol),
        }
    }
}

/// A nonnegative weight function with a known support hull and the points
/// where it may fail to be smooth.
pub(crate) struct Weight<F> {
    pub f: F,
    pub lo: f64,
    pub hi: f64,
    pub splits: Vec<f64>,
    pub scale: f64,
}

impl<F: Fn(f64) -> f64> Weight<F> {
    fn spec(&self, settings: &NumericSettings, extra: &[f64]) -> QuadSpec {
        let mut spec = settings.quad.clone().with_scale(self.scale);
        spec.split_points = self
            .splits
            .iter()
            .chain(extra)
            .copied()
            .filter(|x| x.is_finite())
            .collect();
        spec
    }

    pub fn mass(&self, settings: &NumericSettings) -> Result<f64> {
        Ok(integrate(
            &self.f,
            self.lo,
            self.hi,
            &self.spec(settings, &[]),
        )?)
    }

    /// `∫_{lo}^{c} w`.
    pub fn mass_below(&self, c: f64, settings: &NumericSettings) -> Result<f64> {
        if c <= self.lo {
            return Ok(0.0);
        }
        let c = c.min(self.hi);
        Ok(integrate(&self.f, self.lo, c, &self.spec(settings, &[]))?)
    }

    /// `∫ g(z) w(z) dz`.
    pub fn expect(&self, g: impl Fn(f64) -> f64, settings: &NumericSettings) -> Result<f64> {
        let h = |z: f64| {
            let wz = (self.f)(z);
            if wz == 0.0 {
                0.0
            } else {
                g(z) * wz
            }
        };
        Ok(integrate(h, self.lo, self.hi, &self.spec(settings, &[]))?)
    }

    /// `∫ W′(z − c) w(z) dz`, decreasing in `c` for any bowl-shaped loss.
    pub fn loss_gradient(
        &self,
        loss: &LossSpec,
        c: f64,
        settings: &NumericSettings,
    ) -> Result<f64> {
        let h = |z: f64| {
            let wz = (self.f)(z);
            if wz == 0.0 {
                0.0
            } else {
                loss.w_prime(z - c) * wz
            }
        };
        Ok(integrate(h, self.lo, self.hi, &self.spec(settings, &[c]))?)
    }

    /// The point splitting the weight's mass in half.
    pub fn half_mass_point(&self, guess: f64, settings: &NumericSettings) -> Result<f64> {
        let half = 0.5 * self.mass(settings)?;
        let g = |c: f64| -> Result<f64> { Ok(self.mass_below(c, settings)? - half) };
        let (lo, hi) = self.bracket(guess);
        solve_root_fallible(g, lo, hi, &settings.root)
    }

    /// Minimiser of `∫ W(z − c) w(z) dz`: the root of the gradient, or the
    /// half-mass point for the absolute loss.
    pub fn risk_minimizer(
        &self,
        loss: &LossSpec,
        guess: f64,
        settings: &NumericSettings,
    ) -> Result<f64> {
        if loss.uses_half_mass() {
            return self.half_mass_point(guess, settings);
        }
        let g = |c: f64| self.loss_gradient(loss, c, settings);
        let (lo, hi) = self.bracket(guess);
        solve_root_fallible(g, lo, hi, &settings.root)
    }

    fn bracket(&self, guess: f64) -> (f64, f64) {
        let mut lo = guess - 0.5 * self.scale;
        let mut hi = guess + 0.5 * self.scale;
        if self.lo.is_finite() && hi <= self.lo {
            lo = self.lo;
            hi = self.lo + self.scale;
        }
        if self.hi.is_finite() && lo >= self.hi {
            lo = self.hi - self.scale;
            hi = self.hi;
        }
        (lo, hi)
    }
}

fn finite(xs: impl IntoIterator<Item = f64>) -> Vec<f64> {
    xs.into_iter().filter(|x| x.is_finite()).collect()
}

/// The family density itself.
pub(crate) fn density_weight(family: &LocationFamily) -> Weight<impl Fn(f64) -> f64 + '_> {
    let (lo, hi) = family.support();
    Weight {
        f: move |z| family.pdf(z),
        lo,
        hi,
        splits: finite([lo, hi]),
        scale: family.scale(),
    }
}

/// Unnormalised conditional density of `X₍₂₎ − θ₍₂₎` given `U = u`:
/// `f(z−u+θ) f(z) + f(z−u) f(z+θ)`.
pub(crate) fn posterior_weight(
    family: &LocationFamily,
    theta: f64,
    u: f64,
) -> Weight<impl Fn(f64) -> f64 + '_> {
    let (lo, hi) = family.support();
    let first = (lo.max(lo + u - theta), hi.min(hi + u - theta));
    let second = ((lo + u).max(lo - theta), (hi + u).min(hi - theta));
    let w_lo = first.0.min(second.0);
    let w_hi = first.1.max(second.1);
    Weight {
        f: move |z| {
            family.pdf(z - u + theta) * family.pdf(z) + family.pdf(z - u) * family.pdf(z + theta)
        },
        lo: w_lo,
        hi: w_hi,
        splits: finite([
            lo,
            hi,
            lo + u - theta,
            hi + u - theta,
            lo + u,
            hi + u,
            lo - theta,
            hi - theta,
        ]),
        scale: family.scale(),
    }
}

/// Density of `X₍₂₎ − θ₍₂₎` when the locations differ by `θ`:
/// `g_θ(z) = F(z+θ) f(z) + F(z) f(z+θ)`.
pub(crate) fn max_weight(family: &LocationFamily, theta: f64) -> Weight<impl Fn(f64) -> f64 + '_> {
    let (lo, hi) = family.support();
    Weight {
        f: move |z| family.cdf(z + theta) * family.pdf(z) + family.cdf(z) * family.pdf(z + theta),
        lo,
        hi,
        splits: finite([lo, hi, lo - theta, hi - theta]),
        scale: family.scale(),
    }
}

/// Brewster–Zidek weight `[F(z) − F(z−t)] f(z)`.
pub(crate) fn bz_weight(family: &LocationFamily, t: f64) -> Weight<impl Fn(f64) -> f64 + '_> {
    let (lo, hi) = family.support();
    Weight {
        f: move |z| {
            let fz = family.pdf(z);
            if fz == 0.0 {
                0.0
            } else {
                family.mass_between(z - t, z) * fz
            }
        },
        lo,
        hi,
        splits: finite([lo, hi, lo + t]),
        scale: family.scale(),
    }
}

fn centre(family: &LocationFamily) -> f64 {
    family.quantile(0.5)
}

pub fn c0(family: &LocationFamily, loss: &LossSpec, settings: &NumericSettings) -> Result<f64> {
    density_weight(family).risk_minimizer(loss, centre(family), settings)
}

pub fn c_theta_u(
    family: &LocationFamily,
    loss: &LossSpec,
    theta: f64,
    u: f64,
    settings: &NumericSettings,
) -> Result<f64> {
    posterior_weight(family, theta, u).risk_minimizer(loss, centre(family) + 0.5 * u, settings)
}

pub fn b_theta(
    family: &LocationFamily,
    loss: &LossSpec,
    theta: f64,
    settings: &NumericSettings,
) -> Result<f64> {
    max_weight(family, theta).risk_minimizer(loss, centre(family) + 0.5 * family.scale(), settings)
}

pub fn b0(family: &LocationFamily, loss: &LossSpec, settings: &NumericSettings) -> Result<f64> {
    b_theta(family, loss, 0.0, settings)
}

pub fn phi_bz(
    family: &LocationFamily,
    loss: &LossSpec,
    t: f64,
    settings: &NumericSettings,
) -> Result<f64> {
    bz_weight(family, t).risk_minimizer(loss, centre(family), settings)
}

/// `k₁(c | t) = ∫ W′(z − c) [F(z) − F(z−t)] f(z) dz`.
pub fn k1(
    family: &LocationFamily,
    loss: &LossSpec,
    c: f64,
    t: f64,
    settings: &NumericSettings,
) -> Result<f64> {
    bz_weight(family, t).loss_gradient(loss, c, settings)
}

pub fn m0(family: &LocationFamily, settings: &NumericSettings) -> Result<f64> {
    density_weight(family).half_mass_point(centre(family), settings)
}

pub fn m_theta_u(
    family: &LocationFamily,
    theta: f64,
    u: f64,
    settings: &NumericSettings,
) -> Result<f64> {
    posterior_weight(family, theta, u).half_mass_point(centre(family) + 0.5 * u, settings)
}
