use crate::calibrate::generic::{posterior_weight, NumericSettings};
use crate::error::{Error, Result};
use crate::family::LocationFamily;
use crate::loss::LossSpec;

/// Conditional law of `Z = X₍₂₎ − θ₍₂₎` given `U = u` when the locations
/// differ by `θ ≥ 0`.
#[derive(Debug, Clone)]
pub struct ConditionalPosterior {
    family: LocationFamily,
    theta: f64,
    u: f64,
    normalizer: f64,
    settings: NumericSettings,
}

impl ConditionalPosterior {
    pub fn new(
        family: &LocationFamily,
        theta: f64,
        u: f64,
        settings: &NumericSettings,
    ) -> Result<Self> {
        if !(theta >= 0.0) || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "theta must be >= 0, got {theta}"
            )));
        }
        if !(u > 0.0) || !u.is_finite() {
            return Err(Error::InvalidParameter(format!("u must be > 0, got {u}")));
        }
        let normalizer = posterior_weight(family, theta, u).mass(settings)?;
        if !(normalizer > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "conditional density vanishes at theta={theta}, u={u}"
            )));
        }
        Ok(Self {
            family: family.clone(),
            theta,
            u,
            normalizer,
            settings: settings.clone(),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    /// `d(θ, u)`, the integral of the unnormalised density.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn unnormalized(&self, z: f64) -> f64 {
        (posterior_weight(&self.family, self.theta, self.u).f)(z)
    }

    pub fn density(&self, z: f64) -> f64 {
        self.unnormalized(z) / self.normalizer
    }

    pub fn support(&self) -> (f64, f64) {
        let w = posterior_weight(&self.family, self.theta, self.u);
        (w.lo, w.hi)
    }

    pub fn cdf(&self, z: f64) -> Result<f64> {
        let w = posterior_weight(&self.family, self.theta, self.u);
        Ok(w.mass_below(z, &self.settings)? / self.normalizer)
    }

    pub fn mean(&self) -> Result<f64> {
        let w = posterior_weight(&self.family, self.theta, self.u);
        Ok(w.expect(|z| z, &self.settings)? / self.normalizer)
    }

    pub fn median(&self) -> Result<f64> {
        let guess = self.family.quantile(0.5) + 0.5 * self.u;
        posterior_weight(&self.family, self.theta, self.u).half_mass_point(guess, &self.settings)
    }

    /// Minimiser of `E W(Z − c)`.
    pub fn risk_minimizer(&self, loss: &LossSpec) -> Result<f64> {
        let guess = self.family.quantile(0.5) + 0.5 * self.u;
        posterior_weight(&self.family, self.theta, self.u).risk_minimizer(
            loss,
            guess,
            &self.settings,
        )
    }
}
