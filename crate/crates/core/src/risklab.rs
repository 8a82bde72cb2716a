//! Monte Carlo risk and Pitman-nearness curves over `θ = θ₍₂₎ − θ₍₁₎`.
//!
//! Draw `(θ index i, replication r)` always comes from ChaCha8 stream `i`
//! at word position `4r`, so every estimator sees the same pairs and the
//! result does not depend on how blocks are scheduled.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::calibrate::{Calibration, NumericSettings};
use crate::error::{Error, Result};
use crate::estimate::EstimatorKind;
use crate::family::{open_unit, LocationFamily, ObservationPair};
use crate::loss::LossSpec;

pub const DEFAULT_REPS: usize = 50_000;
pub const DEFAULT_SEED: u64 = 42;
pub const MIN_REPS: usize = 1000;
/// Loss differences at or below this count as ties.
pub const TIE_TOL: f64 = 1e-12;

const BLOCK: usize = 1000;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub theta_grid: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    pub estimators: Vec<EstimatorKind>,
    pub loss: LossSpec,
    pub family: LocationFamily,
    /// `θ₁`; the sweep places the second location at `θ₁ + θ`.
    pub location: f64,
    pub settings: NumericSettings,
}

impl SweepConfig {
    /// Defaults: grid `0:5:0.25`, 50000 replications, seed 42 and the
    /// natural, Stein, `b₀` and Brewster–Zidek estimators.
    pub fn new(family: LocationFamily, loss: LossSpec) -> Self {
        Self {
            theta_grid: theta_range(0.0, 5.0, 0.25),
            reps: DEFAULT_REPS,
            seed: DEFAULT_SEED,
            estimators: vec![
                EstimatorKind::Natural,
                EstimatorKind::Stein,
                EstimatorKind::B0,
                EstimatorKind::BrewsterZidek,
            ],
            loss,
            family,
            location: 0.0,
            settings: NumericSettings::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.reps < MIN_REPS {
            return Err(Error::InvalidParameter(format!(
                "reps must be at least {MIN_REPS}, got {}",
                self.reps
            )));
        }
        if self.theta_grid.is_empty()
            || self
                .theta_grid
                .iter()
                .any(|t| !(*t >= 0.0) || !t.is_finite())
        {
            return Err(Error::InvalidParameter(
                "theta grid must be nonempty and nonnegative".into(),
            ));
        }
        if !self.location.is_finite() {
            return Err(Error::InvalidParameter("location must be finite".into()));
        }
        Ok(())
    }
}

/// `lo, lo+step, …` up to `hi` inclusive (with a half-step allowance for
/// rounding).
pub fn theta_range(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || hi < lo {
        return vec![lo];
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

/// Estimate value as a function of the data and the true `θ₍₂₎`.
pub type RuleFn = Arc<dyn Fn(&ObservationPair, f64) -> f64 + Send + Sync>;

/// An estimator evaluated in a sweep. Custom rules may look at the true
/// parameter, which is only meaningful for diagnostics.
#[derive(Clone)]
pub enum Rule {
    Kind(EstimatorKind),
    Custom { name: String, f: RuleFn },
}

impl Rule {
    pub fn name(&self) -> String {
        match self {
            Rule::Kind(k) => k.as_str().to_string(),
            Rule::Custom { name, .. } => name.clone(),
        }
    }

    fn value(&self, obs: &ObservationPair, theta_max: f64, cal: &Calibration) -> Result<f64> {
        match self {
            Rule::Kind(k) => Ok(obs.x_max() - k.shrink(cal, obs.u())?),
            Rule::Custom { f, .. } => Ok(f(obs, theta_max)),
        }
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rule({})", self.name())
    }
}

/// Running means and co-moments of a fixed-length vector.
#[derive(Debug, Clone)]
struct Moments {
    n: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(k: usize) -> Self {
        Self {
            n: 0.0,
            mean: vec![0.0; k],
            m2: vec![0.0; k * k],
        }
    }

    fn push(&mut self, x: &[f64], delta: &mut [f64]) {
        let k = self.mean.len();
        self.n += 1.0;
        for i in 0..k {
            delta[i] = x[i] - self.mean[i];
            self.mean[i] += delta[i] / self.n;
        }
        for i in 0..k {
            for j in 0..k {
                self.m2[i * k + j] += delta[i] * (x[j] - self.mean[j]);
            }
        }
    }

    fn merge(mut self, other: &Moments) -> Self {
        let k = self.mean.len();
        let n = self.n + other.n;
        let d: Vec<f64> = (0..k).map(|i| other.mean[i] - self.mean[i]).collect();
        let w = self.n * other.n / n;
        for i in 0..k {
            for j in 0..k {
                self.m2[i * k + j] += other.m2[i * k + j] + d[i] * d[j] * w;
            }
            self.mean[i] += d[i] * other.n / n;
        }
        self.n = n;
        self
    }

    /// Sample covariance matrix.
    fn covariance(&self) -> Vec<Vec<f64>> {
        let k = self.mean.len();
        (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| self.m2[i * k + j] / (self.n - 1.0))
                    .collect()
            })
            .collect()
    }
}

/// Generator positioned at replication `rep` of stream `stream`; each
/// replication consumes exactly four 32-bit words.
fn block_rng(seed: u64, stream: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(4 * rep as u128);
    rng
}

fn draw_pair(family: &LocationFamily, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> ObservationPair {
    let e1 = family.quantile(open_unit(rng.next_u64()));
    let e2 = family.quantile(open_unit(rng.next_u64()));
    ObservationPair::new(lo + e1, hi + e2)
}

/// Calibration with the sweep's u-range tabulated where no closed form exists.
fn sweep_calibration(cfg: &SweepConfig) -> Result<Calibration> {
    let cal = Calibration::with_settings(&cfg.family, &cfg.loss, cfg.settings.clone())?;
    let theta_max = cfg.theta_grid.iter().cloned().fold(0.0, f64::max);
    let spread = cfg.family.quantile(1.0 - 1e-7) - cfg.family.quantile(1e-7);
    cal.prepare_for_sweep(theta_max + spread)?;
    Ok(cal)
}

/// Per-θ moments of the vector produced by `score` on each draw.
fn simulate<S>(cfg: &SweepConfig, k: usize, score: S) -> Result<Vec<Moments>>
where
    S: Fn(&ObservationPair, f64, &mut [f64]) -> Result<()> + Sync,
{
    let blocks = cfg.reps.div_ceil(BLOCK);
    let jobs: Vec<(usize, usize)> = (0..cfg.theta_grid.len())
        .flat_map(|i| (0..blocks).map(move |b| (i, b)))
        .collect();
    let parts = jobs
        .par_iter()
        .map(|&(i, b)| -> Result<Moments> {
            let theta = cfg.theta_grid[i];
            let (lo, hi) = (cfg.location, cfg.location + theta);
            let mut acc = Moments::new(k);
            let mut x = vec![0.0; k];
            let mut delta = vec![0.0; k];
            let mut rng = block_rng(cfg.seed, i as u64, b * BLOCK);
            for _ in b * BLOCK..((b + 1) * BLOCK).min(cfg.reps) {
                let obs = draw_pair(&cfg.family, &mut rng, lo, hi);
                score(&obs, hi, &mut x)?;
                acc.push(&x, &mut delta);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts
        .chunks(blocks)
        .map(|chunk| chunk[1..].iter().fold(chunk[0].clone(), |a, b| a.merge(b)))
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct RiskCurve {
    pub theta: Vec<f64>,
    pub estimators: Vec<String>,
    /// `risk[e][i]` for estimator `e` at `theta[i]`.
    pub risk: Vec<Vec<f64>>,
    pub se: Vec<Vec<f64>>,
    /// Sample covariance of the per-draw losses at each θ.
    pub covariance: Vec<Vec<Vec<f64>>>,
    pub reps: usize,
    pub seed: u64,
}

impl RiskCurve {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.estimators.iter().position(|e| e == name)
    }

    pub fn risk_of(&self, kind: EstimatorKind) -> Option<&[f64]> {
        self.index_of(kind.as_str())
            .map(|e| self.risk[e].as_slice())
    }

    /// `risk[a] − risk[b]` at each θ with its paired standard error.
    pub fn paired_difference(&self, a: usize, b: usize) -> Vec<(f64, f64)> {
        let n = self.reps as f64;
        (0..self.theta.len())
            .map(|i| {
                let c = &self.covariance[i];
                let var = (c[a][a] + c[b][b] - 2.0 * c[a][b]).max(0.0);
                (self.risk[a][i] - self.risk[b][i], (var / n).sqrt())
            })
            .collect()
    }

    /// CSV with header `theta,estimator,risk,se,reps,seed`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["theta", "estimator", "risk", "se", "reps", "seed"])?;
        for i in 0..self.theta.len() {
            for (e, name) in self.estimators.iter().enumerate() {
                w.write_record([
                    fmt_float(self.theta[i]),
                    name.clone(),
                    fmt_float(self.risk[e][i]),
                    fmt_float(self.se[e][i]),
                    self.reps.to_string(),
                    self.seed.to_string(),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

/// Seventeen significant digits, enough to round-trip any double.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn risk_sweep(cfg: &SweepConfig) -> Result<RiskCurve> {
    let rules: Vec<Rule> = cfg.estimators.iter().map(|&k| Rule::Kind(k)).collect();
    risk_sweep_rules(cfg, &rules)
}

/// Risk sweep over arbitrary rules, all evaluated on the same draws.
pub fn risk_sweep_rules(cfg: &SweepConfig, rules: &[Rule]) -> Result<RiskCurve> {
    cfg.validate()?;
    if rules.is_empty() {
        return Err(Error::InvalidParameter("no estimators requested".into()));
    }
    let cal = sweep_calibration(cfg)?;
    let loss = &cfg.loss;
    let moments = simulate(cfg, rules.len(), |obs, theta_max, x| {
        for (slot, rule) in x.iter_mut().zip(rules) {
            *slot = loss.w(rule.value(obs, theta_max, &cal)? - theta_max);
        }
        Ok(())
    })?;
    let k = rules.len();
    let n = cfg.reps as f64;
    let mut risk = vec![Vec::new(); k];
    let mut se = vec![Vec::new(); k];
    let mut covariance = Vec::new();
    for m in &moments {
        let cov = m.covariance();
        for e in 0..k {
            risk[e].push(m.mean[e]);
            se[e].push((cov[e][e] / n).sqrt());
        }
        covariance.push(cov);
    }
    Ok(RiskCurve {
        theta: cfg.theta_grid.clone(),
        estimators: rules.iter().map(Rule::name).collect(),
        risk,
        se,
        covariance,
        reps: cfg.reps,
        seed: cfg.seed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GpnCurve {
    pub theta: Vec<f64>,
    pub gpn: Vec<f64>,
    pub tie_fraction: Vec<f64>,
    pub se: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
}

impl GpnCurve {
    /// CSV with header `theta,gpn,tie_fraction,se,reps,seed`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["theta", "gpn", "tie_fraction", "se", "reps", "seed"])?;
        for i in 0..self.theta.len() {
            w.write_record([
                fmt_float(self.theta[i]),
                fmt_float(self.gpn[i]),
                fmt_float(self.tie_fraction[i]),
                fmt_float(self.se[i]),
                self.reps.to_string(),
                self.seed.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

/// `P[L(δ₁) < L(δ₂)] + ½ P[L(δ₁) = L(δ₂)]` at each θ. The configured
/// estimator list is ignored.
pub fn gpn_sweep(cfg: &SweepConfig, est1: EstimatorKind, est2: EstimatorKind) -> Result<GpnCurve> {
    cfg.validate()?;
    let cal = sweep_calibration(cfg)?;
    let loss = &cfg.loss;
    let moments = simulate(cfg, 2, |obs, theta_max, x| {
        let l1 = loss.w(obs.x_max() - est1.shrink(&cal, obs.u())? - theta_max);
        let l2 = loss.w(obs.x_max() - est2.shrink(&cal, obs.u())? - theta_max);
        let tie = (l1 - l2).abs() <= TIE_TOL;
        x[0] = if tie {
            0.5
        } else if l1 < l2 {
            1.0
        } else {
            0.0
        };
        x[1] = if tie { 1.0 } else { 0.0 };
        Ok(())
    })?;
    let n = cfg.reps as f64;
    Ok(GpnCurve {
        theta: cfg.theta_grid.clone(),
        gpn: moments.iter().map(|m| m.mean[0]).collect(),
        tie_fraction: moments.iter().map(|m| m.mean[1]).collect(),
        se: moments
            .iter()
            .map(|m| (m.covariance()[0][0] / n).sqrt())
            .collect(),
        reps: cfg.reps,
        seed: cfg.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Dominates,
    WithinNoise,
    Violated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Dominates => "dominates",
            Verdict::WithinNoise => "within_noise",
            Verdict::Violated => "violated",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DominancePoint {
    pub theta: f64,
    /// `risk(challenger) − risk(baseline)`.
    pub difference: f64,
    pub se: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct DominanceReport {
    pub baseline: String,
    pub challenger: String,
    pub points: Vec<DominancePoint>,
    /// `Violated` if any point is, else `Dominates` if any point is.
    pub overall: Verdict,
}

impl DominanceReport {
    /// No point has the challenger worse by more than two paired se.
    pub fn never_worse(&self) -> bool {
        self.points.iter().all(|p| p.verdict != Verdict::Violated)
    }

    pub fn strictly_better_somewhere(&self) -> bool {
        self.points.iter().any(|p| p.verdict == Verdict::Dominates)
    }
}

/// Two-standard-error comparison of `challenger` against `baseline`.
pub fn dominance_report(
    curve: &RiskCurve,
    baseline: EstimatorKind,
    challenger: EstimatorKind,
) -> Result<DominanceReport> {
    let find = |k: EstimatorKind| {
        curve.index_of(k.as_str()).ok_or_else(|| {
            Error::InvalidParameter(format!("estimator {k} is not in the risk curve"))
        })
    };
    let (b, c) = (find(baseline)?, find(challenger)?);
    let points: Vec<DominancePoint> = curve
        .paired_difference(c, b)
        .into_iter()
        .zip(&curve.theta)
        .map(|((difference, se), &theta)| {
            let verdict = if difference < 0.0 && difference <= -2.0 * se {
                Verdict::Dominates
            } else if difference > 0.0 && difference > 2.0 * se {
                Verdict::Violated
            } else {
                Verdict::WithinNoise
            };
            DominancePoint {
                theta,
                difference,
                se,
                verdict,
            }
        })
        .collect();
    let overall = if points.iter().any(|p| p.verdict == Verdict::Violated) {
        Verdict::Violated
    } else if points.iter().any(|p| p.verdict == Verdict::Dominates) {
        Verdict::Dominates
    } else {
        Verdict::WithinNoise
    };
    Ok(DominanceReport {
        baseline: baseline.to_string(),
        challenger: challenger.to_string(),
        points,
        overall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{exponential_family, normal_family};

    fn small(family: LocationFamily, loss: LossSpec, reps: usize) -> SweepConfig {
        let mut cfg = SweepConfig::new(family, loss);
        cfg.reps = reps;
        cfg.theta_grid = vec![0.0, 1.0, 3.0];
        cfg
    }

    #[test]
    fn moments_merge_matches_one_pass() {
        let xs: Vec<[f64; 2]> = (0..37)
            .map(|i| [(i as f64).sin(), (i as f64 * 0.3).cos()])
            .collect();
        let mut whole = Moments::new(2);
        let mut d = [0.0; 2];
        xs.iter().for_each(|x| whole.push(x, &mut d));
        let mut a = Moments::new(2);
        let mut b = Moments::new(2);
        xs[..11].iter().for_each(|x| a.push(x, &mut d));
        xs[11..].iter().for_each(|x| b.push(x, &mut d));
        let merged = a.merge(&b);
        for i in 0..4 {
            assert!((merged.m2[i] - whole.m2[i]).abs() < 1e-12);
        }
        let mean0: f64 = xs.iter().map(|x| x[0]).sum::<f64>() / 37.0;
        assert!((merged.mean[0] - mean0).abs() < 1e-14);
    }

    #[test]
    fn normal_maximum_second_moment() {
        // E[max(Z₁, Z₂)²] = 1 for iid standard normals
        let mut cfg = small(normal_family(1.0).unwrap(), LossSpec::squared(), 40_000);
        cfg.theta_grid = vec![0.0];
        cfg.estimators = vec![EstimatorKind::Natural];
        let curve = risk_sweep(&cfg).unwrap();
        let (r, se) = (curve.risk[0][0], curve.se[0][0]);
        assert!((r - 1.0).abs() < 3.0 * se, "risk {r} se {se}");
    }

    #[test]
    fn oracle_rule_has_zero_risk() {
        let cfg = small(exponential_family(1.0).unwrap(), LossSpec::absolute(), 2000);
        let oracle = Rule::Custom {
            name: "oracle".into(),
            f: Arc::new(|_, theta_max| theta_max),
        };
        let curve = risk_sweep_rules(&cfg, &[oracle]).unwrap();
        assert!(curve.risk[0].iter().all(|&r| r == 0.0));
    }

    #[test]
    fn same_seed_same_bytes() {
        let cfg = small(exponential_family(1.0).unwrap(), LossSpec::squared(), 3000);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        risk_sweep(&cfg).unwrap().write_csv(&mut a).unwrap();
        risk_sweep(&cfg).unwrap().write_csv(&mut b).unwrap();
        assert_eq!(a, b);
        let mut other = cfg.clone();
        other.seed = 7;
        let mut c = Vec::new();
        risk_sweep(&other).unwrap().write_csv(&mut c).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn csv_layout() {
        let cfg = small(normal_family(1.0).unwrap(), LossSpec::squared(), 1000);
        let mut buf = Vec::new();
        risk_sweep(&cfg).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("theta,estimator,risk,se,reps,seed"));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[1], "natural");
        assert_eq!(first[4], "1000");
        assert_eq!(first[5], "42");
        assert_eq!(text.lines().count(), 1 + 3 * 4);
    }

    #[test]
    fn location_shift_leaves_risk_unchanged() {
        let base = small(exponential_family(1.0).unwrap(), LossSpec::squared(), 5000);
        let mut shifted = base.clone();
        shifted.location = 5.0;
        let (a, b) = (risk_sweep(&base).unwrap(), risk_sweep(&shifted).unwrap());
        for e in 0..a.estimators.len() {
            for i in 0..a.theta.len() {
                assert!((a.risk[e][i] - b.risk[e][i]).abs() <= 2.0 * a.se[e][i]);
            }
        }
    }

    #[test]
    fn se_shrinks_with_replications() {
        let mut cfg = small(exponential_family(1.0).unwrap(), LossSpec::absolute(), 2000);
        cfg.theta_grid = vec![0.5];
        cfg.estimators = vec![EstimatorKind::Natural];
        let mean_se = |cfg: &mut SweepConfig, reps: usize| {
            cfg.reps = reps;
            (1..=5u64)
                .map(|seed| {
                    cfg.seed = seed;
                    risk_sweep(cfg).unwrap().se[0][0]
                })
                .sum::<f64>()
                / 5.0
        };
        let se1 = mean_se(&mut cfg, 2000);
        let se2 = mean_se(&mut cfg, 4000);
        let se4 = mean_se(&mut cfg, 8000);
        let half = std::f64::consts::FRAC_1_SQRT_2;
        assert!(
            (se2 / se1 / half - 1.0).abs() <= 0.2,
            "doubling ratio {}",
            se2 / se1
        );
        assert!(
            (se4 / se1 / 0.5 - 1.0).abs() <= 0.2,
            "quadrupling ratio {}",
            se4 / se1
        );
    }

    #[test]
    fn b0_beats_natural_at_theta_zero() {
        let mut cfg = small(
            exponential_family(1.0).unwrap(),
            LossSpec::squared(),
            20_000,
        );
        cfg.theta_grid = vec![0.0];
        cfg.estimators = vec![EstimatorKind::Natural, EstimatorKind::B0];
        let curve = risk_sweep(&cfg).unwrap();
        let rep = dominance_report(&curve, EstimatorKind::Natural, EstimatorKind::B0).unwrap();
        assert_eq!(rep.points[0].verdict, Verdict::Dominates, "{rep:?}");
    }

    #[test]
    fn reversed_comparison_is_violated() {
        let cfg = small(
            exponential_family(1.0).unwrap(),
            LossSpec::squared(),
            10_000,
        );
        let curve = risk_sweep(&cfg).unwrap();
        let fwd = dominance_report(&curve, EstimatorKind::Natural, EstimatorKind::Stein).unwrap();
        assert_eq!(fwd.overall, Verdict::Dominates);
        let rev = dominance_report(&curve, EstimatorKind::Stein, EstimatorKind::Natural).unwrap();
        assert_eq!(rev.overall, Verdict::Violated);
        assert!(
            dominance_report(&curve, EstimatorKind::Natural, EstimatorKind::PitmanNearest).is_err()
        );
    }

    #[test]
    fn stein_improves_on_natural_for_wide_normal_linex() {
        let mut cfg = small(normal_family(5.0).unwrap(), LossSpec::linex(1.0).unwrap(), 20_000);
        cfg.theta_grid = theta_range(0.0, 5.0, 0.5);
        cfg.estimators = vec![EstimatorKind::Natural, EstimatorKind::Stein];
        let curve = risk_sweep(&cfg).unwrap();
        let rep = dominance_report(&curve, EstimatorKind::Natural, EstimatorKind::Stein).unwrap();
        assert!(rep.never_worse() && rep.strictly_better_somewhere(), "{rep:?}");
    }

    #[test]
    fn gpn_of_an_estimator_with_itself_is_one_half() {
        let cfg = small(exponential_family(1.0).unwrap(), LossSpec::absolute(), 2000);
        let g = gpn_sweep(&cfg, EstimatorKind::Stein, EstimatorKind::Stein).unwrap();
        assert!(g.gpn.iter().all(|&v| v == 0.5));
        assert!(g.tie_fraction.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn rejects_tiny_sweeps() {
        let mut cfg = small(exponential_family(1.0).unwrap(), LossSpec::absolute(), 10);
        assert!(risk_sweep(&cfg).is_err());
        cfg.reps = 2000;
        cfg.theta_grid = vec![-1.0];
        assert!(risk_sweep(&cfg).is_err());
    }

    #[test]
    fn block_start_matches_sequential_stream() {
        let fam = normal_family(1.0).unwrap();
        let mut seq = block_rng(5, 3, 0);
        let pairs: Vec<ObservationPair> = (0..2500)
            .map(|_| draw_pair(&fam, &mut seq, 0.0, 1.0))
            .collect();
        let mut jump = block_rng(5, 3, 2000);
        assert_eq!(draw_pair(&fam, &mut jump, 0.0, 1.0), pairs[2000]);
    }

    #[test]
    fn theta_range_is_inclusive() {
        assert_eq!(theta_range(0.0, 5.0, 0.25).len(), 21);
        assert_eq!(*theta_range(0.0, 5.0, 0.25).last().unwrap(), 5.0);
    }
}
