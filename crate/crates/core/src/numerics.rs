//! One-dimensional quadrature and bracketed root finding.
//!
//! Every calibration constant in this crate reduces to nested 1-D integrals
//! over a density and a monotone scalar equation in one unknown. The
//! integrator is a globally adaptive 21-point Gauss–Kronrod scheme; infinite
//! end points are mapped onto finite intervals with `x = a + s·t/(1−t)`.
//! The root finder is Brent's bisection/secant/inverse-quadratic hybrid with
//! geometric bracket expansion.
//!
//! Both routines are pure and deterministic: the same inputs always produce
//! bit-identical outputs.

use thiserror::Error;

/// Failure modes of [`integrate`] and [`solve_root`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error:e}")]
    NonConvergence { estimate: f64, error: f64 },
    #[error("integrand produced a non-finite value at x = {x:e}")]
    NonFinite { x: f64 },
    #[error("no sign change found after expanding bracket to [{lo:e}, {hi:e}]")]
    BracketNotFound { lo: f64, hi: f64 },
    #[error("root finder did not converge: best {best:e}, bracket width {width:e}")]
    RootNonConvergence { best: f64, width: f64 },
    #[error("invalid numerical settings: {0}")]
    InvalidSpec(String),
}

/// Quadrature settings.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth of any single subinterval.
    pub max_depth: u32,
    /// Interior points where the integrand may be non-smooth.
    pub split_points: Vec<f64>,
    /// Length scale used by the infinite-interval map.
    pub scale: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_depth: 60,
            split_points: Vec::new(),
            scale: 1.0,
        }
    }
}

impl QuadSpec {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..Self::default()
        }
    }

    pub fn with_split_points(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.split_points = points.into_iter().collect();
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    fn validate(&self) -> Result<(), NumericsError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(NumericsError::InvalidSpec(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(NumericsError::InvalidSpec(
                "quadrature scale must be positive and finite".into(),
            ));
        }
        Ok(())
    }
}

/// Root-finder settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSpec {
    pub tol: f64,
    pub max_iter: u32,
    pub bracket_expand_factor: f64,
}

impl Default for RootSpec {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
            bracket_expand_factor: 2.0,
        }
    }
}

impl RootSpec {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

const MAX_BRACKET_EXPANSIONS: u32 = 100;
const MAX_SUBINTERVALS: usize = 4000;

// 21-point Kronrod abscissae (descending, last is the centre) and weights,
// with the weights of the embedded 10-point Gauss rule.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_306_336_261,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
    splittable: bool,
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64), NumericsError> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64, NumericsError> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(NumericsError::NonFinite { x })
        }
    };

    let fc = eval(centre)?;
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut f1 = [0.0; 10];
    let mut f2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let lo = eval(centre - dx)?;
        let hi = eval(centre + dx)?;
        f1[j] = lo;
        f2[j] = hi;
        res_k += WGK[j] * (lo + hi);
        res_abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (lo + hi);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }

    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((value, err))
}

/// Globally adaptive Gauss–Kronrod over a finite interval.
fn adaptive_finite<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> Result<(f64, f64), NumericsError> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (value, error) = kronrod21(f, a, b)?;
    let mut panels = vec![Panel {
        a,
        b,
        value,
        error,
        depth: 0,
        splittable: true,
    }];
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= tol {
            return Ok((total, total_err));
        }
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.splittable)
            .max_by(|(_, x), (_, y)| x.error.total_cmp(&y.error))
            .map(|(i, _)| i);
        let Some(idx) = worst else {
            return Err(NumericsError::NonConvergence {
                estimate: total,
                error: total_err,
            });
        };
        if panels.len() >= MAX_SUBINTERVALS {
            return Err(NumericsError::NonConvergence {
                estimate: total,
                error: total_err,
            });
        }
        let p = panels[idx];
        let mid = 0.5 * (p.a + p.b);
        let tiny = (p.b - p.a).abs() <= 64.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE);
        if p.depth >= spec.max_depth || tiny || mid <= p.a.min(p.b) || mid >= p.a.max(p.b) {
            panels[idx].splittable = false;
            continue;
        }
        let (v1, e1) = kronrod21(f, p.a, mid)?;
        let (v2, e2) = kronrod21(f, mid, p.b)?;
        panels[idx] = Panel {
            a: p.a,
            b: mid,
            value: v1,
            error: e1,
            depth: p.depth + 1,
            splittable: true,
        };
        panels.push(Panel {
            a: mid,
            b: p.b,
            value: v2,
            error: e2,
            depth: p.depth + 1,
            splittable: true,
        });
    }
}

/// Integral of `f` over `[lo, ∞)` through `x = lo + s·t/(1−t)`.
fn upper_tail<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    spec: &QuadSpec,
) -> Result<(f64, f64), NumericsError> {
    let s = spec.scale;
    let g = |t: f64| {
        let one_minus = 1.0 - t;
        let x = lo + s * t / one_minus;
        if x.is_infinite() {
            return 0.0;
        }
        let y = f(x);
        if y == 0.0 {
            0.0
        } else {
            y * s / (one_minus * one_minus)
        }
    };
    adaptive_finite(&g, 0.0, 1.0, spec)
}

/// Integral of `f` over `(−∞, hi]` through `x = hi − s·t/(1−t)`.
fn lower_tail<F: Fn(f64) -> f64>(
    f: &F,
    hi: f64,
    spec: &QuadSpec,
) -> Result<(f64, f64), NumericsError> {
    let s = spec.scale;
    let g = |t: f64| {
        let one_minus = 1.0 - t;
        let x = hi - s * t / one_minus;
        if x.is_infinite() {
            return 0.0;
        }
        let y = f(x);
        if y == 0.0 {
            0.0
        } else {
            y * s / (one_minus * one_minus)
        }
    };
    adaptive_finite(&g, 0.0, 1.0, spec)
}

/// Integrates `f` over `(lo, hi)`; either end may be infinite.
///
/// The interval is cut at every split point strictly inside it and each
/// piece is integrated adaptively, so the combined error bound is
/// `max(abs_tol, rel_tol·|value|)` summed over pieces. Reversed limits give
/// the negated integral.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadSpec,
) -> Result<f64, NumericsError> {
    integrate_with_error(f, lo, hi, spec).map(|(v, _)| v)
}

/// As [`integrate`], also returning the error estimate.
pub fn integrate_with_error<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadSpec,
) -> Result<(f64, f64), NumericsError> {
    spec.validate()?;
    if lo.is_nan() || hi.is_nan() {
        return Err(NumericsError::InvalidSpec("NaN integration limit".into()));
    }
    if lo == hi {
        return Ok((0.0, 0.0));
    }
    if lo > hi {
        let (v, e) = integrate_with_error(f, hi, lo, spec)?;
        return Ok((-v, e));
    }

    let mut cuts: Vec<f64> = spec
        .split_points
        .iter()
        .copied()
        .filter(|p| p.is_finite() && *p > lo && *p < hi)
        .collect();
    if lo.is_infinite() && hi.is_infinite() && cuts.is_empty() {
        cuts.push(0.0);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut nodes = Vec::with_capacity(cuts.len() + 2);
    nodes.push(lo);
    nodes.extend(cuts);
    nodes.push(hi);

    let pieces = nodes.len() - 1;
    // Each piece gets an equal share of the absolute budget.
    let piece_spec = QuadSpec {
        abs_tol: spec.abs_tol / pieces as f64,
        split_points: Vec::new(),
        ..spec.clone()
    };
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (v, e) = if a.is_infinite() {
            lower_tail(&f, b, &piece_spec)?
        } else if b.is_infinite() {
            upper_tail(&f, a, &piece_spec)?
        } else {
            adaptive_finite(&f, a, b, &piece_spec)?
        };
        total += v;
        total_err += e;
    }
    Ok((total, total_err))
}

/// Finds a root of `f` starting from the bracket `[lo, hi]`.
///
/// If `f(lo)` and `f(hi)` share a sign the bracket is grown geometrically
/// (by `bracket_expand_factor`, up to 100 times) on the side with the
/// smaller residual. The returned point lies in a final bracket of width at
/// most `tol` (plus a few ulps of the root).
pub fn solve_root<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &RootSpec,
) -> Result<f64, NumericsError> {
    solve_root_fallible(|x| Ok(f(x)), lo, hi, spec)
}

/// As [`solve_root`] for functions whose evaluation can itself fail,
/// typically because each evaluation is a quadrature.
pub fn solve_root_fallible<F, E>(f: F, lo: f64, hi: f64, spec: &RootSpec) -> Result<f64, E>
where
    F: Fn(f64) -> Result<f64, E>,
    E: From<NumericsError>,
{
    if !(spec.tol > 0.0) || !(spec.bracket_expand_factor > 0.0) {
        return Err(NumericsError::InvalidSpec(
            "root tolerance and expansion factor must be positive".into(),
        )
        .into());
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(NumericsError::InvalidSpec("root bracket must be finite".into()).into());
    }
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    if a == b {
        b = a + 1.0;
    }
    let checked = |x: f64| -> Result<f64, E> {
        let y = f(x)?;
        if y.is_nan() {
            Err(NumericsError::NonFinite { x }.into())
        } else {
            Ok(y)
        }
    };
    let mut fa = checked(a)?;
    let mut fb = checked(b)?;

    let mut expansions = 0;
    while fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
        if expansions >= MAX_BRACKET_EXPANSIONS {
            return Err(NumericsError::BracketNotFound { lo: a, hi: b }.into());
        }
        expansions += 1;
        let width = b - a;
        if fa.abs() < fb.abs() {
            a -= spec.bracket_expand_factor * width;
            fa = checked(a)?;
        } else {
            b += spec.bracket_expand_factor * width;
            fb = checked(b)?;
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(NumericsError::BracketNotFound { lo: a, hi: b }.into());
        }
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }

    // Brent's method; `b` is the current best estimate, `c` the contrapoint.
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..spec.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * spec.tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = checked(b)?;
    }
    Err(NumericsError::RootNonConvergence {
        best: b,
        width: (c - b).abs(),
    }
    .into())
}
