//! Increasing reparameterizations, their effect in transform space, and the
//! synthetic three-class signal generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geninv::{ExtendedReal, PiecewiseLinear};
use crate::measures::{DiscreteMeasure, GridDensity, SignedMeasure};
use crate::transform::{scdt_forward, CdtResult, ScdtResult, TransformConfig};

/// Strictly increasing bijection `g` of the real line with an exact inverse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IncreasingReparam {
    /// `g(x) = x - a`
    Translation(f64),
    /// `g(x) = x / a`, `a > 0`
    Dilation(f64),
    /// `g(x) = a x + b`, `a > 0`
    Affine { a: f64, b: f64 },
    PiecewiseLinear(PiecewiseLinear),
}

impl IncreasingReparam {
    pub fn translation(a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidReparam(format!("shift {a} is not finite")));
        }
        Ok(Self::Translation(a))
    }

    pub fn dilation(a: f64) -> Result<Self> {
        check_slope(a)?;
        Ok(Self::Dilation(a))
    }

    pub fn affine(a: f64, b: f64) -> Result<Self> {
        check_slope(a)?;
        if !b.is_finite() {
            return Err(Error::InvalidReparam(format!("offset {b} is not finite")));
        }
        Ok(Self::Affine { a, b })
    }

    pub fn piecewise_linear(g: PiecewiseLinear) -> Result<Self> {
        if !g.is_strictly_increasing() {
            return Err(Error::InvalidReparam("piecewise-linear map is not strictly increasing".into()));
        }
        Ok(Self::PiecewiseLinear(g))
    }

    pub fn identity() -> Self {
        Self::Translation(0.0)
    }

    pub fn forward(&self, x: ExtendedReal) -> ExtendedReal {
        let ExtendedReal::Finite(x) = x else {
            return match self {
                Self::PiecewiseLinear(g) => g.eval_ext(x),
                _ => x,
            };
        };
        ExtendedReal::Finite(match self {
            Self::Translation(a) => x - a,
            Self::Dilation(a) => x / a,
            Self::Affine { a, b } => a * x + b,
            Self::PiecewiseLinear(g) => g.eval(x),
        })
    }

    /// `g⁻¹`, which is also the generalized inverse `g†`.
    pub fn inverse(&self, y: ExtendedReal) -> ExtendedReal {
        let ExtendedReal::Finite(y) = y else {
            return match self {
                Self::PiecewiseLinear(g) => g.geninv_eval(y),
                _ => y,
            };
        };
        match self {
            Self::Translation(a) => ExtendedReal::Finite(y + a),
            Self::Dilation(a) => ExtendedReal::Finite(a * y),
            Self::Affine { a, b } => ExtendedReal::Finite((y - b) / a),
            Self::PiecewiseLinear(g) => g.geninv_eval(ExtendedReal::Finite(y)),
        }
    }

    /// `g⁻¹(y) = p y + r` for the affine kinds.
    fn inverse_affine_coeffs(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Translation(a) => Some((1.0, a)),
            Self::Dilation(a) => Some((a, 0.0)),
            Self::Affine { a, b } => Some((1.0 / a, -b / a)),
            Self::PiecewiseLinear(_) => None,
        }
    }

    /// Knot positions of `g⁻¹` in its own argument.
    fn inverse_knots(&self) -> Vec<f64> {
        match self {
            Self::PiecewiseLinear(g) => g.knots().map(|(_, y)| y).collect(),
            _ => vec![0.0, 1.0],
        }
    }
}

fn check_slope(a: f64) -> Result<()> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidReparam(format!("slope {a} must be finite and positive")));
    }
    Ok(())
}

/// The map `k` with `k⁻¹ = α g⁻¹ + (1 - α) h⁻¹`.
pub fn inverse_blend(g: &IncreasingReparam, h: &IncreasingReparam, alpha: f64) -> Result<IncreasingReparam> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidReparam(format!("blend weight {alpha} outside [0, 1]")));
    }
    if alpha == 0.0 {
        return Ok(h.clone());
    }
    if alpha == 1.0 {
        return Ok(g.clone());
    }
    if let (Some((pg, rg)), Some((ph, rh))) = (g.inverse_affine_coeffs(), h.inverse_affine_coeffs()) {
        let p = alpha * pg + (1.0 - alpha) * ph;
        let r = alpha * rg + (1.0 - alpha) * rh;
        return IncreasingReparam::affine(1.0 / p, -r / p);
    }
    let mut ys = g.inverse_knots();
    ys.extend(h.inverse_knots());
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    let xs: Vec<f64> = ys
        .iter()
        .map(|&y| {
            let y = ExtendedReal::Finite(y);
            alpha * g.inverse(y).to_f64() + (1.0 - alpha) * h.inverse(y).to_f64()
        })
        .collect();
    IncreasingReparam::piecewise_linear(PiecewiseLinear::new(xs, ys)?)
}

/// `(g⁻¹)_# s`: atoms move through `g⁻¹`, weights stay.
pub fn apply_reparam(s: &SignedMeasure, g: &IncreasingReparam) -> Result<SignedMeasure> {
    let (pos, neg) = s.jordan_parts();
    let map = |m: &DiscreteMeasure| m.map_locations(|x| g.inverse(x));
    SignedMeasure::new(map(pos)?, map(neg)?)
}

/// Transform of `apply_reparam(s, g)` predicted from the transform of `s`.
pub fn predict_transform_under_reparam(t: &ScdtResult, g: &IncreasingReparam) -> ScdtResult {
    ScdtResult {
        plus: t.plus.map_samples(|x| g.inverse(x)),
        minus: t.minus.map_samples(|x| g.inverse(x)),
    }
}

fn blend_point(x: ExtendedReal, y: ExtendedReal, alpha: f64) -> ExtendedReal {
    match (x, y) {
        (ExtendedReal::Finite(x), ExtendedReal::Finite(y)) => ExtendedReal::Finite(alpha * x + (1.0 - alpha) * y),
        _ if alpha == 1.0 => x,
        _ if alpha == 0.0 => y,
        // Monotone maps send an infinity to itself, so both sides agree.
        _ => x,
    }
}

/// `α T(η_g) + (1 - α) T(η_h)` where `η_k = apply_reparam(ν, k)`.
pub fn convexity_probe(
    nu: &SignedMeasure,
    g: &IncreasingReparam,
    h: &IncreasingReparam,
    alpha: f64,
    cfg: &TransformConfig,
) -> Result<ScdtResult> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidReparam(format!("blend weight {alpha} outside [0, 1]")));
    }
    let tg = scdt_forward(&apply_reparam(nu, g)?, cfg);
    let th = scdt_forward(&apply_reparam(nu, h)?, cfg);
    let blend = |a: &CdtResult, b: &CdtResult| -> Result<CdtResult> {
        if a.is_zero() {
            return Ok(a.clone());
        }
        let samples = a.samples().iter().zip(b.samples()).map(|(&x, &y)| blend_point(x, y, alpha)).collect();
        CdtResult::new(samples, a.mass())
    };
    ScdtResult::new(blend(&tg.plus, &th.plus)?, blend(&tg.minus, &th.minus)?)
}

/// Prototype shapes, each multiplied by a Gaussian window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassTemplate {
    Gabor,
    Sawtooth,
    Square,
}

impl ClassTemplate {
    pub const ALL: [ClassTemplate; 3] = [Self::Gabor, Self::Sawtooth, Self::Square];

    pub fn name(self) -> &'static str {
        match self {
            Self::Gabor => "gabor",
            Self::Sawtooth => "sawtooth",
            Self::Square => "square",
        }
    }

    /// Template value at `t`.
    pub fn eval(self, t: f64, shape: &TemplateShape) -> f64 {
        let d = t - shape.center;
        let window = (-d * d / (2.0 * shape.width * shape.width)).exp();
        let u = d / shape.period();
        let carrier = match self {
            Self::Gabor => (std::f64::consts::TAU * u).cos(),
            Self::Sawtooth => 2.0 * (u - u.floor()) - 1.0,
            Self::Square => {
                if u - u.floor() < 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        window * carrier
    }
}

/// Template geometry: window center, window standard deviation, and the
/// number of carrier periods across the `±2 width` span of the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TemplateShape {
    pub center: f64,
    pub width: f64,
    pub periods: f64,
}

impl TemplateShape {
    pub fn period(&self) -> f64 {
        4.0 * self.width / self.periods
    }
}

impl Default for TemplateShape {
    fn default() -> Self {
        Self {
            center: 2.25,
            width: 0.35,
            periods: 3.0,
        }
    }
}

/// Synthetic dataset parameters.
///
/// Each signal is `a · template(a t + b)` plus Gaussian noise, sampled at
/// the `n` bin centers of `[t0, t1]`. Signal `i` belongs to class
/// `i mod classes.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub t0: f64,
    pub t1: f64,
    pub n: usize,
    pub a_range: (f64, f64),
    pub b_range: (f64, f64),
    pub noise_sigma: f64,
    pub count: usize,
    pub seed: u64,
    pub classes: Vec<ClassTemplate>,
    pub shape: TemplateShape,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            t0: -0.5,
            t1: 5.0,
            n: 256,
            a_range: (0.75, 2.0),
            b_range: (-0.25, 0.25),
            noise_sigma: 0.02,
            count: 500,
            seed: 0,
            classes: ClassTemplate::ALL.to_vec(),
            shape: TemplateShape::default(),
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t0 < self.t1) {
            return bad("grid needs finite t0 < t1");
        }
        if self.n < 2 {
            return bad("grid needs at least two samples");
        }
        for (lo, hi) in [self.a_range, self.b_range] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return bad("parameter ranges must be finite with lo <= hi");
            }
        }
        if self.a_range.0 <= 0.0 {
            return bad("dilation range must be positive");
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return bad("noise sigma must be finite and non-negative");
        }
        if self.count == 0 {
            return bad("signal count must be positive");
        }
        if self.classes.is_empty() {
            return bad("at least one class template is required");
        }
        let s = &self.shape;
        if !(s.center.is_finite() && s.width > 0.0 && s.width.is_finite() && s.periods > 0.0 && s.periods.is_finite()) {
            return bad("template shape needs finite center and positive width and periods");
        }
        Ok(())
    }
}

/// One generated signal with its class and the affine parameters used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSignal {
    pub label: usize,
    pub a: f64,
    pub b: f64,
    pub density: GridDensity,
}

/// Draws `cfg.count` signals. For each signal the generator draws `a`, then
/// `b`, then the noise samples, from one ChaCha8 stream seeded by `cfg.seed`.
pub fn generate_dataset(cfg: &GenConfig) -> Result<Vec<LabeledSignal>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = Normal::new(0.0, cfg.noise_sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let dt = (cfg.t1 - cfg.t0) / cfg.n as f64;
    let centers: Vec<f64> = (0..cfg.n).map(|i| cfg.t0 + (i as f64 + 0.5) * dt).collect();
    let mut out = Vec::with_capacity(cfg.count);
    for i in 0..cfg.count {
        let label = i % cfg.classes.len();
        let template = cfg.classes[label];
        let a = rng.random_range(cfg.a_range.0..=cfg.a_range.1);
        let b = rng.random_range(cfg.b_range.0..=cfg.b_range.1);
        let samples = centers
            .iter()
            .map(|&t| {
                let clean = a * template.eval(a * t + b, &cfg.shape);
                if cfg.noise_sigma > 0.0 {
                    clean + noise.sample(&mut rng)
                } else {
                    clean
                }
            })
            .collect();
        out.push(LabeledSignal {
            label,
            a,
            b,
            density: GridDensity::new(cfg.t0, cfg.t1, samples)?,
        });
    }
    Ok(out)
}
