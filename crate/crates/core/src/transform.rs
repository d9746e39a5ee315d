//! Forward and inverse transforms.
//!
//! A positive measure maps to its quantile function composed with the
//! reference CDF, sampled at `M` midpoint quantiles and paired with the
//! total mass. A signed measure maps to the pair of transforms of its
//! positive and negative parts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geninv::ExtendedReal;
use crate::measures::{first_shared_location, pushforward, DiscreteMeasure, ReferenceMeasure, SignedMeasure};

/// Atom pairs closer than this across the two parts are reported as near collisions.
pub const COLLISION_TOLERANCE: f64 = 1e-9;

/// `q_j = (j - 1/2) / M` for `j = 1..=M`.
pub fn midpoint_quantiles(m: usize) -> Vec<f64> {
    (1..=m).map(|j| (j as f64 - 0.5) / m as f64).collect()
}

/// Reference measure plus the quantile grid every transform is sampled on.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformConfig {
    reference: ReferenceMeasure,
    quantiles: Vec<f64>,
    points: Vec<f64>,
    levels: Vec<f64>,
}

impl TransformConfig {
    pub fn new(reference: ReferenceMeasure, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::TooFewQuantiles(m));
        }
        let quantiles = midpoint_quantiles(m);
        let points = quantiles
            .iter()
            .map(|&q| reference.quantile(q))
            .collect::<Result<Vec<_>>>()?;
        let levels = points.iter().map(|&x| reference.normalized_cdf(x)).collect();
        Ok(Self {
            reference,
            quantiles,
            points,
            levels,
        })
    }

    /// Uniform reference on `[0, 1]` with `m` quantile points.
    pub fn uniform(m: usize) -> Result<Self> {
        Self::new(ReferenceMeasure::uniform(0.0, 1.0)?, m)
    }

    pub fn reference(&self) -> &ReferenceMeasure {
        &self.reference
    }

    pub fn m(&self) -> usize {
        self.quantiles.len()
    }

    pub fn quantiles(&self) -> &[f64] {
        &self.quantiles
    }

    /// Reference quantile points `x_j`.
    pub fn reference_points(&self) -> &[f64] {
        &self.points
    }

    /// `F_μ0(x_j) / ‖μ0‖`, equal to `q_j` up to rounding.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self::uniform(1024).expect("default config is valid")
    }
}

/// Transform of a positive measure: sampled map and total mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdtResult {
    samples: Vec<ExtendedReal>,
    mass: f64,
}

impl CdtResult {
    pub fn new(samples: Vec<ExtendedReal>, mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::InvalidMass(mass));
        }
        if samples.iter().any(|s| s.is_nan()) {
            return Err(Error::NanLocation);
        }
        if let Some(i) = samples.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::DecreasingSamples(i + 1));
        }
        if mass == 0.0 && samples.iter().any(|&s| s != 0.0) {
            return Err(Error::ZeroMassSamples);
        }
        Ok(Self { samples, mass })
    }

    /// The `(0, 0)` pair standing for the zero measure.
    pub fn zero(m: usize) -> Self {
        Self {
            samples: vec![ExtendedReal::Finite(0.0); m],
            mass: 0.0,
        }
    }

    pub fn samples(&self) -> &[ExtendedReal] {
        &self.samples
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn is_zero(&self) -> bool {
        self.mass == 0.0
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Finite samples as `f64`, or the index of the first infinite one.
    pub fn finite_samples(&self) -> Result<Vec<f64>> {
        self.samples
            .iter()
            .enumerate()
            .map(|(i, s)| s.finite().ok_or(Error::NonFiniteSample(i)))
            .collect()
    }

    pub(crate) fn map_samples(&self, f: impl Fn(ExtendedReal) -> ExtendedReal) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self {
            samples: self.samples.iter().map(|&s| f(s)).collect(),
            mass: self.mass,
        }
    }
}

/// Transform of a signed measure, one [`CdtResult`] per Jordan part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScdtResult {
    pub plus: CdtResult,
    pub minus: CdtResult,
}

impl ScdtResult {
    pub fn new(plus: CdtResult, minus: CdtResult) -> Result<Self> {
        if plus.len() != minus.len() {
            return Err(Error::LengthMismatch(plus.len(), minus.len()));
        }
        Ok(Self { plus, minus })
    }

    pub fn zero(m: usize) -> Self {
        Self {
            plus: CdtResult::zero(m),
            minus: CdtResult::zero(m),
        }
    }

    pub fn m(&self) -> usize {
        self.plus.len()
    }
}

/// `F_ν†(y_j)` at the levels `y_j = scale · u_j`.
fn sample_quantiles(nu: &DiscreteMeasure, scale: f64, cfg: &TransformConfig) -> Vec<ExtendedReal> {
    let cdf = nu.cdf();
    cfg.levels()
        .iter()
        .map(|&u| cdf.geninv_eval(ExtendedReal::Finite(scale * u)))
        .collect()
}

/// Transform of a probability measure.
pub fn cdt_probability(nu: &DiscreteMeasure, cfg: &TransformConfig) -> Result<Vec<ExtendedReal>> {
    let mass = nu.total_mass();
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::NotProbability(mass));
    }
    Ok(sample_quantiles(nu, mass, cfg))
}

/// Transform of a finite positive measure, carrying the mass separately.
pub fn cdt_positive(nu: &DiscreteMeasure, cfg: &TransformConfig) -> CdtResult {
    if nu.is_zero() {
        return CdtResult::zero(cfg.m());
    }
    CdtResult {
        samples: sample_quantiles(nu, nu.total_mass(), cfg),
        mass: nu.total_mass(),
    }
}

pub fn scdt_forward(s: &SignedMeasure, cfg: &TransformConfig) -> ScdtResult {
    let (pos, neg) = s.jordan_parts();
    ScdtResult {
        plus: cdt_positive(pos, cfg),
        minus: cdt_positive(neg, cfg),
    }
}

/// `mass · f_#(μ0 / ‖μ0‖)` from the sampled map.
pub fn cdt_inverse(c: &CdtResult, cfg: &TransformConfig) -> Result<DiscreteMeasure> {
    if c.len() != cfg.m() {
        return Err(Error::LengthMismatch(c.len(), cfg.m()));
    }
    pushforward(c.samples(), c.mass())
}

/// Recombines both parts, failing if they share an atom.
pub fn scdt_inverse(t: &ScdtResult, cfg: &TransformConfig) -> Result<SignedMeasure> {
    let pos = cdt_inverse(&t.plus, cfg)?;
    let neg = cdt_inverse(&t.minus, cfg)?;
    if let Some(x) = first_shared_location(&pos, &neg) {
        return Err(Error::SingularityViolation(x));
    }
    for (a, b) in near_collisions(&pos, &neg, COLLISION_TOLERANCE) {
        log::warn!("positive atom at {a} and negative atom at {b} nearly coincide");
    }
    SignedMeasure::new(pos, neg)
}

/// Pairs of finite atoms, one from each measure, within `tol` of each other.
pub fn near_collisions(a: &DiscreteMeasure, b: &DiscreteMeasure, tol: f64) -> Vec<(f64, f64)> {
    let xs: Vec<f64> = a.atoms().iter().filter_map(|x| x.0.finite()).collect();
    let ys: Vec<f64> = b.atoms().iter().filter_map(|y| y.0.finite()).collect();
    let mut out = Vec::new();
    let mut start = 0;
    for &x in &xs {
        while start < ys.len() && ys[start] < x - tol {
            start += 1;
        }
        out.extend(ys[start..].iter().take_while(|&&y| y <= x + tol).map(|&y| (x, y)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: f64) -> ExtendedReal {
        ExtendedReal::Finite(x)
    }

    fn uniform_atoms(a: f64, b: f64, n: usize, mass: f64) -> DiscreteMeasure {
        let atoms = (0..n)
            .map(|i| (f(a + (b - a) * (i as f64 + 0.5) / n as f64), mass / n as f64))
            .collect();
        DiscreteMeasure::new(atoms).unwrap()
    }

    #[test]
    fn dirac_at_zero_maps_to_zero() {
        let cfg = TransformConfig::uniform(64).unwrap();
        let d = DiscreteMeasure::dirac(0.0, 1.0).unwrap();
        assert!(cdt_probability(&d, &cfg).unwrap().iter().all(|&s| s == f(0.0)));
        let c = cdt_positive(&d.scaled(3.0).unwrap(), &cfg);
        assert_eq!(c.mass(), 3.0);
        assert!(c.samples().iter().all(|&s| s == f(0.0)));
    }

    #[test]
    fn probability_required() {
        let cfg = TransformConfig::uniform(8).unwrap();
        let d = DiscreteMeasure::dirac(0.0, 2.0).unwrap();
        assert_eq!(cdt_probability(&d, &cfg), Err(Error::NotProbability(2.0)));
    }

    #[test]
    fn uniform_measure_quantiles() {
        let cfg = TransformConfig::uniform(100).unwrap();
        let nu = uniform_atoms(2.0, 3.0, 1000, 1.0);
        let s = cdt_probability(&nu, &cfg).unwrap();
        for (s, q) in s.iter().zip(cfg.quantiles()) {
            assert!((s.to_f64() - (2.0 + q)).abs() <= 2e-3);
        }
    }

    #[test]
    fn self_transform_is_identity() {
        let cfg = TransformConfig::uniform(50).unwrap();
        let n = 2000;
        let nu = uniform_atoms(0.0, 1.0, n, 1.0);
        for (s, x) in cdt_probability(&nu, &cfg).unwrap().iter().zip(cfg.reference_points()) {
            assert!((s.to_f64() - x).abs() <= 1.0 / n as f64);
        }
        let c = cdt_positive(&uniform_atoms(0.0, 1.0, n, 2.0), &cfg);
        assert!((c.mass() - 2.0).abs() < 1e-12);
        for (s, x) in c.samples().iter().zip(cfg.reference_points()) {
            assert!((s.to_f64() - x).abs() <= 1.0 / n as f64);
        }
    }

    #[test]
    fn zero_measure_is_zero_pair() {
        let cfg = TransformConfig::uniform(16).unwrap();
        let t = scdt_forward(&SignedMeasure::zero(), &cfg);
        assert_eq!(t, ScdtResult::zero(16));
        assert!(scdt_inverse(&t, &cfg).unwrap().is_zero());
    }

    #[test]
    fn two_diracs_forward_and_back() {
        let cfg = TransformConfig::uniform(32).unwrap();
        let s = SignedMeasure::from_signed_atoms(vec![(f(1.0), 1.0), (f(2.0), -1.0)]).unwrap();
        let t = scdt_forward(&s, &cfg);
        assert!(t.plus.samples().iter().all(|&x| x == f(1.0)));
        assert!(t.minus.samples().iter().all(|&x| x == f(2.0)));
        assert_eq!((t.plus.mass(), t.minus.mass()), (1.0, 1.0));
        assert_eq!(scdt_inverse(&t, &cfg).unwrap(), s);
    }

    #[test]
    fn positive_only_signal_has_zero_minus() {
        let cfg = TransformConfig::uniform(16).unwrap();
        let s = SignedMeasure::positive(uniform_atoms(0.0, 1.0, 4, 1.0));
        let t = scdt_forward(&s, &cfg);
        assert!(t.minus.is_zero());
        let back = scdt_inverse(&t, &cfg).unwrap();
        assert!(back.negative_part().is_zero());
    }

    #[test]
    fn colliding_parts_rejected() {
        let cfg = TransformConfig::uniform(4).unwrap();
        let c = CdtResult::new(vec![f(1.0); 4], 1.0).unwrap();
        let t = ScdtResult::new(c.clone(), c).unwrap();
        assert_eq!(scdt_inverse(&t, &cfg), Err(Error::SingularityViolation(f(1.0))));
    }

    #[test]
    fn near_collisions_found() {
        let a = DiscreteMeasure::new(vec![(f(0.0), 1.0), (f(1.0), 1.0)]).unwrap();
        let b = DiscreteMeasure::new(vec![(f(1.0 + 1e-12), 1.0), (f(5.0), 1.0)]).unwrap();
        assert_eq!(near_collisions(&a, &b, 1e-9), vec![(1.0, 1.0 + 1e-12)]);
        assert!(near_collisions(&a, &b, 1e-13).is_empty());
    }

    #[test]
    fn cdt_inverse_of_zero_samples_is_dirac() {
        let cfg = TransformConfig::uniform(8).unwrap();
        let c = CdtResult::new(vec![f(0.0); 8], 1.0).unwrap();
        assert_eq!(cdt_inverse(&c, &cfg).unwrap(), DiscreteMeasure::dirac(0.0, 1.0).unwrap());
        assert!(cdt_inverse(&CdtResult::zero(8), &cfg).unwrap().is_zero());
    }

    #[test]
    fn cdt_result_validation() {
        assert_eq!(CdtResult::new(vec![f(1.0), f(0.0)], 1.0), Err(Error::DecreasingSamples(1)));
        assert_eq!(CdtResult::new(vec![f(1.0)], 0.0), Err(Error::ZeroMassSamples));
        assert_eq!(CdtResult::new(vec![f(1.0)], -1.0), Err(Error::InvalidMass(-1.0)));
        assert_eq!(TransformConfig::uniform(1), Err(Error::TooFewQuantiles(1)));
    }

    #[test]
    fn pwl_reference_levels_are_midpoints() {
        let r = ReferenceMeasure::new(vec![(0.0, 0.0), (0.5, 0.3), (2.0, 1.0)]).unwrap();
        let cfg = TransformConfig::new(r, 256).unwrap();
        for (u, q) in cfg.levels().iter().zip(cfg.quantiles()) {
            assert!((u - q).abs() <= 1e-12);
        }
    }

    #[test]
    fn uniform_round_trip_l1_small() {
        let cfg = TransformConfig::uniform(1024).unwrap();
        let grid = crate::measures::GridDensity::new(0.0, 4.0, {
            let mut v = vec![0.0; 256];
            for (i, x) in v.iter_mut().enumerate() {
                let t = (i as f64 + 0.5) / 64.0;
                if (2.0..3.0).contains(&t) {
                    *x = 1.0;
                }
            }
            v
        })
        .unwrap();
        let s = grid.to_measure();
        let back = scdt_inverse(&scdt_forward(&s, &cfg), &cfg).unwrap();
        let rebinned = crate::measures::rebin(&back, 0.0, 4.0, 256).unwrap();
        let err = rebinned.l1_distance(&grid).unwrap();
        assert!(err <= 2.0 / 1024.0 * s.total_variation(), "err {err}");
    }
}
