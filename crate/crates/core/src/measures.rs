//! Finite positive and signed measures on the extended real line.
//!
//! Measures are finite lists of weighted atoms. Sampled signals become
//! measures by midpoint binning, [`rebin`] goes back to a density on a grid,
//! and [`ReferenceMeasure`] is the atomless reference every transform is
//! taken against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geninv::{ExtendedReal, StepFunction};

/// Finite positive measure made of atoms at strictly increasing locations.
///
/// Atoms at `±∞` are allowed. The zero measure has no atoms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiscreteMeasure {
    atoms: Vec<(ExtendedReal, f64)>,
    total_mass: f64,
}

impl DiscreteMeasure {
    /// Sorts atoms by location, sums duplicates and drops zero weights.
    pub fn new(atoms: Vec<(ExtendedReal, f64)>) -> Result<Self> {
        let mut atoms = atoms;
        for &(x, w) in &atoms {
            if x.is_nan() {
                return Err(Error::NanLocation);
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidWeight(w));
            }
        }
        atoms.retain(|&(_, w)| w > 0.0);
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(ExtendedReal, f64)> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += w,
                _ => merged.push((x, w)),
            }
        }
        Ok(Self::from_sorted(merged))
    }

    /// Atoms must already be strictly increasing with positive weights.
    pub(crate) fn from_sorted(atoms: Vec<(ExtendedReal, f64)>) -> Self {
        debug_assert!(atoms.windows(2).all(|w| w[0].0 < w[1].0));
        let total_mass = atoms.iter().map(|a| a.1).sum();
        Self { atoms, total_mass }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn dirac(x: impl Into<ExtendedReal>, weight: f64) -> Result<Self> {
        Self::new(vec![(x.into(), weight)])
    }

    pub fn atoms(&self) -> &[(ExtendedReal, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn has_infinite_atom(&self) -> Option<ExtendedReal> {
        self.atoms.iter().map(|a| a.0).find(|x| !x.is_finite())
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.atoms.iter().map(|&(x, w)| (x, w * factor)).collect())
    }

    /// Moves every atom through `f`, keeping weights.
    pub fn map_locations(&self, f: impl Fn(ExtendedReal) -> ExtendedReal) -> Result<Self> {
        Self::new(self.atoms.iter().map(|&(x, w)| (f(x), w)).collect())
    }

    /// Cumulative function `x ↦ m([-∞, x])`.
    pub fn cdf(&self) -> StepFunction {
        let mut breakpoints = Vec::with_capacity(self.atoms.len());
        let mut values = Vec::with_capacity(self.atoms.len() + 1);
        let mut running = 0.0;
        let mut at_neg_inf = 0.0;
        for &(x, w) in &self.atoms {
            match x {
                ExtendedReal::NegInf => {
                    running += w;
                    at_neg_inf = running;
                }
                ExtendedReal::Finite(x) => {
                    running += w;
                    breakpoints.push(x);
                    values.push(ExtendedReal::Finite(running));
                }
                ExtendedReal::PosInf => running += w,
            }
        }
        values.insert(0, ExtendedReal::Finite(at_neg_inf));
        StepFunction::from_parts(breakpoints, values, ExtendedReal::Finite(running))
    }
}

/// Signed measure stored as its Jordan decomposition.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignedMeasure {
    positive: DiscreteMeasure,
    negative: DiscreteMeasure,
}

impl SignedMeasure {
    /// Fails if the two parts share an atom location.
    pub fn new(positive: DiscreteMeasure, negative: DiscreteMeasure) -> Result<Self> {
        if let Some(x) = first_shared_location(&positive, &negative) {
            return Err(Error::InvalidDecomposition(x));
        }
        Ok(Self { positive, negative })
    }

    pub fn positive(m: DiscreteMeasure) -> Self {
        Self {
            positive: m,
            negative: DiscreteMeasure::zero(),
        }
    }

    /// Nets atoms at equal locations, then splits by sign.
    pub fn from_signed_atoms(atoms: Vec<(ExtendedReal, f64)>) -> Result<Self> {
        let mut atoms = atoms;
        if let Some(&(_, w)) = atoms.iter().find(|a| !a.1.is_finite()) {
            return Err(Error::InvalidWeight(w));
        }
        if atoms.iter().any(|a| a.0.is_nan()) {
            return Err(Error::NanLocation);
        }
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut net: Vec<(ExtendedReal, f64)> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            match net.last_mut() {
                Some(last) if last.0 == x => last.1 += w,
                _ => net.push((x, w)),
            }
        }
        let pos = net.iter().filter(|a| a.1 > 0.0).copied().collect();
        let neg = net.iter().filter(|a| a.1 < 0.0).map(|&(x, w)| (x, -w)).collect();
        Ok(Self {
            positive: DiscreteMeasure::from_sorted(pos),
            negative: DiscreteMeasure::from_sorted(neg),
        })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn jordan_parts(&self) -> (&DiscreteMeasure, &DiscreteMeasure) {
        (&self.positive, &self.negative)
    }

    pub fn positive_part(&self) -> &DiscreteMeasure {
        &self.positive
    }

    pub fn negative_part(&self) -> &DiscreteMeasure {
        &self.negative
    }

    pub fn total_variation(&self) -> f64 {
        self.positive.total_mass() + self.negative.total_mass()
    }

    pub fn signed_mass(&self) -> f64 {
        self.positive.total_mass() - self.negative.total_mass()
    }

    pub fn negated(&self) -> Self {
        Self {
            positive: self.negative.clone(),
            negative: self.positive.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.positive.is_zero() && self.negative.is_zero()
    }
}

pub(crate) fn first_shared_location(a: &DiscreteMeasure, b: &DiscreteMeasure) -> Option<ExtendedReal> {
    let (mut i, mut j) = (0, 0);
    let (a, b) = (a.atoms(), b.atoms());
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return Some(a[i].0),
        }
    }
    None
}

/// Signal sampled as a piecewise-constant density on `N` equal bins of `[t0, t1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDensity {
    t0: f64,
    t1: f64,
    samples: Vec<f64>,
}

impl GridDensity {
    pub fn new(t0: f64, t1: f64, samples: Vec<f64>) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && t0 < t1) || samples.is_empty() {
            return Err(Error::InvalidGrid);
        }
        if let Some(&s) = samples.iter().find(|s| !s.is_finite()) {
            return Err(Error::InvalidWeight(s));
        }
        Ok(Self { t0, t1, samples })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn bin_width(&self) -> f64 {
        (self.t1 - self.t0) / self.samples.len() as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.t0 + (i as f64 + 0.5) * self.bin_width()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.samples.len()).map(|i| self.center(i)).collect()
    }

    pub fn same_grid(&self, other: &GridDensity) -> bool {
        self.t0 == other.t0 && self.t1 == other.t1 && self.samples.len() == other.samples.len()
    }

    pub fn to_measure(&self) -> SignedMeasure {
        measure_from_density(self)
    }

    /// `∫ |self - other| dt` over the shared grid.
    pub fn l1_distance(&self, other: &GridDensity) -> Result<f64> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let dt = self.bin_width();
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).abs() * dt)
            .sum())
    }
}

/// Midpoint binning: one atom of weight `|s_i| Δt` at each bin center.
pub fn measure_from_density(d: &GridDensity) -> SignedMeasure {
    let dt = d.bin_width();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (i, &s) in d.samples.iter().enumerate() {
        let x = ExtendedReal::Finite(d.center(i));
        if s > 0.0 {
            pos.push((x, s * dt));
        } else if s < 0.0 {
            neg.push((x, -s * dt));
        }
    }
    SignedMeasure {
        positive: DiscreteMeasure::from_sorted(pos),
        negative: DiscreteMeasure::from_sorted(neg),
    }
}

/// Accumulates signed atom mass per bin and divides by the bin width.
pub fn rebin(m: &SignedMeasure, t0: f64, t1: f64, n: usize) -> Result<GridDensity> {
    if !(t0.is_finite() && t1.is_finite() && t0 < t1) || n == 0 {
        return Err(Error::InvalidGrid);
    }
    let dt = (t1 - t0) / n as f64;
    let mut bins = vec![0.0; n];
    let parts = [(m.positive_part(), 1.0), (m.negative_part(), -1.0)];
    for (part, sign) in parts {
        for &(x, w) in part.atoms() {
            let xf = match x {
                ExtendedReal::Finite(v) if v >= t0 && v <= t1 => v,
                _ => return Err(Error::OutOfRange(x)),
            };
            let i = (((xf - t0) / dt).floor() as usize).min(n - 1);
            bins[i] += sign * w;
        }
    }
    for b in &mut bins {
        *b /= dt;
    }
    GridDensity::new(t0, t1, bins)
}

/// Atomless positive reference measure with a continuous piecewise-linear CDF.
///
/// The CDF rises strictly between consecutive knots, is `0` left of the first
/// knot and equals the total mass right of the last one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceMeasure {
    knots: Vec<(f64, f64)>,
}

impl ReferenceMeasure {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidReference("need at least two knots".into()));
        }
        if knots.iter().any(|&(x, y)| !(x.is_finite() && y.is_finite())) {
            return Err(Error::InvalidReference("knots must be finite".into()));
        }
        if knots[0].1 != 0.0 {
            return Err(Error::InvalidReference("cumulative mass must start at 0".into()));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidReference(format!(
                    "knot positions must strictly increase ({} then {}); a repeated position is an atom",
                    w[0].0, w[1].0
                )));
            }
            if w[1].1 <= w[0].1 {
                return Err(Error::InvalidReference(format!(
                    "cumulative mass must strictly increase on the support ({} then {})",
                    w[0].1, w[1].1
                )));
            }
        }
        Ok(Self { knots })
    }

    /// Uniform probability measure on `[a, b]`.
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, 0.0), (b, 1.0)])
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn total_mass(&self) -> f64 {
        self.knots.last().unwrap().1
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0].0, self.knots.last().unwrap().0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let k = &self.knots;
        if x <= k[0].0 {
            return 0.0;
        }
        if x >= k[k.len() - 1].0 {
            return self.total_mass();
        }
        let j = k.partition_point(|kn| kn.0 <= x);
        let ((x0, y0), (x1, y1)) = (k[j - 1], k[j]);
        (y0 + (x - x0) * ((y1 - y0) / (x1 - x0))).clamp(y0, y1)
    }

    pub fn normalized_cdf(&self, x: f64) -> f64 {
        self.cdf(x) / self.total_mass()
    }

    /// Inverse of the normalized CDF.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidQuantile(p));
        }
        let k = &self.knots;
        let target = p * self.total_mass();
        let j = k.partition_point(|kn| kn.1 < target);
        if j == 0 {
            return Ok(k[0].0);
        }
        if j == k.len() {
            return Ok(k[k.len() - 1].0);
        }
        if k[j].1 == target {
            return Ok(k[j].0);
        }
        let ((x0, y0), (x1, y1)) = (k[j - 1], k[j]);
        Ok((x0 + (target - y0) * ((x1 - x0) / (y1 - y0))).clamp(x0, x1))
    }
}

/// Empirical `mass · f_#(μ0 / ‖μ0‖)` from samples of `f` at the reference's
/// `M` midpoint quantile points: each sample carries `mass / M`.
///
/// The reference only enters through where the samples were taken, since
/// every quantile cell holds the same normalized reference mass.
pub fn pushforward(samples: &[ExtendedReal], mass: f64) -> Result<DiscreteMeasure> {
    if !(mass.is_finite() && mass >= 0.0) {
        return Err(Error::InvalidMass(mass));
    }
    if let Some(i) = samples.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::DecreasingSamples(i + 1));
    }
    if samples.iter().any(|s| s.is_nan()) {
        return Err(Error::NanLocation);
    }
    if mass == 0.0 || samples.is_empty() {
        return Ok(DiscreteMeasure::zero());
    }
    let m = samples.len() as f64;
    let mut atoms: Vec<(ExtendedReal, f64)> = Vec::new();
    let mut start = 0;
    for i in 1..=samples.len() {
        if i == samples.len() || samples[i] != samples[start] {
            let count = (i - start) as f64;
            atoms.push((samples[start], count * mass / m));
            start = i;
        }
    }
    Ok(DiscreteMeasure::from_sorted(atoms))
}
