//! Transport distances between atomic measures.
//!
//! All quantile integrals use the midpoint rule on `M` levels, except
//! [`w2_exact`], which integrates the step quantile functions exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geninv::ExtendedReal;
use crate::measures::{DiscreteMeasure, SignedMeasure};
use crate::transform::{midpoint_quantiles, CdtResult, ScdtResult, TransformConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    pub value: f64,
}

/// A distance together with the terms whose squares add up to its square.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub value: f64,
    pub components: Vec<Component>,
}

impl DistanceReport {
    fn from_components(components: Vec<Component>) -> Self {
        let value = components.iter().map(|c| c.value * c.value).sum::<f64>().sqrt();
        Self { value, components }
    }
}

fn check_finite(m: &DiscreteMeasure) -> Result<()> {
    match m.has_infinite_atom() {
        Some(x) => Err(Error::InfiniteAtom(x)),
        None => Ok(()),
    }
}

fn check_probability(m: &DiscreteMeasure) -> Result<()> {
    if (m.total_mass() - 1.0).abs() > 1e-9 {
        return Err(Error::NotProbability(m.total_mass()));
    }
    Ok(())
}

/// Quantiles of `m / ‖m‖` at the given levels; all zero for the zero measure.
fn normalized_quantiles(m: &DiscreteMeasure, levels: &[f64]) -> Vec<f64> {
    if m.is_zero() {
        return vec![0.0; levels.len()];
    }
    let cdf = m.cdf();
    let mass = m.total_mass();
    levels
        .iter()
        .map(|&q| cdf.geninv_eval(ExtendedReal::Finite(mass * q)).to_f64())
        .collect()
}

fn mean_square_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// 2-Wasserstein distance between probability measures via quantile functions.
pub fn w2(nu: &DiscreteMeasure, eta: &DiscreteMeasure, m: usize) -> Result<f64> {
    check_finite(nu)?;
    check_finite(eta)?;
    check_probability(nu)?;
    check_probability(eta)?;
    if m == 0 {
        return Err(Error::TooFewQuantiles(m));
    }
    let q = midpoint_quantiles(m);
    Ok(mean_square_gap(&normalized_quantiles(nu, &q), &normalized_quantiles(eta, &q)).sqrt())
}

/// 2-Wasserstein distance with the quantile integral done exactly.
pub fn w2_exact(nu: &DiscreteMeasure, eta: &DiscreteMeasure) -> Result<f64> {
    check_finite(nu)?;
    check_finite(eta)?;
    check_probability(nu)?;
    check_probability(eta)?;
    let mut cuts: Vec<f64> = Vec::new();
    for m in [nu, eta] {
        let mut acc = 0.0;
        for &(_, w) in m.atoms() {
            acc += w;
            cuts.push(acc / m.total_mass());
        }
    }
    cuts.push(0.0);
    cuts.retain(|&c| c < 1.0);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mids: Vec<f64> = cuts.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let a = normalized_quantiles(nu, &mids);
    let b = normalized_quantiles(eta, &mids);
    let sum: f64 = cuts
        .windows(2)
        .zip(a.iter().zip(&b))
        .map(|(w, (x, y))| (w[1] - w[0]) * (x - y) * (x - y))
        .sum();
    Ok(sum.sqrt())
}

/// Unbalanced distance between finite positive measures: shape term on the
/// normalized measures plus a mass term. The zero measure has an all-zero
/// quantile function, so the distance to it is `sqrt(∫|F†|² + ‖ν‖²)`.
pub fn d_w2(nu: &DiscreteMeasure, eta: &DiscreteMeasure, m: usize) -> Result<DistanceReport> {
    check_finite(nu)?;
    check_finite(eta)?;
    if m == 0 {
        return Err(Error::TooFewQuantiles(m));
    }
    let q = midpoint_quantiles(m);
    let shape = mean_square_gap(&normalized_quantiles(nu, &q), &normalized_quantiles(eta, &q)).sqrt();
    let mass = (nu.total_mass() - eta.total_mass()).abs();
    Ok(DistanceReport::from_components(vec![
        Component {
            name: "quantile".into(),
            value: shape,
        },
        Component {
            name: "mass".into(),
            value: mass,
        },
    ]))
}

/// Signed distance combining the part-wise unbalanced distances.
pub fn d_s(a: &SignedMeasure, b: &SignedMeasure, m: usize) -> Result<DistanceReport> {
    let plus = d_w2(a.positive_part(), b.positive_part(), m)?;
    let minus = d_w2(a.negative_part(), b.negative_part(), m)?;
    let mut components = Vec::with_capacity(4);
    for (prefix, rep) in [("plus", plus), ("minus", minus)] {
        for c in rep.components {
            components.push(Component {
                name: format!("{prefix}_{}", c.name),
                value: c.value,
            });
        }
    }
    Ok(DistanceReport::from_components(components))
}

fn part_sq(a: &CdtResult, b: &CdtResult, cfg: &TransformConfig) -> Result<f64> {
    for c in [a, b] {
        if c.len() != cfg.m() {
            return Err(Error::LengthMismatch(c.len(), cfg.m()));
        }
    }
    let fa = a.finite_samples()?;
    let fb = b.finite_samples()?;
    let weight = cfg.reference().total_mass();
    let dm = a.mass() - b.mass();
    Ok(weight * mean_square_gap(&fa, &fb) + dm * dm)
}

/// Norm of the difference of two transforms, reference-weighted on the
/// quantile grid plus the mass gaps.
pub fn transform_l2(t1: &ScdtResult, t2: &ScdtResult, cfg: &TransformConfig) -> Result<f64> {
    Ok((part_sq(&t1.plus, &t2.plus, cfg)? + part_sq(&t1.minus, &t2.minus, cfg)?).sqrt())
}
