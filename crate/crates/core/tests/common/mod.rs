//! Random inputs and independent oracles shared by the integration tests.
#![allow(dead_code)]

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;
use scdt::geninv::{ExtendedReal, PiecewiseLinear, StepFunction, NEG_INF, POS_INF};
use scdt::measures::{DiscreteMeasure, GridDensity, SignedMeasure};

pub fn fin(x: f64) -> ExtendedReal {
    ExtendedReal::Finite(x)
}

/// Piecewise-constant density on `n` bins of `[t0, t1]` with 2 to 8 pieces,
/// each at a height drawn from `[-1, 1]`.
pub fn random_piecewise_density<R: Rng>(rng: &mut R, t0: f64, t1: f64, n: usize) -> GridDensity {
    let pieces = rng.random_range(2..=8usize);
    let mut cuts: Vec<usize> = Vec::new();
    while cuts.len() < pieces - 1 {
        let c = rng.random_range(1..n);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    cuts.push(n);
    let mut samples = Vec::with_capacity(n);
    for &end in &cuts {
        let h = rng.random_range(-1.0..=1.0);
        samples.resize(end, h);
    }
    GridDensity::new(t0, t1, samples).unwrap()
}

/// Same as [`random_piecewise_density`] but zero outside bins `[lo, hi)`.
pub fn random_supported_density<R: Rng>(rng: &mut R, t0: f64, t1: f64, n: usize, lo: usize, hi: usize) -> GridDensity {
    let inner = random_piecewise_density(rng, 0.0, 1.0, hi - lo);
    let mut samples = vec![0.0; n];
    samples[lo..hi].copy_from_slice(inner.samples());
    GridDensity::new(t0, t1, samples).unwrap()
}

/// Signed atomic measure with `1..=max_atoms` atoms in `[lo, hi]`.
pub fn random_signed_atoms<R: Rng>(rng: &mut R, max_atoms: usize, lo: f64, hi: f64) -> SignedMeasure {
    let n = rng.random_range(1..=max_atoms);
    let atoms = (0..n)
        .map(|_| {
            let w: f64 = rng.random_range(0.05..=2.0);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            (fin(rng.random_range(lo..=hi)), sign * w)
        })
        .collect();
    SignedMeasure::from_signed_atoms(atoms).unwrap()
}

/// Probability measure with `1..=max_atoms` atoms and arbitrary weights.
pub fn random_probability<R: Rng>(rng: &mut R, max_atoms: usize) -> DiscreteMeasure {
    let n = rng.random_range(1..=max_atoms);
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..=1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut atoms: Vec<(ExtendedReal, f64)> = raw
        .iter()
        .map(|w| (fin(rng.random_range(-3.0..=3.0)), w / total))
        .collect();
    renormalize(&mut atoms);
    DiscreteMeasure::new(atoms).unwrap()
}

/// Probability measure whose weights are multiples of `1/m`.
pub fn random_lattice_probability<R: Rng>(rng: &mut R, max_atoms: usize, m: usize) -> DiscreteMeasure {
    let n = rng.random_range(1..=max_atoms.min(m));
    let counts = random_composition(rng, m, n);
    let atoms = counts
        .iter()
        .map(|&k| (fin(rng.random_range(-3.0..=3.0)), k as f64 / m as f64))
        .collect();
    DiscreteMeasure::new(atoms).unwrap()
}

/// `n` positive integers summing to `total`.
pub fn random_composition<R: Rng>(rng: &mut R, total: usize, n: usize) -> Vec<usize> {
    let mut cuts: Vec<usize> = Vec::new();
    while cuts.len() < n - 1 {
        let c = rng.random_range(1..total);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    cuts.push(total);
    let mut prev = 0;
    cuts.iter()
        .map(|&c| {
            let k = c - prev;
            prev = c;
            k
        })
        .collect()
}

/// Nudges the last weight so the float sum is 1 to within one ulp.
fn renormalize(atoms: &mut [(ExtendedReal, f64)]) {
    let head: f64 = atoms[..atoms.len() - 1].iter().map(|a| a.1).sum();
    let last = atoms.len() - 1;
    atoms[last].1 = 1.0 - head;
}

/// Strictly increasing piecewise-linear map with 2 to 6 knots.
pub fn random_increasing_pwl<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> PiecewiseLinear {
    let k = rng.random_range(2..=6usize);
    let mut xs: Vec<f64> = (0..k).map(|_| rng.random_range(lo..=hi)).collect();
    xs.sort_by(f64::total_cmp);
    for i in 1..k {
        if xs[i] <= xs[i - 1] + 1e-3 {
            xs[i] = xs[i - 1] + 1e-3;
        }
    }
    let mut y = rng.random_range(lo..=hi);
    let mut ys = vec![y];
    for w in xs.windows(2) {
        y += (w[1] - w[0]) * rng.random_range(0.2..=3.0);
        ys.push(y);
    }
    PiecewiseLinear::new(xs, ys).unwrap()
}

/// Step function with up to 8 breakpoints. Values are arbitrary unless
/// `monotone`, in which case they are sorted; infinities appear at the ends.
pub fn random_step<R: Rng>(rng: &mut R, monotone: bool) -> StepFunction {
    let k = rng.random_range(0..=8usize);
    let mut bps: Vec<f64> = Vec::new();
    while bps.len() < k {
        let x = (rng.random_range(-40..=40) as f64) / 4.0;
        if !bps.contains(&x) {
            bps.push(x);
        }
    }
    bps.sort_by(f64::total_cmp);
    // Coarse values so that ties between levels are common.
    let mut vals: Vec<ExtendedReal> = (0..=k).map(|_| fin(rng.random_range(-6..=6) as f64 / 2.0)).collect();
    if monotone {
        vals.sort();
    }
    if rng.random_bool(0.15) {
        vals[0] = NEG_INF;
    }
    if monotone && rng.random_bool(0.15) {
        vals[k] = POS_INF;
    }
    StepFunction::new(bps, vals).unwrap()
}

/// Brute-force `inf { x : F(x) > y }` over a candidate set containing every
/// breakpoint and both infinities.
pub fn scan_geninv(f: &StepFunction, y: ExtendedReal) -> ExtendedReal {
    if f.eval(NEG_INF) > y {
        return NEG_INF;
    }
    for &b in f.breakpoints() {
        if f.eval(fin(b)) > y {
            return fin(b);
        }
    }
    POS_INF
}

/// Evaluation points: infinities, breakpoints, midpoints and beyond.
pub fn probe_points(bps: &[f64]) -> Vec<ExtendedReal> {
    let mut xs = vec![NEG_INF, POS_INF];
    match (bps.first(), bps.last()) {
        (Some(&a), Some(&b)) => {
            xs.push(fin(a - 1.0));
            xs.push(fin(b + 1.0));
        }
        _ => xs.push(fin(0.0)),
    }
    for &b in bps {
        xs.push(fin(b));
    }
    for w in bps.windows(2) {
        xs.push(fin(0.5 * (w[0] + w[1])));
    }
    xs
}

/// Levels: every value, midpoints between distinct finite values, and
/// points outside the range.
pub fn probe_levels(values: &[ExtendedReal]) -> Vec<ExtendedReal> {
    let mut finite: Vec<f64> = values.iter().filter_map(|v| v.finite()).collect();
    finite.sort_by(f64::total_cmp);
    finite.dedup();
    let mut ys: Vec<ExtendedReal> = vec![NEG_INF, POS_INF];
    ys.extend(values.iter().copied());
    for w in finite.windows(2) {
        ys.push(fin(0.5 * (w[0] + w[1])));
    }
    if let (Some(&a), Some(&b)) = (finite.first(), finite.last()) {
        ys.push(fin(a - 0.5));
        ys.push(fin(b + 0.5));
    }
    ys
}

/// Squared 2-Wasserstein cost between finite probability measures from the
/// transport linear program over all couplings.
pub fn w2_squared_lp(a: &DiscreteMeasure, b: &DiscreteMeasure) -> f64 {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let xa: Vec<(f64, f64)> = a.atoms().iter().map(|&(x, w)| (x.to_f64(), w)).collect();
    let xb: Vec<(f64, f64)> = b.atoms().iter().map(|&(x, w)| (x.to_f64(), w)).collect();
    let mut vars = Vec::new();
    for &(x, _) in &xa {
        let row: Vec<_> = xb
            .iter()
            .map(|&(y, _)| lp.add_var((x - y) * (x - y), (0.0, f64::INFINITY)))
            .collect();
        vars.push(row);
    }
    for (i, &(_, w)) in xa.iter().enumerate() {
        let terms: Vec<_> = vars[i].iter().map(|&v| (v, 1.0)).collect();
        lp.add_constraint(terms.as_slice(), ComparisonOp::Eq, w);
    }
    for (j, &(_, w)) in xb.iter().enumerate() {
        let terms: Vec<_> = vars.iter().map(|row| (row[j], 1.0)).collect();
        lp.add_constraint(terms.as_slice(), ComparisonOp::Eq, w);
    }
    lp.solve().expect("transport LP is feasible").objective()
}
