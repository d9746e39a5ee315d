//! Step functions on the extended real line and their monotone generalized
//! inverses.
//!
//! Every transform in this crate reduces to evaluating
//! `F†(y) = inf { x ∈ [-∞, ∞] : F(x) > y }` for a cumulative function `F`.
//! [`StepFunction`] holds right-continuous step functions with finite
//! breakpoints; [`PiecewiseLinear`] holds continuous non-decreasing maps used
//! as reparameterizations.
//!
//! The strict comparison `F(x) > y` is evaluated exactly on stored values,
//! with no tolerance. Cumulative values that are sums of stored atoms are
//! reproducible, but callers must not rely on ties at the 1-ulp level.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point of `[-∞, ∞]`.
///
/// The infinities are explicit sentinels rather than IEEE infinities so that
/// ordering is total and serialization is unambiguous. Arithmetic is never
/// performed on the sentinels. `Finite` must not hold NaN.
#[derive(Debug, Clone, Copy)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
    PosInf,
}

pub use ExtendedReal::{NegInf as NEG_INF, PosInf as POS_INF};

impl ExtendedReal {
    /// Maps IEEE infinities onto the sentinels.
    ///
    /// Panics on NaN.
    pub fn from_f64(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN is not an extended real");
        if x == f64::INFINITY {
            POS_INF
        } else if x == f64::NEG_INFINITY {
            NEG_INF
        } else {
            ExtendedReal::Finite(x)
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// IEEE view, for plotting and feature vectors.
    pub fn to_f64(self) -> f64 {
        match self {
            NEG_INF => f64::NEG_INFINITY,
            ExtendedReal::Finite(x) => x,
            POS_INF => f64::INFINITY,
        }
    }

    fn rank(self) -> u8 {
        match self {
            NEG_INF => 0,
            ExtendedReal::Finite(_) => 1,
            POS_INF => 2,
        }
    }

    pub(crate) fn is_nan(self) -> bool {
        matches!(self, ExtendedReal::Finite(x) if x.is_nan())
    }
}

impl From<f64> for ExtendedReal {
    fn from(x: f64) -> Self {
        ExtendedReal::from_f64(x)
    }
}

impl Ord for ExtendedReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => {
                a.partial_cmp(b).unwrap_or_else(|| a.total_cmp(b))
            }
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for ExtendedReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExtendedReal {}

impl PartialEq<f64> for ExtendedReal {
    fn eq(&self, other: &f64) -> bool {
        matches!(self, ExtendedReal::Finite(x) if x == other)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NEG_INF => f.write_str("-inf"),
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            POS_INF => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NEG_INF => serializer.serialize_str("-inf"),
            ExtendedReal::Finite(x) => serializer.serialize_f64(*x),
            POS_INF => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExtendedRealVisitor;

        impl Visitor<'_> for ExtendedRealVisitor {
            type Value = ExtendedReal;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a finite number or one of \"inf\", \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Self::Value, E> {
                if v.is_finite() {
                    Ok(ExtendedReal::Finite(v))
                } else {
                    Err(E::custom("non-finite numbers must be written as \"inf\" or \"-inf\""))
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Self::Value, E> {
                Ok(ExtendedReal::Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Self::Value, E> {
                Ok(ExtendedReal::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Self::Value, E> {
                match v {
                    "inf" => Ok(POS_INF),
                    "-inf" => Ok(NEG_INF),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }

        deserializer.deserialize_any(ExtendedRealVisitor)
    }
}

/// Right-continuous step function on `[-∞, ∞]`.
///
/// With breakpoints `x_1 < … < x_k` and values `v_0, …, v_k`, the function
/// equals `v_0` on `[-∞, x_1)`, `v_i` on `[x_i, x_{i+1})` and `v_k` on
/// `[x_k, ∞)`. The value at `+∞` is `v_k` unless overridden with
/// [`StepFunction::with_value_at_pos_inf`], which is how an atom at `+∞` or
/// the `F(∞) = ∞` convention is represented.
///
/// Consecutive equal values are merged on construction, so a monotone step
/// function is always strictly stepped.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<ExtendedReal>,
    at_pos_inf: ExtendedReal,
    monotone: bool,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<ExtendedReal>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::ValueCount {
                breakpoints: breakpoints.len(),
                expected: breakpoints.len() + 1,
                got: values.len(),
            });
        }
        if breakpoints.iter().any(|x| !x.is_finite())
            || breakpoints.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidBreakpoints);
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::NanLocation);
        }
        let at_pos_inf = *values.last().expect("values is never empty");
        Ok(Self::from_parts(breakpoints, values, at_pos_inf))
    }

    pub fn constant(c: ExtendedReal) -> Self {
        Self::from_parts(Vec::new(), vec![c], c)
    }

    /// Builds from already validated parts, merging repeated values.
    pub(crate) fn from_parts(
        breakpoints: Vec<f64>,
        values: Vec<ExtendedReal>,
        at_pos_inf: ExtendedReal,
    ) -> Self {
        let mut bps = Vec::with_capacity(breakpoints.len());
        let mut vals = Vec::with_capacity(values.len());
        vals.push(values[0]);
        for (x, v) in breakpoints.into_iter().zip(values.into_iter().skip(1)) {
            if *vals.last().unwrap() != v {
                bps.push(x);
                vals.push(v);
            }
        }
        let monotone = vals.windows(2).all(|w| w[0] <= w[1]) && *vals.last().unwrap() <= at_pos_inf;
        Self {
            breakpoints: bps,
            values: vals,
            at_pos_inf,
            monotone,
        }
    }

    /// Overrides the value taken at `+∞`.
    pub fn with_value_at_pos_inf(self, v: ExtendedReal) -> Self {
        Self::from_parts(self.breakpoints, self.values, v)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[ExtendedReal] {
        &self.values
    }

    pub fn value_at_pos_inf(&self) -> ExtendedReal {
        self.at_pos_inf
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn eval(&self, x: ExtendedReal) -> ExtendedReal {
        match x {
            NEG_INF => self.values[0],
            POS_INF => self.at_pos_inf,
            ExtendedReal::Finite(x) => self.values[self.breakpoints.partition_point(|&b| b <= x)],
        }
    }

    /// `inf { x : F(x) > y }`, with `inf ∅ = +∞`.
    ///
    /// Defined for any step function; monotone ones use a binary search.
    pub fn geninv_eval(&self, y: ExtendedReal) -> ExtendedReal {
        let i = if self.monotone {
            self.values.partition_point(|&v| v <= y)
        } else {
            self.values
                .iter()
                .position(|&v| v > y)
                .unwrap_or(self.values.len())
        };
        match i {
            0 => NEG_INF,
            i if i <= self.breakpoints.len() => ExtendedReal::Finite(self.breakpoints[i - 1]),
            // Either only x = +∞ qualifies or nothing does; both give +∞.
            _ => POS_INF,
        }
    }

    /// Closed-form step representation of `y ↦ F†(y)`.
    ///
    /// The result takes the value `+∞` at `+∞`, as every generalized inverse
    /// does.
    pub fn geninv(&self) -> Result<StepFunction> {
        if !self.monotone {
            return Err(Error::NonMonotone);
        }
        // F† jumps to x_{i+1} at level v_i, and to +∞ at level v_k.
        let k = self.breakpoints.len();
        let mut initial = NEG_INF;
        let mut bps = Vec::with_capacity(k + 1);
        let mut vals = Vec::with_capacity(k + 2);
        for (i, level) in self.values.iter().enumerate() {
            let next = if i < k {
                ExtendedReal::Finite(self.breakpoints[i])
            } else {
                POS_INF
            };
            match *level {
                NEG_INF => initial = next,
                POS_INF => break,
                ExtendedReal::Finite(l) => {
                    bps.push(l);
                    vals.push(next);
                }
            }
        }
        vals.insert(0, initial);
        Ok(Self::from_parts(bps, vals, POS_INF))
    }

    /// Step representation of `x ↦ F(G(x))` for a continuous non-decreasing `G`.
    pub fn compose(&self, g: &PiecewiseLinear) -> StepFunction {
        let mut initial = self.eval(g.eval_ext(NEG_INF));
        let mut bps: Vec<f64> = Vec::with_capacity(self.breakpoints.len());
        let mut vals = Vec::with_capacity(self.values.len());
        for (i, &x) in self.breakpoints.iter().enumerate() {
            let v = self.values[i + 1];
            match g.lower_preimage(ExtendedReal::Finite(x)) {
                NEG_INF => initial = v,
                POS_INF => break,
                ExtendedReal::Finite(p) => match bps.last() {
                    Some(&last) if p <= last => *vals.last_mut().unwrap() = v,
                    _ => {
                        bps.push(p);
                        vals.push(v);
                    }
                },
            }
        }
        vals.insert(0, initial);
        let top = self.eval(g.eval_ext(POS_INF));
        Self::from_parts(bps, vals, top)
    }
}

/// Continuous non-decreasing piecewise-linear map of the real line.
///
/// Beyond the outer knots the first and last segments are extended linearly,
/// so a map with strictly increasing knot values is a bijection of `ℝ` (and of
/// `[-∞, ∞]`, mapping the infinities to themselves). A flat end segment maps
/// the corresponding infinity to the end value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() < 2
            || xs.len() != ys.len()
            || xs.iter().chain(&ys).any(|v| !v.is_finite())
            || xs.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidKnots);
        }
        if ys.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::NonMonotoneMap);
        }
        Ok(Self { xs, ys })
    }

    pub fn identity() -> Self {
        Self {
            xs: vec![0.0, 1.0],
            ys: vec![0.0, 1.0],
        }
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.ys.windows(2).all(|w| w[0] < w[1])
    }

    fn left_slope(&self) -> f64 {
        (self.ys[1] - self.ys[0]) / (self.xs[1] - self.xs[0])
    }

    fn right_slope(&self) -> f64 {
        let n = self.xs.len();
        (self.ys[n - 1] - self.ys[n - 2]) / (self.xs[n - 1] - self.xs[n - 2])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] + (x - self.xs[0]) * self.left_slope();
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1] + (x - self.xs[n - 1]) * self.right_slope();
        }
        let j = self.xs.partition_point(|&k| k <= x);
        let (x0, x1, y0, y1) = (self.xs[j - 1], self.xs[j], self.ys[j - 1], self.ys[j]);
        (y0 + (x - x0) * ((y1 - y0) / (x1 - x0))).clamp(y0, y1)
    }

    pub fn eval_ext(&self, x: ExtendedReal) -> ExtendedReal {
        match x {
            NEG_INF if self.left_slope() > 0.0 => NEG_INF,
            NEG_INF => ExtendedReal::Finite(self.ys[0]),
            POS_INF if self.right_slope() > 0.0 => POS_INF,
            POS_INF => ExtendedReal::Finite(*self.ys.last().unwrap()),
            ExtendedReal::Finite(x) => ExtendedReal::Finite(self.eval(x)),
        }
    }

    // Solve G(x) = c on segment j-1..j, where ys[j-1] <= c <= ys[j] and the
    // segment is not flat.
    fn solve_segment(&self, j: usize, c: f64) -> f64 {
        let (x0, x1, y0, y1) = (self.xs[j - 1], self.xs[j], self.ys[j - 1], self.ys[j]);
        (x0 + (c - y0) * ((x1 - x0) / (y1 - y0))).clamp(x0, x1)
    }

    fn solve_left(&self, c: f64) -> f64 {
        (self.xs[0] + (c - self.ys[0]) / self.left_slope()).min(self.xs[0])
    }

    fn solve_right(&self, c: f64) -> f64 {
        let n = self.xs.len();
        (self.xs[n - 1] + (c - self.ys[n - 1]) / self.right_slope()).max(self.xs[n - 1])
    }

    /// `inf { x : G(x) ≥ c }`.
    pub fn lower_preimage(&self, c: ExtendedReal) -> ExtendedReal {
        let c = match c {
            NEG_INF => return NEG_INF,
            POS_INF => return POS_INF,
            ExtendedReal::Finite(c) => c,
        };
        let n = self.xs.len();
        let j = self.ys.partition_point(|&y| y < c);
        if j == 0 {
            if self.left_slope() > 0.0 {
                ExtendedReal::Finite(self.solve_left(c))
            } else {
                NEG_INF
            }
        } else if j == n {
            if self.right_slope() > 0.0 {
                ExtendedReal::Finite(self.solve_right(c))
            } else {
                POS_INF
            }
        } else if self.ys[j] == c {
            ExtendedReal::Finite(self.xs[j])
        } else {
            ExtendedReal::Finite(self.solve_segment(j, c))
        }
    }

    /// Monotone generalized inverse `G†(y) = inf { x : G(x) > y }`.
    ///
    /// For strictly increasing maps this is the ordinary inverse and agrees
    /// bit-for-bit with [`PiecewiseLinear::lower_preimage`].
    pub fn geninv_eval(&self, y: ExtendedReal) -> ExtendedReal {
        let y = match y {
            // G(-∞) > -∞ whatever the left slope, so every x qualifies.
            NEG_INF => return NEG_INF,
            POS_INF => return POS_INF,
            ExtendedReal::Finite(y) => y,
        };
        let n = self.xs.len();
        let j = self.ys.partition_point(|&v| v <= y);
        if j == 0 {
            if self.left_slope() > 0.0 {
                ExtendedReal::Finite(self.solve_left(y))
            } else {
                NEG_INF
            }
        } else if j == n {
            if self.right_slope() > 0.0 {
                ExtendedReal::Finite(self.solve_right(y))
            } else {
                POS_INF
            }
        } else {
            ExtendedReal::Finite(self.solve_segment(j, y))
        }
    }

    /// Inverse of a strictly increasing map, as another piecewise-linear map.
    pub fn inverse(&self) -> Result<PiecewiseLinear> {
        if !self.is_strictly_increasing() {
            return Err(Error::InvalidReparam(
                "only strictly increasing maps can be inverted".into(),
            ));
        }
        PiecewiseLinear::new(self.ys.clone(), self.xs.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: f64) -> ExtendedReal {
        ExtendedReal::Finite(x)
    }

    fn heaviside() -> StepFunction {
        StepFunction::new(vec![0.0], vec![f(0.0), f(1.0)]).unwrap()
    }

    // Brute-force inf { x : F(x) > y } over a fine grid plus the infinities.
    fn scan_geninv(sf: &StepFunction, y: ExtendedReal, lo: f64, hi: f64, n: usize) -> ExtendedReal {
        if sf.eval(NEG_INF) > y {
            return NEG_INF;
        }
        for i in 0..=n {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            if sf.eval(f(x)) > y {
                return f(x);
            }
        }
        POS_INF
    }

    #[test]
    fn extended_real_order() {
        assert!(NEG_INF < f(-1e300));
        assert!(f(1e300) < POS_INF);
        assert_eq!(f(0.0), f(-0.0));
        assert_eq!(ExtendedReal::from_f64(f64::INFINITY), POS_INF);
    }

    #[test]
    fn extended_real_json() {
        let v = vec![NEG_INF, f(0.5), POS_INF];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["-inf",0.5,"inf"]"#);
        let back: Vec<ExtendedReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<ExtendedReal>(r#""nan""#).is_err());
    }

    #[test]
    fn heaviside_eval() {
        let h = heaviside();
        assert_eq!(h.eval(f(-1.0)), f(0.0));
        assert_eq!(h.eval(f(0.0)), f(1.0));
        assert_eq!(h.eval(NEG_INF), f(0.0));
        assert_eq!(h.eval(POS_INF), f(1.0));
    }

    #[test]
    fn constant_eval() {
        let c = StepFunction::constant(f(2.5));
        for x in [NEG_INF, f(-3.0), f(0.0), f(7.0), POS_INF] {
            assert_eq!(c.eval(x), f(2.5));
        }
    }

    #[test]
    fn heaviside_geninv_values() {
        let h = heaviside();
        assert_eq!(h.geninv_eval(f(0.5)), f(0.0));
        assert_eq!(h.geninv_eval(f(1.0)), POS_INF);
        assert_eq!(h.geninv_eval(f(0.0)), f(0.0));
        assert_eq!(h.geninv_eval(f(-0.1)), NEG_INF);
        assert_eq!(h.geninv_eval(POS_INF), POS_INF);
    }

    #[test]
    fn two_step_geninv_matches_scan() {
        let sf = StepFunction::new(vec![1.0, 2.0], vec![f(0.0), f(0.5), f(1.0)]).unwrap();
        // inf {x : F(x) > 0.25} = 1, since F = 0.5 on [1, 2).
        assert_eq!(sf.geninv_eval(f(0.25)), f(1.0));
        assert_eq!(sf.geninv_eval(f(0.75)), f(2.0));
        for y in [0.25, 0.75] {
            let scanned = scan_geninv(&sf, f(y), -5.0, 5.0, 10_000);
            assert_eq!(sf.geninv_eval(f(y)), scanned);
        }
    }

    #[test]
    fn geninv_of_heaviside() {
        let g = heaviside().geninv().unwrap();
        assert_eq!(g.eval(f(-0.5)), NEG_INF);
        assert_eq!(g.eval(f(0.0)), f(0.0));
        assert_eq!(g.eval(f(0.999)), f(0.0));
        assert_eq!(g.eval(f(1.0)), POS_INF);
        assert_eq!(g.eval(POS_INF), POS_INF);
    }

    #[test]
    fn non_monotone_pointwise_but_no_closed_form() {
        let sf = StepFunction::new(vec![0.0, 1.0], vec![f(0.0), f(2.0), f(1.0)]).unwrap();
        assert!(!sf.is_monotone());
        assert_eq!(sf.geninv_eval(f(0.5)), f(0.0));
        assert_eq!(sf.geninv_eval(f(1.5)), f(0.0));
        assert_eq!(sf.geninv_eval(f(2.0)), POS_INF);
        assert_eq!(sf.geninv(), Err(Error::NonMonotone));
    }

    #[test]
    fn repeated_values_merge() {
        let sf = StepFunction::new(vec![0.0, 1.0, 2.0], vec![f(0.0), f(0.3), f(0.3), f(1.0)]).unwrap();
        assert_eq!(sf.breakpoints(), &[0.0, 2.0]);
    }

    #[test]
    fn bad_breakpoints_rejected() {
        assert_eq!(
            StepFunction::new(vec![1.0, 1.0], vec![f(0.0), f(0.5), f(1.0)]),
            Err(Error::InvalidBreakpoints)
        );
        assert!(matches!(
            StepFunction::new(vec![1.0], vec![f(0.0)]),
            Err(Error::ValueCount { .. })
        ));
    }

    #[test]
    fn double_inverse_with_infinite_top() {
        let sf = StepFunction::new(vec![-1.0, 0.5, 3.0], vec![f(0.0), f(0.2), f(0.7), f(1.0)])
            .unwrap()
            .with_value_at_pos_inf(POS_INF);
        let back = sf.geninv().unwrap().geninv().unwrap();
        assert_eq!(back, sf);
    }

    #[test]
    fn double_inverse_without_convention_differs_only_at_infinity() {
        let sf = StepFunction::new(vec![-1.0, 0.5], vec![f(0.0), f(0.2), f(1.0)]).unwrap();
        let back = sf.geninv().unwrap().geninv().unwrap();
        assert_eq!(back.breakpoints(), sf.breakpoints());
        assert_eq!(back.values(), sf.values());
        assert_eq!(back.value_at_pos_inf(), POS_INF);
    }

    #[test]
    fn geninv_approximates_inverse_of_continuous_map() {
        // G(x) = x^3 on [0, 1] sampled as fine steps.
        let n = 2000;
        let xs: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
        let mut vals = vec![f(0.0)];
        vals.extend(xs.iter().map(|x| f(x * x * x)));
        let sf = StepFunction::new(xs, vals).unwrap();
        let width = 1.0 / n as f64;
        for i in 1..100 {
            let y = i as f64 / 100.0;
            let got = sf.geninv_eval(f(y)).finite().unwrap();
            assert!((got - y.cbrt()).abs() <= width + 1e-12, "y={y} got={got}");
        }
    }

    #[test]
    fn compose_identity() {
        let sf = StepFunction::new(vec![-1.0, 2.0], vec![f(0.0), f(0.4), f(1.0)]).unwrap();
        assert_eq!(sf.compose(&PiecewiseLinear::identity()), sf);
    }

    #[test]
    fn compose_heaviside_with_shift() {
        let g = PiecewiseLinear::new(vec![0.0, 1.0], vec![-3.0, -2.0]).unwrap();
        let c = heaviside().compose(&g);
        assert_eq!(c.breakpoints(), &[3.0]);
        for x in [-10.0, 2.9, 3.0, 3.1, 100.0] {
            assert_eq!(c.eval(f(x)), heaviside().eval(f(x - 3.0)));
        }
    }

    #[test]
    fn compose_constant() {
        let g = PiecewiseLinear::new(vec![0.0, 1.0, 2.0], vec![0.0, 5.0, 6.0]).unwrap();
        let c = StepFunction::constant(f(0.7)).compose(&g);
        assert_eq!(c, StepFunction::constant(f(0.7)));
    }

    #[test]
    fn compose_with_flat_map() {
        // G flat at level 1 over [1, 2]: F(G(x)) jumps where G first reaches x_i.
        let g = PiecewiseLinear::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 1.0, 2.0]).unwrap();
        let sf = StepFunction::new(vec![1.0, 1.5], vec![f(0.0), f(0.5), f(1.0)]).unwrap();
        let c = sf.compose(&g);
        for i in -40..=80 {
            let x = i as f64 * 0.05;
            assert_eq!(c.eval(f(x)), sf.eval(f(g.eval(x))), "x={x}");
        }
    }

    #[test]
    fn piecewise_linear_rejects_decreasing() {
        assert_eq!(
            PiecewiseLinear::new(vec![0.0, 1.0], vec![1.0, 0.0]),
            Err(Error::NonMonotoneMap)
        );
        assert_eq!(PiecewiseLinear::new(vec![0.0], vec![1.0]), Err(Error::InvalidKnots));
    }

    #[test]
    fn piecewise_linear_inverse_round_trip() {
        let g = PiecewiseLinear::new(vec![-1.0, 0.0, 2.0], vec![-3.0, 0.0, 1.0]).unwrap();
        for x in [-5.0, -1.0, -0.3, 0.0, 1.7, 2.0, 9.0] {
            let y = g.eval(x);
            let back = g.geninv_eval(f(y)).finite().unwrap();
            assert!((back - x).abs() < 1e-12, "x={x} back={back}");
            assert_eq!(g.lower_preimage(f(y)), g.geninv_eval(f(y)));
        }
        assert_eq!(g.eval_ext(POS_INF), POS_INF);
        assert_eq!(g.geninv_eval(NEG_INF), NEG_INF);
    }
}
