//! Fisher LDA on raw samples and on transform features.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genmodel::{generate_dataset, GenConfig};
use crate::measures::GridDensity;
use crate::transform::{scdt_forward, TransformConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    RawSignal,
    Scdt,
}

impl FeatureKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::RawSignal => "signal",
            Self::Scdt => "scdt",
        }
    }
}

/// One feature row per signal.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub rows: DMatrix<f64>,
    pub labels: Vec<usize>,
    pub kind: FeatureKind,
}

impl FeatureMatrix {
    pub fn new(rows: DMatrix<f64>, labels: Vec<usize>, kind: FeatureKind) -> Result<Self> {
        if rows.nrows() != labels.len() {
            return Err(Error::LengthMismatch(rows.nrows(), labels.len()));
        }
        for r in 0..rows.nrows() {
            for c in 0..rows.ncols() {
                if !rows[(r, c)].is_finite() {
                    return Err(Error::NonFiniteFeature { row: r, col: c });
                }
            }
        }
        Ok(Self { rows, labels, kind })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Rows at the given indices, in order.
    pub fn select(&self, idx: &[usize]) -> Self {
        Self {
            rows: self.rows.select_rows(idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            kind: self.kind,
        }
    }
}

/// Raw density samples, or `[f⁺, r, f⁻, s]` of length `2M + 2`.
pub fn featurize(
    signals: &[GridDensity],
    labels: &[usize],
    kind: FeatureKind,
    cfg: &TransformConfig,
) -> Result<FeatureMatrix> {
    if signals.len() != labels.len() {
        return Err(Error::LengthMismatch(signals.len(), labels.len()));
    }
    if let Some(first) = signals.first() {
        if signals.iter().any(|s| !s.same_grid(first)) {
            return Err(Error::GridMismatch);
        }
    }
    let width = match kind {
        FeatureKind::RawSignal => signals.first().map_or(0, |s| s.len()),
        FeatureKind::Scdt => 2 * cfg.m() + 2,
    };
    let mut rows = DMatrix::zeros(signals.len(), width);
    for (i, s) in signals.iter().enumerate() {
        let row: Vec<f64> = match kind {
            FeatureKind::RawSignal => s.samples().to_vec(),
            FeatureKind::Scdt => {
                let t = scdt_forward(&s.to_measure(), cfg);
                let mut v = Vec::with_capacity(width);
                for part in [&t.plus, &t.minus] {
                    v.extend(part.samples().iter().map(|x| x.to_f64()));
                    v.push(part.mass());
                }
                v
            }
        };
        for (j, x) in row.into_iter().enumerate() {
            rows[(i, j)] = x;
        }
    }
    FeatureMatrix::new(rows, labels.to_vec(), kind)
}

/// Ridge added to the within-class scatter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularization {
    /// `λ = c · trace(S_w) / d`
    TraceScaled(f64),
    Fixed(f64),
}

impl Default for Regularization {
    fn default() -> Self {
        Self::TraceScaled(1e-6)
    }
}

/// Fisher discriminant: directions, projected class means, and `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel {
    pub classes: Vec<usize>,
    /// `d × k` matrix whose columns are the discriminant directions.
    pub projection: DMatrix<f64>,
    pub class_means_projected: Vec<DVector<f64>>,
    pub lambda: f64,
}

impl LdaModel {
    pub fn project(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        x * &self.projection
    }

    /// Nearest projected class mean; ties go to the lowest class id.
    pub fn predict(&self, x: &DMatrix<f64>) -> Vec<usize> {
        let p = self.project(x);
        (0..p.nrows())
            .map(|r| {
                let row = p.row(r).transpose();
                let mut best = (f64::INFINITY, self.classes[0]);
                for (c, mean) in self.classes.iter().zip(&self.class_means_projected) {
                    let d = (&row - mean).norm_squared();
                    if d < best.0 {
                        best = (d, *c);
                    }
                }
                best.1
            })
            .collect()
    }
}

pub fn fit_lda(train: &FeatureMatrix, reg: Regularization) -> Result<LdaModel> {
    let mut classes = train.labels.clone();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::TooFewClasses(classes.len()));
    }
    let d = train.rows.ncols();
    let overall = train.rows.row_mean().transpose();
    let mut sw = DMatrix::<f64>::zeros(d, d);
    let mut sb = DMatrix::<f64>::zeros(d, d);
    let mut means = Vec::with_capacity(classes.len());
    for &c in &classes {
        let idx: Vec<usize> = (0..train.len()).filter(|&i| train.labels[i] == c).collect();
        if idx.len() < 2 {
            return Err(Error::TooFewSamples {
                class: c,
                count: idx.len(),
            });
        }
        let x = train.rows.select_rows(&idx);
        let mean = x.row_mean().transpose();
        let mut centered = x;
        for mut row in centered.row_iter_mut() {
            row -= mean.transpose();
        }
        sw += centered.transpose() * &centered;
        let dm = &mean - &overall;
        sb += (idx.len() as f64) * &dm * dm.transpose();
        means.push(mean);
    }
    let lambda = match reg {
        Regularization::Fixed(l) => l,
        Regularization::TraceScaled(c) => {
            let tr = sw.trace() / d as f64;
            if tr > 0.0 {
                c * tr
            } else {
                c
            }
        }
    };
    let mut sw_reg = sw;
    for i in 0..d {
        sw_reg[(i, i)] += lambda;
    }
    let chol = sw_reg.cholesky().ok_or(Error::DegenerateScatter)?;
    let l = chol.l();
    // Whitened between-class scatter L⁻¹ S_b L⁻ᵀ.
    let left = l.solve_lower_triangular(&sb).ok_or(Error::DegenerateScatter)?;
    let whitened = l
        .solve_lower_triangular(&left.transpose())
        .ok_or(Error::DegenerateScatter)?;
    let sym = (&whitened + whitened.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let k = (classes.len() - 1).min(d);
    let mut v = DMatrix::zeros(d, k);
    for (j, &col) in order.iter().take(k).enumerate() {
        v.set_column(j, &eig.eigenvectors.column(col));
    }
    let projection = l
        .transpose()
        .solve_upper_triangular(&v)
        .ok_or(Error::DegenerateScatter)?;
    let class_means_projected = means.iter().map(|m| projection.transpose() * m).collect();
    Ok(LdaModel {
        classes,
        projection,
        class_means_projected,
        lambda,
    })
}

/// `confusion[true][predicted]` over `n_classes` labels.
pub fn confusion_matrix(truth: &[usize], predicted: &[usize], n_classes: usize) -> Vec<Vec<usize>> {
    let mut m = vec![vec![0; n_classes]; n_classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        m[t][p] += 1;
    }
    m
}

fn accuracy(truth: &[usize], predicted: &[usize]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    truth.iter().zip(predicted).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedPoint {
    pub space: FeatureKind,
    pub class: usize,
    pub u: f64,
    pub v: f64,
}

/// Settings needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub generator: GenConfig,
    pub quantiles: usize,
    pub reference_knots: Vec<(f64, f64)>,
    pub regularization: Regularization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub seed: u64,
    pub accuracy_signal_space: f64,
    pub accuracy_scdt_space: f64,
    pub confusion_signal_space: Vec<Vec<usize>>,
    pub confusion_scdt_space: Vec<Vec<usize>>,
    /// Test-set coordinates in the first two discriminant directions.
    pub projections: Vec<ProjectedPoint>,
    pub config: ExperimentConfig,
}

struct SpaceResult {
    accuracy: f64,
    confusion: Vec<Vec<usize>>,
    points: Vec<ProjectedPoint>,
}

fn evaluate_space(features: &FeatureMatrix, n_classes: usize, reg: Regularization) -> Result<SpaceResult> {
    let train_idx: Vec<usize> = (0..features.len()).step_by(2).collect();
    let test_idx: Vec<usize> = (1..features.len()).step_by(2).collect();
    let train = features.select(&train_idx);
    let test = features.select(&test_idx);
    let (predicted, proj) = if n_classes < 2 {
        // Only one label exists, so every prediction is that label.
        (test.labels.clone(), DMatrix::zeros(test.len(), 0))
    } else {
        let model = fit_lda(&train, reg)?;
        (model.predict(&test.rows), model.project(&test.rows))
    };
    let points = (0..test.len())
        .map(|r| ProjectedPoint {
            space: features.kind,
            class: test.labels[r],
            u: if proj.ncols() > 0 { proj[(r, 0)] } else { 0.0 },
            v: if proj.ncols() > 1 { proj[(r, 1)] } else { 0.0 },
        })
        .collect();
    Ok(SpaceResult {
        accuracy: accuracy(&test.labels, &predicted),
        confusion: confusion_matrix(&test.labels, &predicted, n_classes.max(1)),
        points,
    })
}

/// Generates a dataset, splits it by index parity (even indices train), and
/// scores LDA in signal space and in transform space on the test half.
pub fn run_experiment(gen: &GenConfig, cfg: &TransformConfig, reg: Regularization, seed: u64) -> Result<ExperimentReport> {
    let gen = GenConfig { seed, ..gen.clone() };
    let data = generate_dataset(&gen)?;
    let signals: Vec<GridDensity> = data.iter().map(|s| s.density.clone()).collect();
    let labels: Vec<usize> = data.iter().map(|s| s.label).collect();
    let n_classes = gen.classes.len();
    let raw = evaluate_space(&featurize(&signals, &labels, FeatureKind::RawSignal, cfg)?, n_classes, reg)?;
    let tr = evaluate_space(&featurize(&signals, &labels, FeatureKind::Scdt, cfg)?, n_classes, reg)?;
    let mut projections = raw.points;
    projections.extend(tr.points);
    Ok(ExperimentReport {
        seed,
        accuracy_signal_space: raw.accuracy,
        accuracy_scdt_space: tr.accuracy,
        confusion_signal_space: raw.confusion,
        confusion_scdt_space: tr.confusion,
        projections,
        config: ExperimentConfig {
            generator: gen,
            quantiles: cfg.m(),
            reference_knots: cfg.reference().knots().to_vec(),
            regularization: reg,
        },
    })
}
