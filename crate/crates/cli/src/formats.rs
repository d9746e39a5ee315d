//! File formats: signal CSV, transform JSON, and the reference and grid
//! argument syntax.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use scdt::geninv::ExtendedReal;
use scdt::measures::{GridDensity, ReferenceMeasure};
use scdt::transform::{midpoint_quantiles, CdtResult, ScdtResult, TransformConfig};
use serde::{Deserialize, Serialize};

/// Failure classes, each with a fixed process exit code.
#[derive(Debug)]
pub enum CliError {
    Io(String),
    Parse(String),
    Reference(String),
    Inverse(String),
    Metric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Io(_) => 1,
            Self::Parse(_) => 2,
            Self::Reference(_) => 3,
            Self::Inverse(_) => 4,
            Self::Metric(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io(m) => write!(f, "i/o error: {m}"),
            Self::Parse(m) => write!(f, "parse error: {m}"),
            Self::Reference(m) => write!(f, "invalid reference: {m}"),
            Self::Inverse(m) => write!(f, "inverse failed: {m}"),
            Self::Metric(m) => write!(f, "metric not applicable: {m}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn io_err(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Relative tolerance on sample spacing.
const SPACING_TOL: f64 = 1e-9;

/// Reads `t,value` rows. A first row that does not parse as numbers is a
/// header. Sample times become bin centers of a uniform grid.
pub fn read_signal(path: &Path) -> CliResult<GridDensity> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut ts = Vec::new();
    let mut vs = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        if rec.len() != 2 {
            return Err(CliError::Parse(format!("{}: row {} has {} columns, expected 2", path.display(), i + 1, rec.len())));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(t), Ok(v)) => {
                ts.push(t);
                vs.push(v);
            }
            _ if i == 0 => continue,
            _ => return Err(CliError::Parse(format!("{}: row {} is not numeric", path.display(), i + 1))),
        }
    }
    grid_from_samples(&ts, vs).map_err(|m| CliError::Parse(format!("{}: {m}", path.display())))
}

fn grid_from_samples(ts: &[f64], vs: Vec<f64>) -> Result<GridDensity, String> {
    if ts.len() < 2 {
        return Err("need at least two samples".into());
    }
    if ts.iter().chain(&vs).any(|x| !x.is_finite()) {
        return Err("non-finite number".into());
    }
    let n = ts.len();
    let step = (ts[n - 1] - ts[0]) / (n - 1) as f64;
    if !(step > 0.0) {
        return Err("sample times must strictly increase".into());
    }
    for (i, w) in ts.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(format!("sample times must strictly increase (row {})", i + 2));
        }
        if ((w[1] - w[0]) - step).abs() > SPACING_TOL * step {
            return Err(format!("sample times are not uniformly spaced (row {})", i + 2));
        }
    }
    GridDensity::new(ts[0] - 0.5 * step, ts[n - 1] + 0.5 * step, vs).map_err(|e| e.to_string())
}

pub fn write_signal(path: &Path, d: &GridDensity) -> CliResult<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "t,value")?;
        for (t, v) in d.centers().iter().zip(d.samples()) {
            writeln!(w, "{t},{v}")?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| io_err(path, e))
}

/// Grid given as `first,last,N` sample times, matching the signal CSV layout.
pub fn parse_grid(spec: &str) -> CliResult<(f64, f64, usize)> {
    let bad = || CliError::Parse(format!("grid `{spec}` must be first,last,N with first < last and N >= 2"));
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let first: f64 = parts[0].parse().map_err(|_| bad())?;
    let last: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if !(first.is_finite() && last.is_finite() && first < last) || n < 2 {
        return Err(bad());
    }
    let step = (last - first) / (n - 1) as f64;
    Ok((first - 0.5 * step, last + 0.5 * step, n))
}

/// `uniform:a,b` or `pwl:x0,y0;x1,y1;...` (knots of the cumulative mass).
pub fn parse_reference(spec: &str) -> CliResult<ReferenceMeasure> {
    let bad = |m: String| CliError::Reference(format!("`{spec}`: {m}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(format!("`{s}` is not a number")));
    let (kind, body) = spec
        .split_once(':')
        .ok_or_else(|| bad("expected uniform:a,b or pwl:x0,y0;x1,y1;...".into()))?;
    let reference = match kind.trim() {
        "uniform" => {
            let v: Vec<&str> = body.split(',').collect();
            if v.len() != 2 {
                return Err(bad("uniform takes two bounds".into()));
            }
            ReferenceMeasure::uniform(num(v[0])?, num(v[1])?)
        }
        "pwl" => {
            let knots = body
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(|pair| match pair.split(',').collect::<Vec<_>>()[..] {
                    [x, y] => Ok((num(x)?, num(y)?)),
                    _ => Err(bad(format!("knot `{pair}` must be x,y"))),
                })
                .collect::<CliResult<Vec<_>>>()?;
            ReferenceMeasure::new(knots)
        }
        other => return Err(bad(format!("unknown reference kind `{other}`"))),
    };
    reference.map_err(|e| bad(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartFile {
    pub samples: Vec<ExtendedReal>,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFile {
    pub knots: Vec<(f64, f64)>,
}

/// JSON layout of a transform. Infinite samples are the strings `"inf"`
/// and `"-inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformFile {
    pub version: u32,
    pub quantiles: Vec<f64>,
    pub plus: PartFile,
    pub minus: PartFile,
    pub reference: ReferenceFile,
}

impl TransformFile {
    pub fn from_result(t: &ScdtResult, cfg: &TransformConfig) -> Self {
        let part = |c: &CdtResult| PartFile {
            samples: c.samples().to_vec(),
            mass: c.mass(),
        };
        Self {
            version: 1,
            quantiles: cfg.quantiles().to_vec(),
            plus: part(&t.plus),
            minus: part(&t.minus),
            reference: ReferenceFile {
                knots: cfg.reference().knots().to_vec(),
            },
        }
    }

    /// Validates the file and rebuilds the transform and its config.
    pub fn to_result(&self) -> CliResult<(ScdtResult, TransformConfig)> {
        if self.version != 1 {
            return Err(CliError::Parse(format!("unsupported transform file version {}", self.version)));
        }
        let m = self.quantiles.len();
        if self.plus.samples.len() != m || self.minus.samples.len() != m {
            return Err(CliError::Parse("sample and quantile arrays differ in length".into()));
        }
        let expected = midpoint_quantiles(m);
        if self.quantiles.iter().zip(&expected).any(|(a, b)| (a - b).abs() > 1e-12) {
            return Err(CliError::Parse("quantiles are not the midpoint grid (j - 1/2) / M".into()));
        }
        let reference =
            ReferenceMeasure::new(self.reference.knots.clone()).map_err(|e| CliError::Reference(e.to_string()))?;
        let cfg = TransformConfig::new(reference, m).map_err(|e| CliError::Parse(e.to_string()))?;
        let part = |p: &PartFile| CdtResult::new(p.samples.clone(), p.mass).map_err(|e| CliError::Parse(e.to_string()));
        let t = ScdtResult::new(part(&self.plus)?, part(&self.minus)?).map_err(|e| CliError::Parse(e.to_string()))?;
        Ok((t, cfg))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        write_json(path, self)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}
