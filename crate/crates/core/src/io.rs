//! File formats: sample sets (CSV or JSON), optimizer run configurations
//! (JSON) and iterate traces (CSV).

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dfo::{DfoConfig, IterateTrace, NoiseModel, NoisyOracle, SolverConfig, Variant};
use crate::problems;
use crate::{Error, Result, SampleSet};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// CSV with one point per row; the first row is the reference point.
/// Blank lines and lines starting with `#` are skipped, as is a first row
/// that contains no numbers (a header).
pub fn parse_sample_set_csv(text: &str) -> Result<SampleSet<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Vec<Option<f64>> = record.iter().map(|f| f.parse().ok()).collect();
        if i == 0 && parsed.iter().all(Option::is_none) {
            continue;
        }
        let row: Option<Vec<f64>> = parsed.into_iter().collect();
        let row = row.ok_or_else(|| parse_err(format!("row {}: non-numeric field", i + 1)))?;
        points.push(DVector::from_vec(row));
    }
    if points.is_empty() {
        return Err(parse_err("no points"));
    }
    SampleSet::new(points, 0)
}

#[derive(Debug, Serialize, Deserialize)]
struct SampleSetJson {
    #[serde(default)]
    ref_index: usize,
    points: Vec<Vec<f64>>,
}

/// `{"ref_index": k, "points": [[...], ...]}`.
pub fn parse_sample_set_json(text: &str) -> Result<SampleSet<f64>> {
    let raw: SampleSetJson = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let points = raw.points.into_iter().map(DVector::from_vec).collect();
    SampleSet::new(points, raw.ref_index)
}

pub fn sample_set_to_json(set: &SampleSet<f64>) -> String {
    let raw = SampleSetJson {
        ref_index: set.ref_index(),
        points: set
            .points()
            .iter()
            .map(|p| p.iter().copied().collect())
            .collect(),
    };
    serde_json::to_string(&raw).expect("plain data serializes")
}

/// Reads a sample set, choosing JSON for a `.json` extension or content
/// starting with `{`, CSV otherwise.
pub fn read_sample_set(path: &Path) -> Result<SampleSet<f64>> {
    let text = std::fs::read_to_string(path)?;
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with('{');
    if is_json {
        parse_sample_set_json(&text)
    } else {
        parse_sample_set_csv(&text)
    }
}

/// Objective of a configured run: a built-in test function or a quadratic
/// `1/2 u^T H u + b^T u + c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObjectiveSpec {
    Named(String),
    Quadratic {
        hessian: Vec<Vec<f64>>,
        #[serde(default)]
        linear: Option<Vec<f64>>,
        #[serde(default)]
        constant: f64,
    },
}

pub type BoxedObjective = Box<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;

impl ObjectiveSpec {
    pub fn build(&self, n_u: usize) -> Result<BoxedObjective> {
        match self {
            ObjectiveSpec::Named(name) => {
                let (f, dim): (fn(&DVector<f64>) -> f64, _) = match name.as_str() {
                    "case1" => (problems::case1::f, Some(2)),
                    "case2" => (problems::case2::f, Some(3)),
                    "sphere" => (problems::sphere, None),
                    other => return Err(parse_err(format!("unknown objective '{other}'"))),
                };
                if let Some(d) = dim {
                    if d != n_u {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            found: n_u,
                        });
                    }
                }
                Ok(Box::new(f))
            }
            ObjectiveSpec::Quadratic {
                hessian,
                linear,
                constant,
            } => {
                if hessian.len() != n_u || hessian.iter().any(|r| r.len() != n_u) {
                    return Err(parse_err("hessian must be n_u x n_u"));
                }
                let h = DMatrix::from_fn(n_u, n_u, |i, j| hessian[i][j]);
                let b = match linear {
                    Some(b) if b.len() == n_u => DVector::from_column_slice(b),
                    Some(_) => return Err(parse_err("linear term must have n_u entries")),
                    None => DVector::zeros(n_u),
                };
                let c = *constant;
                Ok(Box::new(move |u: &DVector<f64>| {
                    0.5 * u.dot(&(&h * u)) + b.dot(u) + c
                }))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    Gaussian,
    TruncatedGaussian,
    Uniform,
}

fn default_noise() -> NoiseKind {
    NoiseKind::Gaussian
}
fn default_max_iters() -> usize {
    60
}
fn default_step_tolerance() -> f64 {
    1e-6
}
fn default_multistart() -> usize {
    SolverConfig::default().multistart_count
}
fn default_divisor() -> f64 {
    4.0
}

/// Optimizer run configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub variant: Variant,
    #[serde(rename = "L", alias = "lipschitz")]
    pub lipschitz: f64,
    pub delta: f64,
    #[serde(default)]
    pub sigma_f: Option<f64>,
    #[serde(default = "default_noise")]
    pub noise_model: NoiseKind,
    pub u0: Vec<f64>,
    #[serde(default)]
    pub init_step: Option<f64>,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_step_tolerance")]
    pub step_tolerance: f64,
    #[serde(default = "default_multistart")]
    pub multistart_count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_divisor")]
    pub budget_divisor: f64,
    pub objective: ObjectiveSpec,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        cfg.noise()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Gaussian models default `sigma_f` to `delta / 3`.
    pub fn noise(&self) -> Result<NoiseModel> {
        let sigma = self.sigma_f.unwrap_or(self.delta / 3.0);
        let model = match self.noise_model {
            NoiseKind::None => NoiseModel::None,
            NoiseKind::Gaussian => NoiseModel::Gaussian { sigma },
            NoiseKind::TruncatedGaussian => NoiseModel::TruncatedGaussian { sigma },
            NoiseKind::Uniform => NoiseModel::UniformBounded { delta: self.delta },
        };
        model.validate()?;
        Ok(model)
    }

    pub fn u0(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.u0)
    }

    pub fn dfo_config(&self) -> Result<DfoConfig<f64>> {
        let mut cfg = DfoConfig::new(self.variant, self.lipschitz, self.delta);
        cfg.init_step = self.init_step;
        cfg.max_iters = self.max_iters;
        cfg.step_tolerance = self.step_tolerance;
        cfg.budget_divisor = self.budget_divisor;
        cfg.solver.multistart_count = self.multistart_count;
        cfg.solver.seed = self.seed;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn oracle(&self) -> Result<NoisyOracle<f64>> {
        let f = self.objective.build(self.u0.len())?;
        NoisyOracle::new(f, self.noise()?, self.delta, self.seed)
    }
}

/// Trace CSV header for `n_u` coordinates.
pub fn trace_columns(n_u: usize) -> Vec<String> {
    let mut cols = vec!["iter".to_string()];
    cols.extend((1..=n_u).map(|i| format!("u{i}")));
    cols.extend(
        ["f_noisy", "m_k", "E_budget", "side", "evals"]
            .iter()
            .map(|s| s.to_string()),
    );
    cols
}

/// Trace rows. The initial simplex comes first with `iter` 0 for `u_0`
/// and `-j` for `u_0 + h e_j`, and empty model, budget and side fields.
pub fn trace_rows(trace: &IterateTrace<f64>) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (j, (p, y)) in trace.init_points.iter().zip(&trace.init_values).enumerate() {
        let mut row = vec![format!("{}", -(j as i64))];
        row.extend(p.iter().map(|x| x.to_string()));
        row.extend([y.to_string(), String::new(), String::new(), String::new()]);
        row.push((j + 1).to_string());
        rows.push(row);
    }
    for r in trace.records() {
        let mut row = vec![r.iter.to_string()];
        row.extend(r.point.iter().map(|x| x.to_string()));
        row.extend([
            r.f_noisy.to_string(),
            r.model_value.to_string(),
            r.budget.to_string(),
            r.side.symbol().to_string(),
            r.eval_count.to_string(),
        ]);
        rows.push(row);
    }
    rows
}

pub fn write_csv<W: Write>(out: W, columns: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_err = |e: csv::Error| parse_err(e.to_string());
    w.write_record(columns).map_err(to_err)?;
    for r in rows {
        w.write_record(r).map_err(to_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace_csv<W: Write>(out: W, trace: &IterateTrace<f64>) -> Result<()> {
    let n = trace.init_points[0].len();
    write_csv(out, &trace_columns(n), &trace_rows(trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_sample_set() {
        let s = parse_sample_set_csv("# ex\nx,y\n0.5, 0\n0,1\n1,0\n").unwrap();
        assert_eq!(s.points().len(), 3);
        assert_eq!(s.ref_index(), 0);
        assert_eq!(s.reference()[0], 0.5);
        assert!(matches!(
            parse_sample_set_csv("0,0\n1,a\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_sample_set_csv("0,0\n1,1\n2,2\n"),
            Err(Error::UnpoisedSet { .. })
        ));
    }

    #[test]
    fn json_sample_set_round_trip() {
        let s =
            parse_sample_set_json(r#"{"ref_index": 2, "points": [[0.5,0],[0,1],[1,0]]}"#).unwrap();
        assert_eq!(s.ref_index(), 2);
        let again = parse_sample_set_json(&sample_set_to_json(&s)).unwrap();
        assert_eq!(s, again);
        assert!(matches!(parse_sample_set_json("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn run_config() {
        let text = r#"{"variant":"1b","L":2.5,"delta":0.15,"sigma_f":0.05,
            "noise_model":"gaussian","u0":[2,5,3],"max_iters":3,"step_tolerance":1e-6,
            "multistart_count":2,"seed":4,"objective":"case2"}"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.variant, Variant::Simplex);
        assert_eq!(cfg.noise().unwrap(), NoiseModel::Gaussian { sigma: 0.05 });
        let dfo = cfg.dfo_config().unwrap();
        assert_eq!(dfo.solver.multistart_count, 2);
        let mut o = cfg.oracle().unwrap();
        let trace = crate::dfo::run(&mut o, &cfg.u0(), &dfo).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &trace).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "iter,u1,u2,u3,f_noisy,m_k,E_budget,side,evals"
        );
        assert_eq!(text.lines().count(), 1 + 4 + trace.records().len());
    }

    #[test]
    fn run_config_errors() {
        assert!(RunConfig::from_json(r#"{"variant":"1c"}"#).is_err());
        let bad_obj = r#"{"variant":"1a","L":1,"delta":0.1,"u0":[0,0],"objective":"case2"}"#;
        let cfg = RunConfig::from_json(bad_obj).unwrap();
        assert!(cfg.oracle().is_err());
        let quad = r#"{"variant":"1a","L":2,"delta":0,"init_step":0.1,"noise_model":"none",
            "u0":[1,1],"objective":{"hessian":[[2,0],[0,2]],"linear":[0,0]}}"#;
        let cfg = RunConfig::from_json(quad).unwrap();
        let o = cfg.oracle().unwrap();
        assert_eq!(o.exact(&DVector::from_row_slice(&[1.0, 1.0])), 2.0);
    }
}
