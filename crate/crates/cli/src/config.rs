//! The TOML run configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use superquant::bergman::{ClassifyParams, NewtonParams, TruncationSchedule, DEFAULT_DELTA};
use superquant::potential::{ConvexPotential, Refutation, SampleBox, DEFAULT_TAU};
use superquant::reps::{parse_rational, Weight, WeightBox};

/// A problem with the configuration itself, reported with exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(message: impl Into<String>) -> anyhow::Error {
    ConfigError(message.into()).into()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dims {
    pub n: usize,
    pub m: usize,
    #[serde(default = "default_k")]
    pub k: usize,
}

fn default_k() -> usize {
    1
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub builtin: Option<String>,
    pub expression: Option<String>,
    pub mu: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    /// Half-width of the cube on which expressions are certified.
    #[serde(default = "default_bound")]
    pub certify_bound: f64,
    #[serde(default = "default_density")]
    pub certify_density: usize,
    #[serde(default = "default_tau")]
    pub tau: f64,
}

fn default_bound() -> f64 {
    2.0
}

fn default_density() -> usize {
    9
}

fn default_tau() -> f64 {
    DEFAULT_TAU
}

/// A flat weight coordinate written either as a string (`"7/4"`) or as a
/// TOML number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FlatValue {
    Text(String),
    Integer(i64),
    Float(f64),
}

impl FlatValue {
    fn text(&self) -> String {
        match self {
            FlatValue::Text(t) => t.clone(),
            FlatValue::Integer(i) => i.to_string(),
            FlatValue::Float(x) => format!("{x:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    #[serde(default)]
    pub torus: Vec<i64>,
    #[serde(default)]
    pub flat: Vec<FlatValue>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    pub torus: Option<Vec<(i64, i64)>>,
    pub flat: Option<Vec<Vec<FlatValue>>>,
    pub points: Option<Vec<PointConfig>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BergmanConfig {
    pub delta: f64,
    #[serde(default)]
    pub schedule: TruncationSchedule,
    #[serde(default)]
    pub newton: NewtonParams,
}

impl Default for BergmanConfig {
    fn default() -> Self {
        BergmanConfig {
            delta: DEFAULT_DELTA,
            schedule: TruncationSchedule::default(),
            newton: NewtonParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KahlerConfig {
    pub points: Option<Vec<Vec<f64>>>,
    /// Random sample points drawn from `[−bound, bound]^{n+m}` when `points`
    /// is absent.
    pub samples: usize,
    pub bound: f64,
}

impl Default for KahlerConfig {
    fn default() -> Self {
        KahlerConfig {
            points: None,
            samples: 10,
            bound: 2.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BerezinConfig {
    pub element: Option<String>,
    pub k: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub format: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub dims: Option<Dims>,
    #[serde(default)]
    pub potential: PotentialConfig,
    #[serde(default)]
    pub weights: WeightsConfig,
    #[serde(default)]
    pub bergman: BergmanConfig,
    #[serde(default)]
    pub kahler: KahlerConfig,
    #[serde(default)]
    pub berezin: BerezinConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    pub fn parse(text: &str) -> anyhow::Result<RunConfig> {
        toml::from_str(text).map_err(|e| config_error(e.to_string()))
    }

    /// SHA-256 of the effective configuration, defaults filled in.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn dims(&self) -> anyhow::Result<Dims> {
        let d = self.dims.clone().ok_or_else(|| config_error("missing [dims] section"))?;
        if d.n + d.m == 0 {
            return Err(config_error("dims: n + m must be at least 1"));
        }
        Ok(d)
    }

    pub fn classify_params(&self) -> anyhow::Result<ClassifyParams> {
        let b = &self.bergman;
        if !(b.delta > 0.0 && b.delta.is_finite()) {
            return Err(config_error(format!("bergman.delta must be positive, got {}", b.delta)));
        }
        b.schedule.validate().map_err(|e| config_error(format!("bergman.schedule: {e}")))?;
        Ok(ClassifyParams {
            delta: b.delta,
            schedule: b.schedule.clone(),
            newton: b.newton.clone(),
        })
    }

    /// The configured potential. Expressions go through the convexity
    /// certifier, and a refutation comes back as the inner `Err`.
    pub fn potential(&self) -> anyhow::Result<Result<ConvexPotential, Refutation>> {
        let d = self.dims()?;
        let p = &self.potential;
        let built = match (&p.builtin, &p.expression) {
            (Some(_), Some(_)) => return Err(config_error("potential: give either builtin or expression, not both")),
            (None, None) => return Err(config_error("potential: missing builtin or expression")),
            (Some(name), None) => match name.as_str() {
                "quadratic" | "F1" => ConvexPotential::quadratic(d.n, d.m),
                "hyperbolic" | "F2" => {
                    let mu = p.mu.as_ref().ok_or_else(|| config_error("potential: hyperbolic needs mu"))?;
                    let eps = p.epsilon.ok_or_else(|| config_error("potential: hyperbolic needs epsilon"))?;
                    ConvexPotential::hyperbolic(d.n, d.m, mu, eps)
                }
                other => return Err(config_error(format!("potential: unknown builtin `{other}`"))),
            }
            .map_err(|e| config_error(format!("potential: {e}")))?,
            (None, Some(text)) => {
                let f = ConvexPotential::from_expression(text, d.n, d.m)
                    .map_err(|e| config_error(format!("potential: {e}")))?;
                let sample_box = SampleBox::cube(d.n + d.m, p.certify_bound);
                return f
                    .certify(&sample_box, p.certify_density, p.tau)
                    .map_err(|e| config_error(format!("potential: {e}")));
            }
        };
        Ok(Ok(built))
    }

    pub fn weight_box(&self) -> anyhow::Result<WeightBox> {
        let d = self.dims()?;
        let w = &self.weights;
        let rational = |v: &FlatValue| {
            let t = v.text();
            parse_rational(&t).ok_or_else(|| config_error(format!("weights: flat value `{t}` is not a decimal or fraction")))
        };
        if let Some(points) = &w.points {
            if w.torus.is_some() || w.flat.is_some() {
                return Err(config_error("weights: give either points or a torus/flat grid"));
            }
            let mut out = Vec::new();
            for p in points {
                if p.torus.len() != d.n || p.flat.len() != d.m {
                    return Err(config_error(format!(
                        "weights: point has {}|{} coordinates, expected {}|{}",
                        p.torus.len(),
                        p.flat.len(),
                        d.n,
                        d.m
                    )));
                }
                let flat = p.flat.iter().map(rational).collect::<anyhow::Result<_>>()?;
                out.push(Weight::new(p.torus.clone(), flat));
            }
            return Ok(WeightBox::Points(out));
        }
        let torus = w.torus.clone().unwrap_or_default();
        let flat_values = w.flat.clone().unwrap_or_default();
        if torus.len() != d.n {
            return Err(config_error(format!("weights: {} torus ranges for n = {}", torus.len(), d.n)));
        }
        if flat_values.len() != d.m {
            return Err(config_error(format!("weights: {} flat lists for m = {}", flat_values.len(), d.m)));
        }
        if let Some((lo, hi)) = torus.iter().find(|(lo, hi)| lo > hi) {
            return Err(config_error(format!("weights: torus range [{lo}, {hi}] is not ordered")));
        }
        let flat = flat_values
            .iter()
            .map(|axis| axis.iter().map(rational).collect::<anyhow::Result<Vec<_>>>())
            .collect::<anyhow::Result<_>>()?;
        Ok(WeightBox::Grid { torus, flat })
    }

    pub fn kahler_points(&self, seed: u64) -> anyhow::Result<Vec<Vec<f64>>> {
        use rand::{Rng, SeedableRng};
        let d = self.dims()?;
        let dim = d.n + d.m;
        if let Some(points) = &self.kahler.points {
            if let Some(p) = points.iter().find(|p| p.len() != dim) {
                return Err(config_error(format!("kahler.points: point {p:?} has dimension != {dim}")));
            }
            return Ok(points.clone());
        }
        let b = self.kahler.bound;
        if !(b > 0.0 && b.is_finite()) {
            return Err(config_error("kahler.bound must be positive"));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Ok((0..self.kahler.samples)
            .map(|_| (0..dim).map(|_| rng.random_range(-b..b)).collect())
            .collect())
    }
}
