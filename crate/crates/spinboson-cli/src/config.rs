//! Run configuration: a single TOML file with `model`, `coupling`, `compute`,
//! `oracle`, and `output` blocks, plus named presets.
//!
//! Schema (all fields optional unless noted):
//!
//! ```toml
//! [model]
//! preset = "two-level-exp"      # or give atomic_matrix explicitly
//! atomic_matrix = [[0.0, 0.0], [0.0, 1.0]]   # real symmetric, row by row
//!
//! [coupling]                    # profile f(s) = amplitude · s^power · exp(-s/uv_cutoff)
//! amplitude = 1.0
//! power = 0.0
//! uv_cutoff = 1.0
//! operator = [[0.0, 1.0], [1.0, 0.0]]        # real symmetric, row by row
//!
//! [compute]
//! n_max = 4                     # energy expansion order (≤ 6)
//! m_max = 2                     # norm expansion order
//! quadrature_nodes = 64
//! eta_levels = 12
//! eta_route = false             # also run the regularized route + extrapolation
//! tolerance = 1e-8
//!
//! [oracle]
//! modes = 4
//! occupation_cutoff = 3
//! order = 2
//! lambda_max = 0.1
//! lambda_min = 0.001
//! lambda_points = 9
//!
//! [output]
//! directory = "runs/demo"       # overridden by --out, then SPINBOSON_OUT
//! formats = ["json", "csv"]
//! ```
//!
//! A preset fixes the atom and the coupling operator; `[coupling]` fields may
//! still override the radial profile parameters. Without a preset,
//! `model.atomic_matrix` and `coupling.operator` are required.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use spinboson::error::{Error, Result};
use spinboson::linalg::CMat;
use spinboson::model::{AtomicModel, RadialCoupling, RadialProfile, SpinBosonModel};

pub const PRESETS: [&str; 2] = ["two-level-exp", "scalar-exp"];

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelBlock,
    #[serde(default)]
    pub coupling: CouplingBlock,
    #[serde(default)]
    pub compute: ComputeBlock,
    #[serde(default)]
    pub oracle: OracleBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub preset: Option<String>,
    /// Real symmetric atomic Hamiltonian, row by row.
    pub atomic_matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingBlock {
    pub amplitude: Option<f64>,
    pub power: Option<f64>,
    pub uv_cutoff: Option<f64>,
    /// Real symmetric coupling operator, row by row.
    pub operator: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ComputeBlock {
    pub n_max: usize,
    pub m_max: usize,
    pub quadrature_nodes: usize,
    pub eta_levels: usize,
    pub eta_route: bool,
    pub tolerance: f64,
}

impl Default for ComputeBlock {
    fn default() -> Self {
        Self {
            n_max: 4,
            m_max: 2,
            quadrature_nodes: 64,
            eta_levels: 12,
            eta_route: false,
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleBlock {
    pub modes: usize,
    pub occupation_cutoff: usize,
    pub order: usize,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub lambda_points: usize,
}

impl Default for OracleBlock {
    fn default() -> Self {
        Self {
            modes: 4,
            occupation_cutoff: 3,
            order: 2,
            lambda_max: 0.1,
            lambda_min: 1e-3,
            lambda_points: 9,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub directory: Option<String>,
    pub formats: Vec<String>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { directory: None, formats: vec!["json".into(), "csv".into()] }
    }
}

impl RunConfig {
    /// Parses and schema-validates a TOML configuration.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// The default configuration for a named preset.
    pub fn from_preset(name: &str) -> Result<Self> {
        let cfg = RunConfig {
            model: ModelBlock { preset: Some(name.to_string()), atomic_matrix: None },
            ..RunConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Structural validation: ranges, exclusivity, matrix shapes.  Model
    /// admissibility (hermiticity, gap, infrared exponent) is a separate,
    /// measured concern handled by the `validate` command.
    pub fn validate(&self) -> Result<()> {
        let mut issues: Vec<String> = Vec::new();
        match (&self.model.preset, &self.model.atomic_matrix) {
            (Some(p), _) if !PRESETS.contains(&p.as_str()) => {
                issues.push(format!("unknown preset {p:?}; available: {PRESETS:?}"))
            }
            (Some(_), Some(_)) => {
                issues.push("model.preset and model.atomic_matrix are mutually exclusive".into())
            }
            (None, None) => {
                issues.push("one of model.preset or model.atomic_matrix is required".into())
            }
            _ => {}
        }
        if self.model.preset.is_none() && self.coupling.operator.is_none() {
            issues.push("coupling.operator is required when no preset is named".into());
        }
        for (name, m) in [
            ("model.atomic_matrix", &self.model.atomic_matrix),
            ("coupling.operator", &self.coupling.operator),
        ] {
            if let Some(rows) = m {
                if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
                    issues.push(format!("{name} must be square and non-empty"));
                }
            }
        }
        if let (Some(a), Some(b)) = (&self.model.atomic_matrix, &self.coupling.operator) {
            if a.len() != b.len() {
                issues.push(format!(
                    "atomic matrix is {0}x{0} but the coupling operator is {1}x{1}",
                    a.len(),
                    b.len()
                ));
            }
        }
        let c = &self.compute;
        if c.n_max > 6 {
            issues.push(format!("compute.n_max = {} exceeds the supported maximum 6", c.n_max));
        }
        if c.quadrature_nodes < 8 {
            issues.push(format!("compute.quadrature_nodes = {} is below 8", c.quadrature_nodes));
        }
        if c.eta_levels < 2 {
            issues.push("compute.eta_levels must be at least 2".into());
        }
        if !(c.tolerance > 0.0) {
            issues.push(format!("compute.tolerance = {} must be positive", c.tolerance));
        }
        if let Some(a) = self.coupling.amplitude {
            if !(a.is_finite() && a != 0.0) {
                issues.push(format!("coupling.amplitude = {a} must be finite and nonzero"));
            }
        }
        if let Some(l) = self.coupling.uv_cutoff {
            if !(l.is_finite() && l > 0.0) {
                issues.push(format!("coupling.uv_cutoff = {l} must be positive"));
            }
        }
        let o = &self.oracle;
        if o.modes == 0 {
            issues.push("oracle.modes must be at least 1".into());
        }
        if o.occupation_cutoff == 0 {
            issues.push("oracle.occupation_cutoff must be at least 1".into());
        }
        if o.order == 0 {
            issues.push("oracle.order must be at least 1".into());
        }
        if !(o.lambda_min > 0.0 && o.lambda_max > o.lambda_min) {
            issues.push(format!(
                "oracle lambda grid needs 0 < lambda_min < lambda_max, got [{}, {}]",
                o.lambda_min, o.lambda_max
            ));
        }
        if o.lambda_points < 2 {
            issues.push("oracle.lambda_points must be at least 2".into());
        }
        for f in &self.output.formats {
            if f != "json" && f != "csv" {
                issues.push(format!("unknown output format {f:?}; supported: json, csv"));
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(issues.join("; ")))
        }
    }

    /// The atomic Hamiltonian matrix and radial coupling described by this
    /// configuration, **without** any admissibility judgement — the parts the
    /// `validate` command inspects.
    pub fn build_parts(&self) -> Result<(CMat, RadialCoupling)> {
        let (h_rows, op_rows, base_amp, base_pow, base_cut): (
            Vec<Vec<f64>>,
            Vec<Vec<f64>>,
            f64,
            f64,
            f64,
        ) = match self.model.preset.as_deref() {
            Some("two-level-exp") => (
                vec![vec![0.0, 0.0], vec![0.0, 1.0]],
                vec![vec![0.0, 1.0], vec![1.0, 0.0]],
                1.0,
                0.0,
                1.0,
            ),
            Some("scalar-exp") => (vec![vec![0.0]], vec![vec![1.0]], 1.0, 0.0, 1.0),
            Some(other) => {
                return Err(Error::Config(format!("unknown preset {other:?}")));
            }
            None => {
                let h = self
                    .model
                    .atomic_matrix
                    .clone()
                    .ok_or_else(|| Error::Config("model.atomic_matrix is required".into()))?;
                let op = self
                    .coupling
                    .operator
                    .clone()
                    .ok_or_else(|| Error::Config("coupling.operator is required".into()))?;
                (h, op, 1.0, 0.0, 1.0)
            }
        };
        let op_rows = self.coupling.operator.clone().unwrap_or(op_rows);
        let profile = RadialProfile::new(
            self.coupling.amplitude.unwrap_or(base_amp),
            self.coupling.power.unwrap_or(base_pow),
            self.coupling.uv_cutoff.unwrap_or(base_cut),
        );
        let h_at = real_matrix(&h_rows, "model.atomic_matrix")?;
        let op = real_matrix(&op_rows, "coupling.operator")?;
        Ok((h_at, RadialCoupling::single(profile, op)))
    }

    /// The full model, rejecting inadmissible parameters.
    pub fn build_model(&self) -> Result<SpinBosonModel> {
        let (h_at, coupling) = self.build_parts()?;
        SpinBosonModel::new(AtomicModel::new(h_at)?, coupling)
    }
}

fn real_matrix(rows: &[Vec<f64>], what: &str) -> Result<CMat> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Config(format!("{what} must be square and non-empty")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0)))
}
