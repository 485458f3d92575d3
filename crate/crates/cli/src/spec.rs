use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Verify,
    Correspond,
    Chern,
    Extremize,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Correspond => "correspond",
            Command::Chern => "chern",
            Command::Extremize => "extremize",
        }
    }

    /// Chart dimension the command runs on.
    pub fn dim(self) -> usize {
        match self {
            Command::Chern => 4,
            _ => 3,
        }
    }

    /// Recognized tolerance names and their defaults.
    pub fn tolerances(self) -> &'static [(&'static str, f64)] {
        match self {
            Command::Verify => &[
                ("projector", 1e-12),
                ("pairing_invariance", 1e-9),
                ("gram_gl", 1e-3),
                ("gram_aff", 1e-6),
                ("d_squared", 1e-10),
                ("leibniz", 1e-10),
                ("bianchi", 1e-9),
                ("cs_transgression", 1e-12),
                ("gauge_defect", 1e-8),
                ("gauge_defect_integral", 1e-10),
                ("action_gauge", 1e-9),
                ("wzw_closed", 1e-8),
                ("metricity", 1e-12),
                ("witten_split", 1e-10),
                ("witten_roundtrip", 0.0),
            ],
            Command::Correspond => &[
                ("admissibility", 1e-10),
                ("ratio_spread", 1e-9),
                ("integral_identity", 1e-9),
            ],
            Command::Chern => &[("chern_weil", 1e-9), ("chern_integral", 1e-9)],
            Command::Extremize => &[("reduction", 1e-3), ("stationarity", 1e-6)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub dim: usize,
    pub periods: Vec<f64>,
}

/// Named field generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldSpec {
    Flat,
    TrigRandom {
        max_frequency: u32,
        amplitude: f64,
        /// Amplitude of a `p`-valued part added to every connection.
        #[serde(default, skip_serializing_if = "is_zero")]
        p_contamination: f64,
    },
    PerturbedFlat {
        magnitude: f64,
    },
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl FieldSpec {
    pub fn is_random(&self) -> bool {
        !matches!(self, FieldSpec::Flat)
    }

    /// Highest frequency present in generated fields.
    pub fn bandwidth(&self) -> usize {
        match self {
            FieldSpec::Flat => 0,
            FieldSpec::TrigRandom { max_frequency, .. } => *max_frequency as usize,
            FieldSpec::PerturbedFlat { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub max_iters: usize,
    pub step0: f64,
    pub tol: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            max_iters: 500,
            step0: 1e-3,
            tol: 1e-12,
        }
    }
}

/// A complete, reproducible description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub signature: Vec<i32>,
    pub chart: ChartSpec,
    pub field_spec: FieldSpec,
    pub grid: Vec<usize>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Sample points for pointwise checks, or stationarity directions for
    /// `extremize`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Number of random sections for `correspond`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sections: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSpec>,
}

impl RunSpec {
    /// The spec a subcommand runs when no file is given.
    pub fn default_for(command: Command) -> Self {
        let dim = command.dim();
        let (field_spec, grid) = match command {
            Command::Verify | Command::Correspond => (
                FieldSpec::TrigRandom {
                    max_frequency: 2,
                    amplitude: 0.4,
                    p_contamination: 0.0,
                },
                vec![9; 3],
            ),
            Command::Chern => (
                FieldSpec::TrigRandom {
                    max_frequency: 1,
                    amplitude: 0.4,
                    p_contamination: 0.0,
                },
                vec![5; 4],
            ),
            Command::Extremize => (FieldSpec::PerturbedFlat { magnitude: 1e-2 }, vec![16; 3]),
        };
        Self {
            command,
            seed: Some(42),
            signature: vec![-1, 1, 1],
            chart: ChartSpec {
                dim,
                periods: vec![1.0; dim],
            },
            field_spec,
            grid,
            tolerances: BTreeMap::new(),
            samples: None,
            sections: None,
            solver: (command == Command::Extremize).then(SolverSpec::default),
        }
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let spec: Self =
            serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Invalid(m));
        if self.signature.len() != 3 || self.signature.iter().any(|&s| s != 1 && s != -1) {
            return bad(format!(
                "signature must be three entries of ±1, got {:?}",
                self.signature
            ));
        }
        let dim = self.command.dim();
        if self.chart.dim != dim {
            return bad(format!(
                "{} runs on a {dim}-chart, got dim {}",
                self.command.name(),
                self.chart.dim
            ));
        }
        if self.chart.periods.len() != dim
            || self
                .chart
                .periods
                .iter()
                .any(|&p| !(p > 0.0 && p.is_finite()))
        {
            return bad(format!(
                "chart needs {dim} positive periods, got {:?}",
                self.chart.periods
            ));
        }
        let min_count = if self.command == Command::Extremize {
            3
        } else {
            2
        };
        if self.grid.len() != dim || self.grid.iter().any(|&c| c < min_count) {
            return bad(format!(
                "grid needs {dim} counts of at least {min_count}, got {:?}",
                self.grid
            ));
        }
        if self.field_spec.is_random() && self.seed.is_none() {
            return bad("seed is required for randomized field generators".into());
        }
        match self.field_spec {
            FieldSpec::TrigRandom {
                amplitude,
                p_contamination,
                ..
            } => {
                if !(amplitude >= 0.0 && amplitude.is_finite())
                    || !(p_contamination >= 0.0 && p_contamination.is_finite())
                {
                    return bad("amplitudes must be finite and non-negative".into());
                }
            }
            FieldSpec::PerturbedFlat { magnitude } => {
                if !(magnitude >= 0.0 && magnitude.is_finite()) {
                    return bad("magnitude must be finite and non-negative".into());
                }
            }
            FieldSpec::Flat => {}
        }
        let known = self.command.tolerances();
        for (name, &value) in &self.tolerances {
            if !known.iter().any(|(k, _)| k == name) {
                let names: Vec<&str> = known.iter().map(|(k, _)| *k).collect();
                return bad(format!(
                    "unknown tolerance {name:?} for {}; known: {names:?}",
                    self.command.name()
                ));
            }
            if !(value >= 0.0 && value.is_finite()) {
                return bad(format!(
                    "tolerance {name:?} must be finite and non-negative, got {value}"
                ));
            }
        }
        if self.samples == Some(0) {
            return bad("samples must be positive".into());
        }
        if self.sections == Some(0) {
            return bad("sections must be positive".into());
        }
        match (self.command, &self.solver) {
            (Command::Extremize, None) => return bad("extremize needs a solver block".into()),
            (Command::Extremize, Some(s)) => {
                if !(s.step0 > 0.0 && s.step0.is_finite()) || !(s.tol >= 0.0 && s.tol.is_finite()) {
                    return bad("solver needs step0 > 0 and tol ≥ 0".into());
                }
            }
            (_, Some(_)) => {
                return bad(format!(
                    "solver block is only valid for extremize, not {}",
                    self.command.name()
                ))
            }
            _ => {}
        }
        Ok(())
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        if let Some(&v) = self.tolerances.get(name) {
            return v;
        }
        self.command
            .tolerances()
            .iter()
            .find(|(k, _)| *k == name)
            .map(|&(_, v)| v)
            .unwrap_or_else(|| panic!("no tolerance named {name}"))
    }

    pub fn sig(&self) -> csgrav::algebra::Signature {
        let diag: Vec<f64> = self.signature.iter().map(|&s| s as f64).collect();
        csgrav::algebra::Signature::new(&diag).expect("validated")
    }

    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}
