//! Run configuration: one JSON document, with `--key value` overrides on
//! top-level keys.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use hls_core::verifier::admissible_q;
use hls_core::{
    ExponentPair, GridSpec, GroupContext, KernelSpec, OmegaABParams, OmegaAParams, SingularRule, TestFunction,
    VParams,
};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    KernelEval,
    Homogeneity,
    Dominance,
    LambdaBracket,
    Apply,
    ClassicalHls,
    ScalingFit,
    Necessity,
    ProbeNorm,
    ProofChain,
    Constraints,
    MuSweep,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::KernelEval => "kernel-eval",
            Command::Homogeneity => "homogeneity",
            Command::Dominance => "dominance",
            Command::LambdaBracket => "lambda-bracket",
            Command::Apply => "apply",
            Command::ClassicalHls => "classical-hls",
            Command::ScalingFit => "scaling-fit",
            Command::Necessity => "necessity",
            Command::ProbeNorm => "probe-norm",
            Command::ProofChain => "proof-chain",
            Command::Constraints => "constraints",
            Command::MuSweep => "mu-sweep",
        }
    }

    fn needs_exponents(&self) -> bool {
        matches!(
            self,
            Command::Apply
                | Command::ScalingFit
                | Command::Necessity
                | Command::ProbeNorm
                | Command::ProofChain
                | Command::Constraints
                | Command::MuSweep
        )
    }

    fn needs_deltas(&self) -> bool {
        matches!(self, Command::ScalingFit | Command::Necessity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    V,
    OmegaA,
    OmegaAb,
    Majorant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Seven isotropic gaussian widths and five zygmund-anisotropic ones.
    GaussianProbe,
    /// Only the configured `function`.
    Single,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub kernel: KernelKind,
    pub n: usize,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    pub beta: f64,
    pub theta: Option<f64>,
    /// Witness parameter of the dominance split; midpoint when unset.
    pub witness_theta: Option<f64>,
    pub p: f64,
    /// Defaults to the admissible `q` for the kernel.
    pub q: Option<f64>,
    /// Extra `(p, q)` pairs for `necessity` and `probe-norm`.
    pub pairs: Option<Vec<(f64, f64)>>,
    #[serde(alias = "L")]
    pub half_width: f64,
    /// Nodes per axis; 33 for `proof-chain`, 17 otherwise.
    #[serde(alias = "N")]
    pub nodes: Option<usize>,
    pub staggered: bool,
    pub deltas: Vec<f64>,
    pub family: FamilyKind,
    /// Input function; the standard gaussian when unset.
    pub function: Option<TestFunction>,
    pub point: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub mus: Vec<f64>,
    /// Probe nodes per axis for `proof-chain`.
    pub probes: usize,
    /// `classical-hls` step sizes `h = 2^{-k}`.
    pub levels: Vec<u32>,
    pub rule: SingularRule,
    pub output: Option<PathBuf>,
    /// `apply` output cache file.
    pub cache: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            kernel: KernelKind::V,
            n: 1,
            mu: 1.0,
            a: 0.5,
            b: 0.25,
            alpha: 0.5,
            alpha1: None,
            alpha2: None,
            beta: 0.25,
            theta: None,
            witness_theta: None,
            p: 2.0,
            q: None,
            pairs: None,
            half_width: 6.0,
            nodes: None,
            staggered: false,
            deltas: vec![1.0, 2.0, 4.0, 8.0],
            family: FamilyKind::GaussianProbe,
            function: None,
            point: None,
            samples: None,
            mus: vec![-2.0, -1.0, 0.0, 1.0, 2.0],
            probes: 5,
            levels: vec![7, 8, 9, 10],
            rule: SingularRule::ZetaCorrected,
            output: None,
            cache: None,
            seed: 20240601,
        }
    }
}

/// Parses an override value as JSON, falling back to a plain string.
pub fn parse_override(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        Self::from_value(serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?)
    }

    pub fn from_value(value: Value) -> Result<Self, CliError> {
        serde_json::from_value(value).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    /// Loads an optional config file and applies `(key, raw value)` overrides.
    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<Self, CliError> {
        let mut map = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
                match serde_json::from_str::<Value>(&text) {
                    Ok(Value::Object(m)) => m,
                    Ok(_) => return Err(CliError::Usage("config must be a JSON object".into())),
                    Err(e) => return Err(CliError::Usage(format!("config {}: {e}", p.display()))),
                }
            }
            None => Map::new(),
        };
        for (key, raw) in overrides {
            map.insert(key.clone(), parse_override(raw));
        }
        Self::from_value(Value::Object(map))
    }

    pub fn command(&self) -> Result<Command, CliError> {
        self.command.ok_or_else(|| CliError::Usage("no command given".into()))
    }

    pub fn nodes_for(&self, command: Command) -> usize {
        self.nodes.unwrap_or(if command == Command::ProofChain { 33 } else { 17 })
    }

    pub fn v_params(&self) -> hls_core::Result<VParams> {
        VParams::new(
            self.n,
            self.alpha1.unwrap_or(self.alpha),
            self.alpha2.unwrap_or(self.alpha),
            self.beta,
            self.theta,
        )
    }

    pub fn kernel_spec(&self) -> hls_core::Result<KernelSpec> {
        Ok(match self.kernel {
            KernelKind::V => KernelSpec::V(self.v_params()?),
            KernelKind::OmegaA => KernelSpec::OmegaA(OmegaAParams::new(self.n, self.a)?),
            KernelKind::OmegaAb => KernelSpec::OmegaAB(OmegaABParams::new(self.n, self.a, self.b)?),
            KernelKind::Majorant => KernelSpec::separable_majorant(self.n, self.alpha + self.beta)?,
        })
    }

    pub fn function(&self) -> TestFunction {
        self.function.clone().unwrap_or_else(|| TestFunction::standard_gaussian(self.n))
    }

    /// Validates every field the command reads, before any computation.
    pub fn validate(&self) -> Result<Setup, CliError> {
        let command = self.command()?;
        let ctx = GroupContext::new(self.n, self.mu)?;
        let kernel = self.kernel_spec()?;
        let function = self.function();
        function.validate(self.n)?;
        let grid = GridSpec::heisenberg(self.n, self.half_width, self.nodes_for(command), self.staggered)?;

        let mut pairs = Vec::new();
        if command.needs_exponents() {
            let q = match self.q {
                Some(q) => q,
                None => admissible_q(self.n, kernel.homogeneity_sum(), self.p)?,
            };
            pairs.push(ExponentPair::new(self.p, q)?);
            if let Some(extra) = &self.pairs {
                if matches!(command, Command::Necessity | Command::ProbeNorm | Command::ScalingFit) {
                    pairs = extra.iter().map(|(p, q)| ExponentPair::new(*p, *q)).collect::<hls_core::Result<_>>()?;
                }
            }
            if pairs.is_empty() {
                return Err(CliError::Usage("pairs must not be empty".into()));
            }
        }
        if command.needs_deltas() {
            if self.deltas.len() < 3 {
                return Err(CliError::Usage("deltas needs at least 3 values".into()));
            }
            if self.deltas.iter().any(|d| !(d.is_finite() && *d >= 1.0)) {
                return Err(CliError::Usage("deltas must be >= 1".into()));
            }
        }
        if self.samples == Some(0) {
            return Err(CliError::Usage("samples must be positive".into()));
        }
        match command {
            Command::KernelEval => {
                let dim = 2 * self.n + 1;
                if let Some(p) = &self.point {
                    if p.len() != dim {
                        return Err(CliError::Usage(format!("point needs {dim} coordinates")));
                    }
                }
            }
            Command::ClassicalHls => {
                if !(self.a > 0.0 && self.a < 1.0) {
                    return Err(CliError::Usage("classical-hls needs 0 < a < 1".into()));
                }
                if self.levels.is_empty() || self.levels.iter().any(|k| *k > 20) {
                    return Err(CliError::Usage("levels must be a nonempty list of k <= 20".into()));
                }
            }
            Command::ProofChain => {
                let v = self.v_params()?;
                if !v.has_sharp_theta() {
                    return Err(CliError::Usage("proof-chain needs alpha1 = alpha2 and the sharp theta".into()));
                }
                if self.n != 1 || self.probes == 0 || self.probes > grid.nodes_per_axis() {
                    return Err(CliError::Usage("proof-chain needs n = 1 and 1 <= probes <= N".into()));
                }
            }
            Command::Constraints => {
                if !matches!(self.kernel, KernelKind::V | KernelKind::OmegaAb) {
                    return Err(CliError::Usage("constraints needs kernel v or omega_ab".into()));
                }
            }
            Command::MuSweep if self.mus.is_empty() => {
                return Err(CliError::Usage("mus must not be empty".into()));
            }
            _ => {}
        }
        if matches!(command, Command::Apply | Command::ScalingFit | Command::Necessity | Command::ProbeNorm | Command::MuSweep) {
            kernel.check_integrable()?;
        }
        Ok(Setup { command, ctx, kernel, function, grid, pairs })
    }
}

/// Validated inputs shared by the experiments.
#[derive(Debug, Clone)]
pub struct Setup {
    pub command: Command,
    pub ctx: GroupContext,
    pub kernel: KernelSpec,
    pub function: TestFunction,
    pub grid: GridSpec,
    pub pairs: Vec<ExponentPair>,
}
