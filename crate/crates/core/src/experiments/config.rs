//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::Response;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Twostream,
    Rte,
    Chemo,
    Vfp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialDensity {
    Uniform,
    CosineBump,
    Gaussian,
}

/// Interface field of the Fokker-Planck model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EProfile {
    /// `a sin(2πx/L)`.
    Sine { amplitude: f64 },
    Constant { value: f64 },
}

impl EProfile {
    pub fn eval(&self, x: f64, length: f64) -> f64 {
        match *self {
            EProfile::Sine { amplitude } => amplitude * (std::f64::consts::TAU * x / length).sin(),
            EProfile::Constant { value } => value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    #[serde(rename = "K", default = "default_k")]
    pub k: usize,
    #[serde(rename = "Nx")]
    pub nx: usize,
    /// Defaults to `1/Nx`.
    #[serde(default)]
    pub dx: Option<f64>,
    /// Defaults to a stable multiple of `Δx²`, see [`ExperimentConfig::dt`].
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub epsilon_list: Option<Vec<f64>>,
    #[serde(default)]
    pub t_final: Option<f64>,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(rename = "E_profile", default)]
    pub e_profile: Option<EProfile>,
    #[serde(default)]
    pub phi_params: Option<Response>,
    pub initial_density: InitialDensity,
    #[serde(default)]
    pub seed: u64,
    /// Amplitude of a seeded multiplicative perturbation of the initial density.
    #[serde(default)]
    pub noise: f64,
    /// Steps between density snapshots; `0` writes only the first and last.
    #[serde(default)]
    pub snapshot_every: usize,
    /// Initial nodes handed to the Fokker-Planck quadrature construction.
    #[serde(default)]
    pub candidate_nodes: Option<Vec<f64>>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_k() -> usize {
    4
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be a positive finite number, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s).map_err(|e| Error::config("config", e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn dx(&self) -> f64 {
        self.dx.unwrap_or(1.0 / self.nx.max(1) as f64)
    }

    /// Given `Δt`, else `Δx²` for rte/chemo and `Δx²/4` (`Δx²/4κ` for vfp) for the
    /// models whose explicit interface terms carry unit diffusivity.
    pub fn dt(&self) -> f64 {
        let h2 = self.dx() * self.dx();
        self.dt.unwrap_or(match self.model {
            ModelKind::Rte | ModelKind::Chemo => h2,
            ModelKind::Twostream => 0.25 * h2,
            ModelKind::Vfp => 0.25 * h2 / self.kappa.unwrap_or(1.0),
        })
    }

    pub fn length(&self) -> f64 {
        self.nx as f64 * self.dx()
    }

    pub fn response(&self) -> Response {
        self.phi_params.unwrap_or_default()
    }

    pub fn candidates(&self) -> Vec<f64> {
        self.candidate_nodes.clone().unwrap_or_else(|| default_candidates(self.k))
    }

    /// Number of steps to reach `t_final`.
    pub fn steps(&self) -> usize {
        match self.t_final {
            Some(t) => (t / self.dt()).round() as usize,
            None => 0,
        }
    }

    /// Field-level validation shared by every command.
    pub fn validate_common(&self) -> Result<()> {
        if self.nx < 3 {
            return Err(Error::config("Nx", format!("need at least 3 cells, got {}", self.nx)));
        }
        if let Some(dx) = self.dx {
            positive("dx", dx)?;
        }
        if let Some(dt) = self.dt {
            positive("dt", dt)?;
        }
        if self.noise < 0.0 || !self.noise.is_finite() || self.noise >= 1.0 {
            return Err(Error::config("noise", "must lie in [0, 1)"));
        }
        if self.model == ModelKind::Vfp {
            match self.kappa {
                Some(k) => positive("kappa", k)?,
                None => return Err(Error::config("kappa", "required for the vfp model")),
            }
            if self.e_profile.is_none() {
                return Err(Error::config("E_profile", "required for the vfp model"));
            }
            if self.k < 2 {
                return Err(Error::config("K", "vfp model needs K >= 2"));
            }
        }
        if matches!(self.model, ModelKind::Rte | ModelKind::Chemo) && self.k < 2 {
            return Err(Error::config("K", "rte and chemo models need K >= 2"));
        }
        if let Some(Response::Tanh { delta, .. }) = self.phi_params {
            positive("phi_params.delta", delta)?;
        }
        Ok(())
    }

    pub fn validate_run(&self) -> Result<()> {
        self.validate_common()?;
        match self.epsilon {
            Some(e) => positive("epsilon", e)?,
            None => return Err(Error::config("epsilon", "required for run")),
        }
        match self.t_final {
            Some(t) if t.is_finite() && t >= 0.0 => {}
            Some(t) => return Err(Error::config("t_final", format!("must be nonnegative, got {t}"))),
            None => return Err(Error::config("t_final", "required for run")),
        }
        Ok(())
    }

    pub fn validate_sweep(&self) -> Result<()> {
        self.validate_common()?;
        match &self.epsilon_list {
            Some(list) if !list.is_empty() => {
                for e in list {
                    positive("epsilon_list", *e)?;
                }
            }
            _ => return Err(Error::config("epsilon_list", "required and nonempty for sweep")),
        }
        Ok(())
    }
}

/// Initial nodes for the Fokker-Planck quadrature.
pub fn default_candidates(k: usize) -> Vec<f64> {
    match k {
        1 => vec![1.0],
        2 => vec![0.6, 1.6],
        3 => vec![0.6, 1.4, 2.4],
        _ => (0..k).map(|i| 0.5 + i as f64).collect(),
    }
}
