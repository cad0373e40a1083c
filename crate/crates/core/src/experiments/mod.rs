//! Batch runner behind the `kinwb` command line.

pub mod config;
pub mod verify;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::diagnostics::{ap_gap, loglog_slope, ts_ap_gap, ApSetup};
use crate::error::{Error, Result};
use crate::kinetic_solver::{
    chemoattractant_update, density, interface_params, ImexOperator, KineticGrid, Model,
    warn_cfl,
};
use crate::par::{try_map_range, Execution};
use crate::quadrature::{gauss_symmetric, vfp_quadrature, VelocityQuadrature};
use crate::spectral::Response;
use crate::twostream::{ts_step, twostream_quadrature, TwoStreamState};

pub use config::{EProfile, ExperimentConfig, InitialDensity, ModelKind};

/// Decimal scientific notation with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub const MANIFEST: &str = "manifest.json";

/// Velocity set of the configured model.
pub fn build_quadrature(cfg: &ExperimentConfig) -> Result<VelocityQuadrature> {
    match cfg.model {
        ModelKind::Twostream => Ok(twostream_quadrature()),
        ModelKind::Rte | ModelKind::Chemo => gauss_symmetric(cfg.k),
        ModelKind::Vfp => vfp_quadrature(cfg.k, cfg.kappa.unwrap_or(1.0), &cfg.candidates()),
    }
}

/// Kinetic model of the configured run; `None` for the two-stream model.
pub fn kinetic_model(cfg: &ExperimentConfig) -> Option<Model> {
    match cfg.model {
        ModelKind::Twostream => None,
        ModelKind::Rte => Some(Model::Rte),
        ModelKind::Chemo => Some(Model::Chemo { response: cfg.response() }),
        ModelKind::Vfp => Some(Model::Vfp { kappa: cfg.kappa.unwrap_or(1.0) }),
    }
}

/// Initial density at cell centers `x_j = jΔx`.
pub fn initial_density(cfg: &ExperimentConfig) -> Vec<f64> {
    let dx = cfg.dx();
    let l = cfg.length();
    let mut rho: Vec<f64> = (0..cfg.nx)
        .map(|j| {
            let x = j as f64 * dx;
            match cfg.initial_density {
                InitialDensity::Uniform => 1.0,
                InitialDensity::CosineBump => 1.0 + 0.5 * (std::f64::consts::TAU * x / l).cos(),
                InitialDensity::Gaussian => {
                    let w = 0.1 * l;
                    0.1 + (-(x - 0.5 * l).powi(2) / (2.0 * w * w)).exp()
                }
            }
        })
        .collect();
    if cfg.noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for r in &mut rho {
            *r *= 1.0 + cfg.noise * rng.gen_range(-1.0..1.0);
        }
    }
    rho
}

/// Interface field `E((j − 1/2)Δx)`.
pub fn interface_field(cfg: &ExperimentConfig) -> Vec<f64> {
    let dx = cfg.dx();
    let l = cfg.length();
    match cfg.e_profile {
        Some(p) => (0..cfg.nx).map(|j| p.eval((j as f64 - 0.5) * dx, l)).collect(),
        None => vec![0.0; cfg.nx],
    }
}

enum State {
    Kinetic { grid: KineticGrid, model: Model, e_half: Vec<f64>, frozen: Option<ImexOperator> },
    TwoStream { state: TwoStreamState, response: Response },
}

/// Time stepper over either scheme.
pub struct Simulation {
    state: State,
    exec: Execution,
}

impl Simulation {
    pub fn new(cfg: &ExperimentConfig, epsilon: f64, exec: Execution) -> Result<Self> {
        let rho = initial_density(cfg);
        let state = match kinetic_model(cfg) {
            None => State::TwoStream {
                state: TwoStreamState::from_density(cfg.nx, cfg.dx(), cfg.dt(), epsilon, &rho),
                response: cfg.response(),
            },
            Some(model) => {
                let q = build_quadrature(cfg)?;
                let mut grid = KineticGrid::new(cfg.nx, cfg.dx(), cfg.dt(), epsilon, q)?;
                grid.set_equilibrium(&rho);
                warn_cfl(&grid);
                let e_half = interface_field(cfg);
                let frozen = match model {
                    Model::Chemo { .. } => None,
                    _ => {
                        let params = interface_params(&model, &grid, Some(&e_half));
                        Some(ImexOperator::new(&grid, &model, &params, exec)?)
                    }
                };
                State::Kinetic { grid, model, e_half, frozen }
            }
        };
        Ok(Simulation { state, exec })
    }

    pub fn step(&mut self) -> Result<()> {
        match &mut self.state {
            State::Kinetic { grid, model, e_half, frozen } => {
                let f = match frozen {
                    Some(op) => op.apply(&grid.f, self.exec),
                    None => {
                        let params = interface_params(model, grid, Some(e_half));
                        ImexOperator::new(grid, model, &params, self.exec)?.apply(&grid.f, self.exec)
                    }
                };
                if f.iter().any(|x| !x.is_finite()) {
                    return Err(Error::SolveFailure("non-finite state after step"));
                }
                grid.f = f;
            }
            State::TwoStream { state, response } => {
                *state = ts_step(state, response, self.exec)?;
            }
        }
        Ok(())
    }

    pub fn density(&self) -> Vec<f64> {
        match &self.state {
            State::Kinetic { grid, .. } => density(grid),
            State::TwoStream { state, .. } => state.density(),
        }
    }

    pub fn dx(&self) -> f64 {
        match &self.state {
            State::Kinetic { grid, .. } => grid.dx,
            State::TwoStream { state, .. } => state.dx,
        }
    }

    pub fn mass(&self) -> f64 {
        self.density().iter().sum::<f64>() * self.dx()
    }

    /// Chemoattractant of the current density for the chemotaxis models.
    pub fn chemoattractant(&self) -> Option<Vec<f64>> {
        match &self.state {
            State::Kinetic { model: Model::Chemo { .. }, .. } | State::TwoStream { .. } => {
                Some(chemoattractant_update(&self.density(), self.dx()))
            }
            State::Kinetic { .. } => None,
        }
    }

    /// Snapshot CSV with columns `t, x, rho[, S]`.
    pub fn snapshot_csv(&self, t: f64) -> String {
        let rho = self.density();
        let s = self.chemoattractant();
        let dx = self.dx();
        let mut out = String::from(if s.is_some() { "t,x,rho,S\n" } else { "t,x,rho\n" });
        for (j, r) in rho.iter().enumerate() {
            out.push_str(&format!("{},{},{}", fmt17(t), fmt17(j as f64 * dx), fmt17(*r)));
            if let Some(s) = &s {
                out.push_str(&format!(",{}", fmt17(s[j])));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub steps: usize,
    pub initial_mass: f64,
    pub final_mass: f64,
    pub mass_drift: f64,
    pub max_step_drift: f64,
    pub snapshots: Vec<String>,
}

/// Outcome of a command: process exit code and the manifest written to disk.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    pub manifest: Value,
    pub output_dir: PathBuf,
}

fn error_value(e: &Error) -> Value {
    json!({ "module": e.module(), "message": e.to_string(), "exit_code": e.exit_code() })
}

fn write_manifest(dir: &Path, manifest: &Value) {
    let text = serde_json::to_string_pretty(manifest).expect("serializable manifest") + "\n";
    if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(dir.join(MANIFEST), text)) {
        log::error!("cannot write manifest in {}: {e}", dir.display());
    }
}

fn finish(command: &str, cfg: Option<&ExperimentConfig>, dir: PathBuf, started: Instant, result: Result<Value>) -> Outcome {
    let wall = started.elapsed().as_secs_f64();
    let (exit_code, status, summary, error) = match result {
        Ok(v) => (0, "ok", v, Value::Null),
        Err(e) => {
            log::error!("{} failed in module {}: {e}", command, e.module());
            (e.exit_code(), "error", Value::Null, error_value(&e))
        }
    };
    let manifest = json!({
        "command": command,
        "status": status,
        "config": cfg,
        "wall_time_s": wall,
        "summary": summary,
        "error": error,
    });
    write_manifest(&dir, &manifest);
    Outcome { exit_code, manifest, output_dir: dir }
}

fn output_dir(cfg: Option<&ExperimentConfig>, out: Option<&Path>) -> PathBuf {
    match (out, cfg) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(c)) => c.output_dir.clone(),
        (None, None) => PathBuf::from("out"),
    }
}

fn run_inner(cfg: &ExperimentConfig, dir: &Path, exec: Execution) -> Result<Value> {
    cfg.validate_run()?;
    std::fs::create_dir_all(dir)?;
    let epsilon = cfg.epsilon.expect("validated");
    let steps = cfg.steps();
    let dt = cfg.dt();
    let mut sim = Simulation::new(cfg, epsilon, exec)?;
    let every = if cfg.snapshot_every == 0 { steps.max(1) } else { cfg.snapshot_every };
    let mut snapshots = Vec::new();
    let mut write = |sim: &Simulation, n: usize| -> Result<()> {
        let name = format!("snapshot_{n:06}.csv");
        std::fs::write(dir.join(&name), sim.snapshot_csv(n as f64 * dt))?;
        snapshots.push(name);
        Ok(())
    };
    write(&sim, 0)?;
    let initial_mass = sim.mass();
    let mut prev = initial_mass;
    let mut max_step_drift: f64 = 0.0;
    for n in 1..=steps {
        sim.step()?;
        let m = sim.mass();
        max_step_drift = max_step_drift.max((m - prev).abs());
        prev = m;
        if n % every == 0 || n == steps {
            write(&sim, n)?;
        }
        log::debug!("step {n}/{steps} mass {m:.17e}");
    }
    let summary = RunSummary {
        steps,
        initial_mass,
        final_mass: prev,
        mass_drift: (prev - initial_mass).abs(),
        max_step_drift,
        snapshots,
    };
    log::info!("run finished: {steps} steps, mass drift {:.3e}", summary.mass_drift);
    Ok(serde_json::to_value(summary).expect("serializable summary"))
}

/// `kinwb run`: time integration with density snapshots.
pub fn run(cfg: &ExperimentConfig, out: Option<&Path>, exec: Execution) -> Outcome {
    let started = Instant::now();
    let dir = output_dir(Some(cfg), out);
    let result = run_inner(cfg, &dir, exec);
    finish("run", Some(cfg), dir, started, result)
}

/// One-step gaps of every configured ε against the limit scheme.
pub fn sweep_table(cfg: &ExperimentConfig, exec: Execution) -> Result<(Vec<f64>, Vec<f64>, Option<f64>)> {
    cfg.validate_sweep()?;
    let eps = cfg.epsilon_list.clone().expect("validated");
    let setup = ApSetup {
        nx: cfg.nx,
        dx: cfg.dx(),
        dt: cfg.dt(),
        rho0: initial_density(cfg),
        e_half: interface_field(cfg),
    };
    let errors = match kinetic_model(cfg) {
        None => try_map_range(eps.len(), exec, |i| ts_ap_gap(&cfg.response(), eps[i], &setup, exec))?,
        Some(model) => {
            let q = build_quadrature(cfg)?;
            try_map_range(eps.len(), exec, |i| ap_gap(&model, &q, eps[i], &setup, exec))?
        }
    };
    let slope = loglog_slope(&eps, &errors);
    Ok((eps, errors, slope))
}

/// Sweep table as CSV with an optional `slope` footer row.
pub fn sweep_csv(eps: &[f64], errors: &[f64], slope: Option<f64>) -> String {
    let mut out = String::from("epsilon,error\n");
    for (e, r) in eps.iter().zip(errors) {
        out.push_str(&format!("{},{}\n", fmt17(*e), fmt17(*r)));
    }
    if let Some(s) = slope {
        out.push_str(&format!("slope,{}\n", fmt17(s)));
    }
    out
}

fn sweep_inner(cfg: &ExperimentConfig, dir: &Path, exec: Execution) -> Result<Value> {
    let (eps, errors, slope) = sweep_table(cfg, exec)?;
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("sweep.csv"), sweep_csv(&eps, &errors, slope))?;
    Ok(json!({ "epsilons": eps, "errors": errors, "slope": slope, "table": "sweep.csv" }))
}

/// `kinwb sweep`: asymptotic-consistency table over `epsilon_list`.
pub fn sweep(cfg: &ExperimentConfig, out: Option<&Path>, exec: Execution) -> Outcome {
    let started = Instant::now();
    let dir = output_dir(Some(cfg), out);
    let result = sweep_inner(cfg, &dir, exec);
    finish("sweep", Some(cfg), dir, started, result)
}

/// Manifest for a configuration that failed to load.
pub fn config_failure(command: &str, err: Error, out: Option<&Path>) -> Outcome {
    let dir = output_dir(None, out);
    finish(command, None, dir, Instant::now(), Err(err))
}
