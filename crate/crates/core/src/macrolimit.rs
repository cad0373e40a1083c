//! Reference macroscopic schemes: exponential fitting and the centered heat scheme.

use serde::{Deserialize, Serialize};

use crate::quadrature::VelocityQuadrature;
use crate::spectral::Response;

/// Drift-diffusion data on a periodic grid; `e_half[j]` sits between cells `j−1` and `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftDiffusionParams {
    pub d: f64,
    pub e_half: Vec<f64>,
    pub dt: f64,
    pub dx: f64,
}

/// `x/(eˣ − 1)`.
pub fn bernoulli(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x / 2.0 + x2 / 12.0 - x2 * x2 / 720.0
    } else {
        x / x.exp_m1()
    }
}

/// Exponentially fitted flux `E(ρ_L − e^{−EΔx/D}ρ_R)/(1 − e^{−EΔx/D})`.
pub fn sg_flux(e: f64, d: f64, dx: f64, rho_left: f64, rho_right: f64) -> f64 {
    debug_assert!(d > 0.0);
    let p = e * dx / d;
    d / dx * (bernoulli(-p) * rho_left - bernoulli(p) * rho_right)
}

/// One conservative step `ρ'_j = ρ_j + (Δt/Δx)(F_{j−1/2} − F_{j+1/2})`.
pub fn sg_step(rho: &[f64], params: &DriftDiffusionParams) -> Vec<f64> {
    let n = rho.len();
    assert_eq!(params.e_half.len(), n, "one interface field per cell");
    let flux: Vec<f64> = (0..n)
        .map(|j| sg_flux(params.e_half[j], params.d, params.dx, rho[(j + n - 1) % n], rho[j]))
        .collect();
    let c = params.dt / params.dx;
    (0..n).map(|j| rho[j] + c * (flux[j] - flux[(j + 1) % n])).collect()
}

/// Centered scheme `ρ'_j = ρ_j + (Δt/Δx²) Σω_k v_k² (ρ_{j−1} − 2ρ_j + ρ_{j+1})`.
pub fn heat_step(rho: &[f64], q: &VelocityQuadrature, dt: f64, dx: f64) -> Vec<f64> {
    let n = rho.len();
    let c = dt / (dx * dx) * q.second_moment();
    (0..n).map(|j| rho[j] + c * (rho[(j + n - 1) % n] - 2.0 * rho[j] + rho[(j + 1) % n])).collect()
}

/// Chemotactic drift `Σ_k ω_k v_k φ(v_k ∂ₓS)` at one interface.
pub fn chemo_drift(q: &VelocityQuadrature, grad_s: f64, response: &Response) -> f64 {
    q.nodes.iter().zip(&q.weights).map(|(v, w)| w * v * response.eval(v * grad_s)).sum()
}

/// Interface gradients `(S_j − S_{j−1})/Δx` on a periodic grid.
pub fn interface_gradients(s: &[f64], dx: f64) -> Vec<f64> {
    let n = s.len();
    (0..n).map(|j| (s[j] - s[(j + n - 1) % n]) / dx).collect()
}

/// Limit scheme of the chemotaxis model: flux `E(e^{3EΔx}ρ_j − ρ_{j−1})/(1 − e^{3EΔx})`.
pub fn sg_chemo_step(rho: &[f64], e_half: &[f64], dt: f64, dx: f64) -> Vec<f64> {
    let params = DriftDiffusionParams { d: 1.0 / 3.0, e_half: e_half.iter().map(|e| -e).collect(), dt, dx };
    sg_step(rho, &params)
}

/// Limit scheme of the Fokker-Planck model: diffusion `κ`, drift `E`.
pub fn sg_vfp_step(rho: &[f64], e_half: &[f64], kappa: f64, dt: f64, dx: f64) -> Vec<f64> {
    sg_step(rho, &DriftDiffusionParams { d: kappa, e_half: e_half.to_vec(), dt, dx })
}

/// Limit scheme of the two-stream model: diffusion 1, drift `φ_{j−1/2}`.
pub fn sg_twostream_step(rho: &[f64], phi_half: &[f64], dt: f64, dx: f64) -> Vec<f64> {
    sg_step(rho, &DriftDiffusionParams { d: 1.0, e_half: phi_half.to_vec(), dt, dx })
}
