//! Two-velocity scheme with closed-form scattering matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::experiments::fmt17;
use crate::kinetic_solver::chemoattractant_update;
use crate::linalg::exprel;
use crate::macrolimit::interface_gradients;
use crate::par::{map_range, Execution};
use crate::quadrature::{Domain, VelocityQuadrature};
use crate::spectral::Response;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoStreamState {
    pub nx: usize,
    pub dx: f64,
    pub dt: f64,
    pub epsilon: f64,
    pub f_plus: Vec<f64>,
    pub f_minus: Vec<f64>,
    pub s: Vec<f64>,
}

/// Velocity set `{±1}` with unit weight, used by the generic diagnostics.
pub fn twostream_quadrature() -> VelocityQuadrature {
    VelocityQuadrature { domain: Domain::UnitInterval, k: 1, kappa: None, nodes: vec![1.0], weights: vec![1.0] }
}

/// `c = 2εφ/(ℰ − 1 − εφ(1 + ℰ))` with `ℰ = e^{−φΔx}`, written as
/// `−2ε/(Δx (1 − ℰ)/(φΔx) + ε(1 + ℰ))` so that `φ = 0` is regular.
fn reflection_coefficient(epsilon: f64, dx: f64, phi: f64) -> Result<(f64, f64)> {
    let cal_e = (-phi * dx).exp();
    let den = dx * exprel(-phi * dx) + epsilon * (1.0 + cal_e);
    if !(den.is_finite() && den > 0.0) {
        return Err(Error::DegenerateDenominator(den));
    }
    Ok((-2.0 * epsilon / den, cal_e))
}

/// Interface scattering matrix `[[−c, 1 + cℰ], [1 + c, −cℰ]]`.
pub fn ts_smatrix(epsilon: f64, dx: f64, phi_half: f64) -> Result<DMatrix<f64>> {
    let (c, e) = reflection_coefficient(epsilon, dx, phi_half)?;
    Ok(DMatrix::from_row_slice(2, 2, &[-c, 1.0 + c * e, 1.0 + c, -c * e]))
}

/// Current `J̄ = −2φ(f⁺_{j−1} − ℰ f⁻_j)/(ℰ − 1 − εφ(1 + ℰ))`.
pub fn ts_current(epsilon: f64, dx: f64, phi_half: f64, f_plus_left: f64, f_minus_right: f64) -> Result<f64> {
    let (c, e) = reflection_coefficient(epsilon, dx, phi_half)?;
    Ok(-c / epsilon * (f_plus_left - e * f_minus_right))
}

impl TwoStreamState {
    /// Equilibrium `f⁺ = f⁻ = ρ/2`.
    pub fn from_density(nx: usize, dx: f64, dt: f64, epsilon: f64, rho: &[f64]) -> Self {
        assert_eq!(rho.len(), nx);
        let half: Vec<f64> = rho.iter().map(|r| 0.5 * r).collect();
        TwoStreamState {
            nx,
            dx,
            dt,
            epsilon,
            f_plus: half.clone(),
            f_minus: half,
            s: chemoattractant_update(rho, dx),
        }
    }

    pub fn density(&self) -> Vec<f64> {
        self.f_plus.iter().zip(&self.f_minus).map(|(a, b)| a + b).collect()
    }

    pub fn mass(&self) -> f64 {
        self.density().iter().sum::<f64>() * self.dx
    }

    /// Interface drifts `φ((S_j − S_{j−1})/Δx)` from the stored chemoattractant.
    pub fn phi_half(&self, response: &Response) -> Vec<f64> {
        interface_gradients(&self.s, self.dx).iter().map(|g| response.eval(*g)).collect()
    }

    /// CSV with columns `j, x, f+, f-, rho, S`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,x,f+,f-,rho,S\n");
        for j in 0..self.nx {
            out.push_str(&format!(
                "{j},{},{},{},{},{}\n",
                fmt17(j as f64 * self.dx),
                fmt17(self.f_plus[j]),
                fmt17(self.f_minus[j]),
                fmt17(self.f_plus[j] + self.f_minus[j]),
                fmt17(self.s[j])
            ));
        }
        out
    }
}

/// One step with the chemoattractant recomputed from `ρⁿ`.
pub fn ts_step(state: &TwoStreamState, response: &Response, exec: Execution) -> Result<TwoStreamState> {
    let mut fresh = state.clone();
    fresh.s = chemoattractant_update(&state.density(), state.dx);
    let phi = fresh.phi_half(response);
    ts_step_with_phi(&fresh, &phi, exec)
}

/// One step with prescribed interface drifts `phi_half[j]` between cells `j−1` and `j`.
pub fn ts_step_with_phi(state: &TwoStreamState, phi_half: &[f64], exec: Execution) -> Result<TwoStreamState> {
    let n = state.nx;
    assert_eq!(phi_half.len(), n);
    let currents = (0..n)
        .map(|j| {
            let jm = (j + n - 1) % n;
            ts_current(state.epsilon, state.dx, phi_half[j], state.f_plus[jm], state.f_minus[j])
        })
        .collect::<Result<Vec<f64>>>()?;
    let c = state.dt / (state.epsilon * state.dx);
    let h = state.dt / state.dx;
    let det = 1.0 + 2.0 * c;
    let cells = map_range(n, exec, |j| {
        let r1 = state.f_plus[j] + h * currents[j];
        let r2 = state.f_minus[j] - h * currents[(j + 1) % n];
        (((1.0 + c) * r1 + c * r2) / det, ((1.0 + c) * r2 + c * r1) / det)
    });
    let mut next = state.clone();
    for (j, (p, m)) in cells.into_iter().enumerate() {
        next.f_plus[j] = p;
        next.f_minus[j] = m;
    }
    Ok(next)
}

/// `ℛ_ε` of the two-stream scheme.
pub fn ts_cell_matrix(epsilon: f64, dt: f64, dx: f64) -> DMatrix<f64> {
    let c = dt / dx;
    DMatrix::from_row_slice(2, 2, &[epsilon + c, -c, -c, epsilon + c])
}
