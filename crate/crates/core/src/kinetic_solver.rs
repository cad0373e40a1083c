//! IMEX well-balanced time marching on a periodic grid.

use nalgebra::{DMatrix, DVector, Dyn, LU};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{null_space, solve_cyclic_tridiagonal, split4};
use crate::par::{map_range, try_map_range, Execution};
use crate::quadrature::VelocityQuadrature;
use crate::scattering::{
    chemo_closure, chemo_smatrix, flux_weights, remove_flux_defect, rte_closure, rte_smatrix, vfp_smatrix,
    ScatteringDecomposition,
};
use crate::spectral::{dispersion_roots, Response};

/// Discrete-ordinates model advanced by [`imex_step`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Rte,
    Chemo { response: Response },
    Vfp { kappa: f64 },
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Rte => "rte",
            Model::Chemo { .. } => "chemo",
            Model::Vfp { .. } => "vfp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Periodic,
}

/// Kinetic state: row `j` of `f` holds `f_j(v_1..v_K), f_j(−v_1..−v_K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticGrid {
    pub nx: usize,
    pub dx: f64,
    pub dt: f64,
    pub epsilon: f64,
    pub q: VelocityQuadrature,
    pub f: Vec<f64>,
    pub boundary: Boundary,
}

/// Macroscopic fields on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroField {
    pub rho: Vec<f64>,
    pub s: Option<Vec<f64>>,
    /// Interface data, entry `j` between cells `j−1` and `j`.
    pub e_half: Vec<f64>,
}

impl KineticGrid {
    pub fn new(nx: usize, dx: f64, dt: f64, epsilon: f64, q: VelocityQuadrature) -> Result<Self> {
        if nx == 0 {
            return Err(Error::InvalidInput("Nx must be positive".into()));
        }
        for (name, val) in [("dx", dx), ("dt", dt), ("epsilon", epsilon)] {
            if !(val.is_finite() && val > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {val}")));
            }
        }
        q.validate()?;
        let f = vec![0.0; nx * 2 * q.k];
        Ok(KineticGrid { nx, dx, dt, epsilon, q, f, boundary: Boundary::Periodic })
    }

    /// Width of one cell row, `2K`.
    pub fn width(&self) -> usize {
        2 * self.q.k
    }

    pub fn cell(&self, j: usize) -> &[f64] {
        let w = self.width();
        &self.f[j * w..(j + 1) * w]
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx
    }

    /// Sets every cell to `ρ_j/(2σ)·M(±V)`, with `M` the model Maxwellian and
    /// `σ = Σ_k ω_k M(v_k)`, so that the cell density equals `ρ_j`.
    pub fn set_equilibrium(&mut self, rho: &[f64]) {
        assert_eq!(rho.len(), self.nx);
        let m = self.q.maxwellian();
        let sigma: f64 = (0..self.q.k).map(|i| self.q.weights[i] * m[i]).sum();
        let w = self.width();
        for (j, r) in rho.iter().enumerate() {
            for i in 0..w {
                self.f[j * w + i] = r / (2.0 * sigma) * m[i];
            }
        }
    }

    /// CSV with columns `j, x_j, f(v_1..v_K), f(−v_1..−v_K)`.
    pub fn to_csv(&self) -> String {
        let k = self.q.k;
        let mut out = String::from("j,x");
        for i in 1..=k {
            out.push_str(&format!(",f(v{i})"));
        }
        for i in 1..=k {
            out.push_str(&format!(",f(-v{i})"));
        }
        out.push('\n');
        for j in 0..self.nx {
            out.push_str(&format!("{j},{}", crate::experiments::fmt17(self.x(j))));
            for v in self.cell(j) {
                out.push(',');
                out.push_str(&crate::experiments::fmt17(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// `ρ_j = Σ_k ω_k (f_j(v_k) + f_j(−v_k))`.
pub fn density(grid: &KineticGrid) -> Vec<f64> {
    let k = grid.q.k;
    (0..grid.nx)
        .map(|j| {
            let c = grid.cell(j);
            (0..k).map(|i| grid.q.weights[i] * (c[i] + c[k + i])).sum()
        })
        .collect()
}

/// Density together with the interface data used for the step.
pub fn macro_field(grid: &KineticGrid, s: Option<Vec<f64>>, e_half: Vec<f64>) -> MacroField {
    MacroField { rho: density(grid), s, e_half }
}

/// Total mass `Δx Σ_j ρ_j`.
pub fn total_mass(grid: &KineticGrid) -> f64 {
    density(grid).iter().sum::<f64>() * grid.dx
}

/// Positivity condition `v_K Δt ≤ ε Δx`.
pub fn cfl_check(grid: &KineticGrid) -> bool {
    let vmax = grid.q.nodes.last().copied().unwrap_or(0.0);
    vmax * grid.dt <= grid.epsilon * grid.dx
}

/// Logs a warning when the positivity condition of [`cfl_check`] fails.
pub fn warn_cfl(grid: &KineticGrid) {
    if !cfl_check(grid) {
        log::warn!(
            "dt = {:e} exceeds the positivity bound eps*dx/v_max = {:e}",
            grid.dt,
            grid.epsilon * grid.dx / grid.q.nodes.last().copied().unwrap_or(1.0)
        );
    }
}

/// `ℛ_ε = εI + (Δt/Δx) 𝕍 [I, −S⁰_left; −S⁰_right, I]`.
pub fn assemble_cell_matrix(
    epsilon: f64,
    dt: f64,
    dx: f64,
    q: &VelocityQuadrature,
    s0_left: &DMatrix<f64>,
    s0_right: &DMatrix<f64>,
) -> DMatrix<f64> {
    let k = q.k;
    let c = dt / dx;
    let mut r = DMatrix::<f64>::identity(2 * k, 2 * k) * epsilon;
    for i in 0..k {
        let v = c * q.nodes[i];
        r[(i, i)] += v;
        r[(k + i, k + i)] += v;
        for l in 0..k {
            r[(i, k + l)] -= v * s0_left[(i, l)];
            r[(k + i, l)] -= v * s0_right[(i, l)];
        }
    }
    r
}

/// Periodic solve of `−(S_{j+1} − 2S_j + S_{j−1})/Δx² + S_j = ρ_j`.
pub fn chemoattractant_update(rho: &[f64], dx: f64) -> Vec<f64> {
    let n = rho.len();
    let off = -1.0 / (dx * dx);
    let diag = 2.0 / (dx * dx) + 1.0;
    solve_cyclic_tridiagonal(&vec![off; n], &vec![diag; n], &vec![off; n], rho)
}

/// Scattering decompositions of every interface; `params[j]` is `∂ₓS` (chemo) or `E` (vfp)
/// at the interface between cells `j−1` and `j`, and is ignored for rte.
pub fn interface_decompositions(
    model: &Model,
    q: &VelocityQuadrature,
    epsilon: f64,
    dx: f64,
    params: &[f64],
    exec: Execution,
) -> Result<Vec<ScatteringDecomposition>> {
    match model {
        Model::Rte => {
            let spec = dispersion_roots(q, &vec![1.0; 2 * q.k])?;
            let closure = rte_closure(q, &spec)?;
            let d = rte_smatrix(epsilon, dx, q, &spec, &closure)?;
            Ok(vec![d; params.len()])
        }
        Model::Chemo { response } => {
            let _ = chemo_closure(q)?;
            try_map_range(params.len(), exec, |j| chemo_smatrix(epsilon, dx, q, params[j], response))
        }
        Model::Vfp { kappa } => try_map_range(params.len(), exec, |j| vfp_smatrix(epsilon, dx, q, params[j], *kappa)),
    }
}

/// `B` of one interface with the net flux `Σ_r γ_r B_rc` of every column removed.
///
/// The removed part vanishes on incoming traces of the local equilibrium, so
/// stationary states and the limit scheme are unchanged while interface fluxes
/// telescope exactly.
pub fn conservative_blocks(d: &ScatteringDecomposition, gamma: &[f64]) -> [DMatrix<f64>; 4] {
    let mut b = d.b_full();
    remove_flux_defect(&mut b, gamma);
    split4(&b)
}

/// Assembled IMEX update for fixed interface data.
#[derive(Debug, Clone)]
pub struct ImexOperator {
    pub nx: usize,
    pub k: usize,
    pub dx: f64,
    pub dt: f64,
    pub epsilon: f64,
    pub decomps: Vec<ScatteringDecomposition>,
    /// Interface corrections `B` projected onto zero net flux, see [`conservative_blocks`].
    pub blocks: Vec<[DMatrix<f64>; 4]>,
    cells: Vec<LU<f64, Dyn, Dyn>>,
    speeds: Vec<f64>,
    weights: Vec<f64>,
    kernel: Vec<f64>,
}

impl ImexOperator {
    pub fn new(grid: &KineticGrid, model: &Model, params: &[f64], exec: Execution) -> Result<Self> {
        if params.len() != grid.nx {
            return Err(Error::InvalidInput(format!("{} interface values for {} cells", params.len(), grid.nx)));
        }
        let decomps = interface_decompositions(model, &grid.q, grid.epsilon, grid.dx, params, exec)?;
        Self::from_decompositions(grid, decomps, exec)
    }

    pub fn from_decompositions(
        grid: &KineticGrid,
        decomps: Vec<ScatteringDecomposition>,
        exec: Execution,
    ) -> Result<Self> {
        let nx = grid.nx;
        let cells = try_map_range(nx, exec, |j| {
            let r = assemble_cell_matrix(
                grid.epsilon,
                grid.dt,
                grid.dx,
                &grid.q,
                &decomps[j].s0_block,
                &decomps[(j + 1) % nx].s0_block,
            );
            let lu = LU::new(r);
            if lu.is_invertible() {
                Ok(lu)
            } else {
                Err(Error::SolveFailure("cell matrix"))
            }
        })?;
        let gamma = flux_weights(&grid.q);
        let blocks = map_range(nx, exec, |j| conservative_blocks(&decomps[j], &gamma));
        let mut kernel = grid.q.maxwellian();
        let weights = grid.q.weights.clone();
        let norm: f64 = (0..grid.q.k).map(|i| weights[i] * (kernel[i] + kernel[grid.q.k + i])).sum();
        for x in &mut kernel {
            *x /= norm;
        }
        Ok(ImexOperator {
            nx,
            k: grid.q.k,
            dx: grid.dx,
            dt: grid.dt,
            epsilon: grid.epsilon,
            decomps,
            blocks,
            cells,
            speeds: grid.q.nodes.clone(),
            weights,
            kernel,
        })
    }

    /// Applies one step to the flattened state `f`.
    ///
    /// The cell density of the solution equals that of `rhs/ε` exactly; the
    /// solve is corrected along the limit kernel to remove roundoff amplified
    /// by the near-singular cell matrix at small ε.
    pub fn apply(&self, f: &[f64], exec: Execution) -> Vec<f64> {
        let (nx, k) = (self.nx, self.k);
        let w = 2 * k;
        let coef = self.dt / self.dx;
        let rows = map_range(nx, exec, |j| {
            let jm = (j + nx - 1) % nx;
            let jp = (j + 1) % nx;
            let cur = &f[j * w..(j + 1) * w];
            let left = &f[jm * w..(jm + 1) * w];
            let right = &f[jp * w..(jp + 1) * w];
            let [b1, b2, _, _] = &self.blocks[j];
            let [_, _, b3, b4] = &self.blocks[jp];
            let mut rhs = DVector::<f64>::zeros(w);
            for i in 0..k {
                let mut top = 0.0;
                let mut bot = 0.0;
                for l in 0..k {
                    top += b1[(i, l)] * left[l] + b2[(i, l)] * cur[k + l];
                    bot += b3[(i, l)] * cur[l] + b4[(i, l)] * right[k + l];
                }
                rhs[i] = cur[i] + coef * self.speeds[i] * top;
                rhs[k + i] = cur[k + i] + coef * self.speeds[i] * bot;
            }
            let mass = self.cell_density(rhs.as_slice());
            let mut x = self.cells[j].solve(&(&rhs * self.epsilon)).expect("invertible cell matrix");
            let defect = mass - self.cell_density(x.as_slice());
            for (xi, ni) in x.iter_mut().zip(&self.kernel) {
                *xi += defect * ni;
            }
            x
        });
        let mut out = Vec::with_capacity(nx * w);
        for r in rows {
            out.extend(r.iter());
        }
        out
    }
}

impl ImexOperator {
    fn cell_density(&self, c: &[f64]) -> f64 {
        (0..self.k).map(|i| self.weights[i] * (c[i] + c[self.k + i])).sum()
    }
}

/// One IMEX step with interface data `params` (see [`interface_decompositions`]).
pub fn imex_step(grid: &KineticGrid, model: &Model, params: &[f64], exec: Execution) -> Result<KineticGrid> {
    warn_cfl(grid);
    let op = ImexOperator::new(grid, model, params, exec)?;
    let mut next = grid.clone();
    next.f = op.apply(&grid.f, exec);
    Ok(next)
}

/// Interface data consistent with the current state: `∂ₓS` from the elliptic
/// solve for chemo, the given field for vfp, zeros for rte.
pub fn interface_params(model: &Model, grid: &KineticGrid, e_half: Option<&[f64]>) -> Vec<f64> {
    match model {
        Model::Rte => vec![0.0; grid.nx],
        Model::Chemo { .. } => {
            let s = chemoattractant_update(&density(grid), grid.dx);
            crate::macrolimit::interface_gradients(&s, grid.dx)
        }
        Model::Vfp { .. } => e_half.map(|e| e.to_vec()).unwrap_or_else(|| vec![0.0; grid.nx]),
    }
}

/// Stationary state of the interface maps: the state whose outgoing traces at
/// every interface equal the scattering matrix applied to the incoming ones.
///
/// Found as the null vector of the global `2K·Nx` system and normalized to unit
/// mean density.
pub fn scattering_fixed_point(grid: &KineticGrid, decomps: &[ScatteringDecomposition]) -> Result<Vec<f64>> {
    let (nx, k) = (grid.nx, grid.q.k);
    let w = 2 * k;
    let n = nx * w;
    let mut g = DMatrix::<f64>::zeros(n, n);
    for i in 0..nx {
        let im = (i + nx - 1) % nx;
        let s = &decomps[i].s_full;
        // Incoming: f_{i−1}(V), f_i(−V). Outgoing: f_i(V), f_{i−1}(−V).
        let incoming = |c: usize| if c < k { im * w + c } else { i * w + c };
        for r in 0..w {
            let row = i * w + r;
            let out_col = if r < k { i * w + r } else { im * w + r };
            g[(row, out_col)] += 1.0;
            for c in 0..w {
                g[(row, incoming(c))] -= s[(r, c)];
            }
        }
    }
    let ns = null_space(&g, 1e-10);
    if ns.len() != 1 {
        return Err(Error::SolveFailure("stationary interface system"));
    }
    let v = &ns[0];
    let mut f: Vec<f64> = v.iter().copied().collect();
    let mut probe = grid.clone();
    probe.f = f.clone();
    let mean = density(&probe).iter().sum::<f64>() / nx as f64;
    for x in &mut f {
        *x /= mean;
    }
    Ok(f)
}
