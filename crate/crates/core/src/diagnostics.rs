//! Executable checks of the structural properties of the schemes.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetic_solver::{
    assemble_cell_matrix, chemoattractant_update, density, imex_step, interface_params, KineticGrid, Model,
};
use crate::linalg::{null_space, singular_values};
use crate::macrolimit::{chemo_drift, heat_step, interface_gradients, sg_chemo_step, sg_twostream_step, sg_vfp_step};
use crate::par::Execution;
use crate::quadrature::{Domain, VelocityQuadrature};
use crate::spectral::{psi0, DispersionSpectrum, Response};
use crate::twostream::{ts_step_with_phi, TwoStreamState};

pub const NULL_TOL: f64 = 1e-10;
pub const COSINE_TOL: f64 = 1e-8;
pub const RANGE_TOL: f64 = 1e-9;
pub const ROOT_SAMPLES: usize = 100_000;
pub const ROOT_TOL: f64 = 1e-10;
pub const TANGENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticityReport {
    /// `max_c |Σ_r (ΓSΓ⁻¹)_{rc} − 1|`.
    pub column_deviation: f64,
    /// `max_r |Σ_c (ΓSΓ⁻¹)_{rc} − 1|`.
    pub row_deviation: f64,
}

/// Column and row sums of `ΓSΓ⁻¹` with `Γ = diag(ω_k v_k, ω_k v_k)`.
pub fn stochasticity_check(s: &DMatrix<f64>, q: &VelocityQuadrature) -> StochasticityReport {
    let k = q.k;
    let n = 2 * k;
    assert_eq!(s.nrows(), n);
    let g: Vec<f64> = (0..n).map(|i| q.weights[i % k] * q.nodes[i % k]).collect();
    let scaled = DMatrix::from_fn(n, n, |r, c| g[r] * s[(r, c)] / g[c]);
    let column_deviation = (0..n).map(|c| (scaled.column(c).sum() - 1.0).abs()).fold(0.0, f64::max);
    let row_deviation = (0..n).map(|r| (scaled.row(r).sum() - 1.0).abs()).fold(0.0, f64::max);
    StochasticityReport { column_deviation, row_deviation }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRangeReport {
    pub null_dim: usize,
    pub null_vector: Vec<f64>,
    pub cosine: f64,
    pub range_test_residual: f64,
    pub passed: bool,
}

/// `𝕍 [I, −S⁰; −S⁰, I]`, the cell matrix at `ε = 0` with `Δt = Δx`.
pub fn limit_cell_matrix(q: &VelocityQuadrature, s0: &DMatrix<f64>) -> DMatrix<f64> {
    assemble_cell_matrix(0.0, 1.0, 1.0, q, s0, s0)
}

/// Kernel of `R0` by singular values and the weighted zero-sum property of its range.
pub fn kernel_range_check(r0: &DMatrix<f64>, q: &VelocityQuadrature, maxwellian: &[f64]) -> KernelRangeReport {
    let k = q.k;
    let n = 2 * k;
    let ns = null_space(r0, NULL_TOL);
    let null_dim = ns.len();
    let (null_vector, cosine) = match ns.first() {
        Some(v) => {
            let m = DVector::from_column_slice(maxwellian);
            let c = v.dot(&m).abs() / (v.norm() * m.norm());
            (v.iter().copied().collect(), c)
        }
        None => (vec![0.0; n], 0.0),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut range_test_residual: f64 = 0.0;
    for _ in 0..10 {
        let y = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let r = r0 * y;
        let s: f64 = (0..k).map(|i| q.weights[i] * (r[i] + r[k + i])).sum();
        range_test_residual = range_test_residual.max(s.abs());
    }
    let passed = null_dim == 1 && cosine > 1.0 - COSINE_TOL && range_test_residual < RANGE_TOL;
    KernelRangeReport { null_dim, null_vector, cosine, range_test_residual, passed }
}

/// All roots of the dispersion relation, including `0` when `T` is even.
pub fn spectrum_roots(spectrum: &DispersionSpectrum) -> Vec<f64> {
    let mut roots = spectrum.negatives();
    roots.push(spectrum.lambda_zero.unwrap_or(0.0));
    roots.extend(spectrum.lambdas.iter().copied());
    roots
}

/// Relative residuals of `Σ_{±k} ω_k v φ_λ(v) φ_μ(v) T(v) = 0` over all root pairs `λ ≠ μ`.
///
/// `t_values` holds `T` at `(v_1..v_K, −v_1..−v_K)`.
pub fn orthogonality_check(q: &VelocityQuadrature, t_values: &[f64], roots: &[f64]) -> Vec<f64> {
    let v = q.signed_velocities();
    let k = q.k;
    let mut out = Vec::new();
    for (a, &la) in roots.iter().enumerate() {
        for &mu in &roots[a + 1..] {
            if la == mu {
                continue;
            }
            let mut s = 0.0;
            let mut scale = 0.0;
            for i in 0..2 * k {
                let t = t_values[i];
                let term = q.weights[i % k] * v[i] * t / ((t - la * v[i]) * (t - mu * v[i]));
                s += term;
                scale += term.abs();
            }
            out.push(s.abs() / scale);
        }
    }
    out
}

/// Relative residuals of `Σ_k ω_k v_k (ψ⁰_{±ℓ}(v_k) − ψ⁰_{±ℓ}(−v_k)) = 0` for `ℓ = 1..K−1`.
pub fn vfp_orthogonality_check(q: &VelocityQuadrature) -> Vec<f64> {
    let kappa = q.kappa();
    let mut out = Vec::new();
    for ell in 1..q.k {
        for sign in [1, -1] {
            let mut s = 0.0;
            let mut scale = 0.0;
            for (v, w) in q.nodes.iter().zip(&q.weights) {
                let term = w * v * (psi0(ell, sign, *v, kappa) - psi0(ell, sign, -v, kappa));
                s += term;
                scale += term.abs();
            }
            out.push(s.abs() / scale);
        }
    }
    out
}

/// `det[e^{y_j x_i} x_i^{z_j}]`.
pub fn haar_det(x: &[f64], y: &[f64], z: &[u32]) -> Result<f64> {
    let n = x.len();
    if y.len() != n || z.len() != n {
        return Err(Error::InvalidInput("haar_det needs equal lengths".into()));
    }
    let m = DMatrix::from_fn(n, n, |i, j| (y[j] * x[i]).exp() * x[i].powi(z[j] as i32));
    Ok(m.determinant())
}

/// `P(x) e^{μx}` with `P` given by ascending coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpPolyTerm {
    pub coeff_poly: Vec<f64>,
    pub rate: f64,
}

impl ExpPolyTerm {
    pub fn degree(&self) -> usize {
        self.coeff_poly.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let p = self.coeff_poly.iter().rev().fold(0.0, |acc, c| acc * x + c);
        p * (self.rate * x).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpPolyRoots {
    pub roots: Vec<f64>,
    /// Near-zeros without a sign change, not counted in `roots`.
    pub tangent_roots: Vec<f64>,
    /// `Σ(1 + deg P_i) − 1`.
    pub bound: usize,
}

pub fn exp_poly_eval(terms: &[ExpPolyTerm], x: f64) -> f64 {
    terms.iter().map(|t| t.eval(x)).sum()
}

/// Sign-change scan of `Σ P_i(x) e^{μ_i x}` on `(a, b)` refined by bisection.
pub fn exp_poly_roots(terms: &[ExpPolyTerm], interval: (f64, f64)) -> Result<ExpPolyRoots> {
    let (a, b) = interval;
    if !(a < b) {
        return Err(Error::InvalidInput(format!("empty interval ({a}, {b})")));
    }
    let f = |x: f64| exp_poly_eval(terms, x);
    let bound = terms.iter().map(|t| 1 + t.degree()).sum::<usize>().saturating_sub(1);
    let h = (b - a) / ROOT_SAMPLES as f64;
    let xs: Vec<f64> = (0..=ROOT_SAMPLES).map(|i| a + h * i as f64).collect();
    let fs: Vec<f64> = xs.iter().map(|x| f(*x)).collect();
    let mut roots = Vec::new();
    let mut tangent_roots = Vec::new();
    for i in 0..ROOT_SAMPLES {
        let (f0, f1) = (fs[i], fs[i + 1]);
        if f0 == 0.0 {
            if i > 0 && fs[i - 1] * f1 < 0.0 {
                roots.push(xs[i]);
            } else if i > 0 {
                tangent_roots.push(xs[i]);
            }
            continue;
        }
        if f0 * f1 < 0.0 {
            let (mut lo, mut hi) = (xs[i], xs[i + 1]);
            let mut flo = f0;
            while hi - lo > ROOT_TOL {
                let m = 0.5 * (lo + hi);
                let fm = f(m);
                if fm == 0.0 {
                    lo = m;
                    hi = m;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = m;
                    flo = fm;
                } else {
                    hi = m;
                }
            }
            roots.push(0.5 * (lo + hi));
        } else if i > 0 {
            let fp = fs[i - 1];
            if f0.abs() < TANGENT_TOL && f0.abs() <= fp.abs() && f0.abs() <= f1.abs() && fp * f1 > 0.0 {
                tangent_roots.push(xs[i]);
            }
        }
    }
    for t in &tangent_roots {
        log::warn!("tangent root near {t:.10}");
    }
    Ok(ExpPolyRoots { roots, tangent_roots, bound })
}

/// Grid data for an asymptotic-consistency run on a periodic grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApSetup {
    pub nx: usize,
    pub dx: f64,
    pub dt: f64,
    pub rho0: Vec<f64>,
    /// Interface field for the Fokker-Planck model.
    pub e_half: Vec<f64>,
}

impl ApSetup {
    /// `ρ⁰ = 1 + 0.5 cos(2πx)`, `Δt = Δx²`, `E = 0.5 sin(2πx)` at interfaces.
    pub fn standard(nx: usize) -> Self {
        let dx = 1.0 / nx as f64;
        let tau = std::f64::consts::TAU;
        ApSetup {
            nx,
            dx,
            dt: dx * dx,
            rho0: (0..nx).map(|j| 1.0 + 0.5 * (tau * j as f64 * dx).cos()).collect(),
            e_half: (0..nx).map(|j| 0.5 * (tau * (j as f64 - 0.5) * dx).sin()).collect(),
        }
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApTable {
    pub epsilons: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log ε`; absent for fewer than two entries.
    pub slope: Option<f64>,
}

fn relative_gap(a: &[f64], b: &[f64]) -> f64 {
    let num = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let den = b.iter().map(|y| y.abs()).fold(0.0, f64::max);
    num / den
}

/// Gap after one step between the kinetic scheme and its macroscopic limit scheme.
pub fn ap_gap(model: &Model, q: &VelocityQuadrature, epsilon: f64, setup: &ApSetup, exec: Execution) -> Result<f64> {
    let dx = setup.dx();
    let mut grid = KineticGrid::new(setup.nx, dx, setup.dt, epsilon, q.clone())?;
    grid.set_equilibrium(&setup.rho0);
    let params = interface_params(model, &grid, Some(&setup.e_half));
    let next = imex_step(&grid, model, &params, exec)?;
    let kinetic = density(&next);
    let rho = density(&grid);
    let reference = match model {
        Model::Rte => heat_step(&rho, q, setup.dt, dx),
        Model::Chemo { response } => {
            let e: Vec<f64> = params.iter().map(|g| chemo_drift(q, *g, response)).collect();
            sg_chemo_step(&rho, &e, setup.dt, dx)
        }
        Model::Vfp { kappa } => sg_vfp_step(&rho, &setup.e_half, *kappa, setup.dt, dx),
    };
    Ok(relative_gap(&kinetic, &reference))
}

/// Two-stream counterpart of [`ap_gap`].
pub fn ts_ap_gap(response: &Response, epsilon: f64, setup: &ApSetup, exec: Execution) -> Result<f64> {
    let dx = setup.dx();
    let state = TwoStreamState::from_density(setup.nx, dx, setup.dt, epsilon, &setup.rho0);
    let s = chemoattractant_update(&setup.rho0, dx);
    let phi: Vec<f64> = interface_gradients(&s, dx).iter().map(|g| response.eval(*g)).collect();
    let next = ts_step_with_phi(&state, &phi, exec)?;
    let reference = sg_twostream_step(&setup.rho0, &phi, setup.dt, dx);
    Ok(relative_gap(&next.density(), &reference))
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Some(sxy / sxx)
}

/// One-step gaps over `epsilons` and their fitted order.
pub fn ap_consistency(
    model: &Model,
    q: &VelocityQuadrature,
    epsilons: &[f64],
    setup: &ApSetup,
    exec: Execution,
) -> Result<ApTable> {
    let errors = epsilons.iter().map(|e| ap_gap(model, q, *e, setup, exec)).collect::<Result<Vec<f64>>>()?;
    let slope = loglog_slope(epsilons, &errors);
    Ok(ApTable { epsilons: epsilons.to_vec(), errors, slope })
}

/// Haar rank of the Hermite-mode basis at the quadrature nodes, as a relative smallest singular value.
pub fn vfp_basis_rank(q: &VelocityQuadrature) -> f64 {
    assert_eq!(q.domain, Domain::RealLine);
    let kappa = q.kappa();
    let m = DMatrix::from_fn(q.k, q.k, |i, l| psi0(l, 1, q.nodes[i], kappa));
    let s = singular_values(&m);
    s.last().copied().unwrap_or(0.0) / s[0]
}

/// One line of a verification summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckLine {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckLine { name: name.into(), passed, detail: detail.into() }
    }
}

/// Aligned human-readable summary.
pub fn render_text(lines: &[CheckLine]) -> String {
    let width = lines.iter().map(|l| l.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for l in lines {
        let tag = if l.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{tag}  {:<width$}  {}\n", l.name, l.detail));
    }
    out
}

pub fn render_json(lines: &[CheckLine]) -> String {
    serde_json::to_string_pretty(lines).expect("serializable report")
}
