//! Per-interface scattering matrices and their `S⁰ + εB` decomposition.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{block2, exprel, norm_inf, right_divide, split4, Lu};
use crate::macrolimit::bernoulli;
use crate::quadrature::{Domain, VelocityQuadrature};
use crate::spectral::{
    chemo_eigen_expansion, chemo_roots, dispersion_roots, psi0, psi_eps, vfp_mu, DispersionSpectrum, Response,
    SpectrumModel,
};

/// Below `EPS_SWITCH_FACTOR · Δx` the correction `B^ε` is replaced by its limit `B⁰`.
pub const EPS_SWITCH_FACTOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureModel {
    Rte,
    Chemo,
    Vfp,
}

/// Inverse of the limit eigenbasis at the quadrature nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosureCoefficients {
    /// `K × (K−1)`.
    pub zeta: DMatrix<f64>,
    /// `(K−1) × K`.
    pub gamma: DMatrix<f64>,
    pub beta: DVector<f64>,
    pub model_tag: ClosureModel,
}

impl ClosureCoefficients {
    /// `I − ζγ`.
    pub fn s0_block(&self) -> DMatrix<f64> {
        let k = self.beta.len();
        DMatrix::identity(k, k) - &self.zeta * &self.gamma
    }

    /// `Σ_k ω_k v_k (ζγ)_{kℓ}` for every column `ℓ`.
    pub fn column_flux(&self, q: &VelocityQuadrature) -> Vec<f64> {
        let zg = &self.zeta * &self.gamma;
        (0..q.k)
            .map(|l| (0..q.k).map(|k| q.weights[k] * q.nodes[k] * zg[(k, l)]).sum())
            .collect()
    }
}

/// Model-specific interface data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum InterfaceParams {
    Rte { dx: f64 },
    Chemo { dx: f64, grad_s: f64 },
    Vfp { dx: f64, e: f64, kappa: f64 },
}

/// `S^ε = [0 S⁰; S⁰ 0] + ε [B¹ B²; B³ B⁴]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringDecomposition {
    pub epsilon: f64,
    pub s_full: DMatrix<f64>,
    pub s0_block: DMatrix<f64>,
    pub b_blocks: [DMatrix<f64>; 4],
    pub b0_blocks: [DMatrix<f64>; 4],
    /// True when `b_blocks` holds the analytic limit because ε is below the switch threshold.
    pub uses_limit: bool,
    pub interface_params: InterfaceParams,
}

impl ScatteringDecomposition {
    fn assemble(
        epsilon: f64,
        dx: f64,
        s_full: DMatrix<f64>,
        s0_block: DMatrix<f64>,
        b0_blocks: [DMatrix<f64>; 4],
        interface_params: InterfaceParams,
    ) -> Self {
        let uses_limit = epsilon < EPS_SWITCH_FACTOR * dx;
        let b_blocks = if uses_limit {
            b0_blocks.clone()
        } else {
            let s0 = s0_full(&s0_block);
            split4(&((&s_full - s0) / epsilon))
        };
        ScatteringDecomposition { epsilon, s_full, s0_block, b_blocks, b0_blocks, uses_limit, interface_params }
    }

    /// `[0 S⁰; S⁰ 0]`.
    pub fn s0_full(&self) -> DMatrix<f64> {
        s0_full(&self.s0_block)
    }

    pub fn b_full(&self) -> DMatrix<f64> {
        let [a, b, c, d] = &self.b_blocks;
        block2(a, b, c, d)
    }

    pub fn b0_full(&self) -> DMatrix<f64> {
        let [a, b, c, d] = &self.b0_blocks;
        block2(a, b, c, d)
    }

    /// `‖S − S⁰ − εB‖_∞ / ‖S‖_∞`.
    pub fn reconstruction_residual(&self) -> f64 {
        let r = &self.s_full - self.s0_full() - self.b_full() * self.epsilon;
        norm_inf(&r) / norm_inf(&self.s_full)
    }
}

/// `γ = (ω_k v_k, ω_k v_k)`.
pub fn flux_weights(q: &VelocityQuadrature) -> Vec<f64> {
    let g: Vec<f64> = q.weights.iter().zip(&q.nodes).map(|(w, v)| w * v).collect();
    [g.clone(), g].concat()
}

/// `max_c |Σ_r γ_r b_rc|`, the largest net flux a unit incoming trace creates.
pub fn flux_defect(b: &DMatrix<f64>, gamma: &[f64]) -> f64 {
    b.column_iter().map(|c| c.iter().zip(gamma).map(|(x, g)| x * g).sum::<f64>().abs()).fold(0.0, f64::max)
}

/// Orthogonal projection of every column of `b` onto `Σ_r γ_r b_rc = 0`.
pub fn remove_flux_defect(b: &mut DMatrix<f64>, gamma: &[f64]) {
    let g2: f64 = gamma.iter().map(|g| g * g).sum();
    for mut col in b.column_iter_mut() {
        let d: f64 = col.iter().zip(gamma).map(|(x, g)| x * g).sum();
        for (x, g) in col.iter_mut().zip(gamma) {
            *x -= d * g / g2;
        }
    }
}

fn s0_full(s0: &DMatrix<f64>) -> DMatrix<f64> {
    let k = s0.nrows();
    let z = DMatrix::zeros(k, k);
    block2(&z, s0, s0, &z)
}

fn outer(u: &DVector<f64>, v: &DVector<f64>) -> DMatrix<f64> {
    u * v.transpose()
}

fn nodes_vec(q: &VelocityQuadrature) -> DVector<f64> {
    DVector::from_column_slice(&q.nodes)
}

/// Splits the inverse of a `K × K` basis into its first `K−1` rows and last row.
fn split_inverse(basis: &DMatrix<f64>, what: &'static str) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let k = basis.nrows();
    let inv = Lu::factor(basis, what)?.solve_mat(&DMatrix::identity(k, k));
    let gamma = inv.rows(0, k - 1).into_owned();
    let beta = inv.row(k - 1).transpose().into_owned();
    Ok((gamma, beta))
}

/// `ζ`, `γ`, `β` for the integral-collision models from the limit eigenvalues.
pub fn rte_closure(q: &VelocityQuadrature, spectrum: &DispersionSpectrum) -> Result<ClosureCoefficients> {
    let k = q.k;
    if spectrum.lambdas.len() + 1 != k {
        return Err(Error::InvalidInput(format!(
            "spectrum has {} roots for K={k}",
            spectrum.lambdas.len()
        )));
    }
    let lam = &spectrum.lambdas;
    let mut basis = DMatrix::<f64>::zeros(k, k);
    let mut zeta = DMatrix::<f64>::zeros(k, k - 1);
    for i in 0..k {
        let v = q.nodes[i];
        for (l, &la) in lam.iter().enumerate() {
            basis[(i, l)] = 1.0 / (1.0 - v * la);
            zeta[(i, l)] = 1.0 / (1.0 - v * la) - 1.0 / (1.0 + v * la);
        }
        basis[(i, k - 1)] = 1.0;
    }
    let (gamma, beta) = split_inverse(&basis, "closure basis")?;
    let model_tag = match spectrum.model_tag {
        SpectrumModel::Rte => ClosureModel::Rte,
        SpectrumModel::Chemo => ClosureModel::Chemo,
    };
    Ok(ClosureCoefficients { zeta, gamma, beta, model_tag })
}

fn check_positive(epsilon: f64, dx: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0 && dx.is_finite() && dx > 0.0) {
        return Err(Error::InvalidInput(format!("need epsilon > 0 and dx > 0, got {epsilon}, {dx}")));
    }
    Ok(())
}

/// Radiative-transfer scattering matrix `M̃_ε M_ε⁻¹`.
pub fn rte_smatrix(
    epsilon: f64,
    dx: f64,
    q: &VelocityQuadrature,
    spectrum: &DispersionSpectrum,
    closure: &ClosureCoefficients,
) -> Result<ScatteringDecomposition> {
    check_positive(epsilon, dx)?;
    let k = q.k;
    let n = 2 * k;
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut mt = DMatrix::<f64>::zeros(n, n);
    for i in 0..k {
        let v = q.nodes[i];
        let (t, b) = (i, k + i);
        for (l, &la) in spectrum.lambdas.iter().enumerate() {
            let damp = (-la * dx / epsilon).exp();
            let pa = 1.0 / (1.0 - v * la);
            let pb = 1.0 / (1.0 + v * la);
            m[(t, l)] = pa;
            m[(b, l)] = damp * pb;
            m[(t, k + l)] = damp * pb;
            m[(b, k + l)] = pa;
            mt[(t, l)] = damp * pa;
            mt[(b, l)] = pb;
            mt[(t, k + l)] = pb;
            mt[(b, k + l)] = damp * pa;
        }
        m[(t, k - 1)] = 1.0;
        m[(b, k - 1)] = 1.0;
        mt[(t, k - 1)] = 1.0;
        mt[(b, k - 1)] = 1.0;
        m[(t, n - 1)] = -epsilon * v;
        m[(b, n - 1)] = dx + epsilon * v;
        mt[(t, n - 1)] = dx - epsilon * v;
        mt[(b, n - 1)] = epsilon * v;
    }
    let s_full = right_divide(&mt, &m, "radiative transfer stationary basis")?;
    let s0 = closure.s0_block();
    let c = c_matrix(&closure.zeta, &closure.gamma, &nodes_vec(q), &closure.beta) / dx;
    let b0 = [c.clone(), -c.clone(), -c.clone(), c];
    Ok(ScatteringDecomposition::assemble(epsilon, dx, s_full, s0, b0, InterfaceParams::Rte { dx }))
}

/// `(2I − ζγ) u βᵀ`.
fn c_matrix(zeta: &DMatrix<f64>, gamma: &DMatrix<f64>, u: &DVector<f64>, beta: &DVector<f64>) -> DMatrix<f64> {
    let k = beta.len();
    let two = DMatrix::<f64>::identity(k, k) * 2.0 - zeta * gamma;
    outer(&(two * u), beta)
}

/// Chemotaxis scattering matrix `Ñ^ε (N^ε)⁻¹`.
///
/// The zero-mode column `e^{−λ₀x/ε}/(T − λ₀v) − 1/T` is rescaled by `−ε/λ₀` and
/// written with `(1 − e^{−a})/a`, so it stays accurate as `λ₀ → 0` and reduces to
/// the radiative-transfer column `x − εv` when `∂ₓS = 0`.
pub fn chemo_smatrix(
    epsilon: f64,
    dx: f64,
    q: &VelocityQuadrature,
    grad_s: f64,
    response: &Response,
) -> Result<ScatteringDecomposition> {
    check_positive(epsilon, dx)?;
    let k = q.k;
    let n = 2 * k;
    let spec = chemo_roots(q, epsilon, grad_s, response)?;
    let lam0 = spec.lambda_zero.unwrap_or(0.0);
    let neg = spec.negatives();
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut mt = DMatrix::<f64>::zeros(n, n);
    let a0 = lam0 * dx / epsilon;
    let x0 = exprel(-a0);
    for i in 0..k {
        let v = q.nodes[i];
        let tp = 1.0 + epsilon * response.eval(v * grad_s);
        let tm = 1.0 + epsilon * response.eval(-v * grad_s);
        let (t, b) = (i, k + i);
        for (l, &la) in spec.lambdas.iter().enumerate() {
            let damp = (-la * dx / epsilon).exp();
            m[(t, l)] = 1.0 / (tp - v * la);
            m[(b, l)] = damp / (tm + v * la);
            mt[(t, l)] = damp / (tp - v * la);
            mt[(b, l)] = 1.0 / (tm + v * la);
        }
        for (l, &la) in neg.iter().enumerate() {
            let damp = (la * dx / epsilon).exp();
            m[(t, k + l)] = damp / (tp - v * la);
            m[(b, k + l)] = 1.0 / (tm + v * la);
            mt[(t, k + l)] = 1.0 / (tp - v * la);
            mt[(b, k + l)] = damp / (tm + v * la);
        }
        m[(t, k - 1)] = 1.0 / tp;
        m[(b, k - 1)] = 1.0 / tm;
        mt[(t, k - 1)] = 1.0 / tp;
        mt[(b, k - 1)] = 1.0 / tm;
        let dp = tp * (tp - lam0 * v);
        let dm = tm * (tm + lam0 * v);
        m[(t, n - 1)] = -epsilon * v / dp;
        m[(b, n - 1)] = (tm * dx * x0 + epsilon * v) / dm;
        mt[(t, n - 1)] = (tp * dx * x0 - epsilon * v) / dp;
        mt[(b, n - 1)] = epsilon * v / dm;
    }
    let s_full = right_divide(&mt, &m, "chemotaxis stationary basis")?;
    let b0 = chemo_b0(dx, q, grad_s, response)?;
    let closure = chemo_closure(q)?;
    Ok(ScatteringDecomposition::assemble(
        epsilon,
        dx,
        s_full,
        closure.s0_block(),
        b0,
        InterfaceParams::Chemo { dx, grad_s },
    ))
}

/// Limit closure of the chemotaxis model (identical to radiative transfer at `T ≡ 1`).
pub fn chemo_closure(q: &VelocityQuadrature) -> Result<ClosureCoefficients> {
    let spec = dispersion_roots(q, &vec![1.0; 2 * q.k])?;
    let mut c = rte_closure(q, &spec)?;
    c.model_tag = ClosureModel::Chemo;
    Ok(c)
}

/// `B⁰ = (M̃' − S⁰M')M₀⁻¹` from the regular part of a stationary basis.
///
/// `M₀`, `M̃₀` hold the inflow and outflow traces of the basis at `ε = 0` with
/// the exponentially small boundary-layer entries dropped, and `M'`, `M̃'`
/// their first derivatives in `ε`.
fn limit_correction(
    m0: &DMatrix<f64>,
    dm: &DMatrix<f64>,
    dmt: &DMatrix<f64>,
    s0_block: &DMatrix<f64>,
    what: &'static str,
) -> Result<[DMatrix<f64>; 4]> {
    let num = dmt - s0_full(s0_block) * dm;
    Ok(split4(&right_divide(&num, m0, what)?))
}

/// `d/dz exprel(z)`.
fn exprel_prime(z: f64) -> f64 {
    if z.abs() < 1e-3 {
        0.5 + z / 3.0 + z * z / 8.0 + z * z * z / 30.0 + z * z * z * z / 144.0
    } else {
        (z.exp() - exprel(z)) / z
    }
}

/// `B⁰` blocks of the chemotaxis model.
pub fn chemo_b0(dx: f64, q: &VelocityQuadrature, grad_s: f64, response: &Response) -> Result<[DMatrix<f64>; 4]> {
    let k = q.k;
    let n = 2 * k;
    let exp = chemo_eigen_expansion(q, grad_s, response)?;
    let closure = chemo_closure(q)?;
    let lam0 = &exp.lambdas;
    let lp1 = exp.lambda_first_order.clone().unwrap_or_default();
    let lm1 = exp.negative_lambda_first_order.clone().unwrap_or_default();
    let l01 = exp.lambda0_first_order.unwrap_or(0.0);
    let xx = dx * exprel(-l01 * dx);
    let mut m0 = DMatrix::<f64>::zeros(n, n);
    let mut dm = DMatrix::<f64>::zeros(n, n);
    let mut dmt = DMatrix::<f64>::zeros(n, n);
    for i in 0..k {
        let v = q.nodes[i];
        let p = response.eval(v * grad_s);
        let (t, b) = (i, k + i);
        for l in 0..k - 1 {
            let (dp, dn) = (1.0 - v * lam0[l], 1.0 + v * lam0[l]);
            m0[(t, l)] = 1.0 / dp;
            dm[(t, l)] = -(p - v * lp1[l]) / (dp * dp);
            dmt[(b, l)] = -(v * lp1[l] - p) / (dn * dn);
            m0[(b, k + l)] = 1.0 / dp;
            dm[(b, k + l)] = -(v * lm1[l] - p) / (dp * dp);
            dmt[(t, k + l)] = -(p - v * lm1[l]) / (dn * dn);
        }
        m0[(t, k - 1)] = 1.0;
        m0[(b, k - 1)] = 1.0;
        dm[(t, k - 1)] = -p;
        dm[(b, k - 1)] = p;
        dmt[(t, k - 1)] = -p;
        dmt[(b, k - 1)] = p;
        m0[(b, n - 1)] = xx;
        dm[(t, n - 1)] = -v;
        dm[(b, n - 1)] = xx * (p - v * l01) + v;
        dmt[(t, n - 1)] = -xx * (p - v * l01) - v;
        dmt[(b, n - 1)] = v;
    }
    limit_correction(&m0, &dm, &dmt, &closure.s0_block(), "chemotaxis limit basis")
}

/// Closed-form `B⁰` of the chemotaxis model written in terms of `φ(𝒱∂ₓS)/λ₀¹`.
///
/// Agrees with [`chemo_b0`] for a linear response and departs from it at
/// `O((∂ₓS)²)` otherwise.
pub fn chemo_b0_closed_form(
    dx: f64,
    q: &VelocityQuadrature,
    grad_s: f64,
    response: &Response,
) -> Result<[DMatrix<f64>; 4]> {
    let k = q.k;
    let exp = chemo_eigen_expansion(q, grad_s, response)?;
    let spec0 = dispersion_roots(q, &vec![1.0; 2 * k])?;
    let cl = rte_closure(q, &spec0)?;
    let lam0 = &exp.lambdas;
    let lp1 = exp.lambda_first_order.clone().unwrap_or_default();
    let lm1 = exp.negative_lambda_first_order.clone().unwrap_or_default();
    let l01 = exp.lambda0_first_order.unwrap_or(0.0);
    let vv = nodes_vec(q);
    let phi = DVector::from_iterator(k, q.nodes.iter().map(|v| response.eval(v * grad_s)));
    let ratio = if l01 != 0.0 {
        &phi / l01
    } else {
        &vv / (3.0 * q.second_moment())
    };
    let a1 = l01 * dx;
    let zg = &cl.zeta * &cl.gamma;
    let id = DMatrix::<f64>::identity(k, k);
    let two = &id * 2.0 - &zg;
    let beta = &cl.beta;
    let ratio_b = outer(&(&two * &ratio), beta);
    let v_b = outer(&(&two * &vv), beta);
    let phi_b = outer(&(&two * &phi), beta);
    let modal = |l1: &[f64], sign: f64| -> DMatrix<f64> {
        let mut a = DMatrix::<f64>::zeros(k, k - 1);
        let mut b = DMatrix::<f64>::zeros(k, k - 1);
        for i in 0..k {
            let v = q.nodes[i];
            for l in 0..k - 1 {
                let x = sign * (phi[i] - v * l1[l]);
                a[(i, l)] = x / (1.0 - v * lam0[l]).powi(2);
                b[(i, l)] = x / (1.0 + v * lam0[l]).powi(2);
            }
        }
        ((&zg - &id) * a + b) * &cl.gamma
    };
    let b10 = &ratio_b * (bernoulli(a1) / dx);
    let b20 = modal(&lm1, 1.0) - &ratio_b * (bernoulli(-a1) / dx);
    let b30 = modal(&lp1, -1.0) + &phi_b - &v_b * (bernoulli(-a1) / dx);
    let b40 = &v_b * (bernoulli(-a1) / dx);
    Ok([b10, b20, b30, b40])
}

/// Closure of the Fokker-Planck model from the zero-field modes.
pub fn vfp_closure(q: &VelocityQuadrature) -> Result<ClosureCoefficients> {
    if q.domain != Domain::RealLine {
        return Err(Error::InvalidInput("Fokker-Planck closure needs a real_line quadrature".into()));
    }
    let k = q.k;
    let kappa = q.kappa();
    let mut basis = DMatrix::<f64>::zeros(k, k);
    let mut zeta = DMatrix::<f64>::zeros(k, k - 1);
    for i in 0..k {
        let v = q.nodes[i];
        for l in 1..k {
            basis[(i, l - 1)] = psi0(l, 1, v, kappa);
            zeta[(i, l - 1)] = psi0(l, 1, v, kappa) - psi0(l, 1, -v, kappa);
        }
        basis[(i, k - 1)] = (-v * v / (2.0 * kappa)).exp();
    }
    let (gamma, beta) = split_inverse(&basis, "Fokker-Planck mode basis")
        .map_err(|e| Error::SingularBasis(e.to_string()))?;
    Ok(ClosureCoefficients { zeta, gamma, beta, model_tag: ClosureModel::Vfp })
}

/// `γ₋`: rows of `γ₊` with the sign pattern `(−1)^ℓ`.
pub fn vfp_gamma_minus(closure: &ClosureCoefficients) -> DMatrix<f64> {
    let mut g = closure.gamma.clone();
    for l in 0..g.nrows() {
        if (l + 1) % 2 == 1 {
            g.row_mut(l).neg_mut();
        }
    }
    g
}

/// Fokker-Planck scattering matrix.
///
/// The two `ℓ = 0` modes are `A(v) = exp(−(v − εE)²/2κ)` and the drifted
/// Maxwellian `e^{Ex/κ} exp(−v²/2κ)`. The second is replaced by
/// `D = (e^{Ex/κ}M − A)/(E/κ)`, evaluated through `expm1(z)/z`; it spans the
/// same space and stays regular as `E → 0`, where it becomes `(x − εv)M`.
pub fn vfp_smatrix(
    epsilon: f64,
    dx: f64,
    q: &VelocityQuadrature,
    e: f64,
    kappa: f64,
) -> Result<ScatteringDecomposition> {
    check_positive(epsilon, dx)?;
    if q.domain != Domain::RealLine {
        return Err(Error::InvalidInput("Fokker-Planck scattering needs a real_line quadrature".into()));
    }
    let k = q.k;
    let n = 2 * k;
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut mt = DMatrix::<f64>::zeros(n, n);
    let maxw = |v: f64| (-v * v / (2.0 * kappa)).exp();
    let drift_col = |x: f64, v: f64| {
        let a = e * x / kappa;
        let b = epsilon * e * v / kappa - epsilon * epsilon * e * e / (2.0 * kappa);
        maxw(v) * b.exp() * (x - epsilon * v + 0.5 * epsilon * epsilon * e) * exprel(a - b)
    };
    let a_mode = |v: f64| (-(v - epsilon * e).powi(2) / (2.0 * kappa)).exp();
    for i in 0..k {
        let v = q.nodes[i];
        let (t, b) = (i, k + i);
        for l in 1..k {
            let c = l - 1;
            let mup = vfp_mu(l, 1, epsilon, e, kappa);
            let dp = (-mup * dx / epsilon).exp();
            let (pv, pm) = (psi_eps(l, 1, v, epsilon, e, kappa), psi_eps(l, 1, -v, epsilon, e, kappa));
            m[(t, c)] = pv;
            m[(b, c)] = pm * dp;
            mt[(t, c)] = pv * dp;
            mt[(b, c)] = pm;
            let mum = vfp_mu(l, -1, epsilon, e, kappa);
            let dm = (mum * dx / epsilon).exp();
            let (qv, qm) = (psi_eps(l, -1, v, epsilon, e, kappa), psi_eps(l, -1, -v, epsilon, e, kappa));
            m[(t, k + c)] = qv * dm;
            m[(b, k + c)] = qm;
            mt[(t, k + c)] = qv;
            mt[(b, k + c)] = qm * dm;
        }
        m[(t, k - 1)] = a_mode(v);
        m[(b, k - 1)] = a_mode(-v);
        mt[(t, k - 1)] = a_mode(v);
        mt[(b, k - 1)] = a_mode(-v);
        m[(t, n - 1)] = drift_col(0.0, v);
        m[(b, n - 1)] = drift_col(dx, -v);
        mt[(t, n - 1)] = drift_col(dx, v);
        mt[(b, n - 1)] = drift_col(0.0, -v);
    }
    let s_full = right_divide(&mt, &m, "Fokker-Planck stationary basis")?;
    let closure = vfp_closure(q)?;
    let b0 = vfp_b0(dx, q, &closure, e, kappa)?;
    Ok(ScatteringDecomposition::assemble(
        epsilon,
        dx,
        s_full,
        closure.s0_block(),
        b0,
        InterfaceParams::Vfp { dx, e, kappa },
    ))
}

/// `B⁰` blocks of the Fokker-Planck model.
///
/// Uses `∂_ε ψ_{±ℓ}^ε = (Ev/2κ) ψ⁰_{±ℓ}` at `ε = 0`, and the drift column
/// through `exprel` so that `E = 0` is regular.
pub fn vfp_b0(dx: f64, q: &VelocityQuadrature, closure: &ClosureCoefficients, e: f64, kappa: f64) -> Result<[DMatrix<f64>; 4]> {
    let k = q.k;
    let n = 2 * k;
    let a = e * dx / kappa;
    let (xa, xp) = (exprel(a), exprel_prime(a));
    let mut m0 = DMatrix::<f64>::zeros(n, n);
    let mut dm = DMatrix::<f64>::zeros(n, n);
    let mut dmt = DMatrix::<f64>::zeros(n, n);
    for i in 0..k {
        let v = q.nodes[i];
        let g = (-v * v / (2.0 * kappa)).exp();
        let h = e * v / (2.0 * kappa);
        let (t, b) = (i, k + i);
        for l in 1..k {
            let c = l - 1;
            let pv = psi0(l, 1, v, kappa);
            m0[(t, c)] = pv;
            dm[(t, c)] = h * pv;
            dmt[(b, c)] = -h * psi0(l, 1, -v, kappa);
            let qm = psi0(l, -1, -v, kappa);
            m0[(b, k + c)] = qm;
            dm[(b, k + c)] = -h * qm;
            dmt[(t, k + c)] = h * psi0(l, -1, v, kappa);
        }
        m0[(t, k - 1)] = g;
        m0[(b, k - 1)] = g;
        dm[(t, k - 1)] = 2.0 * h * g;
        dm[(b, k - 1)] = -2.0 * h * g;
        dmt[(t, k - 1)] = 2.0 * h * g;
        dmt[(b, k - 1)] = -2.0 * h * g;
        m0[(b, n - 1)] = g * dx * xa;
        dm[(t, n - 1)] = -v * g;
        dm[(b, n - 1)] = g * (-2.0 * h * dx * (xa - xp) + v * xa);
        dmt[(t, n - 1)] = g * (2.0 * h * dx * (xa - xp) - v * xa);
        dmt[(b, n - 1)] = v * g;
    }
    limit_correction(&m0, &dm, &dmt, &closure.s0_block(), "Fokker-Planck limit basis")
}
