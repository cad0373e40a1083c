//! Case eigenvalues of the integral-collision models and Hermite modes of the
//! Fokker-Planck operator.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{Domain, VelocityQuadrature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumModel {
    Rte,
    Chemo,
}

/// Nonzero roots of the dispersion relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionSpectrum {
    /// Positive roots `λ_ℓ`, ascending.
    pub lambdas: Vec<f64>,
    /// Negative roots, ascending. Present only when `T` is not even, otherwise they are `−λ_ℓ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative_lambdas: Option<Vec<f64>>,
    /// The small root split off zero when `T` is not even.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_zero: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0_first_order: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_first_order: Option<Vec<f64>>,
    /// First-order terms of the negative family: entry `ℓ` belongs to the root near `−λ⁰_ℓ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative_lambda_first_order: Option<Vec<f64>>,
    pub model_tag: SpectrumModel,
}

impl DispersionSpectrum {
    /// Negative roots in ascending order, mirrored from the positive ones when `T` is even.
    pub fn negatives(&self) -> Vec<f64> {
        match &self.negative_lambdas {
            Some(n) => n.clone(),
            None => self.lambdas.iter().rev().map(|l| -l).collect(),
        }
    }
}

/// Odd chemotactic response `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Response {
    /// `χ tanh(u/δ)`.
    Tanh { chi: f64, delta: f64 },
    /// `a u`.
    Linear { slope: f64 },
}

impl Default for Response {
    fn default() -> Self {
        Response::Tanh { chi: 1.0, delta: 1.0 }
    }
}

impl Response {
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            Response::Tanh { chi, delta } => chi * (u / delta).tanh(),
            Response::Linear { slope } => slope * u,
        }
    }
}

/// `1/(T − λv)`.
pub fn case_phi(lambda: f64, v: f64, t_of_v: f64) -> Result<f64> {
    let d = t_of_v - lambda * v;
    if d.abs() < 1e-300 {
        return Err(Error::PoleHit(d));
    }
    Ok(1.0 / d)
}

/// Nonzero roots of `Σ_{±k} ω_k / (T(v_k)/v_k − λ) = 0`.
///
/// `t_values` holds `T` at `(v_1..v_K, −v_1..−v_K)`.
pub fn dispersion_roots(q: &VelocityQuadrature, t_values: &[f64]) -> Result<DispersionSpectrum> {
    let k = q.k;
    if q.domain != Domain::UnitInterval {
        return Err(Error::InvalidInput("dispersion roots need a unit_interval quadrature".into()));
    }
    if t_values.len() != 2 * k || t_values.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidInput("T values must be 2K positive reals".into()));
    }
    let tp = &t_values[..k];
    let tm = &t_values[k..];
    let diff: Vec<f64> = tm.iter().zip(tp).map(|(a, b)| a - b).collect();
    roots_paired(q, tp, tm, &diff, SpectrumModel::Rte)
}

/// Root finder on the paired form
/// `h(λ) = Σ_k ω_k v_k (d_k + 2λv_k) / ((T⁺_k − λv_k)(T⁻_k + λv_k))`, `d_k = T⁻_k − T⁺_k`,
/// which keeps full relative accuracy for the root near zero.
pub(crate) fn roots_paired(
    q: &VelocityQuadrature,
    tp: &[f64],
    tm: &[f64],
    diff: &[f64],
    tag: SpectrumModel,
) -> Result<DispersionSpectrum> {
    let k = q.k;
    let h = |lam: f64| -> f64 {
        let mut s = 0.0;
        for i in 0..k {
            let v = q.nodes[i];
            s += q.weights[i] * v * (diff[i] + 2.0 * lam * v) / ((tp[i] - lam * v) * (tm[i] + lam * v));
        }
        s
    };
    let mut poles: Vec<f64> = (0..k)
        .map(|i| tp[i] / q.nodes[i])
        .chain((0..k).map(|i| -tm[i] / q.nodes[i]))
        .collect();
    poles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut roots = Vec::with_capacity(2 * k - 1);
    for (idx, w) in poles.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            return Err(Error::BracketFailure { interval: idx });
        }
        let inset = (b - a) * 1e-13;
        let (mut lo, mut hi) = (a + inset, b - inset);
        if !(h(lo) < 0.0 && h(hi) > 0.0) {
            return Err(Error::BracketFailure { interval: idx });
        }
        loop {
            let m = 0.5 * (lo + hi);
            if m <= lo || m >= hi {
                break;
            }
            let hm = h(m);
            if hm == 0.0 {
                lo = m;
                hi = m;
                break;
            }
            if hm < 0.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    let even = diff.iter().all(|d| *d == 0.0);
    let negatives: Vec<f64> = roots[..k - 1].to_vec();
    let zero = roots[k - 1];
    let positives: Vec<f64> = roots[k..].to_vec();
    Ok(DispersionSpectrum {
        lambdas: positives,
        negative_lambdas: if even { None } else { Some(negatives) },
        lambda_zero: if even { None } else { Some(zero) },
        lambda0_first_order: None,
        lambda_first_order: None,
        negative_lambda_first_order: None,
        model_tag: tag,
    })
}

/// Roots for the chemotaxis tumbling rate `T_ε(±v) = 1 + εφ(±v ∂ₓS)`.
pub fn chemo_roots(q: &VelocityQuadrature, epsilon: f64, grad_s: f64, response: &Response) -> Result<DispersionSpectrum> {
    let k = q.k;
    let mut tp = Vec::with_capacity(k);
    let mut tm = Vec::with_capacity(k);
    let mut diff = Vec::with_capacity(k);
    for &v in &q.nodes {
        let fp = response.eval(v * grad_s);
        let fm = response.eval(-v * grad_s);
        let (a, b) = (1.0 + epsilon * fp, 1.0 + epsilon * fm);
        if a <= 0.0 {
            return Err(Error::NonPositiveRate { velocity: v, rate: a });
        }
        if b <= 0.0 {
            return Err(Error::NonPositiveRate { velocity: -v, rate: b });
        }
        tp.push(a);
        tm.push(b);
        diff.push(epsilon * (fm - fp));
    }
    roots_paired(q, &tp, &tm, &diff, SpectrumModel::Chemo)
}

/// Limit eigenvalues `λ⁰` and their first-order corrections for the chemotaxis model.
pub fn chemo_eigen_expansion(q: &VelocityQuadrature, grad_s: f64, response: &Response) -> Result<DispersionSpectrum> {
    let ones = vec![1.0; 2 * q.k];
    let base = dispersion_roots(q, &ones)?;
    let phi: Vec<f64> = q.nodes.iter().map(|v| response.eval(v * grad_s)).collect();
    let first_order = |l0: f64| -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..q.k {
            let (v, w) = (q.nodes[i], q.weights[i]);
            let (dp, dm) = ((1.0 - l0 * v).powi(2), (1.0 + l0 * v).powi(2));
            den += w * v / dp - w * v / dm;
            // φ is odd, so the −v_k term contributes (−v)φ(−v g) = vφ(v g).
            num += w * v * phi[i] / dp + w * v * phi[i] / dm;
        }
        l0 * num / den
    };
    let lam1: Vec<f64> = base.lambdas.iter().map(|&l| first_order(l)).collect();
    let neg1: Vec<f64> = base.lambdas.iter().map(|&l| first_order(-l)).collect();
    let l01 = q.nodes.iter().zip(&q.weights).zip(&phi).map(|((v, w), p)| w * v * p).sum::<f64>() / q.second_moment();
    Ok(DispersionSpectrum {
        lambdas: base.lambdas,
        negative_lambdas: None,
        lambda_zero: None,
        lambda0_first_order: Some(l01),
        lambda_first_order: Some(lam1),
        negative_lambda_first_order: Some(neg1),
        model_tag: SpectrumModel::Chemo,
    })
}

/// Physicists' Hermite polynomial by the three-term recurrence.
pub fn hermite_poly(ell: usize, x: f64) -> f64 {
    assert!(ell <= 64, "Hermite degree above 64");
    let mut h0 = 1.0;
    if ell == 0 {
        return h0;
    }
    let mut h1 = 2.0 * x;
    for n in 1..ell {
        let h2 = 2.0 * x * h1 - 2.0 * n as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Decay rate `μ_{±ℓ}^ε`; `sign` is `+1` or `−1`.
pub fn vfp_mu(ell: usize, sign: i32, epsilon: f64, e: f64, kappa: f64) -> f64 {
    let ee = epsilon * e;
    let root = (ee * ee + 4.0 * kappa * ell as f64).sqrt();
    (-ee + sign as f64 * root) / (2.0 * kappa)
}

/// Velocity profile `ψ_{±ℓ}^ε(v) = e^{−μv} H_ℓ(ṽ) e^{−ṽ²}`.
pub fn psi_eps(ell: usize, sign: i32, v: f64, epsilon: f64, e: f64, kappa: f64) -> f64 {
    let mu = vfp_mu(ell, sign, epsilon, e, kappa);
    let vt = (v - 2.0 * mu * kappa - epsilon * e) / (2.0 * kappa).sqrt();
    hermite_poly(ell, vt) * (-mu * v - vt * vt).exp()
}

/// Zero-field profile `ψ⁰_{±ℓ}(v) = H_ℓ((v ∓ 2√(ℓκ))/√(2κ)) exp(−v²/2κ ± v√(ℓ/κ) − 2ℓ)`.
pub fn psi0(ell: usize, sign: i32, v: f64, kappa: f64) -> f64 {
    let l = ell as f64;
    let s = sign as f64;
    let x = (v - s * 2.0 * (l * kappa).sqrt()) / (2.0 * kappa).sqrt();
    hermite_poly(ell, x) * (-v * v / (2.0 * kappa) + s * v * (l / kappa).sqrt() - 2.0 * l).exp()
}

/// Tabulated Fokker-Planck modes at `(V, −V)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VfpModeTable {
    pub max_ell: usize,
    pub epsilon: f64,
    pub e: f64,
    pub kappa: f64,
    /// `μ_{+ℓ}^ε`, `ℓ = 0..K−1`.
    pub mus_plus: Vec<f64>,
    /// `μ_{−ℓ}^ε`, `ℓ = 0..K−1`.
    pub mus_minus: Vec<f64>,
    /// `ψ_{+ℓ}^ε` at `(V, −V)`: `2K × K`, column `ℓ`.
    pub psi_plus: DMatrix<f64>,
    /// `ψ_{−ℓ}^ε` at `(V, −V)`: `2K × K`, column `ℓ`.
    pub psi_minus: DMatrix<f64>,
}

pub fn vfp_modes(epsilon: f64, e: f64, kappa: f64, q: &VelocityQuadrature) -> Result<VfpModeTable> {
    if q.domain != Domain::RealLine {
        return Err(Error::InvalidInput("Fokker-Planck modes need a real_line quadrature".into()));
    }
    let k = q.k;
    let vel = q.signed_velocities();
    let table = |sign: i32| {
        DMatrix::from_fn(2 * k, k, |i, ell| {
            if epsilon == 0.0 {
                psi0(ell, sign, vel[i], kappa)
            } else {
                psi_eps(ell, sign, vel[i], epsilon, e, kappa)
            }
        })
    };
    Ok(VfpModeTable {
        max_ell: k - 1,
        epsilon,
        e,
        kappa,
        mus_plus: (0..k).map(|l| vfp_mu(l, 1, epsilon, e, kappa)).collect(),
        mus_minus: (0..k).map(|l| vfp_mu(l, -1, epsilon, e, kappa)).collect(),
        psi_plus: table(1),
        psi_minus: table(-1),
    })
}
