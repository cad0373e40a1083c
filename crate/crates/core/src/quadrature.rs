//! Discrete-ordinates velocity sets.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{relative_min_singular, Lu};
use crate::spectral::psi0;

/// Tolerance on the unit-interval moments `Σω = 1`, `Σωv² = 1/3`.
pub const UNIT_MOMENT_TOL: f64 = 1e-12;
/// Tolerance on the real-line orthogonality and `σ₂ = κσ₀` residuals.
pub const REAL_LINE_TOL: f64 = 1e-10;
/// Relative singular-value threshold for the Haar rank tests.
pub const HAAR_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    UnitInterval,
    RealLine,
}

/// Symmetric velocity set `±v_k` with weights `ω_k`, `k = 1..K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityQuadrature {
    pub domain: Domain,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Constraint residuals of a quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub sum_weights: f64,
    pub second_moment: f64,
    pub sigma0: Option<f64>,
    pub sigma2: Option<f64>,
    pub orthogonality_residuals: Vec<f64>,
    pub passed: bool,
}

impl VelocityQuadrature {
    /// Checks the structural invariants (positivity, ordering, lengths, κ presence).
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.nodes.len() != self.k || self.weights.len() != self.k {
            return Err(Error::InvalidInput(format!(
                "K={} with {} nodes and {} weights",
                self.k,
                self.nodes.len(),
                self.weights.len()
            )));
        }
        if self.nodes.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidInput("nodes must be finite and positive".into()));
        }
        if self.nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("nodes must be strictly ascending".into()));
        }
        if let Some((i, &w)) = self.weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::NegativeWeight { index: i, weight: w });
        }
        match (self.domain, self.kappa) {
            (Domain::RealLine, Some(k)) if k.is_finite() && k > 0.0 => Ok(()),
            (Domain::RealLine, _) => Err(Error::InvalidInput("real_line quadrature needs kappa > 0".into())),
            (Domain::UnitInterval, _) => Ok(()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("quadrature serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let q: Self = serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        q.validate()?;
        Ok(q)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa.unwrap_or(1.0)
    }

    /// Velocities in solver order `(v_1..v_K, -v_1..-v_K)`.
    pub fn signed_velocities(&self) -> Vec<f64> {
        self.nodes.iter().copied().chain(self.nodes.iter().map(|v| -v)).collect()
    }

    /// `Σ ω_k v_k²`, the diffusion coefficient of the heat limit.
    pub fn second_moment(&self) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(v, w)| w * v * v).sum()
    }

    /// `(σ₀, σ₂)` of the Gaussian-weighted moments.
    pub fn sigmas(&self) -> (f64, f64) {
        let kappa = self.kappa();
        let mut s0 = 0.0;
        let mut s2 = 0.0;
        for (v, w) in self.nodes.iter().zip(&self.weights) {
            let g = (-v * v / (2.0 * kappa)).exp();
            s0 += w * g;
            s2 += w * v * v * g;
        }
        (s0, s2)
    }

    /// Maxwellian at `(V, -V)`: ones on the unit interval, `exp(-v²/2κ)` on the real line.
    pub fn maxwellian(&self) -> Vec<f64> {
        match self.domain {
            Domain::UnitInterval => vec![1.0; 2 * self.k],
            Domain::RealLine => {
                let kappa = self.kappa();
                self.signed_velocities().iter().map(|v| (-v * v / (2.0 * kappa)).exp()).collect()
            }
        }
    }
}

/// Gauss-Legendre rule on `(0, 1)` with total weight 1.
pub fn gauss_symmetric(k: usize) -> Result<VelocityQuadrature> {
    if k == 0 {
        return Err(Error::InvalidInput("K must be at least 1".into()));
    }
    let (x, w) = gauss_legendre(k);
    Ok(VelocityQuadrature {
        domain: Domain::UnitInterval,
        k,
        kappa: None,
        nodes: x.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        weights: w.iter().map(|w| 0.5 * w).collect(),
    })
}

/// Nodes (ascending) and weights of the `n`-point Gauss-Legendre rule on `(-1, 1)`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Row `ℓ` of the discrete zero-flux conditions: `v_k (ψ⁰_ℓ(v_k) − ψ⁰_ℓ(−v_k))`.
fn flux_row(ell: usize, nodes: &[f64], kappa: f64) -> Vec<f64> {
    nodes.iter().map(|&v| v * (psi0(ell, 1, v, kappa) - psi0(ell, 1, -v, kappa))).collect()
}

/// Row of the moment condition `σ₂ − κσ₀ = Σ ω_k (v_k² − κ) e^{−v_k²/2κ}`.
fn sigma_row(nodes: &[f64], kappa: f64) -> Vec<f64> {
    nodes.iter().map(|&v| (v * v - kappa) * (-v * v / (2.0 * kappa)).exp()).collect()
}

fn constraint_matrix(nodes: &[f64], kappa: f64) -> DMatrix<f64> {
    let k = nodes.len();
    let mut a = DMatrix::<f64>::zeros(k, k);
    for ell in 1..k {
        for (j, x) in flux_row(ell, nodes, kappa).into_iter().enumerate() {
            a[(ell - 1, j)] = x;
        }
    }
    for (j, x) in sigma_row(nodes, kappa).into_iter().enumerate() {
        a[(k - 1, j)] = x;
    }
    a
}

/// Velocity set on the real line for the Fokker-Planck model.
///
/// The `K − 1` zero-flux conditions together with `σ₂ = κσ₀` form a homogeneous
/// system in the weights, which has a nontrivial solution only when its
/// determinant vanishes. The first `K − 1` candidate nodes are kept and the
/// largest node is moved to the root of that determinant closest to its
/// candidate value; the weights are then the null vector normalized to `Σω = 1`.
pub fn vfp_quadrature(k: usize, kappa: f64, candidate_nodes: &[f64]) -> Result<VelocityQuadrature> {
    if k == 0 || candidate_nodes.len() != k {
        return Err(Error::InvalidInput(format!("expected {k} candidate nodes, got {}", candidate_nodes.len())));
    }
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidInput("kappa must be positive".into()));
    }
    if candidate_nodes.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidInput("nodes must be finite and positive".into()));
    }
    if candidate_nodes.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::SingularBasis("duplicated velocity nodes".into()));
    }
    if candidate_nodes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidInput("nodes must be strictly ascending".into()));
    }
    let mut nodes = candidate_nodes.to_vec();
    nodes[k - 1] = compatible_last_node(&nodes, kappa)?;
    check_haar(&nodes, kappa)?;

    let mut w_mat = constraint_matrix(&nodes, kappa);
    for j in 0..k {
        w_mat[(k - 1, j)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k);
    rhs[k - 1] = 1.0;
    let lu = Lu::factor_with_limit(&w_mat, "weight system", 1e14)
        .map_err(|_| Error::SingularBasis("weight system is singular".into()))?;
    let weights: Vec<f64> = lu.solve(&rhs).iter().copied().collect();
    if let Some((i, &w)) = weights.iter().enumerate().find(|(_, w)| **w <= 0.0) {
        return Err(Error::NegativeWeight { index: i, weight: w });
    }
    let q = VelocityQuadrature { domain: Domain::RealLine, k, kappa: Some(kappa), nodes, weights };
    let report = moment_report(&q);
    if !report.passed {
        return Err(Error::MomentConstraint(format!(
            "residuals {:?} exceed {REAL_LINE_TOL:e}",
            report.orthogonality_residuals
        )));
    }
    Ok(q)
}

fn compatible_last_node(nodes: &[f64], kappa: f64) -> Result<f64> {
    let k = nodes.len();
    let cand = nodes[k - 1];
    let scale = kappa.sqrt();
    let lo = if k == 1 { 1e-6 * scale } else { nodes[k - 2] * (1.0 + 1e-9) };
    let hi = (4.0 * cand).max(cand + 8.0 * scale);
    let det = |x: f64| {
        let mut trial = nodes.to_vec();
        trial[k - 1] = x;
        constraint_matrix(&trial, kappa).determinant()
    };
    const SAMPLES: usize = 20_000;
    let h = (hi - lo) / SAMPLES as f64;
    let mut best: Option<(f64, f64, f64)> = None;
    let mut xa = lo;
    let mut fa = det(xa);
    for i in 1..=SAMPLES {
        let xb = lo + i as f64 * h;
        let fb = det(xb);
        if fa == 0.0 {
            return Ok(xa);
        }
        if fa.signum() != fb.signum() {
            let dist = (0.5 * (xa + xb) - cand).abs();
            if best.is_none_or(|(_, _, d)| dist < d) {
                best = Some((xa, xb, dist));
            }
        }
        xa = xb;
        fa = fb;
    }
    let (mut a, mut b, _) = best.ok_or_else(|| {
        Error::MomentConstraint(format!("no admissible largest node in ({lo:.6}, {hi:.6})"))
    })?;
    let mut fa = det(a);
    loop {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = det(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Haar-type rank tests on the zero-field Fokker-Planck modes.
pub fn check_haar(nodes: &[f64], kappa: f64) -> Result<()> {
    let k = nodes.len();
    let basis = DMatrix::from_fn(k, k, |i, ell| psi0(ell, 1, nodes[i], kappa));
    let r1 = relative_min_singular(&basis);
    if r1 < HAAR_RANK_TOL {
        return Err(Error::SingularBasis(format!("basis determinant test failed (relative sigma_min {r1:e})")));
    }
    if k > 1 {
        let fam = DMatrix::from_fn(2 * k, 2 * k - 1, |i, c| {
            let (v, flip) = if i < k { (nodes[i], 1.0) } else { (nodes[i - k], -1.0) };
            if c < k {
                psi0(c, 1, flip * v, kappa)
            } else {
                psi0(c - k + 1, 1, -flip * v, kappa)
            }
        });
        let r2 = relative_min_singular(&fam);
        if r2 < HAAR_RANK_TOL {
            return Err(Error::SingularBasis(format!("stacked family rank test failed (relative sigma_min {r2:e})")));
        }
    }
    Ok(())
}

/// Constraint residuals for the quadrature's domain.
pub fn moment_report(q: &VelocityQuadrature) -> MomentReport {
    let sum_weights: f64 = q.weights.iter().sum();
    let second_moment = q.second_moment();
    match q.domain {
        Domain::UnitInterval => {
            let residuals = vec![(sum_weights - 1.0).abs(), (second_moment - 1.0 / 3.0).abs()];
            let passed = residuals.iter().all(|r| *r < UNIT_MOMENT_TOL);
            MomentReport {
                sum_weights,
                second_moment,
                sigma0: None,
                sigma2: None,
                orthogonality_residuals: residuals,
                passed,
            }
        }
        Domain::RealLine => {
            let kappa = q.kappa();
            let (s0, s2) = q.sigmas();
            let mut residuals: Vec<f64> = (1..q.k)
                .map(|ell| {
                    flux_row(ell, &q.nodes, kappa).iter().zip(&q.weights).map(|(a, w)| a * w).sum::<f64>().abs()
                })
                .collect();
            residuals.push((s2 - kappa * s0).abs());
            let passed = residuals.iter().all(|r| r.is_finite() && *r < REAL_LINE_TOL);
            MomentReport {
                sum_weights,
                second_moment,
                sigma0: Some(s0),
                sigma2: Some(s2),
                orthogonality_residuals: residuals,
                passed,
            }
        }
    }
}
