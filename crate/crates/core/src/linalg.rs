//! Small dense kernels shared by the scattering assembly and the solver.

use nalgebra::{DMatrix, DVector, Dyn, LU};

use crate::error::{Error, Result};

/// Largest 1-norm condition estimate accepted by [`Lu::factor`].
pub const COND_LIMIT: f64 = 1e12;

/// LU factorization with partial pivoting and an explicit condition estimate.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: LU<f64, Dyn, Dyn>,
    cond: f64,
}

impl Lu {
    /// Factors `a` and rejects it when the 1-norm condition number exceeds [`COND_LIMIT`].
    pub fn factor(a: &DMatrix<f64>, what: &'static str) -> Result<Self> {
        Self::factor_with_limit(a, what, COND_LIMIT)
    }

    pub fn factor_with_limit(a: &DMatrix<f64>, what: &'static str, limit: f64) -> Result<Self> {
        assert!(a.is_square(), "LU of a non-square matrix");
        let lu = LU::new(a.clone());
        let inv = lu
            .try_inverse()
            .ok_or(Error::IllConditioned { what, cond: f64::INFINITY })?;
        let cond = norm_1(a) * norm_1(&inv);
        if !cond.is_finite() || cond > limit {
            return Err(Error::IllConditioned { what, cond });
        }
        Ok(Lu { lu, cond })
    }

    pub fn cond(&self) -> f64 {
        self.cond
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.lu.solve(b).expect("factor already checked for singularity")
    }

    pub fn solve_mat(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.lu.solve(b).expect("factor already checked for singularity")
    }
}

/// Returns `num * den^{-1}`.
pub fn right_divide(num: &DMatrix<f64>, den: &DMatrix<f64>, what: &'static str) -> Result<DMatrix<f64>> {
    let lu = Lu::factor(&den.transpose(), what)?;
    Ok(lu.solve_mat(&num.transpose()).transpose())
}

/// Maximum absolute column sum.
pub fn norm_1(a: &DMatrix<f64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Maximum absolute row sum.
pub fn norm_inf(a: &DMatrix<f64>) -> f64 {
    a.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Singular values in descending order.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

/// Smallest singular value divided by the largest; 0 for an all-zero matrix.
pub fn relative_min_singular(a: &DMatrix<f64>) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        _ => 0.0,
    }
}

/// Orthonormal basis of the numerical null space of a square matrix.
///
/// A direction is null when its singular value is below `rel_tol * sigma_max`.
pub fn null_space(a: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    assert!(a.is_square(), "null space of a non-square matrix");
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut out = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= rel_tol * smax || smax == 0.0 {
            out.push(v_t.row(i).transpose().into_owned());
        }
    }
    out
}

/// Solves the periodic tridiagonal system
/// `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]` with wraparound indices.
pub fn solve_cyclic_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    if n < 3 {
        let mut a = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            a[(i, i)] += diag[i];
            a[(i, (i + n - 1) % n)] += lower[i];
            a[(i, (i + 1) % n)] += upper[i];
        }
        let lu = LU::new(a);
        let x = lu.solve(&DVector::from_column_slice(rhs)).expect("nonsingular periodic system");
        return x.iter().copied().collect();
    }
    // Sherman-Morrison on top of the Thomas algorithm.
    let gamma = -diag[0];
    let mut b = diag.to_vec();
    b[0] -= gamma;
    b[n - 1] -= upper[n - 1] * lower[0] / gamma;
    let x = thomas(lower, &b, upper, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = upper[n - 1];
    let z = thomas(lower, &b, upper, &u);
    let fact = (x[0] + lower[0] * x[n - 1] / gamma) / (1.0 + z[0] + lower[0] * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / m;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// `expm1(z)/z`, continuous at 0.
pub fn exprel(z: f64) -> f64 {
    if z.abs() < 1e-5 {
        1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    } else {
        z.exp_m1() / z
    }
}

/// Stacks four equally sized blocks as `[a b; c d]`.
pub fn block2(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>, d: &DMatrix<f64>) -> DMatrix<f64> {
    let (r, k) = a.shape();
    let mut m = DMatrix::<f64>::zeros(2 * r, 2 * k);
    m.view_mut((0, 0), (r, k)).copy_from(a);
    m.view_mut((0, k), (r, k)).copy_from(b);
    m.view_mut((r, 0), (r, k)).copy_from(c);
    m.view_mut((r, k), (r, k)).copy_from(d);
    m
}

/// Splits a square matrix of even order into its four equal blocks.
pub fn split4(m: &DMatrix<f64>) -> [DMatrix<f64>; 4] {
    let k = m.nrows() / 2;
    [
        m.view((0, 0), (k, k)).into_owned(),
        m.view((0, k), (k, k)).into_owned(),
        m.view((k, 0), (k, k)).into_owned(),
        m.view((k, k), (k, k)).into_owned(),
    ]
}
