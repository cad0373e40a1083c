//! `kinwb verify`: the diagnostics suite on reference instances.

use std::str::FromStr;

use nalgebra::DMatrix;

use crate::diagnostics::{
    exp_poly_roots, haar_det, kernel_range_check, limit_cell_matrix, orthogonality_check, spectrum_roots,
    stochasticity_check, vfp_basis_rank, vfp_orthogonality_check, CheckLine, ExpPolyTerm,
};
use crate::error::{Error, Result};
use crate::linalg::norm_inf;
use crate::quadrature::{gauss_symmetric, moment_report, vfp_quadrature, VelocityQuadrature};
use crate::scattering::{chemo_smatrix, rte_smatrix, vfp_smatrix, ScatteringDecomposition};
use crate::spectral::{chemo_roots, dispersion_roots, Response};
use crate::twostream::{ts_smatrix, twostream_quadrature};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    All,
    Quadrature,
    Spectral,
    Scattering,
    Lemmas,
    Roots,
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Scope::All),
            "quadrature" => Ok(Scope::Quadrature),
            "spectral" => Ok(Scope::Spectral),
            "scattering" => Ok(Scope::Scattering),
            "lemmas" => Ok(Scope::Lemmas),
            "roots" => Ok(Scope::Roots),
            other => Err(Error::config("scope", format!("unknown scope {other}"))),
        }
    }
}

/// Reference Fokker-Planck quadrature: `K = 3`, `κ = 1`.
pub fn reference_vfp_quadrature() -> Result<VelocityQuadrature> {
    vfp_quadrature(3, 1.0, &[0.6, 1.4, 2.4])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Rte,
    Chemo,
    Vfp,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Rte, Family::Chemo, Family::Vfp];

    pub fn name(self) -> &'static str {
        match self {
            Family::Rte => "rte",
            Family::Chemo => "chemo",
            Family::Vfp => "vfp",
        }
    }

    pub fn quadrature(self) -> Result<VelocityQuadrature> {
        match self {
            Family::Rte | Family::Chemo => gauss_symmetric(4),
            Family::Vfp => reference_vfp_quadrature(),
        }
    }

    /// Interface decomposition at `Δx = 0.1` with a nonzero field.
    pub fn decomposition(self, q: &VelocityQuadrature, epsilon: f64) -> Result<ScatteringDecomposition> {
        let dx = 0.1;
        match self {
            Family::Rte => {
                let spec = dispersion_roots(q, &vec![1.0; 2 * q.k])?;
                let closure = crate::scattering::rte_closure(q, &spec)?;
                rte_smatrix(epsilon, dx, q, &spec, &closure)
            }
            Family::Chemo => chemo_smatrix(epsilon, dx, q, 0.7, &Response::default()),
            Family::Vfp => vfp_smatrix(epsilon, dx, q, 0.4, 1.0),
        }
    }
}

/// `‖B^ε − B⁰‖_∞` at the given ε.
pub fn b_gap(family: Family, q: &VelocityQuadrature, epsilon: f64) -> Result<f64> {
    let d = family.decomposition(q, epsilon)?;
    Ok(norm_inf(&(d.b_full() - d.b0_full())))
}

/// Terms, search interval and expected roots.
pub type RootExample = (Vec<ExpPolyTerm>, (f64, f64), Vec<f64>);

pub fn reference_root_examples() -> [RootExample; 2] {
    let s2 = std::f64::consts::SQRT_2;
    [
        (
            vec![
                ExpPolyTerm { coeff_poly: vec![1.5], rate: 0.0 },
                ExpPolyTerm { coeff_poly: vec![-2.0 / s2, 1.0 / s2], rate: 1.0 },
            ],
            (0.0, 3.0),
            vec![0.1216, 1.5495],
        ),
        (
            vec![
                ExpPolyTerm { coeff_poly: vec![-2.75], rate: 0.0 },
                ExpPolyTerm { coeff_poly: vec![-0.4, 0.2], rate: 1.0 },
                ExpPolyTerm { coeff_poly: vec![3.0, -2.0 * s2, 0.5], rate: s2 },
            ],
            (0.0, 6.0),
            vec![0.132, 0.796, 4.192],
        ),
    ]
}

fn fmt_max(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

fn check_quadrature(out: &mut Vec<CheckLine>) -> Result<()> {
    let mut worst: f64 = 0.0;
    for k in 2..=16 {
        let r = moment_report(&gauss_symmetric(k)?);
        worst = worst.max(fmt_max(&r.orthogonality_residuals));
    }
    out.push(CheckLine::new("gauss moments K=2..16", worst < 1e-12, format!("max residual {worst:.2e}")));
    let q2 = gauss_symmetric(2)?;
    let s3 = 3f64.sqrt();
    let err = (q2.nodes[0] - (3.0 - s3) / 6.0).abs().max((q2.nodes[1] - (3.0 + s3) / 6.0).abs());
    out.push(CheckLine::new("gauss K=2 nodes", err < 1e-14, format!("error {err:.2e}")));
    let q = reference_vfp_quadrature()?;
    let r = moment_report(&q);
    out.push(CheckLine::new(
        "vfp quadrature moments",
        r.passed,
        format!("max residual {:.2e}", fmt_max(&r.orthogonality_residuals)),
    ));
    let rank = vfp_basis_rank(&q);
    out.push(CheckLine::new("vfp mode basis rank", rank > 1e-10, format!("relative sigma_min {rank:.2e}")));
    Ok(())
}

fn check_spectral(out: &mut Vec<CheckLine>) -> Result<()> {
    let q2 = gauss_symmetric(2)?;
    let spec = dispersion_roots(&q2, &[1.0; 4])?;
    let err = (spec.lambdas[0] - 2.0 * 3f64.sqrt()).abs() / (2.0 * 3f64.sqrt());
    out.push(CheckLine::new("rte K=2 root", err < 1e-12, format!("relative error {err:.2e}")));
    let mut worst: f64 = 0.0;
    for k in 2..=8 {
        let q = gauss_symmetric(k)?;
        let t = vec![1.0; 2 * k];
        let spec = dispersion_roots(&q, &t)?;
        worst = worst.max(fmt_max(&orthogonality_check(&q, &t, &spectrum_roots(&spec))));
    }
    out.push(CheckLine::new("rte orthogonality K=2..8", worst < 1e-10, format!("max residual {worst:.2e}")));
    let q = gauss_symmetric(4)?;
    let response = Response::default();
    let mut worst: f64 = 0.0;
    for &(eps, g) in &[(0.1, 0.7), (0.3, -1.5), (1e-3, 2.0)] {
        let spec = chemo_roots(&q, eps, g, &response)?;
        let t: Vec<f64> = q.signed_velocities().iter().map(|v| 1.0 + eps * response.eval(v * g)).collect();
        worst = worst.max(fmt_max(&orthogonality_check(&q, &t, &spectrum_roots(&spec))));
    }
    out.push(CheckLine::new("chemo orthogonality", worst < 1e-10, format!("max residual {worst:.2e}")));
    let res = vfp_orthogonality_check(&reference_vfp_quadrature()?);
    let worst = fmt_max(&res);
    out.push(CheckLine::new("vfp mode orthogonality", worst < 1e-10, format!("max residual {worst:.2e}")));
    Ok(())
}

fn check_scattering(out: &mut Vec<CheckLine>) -> Result<()> {
    for fam in Family::ALL {
        let q = fam.quadrature()?;
        let d = fam.decomposition(&q, 1e-2)?;
        let r = d.reconstruction_residual();
        out.push(CheckLine::new(format!("{} reconstruction", fam.name()), r < 1e-12, format!("residual {r:.2e}")));
        let g1 = b_gap(fam, &q, 1e-3)?;
        let g2 = b_gap(fam, &q, 1e-4)?;
        let order = (g1 / g2).log10();
        out.push(CheckLine::new(
            format!("{} B first-order decay", fam.name()),
            (0.8..=1.2).contains(&order),
            format!("gaps {g1:.2e} -> {g2:.2e}, order {order:.3}"),
        ));
        let s = stochasticity_check(&d.s_full, &q);
        if fam == Family::Vfp {
            out.push(CheckLine::new(
                "vfp column sums",
                true,
                format!("column deviation {:.2e} (reported, not asserted)", s.column_deviation),
            ));
        } else {
            out.push(CheckLine::new(
                format!("{} stochasticity", fam.name()),
                s.column_deviation < 1e-10,
                format!("column deviation {:.2e}", s.column_deviation),
            ));
        }
    }
    let tq = twostream_quadrature();
    let mut worst: f64 = 0.0;
    for &(eps, phi) in &[(1e-2, 0.5), (0.3, -2.0), (1e-6, 1.0), (0.5, 0.0)] {
        worst = worst.max(stochasticity_check(&ts_smatrix(eps, 0.1, phi)?, &tq).column_deviation);
    }
    out.push(CheckLine::new("twostream stochasticity", worst < 1e-14, format!("column deviation {worst:.2e}")));
    Ok(())
}

fn check_lemmas(out: &mut Vec<CheckLine>) -> Result<()> {
    let tq = twostream_quadrature();
    let r0 = limit_cell_matrix(&tq, &DMatrix::from_element(1, 1, 1.0));
    let rep = kernel_range_check(&r0, &tq, &tq.maxwellian());
    out.push(CheckLine::new(
        "twostream kernel/range",
        rep.passed,
        format!("null dim {}, range residual {:.2e}", rep.null_dim, rep.range_test_residual),
    ));
    for fam in Family::ALL {
        let q = fam.quadrature()?;
        let d = fam.decomposition(&q, 1e-2)?;
        let r0 = limit_cell_matrix(&q, &d.s0_block);
        let rep = kernel_range_check(&r0, &q, &q.maxwellian());
        out.push(CheckLine::new(
            format!("{} kernel/range", fam.name()),
            rep.passed,
            format!(
                "null dim {}, cosine {:.12}, range residual {:.2e}",
                rep.null_dim, rep.cosine, rep.range_test_residual
            ),
        ));
    }
    let e = std::f64::consts::E;
    let d = haar_det(&[1.0, 2.0], &[0.0, 1.0], &[0, 1])?;
    let err = (d - (2.0 * e * e - e)).abs();
    out.push(CheckLine::new("haar determinant 2x2", err < 1e-12, format!("error {err:.2e}")));
    let d = haar_det(&[0.5, 0.5, 1.0], &[0.0, 1.0, 2.0], &[0, 0, 1])?;
    out.push(CheckLine::new("haar determinant repeated node", d.abs() < 1e-14, format!("value {d:.2e}")));
    Ok(())
}

fn check_roots(out: &mut Vec<CheckLine>) -> Result<()> {
    for (i, (terms, interval, expected)) in reference_root_examples().into_iter().enumerate() {
        let r = exp_poly_roots(&terms, interval)?;
        let ok = r.roots.len() == expected.len()
            && r.roots.iter().zip(&expected).all(|(a, b)| (a - b).abs() < 1e-3)
            && r.roots.len() <= r.bound;
        let found: Vec<String> = r.roots.iter().map(|x| format!("{x:.4}")).collect();
        out.push(CheckLine::new(
            format!("exponential polynomial example {}", i + 1),
            ok,
            format!("roots [{}], bound {}", found.join(", "), r.bound),
        ));
    }
    Ok(())
}

/// Runs the checks of `scope`.
pub fn verify(scope: Scope) -> Result<Vec<CheckLine>> {
    let mut out = Vec::new();
    let all = scope == Scope::All;
    if all || scope == Scope::Quadrature {
        check_quadrature(&mut out)?;
    }
    if all || scope == Scope::Spectral {
        check_spectral(&mut out)?;
    }
    if all || scope == Scope::Scattering {
        check_scattering(&mut out)?;
    }
    if all || scope == Scope::Lemmas {
        check_lemmas(&mut out)?;
    }
    if all || scope == Scope::Roots {
        check_roots(&mut out)?;
    }
    Ok(out)
}
