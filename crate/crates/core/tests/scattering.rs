use approx::assert_relative_eq;
use kinwb::diagnostics::stochasticity_check;
use kinwb::linalg::norm_inf;
use kinwb::quadrature::{gauss_symmetric, vfp_quadrature, VelocityQuadrature};
use kinwb::scattering::*;
use kinwb::spectral::{chemo_roots, dispersion_roots, Response};
use nalgebra::DVector;
use proptest::prelude::*;

fn rte(eps: f64, dx: f64, q: &VelocityQuadrature) -> ScatteringDecomposition {
    let spec = dispersion_roots(q, &vec![1.0; 2 * q.k]).unwrap();
    let closure = rte_closure(q, &spec).unwrap();
    rte_smatrix(eps, dx, q, &spec, &closure).unwrap()
}

fn vq() -> VelocityQuadrature {
    vfp_quadrature(3, 1.0, &[0.6, 1.4, 2.4]).unwrap()
}

fn maxwellian_half(q: &VelocityQuadrature) -> DVector<f64> {
    let kappa = q.kappa();
    DVector::from_iterator(q.k, q.nodes.iter().map(|v| (-v * v / (2.0 * kappa)).exp()))
}

#[test]
fn rte_k2_closure_by_adjugate() {
    let q = gauss_symmetric(2).unwrap();
    let spec = dispersion_roots(&q, &[1.0; 4]).unwrap();
    let c = rte_closure(&q, &spec).unwrap();
    let l = spec.lambdas[0];
    let (a, b) = (1.0 / (1.0 - q.nodes[0] * l), 1.0 / (1.0 - q.nodes[1] * l));
    let det = a - b;
    assert_relative_eq!(c.gamma[(0, 0)], 1.0 / det, max_relative = 1e-12);
    assert_relative_eq!(c.gamma[(0, 1)], -1.0 / det, max_relative = 1e-12);
    assert_relative_eq!(c.beta[0], -b / det, max_relative = 1e-12);
    assert_relative_eq!(c.beta[1], a / det, max_relative = 1e-12);
    assert!((c.gamma[(0, 0)] - 0.23205).abs() < 1e-5);
    assert!((c.gamma[(0, 1)] + 0.23205).abs() < 1e-5);
    assert!((c.beta[0] * a + c.beta[1] * b).abs() < 1e-14);
    assert!((c.beta[0] + c.beta[1] - 1.0).abs() < 1e-14);
}

#[test]
fn closure_identities() {
    for k in 2..=8 {
        let q = gauss_symmetric(k).unwrap();
        let spec = dispersion_roots(&q, &vec![1.0; 2 * k]).unwrap();
        let c = rte_closure(&q, &spec).unwrap();
        let ones = DVector::from_element(k, 1.0);
        assert!((&c.gamma * &ones).amax() < 1e-12);
        assert!((c.beta.dot(&ones) - 1.0).abs() < 1e-12);
        assert!(c.column_flux(&q).iter().all(|x| x.abs() < 1e-10), "K={k}");
    }
    let q = vq();
    let c = vfp_closure(&q).unwrap();
    let m = maxwellian_half(&q);
    assert!((&c.gamma * &m).amax() < 1e-12);
    assert!((c.beta.dot(&m) - 1.0).abs() < 1e-12);
    assert!(c.column_flux(&q).iter().all(|x| x.abs() < 1e-10));
}

#[test]
fn vfp_single_node_closure() {
    let q = vfp_quadrature(1, 1.0, &[1.0]).unwrap();
    let c = vfp_closure(&q).unwrap();
    assert_eq!(c.gamma.nrows(), 0);
    assert_relative_eq!(c.beta[0], (q.nodes[0] * q.nodes[0] / 2.0).exp(), max_relative = 1e-14);
}

#[test]
fn rte_maxwellian_is_preserved() {
    let q = gauss_symmetric(4).unwrap();
    for eps in [1.0, 1e-2, 1e-4] {
        let d = rte(eps, 0.1, &q);
        let out = &d.s_full * DVector::from_element(8, 1.0);
        assert!((out.add_scalar(-1.0)).amax() < 1e-12);
    }
}

#[test]
fn rte_linear_profile_is_mapped_exactly() {
    let q = gauss_symmetric(4).unwrap();
    let (eps, dx) = (0.05, 0.1);
    let d = rte(eps, dx, &q);
    let f = |x: f64, v: f64| x - eps * v;
    let k = q.k;
    let inflow = DVector::from_fn(2 * k, |i, _| if i < k { f(0.0, q.nodes[i]) } else { f(dx, -q.nodes[i - k]) });
    let outflow = DVector::from_fn(2 * k, |i, _| if i < k { f(dx, q.nodes[i]) } else { f(0.0, -q.nodes[i - k]) });
    assert!((&d.s_full * inflow - outflow).amax() < 1e-12);
}

#[test]
fn stochastic_columns_rte_chemo() {
    let q = gauss_symmetric(4).unwrap();
    for eps in [1.0, 1e-2, 1e-4] {
        assert!(stochasticity_check(&rte(eps, 0.1, &q).s_full, &q).column_deviation < 1e-10);
        let d = chemo_smatrix(eps, 0.1, &q, 0.9, &Response::default()).unwrap();
        assert!(stochasticity_check(&d.s_full, &q).column_deviation < 1e-10);
    }
}

#[test]
fn limit_of_s_is_s0() {
    let q = gauss_symmetric(4).unwrap();
    let d = rte(1e-9, 0.1, &q);
    assert!(norm_inf(&(&d.s_full - d.s0_full())) < 1e-7);
}

#[test]
fn chemo_without_gradient_is_rte() {
    let q = gauss_symmetric(4).unwrap();
    for eps in [0.5, 1e-2, 1e-4] {
        let a = chemo_smatrix(eps, 0.1, &q, 0.0, &Response::default()).unwrap();
        let b = rte(eps, 0.1, &q);
        assert!(norm_inf(&(&a.s_full - &b.s_full)) < 1e-12);
        assert!(norm_inf(&(a.b0_full() - b.b0_full())) < 1e-12);
    }
}

#[test]
fn chemo_zero_mode_is_mapped_exactly() {
    let q = gauss_symmetric(4).unwrap();
    let (eps, dx, g) = (0.05, 0.1, 0.9);
    let r = Response::default();
    let d = chemo_smatrix(eps, dx, &q, g, &r).unwrap();
    let l0 = chemo_roots(&q, eps, g, &r).unwrap().lambda_zero.unwrap();
    let f = |x: f64, v: f64| (-l0 * x / eps).exp() / (1.0 + eps * r.eval(v * g) - l0 * v);
    let k = q.k;
    let inflow = DVector::from_fn(2 * k, |i, _| if i < k { f(0.0, q.nodes[i]) } else { f(dx, -q.nodes[i - k]) });
    let outflow = DVector::from_fn(2 * k, |i, _| if i < k { f(dx, q.nodes[i]) } else { f(0.0, -q.nodes[i - k]) });
    assert!((&d.s_full * inflow - outflow).amax() < 1e-10);
}

#[test]
fn chemo_b0_matches_closed_form_for_linear_response() {
    let q = gauss_symmetric(4).unwrap();
    let r = Response::Linear { slope: 0.8 };
    let a = chemo_b0(0.1, &q, 0.6, &r).unwrap();
    let b = chemo_b0_closed_form(0.1, &q, 0.6, &r).unwrap();
    for i in 0..4 {
        assert!(norm_inf(&(&a[i] - &b[i])) < 1e-9 * (1.0 + norm_inf(&b[i])), "block {}", i + 1);
    }
}

#[test]
fn chemo_drift_is_odd_in_gradient() {
    let q = gauss_symmetric(3).unwrap();
    let r = Response::default();
    let up = kinwb::spectral::chemo_eigen_expansion(&q, 0.7, &r).unwrap().lambda0_first_order.unwrap();
    let down = kinwb::spectral::chemo_eigen_expansion(&q, -0.7, &r).unwrap().lambda0_first_order.unwrap();
    assert!(up.abs() > 1e-3);
    assert_eq!(up, -down);
}

#[test]
fn vfp_s0_is_field_independent() {
    let q = vq();
    let a = vfp_smatrix(1e-3, 0.1, &q, 2.0, 1.0).unwrap();
    let b = vfp_smatrix(1e-3, 0.1, &q, -2.0, 1.0).unwrap();
    assert!(norm_inf(&(&a.s0_block - &b.s0_block)) < 1e-14);
}

#[test]
fn vfp_maxwellian_preserved_at_zero_field() {
    let q = vq();
    let m = q.maxwellian();
    let d = vfp_smatrix(1e-2, 0.1, &q, 0.0, 1.0).unwrap();
    let out = &d.s_full * DVector::from_column_slice(&m);
    for i in 0..6 {
        assert_relative_eq!(out[i], m[i], max_relative = 1e-11);
    }
}

#[test]
fn vfp_field_equilibrium_is_mapped_exactly() {
    let q = vq();
    let (eps, dx, e) = (0.05, 0.1, 0.7);
    let d = vfp_smatrix(eps, dx, &q, e, 1.0).unwrap();
    let f = |x: f64, v: f64| (e * x - v * v / 2.0).exp();
    let k = q.k;
    let inflow = DVector::from_fn(2 * k, |i, _| if i < k { f(0.0, q.nodes[i]) } else { f(dx, -q.nodes[i - k]) });
    let outflow = DVector::from_fn(2 * k, |i, _| if i < k { f(dx, q.nodes[i]) } else { f(0.0, -q.nodes[i - k]) });
    assert!((&d.s_full * inflow - outflow).amax() < 1e-10);
}

#[test]
fn vfp_b10_maxwellian_flux() {
    let q = vq();
    let (dx, e, kappa) = (0.1, 0.8, 1.0);
    let c = vfp_closure(&q).unwrap();
    let b = vfp_b0(dx, &q, &c, e, kappa).unwrap();
    let col = &b[0] * maxwellian_half(&q);
    let lhs: f64 = (0..q.k).map(|i| q.weights[i] * q.nodes[i] * col[i]).sum();
    let (_, s2) = q.sigmas();
    let rhs = (2.0 * e / kappa) * s2 / (1.0 - (-e * dx / kappa).exp());
    assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
}

#[test]
fn reconstruction_and_decay_all_families() {
    let g = gauss_symmetric(4).unwrap();
    let v = vq();
    let fams: Vec<Box<dyn Fn(f64) -> ScatteringDecomposition>> = vec![
        Box::new(|e| rte(e, 0.1, &g)),
        Box::new(|e| chemo_smatrix(e, 0.1, &g, 0.7, &Response::default()).unwrap()),
        Box::new(|e| vfp_smatrix(e, 0.1, &v, 0.4, 1.0).unwrap()),
    ];
    for (i, fam) in fams.iter().enumerate() {
        let gaps: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&e| {
                let d = fam(e);
                assert!(d.reconstruction_residual() < 1e-12, "family {i}");
                assert!(!d.uses_limit);
                norm_inf(&(d.b_full() - d.b0_full()))
            })
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "family {i}: {gaps:?}");
        let order = (gaps[1] / gaps[2]).log10();
        assert!((0.8..1.2).contains(&order), "family {i}: order {order}");
    }
}

#[test]
fn switch_uses_limit_blocks() {
    let q = gauss_symmetric(3).unwrap();
    let d = rte(1e-12, 0.1, &q);
    assert!(d.uses_limit);
    assert_eq!(d.b_blocks, d.b0_blocks);
}

#[test]
fn invalid_inputs_rejected() {
    let q = gauss_symmetric(3).unwrap();
    assert!(chemo_smatrix(0.0, 0.1, &q, 0.1, &Response::default()).is_err());
    assert!(chemo_smatrix(0.6, 0.1, &q, 5.0, &Response::Linear { slope: -3.0 }).is_err());
    assert!(vfp_closure(&q).is_err());
}

proptest! {
    #[test]
    fn chemo_stochastic_for_random_gradients(g in -3.0f64..3.0, eps in 1e-3f64..0.5, dx in 0.02f64..0.5) {
        let q = gauss_symmetric(3).unwrap();
        let d = chemo_smatrix(eps, dx, &q, g, &Response::default()).unwrap();
        prop_assert!(stochasticity_check(&d.s_full, &q).column_deviation < 1e-10);
        prop_assert!(d.reconstruction_residual() < 1e-12);
    }

    #[test]
    fn vfp_equilibrium_for_random_fields(e in -2.0f64..2.0, eps in 1e-3f64..0.5) {
        let q = vq();
        let dx = 0.1;
        let d = vfp_smatrix(eps, dx, &q, e, 1.0).unwrap();
        let f = |x: f64, v: f64| (e * x - v * v / 2.0).exp();
        let k = q.k;
        let inflow = DVector::from_fn(2 * k, |i, _| if i < k { f(0.0, q.nodes[i]) } else { f(dx, -q.nodes[i - k]) });
        let outflow = DVector::from_fn(2 * k, |i, _| if i < k { f(dx, q.nodes[i]) } else { f(0.0, -q.nodes[i - k]) });
        prop_assert!((&d.s_full * inflow - outflow).amax() < 1e-9);
    }
}
