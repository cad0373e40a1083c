use approx::assert_relative_eq;
use kinwb::diagnostics::*;
use kinwb::experiments::verify::reference_root_examples;
use kinwb::kinetic_solver::Model;
use kinwb::par::Execution;
use kinwb::quadrature::{gauss_symmetric, vfp_quadrature};
use kinwb::scattering::{chemo_closure, rte_closure, vfp_closure};
use kinwb::spectral::{case_phi, dispersion_roots, Response};
use kinwb::twostream::{ts_smatrix, twostream_quadrature};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn identity_is_doubly_stochastic() {
    let q = gauss_symmetric(3).unwrap();
    let r = stochasticity_check(&DMatrix::identity(6, 6), &q);
    assert_eq!(r.column_deviation, 0.0);
    assert_eq!(r.row_deviation, 0.0);
}

#[test]
fn twostream_columns() {
    let r = stochasticity_check(&ts_smatrix(0.05, 0.1, 1.2).unwrap(), &twostream_quadrature());
    assert!(r.column_deviation < 1e-14);
}

#[test]
fn kernel_range_all_models() {
    let tq = twostream_quadrature();
    let rep = kernel_range_check(&limit_cell_matrix(&tq, &DMatrix::from_element(1, 1, 1.0)), &tq, &[1.0, 1.0]);
    assert!(rep.passed);
    assert_eq!(rep.null_dim, 1);

    let q = gauss_symmetric(4).unwrap();
    let spec = dispersion_roots(&q, &[1.0; 8]).unwrap();
    for c in [rte_closure(&q, &spec).unwrap(), chemo_closure(&q).unwrap()] {
        let rep = kernel_range_check(&limit_cell_matrix(&q, &c.s0_block()), &q, &q.maxwellian());
        assert!(rep.passed, "{rep:?}");
        assert!(rep.cosine > 1.0 - 1e-12);
    }

    let v = vfp_quadrature(3, 1.0, &[0.6, 1.4, 2.4]).unwrap();
    let c = vfp_closure(&v).unwrap();
    let rep = kernel_range_check(&limit_cell_matrix(&v, &c.s0_block()), &v, &v.maxwellian());
    assert!(rep.passed, "{rep:?}");
}

#[test]
fn kernel_check_rejects_regular_matrix() {
    let q = gauss_symmetric(2).unwrap();
    let rep = kernel_range_check(&DMatrix::identity(4, 4), &q, &q.maxwellian());
    assert_eq!(rep.null_dim, 0);
    assert!(!rep.passed);
}

#[test]
fn k2_zero_flux_and_pair_skip() {
    let q = gauss_symmetric(2).unwrap();
    let l = 2.0 * 3f64.sqrt();
    let s: f64 = (0..2)
        .map(|i| {
            let v = q.nodes[i];
            q.weights[i] * v * (case_phi(l, v, 1.0).unwrap() - case_phi(l, -v, 1.0).unwrap())
        })
        .sum();
    assert!(s.abs() < 1e-12);
    assert_eq!(orthogonality_check(&q, &[1.0; 4], &[l, l]).len(), 0);
    assert_eq!(orthogonality_check(&q, &[1.0; 4], &[-l, 0.0, l]).len(), 3);
}

#[test]
fn vfp_mode_residuals() {
    let v = vfp_quadrature(3, 1.0, &[0.6, 1.4, 2.4]).unwrap();
    assert!(vfp_orthogonality_check(&v).iter().all(|r| *r < 1e-10));
    assert!(vfp_basis_rank(&v) > 1e-10);
}

#[test]
fn haar_examples() {
    let e = std::f64::consts::E;
    assert_relative_eq!(haar_det(&[1.0, 2.0], &[0.0, 1.0], &[0, 1]).unwrap(), 2.0 * e * e - e, max_relative = 1e-14);
    assert_relative_eq!(haar_det(&[0.7], &[1.5], &[2]).unwrap(), (1.05f64).exp() * 0.49, max_relative = 1e-14);
    assert_eq!(haar_det(&[0.3, 0.3], &[0.0, 1.0], &[0, 0]).unwrap(), 0.0);
    assert!(haar_det(&[1.0], &[1.0, 2.0], &[0]).is_err());
}

#[test]
fn reference_root_sets() {
    for (terms, interval, expected) in reference_root_examples() {
        let r = exp_poly_roots(&terms, interval).unwrap();
        assert_eq!(r.roots.len(), expected.len());
        for (a, b) in r.roots.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-3, "{a} vs {b}");
        }
        assert!(r.roots.len() <= r.bound);
    }
}

#[test]
fn positive_constant_has_no_roots() {
    let r = exp_poly_roots(&[ExpPolyTerm { coeff_poly: vec![2.0], rate: 0.0 }], (-1.0, 1.0)).unwrap();
    assert!(r.roots.is_empty());
    assert_eq!(r.bound, 0);
}

#[test]
fn double_root_is_tangent() {
    let t = ExpPolyTerm { coeff_poly: vec![0.25, -1.0, 1.0], rate: 0.0 };
    let r = exp_poly_roots(&[t], (0.0, 1.0)).unwrap();
    assert!(r.roots.is_empty());
    assert_eq!(r.tangent_roots.len(), 1);
    assert!((r.tangent_roots[0] - 0.5).abs() < 1e-4);
}

pub fn random_instance(rng: &mut ChaCha8Rng) -> Vec<ExpPolyTerm> {
    let n = rng.gen_range(1..=4);
    let mut rates: Vec<f64> = Vec::new();
    while rates.len() < n {
        let r: f64 = rng.gen_range(-2.0..2.0);
        if rates.iter().all(|x| (x - r).abs() > 0.1) {
            rates.push(r);
        }
    }
    rates
        .into_iter()
        .map(|rate| {
            let deg = rng.gen_range(0..=3);
            let mut c: Vec<f64> = (0..=deg).map(|_| rng.gen_range(-3.0..3.0)).collect();
            c[deg] = if c[deg] >= 0.0 { c[deg] + 0.1 } else { c[deg] - 0.1 };
            ExpPolyTerm { coeff_poly: c, rate }
        })
        .collect()
}

#[test]
fn polya_szego_bound_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..50 {
        let terms = random_instance(&mut rng);
        let r = exp_poly_roots(&terms, (-3.0, 3.0)).unwrap();
        assert!(r.roots.len() <= r.bound, "{terms:?} {r:?}");
    }
}

#[test]
fn rte_ap_gap() {
    let setup = ApSetup::standard(64);
    let q = gauss_symmetric(4).unwrap();
    let t = ap_consistency(&Model::Rte, &q, &[1e-3, 3e-4, 1e-4, 3e-5], &setup, Execution::Parallel).unwrap();
    let s = t.slope.unwrap();
    assert!((0.9..=1.1).contains(&s), "{t:?}");
    assert!(ap_gap(&Model::Rte, &q, 1e-6, &setup, Execution::Parallel).unwrap() < 1e-5);
    let far = ap_gap(&Model::Rte, &q, 1.0, &setup, Execution::Parallel).unwrap();
    let heat = kinwb::macrolimit::heat_step(&setup.rho0, &q, setup.dt, setup.dx);
    let update = heat.iter().zip(&setup.rho0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / 1.5;
    assert!(far > 0.3 * update, "gap {far:e} against update {update:e}");
    let one = ap_consistency(&Model::Rte, &q, &[1e-3], &setup, Execution::Sequential).unwrap();
    assert!(one.slope.is_none());
}

#[test]
fn chemo_without_gradient_matches_rte() {
    let setup = ApSetup { rho0: vec![1.0; 32], ..ApSetup::standard(32) };
    let q = gauss_symmetric(4).unwrap();
    let a = ap_gap(&Model::Rte, &q, 1e-4, &setup, Execution::Sequential).unwrap();
    let b = ap_gap(&Model::Chemo { response: Response::default() }, &q, 1e-4, &setup, Execution::Sequential).unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn loglog_slope_recovers_power() {
    let x = [1.0, 2.0, 4.0, 8.0];
    let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.5)).collect();
    assert_relative_eq!(loglog_slope(&x, &y).unwrap(), 1.5, max_relative = 1e-12);
    assert!(loglog_slope(&[1.0], &[1.0]).is_none());
}

#[test]
fn reports_render() {
    let lines = vec![CheckLine::new("a", true, "ok"), CheckLine::new("bbb", false, "bad")];
    let text = render_text(&lines);
    assert!(text.starts_with("PASS  a    ok\nFAIL  bbb  bad"));
    let back: Vec<CheckLine> = serde_json::from_str(&render_json(&lines)).unwrap();
    assert_eq!(back, lines);
}

#[test]
fn checks_are_deterministic() {
    let q = gauss_symmetric(3).unwrap();
    let c = chemo_closure(&q).unwrap();
    let r0 = limit_cell_matrix(&q, &c.s0_block());
    assert_eq!(kernel_range_check(&r0, &q, &q.maxwellian()), kernel_range_check(&r0, &q, &q.maxwellian()));
}

proptest! {
    #[test]
    fn haar_sign_constant_along_homotopy(seed in 0u64..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 3;
        let mut y: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
        y.sort_by(|a, b| a.partial_cmp(b).unwrap());
        y.dedup();
        prop_assume!(y.len() == n && y.windows(2).all(|w| w[1] - w[0] > 0.05));
        let z = [0u32, 0, 0];
        let start: Vec<f64> = vec![0.2, 0.8, 1.5];
        let end: Vec<f64> = vec![0.5 + rng.gen_range(0.0..0.2), 1.0 + rng.gen_range(0.0..0.5), 2.0 + rng.gen_range(0.0..0.5)];
        let d0 = haar_det(&start, &y, &z).unwrap();
        prop_assert!(d0 != 0.0);
        for s in 0..=20 {
            let t = s as f64 / 20.0;
            let x: Vec<f64> = start.iter().zip(&end).map(|(a, b)| (1.0 - t) * a + t * b).collect();
            let d = haar_det(&x, &y, &z).unwrap();
            prop_assert!(d.signum() == d0.signum());
        }
    }
}
