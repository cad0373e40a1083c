use approx::assert_relative_eq;
use kinwb::error::Error;
use kinwb::quadrature::*;
use proptest::prelude::*;

const GL4_NODES: [f64; 2] = [0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
const GL4_WEIGHTS: [f64; 2] = [0.652_145_154_862_546_1, 0.347_854_845_137_453_9];

#[test]
fn gauss_k2_closed_form() {
    let q = gauss_symmetric(2).unwrap();
    let s3 = 3f64.sqrt();
    assert_relative_eq!(q.nodes[0], (3.0 - s3) / 6.0, max_relative = 1e-14);
    assert_relative_eq!(q.nodes[1], (3.0 + s3) / 6.0, max_relative = 1e-14);
    assert_relative_eq!(q.weights[0], 0.5, max_relative = 1e-14);
    assert_relative_eq!(q.weights[1], 0.5, max_relative = 1e-14);
    assert!(moment_report(&q).passed);
}

#[test]
fn gauss_k4_matches_table() {
    let q = gauss_symmetric(4).unwrap();
    for i in 0..2 {
        assert_relative_eq!(q.nodes[2 + i], 0.5 * (1.0 + GL4_NODES[i]), max_relative = 1e-14);
        assert_relative_eq!(q.nodes[1 - i], 0.5 * (1.0 - GL4_NODES[i]), max_relative = 1e-14);
        assert_relative_eq!(q.weights[2 + i], 0.5 * GL4_WEIGHTS[i], max_relative = 1e-14);
        assert_relative_eq!(q.weights[1 - i], 0.5 * GL4_WEIGHTS[i], max_relative = 1e-14);
    }
    let r = moment_report(&q);
    assert!((r.sum_weights - 1.0).abs() < 1e-14);
    assert!((r.second_moment - 1.0 / 3.0).abs() < 1e-14);
}

#[test]
fn midpoint_rule_fails_second_moment() {
    let q = gauss_symmetric(1).unwrap();
    assert_eq!(q.nodes, vec![0.5]);
    assert_eq!(q.weights, vec![1.0]);
    let r = moment_report(&q);
    assert!((r.second_moment - 0.25).abs() < 1e-15);
    assert!(!r.passed);
}

#[test]
fn gauss_moments_up_to_32() {
    for k in 2..=32 {
        let q = gauss_symmetric(k).unwrap();
        let r = moment_report(&q);
        assert!((r.sum_weights - 1.0).abs() < 1e-14, "K={k}");
        assert!((r.second_moment - 1.0 / 3.0).abs() < 1e-13, "K={k}");
        assert!(q.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(q.weights.iter().all(|w| *w > 0.0));
    }
}

#[test]
fn gauss_rejects_zero() {
    assert!(matches!(gauss_symmetric(0), Err(Error::InvalidInput(_))));
}

fn h1(x: f64) -> f64 {
    2.0 * x
}

fn h2(x: f64) -> f64 {
    4.0 * x * x - 2.0
}

fn psi0_closed(ell: usize, v: f64) -> f64 {
    let l = ell as f64;
    let x = (v - 2.0 * l.sqrt()) / 2f64.sqrt();
    let h = match ell {
        0 => 1.0,
        1 => h1(x),
        _ => h2(x),
    };
    h * (-v * v / 2.0 + v * l.sqrt() - 2.0 * l).exp()
}

#[test]
fn vfp_k3_weights_match_cramer_solve() {
    let q = vfp_quadrature(3, 1.0, &[0.6, 1.4, 2.4]).unwrap();
    assert_eq!(&q.nodes[..2], &[0.6, 1.4]);
    let row = |ell: usize| -> Vec<f64> { q.nodes.iter().map(|&v| v * (psi0_closed(ell, v) - psi0_closed(ell, -v))).collect() };
    let a = [row(1), row(2), vec![1.0; 3]];
    let det3 = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let m: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| a[i][j]));
    let d = det3(&m);
    for c in 0..3 {
        let mut mc = m;
        for (r, row) in mc.iter_mut().enumerate() {
            row[c] = if r == 2 { 1.0 } else { 0.0 };
        }
        assert_relative_eq!(q.weights[c], det3(&mc) / d, max_relative = 1e-9);
    }
    let (s0, s2) = q.sigmas();
    assert!((s2 - s0).abs() < 1e-10);
    let r = moment_report(&q);
    assert!(r.passed);
    assert!(r.orthogonality_residuals.iter().all(|x| *x < 1e-12));
}

#[test]
fn vfp_k1_node_is_sqrt_kappa() {
    let q = vfp_quadrature(1, 2.0, &[1.0]).unwrap();
    assert_relative_eq!(q.nodes[0], 2f64.sqrt(), max_relative = 1e-12);
    assert_eq!(q.weights, vec![1.0]);
}

#[test]
fn vfp_duplicated_nodes_rejected() {
    assert!(matches!(vfp_quadrature(3, 1.0, &[1.0, 1.0, 2.0]), Err(Error::SingularBasis(_))));
}

#[test]
fn vfp_rejects_bad_input() {
    assert!(vfp_quadrature(3, 1.0, &[0.6, 1.4]).is_err());
    assert!(vfp_quadrature(2, -1.0, &[0.6, 1.4]).is_err());
    assert!(vfp_quadrature(2, 1.0, &[1.4, 0.6]).is_err());
}

#[test]
fn quadrature_json_round_trip() {
    let q = vfp_quadrature(3, 1.0, &[0.6, 1.4, 2.4]).unwrap();
    let back = VelocityQuadrature::from_json(&q.to_json()).unwrap();
    assert_eq!(q, back);
}

#[test]
fn construction_is_bitwise_reproducible() {
    assert_eq!(gauss_symmetric(7).unwrap(), gauss_symmetric(7).unwrap());
    assert_eq!(
        vfp_quadrature(3, 1.0, &[0.6, 1.4, 2.4]).unwrap(),
        vfp_quadrature(3, 1.0, &[0.6, 1.4, 2.4]).unwrap()
    );
}

proptest! {
    #[test]
    fn gauss_is_exact_on_quadratics(k in 2usize..24, a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
        let q = gauss_symmetric(k).unwrap();
        let approx: f64 = q.nodes.iter().zip(&q.weights).map(|(v, w)| w * (a + b * v + c * v * v)).sum();
        let exact = a + b / 2.0 + c / 3.0;
        prop_assert!((approx - exact).abs() < 1e-13);
    }

    #[test]
    fn vfp_output_satisfies_moments(kappa in 0.5f64..2.0) {
        let s = kappa.sqrt();
        if let Ok(q) = vfp_quadrature(3, kappa, &[0.6 * s, 1.4 * s, 2.4 * s]) {
            prop_assert!(moment_report(&q).passed);
            prop_assert!(q.weights.iter().all(|w| *w > 0.0));
        }
    }
}
