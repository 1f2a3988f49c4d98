use nalgebra::DMatrix;
use proptest::prelude::*;

use arident::ar::{optimal_ar1, optimal_ar2, pem_cost};
use arident::lsq::{batch_estimate, build_problem, ls_fit};
use arident::moments::{covariance_for, theoretical_covariance};
use arident::system::simulate;
use arident::{ArOrder, EmpVariance, NoiseSpec, SeededStream, SystemParams};

fn white_params() -> impl Strategy<Value = SystemParams> {
    (-0.95f64..0.95, 0.05f64..10.0, 0.0f64..10.0)
        .prop_map(|(l, d2, x2)| SystemParams::white(l, d2, x2).unwrap())
}

fn any_params() -> impl Strategy<Value = SystemParams> {
    (
        -0.95f64..0.95,
        0.05f64..10.0,
        0.0f64..10.0,
        prop_oneof![Just(None), (-0.9f64..0.9).prop_map(Some)],
        -5.0f64..5.0,
        -5.0f64..5.0,
    )
        .prop_map(|(l, d2, x2, a, qbar, vbar)| {
            let q = match a {
                Some(a) => NoiseSpec::colored(a, d2),
                None => NoiseSpec::white(qbar, d2),
            };
            SystemParams::new(l, q, NoiseSpec::white(vbar, x2)).unwrap()
        })
}

fn toeplitz(psi: &[f64]) -> DMatrix<f64> {
    let k = psi.len();
    DMatrix::from_fn(k, k, |i, j| psi[i.abs_diff(j)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn covariance_blocks_are_psd(p in any_params()) {
        let cov = covariance_for(&p, 5).unwrap();
        let eig = toeplitz(&cov.values).symmetric_eigenvalues();
        prop_assert!(eig.min() >= -1e-10 * cov.values[0], "{:?}", eig);
    }

    #[test]
    fn cauchy_schwarz(p in any_params()) {
        let cov = covariance_for(&p, 10).unwrap();
        for v in &cov.values[1..] {
            prop_assert!(v.abs() <= cov.values[0] * (1.0 + 1e-12));
        }
    }

    // The optimum minimizes the full cost; with a nonzero mean its centered
    // part alone need not nest, so the variance is compared only at zero mean.
    #[test]
    fn nesting(p in any_params()) {
        let cov = covariance_for(&p, 2).unwrap();
        let ar1 = optimal_ar1(&cov).unwrap();
        if let Ok(ar2) = optimal_ar2(&cov) {
            let tol = 1e-12 * (cov.values[0] + cov.mean * cov.mean);
            let (g1, g2) = (pem_cost(&cov, &ar1.coeffs).unwrap(), pem_cost(&cov, &ar2.coeffs).unwrap());
            prop_assert!(g2 <= g1 + tol, "cost {} > {}", g2, g1);
            if cov.mean == 0.0 {
                let (v1, v2) = (ar1.pred_error_variance.unwrap(), ar2.pred_error_variance.unwrap());
                prop_assert!(v2 <= v1 + tol, "variance {} > {}", v2, v1);
            }
        }
    }

    #[test]
    fn zero_mean_optima_are_stationary(p in white_params()) {
        let cov = theoretical_covariance(&p, 2).unwrap();
        let phi1 = optimal_ar1(&cov).unwrap().coeffs[0];
        prop_assert!(phi1.abs() < 1.0);
        let c = optimal_ar2(&cov).unwrap().coeffs;
        prop_assert!(c[1].abs() < 1.0 && c[0] + c[1] < 1.0 && c[1] - c[0] < 1.0, "{:?}", c);
    }

    #[test]
    fn mean_shift_leaves_covariances(p in white_params(), qbar in -10.0f64..10.0, vbar in -10.0f64..10.0) {
        let mut shifted = p;
        shifted.q_spec.mean = qbar;
        shifted.v_spec.mean = vbar;
        let a = theoretical_covariance(&p, 6).unwrap();
        let b = theoretical_covariance(&shifted, 6).unwrap();
        prop_assert_eq!(a.values, b.values);
    }

    #[test]
    fn geometric_tail(p in white_params()) {
        let cov = theoretical_covariance(&p, 12).unwrap();
        for tau in 1..12 {
            let want = p.lambda * cov.values[tau];
            prop_assert!((cov.values[tau + 1] - want).abs() <= 4.0 * f64::EPSILON * want.abs());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn residuals_are_orthogonal(p in any_params(), seed in any::<u64>(), n in 50usize..3000, two in any::<bool>()) {
        let order = if two { ArOrder::Two } else { ArOrder::One };
        let traj = simulate(&p, n, 200, SeededStream::new(seed, 0)).unwrap();
        let prob = build_problem(&traj.values, order).unwrap();
        if let Ok(est) = ls_fit(&prob) {
            let psi0 = covariance_for(&p, 2).unwrap().values[0];
            prop_assert!(prob.orthogonality_defect(&est.coeffs) < 1e-8 * n as f64 * psi0);
        }
    }

    #[test]
    fn simulation_is_reproducible(p in any_params(), seed in any::<u64>(), stream in 0u64..1000) {
        let a = simulate(&p, 64, 50, SeededStream::new(seed, stream)).unwrap();
        let b = simulate(&p, 64, 50, SeededStream::new(seed, stream)).unwrap();
        prop_assert_eq!(&a.values, &b.values);
        let c = simulate(&p, 64, 50, SeededStream::new(seed, stream + 1)).unwrap();
        prop_assert_ne!(&a.values, &c.values);
    }

    #[test]
    fn batch_dispersion_is_psd(p in white_params(), seed in any::<u64>(), kappa in 2usize..20) {
        let s = batch_estimate(&p, ArOrder::Two, 200, kappa, 100, seed).unwrap();
        match s.emp_variance {
            EmpVariance::Matrix(m) => {
                prop_assert_eq!(m[0][1], m[1][0]);
                prop_assert!(m[0][0] >= 0.0 && m[1][1] >= 0.0);
                prop_assert!(m[0][0] * m[1][1] - m[0][1] * m[1][0] >= -1e-12);
            }
            EmpVariance::Scalar(_) => prop_assert!(false, "order 2 must give a matrix"),
        }
    }
}

fn rms_error(n: usize, seed: u64) -> f64 {
    let p = SystemParams::white(1.0 / 3.0, 4.0, 9.0).unwrap();
    let s = batch_estimate(&p, ArOrder::One, n, 400, 1000, seed).unwrap();
    let theta = 1.0 / 9.0;
    let ms = s
        .estimates
        .iter()
        .map(|e| (e.coeffs[0] - theta).powi(2))
        .sum::<f64>()
        / 400.0;
    ms.sqrt()
}

#[test]
fn error_shrinks_at_the_clt_rate() {
    let rms: Vec<f64> = [250, 1000, 4000].iter().map(|&n| rms_error(n, 8)).collect();
    for w in rms.windows(2) {
        let ratio = w[0] / w[1];
        assert!((1.6..=2.5).contains(&ratio), "rms {rms:?}, ratio {ratio}");
    }
}

#[test]
fn variance_drops_when_length_doubles() {
    let p = SystemParams::white(1.0 / 3.0, 4.0, 9.0).unwrap();
    for (order, seed) in [
        (ArOrder::One, 56),
        (ArOrder::Two, 57),
        (ArOrder::One, 3),
        (ArOrder::Two, 4),
    ] {
        let n = batch_estimate(&p, order, 1000, 100, 1000, seed).unwrap();
        let n2 = batch_estimate(&p, order, 2000, 100, 1000, seed).unwrap();
        for (a, b) in n
            .emp_variance
            .diagonal()
            .iter()
            .zip(n2.emp_variance.diagonal())
        {
            assert!(b <= *a, "{order} seed {seed}: {b} > {a}");
        }
    }
}
