use flatorbit::numeric::{self, seed_from_env};
use flatorbit::weyl::*;
use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: RngSeed::Fixed(seed_from_env()), failure_persistence: None, ..ProptestConfig::default() }
}

fn small() -> Grid {
    Grid::new(64, 16.0).unwrap()
}

fn gaussian() -> impl Strategy<Value = Gaussian2> {
    (0.3f64..2.0, -1.5f64..1.5, -1.5f64..1.5, 0.6f64..2.0, 0.6f64..2.0).prop_map(|(amp, x0, xi0, sx, sxi)| Gaussian2 { amp, x0, xi0, sx, sxi })
}

fn central_gaussian() -> impl Strategy<Value = Gaussian2> {
    (0.3f64..2.0, -1.0f64..1.0, -1.0f64..1.0, 0.5f64..1.0, 0.5f64..1.0).prop_map(|(amp, x0, xi0, sx, sxi)| Gaussian2 { amp, x0, xi0, sx, sxi })
}

fn packet_params() -> impl Strategy<Value = (f64, f64, f64)> {
    (-1.5f64..1.5, 0.6f64..1.5, -2.0f64..2.0)
}

fn max_abs(m: &GridOperator) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn quantization_is_linear(a in gaussian(), b in gaussian(), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let g = small();
        let lhs = op_quantize(&g, &|x, xi| C64::new(s * a.eval(x, xi) + t * b.eval(x, xi) * x, 0.0));
        let rhs = op_quantize(&g, &|x, xi| C64::new(a.eval(x, xi), 0.0)) * C64::new(s, 0.0)
            + op_quantize(&g, &|x, xi| C64::new(b.eval(x, xi) * x, 0.0)) * C64::new(t, 0.0);
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn real_symbols_give_self_adjoint_operators(a in gaussian(), c in -1.0f64..1.0) {
        let g = small();
        let op = op_quantize(&g, &|x, xi| C64::new(a.eval(x, xi) * (1.0 + c * x * xi), 0.0));
        prop_assert!(max_abs(&(&op - op.adjoint())) < 1e-10);
    }

    #[test]
    fn pairing_matches_wigner(a in gaussian(), p in packet_params(), q in packet_params(), wave in (-1.0f64..1.0, -1.0f64..1.0)) {
        let g = small();
        let sym = |x: f64, xi: f64| C64::from_polar(a.eval(x, xi), wave.0 * x + wave.1 * xi);
        let phi = packet(&g, p.0, p.1, p.2);
        let psi = packet(&g, q.0, q.1, q.2);
        let lhs = g.inner(&apply(&op_quantize(&g, &sym), &phi), &psi);
        let rhs = wigner(&g, &phi, &psi).unwrap().pair(&sym);
        prop_assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm().max(1e-6), "{lhs} {rhs}");
    }

    #[test]
    fn covariance_on_grid_shifts(a in central_gaussian(), steps in -4i32..=4, p in -1.0f64..1.0, t in -1.0f64..1.0) {
        let g = Grid::new(128, 32.0).unwrap();
        let r = covariance_residual(&g, &|x, xi| C64::new(a.eval(x, xi), 0.0), steps as f64 * g.h(), p, t).unwrap();
        prop_assert!(r < 1e-9, "{r}");
    }

    #[test]
    fn schrodinger_is_a_partial_isometry(steps in -8i32..=8, p in -2.0f64..2.0, t in -3.0f64..3.0) {
        let g = small();
        let u = schrodinger(&g, steps as f64 * g.h(), p, t).unwrap();
        let n = g.n();
        // samples shifted out of the window are lost
        let proj = u.adjoint() * &u;
        let kept = (n - steps.unsigned_abs() as usize) as f64;
        prop_assert!(max_abs(&(&proj * &proj - &proj)) < 1e-12);
        prop_assert!((proj.trace().re - kept).abs() < 1e-9);
        let back = schrodinger(&g, -(steps as f64) * g.h(), -p, -t).unwrap();
        prop_assert!(max_abs(&(&back * &u * &proj - &proj)) < 1e-12);
    }

    #[test]
    fn conv_average_is_positive(sq in 0.3f64..0.6, sp in 0.3f64..0.6, p in packet_params(), q in packet_params()) {
        let g = small();
        let u = DVector::from_vec(packet(&g, p.0, p.1, p.2));
        let v = DVector::from_vec(packet(&g, q.0, q.1, q.2));
        let c: GridOperator = &u * u.adjoint() + &v * v.adjoint();
        let w = Window { q_max: 8.0, p_max: 8.0, p_step: g.h() };
        let bc = conv_average(&g, &gaussian_density(sq, sp), &c, w).unwrap();
        let herm = (&bc + bc.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(herm).eigenvalues;
        let (min, max) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
        prop_assert!(min >= -1e-10 * max, "{min} {max}");
    }
}

#[test]
fn unit_symbol_and_trace() {
    let g = small();
    assert!(numeric::op_identity(&g).pass);
    // Tr Op(a) = (2π)⁻¹ ∬ a
    let a = numeric::convolution_symbol();
    let tr = op_quantize(&g, &|x, xi| C64::new(a.eval(x, xi), 0.0)).trace();
    assert!((tr.re - a.integral() / (2.0 * std::f64::consts::PI)).abs() < 1e-10 && tr.im.abs() < 1e-12);
}

#[test]
fn hilbert_schmidt_constant_is_inverse_two_pi() {
    let g = Grid::new(256, 16.0).unwrap();
    for c in numeric::hs_constants(&g) {
        assert!((c - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-6, "{c}");
    }
}

#[test]
fn numeric_checks_pass_at_n_128() {
    let g = numeric::grid(128).unwrap();
    let checks = [
        numeric::op_identity(&g),
        numeric::self_adjoint(&g),
        numeric::pairing(&g, seed_from_env(), 20).unwrap(),
        numeric::wigner_diagonal(&g).unwrap(),
        numeric::covariance(&g).unwrap(),
        numeric::conv_intertwining(&g).unwrap(),
        numeric::conv_linearity(&g).unwrap(),
        numeric::hs_constant(&g),
    ];
    for c in checks {
        assert!(c.pass, "{c:?}");
    }
}

#[test]
fn approximate_identity_tightens_with_width() {
    let g = numeric::grid(256).unwrap();
    let c = numeric::approximate_identity(&g).unwrap();
    assert!(c.pass, "{c:?}");
}

#[test]
fn convolution_checks_at_n_256() {
    let g = numeric::grid(256).unwrap();
    for c in [numeric::conv_intertwining(&g).unwrap(), numeric::conv_positivity(&g).unwrap()] {
        assert!(c.pass, "{c:?}");
    }
}

#[test]
fn quadrature_window_guard() {
    let g = small();
    let c = op_quantize(&g, &|_, _| C64::new(1.0, 0.0));
    let w = Window { q_max: 0.5, p_max: 0.5, p_step: g.h() };
    assert!(matches!(conv_average(&g, &gaussian_density(1.0, 1.0), &c, w), Err(WeylError::QuadratureWindowTooSmall { .. })));
}

#[test]
fn study_table_is_bounded() {
    let g = Grid::new(128, 16.0).unwrap();
    let study = numeric::seminorm_study(&g);
    for c in &study.checks {
        assert!(c.pass, "{c:?}");
    }
    let unit = &study.rows[0];
    assert_eq!(unit.symbol, "1⊗1");
    assert!((unit.op_norm - 1.0).abs() < 1e-10);
}
