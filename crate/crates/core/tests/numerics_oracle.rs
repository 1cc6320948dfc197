use proptest::prelude::*;
use slit_fringe::numerics::{erf, fresnel, heat_step, shift_weights, FRESNEL_SEAM};
use slit_fringe_oracle as oracle;

fn log_spaced(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(move |i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
}

#[test]
fn fresnel_matches_quadrature() {
    for z in log_spaced(1e-3, 50.0, 200).chain([FRESNEL_SEAM, 1.0, 2.5, 7.3]) {
        let (c, s) = fresnel(z).unwrap();
        let (cq, sq) = oracle::fresnel_quad(z);
        assert!((c - cq).abs() <= 1e-10, "C({z}) = {c}, quadrature {cq}");
        assert!((s - sq).abs() <= 1e-10, "S({z}) = {s}, quadrature {sq}");
    }
}

#[test]
fn fresnel_reference_point() {
    let (c, s) = fresnel(1.0).unwrap();
    assert!((c - 0.7798934004).abs() < 1e-10);
    assert!((s - 0.4382591474).abs() < 1e-10);
}

#[test]
fn fresnel_approaches_one_half() {
    let (c, s) = fresnel(1e4).unwrap();
    assert!((c - 0.5).abs() < 1e-4 && (s - 0.5).abs() < 1e-4);
}

#[test]
fn erf_matches_quadrature_and_series() {
    for z in log_spaced(1e-3, 50.0, 200) {
        let e = erf(z).unwrap();
        assert!((e - oracle::erf_quad(z)).abs() <= 1e-10, "erf({z})");
        if z < 5.0 {
            assert!((e - oracle::erf_series(z)).abs() <= 1e-13, "erf({z}) series");
        }
    }
    assert!((erf(1.0).unwrap() - 0.8427007929).abs() < 1e-10);
}

#[test]
fn heat_step_matches_quadrature() {
    let sigma = 1.0 / std::f64::consts::PI.powi(3);
    for t in [1e-3, 0.05, 0.3, 2.0] {
        for x in [-1.4, -1.1, -0.95, 0.0, 0.4, 0.9, 1.0, 1.05, 1.3] {
            let v = heat_step(1.0, 0.1, 2.5, sigma, t, x).unwrap();
            let q = oracle::heat_step_quad(1.0, 0.1, 2.5, sigma, t, x);
            assert!((v - q).abs() <= 1e-10, "t={t} x={x}: {v} vs {q}");
        }
    }
}

#[test]
fn heat_step_conserves_mass() {
    let (sigma, t, dx) = (0.03, 1.5, 0.002);
    let values: Vec<f64> = (0..=10_000)
        .map(|i| heat_step(0.0, 0.1, 2.5, sigma, t, -10.0 + i as f64 * dx).unwrap())
        .collect();
    assert!((oracle::trapezoid(&values, dx) - 0.5).abs() < 1e-10);
}

#[test]
fn heat_semigroup_property() {
    // evolving for t1 then t2 equals evolving for t1 + t2
    let (sigma, t1, t2, dx) = (0.05, 0.2, 0.3, 0.002);
    let xs: Vec<f64> = (0..=4000).map(|i| -4.0 + i as f64 * dx).collect();
    let stage: Vec<f64> = xs.iter().map(|&x| heat_step(0.0, 0.5, 1.0, sigma, t1, x).unwrap()).collect();
    let twice = oracle::gaussian_convolve(&stage, dx, sigma, t2);
    for (i, &x) in xs.iter().enumerate().filter(|(_, x)| x.abs() < 2.0) {
        let once = heat_step(0.0, 0.5, 1.0, sigma, t1 + t2, x).unwrap();
        assert!((once - twice[i]).abs() < 1e-7, "x={x}");
    }
}

#[test]
fn shift_weight_reference_value() {
    let w = shift_weights(1.0, 1e-13).unwrap();
    assert!((w.weight(0) - 0.3085083226).abs() < 1e-9);
    for j in 0..6 {
        assert!((w.weight(j) - oracle::shift_weight_direct(1.0, j)).abs() < 1e-14);
    }
}

#[test]
fn shift_weights_match_direct_sum() {
    for lam in [0.02, 0.5, 3.98, 12.5 * 0.8] {
        let w = shift_weights(lam, 1e-13).unwrap();
        for (j, wj) in w.iter() {
            let d = oracle::shift_weight_direct(lam, j);
            assert!((wj - d).abs() <= 1e-13 * (1.0 + d), "lam={lam} j={j}: {wj} vs {d}");
        }
    }
}

#[test]
fn retained_weight_grows_as_tail_shrinks() {
    for lam in [0.3, 4.0, 40.0] {
        let totals: Vec<f64> = [1e-4, 1e-6, 1e-9, 1e-12]
            .iter()
            .map(|&eps| {
                let w = shift_weights(lam, eps).unwrap();
                assert!(1.0 - w.total() <= eps * (1.0 + 1e-9));
                w.total()
            })
            .collect();
        assert!(totals.windows(2).all(|p| p[1] >= p[0]), "lam={lam}: {totals:?}");
    }
}

proptest! {
    #[test]
    fn fresnel_is_odd_and_bounded(z in -60.0f64..60.0) {
        let (c, s) = fresnel(z).unwrap();
        let (cn, sn) = fresnel(-z).unwrap();
        prop_assert_eq!(c, -cn);
        prop_assert_eq!(s, -sn);
        prop_assert!(c.abs() <= 0.78 && s.abs() <= 0.72);
    }

    #[test]
    fn shift_weights_symmetric_and_normalized(lam in 0.0f64..200.0) {
        let w = shift_weights(lam, 1e-12).unwrap();
        for (j, wj) in w.iter() {
            prop_assert!((0.0..=1.0).contains(&wj));
            prop_assert_eq!(wj, w.weight(-j));
        }
        // truncation removes at most tail_eps, plus summation rounding
        prop_assert!(w.total() <= 1.0 + 1e-14 && w.total() >= 1.0 - 1e-12 - 1e-15);
    }

    #[test]
    fn heat_step_bounded_by_height(x in -3.0f64..3.0, t in 1e-4f64..5.0) {
        let v = heat_step(0.5, 0.2, 2.5, 0.03, t, x).unwrap();
        prop_assert!((0.0..=2.5).contains(&v));
    }
}
