use proptest::prelude::*;
use slit_fringe::fringe::{compare, dilate, find_extrema, second_phase_contrast, spacing_stats};
use slit_fringe::nlad::evolve_factorized;
use slit_fringe::schrodinger::rho_profile;
use slit_fringe::{standard_nlad_params, standard_slits, Grid, Normalization, Profile, Tolerance};
use std::f64::consts::PI;

#[test]
fn se_spacing_irregular_past_first_phase_window() {
    let g = Grid::with_spacing(0.0, 13.0, 0.001).unwrap();
    let p = rho_profile(&standard_slits(Normalization::Amplitude), 1.0 / PI, &g).unwrap();
    let late = spacing_stats(&find_extrema(&p, (8.8, 12.2), 1e-9).unwrap()).unwrap();
    assert!(late.gaps.len() >= 3);
    assert!(late.gaps.iter().any(|g| *g <= 0.80), "{late:?}");
    let wide = spacing_stats(&find_extrema(&p, (4.8, 12.2), 1e-9).unwrap()).unwrap();
    assert!(wide.max_abs_dev >= 0.15, "{wide:?}");
}

#[test]
fn nlad_spacing_regular_in_first_phase_window() {
    let g = Grid::with_spacing(0.0, 9.0, 0.001).unwrap();
    let sl = standard_slits(Normalization::Density);
    let p = evolve_factorized(&standard_nlad_params(), &sl, 1.0 / PI, &g, &Tolerance::default()).unwrap();
    let s = spacing_stats(&find_extrema(&p, (0.2, 8.8), 1e-9).unwrap()).unwrap();
    assert!(s.max_dev_from(1.0) <= 0.04, "{s:?}");
}

#[test]
fn second_phase_nlad_contrast_exceeds_se() {
    let t = 6.0 / PI;
    let g = Grid::with_spacing(-60.0, 60.0, 0.01).unwrap();
    let rho = rho_profile(&standard_slits(Normalization::Amplitude), t, &g).unwrap();
    let sl = standard_slits(Normalization::Density);
    let omega = evolve_factorized(&standard_nlad_params(), &sl, t, &g, &Tolerance::default()).unwrap();
    let (w_min, r_min) = second_phase_contrast(&omega, &rho, (-60.0, 60.0)).unwrap();
    assert!(w_min > r_min, "omega {w_min:e}, rho {r_min:e}");
}

fn bump(centre: f64, width: f64) -> Profile {
    let g = Grid::with_spacing(-10.0, 10.0, 0.01).unwrap();
    Profile::from_fn(g, 1.0, |x| (-((x - centre) / width).powi(2)).exp()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extrema_interleave(a in 0.5f64..3.0, f in 1.0f64..6.0, phase in 0.0f64..6.3) {
        let g = Grid::with_spacing(-5.0, 5.0, 0.005).unwrap();
        let p = Profile::from_fn(g, 0.0, |x| 2.0 + (f * x + phase).sin() * (-(x / (3.0 * a)).powi(2)).exp()).unwrap();
        let r = find_extrema(&p, (-4.5, 4.5), 1e-9).unwrap();
        let mut all: Vec<(f64, bool)> = r.minima.iter().map(|e| (e.x, true)).chain(r.maxima.iter().map(|e| (e.x, false))).collect();
        all.sort_by(|u, v| u.0.total_cmp(&v.0));
        for w in all.windows(2) {
            prop_assert!(w[0].1 != w[1].1, "consecutive extrema of one kind: {:?}", all);
        }
        for e in &r.minima {
            prop_assert!(e.x >= -4.5 && e.x <= 4.5);
        }
    }

    #[test]
    fn dilate_round_trip(m in 1.0f64..4.0, centre in -2.0f64..2.0) {
        let p = bump(centre, 0.8);
        let wide = p.grid().scaled(m).unwrap();
        let there = dilate(&p, m, &wide).unwrap();
        let back = dilate(&there, 1.0 / m, p.grid()).unwrap();
        let (sup, _) = compare(&p, &back).unwrap();
        // two rounds of linear interpolation at Δx = 0.01
        prop_assert!(sup <= 5e-5, "sup {}", sup);
        prop_assert!((there.mass() - p.mass()).abs() <= 1e-6);
    }

    #[test]
    fn compare_is_symmetric(c1 in -2.0f64..2.0, c2 in -2.0f64..2.0) {
        let (a, b) = (bump(c1, 0.7), bump(c2, 1.1));
        prop_assert_eq!(compare(&a, &b).unwrap(), compare(&b, &a).unwrap());
    }
}
