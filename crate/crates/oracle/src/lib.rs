//! Brute-force reference computations for the test suites.
//!
//! Everything here is deliberately slow and direct: fixed-order
//! Gauss-Legendre panels, explicit series, and dense convolutions. Nothing in
//! this crate calls into the library it is used to check.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 2);
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre rule with `panels` equal panels of `order` nodes.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (xs, ws) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let mut acc = 0.0;
        for (x, w) in xs.iter().zip(&ws) {
            acc += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * acc;
    }
    total
}

/// Complex-valued variant of [`integrate`].
pub fn integrate_complex<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    panels: usize,
    order: usize,
) -> Complex64 {
    let re = integrate(|x| f(x).re, a, b, panels, order);
    let im = integrate(|x| f(x).im, a, b, panels, order);
    Complex64::new(re, im)
}

/// Fresnel integrals by direct quadrature of cos(πw²/2), sin(πw²/2) on
/// [0, z]. Panels are sized so the phase advances by at most one radian.
pub fn fresnel_quad(z: f64) -> (f64, f64) {
    let a = z.abs();
    if a == 0.0 {
        return (0.0, 0.0);
    }
    let panels = ((a * (1.0 + PI * a)).ceil() as usize).max(4);
    let c = integrate(|w| (0.5 * PI * w * w).cos(), 0.0, a, panels, 20);
    let s = integrate(|w| (0.5 * PI * w * w).sin(), 0.0, a, panels, 20);
    (c.copysign(z), s.copysign(z))
}

/// erf by quadrature of the Gaussian density. Beyond |z| = 7 the complement
/// is below 1e-22 and the value is 1 to double precision.
pub fn erf_quad(z: f64) -> f64 {
    let a = z.abs().min(7.0);
    let panels = ((a / 0.125).ceil() as usize).max(1);
    let v = 2.0 / PI.sqrt() * integrate(|w| (-w * w).exp(), 0.0, a, panels, 20);
    v.copysign(z)
}

/// erf from the all-positive series e^{-z²} Σ 2ⁿ z^{2n+1} / (1·3···(2n+1)).
/// Valid (no cancellation) for |z| up to about 6.
pub fn erf_series(z: f64) -> f64 {
    let a = z.abs();
    let mut term = a;
    let mut sum = a;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * a * a / (2.0 * n + 1.0);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    (2.0 / PI.sqrt() * (-a * a).exp() * sum).copysign(z)
}

/// Heat semigroup applied to `height` on [center - hw, center + hw], by
/// quadrature of the normalized Gaussian kernel over the step.
pub fn heat_step_quad(center: f64, hw: f64, height: f64, sigma: f64, t: f64, x: f64) -> f64 {
    let four_st = 4.0 * sigma * t;
    let norm = 1.0 / (PI * four_st).sqrt();
    let kernel = |y: f64| norm * (-(x - y) * (x - y) / four_st).exp();
    height * integrate(kernel, center - hw, center + hw, 400, 20)
}

/// Weight of a net shift `j` under e^{-2λ} exp(λ S₊) exp(λ S₋), summed
/// directly over pairs (m, n) of forward/backward hop counts with m - n = j.
pub fn shift_weight_direct(rate_time: f64, j: i64) -> f64 {
    let lam = rate_time;
    let mut total = 0.0;
    let n0 = (-j).max(0) as u32;
    for n in n0..400 {
        let m = (n as i64 + j) as u32;
        let mut term = (-2.0 * lam).exp();
        for k in 1..=m {
            term *= lam / k as f64;
        }
        for k in 1..=n {
            term *= lam / k as f64;
        }
        total += term;
        if n > n0 + 10 && term < 1e-20 * total {
            break;
        }
    }
    total
}

/// ψ(x, t) for two rectangles of amplitude `height` centred at ±s with half
/// width b, by direct quadrature of (2πit)^{-1/2} ∫ e^{i(x-y)²/2t} ψ₀(y) dy.
/// Uses at least 40 nodes per oscillation of the integrand.
pub fn psi_quad(s: f64, b: f64, height: f64, t: f64, x: f64) -> Complex64 {
    let prefactor = Complex64::new(0.0, 2.0 * PI * t).sqrt().inv();
    let mut total = Complex64::new(0.0, 0.0);
    for c in [-s, s] {
        let (lo, hi) = (c - b, c + b);
        let max_freq = (lo - x).abs().max((hi - x).abs()) / t;
        let oscillations = (hi - lo) * max_freq / (2.0 * PI);
        let order = 20;
        let panels = ((oscillations * 40.0 / order as f64).ceil() as usize).max(8);
        total += integrate_complex(
            |y| {
                let phase = (x - y) * (x - y) / (2.0 * t);
                Complex64::new(phase.cos(), phase.sin())
            },
            lo,
            hi,
            panels,
            order,
        );
    }
    prefactor * height * total
}

/// Dense trapezoid convolution of sampled values with the normalized heat
/// kernel of variance 2σt. Samples outside the grid are taken as zero.
pub fn gaussian_convolve(values: &[f64], dx: f64, sigma: f64, t: f64) -> Vec<f64> {
    let four_st = 4.0 * sigma * t;
    let norm = dx / (PI * four_st).sqrt();
    let reach = ((four_st.sqrt() * 9.0) / dx).ceil() as usize;
    let n = values.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(reach);
            let hi = (i + reach).min(n - 1);
            let mut acc = 0.0;
            for (j, v) in values.iter().enumerate().take(hi + 1).skip(lo) {
                let d = (i as f64 - j as f64) * dx;
                acc += v * (-d * d / four_st).exp();
            }
            norm * acc
        })
        .collect()
}

/// Trapezoid rule on uniformly spaced samples.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    dx * (inner + 0.5 * (values[0] + values[values.len() - 1]))
}
