//! Special functions and kernels shared by both density models.
//!
//! Fresnel integrals for the free propagator, the error function for the
//! heat semigroup acting on step data, and the net-shift weights of the
//! commuting shift-operator exponentials.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{param, Error, Result};

/// Numerical budgets. Every field lies in (0, 1e-2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Truncation budget for series and quadrature tails.
    pub tail_eps: f64,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, tail_eps: f64) -> Result<Self> {
        for (name, v) in [("abs_tol", abs_tol), ("rel_tol", rel_tol), ("tail_eps", tail_eps)] {
            if !(v > 0.0 && v <= 1e-2) {
                return Err(param(name, format!("must lie in (0, 1e-2], got {v}")));
            }
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            tail_eps,
        })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-6,
            rel_tol: 1e-6,
            tail_eps: 1e-12,
        }
    }
}

/// Switch-over point between the power series and the continued fraction.
pub const FRESNEL_SEAM: f64 = 1.6;

/// Fresnel integrals `(C(z), S(z))` with the π/2 normalization:
/// C(z) = ∫₀^z cos(πw²/2) dw, S(z) = ∫₀^z sin(πw²/2) dw.
pub fn fresnel(z: f64) -> Result<(f64, f64)> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("fresnel argument must be finite, got {z}")));
    }
    Ok(fresnel_unchecked(z))
}

pub(crate) fn fresnel_unchecked(z: f64) -> (f64, f64) {
    let a = z.abs();
    let (c, s) = if a <= FRESNEL_SEAM {
        fresnel_series(a)
    } else {
        fresnel_continued_fraction(a)
    };
    (c.copysign(z), s.copysign(z))
}

/// Power series, summed from the common term (πz²/2)^k / k! · z / (2k+1).
/// Even k feed C, odd k feed S, with alternating signs within each.
pub(crate) fn fresnel_series(a: f64) -> (f64, f64) {
    if a == 0.0 {
        return (0.0, 0.0);
    }
    let u = FRAC_PI_2 * a * a;
    let mut c = 0.0;
    let mut s = 0.0;
    let mut pow = 1.0; // u^k / k!
    let mut k = 0usize;
    loop {
        let term = pow * a / (2 * k + 1) as f64;
        match k % 4 {
            0 => c += term,
            1 => s += term,
            2 => c -= term,
            _ => s -= term,
        }
        if term < 1e-17 * a && k > 2 {
            break;
        }
        k += 1;
        pow *= u / k as f64;
    }
    (c, s)
}

/// Auxiliary-function evaluation for a > 0 through the continued fraction
/// of the complementary error function at complex argument:
/// C + iS = (1+i)/2 · [1 - e^{iπa²/2} · H(a)], H from modified Lentz.
pub(crate) fn fresnel_continued_fraction(a: f64) -> (f64, f64) {
    const TINY: f64 = 1e-300;
    // a few ulps; a tighter test can stall on rounding at large a
    const EPS: f64 = 4.0 * f64::EPSILON;
    let pix2 = PI * a * a;
    let mut b = Complex64::new(1.0, -pix2);
    let mut cc = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut n = -1.0;
    for _ in 0..10_000 {
        n += 2.0;
        let an = -n * (n + 1.0);
        b += 4.0;
        d = (an * d + b).inv();
        cc = b + an / cc;
        let del = cc * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < EPS {
            break;
        }
    }
    h *= Complex64::new(a, -a);
    let phase = 0.5 * pix2;
    let rot = Complex64::new(phase.cos(), phase.sin());
    let cs = Complex64::new(0.5, 0.5) * (1.0 - rot * h);
    (cs.re, cs.im)
}

/// The error function.
pub fn erf(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("erf argument must be finite, got {z}")));
    }
    Ok(libm::erf(z))
}

/// Heat semigroup T_σ(t) applied to `height`·1[center-hw, center+hw],
/// evaluated at `x`.
///
/// At t = 0 this is the raw indicator, with value height/2 on the two edges.
pub fn heat_step(center: f64, half_width: f64, height: f64, sigma: f64, t: f64, x: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(param("sigma", format!("must be > 0, got {sigma}")));
    }
    if !(half_width > 0.0) {
        return Err(param("half_width", format!("must be > 0, got {half_width}")));
    }
    if !(height >= 0.0) {
        return Err(param("height", format!("must be >= 0, got {height}")));
    }
    if !(t >= 0.0) {
        return Err(param("t", format!("must be >= 0, got {t}")));
    }
    Ok(smoothed_step(center, half_width, height, 2.0 * (sigma * t).sqrt(), x))
}

/// Step smoothed by a Gaussian with erf length scale `spread` = 2√(σt).
///
/// Uses erfc differences on either flank so the tails keep relative
/// accuracy; the two flank branches mirror each other exactly.
pub(crate) fn smoothed_step(center: f64, hw: f64, height: f64, spread: f64, x: f64) -> f64 {
    let d = x - center;
    if spread == 0.0 {
        let r = d.abs();
        return if r < hw {
            height
        } else if r == hw {
            0.5 * height
        } else {
            0.0
        };
    }
    let hi = (d + hw) / spread;
    let lo = (d - hw) / spread;
    let diff = if lo > 0.0 {
        libm::erfc(lo) - libm::erfc(hi)
    } else if hi < 0.0 {
        libm::erfc(-hi) - libm::erfc(-lo)
    } else {
        libm::erf(hi) - libm::erf(lo)
    };
    (0.5 * height * diff).clamp(0.0, height)
}

/// Default cap on the half width of a shift-weight table.
pub const DEFAULT_MAX_HALF_WIDTH: usize = 10_000;

/// Coefficients of e^{-2βt} exp(tβS₊) exp(tβS₋) grouped by net shift j.
///
/// `weights[j + half_width]` is the weight of a net displacement of j shift
/// units, for j in -J..=J.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftWeights {
    pub half_width: usize,
    pub weights: Vec<f64>,
    pub rate_time: f64,
}

impl ShiftWeights {
    pub fn weight(&self, j: i64) -> f64 {
        if j.unsigned_abs() as usize > self.half_width {
            return 0.0;
        }
        self.weights[(j + self.half_width as i64) as usize]
    }

    /// `(j, w_j)` pairs from -J to J.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let j0 = self.half_width as i64;
        self.weights.iter().enumerate().map(move |(i, &w)| (i as i64 - j0, w))
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Net-shift weights for rate·time `rate_time`, truncated at the smallest J
/// whose omitted two-sided tail is below `tail_eps`.
pub fn shift_weights(rate_time: f64, tail_eps: f64) -> Result<ShiftWeights> {
    shift_weights_capped(rate_time, tail_eps, DEFAULT_MAX_HALF_WIDTH)
}

pub fn shift_weights_capped(rate_time: f64, tail_eps: f64, max_half_width: usize) -> Result<ShiftWeights> {
    if !(rate_time >= 0.0) || !rate_time.is_finite() {
        return Err(param("rate_time", format!("must be finite and >= 0, got {rate_time}")));
    }
    if !(tail_eps > 0.0 && tail_eps < 1e-3) {
        return Err(param("tail_eps", format!("must lie in (0, 1e-3), got {tail_eps}")));
    }
    if rate_time == 0.0 {
        return Ok(ShiftWeights {
            half_width: 0,
            weights: vec![1.0],
            rate_time,
        });
    }
    let cap = max_half_width as f64;
    // The weights spread like a Skellam law with standard deviation √(2βt).
    if 2.0 * rate_time > cap * cap {
        return Err(Error::Resource(format!(
            "rate·time {rate_time} needs a shift table wider than the cap {max_half_width}"
        )));
    }

    // One-sided weights w_0, w_1, ... until the remainder is provably tiny:
    // past j = 2βt consecutive ratios are below 1/2, so the rest of the
    // series is bounded by the last computed term.
    let hard_limit = 4 * max_half_width + 64;
    let mut one_sided = Vec::new();
    loop {
        let j = one_sided.len();
        let w = net_shift_weight(rate_time, j);
        one_sided.push(w);
        if (j as f64) > 2.0 * rate_time && w < 1e-6 * tail_eps {
            break;
        }
        if j > hard_limit {
            return Err(Error::Resource(format!(
                "shift weights for rate·time {rate_time} did not decay within {hard_limit} terms"
            )));
        }
    }

    // two-sided suffix tails, including the bound on what was never computed
    let mut tail = 2.0 * *one_sided.last().unwrap();
    let mut half_width = one_sided.len() - 1;
    for j in (1..one_sided.len()).rev() {
        let with_j = tail + 2.0 * one_sided[j];
        if with_j >= tail_eps {
            break;
        }
        tail = with_j;
        half_width = j - 1;
    }
    if half_width > max_half_width {
        return Err(Error::Resource(format!(
            "rate·time {rate_time} needs half width {half_width} > cap {max_half_width}"
        )));
    }

    let mut weights = Vec::with_capacity(2 * half_width + 1);
    weights.extend(one_sided[1..=half_width].iter().rev());
    weights.extend(&one_sided[..=half_width]);
    Ok(ShiftWeights {
        half_width,
        weights,
        rate_time,
    })
}

/// ln(λ^m / m!) - λ, accurate near the peak m ≈ λ.
///
/// For m ≥ 20 the Stirling form m·ln(λ/m) + (m - λ) - ½ln(2πm) - c(m) keeps
/// the large pieces from cancelling in floating point.
fn log_poisson_mass(lam: f64, m: usize) -> f64 {
    if m < 20 {
        let log_fact: f64 = (2..=m).map(|k| (k as f64).ln()).sum();
        return m as f64 * lam.ln() - log_fact - lam;
    }
    let mf = m as f64;
    let delta = (lam - mf) / mf;
    let inv = 1.0 / mf;
    let inv2 = inv * inv;
    let correction = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    mf * delta.ln_1p() + (mf - lam) - 0.5 * (2.0 * PI * mf).ln() - correction
}

/// e^{-2λ} Σ_{n≥0} λ^{j+2n} / ((j+n)! n!) for j ≥ 0.
///
/// Summed outward from the largest term, located from
/// (j+n+1)(n+1) ≈ λ², whose logarithm is a sum of two Poisson log masses.
fn net_shift_weight(lam: f64, j: usize) -> f64 {
    let jf = j as f64;
    let peak = (((jf * jf + 4.0 * lam * lam).sqrt() - jf) / 2.0).floor().max(0.0) as usize;
    let log_term = |n: usize| log_poisson_mass(lam, j + n) + log_poisson_mass(lam, n);
    let peak_term = log_term(peak).exp();
    if peak_term == 0.0 {
        return 0.0;
    }
    let mut sum = peak_term;
    // upward: T(n+1) = T(n) λ² / ((j+n+1)(n+1))
    let mut term = peak_term;
    let mut n = peak;
    loop {
        term *= lam * lam / ((jf + n as f64 + 1.0) * (n as f64 + 1.0));
        n += 1;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    // downward: T(n-1) = T(n) (j+n) n / λ²
    let mut term = peak_term;
    let mut n = peak;
    while n > 0 {
        term *= (jf + n as f64) * n as f64 / (lam * lam);
        n -= 1;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}
