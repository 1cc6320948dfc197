//! Free Schrödinger evolution of two rectangular amplitude slits.
//!
//! With the coefficient of ∂²/∂x² scaled so the propagator is
//! (2πit)^{-1/2} e^{i(x-y)²/2t}, the integral over each rectangle reduces
//! to Fresnel integrals at w = (y - x)/√(πt).

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::fresnel_unchecked;
use crate::problem::{trapezoid, Grid, Profile, SlitPair};

/// Value of ψ(x, t) at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude {
    pub re: f64,
    pub im: f64,
}

impl Amplitude {
    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// `m0 = ∫|ψ₀|` and `m2 = ∫y²|ψ₀|` for amplitude-normalized slits.
pub fn psi0_moments(slits: &SlitPair) -> (f64, f64) {
    let (s, b, h) = (slits.s, slits.b, slits.height);
    let m0 = 4.0 * b * h;
    let m2 = 2.0 * h / 3.0 * ((s + b).powi(3) - (s - b).powi(3));
    (m0, m2)
}

/// ψ(x, t) for amplitude-normalized slits.
pub fn psi(slits: &SlitPair, t: f64, x: f64) -> Result<Amplitude> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("time must be finite and > 0, got {t}")));
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("position must be finite, got {x}")));
    }
    Ok(psi_unchecked(slits, t, x))
}

fn psi_unchecked(slits: &SlitPair, t: f64, x: f64) -> Amplitude {
    let scale = (PI * t).sqrt();
    let mut c_tot = 0.0;
    let mut s_tot = 0.0;
    for c in slits.centers() {
        let (cu, su) = fresnel_unchecked((c - slits.b - x) / scale);
        let (cv, sv) = fresnel_unchecked((c + slits.b - x) / scale);
        c_tot += cv - cu;
        s_tot += sv - su;
    }
    // (1 - i)/2 · h · (C + iS)
    let half_h = 0.5 * slits.height;
    Amplitude {
        re: half_h * (c_tot + s_tot),
        im: half_h * (s_tot - c_tot),
    }
}

/// ρ(x, t) = |ψ(x, t)|².
pub fn rho(slits: &SlitPair, t: f64, x: f64) -> Result<f64> {
    psi(slits, t, x).map(|a| a.norm_sqr())
}

/// ρ(·, t) sampled on `grid`.
pub fn rho_profile(slits: &SlitPair, t: f64, grid: &Grid) -> Result<Profile> {
    psi(slits, t, 0.0)?;
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| psi_unchecked(slits, t, grid.x(i)).norm_sqr())
        .collect();
    Profile::new(*grid, values, t)
}

/// Far-field estimate of the mass of ρ(·, t) outside [-radius, radius].
///
/// At large |x| the density behaves like |ψ̂₀(x/t)|²/(2πt) whose
/// oscillation-averaged envelope is (Σ jumps²)/k² = 4h²/k².
pub fn tail_mass_estimate(slits: &SlitPair, t: f64, radius: f64) -> f64 {
    4.0 * slits.height * slits.height * t / (PI * radius)
}

/// Mass of ρ(·, t) over a symmetric window wide enough that the far-field
/// tail estimate stays below `tail_budget`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaddedMass {
    pub mass: f64,
    pub radius: f64,
    pub tail_estimate: f64,
    pub nodes: usize,
}

/// ρ is band-limited in x with top angular frequency 2(s+b)/t, so the
/// trapezoid rule at spacing πt/(2(s+b)) is free of aliasing and only the
/// window truncation contributes.
pub fn padded_mass(slits: &SlitPair, t: f64, tail_budget: f64) -> Result<PaddedMass> {
    psi(slits, t, 0.0)?;
    if !(tail_budget > 0.0 && tail_budget < 1.0) {
        return Err(Error::Domain(format!("tail budget must lie in (0, 1), got {tail_budget}")));
    }
    let radius = (4.0 * slits.height * slits.height * t / (PI * tail_budget)).max(4.0 * slits.outer_edge());
    let dx = PI * t / (2.0 * slits.outer_edge());
    let half = (radius / dx).ceil() as usize;
    let nodes = 2 * half + 1;
    let values: Vec<f64> = (0..nodes)
        .into_par_iter()
        .map(|i| {
            let x = (i as f64 - half as f64) * dx;
            psi_unchecked(slits, t, x).norm_sqr()
        })
        .collect();
    let radius = half as f64 * dx;
    Ok(PaddedMass {
        mass: trapezoid(&values, dx),
        radius,
        tail_estimate: tail_mass_estimate(slits, t, radius),
        nodes,
    })
}

/// Both sides of the space-time dilation inequality
/// sup|ρ(x, tT) - ρ(x/t, T)/t| ≤ √2/(π t T²) · m2 · m0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilationReport {
    pub t: f64,
    pub big_t: f64,
    pub lhs_sup: f64,
    pub rhs_bound: f64,
    pub moment1: f64,
    pub moment2: f64,
}

impl DilationReport {
    pub fn holds(&self) -> bool {
        self.lhs_sup <= self.rhs_bound
    }
}

/// Right side of the dilation inequality.
pub fn dilation_bound(slits: &SlitPair, t: f64, big_t: f64) -> f64 {
    let (m0, m2) = psi0_moments(slits);
    2f64.sqrt() / (PI * t * big_t * big_t) * m2 * m0
}

/// Evaluates the dilation inequality for factor `t ≥ 1` and base time `big_t`
/// over the nodes of `grid`.
pub fn dilation_check(slits: &SlitPair, t: f64, big_t: f64, grid: &Grid) -> Result<DilationReport> {
    if !(t >= 1.0 && t.is_finite()) {
        return Err(Error::Domain(format!("dilation factor must be finite and >= 1, got {t}")));
    }
    if !(big_t > 0.0 && big_t.is_finite()) {
        return Err(Error::Domain(format!("base time must be finite and > 0, got {big_t}")));
    }
    let late = t * big_t;
    let lhs_sup = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.x(i);
            let direct = psi_unchecked(slits, late, x).norm_sqr();
            let dilated = psi_unchecked(slits, big_t, x / t).norm_sqr() / t;
            (direct - dilated).abs()
        })
        .reduce(|| 0.0, f64::max);
    let (m0, m2) = psi0_moments(slits);
    Ok(DilationReport {
        t,
        big_t,
        lhs_sup,
        rhs_bound: dilation_bound(slits, t, big_t),
        moment1: m0,
        moment2: m2,
    })
}

/// lim_{t→∞} t·ρ(x, t) = |∫ψ₀|²/(2π).
pub fn asymptotic_limit(slits: &SlitPair) -> f64 {
    let (m0, _) = psi0_moments(slits);
    m0 * m0 / (2.0 * PI)
}
