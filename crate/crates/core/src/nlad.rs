//! Nonlocal advection-diffusion density for two rectangular slits.
//!
//! The generator is α∂²ₓ plus, per level, β(f(x+d) - 2f(x) + f(x-d)).
//! Two independent evaluators are provided:
//!
//! * [`FactorizedEvolver`] applies the commuting factors directly: each
//!   level's exponential becomes a table of net-shift weights, and the heat
//!   semigroup acts on the shifted steps in closed form.
//! * [`evolve_spectral`] integrates the Fourier multiplier e^{tσ(k)} against
//!   the transform of the initial steps with composite Simpson.

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{param, Error, Result};
use crate::numerics::{shift_weights, smoothed_step, Tolerance};
use crate::problem::{Grid, Level, NladParams, Profile, SlitPair};

/// Erf-scale multiples beyond which a smoothed step edge is dropped;
/// erfc(6.5) ≈ 4e-20.
const EDGE_CUTOFF: f64 = 6.5;

/// How [`apply_difference`] reads ω(x ± d).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftMode {
    /// The shift must be a whole number of grid steps.
    #[default]
    OnGrid,
    /// Linear interpolation between nodes.
    Interpolate,
}

/// Whole number of grid steps in `shift`, or a grid error.
pub fn grid_steps(shift: f64, dx: f64) -> Result<usize> {
    let ratio = shift / dx;
    let m = ratio.round();
    if m < 1.0 || (shift - m * dx).abs() > 1e-12 * shift.max(1.0) {
        return Err(Error::Grid(format!(
            "shift {shift} is not a whole number of grid steps of {dx}"
        )));
    }
    Ok(m as usize)
}

/// `rate·(p(x+shift) - 2p(x) + p(x-shift))` on the grid of `p`.
/// Reads outside the grid are zero.
pub fn apply_difference(shift: f64, rate: f64, p: &Profile, mode: ShiftMode) -> Result<Profile> {
    let v = p.values();
    let n = v.len();
    let values = match mode {
        ShiftMode::OnGrid => {
            let m = grid_steps(shift, p.grid().dx())?;
            let at = |i: isize| -> f64 {
                if i < 0 || i >= n as isize {
                    0.0
                } else {
                    v[i as usize]
                }
            };
            (0..n as isize)
                .map(|i| rate * (at(i + m as isize) - 2.0 * v[i as usize] + at(i - m as isize)))
                .collect()
        }
        ShiftMode::Interpolate => {
            let grid = p.grid();
            (0..n)
                .map(|i| {
                    let x = grid.x(i);
                    let fwd = p.interpolate(x + shift).unwrap_or(0.0);
                    let back = p.interpolate(x - shift).unwrap_or(0.0);
                    rate * (fwd - 2.0 * v[i] + back)
                })
                .collect()
        }
    };
    Profile::new(*p.grid(), values, p.time())
}

/// Sup-norm gap between the integral form of one nonlocal term,
/// ∂ₓ ∫_{-d}^{d} β p(x+u) sign(u) du, and its second-difference form.
///
/// The inner integral uses the trapezoid rule and the outer derivative a
/// central difference, so the gap is O(Δx²). Only nodes whose stencils stay
/// on the grid are compared.
pub fn integral_form_residual(shift: f64, rate: f64, p: &Profile) -> Result<f64> {
    let dx = p.grid().dx();
    let m = grid_steps(shift, dx)?;
    let v = p.values();
    let n = v.len();
    if n < 2 * m + 5 {
        return Err(Error::Grid(format!("grid of {n} nodes too short for shift of {m} steps")));
    }
    let trap = |slice: &[f64]| -> f64 {
        let inner: f64 = slice[1..slice.len() - 1].iter().sum();
        dx * (inner + 0.5 * (slice[0] + slice[slice.len() - 1]))
    };
    // rate · (∫_0^d p(x+u) du - ∫_0^d p(x-u) du) at node j
    let flux = |j: usize| rate * (trap(&v[j..=j + m]) - trap(&v[j - m..=j]));
    let residual = (m + 1..n - m - 1)
        .into_par_iter()
        .map(|i| {
            let integral_form = (flux(i + 1) - flux(i - 1)) / (2.0 * dx);
            let difference_form = rate * (v[i + m] - 2.0 * v[i] + v[i - m]);
            (integral_form - difference_form).abs()
        })
        .reduce(|| 0.0, f64::max);
    Ok(residual)
}

/// Outcome of a generator consistency check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResidual {
    /// sup |(ω(t+dt) - ω(t))/dt - Lω(t)| over interior nodes.
    pub sup: f64,
    /// sup |Lω(t)| over the same nodes, the scale of ∂ₜω.
    pub generator_sup: f64,
}

impl StepResidual {
    pub fn relative(&self) -> f64 {
        if self.generator_sup == 0.0 {
            self.sup
        } else {
            self.sup / self.generator_sup
        }
    }
}

/// Pointwise residual of the forward difference quotient against the
/// discretized generator, on nodes where every stencil stays on the grid.
pub fn generator_residual_values(params: &NladParams, before: &Profile, after: &Profile) -> Result<Vec<(f64, f64)>> {
    if before.grid() != after.grid() {
        return Err(Error::Grid("profiles are on different grids".into()));
    }
    let dt = after.time() - before.time();
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("later profile must be ahead in time, dt = {dt}")));
    }
    let dx = before.grid().dx();
    let steps: Vec<(usize, f64)> = params
        .levels()
        .iter()
        .map(|lv| grid_steps(lv.shift, dx).map(|m| (m, lv.rate)))
        .collect::<Result<_>>()?;
    let reach = steps.iter().map(|(m, _)| *m).max().unwrap_or(0).max(1);
    let (w, w1) = (before.values(), after.values());
    let n = w.len();
    if n <= 2 * reach {
        return Err(Error::Grid(format!("grid of {n} nodes has no interior for reach {reach}")));
    }
    let alpha = params.alpha();
    Ok((reach..n - reach)
        .map(|i| {
            let mut gen = alpha * (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (dx * dx);
            for &(m, rate) in &steps {
                gen += rate * (w[i + m] - 2.0 * w[i] + w[i - m]);
            }
            ((w1[i] - w[i]) / dt - gen, gen)
        })
        .collect())
}

pub fn generator_residual(params: &NladParams, before: &Profile, after: &Profile) -> Result<StepResidual> {
    let pairs = generator_residual_values(params, before, after)?;
    let (sup, generator_sup) = pairs
        .iter()
        .fold((0.0f64, 0.0f64), |(a, b), (r, g)| (a.max(r.abs()), b.max(g.abs())));
    Ok(StepResidual { sup, generator_sup })
}

/// Advances `p` by `dt` with the factorized evaluator and measures the
/// generator residual.
pub fn euler_step_residual(
    params: &NladParams,
    slits: &SlitPair,
    p: &Profile,
    dt: f64,
    tol: &Tolerance,
) -> Result<StepResidual> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("dt must be > 0, got {dt}")));
    }
    let after = evolve_factorized(params, slits, p.time() + dt, p.grid(), tol)?;
    generator_residual(params, p, &after)
}

/// Closed-form evaluator T_α(t) ∏ exp(tBᵢ) ω₀.
///
/// The product of the level exponentials is flattened into a sorted table of
/// total offsets and weights; coinciding offsets are merged.
#[derive(Debug, Clone)]
pub struct FactorizedEvolver {
    slits: SlitPair,
    time: f64,
    spread: f64,
    offsets: Vec<f64>,
    weights: Vec<f64>,
}

impl FactorizedEvolver {
    pub fn new(params: &NladParams, slits: &SlitPair, t: f64, tol: &Tolerance) -> Result<Self> {
        let order: Vec<usize> = (0..params.levels().len()).collect();
        Self::with_level_order(params, slits, t, tol, &order)
    }

    /// Builds the offset table applying the levels in `order`.
    pub fn with_level_order(
        params: &NladParams,
        slits: &SlitPair,
        t: f64,
        tol: &Tolerance,
        order: &[usize],
    ) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
        }
        let mut seen = vec![false; params.levels().len()];
        for &i in order {
            if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
                return Err(param("order", "must be a permutation of the level indices"));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(param("order", "must be a permutation of the level indices"));
        }

        let mut table: Vec<(f64, f64)> = vec![(0.0, 1.0)];
        for &i in order {
            let Level { shift, rate } = params.levels()[i];
            let w = shift_weights(rate * t, tol.tail_eps)?;
            let mut next = Vec::with_capacity(table.len() * w.weights.len());
            for &(o, wo) in &table {
                for (j, wj) in w.iter() {
                    if wj > 0.0 {
                        next.push((o + j as f64 * shift, wo * wj));
                    }
                }
            }
            table = next;
        }
        table.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut offsets: Vec<f64> = Vec::with_capacity(table.len());
        let mut weights: Vec<f64> = Vec::with_capacity(table.len());
        for (o, w) in table {
            match offsets.last() {
                Some(&last) if last == o => *weights.last_mut().unwrap() += w,
                _ => {
                    offsets.push(o);
                    weights.push(w);
                }
            }
        }
        Ok(Self {
            slits: *slits,
            time: t,
            spread: 2.0 * (params.alpha() * t).sqrt(),
            offsets,
            weights,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Total weight retained after truncating every level's series.
    pub fn retained_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// ω(x, t).
    pub fn value(&self, x: f64) -> f64 {
        let SlitPair { b, height, .. } = self.slits;
        let reach = b + EDGE_CUTOFF * self.spread;
        let mut acc = 0.0;
        for c in self.slits.centers() {
            // terms with |x + o - c| <= reach
            let lo = self.offsets.partition_point(|&o| o < c - x - reach);
            let hi = self.offsets.partition_point(|&o| o <= c - x + reach);
            for k in lo..hi {
                acc += self.weights[k] * smoothed_step(c, b, height, self.spread, x + self.offsets[k]);
            }
        }
        acc
    }

    pub fn profile(&self, grid: &Grid) -> Result<Profile> {
        let values: Vec<f64> = (0..grid.len()).into_par_iter().map(|i| self.value(grid.x(i))).collect();
        Profile::new(*grid, values, self.time)
    }

    /// Half width of a symmetric window holding all but `budget` of the mass.
    pub fn mass_radius(&self, budget: f64) -> f64 {
        let mut by_reach: Vec<(f64, f64)> = self.offsets.iter().map(|o| o.abs()).zip(self.weights.iter().copied()).collect();
        by_reach.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut outside = 0.0;
        let mut needed = 0.0;
        for (r, w) in by_reach {
            if outside + w > 0.5 * budget {
                needed = r;
                break;
            }
            outside += w;
        }
        // erfc(6) ≈ 2e-17 for the smoothed edges
        needed + self.slits.outer_edge() + 6.0 * self.spread
    }
}

/// ω(·, t) on `grid` through the factorized semigroup.
pub fn evolve_factorized(
    params: &NladParams,
    slits: &SlitPair,
    t: f64,
    grid: &Grid,
    tol: &Tolerance,
) -> Result<Profile> {
    FactorizedEvolver::new(params, slits, t, tol)?.profile(grid)
}

/// Symbol of the generator: -αk² - Σ 2βᵢ(1 - cos(k dᵢ)).
pub fn symbol(params: &NladParams, k: f64) -> f64 {
    let mut s = -params.alpha() * k * k;
    for lv in params.levels() {
        s -= 2.0 * lv.rate * (1.0 - (k * lv.shift).cos());
    }
    s
}

/// Fourier transform of the initial steps: 2h·(2 sin(kb)/k)·cos(ks).
pub fn initial_transform(slits: &SlitPair, k: f64) -> f64 {
    let kb = k * slits.b;
    let box_ft = if kb.abs() < 1e-8 {
        2.0 * slits.b
    } else {
        2.0 * kb.sin() / k
    };
    2.0 * slits.height * box_ft * (k * slits.s).cos()
}

/// Multiplier and initial transform tabulated on the Simpson nodes
/// k = 0, dk, ..., k_max.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierTable {
    pub k_max: f64,
    pub dk: f64,
    pub symbol_values: Vec<f64>,
    pub transform_values: Vec<f64>,
}

impl MultiplierTable {
    /// `x_reach` is the largest |x| that will be evaluated.
    ///
    /// k_max is where the diffusion factor e^{-αtk²} drops below tail_eps.
    /// dk gives ten nodes per period of cos(kx) for the larger of `x_reach`
    /// and the widest shift, and keeps the periodic images of the
    /// solution that Simpson's two interleaved trapezoid rules see
    /// (period π/dk) clear of its support.
    pub fn build(params: &NladParams, slits: &SlitPair, t: f64, x_reach: f64, tol: &Tolerance) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!(
                "spectral evaluation needs finite t > 0, got {t}; use the factorized path at t = 0"
            )));
        }
        let log_eps = -tol.tail_eps.ln();
        let k_max = (log_eps / (params.alpha() * t)).sqrt();
        let widest = x_reach.abs().max(params.max_shift());
        let support = support_radius(params, slits, t, tol.tail_eps);
        let dk_target = (2.0 * PI / (10.0 * widest)).min(PI / (x_reach.abs() + support));
        let mut intervals = (k_max / dk_target).ceil() as usize;
        if intervals % 2 == 1 {
            intervals += 1;
        }
        let intervals = intervals.max(2);
        if intervals > 50_000_000 {
            return Err(Error::Resource(format!("{intervals} Simpson intervals exceed the table cap")));
        }
        let dk = k_max / intervals as f64;
        let (symbol_values, transform_values) = (0..=intervals)
            .map(|i| {
                let k = i as f64 * dk;
                (symbol(params, k), initial_transform(slits, k))
            })
            .unzip();
        Ok(Self {
            k_max,
            dk,
            symbol_values,
            transform_values,
        })
    }

    /// Simpson-weighted integrand coefficients g_k with ω(x) = Σ g_k cos(kx).
    fn coefficients(&self, t: f64) -> Vec<f64> {
        let last = self.symbol_values.len() - 1;
        let scale = self.dk / (3.0 * PI);
        self.symbol_values
            .iter()
            .zip(&self.transform_values)
            .enumerate()
            .map(|(i, (sig, hat))| {
                let simpson = if i == 0 || i == last {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                simpson * scale * (t * sig).exp() * hat
            })
            .collect()
    }
}

/// Radius outside of which the solution carries less than ~tail_eps of
/// mass, from Poisson bounds on the number of hops per level.
fn support_radius(params: &NladParams, slits: &SlitPair, t: f64, tail_eps: f64) -> f64 {
    let mut radius = slits.outer_edge() + 10.0 * (params.alpha() * t).sqrt();
    for lv in params.levels() {
        // hops in either direction arrive at total rate 2β
        let mean = 2.0 * lv.rate * t;
        let mut pmf = (-mean).exp();
        let mut cdf = pmf;
        let mut n = 0usize;
        while 1.0 - cdf > tail_eps && n < 100_000 {
            n += 1;
            pmf *= mean / n as f64;
            cdf += pmf;
            if pmf == 0.0 && (n as f64) > mean {
                break;
            }
        }
        radius += n as f64 * lv.shift;
    }
    radius
}

/// Rotation re-anchoring interval for the cosine recurrence.
const ANCHOR: usize = 64;

fn cosine_sum(coeffs: &[f64], dk: f64, x: f64) -> f64 {
    let (s1, c1) = (dk * x).sin_cos();
    let mut acc = 0.0;
    for (block, chunk) in coeffs.chunks(ANCHOR).enumerate() {
        let (mut sn, mut cn) = ((block * ANCHOR) as f64 * dk * x).sin_cos();
        for g in chunk {
            acc += g * cn;
            let next_c = cn * c1 - sn * s1;
            sn = sn * c1 + cn * s1;
            cn = next_c;
        }
    }
    acc
}

/// ω(·, t) on `grid` through the Fourier multiplier.
pub fn evolve_spectral(
    params: &NladParams,
    slits: &SlitPair,
    t: f64,
    grid: &Grid,
    tol: &Tolerance,
) -> Result<Profile> {
    let reach = grid.x_min().abs().max(grid.x_max().abs());
    let table = MultiplierTable::build(params, slits, t, reach, tol)?;
    let coeffs = table.coefficients(t);
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| cosine_sum(&coeffs, table.dk, grid.x(i)))
        .collect();
    Profile::new(*grid, values, t)
}

/// Symmetric grid holding all but `budget` of the factorized solution's
/// mass, with spacing fine enough to resolve the smoothed edges.
pub fn padded_grid(evolver: &FactorizedEvolver, budget: f64, max_dx: f64) -> Result<Grid> {
    let radius = evolver.mass_radius(budget);
    let dx = if evolver.spread > 0.0 {
        (evolver.spread / 4.0).min(max_dx)
    } else {
        max_dx
    };
    let half = (radius / dx).ceil();
    Grid::new(-half * dx, half * dx, 2 * half as usize + 1)
}
