//! Problem definition shared by both models: slit geometry, sample grids,
//! sampled profiles and the nonlocal level parameters.

use std::f64::consts::PI;

use crate::error::{param, Error, Result};

/// How the slit plateau height is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Plateau is a probability density: 4·b·height = 1.
    Density,
    /// Plateau is a wave amplitude: 4·b·height² = 1.
    Amplitude,
}

/// Two rectangles of half width `b` centred at ±`s`, each of plateau value
/// `height`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitPair {
    pub s: f64,
    pub b: f64,
    pub height: f64,
}

impl SlitPair {
    /// Slits with the plateau chosen by `mode` so the total mass is one.
    pub fn normalized(s: f64, b: f64, mode: Normalization) -> Result<Self> {
        Self::validate_geometry(s, b)?;
        let height = match mode {
            Normalization::Density => 1.0 / (4.0 * b),
            Normalization::Amplitude => (1.0 / (4.0 * b)).sqrt(),
        };
        Ok(Self { s, b, height })
    }

    pub fn with_height(s: f64, b: f64, height: f64) -> Result<Self> {
        Self::validate_geometry(s, b)?;
        if !(height > 0.0 && height.is_finite()) {
            return Err(param("height", format!("must be finite and > 0, got {height}")));
        }
        Ok(Self { s, b, height })
    }

    fn validate_geometry(s: f64, b: f64) -> Result<()> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(param("s", format!("must be finite and > 0, got {s}")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(param("b", format!("must be finite and > 0, got {b}")));
        }
        if b >= s {
            return Err(param("b", format!("half width {b} must be smaller than offset {s}")));
        }
        Ok(())
    }

    pub fn centers(&self) -> [f64; 2] {
        [-self.s, self.s]
    }

    /// The initial profile value at `x`, with edges at half height.
    pub fn initial_value(&self, x: f64) -> f64 {
        self.centers()
            .iter()
            .map(|c| {
                let r = (x - c).abs();
                if r < self.b {
                    self.height
                } else if r == self.b {
                    0.5 * self.height
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// Farthest point of either slit from the origin.
    pub fn outer_edge(&self) -> f64 {
        self.s + self.b
    }
}

/// Slits at ±1 with half width 0.1.
pub fn standard_slits(mode: Normalization) -> SlitPair {
    SlitPair::normalized(1.0, 0.1, mode).expect("standard geometry is valid")
}

/// Uniform grid of `n` nodes on [x_min, x_max].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::Grid(format!("bounds must be finite, got [{x_min}, {x_max}]")));
        }
        if x_min >= x_max {
            return Err(Error::Grid(format!("x_min {x_min} must be below x_max {x_max}")));
        }
        if n < 2 {
            return Err(Error::Grid(format!("need at least 2 nodes, got {n}")));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Grid with spacing `dx`; the span must be an integer number of steps.
    pub fn with_spacing(x_min: f64, x_max: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(Error::Grid(format!("spacing must be > 0, got {dx}")));
        }
        let steps = (x_max - x_min) / dx;
        let rounded = steps.round();
        if (steps - rounded).abs() > 1e-6 * rounded.max(1.0) {
            return Err(Error::Grid(format!(
                "span [{x_min}, {x_max}] is not a whole number of steps of {dx}"
            )));
        }
        Self::new(x_min, x_max, rounded as usize + 1)
    }

    /// Symmetric grid [-half_width, half_width] with spacing `dx`.
    pub fn symmetric(half_width: f64, dx: f64) -> Result<Self> {
        Self::with_spacing(-half_width, half_width, dx)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    /// Node `i`, measured from the grid midpoint so that symmetric grids
    /// have exactly mirrored nodes.
    pub fn x(&self, i: usize) -> f64 {
        let mid = 0.5 * (self.x_min + self.x_max);
        let offset = i as f64 - 0.5 * (self.n - 1) as f64;
        mid + offset * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Same node count, bounds multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.x_min * factor, self.x_max * factor, self.n)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }
}

/// Trapezoid rule on uniformly spaced samples.
pub(crate) fn trapezoid(values: &[f64], dx: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            dx * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

/// A real density sampled on a grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    grid: Grid,
    values: Vec<f64>,
    time: f64,
    mass: f64,
}

impl Profile {
    pub fn new(grid: Grid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Grid(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value at node {i}")));
        }
        if !(time >= 0.0) {
            return Err(param("time", format!("must be >= 0, got {time}")));
        }
        let mass = trapezoid(&values, grid.dx());
        Ok(Self {
            grid,
            values,
            time,
            mass,
        })
    }

    /// Samples `f` at every grid node.
    pub fn from_fn(grid: Grid, time: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().into_iter().map(f).collect();
        Self::new(grid, values, time)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Linear interpolation; `None` outside the grid.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        if !self.grid.contains(x) {
            return None;
        }
        let pos = (x - self.grid.x_min) / self.grid.dx();
        let i = (pos.floor() as usize).min(self.grid.len() - 2);
        let frac = pos - i as f64;
        Some(self.values[i] * (1.0 - frac) + self.values[i + 1] * frac)
    }
}

/// Trapezoid-rule mass of a profile.
pub fn mass(p: &Profile) -> f64 {
    trapezoid(p.values(), p.grid().dx())
}

/// One nonlocal level: a symmetric second difference of reach `shift`,
/// scaled by `rate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub shift: f64,
    pub rate: f64,
}

/// Maximum number of nonlocal levels.
pub const MAX_LEVELS: usize = 8;

/// Diffusion coefficient plus nonlocal levels with strictly increasing
/// shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct NladParams {
    alpha: f64,
    levels: Vec<Level>,
}

impl NladParams {
    pub fn new(alpha: f64, levels: Vec<Level>) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(param("alpha", format!("must be finite and > 0, got {alpha}")));
        }
        if levels.is_empty() {
            return Err(param("levels", "at least one level is required"));
        }
        if levels.len() > MAX_LEVELS {
            return Err(param("levels", format!("at most {MAX_LEVELS} levels, got {}", levels.len())));
        }
        for (i, lv) in levels.iter().enumerate() {
            if !(lv.shift > 0.0 && lv.shift.is_finite()) {
                return Err(param("levels", format!("level {i}: shift must be finite and > 0")));
            }
            if !(lv.rate >= 0.0 && lv.rate.is_finite()) {
                return Err(param("levels", format!("level {i}: rate must be finite and >= 0")));
            }
            if i > 0 && lv.shift <= levels[i - 1].shift {
                return Err(param("levels", format!("level {i}: shifts must be strictly increasing")));
            }
        }
        Ok(Self { alpha, levels })
    }

    /// Three-level parameterization scaled to the slit geometry: shifts
    /// s, 3s/(2b), 5s/(2b); rates 1/(8b²) and π/(2b·d²) for the outer levels.
    pub fn for_slits(slits: &SlitPair) -> Self {
        let (s, b) = (slits.s, slits.b);
        let d1 = 3.0 * s / (2.0 * b);
        let d2 = 5.0 * s / (2.0 * b);
        let levels = vec![
            Level {
                shift: s,
                rate: 1.0 / (8.0 * b * b),
            },
            Level {
                shift: d1,
                rate: PI / (2.0 * b * d1 * d1),
            },
            Level {
                shift: d2,
                rate: PI / (2.0 * b * d2 * d2),
            },
        ];
        Self::new(1.0 / PI.powi(3), levels).expect("slit-derived levels are valid")
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn max_shift(&self) -> f64 {
        self.levels.last().map_or(0.0, |l| l.shift)
    }
}

/// α = 1/π³ with levels (1, 12.5), (15, π/45), (25, π/125).
pub fn standard_nlad_params() -> NladParams {
    NladParams::for_slits(&standard_slits(Normalization::Density))
}

/// Coefficient of the second derivative in the free Schrödinger equation.
/// Only the value 1 is supported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeParams {
    pub scale: f64,
}

impl Default for SeParams {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_slit_heights() {
        let d = standard_slits(Normalization::Density);
        assert!((d.height - 2.5).abs() < 1e-15);
        let a = standard_slits(Normalization::Amplitude);
        assert!((a.height - 2.5f64.sqrt()).abs() < 1e-15);
        assert!((a.height - 1.5811388).abs() < 1e-7);
        assert!(a.b < a.s);
        assert!((4.0 * d.b * d.height - 1.0).abs() < 1e-15);
        assert!((4.0 * a.b * a.height * a.height - 1.0).abs() < 1e-15);
    }

    #[test]
    fn slit_validation() {
        assert!(SlitPair::normalized(1.0, -0.1, Normalization::Density).is_err());
        assert!(SlitPair::normalized(1.0, 1.0, Normalization::Density).is_err());
        assert!(SlitPair::normalized(0.0, 0.1, Normalization::Density).is_err());
        assert!(SlitPair::with_height(1.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn standard_params() {
        let p = standard_nlad_params();
        assert!((p.alpha() - 0.0322515).abs() < 1e-7);
        let lv = p.levels();
        assert_eq!(lv.len(), 3);
        assert!((lv[0].shift - 1.0).abs() < 1e-15);
        assert!((lv[0].rate - 12.5).abs() < 1e-12);
        assert!((lv[1].shift - 15.0).abs() < 1e-12);
        assert!((lv[2].shift - 25.0).abs() < 1e-12);
        assert!((lv[1].rate - PI / 45.0).abs() < 1e-15);
        assert!((lv[2].rate - PI / 125.0).abs() < 1e-15);
    }

    #[test]
    fn params_validation() {
        let lv = |shift, rate| Level { shift, rate };
        assert!(NladParams::new(0.0, vec![lv(1.0, 1.0)]).is_err());
        assert!(NladParams::new(1.0, vec![]).is_err());
        assert!(NladParams::new(1.0, vec![lv(2.0, 1.0), lv(1.0, 1.0)]).is_err());
        assert!(NladParams::new(1.0, vec![lv(1.0, -1.0)]).is_err());
        assert!(NladParams::new(1.0, (1..=9).map(|i| lv(i as f64, 0.1)).collect()).is_err());
        assert!(NladParams::new(1.0, vec![lv(1.0, 0.0)]).is_ok());
    }

    #[test]
    fn grid_construction() {
        let g = Grid::symmetric(40.0, 0.01).unwrap();
        assert_eq!(g.len(), 8001);
        assert!((g.dx() - 0.01).abs() < 1e-15);
        for i in 0..g.len() {
            assert_eq!(g.x(i), -g.x(g.len() - 1 - i));
        }
        assert_eq!(g.x(4000), 0.0);
        assert!(Grid::new(1.0, 1.0, 10).is_err());
        assert!(Grid::new(0.0, 1.0, 1).is_err());
        assert!(Grid::with_spacing(0.0, 1.0, 0.3).is_err());
    }

    #[test]
    fn zero_profile_has_zero_mass() {
        let g = Grid::new(-1.0, 1.0, 11).unwrap();
        let p = Profile::new(g, vec![0.0; 11], 0.0).unwrap();
        assert_eq!(mass(&p), 0.0);
        assert_eq!(p.mass(), mass(&p));
    }

    #[test]
    fn initial_density_mass() {
        let slits = standard_slits(Normalization::Density);
        let g = Grid::symmetric(3.0, 0.001).unwrap();
        let p = Profile::from_fn(g, 0.0, |x| slits.initial_value(x)).unwrap();
        assert!((mass(&p) - 1.0).abs() < 1e-6, "{}", mass(&p));
    }

    #[test]
    fn profile_rejects_bad_values() {
        let g = Grid::new(0.0, 1.0, 3).unwrap();
        assert!(Profile::new(g, vec![0.0, f64::NAN, 0.0], 0.0).is_err());
        assert!(Profile::new(g, vec![0.0; 2], 0.0).is_err());
    }

    #[test]
    fn mass_refinement_is_second_order() {
        let exact = 1f64.exp() - 1.0;
        let m = |n| mass(&Profile::from_fn(Grid::new(0.0, 1.0, n).unwrap(), 0.0, f64::exp).unwrap());
        let (coarse, fine) = (m(21), m(41));
        let ratio = (coarse - exact) / (fine - exact);
        assert!((ratio - 4.0).abs() < 0.01, "ratio {ratio}");
        let extrapolated = (4.0 * fine - coarse) / 3.0;
        assert!((extrapolated - exact).abs() < 1e-8);
    }

    #[test]
    fn interpolation_is_linear() {
        let g = Grid::new(0.0, 2.0, 3).unwrap();
        let p = Profile::new(g, vec![0.0, 1.0, 4.0], 0.0).unwrap();
        assert_eq!(p.interpolate(0.5), Some(0.5));
        assert_eq!(p.interpolate(1.5), Some(2.5));
        assert_eq!(p.interpolate(2.0), Some(4.0));
        assert_eq!(p.interpolate(2.1), None);
    }
}
