//! Fringe analysis on sampled profiles: extrema, spacing statistics,
//! space-time dilation and profile comparison.

use crate::error::{Error, Result};
use crate::problem::{trapezoid, Grid, Profile};

/// Prominence threshold below which extrema are treated as ripple.
pub const DEFAULT_NOISE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    /// Sub-grid position from the quadratic fit.
    pub x: f64,
    /// Sampled value at the nearest node.
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Min,
    Max,
}

/// Local minima and maxima of a profile inside a window, sorted by x and
/// strictly alternating.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremaReport {
    pub minima: Vec<Extremum>,
    pub maxima: Vec<Extremum>,
    pub window: (f64, f64),
    /// Positions come from a three-point quadratic fit rather than the node.
    pub refined: bool,
}

/// Finds extrema of `p` in `window` from sign changes of the first
/// differences, refines each with a quadratic through its neighbours, and
/// merges away pairs whose value gap is below `noise_floor`.
pub fn find_extrema(p: &Profile, window: (f64, f64), noise_floor: f64) -> Result<ExtremaReport> {
    let grid = p.grid();
    let (lo, hi) = window;
    if !(lo < hi) || !grid.contains(lo) || !grid.contains(hi) {
        return Err(Error::Domain(format!(
            "window [{lo}, {hi}] must be ordered and inside the grid [{}, {}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    if !(noise_floor >= 0.0) {
        return Err(Error::Domain(format!("noise floor must be >= 0, got {noise_floor}")));
    }
    let dx = grid.dx();
    let first = ((lo - grid.x_min()) / dx - 1e-9).ceil().max(0.0) as usize;
    let last = (((hi - grid.x_min()) / dx + 1e-9).floor() as usize).min(grid.len() - 1);
    let v = p.values();

    // (kind, node index) with plateaus resolved to their centre
    let mut raw: Vec<(Kind, usize)> = Vec::new();
    let mut prev_sign = 0i8;
    let mut run_start = first;
    for i in first..last {
        let d = v[i + 1] - v[i];
        let sign = if d > 0.0 {
            1
        } else if d < 0.0 {
            -1
        } else {
            0
        };
        if sign == 0 {
            continue;
        }
        if prev_sign != 0 && sign != prev_sign {
            let centre = (run_start + i) / 2;
            let kind = if prev_sign > 0 { Kind::Max } else { Kind::Min };
            // keep the fit stencil inside the window
            if centre > first && centre < last {
                raw.push((kind, centre));
            }
        }
        // a plateau run begins after the last strict move
        run_start = i + 1;
        prev_sign = sign;
    }

    // boundary-clipped detections can break alternation; keep the more
    // extreme of two neighbours of the same kind
    let mut alternating: Vec<(Kind, usize)> = Vec::with_capacity(raw.len());
    for e in raw {
        match alternating.last_mut() {
            Some(last) if last.0 == e.0 => {
                if more_extreme(e.0, v[e.1], v[last.1]) {
                    *last = e;
                }
            }
            _ => alternating.push(e),
        }
    }
    suppress_ripple(&mut alternating, v, noise_floor);

    let (mut minima, mut maxima) = (Vec::new(), Vec::new());
    for (kind, i) in alternating {
        let e = refine(grid, v, i);
        match kind {
            Kind::Min => minima.push(e),
            Kind::Max => maxima.push(e),
        }
    }
    Ok(ExtremaReport {
        minima,
        maxima,
        window,
        refined: true,
    })
}

fn more_extreme(kind: Kind, a: f64, b: f64) -> bool {
    match kind {
        Kind::Min => a < b,
        Kind::Max => a > b,
    }
}

/// Vertex of the parabola through nodes i-1, i, i+1, clamped to one cell.
/// The value stays the sampled one: near the zeros of a density the fitted
/// vertex can dip below zero.
fn refine(grid: &Grid, v: &[f64], i: usize) -> Extremum {
    let (a, b, c) = (v[i - 1], v[i], v[i + 1]);
    let curvature = a - 2.0 * b + c;
    let delta = if curvature == 0.0 {
        0.0
    } else {
        (0.5 * (a - c) / curvature).clamp(-1.0, 1.0)
    };
    Extremum {
        x: grid.x(i) + delta * grid.dx(),
        value: b,
    }
}

/// Repeatedly removes the adjacent pair with the smallest value gap while
/// that gap is below `floor`. A removed extremum survives by replacing its
/// same-kind neighbour when it is more extreme.
fn suppress_ripple(ext: &mut Vec<(Kind, usize)>, v: &[f64], floor: f64) {
    loop {
        let smallest = ext
            .windows(2)
            .enumerate()
            .map(|(k, w)| (k, (v[w[0].1] - v[w[1].1]).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let Some((k, gap)) = smallest else { break };
        if gap >= floor {
            break;
        }
        let (first, second) = (ext[k], ext[k + 1]);
        if k > 0 && more_extreme(second.0, v[second.1], v[ext[k - 1].1]) {
            ext[k - 1] = second;
        }
        if k + 2 < ext.len() && more_extreme(first.0, v[first.1], v[ext[k + 2].1]) {
            ext[k + 2] = first;
        }
        ext.drain(k..=k + 1);
    }
}

/// Consecutive gaps between minima.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingStats {
    pub gaps: Vec<f64>,
    pub mean: f64,
    /// max |gap - mean|
    pub max_abs_dev: f64,
}

impl SpacingStats {
    /// max |gap - reference|
    pub fn max_dev_from(&self, reference: f64) -> f64 {
        self.gaps.iter().map(|g| (g - reference).abs()).fold(0.0, f64::max)
    }

    pub fn min_gap(&self) -> f64 {
        self.gaps.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn spacing_stats(report: &ExtremaReport) -> Result<SpacingStats> {
    gap_stats(&report.minima.iter().map(|e| e.x).collect::<Vec<_>>())
}

pub(crate) fn gap_stats(positions: &[f64]) -> Result<SpacingStats> {
    if positions.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "spacing statistics need at least 3 minima, found {}",
            positions.len()
        )));
    }
    let gaps: Vec<f64> = positions.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let max_abs_dev = gaps.iter().map(|g| (g - mean).abs()).fold(0.0, f64::max);
    Ok(SpacingStats {
        gaps,
        mean,
        max_abs_dev,
    })
}

/// v(x) = p(x/m)/m on `target`, linearly interpolated.
pub fn dilate(p: &Profile, m: f64, target: &Grid) -> Result<Profile> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::Domain(format!("dilation factor must be finite and > 0, got {m}")));
    }
    let src = p.grid();
    // tolerate round-off at the ends of an exactly rescaled grid
    let slack = 1e-9 * src.dx();
    let values = target
        .points()
        .into_iter()
        .map(|x| {
            let y = (x / m).clamp(src.x_min() - slack, src.x_max() + slack);
            if (x / m - y).abs() > 0.0 {
                return Err(Error::Domain(format!(
                    "x/m = {} lies outside the source grid [{}, {}]",
                    x / m,
                    src.x_min(),
                    src.x_max()
                )));
            }
            let y = y.clamp(src.x_min(), src.x_max());
            Ok(p.interpolate(y).expect("clamped into grid") / m)
        })
        .collect::<Result<Vec<_>>>()?;
    Profile::new(*target, values, p.time())
}

/// sup |a - b| and trapezoid ∫|a - b| over a shared grid.
pub fn compare(a: &Profile, b: &Profile) -> Result<(f64, f64)> {
    if a.grid() != b.grid() {
        return Err(Error::Domain("profiles are sampled on different grids".into()));
    }
    let diff: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).collect();
    let sup = diff.iter().copied().fold(0.0, f64::max);
    Ok((sup, trapezoid(&diff, a.grid().dx())))
}

/// Smallest local-minimum value of each profile inside `window`.
pub fn second_phase_contrast(omega: &Profile, rho: &Profile, window: (f64, f64)) -> Result<(f64, f64)> {
    let lowest = |p: &Profile, name: &str| -> Result<f64> {
        let r = find_extrema(p, window, DEFAULT_NOISE_FLOOR)?;
        r.minima
            .iter()
            .map(|e| e.value)
            .reduce(f64::min)
            .ok_or_else(|| Error::InsufficientData(format!("no local minima of {name} in the window")))
    };
    Ok((lowest(omega, "omega")?, lowest(rho, "rho")?))
}
