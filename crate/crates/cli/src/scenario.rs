//! Runs a scenario: profiles per time, CSV output and a JSON summary.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use slit_fringe::fringe::{self, compare, dilate, find_extrema, second_phase_contrast, spacing_stats};
use slit_fringe::nlad::{evolve_spectral, padded_grid, FactorizedEvolver};
use slit_fringe::schrodinger::{dilation_check, padded_mass, rho_profile};
use slit_fringe::{Grid, Profile};

use crate::config::{to_physical, Method, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::table::{log10_clipped, write_atomic, Table};

pub const SUMMARY_FILE: &str = "summary.json";
pub const FAILED_FILE: &str = "FAILED";
pub const THREADS_ENV: &str = "SLIT_FRINGE_THREADS";

/// Default base window [-40, 40] at spacing 0.01.
pub fn default_grid() -> Grid {
    Grid::new(-40.0, 40.0, 8001).expect("static grid")
}

/// Failure threshold on mass deviation, in units of `abs_tol`.
const MASS_FAILURE_FACTOR: f64 = 100.0;
/// Most negative density tolerated before a run is marked failed.
const POSITIVITY_FLOOR: f64 = -1e-8;
/// Tail budget of the padded SE mass, in units of `abs_tol`. The node count
/// grows like 1/budget, and a tenth of the failure threshold is enough to
/// tell a real defect from the truncated sinc² tail.
const SE_TAIL_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Serialize)]
pub struct ExtremumOut {
    pub x: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremaOut {
    pub window: (f64, f64),
    pub minima: Vec<ExtremumOut>,
    pub maxima: Vec<ExtremumOut>,
    pub spacing: Option<SpacingOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpacingOut {
    pub gaps: Vec<f64>,
    pub mean: f64,
    pub max_abs_dev: f64,
}

impl ExtremaOut {
    pub fn from_report(r: &fringe::ExtremaReport) -> Self {
        let conv = |v: &[fringe::Extremum]| v.iter().map(|e| ExtremumOut { x: e.x, value: e.value }).collect();
        Self {
            window: r.window,
            minima: conv(&r.minima),
            maxima: conv(&r.maxima),
            spacing: spacing_stats(r).ok().map(|s| SpacingOut {
                gaps: s.gaps,
                mean: s.mean,
                max_abs_dev: s.max_abs_dev,
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodOut {
    pub grid_mass: f64,
    pub padded_mass: f64,
    pub padded_radius: f64,
    pub min_value: f64,
    pub max_value: f64,
    pub extrema: Option<ExtremaOut>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiffOut {
    pub sup: f64,
    pub l1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TimeSummary {
    pub label: f64,
    pub t: f64,
    pub file: String,
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub dilation_factor: Option<f64>,
    pub se: Option<MethodOut>,
    pub nlad_factorized: Option<MethodOut>,
    pub nlad_spectral: Option<MethodOut>,
    pub dual_method_sup_diff: Option<f64>,
    pub se_vs_nlad: Option<DiffOut>,
    pub se_vs_nlad_dilated: Option<DiffOut>,
    /// Smallest local-minimum values (nlad, se) in the central window.
    pub minima_floor: Option<(f64, f64)>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub pi_units: bool,
    pub methods: Vec<&'static str>,
    pub times: Vec<TimeSummary>,
    pub failures: Vec<String>,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Worker pool sized by `SLIT_FRINGE_THREADS`, or the available parallelism.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::invalid(THREADS_ENV, format!("must be a positive integer, got `{v}`")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::invalid(THREADS_ENV, e.to_string()))
}

pub fn profile_file_name(label: f64, pi_units: bool) -> String {
    if pi_units {
        format!("profile_t{label}over_pi.csv")
    } else {
        format!("profile_t{label}.csv")
    }
}

/// Writes one CSV per time plus the summary into `out_dir`. Numeric check
/// failures leave every output in place and add a `FAILED` marker.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunSummary> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let marker = out_dir.join(FAILED_FILE);
    if marker.exists() {
        std::fs::remove_file(&marker).map_err(|e| CliError::io(&marker, e))?;
    }
    let pool = thread_pool()?;
    let entries: Vec<Result<TimeSummary>> =
        pool.install(|| (0..cfg.times.len()).into_par_iter().map(|i| run_time(cfg, i, out_dir)).collect());

    let mut times = Vec::with_capacity(entries.len());
    let mut errors = Vec::new();
    for e in entries {
        match e {
            Ok(s) => times.push(s),
            Err(err) => errors.push(err),
        }
    }
    if let Some(err) = errors.into_iter().next() {
        write_atomic(&marker, format!("{err}\n").as_bytes())?;
        return Err(err);
    }
    let failures: Vec<String> = times.iter().flat_map(|t| t.failures.iter().cloned()).collect();
    let summary = RunSummary {
        pi_units: cfg.pi_units,
        methods: cfg.methods.iter().map(|m| m.name()).collect(),
        times,
        failures,
    };
    let mut json = serde_json::to_vec_pretty(&summary).expect("summary serializes");
    json.push(b'\n');
    write_atomic(&out_dir.join(SUMMARY_FILE), &json)?;
    if !summary.passed() {
        write_atomic(&marker, (summary.failures.join("\n") + "\n").as_bytes())?;
    }
    Ok(summary)
}

/// Window scale for entry `i`: the configured dilation factor, or t·π once
/// the first phase is over.
fn window_scale(cfg: &ScenarioConfig, i: usize) -> f64 {
    match &cfg.dilation_factors {
        Some(f) => f[i],
        None => (cfg.time(i) * PI).max(1.0),
    }
}

fn analysis_window(grid: &Grid, scale: f64) -> Option<(f64, f64)> {
    let lo = (0.2 * scale).max(grid.x_min());
    let hi = (12.2 * scale).min(grid.x_max());
    (lo < hi).then_some((lo, hi))
}

/// [-10m, 10m], the central fringe groups, clipped to the grid.
fn central_window(grid: &Grid, scale: f64) -> (f64, f64) {
    ((-10.0 * scale).max(grid.x_min()), (10.0 * scale).min(grid.x_max()))
}

fn method_stats(p: &Profile, padded: (f64, f64), window: Option<(f64, f64)>) -> Result<MethodOut> {
    let extrema = match window {
        Some(w) => Some(ExtremaOut::from_report(&find_extrema(p, w, fringe::DEFAULT_NOISE_FLOOR)?)),
        None => None,
    };
    Ok(MethodOut {
        grid_mass: p.mass(),
        padded_mass: padded.0,
        padded_radius: padded.1,
        min_value: p.min_value(),
        max_value: p.max_value(),
        extrema,
    })
}

fn run_time(cfg: &ScenarioConfig, i: usize, out_dir: &Path) -> Result<TimeSummary> {
    let t = cfg.time(i);
    let label = cfg.times[i];
    let tol = cfg.tolerances;
    let scale = window_scale(cfg, i);
    let grid = match cfg.grid {
        Some(g) => g,
        None if scale == 1.0 => default_grid(),
        None => default_grid().scaled(scale)?,
    };
    let window = analysis_window(&grid, scale);
    let dilation = cfg.dilation_factors.as_ref().map(|f| f[i]);
    let mut table = Table::new(grid);
    let mut failures = Vec::new();
    let tag = if cfg.pi_units {
        format!("t={label}/pi")
    } else {
        format!("t={label}")
    };
    let mass_limit = MASS_FAILURE_FACTOR * tol.abs_tol;
    let mut check = |name: &str, out: &MethodOut| {
        let dev = (out.padded_mass - 1.0).abs();
        if dev > mass_limit {
            failures.push(format!("{tag}: {name} mass deviates from 1 by {dev:.3e} (limit {mass_limit:.1e})"));
        }
        if out.min_value < POSITIVITY_FLOOR {
            failures.push(format!("{tag}: {name} minimum {:.3e} is below {POSITIVITY_FLOOR:e}", out.min_value));
        }
    };

    let mut rho = None;
    let mut se = None;
    if cfg.has(Method::Se) {
        let slits = cfg.se_slits();
        let p = rho_profile(&slits, t, &grid)?;
        let pm = padded_mass(&slits, t, SE_TAIL_FACTOR * tol.abs_tol)?;
        let out = method_stats(&p, (pm.mass, pm.radius), window)?;
        check("se", &out);
        table.push("rho_se", p.values().to_vec());
        table.push("log10_rho_se", p.values().iter().map(|&v| log10_clipped(v)).collect());
        se = Some(out);
        rho = Some(p);
    }

    let slits = cfg.nlad_slits();
    let nlad_budget = 1e-3 * tol.abs_tol;
    let wants_nlad = cfg.has(Method::NladFactorized) || cfg.has(Method::NladSpectral);
    // the factorized table also sizes the padded mass grids
    let evolver = if wants_nlad {
        Some(FactorizedEvolver::new(&cfg.nlad, &slits, t, &tol)?)
    } else {
        None
    };
    let mut factorized = None;
    let mut fact_out = None;
    let mut spectral = None;
    let mut spec_out = None;
    if let Some(ev) = &evolver {
        let pg = padded_grid(ev, nlad_budget, 0.01)?;
        if cfg.has(Method::NladFactorized) {
            let p = ev.profile(&grid)?;
            let out = method_stats(&p, (ev.profile(&pg)?.mass(), pg.x_max()), window)?;
            check("nlad_factorized", &out);
            fact_out = Some(out);
            factorized = Some(p);
        }
        if cfg.has(Method::NladSpectral) {
            let p = evolve_spectral(&cfg.nlad, &slits, t, &grid, &tol)?;
            let padded = evolve_spectral(&cfg.nlad, &slits, t, &pg, &tol)?.mass();
            let out = method_stats(&p, (padded, pg.x_max()), window)?;
            check("nlad_spectral", &out);
            spec_out = Some(out);
            spectral = Some(p);
        }
    }

    let dual_method_sup_diff = match (&factorized, &spectral) {
        (Some(a), Some(b)) => Some(compare(a, b)?.0),
        _ => None,
    };
    let omega = factorized.or(spectral);
    let mut omega_dilated = None;
    if let (Some(m), Some(ev)) = (dilation, &evolver) {
        let source_grid = grid.scaled(1.0 / m)?;
        let source = if cfg.has(Method::NladFactorized) {
            ev.profile(&source_grid)?
        } else {
            evolve_spectral(&cfg.nlad, &slits, t, &source_grid, &tol)?
        };
        omega_dilated = Some(dilate(&source, m, &grid)?);
    }

    let diff = |a: &Profile, b: &Profile| -> Result<DiffOut> {
        let (sup, l1) = compare(a, b)?;
        Ok(DiffOut { sup, l1 })
    };
    let se_vs_nlad = match (&rho, &omega) {
        (Some(r), Some(w)) => Some(diff(r, w)?),
        _ => None,
    };
    let se_vs_nlad_dilated = match (&rho, &omega_dilated) {
        (Some(r), Some(w)) => Some(diff(r, w)?),
        _ => None,
    };
    let minima_floor = match (&rho, &omega) {
        (Some(r), Some(w)) => second_phase_contrast(w, r, central_window(&grid, scale)).ok(),
        _ => None,
    };

    if let Some(w) = &omega {
        table.push("omega_nlad", w.values().to_vec());
        table.push("log10_omega_nlad", w.values().iter().map(|&v| log10_clipped(v)).collect());
    }
    if let Some(w) = &omega_dilated {
        table.push("omega_nlad_dilated", w.values().to_vec());
    }
    let file = profile_file_name(label, cfg.pi_units);
    table.write(&out_dir.join(&file))?;

    Ok(TimeSummary {
        label,
        t,
        file,
        x_min: grid.x_min(),
        x_max: grid.x_max(),
        n: grid.len(),
        dilation_factor: dilation,
        se,
        nlad_factorized: fact_out,
        nlad_spectral: spec_out,
        dual_method_sup_diff,
        se_vs_nlad,
        se_vs_nlad_dilated,
        minima_floor,
        failures,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundOut {
    pub t: f64,
    pub big_t: f64,
    pub lhs_sup: f64,
    pub rhs_bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub pairs: Vec<BoundOut>,
    pub passed: bool,
}

/// Dilation inequality for each (t, T); T follows the config's `pi_units`.
/// Each check runs on [-40t, 40t] at spacing 0.02t.
pub fn check_bounds(cfg: &ScenarioConfig, pairs: &[(f64, f64)]) -> Result<BoundsReport> {
    let slits = cfg.se_slits();
    let pool = thread_pool()?;
    let pairs = pool.install(|| {
        pairs
            .iter()
            .map(|&(t, big_t)| {
                let grid = Grid::new(-40.0 * t, 40.0 * t, 4001)?;
                let r = dilation_check(&slits, t, to_physical(big_t, cfg.pi_units), &grid)?;
                Ok(BoundOut {
                    t: r.t,
                    big_t: r.big_t,
                    lhs_sup: r.lhs_sup,
                    rhs_bound: r.rhs_bound,
                    holds: r.holds(),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let passed = pairs.iter().all(|p| p.holds);
    Ok(BoundsReport { pairs, passed })
}

/// Output directory: the override when given, else the config's.
pub fn resolve_out_dir(cfg: &ScenarioConfig, over: Option<PathBuf>) -> PathBuf {
    over.unwrap_or_else(|| cfg.output_dir.clone())
}
