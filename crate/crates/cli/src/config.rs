//! Scenario configuration: JSON text with every key optional.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::PathBuf;

use slit_fringe::{Grid, Level, NladParams, Normalization, SlitPair, Tolerance};

use crate::error::{CliError, Result};

/// Times of the standard figure suite, in units of 1/π.
pub const FIGURE_TIMES: [f64; 8] = [0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Se,
    NladFactorized,
    NladSpectral,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Se, Method::NladFactorized, Method::NladSpectral];

    pub fn name(self) -> &'static str {
        match self {
            Method::Se => "se",
            Method::NladFactorized => "nlad_factorized",
            Method::NladSpectral => "nlad_spectral",
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    slits: Option<RawSlits>,
    nlad: Option<RawNlad>,
    times: Option<Vec<f64>>,
    pi_units: Option<bool>,
    grid: Option<RawGrid>,
    methods: Option<Vec<Method>>,
    dilation_factors: Option<Vec<f64>>,
    tolerances: Option<RawTolerances>,
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSlits {
    s: Option<f64>,
    b: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNlad {
    alpha: Option<f64>,
    levels: Option<Vec<RawLevel>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLevel {
    shift: f64,
    rate: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    x_min: f64,
    x_max: f64,
    n: Option<usize>,
    dx: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    abs_tol: Option<f64>,
    rel_tol: Option<f64>,
    tail_eps: Option<f64>,
}

/// A validated scenario with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub s: f64,
    pub b: f64,
    pub nlad: NladParams,
    /// Time labels as written; see [`ScenarioConfig::time`].
    pub times: Vec<f64>,
    pub pi_units: bool,
    /// Base grid; `None` selects the default [-40, 40] with 8001 nodes.
    pub grid: Option<Grid>,
    /// Sorted and free of duplicates.
    pub methods: Vec<Method>,
    pub dilation_factors: Option<Vec<f64>>,
    pub tolerances: Tolerance,
    pub output_dir: PathBuf,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        parse_config(b"{}").expect("defaults are valid")
    }
}

impl ScenarioConfig {
    /// Physical time of entry `i`.
    pub fn time(&self, i: usize) -> f64 {
        to_physical(self.times[i], self.pi_units)
    }

    pub fn se_slits(&self) -> SlitPair {
        SlitPair::normalized(self.s, self.b, Normalization::Amplitude).expect("validated")
    }

    pub fn nlad_slits(&self) -> SlitPair {
        SlitPair::normalized(self.s, self.b, Normalization::Density).expect("validated")
    }

    pub fn has(&self, m: Method) -> bool {
        self.methods.contains(&m)
    }
}

pub(crate) fn to_physical(t: f64, pi_units: bool) -> f64 {
    if pi_units {
        t / PI
    } else {
        t
    }
}

/// Parses and validates a scenario. Omitted keys take the standard values:
/// s = 1, b = 0.1, the slit-derived nonlocal levels, the figure times in
/// units of 1/π and all three methods.
pub fn parse_config(text: &[u8]) -> Result<ScenarioConfig> {
    let raw: RawConfig = serde_json::from_slice(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    validate(raw)
}

fn positive(field: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::invalid(field, format!("must be finite and > 0, got {v}")))
    }
}

fn core_field(prefix: &str, e: slit_fringe::Error) -> CliError {
    match e {
        slit_fringe::Error::Parameter { name, reason } => CliError::invalid(format!("{prefix}.{name}"), reason),
        other => CliError::invalid(prefix, other.to_string()),
    }
}

fn validate(raw: RawConfig) -> Result<ScenarioConfig> {
    let (s, b) = match raw.slits {
        Some(RawSlits { s, b }) => (s.unwrap_or(1.0), b.unwrap_or(0.1)),
        None => (1.0, 0.1),
    };
    let s = positive("slits.s", s)?;
    let b = positive("slits.b", b)?;
    if b >= s {
        return Err(CliError::invalid("slits.b", format!("half width {b} must be smaller than s = {s}")));
    }
    let slits = SlitPair::normalized(s, b, Normalization::Density).map_err(|e| core_field("slits", e))?;

    let standard = NladParams::for_slits(&slits);
    let nlad = match raw.nlad {
        None => standard,
        Some(RawNlad { alpha, levels }) => {
            let alpha = alpha.unwrap_or(standard.alpha());
            let levels = match levels {
                Some(ls) => ls
                    .into_iter()
                    .map(|l| Level {
                        shift: l.shift,
                        rate: l.rate,
                    })
                    .collect(),
                None => standard.levels().to_vec(),
            };
            NladParams::new(alpha, levels).map_err(|e| core_field("nlad", e))?
        }
    };

    let pi_units = raw.pi_units.unwrap_or(true);
    let times = raw.times.unwrap_or_else(|| FIGURE_TIMES.to_vec());
    if times.is_empty() {
        return Err(CliError::invalid("times", "at least one time is required"));
    }
    for (i, &t) in times.iter().enumerate() {
        positive(&format!("times[{i}]"), t)?;
        if i > 0 && t <= times[i - 1] {
            return Err(CliError::invalid("times", "must be strictly increasing"));
        }
    }

    let grid = raw
        .grid
        .map(|g| {
            let built = match (g.n, g.dx) {
                (Some(n), None) => Grid::new(g.x_min, g.x_max, n),
                (None, Some(dx)) => Grid::with_spacing(g.x_min, g.x_max, dx),
                _ => return Err(CliError::invalid("grid", "give exactly one of `n` and `dx`")),
            };
            let grid = built.map_err(|e| CliError::invalid("grid", e.to_string()))?;
            if grid.len() < 3 {
                return Err(CliError::invalid("grid.n", "at least 3 nodes are required"));
            }
            Ok(grid)
        })
        .transpose()?;

    let mut methods = raw.methods.unwrap_or_else(|| Method::ALL.to_vec());
    methods.sort();
    methods.dedup();
    if methods.is_empty() {
        return Err(CliError::invalid("methods", "at least one method is required"));
    }

    if let Some(f) = &raw.dilation_factors {
        if f.len() != times.len() {
            return Err(CliError::invalid(
                "dilation_factors",
                format!("{} factors for {} times", f.len(), times.len()),
            ));
        }
        for (i, &m) in f.iter().enumerate() {
            positive(&format!("dilation_factors[{i}]"), m)?;
        }
    }

    let defaults = Tolerance::default();
    let tolerances = match raw.tolerances {
        None => defaults,
        Some(t) => Tolerance::new(
            t.abs_tol.unwrap_or(defaults.abs_tol),
            t.rel_tol.unwrap_or(defaults.rel_tol),
            t.tail_eps.unwrap_or(defaults.tail_eps),
        )
        .map_err(|e| core_field("tolerances", e))?,
    };
    if tolerances.tail_eps >= 1e-3 {
        return Err(CliError::invalid("tolerances.tail_eps", "must be below 1e-3"));
    }

    Ok(ScenarioConfig {
        s,
        b,
        nlad,
        times,
        pi_units,
        grid,
        methods,
        dilation_factors: raw.dilation_factors,
        tolerances,
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("slit-fringe-out")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_standard_setup() {
        let c = parse_config(b"{}").unwrap();
        assert_eq!((c.s, c.b), (1.0, 0.1));
        assert!((c.nlad.alpha() - 1.0 / PI.powi(3)).abs() < 1e-15);
        let shifts: Vec<f64> = c.nlad.levels().iter().map(|l| l.shift).collect();
        assert_eq!(shifts, vec![1.0, 15.0, 25.0]);
        assert_eq!(c.methods, Method::ALL.to_vec());
        assert_eq!(c.times, FIGURE_TIMES.to_vec());
        assert!(c.pi_units);
        assert!(c.grid.is_none());
    }

    #[test]
    fn pi_units_scale_times() {
        let c = parse_config(br#"{"times": [0.1, 0.25, 0.5, 1.0], "pi_units": true}"#).unwrap();
        assert_eq!(c.time(0), 0.1 / PI);
        assert_eq!(c.time(3), 1.0 / PI);
        let raw = parse_config(br#"{"times": [2.0], "pi_units": false}"#).unwrap();
        assert_eq!(raw.time(0), 2.0);
    }

    #[test]
    fn validation_names_the_field() {
        let e = parse_config(br#"{"slits": {"b": -0.1}}"#).unwrap_err();
        assert!(matches!(&e, CliError::Invalid { field, .. } if field == "slits.b"), "{e}");
        let e = parse_config(br#"{"times": [1.0, 0.5]}"#).unwrap_err();
        assert!(matches!(&e, CliError::Invalid { field, .. } if field == "times"));
        let e = parse_config(br#"{"methods": []}"#).unwrap_err();
        assert!(matches!(&e, CliError::Invalid { field, .. } if field == "methods"));
        let e = parse_config(br#"{"tolerances": {"abs_tol": 0.5}}"#).unwrap_err();
        assert!(matches!(&e, CliError::Invalid { field, .. } if field == "tolerances.abs_tol"), "{e}");
        let e = parse_config(br#"{"nlad": {"levels": [{"shift": 2, "rate": 1}, {"shift": 1, "rate": 1}]}}"#).unwrap_err();
        assert!(matches!(&e, CliError::Invalid { field, .. } if field == "nlad.levels"), "{e}");
        let e = parse_config(br#"{"times": [1.0, 2.0], "dilation_factors": [1.0]}"#).unwrap_err();
        assert!(matches!(&e, CliError::Invalid { field, .. } if field == "dilation_factors"));
        let e = parse_config(br#"{"grid": {"x_min": -1, "x_max": 1, "n": 11, "dx": 0.2}}"#).unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn syntax_errors_report_position() {
        let e = parse_config(b"{\n  \"times\": [1.0,,]\n}").unwrap_err();
        match e {
            CliError::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(parse_config(br#"{"colour": 1}"#), Err(CliError::Parse { .. })));
        assert!(matches!(parse_config(br#"{"slits": {"s": 1, "w": 2}}"#), Err(CliError::Parse { .. })));
    }

    #[test]
    fn methods_deduplicated_and_ordered() {
        let c = parse_config(br#"{"methods": ["nlad_spectral", "se", "se"]}"#).unwrap();
        assert_eq!(c.methods, vec![Method::Se, Method::NladSpectral]);
    }

    #[test]
    fn grid_by_count_or_spacing() {
        let a = parse_config(br#"{"grid": {"x_min": -2, "x_max": 2, "n": 401}}"#).unwrap();
        let b = parse_config(br#"{"grid": {"x_min": -2, "x_max": 2, "dx": 0.01}}"#).unwrap();
        assert_eq!(a.grid, b.grid);
    }
}
