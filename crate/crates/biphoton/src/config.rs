//! Run configuration: a TOML file with physical quantities as
//! unit-qualified strings.
//!
//! Lengths are written the way a lab notebook records them — `"405 nm"`,
//! `"2.0 mm"` — and transverse beam sizes must say whether they are a
//! radius or a diameter (`"2.0 mm diameter"`), because that ambiguity is
//! the classic silent factor-of-two error. Diameters are halved on
//! parse; everything internal is a 1/e² field radius in meters.
//!
//! Every section is optional and falls back to defaults; unknown keys
//! are rejected by name so typos fail loudly instead of silently doing
//! nothing.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::analytic::{Normalization, NormalizationScope};
use crate::error::{Error, Result};
use crate::lg::{BeamGeometry, LgIndex, QuadratureConfig};
use crate::setsim::SetExperimentConfig;

/// How parsed output files are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn wants_csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn wants_json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        match text {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            other => Err(Error::Config(format!(
                "unknown output format {other:?}: expected csv, json, or both"
            ))),
        }
    }
}

/// Which reconstruction grid a simulated run reports as its headline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateReport {
    Calibrated,
    Raw,
}

/// Mode-index grid shared by the matrix and simulation commands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridConfig {
    pub l_min: i32,
    pub l_max: i32,
    pub p_signal: u32,
    pub p_idler: u32,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            l_min: -6,
            l_max: 6,
            p_signal: 0,
            p_idler: 0,
        }
    }
}

impl GridConfig {
    pub fn l_range(&self) -> std::ops::RangeInclusive<i32> {
        self.l_min..=self.l_max
    }
}

/// Spiral-spectrum request: explicit γ values plus an optional dense
/// sweep for curves.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumConfig {
    pub l_values: Vec<i32>,
    pub gammas: Vec<f64>,
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub start: f64,
    pub stop: f64,
    pub points: u32,
}

impl SweepConfig {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points.max(2);
        (0..n)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            l_values: (0..=6).collect(),
            gammas: vec![2.03, 3.05],
            sweep: None,
        }
    }
}

/// Cross-engine validation request.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationConfig {
    pub l_max: u32,
    pub p_max: u32,
    pub gammas: Vec<f64>,
    pub tolerance: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            l_max: 6,
            p_max: 2,
            gammas: vec![0.5, 1.0, 2.03, 3.05],
            tolerance: 1e-6,
        }
    }
}

/// Counting-chain settings, converted to a [`SetExperimentConfig`] once
/// the geometry and grid are known.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Defaults to the idler waist when absent.
    pub fiber_waist: Option<f64>,
    pub aperture_radius: Option<f64>,
    pub window_seconds: f64,
    pub n_windows: u32,
    pub n_dark_trials: u32,
    pub peak_rate_hz: f64,
    pub dark_rate_hz: f64,
    pub rng_seed: u64,
    pub report: EstimateReport,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            fiber_waist: None,
            aperture_radius: None,
            window_seconds: 5.0,
            n_windows: 10,
            n_dark_trials: 20,
            peak_rate_hz: 2.0e4,
            dark_rate_hz: 2.0e3,
            rng_seed: 42,
            report: EstimateReport::Calibrated,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: OutputFormat,
    pub metadata: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            format: OutputFormat::Both,
            metadata: true,
        }
    }
}

/// Fully resolved configuration for a run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub geometry: BeamGeometry,
    pub grid: GridConfig,
    pub quadrature: QuadratureConfig,
    pub normalization: Normalization,
    pub normalization_scope: NormalizationScope,
    /// Optional list of signal/idler waists (radii, meters) for a
    /// panel scan at fixed pump.
    pub waist_scan: Option<Vec<f64>>,
    pub spectrum: SpectrumConfig,
    pub validation: ValidationConfig,
    pub experiment: ExperimentConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            geometry: default_geometry(),
            grid: GridConfig::default(),
            quadrature: QuadratureConfig::default(),
            normalization: Normalization::GlobalMax,
            normalization_scope: NormalizationScope::PerMatrix,
            waist_scan: None,
            spectrum: SpectrumConfig::default(),
            validation: ValidationConfig::default(),
            experiment: ExperimentConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

/// A 405 nm → 780 + 842 nm source with a 1 mm pump radius and 0.36 mm
/// collection waists (γ ≈ 2.8) in a 2 mm crystal.
fn default_geometry() -> BeamGeometry {
    BeamGeometry::new(1.0e-3, 0.36e-3, 0.36e-3, 405e-9, 780e-9, 842e-9, 2.0e-3)
        .expect("default geometry is valid")
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|error| {
            Error::Config(format!("cannot read config {}: {error}", path.display()))
        })?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<RunConfig> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|error| Error::Config(error.to_string()))?;
        RunConfig::from_raw(raw)
    }

    /// Seed and projection grids for the simulator, derived from the
    /// mode grid, with experiment settings applied.
    pub fn experiment_config(&self) -> Result<SetExperimentConfig> {
        let mut set = SetExperimentConfig::new(self.geometry.clone());
        set.seed_modes = self
            .grid
            .l_range()
            .map(|l| LgIndex::new(l, self.grid.p_signal))
            .collect();
        set.projection_modes = self
            .grid
            .l_range()
            .map(|l| LgIndex::new(l, self.grid.p_idler))
            .collect();
        set.fiber_waist = self
            .experiment
            .fiber_waist
            .unwrap_or(self.geometry.idler_waist);
        set.aperture_radius = self.experiment.aperture_radius;
        set.window_seconds = self.experiment.window_seconds;
        set.n_windows = self.experiment.n_windows;
        set.n_dark_trials = self.experiment.n_dark_trials;
        set.peak_rate_hz = self.experiment.peak_rate_hz;
        set.dark_rate_hz = self.experiment.dark_rate_hz;
        set.rng_seed = self.experiment.rng_seed;
        set.quadrature = self.quadrature.clone();
        set.validate()?;
        Ok(set)
    }

    fn from_raw(raw: RawConfig) -> Result<RunConfig> {
        let mut config = RunConfig::default();
        if let Some(geometry) = raw.geometry {
            config.geometry = geometry.resolve()?;
        }
        if let Some(grid) = raw.grid {
            let defaults = GridConfig::default();
            config.grid = GridConfig {
                l_min: grid.l_min.unwrap_or(defaults.l_min),
                l_max: grid.l_max.unwrap_or(defaults.l_max),
                p_signal: grid.p_signal.unwrap_or(defaults.p_signal),
                p_idler: grid.p_idler.unwrap_or(defaults.p_idler),
            };
            if config.grid.l_min > config.grid.l_max {
                return Err(Error::Config(format!(
                    "grid: empty l_range (l_min = {} > l_max = {})",
                    config.grid.l_min, config.grid.l_max
                )));
            }
        }
        if let Some(quadrature) = raw.quadrature {
            let defaults = QuadratureConfig::default();
            config.quadrature = QuadratureConfig {
                radial_nodes: quadrature.radial_nodes.unwrap_or(defaults.radial_nodes),
                truncation_radius_factor: quadrature
                    .truncation_radius_factor
                    .unwrap_or(defaults.truncation_radius_factor),
                azimuthal_nodes: quadrature
                    .azimuthal_nodes
                    .unwrap_or(defaults.azimuthal_nodes),
                target_rel_tol: quadrature.target_rel_tol.unwrap_or(defaults.target_rel_tol),
            };
            config
                .quadrature
                .validate()
                .map_err(|error| Error::Config(format!("quadrature: {error}")))?;
        }
        if let Some(normalization) = raw.normalization {
            if let Some(mode) = normalization.mode {
                config.normalization = mode;
            }
            if let Some(scope) = normalization.scope {
                config.normalization_scope = scope;
            }
        }
        if let Some(jsmd) = raw.jsmd {
            if let Some(scan) = jsmd.waist_scan {
                if scan.is_empty() {
                    return Err(Error::Config(
                        "jsmd.waist_scan: list at least one waist or omit the key".into(),
                    ));
                }
                let waists = scan
                    .iter()
                    .map(|text| parse_length(text, "jsmd.waist_scan", LengthKind::Transverse))
                    .collect::<Result<Vec<f64>>>()?;
                config.waist_scan = Some(waists);
            }
        }
        if let Some(spectrum) = raw.spectrum {
            let defaults = SpectrumConfig::default();
            config.spectrum = SpectrumConfig {
                l_values: spectrum.l_values.unwrap_or(defaults.l_values),
                gammas: spectrum.gammas.unwrap_or(defaults.gammas),
                sweep: spectrum.sweep,
            };
            if config.spectrum.l_values.is_empty() {
                return Err(Error::Config("spectrum.l_values: must not be empty".into()));
            }
            for &gamma in &config.spectrum.gammas {
                if !(gamma.is_finite() && gamma > 0.0) {
                    return Err(Error::Config(format!(
                        "spectrum.gammas: entries must be strictly positive, got {gamma}"
                    )));
                }
            }
            if let Some(sweep) = &config.spectrum.sweep {
                if !(sweep.start.is_finite() && sweep.start > 0.0 && sweep.stop > sweep.start) {
                    return Err(Error::Config(format!(
                        "spectrum.sweep: need 0 < start < stop, got start = {}, stop = {}",
                        sweep.start, sweep.stop
                    )));
                }
                if sweep.points < 2 {
                    return Err(Error::Config(
                        "spectrum.sweep.points: at least 2 points are required".into(),
                    ));
                }
            }
        }
        if let Some(validation) = raw.validation {
            let defaults = ValidationConfig::default();
            config.validation = ValidationConfig {
                l_max: validation.l_max.unwrap_or(defaults.l_max),
                p_max: validation.p_max.unwrap_or(defaults.p_max),
                gammas: validation.gammas.unwrap_or(defaults.gammas),
                tolerance: validation.tolerance.unwrap_or(defaults.tolerance),
            };
            if config.validation.gammas.is_empty() {
                return Err(Error::Config("validation.gammas: must not be empty".into()));
            }
            for &gamma in &config.validation.gammas {
                if !(gamma.is_finite() && gamma > 0.0) {
                    return Err(Error::Config(format!(
                        "validation.gammas: entries must be strictly positive, got {gamma}"
                    )));
                }
            }
            if !(config.validation.tolerance.is_finite() && config.validation.tolerance > 0.0) {
                return Err(Error::Config(format!(
                    "validation.tolerance: must be strictly positive, got {}",
                    config.validation.tolerance
                )));
            }
        }
        if let Some(experiment) = raw.experiment {
            let defaults = ExperimentConfig::default();
            config.experiment = ExperimentConfig {
                fiber_waist: experiment
                    .fiber_waist
                    .map(|text| {
                        parse_length(&text, "experiment.fiber_waist", LengthKind::Transverse)
                    })
                    .transpose()?,
                aperture_radius: experiment
                    .aperture_radius
                    .map(|text| {
                        parse_length(&text, "experiment.aperture_radius", LengthKind::Transverse)
                    })
                    .transpose()?,
                window_seconds: experiment.window_seconds.unwrap_or(defaults.window_seconds),
                n_windows: experiment.n_windows.unwrap_or(defaults.n_windows),
                n_dark_trials: experiment.n_dark_trials.unwrap_or(defaults.n_dark_trials),
                peak_rate_hz: experiment.peak_rate_hz.unwrap_or(defaults.peak_rate_hz),
                dark_rate_hz: experiment.dark_rate_hz.unwrap_or(defaults.dark_rate_hz),
                rng_seed: experiment.rng_seed.unwrap_or(defaults.rng_seed),
                report: experiment.report.unwrap_or(defaults.report),
            };
        }
        if let Some(output) = raw.output {
            let defaults = OutputConfig::default();
            config.output = OutputConfig {
                dir: output.dir.map(PathBuf::from).unwrap_or(defaults.dir),
                format: output.format.unwrap_or(defaults.format),
                metadata: output.metadata.unwrap_or(defaults.metadata),
            };
        }
        Ok(config)
    }
}

/// Distinguishes lengths that need a radius/diameter qualifier
/// (transverse beam sizes) from those that must not carry one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LengthKind {
    Transverse,
    Plain,
}

/// Parses `"0.36 mm radius"` / `"2.0 mm diameter"` / `"405 nm"` into
/// meters; diameters are halved. `key` names the offending config key in
/// error messages.
fn parse_length(text: &str, key: &str, kind: LengthKind) -> Result<f64> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let usage = match kind {
        LengthKind::Transverse => "expected \"<value> <unit> radius|diameter\"",
        LengthKind::Plain => "expected \"<value> <unit>\"",
    };
    if tokens.len() < 2 {
        return Err(Error::Config(format!("{key}: {usage}, got {text:?}")));
    }
    let value: f64 = tokens[0]
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {:?} as a number", tokens[0])))?;
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::Config(format!(
            "{key}: length must be strictly positive and finite, got {value}"
        )));
    }
    let scale = match tokens[1] {
        "nm" => 1e-9,
        "um" | "µm" => 1e-6,
        "mm" => 1e-3,
        "cm" => 1e-2,
        "m" => 1.0,
        other => {
            return Err(Error::Config(format!(
                "{key}: unknown unit {other:?} (use nm, um, mm, cm, or m)"
            )))
        }
    };
    let meters = value * scale;
    match (kind, tokens.len()) {
        (LengthKind::Plain, 2) => Ok(meters),
        (LengthKind::Plain, _) => Err(Error::Config(format!(
            "{key}: unexpected {:?} after the unit; {usage}",
            tokens[2..].join(" ")
        ))),
        (LengthKind::Transverse, 3) => match tokens[2] {
            "radius" => Ok(meters),
            "diameter" => Ok(meters / 2.0),
            other => Err(Error::Config(format!(
                "{key}: qualifier must be \"radius\" or \"diameter\", got {other:?}"
            ))),
        },
        (LengthKind::Transverse, _) => Err(Error::Config(format!(
            "{key}: transverse sizes are ambiguous without a qualifier; {usage}, got {text:?}"
        ))),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    geometry: Option<RawGeometry>,
    grid: Option<RawGrid>,
    quadrature: Option<RawQuadrature>,
    normalization: Option<RawNormalization>,
    jsmd: Option<RawJsmd>,
    spectrum: Option<RawSpectrum>,
    validation: Option<RawValidation>,
    experiment: Option<RawExperiment>,
    output: Option<RawOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    pump_waist: Option<String>,
    signal_waist: Option<String>,
    idler_waist: Option<String>,
    pump_wavelength: Option<String>,
    signal_wavelength: Option<String>,
    idler_wavelength: Option<String>,
    crystal_length: Option<String>,
}

impl RawGeometry {
    fn resolve(self) -> Result<BeamGeometry> {
        let defaults = default_geometry();
        let transverse = |text: Option<String>, key: &str, fallback: f64| -> Result<f64> {
            text.map(|t| parse_length(&t, key, LengthKind::Transverse))
                .transpose()
                .map(|parsed| parsed.unwrap_or(fallback))
        };
        let plain = |text: Option<String>, key: &str, fallback: f64| -> Result<f64> {
            text.map(|t| parse_length(&t, key, LengthKind::Plain))
                .transpose()
                .map(|parsed| parsed.unwrap_or(fallback))
        };
        BeamGeometry::new(
            transverse(self.pump_waist, "geometry.pump_waist", defaults.pump_waist)?,
            transverse(
                self.signal_waist,
                "geometry.signal_waist",
                defaults.signal_waist,
            )?,
            transverse(
                self.idler_waist,
                "geometry.idler_waist",
                defaults.idler_waist,
            )?,
            plain(
                self.pump_wavelength,
                "geometry.pump_wavelength",
                defaults.pump_wavelength,
            )?,
            plain(
                self.signal_wavelength,
                "geometry.signal_wavelength",
                defaults.signal_wavelength,
            )?,
            plain(
                self.idler_wavelength,
                "geometry.idler_wavelength",
                defaults.idler_wavelength,
            )?,
            plain(
                self.crystal_length,
                "geometry.crystal_length",
                defaults.crystal_length,
            )?,
        )
        .map_err(|error| Error::Config(format!("geometry: {error}")))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    l_min: Option<i32>,
    l_max: Option<i32>,
    p_signal: Option<u32>,
    p_idler: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    radial_nodes: Option<usize>,
    truncation_radius_factor: Option<f64>,
    azimuthal_nodes: Option<usize>,
    target_rel_tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNormalization {
    mode: Option<Normalization>,
    scope: Option<NormalizationScope>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJsmd {
    waist_scan: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectrum {
    l_values: Option<Vec<i32>>,
    gammas: Option<Vec<f64>>,
    sweep: Option<SweepConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawValidation {
    l_max: Option<u32>,
    p_max: Option<u32>,
    gammas: Option<Vec<f64>>,
    tolerance: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    fiber_waist: Option<String>,
    aperture_radius: Option<String>,
    window_seconds: Option<f64>,
    n_windows: Option<u32>,
    n_dark_trials: Option<u32>,
    peak_rate_hz: Option<f64>,
    dark_rate_hz: Option<f64>,
    rng_seed: Option<u64>,
    report: Option<EstimateReport>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
    format: Option<OutputFormat>,
    metadata: Option<bool>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn parses_lengths_with_units_and_qualifiers() {
        assert_relative_eq!(
            parse_length("2.0 mm diameter", "k", LengthKind::Transverse).unwrap(),
            1.0e-3
        );
        assert_relative_eq!(
            parse_length("0.36 mm radius", "k", LengthKind::Transverse).unwrap(),
            0.36e-3
        );
        assert_relative_eq!(
            parse_length("405 nm", "k", LengthKind::Plain).unwrap(),
            405e-9
        );
        assert_relative_eq!(parse_length("2 cm", "k", LengthKind::Plain).unwrap(), 0.02);
        assert_relative_eq!(
            parse_length("150 um radius", "k", LengthKind::Transverse).unwrap(),
            150e-6
        );
    }

    #[test]
    fn rejects_ambiguous_or_malformed_lengths() {
        // Transverse sizes without radius/diameter are the classic
        // factor-of-two trap; refuse them by name.
        let error = parse_length("2.0 mm", "geometry.pump_waist", LengthKind::Transverse)
            .unwrap_err()
            .to_string();
        assert!(error.contains("geometry.pump_waist"), "{error}");
        assert!(error.contains("radius"), "{error}");
        assert!(parse_length("405 nm radius", "k", LengthKind::Plain).is_err());
        assert!(parse_length("abc mm", "k", LengthKind::Plain).is_err());
        assert!(parse_length("2.0 parsec", "k", LengthKind::Plain).is_err());
        assert!(parse_length("-1 mm", "k", LengthKind::Plain).is_err());
        assert!(parse_length("", "k", LengthKind::Plain).is_err());
    }

    #[test]
    fn empty_document_yields_defaults() {
        let config = RunConfig::from_toml_str("").unwrap();
        assert_eq!(config.grid, GridConfig::default());
        assert_relative_eq!(config.geometry.pump_waist, 1.0e-3);
        assert_eq!(config.output.format, OutputFormat::Both);
        assert!(config.output.metadata);
        assert_eq!(config.experiment.rng_seed, 42);
    }

    #[test]
    fn full_document_round_trips() {
        let text = r#"
            [geometry]
            pump_waist = "2.0 mm diameter"
            signal_waist = "0.72 mm diameter"
            idler_waist = "0.72 mm diameter"
            pump_wavelength = "405 nm"
            signal_wavelength = "780 nm"
            idler_wavelength = "842 nm"
            crystal_length = "2.0 mm"

            [grid]
            l_min = -4
            l_max = 4
            p_signal = 1

            [quadrature]
            radial_nodes = 96

            [normalization]
            mode = "unit-sum"
            scope = "across-scan"

            [jsmd]
            waist_scan = ["0.72 mm diameter", "1.08 mm diameter"]

            [spectrum]
            l_values = [0, 1, 2]
            gammas = [2.03]
            sweep = { start = 0.5, stop = 4.0, points = 8 }

            [validation]
            l_max = 3
            tolerance = 1e-5

            [experiment]
            fiber_waist = "0.36 mm radius"
            aperture_radius = "0.45 mm radius"
            rng_seed = 7
            report = "raw"

            [output]
            dir = "results"
            format = "csv"
            metadata = false
        "#;
        let config = RunConfig::from_toml_str(text).unwrap();
        assert_relative_eq!(config.geometry.pump_waist, 1.0e-3);
        assert_relative_eq!(config.geometry.signal_waist, 0.36e-3);
        assert_eq!(config.grid.l_min, -4);
        assert_eq!(config.grid.p_signal, 1);
        assert_eq!(config.grid.p_idler, 0);
        assert_eq!(config.quadrature.radial_nodes, 96);
        assert_eq!(config.normalization, Normalization::UnitSum);
        assert_eq!(config.normalization_scope, NormalizationScope::AcrossScan);
        let scan = config.waist_scan.as_deref().unwrap();
        assert_eq!(scan.len(), 2);
        assert_relative_eq!(scan[0], 0.36e-3, max_relative = 1e-12);
        assert_relative_eq!(scan[1], 0.54e-3, max_relative = 1e-12);
        assert_eq!(config.spectrum.sweep.unwrap().points, 8);
        assert_eq!(config.validation.l_max, 3);
        assert_eq!(config.validation.p_max, 2);
        assert_relative_eq!(config.experiment.fiber_waist.unwrap(), 0.36e-3);
        assert_relative_eq!(config.experiment.aperture_radius.unwrap(), 0.45e-3);
        assert_eq!(config.experiment.rng_seed, 7);
        assert_eq!(config.experiment.report, EstimateReport::Raw);
        assert_eq!(config.output.dir, PathBuf::from("results"));
        assert_eq!(config.output.format, OutputFormat::Csv);
        assert!(!config.output.metadata);
    }

    #[test]
    fn unknown_keys_are_named() {
        let error = RunConfig::from_toml_str("[grid]\nl_mni = 3\n")
            .unwrap_err()
            .to_string();
        assert!(error.contains("l_mni"), "{error}");
        let error = RunConfig::from_toml_str("[geomtry]\npump_waist = \"1 mm radius\"\n")
            .unwrap_err()
            .to_string();
        assert!(error.contains("geomtry"), "{error}");
    }

    #[test]
    fn empty_l_range_is_rejected_by_name() {
        let error = RunConfig::from_toml_str("[grid]\nl_min = 3\nl_max = -3\n")
            .unwrap_err()
            .to_string();
        assert!(error.contains("l_range"), "{error}");
        assert!(matches!(
            RunConfig::from_toml_str("[grid]\nl_min = 3\nl_max = -3\n").unwrap_err(),
            Error::Config(_)
        ));
    }

    #[test]
    fn experiment_config_derives_grids_and_fiber() {
        let text = "[grid]\nl_min = -2\nl_max = 2\n";
        let config = RunConfig::from_toml_str(text).unwrap();
        let set = config.experiment_config().unwrap();
        assert_eq!(set.seed_modes.len(), 5);
        assert_eq!(set.projection_modes.len(), 5);
        assert_eq!(set.seed_modes[0], LgIndex::new(-2, 0));
        assert_relative_eq!(set.fiber_waist, config.geometry.idler_waist);
        assert_eq!(set.rng_seed, 42);
        assert_eq!(set.aperture_radius, None);
    }

    #[test]
    fn bad_sweep_and_bad_gammas_are_rejected() {
        assert!(RunConfig::from_toml_str(
            "[spectrum]\nsweep = { start = 2.0, stop = 1.0, points = 5 }\n"
        )
        .is_err());
        assert!(RunConfig::from_toml_str("[spectrum]\ngammas = [0.0]\n").is_err());
        assert!(RunConfig::from_toml_str("[validation]\ntolerance = 0.0\n").is_err());
    }
}
