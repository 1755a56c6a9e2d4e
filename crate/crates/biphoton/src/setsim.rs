//! Stimulated-emission measurement chain: seed → stimulated idler →
//! phase-mask projection → fiber coupling → Poisson counting → dark
//! subtraction → reconstructed mode distribution.
//!
//! Seeding the idler arm with mode u_s makes the crystal emit a
//! stimulated idler field proportional to E_p · u_s* at the exit face.
//! A phase-only mask (as on a spatial light modulator) then multiplies
//! the field by e^(−i l φ) and a single-mode fiber accepts the Gaussian
//! component of the result, so the detected rate in cell (seed,
//! projection) is proportional to the pair distribution |C|² cell by
//! cell. The simulator reproduces that chain with shot noise and a dark
//! floor, then undoes it the way an experiment would: background
//! subtraction, optional per-cell calibration, max normalization.
//!
//! Everything downstream of the seed is deterministic given the RNG
//! seed: each Poisson window draws from its own counter-derived stream
//! ([`crate::rng`]), so results are identical across runs and thread
//! counts.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lg::{
    gaussian_field, lg_field, mode_overlap, BeamGeometry, LgIndex, QuadratureConfig, ScalarField,
};
use crate::oracle::{overlap_amplitude_numeric, OverlapKernel};
use crate::quad;
use crate::rng;

/// Full description of one simulated run.
#[derive(Debug, Clone)]
pub struct SetExperimentConfig {
    pub geometry: BeamGeometry,
    /// Modes injected into the idler arm, one per grid row.
    pub seed_modes: Vec<LgIndex>,
    /// Mask windings applied before the fiber, one per grid column. Only
    /// the `l` index of a projection is physically realized — a phase
    /// mask cannot select a radial order — so `p` here only labels the
    /// cell and selects the calibration reference.
    pub projection_modes: Vec<LgIndex>,
    /// 1/e² intensity radius of the fiber's accepted Gaussian, meters.
    pub fiber_waist: f64,
    /// Optional hard circular aperture (radius, meters) between crystal
    /// and fiber. Deliberately *not* included in the calibration model,
    /// so its clipping shows up as a distortion of the calibrated grid.
    pub aperture_radius: Option<f64>,
    /// Length of one counting window, seconds.
    pub window_seconds: f64,
    /// Counting windows per cell.
    pub n_windows: u32,
    /// Dark-only windows per cell (shutter closed).
    pub n_dark_trials: u32,
    /// Detected rate assigned to the brightest cell, Hz.
    pub peak_rate_hz: f64,
    /// Seed-independent background rate, Hz.
    pub dark_rate_hz: f64,
    pub rng_seed: u64,
    pub quadrature: QuadratureConfig,
}

impl SetExperimentConfig {
    /// Defaults mirroring a typical run: a 13×13 grid of pure-vortex
    /// modes (l ∈ [−6, 6], p = 0), fiber matched to the idler waist, no
    /// aperture, five-second windows, dark floor at 10 % of peak.
    pub fn new(geometry: BeamGeometry) -> Self {
        let fundamental_row: Vec<LgIndex> = (-6..=6).map(|l| LgIndex::new(l, 0)).collect();
        SetExperimentConfig {
            fiber_waist: geometry.idler_waist,
            geometry,
            seed_modes: fundamental_row.clone(),
            projection_modes: fundamental_row,
            aperture_radius: None,
            window_seconds: 5.0,
            n_windows: 10,
            n_dark_trials: 20,
            peak_rate_hz: 2.0e4,
            dark_rate_hz: 2.0e3,
            rng_seed: 42,
            quadrature: QuadratureConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        if self.seed_modes.is_empty() {
            return Err(Error::invalid(
                "seed_modes",
                "at least one seed mode is required",
            ));
        }
        if self.projection_modes.is_empty() {
            return Err(Error::invalid(
                "projection_modes",
                "at least one projection mode is required",
            ));
        }
        if !(self.fiber_waist.is_finite() && self.fiber_waist > 0.0) {
            return Err(Error::invalid(
                "fiber_waist",
                format!(
                    "must be strictly positive and finite, got {}",
                    self.fiber_waist
                ),
            ));
        }
        if let Some(radius) = self.aperture_radius {
            if !(radius.is_finite() && radius > 0.0) {
                return Err(Error::invalid(
                    "aperture_radius",
                    format!("must be strictly positive and finite, got {radius}"),
                ));
            }
        }
        if !(self.window_seconds.is_finite() && self.window_seconds > 0.0) {
            return Err(Error::invalid(
                "window_seconds",
                format!(
                    "must be strictly positive and finite, got {}",
                    self.window_seconds
                ),
            ));
        }
        if self.n_windows == 0 {
            return Err(Error::invalid(
                "n_windows",
                "at least one counting window is required",
            ));
        }
        if self.n_dark_trials == 0 {
            return Err(Error::invalid(
                "n_dark_trials",
                "at least one dark trial is required",
            ));
        }
        if !(self.peak_rate_hz.is_finite() && self.peak_rate_hz > 0.0) {
            return Err(Error::invalid(
                "peak_rate_hz",
                format!(
                    "must be strictly positive and finite, got {}",
                    self.peak_rate_hz
                ),
            ));
        }
        if !(self.dark_rate_hz.is_finite() && self.dark_rate_hz >= 0.0) {
            return Err(Error::invalid(
                "dark_rate_hz",
                format!("must be non-negative and finite, got {}", self.dark_rate_hz),
            ));
        }
        Ok(())
    }

    /// True when any seed or projection carries p > 0. Such grids run
    /// fine but exercise the chain outside the regime the pure-vortex
    /// reconstruction was validated in, so reports flag them.
    pub fn is_extended(&self) -> bool {
        self.seed_modes
            .iter()
            .chain(&self.projection_modes)
            .any(|mode| mode.p > 0)
    }
}

/// The stimulated idler field for a given seed mode: E_p(ρ) · u_s*(ρ,φ),
/// carrying azimuthal order −l_s and a radial profile that is the
/// product of the normalized pump Gaussian and the seed's LG profile.
pub fn stimulated_idler_field(geometry: &BeamGeometry, seed: LgIndex) -> ScalarField {
    let pump = gaussian_field(geometry.pump_waist);
    let seed_field = lg_field(seed, geometry.signal_waist);
    let wp = geometry.pump_waist;
    let ws = geometry.signal_waist;
    // Gaussian factors multiply into an effective waist; the polynomial
    // factors only widen support mildly, matching the LG hint convention.
    let effective_waist = wp * ws / (wp * wp + ws * ws).sqrt();
    ScalarField::separable(-seed.l, effective_waist, move |rho| {
        pump.amplitude(rho, 0.0) * seed_field.amplitude(rho, 0.0).conj()
    })
}

/// Power fraction of `idler` accepted by a single-mode fiber of waist
/// `fiber_waist` after an e^(−i l φ) mask with l = `projection.l` and an
/// optional hard aperture:
///
///   η = |⟨G_f | A · e^(−i l φ) · E_i⟩|² / ⟨E_i | E_i⟩ ∈ [0, 1].
///
/// The aperture clips the numerator (light lost before the fiber) while
/// the denominator keeps the full emitted power. Only `projection.l`
/// enters — a phase mask has no radial handle, so `projection.p` is
/// ignored here and documented as a cell label in
/// [`SetExperimentConfig::projection_modes`].
pub fn project_and_couple(
    idler: &ScalarField,
    projection: LgIndex,
    fiber_waist: f64,
    aperture_radius: Option<f64>,
    quad: &QuadratureConfig,
) -> Result<f64> {
    if !(fiber_waist.is_finite() && fiber_waist > 0.0) {
        return Err(Error::invalid(
            "fiber_waist",
            format!("must be strictly positive and finite, got {fiber_waist}"),
        ));
    }
    let emitted = mode_overlap(idler, idler, quad)?.re;
    if emitted <= 0.0 {
        return Ok(0.0);
    }
    let fiber = gaussian_field(fiber_waist);
    let full_radius = quad.truncation_radius_factor * fiber_waist.max(idler.waist_hint());
    let clipped_radius = match aperture_radius {
        Some(aperture) => aperture.min(full_radius),
        None => full_radius,
    };
    let amplitude = match idler.azimuthal_order() {
        Some(order) => {
            // Mask winding −l shifts the order to order − l; the fiber's
            // order-0 Gaussian accepts only a net zero winding.
            if order - projection.l != 0 {
                return Ok(0.0);
            }
            let radial = quad::radial_integral(
                |rho| fiber.amplitude(rho, 0.0).conj() * idler.amplitude(rho, 0.0),
                clipped_radius,
                quad.radial_nodes,
                quad.target_rel_tol,
            )?;
            radial * 2.0 * std::f64::consts::PI
        }
        None => {
            let n_phi = quad.azimuthal_nodes;
            let step = 2.0 * std::f64::consts::PI / n_phi as f64;
            let winding = projection.l;
            quad::radial_integral_scaled(
                |rho| {
                    let fiber_amp = fiber.amplitude(rho, 0.0).conj();
                    let mut ring = Complex64::new(0.0, 0.0);
                    let mut magnitude = 0.0;
                    for j in 0..n_phi {
                        let phi = step * j as f64;
                        let mask = Complex64::from_polar(1.0, -(winding as f64) * phi);
                        let term = fiber_amp * mask * idler.amplitude(rho, phi);
                        ring += term;
                        magnitude += term.norm();
                    }
                    (ring * step, magnitude * step)
                },
                clipped_radius,
                quad.radial_nodes,
                quad.target_rel_tol,
            )?
        }
    };
    let coupled = amplitude.norm_sqr() / emitted;
    // Cauchy–Schwarz bounds the true value by 1; quadrature round-off can
    // overshoot by ~1e-15, which the clamp absorbs.
    debug_assert!(
        coupled < 1.0 + 1e-9,
        "coupling {coupled} exceeds unity beyond round-off"
    );
    Ok(coupled.clamp(0.0, 1.0))
}

/// Raw counting record for one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountRecord {
    /// Detector counts per signal window (seed on).
    pub window_counts: Vec<u64>,
    /// Detector counts per dark window (seed blocked).
    pub dark_counts: Vec<u64>,
    /// Mean signal counts minus mean dark counts (may be negative).
    pub background_subtracted_mean: f64,
    /// `background_subtracted_mean` clamped below at zero — the usable
    /// estimate for a non-negative rate.
    pub clamped_estimate: f64,
}

impl CountRecord {
    /// Standard error of the background-subtracted mean, in counts,
    /// from the sample variances of the two window populations.
    pub fn standard_error(&self) -> f64 {
        let var_signal = sample_variance(&self.window_counts);
        let var_dark = sample_variance(&self.dark_counts);
        (var_signal / self.window_counts.len() as f64 + var_dark / self.dark_counts.len() as f64)
            .sqrt()
    }
}

fn sample_variance(counts: &[u64]) -> f64 {
    if counts.len() < 2 {
        return 0.0;
    }
    let mean = counts.iter().sum::<u64>() as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| (c as f64 - mean).powi(2))
        .sum::<f64>()
        / (counts.len() - 1) as f64
}

fn cell_tag(seed: LgIndex, projection: LgIndex) -> [i64; 4] {
    [
        seed.l as i64,
        seed.p as i64,
        projection.l as i64,
        projection.p as i64,
    ]
}

/// Draws the signal and dark windows for one cell and reduces them.
///
/// Each window uses its own tagged stream, so the record depends only on
/// (rng_seed, cell, window index) — never on evaluation order.
pub fn simulate_counts(
    mean_rate_hz: f64,
    config: &SetExperimentConfig,
    tag: [i64; 4],
) -> CountRecord {
    let window_mean = (mean_rate_hz + config.dark_rate_hz) * config.window_seconds;
    let dark_mean = config.dark_rate_hz * config.window_seconds;
    let window_counts: Vec<u64> = (0..config.n_windows)
        .map(|w| {
            let mut stream = rng::stream_rng(
                config.rng_seed,
                &[tag[0], tag[1], tag[2], tag[3], w as i64, 0],
            );
            rng::poisson_draw(window_mean, &mut stream)
        })
        .collect();
    let dark_counts: Vec<u64> = (0..config.n_dark_trials)
        .map(|w| {
            let mut stream = rng::stream_rng(
                config.rng_seed,
                &[tag[0], tag[1], tag[2], tag[3], w as i64, 1],
            );
            rng::poisson_draw(dark_mean, &mut stream)
        })
        .collect();
    let signal_mean = window_counts.iter().sum::<u64>() as f64 / window_counts.len() as f64;
    let dark_mean_est = dark_counts.iter().sum::<u64>() as f64 / dark_counts.len() as f64;
    let background_subtracted_mean = signal_mean - dark_mean_est;
    CountRecord {
        window_counts,
        dark_counts,
        background_subtracted_mean,
        clamped_estimate: background_subtracted_mean.max(0.0),
    }
}

/// A reconstructed mode distribution bundled with everything needed to
/// reproduce it. Grids are row-major over (seed index, projection index).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatedJsmd {
    pub seed_modes: Vec<LgIndex>,
    pub projection_modes: Vec<LgIndex>,
    pub rng_seed: u64,
    /// True when the grid leaves the validated pure-vortex regime.
    pub extended: bool,
    /// Noiseless coupled power per cell (aperture included) — the
    /// quantity the mean rates are proportional to.
    pub coupled_power: Vec<f64>,
    /// Mean detected rate per cell, Hz, before noise.
    pub mean_rates_hz: Vec<f64>,
    /// Per-cell calibration factor κ: coupled power the chain would see
    /// with *no aperture*, divided by the reference |C|² from overlap
    /// quadrature. Dividing a raw estimate by κ undoes every modeled
    /// instrumental factor; an aperture is deliberately left out of the
    /// model, so its clipping survives calibration.
    pub calibration: Vec<f64>,
    pub records: Vec<CountRecord>,
    /// Background-subtracted estimates, max-normalized.
    pub raw_normalized: Vec<f64>,
    /// Estimates divided by κ, then max-normalized — the reconstruction
    /// of the pair distribution itself.
    pub calibrated_normalized: Vec<f64>,
    /// Standard errors scaled exactly like `raw_normalized`.
    pub raw_standard_errors: Vec<f64>,
    /// Standard errors scaled exactly like `calibrated_normalized`.
    pub calibrated_standard_errors: Vec<f64>,
}

impl EstimatedJsmd {
    pub fn seed_count(&self) -> usize {
        self.seed_modes.len()
    }

    pub fn projection_count(&self) -> usize {
        self.projection_modes.len()
    }

    /// Row-major index of cell (seed row, projection column).
    pub fn index(&self, seed_row: usize, projection_column: usize) -> usize {
        assert!(seed_row < self.seed_count() && projection_column < self.projection_count());
        seed_row * self.projection_count() + projection_column
    }
}

fn max_normalize(values: &[f64], companions: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let max = values.iter().cloned().fold(0.0f64, f64::max);
    if max > 0.0 {
        (
            values.iter().map(|v| v / max).collect(),
            companions.iter().map(|v| v / max).collect(),
        )
    } else {
        (values.to_vec(), companions.to_vec())
    }
}

/// Runs the whole chain over the configured grid.
///
/// Per cell: stimulate the idler with the seed, apply the mask, couple
/// into the fiber (aperture included), convert coupled power to a rate
/// with the brightest cell pinned at `peak_rate_hz`, draw Poisson
/// windows, subtract background, calibrate, and normalize.
pub fn estimate_jsmd(config: &SetExperimentConfig) -> Result<EstimatedJsmd> {
    config.validate()?;
    let n_cells = config.seed_modes.len() * config.projection_modes.len();
    let mut coupled_power = vec![0.0; n_cells];
    let mut open_power = vec![0.0; n_cells];
    let mut reference = vec![0.0; n_cells];
    for (row, &seed) in config.seed_modes.iter().enumerate() {
        let idler = stimulated_idler_field(&config.geometry, seed);
        let emitted = mode_overlap(&idler, &idler, &config.quadrature)?.re;
        for (column, &projection) in config.projection_modes.iter().enumerate() {
            let cell = row * config.projection_modes.len() + column;
            let coupled = project_and_couple(
                &idler,
                projection,
                config.fiber_waist,
                config.aperture_radius,
                &config.quadrature,
            )?;
            coupled_power[cell] = coupled * emitted;
            open_power[cell] = if config.aperture_radius.is_some() {
                project_and_couple(
                    &idler,
                    projection,
                    config.fiber_waist,
                    None,
                    &config.quadrature,
                )? * emitted
            } else {
                coupled_power[cell]
            };
            let kernel = OverlapKernel::from_geometry(&config.geometry, seed, projection);
            reference[cell] = overlap_amplitude_numeric(&kernel, &config.quadrature)?.norm_sqr();
        }
    }
    let peak_power = coupled_power.iter().cloned().fold(0.0f64, f64::max);
    let mean_rates_hz: Vec<f64> = coupled_power
        .iter()
        .map(|&power| {
            if peak_power > 0.0 {
                config.peak_rate_hz * power / peak_power
            } else {
                0.0
            }
        })
        .collect();
    let calibration: Vec<f64> = open_power
        .iter()
        .zip(&reference)
        .map(|(&power, &theory)| {
            if power > 0.0 && theory > 0.0 {
                power / theory
            } else {
                1.0
            }
        })
        .collect();
    let mut records = Vec::with_capacity(n_cells);
    let mut raw = Vec::with_capacity(n_cells);
    let mut raw_errors = Vec::with_capacity(n_cells);
    let mut calibrated = Vec::with_capacity(n_cells);
    let mut calibrated_errors = Vec::with_capacity(n_cells);
    for (row, &seed) in config.seed_modes.iter().enumerate() {
        for (column, &projection) in config.projection_modes.iter().enumerate() {
            let cell = row * config.projection_modes.len() + column;
            let record = simulate_counts(mean_rates_hz[cell], config, cell_tag(seed, projection));
            let error = record.standard_error();
            raw.push(record.clamped_estimate);
            raw_errors.push(error);
            calibrated.push(record.clamped_estimate / calibration[cell]);
            calibrated_errors.push(error / calibration[cell]);
            records.push(record);
        }
    }
    let (raw_normalized, raw_standard_errors) = max_normalize(&raw, &raw_errors);
    let (calibrated_normalized, calibrated_standard_errors) =
        max_normalize(&calibrated, &calibrated_errors);
    Ok(EstimatedJsmd {
        seed_modes: config.seed_modes.clone(),
        projection_modes: config.projection_modes.clone(),
        rng_seed: config.rng_seed,
        extended: config.is_extended(),
        coupled_power,
        mean_rates_hz,
        calibration,
        records,
        raw_normalized,
        calibrated_normalized,
        raw_standard_errors,
        calibrated_standard_errors,
    })
}
