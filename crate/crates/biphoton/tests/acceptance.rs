//! Acceptance suite: the ten gate checks this crate must pass, one test
//! per criterion, each printing a single `[PASS]`/`[FAIL]` line (run
//! with `--nocapture` to see the lines for passing tests too).

use std::time::Instant;

use biphoton::analytic::{
    amplitude, jsmd_matrix, jsmd_waist_scan, participation_ratio, probability_p0,
    thin_crystal_figure, Normalization, NormalizationScope,
};
use biphoton::lg::{lg_field, mode_overlap, BeamGeometry, LgIndex, QuadratureConfig};
use biphoton::oracle::{overlap_amplitude_numeric, validate_against_analytic, OverlapKernel};
use biphoton::setsim::{estimate_jsmd, stimulated_idler_field, SetExperimentConfig};

fn check(name: &str, pass: bool, details: String) {
    let verdict = if pass { "[PASS]" } else { "[FAIL]" };
    println!("{verdict} {name}: {details}");
    assert!(pass, "{name}: {details}");
}

/// Closed-form grid values at p_s = p_i = 0 and equal waists reduce to
/// the geometric vortex weights to 1e-12, across l in [-10, 10] and five
/// waist ratios, in under a second.
#[test]
fn c01_vortex_weight_reduction() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for gamma in [0.3, 1.0, 2.03, 3.05, 5.0] {
        let geometry = BeamGeometry::with_gammas(gamma, gamma).unwrap();
        let base = amplitude(LgIndex::new(0, 0), LgIndex::new(0, 0), &geometry)
            .unwrap()
            .value;
        for l in -10..=10 {
            let cell = amplitude(LgIndex::new(l, 0), LgIndex::new(-l, 0), &geometry)
                .unwrap()
                .value;
            let normalized = (cell * cell) / (base * base);
            let expected = probability_p0(l, gamma);
            let deviation = (normalized - expected).abs() / expected;
            worst = worst.max(deviation);
        }
    }
    let elapsed = start.elapsed();
    check(
        "closed form reduces to vortex weights",
        worst < 1e-12 && elapsed.as_secs_f64() < 1.0,
        format!(
            "max relative deviation {worst:.2e} (limit 1e-12), elapsed {elapsed:?} (limit 1 s)"
        ),
    );
}

/// The closed form and the overlap-quadrature engine agree to 1e-6 on
/// max-normalized |C|² over l in [-6, 6], p in {0, 1, 2}, four waist
/// ratios, in under a minute of serial work.
#[test]
fn c02_engine_equivalence() {
    let start = Instant::now();
    let report = validate_against_analytic(
        6,
        2,
        &[0.5, 1.0, 2.03, 3.05],
        1e-6,
        &QuadratureConfig::default(),
    );
    let elapsed = start.elapsed();
    check(
        "independent engines agree",
        report.pass && elapsed.as_secs_f64() < 60.0,
        format!(
            "{} cells, max deviation {:.2e} (limit 1e-6), {} cell errors, elapsed {elapsed:?} \
             (limit 60 s)",
            report.cells.len(),
            report.max_deviation,
            report.error_count
        ),
    );
}

/// Every cell violating l_s + l_i = 0 is exactly zero in both engines —
/// not small, zero.
#[test]
fn c03_selection_rule_exact() {
    let geometry = BeamGeometry::with_gammas(2.03, 1.4).unwrap();
    let quadrature = QuadratureConfig::default();
    let mut checked = 0usize;
    let mut exact = true;
    for l_s in -3..=3i32 {
        for l_i in -3..=3i32 {
            if l_s + l_i == 0 {
                continue;
            }
            for (p_s, p_i) in [(0u32, 0u32), (1, 0), (0, 1), (2, 1)] {
                let closed = amplitude(LgIndex::new(l_s, p_s), LgIndex::new(l_i, p_i), &geometry)
                    .unwrap()
                    .value;
                let kernel = OverlapKernel::from_geometry(
                    &geometry,
                    LgIndex::new(l_s, p_s),
                    LgIndex::new(l_i, p_i),
                );
                let numeric = overlap_amplitude_numeric(&kernel, &quadrature).unwrap();
                exact &= closed == 0.0 && numeric.re == 0.0 && numeric.im == 0.0;
                checked += 1;
            }
        }
    }
    check(
        "selection rule is exact in both engines",
        exact,
        format!("{checked} forbidden cells all identically zero"),
    );
}

/// Vortex weights: the frozen l = 1 value at γ = 2.03, pointwise
/// dominance of γ = 3.05 over γ = 2.03, and strict growth in γ for
/// l = 1, 2, 3.
#[test]
fn c04_spectrum_weights_and_monotonicity() {
    let frozen = probability_p0(1, 2.03);
    let frozen_ok = (frozen - 0.79531).abs() <= 1e-5;
    let dominance_ok = (1..=10).all(|l| probability_p0(l, 3.05) >= probability_p0(l, 2.03));
    let gamma_grid: Vec<f64> = (0..=40).map(|i| 0.3 + i as f64 * 0.1).collect();
    let growth_ok = (1..=3).all(|l| {
        gamma_grid
            .windows(2)
            .all(|pair| probability_p0(l, pair[1]) > probability_p0(l, pair[0]))
    });
    check(
        "vortex weights match and widen with focusing",
        frozen_ok && dominance_ok && growth_ok,
        format!(
            "weight(l=1, gamma=2.03) = {frozen:.6} (expected 0.79531 +/- 1e-5); \
             dominance {dominance_ok}, strict growth {growth_ok}"
        ),
    );
}

/// Three 13x13 panels at growing collection waists (0.72, 1.08, 1.35 mm
/// diameters against a 1 mm pump radius): the antidiagonal participation
/// ratio strictly decreases.
#[test]
fn c05_waist_panels_narrow() {
    let template =
        BeamGeometry::new(1.0e-3, 0.36e-3, 0.36e-3, 405e-9, 780e-9, 842e-9, 2.0e-3).unwrap();
    let waists = [0.36e-3, 0.54e-3, 0.675e-3];
    let panels = jsmd_waist_scan(
        -6..=6,
        0,
        0,
        &template,
        &waists,
        Normalization::GlobalMax,
        NormalizationScope::PerMatrix,
    )
    .unwrap();
    let ratios: Vec<f64> = panels
        .iter()
        .map(|panel| {
            let weights: Vec<f64> = panel.antidiagonal().iter().map(|&(_, w)| w).collect();
            participation_ratio(&weights)
        })
        .collect();
    let shapes_ok = panels.iter().all(|panel| panel.size() == 13);
    let decreasing = ratios.windows(2).all(|pair| pair[1] < pair[0]);
    check(
        "distribution narrows as collection waists grow",
        shapes_ok && decreasing,
        format!("participation ratios {ratios:?} strictly decreasing"),
    );
}

/// The mode basis is orthonormal to 1e-8 over l in [-6, 6], p in [0, 3].
#[test]
fn c06_mode_orthonormality() {
    let quadrature = QuadratureConfig::default();
    let waist = 1.0e-3;
    let modes: Vec<LgIndex> = (-6..=6)
        .flat_map(|l| (0..=3).map(move |p| LgIndex::new(l, p)))
        .collect();
    let mut worst = 0.0f64;
    for (rank, &a) in modes.iter().enumerate() {
        let field_a = lg_field(a, waist);
        for &b in &modes[rank..] {
            let field_b = lg_field(b, waist);
            let overlap = mode_overlap(&field_a, &field_b, &quadrature).unwrap();
            let expected = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((overlap.re - expected).abs().max(overlap.im.abs()));
        }
    }
    check(
        "mode basis is orthonormal",
        worst < 1e-8,
        format!(
            "{} modes, worst |<a|b> - delta| = {worst:.2e} (limit 1e-8)",
            modes.len()
        ),
    );
}

/// One hundred seeded simulator runs (dark floor at 10% of peak,
/// expected peak-cell counts 1e5 per window, calibrated, no aperture):
/// at least 95 land within 2% total-variation distance of the closed
/// form, in under 30 s.
#[test]
fn c07_simulator_convergence() {
    let start = Instant::now();
    let gamma = 3.05;
    let geometry = BeamGeometry::with_gammas(gamma, gamma).unwrap();
    let theory = jsmd_matrix(-6..=6, 0, 0, &geometry, Normalization::GlobalMax).unwrap();
    let theory_sum: f64 = theory.values().iter().sum();
    let mut within = 0usize;
    let runs = 100u64;
    let mut worst = 0.0f64;
    for seed in 0..runs {
        let mut config = SetExperimentConfig::new(geometry.clone());
        config.rng_seed = seed;
        assert_eq!(config.dark_rate_hz, config.peak_rate_hz * 0.1);
        assert!(config.peak_rate_hz * config.window_seconds >= 1e5);
        assert!(config.aperture_radius.is_none());
        let estimate = estimate_jsmd(&config).unwrap();
        let estimate_sum: f64 = estimate.calibrated_normalized.iter().sum();
        let mut distance = 0.0;
        for (row, &seed_mode) in estimate.seed_modes.iter().enumerate() {
            for (column, &projection) in estimate.projection_modes.iter().enumerate() {
                let measured =
                    estimate.calibrated_normalized[estimate.index(row, column)] / estimate_sum;
                let reference = theory.value(seed_mode.l, projection.l) / theory_sum;
                distance += (measured - reference).abs();
            }
        }
        distance /= 2.0;
        worst = worst.max(distance);
        if distance < 0.02 {
            within += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        "simulator reconstructs the distribution",
        within >= 95 && elapsed.as_secs_f64() < 30.0,
        format!(
            "{within}/{runs} runs within 2% total variation (worst {worst:.4}), \
             elapsed {elapsed:?} (limit 30 s)"
        ),
    );
}

/// Identical config and seed give byte-identical serialized output, no
/// matter which thread computes it.
#[test]
fn c08_simulator_determinism() {
    let geometry = BeamGeometry::with_gammas(2.03, 2.03).unwrap();
    let make_config = move || {
        let mut config = SetExperimentConfig::new(geometry.clone());
        config.seed_modes = (-3..=3).map(|l| LgIndex::new(l, 0)).collect();
        config.projection_modes = config.seed_modes.clone();
        config
    };
    let first = estimate_jsmd(&make_config()).unwrap();
    let second = estimate_jsmd(&make_config()).unwrap();
    let threaded = std::thread::spawn(move || estimate_jsmd(&make_config()).unwrap())
        .join()
        .unwrap();
    let json_first = biphoton::report::estimate_json(&first);
    let json_second = biphoton::report::estimate_json(&second);
    let json_threaded = biphoton::report::estimate_json(&threaded);
    let csv_first =
        biphoton::report::estimate_csv(&first, biphoton::config::EstimateReport::Calibrated);
    let csv_threaded =
        biphoton::report::estimate_csv(&threaded, biphoton::config::EstimateReport::Calibrated);
    check(
        "simulated output is byte-identical across runs and threads",
        json_first == json_second && json_first == json_threaded && csv_first == csv_threaded,
        format!(
            "{} bytes of JSON and {} bytes of CSV identical",
            json_first.len(),
            csv_first.len()
        ),
    );
}

/// The thin-crystal figure for a 2 mm pump waist radius, 405 nm pump and
/// 2 mm crystal is 70.27, and the command output documents the
/// conflicting ~94.8 figure instead of reconciling it silently.
#[test]
fn c09_thin_crystal_figure_and_note() {
    let geometry =
        BeamGeometry::new(2.0e-3, 0.36e-3, 0.36e-3, 405e-9, 780e-9, 842e-9, 2.0e-3).unwrap();
    let figure = thin_crystal_figure(&geometry);
    let figure_ok = (figure - 70.27).abs() <= 0.01;
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_biphoton"))
        .args([
            "thin-crystal",
            "--config",
            concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/../../configs/thin-crystal-wide-pump.toml"
            ),
        ])
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8_lossy(&output.stdout);
    let note_ok = output.status.success() && stdout.contains("70.27") && stdout.contains("94.8");
    check(
        "thin-crystal figure and documented discrepancy",
        figure_ok && note_ok,
        format!(
            "figure = {figure:.4} (expected 70.27 +/- 0.01); command output notes 94.8: \
            {note_ok}"
        ),
    );
}

/// A hard aperture inside the |l| = 6 idler ring suppresses the high-|l|
/// calibrated estimates well below the closed form while the l = 0 cell
/// stays put within counting error.
#[test]
fn c10_aperture_artifact() {
    let gamma = 3.05;
    let geometry = BeamGeometry::with_gammas(gamma, gamma).unwrap();
    let ring_radius =
        stimulated_idler_field(&geometry, LgIndex::new(6, 0)).waist_hint() * (6.0f64 / 2.0).sqrt();
    let aperture = 0.45e-3;
    assert!(
        aperture < ring_radius,
        "aperture must sit inside the |l| = 6 ring"
    );
    let run = |aperture_radius: Option<f64>| {
        let mut config = SetExperimentConfig::new(geometry.clone());
        config.aperture_radius = aperture_radius;
        estimate_jsmd(&config).unwrap()
    };
    let open = run(None);
    let clipped = run(Some(aperture));
    let cell = |estimate: &biphoton::setsim::EstimatedJsmd, l: i32| {
        let row = estimate.seed_modes.iter().position(|m| m.l == l).unwrap();
        let column = estimate
            .projection_modes
            .iter()
            .position(|m| m.l == -l)
            .unwrap();
        let index = estimate.index(row, column);
        (
            estimate.calibrated_normalized[index],
            estimate.calibrated_standard_errors[index],
        )
    };
    // High-|l| cells fall well below the closed form...
    let high_l_suppressed = [5i32, 6, -5, -6].iter().all(|&l| {
        let (measured, _) = cell(&clipped, l);
        measured < 0.9 * probability_p0(l, gamma)
    });
    // ...and significantly below the aperture-free run.
    let high_l_significant = [6i32, -6].iter().all(|&l| {
        let (with, sigma_with) = cell(&clipped, l);
        let (without, sigma_without) = cell(&open, l);
        without - with > 3.0 * sigma_with.hypot(sigma_without)
    });
    // The l = 0 cell is indistinguishable between the two runs.
    let (l0_with, sigma_with) = cell(&clipped, 0);
    let (l0_without, sigma_without) = cell(&open, 0);
    let l0_ok = (l0_with - l0_without).abs() <= 3.0 * sigma_with.hypot(sigma_without).max(1e-12);
    let (l6_with, _) = cell(&clipped, 6);
    check(
        "unmodeled aperture biases only high-|l| cells",
        high_l_suppressed && high_l_significant && l0_ok,
        format!(
            "|l|=6 cell {l6_with:.4} vs closed form {:.4}; l=0 {l0_with:.4} vs {l0_without:.4} \
             (within error)",
            probability_p0(6, gamma)
        ),
    );
}
