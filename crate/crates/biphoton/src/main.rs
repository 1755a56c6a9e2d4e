//! Command-line front end. All computation lives in the library; this
//! binary only parses flags, loads the config, calls the matching
//! library entry point, and writes the files.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration or argument
//! error, 3 numerical failure (non-converged quadrature or a series
//! pole), 4 cross-engine validation exceeded its tolerance.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use biphoton::analytic::{
    jsmd_matrix, jsmd_waist_scan, participation_ratio, spectrum_vs_gamma, thin_crystal_report,
    THIN_CRYSTAL_THRESHOLD,
};
use biphoton::config::{OutputFormat, RunConfig};
use biphoton::oracle::validate_against_analytic;
use biphoton::report::{
    self, estimate_csv, estimate_json, jsmd_csv, jsmd_json, spectrum_csv, spectrum_json,
    validation_csv, validation_json, RunMetadata,
};
use biphoton::setsim::estimate_jsmd;
use biphoton::Error;

#[derive(Parser)]
#[command(
    name = "biphoton",
    version,
    about = "Joint spatial mode distributions of down-converted photon pairs: \
             closed form, overlap quadrature, and a simulated stimulated-emission \
             measurement chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for output files (overrides the config).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Output format: csv, json, or both (overrides the config).
    #[arg(long, global = true, value_name = "FMT")]
    format: Option<String>,
    /// RNG seed override for simulated runs.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Skip the run_metadata.json sidecar (the only file with a
    /// timestamp).
    #[arg(long, global = true)]
    no_metadata: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form mode distribution over the configured (l_s, l_i) grid,
    /// or one panel per waist when a waist scan is configured.
    Jsmd,
    /// Pair probabilities of the (l, −l, p = 0) cells versus the
    /// pump-to-collection waist ratio.
    Spectrum,
    /// Compare the closed form against overlap quadrature cell by cell.
    Validate,
    /// Simulate the stimulated-emission measurement chain and reconstruct
    /// the mode distribution from noisy counts.
    Simulate,
    /// Check how well the geometry satisfies the thin-crystal criterion.
    ThinCrystal,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(match error {
                Error::Config(_) | Error::Invalid { .. } => 2u8,
                Error::QuadratureNotConverged { .. } | Error::PoleInC { .. } => 3u8,
                Error::Io { .. } => 1u8,
            })
        }
    }
}

fn run(cli: &Cli) -> biphoton::Result<ExitCode> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        config.output.dir = out.clone();
    }
    if let Some(format) = &cli.format {
        config.output.format = format.parse::<OutputFormat>()?;
    }
    if let Some(seed) = cli.seed {
        config.experiment.rng_seed = seed;
    }
    if cli.no_metadata {
        config.output.metadata = false;
    }
    match cli.command {
        Command::Jsmd => cmd_jsmd(cli, &config),
        Command::Spectrum => cmd_spectrum(cli, &config),
        Command::Validate => cmd_validate(cli, &config),
        Command::Simulate => cmd_simulate(cli, &config),
        Command::ThinCrystal => cmd_thin_crystal(&config),
    }
}

struct Sink<'a> {
    dir: &'a Path,
    format: OutputFormat,
    written: Vec<String>,
}

impl<'a> Sink<'a> {
    fn new(config: &'a RunConfig) -> Self {
        Sink {
            dir: &config.output.dir,
            format: config.output.format,
            written: Vec::new(),
        }
    }

    fn emit(
        &mut self,
        stem: &str,
        csv: impl FnOnce() -> String,
        json: impl FnOnce() -> String,
    ) -> biphoton::Result<()> {
        if self.format.wants_csv() {
            let path = self.dir.join(format!("{stem}.csv"));
            report::write_atomic(&path, &csv())?;
            self.written.push(path.display().to_string());
        }
        if self.format.wants_json() {
            let path = self.dir.join(format!("{stem}.json"));
            report::write_atomic(&path, &json())?;
            self.written.push(path.display().to_string());
        }
        Ok(())
    }

    fn finish(
        mut self,
        cli: &Cli,
        config: &RunConfig,
        command: &str,
        rng_seed: Option<u64>,
    ) -> biphoton::Result<()> {
        if config.output.metadata {
            let mut metadata = RunMetadata::new(
                command,
                cli.config.as_deref(),
                self.dir,
                &format!("{:?}", self.format).to_lowercase(),
            );
            metadata.rng_seed = rng_seed;
            let path = self.dir.join("run_metadata.json");
            report::write_atomic(&path, &metadata.to_json())?;
            self.written.push(path.display().to_string());
        }
        for path in &self.written {
            println!("wrote {path}");
        }
        Ok(())
    }
}

fn cmd_jsmd(cli: &Cli, config: &RunConfig) -> biphoton::Result<ExitCode> {
    let mut sink = Sink::new(config);
    match &config.waist_scan {
        None => {
            let matrix = jsmd_matrix(
                config.grid.l_range(),
                config.grid.p_signal,
                config.grid.p_idler,
                &config.geometry,
                config.normalization,
            )?;
            let weights: Vec<f64> = matrix.antidiagonal().iter().map(|&(_, w)| w).collect();
            println!(
                "jsmd: {0}x{0} grid at gamma_s = {1:.4}, gamma_i = {2:.4}; \
                 antidiagonal participation ratio = {3:.6}",
                matrix.size(),
                matrix.gamma_s,
                matrix.gamma_i,
                participation_ratio(&weights)
            );
            sink.emit("jsmd", || jsmd_csv(&matrix), || jsmd_json(&matrix))?;
        }
        Some(waists) => {
            let panels = jsmd_waist_scan(
                config.grid.l_range(),
                config.grid.p_signal,
                config.grid.p_idler,
                &config.geometry,
                waists,
                config.normalization,
                config.normalization_scope,
            )?;
            println!(
                "jsmd: waist scan with {} panels ({} normalization)",
                panels.len(),
                config.normalization_scope
            );
            for (rank, panel) in panels.iter().enumerate() {
                let weights: Vec<f64> = panel.antidiagonal().iter().map(|&(_, w)| w).collect();
                println!(
                    "  panel {rank}: waist radius = {:.4} mm, gamma = {:.4}, \
                     participation ratio = {:.6}",
                    waists[rank] * 1e3,
                    panel.gamma_s,
                    participation_ratio(&weights)
                );
                sink.emit(
                    &format!("jsmd_scan_{rank}"),
                    || jsmd_csv(panel),
                    || jsmd_json(panel),
                )?;
            }
        }
    }
    sink.finish(cli, config, "jsmd", None)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_spectrum(cli: &Cli, config: &RunConfig) -> biphoton::Result<ExitCode> {
    let mut sink = Sink::new(config);
    let bars = spectrum_vs_gamma(&config.spectrum.l_values, &config.spectrum.gammas);
    println!(
        "spectrum: {} l values at {} explicit gamma points",
        config.spectrum.l_values.len(),
        config.spectrum.gammas.len()
    );
    sink.emit("spectrum", || spectrum_csv(&bars), || spectrum_json(&bars))?;
    if let Some(sweep) = &config.spectrum.sweep {
        let grid = sweep.values();
        let curves = spectrum_vs_gamma(&config.spectrum.l_values, &grid);
        println!(
            "spectrum: sweep over gamma in [{}, {}] with {} points",
            sweep.start, sweep.stop, sweep.points
        );
        sink.emit(
            "spectrum_sweep",
            || spectrum_csv(&curves),
            || spectrum_json(&curves),
        )?;
    }
    sink.finish(cli, config, "spectrum", None)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(cli: &Cli, config: &RunConfig) -> biphoton::Result<ExitCode> {
    let validation = &config.validation;
    let report = validate_against_analytic(
        validation.l_max,
        validation.p_max,
        &validation.gammas,
        validation.tolerance,
        &config.quadrature,
    );
    let mut sink = Sink::new(config);
    sink.emit(
        "validation",
        || validation_csv(&report),
        || validation_json(&report),
    )?;
    sink.finish(cli, config, "validate", None)?;
    println!(
        "validate: {} cells, max deviation {:.3e} (tolerance {:.1e}), {} errors: {}",
        report.cells.len(),
        report.max_deviation,
        report.tolerance,
        report.error_count,
        if report.pass { "PASS" } else { "FAIL" }
    );
    if report.pass {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(4))
    }
}

fn cmd_simulate(cli: &Cli, config: &RunConfig) -> biphoton::Result<ExitCode> {
    let set_config = config.experiment_config()?;
    let estimate = estimate_jsmd(&set_config)?;
    println!(
        "simulate: {}x{} grid, rng_seed = {}, report = {:?}{}",
        estimate.seed_count(),
        estimate.projection_count(),
        estimate.rng_seed,
        config.experiment.report,
        if estimate.extended {
            " (extended grid: p > 0 modes present)"
        } else {
            ""
        }
    );
    let mut sink = Sink::new(config);
    sink.emit(
        "simulate",
        || estimate_csv(&estimate, config.experiment.report),
        || estimate_json(&estimate),
    )?;
    sink.finish(cli, config, "simulate", Some(estimate.rng_seed))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_thin_crystal(config: &RunConfig) -> biphoton::Result<ExitCode> {
    let report = thin_crystal_report(&config.geometry, THIN_CRYSTAL_THRESHOLD);
    println!(
        "thin-crystal figure w_p / sqrt(lambda_p L) = {:.2} (threshold {}): {}",
        report.figure,
        report.threshold,
        if report.valid {
            "single-transverse-plane treatment valid"
        } else {
            "NOT valid"
        }
    );
    println!("{}", biphoton::analytic::reference_figure_note());
    Ok(ExitCode::SUCCESS)
}
