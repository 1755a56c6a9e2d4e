//! The single-transverse-plane treatment is only as good as the
//! thin-crystal assumption behind it: the pump's Rayleigh range must
//! dwarf the crystal, summarized by the figure w_p / sqrt(λ_p L). This
//! example evaluates it for a few geometries, including one that fails.

use biphoton::analytic::{
    reference_figure_note, thin_crystal_figure, thin_crystal_report, THIN_CRYSTAL_THRESHOLD,
};
use biphoton::lg::BeamGeometry;

fn main() -> biphoton::Result<()> {
    let cases = [
        ("2 mm pump waist radius, 2 mm crystal", 2.0e-3, 2.0e-3),
        ("1 mm pump waist radius, 2 mm crystal", 1.0e-3, 2.0e-3),
        ("10 um pump waist radius, 2 mm crystal", 10.0e-6, 2.0e-3),
        ("1 mm pump waist radius, 30 mm crystal", 1.0e-3, 30.0e-3),
    ];

    println!("figure = w_p / sqrt(lambda_p * L), threshold {THIN_CRYSTAL_THRESHOLD}:\n");
    for (label, pump_waist, crystal_length) in cases {
        let geometry = BeamGeometry::new(
            pump_waist,
            0.36e-3,
            0.36e-3,
            405e-9,
            780e-9,
            842e-9,
            crystal_length,
        )?;
        let report = thin_crystal_report(&geometry, THIN_CRYSTAL_THRESHOLD);
        println!(
            "  {label:<42} figure = {:>8.2}  {}",
            report.figure,
            if report.valid {
                "ok"
            } else {
                "TOO THICK for this treatment"
            }
        );
    }

    let wide_pump = BeamGeometry::new(2.0e-3, 0.36e-3, 0.36e-3, 405e-9, 780e-9, 842e-9, 2.0e-3)?;
    assert!((thin_crystal_figure(&wide_pump) - 70.27).abs() < 0.01);

    println!("\n{}", reference_figure_note());
    Ok(())
}
