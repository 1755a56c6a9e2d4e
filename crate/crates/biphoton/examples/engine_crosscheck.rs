//! Pit the two independent engines against each other: the closed-form
//! amplitudes versus brute-force overlap quadrature, max-normalized per
//! γ so their arbitrary overall scales drop out. Agreement to ~1e-13 on
//! every populated cell is the strongest internal consistency check the
//! crate has.

use biphoton::lg::QuadratureConfig;
use biphoton::oracle::validate_against_analytic;

fn main() {
    let quadrature = QuadratureConfig::default();
    let report = validate_against_analytic(4, 2, &[0.5, 1.0, 2.03, 3.05], 1e-6, &quadrature);

    println!(
        "compared {} cells over l in [-4, 4], p_s, p_i in [0, 2], four gammas",
        report.cells.len()
    );
    println!("max relative deviation: {:.3e}", report.max_deviation);
    println!("tolerance:              {:.1e}", report.tolerance);
    println!(
        "verdict:                {}",
        if report.pass { "PASS" } else { "FAIL" }
    );

    // The worst few cells, for a feel of where quadrature error lives.
    let mut cells = report.cells.clone();
    cells.sort_by(|a, b| b.deviation.total_cmp(&a.deviation));
    println!("\nworst cells:");
    println!(
        "{:>4} {:>4} {:>4} {:>6} {:>14} {:>14} {:>10}",
        "l", "p_s", "p_i", "gamma", "closed form", "quadrature", "deviation"
    );
    for cell in cells.iter().take(5) {
        println!(
            "{:>4} {:>4} {:>4} {:>6.2} {:>14.6e} {:>14.6e} {:>10.2e}",
            cell.l, cell.p_s, cell.p_i, cell.gamma, cell.analytic, cell.numeric, cell.deviation
        );
    }
    assert!(report.pass);
}
