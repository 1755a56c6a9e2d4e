//! The field toolbox underneath both engines: Laguerre-Gauss modes as
//! [`ScalarField`]s, unit normalization, orthonormality, and overlaps
//! between modes of different waists.

use biphoton::lg::{gaussian_field, lg_field, mode_overlap, LgIndex, QuadratureConfig};

fn main() -> biphoton::Result<()> {
    let quadrature = QuadratureConfig::default();
    let waist = 1.0e-3;

    // Each mode carries unit power.
    println!("norms <u|u> for a few modes at w = 1 mm:");
    for (l, p) in [(0, 0), (3, 0), (-2, 1), (5, 2)] {
        let mode = lg_field(LgIndex::new(l, p), waist);
        let norm = mode_overlap(&mode, &mode, &quadrature)?.re;
        println!("  {}: {:.15}", LgIndex::new(l, p), norm);
    }

    // Distinct indices at a common waist are orthogonal; modes of equal
    // l but different waist are not.
    let a = lg_field(LgIndex::new(2, 1), waist);
    let b = lg_field(LgIndex::new(2, 0), waist);
    let cross = mode_overlap(&a, &b, &quadrature)?;
    println!(
        "\n<LG(2,1)|LG(2,0)> at equal waists: {:.2e} (orthogonal)",
        cross.norm()
    );

    let narrow = gaussian_field(0.7 * waist);
    let wide = gaussian_field(1.9 * waist);
    let mismatch = mode_overlap(&narrow, &wide, &quadrature)?.re;
    println!(
        "<G(0.7mm)|G(1.9mm)> = {mismatch:.6} (closed form 2 w1 w2 / (w1^2 + w2^2) = {:.6})",
        2.0 * 0.7 * 1.9 / (0.7f64.powi(2) + 1.9f64.powi(2))
    );

    // A donut mode peaks at rho = w sqrt(|l| / 2).
    let donut = lg_field(LgIndex::new(3, 0), waist);
    let peak = waist * (3.0f64 / 2.0).sqrt();
    let probe = |rho: f64| donut.amplitude(rho, 0.0).norm();
    println!(
        "\n|LG(3,0)| at 0.9, 1.0, 1.1 times its ring radius: {:.4e}, {:.4e}, {:.4e}",
        probe(0.9 * peak),
        probe(peak),
        probe(1.1 * peak)
    );
    assert!(probe(peak) > probe(0.9 * peak) && probe(peak) > probe(1.1 * peak));
    Ok(())
}
