//! Brute-force pair amplitudes by overlap quadrature — the independent
//! check on the closed-form engine in [`crate::analytic`].
//!
//! For a thin crystal the pair amplitude reduces to a single
//! transverse-plane overlap of the pump envelope with the two conjugated
//! mode profiles,
//!
//!   C = ∫∫ E_p(ρ,φ) · u_s*(ρ,φ) · u_i*(ρ,φ) ρ dρ dφ,
//!
//! which this module evaluates by Gauss-Legendre quadrature with no
//! reference to the closed form: same physics, disjoint code path. The
//! azimuthal integral is exact (2π iff l_s + l_i = 0, else 0), so only
//! the radial factor is quadratured.
//!
//! The two engines fix their overall scale differently (the closed form
//! drops constant factors; the overlap uses unit-normalized fields), and
//! that scale varies with the waist ratios. Comparisons therefore
//! normalize each engine's grid to its own maximum per (γ_s, γ_i) slice,
//! which is exactly the convention in which distributions are reported.

use num_complex::Complex64;
use serde::Serialize;

use crate::analytic;
use crate::error::Result;
use crate::lg::{gaussian_field, lg_field, BeamGeometry, LgIndex, QuadratureConfig};
use crate::quad;

/// The three factors of the overlap: a Gaussian pump of waist
/// `pump_waist` and the two LG modes to project on. Waists in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapKernel {
    pub pump_waist: f64,
    pub signal: LgIndex,
    pub signal_waist: f64,
    pub idler: LgIndex,
    pub idler_waist: f64,
}

impl OverlapKernel {
    pub fn new(
        pump_waist: f64,
        signal: LgIndex,
        signal_waist: f64,
        idler: LgIndex,
        idler_waist: f64,
    ) -> Result<Self> {
        for (name, value) in [
            ("pump_waist", pump_waist),
            ("signal_waist", signal_waist),
            ("idler_waist", idler_waist),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(crate::Error::invalid(
                    "overlap kernel",
                    format!("{name} must be strictly positive and finite, got {value}"),
                ));
            }
        }
        Ok(OverlapKernel {
            pump_waist,
            signal,
            signal_waist,
            idler,
            idler_waist,
        })
    }

    pub fn from_geometry(geometry: &BeamGeometry, signal: LgIndex, idler: LgIndex) -> Self {
        OverlapKernel {
            pump_waist: geometry.pump_waist,
            signal,
            signal_waist: geometry.signal_waist,
            idler,
            idler_waist: geometry.idler_waist,
        }
    }
}

/// The overlap C = ∫∫ E_p·u_s*·u_i* ρ dρ dφ with unit-normalized fields.
///
/// Exactly 0 unless l_s + l_i = 0 (the pump carries no orbital angular
/// momentum, so the azimuthal integral annihilates everything else).
pub fn overlap_amplitude_numeric(
    kernel: &OverlapKernel,
    quad: &QuadratureConfig,
) -> Result<Complex64> {
    if kernel.signal.l + kernel.idler.l != 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let pump = gaussian_field(kernel.pump_waist);
    let signal = lg_field(kernel.signal, kernel.signal_waist);
    let idler = lg_field(kernel.idler, kernel.idler_waist);
    let radius = quad.truncation_radius_factor
        * kernel
            .pump_waist
            .max(kernel.signal_waist)
            .max(kernel.idler_waist);
    // The LG radial profiles are real, so conjugation only acts on the
    // azimuthal phases already integrated out above.
    let radial = quad::radial_integral(
        |rho| {
            pump.amplitude(rho, 0.0)
                * signal.amplitude(rho, 0.0).conj()
                * idler.amplitude(rho, 0.0).conj()
        },
        radius,
        quad.radial_nodes,
        quad.target_rel_tol,
    )?;
    Ok(radial * 2.0 * std::f64::consts::PI)
}

/// One compared cell of the validation grid. `analytic` and `numeric`
/// are |C|² after per-γ max normalization; `deviation` is their relative
/// difference |a − n| / max(a, n) (0 when both vanish).
#[derive(Debug, Clone, Serialize)]
pub struct ValidationCell {
    pub l: i32,
    pub p_s: u32,
    pub p_i: u32,
    pub gamma: f64,
    pub analytic: f64,
    pub numeric: f64,
    pub deviation: f64,
    /// Set when the quadrature failed for this cell; such cells carry
    /// numeric = 0 and are excluded from the deviation statistics but
    /// force the report to fail.
    pub error: Option<String>,
}

/// Outcome of sweeping both engines over a grid of antidiagonal cells.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub l_max: u32,
    pub p_max: u32,
    pub gamma_list: Vec<f64>,
    pub tolerance: f64,
    /// Cells in lexicographic (l, p_s, p_i, γ) order.
    pub cells: Vec<ValidationCell>,
    pub max_deviation: f64,
    pub error_count: usize,
    pub pass: bool,
}

/// Sweeps l ∈ [−l_max, l_max], p_s, p_i ∈ [0, p_max], γ_s = γ_i = γ over
/// `gamma_list`, comparing max-normalized |C|² between the closed form
/// and quadrature. Each γ slice normalizes to its own maximum (see the
/// module docs for why the overall scales differ between engines).
///
/// Quadrature failures are recorded per cell rather than propagated; any
/// such failure makes the report fail.
pub fn validate_against_analytic(
    l_max: u32,
    p_max: u32,
    gamma_list: &[f64],
    tolerance: f64,
    quad: &QuadratureConfig,
) -> ValidationReport {
    let mut cells = Vec::new();
    for (gamma_rank, &gamma) in gamma_list.iter().enumerate() {
        let geometry =
            BeamGeometry::with_gammas(gamma, gamma).expect("gamma_list entries must be positive");
        let mut slice = Vec::new();
        let (mut analytic_max, mut numeric_max) = (0.0f64, 0.0f64);
        for l in -(l_max as i32)..=l_max as i32 {
            for p_s in 0..=p_max {
                for p_i in 0..=p_max {
                    let signal = LgIndex::new(l, p_s);
                    let idler = LgIndex::new(-l, p_i);
                    let closed_form = analytic::amplitude(signal, idler, &geometry)
                        .map(|a| a.value * a.value)
                        .expect("antidiagonal closed form cannot hit a series pole");
                    let kernel = OverlapKernel::from_geometry(&geometry, signal, idler);
                    let (brute_force, error) = match overlap_amplitude_numeric(&kernel, quad) {
                        Ok(value) => (value.norm_sqr(), None),
                        Err(error) => (0.0, Some(error.to_string())),
                    };
                    if error.is_none() {
                        analytic_max = analytic_max.max(closed_form);
                        numeric_max = numeric_max.max(brute_force);
                    }
                    slice.push((l, p_s, p_i, closed_form, brute_force, error));
                }
            }
        }
        for (l, p_s, p_i, closed_form, brute_force, error) in slice {
            let analytic = if analytic_max > 0.0 {
                closed_form / analytic_max
            } else {
                0.0
            };
            let numeric = if numeric_max > 0.0 {
                brute_force / numeric_max
            } else {
                0.0
            };
            let deviation = if error.is_some() {
                0.0
            } else {
                let scale = analytic.max(numeric);
                if scale > 0.0 {
                    (analytic - numeric).abs() / scale
                } else {
                    0.0
                }
            };
            cells.push((
                gamma_rank,
                ValidationCell {
                    l,
                    p_s,
                    p_i,
                    gamma,
                    analytic,
                    numeric,
                    deviation,
                    error,
                },
            ));
        }
    }
    cells.sort_by(|(rank_a, a), (rank_b, b)| {
        (a.l, a.p_s, a.p_i, *rank_a).cmp(&(b.l, b.p_s, b.p_i, *rank_b))
    });
    let cells: Vec<ValidationCell> = cells.into_iter().map(|(_, cell)| cell).collect();
    let max_deviation = cells
        .iter()
        .filter(|c| c.error.is_none())
        .map(|c| c.deviation)
        .fold(0.0, f64::max);
    let error_count = cells.iter().filter(|c| c.error.is_some()).count();
    let pass = error_count == 0 && max_deviation < tolerance;
    ValidationReport {
        l_max,
        p_max,
        gamma_list: gamma_list.to_vec(),
        tolerance,
        cells,
        max_deviation,
        error_count,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn default_quad() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn mismatched_orbital_momentum_vanishes_exactly() {
        let kernel =
            OverlapKernel::new(1.0, LgIndex::new(2, 0), 0.7, LgIndex::new(1, 1), 0.9).unwrap();
        let value = overlap_amplitude_numeric(&kernel, &default_quad()).unwrap();
        assert_eq!(value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn all_gaussian_closed_form() {
        // Three unit-normalized Gaussians: C = √(2/π) · 2 / (w_p w_s w_i α)
        // with α = 1/w_p² + 1/w_s² + 1/w_i².
        let (wp, ws, wi) = (1.0, 0.5, 0.8);
        let kernel =
            OverlapKernel::new(wp, LgIndex::new(0, 0), ws, LgIndex::new(0, 0), wi).unwrap();
        let value = overlap_amplitude_numeric(&kernel, &default_quad()).unwrap();
        assert_relative_eq!(value.re, 0.60791204632599265, max_relative = 1e-12);
        assert_eq!(value.im, 0.0);
    }

    #[test]
    fn matches_spiral_spectrum_at_unit_gamma() {
        let quad = default_quad();
        let base =
            OverlapKernel::new(1.0, LgIndex::new(0, 0), 1.0, LgIndex::new(0, 0), 1.0).unwrap();
        let cell =
            OverlapKernel::new(1.0, LgIndex::new(1, 0), 1.0, LgIndex::new(-1, 0), 1.0).unwrap();
        let ratio = overlap_amplitude_numeric(&cell, &quad).unwrap().norm_sqr()
            / overlap_amplitude_numeric(&base, &quad).unwrap().norm_sqr();
        assert_relative_eq!(ratio, 4.0 / 9.0, max_relative = 1e-8);
    }

    #[test]
    fn matches_closed_form_on_mixed_radial_cell() {
        // Same frozen cell as the analytic unit test: the two engines must
        // agree on the ratio to the all-fundamental cell.
        let quad = default_quad();
        let geometry = BeamGeometry::with_gammas(1.3, 0.8).unwrap();
        let base = OverlapKernel::from_geometry(&geometry, LgIndex::new(0, 0), LgIndex::new(0, 0));
        let cell = OverlapKernel::from_geometry(&geometry, LgIndex::new(2, 1), LgIndex::new(-2, 2));
        let ratio = overlap_amplitude_numeric(&cell, &quad).unwrap().norm_sqr()
            / overlap_amplitude_numeric(&base, &quad).unwrap().norm_sqr();
        assert_relative_eq!(ratio, 0.06534804952622288, max_relative = 1e-9);
    }

    #[test]
    fn waist_scale_invariance() {
        // Scaling every waist by a common factor must leave ratios alone:
        // only γ_s and γ_i matter.
        let quad = default_quad();
        let ratio_at_scale = |scale: f64| {
            let base = OverlapKernel::new(
                scale,
                LgIndex::new(0, 0),
                0.8 * scale,
                LgIndex::new(0, 0),
                1.1 * scale,
            )
            .unwrap();
            let cell = OverlapKernel::new(
                scale,
                LgIndex::new(3, 1),
                0.8 * scale,
                LgIndex::new(-3, 0),
                1.1 * scale,
            )
            .unwrap();
            overlap_amplitude_numeric(&cell, &quad).unwrap().norm_sqr()
                / overlap_amplitude_numeric(&base, &quad).unwrap().norm_sqr()
        };
        assert_relative_eq!(
            ratio_at_scale(1.0),
            ratio_at_scale(2.37e-3),
            max_relative = 1e-10
        );
    }

    #[test]
    fn validation_single_cell_is_exact() {
        let report = validate_against_analytic(0, 0, &[1.7], 1e-12, &default_quad());
        assert_eq!(report.cells.len(), 1);
        assert_eq!(report.max_deviation, 0.0);
        assert!(report.pass);
        assert_eq!(report.cells[0].analytic, 1.0);
        assert_eq!(report.cells[0].numeric, 1.0);
    }

    #[test]
    fn validation_small_grid_passes_and_is_ordered() {
        let report = validate_against_analytic(2, 1, &[1.0, 2.03], 1e-6, &default_quad());
        assert_eq!(report.cells.len(), 5 * 2 * 2 * 2);
        assert!(report.pass, "max deviation {}", report.max_deviation);
        assert_eq!(report.error_count, 0);
        // Lexicographic (l, p_s, p_i, γ) order.
        let keys: Vec<(i32, u32, u32, u64)> = report
            .cells
            .iter()
            .map(|c| (c.l, c.p_s, c.p_i, c.gamma.to_bits()))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(report.cells[0].l, -2);
    }

    #[test]
    fn validation_fails_at_unattainable_tolerance() {
        let report = validate_against_analytic(2, 1, &[1.0], 1e-30, &default_quad());
        assert!(!report.pass);
        assert!(report.max_deviation > 1e-30);
    }
}
