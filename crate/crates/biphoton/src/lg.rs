//! Laguerre-Gaussian mode mathematics at the beam waist plane.
//!
//! Fields are scalar complex envelopes u(ρ, φ) evaluated at the waist, with
//! the azimuthal factor exp(i·l·φ) and no curvature or Gouy terms: every
//! quantity downstream depends only on waist-plane overlaps, and the
//! distributions reported are phase-insensitive.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// Mode label LG_p^l: azimuthal index `l` (orbital angular momentum per
/// photon, in units of ħ) and radial index `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LgIndex {
    pub l: i32,
    pub p: u32,
}

impl LgIndex {
    pub const fn new(l: i32, p: u32) -> Self {
        LgIndex { l, p }
    }

    /// |l|, the order of the azimuthal phase and of the ρ^|l| vortex core.
    pub fn abs_l(&self) -> u32 {
        self.l.unsigned_abs()
    }
}

impl fmt::Display for LgIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LG(l={},p={})", self.l, self.p)
    }
}

/// Pump/signal/idler waist radii and wavelengths plus the crystal length.
///
/// All lengths are in meters and all waists are 1/e² field radii. The
/// dimensionless waist ratios γ_s = w_p/w_s and γ_i = w_p/w_i drive every
/// mode-distribution formula; wavelengths and crystal length enter only
/// the thin-crystal validity figure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamGeometry {
    pub pump_waist: f64,
    pub signal_waist: f64,
    pub idler_waist: f64,
    pub pump_wavelength: f64,
    pub signal_wavelength: f64,
    pub idler_wavelength: f64,
    pub crystal_length: f64,
}

impl BeamGeometry {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        pump_waist: f64,
        signal_waist: f64,
        idler_waist: f64,
        pump_wavelength: f64,
        signal_wavelength: f64,
        idler_wavelength: f64,
        crystal_length: f64,
    ) -> Result<Self> {
        let geometry = BeamGeometry {
            pump_waist,
            signal_waist,
            idler_waist,
            pump_wavelength,
            signal_wavelength,
            idler_wavelength,
            crystal_length,
        };
        for (name, value) in [
            ("pump_waist", pump_waist),
            ("signal_waist", signal_waist),
            ("idler_waist", idler_waist),
            ("pump_wavelength", pump_wavelength),
            ("signal_wavelength", signal_wavelength),
            ("idler_wavelength", idler_wavelength),
            ("crystal_length", crystal_length),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(
                    "beam geometry",
                    format!("{name} must be strictly positive and finite, got {value}"),
                ));
            }
        }
        Ok(geometry)
    }

    /// Geometry with the given waist ratios and the default wavelengths;
    /// convenient when only mode shapes matter, since those depend on the
    /// waists solely through γ_s and γ_i.
    pub fn with_gammas(gamma_s: f64, gamma_i: f64) -> Result<Self> {
        let pump_waist = 1.0e-3;
        BeamGeometry::new(
            pump_waist,
            pump_waist / gamma_s,
            pump_waist / gamma_i,
            405.0e-9,
            780.0e-9,
            842.0e-9,
            2.0e-3,
        )
    }

    /// Pump-to-signal waist ratio γ_s = w_p/w_s.
    pub fn gamma_s(&self) -> f64 {
        self.pump_waist / self.signal_waist
    }

    /// Pump-to-idler waist ratio γ_i = w_p/w_i.
    pub fn gamma_i(&self) -> f64 {
        self.pump_waist / self.idler_waist
    }
}

impl Default for BeamGeometry {
    /// 405 nm pump with a 1.0 mm waist radius, 780 nm signal and 842 nm
    /// idler at 0.36 mm waist radius, 2.0 mm crystal — the bundled example
    /// setup.
    fn default() -> Self {
        BeamGeometry::new(
            1.0e-3, 0.36e-3, 0.36e-3, 405.0e-9, 780.0e-9, 842.0e-9, 2.0e-3,
        )
        .expect("default geometry is valid")
    }
}

/// Knobs for overlap quadrature.
///
/// Radial integrals run on [0, R] with R = `truncation_radius_factor` ×
/// the larger waist hint of the two fields; `radial_nodes` Gauss-Legendre
/// nodes are used and every result is cross-checked at double the node
/// count against `target_rel_tol`. `azimuthal_nodes` only matters for
/// fields without a declared azimuthal order (the φ integral is analytic
/// otherwise). The defaults resolve modes up to |l| + 2p ≈ 20; beyond
/// that, raise `truncation_radius_factor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureConfig {
    pub radial_nodes: usize,
    pub truncation_radius_factor: f64,
    pub azimuthal_nodes: usize,
    pub target_rel_tol: f64,
}

impl QuadratureConfig {
    /// Checks the documented ranges: radial_nodes ≥ 8, factor ≥ 4,
    /// azimuthal_nodes ≥ 4, tolerance in (0, 1).
    pub fn validate(&self) -> Result<()> {
        if self.radial_nodes < 8 {
            return Err(Error::invalid(
                "quadrature config",
                format!("radial_nodes must be at least 8, got {}", self.radial_nodes),
            ));
        }
        if !(self.truncation_radius_factor.is_finite() && self.truncation_radius_factor >= 4.0) {
            return Err(Error::invalid(
                "quadrature config",
                format!(
                    "truncation_radius_factor must be at least 4, got {}",
                    self.truncation_radius_factor
                ),
            ));
        }
        if self.azimuthal_nodes < 4 {
            return Err(Error::invalid(
                "quadrature config",
                format!(
                    "azimuthal_nodes must be at least 4, got {}",
                    self.azimuthal_nodes
                ),
            ));
        }
        if !(self.target_rel_tol > 0.0 && self.target_rel_tol < 1.0) {
            return Err(Error::invalid(
                "quadrature config",
                format!(
                    "target_rel_tol must lie in (0, 1), got {}",
                    self.target_rel_tol
                ),
            ));
        }
        Ok(())
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            radial_nodes: 128,
            truncation_radius_factor: 6.0,
            azimuthal_nodes: 64,
            target_rel_tol: 1e-9,
        }
    }
}

type RadialProfile = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
type PolarProfile = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum Profile {
    /// radial(ρ) · exp(i·order·φ). Declaring the order lets overlaps do
    /// the φ integral analytically: 2π on matching orders, exactly 0
    /// otherwise.
    Separable { radial: RadialProfile, order: i32 },
    /// Arbitrary transverse profile; overlaps fall back to sampling φ.
    General(PolarProfile),
}

/// Complex transverse field at the waist plane, in polar coordinates.
#[derive(Clone)]
pub struct ScalarField {
    profile: Profile,
    waist_hint: f64,
}

impl ScalarField {
    /// Field radial(ρ)·exp(i·order·φ). `waist_hint` sets the quadrature
    /// truncation scale and should be the 1/e² radius of the envelope.
    pub fn separable(
        order: i32,
        waist_hint: f64,
        radial: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        ScalarField {
            profile: Profile::Separable {
                radial: Arc::new(radial),
                order,
            },
            waist_hint,
        }
    }

    /// Field with no declared azimuthal symmetry.
    pub fn general(
        waist_hint: f64,
        profile: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        ScalarField {
            profile: Profile::General(Arc::new(profile)),
            waist_hint,
        }
    }

    pub fn amplitude(&self, rho: f64, phi: f64) -> Complex64 {
        match &self.profile {
            Profile::Separable { radial, order } => {
                radial(rho) * Complex64::from_polar(1.0, *order as f64 * phi)
            }
            Profile::General(profile) => profile(rho, phi),
        }
    }

    /// The declared azimuthal order, if the field is separable.
    pub fn azimuthal_order(&self) -> Option<i32> {
        match &self.profile {
            Profile::Separable { order, .. } => Some(*order),
            Profile::General(_) => None,
        }
    }

    pub fn waist_hint(&self) -> f64 {
        self.waist_hint
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.profile {
            Profile::Separable { order, .. } => f
                .debug_struct("ScalarField")
                .field("azimuthal_order", order)
                .field("waist_hint", &self.waist_hint)
                .finish(),
            Profile::General(_) => f
                .debug_struct("ScalarField")
                .field("azimuthal_order", &Option::<i32>::None)
                .field("waist_hint", &self.waist_hint)
                .finish(),
        }
    }
}

/// ln(n!), accumulated with compensated summation so the result stays
/// accurate to a few ulps even for large n.
pub(crate) fn ln_factorial(n: u32) -> f64 {
    let mut sum = 0.0;
    let mut compensation = 0.0;
    for k in 2..=u64::from(n) {
        let term = (k as f64).ln();
        let y = term - compensation;
        let t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Associated Laguerre polynomial L_p^α(x) by the stable three-term
/// recurrence (k+1)·L_{k+1} = (2k+1+α−x)·L_k − (k+α)·L_{k−1}.
pub fn assoc_laguerre(p: u32, alpha: f64, x: f64) -> f64 {
    debug_assert!(alpha.is_finite() && x.is_finite());
    if p == 0 {
        return 1.0;
    }
    let mut previous = 1.0; // L_0
    let mut current = 1.0 + alpha - x; // L_1
    for k in 1..p {
        let k = f64::from(k);
        let next = ((2.0 * k + 1.0 + alpha - x) * current - (k + alpha) * previous) / (k + 1.0);
        previous = current;
        current = next;
    }
    current
}

/// Unit-normalized LG_p^l profile at the waist plane:
///
///   u(ρ,φ) = √(2·p!/(π·(p+|l|)!)) / w · (√2·ρ/w)^|l| · L_p^|l|(2ρ²/w²)
///            · exp(−ρ²/w²) · exp(i·l·φ)
///
/// so that ∫∫ |u|² ρ dρ dφ = 1.
pub fn lg_field(index: LgIndex, waist: f64) -> ScalarField {
    assert!(
        waist > 0.0 && waist.is_finite(),
        "waist must be positive, got {waist}"
    );
    let abs_l = index.abs_l();
    let p = index.p;
    let norm =
        (2.0 / PI).sqrt() * (0.5 * (ln_factorial(p) - ln_factorial(p + abs_l))).exp() / waist;
    let radial = move |rho: f64| {
        let s = std::f64::consts::SQRT_2 * rho / waist;
        let t = 2.0 * rho * rho / (waist * waist);
        Complex64::new(
            norm * s.powi(abs_l as i32)
                * assoc_laguerre(p, f64::from(abs_l), t)
                * (-rho * rho / (waist * waist)).exp(),
            0.0,
        )
    };
    ScalarField::separable(index.l, waist, radial)
}

/// The fundamental Gaussian LG_0^0 of the given waist; the fiber mode and
/// pump envelope in the rest of the crate.
pub fn gaussian_field(waist: f64) -> ScalarField {
    lg_field(LgIndex::new(0, 0), waist)
}

/// Inner product ⟨a|b⟩ = ∫∫ a*(ρ,φ)·b(ρ,φ) ρ dρ dφ over the plane.
///
/// When both fields declare azimuthal orders the φ integral is analytic
/// (2π on match, exactly 0 on mismatch) and only the radial integral is
/// quadratured; otherwise φ is sampled on a uniform circle, which for
/// band-limited integrands is exact once `azimuthal_nodes` exceeds the
/// order spread.
pub fn mode_overlap(
    a: &ScalarField,
    b: &ScalarField,
    quad: &QuadratureConfig,
) -> Result<Complex64> {
    let radius = quad.truncation_radius_factor * a.waist_hint().max(b.waist_hint());
    match (a.azimuthal_order(), b.azimuthal_order()) {
        (Some(order_a), Some(order_b)) if order_a != order_b => Ok(Complex64::new(0.0, 0.0)),
        (Some(_), Some(_)) => {
            let radial = quad::radial_integral(
                |rho| a.amplitude(rho, 0.0).conj() * b.amplitude(rho, 0.0),
                radius,
                quad.radial_nodes,
                quad.target_rel_tol,
            )?;
            Ok(radial * 2.0 * PI)
        }
        _ => {
            let n_phi = quad.azimuthal_nodes;
            let step = 2.0 * PI / n_phi as f64;
            quad::radial_integral_scaled(
                |rho| {
                    let mut ring = Complex64::new(0.0, 0.0);
                    let mut magnitude = 0.0;
                    for j in 0..n_phi {
                        let phi = step * j as f64;
                        let product = a.amplitude(rho, phi).conj() * b.amplitude(rho, phi);
                        ring += product;
                        magnitude += product.norm();
                    }
                    // The magnitude is accumulated before the azimuthal sum
                    // can cancel, so orthogonal orders still converge.
                    (ring * step, magnitude * step)
                },
                radius,
                quad.radial_nodes,
                quad.target_rel_tol,
            )
        }
    }
}
