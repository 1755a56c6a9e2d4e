//! Gauss-Legendre quadrature with cached node tables and a
//! refinement-checked radial integrator.
//!
//! The integrands in this crate are Gaussian-damped polynomials (beam
//! envelopes times mode polynomials), for which Gauss-Legendre on a
//! truncated interval converges spectrally. Convergence is never assumed:
//! [`radial_integral`] evaluates each integral at `n` and `2n` nodes and
//! rejects the result if the two disagree.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the n-point rule by Newton iteration on the Legendre
    /// recurrence, starting from the standard Chebyshev root estimates.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Roots come in +/- pairs; solve the positive half and mirror.
        let half = n.div_ceil(2);
        for i in 0..half {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..64 {
                let (value, slope) = legendre_with_derivative(n, x);
                let step = value / slope;
                x -= step;
                if step.abs() <= 1e-16 + 1e-15 * x.abs() {
                    break;
                }
            }
            let (_, slope) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * slope * slope);
            nodes[i] = x;
            weights[i] = w;
            nodes[n - 1 - i] = -x;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Reference nodes on [-1, 1], descending from +1.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over [a, b].
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mid = 0.5 * (a + b);
        let halfwidth = 0.5 * (b - a);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + halfwidth * x);
        }
        acc * halfwidth
    }

    /// Integrates a complex-valued `f` over [a, b].
    pub fn integrate_complex(
        &self,
        a: f64,
        b: f64,
        mut f: impl FnMut(f64) -> Complex64,
    ) -> Complex64 {
        let mid = 0.5 * (a + b);
        let halfwidth = 0.5 * (b - a);
        let mut acc = Complex64::new(0.0, 0.0);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + halfwidth * x) * w;
        }
        acc * halfwidth
    }
}

/// Legendre polynomial P_n and its derivative at x, by the three-term
/// recurrence (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0; // P_0
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p = x; // P_1
    for k in 1..n {
        let p_next = ((2 * k + 1) as f64 * x * p - k as f64 * p_prev) / (k + 1) as f64;
        p_prev = p;
        p = p_next;
    }
    // P'_n(x) = n (x P_n - P_{n-1}) / (x^2 - 1); the roots of P_n are
    // strictly inside (-1, 1), so the denominator never vanishes there.
    let slope = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, slope)
}

/// Shared cache of node tables, keyed by node count. Rules are immutable
/// once built, so handing out `Arc`s is safe across threads.
pub fn rule(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("quadrature cache poisoned");
    Arc::clone(
        map.entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::new(n))),
    )
}

/// One pass of ∫ f(ρ) ρ dρ over [0, radius], where `f` returns the
/// integrand value together with a non-negative local magnitude;
/// the accumulated magnitude integral serves as the convergence scale.
fn radial_pass(
    f: &mut impl FnMut(f64) -> (Complex64, f64),
    radius: f64,
    n: usize,
) -> (Complex64, f64) {
    let rule = rule(n);
    let mid = 0.5 * radius;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
        let rho = mid + mid * x;
        let (value, local_magnitude) = f(rho);
        acc += value * (rho * w);
        magnitude += local_magnitude * rho * w;
    }
    (acc * mid, magnitude * mid)
}

/// Integrates f(ρ)·ρ over [0, radius], evaluating at `nodes` and `2·nodes`
/// points and requiring agreement before accepting the finer result.
///
/// `f` returns (value, magnitude), the magnitude being the size of the
/// integrand *before* any internal cancellation (e.g. the azimuthally
/// averaged |a|·|b| of an overlap). Agreement is judged against
/// max(|result|, 1e-3·∫magnitude·ρ dρ): overlaps that cancel to zero
/// (orthogonal modes) are accepted once the residual is negligible
/// against the integrand's overall size, instead of chasing an impossible
/// relative error on a vanishing value.
pub fn radial_integral_scaled(
    mut f: impl FnMut(f64) -> (Complex64, f64),
    radius: f64,
    nodes: usize,
    rel_tol: f64,
) -> Result<Complex64> {
    debug_assert!(radius >= 0.0 && nodes >= 1 && rel_tol > 0.0);
    let (coarse, _) = radial_pass(&mut f, radius, nodes);
    let (fine, magnitude) = radial_pass(&mut f, radius, 2 * nodes);
    let difference = (fine - coarse).norm();
    let scale = fine.norm().max(1e-3 * magnitude);
    if difference <= rel_tol * scale {
        Ok(fine)
    } else {
        Err(Error::QuadratureNotConverged {
            achieved: difference / scale,
            target: rel_tol,
        })
    }
}

/// [`radial_integral_scaled`] for plain integrands, with |f| as the
/// convergence magnitude.
pub fn radial_integral(
    mut f: impl FnMut(f64) -> Complex64,
    radius: f64,
    nodes: usize,
    rel_tol: f64,
) -> Result<Complex64> {
    radial_integral_scaled(
        |rho| {
            let value = f(rho);
            (value, value.norm())
        },
        radius,
        nodes,
        rel_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 5, 16, 128, 257] {
            let rule = GaussLegendre::new(n);
            let total: f64 = rule.weights().iter().sum();
            assert_relative_eq!(total, 2.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // An n-point rule is exact through degree 2n-1.
        let rule = GaussLegendre::new(4);
        let value = rule.integrate(-1.0, 1.0, |x| x.powi(6));
        assert_relative_eq!(value, 2.0 / 7.0, max_relative = 1e-14);
        let value = rule.integrate(0.0, 2.0, |x| 3.0 * x * x);
        assert_relative_eq!(value, 8.0, max_relative = 1e-14);
    }

    #[test]
    fn integrates_exponential() {
        let rule = GaussLegendre::new(24);
        let value = rule.integrate(-1.0, 1.0, f64::exp);
        assert_relative_eq!(value, 1f64.exp() - (-1f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn complex_integration_matches_componentwise() {
        let rule = GaussLegendre::new(32);
        let value = rule.integrate_complex(0.0, 1.0, |x| Complex64::new(x, x * x));
        assert_relative_eq!(value.re, 0.5, max_relative = 1e-13);
        assert_relative_eq!(value.im, 1.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn rule_cache_returns_shared_tables() {
        let a = rule(96);
        let b = rule(96);
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(a.len(), 96);
    }

    #[test]
    fn radial_gaussian_moment() {
        // ∫_0^∞ e^{-ρ²} ρ dρ = 1/2; radius 8 leaves a tail below 1e-27.
        let value = radial_integral(
            |rho| Complex64::new((-rho * rho).exp(), 0.0),
            8.0,
            64,
            1e-12,
        )
        .unwrap();
        assert_relative_eq!(value.re, 0.5, max_relative = 1e-13);
        assert_eq!(value.im, 0.0);
    }

    #[test]
    fn cancelling_integrand_converges_to_zero() {
        // ∫_0^∞ (1 - ρ²) e^{-ρ²} ρ dρ = 0 exactly; a pure relative check
        // would never converge here.
        let value = radial_integral(
            |rho| Complex64::new((1.0 - rho * rho) * (-rho * rho).exp(), 0.0),
            10.0,
            64,
            1e-10,
        )
        .unwrap();
        assert!(value.norm() < 1e-12, "residual {}", value.norm());
    }

    #[test]
    fn under_resolved_integrand_is_rejected() {
        let result = radial_integral(|rho| Complex64::new((50.0 * rho).cos(), 0.0), 10.0, 4, 1e-9);
        assert!(matches!(result, Err(Error::QuadratureNotConverged { .. })));
    }

    #[test]
    fn identically_zero_integrand_is_accepted() {
        let value = radial_integral(|_| Complex64::new(0.0, 0.0), 5.0, 16, 1e-12).unwrap();
        assert_eq!(value, Complex64::new(0.0, 0.0));
    }
}
