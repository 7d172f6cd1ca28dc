//! Spectral integrands of the survival-probability integrals.
//!
//! Shared by the quadrature oracle and the tests, so the closed forms in
//! [`crate::closedform`] are always validated against exactly these kernels.

use crate::model::TransitionParams;
use crate::specfun::sinc_sq;

/// One sampled point of a spectral integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    /// Angular frequency, rad/s.
    pub omega: f64,
    /// Integrand value, rad/s.
    pub value: f64,
}

/// Coupling suppression 1/[1 + (ω/ω_X)²]⁴ of the exact matrix element
/// relative to the dipole one. Even in ω, strictly decreasing in |ω|.
pub fn form_factor(omega: f64, omega_x: f64) -> f64 {
    let u = omega / omega_x;
    1.0 / (1.0 + u * u).powi(4)
}

/// Dipole-approximation integrand θ(ω)·ω·sinc²((ω₀ − ω)t/2).
pub fn dipole_integrand(omega: f64, t: f64, params: &TransitionParams) -> f64 {
    if omega < 0.0 {
        return 0.0;
    }
    omega * sinc_sq((params.omega0 - omega) * t / 2.0)
}

/// Exact-coupling integrand: the dipole integrand times the form factor.
/// Decays as ω⁻⁷ for ω ≫ ω_X at fixed t.
pub fn exact_integrand(omega: f64, t: f64, params: &TransitionParams) -> f64 {
    dipole_integrand(omega, t, params) * form_factor(omega, params.omega_x)
}

/// Samples the exact integrand at `omega`.
pub fn sample_exact(omega: f64, t: f64, params: &TransitionParams) -> KernelSample {
    KernelSample {
        omega,
        value: exact_integrand(omega, t, params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_params, FrequencyOverrides, PhysicalConstants};
    use approx::assert_relative_eq;

    fn hydrogen() -> TransitionParams {
        derive_params(
            PhysicalConstants::CODATA_2018,
            FrequencyOverrides::default(),
        )
        .unwrap()
    }

    #[test]
    fn form_factor_values() {
        let wx = 8.5e18;
        assert_eq!(form_factor(0.0, wx), 1.0);
        assert_relative_eq!(form_factor(wx, wx), 1.0 / 16.0, max_relative = 1e-15);
        assert_relative_eq!(
            form_factor(10.0 * wx, wx),
            (1.0f64 / 101.0).powi(4),
            max_relative = 1e-13
        );
        assert_eq!(form_factor(-wx, wx), form_factor(wx, wx));
    }

    #[test]
    fn dipole_integrand_cases() {
        let p = hydrogen();
        let t = 1e-17;
        assert_eq!(dipole_integrand(-1.0, t, &p), 0.0);
        assert_relative_eq!(
            dipole_integrand(p.omega0, t, &p),
            p.omega0,
            max_relative = 1e-15
        );
        // sinc zero one full period away from resonance.
        let zero = p.omega0 + 2.0 * core::f64::consts::PI / t;
        assert!(dipole_integrand(zero, t, &p).abs() < 1e-12 * p.omega0);
    }

    #[test]
    fn exact_integrand_cases() {
        let p = hydrogen();
        let r2 = p.ratio * p.ratio;
        assert_relative_eq!(
            exact_integrand(p.omega0, 2e-18, &p),
            p.omega0 / (1.0 + r2).powi(4),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            exact_integrand(p.omega_x, 0.0, &p),
            p.omega_x / 16.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn exact_is_dipole_times_form_factor() {
        let p = hydrogen();
        let mut rng = crate::rng::SplitMix64::new(0xfeed_0004);
        for _ in 0..10_000 {
            let omega = rng.log_uniform(1e12, 1e21);
            let t = rng.log_uniform(1e-21, 1e-14);
            let d = dipole_integrand(omega, t, &p);
            let e = exact_integrand(omega, t, &p);
            // form factor ≤ 1, so exact ≤ dipole pointwise
            assert!(e <= d * (1.0 + 1e-15));
            if d > 0.0 {
                assert_relative_eq!(e / d, form_factor(omega, p.omega_x), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn integrands_vanish_at_sinc_zeros() {
        let p = hydrogen();
        let t = 3.7e-17;
        for k in 1..=5 {
            let node = p.omega0 + 2.0 * core::f64::consts::PI * k as f64 / t;
            assert!(dipole_integrand(node, t, &p).abs() < 1e-12 * p.omega0);
            assert!(exact_integrand(node, t, &p).abs() < 1e-12 * p.omega0);
        }
    }
}
