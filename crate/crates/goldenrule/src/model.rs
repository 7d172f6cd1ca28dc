//! Physical constants, derived transition parameters, and the residue
//! coefficients of the exact-coupling spectral integral.
//!
//! Everything a curve evaluation needs is collected in [`TransitionParams`]:
//! the transition frequency ω₀, the natural coupling cutoff
//! ω_X = (3/2)(c/a₀), their ratio r, the dimensionless coupling constant
//! λ² = (2/π)(2/3)⁹α³, and the golden-rule decay constant Γ = 2πλ²|A₁|.
//!
//! The residue coefficients A₀, A₁, B₀…B₃ are evaluated with all powers of
//! ω_X factored out first (expressions in r only), so no ω_X⁸-scale
//! intermediate is ever formed and the relative error stays flat in r.

use core::fmt;
use num_complex::Complex64;

/// CODATA 2018 values for the three constants the model needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Fine-structure constant α = e²/(4πε₀ħc), dimensionless.
    pub alpha: f64,
    /// Speed of light, m/s.
    pub c: f64,
    /// Bohr radius, m.
    pub a0: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 recommended values.
    pub const CODATA_2018: Self = Self {
        alpha: 7.297_352_569_3e-3,
        c: 2.997_924_58e8,
        a0: 5.291_772_109_03e-11,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

/// Optional replacements for the derived default frequencies.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FrequencyOverrides {
    /// Transition angular frequency ω₀, rad/s.
    pub omega0: Option<f64>,
    /// Coupling cutoff frequency ω_X, rad/s.
    pub omega_x: Option<f64>,
}

/// Derived parameters of the 2p → 1s transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionParams {
    /// Transition angular frequency ω₀ = ω_e − ω_g, rad/s.
    pub omega0: f64,
    /// Natural cutoff frequency ω_X = (3/2)(c/a₀), rad/s.
    pub omega_x: f64,
    /// r = ω₀/ω_X, dimensionless (α/4 for the hydrogen defaults).
    pub ratio: f64,
    /// λ² = (2/π)(2/3)⁹ α³, dimensionless.
    pub lambda_sq: f64,
    /// Golden-rule decay constant Γ = 2πλ²|A₁|, 1/s.
    pub gamma_fermi: f64,
}

/// Residues of the spectral integrand at its three poles, reduced to the
/// coefficients A₀, A₁ (pole at ω₀) and B₀…B₃ (fourth-order poles at ±iω_X).
///
/// Units: `a0c` and `b0` dimensionless, `a1c` and `b1` rad/s, `b2` (rad/s)²,
/// `b3` (rad/s)³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueCoefficients {
    /// A₀ = ω_X⁸(ω_X² − 7ω₀²)/(ω₀² + ω_X²)⁵, real.
    pub a0c: f64,
    /// A₁ = −i ω₀/[1 + r²]⁴, pure negative-imaginary.
    pub a1c: Complex64,
    pub b0: Complex64,
    pub b1: Complex64,
    pub b2: Complex64,
    pub b3: Complex64,
}

/// Invalid parameter passed to `derive_params`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterError {
    pub name: &'static str,
    pub value: f64,
}

impl fmt::Display for ParameterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parameter {} = {} must be positive and finite",
            self.name, self.value
        )
    }
}

impl std::error::Error for ParameterError {}

/// Builds [`TransitionParams`] from the constants, applying any overrides.
///
/// Defaults: ω_X = (3/2)c/a₀ and ω₀ = (3/8)α·c/a₀ (Lyman-α from
/// nonrelativistic Bohr levels, so r = α/4 exactly).
pub fn derive_params(
    constants: PhysicalConstants,
    overrides: FrequencyOverrides,
) -> Result<TransitionParams, ParameterError> {
    let c_over_a0 = constants.c / constants.a0;
    let omega_x = overrides.omega_x.unwrap_or(1.5 * c_over_a0);
    let omega0 = overrides
        .omega0
        .unwrap_or(0.375 * constants.alpha * c_over_a0);
    if !omega_x.is_finite() || omega_x <= 0.0 {
        return Err(ParameterError {
            name: "omega_x",
            value: omega_x,
        });
    }
    if !omega0.is_finite() || omega0 <= 0.0 {
        return Err(ParameterError {
            name: "omega0",
            value: omega0,
        });
    }
    let ratio = omega0 / omega_x;
    let lambda_sq =
        (2.0 / core::f64::consts::PI) * (2.0f64 / 3.0).powi(9) * constants.alpha.powi(3);
    let abs_a1 = omega0 / (1.0 + ratio * ratio).powi(4);
    let gamma_fermi = 2.0 * core::f64::consts::PI * lambda_sq * abs_a1;
    Ok(TransitionParams {
        omega0,
        omega_x,
        ratio,
        lambda_sq,
        gamma_fermi,
    })
}

/// Evaluates A₀, A₁ and B₀…B₃ for the given transition parameters.
///
/// With r = ω₀/ω_X and d = (1 + ir)⁵:
///
/// ```text
/// A₀ = (1 − 7r²)/(1 + r²)⁵
/// A₁ = −i ω₀/(1 + r²)⁴
/// B₀ = −(48 + 30ir − 6r²)            / (96 d)
/// B₁ =  ω_X  (33 + 51ir − 21r² − 3ir³) / (96 d)
/// B₂ = −ω_X² (9 + 21ir − 15r² − 3ir³)  / (96 d)
/// B₃ =  ω_X³ / (96 (1 + ir)²)
/// ```
pub fn residue_coefficients(params: &TransitionParams) -> ResidueCoefficients {
    let r = params.ratio;
    let wx = params.omega_x;
    let one_plus_ir = Complex64::new(1.0, r);
    let d96 = 96.0 * one_plus_ir.powi(5);
    let r2 = r * r;

    let a0c = (1.0 - 7.0 * r2) / (1.0 + r2).powi(5);
    let a1c = Complex64::new(0.0, -params.omega0 / (1.0 + r2).powi(4));

    let b0 = -Complex64::new(48.0 - 6.0 * r2, 30.0 * r) / d96;
    let b1 = wx * Complex64::new(33.0 - 21.0 * r2, 51.0 * r - 3.0 * r2 * r) / d96;
    let b2 = -(wx * wx) * Complex64::new(9.0 - 15.0 * r2, 21.0 * r - 3.0 * r2 * r) / d96;
    let b3 = (wx * wx * wx) / (96.0 * one_plus_ir.powi(2));

    ResidueCoefficients {
        a0c,
        a1c,
        b0,
        b1,
        b2,
        b3,
    }
}

/// Γ = 2πλ²|A₁|, the golden-rule decay constant.
pub fn golden_rule_gamma(params: &TransitionParams, coeffs: &ResidueCoefficients) -> f64 {
    2.0 * core::f64::consts::PI * params.lambda_sq * coeffs.a1c.norm()
}
