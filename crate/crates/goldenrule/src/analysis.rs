//! Survival-probability curves per model, deviation scans, and regime
//! timescales.
//!
//! Curve sampling is deterministic (fixed grids, fixed refinement order), so
//! outputs are bit-reproducible run to run.

use core::fmt;

use crate::closedform::{self, ClosedFormError};
use crate::model::{ResidueCoefficients, TransitionParams};

/// First-order perturbation theory stops being trustworthy once the decay
/// probability exceeds this; samples beyond it are flagged, never silently
/// reported.
pub const FIRST_ORDER_DECAY_LIMIT: f64 = 1e-3;

/// The survival-probability models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelId {
    /// Exact coupling, first order (closed form `exact_if`).
    Exact,
    /// Regularised dipole approximation (cutoff independent).
    DipoleRegularized,
    /// Dipole approximation with a hard frequency cutoff.
    DipoleCutoff { omega_c: f64 },
    /// P = 1 − Γt.
    GoldenRuleLinear,
    /// P = Z·e^{−Γt} with Z = 1 − 4.39λ² (reference constant from the
    /// nonperturbative resolvent solution).
    GoldenRuleExponential,
    /// P = 1 − λ²(ω_X t)²/6.
    Zeno,
}

impl ModelId {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::DipoleRegularized => "dipole_regularized",
            Self::DipoleCutoff { .. } => "dipole_cutoff",
            Self::GoldenRuleLinear => "golden_rule_linear",
            Self::GoldenRuleExponential => "golden_rule_exponential",
            Self::Zeno => "zeno",
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Grid spacing for curve sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSpacing {
    Log,
    Linear,
}

/// A sampled (t, P_surv) series tagged with its model identity.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayCurve {
    pub model: ModelId,
    /// Strictly increasing sample times, s.
    pub times: Vec<f64>,
    /// Survival probability at each sample.
    pub survival: Vec<f64>,
}

impl DecayCurve {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Decay probability 1 − P at sample i.
    pub fn decay(&self, i: usize) -> f64 {
        1.0 - self.survival[i]
    }

    /// Marks samples whose decay probability exceeds the first-order
    /// validity limit.
    pub fn validity_flags(&self) -> Vec<bool> {
        self.survival
            .iter()
            .map(|&p| 1.0 - p > FIRST_ORDER_DECAY_LIMIT)
            .collect()
    }
}

/// Detection thresholds for [`regime_report_with`].
///
/// `zeno_exit_rel` is the relative departure from the Zeno quadratic that
/// defines the cutoff time τ_X. `golden_rule_rel` is the relative band
/// around Γt inside which the exact decay must stay for good; 0.10
/// reproduces the published transition picture (golden rule
/// indistinguishable after ~1e-15 s), since the exact decay approaches Γt
/// only like 1 + C/(2π|A₁|t) with C ≈ 8.8.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeThresholds {
    pub zeno_exit_rel: f64,
    pub golden_rule_rel: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            zeno_exit_rel: 0.10,
            golden_rule_rel: 0.10,
        }
    }
}

/// Regime timescales and the golden-rule deviation scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    /// Curvature timescale of the short-time quadratic decay, √6/(λω_X), s.
    pub tau_zeno: f64,
    /// Earliest time the exact decay departs from the Zeno quadratic by
    /// more than the threshold (the cutoff time τ_X), s.
    pub tau_cutoff: f64,
    /// Earliest time after which the exact decay stays within the
    /// golden-rule band around Γt, s.
    pub transition_time: f64,
    /// Max |P_exact − P_golden| over the scan grid.
    pub max_deviation: f64,
    /// Time of the maximum deviation, s.
    pub max_deviation_time: f64,
    /// τ_X/τ_Z, the strength of the Zeno effect.
    pub zeno_strength: f64,
}

/// Analysis failures.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisError {
    /// t outside a model's domain.
    Domain { model: &'static str, t: f64 },
    /// Curve grids differ where identical grids are required.
    GridMismatch,
    /// Invalid sampling request.
    BadGrid { reason: &'static str },
    /// A regime timescale could not be detected on its scan grid.
    Detection { timescale: &'static str },
    /// Propagated closed-form failure.
    ClosedForm(ClosedFormError),
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Domain { model, t } => write!(f, "model {model}: t = {t:e} out of domain"),
            Self::GridMismatch => write!(f, "curves must share an identical time grid"),
            Self::BadGrid { reason } => write!(f, "invalid grid: {reason}"),
            Self::Detection { timescale } => {
                write!(f, "detection grid exhausted for {timescale}")
            }
            Self::ClosedForm(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for AnalysisError {}

impl From<ClosedFormError> for AnalysisError {
    fn from(e: ClosedFormError) -> Self {
        Self::ClosedForm(e)
    }
}

/// Survival probability of `model` at time t; P(0) = 1 for every model.
pub fn survival(
    model: ModelId,
    params: &TransitionParams,
    coeffs: &ResidueCoefficients,
    t: f64,
) -> Result<f64, AnalysisError> {
    if !t.is_finite() || t < 0.0 {
        return Err(AnalysisError::Domain {
            model: model.label(),
            t,
        });
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let p = match model {
        ModelId::Exact => {
            let v = closedform::exact_if(params, coeffs, t)?.value;
            1.0 - params.lambda_sq * t * t * v
        }
        ModelId::DipoleRegularized => {
            let v = closedform::dipole_regularized(params, t)?.value;
            1.0 - params.lambda_sq * t * t * v
        }
        ModelId::DipoleCutoff { omega_c } => {
            let v = closedform::truncated_dipole_closed(params, omega_c, t)?.value;
            1.0 - params.lambda_sq * t * t * v
        }
        ModelId::GoldenRuleLinear => 1.0 - params.gamma_fermi * t,
        ModelId::GoldenRuleExponential => {
            (1.0 - 4.39 * params.lambda_sq) * (-params.gamma_fermi * t).exp()
        }
        ModelId::Zeno => 1.0 - closedform::zeno_asymptote(params, t),
    };
    Ok(p)
}

/// Samples a survival curve on a log or linear grid of `points` samples.
pub fn sample_curve(
    model: ModelId,
    params: &TransitionParams,
    coeffs: &ResidueCoefficients,
    tmin: f64,
    tmax: f64,
    points: usize,
    spacing: GridSpacing,
) -> Result<DecayCurve, AnalysisError> {
    if tmin.is_nan() || tmax.is_nan() || tmin <= 0.0 || tmax <= tmin {
        return Err(AnalysisError::BadGrid {
            reason: "need 0 < tmin < tmax",
        });
    }
    if points < 2 {
        return Err(AnalysisError::BadGrid {
            reason: "need at least 2 points",
        });
    }
    let times = grid(tmin, tmax, points, spacing);
    let mut surv = Vec::with_capacity(points);
    for &t in &times {
        let p = survival(model, params, coeffs, t)?;
        if !p.is_finite() {
            return Err(AnalysisError::Domain {
                model: model.label(),
                t,
            });
        }
        surv.push(p);
    }
    Ok(DecayCurve {
        model,
        times,
        survival: surv,
    })
}

fn grid(tmin: f64, tmax: f64, points: usize, spacing: GridSpacing) -> Vec<f64> {
    let n = points;
    (0..n)
        .map(|i| {
            let frac = i as f64 / (n - 1) as f64;
            match spacing {
                GridSpacing::Log => tmin * (tmax / tmin).powf(frac),
                GridSpacing::Linear => tmin + (tmax - tmin) * frac,
            }
        })
        .collect()
}

/// Time and value of max |P_A − P_B| over the shared grid, refined by three
/// rounds of local bisection around the coarse maximum.
pub fn max_deviation(
    params: &TransitionParams,
    coeffs: &ResidueCoefficients,
    curve_a: &DecayCurve,
    curve_b: &DecayCurve,
) -> Result<(f64, f64), AnalysisError> {
    if curve_a.len() != curve_b.len()
        || curve_a
            .times
            .iter()
            .zip(&curve_b.times)
            .any(|(x, y)| x.to_bits() != y.to_bits())
    {
        return Err(AnalysisError::GridMismatch);
    }
    let mut best_i = 0;
    let mut best = -1.0;
    for i in 0..curve_a.len() {
        let d = (curve_a.survival[i] - curve_b.survival[i]).abs();
        if d > best {
            best = d;
            best_i = i;
        }
    }
    let mut lo = curve_a.times[best_i.saturating_sub(1)];
    let mut hi = curve_a.times[(best_i + 1).min(curve_a.len() - 1)];
    let mut best_t = curve_a.times[best_i];
    let gap = |t: f64| -> Result<f64, AnalysisError> {
        let a = survival(curve_a.model, params, coeffs, t)?;
        let b = survival(curve_b.model, params, coeffs, t)?;
        Ok((a - b).abs())
    };
    for _ in 0..3 {
        let mut round_best = best;
        let mut round_t = best_t;
        let samples = 11;
        for j in 0..=samples {
            let t = lo + (hi - lo) * j as f64 / samples as f64;
            let d = gap(t)?;
            if d > round_best {
                round_best = d;
                round_t = t;
            }
        }
        let step = (hi - lo) / samples as f64;
        lo = (round_t - step).max(lo);
        hi = (round_t + step).min(hi);
        best = round_best;
        best_t = round_t;
    }
    Ok((best_t, best))
}

/// Regime report with the default thresholds.
pub fn regime_report(
    params: &TransitionParams,
    coeffs: &ResidueCoefficients,
) -> Result<RegimeReport, AnalysisError> {
    regime_report_with(params, coeffs, RegimeThresholds::default())
}

/// Extracts τ_Z, τ_X, the golden-rule convergence time, and the deviation
/// scan against the golden-rule line.
pub fn regime_report_with(
    params: &TransitionParams,
    coeffs: &ResidueCoefficients,
    thresholds: RegimeThresholds,
) -> Result<RegimeReport, AnalysisError> {
    let tau_zeno = 6.0f64.sqrt() / (params.lambda_sq.sqrt() * params.omega_x);

    let decay_exact = |t: f64| -> Result<f64, AnalysisError> {
        Ok(params.lambda_sq * t * t * closedform::exact_if(params, coeffs, t)?.value)
    };

    // τ_X: first departure of the exact decay from the Zeno quadratic.
    let zeno_gap = |t: f64| -> Result<f64, AnalysisError> {
        let z = closedform::zeno_asymptote(params, t);
        Ok((decay_exact(t)? / z - 1.0).abs())
    };
    let tau_cutoff = first_crossing_up(
        zeno_gap,
        1e-4 / params.omega_x,
        100.0 / params.omega_x,
        400,
        thresholds.zeno_exit_rel,
        "tau_cutoff",
    )?;

    // Golden-rule convergence: last departure from the Γt band.
    let golden_gap = |t: f64| -> Result<f64, AnalysisError> {
        Ok((decay_exact(t)? / (params.gamma_fermi * t) - 1.0).abs())
    };
    let transition_time = last_crossing_down(
        golden_gap,
        1e-18,
        1e-12,
        600,
        thresholds.golden_rule_rel,
        "transition_time",
    )?;

    // Deviation scan: exact vs golden-rule line, absolute probability gap.
    let exact = sample_curve(
        ModelId::Exact,
        params,
        coeffs,
        1e-20,
        1e-13,
        2000,
        GridSpacing::Log,
    )?;
    let golden = sample_curve(
        ModelId::GoldenRuleLinear,
        params,
        coeffs,
        1e-20,
        1e-13,
        2000,
        GridSpacing::Log,
    )?;
    let (max_deviation_time, max_dev) = max_deviation(params, coeffs, &exact, &golden)?;

    Ok(RegimeReport {
        tau_zeno,
        tau_cutoff,
        transition_time,
        max_deviation: max_dev,
        max_deviation_time,
        zeno_strength: tau_cutoff / tau_zeno,
    })
}

/// Earliest t in [lo, hi] where `f` first exceeds `threshold`, refined by
/// bisection between the bracketing grid points.
fn first_crossing_up<F: Fn(f64) -> Result<f64, AnalysisError>>(
    f: F,
    lo: f64,
    hi: f64,
    points: usize,
    threshold: f64,
    timescale: &'static str,
) -> Result<f64, AnalysisError> {
    let ts = grid(lo, hi, points, GridSpacing::Log);
    let mut prev = ts[0];
    if f(prev)? > threshold {
        return Err(AnalysisError::Detection { timescale });
    }
    for &t in &ts[1..] {
        if f(t)? > threshold {
            let (mut a, mut b) = (prev, t);
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                if f(mid)? > threshold {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            return Ok(0.5 * (a + b));
        }
        prev = t;
    }
    Err(AnalysisError::Detection { timescale })
}

/// Earliest t in [lo, hi] after which `f` stays at or below `threshold`,
/// refined by bisection around the last excursion.
fn last_crossing_down<F: Fn(f64) -> Result<f64, AnalysisError>>(
    f: F,
    lo: f64,
    hi: f64,
    points: usize,
    threshold: f64,
    timescale: &'static str,
) -> Result<f64, AnalysisError> {
    let ts = grid(lo, hi, points, GridSpacing::Log);
    let mut last_above: Option<usize> = None;
    for (i, &t) in ts.iter().enumerate() {
        if f(t)? > threshold {
            last_above = Some(i);
        }
    }
    match last_above {
        None => Err(AnalysisError::Detection { timescale }),
        Some(i) if i + 1 == ts.len() => Err(AnalysisError::Detection { timescale }),
        Some(i) => {
            let (mut a, mut b) = (ts[i], ts[i + 1]);
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                if f(mid)? > threshold {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            Ok(0.5 * (a + b))
        }
    }
}
