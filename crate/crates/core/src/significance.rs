//! One-sided two-proportion test on estimation accuracy.
//!
//! With `p1` the unfiltered accuracy and `p2` the filtered one, the
//! alternative is `p2 - p1 > 0`. The difference of the two estimated
//! proportions is treated as normal with variance
//! `p1(1-p1)/n1 + p2(1-p2)/n2` (the samples are taken as independent), and
//! the improvement is significant when the lower end of
//! `diff ± z_alpha * se` lies above zero, `z_alpha` being the upper-`alpha`
//! standard normal quantile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default significance level.
pub const DEFAULT_ALPHA: f64 = 0.05;

/// `successes` correct answers out of `trials`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProportionSample {
    pub successes: u64,
    pub trials: u64,
}

impl ProportionSample {
    pub fn new(successes: u64, trials: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidArgument("proportion with zero trials".into()));
        }
        if successes > trials {
            return Err(Error::InvalidArgument(format!(
                "{successes} successes exceed {trials} trials"
            )));
        }
        Ok(ProportionSample { successes, trials })
    }

    pub fn proportion(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    fn variance_of_mean(&self) -> f64 {
        let p = self.proportion();
        p * (1.0 - p) / self.trials as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    /// `p2_hat - p1_hat`.
    pub diff: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub z_alpha: f64,
    pub alpha: f64,
    pub significant: bool,
}

/// Tests whether `filtered` accuracy exceeds `baseline` accuracy.
pub fn compare_accuracy(
    baseline: ProportionSample,
    filtered: ProportionSample,
    alpha: f64,
) -> Result<SignificanceResult> {
    // re-validate: fields are public
    let baseline = ProportionSample::new(baseline.successes, baseline.trials)?;
    let filtered = ProportionSample::new(filtered.successes, filtered.trials)?;
    let z = upper_quantile(alpha)?;
    let diff = filtered.proportion() - baseline.proportion();
    let se = (baseline.variance_of_mean() + filtered.variance_of_mean()).sqrt();
    let half = z * se;
    let ci_low = diff - half;
    Ok(SignificanceResult {
        diff,
        std_error: se,
        ci_low,
        ci_high: diff + half,
        z_alpha: z,
        alpha,
        // se == 0 with diff == 0 lands here as not significant
        significant: ci_low > 0.0,
    })
}

/// `z` with `P(Z > z) = alpha` for a standard normal `Z`.
pub fn upper_quantile(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, 0.5], got {alpha}"
        )));
    }
    Ok(-normal_quantile(alpha))
}

/// Inverse of the standard normal CDF for `p` in `(0, 1)`.
///
/// Acklam's rational approximation; relative error below 1.2e-9 over the
/// whole domain.
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p.is_nan() || p <= 0.0 {
        return if p == 0.0 { f64::NEG_INFINITY } else { f64::NAN };
    }
    if p >= 1.0 {
        return if p == 1.0 { f64::INFINITY } else { f64::NAN };
    }

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    }
}
