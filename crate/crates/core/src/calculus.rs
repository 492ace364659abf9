//! Differential identities of the outage probability P{<q,X> <= x} on the
//! simplex: the gradient via augmented sums, the two-density difference
//! identity, the Kuhn-Tucker stationarity report, and the second derivative
//! under a symmetric exchange perturbation of two equal weights.

use crate::error::{Error, Result};
use crate::hypoexp::{WeightedExpSum, Weights};

/// Stationarity summary at a simplex point: the multiplier, the active set,
/// and how far the partials are from satisfying equality on the active set
/// and the >= inequality off it.
#[derive(Debug, Clone)]
pub struct KtReport {
    pub lambda: f64,
    pub active_set: Vec<usize>,
    pub stationarity_residual: f64,
    pub inactive_violation: f64,
    pub satisfied: bool,
}

/// Gradient of q |-> P{<q,X> <= x}: component k is the negated density of
/// the sum augmented by one extra exponential of weight q_k,
/// d P / d q_k = -f_{<q,X> + q_k X~}(x). Defined for strictly positive q.
pub fn outage_gradient(q: &Weights, x: f64) -> Result<Vec<f64>> {
    for (k, &v) in q.values().iter().enumerate() {
        if v <= 0.0 {
            return Err(Error::Domain(format!(
                "weight {k} is zero; the gradient identity needs strictly positive weights"
            )));
        }
    }
    q.values()
        .iter()
        .map(|&qk| {
            let augmented = WeightedExpSum::from_weights(q, &[qk])?;
            Ok(-augmented.density(x))
        })
        .collect()
}

/// Residual of the difference identity
/// f_{Y+q1 X1}(x) - f_{Y+q2 X2}(x) = (q2-q1) f'_{Y+q1 X1+q2 X2}(x),
/// where Y is the sum of independent exponentials with the given base
/// weights (possibly none). A zero q omits its term. Exactly zero when
/// q1 == q2.
pub fn lemma2_residual(base: &[f64], q1: f64, q2: f64, x: f64) -> Result<f64> {
    if q1 < 0.0 || q2 < 0.0 {
        return Err(Error::Domain(
            "augmentation weights must be non-negative".into(),
        ));
    }
    let side = |qa: f64| -> Result<f64> {
        let mut ws = base.to_vec();
        if qa > 0.0 {
            ws.push(qa);
        }
        Ok(WeightedExpSum::from_raw_weights(&ws)?.density(x))
    };
    let lhs = side(q1)? - side(q2)?;
    let mut ws = base.to_vec();
    if q1 > 0.0 {
        ws.push(q1);
    }
    if q2 > 0.0 {
        ws.push(q2);
    }
    let both = WeightedExpSum::from_raw_weights(&ws)?;
    let rhs = (q2 - q1) * both.density_derivative(x, 1)?;
    Ok((lhs - rhs).abs())
}

/// Check the stationarity conditions at a point of the equality simplex:
/// active partials equal to a common multiplier, inactive partials at least
/// that multiplier. Inactive partials use the q_k -> 0+ limit, which is the
/// density of the unaugmented sum.
pub fn kt_check(q: &Weights, x: f64, tol: f64) -> Result<KtReport> {
    if !q.is_on_equality_simplex(1e-12) {
        return Err(Error::Domain(format!(
            "stationarity is checked on the equality simplex; weights sum to {}",
            q.sum()
        )));
    }
    let values = q.values();
    let active_set: Vec<usize> = (0..values.len()).filter(|&k| values[k] > 0.0).collect();
    if active_set.is_empty() {
        return Err(Error::Domain("no active coordinate".into()));
    }
    let mut active_partials = Vec::with_capacity(active_set.len());
    for &k in &active_set {
        let augmented = WeightedExpSum::from_weights(q, &[values[k]])?;
        active_partials.push(-augmented.density(x));
    }
    let lambda = active_partials.iter().sum::<f64>() / active_partials.len() as f64;
    let stationarity_residual = active_partials
        .iter()
        .map(|p| (p - lambda).abs())
        .fold(0.0, f64::max);
    let inactive_violation = if active_set.len() < values.len() {
        let limit_partial = -WeightedExpSum::from_weights(q, &[])?.density(x);
        (lambda - limit_partial).max(0.0)
    } else {
        0.0
    };
    Ok(KtReport {
        lambda,
        active_set,
        stationarity_residual,
        inactive_violation,
        satisfied: stationarity_residual <= tol && inactive_violation <= tol,
    })
}

/// Second derivative at delta = 0 of delta |-> P{<q_delta,X> <= x} where
/// q_delta moves weight between two equal coordinates i and j
/// (q_delta = q + delta e_i - delta e_j): equals twice the density
/// derivative of the sum augmented by two extra exponentials of that common
/// weight.
pub fn symmetric_perturbation_second_derivative(
    q: &Weights,
    i: usize,
    j: usize,
    x: f64,
) -> Result<f64> {
    let values = q.values();
    if i >= values.len() || j >= values.len() || i == j {
        return Err(Error::Domain(format!(
            "need two distinct coordinates inside the vector, got i={i} j={j} dim={}",
            values.len()
        )));
    }
    let p1 = values[i];
    if p1 <= 0.0 || values[j] != p1 {
        return Err(Error::Domain(
            "the perturbed coordinates must carry the same positive weight".into(),
        ));
    }
    let augmented = WeightedExpSum::from_weights(q, &[p1, p1])?;
    Ok(2.0 * augmented.density_derivative(x, 1)?)
}
