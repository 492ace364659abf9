//! Closed-form optimal allocation: spreading power uniformly over the best
//! number k of channels. Provides the argmin over k, the crossing thresholds
//! where the best k changes, the step table those crossings induce, the
//! rate/snr to threshold reduction, and the Gaussian analogue.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypoexp::{erlang_outage, Weights};
use crate::special::normal_cdf;

/// Relative outage gap at or below which two k are treated as tied (broken
/// toward smaller k). Relative, not absolute: in the deep left tail every
/// outage is near zero yet the argmin is still sharply determined. The tie
/// examples quote crossing locations to 6 digits, which leaves relative
/// gaps of order 4e-8 that must still read as ties.
const TIE_TOL: f64 = 1e-7;

/// Result of the argmin over k: the count, the canonical uniform weights,
/// and the outage. `degenerate` marks x <= 0, where every allocation has
/// outage 0 and k is reported as t by convention.
#[derive(Debug, Clone)]
pub struct Allocation {
    pub k: u32,
    pub q: Weights,
    pub outage: f64,
    pub degenerate: bool,
}

/// One tie location: uniform-over-k and uniform-over-(k+1) have equal outage
/// at threshold x_k, with common value outage_k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingRow {
    pub k: u32,
    pub x_k: f64,
    pub outage_k: f64,
}

/// The crossings for k = 1..t-1; x_k decreases as k grows, so the rows cut
/// the threshold axis into the bands where each k is optimal.
#[derive(Debug, Clone)]
pub struct CrossingTable {
    pub t: u32,
    pub rows: Vec<CrossingRow>,
}

impl CrossingTable {
    /// The optimal k for threshold x read off the step structure; exact ties
    /// go to the smaller k.
    pub fn k_at(&self, x: f64) -> u32 {
        1 + self.rows.iter().filter(|r| r.x_k > x).count() as u32
    }
}

/// argmin over k in 1..=t of the uniform-over-k outage at threshold x.
pub fn optimal_k(x: f64, t: u32) -> Allocation {
    assert!(t >= 1, "need at least one channel");
    if x <= 0.0 {
        return Allocation {
            k: t,
            q: Weights::uniform(t as usize, t as usize),
            outage: 0.0,
            degenerate: true,
        };
    }
    let mut best_k = 1;
    let mut best = erlang_outage(1, x);
    for k in 2..=t {
        let outage = erlang_outage(k, x);
        if outage < best * (1.0 - TIE_TOL) {
            best_k = k;
            best = outage;
        }
    }
    Allocation {
        k: best_k,
        q: Weights::uniform(best_k as usize, t as usize),
        outage: best,
        degenerate: false,
    }
}

/// The unique threshold where uniform-over-k and uniform-over-(k+1) tie,
/// and the common outage there. Uniqueness of the sign change is verified
/// on a grid before bisecting.
pub fn crossing(k: u32) -> (f64, f64) {
    assert!(k >= 1);
    let g = |x: f64| erlang_outage(k, x) - erlang_outage(k + 1, x);
    let lo0 = 1.0 / f64::from(k + 1);
    let hi0 = 10.0 + f64::from(k + 1).ln();
    const GRID: usize = 2000;
    let mut bracket = None;
    let mut changes = 0;
    let mut prev_x = lo0;
    let mut prev_sign = g(lo0) > 0.0;
    for i in 1..=GRID {
        let x = lo0 + (hi0 - lo0) * i as f64 / GRID as f64;
        let sign = g(x) > 0.0;
        if sign != prev_sign {
            changes += 1;
            if bracket.is_none() {
                bracket = Some((prev_x, x));
            }
        }
        prev_x = x;
        prev_sign = sign;
    }
    assert_eq!(
        changes, 1,
        "tie of k={k} and k+1 is not a single sign change"
    );
    let (mut lo, mut hi) = bracket.unwrap();
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x_k = 0.5 * (lo + hi);
    (x_k, erlang_outage(k, x_k))
}

/// Crossing rows for k = 1..t-1 (computed in parallel, assembled in order).
pub fn figure1_table(t: u32) -> CrossingTable {
    assert!(t >= 2, "the step table needs t >= 2");
    let rows: Vec<CrossingRow> = (1..t)
        .into_par_iter()
        .map(|k| {
            let (x_k, outage_k) = crossing(k);
            CrossingRow { k, x_k, outage_k }
        })
        .collect();
    CrossingTable { t, rows }
}

/// Threshold x = (e^R - 1)/snr for a target rate R (nats) at the given snr.
pub fn rate_to_threshold(rate_nats: f64, snr: f64) -> Result<f64> {
    if !(snr > 0.0) {
        return Err(Error::Domain(format!("snr must be positive, got {snr}")));
    }
    if !(rate_nats >= 0.0) {
        return Err(Error::Domain(format!(
            "rate must be non-negative, got {rate_nats}"
        )));
    }
    Ok(rate_nats.exp_m1() / snr)
}

/// Minimizer of P{<q,Z> <= x} over the simplex when the fading is standard
/// normal instead of exponential: all power on one channel for x > 0,
/// uniform for x < 0, and the constant 1/2 (any q; uniform returned) at
/// x = 0. The outage is Phi(x / ||q||_2).
pub fn gaussian_minimizer(x: f64, t: u32) -> (Weights, f64) {
    assert!(t >= 1);
    let t_us = t as usize;
    if x > 0.0 {
        (Weights::uniform(1, t_us), normal_cdf(x))
    } else if x < 0.0 {
        (
            Weights::uniform(t_us, t_us),
            normal_cdf(x * f64::from(t).sqrt()),
        )
    } else {
        (Weights::uniform(t_us, t_us), 0.5)
    }
}
