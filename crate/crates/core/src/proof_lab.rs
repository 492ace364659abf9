//! One-parameter slices through the weight simplex and the machinery that
//! decides where the outage can turn along them.
//!
//! The family under study is q = (p, pbar, ..., pbar) with k copies of
//! pbar = (1-p)/k. Everything here reduces to sign questions about the first
//! derivative of one augmented density, which this module evaluates through a
//! cancellation-free split ([`gk_eval`]) and cross-checks against the
//! partial-fraction route.

use rayon::prelude::*;

use crate::calculus;
use crate::error::{Error, Result};
use crate::hypoexp::{WeightedExpSum, Weights};
use crate::special::{ln_gamma, Kahan};

/// Slope magnitudes at or below this read as zero when counting sign
/// changes; suppresses roundoff crossings along flat stretches.
const SLOPE_EPS: f64 = 1e-13;

/// Step for the second difference across the equal-split point. Large enough
/// that the probe laws keep their two rates well separated (the
/// partial-fraction evaluation stays well conditioned), small enough that
/// the h^2 truncation term cannot flip the sign anywhere we look.
const CURV_STEP: f64 = 4e-3;

/// Curvature magnitudes below the resolution of the second difference read
/// as zero.
const CURV_EPS: f64 = 1e-4;

/// Poisson terms below this stop the two-sided series in [`poisson_split`];
/// the neglected tail mass is orders of magnitude under roundoff.
const PMF_FLOOR: f64 = 1e-22;

/// One-parameter family of weight vectors (p, pbar, ..., pbar) with k copies
/// of pbar = (1-p)/k, evaluated at a fixed threshold x. For p in
/// (0, 1/(k+1)) the distinguished weight is the smaller one; at p = 1/(k+1)
/// all k+1 weights agree.
#[derive(Clone, Copy, Debug)]
pub struct TwoValueFamily {
    k: u32,
    x: f64,
}

/// What a sweep along the family found.
#[derive(Clone, Debug)]
pub struct ScanReport {
    /// Interior stationary points of p -> outage, ascending, refined by
    /// bisection on the analytic slope.
    pub extrema: Vec<f64>,
    /// Number of entries in `extrema`.
    pub extrema_count: usize,
    /// Sign (-1, 0, +1) of d(outage)/dp at p = 0+.
    pub sign_at_zero: i8,
    /// Sign (-1, 0, +1) of the second derivative of the outage at the
    /// equal-split point p = 1/(k+1).
    pub curvature_at_uniform: i8,
}

/// Root of the split-law derivative together with the bound it must clear.
#[derive(Clone, Copy, Debug)]
pub struct XStarResult {
    /// Family parameter the root belongs to.
    pub p: f64,
    /// Rate gap 1/p - 1/pbar between the two exponential groups.
    pub delta: f64,
    /// Unique zero of [`gk_eval`] in x, i.e. the mode of the law
    /// p(X1+X2) + pbar(Y1+...+Y_{k+1}).
    pub xstar: f64,
    /// 1 + p(1-p)/((1-p)^2 + p^2 k); the root stays strictly above it.
    pub lower_bound: f64,
    /// Stationarity defect at the returned root: the sign bracket from
    /// [`gk_eval`], scaled by the common magnitude of both sides of the
    /// root identity (capped at 1 so tiny scales do not hide a miss).
    pub residual: f64,
}

impl TwoValueFamily {
    /// k >= 1 equal weights next to the distinguished one; threshold x > 0.
    pub fn new(k: u32, x: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain(
                "two-value family needs at least one equal weight".into(),
            ));
        }
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::Domain(format!(
                "threshold must be positive and finite, got {x}"
            )));
        }
        Ok(Self { k, x })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// Upper end of the parameter range: at p = 1/(k+1) all weights agree.
    pub fn p_uniform(&self) -> f64 {
        1.0 / (self.k as f64 + 1.0)
    }

    /// Outage of the family member at p: the cdf of
    /// p X1 + pbar (X2 + ... + X_{k+1}) at x. Accepts the closed range
    /// [0, 1/(k+1)]; at p = 0 the law degenerates to k equal weights.
    pub fn outage(&self, p: f64) -> Result<f64> {
        if !(0.0..=self.p_uniform()).contains(&p) {
            return Err(Error::Domain(format!(
                "p = {p} outside [0, {}]",
                self.p_uniform()
            )));
        }
        family_cdf(self.k, self.x, p)
    }

    /// Sweeps p over an interior grid, counts sign changes of the slope of
    /// p -> outage, refines each to a stationary point, and records the two
    /// boundary signs that pin down where the minimum can sit.
    ///
    /// A sign change is only counted between nodes where the slope clears
    /// the roundoff floor on both sides.
    pub fn scan(&self, grid_size: usize) -> Result<ScanReport> {
        assert!(grid_size >= 100, "scan grid too coarse");
        let (k, x) = (self.k, self.x);
        let pmax = self.p_uniform();
        let slopes = (1..grid_size)
            .into_par_iter()
            .map(|i| {
                let p = pmax * i as f64 / grid_size as f64;
                family_slope(k, x, p).map(|s| (p, s))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut extrema = Vec::new();
        let mut last: Option<(f64, f64)> = None;
        for &(p, s) in &slopes {
            if s.abs() <= SLOPE_EPS {
                continue;
            }
            if let Some((pl, sl)) = last {
                if (sl < 0.0) != (s < 0.0) {
                    extrema.push(refine_stationary(k, x, pl, p, sl)?);
                }
            }
            last = Some((p, s));
        }

        Ok(ScanReport {
            extrema_count: extrema.len(),
            extrema,
            sign_at_zero: sign_within(boundary_slope(k, x)?, SLOPE_EPS),
            curvature_at_uniform: sign_within(uniform_curvature(k, x)?, CURV_EPS),
        })
    }
}

/// First derivative at x of the density of p(X1+X2) + pbar(Y1+...+Y_{k+1}),
/// pbar = (1-p)/k: the augmented law whose sign drives the family slope
/// through d(outage)/dp = (p - pbar) f'(x).
///
/// The partial-fraction form of f' hides an alternating exponential
/// remainder; regrouped, it becomes a positive Poisson expectation and the
/// whole derivative reads
///
///   f'(x) = A(x) (a tau(y) + sigma(y)) / (d p)
///
/// with d = 1/p - 1/pbar > 0, y = d x, a = d (p - x)/(k+1),
/// tau = (k+1) E[1/(k+1+J)], sigma = E[J/(k+1+J)] = 1 - tau for
/// J ~ Poisson(y), and a positive amplitude A. Every quantity is a sum of
/// same-sign terms except the bracket a tau + sigma, which carries the one
/// sign change (at the mode of the law), so the evaluation is
/// cancellation-free exactly where its sign matters.
///
/// At p = 1/(k+1) the two rates merge and the split is singular; that case
/// routes through the derivative of the single-weight law with k+3 stages.
pub fn gk_eval(p: f64, k: u32, x: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "evaluation point must be positive and finite, got {x}"
        )));
    }
    let kf = k as f64;
    // head = 1 - p(k+1): positive strictly inside the range, zero when the
    // distinguished weight meets the others.
    let head = 1.0 - p * (kf + 1.0);
    if !(p > 0.0) || head < -4.0 * f64::EPSILON {
        return Err(Error::Domain(format!(
            "p must lie in (0, 1/(k+1)], got {p}"
        )));
    }
    if head <= 4.0 * f64::EPSILON {
        return WeightedExpSum::single(p, k + 3)?.density_derivative(x, 1);
    }

    let pbar = (1.0 - p) / kf;
    let delta = head / (p * (1.0 - p));
    let y = delta * x;
    let (tau, sigma) = poisson_split(kf + 1.0, y);
    let a = delta * (p - x) / (kf + 1.0);
    let bracket = a * tau + sigma;
    // A = (k+1) p^-2 e^-z z^(k+1) / (k+1)!  with z = x / pbar
    let z = x / pbar;
    let amp = (kf + 1.0) / (p * p) * (-z + (kf + 1.0) * z.ln() - ln_gamma(kf + 2.0)).exp();
    Ok(amp * bracket / (delta * p))
}

/// Unique zero in x of [`gk_eval`] for the given (p, k), located by bisection
/// on the sign bracket down to f64 resolution, together with the closed-form
/// lower bound it is checked against.
pub fn xstar(p: f64, k: u32) -> Result<XStarResult> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let kf = k as f64;
    let head = 1.0 - p * (kf + 1.0);
    if !(p > 0.0) || head <= 0.0 {
        return Err(Error::Domain(format!(
            "p must lie strictly inside (0, 1/(k+1)), got {p}"
        )));
    }
    let pbar = (1.0 - p) / kf;
    let delta = head / (p * (1.0 - p));
    let bracket = |x: f64| {
        let (tau, sigma) = poisson_split(kf + 1.0, delta * x);
        delta * (p - x) / (kf + 1.0) * tau + sigma
    };

    // The bracket is positive for small x and turns negative exactly once.
    // The law is positively skewed, so its mode sits below the mean; one
    // standard deviation above is already on the negative side, but expand
    // defensively.
    let mean = 2.0 * p + (kf + 1.0) * pbar;
    let sd = (2.0 * p * p + (kf + 1.0) * pbar * pbar).sqrt();
    let mut hi = mean + sd;
    let mut tries = 0;
    while bracket(hi) >= 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 64 {
            return Err(Error::Accuracy(
                "sign bracket for the derivative root did not turn negative".into(),
            ));
        }
    }
    let mut lo = 1e-12;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if bracket(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);

    // Both sides of the root identity share the magnitude y^(k+1)/(k+1)!;
    // scale the defect by it (capped at 1) so the residual is comparable
    // across parameter ranges where that magnitude spans many decades.
    let y = delta * root;
    let common = ((kf + 1.0) * y.ln() - ln_gamma(kf + 2.0)).exp().min(1.0);
    Ok(XStarResult {
        p,
        delta,
        xstar: root,
        lower_bound: 1.0 + p * (1.0 - p) / ((1.0 - p) * (1.0 - p) + p * p * kf),
        residual: bracket(root).abs() * common,
    })
}

/// Argmax over p of the two-term outage P{p X1 + (1-p) X2 <= x}, returned as
/// (p, outage) with p canonicalized to [0, 1/2] (the outage is symmetric
/// under p <-> 1-p). Grid scan over [0, 1/2] followed by golden-section
/// refinement inside the best cell; corner candidates are kept in the race
/// so a boundary maximizer comes back exactly 0 or 1/2.
pub fn find_max_t2(x: f64, grid_size: usize) -> (f64, f64) {
    assert!(
        grid_size >= 1000,
        "grid too coarse for the two-term maximizer"
    );
    assert!(x.is_finite() && x > 0.0, "threshold must be positive");
    let n = grid_size;
    let vals: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|i| two_term_outage(0.5 * i as f64 / n as f64, x))
        .collect();
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for (i, &v) in vals.iter().enumerate() {
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let cell = |i: usize| 0.5 * i as f64 / n as f64;
    let a = cell(best_i.saturating_sub(1));
    let b = cell((best_i + 1).min(n));
    let (mut p_hat, mut f_hat) = golden_max(|p| two_term_outage(p, x), a, b);
    for (pc, fc) in [(0.0, vals[0]), (0.5, vals[n])] {
        if fc > f_hat {
            p_hat = pc;
            f_hat = fc;
        }
    }
    (p_hat, f_hat)
}

/// Slope of the family outage in p, by the chain rule on the simplex
/// gradient: the distinguished weight moves at rate 1, each of the k equal
/// ones at rate -1/k. Interior p only (the gradient needs every weight
/// positive).
pub(crate) fn family_slope(k: u32, x: f64, p: f64) -> Result<f64> {
    let q = Weights::new(family_weights(k, p))?;
    let g = calculus::outage_gradient(&q, x)?;
    let rest: f64 = g[1..].iter().sum();
    Ok(g[0] - rest / k as f64)
}

/// Limit of the family slope at p -> 0+. The two gradient terms collapse to
/// densities with k and k+1 equal weights, and their difference equals
/// -(1/k) times the derivative of the (k+1)-term density.
fn boundary_slope(k: u32, x: f64) -> Result<f64> {
    let law = WeightedExpSum::single(1.0 / k as f64, k + 1)?;
    Ok(-law.density_derivative(x, 1)? / k as f64)
}

/// Centered second difference of the family outage across the equal-split
/// point. The family formula keeps defining a distribution for p slightly
/// above 1/(k+1), so the stencil may straddle the boundary of the scan
/// range; only the proof's parametrization stops there, not the law.
fn uniform_curvature(k: u32, x: f64) -> Result<f64> {
    let pmax = 1.0 / (k as f64 + 1.0);
    let h = CURV_STEP.min(0.25 * pmax);
    let mid = family_cdf(k, x, pmax)?;
    let left = family_cdf(k, x, pmax - h)?;
    let right = family_cdf(k, x, pmax + h)?;
    Ok((left + right - 2.0 * mid) / (h * h))
}

fn family_weights(k: u32, p: f64) -> Vec<f64> {
    let mut v = vec![(1.0 - p) / k as f64; k as usize + 1];
    v[0] = p;
    v
}

fn family_cdf(k: u32, x: f64, p: f64) -> Result<f64> {
    let law = WeightedExpSum::from_weights(&Weights::new(family_weights(k, p))?, &[])?;
    Ok(law.cdf(x))
}

fn two_term_outage(p: f64, x: f64) -> f64 {
    let law = WeightedExpSum::from_raw_weights(&[p, 1.0 - p])
        .expect("a two-term law with max weight >= 1/2 always exists");
    law.cdf(x)
}

/// Bisects the family slope to a stationary point inside [lo, hi], given the
/// slope sign at lo. Runs to f64 resolution of the bracket.
fn refine_stationary(k: u32, x: f64, mut lo: f64, mut hi: f64, slope_lo: f64) -> Result<f64> {
    let neg_left = slope_lo < 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (family_slope(k, x, mid)? < 0.0) == neg_left {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// tau = (k+1) E[1/(k+1+J)] and sigma = E[J/(k+1+J)] for J ~ Poisson(y),
/// accumulated outward from the modal term so every summand is positive.
/// Both moments are normalized by the summed mass, which cancels the
/// log-space seeding error of the pmf (it grows with y ln y) and keeps
/// tau + sigma = 1 to roundoff at every y.
fn poisson_split(kp1: f64, y: f64) -> (f64, f64) {
    debug_assert!(y > 0.0, "poisson_split needs y > 0");
    let j0 = y.floor();
    let p0 = (-y + j0 * y.ln() - ln_gamma(j0 + 1.0)).exp();
    let mut tau = Kahan::new();
    let mut sigma = Kahan::new();
    let mut mass = Kahan::new();

    let mut pmf = p0;
    let mut j = j0;
    loop {
        tau.add(pmf * kp1 / (kp1 + j));
        sigma.add(pmf * j / (kp1 + j));
        mass.add(pmf);
        j += 1.0;
        pmf *= y / j;
        if pmf < PMF_FLOOR && j > y {
            break;
        }
    }
    pmf = p0;
    j = j0;
    while j > 0.0 {
        pmf *= j / y;
        j -= 1.0;
        tau.add(pmf * kp1 / (kp1 + j));
        sigma.add(pmf * j / (kp1 + j));
        mass.add(pmf);
        if pmf < PMF_FLOOR {
            break;
        }
    }
    (tau.value() / mass.value(), sigma.value() / mass.value())
}

/// Remainder of the exponential series at -y after its first k+1 terms,
/// sum_{l >= k+1} (-y)^l / l!, reassembled from the positive split so the
/// alternation never cancels.
#[cfg(test)]
pub(crate) fn exp_series_remainder(k: u32, y: f64) -> f64 {
    let kp1 = k as f64 + 1.0;
    let (tau, _) = poisson_split(kp1, y);
    let lead = (kp1 * y.ln() - ln_gamma(kp1 + 1.0)).exp();
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign * tau * lead
}

fn sign_within(v: f64, eps: f64) -> i8 {
    if v > eps {
        1
    } else if v < -eps {
        -1
    } else {
        0
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..120 {
        if b - a < 1e-13 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let p = 0.5 * (a + b);
    (p, f(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypoexp::erlang_outage;

    #[test]
    fn family_outage_reference_points() {
        let fam = TwoValueFamily::new(1, 1.0).unwrap();
        // equal split: two stages at weight 1/2
        let expect = 1.0 - 3.0 * (-2.0f64).exp();
        assert!((fam.outage(0.5).unwrap() - expect).abs() < 1e-14);
        // p = 0 collapses to a single unit exponential
        let expect = 1.0 - (-1.0f64).exp();
        assert!((fam.outage(0.0).unwrap() - expect).abs() < 1e-14);

        let fam = TwoValueFamily::new(2, 0.5).unwrap();
        let u = fam.p_uniform();
        assert!((fam.outage(u).unwrap() - erlang_outage(3, 0.5)).abs() < 1e-14);

        assert!(fam.outage(-0.1).is_err());
        assert!(fam.outage(0.4).is_err());
        assert!(TwoValueFamily::new(0, 1.0).is_err());
        assert!(TwoValueFamily::new(1, 0.0).is_err());
    }

    #[test]
    fn slope_matches_split_derivative_identity() {
        // d(outage)/dp equals (p - pbar) times the split-law derivative;
        // the two routes share no code past the weight vector.
        for (k, p, x) in [
            (1u32, 0.3, 0.8),
            (2, 0.2, 1.2),
            (5, 0.1, 1.0),
            (3, 0.05, 2.0),
        ] {
            let pbar = (1.0 - p) / k as f64;
            let lhs = family_slope(k, x, p).unwrap();
            let rhs = (p - pbar) * gk_eval(p, k, x).unwrap();
            let scale = lhs.abs().max(rhs.abs()).max(1e-6);
            assert!(
                (lhs - rhs).abs() <= 1e-9 * scale,
                "k={k} p={p} x={x}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn split_derivative_matches_partial_fraction_route() {
        for (k, p) in [(1u32, 0.3), (2, 0.2), (5, 0.12), (10, 0.05)] {
            let pbar = (1.0 - p) / k as f64;
            let mut w = vec![pbar; k as usize + 3];
            w[0] = p;
            w[1] = p;
            let law = WeightedExpSum::from_raw_weights(&w).unwrap();
            // probe clearly off the mode on both sides so the relative
            // comparison has a healthy denominator
            for x in [0.5 * law.mean(), 2.0 * law.mean()] {
                let direct = law.density_derivative(x, 1).unwrap();
                let split = gk_eval(p, k, x).unwrap();
                assert!(
                    (split - direct).abs() <= 1e-8 * direct.abs().max(split.abs()),
                    "k={k} p={p} x={x}: {split} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn split_derivative_merges_continuously_at_uniform() {
        for k in [1u32, 2, 5] {
            let pm = 1.0 / (k as f64 + 1.0);
            for x in [0.5, 1.0, 1.9] {
                let merged = gk_eval(pm, k, x).unwrap();
                let near = gk_eval(pm * (1.0 - 1e-9), k, x).unwrap();
                let scale = merged.abs().max(near.abs()).max(1e-12);
                assert!(
                    (merged - near).abs() <= 1e-6 * scale,
                    "k={k} x={x}: {merged} vs {near}"
                );
            }
        }
        // outside the closed range
        assert!(gk_eval(0.6, 1, 1.0).is_err());
        assert!(gk_eval(0.0, 1, 1.0).is_err());
        assert!(gk_eval(0.2, 1, 0.0).is_err());
    }

    #[test]
    fn series_remainder_reference() {
        // remainder after the constant and linear terms at y = 1: 1/e
        let t = exp_series_remainder(1, 1.0);
        assert!((t - (-1.0f64).exp()).abs() < 1e-15);
        // direct small-y cross-check, k = 2 (remainder is negative)
        let y: f64 = 0.35;
        let direct = (-y).exp() - (1.0 - y + y * y / 2.0);
        let split = exp_series_remainder(2, y);
        assert!((split - direct).abs() < 1e-12 * direct.abs());
        // the two Poisson moments are exact complements
        for y in [0.01, 0.7, 3.0, 42.0, 800.0] {
            let (tau, sigma) = poisson_split(4.0, y);
            assert!((tau + sigma - 1.0).abs() < 1e-13, "y={y}");
        }
    }

    #[test]
    fn boundary_sign_flips_at_unit_threshold() {
        for k in [1u32, 2, 5] {
            let below = TwoValueFamily::new(k, 1.0 - 1e-3).unwrap();
            let above = TwoValueFamily::new(k, 1.0 + 1e-3).unwrap();
            assert_eq!(below.scan(200).unwrap().sign_at_zero, -1, "k={k}");
            assert_eq!(above.scan(200).unwrap().sign_at_zero, 1, "k={k}");
        }
    }

    #[test]
    fn uniform_curvature_sign_and_flip() {
        // k = 1 flips at x = 3/2
        let fam = |x| TwoValueFamily::new(1, x).unwrap();
        assert_eq!(fam(1.4).scan(200).unwrap().curvature_at_uniform, 1);
        assert_eq!(fam(1.6).scan(200).unwrap().curvature_at_uniform, -1);
        for k in [2u32, 5] {
            let flip = (k as f64 + 2.0) / (k as f64 + 1.0);
            let lo = TwoValueFamily::new(k, flip - 1e-3).unwrap();
            let hi = TwoValueFamily::new(k, flip + 1e-3).unwrap();
            assert_eq!(lo.scan(200).unwrap().curvature_at_uniform, 1, "k={k}");
            assert_eq!(hi.scan(200).unwrap().curvature_at_uniform, -1, "k={k}");
        }
        // the second difference tracks the analytic curvature
        // (1 + 1/k) f'(x) of the merged law with k+3 stages
        let fd = uniform_curvature(1, 1.2).unwrap();
        let law = WeightedExpSum::single(0.5, 4).unwrap();
        let analytic = 2.0 * law.density_derivative(1.2, 1).unwrap();
        assert!(
            (fd - analytic).abs() <= 5e-3 * analytic.abs(),
            "{fd} vs {analytic}"
        );
    }

    #[test]
    fn scan_counts_interior_extrema() {
        // between the two flips: slope rises from the left edge, falls into
        // the equal-split minimum, so exactly one interior maximum
        let r = TwoValueFamily::new(1, 1.1).unwrap().scan(400).unwrap();
        assert_eq!(r.extrema_count, 1);
        assert_eq!(r.extrema.len(), 1);
        assert_eq!(r.sign_at_zero, 1);
        assert_eq!(r.curvature_at_uniform, 1);
        // the k = 1 family is the two-term line, so the stationary point is
        // the two-term maximizer
        let (p_max, _) = find_max_t2(1.1, 2000);
        assert!((r.extrema[0] - p_max).abs() < 1e-4, "{}", r.extrema[0]);
        // below the unit threshold the outage falls all the way down
        let r = TwoValueFamily::new(1, 0.9).unwrap().scan(400).unwrap();
        assert_eq!(r.extrema_count, 0);
        assert_eq!(r.sign_at_zero, -1);
    }

    #[test]
    fn two_term_maximizer_reference() {
        let (p, f) = find_max_t2(1.1, 2000);
        assert!((p - 0.08339012).abs() < 1e-5, "p={p}");
        assert!((f - 0.66868655).abs() < 1e-6, "f={f}");
        assert!(p <= 0.5);
        // small threshold pushes the maximum into the corner
        let (p, f) = find_max_t2(0.1, 2000);
        assert_eq!(p, 0.0);
        assert!((f - (1.0 - (-0.1f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn xstar_reference_and_invariants() {
        let r = xstar(0.25, 1).unwrap();
        assert!((r.xstar - 1.34756698854278).abs() < 1e-9, "{}", r.xstar);
        assert!((r.lower_bound - 1.3).abs() < 1e-12);
        assert!(r.xstar >= 1.0 && r.xstar > r.lower_bound);
        assert!(r.residual <= 1e-12);
        // the root is the mode of the split law
        let law = WeightedExpSum::from_raw_weights(&[0.25, 0.25, 0.75, 0.75]).unwrap();
        let mode = law.mode().unwrap().mode;
        assert!((r.xstar - mode).abs() < 1e-8, "{} vs {mode}", r.xstar);
        // approaching the equal split the root runs into the merged mode
        let r = xstar(0.5 - 1e-9, 1).unwrap();
        assert!((r.xstar - 1.5).abs() < 1e-6, "{}", r.xstar);
        // frozen six-digit grid for k = 3, strictly increasing in p
        let expect = [
            (0.05, 1.05475),
            (0.1, 1.11507),
            (0.15, 1.17104),
            (0.2, 1.21644),
        ];
        let mut prev = 0.0;
        for (p, e) in expect {
            let r = xstar(p, 3).unwrap();
            assert!((r.xstar - e).abs() < 2e-5, "p={p}: {}", r.xstar);
            assert!(r.xstar > prev && r.xstar > r.lower_bound && r.xstar >= 1.0);
            prev = r.xstar;
        }
        assert!(xstar(0.5, 1).is_err());
        assert!(xstar(0.0, 2).is_err());
    }
}
