//! Ground-truth backends that share no evaluation path with the
//! partial-fraction machinery: simulation, exhaustive lattice search, and
//! direct quadrature of the inversion integral. Everything here is
//! deterministic for fixed inputs, bit-identical across worker counts.

use rayon::prelude::*;

use crate::allocator;
use crate::cf;
use crate::error::{Error, Result};
use crate::hypoexp::{WeightedExpSum, Weights};

/// Simulation estimate of an outage probability.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    /// Fraction of samples with weighted sum at or below the threshold.
    pub p_hat: f64,
    /// Binomial standard error sqrt(p_hat (1 - p_hat) / n).
    pub stderr: f64,
    /// Sample count.
    pub n: u64,
    /// Seed the stream was keyed with.
    pub seed: u64,
}

/// Outcome of an exhaustive search over a simplex lattice.
#[derive(Clone, Debug)]
pub struct GridMinimizer {
    /// Argmin lattice point, coordinates sorted descending.
    pub q_best: Weights,
    /// Outage at the argmin.
    pub outage_best: f64,
    /// Lattice denominator g; the grid is {m/g : sum(m) = g}.
    pub grid_resolution: u32,
    /// Whether q_best lies within one lattice step per coordinate of the
    /// predicted uniform-over-k point.
    pub matches_conjecture: bool,
    /// k from the crossing structure, via [`allocator::optimal_k`].
    pub predicted_k: u32,
}

/// Estimates P{<q, X> <= x} by simulation. Exponentials are generated as
/// -ln(U) from a pure counter-based generator keyed by (seed, sample index,
/// coordinate), so the estimate is a function of (q, x, n, seed) alone:
/// evaluation order and worker count cannot change it (the hit count is an
/// exact integer sum).
pub fn monte_carlo(q: &Weights, x: f64, n: u64, seed: u64) -> McEstimate {
    assert!(n >= 10_000, "too few samples for a meaningful estimate");
    let w = q.values().to_vec();
    let dim = w.len() as u64;
    let hits: u64 = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for (l, &ql) in w.iter().enumerate() {
                let u = unit_uniform(seed, i * dim + l as u64);
                s += ql * -u.ln();
            }
            u64::from(s <= x)
        })
        .sum();
    let p_hat = hits as f64 / n as f64;
    McEstimate {
        p_hat,
        stderr: (p_hat * (1.0 - p_hat) / n as f64).sqrt(),
        n,
        seed,
    }
}

/// Exhaustive outage minimization over the exact lattice
/// {m/g : m in N^t, sum(m) = g}. Every lattice point is visited; the argmin
/// is reduced under a total order (outage, then lattice vector), so the
/// result is identical no matter how the search is split across workers.
///
/// Refuses t > 4: the lattice grows like g^(t-1), and past four weights the
/// stationarity checks in `calculus` are the honest tool.
pub fn brute_force_min(t: u32, x: f64, grid_resolution: u32) -> Result<GridMinimizer> {
    search_lattice(t, x, grid_resolution, false)
}

/// Same exhaustive search over the inequality lattice
/// {m/g : sum(m) <= g, m != 0}. Adding weight can only shrink the outage,
/// so the minimizer must land on the sum(m) = g face; running the search
/// over the full wedge confirms that replacing the equality constraint by
/// an inequality changes nothing.
pub fn brute_force_min_inequality(t: u32, x: f64, grid_resolution: u32) -> Result<GridMinimizer> {
    search_lattice(t, x, grid_resolution, true)
}

/// Outage via numerical inversion of the characteristic function: a
/// backend with no partial fractions anywhere, used as ground truth where
/// the closed form is ill-conditioned.
pub fn fourier_cdf(d: &WeightedExpSum, x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "threshold must be positive and finite, got {x}"
        )));
    }
    if d.total_multiplicity() < 2 {
        return Err(Error::Domain(
            "inversion integrand needs total multiplicity >= 2 to be integrable".into(),
        ));
    }
    cf::cdf(d.atoms(), x, cf::DEFAULT_TOL)
}

/// Splitmix64-style mix of (seed, counter): the finalizer applied to
/// seed + (counter+1) * odd constant. Pure, so streams can be split by
/// deriving fresh seeds from tags.
pub(crate) fn mix64(seed: u64, ctr: u64) -> u64 {
    let mut z = seed.wrapping_add(ctr.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform in (0,1), a pure function of (seed, counter): top 53 bits of the
/// mix, centered so 0 and 1 are unreachable.
pub(crate) fn unit_uniform(seed: u64, ctr: u64) -> f64 {
    ((mix64(seed, ctr) >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn search_lattice(t: u32, x: f64, g: u32, inequality: bool) -> Result<GridMinimizer> {
    if !(2..=4).contains(&t) {
        return Err(Error::Domain(
            "exhaustive search handles 2 to 4 weights; beyond that use the stationarity checks"
                .into(),
        ));
    }
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "threshold must be positive and finite, got {x}"
        )));
    }
    assert!(g >= 50, "lattice too coarse");

    let best = (0..=g)
        .into_par_iter()
        .map(|m0| {
            let mut local: Option<(f64, Vec<u32>)> = None;
            let mut m = Vec::with_capacity(t as usize);
            m.push(m0);
            visit_rest(g - m0, t as usize - 1, inequality, &mut m, &mut |mv| {
                if mv.iter().all(|&v| v == 0) {
                    return;
                }
                let outage = lattice_outage(mv, g, x);
                let replace = match &local {
                    None => true,
                    Some((o, v)) => outage < *o || (outage == *o && mv < v.as_slice()),
                };
                if replace {
                    local = Some((outage, mv.to_vec()));
                }
            });
            local
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, c) | (c, None) => c,
                (Some(p), Some(q)) => {
                    if q.0 < p.0 || (q.0 == p.0 && q.1 < p.1) {
                        Some(q)
                    } else {
                        Some(p)
                    }
                }
            },
        )
        .expect("lattice is nonempty");

    let (outage_best, mut m_best) = best;
    m_best.sort_unstable_by(|a, b| b.cmp(a));
    let q_sorted: Vec<f64> = m_best.iter().map(|&m| m as f64 / g as f64).collect();

    let predicted_k = allocator::optimal_k(x, t).k;
    let tol = 1.0 / g as f64 + 1e-12;
    let matches_conjecture = q_sorted.iter().enumerate().all(|(i, &v)| {
        let target = if (i as u32) < predicted_k {
            1.0 / predicted_k as f64
        } else {
            0.0
        };
        (v - target).abs() <= tol
    });

    Ok(GridMinimizer {
        q_best: Weights::new(q_sorted)?,
        outage_best,
        grid_resolution: g,
        matches_conjecture,
        predicted_k,
    })
}

/// Visits every way to fill `parts` further lattice coordinates from a
/// budget: exactly spending it on the equality face, or any partial spend
/// on the inequality wedge.
fn visit_rest(
    budget: u32,
    parts: usize,
    inequality: bool,
    m: &mut Vec<u32>,
    f: &mut impl FnMut(&[u32]),
) {
    if parts == 0 {
        if !inequality && budget != 0 {
            return;
        }
        f(m);
        return;
    }
    if parts == 1 && !inequality {
        m.push(budget);
        f(m);
        m.pop();
        return;
    }
    for v in 0..=budget {
        m.push(v);
        visit_rest(budget - v, parts - 1, inequality, m, f);
        m.pop();
    }
}

fn lattice_outage(m: &[u32], g: u32, x: f64) -> f64 {
    let q: Vec<f64> = m.iter().map(|&v| v as f64 / g as f64).collect();
    WeightedExpSum::from_raw_weights(&q)
        .expect("lattice point has a positive coordinate")
        .cdf(x)
}
