//! Fourier inversion of the characteristic function of a weighted sum of
//! i.i.d. unit exponentials. This route never forms partial fractions, so it
//! stays accurate where clustered weights make the closed form cancel badly;
//! it is the fallback for the analytic evaluators and the cross-check oracle.
//!
//! The cdf uses the one-sided Gil-Pelaez integral, the density and its
//! derivatives the plain inversion integral. Both truncate at a frequency
//! chosen from a rigorous tail bound and add the first two
//! integration-by-parts boundary terms for the discarded tail, which buy two
//! extra powers of decay and keep the truncation frequency modest even when
//! the integrand itself decays like 1/omega.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) const DEFAULT_TOL: f64 = 2e-11;

const MAX_DEPTH: u32 = 56;
const MAX_EVALS: u64 = 40_000_000;
const MAX_FORCED_LEAVES: f64 = 4e6;

/// phi(omega) = prod_j (1 - i omega w_j)^{-m_j}
fn cf(atoms: &[(f64, u32)], omega: f64) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    for &(w, m) in atoms {
        p *= Complex64::new(1.0, -omega * w).powi(-(m as i32));
    }
    p
}

/// phi'(omega) / phi(omega) = sum_j m_j i w_j / (1 - i omega w_j)
fn cf_log_deriv(atoms: &[(f64, u32)], omega: f64) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for &(w, m) in atoms {
        s += f64::from(m) * Complex64::new(0.0, w) / Complex64::new(1.0, -omega * w);
    }
    s
}

struct Scaled {
    atoms: Vec<(f64, u32)>,
    scale: f64,
    x: f64,
    total_mult: f64,
    weight_prod: f64,
    mean: f64,
}

/// Rescale so the largest weight is 1; keeps the truncation frequency and the
/// oscillation count of the integrand in a sane range for any input scale.
fn prepare(atoms: &[(f64, u32)], x: f64) -> Result<Scaled> {
    if atoms.is_empty() {
        return Err(Error::Domain("empty atom list".into()));
    }
    let scale = atoms.iter().map(|a| a.0).fold(0.0f64, f64::max);
    if !(scale > 0.0) || atoms.iter().any(|&(w, m)| !(w > 0.0) || m == 0) {
        return Err(Error::Domain(
            "atoms need positive weights and multiplicities".into(),
        ));
    }
    let scaled: Vec<(f64, u32)> = atoms.iter().map(|&(w, m)| (w / scale, m)).collect();
    let total_mult = scaled.iter().map(|a| f64::from(a.1)).sum();
    let weight_prod = scaled.iter().map(|&(w, m)| w.powi(m as i32)).product();
    let mean = scaled.iter().map(|&(w, m)| w * f64::from(m)).sum();
    Ok(Scaled {
        atoms: scaled,
        scale,
        x: x / scale,
        total_mult,
        weight_prod,
        mean,
    })
}

/// Two integration-by-parts boundary terms for int_Omega^inf e^{-i omega x}
/// g(omega) d omega ~ e^{-i Omega x} (g(Omega)/(ix) + g'(Omega)/(ix)^2).
fn ibp_tail(g: Complex64, g_prime: Complex64, omega_end: f64, x: f64) -> Complex64 {
    let ix = Complex64::new(0.0, x);
    Complex64::from_polar(1.0, -omega_end * x) * (g / ix + g_prime / (ix * ix))
}

/// F(x) for the sum described by `atoms`, to absolute accuracy about `tol`.
pub(crate) fn cdf(atoms: &[(f64, u32)], x: f64, tol: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let s = prepare(atoms, x)?;
    let x = s.x;
    // After the two boundary corrections the discarded tail is below
    // (M+1)/(pi x^2 W Omega^{M+2}); solve for Omega at half the budget.
    let m_tot = s.total_mult;
    let omega_end = (2.0 * (m_tot + 1.0)
        / (std::f64::consts::PI * x * x * s.weight_prod * (0.5 * tol)))
        .powf(1.0 / (m_tot + 2.0))
        .max(32.0)
        .max(8.0 * std::f64::consts::PI / x);
    check_resolvable(omega_end, x)?;

    let integrand = |omega: f64| -> f64 {
        if omega == 0.0 {
            return s.mean - x;
        }
        let z = Complex64::from_polar(1.0, -omega * x) * cf(&s.atoms, omega);
        z.im / omega
    };
    let quad = integrate(
        &integrand,
        0.0,
        omega_end,
        0.5 * tol,
        std::f64::consts::PI / x,
    )?;
    // g = phi/omega, g' = phi (S/omega - 1/omega^2) with S = phi'/phi
    let phi = cf(&s.atoms, omega_end);
    let g = phi / omega_end;
    let g_prime = phi
        * (cf_log_deriv(&s.atoms, omega_end) / omega_end
            - Complex64::new(1.0 / (omega_end * omega_end), 0.0));
    let tail = ibp_tail(g, g_prime, omega_end, x).im;
    Ok((0.5 - (quad + tail) / std::f64::consts::PI).clamp(0.0, 1.0))
}

/// r-th derivative of the density at x (r = 0 is the density itself), to
/// absolute accuracy about `tol`. Needs r < total multiplicity for the tail
/// of the inversion integral to be controllable.
pub(crate) fn density_deriv(atoms: &[(f64, u32)], x: f64, r: u32, tol: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain("inversion evaluator needs x > 0".into()));
    }
    let s = prepare(atoms, x)?;
    let x = s.x;
    let m_tot = s.total_mult;
    let rf = f64::from(r);
    if rf + 1.0 > m_tot {
        return Err(Error::Accuracy(format!(
            "derivative order {r} too high for inversion with total multiplicity {m_tot}"
        )));
    }
    let tol_scaled = tol * s.scale.powi(r as i32 + 1);
    // discarded tail after the corrections:
    // (M+r)(M+r+1) / (pi x^2 (M-r+1) W Omega^{M-r+1})
    let omega_end = (2.0 * (m_tot + rf) * (m_tot + rf + 1.0)
        / (std::f64::consts::PI * x * x * (m_tot - rf + 1.0) * s.weight_prod * (0.5 * tol_scaled)))
        .powf(1.0 / (m_tot - rf + 1.0))
        .max(32.0)
        .max(8.0 * std::f64::consts::PI / x);
    check_resolvable(omega_end, x)?;

    let kernel =
        |omega: f64| -> Complex64 { Complex64::new(0.0, -omega).powu(r) * cf(&s.atoms, omega) };
    let integrand =
        |omega: f64| -> f64 { (Complex64::from_polar(1.0, -omega * x) * kernel(omega)).re };
    let quad = integrate(
        &integrand,
        0.0,
        omega_end,
        0.5 * tol_scaled,
        std::f64::consts::PI / x,
    )?;
    // g = (-i omega)^r phi, g' = (-i)^r omega^{r-1} (r + omega S) phi
    let g = kernel(omega_end);
    let g_prime = Complex64::new(0.0, -1.0).powu(r)
        * omega_end.powi(r as i32 - 1)
        * (rf + omega_end * cf_log_deriv(&s.atoms, omega_end))
        * cf(&s.atoms, omega_end);
    let tail = ibp_tail(g, g_prime, omega_end, x).re;
    let value = (quad + tail) / std::f64::consts::PI;
    Ok(value / s.scale.powi(r as i32 + 1))
}

fn check_resolvable(omega_end: f64, x: f64) -> Result<()> {
    let forced_leaves = omega_end * x / std::f64::consts::PI;
    if !omega_end.is_finite() || forced_leaves > MAX_FORCED_LEAVES {
        return Err(Error::Accuracy(format!(
            "inversion integral needs ~{forced_leaves:.1e} oscillation cells"
        )));
    }
    Ok(())
}

/// Adaptive Simpson with halved per-child tolerances, so the leaf tolerances
/// sum to the requested one. Intervals wider than `force_width` are split
/// unconditionally: Richardson acceptance on a span covering whole
/// oscillations would see spurious agreement at aligned sample points.
fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, force_width: f64) -> Result<f64> {
    let mut evals: u64 = 3;
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let s = simpson(a, b, fa, fm, fb);
    refine(f, a, fa, m, fm, b, fb, s, tol, force_width, 0, &mut evals)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Plain adaptive quadrature of an arbitrary smooth function; only used by
/// tests that need an in-crate integrator independent of the closed forms.
#[cfg(test)]
pub(crate) fn test_integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    integrate(f, a, b, tol, b - a).expect("test quadrature converges")
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    force_width: f64,
    depth: u32,
    evals: &mut u64,
) -> Result<f64> {
    *evals += 2;
    if *evals > MAX_EVALS {
        return Err(Error::Accuracy(
            "inversion quadrature exceeded its evaluation budget".into(),
        ));
    }
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let s2 = left + right;
    // interval exhausted at f64 resolution
    if lm <= a || rm <= m {
        return Ok(s2);
    }
    let forced = (b - a) > force_width;
    if !forced && (s2 - whole).abs() <= 15.0 * tol {
        return Ok(s2 + (s2 - whole) / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Accuracy(
            "inversion quadrature failed to converge".into(),
        ));
    }
    let child_tol = (0.5 * tol).max(5e-17 * s2.abs());
    let l = refine(
        f,
        a,
        fa,
        lm,
        flm,
        m,
        fm,
        left,
        child_tol,
        force_width,
        depth + 1,
        evals,
    )?;
    let r = refine(
        f,
        m,
        fm,
        rm,
        frm,
        b,
        fb,
        right,
        child_tol,
        force_width,
        depth + 1,
        evals,
    )?;
    Ok(l + r)
}
