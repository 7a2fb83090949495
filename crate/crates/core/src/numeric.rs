//! Small numerical kernels shared by the constructions: composite Simpson
//! quadrature, sign-change bisection and finite-difference stencils.

use crate::error::{Error, Result};

/// Composite Simpson rule over `[a, b]` with `panels` panels (each panel is
/// two subintervals). The integrand may fail; the first failure is returned.
pub fn simpson<F>(mut f: F, a: f64, b: f64, panels: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if panels == 0 {
        return Err(Error::Spec("simpson needs at least one panel".into()));
    }
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let mut acc = f(a)? + f(b)?;
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h)?;
    }
    Ok(acc * h / 3.0)
}

/// Bisection for the last parameter where `inside` holds, given that it holds
/// at `lo` and fails at `hi`. Stops once the bracket is narrower than `tol` or
/// cannot be split further in floating point.
pub fn bisect_boundary<F>(mut inside: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<bool>,
{
    loop {
        if (hi - lo).abs() <= tol {
            return Ok(lo);
        }
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            return Ok(lo);
        }
        if inside(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Root of a function with a sign change on `[lo, hi]`; returns the endpoint
/// of the final bracket with the smaller absolute residual.
pub fn bisect_root<F>(mut g: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut g_lo = g(lo)?;
    let mut g_hi = g(hi)?;
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::Domain(format!(
            "no sign change on [{lo}, {hi}] ({g_lo}, {g_hi})"
        )));
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= tol || mid == lo || mid == hi {
            return Ok(if g_lo.abs() <= g_hi.abs() { lo } else { hi });
        }
        let g_mid = g(mid)?;
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
}

/// Illinois-modified regula falsi on a bracket `[lo, hi]` with a sign
/// change. Stops once `|g| ≤ ftol` or the bracket is narrower than `xtol`,
/// returning the best point seen and its residual.
pub fn illinois_root<F>(
    mut g: F,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    ftol: f64,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut g_lo = g(lo)?;
    let mut g_hi = g(hi)?;
    if g_lo.signum() == g_hi.signum() && g_lo != 0.0 && g_hi != 0.0 {
        return Err(Error::Domain(format!(
            "no sign change on [{lo}, {hi}] ({g_lo}, {g_hi})"
        )));
    }
    let mut best = if g_lo.abs() <= g_hi.abs() {
        (lo, g_lo)
    } else {
        (hi, g_hi)
    };
    // 0 = no endpoint retained yet, ±1 = the low/high endpoint was retained
    let mut side = 0;
    for _ in 0..200 {
        if best.1.abs() <= ftol || (hi - lo).abs() <= xtol {
            break;
        }
        let mut m = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
        if !(m > lo.min(hi) && m < lo.max(hi)) {
            m = 0.5 * (lo + hi);
        }
        let g_m = g(m)?;
        if g_m.abs() < best.1.abs() {
            best = (m, g_m);
        }
        if g_m == 0.0 {
            break;
        }
        if g_m.signum() == g_lo.signum() {
            lo = m;
            g_lo = g_m;
            if side == 1 {
                g_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = m;
            g_hi = g_m;
            if side == -1 {
                g_lo *= 0.5;
            }
            side = -1;
        }
    }
    Ok(best)
}

/// Central first difference `(u(h) - u(-h)) / 2h` of a function of time.
pub fn central_first<F>(mut u: F, h: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    Ok((u(h)? - u(-h)?) / (2.0 * h))
}

/// Central second difference `(u(h) - 2u(0) + u(-h)) / h²`.
pub fn central_second<F>(mut u: F, h: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    Ok((u(h)? - 2.0 * u(0.0)? + u(-h)?) / (h * h))
}

/// Euclidean norm of a coordinate slice.
pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Euclidean distance between two coordinate slices of equal length.
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
