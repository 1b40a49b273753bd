//! H-infinity norm of stable discrete-time systems.
//!
//! Bisection on `gamma`, where a level is rejected as soon as the symplectic
//! pencil of `G~ G = gamma^2` has an eigenvalue on the unit circle. Every
//! rejection also evaluates the gain at the detected frequencies, so the lower
//! end of the bracket is always a certified attained gain.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::linalg::{generalized_eigenvalues, UNIT_CIRCLE_TOL};
use crate::statespace::{max_singular_value, StateSpace};

pub const DEFAULT_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct NormOptions {
    /// Relative width of the final bracket.
    pub tol: f64,
    /// Points of the initial frequency grid over `[0, pi]`.
    pub grid: usize,
    pub max_iter: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_NORM_TOL, grid: 256, max_iter: 200 }
    }
}

/// `||G||_inf` to relative tolerance `tol`.
pub fn hinf_norm(g: &StateSpace, tol: f64) -> Result<f64> {
    hinf_norm_with(g, &NormOptions { tol, ..NormOptions::default() })
}

pub fn hinf_norm_with(g: &StateSpace, opts: &NormOptions) -> Result<f64> {
    if !g.is_discrete() {
        return Err(Error::NonDiscreteInput);
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidSpec("norm tolerance must be positive".into()));
    }
    let d_norm = max_singular_value(&g.d.map(|v| Complex::new(v, 0.0)));
    if g.nstates() == 0 {
        return Ok(d_norm);
    }
    let rho = g.spectral_radius();
    if rho >= 1.0 {
        return Err(Error::UnstableSystem(rho));
    }

    let (mut lo, _) = grid_lower_bound(g, opts.grid.max(2))?;
    lo = lo.max(d_norm);
    if lo == 0.0 {
        // Nothing seen on the grid; the Hankel bound decides between the zero
        // system and a gain hidden between grid points.
        match hankel_upper_bound(g) {
            Some(ub) if ub <= 1e-300 => return Ok(0.0),
            Some(ub) => lo = ub * 1e-12,
            None => return Err(Error::BracketFailure),
        }
    }
    let mut hi = match hankel_upper_bound(g) {
        Some(ub) if ub.is_finite() => ub.max(lo),
        _ => {
            // Fall back to doubling until the level test passes.
            let mut ub = 2.0 * lo;
            let mut iter = 0;
            while !crossing_frequencies(g, ub)?.is_empty() {
                ub *= 2.0;
                iter += 1;
                if iter > 60 {
                    return Err(Error::BracketFailure);
                }
            }
            ub
        }
    };

    let mut iter = 0;
    while hi - lo > opts.tol * lo {
        iter += 1;
        if iter > opts.max_iter {
            return Err(Error::BracketFailure);
        }
        let mid = if hi > 2.0 * lo { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        let freqs = crossing_frequencies(g, mid)?;
        if freqs.is_empty() {
            hi = mid;
            continue;
        }
        // The gain reaches `mid` somewhere; look at the crossings and the
        // midpoints between them for a larger certified value.
        let mut probe = freqs.clone();
        probe.sort_by(f64::total_cmp);
        let mids: Vec<f64> = probe.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        probe.extend(mids);
        let mut best = mid;
        for w in probe {
            if let Ok(v) = g.gain_at(w) {
                best = best.max(v);
            }
        }
        lo = best.min(hi);
    }
    Ok(0.5 * (lo + hi))
}

/// Frequencies in `[0, pi]` where some singular value of `G(e^{jw})` equals
/// `gamma`, read off the unit-circle eigenvalues of the pencil
///
/// ```text
/// [A  0   B      0 ]         [I 0  0 0 ]
/// [0  I   0      0 ]  - z *  [0 A' 0 C']
/// [C  0   D     -I ]         [0 0  0 0 ]
/// [0  B' -g^2 I  D']         [0 0  0 0 ]
/// ```
fn crossing_frequencies(g: &StateSpace, gamma: f64) -> Result<Vec<f64>> {
    let (n, m, p) = (g.nstates(), g.ninputs(), g.noutputs());
    let dim = 2 * n + m + p;
    let mut mm = DMatrix::zeros(dim, dim);
    let mut ll = DMatrix::zeros(dim, dim);
    // columns: state, costate, input, output; rows: state, costate, output, input
    let (x, q, u, y) = (0, n, 2 * n, 2 * n + m);
    let (ro, ri) = (2 * n, 2 * n + p);
    mm.view_mut((x, x), (n, n)).copy_from(&g.a);
    mm.view_mut((x, u), (n, m)).copy_from(&g.b);
    mm.view_mut((q, q), (n, n)).fill_with_identity();
    mm.view_mut((ro, x), (p, n)).copy_from(&g.c);
    mm.view_mut((ro, u), (p, m)).copy_from(&g.d);
    mm.view_mut((ro, y), (p, p)).copy_from(&(-DMatrix::<f64>::identity(p, p)));
    mm.view_mut((ri, q), (m, n)).copy_from(&g.b.transpose());
    mm.view_mut((ri, u), (m, m)).copy_from(&(-gamma * gamma * DMatrix::<f64>::identity(m, m)));
    mm.view_mut((ri, y), (m, p)).copy_from(&g.d.transpose());
    ll.view_mut((x, x), (n, n)).fill_with_identity();
    ll.view_mut((q, q), (n, n)).copy_from(&g.a.transpose());
    ll.view_mut((q, y), (n, p)).copy_from(&g.c.transpose());

    let eigs = generalized_eigenvalues(&mm, &ll)?;
    // Loose detection window; every candidate is then either confirmed by a
    // gain evaluation or, if strictly on the circle, trusted outright.
    let mut out = Vec::new();
    for e in &eigs {
        let Some(v) = e.value() else { continue };
        let dist = (v.norm() - 1.0).abs();
        if dist > 1e-5 {
            continue;
        }
        let w = v.arg().abs();
        let confirmed = dist < UNIT_CIRCLE_TOL
            || g.gain_at(w).map(|s| s >= gamma * (1.0 - 1e-12)).unwrap_or(false);
        if confirmed {
            out.push(w.min(PI));
        }
    }
    Ok(out)
}

/// Largest gain over a uniform grid of `[0, pi]` and the frequency where it occurs.
pub fn grid_lower_bound(g: &StateSpace, points: usize) -> Result<(f64, f64)> {
    let mut best = (0.0, 0.0);
    for k in 0..points {
        let w = PI * k as f64 / (points - 1).max(1) as f64;
        match g.gain_at(w) {
            Ok(v) if v > best.0 => best = (v, w),
            Ok(_) => {}
            Err(Error::SingularAtGridPoint(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}

/// `sigma_max(D) + 2 * sum of Hankel singular values`, a guaranteed upper bound
/// on the H-infinity norm of a stable system. `None` if the Gramian series
/// does not settle.
pub fn hankel_upper_bound(g: &StateSpace) -> Option<f64> {
    let p = stein_doubling(&g.a, &(&g.b * g.b.transpose()))?;
    let q = stein_doubling(&g.a.transpose(), &(g.c.transpose() * &g.c))?;
    let hsv_sum: f64 = (p * q)
        .complex_eigenvalues()
        .iter()
        .map(|l| l.re.max(0.0).sqrt())
        .sum();
    let d = max_singular_value(&g.d.map(|v| Complex::new(v, 0.0)));
    Some(d + 2.0 * hsv_sum)
}

/// `X = sum_k A^k W A'^k` by repeated squaring.
fn stein_doubling(a: &DMatrix<f64>, w: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let mut x = w.clone();
    let mut ak = a.clone();
    for _ in 0..64 {
        let inc = &ak * &x * ak.transpose();
        x += &inc;
        ak = &ak * &ak;
        if inc.norm() <= 1e-15 * x.norm().max(1e-300) {
            return Some(x);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltisys::delay;
    use crate::statespace::Domain;
    use approx::assert_relative_eq;

    fn scalar(v: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, v)
    }

    #[test]
    fn static_gain() {
        let g = StateSpace::gain(scalar(0.7), Domain::Discrete { period: 1.0 });
        assert_relative_eq!(hinf_norm(&g, 1e-6).unwrap(), 0.7);
        let g = StateSpace::gain(scalar(-0.7), Domain::Discrete { period: 1.0 });
        assert_relative_eq!(hinf_norm(&g, 1e-6).unwrap(), 0.7);
    }

    #[test]
    fn first_order_peak_at_dc() {
        let g = StateSpace::discrete(scalar(0.5), scalar(1.0), scalar(1.0), scalar(0.0), 1.0).unwrap();
        assert!((hinf_norm(&g, 1e-9).unwrap() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn resonant_peak_between_grid_points() {
        // lightly damped pole pair near w = 1.0
        let r: f64 = 0.999;
        let th: f64 = 1.0;
        let a = DMatrix::from_row_slice(2, 2, &[2.0 * r * th.cos(), -r * r, 1.0, 0.0]);
        let g = StateSpace::discrete(a, DMatrix::from_row_slice(2, 1, &[1.0, 0.0]), DMatrix::from_row_slice(1, 2, &[0.0, 1.0]), scalar(0.0), 1.0).unwrap();
        let norm = hinf_norm(&g, 1e-8).unwrap();
        let fine = (0..200_001)
            .map(|k| g.gain_at(0.99 + 0.02 * k as f64 / 200_000.0).unwrap())
            .fold(0.0, f64::max);
        assert!(norm >= fine * (1.0 - 1e-8));
        assert!((norm - fine) / fine < 1e-6);
    }

    #[test]
    fn tall_and_wide_systems() {
        // [1/(z-0.5); 0.5] peaks at z = 1 with sqrt(4 + 0.25)
        let tall = StateSpace::discrete(
            scalar(0.5),
            scalar(1.0),
            DMatrix::from_row_slice(2, 1, &[1.0, 0.0]),
            DMatrix::from_row_slice(2, 1, &[0.0, 0.5]),
            1.0,
        )
        .unwrap();
        let want = 4.25f64.sqrt();
        assert!((hinf_norm(&tall, 1e-10).unwrap() - want).abs() < 1e-8);
        assert!((hinf_norm(&tall.transpose(), 1e-10).unwrap() - want).abs() < 1e-8);
    }

    #[test]
    fn delays_are_all_pass() {
        assert_relative_eq!(hinf_norm(&delay(5, 1.0), 1e-8).unwrap(), 1.0, epsilon = 1e-7);
    }

    #[test]
    fn unstable_is_rejected() {
        let g = StateSpace::discrete(scalar(1.2), scalar(1.0), scalar(1.0), scalar(0.0), 1.0).unwrap();
        assert!(matches!(hinf_norm(&g, 1e-6), Err(Error::UnstableSystem(_))));
    }

    #[test]
    fn hankel_bound_dominates() {
        let g = StateSpace::discrete(scalar(0.5), scalar(1.0), scalar(1.0), scalar(0.1), 1.0).unwrap();
        let ub = hankel_upper_bound(&g).unwrap();
        assert!(ub >= hinf_norm(&g, 1e-9).unwrap());
    }
}
