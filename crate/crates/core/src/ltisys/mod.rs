//! State-space algebra for the design pipeline: cascades, pure delays,
//! step-invariant discretization, discrete lifting, frequency responses and
//! H-infinity norms.

mod norm;

pub use norm::{hinf_norm, hinf_norm_with, hankel_upper_bound, grid_lower_bound, NormOptions, DEFAULT_NORM_TOL};

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statespace::{Domain, StateSpace};

/// Default number of points on frequency grids.
pub const DEFAULT_GRID: usize = 2048;

/// Cascade `G * H`: the input drives `H`, whose output drives `G`.
pub fn series(g: &StateSpace, h: &StateSpace) -> Result<StateSpace> {
    if !g.domain.compatible(&h.domain) {
        return Err(Error::DomainMismatch);
    }
    if g.ninputs() != h.noutputs() {
        return Err(Error::DimensionMismatch(format!(
            "cascade of {} outputs into {} inputs",
            h.noutputs(),
            g.ninputs()
        )));
    }
    let (nh, ng) = (h.nstates(), g.nstates());
    let mut a = DMatrix::zeros(nh + ng, nh + ng);
    a.view_mut((0, 0), (nh, nh)).copy_from(&h.a);
    a.view_mut((nh, 0), (ng, nh)).copy_from(&(&g.b * &h.c));
    a.view_mut((nh, nh), (ng, ng)).copy_from(&g.a);
    let mut b = DMatrix::zeros(nh + ng, h.ninputs());
    b.view_mut((0, 0), (nh, h.ninputs())).copy_from(&h.b);
    b.view_mut((nh, 0), (ng, h.ninputs())).copy_from(&(&g.b * &h.d));
    let mut c = DMatrix::zeros(g.noutputs(), nh + ng);
    c.view_mut((0, 0), (g.noutputs(), nh)).copy_from(&(&g.d * &h.c));
    c.view_mut((0, nh), (g.noutputs(), ng)).copy_from(&g.c);
    StateSpace::new(a, b, c, &g.d * &h.d, h.domain)
}

/// Sum `G + H` of two systems with the same input and output dimensions.
pub fn parallel(g: &StateSpace, h: &StateSpace) -> Result<StateSpace> {
    if !g.domain.compatible(&h.domain) {
        return Err(Error::DomainMismatch);
    }
    if g.ninputs() != h.ninputs() || g.noutputs() != h.noutputs() {
        return Err(Error::DimensionMismatch("parallel connection of unequal shapes".into()));
    }
    use crate::linalg::{block_diag, hstack, vstack};
    StateSpace::new(
        block_diag(&[&g.a, &h.a]),
        vstack(&[&g.b, &h.b]),
        hstack(&[&g.c, &h.c]),
        &g.d + &h.d,
        g.domain,
    )
}

/// The `k`-step pure delay `z^{-k}` as a shift register; `delay(0, _)` is the unit gain.
pub fn delay(k: usize, period: f64) -> StateSpace {
    let domain = Domain::Discrete { period };
    if k == 0 {
        return StateSpace::gain(DMatrix::identity(1, 1), domain);
    }
    let mut a = DMatrix::zeros(k, k);
    for i in 1..k {
        a[(i, i - 1)] = 1.0;
    }
    let mut b = DMatrix::zeros(k, 1);
    b[(0, 0)] = 1.0;
    let mut c = DMatrix::zeros(1, k);
    c[(0, k - 1)] = 1.0;
    StateSpace { a, b, c, d: DMatrix::zeros(1, 1), domain }
}

/// Step-invariant (zero-order-hold) discretization with period `tau`:
/// `(e^{A tau}, int_0^tau e^{At} B dt, C, D)`, both blocks read off a single
/// exponential of the augmented matrix `[[A, B], [0, 0]] * tau`.
pub fn c2d_step_invariant(f: &StateSpace, tau: f64) -> Result<StateSpace> {
    if f.is_discrete() {
        return Err(Error::NonContinuousInput);
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidSpec(format!("discretization step {tau} must be positive")));
    }
    let (nx, nu) = (f.nstates(), f.ninputs());
    let mut aug = DMatrix::zeros(nx + nu, nx + nu);
    aug.view_mut((0, 0), (nx, nx)).copy_from(&(&f.a * tau));
    aug.view_mut((0, nx), (nx, nu)).copy_from(&(&f.b * tau));
    let e = aug.exp();
    StateSpace::discrete(
        e.view((0, 0), (nx, nx)).clone_owned(),
        e.view((0, nx), (nx, nu)).clone_owned(),
        f.c.clone(),
        f.d.clone(),
        tau,
    )
}

/// Bilinear map `s = (z - 1) / (z + 1)` of a stable continuous model onto a
/// unit-period discrete one. Frequencies are warped but the set of attained
/// gains, and with it the H-infinity norm, is preserved.
pub fn bilinear(f: &StateSpace) -> Result<StateSpace> {
    if f.is_discrete() {
        return Err(Error::NonContinuousInput);
    }
    let nx = f.nstates();
    if nx == 0 {
        return Ok(StateSpace::gain(f.d.clone(), Domain::Discrete { period: 1.0 }));
    }
    let abscissa = f.a.complex_eigenvalues().iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    if abscissa >= 0.0 {
        return Err(Error::InvalidSpec(format!("continuous model is not stable (spectral abscissa {abscissa})")));
    }
    let eye = DMatrix::<f64>::identity(nx, nx);
    let inv = (&eye - &f.a)
        .try_inverse()
        .ok_or_else(|| Error::DimensionMismatch("I - A is singular".into()))?;
    let r2 = std::f64::consts::SQRT_2;
    StateSpace::discrete(
        (&eye + &f.a) * &inv,
        &inv * &f.b * r2,
        &f.c * &inv * r2,
        &f.d + &f.c * &inv * &f.b,
        1.0,
    )
}

/// Discrete lifting by `n`: the system acting on frames of `n` consecutive
/// samples, with period `n` times the original.
pub fn lift(g: &StateSpace, n: usize) -> Result<StateSpace> {
    let period = g.period().ok_or(Error::NonDiscreteInput)?;
    if n == 0 {
        return Err(Error::InvalidSpec("lifting factor must be at least 1".into()));
    }
    let (nx, nu, ny) = (g.nstates(), g.ninputs(), g.noutputs());

    // powers[k] = A^k, k = 0..n
    let mut powers = Vec::with_capacity(n + 1);
    powers.push(DMatrix::identity(nx, nx));
    for k in 1..=n {
        powers.push(&g.a * &powers[k - 1]);
    }
    // markov[k] = C A^k B
    let markov: Vec<DMatrix<f64>> = (0..n).map(|k| &g.c * &powers[k] * &g.b).collect();

    let mut b = DMatrix::zeros(nx, n * nu);
    for j in 0..n {
        b.view_mut((0, j * nu), (nx, nu)).copy_from(&(&powers[n - 1 - j] * &g.b));
    }
    let mut c = DMatrix::zeros(n * ny, nx);
    for (i, power) in powers.iter().take(n).enumerate() {
        c.view_mut((i * ny, 0), (ny, nx)).copy_from(&(&g.c * power));
    }
    let mut d = DMatrix::zeros(n * ny, n * nu);
    for i in 0..n {
        d.view_mut((i * ny, i * nu), (ny, nu)).copy_from(&g.d);
        for j in 0..i {
            d.view_mut((i * ny, j * nu), (ny, nu)).copy_from(&markov[i - j - 1]);
        }
    }
    StateSpace::new(powers[n].clone(), b, c, d, Domain::Discrete { period: period * n as f64 })
}

/// Sampled magnitude response: largest singular value on a uniform grid over `[0, pi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyResponseCurve {
    pub points: Vec<(f64, f64)>,
    /// Grid frequencies skipped because they coincide with a pole.
    pub skipped: Vec<f64>,
}

impl FrequencyResponseCurve {
    pub fn peak(&self) -> f64 {
        self.points.iter().map(|p| p.1).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("omega,gain\n");
        for (w, g) in &self.points {
            s.push_str(&format!("{w:.16e},{g:.16e}\n"));
        }
        s
    }
}

pub fn frequency_response(g: &StateSpace, n_points: usize) -> Result<FrequencyResponseCurve> {
    if !g.is_discrete() {
        return Err(Error::NonDiscreteInput);
    }
    if n_points < 2 {
        return Err(Error::InvalidSpec("a frequency grid needs at least two points".into()));
    }
    let mut points = Vec::with_capacity(n_points);
    let mut skipped = Vec::new();
    for k in 0..n_points {
        let w = PI * k as f64 / (n_points - 1) as f64;
        match g.gain_at(w) {
            Ok(v) => points.push((w, v)),
            Err(Error::SingularAtGridPoint(_)) => skipped.push(w),
            Err(e) => return Err(e),
        }
    }
    Ok(FrequencyResponseCurve { points, skipped })
}
