//! Discrete-time H-infinity synthesis by gamma iteration.
//!
//! For a fixed level `gamma` the filter is built in two Riccati steps:
//!
//! 1. A full-information DARE for the plant gives `X >= 0`, the worst-case
//!    disturbance gain `F1`, the ideal control gain `F2`, and a factorization
//!    `R + B'XB = W' diag(-gamma^2 I, I) W` of the indefinite weight.
//! 2. In the new variables `r = W11 (w - F1 x)` and `v = W21 (w - F1 x) + W22 (u - F2 x)`
//!    the problem becomes an output-estimation problem with the same level.
//!    Its dual is a disturbance-feedforward problem, solved by a second
//!    full-information DARE and an exact disturbance reconstruction.
//!
//! A level is feasible when both DAREs have stabilizing solutions with
//! `X, Z >= 0` and the inertia conditions on `R + B'XB` hold. `Z >= 0` of the
//! second step plays the role of the spectral-radius coupling condition.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{GeneralizedPlant, PartitionedPlant};
use crate::design::GammaStep;
use crate::error::Error;
use crate::linalg::{hstack, min_symmetric_eigenvalue, solve_dare, spectral_radius};
use crate::ltisys::{hinf_norm, DEFAULT_NORM_TOL};
use crate::statespace::StateSpace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions {
    /// Relative width of the final gamma bracket.
    pub gamma_tol: f64,
    /// Magnitude of the fictitious measurement noise added to `y`.
    pub noise: f64,
    /// Tolerance for the closed-loop norm evaluation that reports `J`.
    pub norm_tol: f64,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self { gamma_tol: 1e-4, noise: 1e-6, norm_tol: DEFAULT_NORM_TOL }
    }
}

/// Optimal filter together with its level and the bisection trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesisResult {
    #[serde(with = "crate::io::model_serde")]
    pub filter: StateSpace,
    /// Smallest feasible level found.
    pub gamma: f64,
    /// Norm of the (unregularized) error system closed with `filter`.
    #[serde(rename = "J")]
    pub j: f64,
    pub iterations: Vec<GammaStep>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{error}")]
pub struct SynthesisError {
    pub error: Error,
    pub trace: Vec<GammaStep>,
}

impl From<SynthesisError> for Error {
    fn from(e: SynthesisError) -> Self {
        e.error
    }
}

/// Solves the standard discrete-time H-infinity problem for the plant.
pub fn hinf_synthesize(plant: &GeneralizedPlant, opts: &SynthesisOptions) -> Result<SynthesisResult, SynthesisError> {
    let fail = |error: Error, trace: &[GammaStep]| SynthesisError { error, trace: trace.to_vec() };
    if !(opts.gamma_tol > 0.0) {
        return Err(fail(Error::InvalidSpec("gamma tolerance must be positive".into()), &[]));
    }
    let exact = plant.partition();
    let reg = exact.with_measurement_noise(opts.noise);
    let open_loop = hinf_norm(&plant.g11, opts.norm_tol).map_err(|e| fail(e, &[]))?;

    let mut trace = Vec::new();
    let probe = |gamma: f64, trace: &mut Vec<GammaStep>| -> Result<Option<StateSpace>, Error> {
        let k = match controller_at(&reg, gamma) {
            Ok(k) => Some(k),
            Err(LevelFailure::Infeasible(_)) => None,
            Err(LevelFailure::Numerical(e)) => return Err(e),
        };
        trace.push(GammaStep { gamma, feasible: k.is_some() });
        Ok(k)
    };

    let mut hi = 1.01 * open_loop.max(1e-12);
    let mut best = match probe(hi, &mut trace).map_err(|e| fail(e, &trace))? {
        Some(k) => k,
        None => return Err(fail(Error::InfeasibleAtUpperBound(hi), &trace)),
    };

    const FLOOR: f64 = 1e-9;
    let mut lo = (open_loop / 100.0).max(FLOOR);
    // Extend the bracket downwards while the lower end is still feasible.
    while let Some(k) = probe(lo, &mut trace).map_err(|e| fail(e, &trace))? {
        hi = lo;
        best = k;
        if lo <= FLOOR {
            break;
        }
        lo = (lo / 100.0).max(FLOOR);
    }

    while hi - lo > opts.gamma_tol * hi && hi > FLOOR {
        let mid = if hi > 2.0 * lo { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        match probe(mid, &mut trace).map_err(|e| fail(e, &trace))? {
            Some(k) => {
                hi = mid;
                best = k;
            }
            None => lo = mid,
        }
    }

    let closed = exact.close(&best).map_err(|e| fail(e, &trace))?;
    let j = hinf_norm(&closed, opts.norm_tol).map_err(|e| fail(e, &trace))?;
    Ok(SynthesisResult { filter: best, gamma: hi, j, iterations: trace })
}

#[derive(Debug)]
pub(crate) enum LevelFailure {
    Infeasible(#[allow(dead_code)] String),
    Numerical(Error),
}

impl From<String> for LevelFailure {
    fn from(s: String) -> Self {
        LevelFailure::Infeasible(s)
    }
}

/// Result of a full-information Riccati step.
struct FullInformation {
    f1: DMatrix<f64>,
    f2: DMatrix<f64>,
    w11: DMatrix<f64>,
    w21: DMatrix<f64>,
    w22: DMatrix<f64>,
}

/// Full-information step for `x+ = Ax + B1 w + B2 u`, `z = C1 x + D11 w + D12 u`.
fn full_information(
    a: &DMatrix<f64>,
    b1: &DMatrix<f64>,
    b2: &DMatrix<f64>,
    c1: &DMatrix<f64>,
    d11: &DMatrix<f64>,
    d12: &DMatrix<f64>,
    gamma: f64,
) -> Result<FullInformation, String> {
    let (nw, nu) = (b1.ncols(), b2.ncols());
    let b = hstack(&[b1, b2]);
    let d = hstack(&[d11, d12]);
    let q = c1.transpose() * c1;
    let s = c1.transpose() * &d;
    let mut r = d.transpose() * &d;
    for i in 0..nw {
        r[(i, i)] -= gamma * gamma;
    }
    let sol = solve_dare(a, &b, &q, &r, &s)?;
    let x_scale = sol.x.norm().max(1.0);
    if min_symmetric_eigenvalue(&sol.x) < -1e-9 * x_scale {
        return Err("Riccati solution is not positive semidefinite".into());
    }
    let rh = &sol.r_hat;
    let r11 = rh.view((0, 0), (nw, nw)).clone_owned();
    let r21 = rh.view((nw, 0), (nu, nw)).clone_owned();
    let r22 = rh.view((nw, nw), (nu, nu)).clone_owned();
    let l22 = r22.cholesky().ok_or("control weight is not positive definite")?.l();
    let w21 = l22
        .solve_lower_triangular(&r21)
        .ok_or("singular control weight factor")?;
    let nabla = r11 - w21.transpose() * &w21;
    let l11 = (-nabla / (gamma * gamma))
        .cholesky()
        .ok_or("disturbance weight is not negative definite")?
        .l();
    Ok(FullInformation {
        f1: sol.gain.rows(0, nw).clone_owned(),
        f2: sol.gain.rows(nw, nu).clone_owned(),
        w11: l11.transpose(),
        w21,
        w22: l22.transpose(),
    })
}

fn upper_inverse(w: &DMatrix<f64>) -> Result<DMatrix<f64>, String> {
    w.solve_upper_triangular(&DMatrix::identity(w.nrows(), w.nrows()))
        .ok_or_else(|| "singular triangular factor".to_string())
}

/// Central filter achieving level `gamma`, or the reason no filter does.
pub(crate) fn controller_at(p: &PartitionedPlant, gamma: f64) -> Result<StateSpace, LevelFailure> {
    let fi = full_information(&p.a, &p.b1, &p.b2, &p.c1, &p.d11, &p.d12, gamma)?;
    let w11_inv = upper_inverse(&fi.w11)?;
    let w22_inv = upper_inverse(&fi.w22)?;

    // Output-estimation problem in (r, v).
    let a_bar = &p.a + &p.b1 * &fi.f1;
    let b1_bar = &p.b1 * &w11_inv;
    let c1_bar = -(&fi.w22 * &fi.f2);
    let d11_bar = &fi.w21 * &w11_inv;
    let c2_bar = &p.c2 + &p.d21 * &fi.f1;
    let d21_bar = &p.d21 * &w11_inv;

    // Dual disturbance-feedforward problem, solved through full information.
    let dual = full_information(
        &a_bar.transpose(),
        &c1_bar.transpose(),
        &c2_bar.transpose(),
        &b1_bar.transpose(),
        &d11_bar.transpose(),
        &d21_bar.transpose(),
        gamma,
    )?;
    let g = upper_inverse(&dual.w22)? * &dual.w21;
    let t = w22_inv.transpose();
    let b2t = p.b2.transpose();

    let ck_dual = &dual.f2 + &g * &dual.f1 + &g * &t * &b2t;
    let ak_dual = a_bar.transpose() - c1_bar.transpose() * &t * &b2t + c2_bar.transpose() * &ck_dual;
    let bk_dual = c1_bar.transpose() * &t - c2_bar.transpose() * &g * &t;
    let dk_dual = -(&g * &t);

    let k = StateSpace::discrete(
        ak_dual.transpose(),
        ck_dual.transpose(),
        bk_dual.transpose(),
        dk_dual.transpose(),
        p.period,
    )
    .map_err(LevelFailure::Numerical)?;

    let closed = p.close(&k).map_err(LevelFailure::Numerical)?;
    let rho = spectral_radius(&closed.a);
    if !(rho < 1.0 - 1e-9) {
        return Err(LevelFailure::Infeasible(format!("closed loop not stable (radius {rho})")));
    }
    Ok(k)
}
