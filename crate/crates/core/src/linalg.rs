//! Dense linear-algebra helpers that nalgebra lacks: ordered generalized Schur
//! (QZ) decompositions through LAPACK, and a discrete algebraic Riccati solver
//! built on deflating subspaces of the extended symplectic pencil.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// One generalized eigenvalue `alpha / beta` of a pencil `A - lambda B`.
#[derive(Debug, Clone, Copy)]
pub struct GenEig {
    pub alpha: Complex<f64>,
    pub beta: f64,
}

impl GenEig {
    pub fn is_infinite(&self) -> bool {
        self.beta.abs() <= 1e-13 * self.alpha.norm().max(1e-300)
    }

    pub fn value(&self) -> Option<Complex<f64>> {
        (!self.is_infinite()).then(|| self.alpha / self.beta)
    }

    /// `| |lambda| - 1 |`, or infinity for infinite eigenvalues.
    pub fn distance_to_unit_circle(&self) -> f64 {
        self.value().map_or(f64::INFINITY, |v| (v.norm() - 1.0).abs())
    }
}

/// Eigenvalues of the pencil `A - lambda B` (LAPACK `dggev`).
pub fn generalized_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<GenEig>> {
    let n = a.nrows();
    assert!(a.is_square() && b.shape() == a.shape());
    if n == 0 {
        return Ok(Vec::new());
    }
    let ni = n as i32;
    let mut a = a.clone();
    let mut b = b.clone();
    let (mut ar, mut ai, mut be) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut vl = [0.0];
    let mut vr = [0.0];
    let mut info = 0;
    let mut query = [0.0];
    unsafe {
        lapack::dggev(
            b'N', b'N', ni, a.as_mut_slice(), ni, b.as_mut_slice(), ni, &mut ar, &mut ai, &mut be,
            &mut vl, 1, &mut vr, 1, &mut query, -1, &mut info,
        );
    }
    let lwork = (query[0] as usize).max(8 * n + 16);
    let mut work = vec![0.0; lwork];
    unsafe {
        lapack::dggev(
            b'N', b'N', ni, a.as_mut_slice(), ni, b.as_mut_slice(), ni, &mut ar, &mut ai, &mut be,
            &mut vl, 1, &mut vr, 1, &mut work, lwork as i32, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "dggev", info });
    }
    Ok((0..n)
        .map(|i| GenEig { alpha: Complex::new(ar[i], ai[i]), beta: be[i] })
        .collect())
}

/// Generalized real Schur form with the eigenvalues inside the unit circle
/// moved to the leading block.
pub struct OrderedQz {
    /// Right Schur vectors; the first `stable` columns span the stable
    /// deflating subspace.
    pub z: DMatrix<f64>,
    pub stable: usize,
    pub eigs: Vec<GenEig>,
}

extern "C" fn select_inside_unit_circle(ar: *const f64, ai: *const f64, beta: *const f64) -> i32 {
    // SAFETY: LAPACK passes valid pointers to scalars.
    let (ar, ai, beta) = unsafe { (*ar, *ai, *beta) };
    i32::from(ar.hypot(ai) < beta.abs())
}

/// Ordered QZ decomposition of `A - lambda B` (LAPACK `dgges`).
pub fn ordered_qz(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<OrderedQz> {
    let n = a.nrows();
    assert!(a.is_square() && b.shape() == a.shape());
    let ni = n as i32;
    let mut a = a.clone();
    let mut b = b.clone();
    let (mut ar, mut ai, mut be) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut vsl = DMatrix::<f64>::zeros(n, n);
    let mut vsr = DMatrix::<f64>::zeros(n, n);
    let mut sdim = 0;
    let mut bwork = vec![0; n];
    let mut info = 0;
    let lwork = (8 * n + 16).max(64 * n);
    let mut work = vec![0.0; lwork];
    unsafe {
        lapack::dgges(
            b'V',
            b'V',
            b'S',
            Some(select_inside_unit_circle),
            ni,
            a.as_mut_slice(),
            ni,
            b.as_mut_slice(),
            ni,
            &mut sdim,
            &mut ar,
            &mut ai,
            &mut be,
            vsl.as_mut_slice(),
            ni,
            vsr.as_mut_slice(),
            ni,
            &mut work,
            lwork as i32,
            &mut bwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "dgges", info });
    }
    let eigs = (0..n)
        .map(|i| GenEig { alpha: Complex::new(ar[i], ai[i]), beta: be[i] })
        .collect();
    Ok(OrderedQz { z: vsr, stable: sdim as usize, eigs })
}

/// Square orthogonal matrix whose leading `k` columns span the column space
/// of `m` (`k = m.ncols()`, assumed full column rank).
pub fn orthogonal_completion(m: &DMatrix<f64>) -> DMatrix<f64> {
    let rows = m.nrows();
    let mut aug = DMatrix::zeros(rows, m.ncols() + rows);
    aug.columns_mut(0, m.ncols()).copy_from(m);
    aug.columns_mut(m.ncols(), rows).fill_with_identity();
    aug.qr().q()
}

pub fn symmetrize(x: &DMatrix<f64>) -> DMatrix<f64> {
    (x + x.transpose()) * 0.5
}

pub fn min_symmetric_eigenvalue(x: &DMatrix<f64>) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    symmetrize(x).symmetric_eigenvalues().min()
}

/// Spectral radius of a square matrix.
pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.complex_eigenvalues().iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn block_diag(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), b.shape()).copy_from(*b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

pub fn hstack(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hstack row mismatch");
        out.view_mut((0, c), b.shape()).copy_from(*b);
        c += b.ncols();
    }
    out
}

pub fn vstack(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vstack column mismatch");
        out.view_mut((r, 0), b.shape()).copy_from(*b);
        r += b.nrows();
    }
    out
}

/// Stabilizing solution of the discrete algebraic Riccati equation
///
/// ```text
/// X = A'XA - (A'XB + S)(R + B'XB)^{-1}(B'XA + S') + Q
/// ```
///
/// `R` may be indefinite.
#[derive(Debug, Clone)]
pub struct DareSolution {
    pub x: DMatrix<f64>,
    /// Optimal feedback `F = -(R + B'XB)^{-1}(B'XA + S')`; `A + BF` is stable.
    pub gain: DMatrix<f64>,
    /// `R + B'XB`.
    pub r_hat: DMatrix<f64>,
    /// Smallest `| |lambda| - 1 |` over the pencil spectrum.
    pub circle_margin: f64,
}

/// Pencil eigenvalues closer than this to the unit circle mean no stabilizing
/// solution can be separated.
pub const UNIT_CIRCLE_TOL: f64 = 1e-8;

pub fn solve_dare(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    s: &DMatrix<f64>,
) -> std::result::Result<DareSolution, String> {
    let n = a.nrows();
    let m = b.ncols();
    let dim = 2 * n + m;
    let id = DMatrix::<f64>::identity(n, n);

    // Extended pencil  M - lambda L  acting on [x; costate; u].
    let mut big_m = DMatrix::zeros(dim, dim);
    big_m.view_mut((0, 0), (n, n)).copy_from(a);
    big_m.view_mut((0, 2 * n), (n, m)).copy_from(b);
    big_m.view_mut((n, 0), (n, n)).copy_from(&(-q));
    big_m.view_mut((n, n), (n, n)).copy_from(&id);
    big_m.view_mut((n, 2 * n), (n, m)).copy_from(&(-s));
    big_m.view_mut((2 * n, 0), (m, n)).copy_from(&s.transpose());
    big_m.view_mut((2 * n, 2 * n), (m, m)).copy_from(r);
    let mut big_l = DMatrix::zeros(dim, dim);
    big_l.view_mut((0, 0), (n, n)).copy_from(&id);
    big_l.view_mut((n, n), (n, n)).copy_from(&a.transpose());
    big_l.view_mut((2 * n, n), (m, n)).copy_from(&(-b.transpose()));

    // Compress away the input columns so the QZ runs on a regular 2n pencil.
    let input_col = big_m.columns(2 * n, m).clone_owned();
    let q_full = orthogonal_completion(&input_col);
    let q2 = q_full.columns(m, 2 * n).clone_owned();
    let m_red = q2.transpose() * big_m.columns(0, 2 * n);
    let l_red = q2.transpose() * big_l.columns(0, 2 * n);

    let qz = ordered_qz(&m_red, &l_red).map_err(|e| e.to_string())?;
    let circle_margin = qz
        .eigs
        .iter()
        .map(GenEig::distance_to_unit_circle)
        .fold(f64::INFINITY, f64::min);
    if circle_margin < UNIT_CIRCLE_TOL {
        return Err(format!("pencil eigenvalue on the unit circle (margin {circle_margin:.2e})"));
    }
    if qz.stable != n {
        return Err(format!("expected {n} stable eigenvalues, found {}", qz.stable));
    }
    let u1 = qz.z.view((0, 0), (n, n)).clone_owned();
    let u2 = qz.z.view((n, 0), (n, n)).clone_owned();
    let x = if n == 0 {
        DMatrix::zeros(0, 0)
    } else {
        let lu = u1.clone().lu();
        let u1_inv = lu.try_inverse().ok_or("stable subspace is not a graph")?;
        let cond = u1.norm() * u1_inv.norm();
        if !cond.is_finite() || cond > 1e13 {
            return Err(format!("ill-conditioned stable subspace (cond {cond:.2e})"));
        }
        symmetrize(&(u2 * u1_inv))
    };

    let r_hat = r + b.transpose() * &x * b;
    let rhs = b.transpose() * &x * a + s.transpose();
    let gain = -r_hat
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or("R + B'XB is singular")?;

    let residual = a.transpose() * &x * a + q + (a.transpose() * &x * b + s) * &gain - &x;
    let scale = 1.0 + x.norm() + q.norm();
    if !(residual.norm() <= 1e-6 * scale) {
        return Err(format!("Riccati residual {:.2e} too large", residual.norm() / scale));
    }
    if spectral_radius(&(a + b * &gain)) >= 1.0 {
        return Err("closed loop A + BF not stable".into());
    }
    Ok(DareSolution { x, gain, r_hat, circle_margin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn scalar_lq_dare_matches_closed_form() {
        // x = a^2 x - (a x b)^2 / (r + b^2 x) + q  with a=2, b=1, q=1, r=1:
        // x^2 - 4x - 1 = 0  ->  x = 2 + sqrt(5)
        let a = DMatrix::from_element(1, 1, 2.0);
        let b = DMatrix::from_element(1, 1, 1.0);
        let q = DMatrix::from_element(1, 1, 1.0);
        let r = DMatrix::from_element(1, 1, 1.0);
        let s = DMatrix::zeros(1, 1);
        let sol = solve_dare(&a, &b, &q, &r, &s).unwrap();
        assert_relative_eq!(sol.x[(0, 0)], 2.0 + 5f64.sqrt(), epsilon = 1e-12);
        assert!((2.0 + sol.gain[(0, 0)]).abs() < 1.0);
    }

    #[test]
    fn handles_singular_state_matrix() {
        // two-state delay chain with cost on the last state
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        let b = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
        let q = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        let r = DMatrix::from_element(1, 1, 1.0);
        let s = DMatrix::zeros(2, 1);
        let sol = solve_dare(&a, &b, &q, &r, &s).unwrap();
        // cost-to-go: x2 costs 1 now; x1 becomes x2 next step
        assert_relative_eq!(sol.x[(0, 0)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(sol.x[(1, 1)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(sol.x[(0, 1)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn orthogonal_completion_spans_input() {
        let m = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, 2.0]);
        let q = orthogonal_completion(&m);
        assert_relative_eq!((q.transpose() * &q - DMatrix::identity(3, 3)).norm(), 0.0, epsilon = 1e-12);
        let tail = q.columns(1, 2).transpose() * &m;
        assert!(tail.norm() < 1e-12);
    }

    #[test]
    fn generalized_eigenvalues_of_diagonal_pencil() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 3.0]));
        let b = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 0.0]));
        let eigs = generalized_eigenvalues(&a, &b).unwrap();
        assert_eq!(eigs.iter().filter(|e| e.is_infinite()).count(), 1);
        let finite: Vec<_> = eigs.iter().filter_map(|e| e.value()).collect();
        assert_relative_eq!(finite[0].re, 0.5, epsilon = 1e-14);
    }
}
