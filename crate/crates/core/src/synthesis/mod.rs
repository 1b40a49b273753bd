//! Fast-discretized generalized plant, discrete-time H-infinity synthesis of
//! the interpolation filter, and its polyphase filterbank form.

mod filterbank;
mod hinf;

pub use filterbank::{extract_filterbank, FilterBranch, PolyphaseFilterBank};
pub use hinf::{hinf_synthesize, SynthesisError, SynthesisOptions, SynthesisResult};

use nalgebra::DMatrix;

use crate::design::DesignSpec;
use crate::error::{Error, Result};
use crate::linalg::{block_diag, hstack, vstack};
use crate::ltisys::{c2d_step_invariant, delay, lift, series};
use crate::multirate::selection_matrix;
use crate::statespace::{Domain, StateSpace};

/// The discrete plant `[[G11, G12], [G21, 0]]` whose lower closure with the
/// filter `K~ : N -> M` is the fast-discretized error system.
///
/// Channel sizes: `w` and `e` have `n M` entries, `u` has `M`, `y` has `N`.
#[derive(Debug, Clone)]
pub struct GeneralizedPlant {
    pub g11: StateSpace,
    pub g12: StateSpace,
    pub g21: StateSpace,
    /// Fast-discretization ratio `n`.
    pub fast_ratio: usize,
    /// Segment length `M`.
    pub segment: usize,
    /// Retained samples per segment `N`.
    pub retained: usize,
    /// Reconstruction delay in samples `m`.
    pub delay_steps: usize,
}

/// Building blocks at the `n`-lifted level, before the `M`-lifting.
#[derive(Debug, Clone)]
pub struct FastBlocks {
    /// Signal model discretized at `h / n`.
    pub fd: StateSpace,
    /// `L_n{ z^{-mn} F_d }`
    pub g1: StateSpace,
    /// Fast hold, the `n x 1` column of ones.
    pub g2: StateSpace,
    /// `S L_n{ F_d }`, the slow sampler applied to the lifted model.
    pub g3: StateSpace,
}

pub fn fast_blocks(spec: &DesignSpec) -> Result<FastBlocks> {
    spec.validate()?;
    let n = spec.n;
    let fast = spec.h / n as f64;
    let fd = c2d_step_invariant(&spec.f, fast)?;
    let delayed = series(&delay(spec.m * n, fast), &fd)?;
    let g1 = lift(&delayed, n)?;
    let g2 = StateSpace::gain(DMatrix::from_element(n, 1, 1.0), Domain::Discrete { period: spec.h });
    let mut s = DMatrix::zeros(1, n);
    s[(0, 0)] = 1.0;
    let g3 = lift(&fd, n)?.premultiply(&s)?;
    Ok(FastBlocks { fd, g1, g2, g3 })
}

/// Assembles the generalized plant for a design problem.
pub fn build_plant(spec: &DesignSpec) -> Result<GeneralizedPlant> {
    let blocks = fast_blocks(spec)?;
    let seg = spec.pattern.len();
    let g11 = lift(&blocks.g1, seg)?;
    let g12 = lift(&blocks.g2, seg)?.scale(-1.0);
    let g21 = lift(&blocks.g3, seg)?.premultiply(&selection_matrix(&spec.pattern))?;
    Ok(GeneralizedPlant {
        g11,
        g12,
        g21,
        fast_ratio: spec.n,
        segment: seg,
        retained: spec.pattern.retained(),
        delay_steps: spec.m,
    })
}

impl GeneralizedPlant {
    pub fn n_exogenous(&self) -> usize {
        self.g11.ninputs()
    }

    pub fn period(&self) -> f64 {
        self.g11.period().expect("plant blocks are discrete")
    }

    /// One state-space realization with partitioned inputs `(w, u)` and outputs `(e, y)`.
    pub fn partition(&self) -> PartitionedPlant {
        let (g11, g12, g21) = (&self.g11, &self.g12, &self.g21);
        let (n1, n2, n3) = (g11.nstates(), g12.nstates(), g21.nstates());
        let a = block_diag(&[&g11.a, &g12.a, &g21.a]);
        let b1 = vstack(&[&g11.b, &DMatrix::zeros(n2, g11.ninputs()), &g21.b]);
        let b2 = vstack(&[&DMatrix::zeros(n1, g12.ninputs()), &g12.b, &DMatrix::zeros(n3, g12.ninputs())]);
        let c1 = hstack(&[&g11.c, &g12.c, &DMatrix::zeros(g11.noutputs(), n3)]);
        let c2 = hstack(&[&DMatrix::zeros(g21.noutputs(), n1 + n2), &g21.c]);
        PartitionedPlant {
            a,
            b1,
            b2,
            c1,
            c2,
            d11: g11.d.clone(),
            d12: g12.d.clone(),
            d21: g21.d.clone(),
            period: self.period(),
        }
    }
}

/// Plant matrices `(A, B1, B2, C1, C2, D11, D12, D21)` with `D22 = 0`.
#[derive(Debug, Clone)]
pub struct PartitionedPlant {
    pub a: DMatrix<f64>,
    pub b1: DMatrix<f64>,
    pub b2: DMatrix<f64>,
    pub c1: DMatrix<f64>,
    pub c2: DMatrix<f64>,
    pub d11: DMatrix<f64>,
    pub d12: DMatrix<f64>,
    pub d21: DMatrix<f64>,
    pub period: f64,
}

impl PartitionedPlant {
    pub fn nw(&self) -> usize {
        self.b1.ncols()
    }

    pub fn nu(&self) -> usize {
        self.b2.ncols()
    }

    pub fn ny(&self) -> usize {
        self.c2.nrows()
    }

    /// Appends a measurement-noise channel `eps * I` entering `y` directly.
    pub fn with_measurement_noise(&self, eps: f64) -> Self {
        let ny = self.ny();
        let nx = self.a.nrows();
        let ne = self.c1.nrows();
        let mut p = self.clone();
        p.b1 = hstack(&[&self.b1, &DMatrix::zeros(nx, ny)]);
        p.d11 = hstack(&[&self.d11, &DMatrix::zeros(ne, ny)]);
        p.d21 = hstack(&[&self.d21, &(DMatrix::identity(ny, ny) * eps)]);
        p
    }

    /// Lower fractional closure with the filter `k : y -> u`.
    pub fn close(&self, k: &StateSpace) -> Result<StateSpace> {
        if k.ninputs() != self.ny() || k.noutputs() != self.nu() {
            return Err(Error::DimensionMismatch(format!(
                "filter maps {} -> {}, plant needs {} -> {}",
                k.ninputs(),
                k.noutputs(),
                self.ny(),
                self.nu()
            )));
        }
        let (nx, nk) = (self.a.nrows(), k.nstates());
        let mut a = DMatrix::zeros(nx + nk, nx + nk);
        a.view_mut((0, 0), (nx, nx)).copy_from(&(&self.a + &self.b2 * &k.d * &self.c2));
        a.view_mut((0, nx), (nx, nk)).copy_from(&(&self.b2 * &k.c));
        a.view_mut((nx, 0), (nk, nx)).copy_from(&(&k.b * &self.c2));
        a.view_mut((nx, nx), (nk, nk)).copy_from(&k.a);
        let b = vstack(&[&(&self.b1 + &self.b2 * &k.d * &self.d21), &(&k.b * &self.d21)]);
        let c = hstack(&[&(&self.c1 + &self.d12 * &k.d * &self.c2), &(&self.d12 * &k.c)]);
        let d = &self.d11 + &self.d12 * &k.d * &self.d21;
        StateSpace::discrete(a, b, c, d, self.period)
    }
}

/// `G11 + G12 K G21`, the error system for the filter `k`.
pub fn close_loop(plant: &GeneralizedPlant, k: &StateSpace) -> Result<StateSpace> {
    if !k.is_discrete() {
        return Err(Error::NonDiscreteInput);
    }
    plant.partition().close(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::first_order_lag;
    use crate::ltisys::hinf_norm;
    use approx::assert_relative_eq;

    fn spec(p: &str, m: usize, n: usize) -> DesignSpec {
        DesignSpec::new(p.parse().unwrap(), 1.0, m, n, first_order_lag(10.0)).unwrap()
    }

    #[test]
    fn plant_dimensions_for_three_sample_pattern() {
        let plant = build_plant(&spec("110", 6, 4)).unwrap();
        assert_eq!((plant.g11.noutputs(), plant.g11.ninputs()), (12, 12));
        assert_eq!((plant.g12.noutputs(), plant.g12.ninputs()), (12, 3));
        assert_eq!((plant.g21.noutputs(), plant.g21.ninputs()), (2, 12));
        // 24 delay states plus the model state
        assert_eq!(plant.g11.nstates(), 25);
        assert_eq!(plant.period(), 3.0);
        assert_eq!(plant.g21.period(), Some(3.0));
    }

    #[test]
    fn hold_block_is_negated_block_diagonal_ones() {
        let plant = build_plant(&spec("110", 6, 4)).unwrap();
        let ones = DMatrix::from_element(4, 1, 1.0);
        let expected = block_diag(&[&ones, &ones, &ones]) * -1.0;
        assert_eq!(plant.g12.d, expected);
        assert_eq!(plant.g12.nstates(), 0);
    }

    #[test]
    fn identity_pattern_reduces_to_model() {
        let s = spec("1", 0, 1);
        let plant = build_plant(&s).unwrap();
        let fd = c2d_step_invariant(&s.f, 1.0).unwrap();
        for w in [0.0, 0.3, 2.0] {
            assert_relative_eq!(plant.g11.gain_at(w).unwrap(), fd.gain_at(w).unwrap(), epsilon = 1e-14);
            assert_relative_eq!(plant.g21.gain_at(w).unwrap(), fd.gain_at(w).unwrap(), epsilon = 1e-14);
        }
        assert_eq!(plant.g12.d, DMatrix::from_element(1, 1, -1.0));
        // K = 1 cancels the error exactly
        let unit = StateSpace::gain(DMatrix::from_element(1, 1, 1.0), Domain::Discrete { period: 1.0 });
        let t = close_loop(&plant, &unit).unwrap();
        assert!(hinf_norm(&t, 1e-6).unwrap() < 1e-12);
    }

    #[test]
    fn zero_filter_leaves_open_loop_error() {
        let plant = build_plant(&spec("1100", 4, 4)).unwrap();
        let zero = StateSpace::gain(DMatrix::zeros(4, 2), Domain::Discrete { period: 4.0 });
        let t = close_loop(&plant, &zero).unwrap();
        let a = hinf_norm(&t, 1e-8).unwrap();
        let b = hinf_norm(&plant.g11, 1e-8).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-7);
    }

    #[test]
    fn close_loop_rejects_wrong_filter_shape() {
        let plant = build_plant(&spec("110", 3, 2)).unwrap();
        let bad = StateSpace::gain(DMatrix::zeros(2, 2), Domain::Discrete { period: 3.0 });
        assert!(matches!(close_loop(&plant, &bad), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn lifting_preserves_open_loop_norm() {
        // K = 0: ||L_M L_n z^{-mn} F_d|| = ||F_d||, and F_d peaks at DC.
        let s = spec("1010", 4, 4);
        let blocks = fast_blocks(&s).unwrap();
        let plant = build_plant(&s).unwrap();
        let fd_norm = hinf_norm(&blocks.fd, 1e-9).unwrap();
        assert_relative_eq!(hinf_norm(&blocks.g1, 1e-9).unwrap(), fd_norm, max_relative = 1e-7);
        assert_relative_eq!(hinf_norm(&plant.g11, 1e-9).unwrap(), fd_norm, max_relative = 1e-7);
        assert_relative_eq!(fd_norm, 1.0, max_relative = 1e-7);
    }

    #[test]
    fn measurement_noise_extends_channels() {
        let plant = build_plant(&spec("1100", 4, 2)).unwrap();
        let pp = plant.partition();
        let reg = pp.with_measurement_noise(1e-6);
        assert_eq!(reg.nw(), pp.nw() + 2);
        assert_eq!(reg.d21.columns(pp.nw(), 2).clone_owned(), DMatrix::identity(2, 2) * 1e-6);
    }
}
