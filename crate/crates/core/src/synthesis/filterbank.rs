//! Nonuniform filterbank realization of a blocked filter `K~ : N -> M`.
//!
//! Branch `k` takes the retained sample at position `i_k` of each segment,
//! re-inserts it at the segment start (upsampling by `M`), filters it with
//!
//! ```text
//! Phi_{i_k}(z) = sum_j z^{-j} K~_{j,k}(z^M)
//! ```
//!
//! and all branches are summed.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ltisys::series;
use crate::pattern::DecimationPattern;
use crate::statespace::{Domain, StateSpace};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterBranch {
    /// Position `i_k` of the retained sample this branch handles.
    pub delay_index: usize,
    #[serde(flatten, with = "crate::io::model_serde")]
    pub filter: StateSpace,
}

#[derive(Debug, Clone)]
pub struct PolyphaseFilterBank {
    pub pattern: DecimationPattern,
    pub branches: Vec<FilterBranch>,
}

/// `G(z^M)`: every state delay of `G` stretched to `M` steps.
fn upsample_dynamics(g: &StateSpace, m: usize) -> StateSpace {
    let period = g.period().expect("discrete") / m as f64;
    let domain = Domain::Discrete { period };
    let nx = g.nstates();
    if nx == 0 || m == 1 {
        return StateSpace { domain, ..g.clone() };
    }
    let big = nx * m;
    let mut a = DMatrix::zeros(big, big);
    // chunk 0 receives A * (last chunk); chunk j+1 copies chunk j
    a.view_mut((0, (m - 1) * nx), (nx, nx)).copy_from(&g.a);
    for j in 1..m {
        a.view_mut((j * nx, (j - 1) * nx), (nx, nx)).fill_with_identity();
    }
    let mut b = DMatrix::zeros(big, g.ninputs());
    b.view_mut((0, 0), (nx, g.ninputs())).copy_from(&g.b);
    let mut c = DMatrix::zeros(g.noutputs(), big);
    c.view_mut((0, (m - 1) * nx), (g.noutputs(), nx)).copy_from(&g.c);
    StateSpace { a, b, c, d: g.d.clone(), domain }
}

/// `[1, z^{-1}, ..., z^{-(M-1)}]` as an `M`-input summing delay line.
fn interleaver(m: usize, period: f64) -> StateSpace {
    let s = m - 1;
    let mut a = DMatrix::zeros(s, s);
    for i in 0..s.saturating_sub(1) {
        a[(i, i + 1)] = 1.0;
    }
    let mut b = DMatrix::zeros(s, m);
    for i in 0..s {
        b[(i, i + 1)] = 1.0;
    }
    let mut c = DMatrix::zeros(1, s);
    if s > 0 {
        c[(0, 0)] = 1.0;
    }
    let mut d = DMatrix::zeros(1, m);
    d[(0, 0)] = 1.0;
    StateSpace { a, b, c, d, domain: Domain::Discrete { period } }
}

/// Splits a blocked filter into one base-rate filter per retained position.
pub fn extract_filterbank(k: &StateSpace, p: &DecimationPattern) -> Result<PolyphaseFilterBank> {
    let (m, n) = (p.len(), p.retained());
    if k.noutputs() != m || k.ninputs() != n {
        return Err(Error::DimensionMismatch(format!(
            "filter is {}x{}, pattern {} needs {m}x{n}",
            k.noutputs(),
            k.ninputs(),
            p
        )));
    }
    if !k.is_discrete() {
        return Err(Error::NonDiscreteInput);
    }
    let outputs: Vec<usize> = (0..m).collect();
    let branches = p
        .ones_indices()
        .iter()
        .enumerate()
        .map(|(col, &idx)| {
            let up = upsample_dynamics(&k.select(&[col], &outputs), m);
            let period = up.period().expect("discrete");
            let filter = series(&interleaver(m, period), &up)?;
            Ok(FilterBranch { delay_index: idx, filter })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PolyphaseFilterBank { pattern: p.clone(), branches })
}

impl PolyphaseFilterBank {
    /// Runs the filterbank on a decimated sequence and returns the
    /// full-rate reconstruction (`M` samples per complete or partial group).
    pub fn interpolate(&self, decimated: &[f64]) -> Vec<f64> {
        let (m, n) = (self.pattern.len(), self.pattern.retained());
        let segments = decimated.len().div_ceil(n);
        let len = segments * m;
        let mut out = vec![0.0; len];
        for (k, branch) in self.branches.iter().enumerate() {
            let mut u = vec![0.0; len];
            for t in 0..segments {
                if let Some(&v) = decimated.get(t * n + k) {
                    u[t * m] = v;
                }
            }
            for (o, y) in out.iter_mut().zip(branch.filter.simulate_siso(&u)) {
                *o += y;
            }
        }
        out
    }

    /// Largest state dimension over the branches.
    pub fn max_order(&self) -> usize {
        self.branches.iter().map(|b| b.filter.nstates()).max().unwrap_or(0)
    }
}
