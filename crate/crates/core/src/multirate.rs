//! Finite-sequence multirate operators: nonuniform decimation and expansion,
//! polyphase blocking, and the selection matrix `E`.
//!
//! For a pattern `p` of length `M` with `N` ones at `i_1 < ... < i_N`:
//!
//! * `decimate(x, p) = unblock(E * block(x, M))`
//! * `expand(y, p)   = unblock(E' * block(y, N))`

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::pattern::DecimationPattern;
use crate::statespace::StateSpace;

/// Keeps the samples whose position within each segment is marked by a one.
/// A trailing partial segment keeps only the marked positions that exist.
pub fn decimate(x: &[f64], p: &DecimationPattern) -> Vec<f64> {
    x.iter()
        .enumerate()
        .filter(|(k, _)| p.is_retained(*k))
        .map(|(_, &v)| v)
        .collect()
}

/// Spreads each group of `N` samples over one `M`-sample segment, with zeros
/// at the discarded positions. A trailing partial group fills only the
/// positions it covers.
pub fn expand(y: &[f64], p: &DecimationPattern) -> Vec<f64> {
    let m = p.len();
    let n = p.retained();
    let idx = p.ones_indices();
    let mut out = Vec::with_capacity(y.len().div_ceil(n) * m);
    for group in y.chunks(n) {
        let mut seg = vec![0.0; m];
        for (k, &v) in group.iter().enumerate() {
            seg[idx[k]] = v;
        }
        if group.len() < n {
            seg.truncate(idx[group.len() - 1] + 1);
        }
        out.extend(seg);
    }
    out
}

/// The `N x M` selection matrix with row `k` selecting position `i_k`.
pub fn selection_matrix(p: &DecimationPattern) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(p.retained(), p.len());
    for (row, &col) in p.ones_indices().iter().enumerate() {
        e[(row, col)] = 1.0;
    }
    e
}

/// Polyphase blocking: consecutive `m`-sample frames as vectors.
pub fn block(x: &[f64], m: usize) -> Result<Vec<DVector<f64>>> {
    if m == 0 || !x.len().is_multiple_of(m) {
        return Err(Error::LengthNotDivisible { len: x.len(), block: m });
    }
    Ok(x.chunks(m).map(DVector::from_column_slice).collect())
}

/// Inverse of [`block`].
pub fn unblock(v: &[DVector<f64>]) -> Vec<f64> {
    v.iter().flat_map(|f| f.iter().copied()).collect()
}

/// Decimated-then-interpolated output of a periodic filter realized as the
/// blocked system `K~ : N -> M`, i.e. `unblock_M(K~ * block_N(y))` for the
/// decimated sequence `y`.
pub fn polyphase_interpolate(filter: &StateSpace, decimated: &[f64], p: &DecimationPattern) -> Result<Vec<f64>> {
    if filter.ninputs() != p.retained() || filter.noutputs() != p.len() {
        return Err(Error::DimensionMismatch(format!(
            "filter is {}x{}, pattern needs {}x{}",
            filter.noutputs(),
            filter.ninputs(),
            p.len(),
            p.retained()
        )));
    }
    let frames = block(decimated, p.retained())?;
    Ok(unblock(&filter.simulate(&frames)))
}
