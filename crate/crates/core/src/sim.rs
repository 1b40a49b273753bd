//! Time-domain reconstruction experiments.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::multirate::{decimate, expand};
use crate::pattern::DecimationPattern;
use crate::synthesis::PolyphaseFilterBank;

/// Square wave of `+-amplitude`, high for the first half of each period.
pub fn generate_rect_wave(period: usize, amplitude: f64, length: usize) -> Result<Vec<f64>> {
    if period < 2 {
        return Err(Error::InvalidPeriod(format!("period {period} < 2")));
    }
    if length < period {
        return Err(Error::InvalidPeriod(format!("length {length} shorter than period {period}")));
    }
    Ok((0..length)
        .map(|k| if 2 * (k % period) < period { amplitude } else { -amplitude })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub input: Vec<f64>,
    pub reconstructed: Vec<f64>,
    /// `|x[k - delay] - reconstructed[k]|`, with `x` taken as zero before time 0.
    pub abs_error: Vec<f64>,
    pub delay: usize,
    /// Samples excluded from the aggregates below.
    pub warmup: usize,
    pub max_abs_error: f64,
    pub l2_error: f64,
}

impl SimulationReport {
    /// Compares a reconstruction against the input delayed by `delay` samples.
    pub fn compare(input: &[f64], reconstructed: &[f64], delay: usize, warmup: usize) -> Self {
        let len = input.len().min(reconstructed.len());
        let abs_error: Vec<f64> = (0..len)
            .map(|k| {
                let reference = if k >= delay { input[k - delay] } else { 0.0 };
                (reference - reconstructed[k]).abs()
            })
            .collect();
        let tail = &abs_error[warmup.min(len)..];
        Self {
            input: input[..len].to_vec(),
            reconstructed: reconstructed[..len].to_vec(),
            max_abs_error: tail.iter().copied().fold(0.0, f64::max),
            l2_error: tail.iter().map(|e| e * e).sum::<f64>().sqrt(),
            abs_error,
            delay,
            warmup,
        }
    }

    /// Columns `k,input,reconstructed,abs_error`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,input,reconstructed,abs_error\n");
        for k in 0..self.input.len() {
            s.push_str(&format!(
                "{k},{},{},{}\n",
                fmt_f64(self.input[k]),
                fmt_f64(self.reconstructed[k]),
                fmt_f64(self.abs_error[k])
            ));
        }
        s
    }
}

/// Decimates `x` with `p`, interpolates through the filterbank and compares
/// the result with `x` delayed by `m` samples. The first
/// `filter order + m` samples are treated as warm-up.
pub fn run_reconstruction(
    x: &[f64],
    p: &DecimationPattern,
    fb: &PolyphaseFilterBank,
    m: usize,
) -> Result<SimulationReport> {
    if fb.pattern.len() != p.len() || fb.branches.len() != p.retained() {
        return Err(Error::DimensionMismatch(format!(
            "filterbank built for {} cannot interpolate pattern {p}",
            fb.pattern
        )));
    }
    let recon = fb.interpolate(&decimate(x, p));
    Ok(SimulationReport::compare(x, &recon, m, fb.max_order() + m))
}

/// Conventional band-limited interpolator used as a comparison baseline:
/// the zero-filled signal through a `taps`-tap truncated ideal lowpass with
/// cutoff `pi N / M` and gain `M / N`. Returns the output and its delay.
pub fn truncated_sinc_interpolate(x: &[f64], p: &DecimationPattern, taps: usize) -> (Vec<f64>, usize) {
    let ratio = p.retained() as f64 / p.len() as f64;
    let cutoff = PI * ratio;
    let centre = (taps - 1) / 2;
    let h: Vec<f64> = (0..taps)
        .map(|k| {
            let t = k as f64 - centre as f64;
            let ideal = if t == 0.0 { cutoff / PI } else { (cutoff * t).sin() / (PI * t) };
            ideal / ratio
        })
        .collect();
    let mut zero_filled = expand(&decimate(x, p), p);
    zero_filled.resize(x.len(), 0.0);
    let y = (0..x.len())
        .map(|k| (0..taps.min(k + 1)).map(|j| h[j] * zero_filled[k - j]).sum())
        .collect();
    (y, centre)
}

/// Report for [`truncated_sinc_interpolate`], with the first `taps` samples
/// treated as warm-up.
pub fn baseline_report(x: &[f64], p: &DecimationPattern, taps: usize) -> SimulationReport {
    let (y, delay) = truncated_sinc_interpolate(x, p, taps);
    SimulationReport::compare(x, &y, delay, taps)
}
