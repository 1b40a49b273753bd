use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::DecimationPattern;
use crate::statespace::StateSpace;

use nalgebra::DMatrix;

/// Problem data for one interpolation-filter design.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSpec {
    pub pattern: DecimationPattern,
    /// Sampling period `h` in seconds.
    pub h: f64,
    /// Reconstruction delay in samples; the delay in seconds is `m * h`.
    pub m: usize,
    /// Fast-discretization ratio.
    pub n: usize,
    /// Continuous-time signal generator: stable, strictly proper, SISO.
    pub f: StateSpace,
}

impl DesignSpec {
    pub fn new(pattern: DecimationPattern, h: f64, m: usize, n: usize, f: StateSpace) -> Result<Self> {
        let spec = Self { pattern, h, m, n, f };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidSpec(format!("sampling period h = {} must be positive", self.h)));
        }
        if self.n == 0 {
            return Err(Error::InvalidSpec("fast-discretization ratio n must be at least 1".into()));
        }
        if self.f.is_discrete() {
            return Err(Error::NonContinuousInput);
        }
        if self.f.ninputs() != 1 || self.f.noutputs() != 1 {
            return Err(Error::InvalidSpec(format!(
                "signal model must be SISO, got {} inputs and {} outputs",
                self.f.ninputs(),
                self.f.noutputs()
            )));
        }
        if self.f.d.iter().any(|&v| v != 0.0) {
            return Err(Error::InvalidSpec("signal model must be strictly proper (D = 0)".into()));
        }
        if !self.f.is_stable() {
            return Err(Error::InvalidSpec("signal model must be stable".into()));
        }
        Ok(())
    }

    /// Reconstruction delay `L = m h` in seconds.
    pub fn delay_seconds(&self) -> f64 {
        self.m as f64 * self.h
    }

    pub fn with_pattern(&self, pattern: DecimationPattern) -> Self {
        Self { pattern, ..self.clone() }
    }
}

/// First-order lag `1 / (T s + 1)` realized as `A = -1/T, B = 1, C = 1/T, D = 0`.
pub fn first_order_lag(time_constant: f64) -> StateSpace {
    let k = 1.0 / time_constant;
    StateSpace::continuous(
        DMatrix::from_element(1, 1, -k),
        DMatrix::from_element(1, 1, 1.0),
        DMatrix::from_element(1, 1, k),
        DMatrix::zeros(1, 1),
    )
    .expect("scalar realization is consistent")
}

/// Problem data minus the pattern, as used by pattern searches.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseSpec {
    pub h: f64,
    /// Delay in samples; `None` means "equal to the segment length".
    pub m: Option<usize>,
    pub n: usize,
    pub f: StateSpace,
}

impl BaseSpec {
    pub fn for_pattern(&self, pattern: DecimationPattern) -> Result<DesignSpec> {
        let m = self.m.unwrap_or(pattern.len());
        DesignSpec::new(pattern, self.h, m, self.n, self.f.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaStep {
    pub gamma: f64,
    pub feasible: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statespace::Domain;

    fn pat(s: &str) -> DecimationPattern {
        s.parse().unwrap()
    }

    #[test]
    fn accepts_lowpass_model() {
        let spec = DesignSpec::new(pat("110"), 1.0, 6, 4, first_order_lag(10.0)).unwrap();
        assert_eq!(spec.delay_seconds(), 6.0);
        assert_eq!(spec.f.a[(0, 0)], -0.1);
        assert_eq!(spec.f.c[(0, 0)], 0.1);
    }

    #[test]
    fn rejects_bad_models() {
        let mut f = first_order_lag(10.0);
        f.d[(0, 0)] = 1.0;
        assert!(DesignSpec::new(pat("1"), 1.0, 0, 1, f).is_err());
        let unstable = StateSpace::continuous(
            DMatrix::from_element(1, 1, 0.5),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::zeros(1, 1),
        )
        .unwrap();
        assert!(DesignSpec::new(pat("1"), 1.0, 0, 1, unstable).is_err());
        let mut disc = first_order_lag(10.0);
        disc.domain = Domain::Discrete { period: 1.0 };
        assert_eq!(DesignSpec::new(pat("1"), 1.0, 0, 1, disc), Err(Error::NonContinuousInput));
        assert!(DesignSpec::new(pat("1"), 0.0, 0, 1, first_order_lag(1.0)).is_err());
        assert!(DesignSpec::new(pat("1"), 1.0, 0, 0, first_order_lag(1.0)).is_err());
    }
}
