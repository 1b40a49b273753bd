//! Real state-space models `(A, B, C, D)` tagged with their time domain.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex<f64>>;

/// Time domain of a model; discrete models carry their sampling period in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Continuous,
    Discrete { period: f64 },
}

impl Domain {
    pub fn is_discrete(&self) -> bool {
        matches!(self, Domain::Discrete { .. })
    }

    pub fn period(&self) -> Option<f64> {
        match *self {
            Domain::Discrete { period } => Some(period),
            Domain::Continuous => None,
        }
    }

    /// Domains agree when both are continuous, or both discrete with periods
    /// equal to within rounding.
    pub fn compatible(&self, other: &Domain) -> bool {
        match (self, other) {
            (Domain::Continuous, Domain::Continuous) => true,
            (Domain::Discrete { period: a }, Domain::Discrete { period: b }) => {
                (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub domain: Domain,
}

impl StateSpace {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
        domain: Domain,
    ) -> Result<Self> {
        let nx = a.nrows();
        if a.ncols() != nx {
            return Err(Error::DimensionMismatch(format!("A is {}x{}", nx, a.ncols())));
        }
        if b.nrows() != nx {
            return Err(Error::DimensionMismatch(format!("B has {} rows, A has {nx}", b.nrows())));
        }
        if c.ncols() != nx {
            return Err(Error::DimensionMismatch(format!("C has {} columns, A has {nx}", c.ncols())));
        }
        if d.nrows() != c.nrows() || d.ncols() != b.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "D is {}x{}, expected {}x{}",
                d.nrows(),
                d.ncols(),
                c.nrows(),
                b.ncols()
            )));
        }
        if let Domain::Discrete { period } = domain {
            if !(period > 0.0 && period.is_finite()) {
                return Err(Error::InvalidSpec(format!("sampling period {period} must be positive")));
            }
        }
        Ok(Self { a, b, c, d, domain })
    }

    pub fn discrete(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
        period: f64,
    ) -> Result<Self> {
        Self::new(a, b, c, d, Domain::Discrete { period })
    }

    pub fn continuous(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self> {
        Self::new(a, b, c, d, Domain::Continuous)
    }

    /// A memoryless system `y = D u`.
    pub fn gain(d: DMatrix<f64>, domain: Domain) -> Self {
        let (p, m) = d.shape();
        Self {
            a: DMatrix::zeros(0, 0),
            b: DMatrix::zeros(0, m),
            c: DMatrix::zeros(p, 0),
            d,
            domain,
        }
    }

    pub fn nstates(&self) -> usize {
        self.a.nrows()
    }

    pub fn ninputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn noutputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn is_discrete(&self) -> bool {
        self.domain.is_discrete()
    }

    pub fn period(&self) -> Option<f64> {
        self.domain.period()
    }

    pub fn poles(&self) -> Vec<Complex<f64>> {
        if self.nstates() == 0 {
            return Vec::new();
        }
        self.a.complex_eigenvalues().iter().copied().collect()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.poles().iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// Asymptotic stability in the model's own domain.
    pub fn is_stable(&self) -> bool {
        match self.domain {
            Domain::Discrete { .. } => self.spectral_radius() < 1.0,
            Domain::Continuous => self.poles().iter().all(|p| p.re < 0.0),
        }
    }

    /// Transfer matrix `C (zI - A)^{-1} B + D` at a complex point.
    pub fn eval(&self, z: Complex<f64>) -> Result<CMatrix> {
        let nx = self.nstates();
        let d = self.d.map(|v| Complex::new(v, 0.0));
        if nx == 0 {
            return Ok(d);
        }
        let mut zi_a = self.a.map(|v| Complex::new(-v, 0.0));
        for i in 0..nx {
            zi_a[(i, i)] += z;
        }
        let bc = self.b.map(|v| Complex::new(v, 0.0));
        let lu = zi_a.lu();
        let x = lu.solve(&bc).ok_or(Error::SingularAtGridPoint(z.arg()))?;
        if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::SingularAtGridPoint(z.arg()));
        }
        let cc = self.c.map(|v| Complex::new(v, 0.0));
        Ok(cc * x + d)
    }

    /// Largest singular value of the transfer matrix on the unit circle at `omega`.
    pub fn gain_at(&self, omega: f64) -> Result<f64> {
        let g = self.eval(Complex::from_polar(1.0, omega))?;
        Ok(max_singular_value(&g))
    }

    /// Response to an input sequence from zero initial state.
    pub fn simulate(&self, inputs: &[DVector<f64>]) -> Vec<DVector<f64>> {
        let mut x = DVector::zeros(self.nstates());
        inputs
            .iter()
            .map(|u| {
                let y = &self.c * &x + &self.d * u;
                x = &self.a * &x + &self.b * u;
                y
            })
            .collect()
    }

    /// Single-input single-output convenience wrapper around [`simulate`](Self::simulate).
    pub fn simulate_siso(&self, u: &[f64]) -> Vec<f64> {
        debug_assert!(self.ninputs() == 1 && self.noutputs() == 1);
        let mut x = DVector::zeros(self.nstates());
        let mut out = Vec::with_capacity(u.len());
        for &uk in u {
            out.push((&self.c * &x)[0] + self.d[(0, 0)] * uk);
            x = &self.a * &x + self.b.column(0) * uk;
        }
        out
    }

    /// Markov parameters `D, CB, CAB, ...` (first `len` terms).
    pub fn impulse_response(&self, len: usize) -> Vec<DMatrix<f64>> {
        let mut out = Vec::with_capacity(len);
        if len == 0 {
            return out;
        }
        out.push(self.d.clone());
        let mut ak_b = self.b.clone();
        for _ in 1..len {
            out.push(&self.c * &ak_b);
            ak_b = &self.a * ak_b;
        }
        out
    }

    /// Dual system `(A', C', B', D')`.
    pub fn transpose(&self) -> Self {
        Self {
            a: self.a.transpose(),
            b: self.c.transpose(),
            c: self.b.transpose(),
            d: self.d.transpose(),
            domain: self.domain,
        }
    }

    /// `L * G`, a static gain applied to the outputs.
    pub fn premultiply(&self, l: &DMatrix<f64>) -> Result<Self> {
        if l.ncols() != self.noutputs() {
            return Err(Error::DimensionMismatch(format!(
                "gain with {} columns applied to {} outputs",
                l.ncols(),
                self.noutputs()
            )));
        }
        Ok(Self {
            a: self.a.clone(),
            b: self.b.clone(),
            c: l * &self.c,
            d: l * &self.d,
            domain: self.domain,
        })
    }

    /// `G * R`, a static gain applied to the inputs.
    pub fn postmultiply(&self, r: &DMatrix<f64>) -> Result<Self> {
        if r.nrows() != self.ninputs() {
            return Err(Error::DimensionMismatch(format!(
                "gain with {} rows applied to {} inputs",
                r.nrows(),
                self.ninputs()
            )));
        }
        Ok(Self {
            a: self.a.clone(),
            b: &self.b * r,
            c: self.c.clone(),
            d: &self.d * r,
            domain: self.domain,
        })
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            a: self.a.clone(),
            b: self.b.clone(),
            c: &self.c * k,
            d: &self.d * k,
            domain: self.domain,
        }
    }

    /// Keeps the listed input columns and output rows.
    pub fn select(&self, inputs: &[usize], outputs: &[usize]) -> Self {
        Self {
            a: self.a.clone(),
            b: self.b.select_columns(inputs),
            c: self.c.select_rows(outputs),
            d: self.d.select_rows(outputs).select_columns(inputs),
            domain: self.domain,
        }
    }
}

pub(crate) fn max_singular_value(g: &CMatrix) -> f64 {
    if g.is_empty() {
        return 0.0;
    }
    if g.nrows() == 1 || g.ncols() == 1 {
        return g.norm();
    }
    g.singular_values_unordered().iter().copied().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn first_order() -> StateSpace {
        StateSpace::discrete(
            DMatrix::from_element(1, 1, 0.5),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::zeros(1, 1),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn rejects_inconsistent_dimensions() {
        let r = StateSpace::discrete(
            DMatrix::zeros(2, 2),
            DMatrix::zeros(1, 1),
            DMatrix::zeros(1, 2),
            DMatrix::zeros(1, 1),
            1.0,
        );
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
        let r = StateSpace::discrete(
            DMatrix::zeros(1, 1),
            DMatrix::zeros(1, 1),
            DMatrix::zeros(1, 1),
            DMatrix::zeros(1, 1),
            0.0,
        );
        assert!(r.is_err());
    }

    #[test]
    fn pure_gain_has_no_states() {
        let g = StateSpace::gain(DMatrix::from_element(2, 3, 1.5), Domain::Discrete { period: 1.0 });
        assert_eq!((g.nstates(), g.ninputs(), g.noutputs()), (0, 3, 2));
        assert!(g.is_stable());
        let y = g.simulate(&[DVector::from_element(3, 1.0)]);
        assert_relative_eq!(y[0][0], 4.5);
    }

    #[test]
    fn eval_first_order_at_dc() {
        let g = first_order();
        assert_relative_eq!(g.gain_at(0.0).unwrap(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(g.gain_at(std::f64::consts::PI).unwrap(), 1.0 / 1.5, epsilon = 1e-14);
    }

    #[test]
    fn impulse_matches_simulation() {
        let g = first_order();
        let mut u = vec![0.0; 6];
        u[0] = 1.0;
        let y = g.simulate_siso(&u);
        let h = g.impulse_response(6);
        for k in 0..6 {
            assert_relative_eq!(y[k], h[k][(0, 0)], epsilon = 1e-15);
        }
        assert_relative_eq!(y[3], 0.25);
    }
}
