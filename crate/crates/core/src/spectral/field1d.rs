use std::f64::consts::PI;

use num_complex::Complex64;
use realfft::RealFftPlanner;

use crate::{Error, Result};

/// A real field on `T = [0, 2π)` as its half spectrum `c_m`, `m = 0..=n/2`,
/// with `u(x) = Σ c_m exp(imx)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field1d {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl Field1d {
    pub fn zeros(n: usize) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "1D size {n} must be a power of two and at least 8"
            )));
        }
        Ok(Field1d {
            n,
            coeffs: vec![Complex64::default(); n / 2 + 1],
        })
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let mut f = Field1d::zeros(n)?;
        if coeffs.len() != f.coeffs.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} coefficients, got {}",
                f.coeffs.len(),
                coeffs.len()
            )));
        }
        f.coeffs = coeffs;
        Ok(f)
    }

    pub fn from_physical(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let mut out = Field1d::zeros(n)?;
        let plan = RealFftPlanner::<f64>::new().plan_fft_forward(n);
        let mut input = values.to_vec();
        plan.process(&mut input, &mut out.coeffs)
            .expect("sizes fixed by the plan");
        let scale = 1.0 / n as f64;
        out.coeffs.iter_mut().for_each(|c| *c *= scale);
        Ok(out)
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values: Vec<f64> = (0..n).map(|i| f(2.0 * PI * i as f64 / n as f64)).collect();
        Field1d::from_physical(&values)
    }

    pub fn to_physical(&self) -> Vec<f64> {
        let plan = RealFftPlanner::<f64>::new().plan_fft_inverse(self.n);
        let mut spec = self.coeffs.clone();
        spec[0].im = 0.0;
        let last = spec.len() - 1;
        spec[last].im = 0.0;
        let mut out = vec![0.0; self.n];
        plan.process(&mut spec, &mut out).expect("sizes fixed by the plan");
        out
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Largest retained `|m|` under 2/3 dealiasing.
    pub fn m_max(&self) -> usize {
        (self.n / 3).min(self.n / 2 - 1)
    }

    pub fn coef(&self, m: i64) -> Complex64 {
        let a = m.unsigned_abs() as usize;
        if a >= self.coeffs.len() {
            return Complex64::default();
        }
        if m < 0 {
            self.coeffs[a].conj()
        } else {
            self.coeffs[a]
        }
    }

    /// Adds `amp·cos(mx + phase)`, `m ≥ 0`.
    pub fn add_cos(&mut self, m: usize, amp: f64, phase: f64) -> Result<()> {
        if m >= self.n / 2 {
            return Err(Error::InvalidArgument(format!("mode {m} does not fit {} points", self.n)));
        }
        if m == 0 {
            self.coeffs[0] += Complex64::new(amp * phase.cos(), 0.0);
        } else {
            self.coeffs[m] += Complex64::from_polar(0.5 * amp, phase);
        }
        Ok(())
    }

    pub fn add_constant(&mut self, value: f64) {
        self.coeffs[0] += Complex64::new(value, 0.0);
    }

    /// Average over `T`.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    fn weighted(&self, w: impl Fn(f64) -> f64) -> f64 {
        let nyq = self.coeffs.len() - 1;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| {
                let mult = if m == 0 || m == nyq { 1.0 } else { 2.0 };
                mult * w(m as f64) * c.norm_sqr()
            })
            .sum()
    }

    /// `‖u‖_{L²(T)}` with Lebesgue measure.
    pub fn l2(&self) -> f64 {
        (2.0 * PI * self.weighted(|_| 1.0)).sqrt()
    }

    /// `‖u‖_{Hˢ(T)}` with weight `(1 + m²)ˢ`.
    pub fn hs_norm(&self, s: f64) -> f64 {
        (2.0 * PI * self.weighted(|m| (1.0 + m * m).powf(s))).sqrt()
    }

    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::GridMismatch(format!("1D sizes {} vs {}", self.n, other.n)));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x + y * a).collect();
        Ok(Field1d { n: self.n, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    /// `u(· + shift)`.
    pub fn translate(&self, shift: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * Complex64::from_polar(1.0, m as f64 * shift))
            .collect();
        Field1d { n: self.n, coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_norms() {
        let u = Field1d::from_fn(32, |x| 0.5 * (3.0 * x).cos() + 0.25).unwrap();
        assert!((u.mean() - 0.25).abs() < 1e-15);
        assert!((u.coef(3).re - 0.25).abs() < 1e-15);
        let back = u.to_physical();
        for (i, v) in back.iter().enumerate() {
            let x = 2.0 * PI * i as f64 / 32.0;
            assert!((v - (0.5 * (3.0 * x).cos() + 0.25)).abs() < 1e-14);
        }
        // ∫(a cos 3x)² = πa², ∫c² = 2πc²
        let expected = (PI * 0.25 + 2.0 * PI * 0.0625).sqrt();
        assert!((u.l2() - expected).abs() < 1e-14);
    }

    #[test]
    fn translation_is_a_phase() {
        let u = Field1d::from_fn(16, |x| x.sin()).unwrap();
        let shifted = u.translate(0.3);
        let direct = Field1d::from_fn(16, |x| (x + 0.3).sin()).unwrap();
        assert!(shifted.sub(&direct).unwrap().l2() < 1e-14);
    }
}
