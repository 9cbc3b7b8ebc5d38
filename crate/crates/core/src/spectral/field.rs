use num_complex::Complex64;

use super::{Transform, TorusGrid};
use crate::{Error, Result};

/// Relative tolerance on the `m = 0` energy for membership in `D₀′`.
pub const D0_TOLERANCE: f64 = 1e-12;

/// A real field on `T × λ⁻¹T` as its half spectrum.
///
/// Coefficients for `m < 0` are implied by `c(−m, −k) = conj(c(m, k))`.
/// The `m = 0` column is stored in full and must itself be Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: TorusGrid) -> Self {
        SpectralField {
            grid,
            coeffs: vec![Complex64::default(); grid.spectral_len()],
        }
    }

    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.spectral_len() {
            return Err(Error::GridMismatch(format!(
                "expected {} coefficients, got {}",
                grid.spectral_len(),
                coeffs.len()
            )));
        }
        Ok(SpectralField { grid, coeffs })
    }

    /// Samples `u[iy * nx + ix]` at `(2πix/nx, 2πiy/(λny))`.
    pub fn from_physical(grid: TorusGrid, values: &[f64]) -> Result<Self> {
        if values.len() != grid.physical_len() {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {}",
                grid.physical_len(),
                values.len()
            )));
        }
        let mut field = SpectralField::zeros(grid);
        Transform::new(grid).forward(values, &mut field.coeffs);
        Ok(field)
    }

    /// Samples `f(x, y)` on the grid.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.physical_len());
        for iy in 0..grid.ny() {
            for ix in 0..grid.nx() {
                values.push(f(grid.x(ix), grid.y(iy)));
            }
        }
        SpectralField::from_physical(grid, &values).expect("sample count matches grid")
    }

    pub fn to_physical(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.physical_len()];
        Transform::new(self.grid).inverse(&self.coeffs, &mut out);
        out
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    fn slot(&self, m: i64, k: i64) -> Option<(usize, bool)> {
        let mx = self.grid.mx_len() as i64;
        let (m, k, conj) = if m < 0 { (-m, -k, true) } else { (m, k, false) };
        if m >= mx {
            return None;
        }
        let ik = self.grid.ik_of(k)?;
        Some((m as usize * self.grid.ny() + ik, conj))
    }

    /// Coefficient of `exp(i(mx + λky))`; zero outside the stored range.
    pub fn coef(&self, m: i64, k: i64) -> Complex64 {
        match self.slot(m, k) {
            Some((i, false)) => self.coeffs[i],
            Some((i, true)) => self.coeffs[i].conj(),
            None => Complex64::default(),
        }
    }

    /// Adds `c·exp(i(mx + λky)) + conj` when `(m, k) ≠ (0, 0)`, or the
    /// real part of `c` when it is the mean mode.
    pub fn add_mode(&mut self, m: i64, k: i64, c: Complex64) -> Result<()> {
        let outside = || Error::ModeOutsideGrid {
            m,
            k,
            nx: self.grid.nx(),
            ny: self.grid.ny(),
        };
        if m == 0 && k == 0 {
            let (i, _) = self.slot(0, 0).ok_or_else(outside)?;
            self.coeffs[i] += Complex64::new(c.re, 0.0);
            return Ok(());
        }
        if m == 0 {
            let (i, _) = self.slot(0, k).ok_or_else(outside)?;
            let (j, _) = self.slot(0, -k).ok_or_else(outside)?;
            self.coeffs[i] += c;
            self.coeffs[j] += c.conj();
            return Ok(());
        }
        let (i, conj) = self.slot(m, k).ok_or_else(outside)?;
        self.coeffs[i] += if conj { c.conj() } else { c };
        Ok(())
    }

    /// Adds `amp·cos(mx + λky + phase)`.
    pub fn add_cos(&mut self, m: i64, k: i64, amp: f64, phase: f64) -> Result<()> {
        if m == 0 && k == 0 {
            return self.add_mode(0, 0, Complex64::new(amp * phase.cos(), 0.0));
        }
        self.add_mode(m, k, Complex64::from_polar(0.5 * amp, phase))
    }

    /// Adds `amp·sin(mx + λky + phase)`.
    pub fn add_sin(&mut self, m: i64, k: i64, amp: f64, phase: f64) -> Result<()> {
        self.add_cos(m, k, amp, phase - std::f64::consts::FRAC_PI_2)
    }

    pub fn single_cos(grid: TorusGrid, m: i64, k: i64, amp: f64) -> Result<Self> {
        let mut u = SpectralField::zeros(grid);
        u.add_cos(m, k, amp, 0.0)?;
        Ok(u)
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x + y * a).collect();
        Ok(SpectralField {
            grid: self.grid,
            coeffs,
        })
    }

    pub fn scale(&self, a: f64) -> Self {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// Applies a multiplier `s(m, k)` on the stored half spectrum. For a real
    /// result `s` must satisfy `s(−m, −k) = conj(s(m, k))`.
    pub fn map_modes(&self, mut s: impl FnMut(i64, i64) -> Complex64) -> Self {
        let ny = self.grid.ny();
        let mut coeffs = self.coeffs.clone();
        for (im, row) in coeffs.chunks_mut(ny).enumerate() {
            for (ik, c) in row.iter_mut().enumerate() {
                if *c != Complex64::default() {
                    *c *= s(im as i64, self.grid.k_of(ik));
                }
            }
        }
        SpectralField {
            grid: self.grid,
            coeffs,
        }
    }

    /// Weighted sum `Σ w(m, k)|c(m, k)|²` over the full spectrum.
    pub fn weighted_energy(&self, mut w: impl FnMut(i64, i64) -> f64) -> f64 {
        let ny = self.grid.ny();
        let nyq = self.grid.mx_len() - 1;
        let mut total = 0.0;
        for (im, row) in self.coeffs.chunks(ny).enumerate() {
            // Columns 0 < m < nx/2 stand for ±m.
            let mult = if im == 0 || im == nyq { 1.0 } else { 2.0 };
            for (ik, c) in row.iter().enumerate() {
                let e = c.norm_sqr();
                if e != 0.0 {
                    total += mult * w(im as i64, self.grid.k_of(ik)) * e;
                }
            }
        }
        total
    }

    /// `‖u‖²_{L²}` with plain Lebesgue measure.
    pub fn l2_sq(&self) -> f64 {
        self.grid.area() * self.weighted_energy(|_, _| 1.0)
    }

    pub fn l2(&self) -> f64 {
        self.l2_sq().sqrt()
    }

    /// Energy share of the `m = 0` column.
    pub fn d0_defect(&self) -> f64 {
        let total = self.weighted_energy(|_, _| 1.0);
        if total == 0.0 {
            return 0.0;
        }
        self.weighted_energy(|m, _| if m == 0 { 1.0 } else { 0.0 }) / total
    }

    pub fn check_d0(&self) -> Result<()> {
        let fraction = self.d0_defect();
        if fraction > D0_TOLERANCE {
            return Err(Error::ConstraintViolation {
                fraction,
                tolerance: D0_TOLERANCE,
            });
        }
        Ok(())
    }

    /// Largest violation of `c(0, −k) = conj(c(0, k))` and of real
    /// Nyquist entries, relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let ny = self.grid.ny();
        let mut defect: f64 = 0.0;
        for ik in 0..ny {
            let jk = (ny - ik) % ny;
            defect = defect.max((self.coeffs[ik] - self.coeffs[jk].conj()).norm());
        }
        let nyq = (self.grid.mx_len() - 1) * ny;
        for ik in 0..ny {
            let jk = (ny - ik) % ny;
            defect = defect.max((self.coeffs[nyq + ik] - self.coeffs[nyq + jk].conj()).norm());
        }
        defect / scale
    }

    /// Zeroes the `m = 0` column, projecting onto `D₀′`.
    pub fn project_d0(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[..self.grid.ny()].iter_mut().for_each(|c| *c = Complex64::default());
        out
    }

    /// Zeroes every mode outside the retained (dealiased) region.
    pub fn dealiased(&self) -> Self {
        let (m_max, k_max) = (self.grid.m_max(), self.grid.k_max());
        let ny = self.grid.ny();
        let mut out = self.clone();
        for (im, row) in out.coeffs.chunks_mut(ny).enumerate() {
            for (ik, c) in row.iter_mut().enumerate() {
                if im as i64 > m_max || self.grid.k_of(ik).abs() > k_max {
                    *c = Complex64::default();
                }
            }
        }
        out
    }

    /// Nonzero modes `(m ≥ 0, k)` with their coefficients.
    pub fn support(&self) -> Vec<(i64, i64, Complex64)> {
        let ny = self.grid.ny();
        let mut out = Vec::new();
        for (im, row) in self.coeffs.chunks(ny).enumerate() {
            for (ik, c) in row.iter().enumerate() {
                if *c != Complex64::default() {
                    out.push((im as i64, self.grid.k_of(ik), *c));
                }
            }
        }
        out
    }

    /// Largest `|m|` and `|k|` carrying a nonzero coefficient.
    pub fn reach(&self) -> (i64, i64) {
        self.support()
            .iter()
            .fold((0, 0), |(m, k), &(mi, ki, _)| (m.max(mi), k.max(ki.abs())))
    }

    /// Copies the spectrum onto another grid with the same `λ`. Fails if a
    /// nonzero mode does not fit.
    pub fn resample(&self, grid: TorusGrid) -> Result<Self> {
        if grid.lambda() != self.grid.lambda() {
            return Err(Error::GridMismatch("resampling across different λ".into()));
        }
        let mut out = SpectralField::zeros(grid);
        let half_x = (grid.nx() / 2) as i64;
        for (m, k, c) in self.support() {
            let fits = m < half_x && grid.ik_of(k).is_some() && k != -((grid.ny() / 2) as i64);
            if !fits {
                return Err(Error::ModeOutsideGrid {
                    m,
                    k,
                    nx: grid.nx(),
                    ny: grid.ny(),
                });
            }
            let (i, _) = out.slot(m, k).expect("checked above");
            out.coeffs[i] = c;
        }
        Ok(out)
    }

    pub fn max_abs_physical(&self) -> f64 {
        self.to_physical().iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cos_mode_has_expected_coefficients_and_norm() {
        let g = TorusGrid::new(16, 16).unwrap();
        let u = SpectralField::single_cos(g, 1, 0, 1.0).unwrap();
        assert!((u.coef(1, 0).re - 0.5).abs() < 1e-15);
        assert!((u.coef(-1, 0).re - 0.5).abs() < 1e-15);
        let expected = (2.0 * std::f64::consts::PI.powi(2) / 35f64.sqrt()).sqrt();
        assert!((u.l2() - expected).abs() < 1e-14);
    }

    #[test]
    fn physical_sampling_matches_builder() {
        let g = TorusGrid::new(16, 32).unwrap();
        let lam = g.lambda_f64();
        let sampled = SpectralField::from_fn(g, |x, y| 0.3 * (2.0 * x + 3.0 * lam * y + 0.4).sin());
        let mut built = SpectralField::zeros(g);
        built.add_sin(2, 3, 0.3, 0.4).unwrap();
        let diff = sampled.sub(&built).unwrap();
        assert!(diff.l2() < 1e-13);
    }

    #[test]
    fn project_d0_examples() {
        let g = TorusGrid::new(16, 16).unwrap();
        let one = SpectralField::from_fn(g, |_, _| 1.0);
        assert!(one.project_d0().l2() == 0.0);
        let lam = g.lambda_f64();
        let cos_y = SpectralField::from_fn(g, |_, y| (lam * y).cos());
        assert!(cos_y.project_d0().l2() < 1e-15);
        let cos_x = SpectralField::single_cos(g, 1, 0, 1.0).unwrap();
        let both = cos_x.add(&cos_y).unwrap();
        assert!(both.project_d0().sub(&cos_x).unwrap().l2() < 1e-14);
        assert!(both.check_d0().is_err());
        assert!(cos_x.check_d0().is_ok());
    }

    #[test]
    fn resample_keeps_modes() {
        let g = TorusGrid::new(16, 16).unwrap();
        let mut u = SpectralField::zeros(g);
        u.add_cos(3, -2, 0.7, 0.1).unwrap();
        let big = u.resample(TorusGrid::new(32, 64).unwrap()).unwrap();
        assert_eq!(big.coef(3, -2), u.coef(3, -2));
        assert!((big.l2() - u.l2()).abs() < 1e-15);
        let small = SpectralField::single_cos(TorusGrid::new(32, 32).unwrap(), 12, 0, 1.0).unwrap();
        assert!(small.resample(g).is_err());
    }
}
