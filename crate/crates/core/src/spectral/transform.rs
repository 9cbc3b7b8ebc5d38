//! Real 2D transforms between the physical grid and the half spectrum.
//!
//! Physical samples are stored y-major (`u[iy * nx + ix]`), coefficients
//! m-major (`c[im * ny + ik]`, `im = 0..=nx/2`). The convention is
//! `u(x, y) = Σ c(m, k) exp(i(mx + λky))`, so forward transforms carry the
//! `1/(nx·ny)` factor.
//!
//! Row transforms may run on the current rayon pool. Each row is computed
//! by the same plan regardless of which worker runs it, so results do not
//! depend on the thread count.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

use super::TorusGrid;

const TILE: usize = 32;

pub struct Transform {
    grid: TorusGrid,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
    parallel: bool,
    spec_buf: Vec<Complex64>,
    work: Vec<Complex64>,
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform")
            .field("grid", &self.grid)
            .field("parallel", &self.parallel)
            .finish()
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    // src is rows x cols, dst becomes cols x rows
    for r0 in (0..rows).step_by(TILE) {
        for c0 in (0..cols).step_by(TILE) {
            for r in r0..(r0 + TILE).min(rows) {
                for c in c0..(c0 + TILE).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

impl Transform {
    pub fn new(grid: TorusGrid) -> Self {
        let mut real = RealFftPlanner::<f64>::new();
        let mut cplx = FftPlanner::<f64>::new();
        Transform {
            grid,
            r2c: real.plan_fft_forward(grid.nx()),
            c2r: real.plan_fft_inverse(grid.nx()),
            fwd_y: cplx.plan_fft_forward(grid.ny()),
            inv_y: cplx.plan_fft_inverse(grid.ny()),
            parallel: false,
            spec_buf: vec![Complex64::default(); grid.spectral_len()],
            work: vec![Complex64::default(); grid.spectral_len()],
        }
    }

    /// Run row transforms on the ambient rayon pool.
    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// Coefficients to physical samples.
    pub fn inverse(&mut self, spec: &[Complex64], out: &mut [f64]) {
        let (nx, ny, mx) = (self.grid.nx(), self.grid.ny(), self.grid.mx_len());
        assert_eq!(spec.len(), mx * ny);
        assert_eq!(out.len(), nx * ny);
        self.spec_buf.copy_from_slice(spec);

        let inv_y = &self.inv_y;
        let y_pass = |row: &mut [Complex64], scratch: &mut Vec<Complex64>| {
            if row.iter().any(|c| c.re != 0.0 || c.im != 0.0) {
                inv_y.process_with_scratch(row, scratch);
            }
        };
        let y_scratch = || vec![Complex64::default(); inv_y.get_inplace_scratch_len()];
        if self.parallel {
            self.spec_buf.par_chunks_mut(ny).for_each_init(y_scratch, |s, row| y_pass(row, s));
        } else {
            let mut s = y_scratch();
            self.spec_buf.chunks_mut(ny).for_each(|row| y_pass(row, &mut s));
        }

        transpose(&self.spec_buf, &mut self.work, mx, ny);

        let c2r = &self.c2r;
        let x_pass = |row: &mut [Complex64], dst: &mut [f64], scratch: &mut Vec<Complex64>| {
            // DC and Nyquist of a real signal are real; drop round-off.
            row[0].im = 0.0;
            row[mx - 1].im = 0.0;
            c2r.process_with_scratch(row, dst, scratch)
                .expect("c2r input sizes are fixed by the plan");
        };
        let x_scratch = || c2r.make_scratch_vec();
        if self.parallel {
            self.work
                .par_chunks_mut(mx)
                .zip(out.par_chunks_mut(nx))
                .for_each_init(x_scratch, |s, (row, dst)| x_pass(row, dst, s));
        } else {
            let mut s = x_scratch();
            for (row, dst) in self.work.chunks_mut(mx).zip(out.chunks_mut(nx)) {
                x_pass(row, dst, &mut s);
            }
        }
    }

    /// Physical samples to coefficients. Only x-rows `m ≤ m_limit` receive
    /// the y-transform; the others are left zero.
    pub fn forward_limited(&mut self, phys: &[f64], out: &mut [Complex64], m_limit: usize) {
        let (nx, ny, mx) = (self.grid.nx(), self.grid.ny(), self.grid.mx_len());
        assert_eq!(phys.len(), nx * ny);
        assert_eq!(out.len(), mx * ny);

        let r2c = &self.r2c;
        let x_pass = |(src, dst): (&[f64], &mut [Complex64]), state: &mut (Vec<f64>, Vec<Complex64>)| {
            state.0.copy_from_slice(src);
            r2c.process_with_scratch(&mut state.0, dst, &mut state.1)
                .expect("r2c sizes are fixed by the plan");
        };
        let x_state = || (vec![0.0; nx], r2c.make_scratch_vec());
        if self.parallel {
            phys.par_chunks(nx)
                .zip(self.work.par_chunks_mut(mx))
                .for_each_init(x_state, |s, pair| x_pass(pair, s));
        } else {
            let mut s = x_state();
            for pair in phys.chunks(nx).zip(self.work.chunks_mut(mx)) {
                x_pass(pair, &mut s);
            }
        }

        transpose(&self.work, out, ny, mx);

        let scale = 1.0 / (nx * ny) as f64;
        let rows = (m_limit + 1).min(mx);
        let fwd_y = &self.fwd_y;
        let y_pass = |row: &mut [Complex64], scratch: &mut Vec<Complex64>| {
            fwd_y.process_with_scratch(row, scratch);
            row.iter_mut().for_each(|c| *c *= scale);
        };
        let y_scratch = || vec![Complex64::default(); fwd_y.get_inplace_scratch_len()];
        let (active, rest) = out.split_at_mut(rows * ny);
        if self.parallel {
            active.par_chunks_mut(ny).for_each_init(y_scratch, |s, row| y_pass(row, s));
        } else {
            let mut s = y_scratch();
            active.chunks_mut(ny).for_each(|row| y_pass(row, &mut s));
        }
        rest.iter_mut().for_each(|c| *c = Complex64::default());
    }

    pub fn forward(&mut self, phys: &[f64], out: &mut [Complex64]) {
        let mx = self.grid.mx_len();
        self.forward_limited(phys, out, mx - 1);
    }
}
