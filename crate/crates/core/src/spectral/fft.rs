//! Three-dimensional real FFT on the half spectrum.
//!
//! Real data is indexed `x + n(y + n z)`; spectra are indexed
//! `kx + nh(ky + n kz)` with `nh = n/2 + 1`. Forward transforms are scaled by
//! `1/n³` so that spectral values are Fourier coefficients. Work is split over
//! independent lines only, so results do not depend on the thread count.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Grid;

pub struct Fft3 {
    n: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<Fft3>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared transform plans for a grid size.
pub fn plan(grid: &Grid) -> Arc<Fft3> {
    let n = grid.n();
    let mut map = cache().lock().expect("fft cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let mut real = RealFftPlanner::<f64>::new();
            let mut cplx = FftPlanner::<f64>::new();
            Arc::new(Fft3 {
                n,
                r2c: real.plan_fft_forward(n),
                c2r: real.plan_fft_inverse(n),
                forward: cplx.plan_fft_forward(n),
                inverse: cplx.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl Fft3 {
    fn nh(&self) -> usize {
        self.n / 2 + 1
    }

    pub fn forward(&self, real: &[f64]) -> Vec<Complex64> {
        let n = self.n;
        let nh = self.nh();
        assert_eq!(real.len(), n * n * n);
        let mut spec = vec![Complex64::new(0.0, 0.0); nh * n * n];
        spec.par_chunks_mut(nh * n)
            .zip(real.par_chunks(n * n))
            .for_each(|(out_slab, in_slab)| {
                let mut line = vec![0.0; n];
                let mut scratch = self.r2c.make_scratch_vec();
                for (out_line, in_line) in out_slab.chunks_mut(nh).zip(in_slab.chunks(n)) {
                    line.copy_from_slice(in_line);
                    self.r2c
                        .process_with_scratch(&mut line, out_line, &mut scratch)
                        .expect("r2c lengths match the plan");
                }
            });
        self.along_y(&mut spec, &self.forward);
        self.along_z(&mut spec, &self.forward);
        let scale = 1.0 / (n * n * n) as f64;
        spec.par_iter_mut().for_each(|c| *c *= scale);
        spec
    }

    pub fn inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        let n = self.n;
        let nh = self.nh();
        assert_eq!(spec.len(), nh * n * n);
        let mut work = spec.to_vec();
        self.along_z(&mut work, &self.inverse);
        self.along_y(&mut work, &self.inverse);
        let mut real = vec![0.0; n * n * n];
        real.par_chunks_mut(n * n)
            .zip(work.par_chunks_mut(nh * n))
            .for_each(|(out_slab, in_slab)| {
                let mut scratch = self.c2r.make_scratch_vec();
                for (out_line, in_line) in out_slab.chunks_mut(n).zip(in_slab.chunks_mut(nh)) {
                    // the zero and Nyquist bins of a real line are real
                    in_line[0].im = 0.0;
                    in_line[nh - 1].im = 0.0;
                    self.c2r
                        .process_with_scratch(in_line, out_line, &mut scratch)
                        .expect("c2r lengths match the plan");
                }
            });
        real
    }

    fn along_y(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let nh = self.nh();
        data.par_chunks_mut(nh * n).for_each(|slab| {
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            for ix in 0..nh {
                for iy in 0..n {
                    line[iy] = slab[ix + nh * iy];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for iy in 0..n {
                    slab[ix + nh * iy] = line[iy];
                }
            }
        });
    }

    fn along_z(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let nh = self.nh();
        let plane = nh * n;
        let mut lines = vec![Complex64::new(0.0, 0.0); plane * n];
        {
            let src: &[Complex64] = data;
            lines.par_chunks_mut(n * nh).enumerate().for_each(|(block, chunk)| {
                let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
                for (j, line) in chunk.chunks_mut(n).enumerate() {
                    let l = block * nh + j;
                    for (iz, v) in line.iter_mut().enumerate() {
                        *v = src[l + plane * iz];
                    }
                    fft.process_with_scratch(line, &mut scratch);
                }
            });
        }
        let lines = &lines;
        data.par_chunks_mut(plane).enumerate().for_each(|(iz, slab)| {
            for (l, v) in slab.iter_mut().enumerate() {
                *v = lines[l * n + iz];
            }
        });
    }
}
