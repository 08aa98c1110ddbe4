use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::fft::plan;
use super::Grid;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Real samples of a vector field, three components in `x`-fastest order.
#[derive(Clone, Debug, PartialEq)]
pub struct RealField {
    pub grid: Grid,
    pub comps: [Vec<f64>; 3],
}

impl RealField {
    pub fn zeros(grid: Grid) -> Self {
        let z = vec![0.0; grid.real_len()];
        RealField {
            grid,
            comps: [z.clone(), z.clone(), z],
        }
    }

    /// Samples `f(x, y, z)` on the grid.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64, f64) -> [f64; 3] + Sync) -> Self {
        let n = grid.n();
        let mut out = RealField::zeros(grid);
        let [a, b, c] = &mut out.comps;
        a.par_chunks_mut(n * n)
            .zip(b.par_chunks_mut(n * n))
            .zip(c.par_chunks_mut(n * n))
            .enumerate()
            .for_each(|(z, ((sa, sb), sc))| {
                let zv = grid.coord(z);
                for y in 0..n {
                    let yv = grid.coord(y);
                    for x in 0..n {
                        let v = f(grid.coord(x), yv, zv);
                        let i = x + n * y;
                        sa[i] = v[0];
                        sb[i] = v[1];
                        sc[i] = v[2];
                    }
                }
            });
        out
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> Vec<f64> {
        let [a, b, c] = &self.comps;
        a.iter()
            .zip(b)
            .zip(c)
            .map(|((x, y), z)| (x * x + y * y + z * z).sqrt())
            .collect()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitude().into_iter().fold(0.0, f64::max)
    }
}

/// Spectral coefficients of a real vector field on the half spectrum
/// `k_x ≥ 0`; the conjugate half is implied by Hermitian symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField {
    pub grid: Grid,
    pub comps: [Vec<Complex64>; 3],
}

impl FourierField {
    pub fn zeros(grid: Grid) -> Self {
        let z = vec![ZERO; grid.spec_len()];
        FourierField {
            grid,
            comps: [z.clone(), z.clone(), z],
        }
    }

    /// Transform of real samples; Nyquist modes are dropped.
    pub fn from_real(real: &RealField) -> Self {
        let fft = plan(&real.grid);
        let mut out = FourierField {
            grid: real.grid,
            comps: [
                fft.forward(&real.comps[0]),
                fft.forward(&real.comps[1]),
                fft.forward(&real.comps[2]),
            ],
        };
        out.clear_nyquist();
        out
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64, f64) -> [f64; 3] + Sync) -> Self {
        Self::from_real(&RealField::from_fn(grid, f))
    }

    pub fn to_real(&self) -> RealField {
        let fft = plan(&self.grid);
        RealField {
            grid: self.grid,
            comps: [
                fft.inverse(&self.comps[0]),
                fft.inverse(&self.comps[1]),
                fft.inverse(&self.comps[2]),
            ],
        }
    }

    pub fn clear_nyquist(&mut self) {
        let g = self.grid;
        for comp in &mut self.comps {
            for (idx, c) in comp.iter_mut().enumerate() {
                if g.is_nyquist(g.wavevector(idx)) {
                    *c = ZERO;
                }
            }
        }
    }

    /// Mean value of each component (the `k = 0` coefficient).
    pub fn mean(&self) -> [f64; 3] {
        [self.comps[0][0].re, self.comps[1][0].re, self.comps[2][0].re]
    }

    pub fn scale(&mut self, factor: f64) {
        for comp in &mut self.comps {
            comp.iter_mut().for_each(|c| *c *= factor);
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.scale(factor);
        out
    }

    /// `self += factor · other`.
    pub fn add_scaled(&mut self, other: &FourierField, factor: f64) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y * factor);
        }
    }

    pub fn sub(&self, other: &FourierField) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, -1.0);
        out
    }

    /// Multiplies every mode by `f(k)`.
    pub fn map_modes(&mut self, f: impl Fn([i64; 3]) -> f64) {
        let g = self.grid;
        let factors: Vec<f64> = (0..g.spec_len()).map(|i| f(g.wavevector(i))).collect();
        for comp in &mut self.comps {
            comp.iter_mut().zip(&factors).for_each(|(c, s)| *c *= *s);
        }
    }

    /// `L²` inner product over the box, `(2π)³ Σ_k Re f̂(k)·conj ĝ(k)`, summed
    /// in a fixed order.
    pub fn inner(&self, other: &FourierField) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        let g = self.grid;
        let mut total = 0.0;
        for (a, b) in self.comps.iter().zip(&other.comps) {
            for (idx, (x, y)) in a.iter().zip(b).enumerate() {
                let kx = (idx % g.nh()) as i64;
                total += g.mode_weight(kx) * (x * y.conj()).re;
            }
        }
        total * g.volume()
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    /// `½‖u‖²`.
    pub fn energy(&self) -> f64 {
        0.5 * self.norm_sq()
    }

    /// `‖∇u‖² = (2π)³ Σ |k|² |û(k)|²`.
    pub fn enstrophy(&self) -> f64 {
        let g = self.grid;
        let mut total = 0.0;
        for comp in &self.comps {
            for (idx, c) in comp.iter().enumerate() {
                let k = g.wavevector(idx);
                let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
                total += g.mode_weight(k[0]) * k2 * c.norm_sqr();
            }
        }
        total * g.volume()
    }

    /// Largest `|k_i|` carrying a nonzero coefficient.
    pub fn max_wavenumber(&self) -> i64 {
        let g = self.grid;
        let mut kmax = 0;
        for comp in &self.comps {
            for (idx, c) in comp.iter().enumerate() {
                if c.norm_sqr() > 0.0 {
                    let k = g.wavevector(idx);
                    kmax = kmax.max(k.iter().map(|v| v.abs()).max().unwrap());
                }
            }
        }
        kmax
    }

    /// Zero-pads (or truncates) the spectrum onto another grid.
    pub fn resample(&self, grid: Grid) -> FourierField {
        let mut out = FourierField::zeros(grid);
        let src = self.grid;
        for idx in 0..src.spec_len() {
            let k = src.wavevector(idx);
            if grid.is_nyquist(k) || k.iter().any(|c| c.abs() > (grid.n() / 2) as i64) {
                continue;
            }
            let dst = grid.spec_index(k[0] as usize, grid.index_of(k[1]), grid.index_of(k[2]));
            for c in 0..3 {
                out.comps[c][dst] = self.comps[c][idx];
            }
        }
        out
    }
}

/// Spectral scalar field on the half spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralScalar {
    pub grid: Grid,
    pub coeffs: Vec<Complex64>,
}

impl SpectralScalar {
    pub fn to_real(&self) -> Vec<f64> {
        plan(&self.grid).inverse(&self.coeffs)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `comps[i][j] = ∂_j u_i` in spectral space.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralTensor {
    pub grid: Grid,
    pub comps: [[Vec<Complex64>; 3]; 3],
}

impl SpectralTensor {
    /// Pointwise Frobenius norm `|∇u|` on the grid.
    pub fn frobenius(&self) -> Vec<f64> {
        let fft = plan(&self.grid);
        let mut acc = vec![0.0; self.grid.real_len()];
        for row in &self.comps {
            for comp in row {
                let real = fft.inverse(comp);
                acc.iter_mut().zip(&real).for_each(|(a, v)| *a += v * v);
            }
        }
        acc.iter_mut().for_each(|a| *a = a.sqrt());
        acc
    }
}
