use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::SpectralError;

/// Uniform periodic grid on `[0, 2π)³` with `n` points per direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self, SpectralError> {
        if n < 8 || !n.is_power_of_two() {
            return Err(SpectralError::InvalidGrid(n));
        }
        Ok(Grid { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored `k_x` values in the half spectrum.
    pub fn nh(&self) -> usize {
        self.n / 2 + 1
    }

    pub fn real_len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn spec_len(&self) -> usize {
        self.nh() * self.n * self.n
    }

    pub fn box_length(&self) -> f64 {
        2.0 * PI
    }

    pub fn dx(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(3)
    }

    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(3)
    }

    /// Largest retained wavenumber under the two-thirds rule (`3K < n`).
    pub fn dealias_cutoff(&self) -> i64 {
        ((self.n - 1) / 3) as i64
    }

    /// Signed wavenumber stored at FFT index `i` along `y` or `z`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// FFT index along `y` or `z` holding wavenumber `k`.
    pub fn index_of(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    pub fn spec_index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        ix + self.nh() * (iy + self.n * iz)
    }

    pub fn real_index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.n * (y + self.n * z)
    }

    /// Wavevector of a half-spectrum index.
    pub fn wavevector(&self, idx: usize) -> [i64; 3] {
        let nh = self.nh();
        let ix = idx % nh;
        let iy = (idx / nh) % self.n;
        let iz = idx / (nh * self.n);
        [ix as i64, self.wavenumber(iy), self.wavenumber(iz)]
    }

    /// Modes with any component at `±n/2` carry no independent information
    /// and are kept at zero.
    pub fn is_nyquist(&self, k: [i64; 3]) -> bool {
        let h = (self.n / 2) as i64;
        k.iter().any(|c| c.abs() == h)
    }

    /// Multiplicity of a half-spectrum mode in full-spectrum sums.
    pub fn mode_weight(&self, kx: i64) -> f64 {
        if kx == 0 || kx == (self.n / 2) as i64 {
            1.0
        } else {
            2.0
        }
    }

    /// Coordinates of grid point `i` along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }
}
