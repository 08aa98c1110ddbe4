use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;

use super::field::FourierField;
use super::{Grid, SpectralError};

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

// Each wavevector draws from its own stream so the field restricted to a
// fixed set of modes does not depend on the grid size.
fn mode_rng(seed: u64, k: [i64; 3]) -> ChaCha8Rng {
    let mut h = splitmix(seed);
    for c in k {
        h = splitmix(h ^ c as u64);
    }
    ChaCha8Rng::seed_from_u64(h)
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Kept modes on the `k_x = 0` plane; the others are their conjugates.
fn canonical(k: [i64; 3]) -> bool {
    k[0] > 0 || k[1] > 0 || (k[1] == 0 && k[2] > 0)
}

/// Divergence-free Gaussian field with `|û(k)| ∝ |k|^{−(σ+3/2)}`, so that it
/// lies in `H^s` exactly for `s < σ`.
pub fn random_rough_field(sigma: f64, seed: u64, grid: Grid) -> Result<FourierField, SpectralError> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(SpectralError::InvalidRoughness(sigma));
    }
    let mut out = FourierField::zeros(grid);
    let draw = |k: [i64; 3]| -> [Complex64; 3] {
        let mut rng = mode_rng(seed, k);
        let mut v = [gaussian(&mut rng), gaussian(&mut rng), gaussian(&mut rng)];
        let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
        let k2 = kf[0] * kf[0] + kf[1] * kf[1] + kf[2] * kf[2];
        let dot = v[0] * kf[0] + v[1] * kf[1] + v[2] * kf[2];
        let amp = k2.powf(-(sigma + 1.5) / 2.0);
        for i in 0..3 {
            v[i] = (v[i] - dot * (kf[i] / k2)) * amp;
        }
        v
    };
    for idx in 0..grid.spec_len() {
        let k = grid.wavevector(idx);
        if k == [0, 0, 0] || grid.is_nyquist(k) {
            continue;
        }
        let v = if canonical(k) {
            draw(k)
        } else {
            draw([-k[0], -k[1], -k[2]]).map(|c| c.conj())
        };
        for c in 0..3 {
            out.comps[c][idx] = v[c];
        }
    }
    Ok(out)
}
