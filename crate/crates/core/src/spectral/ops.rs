//! Spectral differential operators, Leray projection, and dealiased products.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::fft::plan;
use super::field::{FourierField, RealField, SpectralScalar, SpectralTensor};
use super::SpectralError;

/// Relative divergence accepted for fields that must be solenoidal.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

/// Removes the component of each mode along its wavevector. The mean mode is
/// left untouched.
pub fn leray_project(f: &FourierField) -> FourierField {
    let g = f.grid;
    let mut out = f.clone();
    let [a, b, c] = &mut out.comps;
    for idx in 0..g.spec_len() {
        let k = g.wavevector(idx);
        let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        if k2 == 0.0 {
            continue;
        }
        let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
        let dot = a[idx] * kf[0] + b[idx] * kf[1] + c[idx] * kf[2];
        let s = dot / k2;
        a[idx] -= s * kf[0];
        b[idx] -= s * kf[1];
        c[idx] -= s * kf[2];
    }
    out
}

/// The gradient part `f − P f`.
pub fn gradient_part(f: &FourierField) -> FourierField {
    let mut out = f.sub(&leray_project(f));
    for comp in &mut out.comps {
        comp[0] = Complex64::new(0.0, 0.0);
    }
    out
}

fn ik(k: i64) -> Complex64 {
    Complex64::new(0.0, k as f64)
}

pub fn gradient(f: &FourierField) -> SpectralTensor {
    let g = f.grid;
    let deriv = |comp: &Vec<Complex64>, axis: usize| -> Vec<Complex64> {
        comp.iter()
            .enumerate()
            .map(|(idx, c)| c * ik(g.wavevector(idx)[axis]))
            .collect()
    };
    let row = |i: usize| [deriv(&f.comps[i], 0), deriv(&f.comps[i], 1), deriv(&f.comps[i], 2)];
    SpectralTensor {
        grid: g,
        comps: [row(0), row(1), row(2)],
    }
}

pub fn divergence(f: &FourierField) -> SpectralScalar {
    let g = f.grid;
    let coeffs = (0..g.spec_len())
        .map(|idx| {
            let k = g.wavevector(idx);
            f.comps[0][idx] * ik(k[0]) + f.comps[1][idx] * ik(k[1]) + f.comps[2][idx] * ik(k[2])
        })
        .collect();
    SpectralScalar { grid: g, coeffs }
}

pub fn curl(f: &FourierField) -> FourierField {
    let g = f.grid;
    let mut out = FourierField::zeros(g);
    let [u, v, w] = &f.comps;
    for idx in 0..g.spec_len() {
        let k = g.wavevector(idx);
        out.comps[0][idx] = ik(k[1]) * w[idx] - ik(k[2]) * v[idx];
        out.comps[1][idx] = ik(k[2]) * u[idx] - ik(k[0]) * w[idx];
        out.comps[2][idx] = ik(k[0]) * v[idx] - ik(k[1]) * u[idx];
    }
    out
}

/// `‖∇·f‖ / ‖∇f‖` computed on coefficients; zero for the zero field.
pub fn relative_divergence(f: &FourierField) -> f64 {
    let g = f.grid;
    let (mut div2, mut grad2) = (0.0, 0.0);
    for idx in 0..g.spec_len() {
        let k = g.wavevector(idx);
        let w = g.mode_weight(k[0]);
        let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
        let d = f.comps[0][idx] * kf[0] + f.comps[1][idx] * kf[1] + f.comps[2][idx] * kf[2];
        div2 += w * d.norm_sqr();
        let k2 = kf[0] * kf[0] + kf[1] * kf[1] + kf[2] * kf[2];
        grad2 += w * k2 * (0..3).map(|c| f.comps[c][idx].norm_sqr()).sum::<f64>();
    }
    if grad2 == 0.0 {
        0.0
    } else {
        (div2 / grad2).sqrt()
    }
}

pub fn ensure_divergence_free(f: &FourierField) -> Result<(), SpectralError> {
    let rel = relative_divergence(f);
    if rel > DIVERGENCE_TOLERANCE {
        Err(SpectralError::NotDivergenceFree(rel))
    } else {
        Ok(())
    }
}

/// Keeps modes with every `|k_i| ≤ K`, `3K < n`.
pub fn dealias(f: &FourierField) -> FourierField {
    let kc = f.grid.dealias_cutoff();
    let mut out = f.clone();
    out.map_modes(|k| if k.iter().all(|c| c.abs() <= kc) { 1.0 } else { 0.0 });
    out
}

/// Spectral low-pass keeping `|k| ≤ radius`.
pub fn low_pass(f: &FourierField, radius: f64) -> FourierField {
    let r2 = radius * radius;
    let mut out = f.clone();
    out.map_modes(|k| {
        if ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64) <= r2 {
            1.0
        } else {
            0.0
        }
    });
    out
}

fn pointwise_cross(a: &RealField, b: &RealField) -> RealField {
    let mut out = RealField::zeros(a.grid);
    let [a0, a1, a2] = &a.comps;
    let [b0, b1, b2] = &b.comps;
    let [o0, o1, o2] = &mut out.comps;
    o0.par_iter_mut()
        .zip(o1.par_iter_mut())
        .zip(o2.par_iter_mut())
        .enumerate()
        .for_each(|(i, ((x, y), z))| {
            *x = a1[i] * b2[i] - a2[i] * b1[i];
            *y = a2[i] * b0[i] - a0[i] * b2[i];
            *z = a0[i] * b1[i] - a1[i] * b0[i];
        });
    out
}

/// `P[(u·∇)u]` in rotational form `P[ω × u]` with two-thirds dealiasing; the
/// gradient `∇|u|²/2` is absorbed by the projection.
pub fn nonlinear_term(u: &FourierField) -> Result<FourierField, SpectralError> {
    ensure_divergence_free(u)?;
    Ok(nonlinear_term_unchecked(u).0)
}

/// Returns the projected nonlinear term together with the real-space velocity
/// used to build it.
pub(crate) fn nonlinear_term_unchecked(u: &FourierField) -> (FourierField, RealField) {
    let ut = dealias(u);
    let omega = curl(&ut);
    let u_real = ut.to_real();
    let product = pointwise_cross(&omega.to_real(), &u_real);
    let n = dealias(&FourierField::from_real(&product));
    (leray_project(&n), u_real)
}

/// Dealiased advective product `(b·∇)v` before projection.
pub fn transport_term(b: &FourierField, v: &FourierField) -> FourierField {
    transport_term_with_real(b, v).0
}

pub(crate) fn transport_term_with_real(
    b: &FourierField,
    v: &FourierField,
) -> (FourierField, RealField) {
    let g = v.grid;
    let bt = dealias(b);
    let vt = dealias(v);
    let b_real = bt.to_real();
    let grad = gradient(&vt);
    let fft = plan(&g);
    let mut product = RealField::zeros(g);
    for i in 0..3 {
        let mut acc = vec![0.0; g.real_len()];
        for j in 0..3 {
            let dj = fft.inverse(&grad.comps[i][j]);
            acc.par_iter_mut()
                .zip(&b_real.comps[j])
                .zip(&dj)
                .for_each(|((a, bj), d)| *a += bj * d);
        }
        product.comps[i] = acc;
    }
    (dealias(&FourierField::from_real(&product)), b_real)
}
