//! Discrete Fourier machinery: Leray projection with the centered-difference
//! symbol, and trigonometric resampling between lattices.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{Grid, ScalarField, VectorField};
use crate::error::{Error, Result};

/// Applies a 1-D transform along every axis of a row-major array of shape `[n; d]`.
fn transform_all_axes(data: &mut [Complex64], dim: usize, n: usize, fft: &Arc<dyn Fft<f64>>) {
    let len = data.len();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        for base in 0..len {
            if !(base / stride).is_multiple_of(n) {
                continue;
            }
            for (c, slot) in line.iter_mut().enumerate() {
                *slot = data[base + c * stride];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (c, v) in line.iter().enumerate() {
                data[base + c * stride] = *v;
            }
        }
    }
}

fn to_complex(f: &ScalarField) -> Vec<Complex64> {
    f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// Symbol of the centered difference at index `m`: `sin(2 pi m / n) / h`,
/// exactly zero on the mean and Nyquist modes.
fn centered_symbol(m: usize, n: usize, h: f64) -> f64 {
    if m == 0 || 2 * m == n {
        0.0
    } else {
        (2.0 * PI * m as f64 / n as f64).sin() / h
    }
}

/// Helmholtz split `v = w + grad p` with `divergence(w) = 0` for the centered
/// divergence. Modes where the difference symbol vanishes carry no pressure
/// and pass through unchanged; `p` has zero mean.
pub fn leray_project(v: &VectorField) -> (VectorField, ScalarField) {
    let g = *v.grid();
    let (d, n, len) = (g.dim(), g.n(), g.len());
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);

    let mut spectra: Vec<Vec<Complex64>> = v
        .components()
        .iter()
        .map(|c| {
            let mut s = to_complex(c);
            transform_all_axes(&mut s, d, n, &forward);
            s
        })
        .collect();

    let symbols: Vec<f64> = (0..n).map(|m| centered_symbol(m, n, g.h())).collect();
    let mut pressure = vec![Complex64::new(0.0, 0.0); len];
    let i = Complex64::new(0.0, 1.0);
    for (idx, p_hat) in pressure.iter_mut().enumerate() {
        let mut kappa = [0.0; 3];
        let mut k2 = 0.0;
        for (a, ka) in kappa.iter_mut().enumerate().take(d) {
            *ka = symbols[g.coord(idx, a)];
            k2 += *ka * *ka;
        }
        if k2 == 0.0 {
            continue;
        }
        let mut div_hat = Complex64::new(0.0, 0.0);
        for a in 0..d {
            div_hat += i * kappa[a] * spectra[a][idx];
        }
        *p_hat = -div_hat / k2;
        for a in 0..d {
            spectra[a][idx] -= i * kappa[a] * *p_hat;
        }
    }

    let scale = 1.0 / len as f64;
    let back = |mut s: Vec<Complex64>| {
        transform_all_axes(&mut s, d, n, &inverse);
        let values = s.iter().map(|c| c.re * scale).collect();
        ScalarField::from_values(g, values).expect("length preserved")
    };
    let comps = spectra.into_iter().map(back).collect();
    let w = VectorField { grid: g, comps };
    (w, back(pressure))
}

/// Remaps one spectrum line of length `src.len()` onto `dst.len()` modes.
/// Upsampling splits the source Nyquist mode symmetrically; downsampling folds
/// the two modes aliasing onto the target Nyquist.
fn remap_line(src: &[Complex64], dst: &mut [Complex64]) {
    let (ns, nt) = (src.len(), dst.len());
    dst.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
    let scale = nt as f64 / ns as f64;
    let keep = ns.min(nt) / 2;
    dst[0] = src[0] * scale;
    for m in 1..keep {
        dst[m] = src[m] * scale;
        dst[nt - m] = src[ns - m] * scale;
    }
    if nt > ns {
        let half = src[ns / 2] * (0.5 * scale);
        dst[ns / 2] = half;
        dst[nt - ns / 2] = half;
    } else if nt < ns {
        dst[nt / 2] = (src[nt / 2] + src[ns - nt / 2]) * scale;
    } else {
        dst[ns / 2] = src[ns / 2];
    }
}

/// Trigonometric interpolation of `f` onto `target`, which must have the same
/// dimension. Node `j` of the target is the point `j * l_src / n_target` of the
/// source torus; the target side only relabels lengths. Equal point counts
/// return the nodal values unchanged.
pub fn resample(f: &ScalarField, target: Grid) -> Result<ScalarField> {
    let src = *f.grid();
    if src.dim() != target.dim() {
        return Err(Error::IncompatibleGrid(format!(
            "dimension {} vs {}",
            src.dim(),
            target.dim()
        )));
    }
    let (ns, nt, d) = (src.n(), target.n(), src.dim());
    if ns == nt {
        return ScalarField::from_values(target, f.values().to_vec());
    }
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(ns);
    let inverse = planner.plan_fft_inverse(nt);

    let mut spec = to_complex(f);
    transform_all_axes(&mut spec, d, ns, &forward);

    // Remap one axis at a time; `shape` tracks the per-axis extent.
    let mut shape = vec![ns; d];
    let mut line_src = vec![Complex64::new(0.0, 0.0); ns];
    let mut line_dst = vec![Complex64::new(0.0, 0.0); nt];
    for axis in 0..d {
        let mut new_shape = shape.clone();
        new_shape[axis] = nt;
        let strides = |s: &[usize]| -> Vec<usize> {
            (0..d).map(|a| s[a + 1..].iter().product()).collect()
        };
        let (old_st, new_st) = (strides(&shape), strides(&new_shape));
        let outer: usize = shape.iter().enumerate().filter(|&(a, _)| a != axis).map(|(_, &s)| s).product();
        let mut out = vec![Complex64::new(0.0, 0.0); new_shape.iter().product()];
        for line in 0..outer {
            // decode the multi-index of the other axes
            let (mut rem, mut base_old, mut base_new) = (line, 0, 0);
            for a in (0..d).rev().filter(|&a| a != axis) {
                let c = rem % shape[a];
                rem /= shape[a];
                base_old += c * old_st[a];
                base_new += c * new_st[a];
            }
            for (c, v) in line_src.iter_mut().enumerate() {
                *v = spec[base_old + c * old_st[axis]];
            }
            remap_line(&line_src, &mut line_dst);
            for (c, v) in line_dst.iter().enumerate() {
                out[base_new + c * new_st[axis]] = *v;
            }
        }
        spec = out;
        shape = new_shape;
    }

    transform_all_axes(&mut spec, d, nt, &inverse);
    let scale = 1.0 / target.len() as f64;
    ScalarField::from_values(target, spec.iter().map(|c| c.re * scale).collect())
}
