//! Finite-difference stencils on the periodic lattice.

use super::{Grid, ScalarField, SymTensorField, VectorField};
use crate::error::{Error, Result};

/// Coefficients below this value are treated as sign errors rather than round-off.
const COEFFICIENT_TOLERANCE: f64 = -1e-12;

/// Centered difference `(f[j+e] - f[j-e]) / 2h` along `axis`.
fn centered_diff(f: &ScalarField, axis: usize) -> ScalarField {
    let g = *f.grid();
    let v = f.values();
    let inv = 0.5 / g.h();
    ScalarField::from_index_fn(g, |j| (v[g.shift(j, axis, 1)] - v[g.shift(j, axis, -1)]) * inv)
}

pub fn gradient(f: &ScalarField) -> VectorField {
    let g = *f.grid();
    VectorField { grid: g, comps: (0..g.dim()).map(|a| centered_diff(f, a)).collect() }
}

pub fn divergence(v: &VectorField) -> ScalarField {
    let g = *v.grid();
    let inv = 0.5 / g.h();
    ScalarField::from_index_fn(g, |j| {
        let mut s = 0.0;
        for (a, c) in v.components().iter().enumerate() {
            let c = c.values();
            s += c[g.shift(j, a, 1)] - c[g.shift(j, a, -1)];
        }
        s * inv
    })
}

/// `D(u) = (grad u + grad u^T) / 2` from centered differences.
pub fn sym_gradient(u: &VectorField) -> SymTensorField {
    let g = *u.grid();
    let d = g.dim();
    // du[i][j] = d_j u_i
    let du: Vec<Vec<ScalarField>> = u
        .components()
        .iter()
        .map(|ui| (0..d).map(|j| centered_diff(ui, j)).collect())
        .collect();
    SymTensorField::from_entries(g, |i, j| {
        if i == j {
            du[i][i].clone()
        } else {
            du[i][j].zip_map(&du[j][i], |a, b| 0.5 * (a + b))
        }
    })
}

/// Pointwise `D : D`, off-diagonal entries counted twice.
pub fn frobenius_sq(t: &SymTensorField) -> ScalarField {
    let g = *t.grid();
    let d = g.dim();
    ScalarField::from_index_fn(g, |idx| {
        let mut s = 0.0;
        for i in 0..d {
            for j in i..d {
                let e = t.entry(i, j).values()[idx];
                s += if i == j { e * e } else { 2.0 * e * e };
            }
        }
        s
    })
}

fn check_coefficient(a: &ScalarField) -> Result<()> {
    let min = a.min();
    if min < COEFFICIENT_TOLERANCE || min.is_nan() {
        return Err(Error::NegativeCoefficient { min });
    }
    Ok(())
}

/// Sums face fluxes into cell values: `sum_i (F_i[j] - F_i[j - e_i]) / h`,
/// where `F_i[j]` lives on the face between `j` and `j + e_i`.
fn flux_divergence(g: Grid, faces: &[Vec<f64>]) -> ScalarField {
    let inv_h = 1.0 / g.h();
    ScalarField::from_index_fn(g, |j| {
        let mut s = 0.0;
        for (a, fa) in faces.iter().enumerate() {
            s += fa[j] - fa[g.shift(j, a, -1)];
        }
        s * inv_h
    })
}

/// Conservative `div(a grad f)` with arithmetic-mean face coefficients.
pub fn div_flux(a: &ScalarField, f: &ScalarField) -> Result<ScalarField> {
    a.grid().check_same(f.grid())?;
    check_coefficient(a)?;
    let g = *f.grid();
    let (av, fv) = (a.values(), f.values());
    let inv_h = 1.0 / g.h();
    let faces: Vec<Vec<f64>> = (0..g.dim())
        .map(|axis| {
            super::build(&g, |j| {
                let jp = g.shift(j, axis, 1);
                0.5 * (av[j] + av[jp]) * (fv[jp] - fv[j]) * inv_h
            })
        })
        .collect();
    Ok(flux_divergence(g, &faces))
}

/// Squared gradient magnitude on the face between `j` and `j + e_axis`: normal
/// component from the one-sided difference, tangential components from the
/// average of the centered differences at the two adjacent points.
#[inline]
fn face_gradient_sq(g: &Grid, v: &[f64], j: usize, axis: usize) -> f64 {
    let h = g.h();
    let jp = g.shift(j, axis, 1);
    let normal = (v[jp] - v[j]) / h;
    let mut sq = normal * normal;
    for m in (0..g.dim()).filter(|&m| m != axis) {
        let t = (v[g.shift(j, m, 1)] - v[g.shift(j, m, -1)] + v[g.shift(jp, m, 1)]
            - v[g.shift(jp, m, -1)])
            / (4.0 * h);
        sq += t * t;
    }
    sq
}

/// The monotone map `|xi|^(r-2) xi` on a single vector, the flux density of
/// the r-Laplacian.
pub fn phi_r(xi: &[f64], r: f64) -> Vec<f64> {
    let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let w = if norm > 0.0 { norm.powf(r - 2.0) } else { 0.0 };
    xi.iter().map(|x| w * x).collect()
}

/// Discrete `div(|grad f|^(r-2) grad f)` in flux form.
///
/// `r = 2` is accepted and reproduces `div_flux(1, f)`.
pub fn r_laplacian(f: &ScalarField, r: f64) -> ScalarField {
    let g = *f.grid();
    let v = f.values();
    let inv_h = 1.0 / g.h();
    let half_exp = 0.5 * (r - 2.0);
    let faces: Vec<Vec<f64>> = (0..g.dim())
        .map(|axis| {
            super::build(&g, |j| {
                let normal = (v[g.shift(j, axis, 1)] - v[j]) * inv_h;
                face_gradient_sq(&g, v, j, axis).powf(half_exp) * normal
            })
        })
        .collect();
    flux_divergence(g, &faces)
}

/// Largest face weight `|grad f|^(r-2)` entering [`r_laplacian`].
pub fn max_face_weight(f: &ScalarField, r: f64) -> f64 {
    let g = *f.grid();
    let v = f.values();
    let half_exp = 0.5 * (r - 2.0);
    (0..g.dim())
        .flat_map(|axis| (0..g.len()).map(move |j| (axis, j)))
        .map(|(axis, j)| face_gradient_sq(&g, v, j, axis).powf(half_exp))
        .fold(0.0, f64::max)
}

/// Component `i` is `sum_j d_j (a * D_ij)` with centered differences.
pub fn div_tensor_flux(a: &ScalarField, t: &SymTensorField) -> Result<VectorField> {
    a.grid().check_same(t.grid())?;
    check_coefficient(a)?;
    let g = *a.grid();
    let d = g.dim();
    let inv = 0.5 / g.h();
    let weighted = SymTensorField::from_entries(g, |i, j| a.zip_map(t.entry(i, j), |x, y| x * y));
    let comps = (0..d)
        .map(|i| {
            ScalarField::from_index_fn(g, |idx| {
                let mut s = 0.0;
                for j in 0..d {
                    let e = weighted.entry(i, j).values();
                    s += e[g.shift(idx, j, 1)] - e[g.shift(idx, j, -1)];
                }
                s * inv
            })
        })
        .collect();
    Ok(VectorField { grid: g, comps })
}

/// Vector r-Laplacian `div(|D(u)|^(r-2) D(u))`.
pub fn r_laplacian_vec(u: &VectorField, r: f64) -> VectorField {
    let strain = sym_gradient(u);
    let half_exp = 0.5 * (r - 2.0);
    let weight = frobenius_sq(&strain).map(|s| s.powf(half_exp));
    div_tensor_flux(&weight, &strain).expect("weights are nonnegative and share the grid")
}

/// Skew-symmetric advection `(u . grad f + div(u f)) / 2`.
pub fn advect(u: &VectorField, f: &ScalarField) -> ScalarField {
    let g = *f.grid();
    let inv = 0.5 / g.h();
    let fv = f.values();
    ScalarField::from_index_fn(g, |j| {
        let mut s = 0.0;
        for (a, ua) in u.components().iter().enumerate() {
            let uv = ua.values();
            let (jp, jm) = (g.shift(j, a, 1), g.shift(j, a, -1));
            s += uv[j] * (fv[jp] - fv[jm]) + (uv[jp] * fv[jp] - uv[jm] * fv[jm]);
        }
        0.5 * s * inv
    })
}

/// `(u . grad) u` in skew form, component by component.
pub fn advect_vec(u: &VectorField) -> VectorField {
    u.map_components(|ui| advect(u, ui))
}
