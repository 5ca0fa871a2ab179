//! Periodic grid data model and discrete operators.
//!
//! All fields live on a uniform collocated lattice of the torus `(0, l)^d`,
//! stored row-major with the last axis varying fastest. Operators are built
//! from second-order centered differences so that the discrete gradient and
//! divergence are exact negative adjoints under the inner product
//! `h^d * sum(f * g)`.

mod ops;
mod spectral;

pub use ops::{
    advect, advect_vec, div_flux, div_tensor_flux, divergence, frobenius_sq, gradient,
    max_face_weight, phi_r, r_laplacian, r_laplacian_vec, sym_gradient,
};
pub use spectral::{leray_project, resample};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Grids with at least this many points are filled in parallel.
const PAR_THRESHOLD: usize = 1 << 12;

/// Uniform periodic lattice with `n` points per axis on a cube of side `side`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    side: f64,
    h: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, side: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 4, got {n}"
            )));
        }
        if !(side.is_finite() && side > 0.0) {
            return Err(Error::InvalidGrid(format!("side must be positive, got {side}")));
        }
        Ok(Self { dim, n, side, h: side / n as f64 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Total number of lattice points, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of one lattice point, `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Volume of the torus, `l^d`.
    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    /// Linear offset between neighbours along `axis`.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.dim - 1 - axis) as u32)
    }

    /// Lattice coordinate of linear index `idx` along `axis`.
    #[inline]
    pub fn coord(&self, idx: usize, axis: usize) -> usize {
        (idx / self.stride(axis)) % self.n
    }

    /// Periodic neighbour of `idx` displaced by `offset` points along `axis`.
    #[inline]
    pub fn shift(&self, idx: usize, axis: usize, offset: isize) -> usize {
        let stride = self.stride(axis);
        let c = (idx / stride) % self.n;
        let nc = (c as isize + offset).rem_euclid(self.n as isize) as usize;
        idx + nc * stride - c * stride
    }

    /// Physical position of point `idx`; unused trailing entries are zero.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let mut x = [0.0; 3];
        for (axis, xa) in x.iter_mut().enumerate().take(self.dim) {
            *xa = self.coord(idx, axis) as f64 * self.h;
        }
        x
    }

    fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Evaluates `f` at every lattice index, in parallel on large grids.
pub(crate) fn build<F>(grid: &Grid, f: F) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let len = grid.len();
    if len >= PAR_THRESHOLD {
        (0..len).into_par_iter().map(f).collect()
    } else {
        (0..len).map(f).collect()
    }
}

/// Pairwise summation with a fixed split order, independent of thread count.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    /// Samples `f` at the lattice positions.
    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn([f64; 3]) -> f64 + Sync + Send,
    {
        let values = build(&grid, |idx| f(grid.position(idx)));
        Self { grid, values }
    }

    pub(crate) fn from_index_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        Self { grid, values: build(&grid, f) }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map<F: Fn(f64) -> f64 + Sync + Send>(&self, f: F) -> Self {
        Self::from_index_fn(self.grid, |i| f(self.values[i]))
    }

    /// Pointwise combination of two fields on the same grid.
    ///
    /// Panics if the grids differ; callers inside the crate only combine fields
    /// that share a state.
    pub fn zip_map<F: Fn(f64, f64) -> f64 + Sync + Send>(&self, other: &Self, f: F) -> Self {
        assert_eq!(self.grid, other.grid, "zip_map on mismatched grids");
        Self::from_index_fn(self.grid, |i| f(self.values[i], other.values[i]))
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: f64, other: &Self) {
        assert_eq!(self.grid, other.grid, "axpy on mismatched grids");
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `h^d * sum(values)` with deterministic pairwise summation.
    pub fn integrate(&self) -> f64 {
        self.grid.cell_volume() * pairwise_sum(&self.values)
    }

    pub fn mean(&self) -> f64 {
        pairwise_sum(&self.values) / self.values.len() as f64
    }

    /// Discrete inner product `h^d * sum(f * g)`.
    pub fn dot(&self, other: &Self) -> f64 {
        self.zip_map(other, |a, b| a * b).integrate()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        self.map(|v| v.abs().powf(p)).integrate().powf(1.0 / p)
    }

    /// `(h^d * sum |grad f|^p)^(1/p)` using the centered gradient.
    pub fn w1p_seminorm(&self, p: f64) -> f64 {
        gradient(self).magnitude().lp_norm(p)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    grid: Grid,
    comps: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(comps: Vec<ScalarField>) -> Result<Self> {
        let grid = *comps
            .first()
            .ok_or_else(|| Error::InvalidGrid("vector field without components".into()))?
            .grid();
        if comps.len() != grid.dim() {
            return Err(Error::InvalidGrid(format!(
                "{} components for a {}-dimensional grid",
                comps.len(),
                grid.dim()
            )));
        }
        for c in &comps {
            grid.check_same(c.grid())?;
        }
        Ok(Self { grid, comps })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, comps: (0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect() }
    }

    /// Spatially constant vector field; missing entries of `c` are zero.
    pub fn constant(grid: Grid, c: &[f64]) -> Self {
        let comps = (0..grid.dim())
            .map(|i| ScalarField::constant(grid, c.get(i).copied().unwrap_or(0.0)))
            .collect();
        Self { grid, comps }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.comps[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut ScalarField {
        &mut self.comps[i]
    }

    pub fn map_components<F: Fn(&ScalarField) -> ScalarField>(&self, f: F) -> Self {
        Self { grid: self.grid, comps: self.comps.iter().map(f).collect() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map_components(|f| f.scaled(c))
    }

    pub fn axpy(&mut self, c: f64, other: &Self) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            a.axpy(c, b);
        }
    }

    /// Pointwise Euclidean norm.
    pub fn magnitude(&self) -> ScalarField {
        self.norm_sq().map(f64::sqrt)
    }

    pub fn norm_sq(&self) -> ScalarField {
        ScalarField::from_index_fn(self.grid, |i| {
            self.comps.iter().map(|c| c.values[i] * c.values[i]).sum()
        })
    }

    /// Discrete inner product `h^d * sum(u . v)`.
    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.grid, other.grid, "dot on mismatched grids");
        ScalarField::from_index_fn(self.grid, |i| {
            self.comps.iter().zip(&other.comps).map(|(a, b)| a.values[i] * b.values[i]).sum()
        })
        .integrate()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(ScalarField::max_abs).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(ScalarField::is_finite)
    }
}

/// Symmetric `d x d` tensor field stored as its upper triangle, row by row.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensorField {
    grid: Grid,
    entries: Vec<ScalarField>,
}

impl SymTensorField {
    pub fn zeros(grid: Grid) -> Self {
        let d = grid.dim();
        Self { grid, entries: (0..d * (d + 1) / 2).map(|_| ScalarField::zeros(grid)).collect() }
    }

    /// Builds the tensor from a function of the (row, column) pair with `row <= col`.
    pub fn from_entries<F: FnMut(usize, usize) -> ScalarField>(grid: Grid, mut f: F) -> Self {
        let d = grid.dim();
        let mut entries = Vec::with_capacity(d * (d + 1) / 2);
        for i in 0..d {
            for j in i..d {
                entries.push(f(i, j));
            }
        }
        Self { grid, entries }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let d = self.grid.dim();
        i * d - i * (i + 1) / 2 + j
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarField {
        &self.entries[self.slot(i, j)]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut ScalarField {
        let s = self.slot(i, j);
        &mut self.entries[s]
    }

    pub fn trace(&self) -> ScalarField {
        let mut tr = ScalarField::zeros(self.grid);
        for i in 0..self.grid.dim() {
            tr.axpy(1.0, self.entry(i, i));
        }
        tr
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_odd_or_small_n() {
        assert!(Grid::new(2, 6, 1.0).is_ok());
        assert!(Grid::new(2, 7, 1.0).is_err());
        assert!(Grid::new(1, 2, 1.0).is_err());
        assert!(Grid::new(4, 8, 1.0).is_err());
        assert!(Grid::new(1, 8, 0.0).is_err());
    }

    #[test]
    fn shift_wraps_periodically() {
        let g = Grid::new(2, 4, 1.0).unwrap();
        // (i1, i2) = (0, 3) -> idx 3
        assert_eq!(g.shift(3, 1, 1), 0);
        assert_eq!(g.shift(3, 0, -1), 15);
        assert_eq!(g.coord(14, 0), 3);
        assert_eq!(g.coord(14, 1), 2);
    }

    #[test]
    fn integrate_constant_on_cube() {
        let g = Grid::new(3, 4, 2.0).unwrap();
        let f = ScalarField::constant(g, 1.5);
        assert!((f.integrate() - 1.5 * 8.0).abs() < 1e-13);
        let ones = ScalarField::constant(g, -1.0);
        assert!((ones.lp_norm(1.0) - 8.0).abs() < 1e-13);
    }

    #[test]
    fn sine_integrates_to_zero() {
        let g = Grid::new(1, 64, 3.0).unwrap();
        let f = ScalarField::from_fn(g, |x| (2.0 * std::f64::consts::PI * x[0] / 3.0).sin());
        assert!(f.integrate().abs() < 1e-14);
    }

    #[test]
    fn pairwise_sum_is_order_fixed() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin() * 1e-3 + 1.0).collect();
        assert_eq!(pairwise_sum(&v).to_bits(), pairwise_sum(&v.clone()).to_bits());
        assert!((pairwise_sum(&v) - v.iter().sum::<f64>()).abs() < 1e-10);
    }

    #[test]
    fn sym_tensor_slots_are_symmetric() {
        let g = Grid::new(3, 4, 1.0).unwrap();
        let mut t = SymTensorField::zeros(g);
        t.entry_mut(2, 1).values_mut()[0] = 5.0;
        assert_eq!(t.entry(1, 2).values()[0], 5.0);
        let slots: Vec<usize> = (0..3).flat_map(|i| (i..3).map(move |j| (i, j))).map(|(i, j)| t.slot(i, j)).collect();
        assert_eq!(slots, vec![0, 1, 2, 3, 4, 5]);
    }
}
