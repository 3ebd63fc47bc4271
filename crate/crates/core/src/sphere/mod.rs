//! Geometry linking the sphere `S^{d-2}` to the symmetric group `S_d`.
//!
//! Points on the unit sphere in `R^{d-1}` are lifted into the hyperplane of
//! `R^d` orthogonal to `(1, ..., 1)` (the hyperplane of the centred
//! permutohedron) and then mapped to the nearest permutohedron vertex.

mod polar;
mod sobol;

pub use polar::{polar_inverse_cdf, polar_to_cartesian, SphericalInverseCdf};
pub use sobol::{max_sobol_dimension, SobolState};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::perm::{argsort, Dimension, Permutation};

/// `(d-1) × d` matrix with orthonormal rows spanning the hyperplane `Σ x_i = 0`.
///
/// Row `r` (0-based) is `(1, ..., 1, -(r+1), 0, ..., 0)` with `r+1` leading
/// ones, normalised.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix {
    d: usize,
    rows: Vec<Vec<f64>>,
}

impl ProjectionMatrix {
    pub fn new(d: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidDimension { got: d, min: 3 });
        }
        let rows = (0..d - 1)
            .map(|r| {
                let k = (r + 1) as f64;
                let norm = (k * (k + 1.0)).sqrt();
                let mut row = vec![0.0; d];
                row[..=r].iter_mut().for_each(|v| *v = 1.0 / norm);
                row[r + 1] = -k / norm;
                row
            })
            .collect();
        Ok(ProjectionMatrix { d, rows })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `Û^T x` for `x` of length `d - 1`.
    pub fn lift(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.d - 1 {
            return Err(Error::invalid(format!(
                "expected a vector of length {}, got {}",
                self.d - 1,
                x.len()
            )));
        }
        let mut out = vec![0.0; self.d];
        for (row, &xr) in self.rows.iter().zip(x) {
            for (o, &u) in out.iter_mut().zip(row) {
                *o += u * xr;
            }
        }
        Ok(out)
    }
}

pub fn projection_matrix(d: usize) -> Result<ProjectionMatrix> {
    ProjectionMatrix::new(d)
}

/// Uniform point on `S^{d-2}`: normalised vector of `d - 1` standard normals.
pub fn uniform_sphere_point<R: Rng + ?Sized>(d: Dimension, rng: &mut R) -> Result<Vec<f64>> {
    if d.get() < 3 {
        return Err(Error::InvalidDimension { got: d.get(), min: 3 });
    }
    loop {
        let mut x: Vec<f64> = (0..d.get() - 1).map(|_| rng.sample(StandardNormal)).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            x.iter_mut().for_each(|v| *v /= norm);
            return Ok(x);
        }
    }
}

pub fn lift_to_hyperplane(x: &[f64], u: &ProjectionMatrix) -> Result<Vec<f64>> {
    u.lift(x)
}

/// Permutohedron vertex closest to `x̃`: element `i` gets the rank of `x̃_i`
/// among the coordinates, ties broken by index.
///
/// This is the inverse of [`argsort`], so `argsort(x̃)` lists the players in
/// the order a Shapley walk visits them.
pub fn nearest_permutation(x_tilde: &[f64]) -> Result<Permutation> {
    Ok(argsort(x_tilde)?.inverse())
}

/// Sphere point → permutation in one step (lift, then nearest vertex).
pub fn sphere_to_permutation(x: &[f64], u: &ProjectionMatrix) -> Result<Permutation> {
    nearest_permutation(&u.lift(x)?)
}
