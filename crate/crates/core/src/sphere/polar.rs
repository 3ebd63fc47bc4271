//! Generalised polar coordinates on `S^{d-2}` and their inverse CDFs.
//!
//! Angle `j` (1-based, `j < d-2`) has density proportional to
//! `sin^{d-j-2}(φ)` on `[0, π]`; the last angle is uniform on `[0, 2π)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const TABLE_NODES: usize = 4096;
const CDF_TOLERANCE: f64 = 1e-12;

/// CDF and density of `sin^m` on `[0, π]`, normalised.
///
/// Uses `∫ sin^m = -sin^{m-1} cos / m + (m-1)/m ∫ sin^{m-2}` so the value is
/// exact up to rounding; each partial sum is itself a CDF in `[0, 1]`.
#[derive(Debug, Clone)]
struct SinePowerCdf {
    m: usize,
    // normalising constants Z_k = ∫_0^π sin^k, for k ≡ m (mod 2), k <= m
    norms: Vec<f64>,
}

impl SinePowerCdf {
    fn new(m: usize) -> Self {
        let mut norms = Vec::with_capacity(m / 2 + 1);
        let mut k = m % 2;
        let mut z = if k == 0 { PI } else { 2.0 };
        norms.push(z);
        while k + 2 <= m {
            k += 2;
            z *= (k - 1) as f64 / k as f64;
            norms.push(z);
        }
        SinePowerCdf { m, norms }
    }

    fn norm(&self) -> f64 {
        *self.norms.last().unwrap()
    }

    fn cdf(&self, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        let mut k = self.m % 2;
        let mut g = if k == 0 { phi / PI } else { (1.0 - c) / 2.0 };
        // s^{k-1}, advanced two powers at a time
        let mut s_pow = if k == 0 { 1.0 / s } else { 1.0 };
        for &z in &self.norms[1..] {
            k += 2;
            s_pow *= s * s;
            g -= s_pow * c / (k as f64 * z);
        }
        g.clamp(0.0, 1.0)
    }

    fn density(&self, phi: f64) -> f64 {
        phi.sin().powi(self.m as i32) / self.norm()
    }
}

#[derive(Debug, Clone)]
struct AngleTable {
    cdf: SinePowerCdf,
    values: Vec<f64>,
}

impl AngleTable {
    fn new(m: usize) -> Self {
        let cdf = SinePowerCdf::new(m);
        let mut values: Vec<f64> = (0..TABLE_NODES)
            .map(|k| cdf.cdf(PI * k as f64 / (TABLE_NODES - 1) as f64))
            .collect();
        values[0] = 0.0;
        values[TABLE_NODES - 1] = 1.0;
        for k in 1..TABLE_NODES {
            values[k] = values[k].max(values[k - 1]);
        }
        AngleTable { cdf, values }
    }

    fn node(k: usize) -> f64 {
        PI * k as f64 / (TABLE_NODES - 1) as f64
    }

    fn invert(&self, u: f64) -> f64 {
        let hi_idx = self.values.partition_point(|&v| v <= u).min(TABLE_NODES - 1);
        let (mut lo, mut hi) = (Self::node(hi_idx - 1), Self::node(hi_idx));
        let (flo, fhi) = (self.values[hi_idx - 1], self.values[hi_idx]);
        let mut x = if fhi > flo {
            lo + (hi - lo) * (u - flo) / (fhi - flo)
        } else {
            0.5 * (lo + hi)
        };
        // Safeguarded Newton: fall back to bisection whenever a step leaves the bracket.
        for _ in 0..100 {
            let f = self.cdf.cdf(x) - u;
            if f.abs() <= CDF_TOLERANCE {
                break;
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let dens = self.cdf.density(x);
            let newton = x - f / dens;
            x = if dens > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-15 {
                break;
            }
        }
        x
    }
}

/// Inverse CDFs for all `d - 2` polar angles of `S^{d-2}`, tabulated once.
#[derive(Debug, Clone)]
pub struct SphericalInverseCdf {
    d: usize,
    tables: Vec<AngleTable>,
}

impl SphericalInverseCdf {
    pub fn new(d: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidDimension { got: d, min: 3 });
        }
        let tables = (1..d - 2).map(|j| AngleTable::new(d - j - 2)).collect();
        Ok(SphericalInverseCdf { d, tables })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `φ_j = F_j^{-1}(u)` for the 1-based axis `j` in `1..=d-2`.
    pub fn angle(&self, j: usize, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::invalid(format!("u={u} outside [0, 1)")));
        }
        if j == 0 || j > self.d - 2 {
            return Err(Error::invalid(format!("axis {j} outside 1..={}", self.d - 2)));
        }
        if j == self.d - 2 {
            return Ok(2.0 * PI * u);
        }
        Ok(self.tables[j - 1].invert(u))
    }

    /// `F_j(φ)` for the 1-based axis `j`.
    pub fn cdf(&self, j: usize, phi: f64) -> f64 {
        if j == self.d - 2 {
            return (phi / (2.0 * PI)).clamp(0.0, 1.0);
        }
        self.tables[j - 1].cdf.cdf(phi)
    }

    /// Maps a point of `[0,1)^{d-2}` to `d - 2` polar angles.
    pub fn angles(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.d - 2 {
            return Err(Error::invalid(format!(
                "expected {} coordinates, got {}",
                self.d - 2,
                u.len()
            )));
        }
        u.iter().enumerate().map(|(k, &v)| self.angle(k + 1, v)).collect()
    }
}

/// One-off inverse CDF for a single axis. Prefer [`SphericalInverseCdf`] in loops.
pub fn polar_inverse_cdf(j: usize, u: f64, d: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::InvalidDimension { got: d, min: 3 });
    }
    if !(0.0..1.0).contains(&u) {
        return Err(Error::invalid(format!("u={u} outside [0, 1)")));
    }
    if j == 0 || j > d - 2 {
        return Err(Error::invalid(format!("axis {j} outside 1..={}", d - 2)));
    }
    if j == d - 2 {
        return Ok(2.0 * PI * u);
    }
    Ok(AngleTable::new(d - j - 2).invert(u))
}

/// Unit vector of length `phi.len() + 1` from polar angles (radius 1).
pub fn polar_to_cartesian(phi: &[f64]) -> Vec<f64> {
    let m = phi.len();
    let mut x = vec![0.0; m + 1];
    let mut sin_prod = 1.0;
    for i in 0..=m {
        x[i] = if i < m { sin_prod * phi[i].cos() } else { sin_prod };
        if i < m {
            sin_prod *= phi[i].sin();
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Adaptive Simpson quadrature of the unnormalised density; independent of
    // the recurrence used by the implementation.
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64, depth: u32) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn rec(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            eps: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, eps, depth)
    }

    #[test]
    fn cdf_matches_quadrature() {
        for m in [1usize, 2, 3, 6, 17, 40, 101] {
            let c = SinePowerCdf::new(m);
            let f = |x: f64| x.sin().powi(m as i32);
            let z = simpson(&f, 0.0, PI, 1e-14, 50);
            assert_relative_eq!(c.norm(), z, max_relative = 1e-10);
            for phi in [0.1, 0.7, 1.3, PI / 2.0, 2.2, 3.0] {
                let want = simpson(&f, 0.0, phi, 1e-14, 50) / z;
                assert!((c.cdf(phi) - want).abs() < 1e-10, "m={m} phi={phi}");
            }
        }
    }

    #[test]
    fn median_is_half_pi() {
        for d in [4, 5, 10, 50, 258] {
            let inv = SphericalInverseCdf::new(d).unwrap();
            for j in 1..d - 2 {
                assert!((inv.angle(j, 0.5).unwrap() - PI / 2.0).abs() < 1e-9, "d={d} j={j}");
            }
        }
    }

    #[test]
    fn last_axis_is_uniform_angle() {
        assert_eq!(polar_inverse_cdf(2, 0.25, 4).unwrap(), PI / 2.0);
        let inv = SphericalInverseCdf::new(7).unwrap();
        assert_eq!(inv.angle(5, 0.75).unwrap(), 1.5 * PI);
    }

    #[test]
    fn closed_form_d4_axis1() {
        let phi = polar_inverse_cdf(1, 0.75, 4).unwrap();
        assert_relative_eq!(phi, 2.0 * PI / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn inversion_hits_target() {
        for d in [5, 12, 60, 202] {
            let inv = SphericalInverseCdf::new(d).unwrap();
            for j in [1, (d - 2) / 2, d - 3] {
                for u in [0.0, 1e-9, 0.013, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-12] {
                    let phi = inv.angle(j, u).unwrap();
                    assert!((0.0..=PI).contains(&phi));
                    assert!((inv.cdf(j, phi) - u).abs() <= 1e-10, "d={d} j={j} u={u}");
                }
            }
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(polar_inverse_cdf(1, 1.0, 5).is_err());
        assert!(polar_inverse_cdf(1, -0.1, 5).is_err());
        assert!(polar_inverse_cdf(0, 0.5, 5).is_err());
        assert!(polar_inverse_cdf(4, 0.5, 5).is_err());
        let inv = SphericalInverseCdf::new(6).unwrap();
        assert!(inv.angles(&[0.1, 0.2]).is_err());
    }

    #[test]
    fn cartesian_examples() {
        let x = polar_to_cartesian(&[PI / 2.0, 0.0]);
        assert!(x[0].abs() < 1e-15);
        assert_relative_eq!(x[1], 1.0);
        assert!(x[2].abs() < 1e-15);
        for phi in [vec![0.3, 1.1, 2.0, 5.5], vec![3.0, 0.01], vec![1.0; 30]] {
            let x = polar_to_cartesian(&phi);
            assert_eq!(x.len(), phi.len() + 1);
            assert_relative_eq!(x.iter().map(|v| v * v).sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn grid_covers_octants_uniformly() {
        // d=4: S^2 in R^3, 8 octants. A stratified grid over [0,1)^2 pushed through
        // the inverse CDFs must put 1/8 of the points in each octant.
        let inv = SphericalInverseCdf::new(4).unwrap();
        let g = 200;
        let mut counts = [0usize; 8];
        for a in 0..g {
            for b in 0..g {
                let u = [(a as f64 + 0.5) / g as f64, (b as f64 + 0.5) / g as f64];
                let x = polar_to_cartesian(&inv.angles(&u).unwrap());
                let cell = (x[0] > 0.0) as usize | ((x[1] > 0.0) as usize) << 1 | ((x[2] > 0.0) as usize) << 2;
                counts[cell] += 1;
            }
        }
        let expected = (g * g) as f64 / 8.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // chi-square critical value, 7 degrees of freedom, alpha = 0.001
        assert!(chi2 < 24.322, "{counts:?} chi2={chi2}");
    }
}
