//! Brute-force checks that do not share code paths with the solvers: exhaustive grid
//! minimization and central finite differences.

use crate::error::{invalid, Result};
use crate::linalg::{self, Mat3, Vec3};
use crate::scalar::Real;

pub const DEFAULT_GRADIENT_STEP: f64 = 1e-6;
pub const DEFAULT_HESSIAN_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridBox<T> {
    pub center: Vec3<T>,
    pub half_widths: Vec3<T>,
    /// Odd, so the center is a grid point.
    pub points_per_axis: usize,
}

impl<T: Real> GridBox<T> {
    pub fn new(center: Vec3<T>, half_widths: Vec3<T>, points_per_axis: usize) -> Result<Self> {
        if points_per_axis < 3 || points_per_axis.is_multiple_of(2) {
            return Err(invalid(format!("points_per_axis must be odd and >= 3, got {points_per_axis}")));
        }
        if !half_widths.iter().all(|h| h.is_finite() && *h > T::zero()) {
            return Err(invalid("half widths must be positive"));
        }
        if !linalg::is_finite_vec(&center) {
            return Err(invalid("grid center must be finite"));
        }
        Ok(Self { center, half_widths, points_per_axis })
    }

    fn axis(&self, k: usize) -> Vec<T> {
        let n = self.points_per_axis;
        let mid = (n / 2) as f64;
        (0..n)
            .map(|i| {
                if 2 * i + 1 == n {
                    self.center[k]
                } else {
                    self.center[k] + self.half_widths[k] * T::lit((i as f64 - mid) / mid)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMinimum<T> {
    pub point: Vec3<T>,
    pub value: T,
}

/// Exhaustive scan in lexicographic (x, then y, then z) order; the first strict
/// minimum wins ties.
pub fn grid_min<T: Real>(objective: impl Fn(&Vec3<T>) -> T, grid: &GridBox<T>) -> GridMinimum<T> {
    let (xs, ys, zs) = (grid.axis(0), grid.axis(1), grid.axis(2));
    let mut best = GridMinimum { point: grid.center, value: T::infinity() };
    for &x in &xs {
        for &y in &ys {
            for &z in &zs {
                let p = [x, y, z];
                let v = objective(&p);
                if v < best.value {
                    best = GridMinimum { point: p, value: v };
                }
            }
        }
    }
    best
}

fn step_for<T: Real>(coordinate: T, rel_step: T) -> T {
    rel_step * (T::one() + coordinate.abs())
}

/// Central differences with per-axis step `rel_step·(1 + |coordinate|)`.
pub fn fd_gradient<T: Real>(objective: impl Fn(&Vec3<T>) -> T, point: &Vec3<T>, rel_step: T) -> Vec3<T> {
    let mut g = [T::zero(); 3];
    for k in 0..3 {
        let h = step_for(point[k], rel_step);
        let mut plus = *point;
        let mut minus = *point;
        plus[k] = plus[k] + h;
        minus[k] = minus[k] - h;
        g[k] = (objective(&plus) - objective(&minus)) / (plus[k] - minus[k]);
    }
    g
}

/// Jacobian of `gradient` by central differences, symmetrized.
pub fn fd_hessian<T: Real>(gradient: impl Fn(&Vec3<T>) -> Vec3<T>, point: &Vec3<T>, rel_step: T) -> Mat3<T> {
    let mut h = linalg::zeros();
    for k in 0..3 {
        let step = step_for(point[k], rel_step);
        let mut plus = *point;
        let mut minus = *point;
        plus[k] = plus[k] + step;
        minus[k] = minus[k] - step;
        let (gp, gm) = (gradient(&plus), gradient(&minus));
        let width = plus[k] - minus[k];
        for i in 0..3 {
            h[i][k] = (gp[i] - gm[i]) / width;
        }
    }
    linalg::symmetrize(&h)
}
