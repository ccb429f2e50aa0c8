//! Dense 3×3 linear algebra on row-major arrays.
//!
//! Everything here is fixed-size; the model never has more than three operands.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type Vec3<T> = [T; 3];
pub type Mat3<T> = [[T; 3]; 3];

/// Pivot threshold, relative to the pivot row's own diagonal entry.
pub const PIVOT_RELATIVE_THRESHOLD: f64 = 1e-12;

/// Tolerated relative asymmetry before a matrix is rejected as non-symmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

pub fn zeros<T: Real>() -> Mat3<T> {
    [[T::zero(); 3]; 3]
}

pub fn identity<T: Real>() -> Mat3<T> {
    diag([T::one(); 3])
}

pub fn diag<T: Real>(d: Vec3<T>) -> Mat3<T> {
    let mut m = zeros();
    for i in 0..3 {
        m[i][i] = d[i];
    }
    m
}

pub fn mat_vec<T: Real>(m: &Mat3<T>, v: &Vec3<T>) -> Vec3<T> {
    let mut out = [T::zero(); 3];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

pub fn mat_mul<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = zeros();
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn mat_add<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = *a;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = out[i][j] + b[i][j];
        }
    }
    out
}

pub fn mat_scale<T: Real>(m: &Mat3<T>, s: T) -> Mat3<T> {
    m.map(|row| row.map(|v| v * s))
}

pub fn transpose<T: Real>(m: &Mat3<T>) -> Mat3<T> {
    let mut out = zeros();
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[j][i];
        }
    }
    out
}

pub fn dot<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn sub<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn norm<T: Real>(v: &Vec3<T>) -> T {
    dot(v, v).sqrt()
}

pub fn norm_inf<T: Real>(v: &Vec3<T>) -> T {
    v.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

/// Largest absolute entry.
pub fn max_abs<T: Real>(m: &Mat3<T>) -> T {
    m.iter().flatten().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

pub fn is_finite_mat<T: Real>(m: &Mat3<T>) -> bool {
    m.iter().flatten().all(|x| x.is_finite())
}

pub fn is_finite_vec<T: Real>(v: &Vec3<T>) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Largest `|m[i][j] - m[j][i]|` relative to the largest entry.
pub fn relative_asymmetry<T: Real>(m: &Mat3<T>) -> T {
    let scale = max_abs(m);
    if scale == T::zero() {
        return T::zero();
    }
    let mut worst = T::zero();
    for i in 0..3 {
        for j in (i + 1)..3 {
            worst = worst.max((m[i][j] - m[j][i]).abs());
        }
    }
    worst / scale
}

/// Lower-triangular Cholesky factor `L` with `L·Lᵀ = M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cholesky3<T> {
    lower: Mat3<T>,
}

impl<T: Real> Cholesky3<T> {
    /// Factors a symmetric matrix, reading only its lower triangle.
    ///
    /// A pivot is rejected when it does not exceed `PIVOT_RELATIVE_THRESHOLD` times the
    /// matching diagonal entry of the input, which makes the test invariant under
    /// diagonal rescaling of the operands.
    pub fn factor(m: &Mat3<T>) -> Result<Self> {
        let threshold = T::lit(PIVOT_RELATIVE_THRESHOLD);
        let mut l = zeros::<T>();
        for j in 0..3 {
            let mut pivot = m[j][j];
            for k in 0..j {
                pivot = pivot - l[j][k] * l[j][k];
            }
            if !(pivot.is_finite() && m[j][j] > T::zero() && pivot > threshold * m[j][j]) {
                return Err(Error::NotPositiveDefinite);
            }
            let d = pivot.sqrt();
            l[j][j] = d;
            for i in (j + 1)..3 {
                let mut s = m[i][j];
                for k in 0..j {
                    s = s - l[i][k] * l[j][k];
                }
                l[i][j] = s / d;
            }
        }
        Ok(Self { lower: l })
    }

    pub fn lower(&self) -> &Mat3<T> {
        &self.lower
    }

    pub fn solve(&self, rhs: &Vec3<T>) -> Vec3<T> {
        let l = &self.lower;
        // forward: L·y = rhs
        let mut y = [T::zero(); 3];
        for i in 0..3 {
            let mut s = rhs[i];
            for k in 0..i {
                s = s - l[i][k] * y[k];
            }
            y[i] = s / l[i][i];
        }
        // backward: Lᵀ·x = y
        let mut x = [T::zero(); 3];
        for i in (0..3).rev() {
            let mut s = y[i];
            for k in (i + 1)..3 {
                s = s - l[k][i] * x[k];
            }
            x[i] = s / l[i][i];
        }
        x
    }

    /// Inverse of the factored matrix, symmetrized.
    pub fn inverse(&self) -> Mat3<T> {
        let mut cols = zeros::<T>();
        for j in 0..3 {
            let mut e = [T::zero(); 3];
            e[j] = T::one();
            let c = self.solve(&e);
            for i in 0..3 {
                cols[i][j] = c[i];
            }
        }
        symmetrize(&cols)
    }
}

pub fn symmetrize<T: Real>(m: &Mat3<T>) -> Mat3<T> {
    let half = T::lit(0.5);
    let mut out = *m;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let v = (m[i][j] + m[j][i]) * half;
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

/// Eigenvalues of a symmetric matrix in ascending order (cyclic Jacobi rotations).
pub fn symmetric_eigenvalues<T: Real>(m: &Mat3<T>) -> Vec3<T> {
    let mut a = symmetrize(m);
    let scale = max_abs(&a);
    if scale == T::zero() {
        return [T::zero(); 3];
    }
    let tiny = T::epsilon() * T::epsilon() * scale;
    for _sweep in 0..64 {
        let off = (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]).sqrt();
        if off <= tiny {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q] == T::zero() {
                continue;
            }
            let two = T::lit(2.0);
            let theta = (a[q][q] - a[p][p]) / (two * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
            let c = T::one() / (t * t + T::one()).sqrt();
            let s = t * c;
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
        }
    }
    let mut ev = [a[0][0], a[1][1], a[2][2]];
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev
}
