//! Domain types shared by both operations: uncertain scalars, the joint Gaussian prior
//! over three operands, and the refined result.

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Cholesky3, Mat3, Vec3};
use crate::scalar::Real;

/// A value known up to a standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertainScalar<T> {
    mean: T,
    std: T,
}

impl<T: Real> UncertainScalar<T> {
    pub fn new(mean: T, std: T) -> Result<Self> {
        if !mean.is_finite() {
            return Err(invalid(format!("mean must be finite, got {mean}")));
        }
        if !(std.is_finite() && std > T::zero()) {
            return Err(invalid(format!("std must be positive and finite, got {std}")));
        }
        Ok(Self { mean, std })
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    pub fn std(&self) -> T {
        self.std
    }

    pub fn precision(&self) -> T {
        T::one() / (self.std * self.std)
    }
}

/// Symmetric positive-definite 3×3 precision (inverse covariance) matrix.
///
/// Slots follow the usual naming:
/// ```text
/// | A  E  Z |
/// | E  B  H |
/// | Z  H  Γ |
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionMatrix3<T> {
    entries: Mat3<T>,
}

impl<T: Real> PrecisionMatrix3<T> {
    /// Validates symmetry and positive definiteness. The stored matrix is exactly
    /// symmetric (the input is averaged with its transpose).
    pub fn new(entries: Mat3<T>) -> Result<Self> {
        if !linalg::is_finite_mat(&entries) {
            return Err(invalid("precision matrix has non-finite entries"));
        }
        let asym = linalg::relative_asymmetry(&entries);
        if asym > T::lit(linalg::SYMMETRY_TOLERANCE) {
            return Err(invalid(format!("precision matrix is not symmetric (relative asymmetry {asym:e})")));
        }
        let entries = linalg::symmetrize(&entries);
        Cholesky3::factor(&entries)?;
        Ok(Self { entries })
    }

    pub fn diagonal(d: Vec3<T>) -> Result<Self> {
        Self::new(linalg::diag(d))
    }

    pub fn identity() -> Self {
        Self { entries: linalg::identity() }
    }

    pub fn entries(&self) -> &Mat3<T> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.entries[row][col]
    }

    pub fn cholesky(&self) -> Cholesky3<T> {
        Cholesky3::factor(&self.entries).expect("PrecisionMatrix3 is positive definite by construction")
    }

    /// True when all off-diagonal entries are exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let m = &self.entries;
        m[0][1] == T::zero() && m[0][2] == T::zero() && m[1][2] == T::zero()
    }

    /// Conjugates by the permutation that swaps operands `i` and `j`.
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut p = [0usize, 1, 2];
        p.swap(i, j);
        let mut out = linalg::zeros();
        for r in 0..3 {
            for c in 0..3 {
                out[r][c] = self.entries[p[r]][p[c]];
            }
        }
        Self { entries: out }
    }
}

/// Joint Gaussian prior over the operands `(x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTriple<T> {
    means: Vec3<T>,
    precision: PrecisionMatrix3<T>,
}

impl<T: Real> GaussianTriple<T> {
    pub fn new(means: Vec3<T>, precision: PrecisionMatrix3<T>) -> Result<Self> {
        if !linalg::is_finite_vec(&means) {
            return Err(invalid("prior means must be finite"));
        }
        Ok(Self { means, precision })
    }

    /// Independent operands with precision `diag(1/σ²)`.
    pub fn from_independent(x: UncertainScalar<T>, y: UncertainScalar<T>, z: UncertainScalar<T>) -> Result<Self> {
        triple_from_independent(x, y, z)
    }

    pub fn means(&self) -> &Vec3<T> {
        &self.means
    }

    pub fn precision(&self) -> &PrecisionMatrix3<T> {
        &self.precision
    }

    /// Same precision, different means.
    pub fn with_means(&self, means: Vec3<T>) -> Result<Self> {
        Self::new(means, self.precision)
    }

    pub fn with_mean(&self, operand: usize, value: T) -> Result<Self> {
        let mut means = self.means;
        means[operand] = value;
        self.with_means(means)
    }

    /// `Ξ·(a, b, c)`
    pub fn weighted_means(&self) -> Vec3<T> {
        linalg::mat_vec(self.precision.entries(), &self.means)
    }

    /// Quadratic form `½ (p − m)ᵀ Ξ (p − m)`.
    pub fn half_mahalanobis(&self, point: &Vec3<T>) -> T {
        let d = linalg::sub(point, &self.means);
        T::lit(0.5) * linalg::dot(&d, &linalg::mat_vec(self.precision.entries(), &d))
    }

    /// Swaps operands `i` and `j` (means and precision rows/columns).
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut means = self.means;
        means.swap(i, j);
        Self { means, precision: self.precision.swapped(i, j) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    Add,
    Mul,
}

/// The soft constraint: which operation, and how tightly (`θ` is the residual std).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperationSpec<T> {
    kind: OpKind,
    theta: T,
    big_theta: T,
}

impl<T: Real> OperationSpec<T> {
    pub fn new(kind: OpKind, theta: T) -> Result<Self> {
        if !(theta.is_finite() && theta > T::zero()) {
            return Err(invalid(format!("theta must be positive and finite, got {theta}")));
        }
        let big_theta = T::one() / (theta * theta);
        if !big_theta.is_finite() {
            return Err(invalid(format!("theta {theta} is too small")));
        }
        Ok(Self { kind, theta, big_theta })
    }

    pub fn add(theta: T) -> Result<Self> {
        Self::new(OpKind::Add, theta)
    }

    pub fn mul(theta: T) -> Result<Self> {
        Self::new(OpKind::Mul, theta)
    }

    pub fn kind(&self) -> OpKind {
        self.kind
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    /// Operation precision `1/θ²`.
    pub fn big_theta(&self) -> T {
        self.big_theta
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics<T> {
    pub iterations: usize,
    pub converged: bool,
    pub starts_tried: usize,
    /// Euclidean norm of the objective gradient at the returned means.
    pub gradient_norm: T,
    /// Magnitude the gradient is measured against: convergence means
    /// `gradient_norm <= tolerance * gradient_scale`.
    pub gradient_scale: T,
    /// Whether the refined precision admits a Cholesky factorization.
    pub precision_spd: bool,
    /// The refined precision has an eigenvalue below `-1e-9·‖Ξ′‖`.
    pub saddle: bool,
}

/// Result of a generalized operation: refined means and the curvature of the
/// objective there (the refined precision).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinedTriple<T> {
    pub means: Vec3<T>,
    /// Symmetric; positive definite unless `diagnostics.precision_spd` is false.
    pub precision: Mat3<T>,
    /// `x′+y′−z′` or `x′·y′−z′`.
    pub residual: T,
    pub objective: T,
    pub diagnostics: Diagnostics<T>,
}

impl<T: Real> RefinedTriple<T> {
    pub fn precision_matrix(&self) -> Result<PrecisionMatrix3<T>> {
        PrecisionMatrix3::new(self.precision)
    }

    pub fn covariance(&self) -> Result<Mat3<T>> {
        Ok(Cholesky3::factor(&self.precision)?.inverse())
    }

    pub fn is_finite(&self) -> bool {
        linalg::is_finite_vec(&self.means)
            && linalg::is_finite_mat(&self.precision)
            && self.residual.is_finite()
            && self.objective.is_finite()
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if !self.diagnostics.converged {
            w.push("solver did not reach the gradient tolerance".to_string());
        }
        if self.diagnostics.saddle {
            w.push("refined point is a saddle: objective Hessian has a negative eigenvalue".to_string());
        }
        if !self.diagnostics.precision_spd {
            w.push("refined precision matrix is not positive definite".to_string());
        }
        w
    }
}

pub fn triple_from_independent<T: Real>(
    x: UncertainScalar<T>,
    y: UncertainScalar<T>,
    z: UncertainScalar<T>,
) -> Result<GaussianTriple<T>> {
    let precision = PrecisionMatrix3::diagonal([x.precision(), y.precision(), z.precision()])?;
    GaussianTriple::new([x.mean(), y.mean(), z.mean()], precision)
}

/// Builds a prior from `(mean, std)` pairs.
pub fn triple_from_pairs<T: Real>(pairs: [(T, T); 3]) -> Result<GaussianTriple<T>> {
    let [x, y, z] = pairs.map(|(m, s)| UncertainScalar::new(m, s));
    triple_from_independent(x?, y?, z?)
}

/// Covariance `Ξ⁻¹`.
pub fn covariance_of<T: Real>(p: &PrecisionMatrix3<T>) -> Result<Mat3<T>> {
    Ok(Cholesky3::factor(p.entries())?.inverse())
}

/// True iff the matrix admits a Cholesky factorization with positive pivots.
pub fn spd_check<T: Real>(m: &Mat3<T>) -> Result<bool> {
    if !linalg::is_finite_mat(m) {
        return Err(invalid("matrix has non-finite entries"));
    }
    let asym = linalg::relative_asymmetry(m);
    if asym > T::lit(linalg::SYMMETRY_TOLERANCE) {
        return Err(invalid(format!("matrix is not symmetric (relative asymmetry {asym:e})")));
    }
    match Cholesky3::factor(m) {
        Ok(_) => Ok(true),
        Err(Error::NotPositiveDefinite) => Ok(false),
        Err(e) => Err(e),
    }
}

pub fn solve3<T: Real>(m: &Mat3<T>, rhs: &Vec3<T>) -> Result<Vec3<T>> {
    if !spd_check(m)? {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(Cholesky3::factor(m)?.solve(rhs))
}
