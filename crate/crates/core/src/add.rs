//! Generalized probabilistic addition.
//!
//! The objective
//! `F(p) = ½ (p − m)ᵀ Ξ (p − m) + ½ Θ (x + y − z)²`
//! is quadratic, so the refined means come from one linear solve and the refined
//! precision `Ξ + Θ·K` does not depend on the point.

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Cholesky3, Mat3, Vec3};
use crate::model::{Diagnostics, GaussianTriple, OpKind, OperationSpec, PrecisionMatrix3, RefinedTriple};
use crate::scalar::Real;

/// Gradient of the sum residual `x + y − z`.
fn sum_direction<T: Real>() -> Vec3<T> {
    [T::one(), T::one(), -T::one()]
}

pub fn sum_residual<T: Real>(p: &Vec3<T>) -> T {
    p[0] + p[1] - p[2]
}

/// `Θ·K` with `K = u·uᵀ`, `u = (1, 1, −1)`.
pub fn add_constraint_hessian<T: Real>(big_theta: T) -> Mat3<T> {
    let u = sum_direction::<T>();
    let mut k = linalg::zeros();
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = big_theta * u[i] * u[j];
        }
    }
    k
}

/// `Ξ′ = Ξ + Θ·K`. `Θ = 0` returns `Ξ` unchanged.
pub fn refined_precision_add<T: Real>(xi: &PrecisionMatrix3<T>, big_theta: T) -> Result<PrecisionMatrix3<T>> {
    if !(big_theta.is_finite() && big_theta >= T::zero()) {
        return Err(invalid(format!("operation precision must be finite and non-negative, got {big_theta}")));
    }
    let m = linalg::mat_add(xi.entries(), &add_constraint_hessian(big_theta));
    PrecisionMatrix3::new(m).map_err(|e| match e {
        Error::NotPositiveDefinite => Error::Internal("refined addition precision lost positive definiteness".into()),
        other => other,
    })
}

pub fn objective_add<T: Real>(point: &Vec3<T>, prior: &GaussianTriple<T>, big_theta: T) -> T {
    let r = sum_residual(point);
    prior.half_mahalanobis(point) + T::lit(0.5) * big_theta * r * r
}

pub fn gradient_add<T: Real>(point: &Vec3<T>, prior: &GaussianTriple<T>, big_theta: T) -> Vec3<T> {
    let d = linalg::sub(point, prior.means());
    let g = linalg::mat_vec(prior.precision().entries(), &d);
    let r = big_theta * sum_residual(point);
    [g[0] + r, g[1] + r, g[2] - r]
}

/// Closed-form refinement: the minimizer solves `Ξ′·v = Ξ·m`.
///
/// Internally the shift `δ = v − m` is solved from `Ξ′·δ = −Θ·h₀·u` (the same system
/// with `Ξ′·m` moved to the right), where `h₀ = a + b − c`. The reported residual
/// `h₀ + uᵀδ` equals `a′ + b′ − c′` but avoids cancelling large means.
pub fn refine_add<T: Real>(prior: &GaussianTriple<T>, spec: &OperationSpec<T>) -> Result<RefinedTriple<T>> {
    if spec.kind() != OpKind::Add {
        return Err(invalid("refine_add requires an addition spec"));
    }
    let big_theta = spec.big_theta();
    let refined = refined_precision_add(prior.precision(), big_theta)?;
    let chol = Cholesky3::factor(refined.entries())
        .map_err(|_| Error::Internal("refined addition precision lost positive definiteness".into()))?;

    let m = prior.means();
    let h0 = sum_residual(m);
    let u = sum_direction::<T>();
    let rhs = u.map(|ui| -big_theta * h0 * ui);
    let shift = chol.solve(&rhs);
    let means = linalg::add(m, &shift);
    let residual = h0 + linalg::dot(&u, &shift);

    let g = gradient_add(&means, prior, big_theta);
    let gradient_norm = linalg::norm(&g);
    let gradient_scale = T::one() + linalg::norm(&prior.weighted_means());
    let objective = objective_add(&means, prior, big_theta);

    let out = RefinedTriple {
        means,
        precision: *refined.entries(),
        residual,
        objective,
        diagnostics: Diagnostics {
            iterations: 1,
            converged: true,
            starts_tried: 1,
            gradient_norm,
            gradient_scale,
            precision_spd: true,
            saddle: false,
        },
    };
    if !out.is_finite() {
        return Err(invalid("refinement produced non-finite values; inputs are out of range"));
    }
    Ok(out)
}

/// Residual of the refined sum for independent operands, by elimination:
/// `r = (a + b − c) / (1 + Θ (1/A + 1/B + 1/Γ))`.
#[allow(clippy::too_many_arguments)]
pub fn diagonal_residual_add<T: Real>(a: T, b: T, c: T, prec_a: T, prec_b: T, prec_c: T, big_theta: T) -> T {
    (a + b - c) / (T::one() + big_theta * (prec_a.recip() + prec_b.recip() + prec_c.recip()))
}
