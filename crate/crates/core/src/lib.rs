//! Generalized probabilistic arithmetic.
//!
//! Three operands `(x, y, z)` with a joint Gaussian prior (means plus a precision
//! matrix) are refined under a soft constraint `x + y ≈ z` or `x·y ≈ z` whose residual
//! has standard deviation `θ`. The refined means maximize the product of the prior and
//! residual densities; the refined precision is the curvature of the negative log of
//! that product at the maximum. Every operand moves, each in inverse proportion to
//! how well it was known, so sum and difference (or product and quotient) are the same
//! operation with different precisions.
//!
//! All numerics are generic over [`Real`] (`f32`/`f64`); the `*64` aliases below fix
//! the scalar to `f64`.

#![allow(clippy::needless_range_loop)]

pub mod add;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod model;
pub mod mul;
pub mod oracle;
pub mod scalar;
pub mod trace;

pub use add::{
    add_constraint_hessian, diagonal_residual_add, gradient_add, objective_add, refine_add, refined_precision_add,
};
pub use error::{Error, Result};
pub use linalg::{Mat3, Vec3};
pub use model::{
    covariance_of, solve3, spd_check, triple_from_independent, triple_from_pairs, Diagnostics, GaussianTriple, OpKind,
    OperationSpec, PrecisionMatrix3, RefinedTriple, UncertainScalar,
};
pub use mul::{
    gradient_mul, hessian_mul, mul_starts, objective_mul, refine_mul, refine_mul_from_starts, MulSolverConfig,
};
pub use scalar::Real;
pub use trace::{
    detect_features, trace_sweep, trace_sweep_with_config, CurveFeatures, CurveSample, SweepMode, SweepOperand,
    SweepSpec, TraceCurve,
};

pub type UncertainScalar64 = UncertainScalar<f64>;
pub type PrecisionMatrix64 = PrecisionMatrix3<f64>;
pub type GaussianTriple64 = GaussianTriple<f64>;
pub type OperationSpec64 = OperationSpec<f64>;
pub type RefinedTriple64 = RefinedTriple<f64>;
pub type MulSolverConfig64 = MulSolverConfig<f64>;
pub type SweepSpec64 = SweepSpec<f64>;
pub type TraceCurve64 = TraceCurve<f64>;
pub type CurveFeatures64 = CurveFeatures<f64>;

pub type GaussianTriple32 = GaussianTriple<f32>;
pub type RefinedTriple32 = RefinedTriple<f32>;
