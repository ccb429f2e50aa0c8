//! Generalized probabilistic multiplication.
//!
//! Minimizes the quartic objective
//! `F(p) = ½ (p − m)ᵀ Ξ (p − m) + ½ Θ (x·y − z)²`
//! with a damped Newton method run from several starts, and reports the Hessian
//! at the chosen minimizer as the refined precision.
//!
//! The Hessian of the constraint term is
//! ```text
//!     | y²       2xy − z   −y |
//! Θ · | 2xy − z  x²        −x |
//!     | −y       −x         1 |
//! ```
//! Note the `(1,1)` entry is `y²` and the `(2,2)` entry is `x²`, not the other way round.

use std::cmp::Ordering;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Cholesky3, Mat3, Vec3};
use crate::model::{Diagnostics, GaussianTriple, OpKind, OperationSpec, RefinedTriple};
use crate::scalar::Real;

/// Negative eigenvalues smaller in magnitude than this fraction of `‖Ξ′‖` are treated as zero.
const SADDLE_RELATIVE_THRESHOLD: f64 = 1e-9;
const START_GUARD: f64 = 1e-8;
const FACTOR_START_GUARD: f64 = 1e-12;
const LAMBDA_MIN: f64 = 1e-15;
/// Damping beyond `LAMBDA_MAX_RELATIVE · (1 + ‖H‖)` means no useful step exists.
const LAMBDA_MAX_RELATIVE: f64 = 1e16;
const ROUNDING_FLOOR_MULTIPLE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MulSolverConfig<T> {
    /// Relative gradient tolerance; see [`Diagnostics::gradient_scale`].
    pub gradient_tolerance: T,
    pub max_iterations: usize,
    pub max_starts: usize,
    pub damping_initial: T,
}

impl<T: Real> Default for MulSolverConfig<T> {
    fn default() -> Self {
        // 1e-10 in double precision; never tighter than a few hundred ulps.
        let tol = T::lit(1e-10).max(T::lit(1e3) * T::epsilon());
        Self { gradient_tolerance: tol, max_iterations: 200, max_starts: 8, damping_initial: T::lit(1e-3) }
    }
}

impl<T: Real> MulSolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.gradient_tolerance.is_finite() && self.gradient_tolerance > T::zero()) {
            return Err(invalid("gradient_tolerance must be positive"));
        }
        if !(self.damping_initial.is_finite() && self.damping_initial > T::zero()) {
            return Err(invalid("damping_initial must be positive"));
        }
        if self.max_iterations == 0 || self.max_starts == 0 {
            return Err(invalid("max_iterations and max_starts must be positive"));
        }
        Ok(())
    }
}

pub fn product_residual<T: Real>(p: &Vec3<T>) -> T {
    p[0] * p[1] - p[2]
}

pub fn objective_mul<T: Real>(point: &Vec3<T>, prior: &GaussianTriple<T>, big_theta: T) -> T {
    let r = product_residual(point);
    prior.half_mahalanobis(point) + T::lit(0.5) * big_theta * r * r
}

pub fn gradient_mul<T: Real>(point: &Vec3<T>, prior: &GaussianTriple<T>, big_theta: T) -> Vec3<T> {
    let d = linalg::sub(point, prior.means());
    let g = linalg::mat_vec(prior.precision().entries(), &d);
    let tr = big_theta * product_residual(point);
    [g[0] + tr * point[1], g[1] + tr * point[0], g[2] - tr]
}

pub fn hessian_mul<T: Real>(point: &Vec3<T>, prior: &GaussianTriple<T>, big_theta: T) -> Mat3<T> {
    let [x, y, z] = *point;
    let cross = T::lit(2.0) * x * y - z;
    let constraint = [[y * y, cross, -y], [cross, x * x, -x], [-y, -x, T::one()]];
    linalg::mat_add(prior.precision().entries(), &linalg::mat_scale(&constraint, big_theta))
}

/// Gradient norm below which a point counts as stationary, divided by the tolerance.
///
/// Two regimes: the magnitude of the prior terms `‖Ξ‖·(‖p‖ + ‖m‖)`, scaled by the
/// relative tolerance; or, when `Θ` is large enough that `x·y − z` cancels badly,
/// a small multiple of the rounding floor `ε·Θ·(|xy| + |z|)·(1 + max(|x|, |y|))`.
fn gradient_scale<T: Real>(point: &Vec3<T>, prior: &GaussianTriple<T>, big_theta: T, tolerance: T) -> T {
    let [x, y, z] = *point;
    let prior_part =
        linalg::max_abs(prior.precision().entries()) * (linalg::norm_inf(point) + linalg::norm_inf(prior.means()));
    let constraint_part = big_theta * ((x * y).abs() + z.abs()) * (T::one() + x.abs().max(y.abs()));
    let floor = T::lit(ROUNDING_FLOOR_MULTIPLE) * T::epsilon() * (prior_part + constraint_part);
    (T::one() + prior_part).max(floor / tolerance)
}

/// Exact minimizer of `F` over `z` with `x, y` held fixed (`F` is quadratic in `z`).
fn relax_third<T: Real>(point: &Vec3<T>, prior: &GaussianTriple<T>, big_theta: T) -> Vec3<T> {
    let [x, y, _] = *point;
    let [a, b, c] = *prior.means();
    let xi = prior.precision().entries();
    let z = (xi[2][2] * c - xi[2][0] * (x - a) - xi[2][1] * (y - b) + big_theta * x * y) / (xi[2][2] + big_theta);
    [x, y, z]
}

/// The deterministic start list, in priority order:
/// prior means; `(c/b, b, c)`; `(a, c/a, c)`; `±(√|c|, √|c|·sign c, c)`; `(a+θ, b+θ, c)`.
pub fn mul_starts<T: Real>(prior: &GaussianTriple<T>, spec: &OperationSpec<T>) -> Vec<Vec3<T>> {
    let [a, b, c] = *prior.means();
    let mut starts = vec![[a, b, c]];
    if b.abs() > T::lit(START_GUARD) {
        starts.push([c / b, b, c]);
    }
    if a.abs() > T::lit(START_GUARD) {
        starts.push([a, c / a, c]);
    }
    if c.abs() > T::lit(FACTOR_START_GUARD) {
        let root = c.abs().sqrt();
        for s in [T::one(), -T::one()] {
            starts.push([s * root, s * root * c.signum(), c]);
        }
    }
    let theta = spec.theta();
    starts.push([a + theta, b + theta, c]);
    starts
}

#[derive(Debug, Clone, Copy)]
struct Descent<T> {
    point: Vec3<T>,
    objective: T,
    iterations: usize,
    converged: bool,
    gradient_norm: T,
    gradient_scale: T,
}

/// Levenberg-damped Newton: each step solves `(H + λI)·δ = −g`; `λ` shrinks when the
/// actual decrease tracks the model's prediction and grows otherwise.
///
/// Every trial point is followed by an exact minimization over `z`. For large `Θ` the
/// objective is a narrow curved valley around `z = x·y`; the correction puts each
/// trial back on the valley floor, which keeps the Newton steps long.
fn damped_newton<T: Real>(
    start: Vec3<T>,
    prior: &GaussianTriple<T>,
    big_theta: T,
    config: &MulSolverConfig<T>,
) -> Descent<T> {
    let half = T::lit(0.5);
    let relax = |p: Vec3<T>| {
        let f = objective_mul(&p, prior, big_theta);
        let q = relax_third(&p, prior, big_theta);
        let fq = objective_mul(&q, prior, big_theta);
        if fq < f {
            (q, fq)
        } else {
            (p, f)
        }
    };
    let (mut p, mut f) = relax(start);
    let mut lambda = config.damping_initial;
    let mut iterations = 0;

    let finish = |p: Vec3<T>, f: T, iterations: usize| {
        let g = gradient_mul(&p, prior, big_theta);
        let gradient_norm = linalg::norm(&g);
        let gradient_scale = gradient_scale(&p, prior, big_theta, config.gradient_tolerance);
        Descent {
            point: p,
            objective: f,
            iterations,
            converged: gradient_norm <= config.gradient_tolerance * gradient_scale,
            gradient_norm,
            gradient_scale,
        }
    };

    if !(linalg::is_finite_vec(&p) && f.is_finite()) {
        return Descent { converged: false, ..finish(p, f, 0) };
    }

    'outer: while iterations < config.max_iterations {
        let g = gradient_mul(&p, prior, big_theta);
        if linalg::norm(&g)
            <= config.gradient_tolerance * gradient_scale(&p, prior, big_theta, config.gradient_tolerance)
        {
            break;
        }
        let h = hessian_mul(&p, prior, big_theta);
        let lambda_max = T::lit(LAMBDA_MAX_RELATIVE) * (T::one() + linalg::max_abs(&h));
        iterations += 1;
        loop {
            if lambda > lambda_max {
                break 'outer;
            }
            let mut damped = h;
            for (i, row) in damped.iter_mut().enumerate() {
                row[i] = row[i] + lambda;
            }
            let Ok(chol) = Cholesky3::factor(&damped) else {
                lambda = (lambda * T::lit(10.0)).max(T::lit(LAMBDA_MIN));
                continue;
            };
            let step = chol.solve(&g.map(|v| -v));
            // decrease predicted by the damped quadratic model: ½ δᵀ(H + λI)δ
            let predicted = half * linalg::dot(&step, &linalg::mat_vec(&damped, &step));
            let (trial, f_trial) = relax(linalg::add(&p, &step));
            let actual = f - f_trial;
            let rho = actual / predicted;
            if f_trial.is_finite() && predicted > T::zero() && actual > T::zero() && rho > T::lit(1e-4) {
                p = trial;
                f = f_trial;
                if rho > T::lit(0.75) {
                    lambda = (lambda / T::lit(3.0)).max(T::lit(LAMBDA_MIN));
                } else if rho < T::lit(0.25) {
                    lambda = lambda * T::lit(2.0);
                }
                break;
            }
            lambda = (lambda * T::lit(4.0)).max(T::lit(LAMBDA_MIN));
        }
    }
    finish(p, f, iterations)
}

/// Lower objective wins; objectives within `1e-12` (relative) tie and go to the
/// point closer to the prior means; remaining ties keep the earlier start.
fn better<T: Real>(cand: &Descent<T>, best: &Descent<T>, prior_means: &Vec3<T>) -> bool {
    if !best.objective.is_finite() {
        return cand.objective.is_finite();
    }
    let tie = T::lit(1e-12) * T::one().max(cand.objective.abs()).max(best.objective.abs());
    if (cand.objective - best.objective).abs() <= tie {
        let dc = linalg::norm(&linalg::sub(&cand.point, prior_means));
        let db = linalg::norm(&linalg::sub(&best.point, prior_means));
        return dc.partial_cmp(&db) == Some(Ordering::Less);
    }
    cand.objective < best.objective
}

fn is_saddle<T: Real>(h: &Mat3<T>) -> bool {
    let ev = linalg::symmetric_eigenvalues(h);
    ev[0] < -T::lit(SADDLE_RELATIVE_THRESHOLD) * linalg::max_abs(h)
}

fn check_inputs<T: Real>(spec: &OperationSpec<T>, config: &MulSolverConfig<T>) -> Result<()> {
    if spec.kind() != OpKind::Mul {
        return Err(invalid("refine_mul requires a multiplication spec"));
    }
    config.validate()
}

/// Runs the solver from each of `starts` (at most `config.max_starts` of them) and
/// returns the selected result without failing on non-convergence.
///
/// Converged minima are preferred over converged saddles, which are preferred over
/// unconverged iterates. `diagnostics.converged` is false only if no start converged.
pub fn refine_mul_from_starts<T: Real>(
    prior: &GaussianTriple<T>,
    spec: &OperationSpec<T>,
    config: &MulSolverConfig<T>,
    starts: &[Vec3<T>],
) -> Result<RefinedTriple<T>> {
    check_inputs(spec, config)?;
    if starts.is_empty() {
        return Err(invalid("at least one solver start is required"));
    }
    let big_theta = spec.big_theta();
    let starts = &starts[..starts.len().min(config.max_starts)];

    // rank: 0 = converged minimum, 1 = converged saddle, 2 = not converged
    let mut best: Option<(u8, Descent<T>)> = None;
    for &start in starts {
        let d = damped_newton(start, prior, big_theta, config);
        let rank = match (d.converged, d.converged && is_saddle(&hessian_mul(&d.point, prior, big_theta))) {
            (true, false) => 0,
            (true, true) => 1,
            _ => 2,
        };
        let replace = match &best {
            None => true,
            Some((r, b)) => rank < *r || (rank == *r && better(&d, b, prior.means())),
        };
        if replace {
            best = Some((rank, d));
        }
    }
    let (_, d) = best.expect("at least one start");

    let precision = linalg::symmetrize(&hessian_mul(&d.point, prior, big_theta));
    let diagnostics = Diagnostics {
        iterations: d.iterations,
        converged: d.converged,
        starts_tried: starts.len(),
        gradient_norm: d.gradient_norm,
        gradient_scale: d.gradient_scale,
        precision_spd: Cholesky3::factor(&precision).is_ok(),
        saddle: is_saddle(&precision),
    };
    Ok(RefinedTriple {
        means: d.point,
        precision,
        residual: product_residual(&d.point),
        objective: d.objective,
        diagnostics,
    })
}

/// Multi-start refinement over [`mul_starts`]. Fails with [`Error::NonConvergence`]
/// when no start reaches the gradient tolerance.
pub fn refine_mul<T: Real>(
    prior: &GaussianTriple<T>,
    spec: &OperationSpec<T>,
    config: &MulSolverConfig<T>,
) -> Result<RefinedTriple<T>> {
    check_inputs(spec, config)?;
    let refined = refine_mul_from_starts(prior, spec, config, &mul_starts(prior, spec))?;
    if !refined.diagnostics.converged {
        return Err(Error::NonConvergence {
            best: refined.means.map(Real::as_f64),
            gradient_norm: refined.diagnostics.gradient_norm.as_f64(),
        });
    }
    Ok(refined)
}
