//! Sweeps one prior mean over an interval and records the refined triple at every
//! grid point. For multiplication the resulting locus is the generalized
//! probabilistic hyperbola: close to `y = c/x` for large `|x|`, finite near zero.

use crate::add::refine_add;
use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::model::{GaussianTriple, OpKind, OperationSpec, RefinedTriple};
use crate::mul::{mul_starts, refine_mul_from_starts, MulSolverConfig};
use crate::scalar::Real;

pub const DEFAULT_STEPS: usize = 401;
/// Jump criterion, as a multiple of the median distance between consecutive samples.
pub const DEFAULT_JUMP_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepOperand {
    First,
    Second,
    Third,
}

impl SweepOperand {
    pub fn index(self) -> usize {
        match self {
            SweepOperand::First => 0,
            SweepOperand::Second => 1,
            SweepOperand::Third => 2,
        }
    }

    /// 1-based operand number.
    pub fn from_number(n: usize) -> Result<Self> {
        match n {
            1 => Ok(SweepOperand::First),
            2 => Ok(SweepOperand::Second),
            3 => Ok(SweepOperand::Third),
            _ => Err(invalid(format!("sweep operand must be 1, 2 or 3, got {n}"))),
        }
    }
}

/// How multiplication sweeps pick among local minima.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SweepMode {
    /// Follow one branch: each solve starts from the previous sample's solution.
    /// Falls back to the full start list only when that solve fails to converge.
    WarmStart,
    /// Independent multi-start solve per sample (lowest-objective minimum).
    #[default]
    ColdMultiStart,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec<T> {
    pub operand: SweepOperand,
    pub from: T,
    pub to: T,
    pub steps: usize,
    pub mode: SweepMode,
}

impl<T: Real> SweepSpec<T> {
    pub fn new(operand: SweepOperand, from: T, to: T, steps: usize, mode: SweepMode) -> Result<Self> {
        let spec = Self { operand, from, to, steps, mode };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.from.is_finite() && self.to.is_finite() && self.from < self.to) {
            return Err(invalid(format!("sweep range must satisfy from < to, got [{}, {}]", self.from, self.to)));
        }
        if self.steps < 2 {
            return Err(invalid(format!("sweep needs at least 2 steps, got {}", self.steps)));
        }
        Ok(())
    }

    /// Uniform grid including both endpoints.
    pub fn grid(&self) -> Vec<T> {
        let n = self.steps - 1;
        let width = self.to - self.from;
        (0..=n)
            .map(|i| {
                if i == n {
                    return self.to;
                }
                // The weighted form hits grid points like 1.2 exactly; the offset form is the overflow fallback.
                let (k, rest) = (T::lit(i as f64), T::lit((n - i) as f64));
                let v = (self.from * rest + self.to * k) / T::lit(n as f64);
                if v.is_finite() {
                    v
                } else {
                    self.from + width * k / T::lit(n as f64)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample<T> {
    pub sweep_value: T,
    pub refined: RefinedTriple<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceCurve<T> {
    pub samples: Vec<CurveSample<T>>,
    pub spec: SweepSpec<T>,
    pub base: GaussianTriple<T>,
    pub operation: OperationSpec<T>,
}

impl<T: Real> TraceCurve<T> {
    pub fn converged(&self) -> impl Iterator<Item = &CurveSample<T>> {
        self.samples.iter().filter(|s| s.refined.diagnostics.converged)
    }

    pub fn all_finite(&self) -> bool {
        self.samples.iter().all(|s| s.sweep_value.is_finite() && s.refined.is_finite())
    }
}

pub fn trace_sweep<T: Real>(
    base: &GaussianTriple<T>,
    operation: &OperationSpec<T>,
    sweep: &SweepSpec<T>,
) -> Result<TraceCurve<T>> {
    trace_sweep_with_config(base, operation, sweep, &MulSolverConfig::default())
}

/// Non-converged samples are kept (with `converged = false`), never dropped.
pub fn trace_sweep_with_config<T: Real>(
    base: &GaussianTriple<T>,
    operation: &OperationSpec<T>,
    sweep: &SweepSpec<T>,
    config: &MulSolverConfig<T>,
) -> Result<TraceCurve<T>> {
    sweep.validate()?;
    config.validate()?;
    let idx = sweep.operand.index();
    let mut samples = Vec::with_capacity(sweep.steps);
    let mut previous: Option<RefinedTriple<T>> = None;

    for value in sweep.grid() {
        let prior = base.with_mean(idx, value)?;
        let refined = match operation.kind() {
            OpKind::Add => refine_add(&prior, operation)?,
            OpKind::Mul => {
                let full = || refine_mul_from_starts(&prior, operation, config, &mul_starts(&prior, operation));
                match (sweep.mode, previous) {
                    (SweepMode::WarmStart, Some(prev)) => {
                        let warm = refine_mul_from_starts(&prior, operation, config, &[prev.means])?;
                        if warm.diagnostics.converged {
                            warm
                        } else {
                            full()?
                        }
                    }
                    _ => full()?,
                }
            }
        };
        previous = Some(refined);
        samples.push(CurveSample { sweep_value: value, refined });
    }

    Ok(TraceCurve { samples, spec: *sweep, base: *base, operation: *operation })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum<T> {
    pub value: T,
    pub at_sweep_value: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump<T> {
    pub between: (T, T),
    /// Euclidean distance between the refined means on either side.
    pub magnitude: T,
}

impl<T: Real> Jump<T> {
    pub fn midpoint(&self) -> T {
        (self.between.0 + self.between.1) * T::lit(0.5)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveFeatures<T> {
    pub max_second_mean: Extremum<T>,
    pub jumps: Vec<Jump<T>>,
    /// Largest relative deviation from the ordinary hyperbola over `|sweep| >= asymptote_min_abs`.
    /// Compares the other factor (second mean when sweeping the first operand, first mean
    /// when sweeping the second) with `c/sweep`, `c` being the base third mean. `None` when
    /// sweeping the third operand, when `c` is zero, or when no sample qualifies.
    pub asymptote_max_rel_dev: Option<T>,
}

fn median<T: Real>(mut values: Vec<T>) -> T {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) * T::lit(0.5)
    }
}

pub fn detect_features<T: Real>(
    curve: &TraceCurve<T>,
    jump_threshold: T,
    asymptote_min_abs: T,
) -> Result<CurveFeatures<T>> {
    let converged: Vec<&CurveSample<T>> = curve.converged().collect();
    let first = converged.first().ok_or(Error::EmptyCurve)?;

    let mut max_second_mean = Extremum { value: first.refined.means[1], at_sweep_value: first.sweep_value };
    for s in &converged {
        if s.refined.means[1] > max_second_mean.value {
            max_second_mean = Extremum { value: s.refined.means[1], at_sweep_value: s.sweep_value };
        }
    }

    // consecutive grid neighbours, both converged
    let pairs: Vec<(&CurveSample<T>, &CurveSample<T>, T)> = curve
        .samples
        .windows(2)
        .filter(|w| w[0].refined.diagnostics.converged && w[1].refined.diagnostics.converged)
        .map(|w| (&w[0], &w[1], linalg::norm(&linalg::sub(&w[1].refined.means, &w[0].refined.means))))
        .collect();
    let mut jumps = Vec::new();
    if !pairs.is_empty() {
        let med = median(pairs.iter().map(|p| p.2).collect());
        let scale = converged.iter().fold(T::one(), |acc, s| acc.max(linalg::norm_inf(&s.refined.means)));
        let floor = T::lit(1e3) * T::epsilon() * scale;
        for (a, b, d) in &pairs {
            if *d > jump_threshold * med && *d > floor {
                jumps.push(Jump { between: (a.sweep_value, b.sweep_value), magnitude: *d });
            }
        }
    }

    let c = curve.base.means()[2];
    let counterpart = match curve.spec.operand {
        SweepOperand::First => Some(1),
        SweepOperand::Second => Some(0),
        SweepOperand::Third => None,
    };
    let asymptote_max_rel_dev = match counterpart {
        Some(k) if c != T::zero() => converged
            .iter()
            .filter(|s| s.sweep_value.abs() >= asymptote_min_abs && s.sweep_value != T::zero())
            .map(|s| {
                let ordinary = c / s.sweep_value;
                ((s.refined.means[k] - ordinary) / ordinary).abs()
            })
            .fold(None, |acc: Option<T>, d| Some(acc.map_or(d, |a| a.max(d)))),
        _ => None,
    };

    Ok(CurveFeatures { max_second_mean, jumps, asymptote_max_rel_dev })
}
