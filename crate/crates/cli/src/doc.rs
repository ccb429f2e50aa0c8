//! JSON request and result documents.

use probarith::{
    mul_starts, refine_add, refine_mul_from_starts, GaussianTriple64, MulSolverConfig64, OpKind, OperationSpec64,
    PrecisionMatrix64, RefinedTriple64, UncertainScalar64,
};
use serde::{Deserialize, Serialize};

use crate::number;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Add,
    Mul,
}

impl From<Op> for OpKind {
    fn from(op: Op) -> Self {
        match op {
            Op::Add => OpKind::Add,
            Op::Mul => OpKind::Mul,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperandDoc {
    pub mean: f64,
    /// Optional only when the request carries a full precision matrix.
    #[serde(default)]
    pub std: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverDoc {
    pub gradient_tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub max_starts: Option<usize>,
    pub damping_initial: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestDocument {
    /// May be omitted when `trace --op` supplies it.
    #[serde(default)]
    pub op: Option<Op>,
    pub theta: f64,
    pub operands: Vec<OperandDoc>,
    /// Row-major; replaces the operand stds when present.
    #[serde(default)]
    pub precision: Option<[[f64; 3]; 3]>,
    #[serde(default)]
    pub solver: Option<SolverDoc>,
}

/// A request checked and converted into library types.
#[derive(Debug, Clone)]
pub struct Problem {
    pub prior: GaussianTriple64,
    pub operation: OperationSpec64,
    pub config: MulSolverConfig64,
}

impl RequestDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::parse(e.to_string()))
    }

    pub fn problem(&self, op_override: Option<Op>) -> Result<Problem, CliError> {
        let op = op_override.or(self.op).ok_or_else(|| CliError::invalid("missing \"op\" (\"add\" or \"mul\")"))?;
        if self.operands.len() != 3 {
            return Err(CliError::invalid(format!("expected exactly 3 operands, got {}", self.operands.len())));
        }
        let operation = OperationSpec64::new(op.into(), self.theta)?;
        let means = [self.operands[0].mean, self.operands[1].mean, self.operands[2].mean];
        let prior = match self.precision {
            Some(p) => GaussianTriple64::new(means, PrecisionMatrix64::new(p)?)?,
            None => {
                let mut scalars = Vec::with_capacity(3);
                for (i, o) in self.operands.iter().enumerate() {
                    let std = o.std.ok_or_else(|| {
                        CliError::invalid(format!("operand {} needs \"std\" when no precision is given", i + 1))
                    })?;
                    scalars.push(UncertainScalar64::new(o.mean, std)?);
                }
                GaussianTriple64::from_independent(scalars[0], scalars[1], scalars[2])?
            }
        };
        let mut config = MulSolverConfig64::default();
        if let Some(s) = &self.solver {
            if let Some(v) = s.gradient_tolerance {
                config.gradient_tolerance = v;
            }
            if let Some(v) = s.max_iterations {
                config.max_iterations = v;
            }
            if let Some(v) = s.max_starts {
                config.max_starts = v;
            }
            if let Some(v) = s.damping_initial {
                config.damping_initial = v;
            }
        }
        config.validate()?;
        Ok(Problem { prior, operation, config })
    }
}

impl Problem {
    /// Never fails on non-convergence; the result carries `converged = false` instead.
    pub fn refine(&self) -> Result<RefinedTriple64, CliError> {
        let r = match self.operation.kind() {
            OpKind::Add => refine_add(&self.prior, &self.operation)?,
            OpKind::Mul => refine_mul_from_starts(
                &self.prior,
                &self.operation,
                &self.config,
                &mul_starts(&self.prior, &self.operation),
            )?,
        };
        Ok(r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    #[serde(serialize_with = "number::ser_vec", deserialize_with = "number::de_vec")]
    pub means: [f64; 3],
    #[serde(serialize_with = "number::ser_mat", deserialize_with = "number::de_mat")]
    pub precision: [[f64; 3]; 3],
    /// `null` when the refined precision is not positive definite.
    #[serde(serialize_with = "number::ser_opt_mat", deserialize_with = "number::de_opt_mat")]
    pub covariance: Option<[[f64; 3]; 3]>,
    #[serde(serialize_with = "number::ser_f64", deserialize_with = "number::de_f64")]
    pub residual: f64,
    #[serde(serialize_with = "number::ser_f64", deserialize_with = "number::de_f64")]
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

impl From<&RefinedTriple64> for ResultDocument {
    fn from(r: &RefinedTriple64) -> Self {
        Self {
            means: r.means,
            precision: r.precision,
            covariance: r.covariance().ok(),
            residual: r.residual,
            objective: r.objective,
            converged: r.diagnostics.converged,
            iterations: r.diagnostics.iterations,
            warnings: r.warnings(),
        }
    }
}

impl ResultDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::parse(e.to_string()))
    }
}

/// The `{error, detail}` object written on failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorDocument {
    pub error: String,
    pub detail: String,
}
