//! The six worked examples used as regression fixtures: two sums and four products,
//! each with its expected refined means.

use crate::add::refine_add;
use crate::error::Result;
use crate::model::{triple_from_pairs, GaussianTriple, OpKind, OperationSpec, RefinedTriple};
use crate::mul::{refine_mul, MulSolverConfig};

/// Componentwise tolerance on the refined means for sum fixtures.
pub const ADD_MEANS_TOLERANCE: f64 = 1e-3;
/// Componentwise tolerance on the refined means for product fixtures (expected values
/// are quoted to three decimals).
pub const MUL_MEANS_TOLERANCE: f64 = 5e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    pub kind: OpKind,
    /// `(mean, std)` per operand.
    pub operands: [(f64, f64); 3],
    pub theta: f64,
    pub expected_means: [f64; 3],
    pub tolerance: f64,
}

impl Fixture {
    pub fn prior(&self) -> Result<GaussianTriple<f64>> {
        triple_from_pairs(self.operands)
    }

    pub fn operation(&self) -> Result<OperationSpec<f64>> {
        OperationSpec::new(self.kind, self.theta)
    }

    pub fn refine(&self) -> Result<RefinedTriple<f64>> {
        let prior = self.prior()?;
        let op = self.operation()?;
        match self.kind {
            OpKind::Add => refine_add(&prior, &op),
            OpKind::Mul => refine_mul(&prior, &op, &MulSolverConfig::default()),
        }
    }
}

pub fn fixtures() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "sum",
            kind: OpKind::Add,
            operands: [(1.0, 1.0), (10.0, 5.0), (50.0, 10.0)],
            theta: 0.1,
            expected_means: [1.3095, 17.7375, 19.0501],
            tolerance: ADD_MEANS_TOLERANCE,
        },
        Fixture {
            name: "product",
            kind: OpKind::Mul,
            operands: [(0.5, 1.0), (2.0, 1.0), (5.0, 10.0)],
            theta: 0.1,
            expected_means: [0.577, 2.022, 1.167],
            tolerance: MUL_MEANS_TOLERANCE,
        },
        Fixture {
            name: "difference",
            kind: OpKind::Add,
            operands: [(1.0, 1.0), (2.0, 10.0), (7.0, 3.0)],
            theta: 0.1,
            expected_means: [1.036, 5.636, 6.672],
            tolerance: ADD_MEANS_TOLERANCE,
        },
        Fixture {
            name: "quotient",
            kind: OpKind::Mul,
            operands: [(0.7, 1.0), (2.0, 10.0), (5.0, 1.0)],
            theta: 0.1,
            expected_means: [0.908, 5.463, 4.962],
            tolerance: MUL_MEANS_TOLERANCE,
        },
        Fixture {
            name: "factorization",
            kind: OpKind::Mul,
            operands: [(1.0, 10.0), (1.0, 10.0), (7.0, 2.0)],
            theta: 0.01,
            expected_means: [2.641, 2.641, 6.975],
            tolerance: MUL_MEANS_TOLERANCE,
        },
        Fixture {
            name: "product-quotient",
            kind: OpKind::Mul,
            operands: [(1.2, 0.4), (-2.0, 10.0), (7.0, 6.0)],
            theta: 0.1,
            expected_means: [1.234, 4.205, 5.189],
            tolerance: MUL_MEANS_TOLERANCE,
        },
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureOutcome {
    pub name: &'static str,
    pub expected: [f64; 3],
    /// `None` when the refinement itself failed.
    pub computed: Option<[f64; 3]>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub error: Option<String>,
}

pub fn run_fixture(f: &Fixture) -> FixtureOutcome {
    match f.refine() {
        Ok(r) => {
            let dev = r.means.iter().zip(&f.expected_means).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            FixtureOutcome {
                name: f.name,
                expected: f.expected_means,
                computed: Some(r.means),
                max_deviation: dev,
                tolerance: f.tolerance,
                passed: dev <= f.tolerance && r.diagnostics.converged,
                error: None,
            }
        }
        Err(e) => FixtureOutcome {
            name: f.name,
            expected: f.expected_means,
            computed: None,
            max_deviation: f64::INFINITY,
            tolerance: f.tolerance,
            passed: false,
            error: Some(e.to_string()),
        },
    }
}

pub fn run_fixtures(list: &[Fixture]) -> Vec<FixtureOutcome> {
    list.iter().map(run_fixture).collect()
}
