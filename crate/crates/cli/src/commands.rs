use std::fmt::Write as _;

use probarith::fixtures::{fixtures, run_fixtures};
use probarith::{trace_sweep_with_config, SweepMode, SweepOperand, SweepSpec64};

use crate::doc::{Op, RequestDocument, ResultDocument};
use crate::number::format_g17;
use crate::{CliError, EXIT_EXAMPLES_FAILED, EXIT_NON_CONVERGENCE, EXIT_OK};

pub const CSV_HEADER: [&str; 7] = ["sweep", "mean1", "mean2", "mean3", "residual", "objective", "converged"];

/// Returns the result document text and the exit code (0 or 2).
pub fn refine(input: &str) -> Result<(String, i32), CliError> {
    let problem = RequestDocument::parse(input)?.problem(None)?;
    let refined = problem.refine()?;
    let doc = ResultDocument::from(&refined);
    let code = if doc.converged { EXIT_OK } else { EXIT_NON_CONVERGENCE };
    Ok((doc.to_json(), code))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceArgs {
    pub op: Option<Op>,
    /// 1-based operand number.
    pub operand: usize,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub mode: SweepMode,
}

/// Sweeps one operand of the base request and returns the CSV text.
pub fn trace(input: &str, args: &TraceArgs) -> Result<String, CliError> {
    let problem = RequestDocument::parse(input)?.problem(args.op)?;
    let operand = SweepOperand::from_number(args.operand)?;
    let sweep = SweepSpec64::new(operand, args.from, args.to, args.steps, args.mode)?;
    let curve = trace_sweep_with_config(&problem.prior, &problem.operation, &sweep, &problem.config)?;

    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| CliError::io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for s in &curve.samples {
        let r = &s.refined;
        let mut row: Vec<String> = [s.sweep_value, r.means[0], r.means[1], r.means[2], r.residual, r.objective]
            .iter()
            .map(|&v| format_g17(v).unwrap_or_default())
            .collect();
        row.push(r.diagnostics.converged.to_string());
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::io(e.to_string()))
}

/// Runs the six worked examples. `inject_fault` shifts the first expected mean of the
/// fixture at that index by one unit, so the harness can be seen to fail.
pub fn examples(inject_fault: Option<usize>) -> Result<(String, i32), CliError> {
    let mut list = fixtures();
    if let Some(i) = inject_fault {
        let n = list.len();
        let f = list.get_mut(i).ok_or_else(|| CliError::invalid(format!("fault index {i} out of range 0..{n}")))?;
        f.expected_means[0] += 1.0;
    }
    let outcomes = run_fixtures(&list);

    let fmt3 = |v: &[f64; 3]| format!("({:.4}, {:.4}, {:.4})", v[0], v[1], v[2]);
    let mut out = String::new();
    let _ =
        writeln!(out, "{:<17} {:<28} {:<28} {:>10} {:>9}  result", "example", "expected", "computed", "max dev", "tol");
    for o in &outcomes {
        let computed = o.computed.as_ref().map(fmt3).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:<17} {:<28} {:<28} {:>10.3e} {:>9.1e}  {}",
            o.name,
            fmt3(&o.expected),
            computed,
            o.max_deviation,
            o.tolerance,
            if o.passed { "PASS" } else { "FAIL" }
        );
        if let Some(e) = &o.error {
            let _ = writeln!(out, "  error: {e}");
        }
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let _ = writeln!(out, "{passed}/{} examples passed", outcomes.len());
    let code = if passed == outcomes.len() { EXIT_OK } else { EXIT_EXAMPLES_FAILED };
    Ok((out, code))
}
