//! Command-line harness: generate inputs, pick cycles, run the optimizers and
//! aggregate the results. Exit codes: 0 success, 2 constraint violation or
//! infeasible input, 1 anything else.

pub mod args;
pub mod cycles;
pub mod gen;
pub mod inputs;
pub mod report;
pub mod schedule;

use mcqf_core::error::{ConfigError, CycleSearchError, MappingError, ProblemError};

pub use args::{Cli, Command};

/// Marks an error as a constraint violation or infeasible request.
#[derive(Debug)]
pub struct Infeasible(pub String);

impl std::fmt::Display for Infeasible {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Infeasible {}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Gen(a) => gen::run(&a),
        Command::Cycles(a) => cycles::run(&a),
        Command::Schedule(a) => schedule::run(&a),
        Command::Report(a) => report::run(&a),
    }
}

pub fn exit_code(err: &anyhow::Error) -> i32 {
    let infeasible = err.chain().any(|e| {
        e.is::<Infeasible>()
            || e.is::<ConfigError>()
            || e.is::<MappingError>()
            || matches!(
                e.downcast_ref::<CycleSearchError>(),
                Some(CycleSearchError::NoFeasibleCombination(_))
            )
            || matches!(
                e.downcast_ref::<ProblemError>(),
                Some(
                    ProblemError::Config(_)
                        | ProblemError::Mapping(_)
                        | ProblemError::GroupMismatch { .. }
                )
            )
    });
    if infeasible {
        2
    } else {
        1
    }
}
