//! Circuit scripts for modular-variable qubit simulations.
//!
//! [`parse`](parse::parse) turns a script into a [`Program`](ast::Program),
//! whose `Display` prints it back in canonical form. [`run`](run::run)
//! executes it and streams JSON-line [`Record`](record::Record)s.
//!
//! ```text
//! grid ell=2*sqrt(pi) M=64 P=32
//! state q0 = logical(theta=0, phi=0)
//! measure expectation ReZ q0 expect=0.9756 tol=1e-3
//! dump density q0 phi=pi/2 file=q0_p.csv
//! ```

pub mod ast;
pub mod check;
pub mod error;
pub mod parse;
pub mod record;
pub mod run;

pub use ast::Program;
pub use error::{CliError, Result};
pub use parse::parse;
pub use run::{run, RunOptions, RunSummary};
