//! Node-weighted rooted tree optimization: budgeted, quota, and Steiner
//! variants on directed graphs with additive prizes and on undirected graphs
//! with monotone submodular prizes.
//!
//! The crate is organized around a small dense LP solver ([`simplex`]),
//! flow-relaxation builders ([`flow`]), and rounding pipelines that turn
//! fractional capacities into trees ([`directed`], [`undirected`]). Exact
//! brute-force solvers for desk-scale instances live in [`exact`] and back
//! every guarantee with ground truth. [`io`] holds the instance/solution file
//! formats, the random instance generator, and the CLI entry point.

pub mod directed;
pub mod exact;
pub mod flow;
pub mod graph;
pub mod hitting;
pub mod io;
pub mod prize;
pub mod simplex;
pub mod undirected;

use std::fmt;

/// Crate-wide error type. Variants map onto the CLI exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: bad node id, dimension mismatch, unparsable file.
    InvalidInput(String),
    /// The instance admits no feasible solution (unreachable terminal,
    /// budget below the root cost, ...).
    Infeasible(String),
    /// No budget level reaches the requested quota.
    QuotaUnreachable(String),
    /// The numerics gave up: iteration cap, unrecoverable drift.
    NumericalFailure(String),
    /// A guaranteed post-condition failed at runtime. Always a bug or a
    /// violated precondition; surfaced loudly instead of degrading.
    ContractViolation(String),
    /// Input too large for an exhaustive routine.
    SizeLimit(String),
    /// A node required to be reachable is not.
    Connectivity {
        node: usize,
    },
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::Infeasible(m) => write!(f, "infeasible: {m}"),
            Error::QuotaUnreachable(m) => write!(f, "quota unreachable: {m}"),
            Error::NumericalFailure(m) => write!(f, "numerical failure: {m}"),
            Error::ContractViolation(m) => write!(f, "contract violation: {m}"),
            Error::SizeLimit(m) => write!(f, "size limit: {m}"),
            Error::Connectivity { node } => write!(f, "node {node} is not reachable"),
            Error::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl Error {
    /// Exit code used by the CLI: 1 usage/input, 2 infeasible, 3 numerical
    /// failure, 4 contract violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::SizeLimit(_) | Error::Io(_) => 1,
            Error::Infeasible(_) | Error::QuotaUnreachable(_) | Error::Connectivity { .. } => 2,
            Error::NumericalFailure(_) => 3,
            Error::ContractViolation(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
