//! Sparse signal recovery by dynamic thresholding with memory (DTAM), the
//! partial-gradient optimal thresholding baseline (PGROTP), and classic greedy
//! pursuits, together with the constants that certify their convergence.

pub mod error;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod meanfun;
pub mod problem;
pub mod pursuit;
pub mod qp;
pub mod rng;
pub mod theory;
pub mod transforms;

pub use error::{Error, Result};
pub use linalg::SupportSet;
pub use matrix::DenseMatrix;
pub use meanfun::{MeanFamily, MeanFunctionSpec, Weights};
pub use problem::{
    AlgoConfig, Algorithm, DebugTrace, IterationRecord, PursuitTrace, QpStats, RecoveryProblem,
    StopReason,
};
pub use pursuit::solve;
pub use qp::{CappedSimplexSpec, QpSolution, SumMode};
pub use theory::TheoryConstants;
pub use transforms::{WaveletFamily, WaveletSpec};
