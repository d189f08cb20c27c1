//! Decoherence-free subspaces of finite-dimensional Lindblad master equations:
//! enumeration, restricted/IGC classification and verification by direct
//! propagation.

pub mod cli;
pub mod config;
pub mod engine;
pub mod error;
pub mod gallery;
pub mod io;
pub mod linalg;
pub mod model;
pub mod oracle;

pub use config::Tolerances;
pub use engine::{find_all_dfs, AnalysisReport, Classification, DfsRecord};
pub use error::{DfsError, Result};
pub use model::{EigTuple, MasterEquationModel};
