//! Classical-nonclassical polarity (CNP) of Gaussian states.
//!
//! Covariance matrices live in the real quadrature basis `(x1, p1, ..., xn, pn)`
//! with vacuum covariance `I/2`. The crate covers state construction and
//! validation ([`state`]), linear-optical and squeezing networks
//! ([`symplectic`]), symplectic invariants and partial transposition
//! ([`invariants`]), the polarity quantities themselves ([`polarity`]),
//! randomized conservation and theorem audits ([`audit`]), and the file
//! formats and command dispatch behind the `cnp` binary ([`io`], [`cli`]).

pub mod audit;
pub mod cli;
pub mod error;
pub mod invariants;
pub mod io;
pub mod polarity;
pub mod state;
pub mod symplectic;

pub use error::{Error, Result};
pub use invariants::{
    g_eval, invariants_from_nu, minor_invariants, partial_transpose, symplectic_eigenvalues,
    transposed_invariants, InvariantSet,
};
pub use polarity::{
    bipartite_cnp, classify, log_negativity, single_mode_cnp, total_cnp, Classification,
    PolarityReport,
};
pub use state::{make_state, validate, CovarianceState, ModeStats, StateSpec, ValidationReport};
pub use symplectic::{
    apply, check_symplectic, op_matrix, random_passive_network, squeezing_spectrum, GaussianOp,
    NetworkSpec,
};
