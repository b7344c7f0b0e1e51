use crate::qstate::GroupClass;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("state norm deviates from 1 by {0:e}")]
    Norm(f64),
    #[error("site {site} out of range for a {n_sites}-site state")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("site {0} listed more than once")]
    DuplicateSite(usize),
    #[error("no sites selected")]
    EmptySelection,
    #[error("{what}: got {found}")]
    Dimension { what: &'static str, found: usize },
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    Hermiticity(f64),
    #[error("trace deviates from 1 by {0:e}")]
    Trace(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("rank {rank} outside 1..={max}")]
    Rank { rank: usize, max: usize },
    #[error("no acceptable sample after {0} attempts")]
    Sampling(usize),
    #[error("quantity that must be real has imaginary residue {0:e}")]
    Reality(f64),
    #[error("{class} constraint violated (residual {residual:e})")]
    Class { class: GroupClass, residual: f64 },
    #[error("quantity requires an all-flipped loop or a link determinant: {0}")]
    NotSl2cQuantity(alloc::string::String),
    #[error("negative radicand {0:e} in three-tangle reconstruction")]
    NegativeRadicand(f64),
    #[error("reconstructed tangle {0:e} is below zero")]
    NegativeTangle(f64),
    #[error("finite-difference step {0:e} outside [1e-8, 1e-2]")]
    Step(f64),
    #[error("invalid loop: {0}")]
    Loop(&'static str),
    #[error("invalid parameter: {0}")]
    Parameter(&'static str),
}
