use thiserror::Error;

use crate::model::Site;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("lattice side {0} is not allowed (must be even and at least 2)")]
    BadLattice(usize),

    #[error("site {site:?} lies outside the lattice of side {side}")]
    SiteOutOfRange { site: Site, side: usize },

    #[error("site {0:?} is listed twice")]
    DuplicateSite(Site),

    #[error("site {0:?} is not part of the state")]
    UnknownSite(Site),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("no chemical potential in (1e-16, 1e3] gives density {0}")]
    Bracket(f64),

    #[error("chemical potential solver stalled at residual {0:e}")]
    NoConvergence(f64),

    #[error("fit needs at least {need} points inside the window, found {found}")]
    TooFewPoints { need: usize, found: usize },

    #[error("degenerate fit input: {0}")]
    Degenerate(String),

    #[error("log-space fit got a nonpositive value {0:e}")]
    NonPositive(f64),

    #[error("optimal offset sits on the search bracket edge at {0:e}")]
    OffsetBracket(f64),

    #[error("Fock space dimension {dim} exceeds the ceiling {ceiling}")]
    FockDimension { dim: usize, ceiling: usize },

    #[error(
        "top particle-number sector carries weight {weight:e} at n_max = {n_max} \
         (threshold {threshold:e}); raise n_max or mu"
    )]
    Truncation { weight: f64, n_max: usize, threshold: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPositive(f64),

    #[error(
        "only {found} temperatures at L = {size} give N0/N in the fit window; \
         refine the temperature grid"
    )]
    CoarseGrid { size: usize, found: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// True for failures of a numerical routine rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Bracket(_)
                | Error::NoConvergence(_)
                | Error::TooFewPoints { .. }
                | Error::Degenerate(_)
                | Error::NonPositive(_)
                | Error::OffsetBracket(_)
                | Error::Truncation { .. }
                | Error::NotPositive(_)
                | Error::FockDimension { .. }
        )
    }
}
