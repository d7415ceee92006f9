use thiserror::Error;

/// Which predicate made a support configuration ambiguous.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    /// Another tip lies on the supporting line or plane.
    TiedTip,
    /// A support point coincides with the center (x = 0) or the origin lies
    /// on an edge of the support triangle.
    CenterOnBoundary,
    /// Two candidate pivots are tied within tolerance.
    TiedPivot,
    /// The pivoting loop exceeded its iteration cap.
    PivotCap,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} = {value} is outside its domain {domain}")]
    OutOfDomain { what: &'static str, value: f64, domain: &'static str },

    #[error("not an equilibrium: {0}")]
    NotEquilibrium(String),

    #[error("degenerate support configuration ({0:?})")]
    Degenerate(Degeneracy),

    #[error("brute-force oracle cap exceeded: {n} teeth > {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("brute-force oracle found {0} admissible supports, expected exactly one")]
    NonUnique(usize),

    #[error("quadrature did not converge: estimate {estimate}, error {error} after depth {depth}")]
    NoConvergence { estimate: f64, error: f64, depth: u32 },

    #[error("no histogram bin has enough expected mass for a chi-square statistic")]
    InsufficientExpected,

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::Degenerate(_) | Error::NonUnique(_))
    }

    pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Self {
        Error::OutOfDomain { what, value, domain }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
