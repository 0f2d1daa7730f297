use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Leading `size × size` moment minor is numerically singular.
    #[error("SingularMinor({size}): leading {size}x{size} moment minor is singular (pivot {pivot:.3e}, scale {scale:.3e})")]
    SingularMinor { size: usize, pivot: f64, scale: f64 },

    #[error("PoleOnSupport: {what} = ({re}, {im}) lies within {tol:e} of a support node")]
    PoleOnSupport {
        what: &'static str,
        re: f64,
        im: f64,
        tol: f64,
    },

    #[error("CoincidentArguments: {0}")]
    CoincidentArguments(String),

    #[error("CaseMismatch: {0}")]
    CaseMismatch(String),

    #[error("degree cap exceeded: need degree {needed}, system has cap {cap}")]
    CapExceeded { needed: usize, cap: usize },

    #[error("degree {n} out of range (cap {cap})")]
    DegreeOutOfRange { n: usize, cap: usize },

    #[error(
        "ZeroPartition: partition sum {value:.3e} is negligible against summand scale {scale:.3e}"
    )]
    ZeroPartition { value: f64, scale: f64 },

    #[error("BudgetExceeded: {terms} terms exceed budget {budget}")]
    BudgetExceeded { terms: f64, budget: u64 },

    #[error("DegenerateExtension: {0}")]
    DegenerateExtension(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("duplicate nodes: {0}")]
    DuplicateNode(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}
