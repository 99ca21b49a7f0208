use thiserror::Error;

use crate::scalar::ScalarRing;

/// Errors raised by the exact-arithmetic layers.
///
/// Every variant names the violated precondition so the CLI can map it to an
/// exit code without inspecting message text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("scalar ring mismatch: {left} vs {right}")]
    RingMismatch { left: ScalarRing, right: ScalarRing },

    #[error("operation not supported over {0}")]
    UnsupportedRing(ScalarRing),

    #[error("leading coefficient is not a unit")]
    NotUnit,

    #[error("valuation undetermined: no nonzero coefficient below O(t^{prec})")]
    UndeterminedValuation { prec: i64 },

    #[error(
        "precision exhausted: need coefficients below t^{needed}, known only to O(t^{available})"
    )]
    PrecisionExhausted { needed: i64, available: i64 },

    #[error("exact series has no terminating inverse; an explicit precision is required")]
    InexactInverse,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("cocycle violated on triple {triple}: {detail}")]
    CocycleViolation { triple: usize, detail: String },

    #[error("property violated: {0}")]
    Property(String),

    #[error("window not adapted: {0}")]
    NotAdapted(String),

    #[error("window instability: {0}")]
    Unstable(String),

    #[error("enumeration cap exceeded: {count} > {cap}")]
    EnumerationCap { count: u128, cap: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Whether the failure is a precision shortfall rather than bad input.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted { .. }
                | Error::UndeterminedValuation { .. }
                | Error::InexactInverse
        )
    }
}
