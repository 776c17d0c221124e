//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building parameters, evaluating the
/// closed forms, running simulations, or driving the workbench.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter is outside its allowed range. Carries the field
    /// name, the offending value, and the allowed range so callers can print
    /// actionable diagnostics.
    #[error("invalid parameter `{field}`: {value} (allowed: {allowed})")]
    InvalidParameter {
        field: &'static str,
        value: String,
        allowed: &'static str,
    },

    /// Preset lookup failed; lists what is available.
    #[error("unknown preset `{name}` (available: {available})")]
    UnknownPreset { name: String, available: String },

    /// Swap called with both input fidelities zero; the outcome state is
    /// undefined.
    #[error("degenerate swap: both input fidelities are zero")]
    DegenerateSwap,

    /// An operation was invoked on a scheme it does not apply to.
    #[error("scheme mismatch: {context}")]
    SchemeMismatch { context: String },

    /// The requested topology does not match the operation.
    #[error("topology mismatch: {context}")]
    TopologyMismatch { context: String },

    /// Success probabilities underflowed to zero; the distribution time is not
    /// representable in finite-precision arithmetic.
    #[error("rate below representable threshold (success probability underflowed)")]
    RateUnderflow,

    /// Config file could not be read or parsed.
    #[error("config error: {0}")]
    Config(String),

    /// Result files could not be written.
    #[error("output error: {0}")]
    Output(#[from] std::io::Error),
}
