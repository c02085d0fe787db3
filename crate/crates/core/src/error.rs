use thiserror::Error;

/// Errors raised by the numerical kernels, the analytic engine and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An iterative numerical procedure missed its error target.
    #[error("numerical procedure did not converge (best estimate {estimate:e}, error bound {error_bound:e}): {context}")]
    NonConvergence {
        estimate: f64,
        error_bound: f64,
        context: String,
    },

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter set violates one of its invariants.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// Backhaul evaluation was requested but no base station is backhaul-enabled.
    #[error("no backhaul-enabled base station in the realization")]
    NoBackhaulBs,
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// Attach context to a non-convergence error; other variants pass through.
    pub fn context(self, ctx: &str) -> Self {
        match self {
            Error::NonConvergence {
                estimate,
                error_bound,
                context,
            } => Error::NonConvergence {
                estimate,
                error_bound,
                context: if context.is_empty() {
                    ctx.to_string()
                } else {
                    format!("{ctx}: {context}")
                },
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
