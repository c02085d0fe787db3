//! Downlink coverage of cellular networks assisted by UAV relays with mmWave backhaul.
//!
//! The crate pairs a semi-analytic engine ([`analytic`]) built on stochastic
//! geometry with an exact Monte-Carlo reference ([`simulator`]).
//!
//! ```
//! use skyhaul::analytic::{Analysis, NetworkParams};
//!
//! let mut params = NetworkParams::default();
//! params.geometry.h_u = 230.0;
//! let engine = Analysis::new(&params)?;
//! let assoc = engine.association()?;
//! assert!((assoc.total() - 1.0).abs() < 1e-4);
//! # Ok::<(), skyhaul::Error>(())
//! ```

pub mod analytic;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod simulator;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};

/// How a UAV with a failed backhaul link behaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// The UAV forwards regardless; coverage also needs the backhaul to succeed.
    Unaware,
    /// The UAV stays silent; its UE is in service failure.
    Aware,
    /// The UE falls back to its best BS (simulation only).
    Instantaneous,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Unaware => "unaware",
            Scheme::Aware => "aware",
            Scheme::Instantaneous => "instantaneous",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unaware" => Ok(Scheme::Unaware),
            "aware" => Ok(Scheme::Aware),
            "instantaneous" => Ok(Scheme::Instantaneous),
            other => Err(Error::invalid("scheme", format!("unknown scheme '{other}'"))),
        }
    }
}

/// The guide's code listings, compiled and run as doctests.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/quickstart.md")]
    mod quickstart {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
    #[doc = include_str!("../../../book/src/analytic.md")]
    mod analytic {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/reproducing.md")]
    mod reproducing {}
}
