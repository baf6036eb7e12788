//! Excited (cookie) random walks and k-particle mob walks on the integers.
//!
//! Environments are replayable arrow tables: every query `arrow(x, i)` is a
//! pure function of the environment, so different schedulings of the same
//! particles, or different walks on the same seed, see identical arrows.
//!
//! Modules:
//! - [`env`]: cookie laws, arrow environments and leftover environments.
//! - [`mob`]: single and k-particle walks, traces, regenerations, excursions.
//! - [`zproc`]: the z-process and its crossing-count companions.
//! - [`bpwm`]: branching processes with migration and exact offspring laws.
//! - [`estimate`]: Monte Carlo estimators with confidence intervals.
//! - [`checks`]: exact oracle suites over randomized finite environments.

pub mod bpwm;
pub mod checks;
pub mod env;
pub mod error;
pub mod estimate;
pub mod fixtures;
pub mod mob;
pub mod rng;
pub mod stats;
pub mod zproc;

pub use env::{Arrow, ArrowEnvironment, CookieSpec, EnvSpec, LocalTimeProfile};
pub use error::{Error, Result};
pub use mob::{Censor, MobTrace, Scheduling, StopRule};
