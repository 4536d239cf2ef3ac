//! Exact computation of motivic Donaldson-Thomas invariants of quivers.
//!
//! The crate is organized in layers:
//!
//! - [`quiver`]: quivers, dimension vectors, Euler forms, stability slopes,
//!   framed quivers and Ext-quivers;
//! - [`motive`]: the coefficient field of rational functions in `v = L^(1/2)`
//!   with the motive constructors, Adams operations and the bar involution;
//! - [`series`]: box-truncated multivariate power series with the lambda-ring
//!   operations (plethystic Exp and Log);
//! - [`dt`]: the engine computing DT invariants under trivial or generic King
//!   stability, with integrality/positivity/unimodularity audits, framed
//!   series, local DT via Ext-quivers, nullcone bounds and intersection Betti
//!   numbers;
//! - [`oracle`]: brute-force point counts over tiny finite fields used to
//!   validate the motive computations independently.

pub mod dt;
pub mod error;
pub mod motive;
pub mod oracle;
pub mod quiver;
pub mod series;

pub use error::{Error, Result};
pub use quiver::{DimVector, ExtQuiverSpec, Quiver, StabilityWeights};
