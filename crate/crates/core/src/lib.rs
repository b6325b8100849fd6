//! Exact and high-precision machinery for the quantum differential equations of
//! twistor spaces over hyperbolic 6-manifolds and of projective spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactcore`]: big rationals, arbitrary-precision reals, rational functions
//!   in `u` and dense exact linear algebra.
//! * [`cohmodel`]: finite models of the (quantum) cohomology rings, the Gamma
//!   class and the normalised loop-space Euler class.
//! * [`mzv`]: partial multiple zeta values, weak symmetric sums and their
//!   quasi-shuffle algebra.
//! * [`jfun`]: descendant Gromov-Witten invariants of the twistor space and
//!   J-function coefficients.
//! * [`gammalimit`]: Apéry-limit sequences and Gamma-conjecture verdicts.
//! * [`peaks`]: Laplace's method for power series.
//! * [`dmod`]: irregularity and exponential-type classification of formal
//!   connections.
//! * [`verify`]: the end-to-end verification suite driven by the CLI and the
//!   acceptance tests.

pub mod cohmodel;
pub mod config;
pub mod dmod;
pub mod error;
pub mod exactcore;
pub mod gammalimit;
pub mod jfun;
pub mod mzv;
pub mod peaks;
pub mod verify;

pub use error::{Error, Result};
