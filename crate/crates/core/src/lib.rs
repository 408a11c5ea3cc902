//! Hausdorff dimensions of limit sets of conformal iterated function systems.
//!
//! The crate is organised bottom-up:
//!
//! * [`moebius`] is the geometry kernel: Möbius and anti-Möbius maps, circle
//!   reflections and the Cayley change of model.
//! * [`group`] builds Schottky and reflection groups, enumerates orbit balls and
//!   estimates Poincaré series and critical exponents.
//! * [`ifs`] turns those groups (or explicit maps) into iterated function
//!   systems, finite or with an analytic countable tail, and evaluates the
//!   partition sums `psi_n`.
//! * [`pressure`] computes topological pressure by two independent routes
//!   (subadditive partition sums and a collocated transfer operator) and solves
//!   the Bowen equation `P(s) = 0`.
//! * [`deform`] moves the generators along analytic one-parameter families and
//!   tests the resulting dimension curve for real-analyticity through the decay
//!   of its Chebyshev coefficients.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command line
//! live in the companion `cifs` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod chebyshev;
pub mod deform;
pub mod dimension;
pub mod error;
pub mod fit;
pub mod group;
pub mod ifs;
pub mod moebius;
pub mod pressure;
pub mod tail;
pub mod zeta;

mod math;

pub use dimension::DimensionResult;
pub use error::{Error, Result};
pub use moebius::{Circle, Classification, Complex, MoebiusMap, Orientation, Point};
