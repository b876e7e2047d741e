//! Constant mean curvature (CMC) surfaces in Euclidean 3-space from curve data.
//!
//! Given a real-analytic curve, a tangent-plane field along it and a nonzero
//! mean curvature `H`, this crate constructs the unique conformally immersed
//! CMC-`H` surface containing the curve with the prescribed tangent planes.
//! The construction runs through the loop-group machinery for CMC surfaces:
//!
//! 1. [`bjoerling`] turns the curve data into an `SU(2)` frame along the
//!    curve and from it a holomorphic matrix 1-form (the *boundary potential*).
//! 2. [`dpw`] integrates the potential to a holomorphic extended frame over a
//!    planar domain, splits it pointwise with the Iwasawa decomposition from
//!    [`factorization`], and applies the Sym-Bobenko formula to produce
//!    immersion points and normals.
//! 3. [`verify`] independently recomputes fundamental forms, mean curvature
//!    and the Hopf differential from the raw point/normal grids, so the
//!    pipeline is checked against finite-difference geometry it did not build.
//!
//! Loops (matrix Laurent polynomials in the circle parameter) live in
//! [`loop_algebra`]; holomorphic extension of real-analytic scalar data lives
//! in [`analytic`]. [`cli_io`] provides the configuration layer, the example
//! gallery and OBJ/JSON output used by the `cmc` binary.
//!
//! The `examples/` directory of this crate is the best starting point: each
//! example is a runnable end-to-end construction of one surface family.

pub mod analytic;
pub mod bjoerling;
pub mod cli_io;
pub mod dpw;
pub mod error;
pub mod factorization;
pub mod geom;
pub mod loop_algebra;
pub mod mat2;
pub mod verify;

pub use error::{Error, Result};
pub use mat2::Mat2;
