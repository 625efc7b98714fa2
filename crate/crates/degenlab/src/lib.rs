//! Numerical laboratory for the degenerate Dirichlet problem
//! -div(d^beta grad u) = f, u = 0 on the boundary, where d is the distance
//! to the boundary and beta < 1.
//!
//! The crate provides graded-mesh flux solvers on intervals, balls and
//! rectangles, closed-form radial solutions to test them against, barrier
//! functions of the form d^{1-beta} (-log d)^eta with their exact images
//! under the operator, and estimators that read boundary decay rates,
//! Hoelder exponents, Sobolev membership and Muckenhoupt A2 products off
//! computed fields.

pub mod analysis;
pub mod analytic;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod quad;
pub mod solver;
pub mod weights;

pub use cli::run;
pub use error::{Error, Result};
pub use geometry::{Domain, Mesh, TubularNeighborhood};
pub use quad::SingularIntegral;
pub use solver::{DiscreteField, ProblemSpec, Solution, Source, Weight};
pub use weights::{GeneralWeight, PowerWeight};

// Compile the guide's code blocks as doc-tests so the book cannot drift
// from the crate.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/weights.md")]
    mod weights {}
    #[doc = include_str!("../../../book/src/barriers.md")]
    mod barriers {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/estimators.md")]
    mod estimators {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
