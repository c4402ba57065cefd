//! Closed-form damped hyperbolic polyharmonic flows of closed polygons.
//!
//! Polygons evolve by `X'' + beta X' = (-1)^(m+1) M^m X`, where `M` is the
//! cyclic second-difference operator. The operator is diagonal in the
//! discrete Fourier basis, so every mode obeys a scalar damped oscillator
//! equation with a closed-form solution.

pub mod error;
pub mod flow;
pub mod geometry;
pub mod oracle;
pub mod selfsimilar;
pub mod spectral;
pub mod trajectory;
pub mod yau;

pub use error::{Error, Result};
pub use flow::{FlowSolution, Representation};
pub use geometry::{AffineMap, Polygon};
pub use trajectory::Trajectory;
