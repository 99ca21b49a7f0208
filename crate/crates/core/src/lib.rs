//! Exact computations with Laurent-series Tate spaces: lattices and their
//! relative dimensions and determinants, dimension torsors, graded
//! determinant lines, the fermion model, window Grassmannians, commutator
//! pairings of the canonical central extension, and Hensel lifting.

pub mod detline;
pub mod error;
pub mod extension;
pub mod fermion;
pub mod grassmann;
pub mod hensel;
pub mod lattice;
pub mod linalg;
pub mod matrix;
pub mod nilpotence;
pub mod scalar;
pub mod selftest;
pub mod series;
pub mod torsor;
pub mod whitehead;
pub mod window;

pub use detline::GradedLine;
pub use error::{Error, Result};
pub use lattice::{Lattice, SmithForm};
pub use linalg::Mat;
pub use matrix::SeriesMatrix;
pub use scalar::{Scalar, ScalarRing};
pub use series::LaurentSeries;
pub use window::{Position, WindowSpace};
