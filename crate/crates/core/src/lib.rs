pub mod curve;
pub mod equivalence;
pub mod error;
pub mod format;
pub mod linalg;
pub mod locus;
pub mod map;
pub mod model;
pub mod normalizer;
pub mod scalar;
pub mod series;
pub mod surface;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
pub use series::{Grading, MultiIndex, Vars, WSeries};
