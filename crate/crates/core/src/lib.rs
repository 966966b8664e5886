//! Exact and numerical tools for calibrated geometry.

mod error;
pub mod calibrations;
pub mod exterior;
pub mod immersion;
pub mod linalg;
pub mod matrix;
pub mod scalar;
pub mod stabilizers;

pub use error::{Error, Result};
pub use exterior::{Form, OrientedPlane, SkewEndomorphism};
pub use matrix::Mat;
pub use scalar::{Rational, Scalar};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/forms.md")]
    mod forms {}
    #[doc = include_str!("../../../book/src/packages.md")]
    mod packages {}
    #[doc = include_str!("../../../book/src/stabilizers.md")]
    mod stabilizers {}
    #[doc = include_str!("../../../book/src/comass.md")]
    mod comass {}
    #[doc = include_str!("../../../book/src/immersions.md")]
    mod immersions {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
