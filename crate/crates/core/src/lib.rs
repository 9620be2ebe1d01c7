//! Certified reductions of invertible tuples over algebras of continuous
//! functions on simplicial meshes and over the disk algebra.
//!
//! The guide in `book/` walks through the modules with runnable examples.

// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod cli;
pub mod corpus;
pub mod disk;
pub mod error;
pub mod instances;
pub mod io;
pub mod mesh;
pub mod pl;
pub mod reduce;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Field, C64};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/meshes.md")]
    mod meshes {}
    #[doc = include_str!("../../../book/src/certification.md")]
    mod certification {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    mod reductions {}
    #[doc = include_str!("../../../book/src/disk.md")]
    mod disk {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
