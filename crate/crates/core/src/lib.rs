//! Adjacency geometry of rectangular matrix spaces over finite fields.

pub mod classify;
pub mod error;
pub mod field;
pub mod geometry;
pub mod lemma_lab;
pub mod maps;
pub mod matrix;

pub use error::{Error, Result};
pub use field::{Elem, Field, FieldAutomorphism, FieldDescriptor};
pub use matrix::{Matrix, MatrixSpace};
