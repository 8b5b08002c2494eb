//! Combinatorial dropout designs.
//!
//! A dropout design is a schedule of node selections for a layered network:
//! every training step keeps a non-empty subset of each layer, and the
//! schedule is balanced so that every small selection of nodes spanning
//! consecutive layers is kept together equally often.
//!
//! The crate is organised bottom-up:
//!
//! - [`field`]: exact GF(q) arithmetic and linear algebra.
//! - [`geometry`]: points, flats, parallel classes, spreads and caps of
//!   PG(d,q) and AG(d,q).
//! - [`design`]: the layered design model, the brute-force concurrence
//!   verifier and the design transformations, plus the text formats.
//! - [`oa`]: multi-split orthogonal arrays from generator matrices.
//! - [`constructions`]: designs read off affine and projective incidence.
//! - [`filter`]: balanced sparse filter matrices from difference families.
//! - [`optimality`]: information matrices, exact determinants and the
//!   random incidence-matrix experiment.

pub mod combin;
pub mod constructions;
pub mod design;
pub mod error;
pub mod field;
pub mod filter;
pub mod geometry;
pub mod oa;
pub mod optimality;

pub use error::{Error, Result};
