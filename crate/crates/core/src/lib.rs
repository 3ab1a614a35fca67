//! Curve reconstruction from epsilon-samples.
//!
//! Reconstruction ([`recon`]), sampling validators and generators
//! ([`sampling`], [`curve`], [`medial`]), and constructions of point sets that
//! are 0.72-samples of several different curves ([`gadget`]).

pub mod curve;
pub mod delaunay;
pub mod error;
pub mod gadget;
pub mod geom;
pub mod io;
pub mod kdtree;
pub mod medial;
pub mod predicates;
pub mod recon;
pub mod sampling;

pub use error::{Error, Result};
pub use geom::{CompatParams, Point};
