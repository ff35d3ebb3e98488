//! Wachspress coordinates, Izmestiev matrices and rigidity of convex polytopes.
//!
//! The crate computes the Izmestiev matrix of a polytope from the face
//! volumes of its polar dual, compares polytope skeleta with other graph
//! embeddings through their Wachspress-weighted expansion, models polytope
//! tensegrities, and reconstructs a polytope up to affine equivalence from
//! its edge-graph, edge lengths and Wachspress coordinates.

pub mod cli;
pub mod error;
pub mod expansion;
pub mod fixtures;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod reconstruct;
pub mod rigidity;
pub mod wachspress;

pub use error::{Error, Result};
pub use geometry::{HPolytope, Polytope, DEFAULT_TOL};
pub use graph::EdgeGraph;
