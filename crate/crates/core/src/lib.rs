//! Labeled interleaving distances on Reeb graphs, contour trees and merge trees.
//!
//! All function values are exact [`Rational`]s. Graphs are immutable once
//! validated, and every operation is a pure function over shared references.

pub mod error;
pub mod graph;
pub mod interleave;
pub mod intrinsic;
pub mod io;
pub mod iso;
pub mod merge;
pub mod par;
pub mod rational;
pub mod smoothing;
pub mod tree;

pub use iso::function_preserving_isomorphic;
pub use smoothing::{smooth, SmoothedReeb};
pub use error::{Error, Result};
pub use graph::{
    validate, EdgeId, GraphBuilder, GraphError, GraphPoint, Injectivity, NodeClass, NodeId,
    RawGraph, ReebGraph, ValidationReport, Violation,
};

pub use rational::Rational;

