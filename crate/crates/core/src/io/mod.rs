//! Graph documents, scalar-grid ingestion and DOT export.

mod document;
mod dot;
mod grid;

pub use document::{perturb_ties, GraphDocument, NodeEntry, NodeKey, ReadOptions, ValueField, FORMAT_VERSION};
pub use dot::export_dot;
pub use grid::{ingest_contour_tree, ingest_merge_tree, ScalarGrid};
