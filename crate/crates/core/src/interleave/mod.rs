//! Labeled interleaving distance for contour trees.
//!
//! A distance query fixes ε, builds the four smoothings R1^ε, R2^ε, R1^{2ε}
//! and R2^{2ε}, pins down the image of every labeled node, extends those
//! images uniquely over each tree, and checks that the lifted compositions
//! equal the 2ε shifts. A binary search over candidate ε values drives it.

mod commute;
mod distance;
mod essential;
mod existence;
mod labeling;

pub use commute::{check_commutativity, verify_interleaving};
pub use distance::{
    decide_at, event_values, label_lower_bound, labeled_distance_contour, labeled_distance_contour_with,
    ContourDistance, Diagnostic, Distance, DistanceOptions, Search,
};
pub use essential::{classify_essential, Essential};
pub use existence::{candidate_points, extend_unique_tree, node_image_forced, CandidateSet, FeasibilityVerdict, Probe, Side, Witness};
pub use labeling::{check_consistent, check_spanning, find_inconsistency, Inconsistency, Labeling};
