//! k-regular interaction networks: construction, enumeration, canonical
//! labeling, clustering and graph6 persistence.

mod canon;
mod clustering;
mod enumerate;
mod graph;
pub mod graph6;
mod random;

pub use canon::{canonical_form, canonical_key, canonical_order, is_canonical, CanonicalKey};
pub use clustering::{average_clustering, local_clustering, local_triangle_count, triangle_counts};
pub use enumerate::{enumerate_k_regular_connected, GraphSetEntry, MAX_ENUMERATION_NODES};
pub(crate) use graph::bits as bits_of;
pub use graph::{is_connected, Graph, MAX_NODES};
pub use random::{random_k_regular_connected, RETRY_BUDGET};
