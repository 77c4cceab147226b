//! Finite coarse geometry on connected graphs.
//!
//! Path metrics and Hausdorff distances on `[V]^2`, 2-selectors and their
//! moduli, the propagation lemmas behind coarse line extraction,
//! quasi-isometry certificates, geodesic-space discretization, order
//! compatibility and an exact search for the least achievable modulus.

pub mod claims;
pub mod discretize;
pub mod extraction;
pub mod generators;
pub mod graph;
pub mod hyperspace;
pub mod order;
pub mod qi;
pub mod search;
pub mod selector;

pub use extraction::{extract_line, extract_line_with_modulus, ExtractionReport, ExtractionResult};
pub use graph::{build_graph, Graph, GraphError, PathMetric, Vertex};
pub use hyperspace::{FiniteSubset, VertexPair};
pub use qi::{tighten, verify_qi, QiVerdict, QuasiIsometryCert};
pub use selector::{modulus, verify_selector, TwoSelector, Verification, Witness};
