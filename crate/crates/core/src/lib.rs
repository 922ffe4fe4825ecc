//! Perfect packings of k-partite k-graphs.
//!
//! The crate covers the structural invariants of a pattern `K` (its
//! realisations, class-size sets, gcd, vertex cover), the modular lattice
//! tools used by the divisibility obstructions, host constructions with
//! matching obstruction witnesses, constructive packers for complete and
//! near-complete hosts, and exact search for small instances.

pub mod construct;
pub mod error;
pub mod gadget;
pub mod graph;
pub mod host;
pub mod io;
pub mod lattice;
pub mod pack;
pub mod packing;
pub mod realisation;
pub mod search;
pub mod util;

pub use error::{Error, Result};
pub use graph::{Host, IndexVector, KGraph, Vertex, VertexPartition};
pub use host::{BlowupHost, HostSpec};
pub use packing::{verify_packing, Packing, Verdict, Violation};
pub use realisation::{
    enumerate_realisations, structural_profile, KType, Realisation, RealisationMode,
    StructuralProfile,
};
