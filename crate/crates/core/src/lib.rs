//! Exhaustive enumeration and classification of edge-to-edge tilings of
//! closed surfaces by congruent `n`-gons.
//!
//! A tiling is encoded as a signed perfect matching on the edges of `f`
//! labelled copies of a prototile ([`Diagram`]). From the matching we derive
//! the vertices ([`VertexSet`]), the surface ([`SurfaceClass`]), the edge
//! length classes and the angle-sum feasibility verdict, and the
//! [`enumerate`] module generates every tiling of a given surface exactly
//! once up to relabelling.

pub mod convert;
pub mod diagram;
pub mod distinctlen;
pub mod enumerate;
mod error;
pub mod geomfilter;
pub mod render;
pub mod report;
pub mod topology;
pub mod unionfind;

pub use convert::{SignedCorner, Vertex, VertexSet};
pub use diagram::{CornerRef, Diagram, EdgePair, EdgeRef, Mode, Sign, SymmetryElement};
pub use error::{Error, Result};
pub use geomfilter::{AngleSystem, EdgeClassPartition, FeasibilityVerdict};
pub use report::ValidityReport;
pub use topology::{Surface, SurfaceClass};

/// Version of the JSON/CSV file formats produced by this crate.
pub const FORMAT_VERSION: u32 = 1;
