//! The box data model and its structural analyses.

mod bt;
mod equiv;
mod generators;
mod model;
mod quiver;
mod triangulate;
mod validate;

pub use bt::{recognize_bt, BTFailure, BTStructure};
pub use equiv::{quadratic_core, signed_renaming, solid_core, CompareMode, Equivalence};
pub use generators::{change_generators, scaled_arrow, GeneratorChange};
pub use model::{dims, norm, solid_components, vertex_order, BoxError, DimensionVector, FreeBox};
pub use quiver::{classify_quiver, DiagramType, QuiverClass};
pub use triangulate::{find_triangulation, CycleWitness, Triangulation, TriangulationMode};
pub use validate::{validate_box, ValidationReport, Violation};
