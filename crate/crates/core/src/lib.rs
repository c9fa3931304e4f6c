//! Elastic ribbon graphs, virtual endomorphisms of graphs, and the energies
//! used to certify that a branched self-cover of the sphere is rational.
pub mod fixtures;
pub mod fold;
pub mod format;
pub mod asymptotics;
pub mod energy;
pub mod graph;
pub mod maps;
pub mod minimize;
pub mod obstruction;
pub mod pl;
pub mod random;
pub mod ribbon;
pub mod spine;
pub mod thicken;
pub mod traintrack;
pub mod vend;

pub use graph::{Dart, EdgePath, Elastic, GraphError, MultiCurve, RibbonGraph, Q};
pub use maps::{Covering, GraphMap, MapError};
