//! Executable check of the reduction from circulating orientation to
//! b-coloring: the construction of `(H, k)`, witness maps in both
//! directions, decomposition transfers, and brute-force oracles for the
//! problems on both sides.

pub mod bcoloring;
pub mod circori;
pub mod decomposition;
pub mod graph;
pub mod harness;
pub mod io;
pub mod reduction;

pub use bcoloring::{BColInstance, Coloring};
pub use circori::CircOriInstance;
pub use decomposition::{LinearOrder, PathDecomposition};
pub use graph::{Arc, Edge, Graph, Orientation, VertexId};
pub use reduction::{ReducedInstance, VertexRole};
