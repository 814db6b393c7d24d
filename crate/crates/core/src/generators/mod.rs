//! Seeded lattice models and deterministic fixtures.

mod fixture;
mod frontier;
mod lattice;
mod lerw;
mod mst;
mod spec;

pub use fixture::{gen_fixture, Fixture};
pub use frontier::{gen_rw_frontier, trace_frontier};
pub use lattice::{
    cluster_cylinder_event, cluster_kcrossing_event, crossing_clusters, extract_crossing_path, gen_bond_percolation, Direction,
    gen_bond_rectangle, gen_site_percolation, lr_crossing_exists, parse_field, write_field, LatticeField, Model,
};
pub use lerw::gen_lerw;
pub use mst::{gen_mst_path, mst_edges, mst_from_weights};
pub use spec::{generate, GeneratorKind, GeneratorSpec, Sample};
