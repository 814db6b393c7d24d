//! Nested fractal subsets of a curve, their energies and capacities, and
//! the dimension bounds that follow from sparse straight runs.

mod bound;
mod energy;
mod hierarchy;

pub use bound::{capacity_lower_bound, dimension_lower_bound, limit_bound, minimal_branching_k0, DimensionBound};
pub use energy::{capacity_qp, energy, hierarchy_measure, CapacityResult, DiscreteMeasure, Method};
pub use hierarchy::{build_hierarchy, check_hierarchy, FractalHierarchy, HSegment};
