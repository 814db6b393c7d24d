//! Analysis of systems of random planar (and low-dimensional) curves:
//! tortuosity counts, Holder reparametrization, crossing and straight-run
//! detection, capacity lower bounds, the curve metric, and the lattice
//! generators used to exercise them.

pub mod error;
pub mod geom;
pub mod seed;
pub mod curve;
pub mod regularity;
pub mod crossings;
pub mod generators;
pub mod capacity;
pub mod metric;
pub mod experiment;

pub use error::{Error, Result};
pub use geom::{Bbox, Point};
pub use curve::{CurveConfig, PolyCurve};
