//! Diagram complexes for string links and braids, their cohomology and
//! weight systems over exact rationals, and Monte Carlo evaluation of the
//! associated configuration space integrals on explicit geometries in R^3.

pub mod cochain;
pub mod diagram;
pub mod differential;
pub mod error;
pub mod geometry;
pub mod integrator;
pub mod projection;
pub mod sampling;
pub mod vassiliev;
pub mod ratmat;
pub mod weights;

pub use error::{Error, Result};
