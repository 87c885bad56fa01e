//! Independent cross-checks for the closed formulas: a step-by-step
//! composition of the compression parameter and a random-matrix measurement
//! of atom masses.

pub mod composition;
pub mod random_matrix;

pub use composition::{sequential_composition, CompositionOracle};
pub use random_matrix::{measure_atoms, AtomMeasurement, RandomMatrixConfig};
