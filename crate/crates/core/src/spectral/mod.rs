//! Graph matrices, their spectra, and the scalar invariants conjectures compare.

mod eigen;
mod invariants;
mod matrices;

pub use eigen::{eigenvalues, eigenvalues_with, EigenMethod, Spectrum, SymMatrix};
pub use invariants::{
    count_eigenvalues, harmonic, inverse_even, mean_of_neighbor_degree_means,
    positive_eigenvalue_scope, randic_index, spectrum_range, temperature_sum, RangeDefinition,
    Sign,
};
pub use matrices::{adjacency_matrix, distance_matrix, gravity_matrix};
