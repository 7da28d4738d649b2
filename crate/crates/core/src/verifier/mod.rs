//! Reflection Gram forms `M_ab = ω(Θ(A_a)∘A_b)` and the coupling criteria on
//! the Hamiltonian side.

mod coupling;
pub mod ensembles;
mod gram;

pub use coupling::{
    circulant_coupling, coupling_decomposition, ladder_verdict, sft_positivity,
    CouplingDecomposition, CrossTerm, SftReport,
};
pub use gram::{gram, null_basis, plus_basis, BasisLabel, GramReport, DEFAULT_TOL};
