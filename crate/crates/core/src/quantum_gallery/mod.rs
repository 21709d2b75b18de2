//! Finite-dimensional quantum checks: the Galilei particle on a `(t, v)`
//! grid, the SU(2) particle phase space and its SO(3,2) generators, and
//! eigenfunctions of the anti-de Sitter wave operator.

mod ads;
mod galilei;
mod su2;

pub use ads::{
    ads_box_apply, ads_eigen_consistency, ads_radial, ads_sample_points, ads_wavefunction,
    hyp2f1_terminating, parse_states, spherical_harmonic, AdsParams, BoxReading, BoxValue,
    EigenReport, EigenStats, StateReport, EIGEN_SPREAD_TOL,
};
pub use galilei::{
    galilei_operator_suite, galilei_polarization_residual, gaussian_solution, standard_grid,
    GridSection, OperatorResidual, PolarizationResidual,
};
pub use su2::{
    ads_generators, bracket_gradient, bracket_of_jets, bracket_table_check,
    canonical_poisson_bracket, generator_jets, hamiltonian_bracket_residuals, hamiltonian_jet,
    sample_phase_points, so32_relations, su2_hamiltonian, su2_inverse_metric, su2_metric,
    AdsGenerators, PhaseFn, PhasePoint, Relation, GENERATOR_NAMES,
};
