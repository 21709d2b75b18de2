//! Lattice field models: a Klein–Gordon chain with its Heisenberg–Weyl
//! plus time-translation group, and the partial-trace SU(2) sigma model
//! with its local Euclidean group.

mod kg;
mod sigma;

pub use kg::{
    kg_group, kg_group_fields, kg_noether_charge, kg_semi_invariance_residual, kg_time_translate,
    semi_invariance_at, KgAlgebraReport, KgGroup, KgLattice, KgState, Prolongation,
};
pub use sigma::{
    levi_civita, poisson_tensor, rotation, sigma_bracket, sigma_conservation, sigma_evolve,
    sigma_group, sigma_hamiltonian, sigma_jacobi_residual, sigma_local_group_fields,
    sigma_operator_suite, sigma_polarization_check, sigma_rhs, sigma_rhs_crosscheck,
    sigma_step_halving, sigma_theta_noether, Functional, LocalAlgebraReport, OperatorSuite,
    SigmaConservation, SigmaGroup, SigmaLattice, SigmaNoether, SigmaPolarization, SigmaRun,
    SigmaState, StepHalving, Vec3, COCYCLE_ORIENTATION, CROSSCHECK_TOL,
};
