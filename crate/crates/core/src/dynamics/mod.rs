//! Classical motion: characteristic flows of a group, charged particles in
//! external potentials, the weak-field geodesic force, and the conservation
//! of Noether invariants along trajectories.

mod external;
mod flow;

pub use external::{
    em_acceleration, em_equations_of_motion, gem_equivalence_check, gravity_acceleration,
    gravity_equations_of_motion, gyration_period, FieldConfig, FieldKind, GemConvention, GemReport,
    GEM_TOL, SPACETIME,
};
pub use flow::{
    characteristic_direction, conservation_report, flow_characteristic, noether_series,
    ConservationReport,
};

/// Default integration step.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Default integration horizon.
pub const DEFAULT_T_FINAL: f64 = 1.0;
