//! Invariant vector fields, structure constants, the quantization form and
//! everything derived from them, for any [`LieGroup`](crate::group_model::LieGroup).

mod analysis;
mod fields;
mod invariance;
mod param_table;
pub mod poly;
mod structure;
mod theta;

pub use analysis::{
    characteristic_kernel, characteristic_kernel_frozen, classify_parameters, noether_invariant,
    noether_invariants, ClassificationReport, PAIRING_TOL,
};
pub use fields::{
    bracket_components, commutator_field, field_frame, left_field, right_field, FieldFrame,
    FieldKind, VectorField,
};
pub use invariance::{invariance_at, invariance_suite, InvarianceReport, PointResiduals};
pub use param_table::{
    equivalence_check, parse_param_table, EquivalenceReport, ParamJacobiEntry, ParamStructureTable,
    GRAVITY_CONTRACTED_TABLE, GRAVITY_FULL_TABLE,
};
pub use poly::Poly;
pub use structure::{
    closure_residual, structure_constants, table_at_identity, JacobiEntry, StructureTable,
    CLOSURE_TOL,
};
pub use theta::{coframe, dtheta, theta, theta_and_dtheta, CoframeJet};
