//! Volume-preserving capillary curvature flow of axisymmetric hypersurfaces in
//! the unit ball, computed as a scalar parabolic problem for radial graphs
//! over the upper hemisphere of the conformally equivalent half-space.
//!
//! Everything is generic over [`Real`]; the aliases at the crate root fix `f64`.

pub mod caps;
pub mod conformal;
pub mod diagnostics;
pub mod error;
pub mod flow;
pub mod graph;
pub mod grid;
pub mod scalar;

pub use caps::{
    cap_matching_volume, cap_profile, cap_volume, is_static, SphericalCap, CAP_VOLUME_RESOLUTION,
};
pub use conformal::{
    ball_to_half, conformal_factor, exp_w, half_to_ball, push_half_to_ball, w_scalar, x_a_field,
    BallPoint, HalfSpacePoint,
};
pub use diagnostics::{
    area_and_wetting, bc_residual, boundary_geometry, enclosed_volume, enclosed_volume_oriented,
    energy, energy_rate, first_variation_check, minkowski_residual, prop21_residual,
    prop22_residual, record, sup_v, umbilicity_deficit, BoundaryGeometry, DiagnosticsRecord,
    FirstVariation,
};
pub use error::{FlowError, Result};
pub use flow::{
    apply_boundary, flow_velocity, gradient_regime_threshold, pole_symmetry, rhs_coefficient_form,
    rhs_divergence_form, run, stable_time_step, step, step_by, volume_multiplier, FlowConfig,
    FlowState, InitialProfile, RunOutput, Sample, Termination, DT_FLOOR,
};
pub use graph::{
    ball_curvatures, contact_cos, contact_cot, geometry_fields, half_space_curvatures,
    support_and_speed_terms, Curvatures, GeometryFields, RadialGraph, SpeedTerms,
};
pub use grid::{ball_volume, sin_power_integral, sphere_measure, AxisymmetricGrid, GhostedValues};
pub use scalar::Real;

pub type Grid = AxisymmetricGrid<f64>;
pub type Graph = RadialGraph<f64>;
pub type Config = FlowConfig<f64>;
pub type Cap = SphericalCap<f64>;
pub type Record = DiagnosticsRecord<f64>;
pub type Output = RunOutput<f64>;
