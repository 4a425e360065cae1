use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("invalid configuration: {field}: {reason}")]
    Config { field: String, reason: String },

    #[error("point {0:?} is the singular point of the conformal map")]
    SingularPoint(Vec<f64>),

    #[error("ghost values not populated ({0})")]
    GhostsUnpopulated(&'static str),

    #[error("expected {expected} nodal values, got {got}")]
    Length { expected: usize, got: usize },

    #[error("non-finite value at node {node} (t = {t})")]
    NonFinite { node: usize, t: f64 },

    #[error("star-shapedness lost at node {node} (t = {t}): support {support}")]
    StarShapedness { node: usize, t: f64, support: f64 },

    #[error("time step {dt} fell below the floor {floor} at t = {t}")]
    TimeStepFloor { dt: f64, floor: f64, t: f64 },

    #[error("profile not positive at beta = {beta}")]
    NonPositiveProfile { beta: f64 },

    #[error("fitted cap center off the axis by {offset}")]
    OffAxis { offset: f64 },

    #[error("volume {volume} outside the attainable range (0, {max})")]
    VolumeOutOfRange { volume: f64, max: f64 },

    #[error("volume not monotone in the cap radius near R = {radius}")]
    NonMonotone { radius: f64 },

    #[error("enclosed volume {volume} outside (0, {max}): normal orientation is inconsistent")]
    Orientation { volume: f64, max: f64 },
}

impl FlowError {
    pub fn config(field: &str, reason: impl Into<String>) -> Self {
        FlowError::Config {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = FlowError> = std::result::Result<T, E>;
