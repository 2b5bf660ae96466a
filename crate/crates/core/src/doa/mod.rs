//! Off-grid direction-of-arrival models.
//!
//! A [`Grid`] discretizes the parameter range; [`taylor_model`] turns an
//! array response and its derivative into the `(A, B)` pair of the mismatch
//! model; [`merge_targets`] fuses detections that share a grid interval.
//! Two sensing models are provided: the covariance of a nested linear array
//! ([`nested_array_model`]) and a compressive MIMO radar ([`mimo_model`]).

mod grid;
mod merge;
mod metrics;
mod mimo;
mod nested;
mod scene;
mod taylor;

pub use grid::{make_grid, Grid};
pub use merge::{detections_from_solution, merge_targets, Detection, DETECTION_THRESHOLD};
pub use metrics::doa_error;
pub use mimo::{mimo_model, receiver_noise, MimoConfig, MimoRadar};
pub use nested::{nested_array_model, NestedArray, NestedArrayConfig};
pub use scene::{draw_separated, DoaScene};
pub use taylor::{fd_relative_error, taylor_model, FD_STEP, FD_TOLERANCE};
