//! Conservative finite-volume solver on the truncated 1-D × 1-D phase space.

mod init;
mod phase;
mod sample;
mod step;
mod substeps;

pub use init::{auto_lv, auto_lx, cos_bump, init_grid, lv_for_radius, Profile, GAUSSIAN_EXTENT};
pub use phase::PhaseGrid;
pub use sample::sample_density;
pub use step::{cfl_dt, full_step, GridSolver};
pub use substeps::{
    substep_diffuse_v, substep_diffuse_v_with, substep_drift_v, substep_drift_v_with,
    substep_transport_x, substep_transport_x_with, DiffusionScheme, Reconstruction,
};
