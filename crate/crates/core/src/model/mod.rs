//! Model definition: interaction kernels, run parameters, tail weights and
//! the alignment fields.

pub mod fields;
pub mod kernel;
pub mod params;
pub mod weights;

pub use fields::{alignment_field_grid, alignment_field_grid_with, eval_l, FieldMethod, FieldPair};
pub use kernel::{eval_kernel, validate_kernel_bounds, KernelBounds, KernelSpec, KernelVariant};
pub use params::{SimParams, MAX_DIM};
pub use weights::{eval_weights, WeightSpec};
