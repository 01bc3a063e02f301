//! Mean-field particle solver: RK4 for the noiseless system, Euler–Maruyama
//! with velocity noise of amplitude `sqrt(2σ)` otherwise, and a standalone
//! characteristic integrator.

mod characteristic;
mod ensemble;
mod force;
mod integrate;
pub mod rng;

pub use characteristic::{
    density_along_characteristic, solve_characteristic, CharacteristicState, ConstantFields,
    FieldHistory, FieldProvider,
};
pub use ensemble::{empirical_moments, sample_from_grid, Moments, ParticleEnsemble};
pub use force::{dissipation_direct, dissipation_from_forces, forces, forces_direct, pairwise_force};
pub use integrate::{step_deterministic, step_deterministic_with, step_stochastic, step_stochastic_with};
pub use rng::NoiseStream;
