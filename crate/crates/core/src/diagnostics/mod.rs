//! Norms, moments, dissipation and the residuals of the energy and support
//! identities, for either solver's state.

mod dissipation;
mod ledger;
mod norms;
mod series;

pub use dissipation::dissipation_rate;
pub use ledger::{
    energy_ledger, energy_ledger_cumulative, integrated_dissipation, support_bound_check,
    weighted_l1_growth_rates, SupportCheck,
};
pub use norms::{
    grid_norms, grid_record, grid_support_radius, pairwise_distance, Distances, NormSet,
    SUPPORT_THRESHOLD,
};
pub use series::{DiagnosticsSeries, Record};

use crate::particle::{empirical_moments, ParticleEnsemble};
use crate::scalar::Real;

/// Moment-level record of an ensemble; `dissipation` is supplied by the caller.
pub fn particle_record<T: Real>(e: &ParticleEnsemble<T>, dissipation: T) -> Record<T> {
    let m = empirical_moments(e);
    let mut r = Record::empty(e.t());
    r.mass = m.mass;
    for (dst, &p) in r.momentum.iter_mut().zip(&m.momentum) {
        *dst = p;
    }
    r.energy = m.energy;
    r.dissipation_rate = dissipation;
    r.support_radius = m.support_radius;
    r.l1 = m.mass;
    let w = e.weight();
    r.l1_v = (0..e.len())
        .map(|i| {
            let v2: T = e.velocity(i).iter().map(|&c| c * c).sum();
            (T::one() + v2).sqrt()
        })
        .sum::<T>()
        * w;
    r
}
