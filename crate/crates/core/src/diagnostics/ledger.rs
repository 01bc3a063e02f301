use serde::Serialize;

use crate::diagnostics::series::DiagnosticsSeries;
use crate::scalar::Real;

/// Trapezoidal `∫ D` at the series' output times.
pub fn integrated_dissipation<T: Real>(series: &DiagnosticsSeries<T>) -> Vec<T> {
    let recs = series.records();
    let mut out = Vec::with_capacity(recs.len());
    let mut acc = T::zero();
    for (i, r) in recs.iter().enumerate() {
        if i > 0 {
            let p = &recs[i - 1];
            acc += (r.t - p.t) * (r.dissipation_rate + p.dissipation_rate) / T::lit(2.0);
        }
        out.push(acc);
    }
    out
}

/// `E(t) + ∫₀ᵗ D - E(0) - 2 d σ M (t - t₀)` at each output time.
pub fn energy_ledger<T: Real>(series: &DiagnosticsSeries<T>, sigma: T, d: usize, mass: T) -> Vec<(T, T)> {
    let Some(first) = series.first() else {
        return Vec::new();
    };
    let (t0, e0) = (first.t, first.energy);
    let source = T::lit(2.0) * T::from_count(d) * sigma * mass;
    series
        .records()
        .iter()
        .zip(integrated_dissipation(series))
        .map(|(r, int_d)| (r.t, r.energy + int_d - e0 - source * (r.t - t0)))
        .collect()
}

/// Same ledger using the solver-accumulated `cumulative_dissipation` column
/// (trapezoid over every step rather than every output).
pub fn energy_ledger_cumulative<T: Real>(
    series: &DiagnosticsSeries<T>,
    sigma: T,
    d: usize,
    mass: T,
) -> Vec<(T, T)> {
    let Some(first) = series.first() else {
        return Vec::new();
    };
    let (t0, e0, c0) = (first.t, first.energy, first.cumulative_dissipation);
    let source = T::lit(2.0) * T::from_count(d) * sigma * mass;
    series
        .records()
        .iter()
        .map(|r| (r.t, r.energy + (r.cumulative_dissipation - c0) - e0 - source * (r.t - t0)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportCheck {
    pub passed: bool,
    /// `min_t (R₀ + M R₀ t + tol - R(t))`; negative when violated.
    pub worst_margin: f64,
    /// First `(t, R(t))` above the bound.
    pub violation: Option<(f64, f64)>,
}

/// Checks `R(t) ≤ R₀ + M R₀ t + tol_geom` at every output time.
pub fn support_bound_check<T: Real>(series: &DiagnosticsSeries<T>, r0: T, mass: T, tol_geom: T) -> SupportCheck {
    let mut worst = f64::INFINITY;
    let mut violation = None;
    let t0 = series.first().map(|r| r.t).unwrap_or(T::zero());
    for r in series.records() {
        let bound = r0 + mass * r0 * (r.t - t0) + tol_geom;
        let margin = (bound - r.support_radius).as_f64();
        worst = worst.min(margin);
        if margin < 0.0 && violation.is_none() {
            violation = Some((r.t.as_f64(), r.support_radius.as_f64()));
        }
    }
    SupportCheck {
        passed: violation.is_none(),
        worst_margin: worst,
        violation,
    }
}

/// Finite-difference `d/dt log ‖(1+v²)^{1/2} f‖_{L¹}` between consecutive outputs.
pub fn weighted_l1_growth_rates<T: Real>(series: &DiagnosticsSeries<T>) -> Vec<(T, T)> {
    series
        .records()
        .windows(2)
        .map(|w| {
            let dt = w[1].t - w[0].t;
            (w[1].t, (w[1].l1_v.ln() - w[0].l1_v.ln()) / dt)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::series::Record;

    fn series(points: &[(f64, f64, f64, f64)]) -> DiagnosticsSeries<f64> {
        points
            .iter()
            .map(|&(t, e, d, r)| {
                let mut rec = Record::empty(t);
                rec.energy = e;
                rec.dissipation_rate = d;
                rec.support_radius = r;
                rec
            })
            .collect()
    }

    #[test]
    fn stationary_state_has_zero_residual() {
        let s = series(&[(0.0, 2.0, 0.0, 1.0), (0.5, 2.0, 0.0, 1.0), (1.0, 2.0, 0.0, 1.0)]);
        assert!(energy_ledger(&s, 0.0, 1, 1.0).iter().all(|&(_, r)| r == 0.0));
    }

    #[test]
    fn exact_exponential_decay_closes_at_second_order() {
        // E = e^{-2t}, D = 2 e^{-2t}
        let run = |n: usize| {
            let pts: Vec<_> = (0..=n)
                .map(|i| {
                    let t = i as f64 / n as f64;
                    (t, (-2.0 * t).exp(), 2.0 * (-2.0 * t).exp(), 1.0)
                })
                .collect();
            energy_ledger(&series(&pts), 0.0, 1, 1.0).last().unwrap().1.abs()
        };
        let ratio = run(50) / run(100);
        assert!((ratio - 4.0).abs() < 0.05);
    }

    #[test]
    fn noise_source() {
        let s = series(&[(0.0, 1.0, 0.0, 0.0), (1.0, 1.2, 0.0, 0.0)]);
        let last = energy_ledger(&s, 0.1, 1, 1.0)[1].1;
        assert!(last.abs() < 1e-15);
    }

    #[test]
    fn support_checks() {
        let rigid = series(&[(0.0, 0.0, 0.0, 0.5), (1.0, 0.0, 0.0, 0.5), (2.0, 0.0, 0.0, 0.5)]);
        assert!(support_bound_check(&rigid, 0.5, 1.0, 0.0).passed);

        let beams = series(&[(0.0, 0.0, 0.0, 1.0), (1.0, 0.0, 0.0, 0.9), (2.0, 0.0, 0.0, 0.8)]);
        let c = support_bound_check(&beams, 1.0, 1.0, 0.0);
        assert!(c.passed);
        assert_eq!(c.worst_margin, 0.0);

        let bad = series(&[(0.0, 0.0, 0.0, 1.0), (1.0, 0.0, 0.0, 3.0)]);
        let c = support_bound_check(&bad, 1.0, 1.0, 0.0);
        assert!(!c.passed);
        assert_eq!(c.violation, Some((1.0, 3.0)));
    }
}
