use proptest::prelude::*;

use kcs_core::diagnostics::{dissipation_rate, DiagnosticsSeries, Record};
use kcs_core::grid::{cfl_dt, full_step, GridSolver, PhaseGrid, Reconstruction};
use kcs_core::io::snapshot::{decode_snapshot, encode_snapshot, Snapshot, SnapshotState};
use kcs_core::io::{emit_csv, read_csv};
use kcs_core::model::{eval_kernel, KernelSpec, WeightSpec};
use kcs_core::particle::{dissipation_direct, forces, step_deterministic, ParticleEnsemble};

fn grid_strategy() -> impl Strategy<Value = PhaseGrid<f64>> {
    (4usize..12, 4usize..12).prop_flat_map(|(nx, nv)| {
        prop::collection::vec(0.0f64..1.0, nx * nv)
            .prop_map(move |values| PhaseGrid::from_values(nx, nv, 2.0, 3.0, values, 0.0).unwrap())
    })
}

/// `f` with four empty x-columns added on each side at the same spacing, so
/// one step cannot carry mass to the outflow faces.
fn padded(f: &PhaseGrid<f64>) -> PhaseGrid<f64> {
    const PAD: usize = 4;
    let (nx, nv) = (f.nx(), f.nv());
    let mut values = vec![0.0; PAD * nv];
    values.extend_from_slice(f.values());
    values.extend(std::iter::repeat_n(0.0, PAD * nv));
    let lx = f.lx() * (nx + 2 * PAD) as f64 / nx as f64;
    PhaseGrid::from_values(nx + 2 * PAD, nv, lx, f.lv(), values, 0.0).unwrap()
}

fn kernel_strategy() -> impl Strategy<Value = KernelSpec<f64>> {
    prop_oneof![
        (0.05f64..=1.0).prop_map(|c| KernelSpec::constant(c).unwrap()),
        (0.05f64..=1.0).prop_map(|b| KernelSpec::algebraic(b).unwrap()),
    ]
}

fn ensemble_strategy() -> impl Strategy<Value = ParticleEnsemble<f64>> {
    (2usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(-3.0f64..3.0, n),
            prop::collection::vec(-2.0f64..2.0, n),
            0.1f64..3.0,
        )
            .prop_map(|(x, v, m)| ParticleEnsemble::from_1d(x, v, m).unwrap())
    })
}

fn brute_dissipation(f: &PhaseGrid<f64>, k: &KernelSpec<f64>) -> f64 {
    let xs = f.x_axis().centers();
    let vs = f.v_axis().centers();
    let mut s = 0.0;
    for (j, &x) in xs.iter().enumerate() {
        for (a, &v) in vs.iter().enumerate() {
            for (jj, &y) in xs.iter().enumerate() {
                for (b, &w) in vs.iter().enumerate() {
                    s += k.phi((x - y).abs()) * f.get(j, a) * f.get(jj, b) * (v - w).powi(2);
                }
            }
        }
    }
    s * f.cell_area().powi(2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_step_keeps_mass_and_sign(
        f in grid_strategy(),
        k in kernel_strategy(),
        sigma in 0.0f64..1.0,
        frac in 0.05f64..1.0,
        muscl in any::<bool>(),
    ) {
        let dt = frac * cfl_dt(f.nx(), f.nv(), f.lx(), f.lv(), f.mass(), &k, 1.0);
        let mut solver = GridSolver::new(k, sigma, dt);
        if muscl {
            solver.reconstruction = Reconstruction::Muscl;
        }
        let g = solver.step(&f).unwrap();
        // Nothing flows in through the x-faces; some may leave.
        prop_assert!(g.mass() <= f.mass() * (1.0 + 1e-12));
        prop_assert!(g.min_value() >= -1e-14 * f.max_value());
        let h = padded(&f);
        if h.mass() > 0.0 {
            let g = solver.step(&h).unwrap();
            prop_assert!((g.mass() - h.mass()).abs() <= 1e-12 * h.mass());
        }
    }

    #[test]
    fn dissipation_matches_pair_sum(f in grid_strategy(), k in kernel_strategy()) {
        let d = dissipation_rate(&f, &k).unwrap();
        let oracle = brute_dissipation(&f, &k);
        prop_assert!(d >= 0.0);
        prop_assert!((d - oracle).abs() <= 1e-12 * oracle.max(1e-300));
    }

    #[test]
    fn forces_conserve_momentum(e in ensemble_strategy(), k in kernel_strategy()) {
        let f = forces(&e, &k);
        let total: f64 = f.iter().sum();
        let scale: f64 = f.iter().map(|x| x.abs()).sum::<f64>().max(1e-300);
        prop_assert!(total.abs() <= 1e-12 * scale);
    }

    #[test]
    fn particle_dissipation_is_nonnegative(e in ensemble_strategy(), k in kernel_strategy()) {
        prop_assert!(dissipation_direct(&e, &k) >= 0.0);
    }

    #[test]
    fn rk4_contracts_velocities(e in ensemble_strategy(), k in kernel_strategy()) {
        let mut cur = e.clone();
        let p0: f64 = e.velocities().iter().sum();
        for _ in 0..20 {
            let next = step_deterministic(&cur, &k, 1e-2).unwrap();
            prop_assert!(next.velocity_diameter() <= cur.velocity_diameter() + 1e-12);
            cur = next;
        }
        let p1: f64 = cur.velocities().iter().sum();
        prop_assert!((p1 - p0).abs() <= 1e-11 * e.len() as f64);
    }

    #[test]
    fn kernel_bounds_hold(beta in 0.01f64..=1.0, r in 0.0f64..100.0) {
        let k = KernelSpec::algebraic(beta).unwrap();
        let phi = eval_kernel(&k, r).unwrap();
        prop_assert!(phi > 0.0 && phi <= 1.0);
        prop_assert!(k.dphi(r).abs() <= 1.0 && k.ddphi(r).abs() <= 1.0);
    }

    #[test]
    fn weights_dominate_one(alpha in 3.01f64..8.0, x in -5.0f64..5.0, v in -5.0f64..5.0) {
        let w = WeightSpec::new(alpha).unwrap();
        prop_assert!(w.omega(x * x, v * v) >= 1.0);
        prop_assert!(w.nu(v * v) >= 1.0);
    }

    #[test]
    fn snapshot_round_trips(f in grid_strategy(), t in 0.0f64..10.0, sigma in 0.0f64..1.0) {
        let mut f = f;
        f.set_t(t);
        let bytes = encode_snapshot(&Snapshot::grid(f.clone(), sigma));
        let back = decode_snapshot(&bytes).unwrap();
        prop_assert_eq!(back.sigma.to_bits(), sigma.to_bits());
        match back.state {
            SnapshotState::Grid(g) => {
                prop_assert_eq!(g.t().to_bits(), t.to_bits());
                prop_assert!(g.values().iter().zip(f.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
            }
            SnapshotState::Particles(_) => prop_assert!(false, "decoded as particles"),
        }
        prop_assert!(decode_snapshot(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn csv_round_trips(rows in prop::collection::vec((-1e6f64..1e6, 0.0f64..1e3), 1..20)) {
        let series: DiagnosticsSeries<f64> = rows
            .iter()
            .enumerate()
            .map(|(i, &(e, r))| {
                let mut rec = Record::empty(i as f64 * 0.1);
                rec.energy = e;
                rec.support_radius = r;
                rec.mass = 1.0 / (1.0 + i as f64);
                rec
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        emit_csv(&series, &path).unwrap();
        let back = read_csv(&path).unwrap();
        prop_assert_eq!(back.len(), 1);
        prop_assert_eq!(&back[0], &series);
    }
}

#[test]
fn full_step_defaults_match_solver() {
    let f = PhaseGrid::from_values(6, 6, 1.0, 2.0, (0..36).map(|i| (i % 7) as f64).collect(), 0.0).unwrap();
    let k = KernelSpec::default();
    let a = full_step(&f, &k, 0.2, 1e-3).unwrap();
    let b = GridSolver::new(k, 0.2, 1e-3).step(&f).unwrap();
    assert_eq!(a, b);
}
