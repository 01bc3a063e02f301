use kcs_core::experiments::{run_cross_validation, Scenario, StudyKind, StudySpec};
use kcs_core::model::KernelSpec;

#[test]
fn rigid_flock_agrees_exactly() {
    let s = Scenario::<f64>::builtin("rigid_flock").unwrap();
    let mut spec = StudySpec::new(
        StudyKind::CrossValidate {
            n_list: vec![500],
            resolutions: vec![128],
        },
        "rigid_flock",
    );
    spec.t_final = Some(1.0);
    let rep = run_cross_validation(&s, &spec).unwrap();
    let row = rep.rows[0];
    assert!(row.mass <= 1e-10 && row.momentum <= 1e-10 && row.energy <= 1e-10, "{row:?}");
    assert!(row.histogram <= 1e-10, "{row:?}");
}

#[test]
fn discrepancy_shrinks_under_joint_refinement() {
    let mut s = Scenario::<f64>::builtin("two_beam").unwrap();
    s.kernel = KernelSpec::constant(1.0).unwrap();
    let mut spec = StudySpec::new(
        StudyKind::CrossValidate {
            n_list: vec![1000, 8000, 64_000],
            resolutions: vec![32, 64, 128],
        },
        "two_beam",
    );
    spec.t_final = Some(0.5);
    spec.cadence = 50;
    let rep = run_cross_validation(&s, &spec).unwrap();
    let hist: Vec<f64> = rep.rows.iter().map(|r| r.histogram).collect();
    assert!(hist.windows(2).all(|w| w[1] < w[0]), "{hist:?}");
    let moments = rep.moment_discrepancies();
    assert!(moments[2] < moments[0], "{moments:?}");
    assert!(moments[2] < 0.02, "{moments:?}");
}

#[test]
fn two_beam_energy_curves_agree() {
    let mut s = Scenario::<f64>::builtin("two_beam").unwrap();
    s.kernel = KernelSpec::constant(1.0).unwrap();
    let mut spec = StudySpec::new(
        StudyKind::CrossValidate {
            n_list: vec![100_000],
            resolutions: vec![128],
        },
        "two_beam",
    );
    spec.cadence = 50;
    let rep = run_cross_validation(&s, &spec).unwrap();
    assert_eq!(rep.t_final, 2.0);
    assert!(rep.rows[0].energy <= 0.05, "{:?}", rep.rows[0]);
}
