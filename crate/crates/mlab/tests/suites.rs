//! Suite-level behavior over the catalog: committed non-flatness witnesses,
//! hypothesis gating of the rigidity implications, degradation on invalid
//! specs, and tolerance-override plumbing.
//!
//! The numeric thresholds below are regression floors frozen from a
//! high-resolution direction scan, not tolerances: dropping under one means
//! the geometry lost signal, not precision.

mod common;

use common::{euclid, euclid_aniso3, quartic, randers2, randers3};
use mlab::hypersurfaces::SurfaceSpec;
use mlab::norms::{Family, NormSpec};
use mlab::verify::{
    axioms_suite, brickell_suite, deicke_suite, flatness_scan, parallel_vector_suite,
    theorem1_suite, theorem3_suite, CheckRecord, SamplePlan, TheoremReport, Tolerances, Verdict,
};
use nalgebra::{DMatrix, DVector};

fn find<'a>(report: &'a TheoremReport, name: &str) -> &'a CheckRecord {
    report
        .checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("check {name} missing from suite {}", report.suite))
}

fn default_plan() -> SamplePlan {
    SamplePlan::default()
}

#[test]
fn axioms_pass_across_the_catalog() {
    let tols = Tolerances::default();
    let plan = default_plan();
    for spec in
        [euclid(2), euclid(3), euclid_aniso3(), randers2(), randers3(), quartic(3), quartic(4)]
    {
        let report = axioms_suite(&spec, &plan, &tols).unwrap();
        assert!(report.overall, "{spec} failed the axioms battery");
        let eig = find(&report, "min_metric_eigenvalue");
        assert!(eig.residual > 0.0, "{spec}: metric not positive definite");
    }
}

#[test]
fn invalid_randers_drift_is_reported_not_hidden() {
    // drift > 1 breaks positivity and strong convexity; constructing such a
    // spec takes the unchecked door, and the axioms suite must say so
    let spec = NormSpec::new_unchecked(
        2,
        Family::Randers { a: DMatrix::identity(2, 2), b: DVector::from_column_slice(&[1.5, 0.0]) },
    );
    let report =
        axioms_suite(&spec, &SamplePlan::new(7, 100, 0.5, 2.0).unwrap(), &Tolerances::default())
            .unwrap();
    assert!(!report.overall);
    assert_eq!(find(&report, "positivity").verdict, Verdict::Fail);
    assert!(find(&report, "min_metric_eigenvalue").residual < 0.0);
    assert_eq!(find(&report, "strong_convexity_violation").verdict, Verdict::Fail);
}

#[test]
fn quartic_witnesses_clear_their_committed_floors() {
    let spec = quartic(3);
    let plan = default_plan();
    let tols = Tolerances::default();

    let flat = flatness_scan(&spec, &plan, &tols).unwrap();
    assert!(flat.overall);
    assert!(
        find(&flat, "sup_curvature_cartan").residual > 1e-3,
        "curvature witness lost: {:.3e}",
        find(&flat, "sup_curvature_cartan").residual
    );

    let deicke = deicke_suite(&spec, &plan, &tols).unwrap();
    assert!(deicke.overall);
    assert!(find(&deicke, "sup_mean_cartan").residual > 0.05);
    assert!(find(&deicke, "g_direction_variation").residual > 0.05);

    let e1 = DVector::from_column_slice(&[1.0, 0.0, 0.0]);
    let parallel = parallel_vector_suite(&spec, &e1, &plan, &tols).unwrap();
    assert!(parallel.overall);
    assert!(find(&parallel, "parallel_residual").residual > 0.02);
}

#[test]
fn randers_witnesses_clear_their_committed_floors() {
    let plan = default_plan();
    let tols = Tolerances::default();

    let deicke = deicke_suite(&randers2(), &plan, &tols).unwrap();
    assert!(deicke.overall);
    assert!(find(&deicke, "sup_mean_cartan").residual > 0.1);

    // drifting norms are not absolutely homogeneous — brickell must gate
    let brickell = brickell_suite(&randers3(), &plan, &tols).unwrap();
    assert!(brickell.overall, "vacuous implication still passes");
    let imp = find(&brickell, "brickell_implication");
    assert_eq!(imp.verdict, Verdict::Pass);
    assert!(
        imp.note.as_deref().unwrap_or("").contains("absolute homogeneity"),
        "gate note should name the failed hypothesis: {:?}",
        imp.note
    );
}

#[test]
fn euclidean_rigidity_conclusions_hold_when_hypotheses_do() {
    let plan = default_plan();
    let tols = Tolerances::default();
    let spec = euclid_aniso3();

    let deicke = deicke_suite(&spec, &plan, &tols).unwrap();
    assert!(deicke.overall);
    assert!(find(&deicke, "sup_mean_cartan").residual < 1e-10);
    assert!(find(&deicke, "g_direction_variation").residual < 1e-10);

    let brickell = brickell_suite(&spec, &plan, &tols).unwrap();
    assert!(brickell.overall);
    let imp = find(&brickell, "brickell_implication");
    assert!(
        imp.note.as_deref().unwrap_or("").is_empty()
            || !imp.note.as_deref().unwrap().contains("failed")
    );

    let e1 = DVector::from_column_slice(&[1.0, 0.0, 0.0]);
    let parallel = parallel_vector_suite(&spec, &e1, &plan, &tols).unwrap();
    assert!(parallel.overall);
    assert!(find(&parallel, "parallel_residual").residual < 1e-10);
    assert!(find(&parallel, "obata_b_moment_S1").residual < 1e-6);
}

#[test]
fn theorem3_relation_is_exact_even_where_curvature_varies() {
    let spec = quartic(3);
    let report =
        theorem3_suite(&spec, &[0.5, 1.0, 2.0], &default_plan(), &Tolerances::default()).unwrap();
    assert!(report.overall);
    for r in ["0.5", "1", "2"] {
        let rel = find(&report, &format!("relation_residual_r={r}"));
        assert_eq!(rel.verdict, Verdict::Pass);
        // the sphere curvature genuinely varies — statement (b) must say so
        let dev = find(&report, &format!("constant_curvature_deviation_r={r}"));
        assert!(dev.residual > 1e-4, "expected curvature variation at r={r}");
    }
    assert_eq!(find(&report, "equivalence_consistent").verdict, Verdict::Pass);
}

#[test]
fn theorem1_on_a_translated_indicatrix_measures_without_asserting() {
    let spec = quartic(3);
    let surface =
        SurfaceSpec::translated_indicatrix(DVector::from_column_slice(&[0.3, 0.1, 0.0]), 2.0)
            .unwrap();
    let plan = SamplePlan::new(7, 40, 0.5, 2.0).unwrap();
    let report = theorem1_suite(&spec, &surface, &plan, &Tolerances::default()).unwrap();
    assert!(report.overall, "exploratory surface must not fail the suite");
    for c in &report.checks {
        if c.name != "gradient_fd_norm" {
            continue;
        }
        assert_eq!(c.verdict, Verdict::MeasuredOnly);
        assert!(c.note.as_deref().unwrap_or("").contains("closed-form gradient unavailable"));
    }
    assert!(report.checks.iter().any(|c| c.name == "gradient_fd_norm"));
    assert!(report.checks.iter().all(|c| c.name != "gradient_fd_gap"));
    // umbilicity is a measurement here, whatever its value
    assert_eq!(find(&report, "umbilicity_deviation").verdict, Verdict::MeasuredOnly);
}

#[test]
fn tolerance_overrides_can_fail_an_honest_residual() {
    let spec = quartic(3);
    let mut tols = Tolerances::default();
    tols.set("tol_cross_route", 1e-30).unwrap();
    let report = flatness_scan(&spec, &SamplePlan::new(7, 20, 0.5, 2.0).unwrap(), &tols).unwrap();
    assert!(!report.overall);
    assert_eq!(find(&report, "cross_route_agreement").verdict, Verdict::Fail);

    // unknown names and non-positive budgets are rejected up front
    assert!(Tolerances::default().set("tol_nonsense", 1e-3).is_err());
    assert!(Tolerances::default().set("tol_flat", 0.0).is_err());
    assert!(Tolerances::default().set("tol_flat", -1.0).is_err());
}
