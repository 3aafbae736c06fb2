//! The acceptance gate: one test per criterion, each ending in a printed
//! `criterion N: PASS` ledger line (visible under `--nocapture`; a failing
//! criterion panics with the offending residual instead). Everything runs at
//! seed 7 with 200-sample scans on desk-scale dimensions n ∈ {2, 3, 4}.

mod common;

use common::{euclid, euclid_aniso3, quartic, randers2, randers3};
use mlab::hypersurfaces::{
    induced_sectional, sample_on_surface, second_fundamental_form, tangent_frame, SurfaceSpec,
};
use mlab::norms::NormSpec;
use mlab::tensors::{
    cartan, christoffel, curvature_cartan, curvature_connection, metric, torsion_scaling_residual,
    PointGeometry,
};
use mlab::verify::{
    brickell_suite, deicke_suite, parallel_vector_suite, theorem1_suite, theorem3_suite,
    SamplePlan, TheoremReport, Tolerances, Verdict,
};
use nalgebra::{DMatrix, DVector};
use std::process::Command;

fn plan(count: usize) -> SamplePlan {
    SamplePlan::new(7, count, 0.5, 2.0).unwrap()
}

/// Deterministic pseudo-random SPD matrix: A = MᵀM + ½I with M drawn from a
/// bare LCG, so the criterion needs no extra dependencies.
fn random_spd(n: usize, seed: u64) -> DMatrix<f64> {
    let mut state = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    let m = DMatrix::from_fn(n, n, |_, _| next());
    m.transpose() * &m + DMatrix::identity(n, n) * 0.5
}

fn catalog3() -> Vec<NormSpec> {
    vec![euclid_aniso3(), randers3(), quartic(3)]
}

fn find<'a>(report: &'a TheoremReport, name: &str) -> &'a mlab::verify::CheckRecord {
    report
        .checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("check {name} missing from {}", report.suite))
}

#[test]
fn criterion_01_flat_euclidean_case() {
    for n in [3usize, 4] {
        let spec = NormSpec::euclidean(random_spd(n, 7 + n as u64)).unwrap();
        for y in plan(200).sample_points(n) {
            let c = cartan(&spec, &y).unwrap().c_low.sup_norm();
            let gamma = christoffel(&spec, &y).unwrap().sup_norm();
            let r_fast = curvature_cartan(&spec, &y).unwrap().r.sup_norm();
            let r_slow = curvature_connection(&spec, &y).unwrap().r.sup_norm();
            assert!(c < 1e-8, "n={n}: sup C = {c:.3e}");
            assert!(gamma < 1e-8, "n={n}: sup γ̂ = {gamma:.3e}");
            assert!(r_fast < 1e-8, "n={n}: sup R̂ (torsion route) = {r_fast:.3e}");
            assert!(r_slow < 1e-8, "n={n}: sup R̂ (connection route) = {r_slow:.3e}");
        }
    }
    println!(
        "criterion  1: PASS — euclidean specs are flat through both curvature routes (n = 3, 4)"
    );
}

#[test]
fn criterion_02_connection_equals_scaled_torsion() {
    for spec in catalog3() {
        for y in plan(200).sample_points(3) {
            let geom = PointGeometry::at(&spec, &y).unwrap();
            let res = torsion_scaling_residual(&geom);
            assert!(res < 1e-10, "{spec}: torsion scaling residual {res:.3e}");
        }
    }
    println!("criterion  2: PASS — γ̂ = C♯/F to 1e-10 at every sample, all families");
}

#[test]
fn criterion_03_euler_identities() {
    for spec in catalog3() {
        for y in plan(200).sample_points(3) {
            let geom = PointGeometry::at(&spec, &y).unwrap();
            let f2 = geom.metric.norm_value * geom.metric.norm_value;
            let c_sup = geom.cartan.c_low.sup_norm();
            let gamma_sup = geom.christoffel.sup_norm();
            for i in 0..3 {
                for j in 0..3 {
                    let mut c_ray = 0.0;
                    let mut gamma_ray = 0.0;
                    for k in 0..3 {
                        c_ray += geom.cartan.c_low[(i, j, k)] * y[k];
                        gamma_ray += geom.christoffel[(i, k, j)] * y[k];
                    }
                    assert!(c_ray.abs() < 1e-10 * (1.0 + c_sup));
                    assert!(gamma_ray.abs() < 1e-10 * (1.0 + gamma_sup));
                }
            }
            let gyy = (y.transpose() * &geom.metric.g * &y)[0];
            assert!((gyy - f2).abs() < 1e-10 * f2);

            let g2 = metric(&spec, &(&y * 2.0)).unwrap().g;
            let gap = (&g2 - &geom.metric.g).amax();
            assert!(gap < 1e-10 * (1.0 + geom.metric.g.amax()));
        }
    }
    println!("criterion  3: PASS — Euler identities and degree-0 homogeneity of g hold at 1e-10");
}

#[test]
fn criterion_04_curvature_routes_agree() {
    for spec in [randers3(), quartic(3)] {
        for y in plan(50).sample_points(3) {
            let fast = curvature_cartan(&spec, &y).unwrap();
            let slow = curvature_connection(&spec, &y).unwrap();
            let gap = fast.r.sup_distance(&slow.r);
            let budget = 1e-7 * (1.0 + fast.r.sup_norm());
            assert!(gap < budget, "{spec}: route gap {gap:.3e} > {budget:.3e}");
        }
    }
    println!(
        "criterion  4: PASS — torsion-product and connection-derivative curvatures agree to 1e-7"
    );
}

#[test]
fn criterion_05_sphere_curvature_relation() {
    // n = 3 for every family (one tangent pair per point), plus n = 4 where a
    // frame genuinely has three pairs
    let mut specs = catalog3();
    specs.push(quartic(4));
    let tols = Tolerances::default();
    for spec in specs {
        let report = theorem3_suite(&spec, &[0.5, 1.0, 2.0], &plan(50), &tols).unwrap();
        assert!(report.overall, "{spec}: sphere-relation suite failed");
        for r in ["0.5", "1", "2"] {
            let check = find(&report, &format!("relation_residual_r={r}"));
            assert_eq!(check.verdict, Verdict::Pass);
            assert!(check.residual < 1e-6, "{spec} r={r}: {:.3e}", check.residual);
        }
    }
    println!("criterion  5: PASS — K = K̂ + 1/r² to 1e-6 on S(0.5), S(1), S(2), every family and frame pair");
}

#[test]
fn criterion_06_level_sets_umbilical() {
    for spec in catalog3() {
        for r in [0.5, 1.0, 2.0] {
            let surface = SurfaceSpec::level_set(r).unwrap();
            for y in sample_on_surface(&surface, &spec, &plan(200)).unwrap() {
                let frame = tangent_frame(&surface, &spec, &y).unwrap();
                let shape = second_fundamental_form(&surface, &spec, &frame).unwrap();
                assert!(
                    shape.umbilicity_deviation < 1e-6,
                    "{spec} S({r}): umbilicity {:.3e}",
                    shape.umbilicity_deviation
                );
                assert!(
                    (shape.mean - 1.0 / r).abs() < 1e-6,
                    "{spec} S({r}): H gap {:.3e}",
                    (shape.mean - 1.0 / r).abs()
                );
            }
        }
    }
    // flat ambient ⇒ the induced metric has constant curvature 1/r²
    let spec = euclid(3);
    for r in [0.5, 1.0, 2.0] {
        let surface = SurfaceSpec::level_set(r).unwrap();
        for y in sample_on_surface(&surface, &spec, &plan(50)).unwrap() {
            let frame = tangent_frame(&surface, &spec, &y).unwrap();
            let k = induced_sectional(&surface, &spec, &frame, 0, 1).unwrap();
            assert!((k - 1.0 / (r * r)).abs() < 1e-8, "S({r}): K = {k}");
        }
    }
    println!("criterion  6: PASS — norm spheres are umbilical with H = 1/r; euclidean spheres carry K = 1/r²");
}

#[test]
fn criterion_07_model_case_rigidity_chain() {
    let spec = euclid(3);
    let sphere =
        SurfaceSpec::euclid_sphere(DVector::from_column_slice(&[1.0, 0.0, 0.0]), 2.0).unwrap();
    let report = theorem1_suite(&spec, &sphere, &plan(200), &Tolerances::default()).unwrap();
    assert!(report.overall);
    let bounds = [
        ("umbilicity_deviation", 1e-8),
        ("mean_curvature_variation", 1e-8),
        ("normal_curvature_part", 1e-10),
        ("gradient_fd_gap", 1e-6),
        ("obata_residual", 1e-6),
    ];
    for (name, bound) in bounds {
        let check = find(&report, name);
        assert_eq!(check.verdict, Verdict::Pass, "{name} must be asserted on the model case");
        assert!(check.residual < bound, "{name} = {:.3e} > {bound:.1e}", check.residual);
    }
    println!("criterion  7: PASS — off-center euclidean sphere passes the full rigidity chain (umbilic → H const → Obata)");
}

#[test]
fn criterion_08_parallel_vector_pathway() {
    let tols = Tolerances::default();
    let e1 = DVector::from_column_slice(&[1.0, 0.0, 0.0]);

    let report = parallel_vector_suite(&euclid(3), &e1, &plan(200), &tols).unwrap();
    assert!(report.overall);
    assert!(find(&report, "parallel_residual").residual < 1e-10);
    assert!(find(&report, "obata_b_moment_S1").residual < 1e-6);

    let report = parallel_vector_suite(&quartic(3), &e1, &plan(200), &tols).unwrap();
    assert!(report.overall, "vacuous implication must not fail the suite");
    let res = find(&report, "parallel_residual");
    assert!(res.residual > 0.02, "committed non-parallelism floor: {:.3e}", res.residual);
    let imp = find(&report, "parallel_implication");
    assert_eq!(imp.verdict, Verdict::Pass);
    assert!(
        imp.note.as_deref().unwrap_or("").contains("hypothesis failed"),
        "vacuous pass must be flagged: {:?}",
        imp.note
    );
    println!("criterion  8: PASS — parallel b forces the euclidean Obata witness; quartic b = e₁ gates out as non-parallel");
}

#[test]
fn criterion_09_nonflatness_witnesses_and_implication_consistency() {
    let tols = Tolerances::default();

    let mut sup_r = 0.0f64;
    let mut sup_a = 0.0f64;
    for y in plan(200).sample_points(3) {
        let geom = PointGeometry::at(&quartic(3), &y).unwrap();
        sup_r = sup_r.max(geom.curvature.r.sup_norm());
        sup_a = sup_a.max(geom.cartan.a_mean.amax());
    }
    assert!(sup_r > 1e-3, "curvature witness: {sup_r:.3e}");
    assert!(sup_a > 0.05, "mean-torsion witness: {sup_a:.3e}");

    let mut sup_a2 = 0.0f64;
    for y in plan(200).sample_points(2) {
        let geom = PointGeometry::at(&randers2(), &y).unwrap();
        sup_a2 = sup_a2.max(geom.cartan.a_mean.amax());
    }
    assert!(sup_a2 > 0.1, "plane randers mean-torsion witness: {sup_a2:.3e}");

    // hypothesis/conclusion bookkeeping never contradicts itself on the catalog
    let full_catalog =
        vec![euclid(2), euclid(3), euclid_aniso3(), randers2(), randers3(), quartic(3), quartic(4)];
    for spec in full_catalog {
        let deicke = deicke_suite(&spec, &plan(200), &tols).unwrap();
        assert!(deicke.overall, "{spec}: deicke implication violated");
        if spec.dim() >= 3 {
            let brickell = brickell_suite(&spec, &plan(200), &tols).unwrap();
            assert!(brickell.overall, "{spec}: brickell implication violated");
        }
    }
    println!("criterion  9: PASS — non-flatness witnesses clear their committed floors; no implication violated on the catalog");
}

#[test]
fn criterion_10_determinism_and_exit_codes() {
    let norm = common::fixture("quartic3.json");
    let norm = norm.to_str().unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["all", "--norm", norm, "--count", "200", "--no-timestamp"];
        args.extend_from_slice(extra);
        Command::new(env!("CARGO_BIN_EXE_mlab")).args(&args).output().expect("binary runs")
    };

    let first = run(&["--format", "json"]);
    let second = run(&["--format", "json"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout, "identical inputs must emit identical bytes");

    // a crafted tolerance forces an honest failure → exit 1
    let failing = run(&["--tol", "tol_theorem3=1e-30"]);
    assert_eq!(failing.status.code(), Some(1));

    // spec and usage errors → exit 2
    let usage = Command::new(env!("CARGO_BIN_EXE_mlab"))
        .args(["all", "--norm", "/definitely/not/here.json"])
        .output()
        .expect("binary runs");
    assert_eq!(usage.status.code(), Some(2));

    println!("criterion 10: PASS — byte-identical reports and the 0/1/2 exit contract");
}
