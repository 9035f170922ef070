//! Property tests for the structural invariants of the library.

use std::sync::OnceLock;

use homoconn::connection_families::{
    basis_map, family_alpha, levi_civita, named_connection, skew_family, FamilyParams, MapName, NamedConnection, SphereClass,
};
use homoconn::invariant_solver::{
    combination, dimension_row, equivariance_residual, invariant_bilinear_basis, metric_subspace, skew_torsion_subspace, BilinearMap,
    MapSpace,
};
use homoconn::lie_core::{bracket_m, reductive_split, MVector, ReductiveSplit};
use homoconn::nomizu_calculus::{curvature, curvature_invariants, levi_civita_from_brackets, torsion, torsion_form};
use homoconn::report_cli::{cmd_connection, connection_report, render, ConnectionSpec, OutputFormat, Report, RunConfig};
use homoconn::verify;
use num_complex::Complex64;
use proptest::prelude::*;

fn split(n: usize) -> &'static ReductiveSplit {
    static SPLITS: OnceLock<Vec<ReductiveSplit>> = OnceLock::new();
    &SPLITS.get_or_init(|| (1..=5).map(|n| reductive_split(n).unwrap()).collect())[n - 1]
}

fn invariant_space(n: usize) -> &'static MapSpace {
    static SPACES: OnceLock<Vec<MapSpace>> = OnceLock::new();
    &SPACES.get_or_init(|| (2..=4).map(|n| invariant_bilinear_basis(split(n))).collect())[n - 2]
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, 2 * n + 1)
}

fn class_and_n() -> impl Strategy<Value = (SphereClass, usize)> {
    prop_oneof![
        Just((SphereClass::S3, 1)),
        Just((SphereClass::S5, 2)),
        Just((SphereClass::S7, 3)),
        Just((SphereClass::GeneralN, 4)),
        Just((SphereClass::GeneralN, 5)),
    ]
}

fn matrix_jacobi(x: &MVector, y: &MVector, z: &MVector) -> f64 {
    let (a, b, c) = (x.to_matrix(), y.to_matrix(), z.to_matrix());
    let br = |p: &nalgebra::DMatrix<Complex64>, q: &nalgebra::DMatrix<Complex64>| p * q - q * p;
    let sum = br(&br(&a, &b), &c) + br(&br(&b, &c), &a) + br(&br(&c, &a), &b);
    sum.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bracket_is_antisymmetric((n, x, y) in (1usize..=5).prop_flat_map(|n| (Just(n), coords(n), coords(n)))) {
        let sp = split(n);
        let (xv, yv) = (MVector::from_coords(&x).unwrap(), MVector::from_coords(&y).unwrap());
        let (m1, h1) = bracket_m(sp, &xv, &yv).unwrap();
        let (m2, h2) = bracket_m(sp, &yv, &xv).unwrap();
        let neg: Vec<f64> = m2.coords().iter().map(|v| -v).collect();
        prop_assert!(max_dev(&m1.coords(), &neg) < 1e-12);
        let hneg: Vec<f64> = h2.iter().map(|v| -v).collect();
        prop_assert!(max_dev(&h1, &hneg) < 1e-12);
    }

    #[test]
    fn commutator_satisfies_jacobi((n, x, y, z) in (1usize..=5).prop_flat_map(|n| (Just(n), coords(n), coords(n), coords(n)))) {
        let v = |c: &[f64]| MVector::from_coords(c).unwrap();
        let _ = n;
        prop_assert!(matrix_jacobi(&v(&x), &v(&y), &v(&z)) < 1e-11);
    }

    #[test]
    fn m_bracket_matches_closed_form((n, x, y) in (2usize..=5).prop_flat_map(|n| (Just(n), coords(n), coords(n)))) {
        let sp = split(n);
        let c = (n as f64 + 1.0) / n as f64;
        let a1 = basis_map(MapName::Alpha1, sp).unwrap();
        let b1 = basis_map(MapName::Beta1, sp).unwrap();
        let g1 = basis_map(MapName::Gamma1, sp).unwrap();
        let closed = combination(&[&a1, &b1, &g1], &[c, -c, -2.0]);
        let (m, _) = bracket_m(sp, &MVector::from_coords(&x).unwrap(), &MVector::from_coords(&y).unwrap()).unwrap();
        prop_assert!(max_dev(&closed.eval(&x, &y), &m.coords()) < 1e-11);
        let tensor = BilinearMap { coeffs: sp.bracket_mm_m.clone() };
        prop_assert!((&tensor - &closed).max_abs() < 1e-12);
    }

    #[test]
    fn closed_form_combinations_are_invariant((n, c) in (2usize..=4).prop_flat_map(|n| {
        let k = MapName::closed_form_basis(n).len();
        (Just(n), prop::collection::vec(-3.0..3.0f64, k))
    })) {
        let sp = split(n);
        let maps: Vec<BilinearMap> = MapName::closed_form_basis(n).into_iter().map(|m| basis_map(m, sp).unwrap()).collect();
        let refs: Vec<&BilinearMap> = maps.iter().collect();
        let alpha = combination(&refs, &c);
        prop_assert!(equivariance_residual(sp, &alpha) < 1e-10);
        prop_assert!(invariant_space(n).projection_residual(&alpha) < 1e-9);
    }

    #[test]
    fn metric_family_is_metric(n in 4usize..=5, re in -3.0..3.0f64, im in -3.0..3.0f64, t in -3.0..3.0f64) {
        let sp = split(n);
        let alpha = family_alpha(&FamilyParams::GeneralMetric { q: Complex64::new(re, im), t }, sp).unwrap();
        prop_assert!(alpha.metric_residual(&sp.gram) < 1e-10);
        prop_assert!(equivariance_residual(sp, &alpha) < 1e-10);
    }

    #[test]
    fn metric_family_in_solved_metric_space(re in -3.0..3.0f64, im in -3.0..3.0f64, t in -3.0..3.0f64) {
        let sp = split(4);
        let metric = metric_subspace(invariant_space(4), sp);
        prop_assert_eq!(metric.dim(), 3);
        let alpha = family_alpha(&FamilyParams::GeneralMetric { q: Complex64::new(re, im), t }, sp).unwrap();
        prop_assert!(metric.projection_residual(&alpha) < 1e-9);
    }

    #[test]
    fn skew_family_in_solved_skew_space(n in 2usize..=4, r in -3.0..3.0f64, re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let sp = split(n);
        let class = SphereClass::for_n(n);
        let q = class.has_q().then(|| Complex64::new(re, im));
        let lc = levi_civita(sp).unwrap();
        let skew = skew_torsion_subspace(&metric_subspace(invariant_space(n), sp), sp, &lc).unwrap();
        let alpha = skew_family(class, r, q, sp).unwrap();
        prop_assert!(skew.projection_residual(&(&alpha - &lc)) < 1e-9);
        prop_assert!(curvature_invariants(sp, &alpha).is_skew_torsion);
    }

    #[test]
    fn curvature_antisymmetric_in_first_pair(n in 1usize..=4, seed in any::<u64>()) {
        let sp = split(n);
        let maps: Vec<BilinearMap> = invariant_space_or_lc(n);
        let mut rng = homoconn::sampling::rng(seed);
        let c = homoconn::sampling::real_vector(&mut rng, maps.len());
        let refs: Vec<&BilinearMap> = maps.iter().collect();
        let alpha = combination(&refs, &c);
        prop_assert!(curvature(sp, &alpha).first_pair_asymmetry() < 1e-10);
    }

    #[test]
    fn sym_ricci_routes_agree((class, n) in class_and_n(), r in -2.0..2.0f64, re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let sp = split(n);
        let q = class.has_q().then(|| Complex64::new(re, im));
        let rep = curvature_invariants(sp, &skew_family(class, r, q, sp).unwrap());
        prop_assert!(rep.route_gap < 1e-8, "route gap {}", rep.route_gap);
        prop_assert!(rep.torsion_norm_sq >= 0.0);
        let trace: f64 = (0..rep.dim).map(|i| rep.ricci[(i, i)]).sum();
        prop_assert!((trace - rep.scalar).abs() < 1e-10);
        prop_assert!((&rep.sym_ricci - rep.sym_ricci.transpose()).amax() < 1e-14);
    }

    #[test]
    fn generic_metric_family_is_not_skew(n in 4usize..=5, re in -2.0..2.0f64, im in 0.1..2.0f64, t in -2.0..2.0f64) {
        let sp = split(n);
        let alpha = family_alpha(&FamilyParams::GeneralMetric { q: Complex64::new(re, im), t }, sp).unwrap();
        let rep = curvature_invariants(sp, &alpha);
        prop_assert!(rep.is_metric);
        prop_assert!(!rep.is_skew_torsion);
    }

    #[test]
    fn canonical_connection_torsion_and_curvature((n, x, y, z) in (2usize..=4).prop_flat_map(|n| (Just(n), coords(n), coords(n), coords(n)))) {
        let sp = split(n);
        let zero = named_connection(NamedConnection::Canonical, sp).unwrap();
        let v = |c: &[f64]| MVector::from_coords(c).unwrap();
        let (m, h) = bracket_m(sp, &v(&x), &v(&y)).unwrap();
        let neg: Vec<f64> = m.coords().iter().map(|c| -c).collect();
        prop_assert!(max_dev(&torsion(sp, &zero).eval(&x, &y), &neg) < 1e-11);

        let hz = sp.h_element(&h) * v(&z).to_matrix() - v(&z).to_matrix() * sp.h_element(&h);
        let (hz_m, hz_h) = sp.decompose(&hz);
        prop_assert!(hz_h.iter().all(|c| c.abs() < 1e-10));
        let want: Vec<f64> = hz_m.iter().map(|c| -c).collect();
        prop_assert!(max_dev(&curvature(sp, &zero).eval(&x, &y, &z), &want) < 1e-10);
    }

    #[test]
    fn seeded_batteries_pass(seed in any::<u64>()) {
        for b in [verify::sasakian_battery(seed, 4), verify::omega_invariance_battery(seed, 4), verify::quaternion_battery(seed, 4)] {
            prop_assert!(b.passed, "{} residual {}", b.name, b.max_residual);
        }
    }

    #[test]
    fn report_json_round_trips(r in -2.0..2.0f64, re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let report = s7_report(r, Complex64::new(re, im));
        let text = render(&report, OutputFormat::Json);
        let back: Report = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(render(&back, OutputFormat::Json), text.clone());
        prop_assert_eq!(render(&s7_report(r, Complex64::new(re, im)), OutputFormat::Json), text);
    }
}

fn invariant_space_or_lc(n: usize) -> Vec<BilinearMap> {
    if n == 1 {
        MapName::closed_form_basis(1).into_iter().map(|m| basis_map(m, split(1)).unwrap()).collect()
    } else {
        invariant_space(n).basis.clone()
    }
}

fn s7_report(r: f64, q: Complex64) -> Report {
    let spec = ConnectionSpec::Skew { class: SphereClass::S7, n: 3, r, q: Some(q) };
    let outcome = cmd_connection(&spec, 1e-8).unwrap();
    let config = RunConfig::new("connection", Some(3), serde_json::json!({ "r": r }), 1e-8, 2024, 100, OutputFormat::Json).unwrap();
    connection_report(&outcome, config)
}

#[test]
fn tanaka_torsion_is_not_totally_skew() {
    for n in 2..=5 {
        let sp = split(n);
        let alpha = named_connection(NamedConnection::Tanaka, sp).unwrap();
        let (_, skew) = torsion_form(sp, &torsion(sp, &alpha));
        assert!(!skew, "n={n}");
        assert!(alpha.metric_residual(&sp.gram) < 1e-10, "n={n}");
    }
}

#[test]
fn shrinking_the_isotropy_enlarges_the_invariant_space() {
    let sp = split(2);
    let full = dimension_row(sp, &levi_civita_from_brackets(sp)).unwrap();
    let reduced = sp.restrict_isotropy(&[0]);
    let row = dimension_row(&reduced, &levi_civita_from_brackets(&reduced)).unwrap();
    assert_eq!((full.invariant, full.metric, full.skew), (13, 7, 3));
    assert!(row.invariant > full.invariant, "got {row:?}");
    assert!(row.metric > full.metric, "got {row:?}");
}

#[test]
fn perturbed_structure_constants_fail_jacobi() {
    assert!(verify::jacobi_battery(&verify::su_structure_constants()).passed);
    // In su(2) shifting one constant only rescales the bracket, which is still Lie.
    for m in 3..=5 {
        assert!(!verify::jacobi_battery(&[verify::perturbed_structure_constants(m, 1e-3)]).passed, "su({m})");
    }
}
