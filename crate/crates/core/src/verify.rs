//! Seeded property batteries behind `homoconn verify`.
//!
//! Every battery draws from its own ChaCha stream (`shard_rng(seed, index)`),
//! so results do not depend on which batteries run or in which order.

use ndarray::Array3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::connection_families::{basis_map, theta_maps, MapName};
use crate::error::Result;
use crate::invariant_solver::{invariant_bilinear_basis, span_equal, span_of, BilinearMap};
use crate::lie_core::{build_su, jacobi_residual, reductive_split};
use crate::sampling::{complex_vector, haar_special_unitary, real_vector, shard_rng, unit_complex_vector, SampleRng};
use crate::sphere_geometry::octonion::{theta_c2, Octonion};
use crate::sphere_geometry::quaternionic::{b_tensor, composition_defect, horizontal_unit, theta_table_defect};
use crate::sphere_geometry::{
    g2_form_membership, grassmann_checks, m_to_tangent, omega_eval, phi, psi_hat_at, quaternion_frame_at, sasaki_at,
    tangent_to_m, AmbientPoint, TangentVector,
};

pub const IDENTITY_TOL: f64 = 1e-9;
pub const SPAN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryResult {
    pub name: String,
    pub trials: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl BatteryResult {
    fn below(name: &str, trials: usize, max_residual: f64, tolerance: f64) -> Self {
        BatteryResult {
            name: name.into(),
            trials,
            max_residual,
            tolerance,
            passed: max_residual.is_finite() && max_residual < tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub seed: u64,
    pub trials: usize,
    pub batteries: Vec<BatteryResult>,
    pub all_passed: bool,
}

fn random_point(r: &mut SampleRng, m: usize) -> AmbientPoint {
    AmbientPoint::new(unit_complex_vector(r, m)).expect("unit vector")
}

fn random_tangent(r: &mut SampleRng, p: &AmbientPoint) -> TangentVector {
    TangentVector::project(p, &complex_vector(r, p.complex_dim()))
}

fn vec_dist(a: &TangentVector, b: &TangentVector) -> f64 {
    a.v.iter().zip(&b.v).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Jacobi identity over the given structure-constant tables.
pub fn jacobi_battery(tables: &[Array3<f64>]) -> BatteryResult {
    let worst = tables.iter().map(jacobi_residual).fold(0.0, f64::max);
    BatteryResult::below("jacobi", tables.len(), worst, 1e-10)
}

/// Structure constants of su(2), ..., su(6).
pub fn su_structure_constants() -> Vec<Array3<f64>> {
    (2..=6).map(|m| build_su(m).expect("m >= 2").structure_constants).collect()
}

/// su(m) constants with one bracket coefficient shifted (and its
/// antisymmetric partner), a negative control for the Jacobi battery.
pub fn perturbed_structure_constants(m: usize, eps: f64) -> Array3<f64> {
    let mut f = build_su(m).expect("m >= 2").structure_constants;
    f[[0, 1, 2]] += eps;
    f[[1, 0, 2]] -= eps;
    f
}

/// Solver spans against the closed-form bases for n = 2, 3, 4.
pub fn span_battery() -> Result<BatteryResult> {
    let mut worst: f64 = 0.0;
    let mut all_equal = true;
    for n in 2..=4 {
        let split = reductive_split(n)?;
        let solved = invariant_bilinear_basis(&split);
        let names = MapName::closed_form_basis(n);
        let maps = names.iter().map(|&m| basis_map(m, &split)).collect::<Result<Vec<_>>>()?;
        let closed = span_of(&maps, Some(names.iter().map(|m| m.label().to_string()).collect()));
        all_equal &= span_equal(&solved, &closed, SPAN_TOL);
        for b in &closed.basis {
            worst = worst.max(solved.projection_residual(b));
        }
        for b in &solved.basis {
            worst = worst.max(closed.projection_residual(b));
        }
    }
    let mut r = BatteryResult::below("span_equality", 3, worst, SPAN_TOL);
    r.passed &= all_equal;
    Ok(r)
}

/// g(psi X, psi Y) = g(X, Y) - eta(X) eta(Y), eta o psi = 0, Phi skew; on S^3, S^5, S^7, S^9.
pub fn sasakian_battery(seed: u64, trials: usize) -> BatteryResult {
    let mut r = shard_rng(seed, 1);
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let p = random_point(&mut r, 2 + t % 4);
        let x = random_tangent(&mut r, &p);
        let y = random_tangent(&mut r, &p);
        let sx = sasaki_at(&p, &x).expect("same base");
        let sy = sasaki_at(&p, &y).expect("same base");
        let eta_psi = sasaki_at(&p, &sx.psi).expect("same base").eta;
        let psi2 = sasaki_at(&p, &sx.psi).expect("same base").psi;
        let psi2_expect: Vec<Complex64> = x.v.iter().zip(&sx.xi.v).map(|(a, b)| -a + b * sx.eta).collect();
        worst = worst
            .max((sx.psi.g(&sy.psi) - (x.g(&y) - sx.eta * sy.eta)).abs())
            .max(eta_psi.abs())
            .max((phi(&p, &x, &y) + phi(&p, &y, &x)).abs())
            .max(psi2.v.iter().zip(&psi2_expect).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
    }
    BatteryResult::below("sasakian", trials, worst, IDENTITY_TOL)
}

/// The six composition rules psi_a psi_b at random points of S^7.
pub fn quaternion_battery(seed: u64, trials: usize) -> BatteryResult {
    let mut r = shard_rng(seed, 2);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let p = random_point(&mut r, 4);
        let x = random_tangent(&mut r, &p);
        worst = worst.max(composition_defect(&p, &x).expect("S^7"));
        let f = quaternion_frame_at(&p, &x).expect("S^7");
        for s in 0..3 {
            worst = worst.max((f.xi[s].g(&f.xi[s]) - 1.0).abs());
        }
    }
    BatteryResult::below("quaternionic_compositions", trials, worst, IDENTITY_TOL)
}

/// Theta against the 36-entry table and the xi_1 row, at random (p, x).
pub fn theta_table_battery(seed: u64, trials: usize) -> BatteryResult {
    let mut r = shard_rng(seed, 3);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < trials {
        let p = random_point(&mut r, 4);
        let Ok(x) = horizontal_unit(&p, &complex_vector(&mut r, 4)) else { continue };
        worst = worst.max(theta_table_defect(&p, &x).expect("S^7"));
        done += 1;
    }
    BatteryResult::below("theta_table", trials, worst, IDENTITY_TOL)
}

/// B(u, v) = tr(Theta_u Theta_v) = 4(eta_1(u) eta_1(v) - g(u, v)).
pub fn b_tensor_battery(seed: u64, trials: usize) -> BatteryResult {
    let mut r = shard_rng(seed, 4);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let p = random_point(&mut r, 4);
        let u = random_tangent(&mut r, &p);
        let v = random_tangent(&mut r, &p);
        let eu = quaternion_frame_at(&p, &u).expect("S^7").eta[0];
        let ev = quaternion_frame_at(&p, &v).expect("S^7").eta[0];
        worst = worst.max((b_tensor(&p, &u, &v).expect("S^7") - 4.0 * (eu * ev - u.g(&v))).abs());
    }
    BatteryResult::below("b_tensor", trials, worst, IDENTITY_TOL)
}

/// psi^ at o equals theta, and psi^ commutes with SU(3) acting on S^5.
pub fn psi_hat_battery(seed: u64, trials: usize) -> BatteryResult {
    let mut r = shard_rng(seed, 5);
    let o = AmbientPoint::origin(2);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let x = m_to_tangent(&real_vector(&mut r, 5)).expect("m-vector");
        let got = psi_hat_at(&o, &x).expect("S^5");
        let mut expect = theta_c2(&x.v[..2]);
        expect.push(Complex64::new(0.0, 0.0));
        worst = worst.max(got.v.iter().zip(&expect).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));

        let sigma = haar_special_unitary(&mut r, 3);
        let p = random_point(&mut r, 3);
        let y = random_tangent(&mut r, &p);
        let lhs = psi_hat_at(&p, &y).expect("S^5").transformed(&sigma);
        let rhs = psi_hat_at(&p.transformed(&sigma), &y.transformed(&sigma)).expect("S^5");
        worst = worst.max(vec_dist(&lhs, &rhs));
    }
    BatteryResult::below("psi_hat", trials, worst, IDENTITY_TOL)
}

/// Alternativity and norm multiplicativity on random octonion pairs.
pub fn octonion_battery(seed: u64, trials: usize) -> BatteryResult {
    let mut r = shard_rng(seed, 6);
    let draw = |r: &mut SampleRng| {
        let v = real_vector(r, 8);
        Octonion([v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]])
    };
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let x = draw(&mut r);
        let y = draw(&mut r);
        worst = worst
            .max((x * (x * y)).max_dist(&((x * x) * y)))
            .max(((y * x) * x).max_dist(&(y * (x * x))))
            .max(((x * y).norm() - x.norm() * y.norm()).abs());
    }
    BatteryResult::below("octonions", trials, worst, IDENTITY_TOL)
}

/// |Omega_{sigma p}(sigma u, sigma v, sigma w) - Omega_p(u, v, w)| over SU(4).
pub fn omega_invariance_battery(seed: u64, samples: usize) -> BatteryResult {
    let mut r = shard_rng(seed, 7);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let sigma = haar_special_unitary(&mut r, 4);
        let p = random_point(&mut r, 4);
        let [u, v, w] = [0; 3].map(|_| random_tangent(&mut r, &p));
        let before = omega_eval(&p, &u, &v, &w).expect("S^7");
        let sp = p.transformed(&sigma);
        let after = omega_eval(&sp, &u.transformed(&sigma), &v.transformed(&sigma), &w.transformed(&sigma)).expect("S^7");
        worst = worst.max((after - before).abs());
    }
    BatteryResult::below("omega_invariance", samples, worst, IDENTITY_TOL)
}

/// beta(U) >= 0 and delta(sigma, x) = 1; residual is max(-beta_min, |Im beta|, |delta - 1|).
pub fn grassmann_battery(seed: u64, samples: usize) -> BatteryResult {
    let s = grassmann_checks(seed, samples);
    let worst = (-s.beta_min_real).max(0.0).max(s.beta_max_imag).max(s.delta_max_deviation);
    BatteryResult { name: "grassmann".into(), trials: samples, max_residual: worst, tolerance: 1e-8, passed: s.passed }
}

/// Closed-form maps against the geometric tensors at o:
/// alpha_1 = -eta(y) psi(x), gamma_1 = Phi(x, y) xi, eps_1 = -Theta_o, eps_i = Theta~_o
/// and the hatted maps on S^5.
pub fn bridge_battery() -> Result<BatteryResult> {
    let mut worst: f64 = 0.0;
    for n in 1..=4 {
        let split = reductive_split(n)?;
        let o = AmbientPoint::origin(n);
        let frame: Vec<TangentVector> = (0..2 * n + 1)
            .map(|k| {
                let mut c = vec![0.0; 2 * n + 1];
                c[k] = 1.0;
                m_to_tangent(&c).expect("basis vector")
            })
            .collect();
        let a1 = BilinearMap::from_pairs(2 * n + 1, |i, j| {
            let sx = sasaki_at(&o, &frame[i]).expect("o");
            let sy = sasaki_at(&o, &frame[j]).expect("o");
            tangent_to_m(&TangentVector { base: o.clone(), v: sx.psi.v.iter().map(|c| c * -sy.eta).collect() })
        });
        let g1 = BilinearMap::from_pairs(2 * n + 1, |i, j| {
            let sx = sasaki_at(&o, &frame[i]).expect("o");
            let f = phi(&o, &frame[i], &frame[j]);
            tangent_to_m(&TangentVector { base: o.clone(), v: sx.xi.v.iter().map(|c| c * f).collect() })
        });
        worst = worst.max((&basis_map(MapName::Alpha1, &split)? - &a1).max_abs());
        worst = worst.max((&basis_map(MapName::Gamma1, &split)? - &g1).max_abs());
        if n == 3 {
            let (th, tht) = theta_maps();
            worst = worst.max((&basis_map(MapName::Eps1, &split)? + &th).max_abs());
            worst = worst.max((&basis_map(MapName::EpsI, &split)? - &tht).max_abs());
        }
        if n == 2 {
            worst = worst.max(hatted_bridge_defect(&split, &o, &frame)?);
        }
    }
    Ok(BatteryResult::below("bridge_to_m", 4, worst, IDENTITY_TOL))
}

fn hatted_bridge_defect(split: &crate::lie_core::ReductiveSplit, o: &AmbientPoint, frame: &[TangentVector]) -> Result<f64> {
    let sas = |x: &TangentVector| sasaki_at(o, x).expect("o");
    let hat = |x: &TangentVector| psi_hat_at(o, x).expect("S^5");
    let build = |f: &dyn Fn(&TangentVector, &TangentVector) -> Vec<Complex64>| {
        BilinearMap::from_pairs(5, |i, j| tangent_to_m(&TangentVector { base: o.clone(), v: f(&frame[i], &frame[j]) }))
    };
    let sc = |c: f64, v: &[Complex64]| -> Vec<Complex64> { v.iter().map(|z| z * c).collect() };
    let xi = sas(&frame[0]).xi.v;
    let expected: [(MapName, BilinearMap); 6] = [
        (MapName::HatAlpha1, build(&|x, y| sc(-sas(y).eta, &sas(&hat(x)).psi.v))),
        (MapName::HatAlphaI, build(&|x, y| sc(sas(y).eta, &hat(x).v))),
        (MapName::HatBeta1, build(&|x, y| sc(-sas(x).eta, &sas(&hat(y)).psi.v))),
        (MapName::HatBetaI, build(&|x, y| sc(sas(x).eta, &hat(y).v))),
        (MapName::HatGamma1, build(&|x, y| sc(phi(o, &hat(x), y), &xi))),
        (MapName::HatGammaI, build(&|x, y| sc(-hat(x).g(y), &xi))),
    ];
    let mut worst: f64 = 0.0;
    for (name, map) in &expected {
        worst = worst.max((&basis_map(*name, split)? - map).max_abs());
    }
    Ok(worst)
}

/// The G2 torsion form lies at max-norm distance > 0.1 from the invariant span.
pub fn g2_battery() -> Result<BatteryResult> {
    let m = g2_form_membership(&reductive_split(3)?)?;
    Ok(BatteryResult {
        name: "g2_non_membership".into(),
        trials: 1,
        max_residual: m.distance,
        tolerance: 0.1,
        passed: !m.member && m.distance > 0.1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub trials: usize,
    /// Replace the su(m) tables by a perturbed one in the Jacobi battery.
    pub perturb_structure_constants: bool,
}

/// Runs every battery. Omega invariance and the Grassmann checks use
/// `5 * trials` samples.
pub fn run_suite(opts: SuiteOptions) -> Result<SuiteSummary> {
    let SuiteOptions { seed, trials, perturb_structure_constants } = opts;
    let tables = if perturb_structure_constants {
        vec![perturbed_structure_constants(3, 1e-3)]
    } else {
        su_structure_constants()
    };
    let heavy = 5 * trials;
    let (omega, grass) = std::thread::scope(|s| {
        let a = s.spawn(|| omega_invariance_battery(seed, heavy));
        let b = s.spawn(|| grassmann_battery(seed, heavy));
        (a.join().expect("omega battery"), b.join().expect("grassmann battery"))
    });
    let batteries = vec![
        jacobi_battery(&tables),
        span_battery()?,
        bridge_battery()?,
        sasakian_battery(seed, trials),
        quaternion_battery(seed, trials),
        theta_table_battery(seed, trials),
        b_tensor_battery(seed, trials),
        psi_hat_battery(seed, trials),
        octonion_battery(seed, trials),
        omega,
        grass,
        g2_battery()?,
    ];
    let all_passed = batteries.iter().all(|b| b.passed);
    Ok(SuiteSummary { seed, trials, batteries, all_passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_negative_control() {
        assert!(jacobi_battery(&su_structure_constants()).passed);
        let bad = jacobi_battery(&[perturbed_structure_constants(3, 1e-3)]);
        assert!(!bad.passed && bad.max_residual > 1e-6);
    }

    #[test]
    fn bridge_identities_hold() {
        let b = bridge_battery().unwrap();
        assert!(b.passed, "{b:?}");
    }

    #[test]
    fn small_suite_passes() {
        let s = run_suite(SuiteOptions { seed: 5, trials: 10, perturb_structure_constants: false }).unwrap();
        for b in &s.batteries {
            assert!(b.passed, "{b:?}");
        }
    }
}
