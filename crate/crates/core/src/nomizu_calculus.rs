//! Torsion, curvature and Ricci data of an invariant connection, computed at
//! the origin from its bilinear map.
//!
//! ```text
//! T(A,B)   = a(A,B) - a(B,A) - [A,B]_m
//! R(A,B)C  = a(A,a(B,C)) - a(B,a(A,C)) - a([A,B]_m,C) - [[A,B]_h,C]
//! Ric(A,B) = sum_i g(R(e_i,A)B, e_i)
//! ```
//!
//! With this trace convention the round metric has Ric = 2n g.

use nalgebra::DMatrix;
use ndarray::{Array3, Array4};

use crate::invariant_solver::BilinearMap;
use crate::lie_core::ReductiveSplit;

/// Tolerance for the metric and total-skewness flags.
pub const FLAG_TOL: f64 = 1e-9;

/// Default tolerance for the Einstein verdict.
pub const EINSTEIN_TOL: f64 = 1e-8;

/// `T(e_i, e_j) = sum_k t[[i, j, k]] e_k`
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionTensor {
    pub t: Array3<f64>,
}

impl TorsionTensor {
    pub fn max_abs(&self) -> f64 {
        self.t.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        BilinearMap { coeffs: self.t.clone() }.eval(x, y)
    }
}

/// `R(e_i, e_j) e_k = sum_l r[[i, j, k, l]] e_l`
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    pub r: Array4<f64>,
}

impl CurvatureTensor {
    pub fn dim(&self) -> usize {
        self.r.shape()[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.r.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// R(x, y) z.
    pub fn eval(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d];
        for i in 0..d {
            for j in 0..d {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..d {
                    let w = w * z[k];
                    if w == 0.0 {
                        continue;
                    }
                    for l in 0..d {
                        out[l] += w * self.r[[i, j, k, l]];
                    }
                }
            }
        }
        out
    }

    /// g(R(e_i, e_j) e_k, e_l).
    pub fn covariant(&self, gram: &DMatrix<f64>) -> Array4<f64> {
        let d = self.dim();
        Array4::from_shape_fn((d, d, d, d), |(i, j, k, l)| (0..d).map(|m| self.r[[i, j, k, m]] * gram[(m, l)]).sum())
    }

    /// Max |R_ijkl + R_jikl|.
    pub fn first_pair_asymmetry(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for ((i, j, k, l), v) in self.r.indexed_iter() {
            let _ = d;
            worst = worst.max((v + self.r[[j, i, k, l]]).abs());
        }
        worst
    }

    /// Max |R(X,Y,Z,W) - R(Z,X,Y,W)| for the covariant tensor, i.e. the
    /// defect of cyclic invariance in the first three slots.
    pub fn cyclic_defect(&self, gram: &DMatrix<f64>) -> f64 {
        let c = self.covariant(gram);
        let mut worst: f64 = 0.0;
        for ((a, b, cc, d), v) in c.indexed_iter() {
            worst = worst.max((v - c[[cc, a, b, d]]).abs());
        }
        worst
    }
}

pub fn torsion(split: &ReductiveSplit, alpha: &BilinearMap) -> TorsionTensor {
    let d = split.dim_m();
    let c = &alpha.coeffs;
    let b = &split.bracket_mm_m;
    TorsionTensor { t: Array3::from_shape_fn((d, d, d), |(i, j, k)| c[[i, j, k]] - c[[j, i, k]] - b[[i, j, k]]) }
}

pub fn curvature(split: &ReductiveSplit, alpha: &BilinearMap) -> CurvatureTensor {
    let d = split.dim_m();
    let dh = split.dim_h();
    let c = &alpha.coeffs;
    let bm = &split.bracket_mm_m;
    let bh = &split.bracket_mm_h;
    let hm = &split.bracket_hm_m;
    let mut r = Array4::zeros((d, d, d, d));
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut s = 0.0;
                    for m in 0..d {
                        s += c[[j, k, m]] * c[[i, m, l]] - c[[i, k, m]] * c[[j, m, l]] - bm[[i, j, m]] * c[[m, k, l]];
                    }
                    for a in 0..dh {
                        s -= bh[[i, j, a]] * hm[[a, k, l]];
                    }
                    r[[i, j, k, l]] = s;
                }
            }
        }
    }
    CurvatureTensor { r }
}

/// Ric(e_a, e_b) = sum_i g(R(e_i, e_a) e_b, e_i).
pub fn ricci(curv: &CurvatureTensor, gram: &DMatrix<f64>) -> DMatrix<f64> {
    let d = curv.dim();
    DMatrix::from_fn(d, d, |a, b| {
        let mut s = 0.0;
        for i in 0..d {
            for l in 0..d {
                s += curv.r[[i, a, b, l]] * gram[(l, i)];
            }
        }
        s
    })
}

/// S(X,Y) = sum_j g(T(e_j,X), T(e_j,Y)).
pub fn s_tensor(tor: &TorsionTensor, gram: &DMatrix<f64>) -> DMatrix<f64> {
    let d = gram.nrows();
    DMatrix::from_fn(d, d, |x, y| {
        let mut s = 0.0;
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    s += tor.t[[j, x, k]] * gram[(k, l)] * tor.t[[j, y, l]];
                }
            }
        }
        s
    })
}

/// |T|^2 = (1/6) sum_{i,j} g(T(e_i,e_j), T(e_i,e_j)).
pub fn torsion_norm_sq(tor: &TorsionTensor, gram: &DMatrix<f64>) -> f64 {
    let d = gram.nrows();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    s += tor.t[[i, j, k]] * gram[(k, l)] * tor.t[[i, j, l]];
                }
            }
        }
    }
    s / 6.0
}

/// Components g(T(e_i,e_j), e_k) and whether they form a 3-form.
pub fn torsion_form(split: &ReductiveSplit, tor: &TorsionTensor) -> (Array3<f64>, bool) {
    let d = split.dim_m();
    let g = &split.gram;
    let w = Array3::from_shape_fn((d, d, d), |(i, j, k)| (0..d).map(|l| tor.t[[i, j, l]] * g[(l, k)]).sum::<f64>());
    let skew = total_skew_defect(&w) < FLAG_TOL;
    (w, skew)
}

/// Max deviation of a rank-3 array from total antisymmetry.
pub fn total_skew_defect(w: &Array3<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for ((i, j, k), v) in w.indexed_iter() {
        worst = worst.max((v + w[[j, i, k]]).abs()).max((v + w[[i, k, j]]).abs());
    }
    worst
}

/// The Levi-Civita map of the normal metric, from the bracket table alone:
/// `a(X,Y) = 1/2 [X,Y]_m + U(X,Y)` with
/// `2 g(U(X,Y),Z) = g(X,[Z,Y]_m) + g([Z,X]_m,Y)`.
pub fn levi_civita_from_brackets(split: &ReductiveSplit) -> BilinearMap {
    let d = split.dim_m();
    let b = &split.bracket_mm_m;
    let g = &split.gram;
    let ginv = g.clone().try_inverse().expect("positive definite gram");
    let bz = |x: usize, y: usize, z: usize| -> f64 { (0..d).map(|k| b[[x, y, k]] * g[(k, z)]).sum() };
    BilinearMap::from_fn(d, |(x, y, k)| {
        let mut u = 0.0;
        for z in 0..d {
            let gu = 0.5 * (bz(z, y, x) + bz(z, x, y));
            u += gu * ginv[(z, k)];
        }
        0.5 * b[[x, y, k]] + u
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EinsteinVerdict {
    Einstein,
    NotEinstein,
    NotApplicable,
}

/// All curvature invariants of one connection.
#[derive(Debug, Clone)]
pub struct ConnectionReport {
    pub dim: usize,
    pub ricci: DMatrix<f64>,
    pub sym_ricci: DMatrix<f64>,
    pub scalar: f64,
    pub s_tensor: DMatrix<f64>,
    pub torsion_norm_sq: f64,
    /// Ric^g - S/4, the second route to Sym(Ric) for skew torsion.
    pub sym_ricci_via_torsion: DMatrix<f64>,
    /// s^g - (3/2)|T|^2.
    pub scalar_via_torsion: f64,
    /// Max-norm gap between the two Sym(Ric) routes.
    pub route_gap: f64,
    pub metric_residual: f64,
    pub skew_residual: f64,
    pub is_metric: bool,
    pub is_skew_torsion: bool,
    pub ricci_asymmetry: f64,
    pub curvature_max: f64,
    pub torsion_max: f64,
    pub einstein: EinsteinVerdict,
    pub is_einstein: bool,
    pub einstein_residual: f64,
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn curvature_invariants(split: &ReductiveSplit, alpha: &BilinearMap) -> ConnectionReport {
    let g = &split.gram;
    let d = split.dim_m();
    let tor = torsion(split, alpha);
    let curv = curvature(split, alpha);
    let ric = ricci(&curv, g);
    let ginv = g.clone().try_inverse().expect("positive definite gram");
    let scalar = (&ginv * &ric).trace();
    let s = s_tensor(&tor, g);
    let tn = torsion_norm_sq(&tor, g);

    let lc = levi_civita_from_brackets(split);
    let ric_g = ricci(&curvature(split, &lc), g);
    let scalar_g = (&ginv * &ric_g).trace();
    let via = sym(&ric_g) - &s * 0.25;
    let sym_ric = sym(&ric);
    let route_gap = (&sym_ric - &via).amax();

    let (form, _) = torsion_form(split, &tor);
    let metric_residual = alpha.metric_residual(g);
    let skew_residual = total_skew_defect(&form);
    let is_metric = metric_residual < FLAG_TOL;

    let mut report = ConnectionReport {
        dim: d,
        ricci: ric.clone(),
        sym_ricci: sym_ric,
        scalar,
        s_tensor: s,
        torsion_norm_sq: tn,
        sym_ricci_via_torsion: via,
        scalar_via_torsion: scalar_g - 1.5 * tn,
        route_gap,
        metric_residual,
        skew_residual,
        is_metric,
        is_skew_torsion: is_metric && skew_residual < FLAG_TOL,
        ricci_asymmetry: (&ric - ric.transpose()).amax(),
        curvature_max: curv.max_abs(),
        torsion_max: tor.max_abs(),
        einstein: EinsteinVerdict::NotApplicable,
        is_einstein: false,
        einstein_residual: 0.0,
    };
    report.einstein_residual = einstein_residual(&report, g);
    report.einstein = einstein_check(&report, d, EINSTEIN_TOL);
    report.is_einstein = report.einstein == EinsteinVerdict::Einstein;
    report
}

fn einstein_residual(report: &ConnectionReport, gram: &DMatrix<f64>) -> f64 {
    (&report.sym_ricci - gram * (report.scalar / report.dim as f64)).amax()
}

/// Sym(Ric) = (s / dim) g within `tol`, for skew-torsion connections only.
pub fn einstein_check(report: &ConnectionReport, dim: usize, tol: f64) -> EinsteinVerdict {
    if !report.is_skew_torsion {
        return EinsteinVerdict::NotApplicable;
    }
    let g = DMatrix::<f64>::identity(dim, dim);
    if (&report.sym_ricci - g * (report.scalar / dim as f64)).amax() < tol {
        EinsteinVerdict::Einstein
    } else {
        EinsteinVerdict::NotEinstein
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::reductive_split;

    #[test]
    fn levi_civita_is_torsion_free_and_round() {
        for n in 1..=5 {
            let s = reductive_split(n).unwrap();
            let lc = levi_civita_from_brackets(&s);
            assert!(torsion(&s, &lc).max_abs() < 1e-12);
            assert!(lc.metric_residual(&s.gram) < 1e-12);
            let rep = curvature_invariants(&s, &lc);
            let d = 2 * n + 1;
            let target = DMatrix::<f64>::identity(d, d) * (2.0 * n as f64);
            assert!((&rep.ricci - target).amax() < 1e-10, "n = {n}");
            assert!((rep.scalar - (2 * n * (2 * n + 1)) as f64).abs() < 1e-9);
            assert_eq!(rep.einstein, EinsteinVerdict::Einstein);
        }
    }

    #[test]
    fn zero_map_is_canonical_connection() {
        let s = reductive_split(3).unwrap();
        let zero = BilinearMap::zeros(7);
        let t = torsion(&s, &zero);
        for ((i, j, k), v) in t.t.indexed_iter() {
            assert!((v + s.bracket_mm_m[[i, j, k]]).abs() < 1e-15);
        }
        let r = curvature(&s, &zero);
        for ((i, j, k, l), v) in r.r.indexed_iter() {
            let expect: f64 = -(0..s.dim_h()).map(|a| s.bracket_mm_h[[i, j, a]] * s.bracket_hm_m[[a, k, l]]).sum::<f64>();
            assert!((v - expect).abs() < 1e-14);
        }
        assert!(r.first_pair_asymmetry() < 1e-14);
    }

    #[test]
    fn einstein_needs_skew_torsion() {
        let s = reductive_split(2).unwrap();
        let mut alpha = levi_civita_from_brackets(&s);
        alpha.coeffs[[0, 0, 4]] += 1.0;
        let rep = curvature_invariants(&s, &alpha);
        assert!(!rep.is_metric);
        assert_eq!(rep.einstein, EinsteinVerdict::NotApplicable);
    }
}
