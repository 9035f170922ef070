//! Whether a 3-form at o on S^7 is the torsion form of an invariant connection.
//!
//! The invariant torsion forms are taken from the solver: for each basis map
//! `b` of the skew-torsion space the connection `a_lc + b` has torsion `2b`,
//! whose components `g(2 b(e_i,e_j), e_k)` span the comparison space.

use nalgebra::{DMatrix, DVector};
use ndarray::Array3;
use serde::{Deserialize, Serialize};

use super::quaternionic::eta_wedge_phi;
use super::{m_to_tangent, CVec};
use crate::error::{Error, Result};
use crate::invariant_solver::{invariant_bilinear_basis, metric_subspace, skew_torsion_subspace};
use crate::lie_core::ReductiveSplit;
use crate::nomizu_calculus::levi_civita_from_brackets;

/// Default threshold separating members from non-members.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipResult {
    pub member: bool,
    /// Max-norm distance from the form to the span.
    pub distance: f64,
}

fn origin_frame() -> Vec<CVec> {
    (0..7)
        .map(|k| {
            let mut c = vec![0.0; 7];
            c[k] = 1.0;
            m_to_tangent(&c).expect("canonical basis vector").v
        })
        .collect()
}

/// Components of eta_s ^ Phi_s at o on the canonical m-basis.
pub fn eta_wedge_phi_at_origin(s: usize) -> Array3<f64> {
    let e = origin_frame();
    let o = super::AmbientPoint::origin(3);
    Array3::from_shape_fn((7, 7, 7), |(i, j, k)| eta_wedge_phi(s, o.coords(), &e[i], &e[j], &e[k]))
}

/// eta_1 ^ d eta_1 + eta_2 ^ d eta_2 + eta_3 ^ d eta_3 at o, using d eta_s = 2 Phi_s.
pub fn g2_torsion_form() -> Array3<f64> {
    (1..=3).map(|s| eta_wedge_phi_at_origin(s) * 2.0).fold(Array3::zeros((7, 7, 7)), |acc, x| acc + x)
}

/// Torsion 3-forms of the invariant skew-torsion connections at o.
pub fn invariant_torsion_forms(split: &ReductiveSplit) -> Result<Vec<Array3<f64>>> {
    let lc = levi_civita_from_brackets(split);
    let inv = invariant_bilinear_basis(split);
    let met = metric_subspace(&inv, split);
    let skew = skew_torsion_subspace(&met, split, &lc)?;
    let d = split.dim_m();
    let g = &split.gram;
    Ok(skew
        .basis
        .iter()
        .map(|b| Array3::from_shape_fn((d, d, d), |(i, j, k)| (0..d).map(|l| 2.0 * b.coeffs[[i, j, l]] * g[(l, k)]).sum()))
        .collect())
}

/// Least-squares distance (max-norm of the residual) from `form` to the span.
pub fn form_distance(span: &[Array3<f64>], form: &Array3<f64>) -> f64 {
    let target: Vec<f64> = form.iter().copied().collect();
    if span.is_empty() {
        return target.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let a = DMatrix::from_fn(target.len(), span.len(), |r, c| span[c].as_slice().expect("standard layout")[r]);
    let b = DVector::from_vec(target.clone());
    let x = a.clone().svd(true, true).solve(&b, 1e-12).expect("least squares");
    let resid = b - a * x;
    resid.amax()
}

pub fn form_membership(split: &ReductiveSplit, form: &Array3<f64>) -> Result<MembershipResult> {
    let span = invariant_torsion_forms(split)?;
    let distance = form_distance(&span, form);
    Ok(MembershipResult { member: distance < MEMBERSHIP_TOL, distance })
}

/// Membership of the canonical G2 torsion form; the expected verdict is `false`.
pub fn g2_form_membership(split: &ReductiveSplit) -> Result<MembershipResult> {
    if split.n != 3 {
        return Err(Error::UnsupportedForN { name: "G2 torsion form".into(), n: split.n });
    }
    form_membership(split, &g2_torsion_form())
}
