//! Closed-form invariant maps and the named connection families.
//!
//! Basis maps on m, with a, b imaginary and products taken in C:
//!
//! ```text
//! alpha_1 = (b z, 0)        alpha_i = (i b z, 0)
//! beta_1  = (a w, 0)        beta_i  = (i a w, 0)
//! gamma_1 = (0, i Im(z^* w))  gamma_i = (0, i Re(z^* w))
//! delta   = (0, i a b)
//! eps_1   = (conj z x conj w, 0)          eps_i = i eps_1          (n = 3)
//! alpha^_1 = (b theta(z), 0), beta^_1 = (a theta(w), 0),
//! gamma^_1 = (0, i Im(theta(z)^* w)) and their i-variants   (n = 2)
//! ```
//!
//! where `theta(z) = (-conj z2, conj z1)` and `z^* w = sum conj(z_l) w_l`.
//!
//! Skew-torsion families are `alpha = alpha_lc + D` with D assembled from the
//! Sasakian, quaternionic and octonionic tensors evaluated at o. For S^3,
//! `D = r sum_i E_i^b (x) sigma^i`, i.e. the frame coefficient `t_11 = -r` when
//! written as `-t_11 sum_i E_i^b (x) sigma^i`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariant_solver::{combination, BilinearMap};
use crate::lie_core::{MVector, ReductiveSplit};
use crate::sphere_geometry::{m_to_tangent, octonion, phi, quaternionic, sasaki_at, tangent_to_m, AmbientPoint, TangentVector};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapName {
    Alpha1,
    AlphaI,
    Beta1,
    BetaI,
    Gamma1,
    GammaI,
    Delta,
    Eps1,
    EpsI,
    HatAlpha1,
    HatAlphaI,
    HatBeta1,
    HatBetaI,
    HatGamma1,
    HatGammaI,
}

impl MapName {
    pub const GENERIC: [MapName; 7] =
        [MapName::Alpha1, MapName::AlphaI, MapName::Beta1, MapName::BetaI, MapName::Gamma1, MapName::GammaI, MapName::Delta];
    pub const CROSS: [MapName; 2] = [MapName::Eps1, MapName::EpsI];
    pub const HATTED: [MapName; 6] =
        [MapName::HatAlpha1, MapName::HatAlphaI, MapName::HatBeta1, MapName::HatBetaI, MapName::HatGamma1, MapName::HatGammaI];

    pub fn label(&self) -> &'static str {
        match self {
            MapName::Alpha1 => "alpha_1",
            MapName::AlphaI => "alpha_i",
            MapName::Beta1 => "beta_1",
            MapName::BetaI => "beta_i",
            MapName::Gamma1 => "gamma_1",
            MapName::GammaI => "gamma_i",
            MapName::Delta => "delta",
            MapName::Eps1 => "eps_1",
            MapName::EpsI => "eps_i",
            MapName::HatAlpha1 => "hat_alpha_1",
            MapName::HatAlphaI => "hat_alpha_i",
            MapName::HatBeta1 => "hat_beta_1",
            MapName::HatBetaI => "hat_beta_i",
            MapName::HatGamma1 => "hat_gamma_1",
            MapName::HatGammaI => "hat_gamma_i",
        }
    }

    /// The closed-form basis of the invariant space for sphere parameter n
    /// (n >= 2; for n = 1 every bilinear map is invariant).
    pub fn closed_form_basis(n: usize) -> Vec<MapName> {
        let mut v = Self::GENERIC.to_vec();
        match n {
            2 => v.extend(Self::HATTED),
            3 => v.extend(Self::CROSS),
            _ => {}
        }
        v
    }
}

fn map_from_za(n: usize, f: impl Fn(&MVector, &MVector) -> MVector) -> BilinearMap {
    let d = 2 * n + 1;
    let basis: Vec<MVector> = (0..d)
        .map(|k| {
            let mut c = vec![0.0; d];
            c[k] = 1.0;
            MVector::from_coords(&c).expect("odd length")
        })
        .collect();
    BilinearMap::from_pairs(d, |i, j| f(&basis[i], &basis[j]).coords())
}

fn zstar_w(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

fn theta(z: &[Complex64]) -> Vec<Complex64> {
    octonion::theta_c2(z)
}

fn conj_cross(z: &[Complex64], w: &[Complex64]) -> Vec<Complex64> {
    let (a, b): (Vec<Complex64>, Vec<Complex64>) = (z.iter().map(|x| x.conj()).collect(), w.iter().map(|x| x.conj()).collect());
    // Cofactor expansion of det[[e1, e2, e3], a, b] along the first row.
    vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn horiz(z: Vec<Complex64>) -> MVector {
    MVector::new(z, 0.0)
}

fn vert(n: usize, a: Complex64) -> MVector {
    MVector::new(vec![Complex64::new(0.0, 0.0); n], a.im)
}

fn scaled(c: Complex64, z: &[Complex64]) -> Vec<Complex64> {
    z.iter().map(|x| c * x).collect()
}

pub fn basis_map(name: MapName, split: &ReductiveSplit) -> Result<BilinearMap> {
    let n = split.n;
    let need = |want: usize| -> Result<()> {
        if n != want {
            Err(Error::UnsupportedForN { name: name.label().into(), n })
        } else {
            Ok(())
        }
    };
    match name {
        MapName::Eps1 | MapName::EpsI => need(3)?,
        MapName::HatAlpha1
        | MapName::HatAlphaI
        | MapName::HatBeta1
        | MapName::HatBetaI
        | MapName::HatGamma1
        | MapName::HatGammaI => need(2)?,
        _ => {}
    }
    let one = Complex64::new(1.0, 0.0);
    Ok(match name {
        MapName::Alpha1 => map_from_za(n, |x, y| horiz(scaled(y.a(), &x.z))),
        MapName::AlphaI => map_from_za(n, |x, y| horiz(scaled(I * y.a(), &x.z))),
        MapName::Beta1 => map_from_za(n, |x, y| horiz(scaled(x.a(), &y.z))),
        MapName::BetaI => map_from_za(n, |x, y| horiz(scaled(I * x.a(), &y.z))),
        MapName::Gamma1 => map_from_za(n, |x, y| vert(n, I * zstar_w(&x.z, &y.z).im)),
        MapName::GammaI => map_from_za(n, |x, y| vert(n, I * zstar_w(&x.z, &y.z).re)),
        MapName::Delta => map_from_za(n, |x, y| vert(n, I * x.a() * y.a())),
        MapName::Eps1 => map_from_za(n, |x, y| horiz(conj_cross(&x.z, &y.z))),
        MapName::EpsI => map_from_za(n, |x, y| horiz(scaled(I, &conj_cross(&x.z, &y.z)))),
        MapName::HatAlpha1 => map_from_za(n, |x, y| horiz(scaled(y.a(), &theta(&x.z)))),
        MapName::HatAlphaI => map_from_za(n, |x, y| horiz(scaled(I * y.a(), &theta(&x.z)))),
        MapName::HatBeta1 => map_from_za(n, |x, y| horiz(scaled(x.a(), &theta(&y.z)))),
        MapName::HatBetaI => map_from_za(n, |x, y| horiz(scaled(I * x.a(), &theta(&y.z)))),
        MapName::HatGamma1 => map_from_za(n, |x, y| vert(n, I * zstar_w(&theta(&x.z), &y.z).im)),
        MapName::HatGammaI => map_from_za(n, |x, y| vert(n, I * (one * zstar_w(&theta(&x.z), &y.z).re))),
    })
}

/// Sphere classes with their own invariant families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereClass {
    GeneralN,
    S7,
    S5,
    S3,
}

impl SphereClass {
    /// The class whose families describe S^{2n+1}.
    pub fn for_n(n: usize) -> SphereClass {
        match n {
            1 => SphereClass::S3,
            2 => SphereClass::S5,
            3 => SphereClass::S7,
            _ => SphereClass::GeneralN,
        }
    }

    /// The fixed n of the low-dimensional classes.
    pub fn fixed_n(&self) -> Option<usize> {
        match self {
            SphereClass::S3 => Some(1),
            SphereClass::S5 => Some(2),
            SphereClass::S7 => Some(3),
            SphereClass::GeneralN => None,
        }
    }

    /// Number of real skew-torsion parameters (r, and q for S^5 and S^7).
    pub fn has_q(&self) -> bool {
        matches!(self, SphereClass::S7 | SphereClass::S5)
    }

    fn check(&self, split: &ReductiveSplit) -> Result<()> {
        match self.fixed_n() {
            Some(k) if k != split.n => Err(Error::UnsupportedForN { name: self.to_string(), n: split.n }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SphereClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SphereClass::GeneralN => "general_n",
            SphereClass::S7 => "s7",
            SphereClass::S5 => "s5",
            SphereClass::S3 => "s3",
        })
    }
}

impl FromStr for SphereClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "general" | "general_n" => Ok(SphereClass::GeneralN),
            "s7" => Ok(SphereClass::S7),
            "s5" => Ok(SphereClass::S5),
            "s3" => Ok(SphereClass::S3),
            other => Err(Error::InvalidInput(format!("unknown sphere class '{other}'"))),
        }
    }
}

/// Complex numbers as `{"re": .., "im": ..}`.
pub mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct ReIm {
        re: f64,
        #[serde(default)]
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReIm { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Complex64, D::Error> {
        let v = ReIm::deserialize(d)?;
        Ok(Complex64::new(v.re, v.im))
    }
}

/// Parameters of the closed-form families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyParams {
    /// `(q1 b z + q2 a w, i(t a b + Im(q3 z^* w)))`
    GeneralInvariant { #[serde(with = "complex_serde")] q1: Complex64, #[serde(with = "complex_serde")] q2: Complex64, #[serde(with = "complex_serde")] q3: Complex64, t: f64 },
    /// `Re(q)(alpha_1 - gamma_1) + Im(q)(alpha_i + gamma_i) + t beta_1`
    GeneralMetric { #[serde(with = "complex_serde")] q: Complex64, t: f64 },
    /// General invariant family plus `q4 conj z x conj w`.
    S7Invariant { #[serde(with = "complex_serde")] q1: Complex64, #[serde(with = "complex_serde")] q2: Complex64, #[serde(with = "complex_serde")] q3: Complex64, #[serde(with = "complex_serde")] q4: Complex64, t: f64 },
    /// General metric family in q1 plus `Re(q2) eps_1 + Im(q2) eps_i`.
    S7Metric { #[serde(with = "complex_serde")] q1: Complex64, #[serde(with = "complex_serde")] q2: Complex64, t: f64 },
    /// Thirteen coefficients over the generic and hatted basis maps.
    S5Invariant { coeffs: Vec<f64> },
    /// General metric family in q1 plus
    /// `Re(q2)(alpha^_1 - gamma^_1) + Im(q2)(alpha^_i + gamma^_i) + Re(q3) beta^_1 + Im(q3) beta^_i`.
    S5Metric { #[serde(with = "complex_serde")] q1: Complex64, #[serde(with = "complex_serde")] q2: Complex64, #[serde(with = "complex_serde")] q3: Complex64, t: f64 },
    /// `sum t_ij E_i^b(x) sigma^j(y)`.
    S3Metric { t: [[f64; 3]; 3] },
    /// All 27 coefficients c[i][j][k] in row-major order.
    S3Full { coeffs: Vec<f64> },
}

impl FamilyParams {
    pub fn sphere_class(&self) -> SphereClass {
        match self {
            FamilyParams::GeneralInvariant { .. } | FamilyParams::GeneralMetric { .. } => SphereClass::GeneralN,
            FamilyParams::S7Invariant { .. } | FamilyParams::S7Metric { .. } => SphereClass::S7,
            FamilyParams::S5Invariant { .. } | FamilyParams::S5Metric { .. } => SphereClass::S5,
            FamilyParams::S3Metric { .. } | FamilyParams::S3Full { .. } => SphereClass::S3,
        }
    }
}

fn lin(split: &ReductiveSplit, terms: &[(MapName, f64)]) -> Result<BilinearMap> {
    let maps = terms.iter().map(|(m, _)| basis_map(*m, split)).collect::<Result<Vec<_>>>()?;
    let refs: Vec<&BilinearMap> = maps.iter().collect();
    let c: Vec<f64> = terms.iter().map(|(_, x)| *x).collect();
    Ok(combination(&refs, &c))
}

fn general_invariant_terms(q1: Complex64, q2: Complex64, q3: Complex64, t: f64) -> Vec<(MapName, f64)> {
    vec![
        (MapName::Alpha1, q1.re),
        (MapName::AlphaI, q1.im),
        (MapName::Beta1, q2.re),
        (MapName::BetaI, q2.im),
        (MapName::Gamma1, q3.re),
        (MapName::GammaI, q3.im),
        (MapName::Delta, t),
    ]
}

fn general_metric_terms(q: Complex64, t: f64) -> Vec<(MapName, f64)> {
    vec![
        (MapName::Alpha1, q.re),
        (MapName::Gamma1, -q.re),
        (MapName::AlphaI, q.im),
        (MapName::GammaI, q.im),
        (MapName::Beta1, t),
    ]
}

/// E_i = e_i and sigma^j(y) = e_j x y in the canonical basis of su(2).
fn s3_frame_map(t: &[[f64; 3]; 3]) -> BilinearMap {
    BilinearMap::from_fn(3, |(i, l, k)| {
        // alpha(e_i, e_l)_k = sum_j t_ij (e_j x e_l)_k = sum_j t_ij eps_{j l k}
        (0..3).map(|j| t[i][j] * levi_civita_symbol(j, l, k)).sum()
    })
}

fn levi_civita_symbol(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `sum_i E_i^b (x) sigma^i` on S^3.
pub fn s3_frame_sum() -> BilinearMap {
    s3_frame_map(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
}

pub fn family_alpha(params: &FamilyParams, split: &ReductiveSplit) -> Result<BilinearMap> {
    params.sphere_class().check(split)?;
    match params {
        FamilyParams::GeneralInvariant { q1, q2, q3, t } => lin(split, &general_invariant_terms(*q1, *q2, *q3, *t)),
        FamilyParams::GeneralMetric { q, t } => lin(split, &general_metric_terms(*q, *t)),
        FamilyParams::S7Invariant { q1, q2, q3, q4, t } => {
            let mut terms = general_invariant_terms(*q1, *q2, *q3, *t);
            terms.extend([(MapName::Eps1, q4.re), (MapName::EpsI, q4.im)]);
            lin(split, &terms)
        }
        FamilyParams::S7Metric { q1, q2, t } => {
            let mut terms = general_metric_terms(*q1, *t);
            terms.extend([(MapName::Eps1, q2.re), (MapName::EpsI, q2.im)]);
            lin(split, &terms)
        }
        FamilyParams::S5Invariant { coeffs } => {
            if coeffs.len() != 13 {
                return Err(Error::InvalidInput(format!("s5 family takes 13 coefficients, got {}", coeffs.len())));
            }
            let names = MapName::closed_form_basis(2);
            lin(split, &names.into_iter().zip(coeffs.iter().copied()).collect::<Vec<_>>())
        }
        FamilyParams::S5Metric { q1, q2, q3, t } => {
            let mut terms = general_metric_terms(*q1, *t);
            terms.extend([
                (MapName::HatAlpha1, q2.re),
                (MapName::HatGamma1, -q2.re),
                (MapName::HatAlphaI, q2.im),
                (MapName::HatGammaI, q2.im),
                (MapName::HatBeta1, q3.re),
                (MapName::HatBetaI, q3.im),
            ]);
            lin(split, &terms)
        }
        FamilyParams::S3Metric { t } => Ok(s3_frame_map(t)),
        FamilyParams::S3Full { coeffs } => {
            if coeffs.len() != 27 {
                return Err(Error::InvalidInput(format!("s3 full family takes 27 coefficients, got {}", coeffs.len())));
            }
            Ok(BilinearMap::from_flat(3, coeffs))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedConnection {
    LeviCivita,
    Canonical,
    Natural,
    Tanaka,
    Characteristic,
}

impl FromStr for NamedConnection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "levi_civita" | "lc" => Ok(NamedConnection::LeviCivita),
            "canonical" => Ok(NamedConnection::Canonical),
            "natural" => Ok(NamedConnection::Natural),
            "tanaka" => Ok(NamedConnection::Tanaka),
            "characteristic" => Ok(NamedConnection::Characteristic),
            other => Err(Error::InvalidInput(format!("unknown connection '{other}'"))),
        }
    }
}

/// alpha_1 - gamma_1 - (1/n) beta_1.
pub fn levi_civita(split: &ReductiveSplit) -> Result<BilinearMap> {
    lin(split, &[(MapName::Alpha1, 1.0), (MapName::Gamma1, -1.0), (MapName::Beta1, -1.0 / split.n as f64)])
}

pub fn named_connection(name: NamedConnection, split: &ReductiveSplit) -> Result<BilinearMap> {
    let d = split.dim_m();
    match name {
        NamedConnection::LeviCivita => levi_civita(split),
        NamedConnection::Canonical => Ok(BilinearMap::zeros(d)),
        NamedConnection::Natural => Ok(BilinearMap { coeffs: &split.bracket_mm_m * 0.5 }),
        NamedConnection::Tanaka => {
            let o = AmbientPoint::origin(split.n);
            let e = origin_frame(split.n);
            let diff = BilinearMap::from_pairs(d, |i, j| {
                let sx = sasaki_at(&o, &e[i]).expect("based at o");
                let sy = sasaki_at(&o, &e[j]).expect("based at o");
                let v: Vec<Complex64> = (0..=split.n)
                    .map(|l| sx.eta * sy.psi.v[l] + sy.eta * sx.psi.v[l] + sx.xi.v[l] * phi(&o, &e[i], &e[j]))
                    .collect();
                tangent_to_m(&TangentVector { base: o.clone(), v })
            });
            Ok(&levi_civita(split)? + &diff)
        }
        NamedConnection::Characteristic => {
            let class = SphereClass::for_n(split.n);
            skew_family(class, 1.0, None, split)
        }
    }
}

fn origin_frame(n: usize) -> Vec<TangentVector> {
    let d = 2 * n + 1;
    (0..d)
        .map(|k| {
            let mut c = vec![0.0; d];
            c[k] = 1.0;
            m_to_tangent(&c).expect("canonical basis vector")
        })
        .collect()
}

/// D_1(X,Y) = Phi(X,Y) xi - eta(X) psi(Y) + eta(Y) psi(X) at o.
pub fn sasakian_skew_tensor(n: usize) -> BilinearMap {
    let o = AmbientPoint::origin(n);
    let e = origin_frame(n);
    BilinearMap::from_pairs(2 * n + 1, |i, j| {
        let sx = sasaki_at(&o, &e[i]).expect("based at o");
        let sy = sasaki_at(&o, &e[j]).expect("based at o");
        let f = phi(&o, &e[i], &e[j]);
        let v: Vec<Complex64> = (0..=n).map(|l| sx.xi.v[l] * f - sx.eta * sy.psi.v[l] + sy.eta * sx.psi.v[l]).collect();
        tangent_to_m(&TangentVector { base: o.clone(), v })
    })
}

/// Theta and Theta~ at o on S^7.
pub fn theta_maps() -> (BilinearMap, BilinearMap) {
    let o = AmbientPoint::origin(3);
    let e = origin_frame(3);
    let pairs: Vec<Vec<(Vec<f64>, Vec<f64>)>> = (0..7)
        .map(|i| {
            (0..7)
                .map(|j| {
                    let (t, tt) = quaternionic::theta_ops(&o, &e[i], &e[j]).expect("S^7 at o");
                    (tangent_to_m(&t), tangent_to_m(&tt))
                })
                .collect()
        })
        .collect();
    (
        BilinearMap::from_pairs(7, |i, j| pairs[i][j].0.clone()),
        BilinearMap::from_pairs(7, |i, j| pairs[i][j].1.clone()),
    )
}

/// The two octonionic skew tensors on S^5 at o (coefficients of Re q, Im q).
pub fn s5_skew_tensors() -> (BilinearMap, BilinearMap) {
    let o = AmbientPoint::origin(2);
    let e = origin_frame(2);
    let hat = |x: &TangentVector| octonion::psi_hat_at(&o, x).expect("S^5 at o");
    let sas = |x: &TangentVector| sasaki_at(&o, x).expect("based at o");
    let re_part = BilinearMap::from_pairs(5, |i, j| {
        let (x, y) = (&e[i], &e[j]);
        let (sx, sy) = (sas(x), sas(y));
        let ppx = sas(&hat(x)).psi;
        let ppy = sas(&hat(y)).psi;
        let f = phi(&o, &hat(x), y);
        let v: Vec<Complex64> = (0..3).map(|l| sy.eta * ppx.v[l] - sx.eta * ppy.v[l] + sx.xi.v[l] * f).collect();
        tangent_to_m(&TangentVector { base: o.clone(), v })
    });
    let im_part = BilinearMap::from_pairs(5, |i, j| {
        let (x, y) = (&e[i], &e[j]);
        let (sx, sy) = (sas(x), sas(y));
        let (hx, hy) = (hat(x), hat(y));
        let f = hx.g(y);
        let v: Vec<Complex64> = (0..3).map(|l| sx.eta * hy.v[l] - sy.eta * hx.v[l] + sx.xi.v[l] * f).collect();
        tangent_to_m(&TangentVector { base: o.clone(), v })
    });
    (re_part, im_part)
}

/// The skew-torsion difference tensor D with alpha = alpha_lc + D.
pub fn skew_difference(class: SphereClass, r: f64, q: Option<Complex64>, split: &ReductiveSplit) -> Result<BilinearMap> {
    class.check(split)?;
    if q.is_some() && !class.has_q() {
        return Err(Error::InvalidInput(format!("the {class} skew family has no q parameter")));
    }
    let q = q.unwrap_or_default();
    let base = &sasakian_skew_tensor(split.n) * r;
    Ok(match class {
        SphereClass::GeneralN | SphereClass::S3 => base,
        SphereClass::S7 => {
            let (th, tht) = theta_maps();
            combination(&[&base, &th, &tht], &[1.0, q.re, q.im])
        }
        SphereClass::S5 => {
            let (a, b) = s5_skew_tensors();
            combination(&[&base, &a, &b], &[1.0, q.re, q.im])
        }
    })
}

pub fn skew_family(class: SphereClass, r: f64, q: Option<Complex64>, split: &ReductiveSplit) -> Result<BilinearMap> {
    let d = skew_difference(class, r, q, split)?;
    Ok(&levi_civita(split)? + &d)
}

/// Nomizu-level parallelism defects of the first Sasakian structure:
/// `max |alpha(X, xi)|` and `max |alpha(X, psi Y) - psi(alpha(X, Y))|`.
pub fn structure_parallel_defects(alpha: &BilinearMap, split: &ReductiveSplit) -> (f64, f64) {
    let n = split.n;
    let d = split.dim_m();
    let o = AmbientPoint::origin(n);
    let e = origin_frame(n);
    let xi = tangent_to_m(&sasaki_at(&o, &e[0]).expect("based at o").xi);
    let psi = |v: &[f64]| -> Vec<f64> {
        let t = m_to_tangent(v).expect("m-vector");
        tangent_to_m(&sasaki_at(&o, &t).expect("based at o").psi)
    };
    let mut dxi: f64 = 0.0;
    let mut dpsi: f64 = 0.0;
    for i in 0..d {
        let x = &e[i];
        let xc = tangent_to_m(x);
        dxi = dxi.max(alpha.eval(&xc, &xi).iter().fold(0.0, |m, v| m.max(v.abs())));
        for j in 0..d {
            let yc = tangent_to_m(&e[j]);
            let lhs = alpha.eval(&xc, &psi(&yc));
            let rhs = psi(&alpha.eval(&xc, &yc));
            dpsi = dpsi.max(lhs.iter().zip(&rhs).fold(0.0, |m, (a, b)| m.max((a - b).abs())));
        }
    }
    (dxi, dpsi)
}
