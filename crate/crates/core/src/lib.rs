//! Invariant affine connections on odd-dimensional spheres `S^{2n+1} = SU(n+1)/SU(n)`.
//!
//! The crate builds the reductive split of su(n+1), solves for the
//! SU(n)-equivariant bilinear maps on m, evaluates the Nomizu curvature and
//! torsion calculus on them, and provides closed-form connection families
//! together with the Sasakian, 3-Sasakian and octonionic tensors they are
//! assembled from.

pub mod connection_families;
pub mod error;
pub mod invariant_solver;
pub mod lie_core;
pub mod nomizu_calculus;
pub mod report_cli;
pub mod sampling;
pub mod sphere_geometry;
pub mod verify;

pub use connection_families::{family_alpha, named_connection, skew_family, FamilyParams, NamedConnection, SphereClass};
pub use error::{Error, Result};
pub use invariant_solver::{BilinearMap, MapSpace};
pub use lie_core::{reductive_split, MVector, ReductiveSplit};
pub use nomizu_calculus::{curvature_invariants, ConnectionReport, EinsteinVerdict};
