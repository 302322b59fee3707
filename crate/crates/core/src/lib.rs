//! Exact computations for the naturally graded non-Lie p-filiform Leibniz
//! algebras `μ1`, `μ2`, `μ3`: multiplication tables, nilpotency invariants,
//! parametrized automorphism groups, local-automorphism patterns and
//! pointwise certificates.
//!
//! ```
//! use leibnizlab::{build, build_aut, certify_point, is_automorphism, AutParams, Family, FamilySpec, Rational};
//! use leibnizlab::scalar::rat;
//!
//! let spec = FamilySpec::new(Family::Mu1, 6, 1)?;
//! let a = build(&spec);
//! assert!(a.leibniz_violations().is_empty());
//! assert_eq!(a.char_seq_at(&a.unit_vector(0))?.to_string(), "(4,1,1)");
//!
//! let mut p = AutParams::<Rational>::identity(&spec);
//! p.a[0] = rat(2);
//! let phi = build_aut(&spec, &p)?.m;
//! assert!(is_automorphism(&a, &phi).is_automorphism());
//!
//! // A local automorphism agrees with some automorphism at every point.
//! let cert = certify_point(&spec, &phi, &a.unit_vector(1)).unwrap();
//! assert!(cert.verify(&spec));
//! # Ok::<(), leibnizlab::Error>(())
//! ```

pub mod algebra;
pub mod automorphism;
pub mod catalog;
pub mod error;
pub mod linsys;
pub mod local;
pub mod matrix;
pub mod scalar;
pub mod sweep;

pub use algebra::{Algebra, CharSeq, SeriesKind, SeriesReport};
pub use automorphism::{build_aut, is_automorphism, AutCheck, AutMatrix, AutParams};
pub use catalog::{build, Family, FamilySpec};
pub use error::{Error, Result};
pub use local::{certify_point, certify_probes, localaut_pattern, Certificate, MatrixPattern};
pub use matrix::Matrix;
pub use scalar::{RadicalScalar, Rational};
pub use sweep::{sweep, SweepRow};
