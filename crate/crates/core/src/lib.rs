//! Exact-arithmetic toolkit for arithmetic dynamics on projective spaces, products of
//! projective lines and powers of elliptic curves.
//!
//! Points and coefficients live in `Q` or a quadratic field `Q(sqrt(D))`. Heights come with
//! explicit error bounds, and every degree or preperiodicity verdict records how it was
//! obtained.

pub mod abelian;
pub mod arith;
pub mod degrees;
pub mod elliptic;
pub mod error;
pub mod exec;
pub mod heights;
pub mod linalg;
pub mod orbits;
pub mod parse;
pub mod poly;
pub mod projective;

pub use abelian::{
    matrix_endo_apply, matrix_endo_dyn_degree, torsion_count_ubc, zf_structure_check, MatrixEndo,
};
pub use arith::{AlgNum, Rat};
pub use degrees::{arith_degree_estimate, dyn_degree, ArithDegreeEstimate, DynDegree};
pub use elliptic::{torsion_subgroup, EllPoint, EllipticCurve};
pub use error::{DynError, Result};
pub use exec::Execution;
pub use heights::{canonical_height, height_difference_bound, neron_tate, HeightValue};
pub use orbits::{enumerate_points, family_ubc_experiment, is_preperiodic, orbit, zf_d_search};
pub use parse::{parse_map, parse_point};
pub use projective::{PolyEndo, ProjPoint};
