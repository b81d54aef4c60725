//! Construction and exhaustive certification of large line-free sets in
//! the affine space F_p^3.
//!
//! The crate builds a layered set that beats the classical hypercube
//! [0, p-2]^3, certifies by complete line enumeration that it contains no
//! full affine line (equivalently, that its complement is a 2-blocking
//! set of AG(3, p)), checks the size against the relevant lower bound in
//! exact integer arithmetic, and tabulates the results across primes.
//!
//! Module map:
//! * [`field`] — arithmetic in F_p with a validated prime modulus;
//! * [`geometry`] — points, canonical directions, complete line
//!   enumeration over F_p^2 and F_p^3;
//! * [`pointset`] — dense bitset point sets and their on-disk formats;
//! * [`construction`] — parameters, the planar blocking sets, the layered
//!   set and its repair deletions;
//! * [`verifier`] — exhaustive line-freeness and blocking verdicts, with
//!   an independent quadratic oracle for cross-validation;
//! * [`bounds`] — exact-integer bound checks and the comparison table;
//! * [`oracle`] — branch-and-bound exact maxima on tiny instances;
//! * [`certificate`] — serializable verification records.

pub mod bounds;
pub mod certificate;
pub mod construction;
pub mod field;
pub mod geometry;
pub mod oracle;
pub mod pointset;
pub mod verifier;

pub use certificate::{Certificate, DEFAULT_SEED};
pub use construction::{Construction, ConstructionParams};
pub use field::PrimeModulus;
pub use geometry::{Dim, Direction, Line, Point};
pub use pointset::PointSet;
pub use verifier::{Verdict, VerifyOptions};
