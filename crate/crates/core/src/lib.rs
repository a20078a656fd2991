//! Series-preserving isomorphism and automorphism groups of finite groups.
//!
//! Given finite groups as Cayley tables together with composition series,
//! this crate decides whether an isomorphism matching the series exists and
//! computes the full group of series-preserving automorphisms, in time
//! polynomial in the group order.  The machinery is organised as:
//!
//! * [`group`] — Cayley-table arithmetic: subgroups, centralizers, quotients,
//!   normal closures, minimal normal subgroups.
//! * [`perm`] / [`permgroup`] — permutation-group engine: strong generating
//!   sets, orbits, blocks, kernels, solvability, solvable-witness bookkeeping.
//! * [`setstab`] — divide-and-conquer set stabilizer and set transporter,
//!   valid for cosets of almost-solvable groups.
//! * [`lifting`] — lifting pairs of automorphisms of `G/H` and `H` to
//!   automorphisms of `G`, through supergroups of `Aut(G)` cut out by
//!   one-sided or two-sided multiplicativity laws.
//! * [`series`] — the composition-series solvers: bottom-up and top-down
//!   automorphism computation, isomorphism via a direct product, series
//!   enumeration and characteristic refinement.
//! * [`oracle`] — independent brute-force ground truth used by the test
//!   suites; shares nothing with the solvers beyond the core types.
//! * [`io`] — JSON file formats used by the CLI and the C API.

pub mod action;
pub mod chain;
pub mod error;
pub mod group;
pub mod homsearch;
pub mod io;
pub mod lifting;
pub mod oracle;
pub mod perm;
pub mod permgroup;
pub mod series;
pub mod setstab;

pub use error::{CsisoError, EngineError, GroupError};
pub use group::{CayleyGroup, GroupHom, GroupRef, Subgroup};
pub use perm::Perm;
pub use permgroup::{GroupCoset, PermGroup, SolvableWitness};
