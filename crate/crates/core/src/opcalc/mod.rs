//! Symbolic Wirtinger calculus on the tube domain K_ℝ + iC and the suites
//! checking the operator identities used for the lift.
//!
//! Equality of two operators is tested on a finite set of functions. An
//! operator of order d whose coefficients are smooth is zero as soon as it
//! kills every monomial of degree ≤ d in the coordinates it differentiates
//! (its coefficient of ∂^α is read off by applying it to z^α, inductively in
//! |α|). Operators built from holomorphic derivatives only therefore need
//! holomorphic monomials only.

pub mod gauss;
pub mod poly;
pub mod element;
pub mod ops;
pub mod group;
pub mod suites;

pub use element::{Base, DiffElement, Key, Point, Space};
pub use gauss::Gq;
pub use group::{check_cocycle, slash, GroupElement};
pub use ops::{apply, Op};
pub use poly::Poly;

pub use suites::{eigen_kernel, run_suite, Check, KernelResult, Report, Sign};
