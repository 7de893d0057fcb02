//! Exact q-expansions of singular theta lifts on the orthogonal group of
//! signature (2, b), together with a symbolic Wirtinger calculus used to
//! check the weight raising and lowering operators acting on them.
//!
//! The crate is organised bottom-up:
//!
//! * [`series`]: truncated Laurent series in one and two variables.
//! * [`classical`]: Eisenstein series, Δ, j, bases of M_k and weakly holomorphic forms.
//! * [`phi`]: the polynomials φ_r generating Σ n^r w^n.
//! * [`lift`]: Fourier expansion of the lift Ψ.
//! * [`hilbert`]: pole clearing and tensor decomposition of Ψ.
//! * [`coeffs`]: scalar coefficient formulas (extended binomials, raising tables, ...).
//! * [`opcalc`]: the differential-algebra engine and its verification suites.
//! * [`cli`]: the command-line front end.

pub mod error;
pub mod linalg;
pub mod rat;
pub mod series;
pub mod classical;
pub mod phi;
pub mod lift;
pub mod hilbert;
pub mod coeffs;
pub mod opcalc;
pub mod cli;

pub use error::{Error, Result};
pub use rat::Q;
pub use series::{BiSeries, PowerSeries, Var};
