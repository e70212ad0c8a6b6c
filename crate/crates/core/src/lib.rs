//! Exact algebra of formally traceless symmetric polynomials in two coupled
//! Heisenberg-Weyl pairs, the Jordan-Schwinger picture of the fuzzy sphere.
//!
//! Coefficients live in [`Scalar`], a ring over the Gaussian rationals with
//! adjoined square roots and formal powers of `eps^(1/2)` and `Rh`. Elements of
//! the Weyl algebra are [`WElement`]s; the projected algebra is built from the
//! basis [`BasisLabel`] / [`PsiElement`] with the product [`product_rho`].

pub mod coeff;
pub mod error;
pub mod poly;
pub mod weil;
pub mod psi;
pub mod hilbert;
pub mod special;
pub mod geometry;
pub mod tables;
pub mod verify;

pub use coeff::{fmt_half_int, int, parse_half_int, parse_rational, rat, Gauss, Rational, Scalar, TermKey};
pub use error::{Error, Result};
pub use hilbert::{FuzzyLevel, KetVector, RectMatrix};
pub use psi::{inner, norm_sq, product_rho, product_rho_star, rho, rho_star, xi, BasisLabel, ParamPoint, PsiElement};
pub use special::{EulerAngles, HahnSpec};
pub use tables::{build_table, Table, TableKind, TableRequest};
pub use verify::{run_verify, Check, Report, Suite, VerifyConfig};
pub use weil::{Generator, NormalMonomial, WElement};
