//! Exact and numerical calculus for classical Eisenstein series.
//!
//! The library computes the objects that enter the classical-adelic
//! dictionary for Eisenstein series on GL(2) over the rationals:
//!
//! - exact q-expansions of the classical series (level one, weight two with
//!   level, and with Dirichlet character), together with the Hecke/level
//!   operators relating them ([`qseries`]);
//! - Dirichlet characters, their local components, Gauss sums and local
//!   ε-factors in exact cyclotomic arithmetic ([`dirichlet`]);
//! - local Whittaker functionals and intertwining operators at a finite
//!   prime, both in closed form and by stabilized shell integrals
//!   ([`padic`]);
//! - their archimedean counterparts via Γ-function formulas and adaptive
//!   quadrature, plus Maass/Lie differential operator checks ([`arch`]);
//! - the assembly of global Fourier coefficients from local data and the
//!   cross-check against the classical expansions ([`adelic`]);
//! - numerical verification of modular transformation laws on the upper
//!   half plane ([`analytic`]).
//!
//! Everything that can be exact is exact: coefficients are big rationals or
//! elements of cyclotomic fields, and the oracle-style checks (shell sums
//! vs. closed forms, quadrature vs. Γ-formulas, adelic vs. classical) compare
//! with exact equality whenever the parameter `s` is a half-integer.

pub mod arith;
pub mod dirichlet;
pub mod qseries;
pub mod padic;
pub mod arch;
pub mod adelic;
pub mod analytic;
pub mod suite;

mod error;

pub use error::{Error, Result};
