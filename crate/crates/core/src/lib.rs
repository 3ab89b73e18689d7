//! Exact p-adic linear algebra for slopes of `U_p` on definite quaternion forms.
//!
//! Everything here works over `O_E = Z_p[ζ]` for a `p`-power root of unity `ζ`,
//! stored in the uniformizer basis `1, π, …, π^{e-1}` with `π = ζ - 1` and
//! coefficients reduced modulo `p^prec`. No floating point is used anywhere.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod duality;
pub mod error;
pub mod fixtures;
pub mod matrix;
pub mod padic;
pub mod quatalg;
pub mod spectral;
pub mod synth;
pub mod upmat;
pub mod weightact;

pub use error::{Error, Result};
pub use matrix::{Mat2, Matrix};
pub use padic::{CycloElt, DirichletCharacter, PadicContext, Valuation, WeightChar, Q};
