//! Exact arithmetic in `Z_p` and its totally ramified cyclotomic extensions.

mod character;
mod context;
mod elt;
mod series;
mod valuation;
mod weight;

pub use character::DirichletCharacter;
pub use context::{PadicContext, DEFAULT_PREC};
pub use elt::CycloElt;
pub use series::{binomial_coeffs, binomial_power, exp, hensel_sqrt, log1p, teichmuller, SeriesSum};
pub use valuation::{Valuation, Q};
pub use weight::{diamond, WeightChar};

