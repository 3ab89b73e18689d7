use core::cmp::Ordering;
use core::fmt;

use num_rational::Ratio;

/// Exact rationals used for valuations, slopes and polygon coordinates.
pub type Q = Ratio<i64>;

/// Normalised valuation (`v(p) = 1`) of an element known to finite precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Exact(Q),
    /// The element is indistinguishable from zero; its valuation is at least this.
    AtLeast(Q),
}

impl Valuation {
    /// The exact value, or the lower bound.
    pub fn bound(&self) -> Q {
        match *self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Valuation::Exact(_))
    }

    pub fn exact(&self) -> Option<Q> {
        match *self {
            Valuation::Exact(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// Certainly `>= b`.
    pub fn at_least(&self, b: Q) -> bool {
        self.bound() >= b
    }

    /// Certainly `< b`.
    pub fn below(&self, b: Q) -> bool {
        matches!(*self, Valuation::Exact(v) if v < b)
    }

    pub fn shift(self, d: Q) -> Self {
        match self {
            Valuation::Exact(v) => Valuation::Exact(v + d),
            Valuation::AtLeast(v) => Valuation::AtLeast(v + d),
        }
    }

    /// Caps knowledge at `b`: anything not certainly below `b` becomes `AtLeast(b)`.
    pub fn cap(self, b: Q) -> Self {
        match self {
            Valuation::Exact(v) if v < b => self,
            Valuation::AtLeast(v) if v < b => self,
            _ => Valuation::AtLeast(b),
        }
    }

    /// Orders by bound, exact before inexact on ties.
    pub fn cmp_bound(&self, other: &Self) -> Ordering {
        self.bound()
            .cmp(&other.bound())
            .then(other.is_exact().cmp(&self.is_exact()))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}
