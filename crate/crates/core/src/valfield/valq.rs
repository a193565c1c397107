//! The value group ℚ ∪ {∞}, written additively. INF is the valuation of 0;
//! it absorbs addition and sits on top of the order.

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Exact rational scalar used for valuations, slopes and radii exponents.
pub type QRat = Ratio<i64>;

pub fn qrat(num: i64, den: i64) -> QRat {
    Ratio::new(num, den)
}

/// A rational valuation or the distinguished value INF = val(0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValQ {
    Fin(QRat),
    Inf,
}

impl ValQ {
    pub fn zero() -> Self {
        ValQ::Fin(QRat::zero())
    }

    pub fn int(n: i64) -> Self {
        ValQ::Fin(QRat::from_integer(n))
    }

    pub fn rat(num: i64, den: i64) -> Self {
        ValQ::Fin(Ratio::new(num, den))
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, ValQ::Inf)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_inf()
    }

    pub fn finite(&self) -> Option<QRat> {
        match self {
            ValQ::Fin(q) => Some(*q),
            ValQ::Inf => None,
        }
    }

    pub fn expect_finite(&self) -> QRat {
        self.finite().expect("expected finite valuation")
    }

    /// Additive combination; INF absorbs.
    pub fn add(&self, other: &ValQ) -> ValQ {
        match (self, other) {
            (ValQ::Fin(a), ValQ::Fin(b)) => ValQ::Fin(a + b),
            _ => ValQ::Inf,
        }
    }

    /// Subtraction of a finite valuation; INF minus finite stays INF.
    pub fn sub_fin(&self, other: QRat) -> ValQ {
        match self {
            ValQ::Fin(a) => ValQ::Fin(a - other),
            ValQ::Inf => ValQ::Inf,
        }
    }

    pub fn scale(&self, k: QRat) -> ValQ {
        match self {
            ValQ::Fin(a) => ValQ::Fin(a * k),
            ValQ::Inf => ValQ::Inf,
        }
    }

    pub fn min(self, other: ValQ) -> ValQ {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: ValQ) -> ValQ {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, ValQ::Fin(q) if q.is_negative())
    }
}

impl PartialOrd for ValQ {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ValQ {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ValQ::Inf, ValQ::Inf) => Ordering::Equal,
            (ValQ::Inf, ValQ::Fin(_)) => Ordering::Greater,
            (ValQ::Fin(_), ValQ::Inf) => Ordering::Less,
            (ValQ::Fin(a), ValQ::Fin(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ValQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValQ::Inf => write!(f, "INF"),
            ValQ::Fin(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
        }
    }
}

/// Render a multiplicative radius c^v with c = 1/p, i.e. the string `p^(-v)`.
/// Valuation 0 prints as `1` and INF prints as `0`.
pub fn mult_radius_string(p: u64, v: ValQ) -> String {
    match v {
        ValQ::Inf => "0".to_string(),
        ValQ::Fin(q) if q.is_zero() => "1".to_string(),
        ValQ::Fin(q) => {
            let neg = -q;
            if neg.is_integer() {
                format!("{p}^{}", neg.numer())
            } else {
                format!("{p}^({}/{})", neg.numer(), neg.denom())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inf_is_absorbing_and_maximal() {
        let v = ValQ::rat(7, 2);
        assert_eq!(v.add(&ValQ::Inf), ValQ::Inf);
        assert!(ValQ::Inf > v);
        assert_eq!(ValQ::Inf.min(v), v);
    }

    #[test]
    fn display_forms() {
        assert_eq!(ValQ::rat(-3, 2).to_string(), "-3/2");
        assert_eq!(ValQ::int(4).to_string(), "4");
        assert_eq!(ValQ::Inf.to_string(), "INF");
        assert_eq!(mult_radius_string(3, ValQ::int(2)), "3^-2");
        assert_eq!(mult_radius_string(3, ValQ::zero()), "1");
        assert_eq!(mult_radius_string(2, ValQ::rat(-1, 2)), "2^(1/2)");
        assert_eq!(mult_radius_string(5, ValQ::Inf), "0");
    }
}
