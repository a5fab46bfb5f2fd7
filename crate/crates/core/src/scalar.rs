//! Scalar field abstraction and extended values.

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};

use num_traits::{FromPrimitive, Num, Signed};

/// Ordered field used for lengths, offsets and function values.
///
/// `BigRational` is the reference instantiation; floating point types satisfy
/// the bound too but only give approximate canonical forms.
pub trait Scalar:
    Clone + PartialOrd + Num + Signed + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Clone + PartialOrd + Num + Signed + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

pub(crate) fn cmp<S: Scalar>(a: &S, b: &S) -> Ordering {
    a.partial_cmp(b).expect("scalar comparison is total")
}

pub(crate) fn min<S: Scalar>(a: S, b: S) -> S {
    if b < a {
        b
    } else {
        a
    }
}

#[allow(dead_code)]
pub(crate) fn max<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}

pub(crate) fn two<S: Scalar>() -> S {
    S::one() + S::one()
}

pub(crate) fn half<S: Scalar>(a: &S) -> S {
    a.clone() / two::<S>()
}

/// A value in `S ∪ {+∞}`.
#[derive(Clone, PartialEq, PartialOrd, Debug)]
pub enum Ext<S> {
    Finite(S),
    Inf,
}

impl<S: Scalar> Ext<S> {
    pub fn zero() -> Self {
        Ext::Finite(S::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    pub fn finite(&self) -> Option<&S> {
        match self {
            Ext::Finite(v) => Some(v),
            Ext::Inf => None,
        }
    }

    pub fn add(&self, c: &S) -> Self {
        match self {
            Ext::Finite(v) => Ext::Finite(v.clone() + c.clone()),
            Ext::Inf => Ext::Inf,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl<S: Display> Display for Ext<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(v) => write!(f, "{v}"),
            Ext::Inf => write!(f, "inf"),
        }
    }
}

/// A value in `S ∪ {−∞, +∞}`, used for shift thresholds.
#[derive(Clone, PartialEq, PartialOrd, Debug)]
pub enum Threshold<S> {
    NegInf,
    Finite(S),
    PosInf,
}

impl<S: Scalar> Threshold<S> {
    /// Whether a shift `c` satisfies this threshold, i.e. `self ≤ c`.
    pub fn admits(&self, c: &S) -> bool {
        match self {
            Threshold::NegInf => true,
            Threshold::Finite(t) => t <= c,
            Threshold::PosInf => false,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Nonnegative finite part, if any: the least nonnegative shift admitted.
    pub fn clipped(&self) -> Option<S> {
        match self {
            Threshold::NegInf => Some(S::zero()),
            Threshold::Finite(t) => Some(if t.is_negative() { S::zero() } else { t.clone() }),
            Threshold::PosInf => None,
        }
    }
}

impl<S: Display> Display for Threshold<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::NegInf => write!(f, "-inf"),
            Threshold::Finite(v) => write!(f, "{v}"),
            Threshold::PosInf => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn ext_order_puts_inf_last() {
        assert!(Ext::Finite(q(1000)) < Ext::Inf);
        assert!(Ext::Finite(q(-1)) < Ext::Finite(q(0)));
        assert_eq!(Ext::Finite(q(2)).min(Ext::Inf), Ext::Finite(q(2)));
    }

    #[test]
    fn threshold_admits() {
        assert!(Threshold::<Rational>::NegInf.admits(&q(0)));
        assert!(!Threshold::<Rational>::PosInf.admits(&q(100)));
        assert!(Threshold::Finite(q(3)).admits(&q(3)));
        assert!(!Threshold::Finite(q(3)).admits(&q(2)));
        assert_eq!(Threshold::Finite(q(-2)).clipped(), Some(q(0)));
    }
}
