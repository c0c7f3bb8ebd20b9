//! Extended real numbers `[-inf, +inf]`.
//!
//! Infinities are stored as IEEE infinities; NaN is never a valid value.
//! Addition follows the optimizer's convention `(+inf) + (-inf) = +inf`, so
//! subtraction gives `(+inf) - (+inf) = +inf` as well.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[repr(transparent)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);
    pub const NEG_INFINITY: ExtReal = ExtReal(f64::NEG_INFINITY);

    /// Wraps a float; NaN is rejected.
    pub fn new(v: f64) -> Result<Self> {
        if v.is_nan() {
            Err(Error::Domain("NaN is not an extended real".into()))
        } else {
            Ok(ExtReal(v))
        }
    }

    /// Wraps a float known not to be NaN.
    ///
    /// # Panics
    /// Panics on NaN.
    pub fn finite_or_inf(v: f64) -> Self {
        assert!(!v.is_nan(), "NaN is not an extended real");
        ExtReal(v)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_pos_inf(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn is_neg_inf(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// Multiplication by a nonnegative scalar with `0 * (+-inf) = 0`.
    pub fn scale(self, t: f64) -> Self {
        assert!(t >= 0.0, "scale factor must be nonnegative");
        if t == 0.0 {
            ExtReal::ZERO
        } else {
            ExtReal(self.0 * t)
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

/// Raw float addition under the `(+inf) + (-inf) = +inf` convention.
#[inline]
pub fn ext_add(a: f64, b: f64) -> f64 {
    if a == f64::INFINITY || b == f64::INFINITY {
        f64::INFINITY
    } else {
        a + b
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        ExtReal(ext_add(self.0, rhs.0))
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        ExtReal(-self.0)
    }
}

impl Sub for ExtReal {
    type Output = ExtReal;
    fn sub(self, rhs: ExtReal) -> ExtReal {
        self + (-rhs)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl From<ExtReal> for f64 {
    fn from(v: ExtReal) -> f64 {
        v.0
    }
}

impl TryFrom<f64> for ExtReal {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        ExtReal::new(v)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pos_inf() {
            f.write_str("+inf")
        } else if self.is_neg_inf() {
            f.write_str("-inf")
        } else {
            fmt::Display::fmt(&self.0, f)
        }
    }
}

/// Serializes finite values as JSON numbers and infinities as the
/// `"+inf"` / `"-inf"` string sentinels.
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_pos_inf() {
            s.serialize_str("+inf")
        } else if self.is_neg_inf() {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(ExtReal(v)),
            Repr::Text(t) => match t.as_str() {
                "+inf" | "inf" => Ok(ExtReal::INFINITY),
                "-inf" => Ok(ExtReal::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!(
                    "expected a number or an infinity sentinel, got `{other}`"
                ))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mixed_infinities_resolve_to_plus_infinity() {
        assert_eq!(ExtReal::INFINITY + ExtReal::NEG_INFINITY, ExtReal::INFINITY);
        assert_eq!(ExtReal::NEG_INFINITY + ExtReal::INFINITY, ExtReal::INFINITY);
        assert_eq!(ExtReal::INFINITY - ExtReal::INFINITY, ExtReal::INFINITY);
        assert_eq!(
            ExtReal::NEG_INFINITY + ExtReal::NEG_INFINITY,
            ExtReal::NEG_INFINITY
        );
    }

    #[test]
    fn nan_is_rejected() {
        assert!(ExtReal::new(f64::NAN).is_err());
    }

    #[test]
    fn zero_times_infinity_is_zero() {
        assert_eq!(ExtReal::INFINITY.scale(0.0), ExtReal::ZERO);
        assert_eq!(ExtReal::INFINITY.scale(2.0), ExtReal::INFINITY);
    }

    #[test]
    fn sentinels_round_trip_through_json() {
        let vals = vec![ExtReal::INFINITY, ExtReal::NEG_INFINITY, ExtReal(0.1)];
        let s = serde_json::to_string(&vals).unwrap();
        assert_eq!(s, r#"["+inf","-inf",0.1]"#);
        let back: Vec<ExtReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vals);
    }

    fn finite_or_plus_inf() -> impl Strategy<Value = ExtReal> {
        prop_oneof![
            4 => (-1e6f64..1e6).prop_map(ExtReal),
            1 => Just(ExtReal::INFINITY),
        ]
    }

    proptest! {
        #[test]
        fn addition_is_associative_with_plus_infinity(
            a in finite_or_plus_inf(), b in finite_or_plus_inf(), c in finite_or_plus_inf()
        ) {
            let l = (a + b) + c;
            let r = a + (b + c);
            if l.is_finite() {
                prop_assert!((l.value() - r.value()).abs() <= 1e-9 * (1.0 + l.value().abs()));
            } else {
                prop_assert_eq!(l, r);
            }
        }

        #[test]
        fn finite_addition_matches_f64(a in -1e12f64..1e12, b in -1e12f64..1e12) {
            prop_assert_eq!((ExtReal(a) + ExtReal(b)).value(), a + b);
        }
    }
}
