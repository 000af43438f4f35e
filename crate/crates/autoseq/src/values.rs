//! Exact arithmetic on the output alphabet: zero or a root of unity
//! e^(2*pi*i*k/m), stored as the reduced fraction k/m. Equality is decidable
//! and exact; no floating point is involved anywhere.

use std::fmt;

/// Largest root order accepted when parsing value tokens. Internal
/// arithmetic is not subject to this limit; it only guards external input.
pub const DEFAULT_ORDER_LIMIT: u64 = 360;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueError {
    /// Token parsed to a root whose canonical order exceeds the limit.
    OrderLimitExceeded { ord: u64, limit: u64 },
    /// Token is not `Z`, `W:k/m` in canonical form, or an accepted alias.
    InvalidToken(String),
}

impl fmt::Display for ValueError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueError::OrderLimitExceeded { ord, limit } => {
                write!(f, "root order {ord} exceeds limit {limit}")
            }
            ValueError::InvalidToken(tok) => write!(f, "invalid value token `{tok}`"),
        }
    }
}

impl std::error::Error for ValueError {}

/// Zero or the root of unity e^(2*pi*i*num/ord).
///
/// The `Root` form is canonical: `0 <= num < ord` and `gcd(num, ord) = 1`,
/// with the value 1 represented as `Root { num: 0, ord: 1 }`. Two values are
/// equal exactly when their representations are identical, so derived
/// equality is semantic equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnitValue {
    Zero,
    Root { num: u64, ord: u64 },
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

impl UnitValue {
    pub const ZERO: UnitValue = UnitValue::Zero;
    pub const ONE: UnitValue = UnitValue::Root { num: 0, ord: 1 };
    pub const MINUS_ONE: UnitValue = UnitValue::Root { num: 1, ord: 2 };

    /// Canonical root with exponent `num/ord` (mod 1). Panics if `ord` is 0.
    pub fn root(num: i64, ord: u64) -> UnitValue {
        assert!(ord > 0, "root order must be positive");
        let m = ord as i128;
        let k = (num as i128).rem_euclid(m);
        Self::canonical(k as u128, ord as u128)
    }

    fn canonical(num: u128, ord: u128) -> UnitValue {
        debug_assert!(num < ord);
        let g = if num == 0 { ord } else { gcd(num, ord) };
        let (num, ord) = (num / g, ord / g);
        assert!(
            ord <= u64::MAX as u128,
            "root order exceeds 64 bits; value set is not desk scale"
        );
        UnitValue::Root {
            num: num as u64,
            ord: ord as u64,
        }
    }

    pub fn is_zero(self) -> bool {
        self == UnitValue::Zero
    }

    /// Multiply two values: zero absorbs, roots add exponents mod 1.
    pub fn mul(self, other: UnitValue) -> UnitValue {
        match (self, other) {
            (UnitValue::Zero, _) | (_, UnitValue::Zero) => UnitValue::Zero,
            (UnitValue::Root { num: k1, ord: m1 }, UnitValue::Root { num: k2, ord: m2 }) => {
                let (k1, m1, k2, m2) = (k1 as u128, m1 as u128, k2 as u128, m2 as u128);
                let num = k1 * m2 + k2 * m1;
                let ord = m1 * m2;
                Self::canonical(num % ord, ord)
            }
        }
    }

    /// Raise to a nonnegative power; `pow(a, 0)` is 1 for every `a`
    /// including zero.
    pub fn pow(self, e: u64) -> UnitValue {
        if e == 0 {
            return UnitValue::ONE;
        }
        match self {
            UnitValue::Zero => UnitValue::Zero,
            UnitValue::Root { num, ord } => {
                let m = ord as u128;
                let k = (num as u128 * e as u128) % m;
                Self::canonical(k, m)
            }
        }
    }

    /// Absolute value: zero stays zero, every root maps to 1.
    pub fn abs(self) -> UnitValue {
        match self {
            UnitValue::Zero => UnitValue::Zero,
            UnitValue::Root { .. } => UnitValue::ONE,
        }
    }

    /// Multiplicative inverse of a root; zero has none.
    pub fn inv(self) -> Option<UnitValue> {
        match self {
            UnitValue::Zero => None,
            UnitValue::Root { num, ord } => Some(if num == 0 {
                UnitValue::ONE
            } else {
                UnitValue::Root {
                    num: ord - num,
                    ord,
                }
            }),
        }
    }

    /// Parse a value token with the default order limit.
    pub fn parse(token: &str) -> Result<UnitValue, ValueError> {
        Self::parse_with_limit(token, DEFAULT_ORDER_LIMIT)
    }

    /// Parse `Z`, canonical `W:k/m`, or the input aliases `1` and `-1`.
    /// Non-canonical fractions are rejected rather than normalized so that
    /// serialized forms are bit-exact.
    pub fn parse_with_limit(token: &str, limit: u64) -> Result<UnitValue, ValueError> {
        match token {
            "Z" => return Ok(UnitValue::Zero),
            "1" => return Ok(UnitValue::ONE),
            "-1" => return Ok(UnitValue::MINUS_ONE),
            _ => {}
        }
        let bad = || ValueError::InvalidToken(token.to_string());
        let rest = token.strip_prefix("W:").ok_or_else(bad)?;
        let (k, m) = rest.split_once('/').ok_or_else(bad)?;
        // Reject signs, leading zeros and other non-canonical spellings.
        let canonical_digits = |s: &str| {
            !s.is_empty()
                && s.bytes().all(|b| b.is_ascii_digit())
                && (s == "0" || !s.starts_with('0'))
        };
        if !canonical_digits(k) || !canonical_digits(m) {
            return Err(bad());
        }
        let num: u64 = k.parse().map_err(|_| bad())?;
        let ord: u64 = m.parse().map_err(|_| bad())?;
        if ord == 0 || num >= ord || gcd(num as u128, ord as u128) != 1 {
            return Err(bad());
        }
        if num == 0 && ord != 1 {
            return Err(bad());
        }
        if ord > limit {
            return Err(ValueError::OrderLimitExceeded { ord, limit });
        }
        Ok(UnitValue::Root { num, ord })
    }
}

impl fmt::Display for UnitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitValue::Zero => write!(f, "Z"),
            UnitValue::Root { num, ord } => write!(f, "W:{num}/{ord}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Float oracle: the complex number a value denotes.
    fn to_complex(v: UnitValue) -> (f64, f64) {
        match v {
            UnitValue::Zero => (0.0, 0.0),
            UnitValue::Root { num, ord } => {
                let theta = 2.0 * std::f64::consts::PI * num as f64 / ord as f64;
                (theta.cos(), theta.sin())
            }
        }
    }

    fn complex_close(a: (f64, f64), b: (f64, f64)) -> bool {
        (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12
    }

    /// Random root of order at most 360.
    fn random_root(rng: &mut StdRng) -> UnitValue {
        let ord = rng.gen_range(1..=360u64);
        UnitValue::root(rng.gen_range(0..ord as i64), ord)
    }

    #[test]
    fn mul_examples() {
        assert_eq!(UnitValue::Zero.mul(UnitValue::MINUS_ONE), UnitValue::Zero);
        assert_eq!(
            UnitValue::MINUS_ONE.mul(UnitValue::MINUS_ONE),
            UnitValue::ONE
        );
        // 1/3 + 1/6 = 1/2, cross-checked in complex arithmetic.
        let product = UnitValue::root(1, 3).mul(UnitValue::root(1, 6));
        assert_eq!(product, UnitValue::root(1, 2));
        let oracle = {
            let (ar, ai) = to_complex(UnitValue::root(1, 3));
            let (br, bi) = to_complex(UnitValue::root(1, 6));
            (ar * br - ai * bi, ar * bi + ai * br)
        };
        assert!(complex_close(to_complex(product), oracle));
    }

    #[test]
    fn pow_examples() {
        assert_eq!(UnitValue::root(1, 4).pow(2), UnitValue::MINUS_ONE);
        assert_eq!(UnitValue::Zero.pow(5), UnitValue::Zero);
        // Oracle: repeated multiplication.
        let a = UnitValue::root(1, 3);
        let mut acc = UnitValue::ONE;
        for _ in 0..100 {
            acc = acc.mul(a);
        }
        assert_eq!(a.pow(100), acc);
        assert_eq!(a.pow(100), UnitValue::root(1, 3));
        assert_eq!(UnitValue::Zero.pow(0), UnitValue::ONE);
    }

    #[test]
    fn abs_examples() {
        assert_eq!(UnitValue::Zero.abs(), UnitValue::Zero);
        assert_eq!(UnitValue::MINUS_ONE.abs(), UnitValue::ONE);
        assert_eq!(UnitValue::root(3, 7).abs(), UnitValue::ONE);
    }

    #[test]
    fn group_laws() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..2000 {
            let (a, b, c) = (
                random_root(&mut rng),
                random_root(&mut rng),
                random_root(&mut rng),
            );
            assert_eq!(a.mul(b), b.mul(a));
            assert_eq!(a.mul(b).mul(c), a.mul(b.mul(c)));
            assert_eq!(a.mul(UnitValue::ONE), a);
            assert_eq!(a.mul(a.inv().unwrap()), UnitValue::ONE);
            assert_eq!(a.mul(b).abs(), a.abs().mul(b.abs()));
            // Complex cross-check of the product.
            let (ar, ai) = to_complex(a);
            let (br, bi) = to_complex(b);
            assert!(complex_close(
                to_complex(a.mul(b)),
                (ar * br - ai * bi, ar * bi + ai * br)
            ));
        }
    }

    #[test]
    fn canonicalization_is_idempotent() {
        for ord in 1..=60u64 {
            for num in 0..ord as i64 {
                let v = UnitValue::root(num, ord);
                if let UnitValue::Root { num: k, ord: m } = v {
                    assert_eq!(UnitValue::root(k as i64, m), v);
                }
            }
        }
        // Negative exponents wrap.
        assert_eq!(UnitValue::root(-1, 4), UnitValue::root(3, 4));
        assert_eq!(UnitValue::root(6, 4), UnitValue::root(1, 2));
    }

    #[test]
    fn parse_serialize_round_trip() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..500 {
            let v = if rng.gen_bool(0.1) {
                UnitValue::Zero
            } else {
                random_root(&mut rng)
            };
            assert_eq!(UnitValue::parse(&v.to_string()).unwrap(), v);
        }
    }

    #[test]
    fn parse_aliases_and_rejections() {
        assert_eq!(UnitValue::parse("1").unwrap(), UnitValue::ONE);
        assert_eq!(UnitValue::parse("-1").unwrap(), UnitValue::MINUS_ONE);
        assert_eq!(UnitValue::ONE.to_string(), "W:0/1");
        assert_eq!(UnitValue::MINUS_ONE.to_string(), "W:1/2");
        for tok in [
            "W:2/4", "W:3/3", "W:4/3", "W:0/2", "W:1/0", "W:-1/4", "W:01/2", "W:1/", "W1/2",
            "w:1/2", "", "2", "Z ", "W:1/2/3",
        ] {
            assert!(
                UnitValue::parse(tok).is_err(),
                "token {tok:?} should be rejected"
            );
        }
        assert_eq!(
            UnitValue::parse("W:1/361"),
            Err(ValueError::OrderLimitExceeded {
                ord: 361,
                limit: 360
            })
        );
        assert!(UnitValue::parse_with_limit("W:1/361", 400).is_ok());
    }
}
