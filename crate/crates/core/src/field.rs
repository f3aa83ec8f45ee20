//! Coefficient fields.
//!
//! Every symbolic object in the crate carries exact rational coefficients. Rank computations can
//! additionally be run over a prime field, which is much faster but only agrees with the rational
//! answer away from finitely many bad primes.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats a rational as `"p"` or `"p/q"`.
pub fn rational_to_string(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        BigInt::from_str(t.trim()).map_err(|_| Error::Parse(format!("bad rational `{s}`")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Rational::new(parse_int(n)?, d))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "mode", content = "p")]
pub enum FieldConfig {
    #[default]
    Rationals,
    Prime(u64),
}

impl FieldConfig {
    /// Validates the configuration against the total weight `w` of the ring.
    pub fn validated(self, total_weight: i64) -> Result<Self> {
        match self {
            FieldConfig::Rationals => Ok(self),
            FieldConfig::Prime(p) => {
                if !is_prime(p) {
                    Err(Error::InvalidField(format!("{p} is not prime")))
                } else if (p as i64) <= total_weight {
                    Err(Error::InvalidField(format!(
                        "characteristic {p} must exceed the total weight {total_weight}"
                    )))
                } else if p >= 1 << 62 {
                    Err(Error::InvalidField(format!("characteristic {p} is too large")))
                } else {
                    Ok(self)
                }
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, FieldConfig::Rationals)
    }
}

impl fmt::Display for FieldConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldConfig::Rationals => write!(f, "q"),
            FieldConfig::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for FieldConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") || s.eq_ignore_ascii_case("rationals") {
            return Ok(FieldConfig::Rationals);
        }
        if let Some(p) = s.strip_prefix("fp:") {
            let p = p
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidField(format!("bad characteristic in `{s}`")))?;
            if !is_prime(p) {
                return Err(Error::InvalidField(format!("{p} is not prime")));
            }
            return Ok(FieldConfig::Prime(p));
        }
        Err(Error::InvalidField(format!("expected `q` or `fp:P`, got `{s}`")))
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % small == 0 {
            return n == small;
        }
    }
    // deterministic Miller-Rabin for 64-bit inputs
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// `count` distinct primes in `[lower, 2^31)` drawn from a seeded generator.
pub fn random_primes(count: usize, lower: u64, seed: u64) -> Vec<u64> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let lower = lower.max(1 << 20);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let candidate = rng.gen_range(lower..(1u64 << 31)) | 1;
        if is_prime(candidate) && !out.contains(&candidate) {
            out.push(candidate);
        }
    }
    out
}

/// Arithmetic for a field whose elements are plain values and whose context (e.g. the
/// characteristic) lives in the implementor.
pub trait FieldOps: Sync {
    type Elem: Clone + Send + Sync + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Panics on zero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn from_rational(&self, q: &Rational) -> Result<Self::Elem>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RationalField;

impl FieldOps for RationalField {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn inv(&self, a: &Rational) -> Rational {
        assert!(!a.is_zero(), "inverse of zero");
        a.recip()
    }
    fn from_rational(&self, q: &Rational) -> Result<Rational> {
        Ok(q.clone())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) || p >= 1 << 62 {
            return Err(Error::InvalidField(format!("{p} is not a usable prime")));
        }
        Ok(PrimeField { p })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    fn reduce_int(&self, n: &BigInt) -> u64 {
        let r = n.mod_floor(&BigInt::from(self.p));
        r.to_u64().expect("reduced residue fits in u64")
    }
}

impl FieldOps for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero");
        pow_mod(*a, self.p - 2, self.p)
    }
    fn from_rational(&self, q: &Rational) -> Result<u64> {
        let den = self.reduce_int(q.denom());
        if den == 0 {
            return Err(Error::BadPrime(self.p));
        }
        let num = if q.numer().is_negative() {
            self.neg(&self.reduce_int(&-q.numer()))
        } else {
            self.reduce_int(q.numer())
        };
        Ok(self.mul(&num, &self.inv(&den)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(2_147_483_649));
        assert!(!is_prime(561));
    }

    #[test]
    fn field_config_parsing() {
        assert_eq!("q".parse::<FieldConfig>().unwrap(), FieldConfig::Rationals);
        assert_eq!("fp:101".parse::<FieldConfig>().unwrap(), FieldConfig::Prime(101));
        assert!("fp:100".parse::<FieldConfig>().is_err());
        assert!("z".parse::<FieldConfig>().is_err());
        assert!(FieldConfig::Prime(7).validated(9).is_err());
        assert!(FieldConfig::Prime(11).validated(9).is_ok());
    }

    #[test]
    fn prime_field_reduction() {
        let f = PrimeField::new(7).unwrap();
        let q = Rational::new(BigInt::from(-3), BigInt::from(2));
        let x = f.from_rational(&q).unwrap();
        assert_eq!(f.mul(&x, &2), f.neg(&3));
        let bad = Rational::new(BigInt::from(1), BigInt::from(14));
        assert_eq!(f.from_rational(&bad), Err(Error::BadPrime(7)));
    }

    #[test]
    fn rational_text_roundtrip() {
        for s in ["0", "-5", "3/4", "-7/2"] {
            assert_eq!(rational_to_string(&parse_rational(s).unwrap()), s);
        }
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn random_primes_are_distinct_and_large() {
        let ps = random_primes(3, 10, 42);
        assert_eq!(ps.len(), 3);
        assert!(ps.iter().all(|&p| is_prime(p) && p > 10));
        assert_ne!(ps[0], ps[1]);
        assert_eq!(ps, random_primes(3, 10, 42));
    }
}
