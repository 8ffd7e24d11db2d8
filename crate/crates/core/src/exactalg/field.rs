//! Exact scalar fields: prime fields `F_p` and the rationals.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An exact field. Elements are plain values; the field object carries the
/// arithmetic (so a runtime modulus is possible).
pub trait Field: Clone + Debug + Eq + Send + Sync {
    type Elem: Clone + Debug + PartialEq + Eq + Ord + Hash + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;
    /// All elements, in a fixed order starting with 0 then 1; `None` if infinite.
    fn elements(&self) -> Option<Vec<Self::Elem>>;
    /// Integer representative used for JSON output.
    fn to_i64(&self, a: &Self::Elem) -> Option<i64>;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// Number of elements, `None` if infinite.
    fn order(&self) -> Option<u64> {
        match self.characteristic() {
            0 => None,
            p => Some(p),
        }
    }
}

/// The prime field `Z/pZ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Result<Self> {
        if !(2..=(1 << 31)).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidField(p));
        }
        Ok(Fp { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }

    /// Whether `a` is a nonzero square.
    pub fn is_square(&self, a: u64) -> bool {
        let a = a % self.p;
        if a == 0 {
            return false;
        }
        if self.p == 2 {
            return true;
        }
        self.pow(a, (self.p - 1) / 2) == 1
    }

    /// Smallest non-square, `None` in characteristic 2.
    pub fn non_square(&self) -> Option<u64> {
        (2..self.p).find(|&a| !self.is_square(a))
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field for Fp {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if (*a).is_multiple_of(self.p) {
            None
        } else {
            Some(self.pow(*a, self.p - 2))
        }
    }
    fn is_zero(&self, a: &u64) -> bool {
        (*a).is_multiple_of(self.p)
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn elements(&self) -> Option<Vec<u64>> {
        Some((0..self.p).collect())
    }
    fn to_i64(&self, a: &u64) -> Option<i64> {
        Some(*a as i64)
    }
}

/// The field of rational numbers with arbitrary precision.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn elements(&self) -> Option<Vec<BigRational>> {
        None
    }
    fn to_i64(&self, a: &BigRational) -> Option<i64> {
        if a.is_integer() && a.abs() < BigRational::from_integer(BigInt::from(i64::MAX)) {
            a.to_integer().try_into().ok()
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_modulus() {
        assert!(Fp::new(4).is_err());
        assert!(Fp::new(1).is_err());
        assert!(Fp::new(7).is_ok());
    }

    #[test]
    fn inverses_mod_p() {
        for p in [2u64, 3, 5, 7, 11] {
            let f = Fp::new(p).unwrap();
            for a in 1..p {
                let ai = f.inv(&a).unwrap();
                assert_eq!(f.mul(&a, &ai), 1);
            }
            assert!(f.inv(&0).is_none());
        }
    }

    #[test]
    fn squares() {
        let f3 = Fp::new(3).unwrap();
        assert!(!f3.is_square(2));
        assert_eq!(f3.non_square(), Some(2));
        let f7 = Fp::new(7).unwrap();
        assert!(f7.is_square(2));
        assert!(Fp::new(2).unwrap().non_square().is_none());
    }

    #[test]
    fn rational_arithmetic() {
        let q = Rationals;
        let half = q.div(&q.one(), &q.from_i64(2)).unwrap();
        assert_eq!(q.add(&half, &half), q.one());
        assert_eq!(q.to_i64(&q.from_i64(-5)), Some(-5));
        assert_eq!(q.to_i64(&half), None);
    }
}
