//! Exact scalars: arbitrary-precision rationals and rational intervals.
//!
//! `Scalar` is the coefficient field of the whole crate. `num_rational`
//! keeps values reduced with a positive denominator, which is exactly the
//! representation invariant we need, so no wrapper is introduced.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational number; always reduced, denominator > 0.
pub type Scalar = BigRational;

/// Shorthand for small rational constants.
pub fn rat(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for small integer constants.
pub fn int(n: i64) -> Scalar {
    Scalar::from(BigInt::from(n))
}

/// `x^e` for a possibly negative exponent. `0^0 = 1`; `0^e` for `e < 0`
/// panics like ordinary division by zero would.
pub fn powi(x: &Scalar, e: i32) -> Scalar {
    if e == 0 {
        return Scalar::one();
    }
    let p = x.pow(e.unsigned_abs() as i32);
    if e > 0 {
        p
    } else {
        p.recip()
    }
}

/// Parse a rational from `"p"` or `"p/q"` decimal strings, exactly.
pub fn parse_rational(s: &str) -> Option<Scalar> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Scalar::new(n, d))
}

/// A deterministic generator of "generic" small rationals, used to pick
/// evaluation points for polynomial-identity testing. SplitMix64 core,
/// so runs reproduce from the seed alone.
#[derive(Clone, Debug)]
pub struct GenericPoints {
    state: u64,
}

impl GenericPoints {
    pub fn new(seed: u64) -> Self {
        GenericPoints { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// A nonzero rational with numerator in `±[1, 40]` and denominator in
    /// `[41, 97]`, so distinct draws rarely collide.
    pub fn next_rational(&mut self) -> Scalar {
        let n = (self.next_u64() % 40) as i64 + 1;
        let sign = if self.next_u64() % 2 == 0 { 1 } else { -1 };
        let d = (self.next_u64() % 57) as i64 + 41;
        rat(sign * n, d)
    }

    /// A rational strictly inside (0, 1).
    pub fn next_unit_interval(&mut self) -> Scalar {
        let d = (self.next_u64() % 50) as i64 + 7;
        let n = (self.next_u64() % (d as u64 - 1)) as i64 + 1;
        rat(n, d)
    }

    /// `count` pairwise-distinct nonzero rationals.
    pub fn distinct_rationals(&mut self, count: usize) -> Vec<Scalar> {
        let mut out: Vec<Scalar> = Vec::with_capacity(count);
        while out.len() < count {
            let c = self.next_rational();
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }
}

/// Closed rational interval `[lo, hi]`, used for certified enclosures of
/// values that are not rational (infinite q-products, partition-sum tails).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl RatInterval {
    pub fn new(lo: Scalar, hi: Scalar) -> Self {
        debug_assert!(lo <= hi, "interval endpoints out of order");
        RatInterval { lo, hi }
    }

    pub fn point(x: Scalar) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn add(&self, other: &RatInterval) -> RatInterval {
        RatInterval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn mul(&self, other: &RatInterval) -> RatInterval {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        RatInterval::new(lo, hi)
    }

    /// Reciprocal of an interval that does not contain zero.
    pub fn recip(&self) -> RatInterval {
        assert!(
            self.lo.is_positive() || self.hi.is_negative(),
            "interval straddles zero"
        );
        RatInterval::new(self.hi.recip(), self.lo.recip())
    }

    /// Divide by an interval not containing zero.
    pub fn div(&self, other: &RatInterval) -> RatInterval {
        self.mul(&other.recip())
    }
}

/// Total order on magnitudes |a| vs |b|.
pub fn cmp_abs(a: &Scalar, b: &Scalar) -> Ordering {
    a.abs().cmp(&b.abs())
}

/// Render a scalar as `p/q` (or `p` when integral).
pub fn display_scalar(x: &Scalar) -> String {
    use alloc::format;
    if x.denom().is_one() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
