use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Rational point `numerator / denominator` of the circle `R/Z`, reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CirclePointRational {
    numerator: u64,
    denominator: u64,
}

impl CirclePointRational {
    /// Reduces `numerator / denominator` modulo one and to lowest terms.
    pub fn new(numerator: u64, denominator: u64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::InvalidArgument(
                "denominator must be positive".into(),
            ));
        }
        Ok(Self::reduced(numerator % denominator, denominator))
    }

    pub const ZERO: Self = Self {
        numerator: 0,
        denominator: 1,
    };

    fn reduced(num: u64, den: u64) -> Self {
        let g = gcd(num, den);
        Self {
            numerator: num / g,
            denominator: den / g,
        }
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// `θ ↦ k^e θ mod 1`, by modular exponentiation.
    pub fn mul_pow(&self, k: u64, e: u32) -> Self {
        let q = self.denominator as u128;
        let mut acc = self.numerator as u128 % q;
        let (mut base, mut e) = (k as u128 % q, e);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % q;
            }
            base = base * base % q;
            e >>= 1;
        }
        Self::reduced(acc as u64, self.denominator)
    }
}

impl fmt::Display for CirclePointRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

impl FromStr for CirclePointRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("malformed rational {s:?}"));
        match s.trim().split_once('/') {
            Some((p, q)) => Self::new(
                p.trim().parse().map_err(|_| bad())?,
                q.trim().parse().map_err(|_| bad())?,
            ),
            None => Self::new(s.trim().parse().map_err(|_| bad())?, 1),
        }
    }
}

impl Serialize for CirclePointRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `θ ↦ kθ mod 1` on rationals; `k ≥ 2`.
pub fn circle_mult(k: u64, p: CirclePointRational) -> CirclePointRational {
    p.mul_pow(k, 1)
}

/// Order of `k` in `(Z/mZ)^*`; `None` if `gcd(k, m) ≠ 1`.
pub fn multiplicative_order(k: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    if gcd(k % m, m) != 1 {
        return None;
    }
    let mut x = k % m;
    let mut order = 1;
    while x != 1 {
        x = (x as u128 * k as u128 % m as u128) as u64;
        order += 1;
    }
    Some(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::eventual_period;

    fn q(n: u64, d: u64) -> CirclePointRational {
        CirclePointRational::new(n, d).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(
            circle_mult(4, CirclePointRational::ZERO),
            CirclePointRational::ZERO
        );
        assert_eq!(circle_mult(4, q(1, 4)), CirclePointRational::ZERO);
        let once = circle_mult(6, q(1, 7));
        assert_eq!(once, q(6, 7));
        assert_eq!(circle_mult(6, once), q(1, 7));
    }

    #[test]
    fn reduced_form_and_text() {
        let p = q(10, 4);
        assert_eq!((p.numerator(), p.denominator()), (1, 2));
        assert_eq!(p.to_string(), "1/2");
        assert_eq!("3/9".parse::<CirclePointRational>().unwrap(), q(1, 3));
        assert_eq!(
            "0".parse::<CirclePointRational>().unwrap(),
            CirclePointRational::ZERO
        );
        assert!("1/0".parse::<CirclePointRational>().is_err());
        assert!("x/2".parse::<CirclePointRational>().is_err());
    }

    #[test]
    fn semigroup_law_on_rationals() {
        for d in 1..60 {
            for n in 0..d {
                let p = q(n, d);
                let a = circle_mult(4, circle_mult(6, p));
                assert_eq!(a, circle_mult(24, p));
                assert_eq!(a, circle_mult(6, circle_mult(4, p)));
                assert_eq!(
                    p.mul_pow(4, 3),
                    circle_mult(4, circle_mult(4, circle_mult(4, p)))
                );
            }
        }
    }

    #[test]
    fn periods_divide_multiplicative_order() {
        for k in [3u64, 4, 6] {
            for d in 1..=100 {
                // strip primes shared with k: that part is eaten by the preperiod
                let mut core = d;
                loop {
                    let g = gcd(core, k);
                    if g == 1 {
                        break;
                    }
                    core /= g;
                }
                let order = multiplicative_order(k, core).unwrap();
                for n in 0..d {
                    let (_, period) = eventual_period(q(n, d), |p| circle_mult(k, *p));
                    assert_eq!(order % period as u64, 0, "k={k} {n}/{d}");
                }
            }
        }
    }
}
