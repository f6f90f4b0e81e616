use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Float orbits of Anosov maps are refused past this many steps.
pub const FLOAT_HORIZON_LIMIT: usize = 50;

/// Integer 2×2 matrix with determinant ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToralMatrix([[i64; 2]; 2]);

impl ToralMatrix {
    pub fn new(entries: [[i64; 2]; 2]) -> Result<Self> {
        let det = entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0];
        if det.abs() != 1 {
            return Err(Error::InvalidArgument(format!(
                "determinant {det} is not ±1"
            )));
        }
        Ok(Self(entries))
    }

    /// `[[2,1],[1,1]]`, the generator `g₁`.
    pub const A1: Self = Self([[2, 1], [1, 1]]);
    /// `[[1,1],[1,0]]`, the generator `g₂`.
    pub const A2: Self = Self([[1, 1], [1, 0]]);
    pub const IDENTITY: Self = Self([[1, 0], [0, 1]]);

    pub fn entries(&self) -> [[i64; 2]; 2] {
        self.0
    }

    pub fn det(&self) -> i64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (self.0, other.0);
        Self([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    /// Exact integer inverse; exists because the determinant is ±1.
    pub fn inverse(&self) -> Self {
        let d = self.det();
        let m = self.0;
        Self([[d * m[1][1], -d * m[0][1]], [-d * m[1][0], d * m[0][0]]])
    }

    fn reduce(&self, q: u64) -> [[u64; 2]; 2] {
        let r = |x: i64| x.rem_euclid(q as i64) as u64;
        [
            [r(self.0[0][0]), r(self.0[0][1])],
            [r(self.0[1][0]), r(self.0[1][1])],
        ]
    }

    /// `M^e mod q` for any integer `e`, negative powers through the inverse.
    pub fn pow_mod(&self, e: i64, q: u64) -> ModMatrix {
        let base = if e < 0 { self.inverse() } else { *self };
        let mut base = ModMatrix {
            m: base.reduce(q),
            q,
        };
        let mut acc = ModMatrix::identity(q);
        let mut e = e.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

/// 2×2 matrix over `Z/qZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModMatrix {
    m: [[u64; 2]; 2],
    q: u64,
}

impl ModMatrix {
    fn identity(q: u64) -> Self {
        Self {
            m: [[1 % q, 0], [0, 1 % q]],
            q,
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let q = self.q as u128;
        let e = |i: usize, j: usize| {
            ((self.m[i][0] as u128 * o.m[0][j] as u128 + self.m[i][1] as u128 * o.m[1][j] as u128)
                % q) as u64
        };
        Self {
            m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
            q: self.q,
        }
    }

    pub fn apply(&self, p: TorusPointExact) -> TorusPointExact {
        debug_assert_eq!(p.q, self.q);
        let q = self.q as u128;
        let (a, b) = (p.a as u128, p.b as u128);
        TorusPointExact {
            q: self.q,
            a: ((self.m[0][0] as u128 * a + self.m[0][1] as u128 * b) % q) as u64,
            b: ((self.m[1][0] as u128 * a + self.m[1][1] as u128 * b) % q) as u64,
        }
    }
}

/// The rational point `(a/q, b/q)` of the 2-torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusPointExact {
    pub q: u64,
    pub a: u64,
    pub b: u64,
}

impl TorusPointExact {
    pub fn new(q: u64, a: u64, b: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        Ok(Self {
            q,
            a: a % q,
            b: b % q,
        })
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.a as f64 / self.q as f64, self.b as f64 / self.q as f64)
    }
}

impl fmt::Display for TorusPointExact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{},{}/{}", self.a, self.q, self.b, self.q)
    }
}

impl Serialize for TorusPointExact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn toral_apply(m: &ToralMatrix, p: TorusPointExact) -> TorusPointExact {
    m.pow_mod(1, p.q).apply(p)
}

/// `g₁^m g₂^n (p)`, computed as the single power `g₂^{2m+n}` since
/// `A₁ = A₂²`; the tests check this against the two-generator product.
pub fn z2_action_apply(m: i64, n: i64, p: TorusPointExact) -> TorusPointExact {
    ToralMatrix::A2.pow_mod(2 * m + n, p.q).apply(p)
}

/// Floating-point orbit of a toral map, refused beyond
/// [`FLOAT_HORIZON_LIMIT`] steps.
pub fn toral_orbit_f64(
    m: &ToralMatrix,
    start: (f64, f64),
    steps: usize,
) -> Result<Vec<(f64, f64)>> {
    if steps > FLOAT_HORIZON_LIMIT {
        return Err(Error::HyperbolicFloatHorizon {
            steps,
            limit: FLOAT_HORIZON_LIMIT,
        });
    }
    let e = m.entries();
    let mut out = Vec::with_capacity(steps);
    let mut p = start;
    for _ in 0..steps {
        out.push(p);
        p = (
            (e[0][0] as f64 * p.0 + e[0][1] as f64 * p.1).rem_euclid(1.0),
            (e[1][0] as f64 * p.0 + e[1][1] as f64 * p.1).rem_euclid(1.0),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::eventual_period;

    fn pt(q: u64, a: u64, b: u64) -> TorusPointExact {
        TorusPointExact::new(q, a, b).unwrap()
    }

    // Oracle: apply matrices one step at a time.
    fn stepwise(m: &ToralMatrix, times: usize, mut p: TorusPointExact) -> TorusPointExact {
        for _ in 0..times {
            p = toral_apply(m, p);
        }
        p
    }

    #[test]
    fn matrix_facts() {
        assert_eq!(ToralMatrix::A2.mul(&ToralMatrix::A2), ToralMatrix::A1);
        assert_eq!(ToralMatrix::A1.entries(), [[2, 1], [1, 1]]);
        assert_eq!(
            ToralMatrix::A2.mul(&ToralMatrix::A2.inverse()),
            ToralMatrix::IDENTITY
        );
        assert_eq!(
            ToralMatrix::A1.mul(&ToralMatrix::A1.inverse()),
            ToralMatrix::IDENTITY
        );
        assert!(ToralMatrix::new([[2, 0], [0, 1]]).is_err());
    }

    #[test]
    fn apply_examples() {
        assert_eq!(toral_apply(&ToralMatrix::A2, pt(5, 0, 0)), pt(5, 0, 0));
        let once = toral_apply(&ToralMatrix::A2, pt(5, 1, 0));
        assert_eq!(once, pt(5, 1, 1));
        assert_eq!(toral_apply(&ToralMatrix::A2, once), pt(5, 2, 1));
        assert_eq!(pt(5, 2, 1).to_string(), "2/5,1/5");
    }

    #[test]
    fn action_examples() {
        let p = pt(101, 17, 42);
        assert_eq!(z2_action_apply(0, 0, p), p);
        assert_eq!(z2_action_apply(1, 0, p), z2_action_apply(0, 2, p));
        let start = pt(7, 1, 2);
        assert_eq!(
            z2_action_apply(3, 2, start),
            stepwise(&ToralMatrix::A2, 8, start)
        );
    }

    #[test]
    fn commutation_and_theta_identity() {
        for q in 1..=50u64 {
            for (a, b) in [(0, 0), (1, 0), (0, 1), (q / 2, q / 3), (q - 1, q - 1)] {
                let p = pt(q, a, b);
                for m in 0..=5i64 {
                    for n in 0..=5i64 {
                        let g1m = ToralMatrix::A1.pow_mod(m, q);
                        let g2n = ToralMatrix::A2.pow_mod(n, q);
                        let lhs = g1m.apply(g2n.apply(p));
                        assert_eq!(lhs, g2n.apply(g1m.apply(p)));
                        assert_eq!(lhs, z2_action_apply(m, n, p));
                        assert_eq!(lhs, stepwise(&ToralMatrix::A2, (2 * m + n) as usize, p));
                    }
                }
            }
        }
    }

    #[test]
    fn negative_exponents_invert() {
        let p = pt(31, 5, 9);
        for (m, n) in [(-1, 0), (0, -1), (-3, 2), (4, -7)] {
            assert_eq!(z2_action_apply(-m, -n, z2_action_apply(m, n, p)), p);
        }
    }

    #[test]
    fn orbit_periods_divide_matrix_order() {
        for q in 1..=100u64 {
            let mut order = 1;
            let step = ToralMatrix::A2.pow_mod(1, q);
            let mut acc = step;
            while acc != ToralMatrix::A2.pow_mod(0, q) {
                acc = acc.mul(&step);
                order += 1;
            }
            for (a, b) in [(1, 0), (0, 1), (q / 2, 1), (3 % q, 7 % q)] {
                let (pre, period) =
                    eventual_period(pt(q, a, b), |p| toral_apply(&ToralMatrix::A2, *p));
                assert_eq!(pre, 0);
                assert_eq!(order % period, 0, "q={q}");
            }
        }
    }

    #[test]
    fn float_orbits_are_capped() {
        assert_eq!(
            toral_orbit_f64(&ToralMatrix::A2, (0.1, 0.2), 50)
                .unwrap()
                .len(),
            50
        );
        assert_eq!(
            toral_orbit_f64(&ToralMatrix::A2, (0.1, 0.2), 51)
                .unwrap_err()
                .code(),
            "HYPERBOLIC_FLOAT_HORIZON"
        );
    }
}
