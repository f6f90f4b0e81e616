use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::systems::{CirclePointRational, TorusPointExact};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrigKind {
    Cos,
    Sin,
}

/// `amplitude · cos(2π ⟨frequency, x⟩)` (or `sin`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub amplitude: f64,
    pub frequency: Vec<i64>,
    pub kind: TrigKind,
}

/// Real trigonometric polynomial on the circle (one frequency component)
/// or the 2-torus (two). Arguments are reduced modulo one in exact integer
/// arithmetic before the float evaluation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrigPolynomial {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub terms: Vec<TrigTerm>,
}

impl TrigPolynomial {
    /// `cos 2πθ`.
    pub fn cos1() -> Self {
        Self::default().with(1.0, vec![1], TrigKind::Cos)
    }

    pub fn with(mut self, amplitude: f64, frequency: Vec<i64>, kind: TrigKind) -> Self {
        self.terms.push(TrigTerm {
            amplitude,
            frequency,
            kind,
        });
        self
    }

    pub fn dim(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.frequency.len())
            .max()
            .unwrap_or(1)
    }

    pub fn degree(&self) -> u64 {
        self.terms
            .iter()
            .flat_map(|t| t.frequency.iter())
            .map(|f| f.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// `|c| + Σ |amplitude|`, an upper bound for the sup norm.
    pub fn sup_bound(&self) -> f64 {
        self.constant.abs() + self.terms.iter().map(|t| t.amplitude.abs()).sum::<f64>()
    }

    // Evaluates at the point whose coordinates are residues[i] / q.
    fn eval_residues(&self, residues: &[u64], q: u64) -> f64 {
        let mut acc = self.constant;
        for t in &self.terms {
            let mut r: i128 = 0;
            for (f, &x) in t.frequency.iter().zip(residues) {
                r = (r + *f as i128 * x as i128).rem_euclid(q as i128);
            }
            let angle = TAU * (r as f64 / q as f64);
            acc += t.amplitude
                * match t.kind {
                    TrigKind::Cos => angle.cos(),
                    TrigKind::Sin => angle.sin(),
                };
        }
        acc
    }

    pub fn eval_circle(&self, p: CirclePointRational) -> f64 {
        self.eval_residues(&[p.numerator()], p.denominator())
    }

    pub fn eval_torus(&self, p: TorusPointExact) -> f64 {
        self.eval_residues(&[p.a, p.b], p.q)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let mut acc = self.constant;
        for t in &self.terms {
            let arg: f64 = t.frequency.iter().zip(x).map(|(&f, &x)| f as f64 * x).sum();
            let angle = TAU * arg;
            acc += t.amplitude
                * match t.kind {
                    TrigKind::Cos => angle.cos(),
                    TrigKind::Sin => angle.sin(),
                };
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_reduction_matches_float_evaluation() {
        let phi = TrigPolynomial {
            constant: 0.5,
            terms: vec![],
        }
        .with(1.0, vec![1], TrigKind::Cos)
        .with(-0.3, vec![2], TrigKind::Sin)
        .with(0.2, vec![3], TrigKind::Cos);
        assert_eq!(phi.degree(), 3);
        assert!((phi.sup_bound() - 2.0).abs() < 1e-15);
        for d in 1..40 {
            for n in 0..d {
                let p = CirclePointRational::new(n, d).unwrap();
                assert!((phi.eval_circle(p) - phi.eval_f64(&[p.to_f64()])).abs() < 1e-12);
            }
        }
        assert_eq!(
            TrigPolynomial::cos1().eval_circle(CirclePointRational::ZERO),
            1.0
        );
    }

    #[test]
    fn torus_evaluation() {
        let phi = TrigPolynomial::default().with(1.0, vec![1, -2], TrigKind::Sin);
        let p = TorusPointExact::new(8, 3, 5).unwrap();
        let expected = (TAU * (3.0 / 8.0 - 10.0 / 8.0)).sin();
        assert!((phi.eval_torus(p) - expected).abs() < 1e-12);
    }
}
