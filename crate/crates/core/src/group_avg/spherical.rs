use serde::Serialize;

use super::preorbit::{PreOrbitWitness, G1_MULTIPLIER, G2_MULTIPLIER};
use crate::error::{Error, Result};
use crate::fmt::ser_f64;
use crate::summation::{CenteredMean, KahanSum, WeightedMean};
use crate::systems::CirclePointRational;

const RENORMALIZE_DRIFT: f64 = 1e-12;

/// Row `k` of `C(k, j) / 2^k`.
///
/// Built outward from the central entry by the ratio `C(k, j−1)/C(k, j)`,
/// mirrored, then normalized; far tails underflow to zero harmlessly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalWeights {
    pub k: u32,
    pub weights: Vec<f64>,
}

impl SphericalWeights {
    pub fn new(k: u32) -> Self {
        let k_us = k as usize;
        let mid = k_us / 2;
        let mut weights = vec![0.0; k_us + 1];
        weights[mid] = 1.0;
        for j in (1..=mid).rev() {
            weights[j - 1] = weights[j] * (j as f64 / (k_us - j + 1) as f64);
        }
        for j in 0..=mid {
            weights[k_us - j] = weights[j];
        }
        let total = weights.iter().copied().collect::<KahanSum>().value();
        for w in &mut weights {
            *w /= total;
        }
        Self { k, weights }
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().copied().collect::<KahanSum>().value()
    }
}

/// Streams the rows `k = 0, 1, 2, …` by Pascal's rule halved,
/// renormalizing when the row sum drifts from one.
#[derive(Debug, Clone)]
pub struct BinomialRows {
    k: u32,
    row: Vec<f64>,
}

impl Default for BinomialRows {
    fn default() -> Self {
        Self::new()
    }
}

impl BinomialRows {
    pub fn new() -> Self {
        Self {
            k: 0,
            row: vec![1.0],
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn row(&self) -> &[f64] {
        &self.row
    }

    pub fn advance(&mut self) {
        let mut next = Vec::with_capacity(self.row.len() + 1);
        next.push(0.5 * self.row[0]);
        for pair in self.row.windows(2) {
            next.push(0.5 * (pair[0] + pair[1]));
        }
        next.push(0.5 * self.row[self.row.len() - 1]);
        let total = next.iter().copied().collect::<KahanSum>().value();
        if (total - 1.0).abs() > RENORMALIZE_DRIFT {
            for w in &mut next {
                *w /= total;
            }
        }
        self.row = next;
        self.k += 1;
    }
}

fn weighted_row<F>(theta: CirclePointRational, observable: &F, weights: &[f64]) -> f64
where
    F: Fn(CirclePointRational) -> f64,
{
    let k = (weights.len() - 1) as u32;
    let mut mean = WeightedMean::new();
    for (j, &w) in weights.iter().enumerate() {
        let j = j as u32;
        let x = theta
            .mul_pow(G1_MULTIPLIER, j)
            .mul_pow(G2_MULTIPLIER, k - j);
        mean.push(w, observable(x));
    }
    mean.mean().expect("row is nonempty")
}

/// `s_k(φ)(θ) = Σ_j C(k, j) 2^{−k} φ(4^j 6^{k−j} θ)`.
pub fn spherical_average<F>(theta: CirclePointRational, observable: F, k: u32) -> f64
where
    F: Fn(CirclePointRational) -> f64,
{
    weighted_row(theta, &observable, &SphericalWeights::new(k).weights)
}

/// `Φ_n(θ) = n^{−1} Σ_{k<n} s_k(φ)(θ)`.
pub fn cesaro_spherical<F>(theta: CirclePointRational, observable: F, n: u32) -> Result<f64>
where
    F: Fn(CirclePointRational) -> f64,
{
    if n == 0 {
        return Err(Error::InvalidArgument(
            "Cesaro horizon must be at least 1".into(),
        ));
    }
    let mut rows = BinomialRows::new();
    let mut mean = CenteredMean::new();
    for k in 0..n {
        if k > 0 {
            rows.advance();
        }
        mean.push(weighted_row(theta, &observable, rows.row()));
    }
    Ok(mean.mean().expect("n >= 1"))
}

/// `Ψ_n(θ) = n^{−2} Σ_{k,ℓ<n} φ(4^k 6^ℓ θ)`, summed directly.
pub fn double_average_psi<F>(theta: CirclePointRational, observable: F, n: u32) -> Result<f64>
where
    F: Fn(CirclePointRational) -> f64,
{
    if n == 0 {
        return Err(Error::InvalidArgument(
            "double-average horizon must be at least 1".into(),
        ));
    }
    let mut mean = CenteredMean::new();
    let mut row_start = theta;
    for _ in 0..n {
        let mut x = row_start;
        for _ in 0..n {
            mean.push(observable(x));
            x = x.mul_pow(G2_MULTIPLIER, 1);
        }
        row_start = row_start.mul_pow(G1_MULTIPLIER, 1);
    }
    Ok(mean.mean().expect("n >= 1"))
}

/// `Ψ_n` for `n = 1, 2, …`, each step adding the border `k = n` or `ℓ = n`
/// of the square. Also tracks `max |φ|` over the points summed so far.
pub struct PsiSweep<F> {
    observable: F,
    n: u32,
    // 4^k 6^{n-1} θ for k < n
    column: Vec<CirclePointRational>,
    // 4^n θ
    next_row_start: CirclePointRational,
    anchor: f64,
    deviations: KahanSum,
    sup: f64,
}

impl<F> PsiSweep<F>
where
    F: Fn(CirclePointRational) -> f64,
{
    pub fn new(theta: CirclePointRational, observable: F) -> Self {
        let anchor = observable(theta);
        Self {
            observable,
            n: 0,
            column: Vec::new(),
            next_row_start: theta,
            anchor,
            deviations: KahanSum::new(),
            sup: 0.0,
        }
    }

    fn push(&mut self, x: CirclePointRational) {
        let v = (self.observable)(x);
        self.sup = self.sup.max(v.abs());
        self.deviations.add(v - self.anchor);
    }

    /// Extends the square to side `n + 1` and returns `Ψ_{n+1}`.
    pub fn advance(&mut self) -> f64 {
        let n = self.n as usize;
        // new column ℓ = n for k < n
        for k in 0..n {
            let x = self.column[k].mul_pow(G2_MULTIPLIER, 1);
            self.column[k] = x;
            self.push(x);
        }
        // new row k = n for ℓ ≤ n
        let mut x = self.next_row_start;
        for _ in 0..n {
            self.push(x);
            x = x.mul_pow(G2_MULTIPLIER, 1);
        }
        self.push(x);
        self.column.push(x);
        self.next_row_start = self.next_row_start.mul_pow(G1_MULTIPLIER, 1);
        self.n += 1;
        self.value()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn value(&self) -> f64 {
        let side = self.n as f64;
        self.anchor + self.deviations.value() / (side * side)
    }

    /// `max |φ|` over `{4^k 6^ℓ θ : k, ℓ < n}`.
    pub fn visited_sup(&self) -> f64 {
        self.sup
    }
}

/// One evaluation of the remainder estimate
/// `|Ψ_n(θ) − (n−a)(n−b) n^{−2} φ(z₀)| ≤ (a+b) n^{−1} ‖φ‖∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiBoundRow {
    pub n: u32,
    #[serde(serialize_with = "ser_f64")]
    pub lhs: f64,
    #[serde(serialize_with = "ser_f64")]
    pub bound: f64,
    pub holds: bool,
}

const BOUND_SLACK: f64 = 1e-12;

fn bound_row(w: &PreOrbitWitness, target_value: f64, psi: f64, n: u32, sup: f64) -> PsiBoundRow {
    let nf = n as f64;
    let main = ((n - w.a) as f64 * (n - w.b) as f64 / (nf * nf)) * target_value;
    let lhs = (psi - main).abs();
    let bound = (w.a + w.b) as f64 / nf * sup;
    PsiBoundRow {
        n,
        lhs,
        bound,
        holds: lhs <= bound + BOUND_SLACK,
    }
}

fn check_witness(w: &PreOrbitWitness) -> Result<()> {
    if !w.targets_common_fixed_point() {
        return Err(Error::InvalidArgument(format!(
            "target {} is not fixed by both generators",
            w.target
        )));
    }
    Ok(())
}

/// Evaluates the remainder estimate at horizon `n`. `sup_norm` defaults
/// to `max |φ|` over the points entering `Ψ_n`.
pub fn psi_error_bound_check<F>(
    w: &PreOrbitWitness,
    observable: F,
    n: u32,
    sup_norm: Option<f64>,
) -> Result<PsiBoundRow>
where
    F: Fn(CirclePointRational) -> f64,
{
    check_witness(w)?;
    if n == 0 || n < w.a.max(w.b) {
        return Err(Error::HorizonTooSmall {
            n: n as usize,
            a: w.a,
            b: w.b,
        });
    }
    let target_value = observable(w.target);
    let mut sweep = PsiSweep::new(w.theta, &observable);
    // the direct sum is the reference value; the sweep only supplies the sup
    while sweep.n() < n {
        sweep.advance();
    }
    let psi = double_average_psi(w.theta, &observable, n)?;
    let sup = sup_norm.unwrap_or_else(|| sweep.visited_sup());
    Ok(bound_row(w, target_value, psi, n, sup))
}

/// The remainder estimate for every `n` in `from..=to`, in one sweep.
pub fn psi_bound_sweep<F>(
    w: &PreOrbitWitness,
    observable: F,
    from: u32,
    to: u32,
    sup_norm: Option<f64>,
) -> Result<Vec<PsiBoundRow>>
where
    F: Fn(CirclePointRational) -> f64,
{
    check_witness(w)?;
    if from == 0 || from < w.a.max(w.b) {
        return Err(Error::HorizonTooSmall {
            n: from as usize,
            a: w.a,
            b: w.b,
        });
    }
    let target_value = observable(w.target);
    let mut sweep = PsiSweep::new(w.theta, &observable);
    let mut rows = Vec::new();
    while sweep.n() < to {
        let psi = sweep.advance();
        let n = sweep.n();
        if n >= from {
            let sup = sup_norm.unwrap_or_else(|| sweep.visited_sup());
            rows.push(bound_row(w, target_value, psi, n, sup));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_avg::{preorbit_construct, TrigKind, TrigPolynomial};
    use proptest::prelude::*;

    fn q(n: u64, d: u64) -> CirclePointRational {
        CirclePointRational::new(n, d).unwrap()
    }

    fn exact_binomial(k: u32, j: u32) -> u128 {
        (0..j).fold(1u128, |acc, i| acc * (k - i) as u128 / (i + 1) as u128)
    }

    fn cos(p: CirclePointRational) -> f64 {
        TrigPolynomial::cos1().eval_circle(p)
    }

    #[test]
    fn weights_match_exact_binomials() {
        let mut rows = BinomialRows::new();
        for k in 0..=60u32 {
            let direct = SphericalWeights::new(k);
            for j in 0..=k {
                let exact = exact_binomial(k, j) as f64 / 2f64.powi(k as i32);
                assert!(
                    (direct.weights[j as usize] - exact).abs()
                        <= 1e-15 * exact.max(1e-300) + 1e-300
                );
                assert!((rows.row()[j as usize] - exact).abs() <= 1e-14 * exact + 1e-300);
            }
            rows.advance();
        }
    }

    #[test]
    fn rows_normalized_and_symmetric_to_1000() {
        let mut rows = BinomialRows::new();
        for k in 0..=1000u32 {
            let r = rows.row();
            let total = r.iter().copied().collect::<KahanSum>().value();
            assert!((total - 1.0).abs() <= 1e-12, "k={k}");
            assert!(r.iter().zip(r.iter().rev()).all(|(a, b)| a == b));
            if k % 97 == 0 {
                let w = SphericalWeights::new(k);
                assert!((w.sum() - 1.0).abs() <= 1e-12);
                assert!(w
                    .weights
                    .iter()
                    .zip(w.weights.iter().rev())
                    .all(|(a, b)| a == b));
            }
            rows.advance();
        }
    }

    #[test]
    fn spherical_against_word_enumeration() {
        // all 2^k words in {g1, g2}; commutativity reduces each to 4^j 6^{k-j}
        let theta = q(1, 7);
        let phi = |p: CirclePointRational| cos(p) + 0.25 * (p.numerator() % 3) as f64;
        for k in 0..=8u32 {
            let mut sum = 0.0;
            for word in 0..(1u32 << k) {
                let mut x = theta;
                for bit in 0..k {
                    x = x.mul_pow(if word >> bit & 1 == 1 { 4 } else { 6 }, 1);
                }
                sum += phi(x);
            }
            let oracle = sum / (1u64 << k) as f64;
            assert!(
                (spherical_average(theta, phi, k) - oracle).abs() < 1e-12,
                "k={k}"
            );
        }
    }

    #[test]
    fn fixed_point_is_exact_for_all_schemes() {
        let phi = |p: CirclePointRational| 0.1 + cos(p) / 3.0;
        let v = phi(CirclePointRational::ZERO);
        for n in 1..=30 {
            assert_eq!(spherical_average(CirclePointRational::ZERO, phi, n), v);
            assert_eq!(
                cesaro_spherical(CirclePointRational::ZERO, phi, n).unwrap(),
                v
            );
            assert_eq!(
                double_average_psi(CirclePointRational::ZERO, phi, n).unwrap(),
                v
            );
        }
        let c = |_: CirclePointRational| 0.7;
        assert_eq!(cesaro_spherical(q(3, 11), c, 25).unwrap(), 0.7);
        assert_eq!(spherical_average(q(3, 11), phi, 0), phi(q(3, 11)));
        assert_eq!(double_average_psi(q(3, 11), phi, 1).unwrap(), phi(q(3, 11)));
    }

    #[test]
    fn cesaro_against_triple_sum() {
        let theta = q(1, 4);
        let mut sum = 0.0;
        for k in 0..10u32 {
            let mut inner = 0.0;
            for j in 0..=k {
                let x = theta.mul_pow(4, j).mul_pow(6, k - j);
                inner += exact_binomial(k, j) as f64 * cos(x);
            }
            sum += inner / 2f64.powi(k as i32);
        }
        assert!((cesaro_spherical(theta, cos, 10).unwrap() - sum / 10.0).abs() < 1e-12);
    }

    #[test]
    fn psi_against_brute_force_and_sweep() {
        let theta = q(1, 4);
        let mut sum = 0.0;
        for k in 0..8u32 {
            for l in 0..8u32 {
                let x = (theta.to_f64() * 4f64.powi(k as i32) * 6f64.powi(l as i32)).fract();
                sum += (std::f64::consts::TAU * x).cos();
            }
        }
        assert!((double_average_psi(theta, cos, 8).unwrap() - sum / 64.0).abs() < 1e-12);

        let theta = q(5, 13);
        let mut sweep = PsiSweep::new(theta, cos);
        for n in 1..=40 {
            let s = sweep.advance();
            assert!((s - double_average_psi(theta, cos, n).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn bound_examples() {
        let zero = CirclePointRational::ZERO;
        let w = preorbit_construct(zero, 0, 0, 0).unwrap();
        let row = psi_error_bound_check(&w, cos, 5, None).unwrap();
        assert_eq!(row.lhs, 0.0);
        assert!(row.holds);

        let trig = TrigPolynomial::cos1().with(0.5, vec![3], TrigKind::Sin);
        for (a, b) in [(1, 0), (0, 1)] {
            let w = preorbit_construct(zero, a, b, 1).unwrap();
            let rows = psi_bound_sweep(&w, |p| trig.eval_circle(p), 2, 200, None).unwrap();
            assert_eq!(rows.len(), 199);
            assert!(rows.iter().all(|r| r.holds));
            let single = psi_error_bound_check(&w, |p| trig.eval_circle(p), 37, None).unwrap();
            assert!((single.lhs - rows[35].lhs).abs() < 1e-13);
            assert_eq!(single.bound, rows[35].bound);
        }

        let w = preorbit_construct(zero, 3, 1, 5).unwrap();
        assert!(matches!(
            psi_error_bound_check(&w, cos, 2, None),
            Err(Error::HorizonTooSmall { .. })
        ));
        let off = preorbit_construct(q(1, 3), 1, 0, 0).unwrap();
        assert!(psi_error_bound_check(&off, cos, 4, None).is_err());
    }

    proptest! {
        #[test]
        fn cesaro_is_mean_of_spherical(num in 0u64..50, den in 1u64..50, n in 1u32..25) {
            let theta = q(num, den);
            let direct: f64 = (0..n).map(|k| spherical_average(theta, cos, k)).sum::<f64>() / n as f64;
            prop_assert!((cesaro_spherical(theta, cos, n).unwrap() - direct).abs() < 1e-10);
        }
    }
}
