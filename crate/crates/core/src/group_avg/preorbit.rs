use serde::Serialize;

use crate::error::{Error, Result};
use crate::systems::CirclePointRational;

/// Multiplier of `g₁ : θ ↦ 4θ`.
pub const G1_MULTIPLIER: u64 = 4;
/// Multiplier of `g₂ : θ ↦ 6θ`.
pub const G2_MULTIPLIER: u64 = 6;

/// A point `θ` with `g₂^b g₁^a θ = target` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PreOrbitWitness {
    pub theta: CirclePointRational,
    pub a: u32,
    pub b: u32,
    pub target: CirclePointRational,
}

impl PreOrbitWitness {
    pub fn new(
        theta: CirclePointRational,
        a: u32,
        b: u32,
        target: CirclePointRational,
    ) -> Result<Self> {
        let image = theta.mul_pow(G1_MULTIPLIER, a).mul_pow(G2_MULTIPLIER, b);
        if image != target {
            return Err(Error::InvalidArgument(format!(
                "g1^{a} g2^{b} maps {theta} to {image}, not {target}"
            )));
        }
        Ok(Self {
            theta,
            a,
            b,
            target,
        })
    }

    /// Whether the target is fixed by both generators.
    pub fn targets_common_fixed_point(&self) -> bool {
        self.target.mul_pow(G1_MULTIPLIER, 1) == self.target
            && self.target.mul_pow(G2_MULTIPLIER, 1) == self.target
    }
}

/// Branch `s` of the solutions of `4^a 6^b θ ≡ target (mod 1)`, namely
/// `θ = (p + s·d) / (d · 4^a · 6^b)` for `target = p/d` and `0 ≤ s < 4^a 6^b`.
pub fn preorbit_construct(
    target: CirclePointRational,
    a: u32,
    b: u32,
    branch: u64,
) -> Result<PreOrbitWitness> {
    let overflow = || {
        Error::InvalidArgument(format!(
            "4^{a} 6^{b} times the target denominator overflows u64"
        ))
    };
    let m = G1_MULTIPLIER
        .checked_pow(a)
        .and_then(|x| x.checked_mul(G2_MULTIPLIER.checked_pow(b)?))
        .ok_or_else(overflow)?;
    if branch >= m {
        return Err(Error::InvalidArgument(format!(
            "branch {branch} out of range 0..{m}"
        )));
    }
    let (p, d) = (target.numerator(), target.denominator());
    let den = d.checked_mul(m).ok_or_else(overflow)?;
    let num = branch
        .checked_mul(d)
        .and_then(|x| x.checked_add(p))
        .ok_or_else(overflow)?;
    PreOrbitWitness::new(CirclePointRational::new(num, den)?, a, b, target)
}
