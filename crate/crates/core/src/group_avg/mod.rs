//! Averages over group and semigroup orbits.
//!
//! * Følner box averages of the `Z²` action `(m, n) ↦ g₁^m g₂^n` on rational
//!   torus points, over `F_n = [−n, n]²`.
//! * Spherical averages of the free semigroup generated by `θ ↦ 4θ` and
//!   `θ ↦ 6θ`. The generators commute, so the words of length `k` collapse
//!   onto `g₁^j g₂^{k−j}` with binomial multiplicities `C(k, j) / 2^k`.
//! * Cesàro means of the spherical averages, and the square double average
//!   `Ψ_n = n^{−2} Σ_{k,ℓ<n} φ(g₁^k g₂^ℓ θ)` with its explicit error bound on
//!   pre-orbits of the common fixed point.

mod folner;
mod preorbit;
mod spherical;
mod tempered;
mod trig;

pub use folner::{folner_average, FolnerBox};
pub use preorbit::{preorbit_construct, PreOrbitWitness, G1_MULTIPLIER, G2_MULTIPLIER};
pub use spherical::{
    cesaro_spherical, double_average_psi, psi_bound_sweep, psi_error_bound_check,
    spherical_average, BinomialRows, PsiBoundRow, PsiSweep, SphericalWeights,
};
pub use tempered::{tempered_check, RowSet, TemperedCheck};
pub use trig::{TrigKind, TrigPolynomial, TrigTerm};
