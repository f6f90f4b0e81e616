//! Concrete phase spaces: expanding circle maps on rational points, the Kan
//! skew product on the annulus, and the commuting toral automorphisms
//! `A₁ = [[2,1],[1,1]]`, `A₂ = [[1,1],[1,0]]` acting on rational points of
//! the 2-torus.
//!
//! Hyperbolic maps are iterated only in exact modular arithmetic; the Kan
//! map runs in double precision.

mod circle;
mod kan;
mod toral;

pub use circle::{circle_mult, multiplicative_order, CirclePointRational};
pub use kan::{
    kan_basin_classify, kan_orbit, kan_scan, kan_step, Basin, BasinLabel, KanBoxRow, KanScanConfig,
    KanState, KAN_DEFAULT_MAX_ITER, KAN_HIGH_THRESHOLD, KAN_LOW_THRESHOLD,
};
pub use toral::{
    toral_apply, toral_orbit_f64, z2_action_apply, ToralMatrix, TorusPointExact,
    FLOAT_HORIZON_LIMIT,
};

use std::collections::HashMap;
use std::hash::Hash;

/// `(preperiod, period)` of the orbit of `start` under `f`, assuming the
/// orbit is eventually periodic.
pub fn eventual_period<T, F>(start: T, mut f: F) -> (usize, usize)
where
    T: Eq + Hash + Clone,
    F: FnMut(&T) -> T,
{
    let mut seen = HashMap::new();
    let mut x = start;
    let mut i = 0usize;
    loop {
        if let Some(&j) = seen.get(&x) {
            return (j, i - j);
        }
        seen.insert(x.clone(), i);
        x = f(&x);
        i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_shape() {
        // 0 → 1 → 2 → 3 → 1
        assert_eq!(
            eventual_period(0u8, |&x| if x == 3 { 1 } else { x + 1 }),
            (1, 3)
        );
        assert_eq!(eventual_period(5u8, |&x| x), (0, 1));
    }
}
