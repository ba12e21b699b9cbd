//! Fixture builders shared by the criterion benchmarks.

use gwcone_core::sampling::{parameter_space, random_formal_series, random_plus_element, rng};
use gwcone_core::{FrobeniusAlgebra, HElement, SeriesSpace, TruncatedSeries, Truncation};

/// A pair of random series in `vars` variables, degree bound `deg`.
pub fn series_pair(vars: usize, deg: u32, terms: usize, seed: u64) -> (TruncatedSeries, TruncatedSeries) {
    let space = SeriesSpace::new((0..vars).map(|i| format!("t_{i}")), Truncation::new(deg, 0)).expect("valid space");
    let mut r = rng(seed);
    let a = random_formal_series(&mut r, &space, terms, deg);
    let b = random_formal_series(&mut r, &space, terms, deg);
    (a, b)
}

/// A random point-target input `t(z)` with three parameters.
pub fn cone_input(deg: u32, depth: u32, seed: u64) -> HElement {
    let space = parameter_space(3, deg).expect("valid space");
    random_plus_element(&mut rng(seed), &FrobeniusAlgebra::point(), &space, depth)
}
