//! Seeded random inputs for property checks and the acceptance suite.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::frobenius::FrobeniusAlgebra;
use crate::hspace::HElement;
use crate::scalar::Scalar;
use crate::series::{Monomial, SeriesSpace, TruncatedSeries, Truncation};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small rational `p/q` with `|p| ≤ 6`, `1 ≤ q ≤ 4`, possibly zero.
pub fn small_rational<R: Rng>(rng: &mut R) -> Scalar {
    Scalar::new(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

fn nonzero_rational<R: Rng>(rng: &mut R) -> Scalar {
    loop {
        let c = small_rational(rng);
        if !c.is_zero() {
            return c;
        }
    }
}

/// A series with `terms` random monomials of degree `1..=max_degree` and
/// no constant term.
pub fn random_formal_series<R: Rng>(
    rng: &mut R,
    space: &SeriesSpace,
    terms: usize,
    max_degree: u32,
) -> TruncatedSeries {
    let mut out = TruncatedSeries::zero(space);
    let n = space.nvars();
    if n == 0 {
        return out;
    }
    for _ in 0..terms {
        let d = rng.gen_range(1..=max_degree.max(1));
        let mut exps = vec![0u16; n];
        for _ in 0..d {
            exps[rng.gen_range(0..n)] += 1;
        }
        out.add_term(Monomial::from_exponents(&exps, 0), nonzero_rational(rng));
    }
    out
}

/// Variables `x_1..x_vars` with the given degree bound.
pub fn parameter_space(vars: usize, deg: u32) -> Result<SeriesSpace> {
    SeriesSpace::new((1..=vars).map(|i| format!("x_{i}")), Truncation::new(deg, 0))
}

/// `t(z) = Σ_{k ≤ depth} Σ_α c_{k,α} φ_α z^k` with random formal `c`;
/// the `z^0` part is always present.
pub fn random_plus_element<R: Rng>(rng: &mut R, alg: &FrobeniusAlgebra, space: &SeriesSpace, depth: u32) -> HElement {
    let mut t = HElement::zero(alg, space);
    for k in 0..=depth {
        for a in 0..alg.dim() {
            if k > 0 && rng.gen_bool(0.25) {
                continue;
            }
            let terms = rng.gen_range(1..=2);
            t.add_component(k as i32, a, random_formal_series(rng, space, terms, 2));
        }
    }
    t
}

/// A scalar Laurent element with components in `window`.
pub fn random_element<R: Rng>(rng: &mut R, alg: &FrobeniusAlgebra, window: (i32, i32)) -> HElement {
    let mut entries = Vec::new();
    for k in window.0..=window.1 {
        for a in 0..alg.dim() {
            if rng.gen_bool(0.6) {
                entries.push((k, a, small_rational(rng)));
            }
        }
    }
    HElement::from_scalars(alg, &entries)
}
