//! Two independent sources of point-target correlators, used to cross-check
//! the Virasoro solver: the genus-zero string recursion and the
//! Dijkgraaf–Verlinde–Verlinde recursion. Both memoize on sorted multisets.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `⟨τ_{k_1} ⋯ τ_{k_n}⟩_0` from `⟨τ_0³⟩_0 = 1` and the string equation
/// `⟨τ_0 ∏τ_{k_i}⟩_0 = Σ_j ⟨τ_{k_j − 1} ∏_{i≠j} τ_{k_i}⟩_0`.
#[derive(Default)]
pub struct StringOracle {
    memo: HashMap<Vec<u32>, Scalar>,
}

impl StringOracle {
    pub fn new() -> Self {
        StringOracle::default()
    }

    pub fn correlator(&mut self, ks: &[u32]) -> Result<Scalar> {
        if ks.len() < 3 {
            return Err(Error::Unstable {
                genus: 0,
                points: ks.len(),
            });
        }
        let mut key = ks.to_vec();
        key.sort_unstable();
        Ok(self.eval(key))
    }

    fn eval(&mut self, key: Vec<u32>) -> Scalar {
        let n = key.len();
        if key.iter().sum::<u32>() as usize + 3 != n {
            return Scalar::zero();
        }
        if n == 3 {
            return Scalar::one();
        }
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        // Σk = n − 3 < n forces a τ_0 at the front
        let rest = &key[1..];
        let mut acc = Scalar::zero();
        for j in 0..rest.len() {
            if rest[j] == 0 || (j > 0 && rest[j] == rest[j - 1]) {
                continue;
            }
            let mult = rest.iter().filter(|&&x| x == rest[j]).count() as i64;
            let mut next = rest.to_vec();
            next[j] -= 1;
            next.sort_unstable();
            acc += self.eval(next) * Scalar::from_int(mult);
        }
        self.memo.insert(key, acc.clone());
        acc
    }
}

/// One-shot [`StringOracle`] query.
pub fn genus0_point_integral(ks: &[u32]) -> Result<Scalar> {
    StringOracle::new().correlator(ks)
}

/// Witten–Kontsevich correlators by the DVV recursion
///
/// ```text
/// (2k+3)!! ⟨τ_{k+1} τ_S⟩_g = Σ_{j∈S} (2k+2k_j+1)!!/(2k_j−1)!! ⟨τ_{k+k_j} τ_{S∖j}⟩_g
///   + ½ Σ_{r+s=k−1} (2r+1)!!(2s+1)!! [⟨τ_r τ_s τ_S⟩_{g−1} + Σ ⟨τ_r τ_I⟩_{g_1} ⟨τ_s τ_J⟩_{g_2}]
/// ```
///
/// with the last sum over `g_1 + g_2 = g`, `I ⊔ J = S`, and base values
/// `⟨τ_0³⟩_0 = 1`, `⟨τ_1⟩_1 = 1/24`.
#[derive(Default)]
pub struct DvvOracle {
    memo: HashMap<(u32, Vec<u32>), Scalar>,
}

fn double_factorial_odd(m: i64) -> Scalar {
    // (2m−1)!! for m ≥ 0, with (−1)!! = 1
    let mut acc = Scalar::one();
    let mut x = 2 * m - 1;
    while x > 1 {
        acc *= Scalar::from_int(x);
        x -= 2;
    }
    acc
}

impl DvvOracle {
    pub fn new() -> Self {
        DvvOracle::default()
    }

    pub fn correlator(&mut self, genus: u32, ks: &[u32]) -> Result<Scalar> {
        if 2 * genus as i64 - 2 + ks.len() as i64 <= 0 {
            return Err(Error::Unstable {
                genus,
                points: ks.len(),
            });
        }
        let mut key = ks.to_vec();
        key.sort_unstable();
        Ok(self.eval(genus as i64, key))
    }

    fn eval(&mut self, g: i64, key: Vec<u32>) -> Scalar {
        let n = key.len() as i64;
        if g < 0 || 2 * g - 2 + n <= 0 || key.iter().sum::<u32>() as i64 != 3 * g - 3 + n {
            return Scalar::zero();
        }
        if g == 0 && n == 3 {
            return Scalar::one();
        }
        if g == 1 && key == [1] {
            return Scalar::new(1, 24);
        }
        if let Some(v) = self.memo.get(&(g as u32, key.clone())) {
            return v.clone();
        }
        // peel off the largest index (≥ 1 by the dimension constraint)
        let mut rest = key.clone();
        let top = rest.pop().expect("stable correlator has insertions");
        let k = top as i64 - 1;
        let mut acc = Scalar::zero();

        for j in 0..rest.len() {
            let kj = rest[j] as i64;
            let coeff = double_factorial_odd(k + kj + 1) / double_factorial_odd(kj);
            let mut next = rest.clone();
            next[j] = (k + kj) as u32;
            next.sort_unstable();
            acc += coeff * self.eval(g, next);
        }

        let half = Scalar::new(1, 2);
        for r in 0..k {
            let s = k - 1 - r;
            let coeff = &half * &(double_factorial_odd(r + 1) * double_factorial_odd(s + 1));
            let mut loop_key = rest.clone();
            loop_key.push(r as u32);
            loop_key.push(s as u32);
            loop_key.sort_unstable();
            let mut term = self.eval(g - 1, loop_key);
            let m = rest.len();
            for mask in 0u32..(1 << m) {
                let mut left = vec![r as u32];
                let mut right = vec![s as u32];
                for (i, &x) in rest.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        left.push(x);
                    } else {
                        right.push(x);
                    }
                }
                left.sort_unstable();
                right.sort_unstable();
                for g1 in 0..=g {
                    let a = self.eval(g1, left.clone());
                    if a.is_zero() {
                        continue;
                    }
                    term += a * self.eval(g - g1, right.clone());
                }
            }
            acc += coeff * term;
        }

        let value = acc / double_factorial_odd(k + 2);
        self.memo.insert((g as u32, key), value.clone());
        value
    }
}

/// One-shot [`DvvOracle`] query.
pub fn dvv_correlator(genus: u32, ks: &[u32]) -> Result<Scalar> {
    DvvOracle::new().correlator(genus, ks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_recursion_values() {
        assert_eq!(genus0_point_integral(&[0, 0, 0]).unwrap(), Scalar::one());
        assert_eq!(genus0_point_integral(&[0, 0, 0, 1]).unwrap(), Scalar::one());
        assert_eq!(genus0_point_integral(&[0, 0, 0, 1, 1]).unwrap(), Scalar::from_int(2));
        assert_eq!(genus0_point_integral(&[0, 0, 0, 0, 2]).unwrap(), Scalar::one());
        assert_eq!(genus0_point_integral(&[0, 0, 1]).unwrap(), Scalar::zero());
        assert!(matches!(genus0_point_integral(&[0, 0]), Err(Error::Unstable { .. })));
    }

    #[test]
    fn string_recursion_matches_multinomial() {
        // (n−3)!/∏k_i! computed directly
        let mut oracle = StringOracle::new();
        for ks in [
            vec![0, 0, 0, 0, 1, 1, 2],
            vec![0, 0, 0, 0, 0, 2, 2, 1],
            vec![0, 0, 0, 0, 0, 0, 3, 2, 1],
        ] {
            let n = ks.len() as u32;
            let expected = Scalar::factorial(n - 3) / ks.iter().map(|&k| Scalar::factorial(k)).product::<Scalar>();
            assert_eq!(oracle.correlator(&ks).unwrap(), expected, "{ks:?}");
        }
    }

    #[test]
    fn dvv_values() {
        assert_eq!(dvv_correlator(0, &[0, 0, 0]).unwrap(), Scalar::one());
        assert_eq!(dvv_correlator(1, &[1]).unwrap(), Scalar::new(1, 24));
        assert_eq!(dvv_correlator(2, &[4]).unwrap(), Scalar::new(1, 1152));
        // dilaton: ⟨τ_1 τ_1⟩_1 = (2·1−2+1)⟨τ_1⟩_1
        assert_eq!(dvv_correlator(1, &[1, 1]).unwrap(), Scalar::new(1, 24));
        assert_eq!(dvv_correlator(1, &[0, 2]).unwrap(), Scalar::new(1, 24));
        assert_eq!(dvv_correlator(3, &[7]).unwrap(), Scalar::new(1, 82944));
        assert!(matches!(dvv_correlator(0, &[0]), Err(Error::Unstable { .. })));
    }

    #[test]
    fn dvv_genus_zero_agrees_with_string() {
        let mut dvv = DvvOracle::new();
        let mut string = StringOracle::new();
        for ks in [
            vec![0, 0, 0, 1],
            vec![0, 0, 0, 1, 1],
            vec![0, 0, 0, 0, 1, 2],
            vec![0, 0, 0, 0, 0, 0, 4],
        ] {
            assert_eq!(dvv.correlator(0, &ks).unwrap(), string.correlator(&ks).unwrap());
        }
    }
}
