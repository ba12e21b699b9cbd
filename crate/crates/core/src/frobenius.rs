//! Graded Frobenius algebras standing in for `H•(X)`, and target data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A finite-dimensional graded algebra basis with a nondegenerate pairing.
///
/// Degrees are complex degrees: `φ_α ∈ H^{2·deg α}(X)`, and `top` is the
/// complex dimension of `X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraSpec", into = "AlgebraSpec")]
pub struct FrobeniusAlgebra {
    labels: Vec<String>,
    degrees: Vec<u32>,
    top: u32,
    pairing: Vec<Vec<Scalar>>,
    inverse: Vec<Vec<Scalar>>,
    unit: Vec<Scalar>,
}

/// Serialized form of a [`FrobeniusAlgebra`]; the inverse pairing is derived.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub labels: Vec<String>,
    pub degrees: Vec<u32>,
    pub top: u32,
    pub pairing: Vec<Vec<Scalar>>,
    pub unit: Vec<Scalar>,
}

impl TryFrom<AlgebraSpec> for FrobeniusAlgebra {
    type Error = Error;

    fn try_from(spec: AlgebraSpec) -> Result<Self> {
        FrobeniusAlgebra::new(spec.labels, spec.degrees, spec.top, spec.pairing, spec.unit)
    }
}

impl From<FrobeniusAlgebra> for AlgebraSpec {
    fn from(alg: FrobeniusAlgebra) -> Self {
        AlgebraSpec {
            labels: alg.labels,
            degrees: alg.degrees,
            top: alg.top,
            pairing: alg.pairing,
            unit: alg.unit,
        }
    }
}

impl FrobeniusAlgebra {
    pub fn new(
        labels: Vec<String>,
        degrees: Vec<u32>,
        top: u32,
        pairing: Vec<Vec<Scalar>>,
        unit: Vec<Scalar>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidAlgebra("empty basis".into()));
        }
        for (len, what) in [
            (degrees.len(), "degrees"),
            (pairing.len(), "pairing rows"),
            (unit.len(), "unit"),
        ] {
            if len != n {
                return Err(Error::InvalidAlgebra(format!("{what} has length {len}, basis has {n}")));
            }
        }
        for (a, row) in pairing.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidAlgebra(format!(
                    "pairing row {a} has length {}",
                    row.len()
                )));
            }
            for (b, g) in row.iter().enumerate() {
                if g != &pairing[b][a] {
                    return Err(Error::InvalidAlgebra(format!("pairing not symmetric at ({a},{b})")));
                }
                if !g.is_zero() && degrees[a] + degrees[b] != top {
                    return Err(Error::InvalidAlgebra(format!(
                        "pairing ({a},{b}) nonzero but degrees {}+{} != {top}",
                        degrees[a], degrees[b]
                    )));
                }
            }
        }
        let inverse = invert(&pairing).ok_or_else(|| Error::InvalidAlgebra("pairing matrix is singular".into()))?;
        Ok(FrobeniusAlgebra {
            labels,
            degrees,
            top,
            pairing,
            inverse,
            unit,
        })
    }

    /// `H•(pt)`: one generator, pairing `(1,1) = 1`.
    pub fn point() -> Self {
        FrobeniusAlgebra::new(
            vec!["1".into()],
            vec![0],
            0,
            vec![vec![Scalar::one()]],
            vec![Scalar::one()],
        )
        .expect("point algebra is valid")
    }

    /// `H•(P¹)` with basis `1, H`.
    pub fn projective_line() -> Self {
        let (o, z) = (Scalar::one(), Scalar::zero());
        FrobeniusAlgebra::new(
            vec!["1".into(), "H".into()],
            vec![0, 1],
            1,
            vec![vec![z.clone(), o.clone()], vec![o.clone(), z.clone()]],
            vec![o, z],
        )
        .expect("P1 algebra is valid")
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn top_degree(&self) -> u32 {
        self.top
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degree(&self, alpha: usize) -> u32 {
        self.degrees[alpha]
    }

    /// `g_{αβ}`
    pub fn metric(&self, a: usize, b: usize) -> &Scalar {
        &self.pairing[a][b]
    }

    /// `g^{αβ}`
    pub fn inverse_metric(&self, a: usize, b: usize) -> &Scalar {
        &self.inverse[a][b]
    }

    /// Coordinates of the identity class.
    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }

    pub fn is_point(&self) -> bool {
        self.dim() == 1
    }

    /// `φ^ν = Σ_λ g^{νλ} φ_λ` in the `φ_λ` basis.
    pub fn dual_basis_vector(&self, nu: usize) -> Vec<Scalar> {
        self.inverse[nu].clone()
    }

    pub fn check_vector(&self, v: &[Scalar]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }
}

/// `Σ a^α b^β g_{αβ}`.
pub fn frobenius_pair(a: &[Scalar], b: &[Scalar], alg: &FrobeniusAlgebra) -> Result<Scalar> {
    alg.check_vector(a)?;
    alg.check_vector(b)?;
    let mut acc = Scalar::zero();
    for (i, ai) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, bj) in b.iter().enumerate() {
            let g = alg.metric(i, j);
            if !g.is_zero() && !bj.is_zero() {
                acc += &(ai * bj) * g;
            }
        }
    }
    Ok(acc)
}

fn invert(m: &[Vec<Scalar>]) -> Option<Vec<Vec<Scalar>>> {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip().ok()?;
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(pivot_row.iter()) {
                    *x = &*x - &(&f * p);
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// A target space as seen by the engine: its cohomology algebra plus the
/// numerical data entering the virtual dimension of `X_{g,n,d}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Target {
    pub name: String,
    pub algebra: FrobeniusAlgebra,
    /// `∫_d c_1(TX)` for each Novikov generator.
    #[serde(default)]
    pub c1: Vec<i64>,
}

impl Target {
    pub fn point() -> Self {
        Target {
            name: "pt".into(),
            algebra: FrobeniusAlgebra::point(),
            c1: Vec::new(),
        }
    }

    pub fn projective_line() -> Self {
        Target {
            name: "P1".into(),
            algebra: FrobeniusAlgebra::projective_line(),
            c1: vec![2],
        }
    }

    pub fn novikov_rank(&self) -> usize {
        self.c1.len()
    }

    /// `(dim X − 3)(1 − g) + ∫_d c_1 + n`.
    pub fn virtual_dimension(&self, genus: u32, points: usize, degree: &[u32]) -> i64 {
        let dim = self.algebra.top_degree() as i64;
        let c1: i64 = self.c1.iter().zip(degree).map(|(c, d)| c * *d as i64).sum();
        (dim - 3) * (1 - genus as i64) + c1 + points as i64
    }

    pub fn is_point(&self) -> bool {
        self.algebra.is_point() && self.c1.is_empty() && self.algebra.top_degree() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_pairing() {
        let pt = FrobeniusAlgebra::point();
        let one = vec![Scalar::one()];
        assert_eq!(frobenius_pair(&one, &one, &pt).unwrap(), Scalar::one());
    }

    #[test]
    fn p1_pairing() {
        let p1 = FrobeniusAlgebra::projective_line();
        let one = vec![Scalar::one(), Scalar::zero()];
        let h = vec![Scalar::zero(), Scalar::one()];
        assert_eq!(frobenius_pair(&one, &h, &p1).unwrap(), Scalar::one());
        assert_eq!(frobenius_pair(&one, &one, &p1).unwrap(), Scalar::zero());
    }

    #[test]
    fn dimension_mismatch() {
        let p1 = FrobeniusAlgebra::projective_line();
        let err = frobenius_pair(&[Scalar::one()], &[Scalar::one(), Scalar::zero()], &p1);
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn inverse_is_exact() {
        let pairing = vec![
            vec![Scalar::zero(), Scalar::zero(), Scalar::new(2, 3)],
            vec![Scalar::zero(), Scalar::from_int(5), Scalar::zero()],
            vec![Scalar::new(2, 3), Scalar::zero(), Scalar::zero()],
        ];
        let alg = FrobeniusAlgebra::new(
            vec!["1".into(), "H".into(), "H2".into()],
            vec![0, 1, 2],
            2,
            pairing,
            vec![Scalar::one(), Scalar::zero(), Scalar::zero()],
        )
        .unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let entry: Scalar = (0..3).map(|c| alg.metric(a, c) * alg.inverse_metric(c, b)).sum();
                let expected = if a == b { Scalar::one() } else { Scalar::zero() };
                assert_eq!(entry, expected);
            }
        }
    }

    #[test]
    fn rejects_bad_grading_and_singular() {
        let bad = FrobeniusAlgebra::new(
            vec!["1".into(), "H".into()],
            vec![0, 1],
            1,
            vec![vec![Scalar::one(), Scalar::zero()], vec![Scalar::zero(), Scalar::one()]],
            vec![Scalar::one(), Scalar::zero()],
        );
        assert!(matches!(bad, Err(Error::InvalidAlgebra(_))));
        let singular = FrobeniusAlgebra::new(
            vec!["1".into()],
            vec![0],
            0,
            vec![vec![Scalar::zero()]],
            vec![Scalar::one()],
        );
        assert!(matches!(singular, Err(Error::InvalidAlgebra(_))));
    }

    #[test]
    fn virtual_dimensions() {
        let pt = Target::point();
        assert_eq!(pt.virtual_dimension(0, 3, &[]), 0);
        assert_eq!(pt.virtual_dimension(1, 1, &[]), 1);
        assert_eq!(pt.virtual_dimension(2, 1, &[]), 4);
        let p1 = Target::projective_line();
        assert_eq!(p1.virtual_dimension(0, 2, &[1]), 2);
    }

    #[test]
    fn algebra_json_roundtrip() {
        let p1 = FrobeniusAlgebra::projective_line();
        let text = serde_json::to_string(&p1).unwrap();
        let back: FrobeniusAlgebra = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p1);
    }
}
