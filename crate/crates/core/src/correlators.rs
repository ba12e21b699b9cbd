//! Tables of descendant correlators `⟨τ_{k_1}(α_1) ⋯ τ_{k_n}(α_n)⟩_{g,d}`.
//!
//! A table records which range it is complete for; inside that range an
//! absent entry is zero, outside it lookups fail. Entries violating the
//! dimension constraint are zero everywhere.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frobenius::Target;
use crate::scalar::Scalar;

/// `τ_k(φ_class)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(u32, usize)", into = "(u32, usize)")]
pub struct Insertion {
    pub k: u32,
    pub class: usize,
}

impl Insertion {
    pub fn new(k: u32, class: usize) -> Self {
        Insertion { k, class }
    }

    /// `τ_k` for a one-dimensional algebra.
    pub fn psi(k: u32) -> Self {
        Insertion { k, class: 0 }
    }
}

impl From<(u32, usize)> for Insertion {
    fn from((k, class): (u32, usize)) -> Self {
        Insertion { k, class }
    }
}

impl From<Insertion> for (u32, usize) {
    fn from(i: Insertion) -> Self {
        (i.k, i.class)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorrelatorKey {
    pub genus: u32,
    pub insertions: Vec<Insertion>,
    pub degree: Vec<u32>,
}

impl CorrelatorKey {
    pub fn new(genus: u32, mut insertions: Vec<Insertion>, degree: Vec<u32>) -> Self {
        insertions.sort_unstable();
        CorrelatorKey {
            genus,
            insertions,
            degree,
        }
    }

    pub fn point(genus: u32, ks: &[u32]) -> Self {
        CorrelatorKey::new(genus, ks.iter().map(|&k| Insertion::psi(k)).collect(), Vec::new())
    }

    /// `∏ mult!` over repeated insertions.
    pub fn automorphisms(&self) -> Scalar {
        multiplicity_factorials(&self.insertions)
    }
}

pub(crate) fn multiplicity_factorials<T: PartialEq>(sorted: &[T]) -> Scalar {
    let mut acc = Scalar::one();
    let mut run = 0u32;
    for (i, x) in sorted.iter().enumerate() {
        run = if i > 0 && &sorted[i - 1] == x { run + 1 } else { 1 };
        if run > 1 {
            acc *= Scalar::from_int(run as i64);
        }
    }
    acc
}

/// Range inside which the table is complete.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub max_genus: u32,
    pub max_points: usize,
    /// Largest descendant index recorded; `None` means unbounded.
    #[serde(default)]
    pub max_psi: Option<u32>,
    /// Largest total Novikov degree recorded.
    #[serde(default)]
    pub max_degree: u32,
}

impl Coverage {
    pub fn contains(&self, key: &CorrelatorKey) -> bool {
        key.genus <= self.max_genus
            && key.insertions.len() <= self.max_points
            && key.degree.iter().sum::<u32>() <= self.max_degree
            && self.max_psi.is_none_or(|m| key.insertions.iter().all(|i| i.k <= m))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatorTable {
    target: Target,
    coverage: Coverage,
    entries: BTreeMap<CorrelatorKey, Scalar>,
}

impl CorrelatorTable {
    pub fn new(target: Target, coverage: Coverage) -> Self {
        CorrelatorTable {
            target,
            coverage,
            entries: BTreeMap::new(),
        }
    }

    /// An empty table that claims completeness: every correlator is zero.
    pub fn empty(target: Target) -> Self {
        CorrelatorTable::new(
            target,
            Coverage {
                max_genus: u32::MAX,
                max_points: usize::MAX,
                max_psi: None,
                max_degree: u32::MAX,
            },
        )
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn coverage(&self) -> Coverage {
        self.coverage
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Nonzero entries in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (&CorrelatorKey, &Scalar)> {
        self.entries.iter()
    }

    /// Whether the dimension constraint allows a nonzero value.
    pub fn dimension_allows(&self, key: &CorrelatorKey) -> bool {
        let alg = &self.target.algebra;
        let lhs: i64 = key
            .insertions
            .iter()
            .map(|i| i.k as i64 + alg.degree(i.class) as i64)
            .sum();
        lhs == self
            .target
            .virtual_dimension(key.genus, key.insertions.len(), &self.padded_degree(&key.degree))
    }

    fn padded_degree(&self, d: &[u32]) -> Vec<u32> {
        let mut v = d.to_vec();
        v.resize(self.target.novikov_rank(), 0);
        v
    }

    fn normalize(&self, key: CorrelatorKey) -> Result<CorrelatorKey> {
        if key.degree.len() > self.target.novikov_rank()
            && key.degree.iter().skip(self.target.novikov_rank()).any(|&d| d != 0)
        {
            return Err(Error::DimensionMismatch {
                expected: self.target.novikov_rank(),
                got: key.degree.len(),
            });
        }
        if let Some(bad) = key.insertions.iter().find(|i| i.class >= self.target.algebra.dim()) {
            return Err(Error::DimensionMismatch {
                expected: self.target.algebra.dim(),
                got: bad.class + 1,
            });
        }
        let degree = self.padded_degree(&key.degree);
        Ok(CorrelatorKey { degree, ..key })
    }

    pub fn insert(&mut self, key: CorrelatorKey, value: Scalar) -> Result<()> {
        let key = self.normalize(key)?;
        if value.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
        Ok(())
    }

    /// The correlator value; zero if the dimension constraint forbids it,
    /// otherwise an error outside the coverage range.
    pub fn get(&self, key: &CorrelatorKey) -> Result<Scalar> {
        let key = self.normalize(key.clone())?;
        if !self.dimension_allows(&key) {
            return Ok(Scalar::zero());
        }
        if let Some(v) = self.entries.get(&key) {
            return Ok(v.clone());
        }
        if self.coverage.contains(&key) {
            Ok(Scalar::zero())
        } else {
            Err(Error::MissingCorrelator(format!("{key:?}")))
        }
    }

    /// Point-target lookup `⟨τ_{k_1} ⋯ τ_{k_n}⟩_g`.
    pub fn point(&self, genus: u32, ks: &[u32]) -> Result<Scalar> {
        self.get(&CorrelatorKey::point(genus, ks))
    }

    /// Copy restricted to a smaller coverage.
    pub fn restricted(&self, coverage: Coverage) -> CorrelatorTable {
        CorrelatorTable {
            target: self.target.clone(),
            coverage,
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| coverage.contains(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> TableJson {
        TableJson {
            target: self.target.clone(),
            coverage: self.coverage,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| EntryJson {
                    genus: k.genus,
                    insertions: k.insertions.clone(),
                    degree: k.degree.clone(),
                    value: v.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &TableJson) -> Result<Self> {
        let mut t = CorrelatorTable::new(json.target.clone(), json.coverage);
        for e in &json.entries {
            t.insert(
                CorrelatorKey::new(e.genus, e.insertions.clone(), e.degree.clone()),
                e.value.clone(),
            )?;
        }
        Ok(t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub genus: u32,
    pub insertions: Vec<Insertion>,
    #[serde(default)]
    pub degree: Vec<u32>,
    pub value: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub target: Target,
    pub coverage: Coverage,
    pub entries: Vec<EntryJson>,
}

/// Names of the Novikov variables: `Q` for rank one, `Q_1, Q_2, …` otherwise.
pub fn novikov_names(target: &Target) -> Vec<String> {
    match target.novikov_rank() {
        0 => Vec::new(),
        1 => vec!["Q".into()],
        r => (1..=r).map(|i| format!("Q_{i}")).collect(),
    }
}

/// Sorted (non-decreasing) length-`n` vectors of `0..=max` with sum `total`.
pub fn sorted_compositions(n: usize, total: u32, max: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, total: u32, lo: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        // remaining parts are ≥ lo, so need n·lo ≤ total
        let mut k = lo;
        while k <= max && (n as u32) * k <= total {
            cur.push(k);
            rec(n - 1, total - k, k, max, cur, out);
            cur.pop();
            k += 1;
        }
    }
    let mut out = Vec::new();
    rec(n, total, 0, max, &mut Vec::new(), &mut out);
    out
}

/// Vectors of `r` non-negative integers with sum exactly `total`.
pub fn degree_vectors(r: usize, total: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        let mut next = Vec::new();
        for v in &out {
            let used: u32 = v.iter().sum();
            for d in 0..=total - used {
                let mut w = v.clone();
                w.push(d);
                next.push(w);
            }
        }
        out = next;
    }
    out.retain(|v| v.iter().sum::<u32>() == total);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn automorphism_factor() {
        assert_eq!(
            CorrelatorKey::point(0, &[0, 0, 0, 1]).automorphisms(),
            Scalar::from_int(6)
        );
        assert_eq!(
            CorrelatorKey::point(0, &[1, 0, 1, 0, 0]).automorphisms(),
            Scalar::from_int(12)
        );
        assert_eq!(CorrelatorKey::point(1, &[1]).automorphisms(), Scalar::one());
    }

    #[test]
    fn coverage_and_dimension() {
        let mut t = CorrelatorTable::new(
            Target::point(),
            Coverage {
                max_genus: 1,
                max_points: 3,
                max_psi: None,
                max_degree: 0,
            },
        );
        t.insert(CorrelatorKey::point(0, &[0, 0, 0]), Scalar::one()).unwrap();
        assert_eq!(t.point(0, &[0, 0, 0]).unwrap(), Scalar::one());
        // dimension forbids: zero regardless of coverage
        assert_eq!(t.point(5, &[0]).unwrap(), Scalar::zero());
        // allowed but outside coverage
        assert!(matches!(t.point(2, &[4]), Err(Error::MissingCorrelator(_))));
        // inside coverage and absent
        assert_eq!(t.point(1, &[1]).unwrap(), Scalar::zero());
    }

    #[test]
    fn json_roundtrip() {
        let mut t = CorrelatorTable::empty(Target::projective_line());
        t.insert(
            CorrelatorKey::new(0, vec![Insertion::new(0, 1), Insertion::new(0, 1)], vec![1]),
            Scalar::one(),
        )
        .unwrap();
        let text = serde_json::to_string(&t.to_json()).unwrap();
        assert!(text.contains(r#""insertions":[[0,1],[0,1]]"#));
        let back = CorrelatorTable::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn compositions() {
        assert_eq!(sorted_compositions(3, 2, 5), vec![vec![0, 0, 2], vec![0, 1, 1]]);
        assert_eq!(sorted_compositions(2, 3, 2), vec![vec![1, 2]]);
        assert_eq!(sorted_compositions(0, 0, 0), vec![Vec::<u32>::new()]);
        assert_eq!(degree_vectors(2, 1).len(), 2);
        assert_eq!(degree_vectors(0, 0), vec![Vec::<u32>::new()]);
        assert!(degree_vectors(0, 2).is_empty());
    }
}
