//! The loop space `ℋ = H•(X) ⊗ ℂ((z⁻¹))`, its residue symplectic form and
//! Darboux coordinates.
//!
//! An [`HElement`] is a Laurent polynomial in `z` whose coefficients are
//! cohomology vectors of [`TruncatedSeries`]. Plain numeric points use the
//! constant series space. Each side of the z-window is either exact (no
//! terms beyond it) or truncated (terms beyond it are unknown); the residue
//! pairing refuses to produce a value that would depend on unknown terms.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frobenius::FrobeniusAlgebra;
use crate::scalar::Scalar;
use crate::series::{SeriesSpace, TermJson, TruncJson, TruncatedSeries, Truncation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HElement {
    algebra: FrobeniusAlgebra,
    space: SeriesSpace,
    coeffs: BTreeMap<i32, Vec<TruncatedSeries>>,
    zmin: i32,
    zmax: i32,
    truncated_below: bool,
    truncated_above: bool,
}

impl HElement {
    pub fn zero(alg: &FrobeniusAlgebra, space: &SeriesSpace) -> Self {
        HElement {
            algebra: alg.clone(),
            space: space.clone(),
            coeffs: BTreeMap::new(),
            zmin: 0,
            zmax: 0,
            truncated_below: false,
            truncated_above: false,
        }
    }

    /// Zero element whose coefficients below `zmin` are unknown.
    pub fn zero_truncated_below(alg: &FrobeniusAlgebra, space: &SeriesSpace, zmin: i32) -> Self {
        let mut e = HElement::zero(alg, space);
        e.zmin = zmin.min(0);
        e.truncated_below = true;
        e
    }

    /// `c · φ_μ z^k` with a scalar coefficient.
    pub fn basis(alg: &FrobeniusAlgebra, space: &SeriesSpace, mu: usize, k: i32) -> Self {
        let mut e = HElement::zero(alg, space);
        e.add_component(k, mu, TruncatedSeries::one(space));
        e
    }

    /// `φ^ν (−z)^{−1−l}`.
    pub fn dual_basis(alg: &FrobeniusAlgebra, space: &SeriesSpace, nu: usize, l: u32) -> Self {
        let mut e = HElement::zero(alg, space);
        let sign = Scalar::sign_power(1 + l as i64);
        for (lambda, g) in alg.dual_basis_vector(nu).iter().enumerate() {
            e.add_component(-1 - l as i32, lambda, TruncatedSeries::constant(space, g * &sign));
        }
        e
    }

    /// `−z · 1`.
    pub fn minus_z(alg: &FrobeniusAlgebra, space: &SeriesSpace) -> Self {
        let mut e = HElement::zero(alg, space);
        for (mu, u) in alg.unit().iter().enumerate() {
            e.add_component(1, mu, TruncatedSeries::constant(space, -u));
        }
        e
    }

    /// Builds a numeric element from `(z-exponent, class index, value)` triples.
    pub fn from_scalars(alg: &FrobeniusAlgebra, entries: &[(i32, usize, Scalar)]) -> Self {
        let space = SeriesSpace::scalars();
        let mut e = HElement::zero(alg, &space);
        for (k, mu, c) in entries {
            e.add_component(*k, *mu, TruncatedSeries::constant(&space, c.clone()));
        }
        e
    }

    pub fn algebra(&self) -> &FrobeniusAlgebra {
        &self.algebra
    }

    pub fn space(&self) -> &SeriesSpace {
        &self.space
    }

    pub fn window(&self) -> (i32, i32) {
        (self.zmin, self.zmax)
    }

    pub fn is_truncated_below(&self) -> bool {
        self.truncated_below
    }

    pub fn is_truncated_above(&self) -> bool {
        self.truncated_above
    }

    /// Marks coefficients below `zmin` as unknown, discarding any stored there.
    pub fn truncate_below(&mut self, zmin: i32) {
        self.zmin = zmin.min(0);
        self.truncated_below = true;
        self.coeffs.retain(|&k, _| k >= zmin);
    }

    /// Marks coefficients above `zmax` as unknown, discarding any stored there.
    pub fn truncate_above(&mut self, zmax: i32) {
        self.zmax = zmax.max(0);
        self.truncated_above = true;
        self.coeffs.retain(|&k, _| k <= zmax);
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Stored z-exponents with their cohomology vectors.
    pub fn components(&self) -> impl Iterator<Item = (i32, &[TruncatedSeries])> {
        self.coeffs.iter().map(|(k, v)| (*k, v.as_slice()))
    }

    pub fn component(&self, k: i32) -> Option<&[TruncatedSeries]> {
        self.coeffs.get(&k).map(Vec::as_slice)
    }

    /// The `φ_μ` coefficient of `z^k`.
    pub fn coefficient(&self, k: i32, mu: usize) -> TruncatedSeries {
        self.coeffs
            .get(&k)
            .map(|v| v[mu].clone())
            .unwrap_or_else(|| TruncatedSeries::zero(&self.space))
    }

    /// Adds `c · φ_μ z^k`. Outside a truncated side the term is dropped.
    pub fn add_component(&mut self, k: i32, mu: usize, c: TruncatedSeries) {
        assert!(mu < self.algebra.dim(), "class index out of range");
        let c = if c.space() == &self.space {
            c
        } else {
            c.reembed(&self.space)
                .expect("coefficient outside the element's series space")
        };
        if c.is_zero() || !self.extend_window(k) {
            return;
        }
        let dim = self.algebra.dim();
        let space = self.space.clone();
        let entry = self
            .coeffs
            .entry(k)
            .or_insert_with(|| vec![TruncatedSeries::zero(&space); dim]);
        entry[mu] = &entry[mu] + &c;
        if entry.iter().all(TruncatedSeries::is_zero) {
            self.coeffs.remove(&k);
        }
    }

    fn extend_window(&mut self, k: i32) -> bool {
        if k < self.zmin {
            if self.truncated_below {
                return false;
            }
            self.zmin = k;
        }
        if k > self.zmax {
            if self.truncated_above {
                return false;
            }
            self.zmax = k;
        }
        true
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch);
        }
        if self.space != other.space {
            return Err(Error::UniverseMismatch);
        }
        Ok(())
    }

    fn combine(&self, other: &Self, sign: &Scalar) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = HElement::zero(&self.algebra, &self.space);
        let lo = |e: &HElement| e.truncated_below.then_some(e.zmin);
        let hi = |e: &HElement| e.truncated_above.then_some(e.zmax);
        match (lo(self), lo(other)) {
            (None, None) => out.zmin = self.zmin.min(other.zmin),
            (a, b) => {
                out.zmin = a.into_iter().chain(b).max().expect("one side truncated");
                out.truncated_below = true;
            }
        }
        match (hi(self), hi(other)) {
            (None, None) => out.zmax = self.zmax.max(other.zmax),
            (a, b) => {
                out.zmax = a.into_iter().chain(b).min().expect("one side truncated");
                out.truncated_above = true;
            }
        }
        for (k, v) in &self.coeffs {
            for (mu, c) in v.iter().enumerate() {
                out.add_component(*k, mu, c.clone());
            }
        }
        for (k, v) in &other.coeffs {
            for (mu, c) in v.iter().enumerate() {
                out.add_component(*k, mu, c.scale(sign));
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.combine(other, &Scalar::one())
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, &-Scalar::one())
    }

    /// Multiplies every coefficient by the series `c`.
    pub fn scale(&self, c: &TruncatedSeries) -> Result<Self> {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            for x in v.iter_mut() {
                *x = x.try_mul(c)?;
            }
        }
        out.coeffs.retain(|_, v| v.iter().any(|x| !x.is_zero()));
        Ok(out)
    }

    pub fn scale_scalar(&self, c: &Scalar) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            for x in v.iter_mut() {
                *x = x.scale(c);
            }
        }
        out.coeffs.retain(|_, v| v.iter().any(|x| !x.is_zero()));
        out
    }

    /// `f(−z)`.
    pub fn reflect(&self) -> Self {
        let mut out = self.clone();
        for (k, v) in out.coeffs.iter_mut() {
            if k.rem_euclid(2) == 1 {
                for x in v.iter_mut() {
                    *x = -&*x;
                }
            }
        }
        out
    }

    /// Multiplication by `z^shift`; the window moves with it.
    pub fn shift(&self, shift: i32) -> Self {
        let mut out = HElement::zero(&self.algebra, &self.space);
        out.zmin = (self.zmin + shift).min(0);
        out.zmax = (self.zmax + shift).max(0);
        out.truncated_below = self.truncated_below;
        out.truncated_above = self.truncated_above;
        if self.truncated_below {
            out.zmin = self.zmin + shift;
        }
        if self.truncated_above {
            out.zmax = self.zmax + shift;
        }
        for (k, v) in &self.coeffs {
            out.coeffs.insert(k + shift, v.clone());
        }
        out
    }

    /// The `ℋ₊` part (`k ≥ 0`).
    pub fn plus_part(&self) -> Self {
        let mut out = self.clone();
        out.coeffs.retain(|&k, _| k >= 0);
        out.zmin = 0;
        out.truncated_below = false;
        out
    }

    /// The `ℋ₋` part (`k < 0`).
    pub fn minus_part(&self) -> Self {
        let mut out = self.clone();
        out.coeffs.retain(|&k, _| k < 0);
        out.zmax = 0;
        out.truncated_above = false;
        out
    }

    pub fn is_in_plus(&self) -> bool {
        self.coeffs.keys().all(|&k| k >= 0)
    }

    /// Same element with coefficients moved to `target` by variable name.
    pub fn reembed(&self, target: &SeriesSpace) -> Result<Self> {
        let mut out = self.clone();
        out.space = target.clone();
        for v in out.coeffs.values_mut() {
            for x in v.iter_mut() {
                *x = x.reembed(target)?;
            }
        }
        out.coeffs.retain(|_, v| v.iter().any(|x| !x.is_zero()));
        Ok(out)
    }

    /// Applies `f` to every coefficient series.
    pub fn map_coefficients<F>(&self, target: &SeriesSpace, mut f: F) -> Result<Self>
    where
        F: FnMut(&TruncatedSeries) -> Result<TruncatedSeries>,
    {
        let mut out = self.clone();
        out.space = target.clone();
        out.coeffs.clear();
        for (k, v) in &self.coeffs {
            for (mu, c) in v.iter().enumerate() {
                let image = f(c)?;
                if image.space() != target {
                    return Err(Error::UniverseMismatch);
                }
                out.add_component(*k, mu, image);
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> HElementJson {
        let mut terms = Vec::new();
        for (k, v) in &self.coeffs {
            for (mu, c) in v.iter().enumerate() {
                for (m, x) in c.terms() {
                    let t = TermJson::encode(m, x, self.space.names());
                    terms.push(HTermJson {
                        z: *k,
                        class: self.algebra.labels()[mu].clone(),
                        exp: t.exp,
                        coeff: t.coeff,
                    });
                }
            }
        }
        HElementJson {
            basis: self.algebra.labels().to_vec(),
            vars: self.space.names().to_vec(),
            trunc: self.space.trunc().into(),
            z_window: [self.zmin, self.zmax],
            truncated: Truncated {
                below: self.truncated_below,
                above: self.truncated_above,
            },
            terms,
        }
    }

    pub fn from_json(json: &HElementJson, alg: &FrobeniusAlgebra) -> Result<Self> {
        if !json.basis.is_empty() && json.basis != alg.labels() {
            return Err(Error::AlgebraMismatch);
        }
        let space = SeriesSpace::new(json.vars.clone(), json.trunc.into())?;
        let mut e = HElement::zero(alg, &space);
        e.zmin = json.z_window[0].min(0);
        e.zmax = json.z_window[1].max(0);
        for t in &json.terms {
            let mu = alg
                .labels()
                .iter()
                .position(|l| l == &t.class)
                .ok_or_else(|| Error::Parse(format!("unknown class label `{}`", t.class)))?;
            let (m, c) = TermJson {
                exp: t.exp.clone(),
                coeff: t.coeff.clone(),
            }
            .decode(&space)?;
            let mut s = TruncatedSeries::zero(&space);
            s.add_term(m, c);
            if s.is_zero() {
                continue;
            }
            if (t.z < e.zmin && json.truncated.below) || (t.z > e.zmax && json.truncated.above) {
                return Err(Error::Parse(format!(
                    "term at z^{} lies outside the declared window",
                    t.z
                )));
            }
            e.add_component(t.z, mu, s);
        }
        e.truncated_below = json.truncated.below;
        e.truncated_above = json.truncated.above;
        Ok(e)
    }
}

impl fmt::Display for HElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        let mut first = true;
        for (k, v) in self.coeffs.iter().rev() {
            for (mu, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                let zpart = match k {
                    0 => String::new(),
                    1 => "*z".into(),
                    k => format!("*z^{k}"),
                };
                let class = if self.algebra.is_point() {
                    String::new()
                } else {
                    format!("*{}", self.algebra.labels()[mu])
                };
                write!(f, "({c}){class}{zpart}")?;
            }
        }
        if self.truncated_below {
            write!(f, " + O(z^{})", self.zmin - 1)?;
        }
        if self.truncated_above {
            write!(f, " + O(z^{})", self.zmax + 1)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncated {
    #[serde(default)]
    pub below: bool,
    #[serde(default)]
    pub above: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HTermJson {
    pub z: i32,
    pub class: String,
    #[serde(default)]
    pub exp: BTreeMap<String, i32>,
    pub coeff: Scalar,
}

/// Canonical JSON form of an [`HElement`]: series terms tagged with a
/// z-exponent and a basis label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HElementJson {
    #[serde(default)]
    pub basis: Vec<String>,
    #[serde(default)]
    pub vars: Vec<String>,
    #[serde(default = "scalar_trunc")]
    pub trunc: TruncJson,
    #[serde(default)]
    pub z_window: [i32; 2],
    #[serde(default)]
    pub truncated: Truncated,
    #[serde(default)]
    pub terms: Vec<HTermJson>,
}

fn scalar_trunc() -> TruncJson {
    Truncation::new(0, 0).into()
}

/// Fails when the `z^{-1}` coefficient of `(f(−z), g(z))` could involve a
/// coefficient hidden by a truncated window side.
fn check_residue_window(f: &HElement, g: &HElement) -> Result<()> {
    // unknown f_a (a < f.zmin) meets g_b with b = −1 − a ≥ −f.zmin
    if f.truncated_below {
        let reach = -f.zmin;
        if g.truncated_above || g.coeffs.range(reach..).next().is_some() {
            return Err(Error::ResidueTruncated { exponent: -1 - reach });
        }
    }
    if f.truncated_above {
        let reach = -2 - f.zmax;
        if g.truncated_below || g.coeffs.range(..=reach).next().is_some() {
            return Err(Error::ResidueTruncated { exponent: f.zmax + 1 });
        }
    }
    Ok(())
}

/// `Ω(f, g) = Res_{z=0} (f(−z), g(z)) dz`, with series coefficients.
pub fn omega_series(f: &HElement, g: &HElement) -> Result<TruncatedSeries> {
    f.check_compatible(g)?;
    check_residue_window(f, g)?;
    check_residue_window(g, f)?;
    let alg = &f.algebra;
    let mut acc = TruncatedSeries::zero(&f.space);
    for (a, fa) in &f.coeffs {
        let Some(gb) = g.coeffs.get(&(-1 - a)) else { continue };
        let sign = Scalar::sign_power(*a as i64);
        for (i, x) in fa.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in gb.iter().enumerate() {
                let m = alg.metric(i, j);
                if m.is_zero() || y.is_zero() {
                    continue;
                }
                acc = &acc + &(x * y).scale(&(m * &sign));
            }
        }
    }
    Ok(acc)
}

/// `Ω(f, g)` for numeric elements.
pub fn omega(f: &HElement, g: &HElement) -> Result<Scalar> {
    let s = omega_series(f, g)?;
    s.as_scalar()
        .ok_or_else(|| Error::Config("omega: coefficients are not constants; use omega_series".into()))
}

/// Darboux coordinates `q^μ_k` (`k ≥ 0`) and `p^ν_l` (`l ≥ 0`), indexed
/// `[k][μ]` and `[l][ν]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DarbouxVector {
    pub q: Vec<Vec<TruncatedSeries>>,
    pub p: Vec<Vec<TruncatedSeries>>,
}

impl DarbouxVector {
    /// `Σ_{k,μ} (p^f q^g − q^f p^g)`, the symplectic form in coordinates.
    pub fn pairing(&self, other: &DarbouxVector) -> Result<TruncatedSeries> {
        let Some(first) = [&self.q, &self.p, &other.q, &other.p]
            .into_iter()
            .flat_map(|v| v.iter().flatten())
            .next()
        else {
            return Ok(TruncatedSeries::zero(&SeriesSpace::scalars()));
        };
        let mut acc = TruncatedSeries::zero(first.space());
        for (pf, qg) in self.p.iter().zip(&other.q) {
            for (a, b) in pf.iter().zip(qg) {
                acc = acc.try_add(&a.try_mul(b)?)?;
            }
        }
        for (qf, pg) in self.q.iter().zip(&other.p) {
            for (a, b) in qf.iter().zip(pg) {
                acc = acc.try_sub(&a.try_mul(b)?)?;
            }
        }
        Ok(acc)
    }
}

/// Reads off `q^μ_k` as the `φ_μ` part of `z^k` and `p^ν_l` from the
/// expansion in `φ^ν (−z)^{−1−l}`.
pub fn to_darboux(f: &HElement) -> DarbouxVector {
    let alg = &f.algebra;
    let zero = TruncatedSeries::zero(&f.space);
    let qmax = f.zmax.max(0) as usize;
    let pmax = (-f.zmin).max(0) as usize;
    let mut q = vec![vec![zero.clone(); alg.dim()]; qmax + 1];
    let mut p = vec![vec![zero.clone(); alg.dim()]; pmax];
    for (k, v) in &f.coeffs {
        if *k >= 0 {
            q[*k as usize] = v.clone();
        } else {
            let l = (-1 - k) as usize;
            let sign = Scalar::sign_power(1 + l as i64);
            for (nu, slot) in p[l].iter_mut().enumerate() {
                let mut acc = zero.clone();
                for (lambda, c) in v.iter().enumerate() {
                    let g = alg.metric(lambda, nu);
                    if !g.is_zero() {
                        acc = &acc + &c.scale(&(g * &sign));
                    }
                }
                *slot = acc;
            }
        }
    }
    DarbouxVector { q, p }
}

/// Inverse of [`to_darboux`]; the result is exact (no truncated sides).
pub fn from_darboux(d: &DarbouxVector, alg: &FrobeniusAlgebra, space: &SeriesSpace) -> Result<HElement> {
    let mut e = HElement::zero(alg, space);
    for (k, row) in d.q.iter().enumerate() {
        alg.check_vector_len(row.len())?;
        for (mu, c) in row.iter().enumerate() {
            e.add_component(k as i32, mu, c.clone());
        }
    }
    for (l, row) in d.p.iter().enumerate() {
        alg.check_vector_len(row.len())?;
        let sign = Scalar::sign_power(1 + l as i64);
        for (nu, c) in row.iter().enumerate() {
            for lambda in 0..alg.dim() {
                let g = alg.inverse_metric(nu, lambda);
                if !g.is_zero() {
                    e.add_component(-1 - l as i32, lambda, c.scale(&(g * &sign)));
                }
            }
        }
    }
    e.zmax = e.zmax.max(d.q.len() as i32 - 1);
    e.zmin = e.zmin.min(-(d.p.len() as i32));
    Ok(e)
}

/// `t ↦ t − z·1`; `t` must lie in `ℋ₊`.
pub fn dilaton_shift(t: &HElement) -> Result<HElement> {
    if let Some((&k, _)) = t.coeffs.iter().next().filter(|(&k, _)| k < 0) {
        return Err(Error::NotPositive(k));
    }
    t.try_add(&HElement::minus_z(&t.algebra, &t.space))
}

/// `q ↦ q + z·1`.
pub fn inverse_dilaton_shift(q: &HElement) -> Result<HElement> {
    q.try_sub(&HElement::minus_z(&q.algebra, &q.space))
}

impl FrobeniusAlgebra {
    pub(crate) fn check_vector_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }
}
