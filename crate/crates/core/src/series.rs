//! Truncated multivariate formal series with exact rational coefficients.
//!
//! A [`TruncatedSeries`] lives in a [`SeriesSpace`]: an ordered list of
//! formal variables plus a [`Truncation`]. Terms are stored sparsely, keyed
//! by dense exponent vectors together with a separate integer ħ-grade.
//! Every operation discards terms beyond the truncation, so each identity
//! checked with these series holds modulo the truncation ideal.
//!
//! Terms are kept in graded-lexicographic order (total degree, then ħ-grade,
//! then lexicographic with earlier variables dominant), which makes the
//! serialized form canonical.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::frobenius::FrobeniusAlgebra;
use crate::scalar::Scalar;

/// Truncation bounds shared by every series of a space.
///
/// `hbar` is the largest ħ-exponent kept. Series of the genus expansion
/// carry ħ^{g-1} for genus `g`, so a space holding genera `0..=G` has
/// `hbar = G - 1`; plain series sit at ħ⁰.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Truncation {
    pub deg: u32,
    pub depth: u32,
    pub hbar: i32,
}

impl Truncation {
    pub fn new(deg: u32, depth: u32) -> Self {
        Truncation { deg, depth, hbar: 0 }
    }

    /// Bounds for ħ-graded series covering genera `0..=genus`.
    pub fn with_genus(deg: u32, depth: u32, genus: u32) -> Self {
        Truncation {
            deg,
            depth,
            hbar: genus as i32 - 1,
        }
    }

    /// Genus bound in the ħ^{g-1} convention.
    pub fn genus(&self) -> i32 {
        self.hbar + 1
    }
}

#[derive(Debug, PartialEq, Eq)]
struct SpaceInner {
    names: Vec<String>,
    index: HashMap<String, usize>,
    trunc: Truncation,
}

/// A variable universe together with its truncation.
#[derive(Clone, Debug)]
pub struct SeriesSpace(Arc<SpaceInner>);

impl PartialEq for SeriesSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.trunc == other.0.trunc && self.0.names == other.0.names)
    }
}

impl Eq for SeriesSpace {}

impl SeriesSpace {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>, trunc: Truncation) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if n == "hbar" || index.insert(n.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate or reserved variable name `{n}`")));
            }
        }
        Ok(SeriesSpace(Arc::new(SpaceInner { names, index, trunc })))
    }

    /// The constants: no variables.
    pub fn scalars() -> Self {
        SeriesSpace::new(Vec::<String>::new(), Truncation::new(0, 0)).expect("empty universe")
    }

    /// Descendant variables `prefix_k^α` for `k ≤ depth`, followed by `extra`.
    pub fn descendants(prefix: &str, alg: &FrobeniusAlgebra, extra: &[String], trunc: Truncation) -> Result<Self> {
        let mut names = Vec::new();
        for k in 0..=trunc.depth {
            for a in 0..alg.dim() {
                names.push(descendant_name(prefix, k, a, alg));
            }
        }
        names.extend(extra.iter().cloned());
        SeriesSpace::new(names, trunc)
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn nvars(&self) -> usize {
        self.0.names.len()
    }

    pub fn trunc(&self) -> Truncation {
        self.0.trunc
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.0
            .index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.index.contains_key(name)
    }

    /// Same variables, different bounds.
    pub fn with_truncation(&self, trunc: Truncation) -> Self {
        SeriesSpace(Arc::new(SpaceInner {
            names: self.0.names.clone(),
            index: self.0.index.clone(),
            trunc,
        }))
    }

    /// This universe with `extra` variables appended.
    pub fn extended(&self, extra: &[String]) -> Result<Self> {
        let mut names = self.0.names.clone();
        names.extend(extra.iter().cloned());
        SeriesSpace::new(names, self.0.trunc)
    }

    fn admits(&self, m: &Monomial) -> bool {
        m.deg <= self.0.trunc.deg && m.hbar <= self.0.trunc.hbar
    }
}

/// `t_k` for one-dimensional algebras, `t_k^label` otherwise.
pub fn descendant_name(prefix: &str, k: u32, alpha: usize, alg: &FrobeniusAlgebra) -> String {
    if alg.dim() == 1 {
        format!("{prefix}_{k}")
    } else {
        format!("{prefix}_{k}^{}", alg.labels()[alpha])
    }
}

type Exps = SmallVec<[u16; 16]>;

/// An exponent vector with a cached total degree and an ħ-grade.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    deg: u32,
    hbar: i32,
    exps: Exps,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial {
            deg: 0,
            hbar: 0,
            exps: SmallVec::from_elem(0, nvars),
        }
    }

    pub fn from_exponents(exps: &[u16], hbar: i32) -> Self {
        Monomial {
            deg: exps.iter().map(|&e| e as u32).sum(),
            hbar,
            exps: SmallVec::from_slice(exps),
        }
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn hbar(&self) -> i32 {
        self.hbar
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn exponent(&self, var: usize) -> u16 {
        self.exps[var]
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps.clone();
        for (e, o) in exps.iter_mut().zip(other.exps.iter()) {
            *e += *o;
        }
        Monomial {
            deg: self.deg + other.deg,
            hbar: self.hbar + other.hbar,
            exps,
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg
            .cmp(&other.deg)
            .then(self.hbar.cmp(&other.hbar))
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    space: SeriesSpace,
    terms: BTreeMap<Monomial, Scalar>,
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.terms == other.terms
    }
}

impl Eq for TruncatedSeries {}

impl TruncatedSeries {
    pub fn zero(space: &SeriesSpace) -> Self {
        TruncatedSeries {
            space: space.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(space: &SeriesSpace, c: Scalar) -> Self {
        let mut s = TruncatedSeries::zero(space);
        s.add_term(Monomial::one(space.nvars()), c);
        s
    }

    pub fn one(space: &SeriesSpace) -> Self {
        TruncatedSeries::constant(space, Scalar::one())
    }

    pub fn var(space: &SeriesSpace, name: &str) -> Result<Self> {
        TruncatedSeries::monomial(space, &[(name, 1)], 0, Scalar::one())
    }

    /// `c · ħ^hbar · ∏ name^e`.
    pub fn monomial(space: &SeriesSpace, powers: &[(&str, u16)], hbar: i32, c: Scalar) -> Result<Self> {
        let mut m = Monomial::one(space.nvars());
        for &(name, e) in powers {
            let i = space.index_of(name)?;
            m.exps[i] += e;
            m.deg += e as u32;
        }
        m.hbar = hbar;
        let mut s = TruncatedSeries::zero(space);
        s.add_term(m, c);
        Ok(s)
    }

    pub fn space(&self) -> &SeriesSpace {
        &self.space
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    /// The constant value, if the series has no non-constant terms.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                (m.deg == 0 && m.hbar == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn constant_term(&self) -> Scalar {
        self.coefficient(&Monomial::one(self.space.nvars()))
    }

    /// Lowest total degree present, `None` for zero.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(|m| m.deg)
    }

    /// Adds `c·m` in place, dropping it if it falls outside the truncation.
    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        debug_assert_eq!(m.exps.len(), self.space.nvars());
        if c.is_zero() || !self.space.admits(&m) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::UniverseMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.mul_inner(other, false).0)
    }

    /// Product that reports whether any term was discarded by truncation.
    pub fn mul_exact(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let (out, overflow) = self.mul_inner(other, true);
        if overflow {
            return Err(Error::WindowOverflow);
        }
        Ok(out)
    }

    fn mul_inner(&self, other: &Self, detect: bool) -> (Self, bool) {
        let trunc = self.space.trunc();
        let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
        let mut overflow = false;
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma.deg + mb.deg > trunc.deg {
                    overflow = true;
                    // b is sorted by degree
                    break;
                }
                if ma.hbar + mb.hbar > trunc.hbar {
                    overflow = true;
                    continue;
                }
                let prod = ca * cb;
                match acc.entry(ma.times(mb)) {
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(prod);
                    }
                    std::collections::hash_map::Entry::Occupied(mut o) => {
                        *o.get_mut() += prod;
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        (
            TruncatedSeries {
                space: self.space.clone(),
                terms,
            },
            detect && overflow,
        )
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return TruncatedSeries::zero(&self.space);
        }
        TruncatedSeries {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// Multiplies every term by ħ^shift (terms pushed past the bound are dropped).
    pub fn shift_hbar(&self, shift: i32) -> Self {
        let mut out = TruncatedSeries::zero(&self.space);
        for (m, c) in &self.terms {
            let mut m = m.clone();
            m.hbar += shift;
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = TruncatedSeries::one(&self.space);
        for _ in 0..e {
            acc = acc.mul_inner(self, false).0;
        }
        acc
    }

    /// Exact partial derivative with respect to the variable at `var`.
    pub fn derive_index(&self, var: usize) -> Self {
        let mut out = TruncatedSeries::zero(&self.space);
        for (m, c) in &self.terms {
            let e = m.exps[var];
            if e == 0 {
                continue;
            }
            let mut d = m.clone();
            d.exps[var] -= 1;
            d.deg -= 1;
            out.terms.insert(d, c * &Scalar::from_int(e as i64));
        }
        out
    }

    pub fn derive(&self, var: &str) -> Result<Self> {
        Ok(self.derive_index(self.space.index_of(var)?))
    }

    /// Terms of ħ-grade `hbar`, returned at grade zero.
    pub fn hbar_component(&self, hbar: i32) -> Self {
        let mut out = TruncatedSeries::zero(&self.space);
        for (m, c) in self.terms.iter().filter(|(m, _)| m.hbar == hbar) {
            let mut m = m.clone();
            m.hbar = 0;
            out.terms.insert(m, c.clone());
        }
        out
    }

    /// Distinct ħ-grades present.
    pub fn hbar_grades(&self) -> Vec<i32> {
        let mut g: Vec<i32> = self.terms.keys().map(|m| m.hbar).collect();
        g.sort_unstable();
        g.dedup();
        g
    }

    /// Re-home the series in `target`, matching variables by name. Terms outside
    /// the new truncation are dropped; a used variable missing from `target`
    /// is an error.
    pub fn reembed(&self, target: &SeriesSpace) -> Result<Self> {
        if &self.space == target {
            return Ok(self.clone());
        }
        let map: Vec<Option<usize>> = self.space.names().iter().map(|n| target.index_of(n).ok()).collect();
        let mut out = TruncatedSeries::zero(target);
        for (m, c) in &self.terms {
            let mut nm = Monomial::one(target.nvars());
            nm.hbar = m.hbar;
            nm.deg = m.deg;
            for (i, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let j = map[i].ok_or_else(|| Error::UnknownVariable(self.space.names()[i].clone()))?;
                nm.exps[j] += e;
            }
            out.add_term(nm, c.clone());
        }
        Ok(out)
    }

    /// Keeps only terms of total degree `<= deg`, in a space with that bound.
    pub fn truncate_degree(&self, deg: u32) -> Self {
        let trunc = Truncation {
            deg: deg.min(self.space.trunc().deg),
            ..self.space.trunc()
        };
        let space = self.space.with_truncation(trunc);
        let mut out = TruncatedSeries::zero(&space);
        for (m, c) in self.terms.iter().take_while(|(m, _)| m.deg <= deg) {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    /// Composition with a substitution of every variable.
    pub fn substitute(&self, sub: &Substitution) -> Result<Self> {
        if sub.source != self.space {
            return Err(Error::UniverseMismatch);
        }
        let target = &sub.target;
        let nv = self.space.nvars();
        let mut power_cache: Vec<Vec<TruncatedSeries>> = vec![Vec::new(); nv];
        let mut out = TruncatedSeries::zero(target);
        for (m, c) in &self.terms {
            let mut term = TruncatedSeries::constant(target, c.clone()).shift_hbar(m.hbar);
            if term.is_zero() {
                continue;
            }
            for (i, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let image = sub.images[i]
                    .as_ref()
                    .ok_or_else(|| Error::UnknownVariable(self.space.names()[i].clone()))?;
                let cache = &mut power_cache[i];
                if cache.is_empty() {
                    cache.push(TruncatedSeries::one(target));
                }
                while cache.len() <= e as usize {
                    let next = cache.last().expect("nonempty").mul_inner(image, false).0;
                    cache.push(next);
                }
                term = term.mul_inner(&cache[e as usize], false).0;
                if term.is_zero() {
                    break;
                }
            }
            for (tm, tc) in term.terms {
                out.add_term(tm, tc);
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson::from(self)
    }

    pub fn from_json(json: &SeriesJson) -> Result<Self> {
        let space = SeriesSpace::new(json.vars.clone(), json.trunc.into())?;
        let mut out = TruncatedSeries::zero(&space);
        for term in &json.terms {
            let (m, c) = term.decode(&space)?;
            out.add_term(m, c);
        }
        Ok(out)
    }
}

/// Images of every source variable in a target space. Variables without an
/// explicit image map to the same-named target variable when it exists.
#[derive(Clone, Debug)]
pub struct Substitution {
    source: SeriesSpace,
    target: SeriesSpace,
    images: Vec<Option<TruncatedSeries>>,
}

impl Substitution {
    /// Identity renaming by name into `target`.
    pub fn rename(source: &SeriesSpace, target: &SeriesSpace) -> Self {
        Substitution::with_renames(source, target, &[])
    }

    /// Renaming by name, except `renames[(from, to)]`.
    pub fn with_renames(source: &SeriesSpace, target: &SeriesSpace, renames: &[(String, String)]) -> Self {
        let images = source
            .names()
            .iter()
            .map(|n| {
                let to = renames
                    .iter()
                    .find(|(f, _)| f == n)
                    .map(|(_, t)| t.as_str())
                    .unwrap_or(n.as_str());
                TruncatedSeries::var(target, to).ok()
            })
            .collect();
        Substitution {
            source: source.clone(),
            target: target.clone(),
            images,
        }
    }

    /// Sets the image of `var`; the image must live in the target space.
    pub fn set(&mut self, var: &str, image: TruncatedSeries) -> Result<()> {
        if image.space() != &self.target {
            return Err(Error::UnknownVariable(format!(
                "image of `{var}` lies outside the target universe"
            )));
        }
        let i = self.source.index_of(var)?;
        self.images[i] = Some(image);
        Ok(())
    }

    /// Sets `var ↦ constant + Σ coeff·target_var`.
    pub fn set_affine(&mut self, var: &str, constant: Scalar, linear: &[(&str, Scalar)]) -> Result<()> {
        let mut image = TruncatedSeries::constant(&self.target, constant);
        for (name, c) in linear {
            let v = TruncatedSeries::var(&self.target, name)?;
            image = image.try_add(&v.scale(c))?;
        }
        self.set(var, image)
    }

    pub fn target(&self) -> &SeriesSpace {
        &self.target
    }

    pub fn source(&self) -> &SeriesSpace {
        &self.source
    }

    /// `self` followed by `then`: substitutes `then` into each image.
    pub fn compose(&self, then: &Substitution) -> Result<Substitution> {
        if self.target != then.source {
            return Err(Error::UniverseMismatch);
        }
        let images = self
            .images
            .iter()
            .map(|img| img.as_ref().map(|s| s.substitute(then)).transpose())
            .collect::<Result<Vec<_>>>()?;
        Ok(Substitution {
            source: self.source.clone(),
            target: then.target.clone(),
            images,
        })
    }
}

macro_rules! series_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&TruncatedSeries> for &TruncatedSeries {
            type Output = TruncatedSeries;
            fn $method(self, rhs: &TruncatedSeries) -> TruncatedSeries {
                self.$checked(rhs).expect("series universe mismatch")
            }
        }
        impl $trait<TruncatedSeries> for TruncatedSeries {
            type Output = TruncatedSeries;
            fn $method(self, rhs: TruncatedSeries) -> TruncatedSeries {
                self.$checked(&rhs).expect("series universe mismatch")
            }
        }
    };
}

series_op!(Add, add, try_add);
series_op!(Sub, sub, try_sub);
series_op!(Mul, mul, try_mul);

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        -&self
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let (sign, mag) = if c.is_negative() {
                ("-", c.abs())
            } else {
                ("+", c.clone())
            };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let body = format_monomial(m, self.space.names());
            match (body.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{body}")?,
                (false, false) => write!(f, "{mag}*{body}")?,
            }
        }
        Ok(())
    }
}

pub(crate) fn format_monomial(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exps.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{e}", names[i])),
        }
    }
    match m.hbar {
        0 => {}
        1 => parts.push("hbar".into()),
        h => parts.push(format!("hbar^{h}")),
    }
    parts.join("*")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncJson {
    pub deg: u32,
    pub depth: u32,
    pub genus: i32,
}

impl From<Truncation> for TruncJson {
    fn from(t: Truncation) -> Self {
        TruncJson {
            deg: t.deg,
            depth: t.depth,
            genus: t.genus(),
        }
    }
}

impl From<TruncJson> for Truncation {
    fn from(t: TruncJson) -> Self {
        Truncation {
            deg: t.deg,
            depth: t.depth,
            hbar: t.genus - 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: BTreeMap<String, i32>,
    pub coeff: Scalar,
}

impl TermJson {
    pub(crate) fn encode(m: &Monomial, c: &Scalar, names: &[String]) -> Self {
        let mut exp = BTreeMap::new();
        for (i, &e) in m.exps.iter().enumerate() {
            if e != 0 {
                exp.insert(names[i].clone(), e as i32);
            }
        }
        if m.hbar != 0 {
            exp.insert("hbar".to_string(), m.hbar);
        }
        TermJson { exp, coeff: c.clone() }
    }

    pub(crate) fn decode(&self, space: &SeriesSpace) -> Result<(Monomial, Scalar)> {
        let mut m = Monomial::one(space.nvars());
        for (name, &e) in &self.exp {
            if name == "hbar" {
                m.hbar = e;
                continue;
            }
            let i = space.index_of(name)?;
            let e: u16 = e
                .try_into()
                .map_err(|_| Error::Parse(format!("negative exponent for `{name}`")))?;
            m.exps[i] += e;
            m.deg += e as u32;
        }
        Ok((m, self.coeff.clone()))
    }
}

/// Canonical JSON form of a [`TruncatedSeries`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub vars: Vec<String>,
    pub trunc: TruncJson,
    pub terms: Vec<TermJson>,
}

impl From<&TruncatedSeries> for SeriesJson {
    fn from(s: &TruncatedSeries) -> Self {
        SeriesJson {
            vars: s.space.names().to_vec(),
            trunc: s.space.trunc().into(),
            terms: s
                .terms
                .iter()
                .map(|(m, c)| TermJson::encode(m, c, s.space.names()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(names: &[&str], deg: u32) -> SeriesSpace {
        SeriesSpace::new(names.iter().copied(), Truncation::new(deg, 1)).unwrap()
    }

    fn v(s: &SeriesSpace, n: &str) -> TruncatedSeries {
        TruncatedSeries::var(s, n).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let s = space(&["t_0"], 6);
        let one = TruncatedSeries::one(&s);
        let t0 = v(&s, "t_0");
        let lhs = (&one + &t0) * (&one - &t0);
        let rhs = &one - &t0.pow(2);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn additive_identity() {
        let s = space(&["t_0", "t_1"], 4);
        let a = &v(&s, "t_0") * &v(&s, "t_1") + v(&s, "t_1").scale(&Scalar::new(3, 7));
        assert_eq!(&a + &TruncatedSeries::zero(&s), a);
    }

    #[test]
    fn truncation_discards_overflow() {
        let s = space(&["t_0"], 3);
        let sq = v(&s, "t_0").pow(2);
        assert!((&sq * &sq).is_zero());
        assert_eq!(sq.mul_exact(&sq), Err(Error::WindowOverflow));
    }

    #[test]
    fn universe_mismatch_is_an_error() {
        let a = space(&["t_0"], 3);
        let b = space(&["t_0"], 4);
        let err = TruncatedSeries::one(&a).try_add(&TruncatedSeries::one(&b));
        assert_eq!(err, Err(Error::UniverseMismatch));
        assert_eq!(
            TruncatedSeries::one(&a).try_mul(&TruncatedSeries::one(&b)),
            Err(Error::UniverseMismatch)
        );
    }

    #[test]
    fn derivatives() {
        let s = space(&["t_0", "t_1"], 6);
        let f = &v(&s, "t_0") * &v(&s, "t_1").pow(2);
        let expected = (&v(&s, "t_0") * &v(&s, "t_1")).scale(&Scalar::from_int(2));
        assert_eq!(f.derive("t_1").unwrap(), expected);
        assert!(TruncatedSeries::constant(&s, Scalar::from_int(5))
            .derive("t_0")
            .unwrap()
            .is_zero());
        let q = space(&["q_0"], 6);
        let cube = v(&q, "q_0").pow(3).scale(&Scalar::new(1, 6));
        assert_eq!(
            cube.derive("q_0").unwrap(),
            v(&q, "q_0").pow(2).scale(&Scalar::new(1, 2))
        );
        assert!(matches!(f.derive("t_9"), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn dilaton_style_substitution() {
        let src = space(&["q_0", "q_1"], 4);
        let tgt = space(&["t_0", "t_1"], 4);
        let mut sub = Substitution::with_renames(&src, &tgt, &[("q_0".into(), "t_0".into())]);
        sub.set_affine("q_1", -Scalar::one(), &[("t_1", Scalar::one())])
            .unwrap();

        let sq = v(&src, "q_1").pow(2);
        let one = TruncatedSeries::one(&tgt);
        let t1 = v(&tgt, "t_1");
        let expected = &(&t1.pow(2) - &t1.scale(&Scalar::from_int(2))) + &one;
        assert_eq!(sq.substitute(&sub).unwrap(), expected);

        let mixed = &v(&src, "q_0") * &v(&src, "q_1");
        let t0 = v(&tgt, "t_0");
        assert_eq!(mixed.substitute(&sub).unwrap(), &(&t0 * &t1) - &t0);
    }

    #[test]
    fn identity_substitution() {
        let s = space(&["x", "y"], 5);
        let f = &v(&s, "x").pow(3) + &(&v(&s, "x") * &v(&s, "y")).scale(&Scalar::new(-2, 9));
        let sub = Substitution::rename(&s, &s);
        assert_eq!(f.substitute(&sub).unwrap(), f);
    }

    #[test]
    fn image_outside_target_rejected() {
        let src = space(&["q_0"], 3);
        let tgt = space(&["t_0"], 3);
        let other = space(&["u"], 3);
        let mut sub = Substitution::rename(&src, &tgt);
        assert!(sub.set("q_0", v(&other, "u")).is_err());
        assert!(matches!(
            sub.set_affine("q_0", Scalar::zero(), &[("zz", Scalar::one())]),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn hbar_grades_respect_bound() {
        let s = SeriesSpace::new(["t_0"], Truncation::with_genus(4, 0, 1)).unwrap();
        let a = TruncatedSeries::monomial(&s, &[("t_0", 1)], -1, Scalar::one()).unwrap();
        assert_eq!(a.hbar_grades(), vec![-1]);
        // ħ^{-1} · ħ^{1} would be ħ^0: allowed; ħ^1 itself is beyond the bound
        let h = TruncatedSeries::monomial(&s, &[], 1, Scalar::one()).unwrap();
        assert!(h.is_zero());
        assert_eq!((&a * &a).hbar_grades(), vec![-2]);
    }

    #[test]
    fn canonical_json_roundtrip_and_order() {
        let s = space(&["t_0", "t_1"], 4);
        let f = &v(&s, "t_1") + &v(&s, "t_0").pow(2).scale(&Scalar::new(1, 2)) + v(&s, "t_0");
        let json = f.to_json();
        let orders: Vec<u32> = json
            .terms
            .iter()
            .map(|t| t.exp.values().map(|&e| e as u32).sum())
            .collect();
        assert_eq!(orders, vec![1, 1, 2]);
        assert_eq!(json.terms[0].exp.keys().next().unwrap(), "t_0");
        assert_eq!(TruncatedSeries::from_json(&json).unwrap(), f);
        let text = serde_json::to_string(&json).unwrap();
        assert!(text.starts_with(r#"{"vars":["t_0","t_1"],"trunc":{"deg":4,"depth":1,"genus":1},"terms":"#));
    }

    #[test]
    fn display_is_readable() {
        let s = space(&["t_0", "t_1"], 4);
        let f = &v(&s, "t_0").pow(2).scale(&Scalar::new(-1, 2)) + &v(&s, "t_1");
        assert_eq!(f.to_string(), "t_1 - 1/2*t_0^2");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        const NAMES: [&str; 3] = ["a", "b", "c"];

        fn arb_series(max_terms: usize) -> impl Strategy<Value = Vec<([u16; 3], i64, i64)>> {
            prop::collection::vec(([0u16..3, 0u16..3, 0u16..3], -5i64..6, 1i64..4), 0..max_terms)
        }

        fn build(s: &SeriesSpace, raw: &[([u16; 3], i64, i64)]) -> TruncatedSeries {
            let mut out = TruncatedSeries::zero(s);
            for (e, n, d) in raw {
                out.add_term(Monomial::from_exponents(e, 0), Scalar::new(*n, *d));
            }
            out
        }

        fn sp() -> SeriesSpace {
            SeriesSpace::new(NAMES, Truncation::new(5, 2)).unwrap()
        }

        proptest! {
            #[test]
            fn ring_axioms(x in arb_series(6), y in arb_series(6), z in arb_series(6)) {
                let s = sp();
                let (a, b, c) = (build(&s, &x), build(&s, &y), build(&s, &z));
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&a * &b, &b * &a);
                prop_assert_eq!(&a + &b, &b + &a);
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            }

            #[test]
            fn leibniz(x in arb_series(6), y in arb_series(6), var in 0usize..3) {
                let s = sp();
                let (a, b) = (build(&s, &x), build(&s, &y));
                // derivatives lose one degree of precision
                let lhs = (&a * &b).derive_index(var).truncate_degree(4);
                let rhs = (&(&a.derive_index(var) * &b) + &(&a * &b.derive_index(var))).truncate_degree(4);
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn substitution_functoriality(x in arb_series(6), c1 in -3i64..4, c2 in -3i64..4, c3 in -3i64..4) {
                let s = sp();
                let f = build(&s, &x);
                let mut first = Substitution::rename(&s, &s);
                first.set_affine("a", Scalar::from_int(c1), &[("b", Scalar::one()), ("c", Scalar::from_int(c2))]).unwrap();
                let mut second = Substitution::rename(&s, &s);
                second.set_affine("b", Scalar::from_int(c3), &[("a", Scalar::new(1, 2))]).unwrap();
                let stepwise = f.substitute(&first).unwrap().substitute(&second).unwrap();
                let composite = first.compose(&second).unwrap();
                // affine images never raise degree, so nothing is truncated
                prop_assert_eq!(stepwise, f.substitute(&composite).unwrap());
            }

            #[test]
            fn json_roundtrip(x in arb_series(8)) {
                let s = sp();
                let f = build(&s, &x);
                let text = serde_json::to_string(&f.to_json()).unwrap();
                let back: SeriesJson = serde_json::from_str(&text).unwrap();
                prop_assert_eq!(TruncatedSeries::from_json(&back).unwrap(), f);
            }
        }
    }
}
