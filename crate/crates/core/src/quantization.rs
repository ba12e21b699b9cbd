//! Infinitesimal symplectic transformations of `ℋ`, their quadratic
//! Hamiltonians, and the quantization rules
//!
//! ```text
//! q q ↦ q q / ħ,    p_a q_b ↦ q_b ∂/∂q_a,    p p ↦ ħ ∂ ∂
//! ```
//!
//! Quantized operators are normal-ordered differential operators with
//! ħ-graded series coefficients. They act on a genus-expanded potential
//! `𝒟 = exp(S)`, `S = Σ ħ^{g−1} F^g`, through the logarithmic action
//! `(P 𝒟)/𝒟`, which never has to exponentiate anything.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::frobenius::FrobeniusAlgebra;
use crate::hspace::{omega, HElement};
use crate::scalar::Scalar;
use crate::series::{
    descendant_name, format_monomial, Monomial, SeriesJson, SeriesSpace, Substitution, TruncatedSeries, Truncation,
};

/// A linear map on `ℋ` given by the images of the basis vectors `φ_μ z^k`
/// for `k` in its window. Images are numeric and may leave the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfSymplectic {
    algebra: FrobeniusAlgebra,
    window: (i32, i32),
    images: BTreeMap<(i32, usize), HElement>,
}

impl InfSymplectic {
    /// Defines the map on every basis vector of `window` by `f(k, μ)`.
    pub fn from_fn<F>(alg: &FrobeniusAlgebra, window: (i32, i32), mut f: F) -> Self
    where
        F: FnMut(i32, usize) -> HElement,
    {
        let mut images = BTreeMap::new();
        for k in window.0..=window.1 {
            for mu in 0..alg.dim() {
                images.insert((k, mu), f(k, mu));
            }
        }
        InfSymplectic {
            algebra: alg.clone(),
            window,
            images,
        }
    }

    pub fn zero(alg: &FrobeniusAlgebra, window: (i32, i32)) -> Self {
        let sp = SeriesSpace::scalars();
        InfSymplectic::from_fn(alg, window, |_, _| HElement::zero(alg, &sp))
    }

    pub fn algebra(&self) -> &FrobeniusAlgebra {
        &self.algebra
    }

    pub fn window(&self) -> (i32, i32) {
        self.window
    }

    /// Basis vectors `(k, μ)` on which the map is known.
    pub fn domain(&self) -> impl Iterator<Item = (i32, usize)> + '_ {
        self.images.keys().copied()
    }

    pub fn image(&self, k: i32, mu: usize) -> Option<&HElement> {
        self.images.get(&(k, mu))
    }

    /// Applies the map to an element; every component must be in the domain.
    pub fn apply(&self, f: &HElement) -> Result<HElement> {
        if f.algebra() != &self.algebra {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = HElement::zero(&self.algebra, f.space());
        for (k, v) in f.components() {
            for (mu, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let img = self.image(k, mu).ok_or_else(|| Error::WindowTooSmall {
                    min: self.window.0,
                    max: self.window.1,
                    what: format!("no image for z^{k} (class {mu})"),
                })?;
                out = out.try_add(&img.reembed(f.space())?.scale(c)?)?;
            }
        }
        Ok(out)
    }

    fn apply_if_defined(&self, f: &HElement) -> Option<HElement> {
        self.apply(f).ok()
    }

    /// `AB − BA` on the basis vectors where both composites are defined.
    pub fn commutator(&self, other: &InfSymplectic) -> Result<InfSymplectic> {
        Ok(self.commutator_inner(other)?.0)
    }

    /// As [`commutator`](Self::commutator), but every basis vector of the
    /// smaller window must be computable.
    pub fn commutator_strict(&self, other: &InfSymplectic) -> Result<InfSymplectic> {
        let (c, complete) = self.commutator_inner(other)?;
        if !complete {
            return Err(Error::WindowOverflow);
        }
        Ok(c)
    }

    fn commutator_inner(&self, other: &InfSymplectic) -> Result<(InfSymplectic, bool)> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch);
        }
        let mut images = BTreeMap::new();
        let mut complete = true;
        for (key, b_e) in &other.images {
            let Some(a_e) = self.images.get(key) else { continue };
            match (self.apply_if_defined(b_e), other.apply_if_defined(a_e)) {
                (Some(ab), Some(ba)) => {
                    images.insert(*key, ab.try_sub(&ba)?);
                }
                _ => complete = false,
            }
        }
        let lo = self.window.0.max(other.window.0);
        let hi = self.window.1.min(other.window.1);
        Ok((
            InfSymplectic {
                algebra: self.algebra.clone(),
                window: (lo, hi),
                images,
            },
            complete,
        ))
    }

    pub fn scale(&self, c: &Scalar) -> InfSymplectic {
        InfSymplectic {
            algebra: self.algebra.clone(),
            window: self.window,
            images: self.images.iter().map(|(k, v)| (*k, v.scale_scalar(c))).collect(),
        }
    }

    /// Basis vectors in both domains on which `self` and `other` differ.
    pub fn mismatches(&self, other: &InfSymplectic) -> Vec<(i32, usize)> {
        self.images
            .iter()
            .filter_map(|(key, a)| {
                let b = other.images.get(key)?;
                let same = a.try_sub(b).map(|d| d.is_zero()).unwrap_or(false);
                (!same).then_some(*key)
            })
            .collect()
    }

    /// Pairs of domain vectors violating `Ω(Ae_i, e_j) + Ω(e_i, Ae_j) = 0`.
    pub fn symplectic_defects(&self) -> Result<Vec<SymplecticDefect>> {
        let sp = SeriesSpace::scalars();
        let mut bad = Vec::new();
        for (ki, ai) in &self.images {
            let ei = HElement::basis(&self.algebra, &sp, ki.1, ki.0);
            for (kj, aj) in &self.images {
                let ej = HElement::basis(&self.algebra, &sp, kj.1, kj.0);
                let v = omega(ai, &ej)? + omega(&ei, aj)?;
                if !v.is_zero() {
                    bad.push((*ki, *kj, v));
                }
            }
        }
        Ok(bad)
    }
}

/// `(e_i, e_j, Ω(Ae_i, e_j) + Ω(e_i, Ae_j))`, basis vectors as `(k, μ)`.
pub type SymplecticDefect = ((i32, usize), (i32, usize), Scalar);

/// A Darboux coordinate: `q^μ_k` or `p^ν_l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    P { l: u32, nu: usize },
    Q { k: u32, mu: usize },
}

impl Coord {
    pub fn q(k: u32) -> Coord {
        Coord::Q { k, mu: 0 }
    }

    pub fn p(l: u32) -> Coord {
        Coord::P { l, nu: 0 }
    }

    /// `q_k^μ` / `p_l^ν` as used in displays.
    pub fn name(&self, alg: &FrobeniusAlgebra) -> String {
        match *self {
            Coord::Q { k, mu } => descendant_name("q", k, mu, alg),
            Coord::P { l, nu } => descendant_name("p", l, nu, alg),
        }
    }

    /// The `ℋ` vector dual to this coordinate.
    fn vector(&self, alg: &FrobeniusAlgebra, sp: &SeriesSpace) -> HElement {
        match *self {
            Coord::Q { k, mu } => HElement::basis(alg, sp, mu, k as i32),
            Coord::P { l, nu } => HElement::dual_basis(alg, sp, nu, l),
        }
    }
}

/// A quadratic polynomial in Darboux coordinates, keyed by unordered
/// coordinate pairs (mixed pairs always `(p, q)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    algebra: FrobeniusAlgebra,
    terms: BTreeMap<(Coord, Coord), Scalar>,
}

impl QuadraticForm {
    pub fn zero(alg: &FrobeniusAlgebra) -> Self {
        QuadraticForm {
            algebra: alg.clone(),
            terms: BTreeMap::new(),
        }
    }

    fn key(a: Coord, b: Coord) -> (Coord, Coord) {
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Adds `c · a · b`.
    pub fn add(&mut self, a: Coord, b: Coord, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let key = QuadraticForm::key(a, b);
        let entry = self.terms.entry(key).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn coefficient(&self, a: Coord, b: Coord) -> Scalar {
        self.terms
            .get(&QuadraticForm::key(a, b))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Coord, Coord), &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn algebra(&self) -> &FrobeniusAlgebra {
        &self.algebra
    }

    /// `αa + βb`.
    pub fn combine(&self, alpha: &Scalar, other: &QuadraticForm, beta: &Scalar) -> QuadraticForm {
        let mut out = QuadraticForm::zero(&self.algebra);
        for ((a, b), c) in &self.terms {
            out.add(*a, *b, c * alpha);
        }
        for ((a, b), c) in &other.terms {
            out.add(*a, *b, c * beta);
        }
        out
    }

    /// Largest coordinate index present.
    pub fn max_index(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|(a, b)| [*a, *b])
            .map(|c| match c {
                Coord::Q { k, .. } => k,
                Coord::P { l, .. } => l,
            })
            .max()
            .unwrap_or(0)
    }

    /// Terms present in one form and not (or differently) in the other.
    pub fn differences(&self, other: &QuadraticForm) -> Vec<(Coord, Coord, Scalar, Scalar)> {
        let keys: std::collections::BTreeSet<_> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .filter_map(|&(a, b)| {
                let x = self.coefficient(a, b);
                let y = other.coefficient(a, b);
                (x != y).then_some((a, b, x, y))
            })
            .collect()
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((a, b), c)) in self.terms.iter().enumerate() {
            let mono = if a == b {
                format!("{}^2", a.name(&self.algebra))
            } else {
                format!("{}*{}", a.name(&self.algebra), b.name(&self.algebra))
            };
            write_signed(f, i == 0, c, &mono)?;
        }
        Ok(())
    }
}

fn write_signed(f: &mut fmt::Formatter<'_>, first: bool, c: &Scalar, body: &str) -> fmt::Result {
    let mag = c.abs();
    match (first, c.is_negative()) {
        (true, true) => write!(f, "-")?,
        (true, false) => {}
        (false, true) => write!(f, " - ")?,
        (false, false) => write!(f, " + ")?,
    }
    match (body.is_empty(), mag.is_one()) {
        (true, _) => write!(f, "{mag}"),
        (false, true) => write!(f, "{body}"),
        (false, false) => write!(f, "{mag}*{body}"),
    }
}

/// `h_A(f) = ½ Ω(Af, f)` restricted to the Darboux coordinates of the window
/// of `A`: `q_k` for `0 ≤ k ≤ max`, `p_l` for `0 ≤ l ≤ −1 − min`.
///
/// The coefficients are exact for these coordinates; an error is returned if
/// `A` is not defined on some window vector.
pub fn quadratic_hamiltonian(a: &InfSymplectic) -> Result<QuadraticForm> {
    let alg = a.algebra();
    let sp = SeriesSpace::scalars();
    let (lo, hi) = a.window();
    let mut coords = Vec::new();
    for k in 0..=hi.max(-1) {
        for mu in 0..alg.dim() {
            coords.push(Coord::Q { k: k as u32, mu });
        }
    }
    for l in 0..(-lo).max(0) {
        for nu in 0..alg.dim() {
            coords.push(Coord::P { l: l as u32, nu });
        }
    }
    let vectors: Vec<HElement> = coords.iter().map(|c| c.vector(alg, &sp)).collect();
    let images = vectors.iter().map(|v| a.apply(v)).collect::<Result<Vec<_>>>()?;
    let half = Scalar::new(1, 2);
    let mut h = QuadraticForm::zero(alg);
    for (i, ai) in images.iter().enumerate() {
        for (j, vj) in vectors.iter().enumerate() {
            let w = omega(ai, vj)?;
            h.add(coords[i], coords[j], &w * &half);
        }
    }
    Ok(h)
}

type DerivKey = SmallVec<[u16; 4]>;

/// Sorted multiset of variable indices, ordered by size then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivative(DerivKey);

impl Derivative {
    pub fn none() -> Self {
        Derivative(SmallVec::new())
    }

    pub fn from_indices(idx: &[usize]) -> Self {
        let mut v: DerivKey = idx.iter().map(|&i| i as u16).collect();
        v.sort_unstable();
        Derivative(v)
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&i| i as usize)
    }

    fn merged(&self, other: &Derivative) -> Derivative {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        Derivative(v)
    }

    /// `(index, multiplicity)` runs.
    fn runs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &i in &self.0 {
            match out.last_mut() {
                Some((j, m)) if *j == i as usize => *m += 1,
                _ => out.push((i as usize, 1)),
            }
        }
        out
    }
}

impl Ord for Derivative {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Derivative {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A normal-ordered differential operator `Σ c_α(x, ħ) ∂^α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOperator {
    space: SeriesSpace,
    terms: BTreeMap<Derivative, TruncatedSeries>,
}

impl DiffOperator {
    pub fn zero(space: &SeriesSpace) -> Self {
        DiffOperator {
            space: space.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// Multiplication by `c`.
    pub fn multiplication(c: TruncatedSeries) -> Self {
        let mut op = DiffOperator::zero(c.space());
        op.add_term(Derivative::none(), c);
        op
    }

    /// `∂/∂var`.
    pub fn partial(space: &SeriesSpace, var: &str) -> Result<Self> {
        let mut op = DiffOperator::zero(space);
        op.add_term(
            Derivative::from_indices(&[space.index_of(var)?]),
            TruncatedSeries::one(space),
        );
        Ok(op)
    }

    pub fn space(&self) -> &SeriesSpace {
        &self.space
    }

    pub fn add_term(&mut self, d: Derivative, c: TruncatedSeries) {
        let c = if c.space() == &self.space {
            c
        } else {
            c.reembed(&self.space).expect("coefficient outside operator space")
        };
        if c.is_zero() {
            return;
        }
        let entry = self
            .terms
            .remove(&d)
            .unwrap_or_else(|| TruncatedSeries::zero(&self.space));
        let sum = &entry + &c;
        if !sum.is_zero() {
            self.terms.insert(d, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Derivative, &TruncatedSeries)> {
        self.terms.iter()
    }

    /// Coefficient of `∂^α` with `α` given by variable names.
    pub fn coefficient(&self, vars: &[&str]) -> Result<TruncatedSeries> {
        let idx = vars
            .iter()
            .map(|v| self.space.index_of(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(self
            .terms
            .get(&Derivative::from_indices(&idx))
            .cloned()
            .unwrap_or_else(|| TruncatedSeries::zero(&self.space)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_order(&self) -> usize {
        self.terms.keys().map(Derivative::order).max().unwrap_or(0)
    }

    pub fn try_add(&self, other: &DiffOperator) -> Result<DiffOperator> {
        if self.space != other.space {
            return Err(Error::UniverseMismatch);
        }
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.add_term(d.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &DiffOperator) -> Result<DiffOperator> {
        self.try_add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> DiffOperator {
        let mut out = DiffOperator::zero(&self.space);
        for (d, x) in &self.terms {
            out.add_term(d.clone(), x.scale(c));
        }
        out
    }

    /// `self + c` (a constant multiplication operator).
    pub fn plus_constant(&self, c: &Scalar) -> DiffOperator {
        let mut out = self.clone();
        out.add_term(Derivative::none(), TruncatedSeries::constant(&self.space, c.clone()));
        out
    }

    /// Normal-ordered product `self ∘ other`, by the Leibniz rule. Reports an
    /// overflow if a coefficient product leaves the truncation.
    pub fn compose(&self, other: &DiffOperator) -> Result<DiffOperator> {
        if self.space != other.space {
            return Err(Error::UniverseMismatch);
        }
        let mut out = DiffOperator::zero(&self.space);
        for (da, ca) in &self.terms {
            let runs = da.runs();
            // every sub-multiset γ ⊆ α with its product of binomials
            let mut splits: Vec<(Vec<usize>, Vec<usize>, Scalar)> = vec![(Vec::new(), Vec::new(), Scalar::one())];
            for (var, mult) in runs {
                let mut next = Vec::new();
                for (hit, keep, w) in &splits {
                    for j in 0..=mult {
                        let mut h = hit.clone();
                        h.extend(std::iter::repeat_n(var, j));
                        let mut k = keep.clone();
                        k.extend(std::iter::repeat_n(var, mult - j));
                        next.push((h, k, w * &binomial(mult, j)));
                    }
                }
                splits = next;
            }
            for (db, cb) in &other.terms {
                for (hit, keep, w) in &splits {
                    let mut deriv = cb.clone();
                    for &v in hit {
                        deriv = deriv.derive_index(v);
                    }
                    if deriv.is_zero() {
                        continue;
                    }
                    let coeff = ca.mul_exact(&deriv)?.scale(w);
                    out.add_term(Derivative::from_indices(keep).merged(db), coeff);
                }
            }
        }
        Ok(out)
    }

    /// `[self, other] = self∘other − other∘self`.
    pub fn commutator(&self, other: &DiffOperator) -> Result<DiffOperator> {
        self.compose(other)?.try_sub(&other.compose(self)?)
    }

    /// Applies a substitution to every coefficient; derivative indices are
    /// carried over positionally, so source and target must list their
    /// variables in corresponding order.
    pub fn substitute(&self, sub: &Substitution) -> Result<DiffOperator> {
        if sub.source().nvars() != sub.target().nvars() {
            return Err(Error::UniverseMismatch);
        }
        let mut out = DiffOperator::zero(sub.target());
        for (d, c) in &self.terms {
            out.add_term(d.clone(), c.substitute(sub)?);
        }
        Ok(out)
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.space.names();
        let mut first = true;
        for (d, c) in &self.terms {
            let dpart: Vec<String> = d.indices().map(|i| format!("d/d{}", names[i])).collect();
            for (m, x) in c.terms() {
                let mut parts = Vec::new();
                let mono = format_monomial(m, names);
                if !mono.is_empty() {
                    parts.push(mono);
                }
                parts.extend(dpart.iter().cloned());
                write_signed(f, first, x, &parts.join("*"))?;
                first = false;
            }
        }
        Ok(())
    }
}

fn binomial(n: usize, k: usize) -> Scalar {
    Scalar::factorial(n as u32) / (Scalar::factorial(k as u32) * Scalar::factorial((n - k) as u32))
}

/// Operator-coefficient bounds: quadratic coefficients, ħ from −1 to 2.
pub fn operator_truncation(depth: u32) -> Truncation {
    Truncation { deg: 4, depth, hbar: 2 }
}

/// Coordinate space `x_k^μ` for `k ≤ depth` with operator bounds.
pub fn coordinate_space(prefix: &str, alg: &FrobeniusAlgebra, depth: u32) -> Result<SeriesSpace> {
    SeriesSpace::descendants(prefix, alg, &[], operator_truncation(depth))
}

/// Quantizes `h` into an operator in the variables `q_k^μ`, `k ≤ depth`.
pub fn quantize(h: &QuadraticForm, depth: u32) -> Result<DiffOperator> {
    let alg = h.algebra();
    if h.max_index() > depth {
        return Err(Error::WindowTooSmall {
            min: 0,
            max: depth as i32,
            what: format!("quadratic form uses index {}", h.max_index()),
        });
    }
    let space = coordinate_space("q", alg, depth)?;
    let dim = alg.dim();
    let var = |k: u32, mu: usize| k as usize * dim + mu;
    let mut op = DiffOperator::zero(&space);
    for ((a, b), c) in h.terms() {
        match (*a, *b) {
            (Coord::Q { k, mu }, Coord::Q { k: l, mu: nu }) => {
                let mut m = Monomial::one(space.nvars());
                let mut exps = m.exponents().to_vec();
                exps[var(k, mu)] += 1;
                exps[var(l, nu)] += 1;
                m = Monomial::from_exponents(&exps, -1);
                let mut coeff = TruncatedSeries::zero(&space);
                coeff.add_term(m, c.clone());
                op.add_term(Derivative::none(), coeff);
            }
            (Coord::P { l, nu }, Coord::Q { k, mu }) => {
                let mut coeff = TruncatedSeries::zero(&space);
                let mut exps = vec![0u16; space.nvars()];
                exps[var(k, mu)] = 1;
                coeff.add_term(Monomial::from_exponents(&exps, 0), c.clone());
                op.add_term(Derivative::from_indices(&[var(l, nu)]), coeff);
            }
            (Coord::P { l, nu }, Coord::P { l: l2, nu: nu2 }) => {
                let mut coeff = TruncatedSeries::zero(&space);
                coeff.add_term(Monomial::from_exponents(&vec![0u16; space.nvars()], 1), c.clone());
                op.add_term(Derivative::from_indices(&[var(l, nu), var(l2, nu2)]), coeff);
            }
            (Coord::Q { .. }, Coord::P { .. }) => unreachable!("mixed keys are stored as (p, q)"),
        }
    }
    Ok(op)
}

/// Rewrites an operator in `q` into the `t` variables of the dilaton shift
/// `q^μ_1 = t^μ_1 − 1^μ` (all other `q = t`); derivatives are unchanged.
pub fn to_t_coordinates(op: &DiffOperator, alg: &FrobeniusAlgebra) -> Result<DiffOperator> {
    let depth = op.space().trunc().depth;
    let tspace = coordinate_space("t", alg, depth)?;
    let renames: Vec<(String, String)> = op
        .space()
        .names()
        .iter()
        .zip(tspace.names())
        .map(|(q, t)| (q.clone(), t.clone()))
        .collect();
    let mut sub = Substitution::with_renames(op.space(), &tspace, &renames);
    if depth >= 1 {
        for (mu, u) in alg.unit().iter().enumerate() {
            let q = descendant_name("q", 1, mu, alg);
            let t = descendant_name("t", 1, mu, alg);
            sub.set_affine(&q, -u, &[(t.as_str(), Scalar::one())])?;
        }
    }
    op.substitute(&sub)
}

/// `𝒟 = exp(Σ_g ħ^{g−1} F^g)` held through its genus components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusExpandedPotential {
    genera: Vec<TruncatedSeries>,
    log: TruncatedSeries,
}

impl GenusExpandedPotential {
    /// Builds `S = Σ ħ^{g−1}F^g`. Every `F^g` must be ħ-free and all live in
    /// one space; `S` lives in the same variables with ħ bound `len − 2`.
    pub fn new(genera: Vec<TruncatedSeries>) -> Result<Self> {
        let Some(first) = genera.first() else {
            return Err(Error::Config("potential needs at least genus zero".into()));
        };
        let gspace = first.space().clone();
        if gspace.trunc().hbar < 0 {
            return Err(Error::Config("genus components need a space admitting ħ^0".into()));
        }
        let space = gspace.with_truncation(Truncation {
            hbar: genera.len() as i32 - 2,
            ..gspace.trunc()
        });
        let mut log = TruncatedSeries::zero(&space);
        for (g, f) in genera.iter().enumerate() {
            if f.space() != &gspace {
                return Err(Error::UniverseMismatch);
            }
            if f.hbar_grades().iter().any(|&h| h != 0) {
                return Err(Error::Config(format!("F^{g} carries an ħ grade")));
            }
            for (m, c) in f.terms() {
                log.add_term(Monomial::from_exponents(m.exponents(), g as i32 - 1), c.clone());
            }
        }
        Ok(GenusExpandedPotential { genera, log })
    }

    pub fn genus(&self, g: usize) -> Option<&TruncatedSeries> {
        self.genera.get(g)
    }

    pub fn max_genus(&self) -> usize {
        self.genera.len() - 1
    }

    /// `S = log 𝒟`.
    pub fn log(&self) -> &TruncatedSeries {
        &self.log
    }

    pub fn space(&self) -> &SeriesSpace {
        self.log.space()
    }

    pub fn to_json(&self) -> PotentialJson {
        PotentialJson {
            genera: self.genera.iter().map(SeriesJson::from).collect(),
        }
    }

    pub fn from_json(json: &PotentialJson) -> Result<Self> {
        let genera = json
            .genera
            .iter()
            .map(TruncatedSeries::from_json)
            .collect::<Result<Vec<_>>>()?;
        GenusExpandedPotential::new(genera)
    }
}

/// Canonical JSON form of a [`GenusExpandedPotential`]: `F^0, F^1, …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PotentialJson {
    pub genera: Vec<SeriesJson>,
}

/// `(P 𝒟)/𝒟` as an ħ-graded series.
///
/// Writing `Y_α = (∂^α 𝒟)/𝒟`, `Y_{α+i} = ∂_i Y_α + (∂_i S) Y_α`. A term
/// `ħ^h ∂^α` with `h ≥ |α| − 1` only needs genera up to the potential's
/// bound to be exact at every ħ-grade it keeps, so other terms are refused.
/// Each derivative costs one degree of precision: the result is truncated
/// to total degree `deg − max |α|`.
pub fn apply(op: &DiffOperator, pot: &GenusExpandedPotential) -> Result<TruncatedSeries> {
    let space = pot.space();
    // ħ^{-1}·Y_∅ reaches one grade above the result window
    let work = space.with_truncation(Truncation {
        hbar: space.trunc().hbar + 1,
        ..space.trunc()
    });
    let log = pot.log().reembed(&work)?;
    let opspace = op.space();
    let var_map: Vec<Option<usize>> = opspace.names().iter().map(|n| space.index_of(n).ok()).collect();
    let mut cache: HashMap<Derivative, TruncatedSeries> = HashMap::new();
    cache.insert(Derivative::none(), TruncatedSeries::one(&work));
    let mut first_derivs: HashMap<usize, TruncatedSeries> = HashMap::new();
    let mut max_order = 0usize;
    let mut acc = TruncatedSeries::zero(&work);
    for (d, c) in op.terms() {
        let mapped: Option<Vec<usize>> = d.indices().map(|i| var_map[i]).collect();
        let Some(mapped) = mapped else {
            // derivative in a variable the potential does not depend on
            continue;
        };
        for (m, _) in c.terms() {
            if m.hbar() < d.order() as i32 - 1 {
                return Err(Error::GenusWindow(format!(
                    "term ħ^{} with {} derivatives needs genera beyond the potential",
                    m.hbar(),
                    d.order()
                )));
            }
        }
        let y = log_derivative(&Derivative::from_indices(&mapped), &log, &mut cache, &mut first_derivs);
        if y.is_zero() {
            continue;
        }
        max_order = max_order.max(d.order());
        for (m, x) in c.terms() {
            let mut exps = vec![0u16; work.nvars()];
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let j = var_map[i].ok_or_else(|| Error::UnknownVariable(opspace.names()[i].clone()))?;
                exps[j] += e;
            }
            let mut mono = TruncatedSeries::zero(&work);
            mono.add_term(Monomial::from_exponents(&exps, 0), x.clone());
            acc = &acc + &(&mono * &y.shift_hbar(m.hbar()));
        }
    }
    let keep = space.trunc().deg.saturating_sub(max_order as u32);
    let out = space.with_truncation(Truncation {
        deg: keep,
        ..space.trunc()
    });
    acc.truncate_degree(keep).reembed(&out)
}

fn log_derivative(
    d: &Derivative,
    log: &TruncatedSeries,
    cache: &mut HashMap<Derivative, TruncatedSeries>,
    first: &mut HashMap<usize, TruncatedSeries>,
) -> TruncatedSeries {
    if let Some(y) = cache.get(d) {
        return y.clone();
    }
    let mut idx: Vec<usize> = d.indices().collect();
    let last = idx.pop().expect("nonempty derivative");
    let parent = log_derivative(&Derivative::from_indices(&idx), log, cache, first);
    let ds = first.entry(last).or_insert_with(|| log.derive_index(last)).clone();
    let y = &parent.derive_index(last) + &(&ds * &parent);
    cache.insert(d.clone(), y.clone());
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt() -> FrobeniusAlgebra {
        FrobeniusAlgebra::point()
    }

    #[test]
    fn quantization_rules() {
        let mut h = QuadraticForm::zero(&pt());
        h.add(Coord::q(0), Coord::q(0), Scalar::one());
        let op = quantize(&h, 2).unwrap();
        let sp = op.space().clone();
        let expected = TruncatedSeries::monomial(&sp, &[("q_0", 2)], -1, Scalar::one()).unwrap();
        assert_eq!(op.coefficient(&[]).unwrap(), expected);

        let mut h = QuadraticForm::zero(&pt());
        h.add(Coord::p(0), Coord::q(1), Scalar::one());
        let op = quantize(&h, 2).unwrap();
        assert_eq!(
            op.coefficient(&["q_0"]).unwrap(),
            TruncatedSeries::var(&sp, "q_1").unwrap()
        );

        let mut h = QuadraticForm::zero(&pt());
        h.add(Coord::p(0), Coord::p(1), Scalar::one());
        let op = quantize(&h, 2).unwrap();
        let hbar = TruncatedSeries::monomial(&sp, &[], 1, Scalar::one()).unwrap();
        assert_eq!(op.coefficient(&["q_0", "q_1"]).unwrap(), hbar);
        assert_eq!(op.to_string(), "hbar*d/dq_0*d/dq_1");
    }

    #[test]
    fn zero_map_has_zero_hamiltonian() {
        let a = InfSymplectic::zero(&pt(), (-3, 3));
        assert!(quadratic_hamiltonian(&a).unwrap().is_zero());
    }

    #[test]
    fn canonical_commutation() {
        let sp = coordinate_space("q", &pt(), 1).unwrap();
        let d = DiffOperator::partial(&sp, "q_0").unwrap();
        let q = DiffOperator::multiplication(TruncatedSeries::var(&sp, "q_0").unwrap());
        let c = d.commutator(&q).unwrap();
        assert_eq!(c, DiffOperator::multiplication(TruncatedSeries::one(&sp)));
    }

    #[test]
    fn self_commutator_vanishes() {
        let a = InfSymplectic::from_fn(&pt(), (-3, 3), |k, _| {
            HElement::from_scalars(&pt(), &[(k + 1, 0, Scalar::from_int(k as i64))])
        });
        let c = a.commutator(&a).unwrap();
        assert!(c.domain().all(|(k, mu)| c.image(k, mu).unwrap().is_zero()));
    }

    #[test]
    fn strict_commutator_reports_overflow() {
        let shift = InfSymplectic::from_fn(&pt(), (-2, 2), |k, _| {
            HElement::from_scalars(&pt(), &[(k + 1, 0, Scalar::one())])
        });
        assert!(shift.commutator(&shift).is_ok());
        assert_eq!(shift.commutator_strict(&shift), Err(Error::WindowOverflow));
    }

    fn point_potential(f0: &str, deg: u32) -> GenusExpandedPotential {
        // genus one present but zero, so ħ⁰ results are complete
        let sp = SeriesSpace::new(["t_0", "t_1"], Truncation::with_genus(deg, 1, 1)).unwrap();
        let f = match f0 {
            "cubic" => TruncatedSeries::monomial(&sp, &[("t_0", 3)], 0, Scalar::new(1, 6)).unwrap(),
            _ => TruncatedSeries::zero(&sp),
        };
        GenusExpandedPotential::new(vec![f, TruncatedSeries::zero(&sp)]).unwrap()
    }

    #[test]
    fn potential_json_round_trip() {
        let pot = point_potential("cubic", 5);
        let text = serde_json::to_string(&pot.to_json()).unwrap();
        let back: PotentialJson = serde_json::from_str(&text).unwrap();
        assert_eq!(GenusExpandedPotential::from_json(&back).unwrap(), pot);
        assert_eq!(pot.to_json().genera.len(), 2);
    }

    #[test]
    fn logarithmic_action_examples() {
        let pot = point_potential("cubic", 8);
        let sp = pot.space().clone();
        let opsp = coordinate_space("t", &pt(), 1).unwrap();

        let d0 = DiffOperator::partial(&opsp, "t_0").unwrap();
        let y = apply(&d0, &pot).unwrap();
        assert_eq!(
            y,
            TruncatedSeries::monomial(&sp, &[("t_0", 2)], -1, Scalar::new(1, 2))
                .unwrap()
                .truncate_degree(7)
        );

        let mult = DiffOperator::multiplication(
            TruncatedSeries::monomial(&opsp, &[("t_0", 2)], -1, Scalar::new(1, 2)).unwrap(),
        );
        let y = apply(&mult, &pot).unwrap();
        assert_eq!(
            y,
            TruncatedSeries::monomial(&sp, &[("t_0", 2)], -1, Scalar::new(1, 2)).unwrap()
        );

        let mut dd = DiffOperator::zero(&opsp);
        dd.add_term(
            Derivative::from_indices(&[0, 0]),
            TruncatedSeries::monomial(&opsp, &[], 1, Scalar::one()).unwrap(),
        );
        let y = apply(&dd, &pot).unwrap();
        let sp6 = y.space().clone();
        let expected = &TruncatedSeries::monomial(&sp6, &[("t_0", 1)], 0, Scalar::one()).unwrap()
            + &TruncatedSeries::monomial(&sp6, &[("t_0", 4)], -1, Scalar::new(1, 4)).unwrap();
        assert_eq!(y, expected);
    }

    #[test]
    fn genus_window_refusal() {
        let pot = point_potential("cubic", 6);
        let opsp = coordinate_space("t", &pt(), 1).unwrap();
        let mut dd = DiffOperator::zero(&opsp);
        dd.add_term(Derivative::from_indices(&[0, 0]), TruncatedSeries::one(&opsp));
        assert!(matches!(apply(&dd, &pot), Err(Error::GenusWindow(_))));
    }

    #[test]
    fn hamiltonian_of_coordinate_swap() {
        // A: z^0 ↦ z^{-1}, z^{-1} ↦ 0 is the shift sending q_0 to the p_0 axis
        let sp = SeriesSpace::scalars();
        let a = InfSymplectic::from_fn(&pt(), (-2, 2), |k, _| {
            if k == 0 {
                HElement::from_scalars(&pt(), &[(-1, 0, Scalar::one())])
            } else {
                HElement::zero(&pt(), &sp)
            }
        });
        let h = quadratic_hamiltonian(&a).unwrap();
        // ½Ω(q_0 z^{-1}, q_0) = −½ q_0²
        assert_eq!(h.coefficient(Coord::q(0), Coord::q(0)), Scalar::new(-1, 2));
        assert_eq!(h.to_string(), "-1/2*q_0^2");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_form() -> impl Strategy<Value = QuadraticForm> {
            prop::collection::vec((0u8..3, 0u32..3, 0u32..3, -5i64..6), 0..8).prop_map(|raw| {
                let mut h = QuadraticForm::zero(&FrobeniusAlgebra::point());
                for (kind, a, b, c) in raw {
                    let (x, y) = match kind {
                        0 => (Coord::q(a), Coord::q(b)),
                        1 => (Coord::p(a), Coord::q(b)),
                        _ => (Coord::p(a), Coord::p(b)),
                    };
                    h.add(x, y, Scalar::from_int(c));
                }
                h
            })
        }

        proptest! {
            #[test]
            fn quantize_is_linear(h1 in arb_form(), h2 in arb_form(), a in -3i64..4, b in -3i64..4) {
                let (a, b) = (Scalar::from_int(a), Scalar::from_int(b));
                let lhs = quantize(&h1.combine(&a, &h2, &b), 3).unwrap();
                let rhs = quantize(&h1, 3).unwrap().scale(&a).try_add(&quantize(&h2, 3).unwrap().scale(&b)).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn monomial_order_irrelevant(h in arb_form(), seed in 0u64..1000) {
                use rand::seq::SliceRandom;
                use rand::SeedableRng;
                let mut terms: Vec<_> = h.terms().map(|(k, c)| (*k, c.clone())).collect();
                terms.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
                let mut shuffled = QuadraticForm::zero(h.algebra());
                for ((a, b), c) in terms {
                    shuffled.add(b, a, c);
                }
                let sp = SeriesSpace::new(["q_0", "q_1", "q_2"], Truncation::with_genus(7, 2, 1)).unwrap();
                let f0 = TruncatedSeries::monomial(&sp, &[("q_0", 3)], 0, Scalar::new(1, 6)).unwrap();
                let f1 = TruncatedSeries::monomial(&sp, &[("q_1", 1)], 0, Scalar::new(1, 24)).unwrap();
                let pot = GenusExpandedPotential::new(vec![f0, f1]).unwrap();
                let a = apply(&quantize(&h, 2).unwrap(), &pot);
                let b = apply(&quantize(&shuffled, 2).unwrap(), &pot);
                prop_assert_eq!(a, b);
            }
        }
    }
}
