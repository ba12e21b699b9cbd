//! Fixed-point localization on the graph space of `X × P¹`.
//!
//! A fixed locus is represented only by what the localization formula
//! consumes: the restriction of the integrand, the Euler class of its
//! virtual normal bundle, and a correlator table that integrates
//! `ψ`-monomials over it. Three kinds of loci contribute to
//! `(ev_∞)_*[(−z) Σ Q^d/n! ∏ ev_i^* t(ψ_i)]`:
//!
//! * `General(n, d)`: a degree-`d` curve over `0 ∈ P¹` with `n + 1` marked
//!   points, the last one attached to the constant `∞`-branch.
//!   `e = (−z)(−z − ψ_{n+1})`.
//! * `ExceptionalOnePoint`: `n = 1, d = 0`; the marked point sits at `0`,
//!   `ψ_1` restricts to `z` and `e = −z`.
//! * `ExceptionalZeroPoint`: `n = 0, d = 0`; no moving obstruction part, `e = 1`.

use std::collections::BTreeMap;
use std::fmt;

use crate::cone::{check_on_cone, cone_point, novikov_monomial, output_space, plus_support, ConeCheck, ConeTruncation};
use crate::correlators::{novikov_names, CorrelatorKey, CorrelatorTable, Insertion};
use crate::error::{Error, Result};
use crate::hspace::HElement;
use crate::scalar::Scalar;
use crate::series::{Monomial, SeriesSpace, TruncatedSeries};

/// `Σ c_{a,b} z^a ψ^b` with `ψ^{nilpotency} = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantClass {
    space: SeriesSpace,
    nilpotency: u32,
    terms: BTreeMap<(i32, u32), TruncatedSeries>,
}

impl EquivariantClass {
    pub fn zero(space: &SeriesSpace, nilpotency: u32) -> Self {
        EquivariantClass {
            space: space.clone(),
            nilpotency,
            terms: BTreeMap::new(),
        }
    }

    /// `c · z^a ψ^b`.
    pub fn monomial(space: &SeriesSpace, nilpotency: u32, z_power: i32, psi_power: u32, c: Scalar) -> Self {
        let mut e = EquivariantClass::zero(space, nilpotency);
        e.add_term(z_power, psi_power, TruncatedSeries::constant(space, c));
        e
    }

    pub fn one(space: &SeriesSpace, nilpotency: u32) -> Self {
        EquivariantClass::monomial(space, nilpotency, 0, 0, Scalar::one())
    }

    /// `−z`.
    pub fn minus_z(space: &SeriesSpace, nilpotency: u32) -> Self {
        EquivariantClass::monomial(space, nilpotency, 1, 0, -Scalar::one())
    }

    /// `−z − ψ`.
    pub fn minus_z_minus_psi(space: &SeriesSpace, nilpotency: u32) -> Self {
        let mut e = EquivariantClass::minus_z(space, nilpotency);
        e.add_term(0, 1, TruncatedSeries::constant(space, -Scalar::one()));
        e
    }

    pub fn space(&self) -> &SeriesSpace {
        &self.space
    }

    pub fn nilpotency(&self) -> u32 {
        self.nilpotency
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `((z-power, ψ-power), coefficient)` in increasing order.
    pub fn terms(&self) -> impl Iterator<Item = (&(i32, u32), &TruncatedSeries)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, z_power: i32, psi_power: u32) -> TruncatedSeries {
        self.terms
            .get(&(z_power, psi_power))
            .cloned()
            .unwrap_or_else(|| TruncatedSeries::zero(&self.space))
    }

    pub fn add_term(&mut self, z_power: i32, psi_power: u32, c: TruncatedSeries) {
        if psi_power >= self.nilpotency || c.is_zero() {
            return;
        }
        let slot = self
            .terms
            .entry((z_power, psi_power))
            .or_insert_with(|| TruncatedSeries::zero(&self.space));
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&(z_power, psi_power));
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::UniverseMismatch);
        }
        if self.nilpotency != other.nilpotency {
            return Err(Error::Config(format!(
                "nilpotency orders differ: {} vs {}",
                self.nilpotency, other.nilpotency
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (&(a, b), c) in &other.terms {
            out.add_term(a, b, c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = EquivariantClass::zero(&self.space, self.nilpotency);
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &other.terms {
                if b1 + b2 < self.nilpotency {
                    out.add_term(a1 + a2, b1 + b2, c1.try_mul(c2)?);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &TruncatedSeries) -> Result<Self> {
        let mut out = EquivariantClass::zero(&self.space, self.nilpotency);
        for (&(a, b), x) in &self.terms {
            out.add_term(a, b, x.try_mul(c)?);
        }
        Ok(out)
    }

    /// The restriction `ψ ↦ λz`; the result has no `ψ`.
    pub fn restrict_psi(&self, value: &Scalar) -> Self {
        let mut out = EquivariantClass::zero(&self.space, 1);
        for (&(a, b), c) in &self.terms {
            out.add_term(a + b as i32, 0, c.scale(&value.pow(b)));
        }
        out
    }
}

impl fmt::Display for EquivariantClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(a, b), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            match a {
                0 => {}
                1 => write!(f, "*z")?,
                _ => write!(f, "*z^{a}")?,
            }
            match b {
                0 => {}
                1 => write!(f, "*psi")?,
                _ => write!(f, "*psi^{b}")?,
            }
        }
        Ok(())
    }
}

/// `1/e` for `e = c z^a (1 + R)` with `c` a nonzero scalar and `R` divisible
/// by `ψ`: `c^{−1} z^{−a} Σ_j (−R)^j`, finite because `ψ` is nilpotent.
pub fn euler_inverse(e: &EquivariantClass) -> Result<EquivariantClass> {
    let leading: Vec<_> = e.terms.iter().filter(|((_, b), _)| *b == 0).collect();
    let [(&(a, _), c)] = leading.as_slice() else {
        return Err(Error::NotInvertible("ψ-free part is not a single power of z".into()));
    };
    let c = c
        .as_scalar()
        .filter(|c| !c.is_zero())
        .ok_or_else(|| Error::NotInvertible(format!("leading coefficient {c} is not a nonzero scalar")))?;
    let inv_lead = EquivariantClass::monomial(&e.space, e.nilpotency, -a, 0, c.recip()?);
    let mut minus_r = EquivariantClass::zero(&e.space, e.nilpotency);
    for (&(za, b), x) in &e.terms {
        if b > 0 {
            minus_r.add_term(za, b, x.scale(&-c.recip()?));
        }
    }
    let minus_r = minus_r.try_mul(&EquivariantClass::monomial(
        &e.space,
        e.nilpotency,
        -a,
        0,
        Scalar::one(),
    ))?;
    let mut acc = EquivariantClass::one(&e.space, e.nilpotency);
    let mut power = EquivariantClass::one(&e.space, e.nilpotency);
    for _ in 1..e.nilpotency.max(1) {
        power = power.try_mul(&minus_r)?;
        if power.is_zero() {
            break;
        }
        acc = acc.try_add(&power)?;
    }
    acc.try_mul(&inv_lead)
}

/// Kinds of fixed loci.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FixedLocusCase {
    General { points: usize, degree: Vec<u32> },
    ExceptionalOnePoint,
    ExceptionalZeroPoint,
}

impl fmt::Display for FixedLocusCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedLocusCase::General { points, degree } => write!(f, "general(n={points}, d={degree:?})"),
            FixedLocusCase::ExceptionalOnePoint => write!(f, "exceptional(n=1, d=0)"),
            FixedLocusCase::ExceptionalZeroPoint => write!(f, "exceptional(n=0, d=0)"),
        }
    }
}

/// One fixed locus: its Euler class, the kernel `(−z)/e` in the attaching
/// `ψ`, and the pushed-forward contribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedLocusContribution {
    pub case: FixedLocusCase,
    pub euler: EquivariantClass,
    pub kernel: EquivariantClass,
    pub push: HElement,
}

/// Contribution of a single fixed locus to `(ev_∞)_*`.
///
/// For `General(n, d)` the `n` free points carry `t(ψ_i)`, summed over
/// ordered tuples of `t`'s support with weight `Q^d/n!`, and the kernel's
/// `ψ^m` becomes `τ_m φ_μ` at the attaching point.
pub fn fixed_locus_contribution(
    case: &FixedLocusCase,
    t: &HElement,
    table: &CorrelatorTable,
    trunc: ConeTruncation,
) -> Result<FixedLocusContribution> {
    let target = table.target();
    let alg = &target.algebra;
    if t.algebra() != alg {
        return Err(Error::AlgebraMismatch);
    }
    let space = output_space(t, target)?;
    let support: Vec<(Insertion, TruncatedSeries)> = plus_support(t, trunc.depth)?
        .into_iter()
        .map(|(i, c)| Ok((i, c.reembed(&space)?)))
        .collect::<Result<_>>()?;
    let mut push = HElement::zero_truncated_below(alg, &space, -(trunc.zdepth as i32));
    let minus_z = EquivariantClass::minus_z(&space, 1);
    match case {
        FixedLocusCase::ExceptionalZeroPoint => {
            let euler = EquivariantClass::one(&space, 1);
            let kernel = minus_z.try_mul(&euler_inverse(&euler)?)?;
            // the locus is X itself; the pushforward of 1 is the unit
            for (&(a, _), c) in kernel.terms() {
                for (mu, u) in alg.unit().iter().enumerate() {
                    push.add_component(a, mu, c.scale(u));
                }
            }
            Ok(FixedLocusContribution {
                case: case.clone(),
                euler,
                kernel,
                push,
            })
        }
        FixedLocusCase::ExceptionalOnePoint => {
            let euler = EquivariantClass::minus_z(&space, 1);
            let kernel = minus_z.try_mul(&euler_inverse(&euler)?)?;
            for (ins, c) in &support {
                // t(ψ_1) with ψ_1 ↦ z
                let class = EquivariantClass::monomial(&space, ins.k + 1, 0, ins.k, Scalar::one());
                let restricted = class.restrict_psi(&Scalar::one()).try_mul(&kernel)?.scale(c)?;
                for (&(a, _), x) in restricted.terms() {
                    push.add_component(a, ins.class, x.clone());
                }
            }
            Ok(FixedLocusContribution {
                case: case.clone(),
                euler,
                kernel,
                push,
            })
        }
        FixedLocusCase::General { points, degree } => {
            let n = *points;
            let d = degree.clone();
            if d.len() != target.novikov_rank() {
                return Err(Error::Config(format!(
                    "degree {d:?} does not match Novikov rank {}",
                    target.novikov_rank()
                )));
            }
            if n + 1 < 3 && d.iter().all(|&x| x == 0) {
                return Err(Error::Unstable {
                    genus: 0,
                    points: n + 1,
                });
            }
            let vdim = target.virtual_dimension(0, n + 1, &d).max(0) as u32;
            let nil = vdim + 1;
            let euler =
                EquivariantClass::minus_z(&space, nil).try_mul(&EquivariantClass::minus_z_minus_psi(&space, nil))?;
            let kernel = EquivariantClass::minus_z(&space, nil).try_mul(&euler_inverse(&euler)?)?;
            let qd = novikov_monomial(&space, &novikov_names(target), &d)?;
            let weight = Scalar::factorial(n as u32).recip()?;
            let mut tuples = Vec::new();
            ordered_tuples(&support, n, &mut Vec::new(), qd.scale(&weight), &mut tuples)?;
            for (ins, product) in tuples {
                let w: i64 = ins.iter().map(|i| i.k as i64 + alg.degree(i.class) as i64).sum();
                for mu in 0..alg.dim() {
                    let m = target.virtual_dimension(0, n + 1, &d) - w - alg.degree(mu) as i64;
                    if m < 0 || m >= trunc.zdepth as i64 {
                        continue;
                    }
                    let mut key_ins = ins.clone();
                    key_ins.push(Insertion::new(m as u32, mu));
                    let value = table.get(&CorrelatorKey::new(0, key_ins, d.clone()))?;
                    if value.is_zero() {
                        continue;
                    }
                    let base = product.scale(&value);
                    for (&(a, b), x) in kernel.terms() {
                        if b as i64 != m || a < -(trunc.zdepth as i32) {
                            continue;
                        }
                        let coeff = base.try_mul(x)?;
                        for nu in 0..alg.dim() {
                            let g = alg.inverse_metric(mu, nu);
                            if !g.is_zero() {
                                push.add_component(a, nu, coeff.scale(g));
                            }
                        }
                    }
                }
            }
            Ok(FixedLocusContribution {
                case: case.clone(),
                euler,
                kernel,
                push,
            })
        }
    }
}

fn ordered_tuples(
    support: &[(Insertion, TruncatedSeries)],
    n: usize,
    cur: &mut Vec<Insertion>,
    product: TruncatedSeries,
    out: &mut Vec<(Vec<Insertion>, TruncatedSeries)>,
) -> Result<()> {
    if product.is_zero() {
        return Ok(());
    }
    if cur.len() == n {
        out.push((cur.clone(), product));
        return Ok(());
    }
    for (ins, c) in support {
        cur.push(*ins);
        ordered_tuples(support, n, cur, product.try_mul(c)?, out)?;
        cur.pop();
    }
    Ok(())
}

/// Every fixed locus that can contribute through the coefficient degree
/// bound, in a canonical order.
pub fn fixed_loci(table: &CorrelatorTable, max_degree: u32) -> Vec<FixedLocusCase> {
    let target = table.target();
    let mut out = vec![
        FixedLocusCase::ExceptionalZeroPoint,
        FixedLocusCase::ExceptionalOnePoint,
    ];
    for total in 0..=max_degree {
        for n in 0..=(max_degree - total) as usize {
            for d in crate::correlators::degree_vectors(target.novikov_rank(), total) {
                if n + 1 < 3 && total == 0 {
                    continue;
                }
                out.push(FixedLocusCase::General { points: n, degree: d });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PushForward {
    pub total: HElement,
    pub contributions: Vec<FixedLocusContribution>,
}

impl PushForward {
    /// Sum of the two exceptional contributions.
    pub fn exceptional(&self) -> Result<HElement> {
        let mut acc = HElement::zero(self.total.algebra(), self.total.space());
        for c in &self.contributions {
            if !matches!(c.case, FixedLocusCase::General { .. }) {
                acc = acc.try_add(&c.push)?;
            }
        }
        Ok(acc)
    }

    /// `total − Σ General` contributions.
    pub fn total_minus_general(&self) -> Result<HElement> {
        let mut acc = self.total.clone();
        for c in &self.contributions {
            if matches!(c.case, FixedLocusCase::General { .. }) {
                acc = acc.try_sub(&c.push)?;
            }
        }
        Ok(acc)
    }
}

/// `(ev_∞)_*[(−z) Σ Q^d/n! ∏ ev^* t(ψ)]` assembled over all fixed loci.
pub fn ev_infty_push(t: &HElement, table: &CorrelatorTable, trunc: ConeTruncation) -> Result<PushForward> {
    let space = output_space(t, table.target())?;
    let deg = space.trunc().deg;
    let mut total = HElement::zero_truncated_below(&table.target().algebra, &space, -(trunc.zdepth as i32));
    let mut contributions = Vec::new();
    for case in fixed_loci(table, deg) {
        let c = fixed_locus_contribution(&case, t, table, trunc)?;
        total = total.try_add(&c.push)?;
        contributions.push(c);
    }
    Ok(PushForward { total, contributions })
}

/// First coefficient where two elements differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub z_power: i32,
    pub class: usize,
    pub monomial: String,
    pub left: Scalar,
    pub right: Scalar,
}

pub fn first_mismatch(a: &HElement, b: &HElement) -> Result<Option<Mismatch>> {
    let diff = a.try_sub(b)?;
    let Some((k, row)) = diff.components().next() else {
        return Ok(None);
    };
    let (class, series) = row
        .iter()
        .enumerate()
        .find(|(_, s)| !s.is_zero())
        .expect("nonzero component");
    let (m, _) = series.terms().next().expect("nonzero series");
    let left = a.coefficient(k, class).coefficient(m);
    let right = b.coefficient(k, class).coefficient(m);
    Ok(Some(Mismatch {
        z_power: k,
        class,
        monomial: describe(m, series.space()),
        left,
        right,
    }))
}

fn describe(m: &Monomial, space: &SeriesSpace) -> String {
    crate::series::format_monomial(m, space.names())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremCheck {
    pub holds: bool,
    pub mismatch: Option<Mismatch>,
    /// `total − Σ General − (t − z)`, expected zero.
    pub exceptional_mismatch: Option<Mismatch>,
    pub cone: ConeCheck,
}

/// `ev_infty_push(t) = cone_point(t)`, the exceptional loci give exactly
/// the dilaton shift `t − z`, and the pushforward lies on the cone.
pub fn theorem1_verify(t: &HElement, table: &CorrelatorTable, trunc: ConeTruncation) -> Result<TheoremCheck> {
    let push = ev_infty_push(t, table, trunc)?;
    let cone = cone_point(t, table, trunc)?;
    let mismatch = first_mismatch(&push.total, &cone.j)?;
    let shift = crate::hspace::dilaton_shift(&cone.input)?;
    let exceptional_mismatch = first_mismatch(&push.total_minus_general()?, &shift)?;
    let cone_check = check_on_cone(&push.total, table, trunc)?;
    Ok(TheoremCheck {
        holds: mismatch.is_none() && exceptional_mismatch.is_none() && cone_check.on_cone,
        mismatch,
        exceptional_mismatch,
        cone: cone_check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::{FrobeniusAlgebra, Target};
    use crate::series::Truncation;
    use proptest::prelude::*;

    fn sp() -> SeriesSpace {
        SeriesSpace::new(["x", "y"], Truncation::new(4, 0)).unwrap()
    }

    #[test]
    fn inverse_examples() {
        let s = sp();
        let inv = euler_inverse(&EquivariantClass::minus_z(&s, 1)).unwrap();
        assert_eq!(inv, EquivariantClass::monomial(&s, 1, -1, 0, -Scalar::one()));
        let inv = euler_inverse(&EquivariantClass::minus_z_minus_psi(&s, 4)).unwrap();
        for m in 0..4u32 {
            let c = inv.coefficient(-(m as i32) - 1, m).as_scalar().unwrap();
            assert_eq!(c, Scalar::sign_power(m as i64 + 1));
        }
        assert_eq!(inv.terms().count(), 4);
        let e = EquivariantClass::minus_z(&s, 1)
            .try_mul(&EquivariantClass::minus_z_minus_psi(&s, 1))
            .unwrap();
        assert_eq!(
            euler_inverse(&e).unwrap(),
            EquivariantClass::monomial(&s, 1, -2, 0, Scalar::one())
        );
        let bad = EquivariantClass::one(&s, 2)
            .try_add(&EquivariantClass::minus_z(&s, 2))
            .unwrap();
        assert!(matches!(euler_inverse(&bad), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn kernel_reproduces_geometric_series() {
        let s = sp();
        let e = EquivariantClass::minus_z(&s, 5)
            .try_mul(&EquivariantClass::minus_z_minus_psi(&s, 5))
            .unwrap();
        let k = EquivariantClass::minus_z(&s, 5)
            .try_mul(&euler_inverse(&e).unwrap())
            .unwrap();
        assert_eq!(k, euler_inverse(&EquivariantClass::minus_z_minus_psi(&s, 5)).unwrap());
    }

    proptest! {
        #[test]
        fn inverse_times_class_is_one(
            lead in prop_oneof![-5i64..-1, 1i64..5],
            a in -2i32..3,
            rest in proptest::collection::vec((-3i32..3, 1u32..4, -4i64..4), 0..5),
            nil in 1u32..5,
        ) {
            let s = sp();
            let mut e = EquivariantClass::monomial(&s, nil, a, 0, Scalar::from_int(lead));
            for (za, b, c) in rest {
                e.add_term(za, b, TruncatedSeries::constant(&s, Scalar::from_int(c)));
            }
            let inv = euler_inverse(&e).unwrap();
            prop_assert_eq!(inv.try_mul(&e).unwrap(), EquivariantClass::one(&s, nil));
        }
    }

    fn point_table() -> CorrelatorTable {
        crate::solve_virasoro(0, 7, 7).unwrap()
    }

    fn input(vars: &[&str], deg: u32) -> HElement {
        let sp = SeriesSpace::new(vars.iter().copied(), Truncation::new(deg, 0)).unwrap();
        let mut t = HElement::zero(&FrobeniusAlgebra::point(), &sp);
        for (k, v) in vars.iter().enumerate() {
            t.add_component(k as i32, 0, TruncatedSeries::var(&sp, v).unwrap());
        }
        t
    }

    #[test]
    fn exceptional_loci() {
        let table = point_table();
        let t = input(&["t_0", "t_1"], 4);
        let trunc = ConeTruncation::new(2, 3);
        let zero = fixed_locus_contribution(&FixedLocusCase::ExceptionalZeroPoint, &t, &table, trunc).unwrap();
        let sp = zero.push.space().clone();
        let mut minus_z = HElement::zero_truncated_below(&FrobeniusAlgebra::point(), &sp, -3);
        minus_z.add_component(1, 0, -TruncatedSeries::one(&sp));
        assert_eq!(zero.push, minus_z);
        let one = fixed_locus_contribution(&FixedLocusCase::ExceptionalOnePoint, &t, &table, trunc).unwrap();
        let mut expected = HElement::zero_truncated_below(&FrobeniusAlgebra::point(), &sp, -3);
        expected.add_component(0, 0, TruncatedSeries::var(&sp, "t_0").unwrap());
        expected.add_component(1, 0, TruncatedSeries::var(&sp, "t_1").unwrap());
        assert_eq!(one.push, expected);
    }

    #[test]
    fn two_point_general_locus() {
        let table = point_table();
        let t = input(&["t_0"], 4);
        let c = fixed_locus_contribution(
            &FixedLocusCase::General {
                points: 2,
                degree: vec![],
            },
            &t,
            &table,
            ConeTruncation::new(0, 3),
        )
        .unwrap();
        let sp = c.push.space().clone();
        let mut expected = HElement::zero_truncated_below(&FrobeniusAlgebra::point(), &sp, -3);
        expected.add_component(
            -1,
            0,
            TruncatedSeries::monomial(&sp, &[("t_0", 2)], 0, Scalar::new(-1, 2)).unwrap(),
        );
        assert_eq!(c.push, expected);
    }

    #[test]
    fn push_of_zero_and_cone_point_examples() {
        let table = point_table();
        let sp = SeriesSpace::new(["x"], Truncation::new(5, 0)).unwrap();
        let zero = HElement::zero(&FrobeniusAlgebra::point(), &sp);
        let push = ev_infty_push(&zero, &table, ConeTruncation::new(2, 5)).unwrap();
        assert_eq!(push.total.components().count(), 1);
        assert_eq!(push.total.coefficient(1, 0), -TruncatedSeries::one(push.total.space()));
        assert!(theorem1_verify(&zero, &table, ConeTruncation::new(2, 5)).unwrap().holds);

        let t0 = input(&["t_0"], 6);
        let r = theorem1_verify(&t0, &table, ConeTruncation::new(0, 5)).unwrap();
        assert!(r.holds, "{r:?}");
        let full = input(&["t_0", "t_1", "t_2"], 5);
        let r = theorem1_verify(&full, &table, ConeTruncation::new(2, 5)).unwrap();
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn projective_line_with_user_table() {
        // P¹ with classes 0 = 1, 1 = p: ⟨1, 1, p⟩_{0,3,0} = ⟨p, p⟩_{0,2,1} = ⟨p⟩_{0,1,1} = 1
        let target = Target::projective_line();
        let mut table = CorrelatorTable::empty(target.clone());
        table
            .insert(
                CorrelatorKey::new(
                    0,
                    vec![Insertion::new(0, 0), Insertion::new(0, 0), Insertion::new(0, 1)],
                    vec![0],
                ),
                Scalar::one(),
            )
            .unwrap();
        table
            .insert(
                CorrelatorKey::new(0, vec![Insertion::new(0, 1), Insertion::new(0, 1)], vec![1]),
                Scalar::one(),
            )
            .unwrap();
        table
            .insert(
                CorrelatorKey::new(0, vec![Insertion::new(0, 1)], vec![1]),
                Scalar::one(),
            )
            .unwrap();
        let coverage = crate::correlators::Coverage {
            max_genus: 0,
            max_points: 3,
            max_psi: Some(0),
            max_degree: 1,
        };
        let table = table.restricted(coverage);
        let sp = SeriesSpace::new(["s"], Truncation::new(2, 0)).unwrap();
        let mut t = HElement::zero(&target.algebra, &sp);
        t.add_component(0, 1, TruncatedSeries::var(&sp, "s").unwrap());
        let push = ev_infty_push(&t, &table, ConeTruncation::new(0, 1)).unwrap();
        let cone = cone_point(&t, &table, ConeTruncation::new(0, 1)).unwrap();
        assert_eq!(first_mismatch(&push.total, &cone.j).unwrap(), None);
        // degree-one, one-point locus: Q·s·φ^p/(−z) with φ^p = 1
        let q = push.total.coefficient(-1, 0);
        let m = crate::cone::monomial_of(q.space(), &[("Q", 1), ("s", 1)]).unwrap();
        assert_eq!(q.coefficient(&m), -Scalar::one());
        assert!(theorem1_verify(&t, &table, ConeTruncation::new(0, 1)).unwrap().holds);
    }
}
