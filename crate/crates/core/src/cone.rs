//! The genus-zero Lagrangian cone: points `J(t)` built from genus-zero
//! correlators, and membership tests against the graph of `dF⁰`.
//!
//! Membership is evaluated in `t`-coordinates. The truncated `F⁰` is a
//! polynomial around `t = 0`, i.e. around `q = −z`, which is exactly the
//! formal neighbourhood where the cone is a graph.

use crate::correlators::{novikov_names, CorrelatorKey, CorrelatorTable, Insertion};
use crate::error::{Error, Result};
use crate::frobenius::{FrobeniusAlgebra, Target};
use crate::hspace::{dilaton_shift, to_darboux, HElement};
use crate::scalar::Scalar;
use crate::series::{descendant_name, Monomial, SeriesSpace, Substitution, TruncatedSeries, Truncation};
use crate::virasoro::{genus_potential, potential_space};

/// Bounds for cone computations: inputs `t(z)` may use `z^0..z^depth`, and
/// outputs keep `z^{−1}..z^{−zdepth}`. The coefficient degree bound is the
/// one of the input's series space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConeTruncation {
    pub depth: u32,
    pub zdepth: u32,
}

impl ConeTruncation {
    pub fn new(depth: u32, zdepth: u32) -> Self {
        ConeTruncation { depth, zdepth }
    }
}

/// `F⁰` in the variables `t_k^α` (and Novikov variables).
pub fn genus0_potential_t(table: &CorrelatorTable, trunc: Truncation) -> Result<TruncatedSeries> {
    let space = potential_space(table.target(), Truncation::new(trunc.deg, trunc.depth))?;
    genus_potential(table, 0, &space)
}

/// `F⁰` rewritten in `q_k^α` by the polynomial substitution
/// `t_1 ↦ q_1 + 1` (unit direction), all other `t ↦ q`.
pub fn genus0_potential(table: &CorrelatorTable, trunc: Truncation) -> Result<TruncatedSeries> {
    let f = genus0_potential_t(table, trunc)?;
    let alg = &table.target().algebra;
    let qspace = SeriesSpace::descendants("q", alg, &novikov_names(table.target()), f.space().trunc())?;
    let renames: Vec<(String, String)> = (0..=trunc.depth)
        .flat_map(|k| (0..alg.dim()).map(move |a| (k, a)))
        .map(|(k, a)| (descendant_name("t", k, a, alg), descendant_name("q", k, a, alg)))
        .collect();
    let mut sub = Substitution::with_renames(f.space(), &qspace, &renames);
    if trunc.depth >= 1 {
        for (a, u) in alg.unit().iter().enumerate() {
            if u.is_zero() {
                continue;
            }
            let name = descendant_name("q", 1, a, alg);
            sub.set_affine(&descendant_name("t", 1, a, alg), u.clone(), &[(&name, Scalar::one())])?;
        }
    }
    f.substitute(&sub)
}

/// A point of the cone together with the input it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConePoint {
    pub input: HElement,
    pub j: HElement,
}

/// Coefficient space for `J(t)`: the input's space plus Novikov variables.
pub(crate) fn output_space(t: &HElement, target: &Target) -> Result<SeriesSpace> {
    let missing: Vec<String> = novikov_names(target)
        .into_iter()
        .filter(|q| !t.space().contains(q))
        .collect();
    t.space().extended(&missing)
}

/// Nonzero `(k, α, c_{k,α})` of `t ∈ ℋ₊`, checked to be formal.
pub(crate) fn plus_support(t: &HElement, depth: u32) -> Result<Vec<(Insertion, TruncatedSeries)>> {
    let mut out = Vec::new();
    for (k, row) in t.components() {
        if k < 0 {
            return Err(Error::NotPositive(k));
        }
        if k as u32 > depth {
            return Err(Error::ZDepthExceeded { depth, exponent: k });
        }
        for (a, c) in row.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !c.constant_term().is_zero() {
                return Err(Error::NotFormal(format!("constant term in the z^{k} coefficient")));
            }
            out.push((Insertion::new(k as u32, a), c.clone()));
        }
    }
    Ok(out)
}

fn weight(alg: &FrobeniusAlgebra, ins: &Insertion) -> i64 {
    ins.k as i64 + alg.degree(ins.class) as i64
}

/// `J(t) = −z + t(z) + Σ_{n,d} Q^d/n! Σ_μ φ^μ ⟨t(ψ)…t(ψ), φ_μ/(−z−ψ)⟩_{0,n+1,d}`.
///
/// The sum over `n`-tuples is taken over multisets of `t`'s support with
/// weight `1/aut`, and `1/(−z−ψ) = Σ_m (−1)^{m+1} ψ^m z^{−m−1}`.
pub fn cone_point(t: &HElement, table: &CorrelatorTable, trunc: ConeTruncation) -> Result<ConePoint> {
    let target = table.target();
    let alg = &target.algebra;
    if t.algebra() != alg {
        return Err(Error::AlgebraMismatch);
    }
    let support = plus_support(t, trunc.depth)?;
    let space = output_space(t, target)?;
    let deg = space.trunc().deg;
    let t = t.reembed(&space)?;
    let support: Vec<_> = support
        .into_iter()
        .map(|(i, c)| Ok((i, c.reembed(&space)?)))
        .collect::<Result<_>>()?;

    let mut j = HElement::zero_truncated_below(alg, &space, -(trunc.zdepth as i32));
    j = j.try_add(&dilaton_shift(&t)?)?;
    let qnames = novikov_names(target);

    let mut multisets = Vec::new();
    collect_multisets(
        &support,
        0,
        deg as usize,
        &mut Vec::new(),
        TruncatedSeries::one(&space),
        &mut multisets,
    )?;
    for (ins, product) in multisets {
        let n = ins.len();
        let used: u32 = product.min_degree().unwrap_or(0);
        let aut = crate::correlators::multiplicity_factorials(&ins);
        let w: i64 = ins.iter().map(|i| weight(alg, i)).sum();
        for dsum in 0..=deg.saturating_sub(used) {
            for d in crate::correlators::degree_vectors(target.novikov_rank(), dsum) {
                if n < 2 && d.iter().all(|&x| x == 0) {
                    continue;
                }
                let qd = novikov_monomial(&space, &qnames, &d)?;
                let vdim = target.virtual_dimension(0, n + 1, &d);
                for mu in 0..alg.dim() {
                    let m = vdim - w - alg.degree(mu) as i64;
                    if m < 0 || m >= trunc.zdepth as i64 {
                        continue;
                    }
                    let mut key_ins = ins.clone();
                    key_ins.push(Insertion::new(m as u32, mu));
                    let value = table.get(&CorrelatorKey::new(0, key_ins, d.clone()))?;
                    if value.is_zero() {
                        continue;
                    }
                    let coeff = product
                        .try_mul(&qd)?
                        .scale(&(value * Scalar::sign_power(m + 1) / aut.clone()));
                    for nu in 0..alg.dim() {
                        let g = alg.inverse_metric(mu, nu);
                        if !g.is_zero() {
                            j.add_component(-(m as i32) - 1, nu, coeff.scale(g));
                        }
                    }
                }
            }
        }
    }
    Ok(ConePoint { input: t, j })
}

pub(crate) fn novikov_monomial(space: &SeriesSpace, names: &[String], d: &[u32]) -> Result<TruncatedSeries> {
    let powers: Vec<(&str, u16)> = names
        .iter()
        .map(String::as_str)
        .zip(d.iter().map(|&x| x as u16))
        .collect();
    TruncatedSeries::monomial(space, &powers, 0, Scalar::one())
}

/// Sorted multisets of the support with the product of their coefficients,
/// skipping those whose product vanishes in the truncation.
fn collect_multisets(
    support: &[(Insertion, TruncatedSeries)],
    start: usize,
    room: usize,
    cur: &mut Vec<Insertion>,
    product: TruncatedSeries,
    out: &mut Vec<(Vec<Insertion>, TruncatedSeries)>,
) -> Result<()> {
    out.push((cur.clone(), product.clone()));
    if room == 0 {
        return Ok(());
    }
    for i in start..support.len() {
        let next = product.try_mul(&support[i].1)?;
        if next.is_zero() {
            continue;
        }
        cur.push(support[i].0);
        collect_multisets(support, i, room - 1, cur, next, out)?;
        cur.pop();
    }
    Ok(())
}

/// The first coordinate where `p ≠ ∂F⁰/∂q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeResidual {
    pub l: u32,
    pub class: usize,
    pub p: TruncatedSeries,
    pub expected: TruncatedSeries,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeCheck {
    pub on_cone: bool,
    /// Number of `p^ν_l` coordinates compared.
    pub checked: usize,
    pub first_failure: Option<ConeResidual>,
}

/// Compares `p^ν_l(f)` with `∂F⁰/∂t^ν_l` at `t = q(f) + z` for `l < zdepth`.
pub fn check_on_cone(f: &HElement, table: &CorrelatorTable, trunc: ConeTruncation) -> Result<ConeCheck> {
    let target = table.target();
    let alg = &target.algebra;
    if f.algebra() != alg {
        return Err(Error::AlgebraMismatch);
    }
    let (lo, _) = f.window();
    if f.is_truncated_below() && lo > -(trunc.zdepth as i32) {
        return Err(Error::ZDepthExceeded {
            depth: trunc.zdepth,
            exponent: lo,
        });
    }
    let space = output_space(f, target)?;
    let f = f.reembed(&space)?;
    let t = f.plus_part().try_sub(&HElement::minus_z(alg, &space))?;
    let qmax = t.components().map(|(k, _)| k as u32).max().unwrap_or(0);
    let support = plus_support(&t, qmax.max(trunc.depth))?;
    let depth = trunc.depth.max(trunc.zdepth.saturating_sub(1)).max(qmax);

    let deg = space.trunc().deg;
    let f0 = genus0_potential_t(table, Truncation::new(deg + 1, depth))?;
    let mut sub = Substitution::rename(f0.space(), &space);
    let zero = TruncatedSeries::zero(&space);
    for k in 0..=depth {
        for a in 0..alg.dim() {
            let image = support
                .iter()
                .find(|(i, _)| *i == Insertion::new(k, a))
                .map_or_else(|| zero.clone(), |(_, c)| c.clone());
            sub.set(&descendant_name("t", k, a, alg), image)?;
        }
    }
    let darboux = to_darboux(&f);
    let mut checked = 0;
    for l in 0..trunc.zdepth {
        for nu in 0..alg.dim() {
            let expected = f0.derive(&descendant_name("t", l, nu, alg))?.substitute(&sub)?;
            let p = darboux
                .p
                .get(l as usize)
                .map_or_else(|| zero.clone(), |row| row[nu].clone());
            checked += 1;
            if p != expected {
                return Ok(ConeCheck {
                    on_cone: false,
                    checked,
                    first_failure: Some(ConeResidual {
                        l,
                        class: nu,
                        p,
                        expected,
                    }),
                });
            }
        }
    }
    Ok(ConeCheck {
        on_cone: true,
        checked,
        first_failure: None,
    })
}

/// `(Σ t ∂_t − ∂_{t_1^𝟙} − 2) F⁰`, i.e. `Σ q ∂F⁰/∂q − 2F⁰` in `t`-coordinates,
/// complete through degree `deg − 1`.
pub fn euler_residual(f0: &TruncatedSeries, alg: &FrobeniusAlgebra) -> Result<TruncatedSeries> {
    let space = f0.space();
    let trunc = space.trunc();
    let mut acc = f0.scale(&Scalar::from_int(-2));
    for k in 0..=trunc.depth {
        for a in 0..alg.dim() {
            let name = descendant_name("t", k, a, alg);
            let d = f0.derive(&name)?;
            acc = acc.try_add(&TruncatedSeries::var(space, &name)?.try_mul(&d)?)?;
            if k == 1 && !alg.unit()[a].is_zero() {
                acc = acc.try_sub(&d.scale(&alg.unit()[a]))?;
            }
        }
    }
    Ok(acc.truncate_degree(trunc.deg.saturating_sub(1)))
}

/// `∂F⁰/∂t_0^𝟙 − ½(t_0, t_0) − Σ_k t_{k+1} ∂F⁰/∂t_k`, complete through degree `deg − 1`.
pub fn string_residual(f0: &TruncatedSeries, alg: &FrobeniusAlgebra) -> Result<TruncatedSeries> {
    let space = f0.space();
    let trunc = space.trunc();
    let t = |k: u32, a: usize| descendant_name("t", k, a, alg);
    let mut acc = TruncatedSeries::zero(space);
    for (a, u) in alg.unit().iter().enumerate() {
        if !u.is_zero() {
            acc = acc.try_add(&f0.derive(&t(0, a))?.scale(u))?;
        }
    }
    for a in 0..alg.dim() {
        for b in 0..alg.dim() {
            let g = alg.metric(a, b);
            if g.is_zero() {
                continue;
            }
            let ta = TruncatedSeries::var(space, &t(0, a))?;
            let tb = TruncatedSeries::var(space, &t(0, b))?;
            acc = acc.try_sub(&ta.try_mul(&tb)?.scale(&(g * &Scalar::new(1, 2))))?;
        }
    }
    for k in 0..trunc.depth {
        for a in 0..alg.dim() {
            let v = TruncatedSeries::var(space, &t(k + 1, a))?;
            acc = acc.try_sub(&v.try_mul(&f0.derive(&t(k, a))?)?)?;
        }
    }
    Ok(acc.truncate_degree(trunc.deg.saturating_sub(1)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneityCheck {
    pub holds: bool,
    /// `λ = 0`: the scaled point is the vertex of the cone.
    pub vertex: bool,
    pub ray: ConeCheck,
    pub euler_residual: TruncatedSeries,
}

/// Scales `J(t)` by the formal ray `λ_ε = 1 + (λ − 1)ε` and checks that the
/// result is again on the cone; `ε` is adjoined to the coefficient space.
/// Also evaluates the Euler identity on `F⁰`.
pub fn cone_homogeneity_check(
    t: &HElement,
    lambda: &Scalar,
    table: &CorrelatorTable,
    trunc: ConeTruncation,
) -> Result<HomogeneityCheck> {
    let eps = "eps".to_string();
    let base = if t.space().contains(&eps) {
        return Err(Error::Config("`eps` is reserved for the homogeneity ray".into()));
    } else {
        t.space().extended(std::slice::from_ref(&eps))?
    };
    let t = t.reembed(&base)?;
    let point = cone_point(&t, table, trunc)?;
    let ray = TruncatedSeries::one(point.j.space()).try_add(&TruncatedSeries::monomial(
        point.j.space(),
        &[("eps", 1)],
        0,
        lambda - &Scalar::one(),
    )?)?;
    let scaled = point.j.scale(&ray)?;
    let ray_check = check_on_cone(&scaled, table, trunc)?;

    let deg = point.j.space().trunc().deg;
    let f0 = genus0_potential_t(table, Truncation::new(deg + 1, trunc.depth.max(trunc.zdepth)))?;
    let euler = euler_residual(&f0, &table.target().algebra)?;
    Ok(HomogeneityCheck {
        holds: ray_check.on_cone && euler.is_zero(),
        vertex: lambda.is_zero(),
        ray: ray_check,
        euler_residual: euler,
    })
}

/// Helper for callers that only need coefficient monomials.
pub fn monomial_of(space: &SeriesSpace, powers: &[(&str, u16)]) -> Result<Monomial> {
    let mut exps = vec![0u16; space.nvars()];
    for (name, e) in powers {
        exps[space.index_of(name)?] += e;
    }
    Ok(Monomial::from_exponents(&exps, 0))
}
