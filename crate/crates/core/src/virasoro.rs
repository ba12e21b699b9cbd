//! Virasoro operators of the point target and the Witten–Kontsevich
//! correlators they determine.
//!
//! `l_n = z^{−1/2} (z d/dz z)^{n+1} z^{−1/2}` acts on `z^k` by
//! `∏_{j=0}^{n} (k + ½ + j) · z^{k+n}` for `n ≥ 0` and by `z^{−1}` for
//! `n = −1`. The operators `l̂_n` come from quantizing their Hamiltonians and
//! substituting the dilaton shift; the constraints
//! `(l̂_n − δ_{n,0}/16) 𝒟 = 0` are then solved order by order.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use crate::correlators::{multiplicity_factorials, novikov_names, CorrelatorKey, CorrelatorTable, Coverage, Insertion};
use crate::error::{Error, Result};
use crate::frobenius::{FrobeniusAlgebra, Target};
use crate::hspace::HElement;
use crate::quantization::{
    apply, coordinate_space, quadratic_hamiltonian, quantize, to_t_coordinates, Coord, Derivative, DiffOperator,
    GenusExpandedPotential, InfSymplectic, QuadraticForm,
};
use crate::scalar::{half_integer_gamma_ratio, Scalar};
use crate::series::{descendant_name, Monomial, SeriesSpace, TruncatedSeries, Truncation};

/// The matrix of `l_n` on `z^k`, `k ∈ window`.
pub fn virasoro_generator(n: i32, window: (i32, i32)) -> Result<InfSymplectic> {
    if n < -1 {
        return Err(Error::Config(format!("Virasoro index {n} < -1")));
    }
    if window.1 - window.0 < n.max(1) {
        return Err(Error::WindowTooSmall {
            min: window.0,
            max: window.1,
            what: format!("l_{n} shifts z-degree by {n}"),
        });
    }
    let pt = FrobeniusAlgebra::point();
    Ok(InfSymplectic::from_fn(&pt, window, |k, _| {
        if n == -1 {
            HElement::from_scalars(&pt, &[(k - 1, 0, Scalar::one())])
        } else {
            HElement::from_scalars(&pt, &[(k + n, 0, half_integer_gamma_ratio(k as i64, n as u32 + 1))])
        }
    }))
}

/// `h_{l_n}` on the coordinates `q_0..q_depth`, `p_0..p_depth`.
pub fn virasoro_hamiltonian(n: i32, depth: u32) -> Result<QuadraticForm> {
    let window = (-1 - depth as i32, depth as i32);
    quadratic_hamiltonian(&virasoro_generator(n, window)?)
}

/// `l̂_n` in the variables `t_0..t_depth`.
pub fn quantized_virasoro(n: i32, depth: u32) -> Result<DiffOperator> {
    let h = virasoro_hamiltonian(n, depth)?;
    to_t_coordinates(&quantize(&h, depth)?, &FrobeniusAlgebra::point())
}

/// `l̂_n − δ_{n,0}/16`.
pub fn virasoro_constraint(n: i32, depth: u32) -> Result<DiffOperator> {
    let op = quantized_virasoro(n, depth)?;
    Ok(if n == 0 {
        op.plus_constant(&-Scalar::new(1, 16))
    } else {
        op
    })
}

/// `[l̂_m, l̂_n] − (n − m) l̂_{m+n}` with operators in `t_0..t_depth`.
/// Terms touching `t_k` with `k > depth − |m| − |n| − 1` feel the
/// truncation; the rest is a constant.
pub fn commutator_defect(m: i32, n: i32, depth: u32) -> Result<DiffOperator> {
    let a = quantized_virasoro(m, depth)?;
    let b = quantized_virasoro(n, depth)?;
    let c = quantized_virasoro(m + n, depth)?;
    a.commutator(&b)?.try_sub(&c.scale(&Scalar::from_int((n - m) as i64)))
}

/// The constant term of [`commutator_defect`], computed far enough from
/// the truncation edge.
pub fn central_constant(m: i32, n: i32) -> Result<Scalar> {
    let depth = (m.abs() + n.abs() + 2) as u32;
    let defect = commutator_defect(m, n, depth)?;
    let one = Monomial::one(defect.space().nvars());
    let constant = defect
        .terms()
        .find(|(d, _)| d.order() == 0)
        .map_or_else(Scalar::zero, |(_, c)| c.coefficient(&one));
    Ok(constant)
}

/// `Γ(a + m + 3/2)/Γ(a + 1/2)`-type ratios used by the closed forms.
fn g_ratio(k: i64, n: i32) -> Scalar {
    half_integer_gamma_ratio(k, (n + 1) as u32)
}

/// The customary closed form of `h_{l_n}`:
///
/// ```text
/// n = −1:  −Σ_{k≥1} p_{k−1} q_k − ½ q_0²
/// n ≥ 0:   −Σ_{k≥0} Γ(k+n+3/2)/Γ(k+1/2) q_k p_{k+n}
///          + Σ_{l=0}^{n−1} (−1)^l Γ(n−l+1/2)/Γ(−l−1/2) p_l p_{n−1−l}
/// ```
///
/// The last sum runs over ordered pairs, so each unordered pair appears
/// twice. Indices beyond `depth` are dropped.
pub fn closed_form_hamiltonian(n: i32, depth: u32) -> QuadraticForm {
    let mut h = QuadraticForm::zero(&FrobeniusAlgebra::point());
    if n == -1 {
        for k in 1..=depth {
            h.add(Coord::p(k - 1), Coord::q(k), -Scalar::one());
        }
        h.add(Coord::q(0), Coord::q(0), Scalar::new(-1, 2));
        return h;
    }
    for k in 0..=depth {
        let target = k as i64 + n as i64;
        if target <= depth as i64 {
            h.add(Coord::q(k), Coord::p(target as u32), -g_ratio(k as i64, n));
        }
    }
    for l in 0..n {
        let c = Scalar::sign_power(l as i64) * g_ratio(-(l as i64) - 1, n);
        h.add(Coord::p(l as u32), Coord::p((n - 1 - l) as u32), c);
    }
    h
}

/// The customary closed form of `l̂_n` in `t`-variables:
///
/// ```text
/// n = −1:  ∂_0 − Σ_{k≥1} t_k ∂_{k−1} + t_0²/(2ħ)
/// n ≥ 0:   Γ(n+5/2)/Γ(3/2) ∂_{n+1} − Σ_{k≥0} Γ(k+n+3/2)/Γ(k+1/2) t_k ∂_{k+n}
///          − (ħ/2) Σ_{l=0}^{n−1} (−1)^{l+1} Γ(n−l+1/2)/Γ(−l−1/2) ∂_l ∂_{n−1−l}
/// ```
pub fn closed_form_operator(n: i32, depth: u32) -> Result<DiffOperator> {
    let pt = FrobeniusAlgebra::point();
    let sp = coordinate_space("t", &pt, depth)?;
    let t = |k: u32| descendant_name("t", k, 0, &pt);
    let idx = |k: u32| sp.index_of(&t(k));
    let mut op = DiffOperator::zero(&sp);
    let one = TruncatedSeries::one(&sp);
    if n == -1 {
        op.add_term(Derivative::from_indices(&[idx(0)?]), one);
        for k in 1..=depth {
            op.add_term(
                Derivative::from_indices(&[idx(k - 1)?]),
                -TruncatedSeries::var(&sp, &t(k))?,
            );
        }
        op.add_term(
            Derivative::none(),
            TruncatedSeries::monomial(&sp, &[(&t(0), 2)], -1, Scalar::new(1, 2))?,
        );
        return Ok(op);
    }
    if (n as u32) < depth {
        op.add_term(
            Derivative::from_indices(&[idx(n as u32 + 1)?]),
            TruncatedSeries::constant(&sp, g_ratio(1, n)),
        );
    }
    for k in 0..=depth {
        let target = k + n as u32;
        if target <= depth {
            op.add_term(
                Derivative::from_indices(&[idx(target)?]),
                TruncatedSeries::var(&sp, &t(k))?.scale(&-g_ratio(k as i64, n)),
            );
        }
    }
    for l in 0..n {
        let c = Scalar::new(-1, 2) * Scalar::sign_power(l as i64 + 1) * g_ratio(-(l as i64) - 1, n);
        op.add_term(
            Derivative::from_indices(&[idx(l as u32)?, idx((n - 1 - l) as u32)?]),
            TruncatedSeries::monomial(&sp, &[], 1, c)?,
        );
    }
    Ok(op)
}

/// Sorted insertion lists of length `n` with `Σ (k + deg φ) = budget`,
/// `k ≤ depth`. Insertions are ordered by `(k, class)`.
pub fn insertion_multisets(n: usize, budget: i64, depth: u32, alg: &FrobeniusAlgebra) -> Vec<Vec<Insertion>> {
    let mut pool = Vec::new();
    for k in 0..=depth {
        for c in 0..alg.dim() {
            pool.push((Insertion::new(k, c), k as i64 + alg.degree(c) as i64));
        }
    }
    let min_weight = pool.iter().map(|p| p.1).min().unwrap_or(0);
    fn rec(
        pool: &[(Insertion, i64)],
        start: usize,
        n: usize,
        budget: i64,
        min_weight: i64,
        cur: &mut Vec<Insertion>,
        out: &mut Vec<Vec<Insertion>>,
    ) {
        if n == 0 {
            if budget == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if budget < min_weight * n as i64 {
            return;
        }
        for i in start..pool.len() {
            let (ins, w) = pool[i];
            if w > budget {
                continue;
            }
            cur.push(ins);
            rec(pool, i, n - 1, budget - w, min_weight, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(&pool, 0, n, budget, min_weight, &mut Vec::new(), &mut out);
    out
}

/// The series space of a potential: `t_k^α` for `k ≤ trunc.depth` and the
/// target's Novikov variables.
pub fn potential_space(target: &Target, trunc: Truncation) -> Result<SeriesSpace> {
    SeriesSpace::descendants("t", &target.algebra, &novikov_names(target), trunc)
}

/// `F^g = Σ_{n,d} Q^d/n! Σ ⟨τ_{k_1}(α_1)⋯⟩_{g,d} ∏ t^{α_i}_{k_i}`, i.e. the sum
/// over insertion multisets `M` of `⟨M⟩ Q^d t^M / ∏ mult!`, in `space`.
pub fn genus_potential(table: &CorrelatorTable, genus: u32, space: &SeriesSpace) -> Result<TruncatedSeries> {
    let target = table.target();
    let alg = &target.algebra;
    let trunc = space.trunc();
    let qnames = novikov_names(target);
    let mut out = TruncatedSeries::zero(space);
    let var_index = |ins: &Insertion| space.index_of(&descendant_name("t", ins.k, ins.class, alg));
    for dsum in 0..=trunc.deg {
        for d in crate::correlators::degree_vectors(target.novikov_rank(), dsum) {
            for n in 0..=(trunc.deg - dsum) as usize {
                // maps of positive degree are stable for every n
                if dsum == 0 && 2 * genus as i64 - 2 + n as i64 <= 0 {
                    continue;
                }
                let vdim = target.virtual_dimension(genus, n, &d);
                if vdim < 0 {
                    continue;
                }
                for ins in insertion_multisets(n, vdim, trunc.depth, alg) {
                    let key = CorrelatorKey::new(genus, ins, d.clone());
                    let value = table.get(&key)?;
                    if value.is_zero() {
                        continue;
                    }
                    let mut exps = vec![0u16; space.nvars()];
                    for i in &key.insertions {
                        exps[var_index(i)?] += 1;
                    }
                    for (q, &e) in qnames.iter().zip(&d) {
                        exps[space.index_of(q)?] += e as u16;
                    }
                    out.add_term(Monomial::from_exponents(&exps, 0), value / key.automorphisms());
                }
            }
        }
    }
    Ok(out)
}

/// `𝒟 = exp(Σ_{g ≤ G} ħ^{g−1} F^g)` with `G = trunc.genus()`.
pub fn assemble_potential(table: &CorrelatorTable, trunc: Truncation) -> Result<GenusExpandedPotential> {
    if trunc.genus() < 0 {
        return Err(Error::Config("potential needs genus bound ≥ 0".into()));
    }
    let space = potential_space(table.target(), Truncation { hbar: 0, ..trunc })?;
    let genera = (0..=trunc.genus() as u32)
        .map(|g| genus_potential(table, g, &space))
        .collect::<Result<Vec<_>>>()?;
    GenusExpandedPotential::new(genera)
}

/// `(l̂_n − δ_{n,0}/16) 𝒟 / 𝒟`, with the operator taken at the potential's depth.
pub fn constraint_residual(n: i32, pot: &GenusExpandedPotential) -> Result<TruncatedSeries> {
    apply(&virasoro_constraint(n, pot.space().trunc().depth)?, pot)
}

/// Internal bounds used by [`solve_virasoro`] so that every requested entry
/// is determined: genus `g` is solved up to `deg + (G − g)` points, which is
/// what the `ħ ∂∂` terms consume from lower genus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverPlan {
    pub max_genus: u32,
    pub max_points: usize,
    pub max_psi: u32,
    pub potential: Truncation,
}

impl SolverPlan {
    pub fn new(max_genus: u32, max_points: usize, max_psi: u32) -> Self {
        let top = max_points + max_genus as usize;
        let depth = (3 * max_genus as i64 - 3 + top as i64).max(1) as u32;
        SolverPlan {
            max_genus,
            max_points,
            max_psi,
            potential: Truncation::with_genus(top as u32 + 1, depth, max_genus),
        }
    }

    fn points_for(&self, genus: u32) -> usize {
        self.max_points + (self.max_genus - genus) as usize
    }
}

/// Genus-zero point correlators with up to `degree + 1` points: enough for
/// cone computations whose coefficients have degree `≤ degree`.
pub fn genus0_point_table(degree: u32) -> Result<CorrelatorTable> {
    let points = degree as usize + 1;
    solve_virasoro(0, points, points as u32)
}

/// Fills every point-target correlator with `g ≤ max_genus`,
/// `n ≤ max_points` and all `k ≤ max_psi` from the Virasoro constraints and
/// `⟨τ_0³⟩_0 = 1`.
///
/// Correlators are processed by `2g − 2 + n`. For `⟨τ_k τ_R⟩_g` with `k ≥ 1`
/// maximal, the coefficient of `ħ^{g−1} t^R` in `(l̂_{k−1} − δ/16)𝒟/𝒟`
/// reads `c ⟨τ_k τ_R⟩_g / aut(R) + (known terms) = 0`, where `c` is the
/// coefficient of `∂_k` in `l̂_{k−1}`.
pub fn solve_virasoro(max_genus: u32, max_points: usize, max_psi: u32) -> Result<CorrelatorTable> {
    let plan = SolverPlan::new(max_genus, max_points, max_psi);
    let work_cov = Coverage {
        max_genus,
        max_points: plan.points_for(0),
        max_psi: None,
        max_degree: 0,
    };
    let mut table = CorrelatorTable::new(Target::point(), work_cov);
    table.insert(CorrelatorKey::point(0, &[0, 0, 0]), Scalar::one())?;
    let depth = plan.potential.depth;
    let ops: Vec<DiffOperator> = (0..depth as i32)
        .map(|m| virasoro_constraint(m, depth))
        .collect::<Result<_>>()?;
    let space = potential_space(
        &Target::point(),
        Truncation {
            hbar: 0,
            ..plan.potential
        },
    )?;

    let max_level = (0..=max_genus)
        .map(|g| 2 * g as usize + plan.points_for(g) - 2)
        .max()
        .unwrap_or(1);
    for level in 1..=max_level {
        let mut unknowns: Vec<(u32, Vec<u32>)> = Vec::new();
        for g in 0..=max_genus {
            let Some(n) = (level + 2).checked_sub(2 * g as usize) else {
                continue;
            };
            if n == 0 || n > plan.points_for(g) {
                continue;
            }
            let total = 3 * g as i64 - 3 + n as i64;
            if total < 0 {
                continue;
            }
            for ks in crate::correlators::sorted_compositions(n, total as u32, total as u32) {
                if g == 0 && n == 3 {
                    continue;
                }
                unknowns.push((g, ks));
            }
        }
        if unknowns.is_empty() {
            continue;
        }
        // only lower levels are in the table at this point
        let known = assemble_known(&table, &space, max_genus)?;
        let mut residuals: HashMap<usize, TruncatedSeries> = HashMap::new();
        let mut solved = Vec::new();
        for (g, ks) in unknowns {
            let k = *ks.last().expect("stable");
            if k == 0 {
                // all-τ_0 correlators beyond ⟨τ_0³⟩_0 violate the dimension constraint
                return Err(Error::UnderDetermined(format!("⟨τ_0^{}⟩_{g}", ks.len())));
            }
            let m = (k - 1) as usize;
            let op = &ops[m];
            let lead_var = space.index_of(&descendant_name("t", k, 0, &FrobeniusAlgebra::point()))?;
            let lead = op
                .terms()
                .find(|(d, _)| d.order() == 1 && d.indices().next() == Some(lead_var))
                .map(|(_, c)| c.constant_term())
                .unwrap_or_else(Scalar::zero);
            if lead.is_zero() {
                return Err(Error::UnderDetermined(format!("no ∂_{k} term in l̂_{m}")));
            }
            if let Entry::Vacant(slot) = residuals.entry(m) {
                slot.insert(apply(op, &known)?);
            }
            let r = &residuals[&m];
            let rest = &ks[..ks.len() - 1];
            let mut exps = vec![0u16; r.space().nvars()];
            for &j in rest {
                exps[j as usize] += 1;
            }
            let coeff = r.coefficient(&Monomial::from_exponents(&exps, g as i32 - 1));
            let value = -(coeff * multiplicity_factorials(rest)) / lead;
            solved.push((CorrelatorKey::point(g, &ks), value));
        }
        for (key, value) in solved {
            table.insert(key, value)?;
        }
    }
    Ok(table.restricted(Coverage {
        max_genus,
        max_points,
        max_psi: Some(max_psi),
        max_degree: 0,
    }))
}

fn assemble_known(table: &CorrelatorTable, space: &SeriesSpace, max_genus: u32) -> Result<GenusExpandedPotential> {
    let genera = (0..=max_genus)
        .map(|g| {
            let mut f = TruncatedSeries::zero(space);
            for (key, v) in table.entries().filter(|(k, _)| k.genus == g) {
                let mut exps = vec![0u16; space.nvars()];
                for i in &key.insertions {
                    exps[i.k as usize] += 1;
                }
                f.add_term(Monomial::from_exponents(&exps, 0), v / &key.automorphisms());
            }
            f
        })
        .collect();
    GenusExpandedPotential::new(genera)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::DvvOracle;

    #[test]
    fn generator_actions() {
        let l = virasoro_generator(-1, (-3, 3)).unwrap();
        assert_eq!(
            l.image(2, 0).unwrap(),
            &HElement::from_scalars(&FrobeniusAlgebra::point(), &[(1, 0, Scalar::one())])
        );
        let l0 = virasoro_generator(0, (-3, 3)).unwrap();
        assert_eq!(
            l0.image(3, 0).unwrap().coefficient(3, 0).as_scalar(),
            Some(Scalar::new(7, 2))
        );
        let l2 = virasoro_generator(2, (-3, 3)).unwrap();
        assert_eq!(
            l2.image(0, 0).unwrap().coefficient(2, 0).as_scalar(),
            Some(Scalar::new(15, 8))
        );
        assert!(matches!(
            virasoro_generator(4, (0, 2)),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn quantized_commutators_are_central_extensions() {
        let depth = 12;
        for m in -1..=3 {
            for n in m + 1..=3 {
                let defect = commutator_defect(m, n, depth).unwrap();
                let edge = depth as i32 - m.abs() - n.abs() - 1;
                let names: Vec<String> = defect.space().names().to_vec();
                let index = |name: &str| name.trim_start_matches("t_").parse::<i32>().unwrap();
                for (d, c) in defect.terms() {
                    let touches_edge = d.indices().any(|i| index(&names[i]) > edge)
                        || c.terms().any(|(mono, _)| {
                            mono.exponents()
                                .iter()
                                .zip(&names)
                                .any(|(&e, v)| e > 0 && index(v) > edge)
                        });
                    if !touches_edge {
                        assert_eq!(d.order(), 0, "[l_{m}, l_{n}]");
                        assert!(
                            c.terms().all(|(mono, _)| mono.degree() == 0 && mono.hbar() == 0),
                            "[l_{m}, l_{n}]"
                        );
                    }
                }
                let c = central_constant(m, n).unwrap();
                println!("[l_{m}, l_{n}] - ({}) l_{} = {c}", n - m, m + n);
            }
        }
    }

    #[test]
    fn string_hamiltonian_matches_closed_form() {
        assert_eq!(virasoro_hamiltonian(-1, 5).unwrap(), closed_form_hamiltonian(-1, 5));
        assert_eq!(virasoro_hamiltonian(0, 5).unwrap(), closed_form_hamiltonian(0, 5));
    }

    #[test]
    fn pp_terms_are_half_the_ordered_sum() {
        for n in 1..=3 {
            let h = virasoro_hamiltonian(n, 6).unwrap();
            let c = closed_form_hamiltonian(n, 6);
            for l in 0..n {
                let (a, b) = (Coord::p(l as u32), Coord::p((n - 1 - l) as u32));
                assert_eq!(h.coefficient(a, b) * Scalar::from_int(2), c.coefficient(a, b));
            }
            for k in 0..=6u32 {
                for j in 0..=6u32 {
                    let (a, b) = (Coord::q(k), Coord::p(j));
                    assert_eq!(h.coefficient(a, b), c.coefficient(a, b));
                }
            }
        }
        assert_eq!(
            virasoro_hamiltonian(1, 4)
                .unwrap()
                .coefficient(Coord::p(0), Coord::p(0)),
            Scalar::new(-1, 8)
        );
    }

    #[test]
    fn operators_for_nonnegative_n_match_closed_form() {
        for n in 0..=3 {
            assert_eq!(
                quantized_virasoro(n, 6).unwrap(),
                closed_form_operator(n, 6).unwrap(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn string_operator_differs_only_in_quadratic_sign() {
        let op = quantized_virasoro(-1, 5).unwrap();
        let cf = closed_form_operator(-1, 5).unwrap();
        let diff = op.try_sub(&cf).unwrap();
        let sp = op.space().clone();
        let expected =
            DiffOperator::multiplication(TruncatedSeries::monomial(&sp, &[("t_0", 2)], -1, -Scalar::one()).unwrap());
        assert_eq!(diff, expected);
    }

    #[test]
    fn n1_hbar_coefficient() {
        let op = quantized_virasoro(1, 4).unwrap();
        let c = op.coefficient(&["t_0", "t_0"]).unwrap();
        let sp = op.space().clone();
        assert_eq!(c, TruncatedSeries::monomial(&sp, &[], 1, Scalar::new(-1, 8)).unwrap());
        let lead = quantized_virasoro(0, 4).unwrap().coefficient(&["t_1"]).unwrap();
        assert_eq!(lead.constant_term(), Scalar::new(3, 2));
    }

    #[test]
    fn lowest_genus_one_value() {
        let table = solve_virasoro(1, 1, 2).unwrap();
        assert_eq!(table.point(1, &[1]).unwrap(), Scalar::new(1, 24));
    }

    #[test]
    fn solver_agrees_with_dvv_small() {
        let table = solve_virasoro(2, 4, 10).unwrap();
        let mut dvv = DvvOracle::new();
        for g in 0..=2u32 {
            for n in 1..=4usize {
                if 2 * g as i64 - 2 + n as i64 <= 0 {
                    continue;
                }
                let total = 3 * g as i64 - 3 + n as i64;
                for ks in crate::correlators::sorted_compositions(n, total as u32, total as u32) {
                    assert_eq!(
                        table.point(g, &ks).unwrap(),
                        dvv.correlator(g, &ks).unwrap(),
                        "g={g} {ks:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn assembled_examples() {
        let table = solve_virasoro(1, 4, 4).unwrap();
        let pot = assemble_potential(&table, Truncation::with_genus(3, 0, 0)).unwrap();
        let sp = pot.genus(0).unwrap().space().clone();
        assert_eq!(
            pot.genus(0).unwrap(),
            &TruncatedSeries::monomial(&sp, &[("t_0", 3)], 0, Scalar::new(1, 6)).unwrap()
        );
        let pot = assemble_potential(&table, Truncation::with_genus(1, 1, 1)).unwrap();
        let sp = pot.genus(0).unwrap().space().clone();
        assert_eq!(
            pot.genus(1).unwrap(),
            &TruncatedSeries::monomial(&sp, &[("t_1", 1)], 0, Scalar::new(1, 24)).unwrap()
        );
        let empty = CorrelatorTable::empty(Target::point());
        let pot = assemble_potential(&empty, Truncation::with_genus(4, 2, 1)).unwrap();
        assert!(pot.log().is_zero());
    }

    #[test]
    fn constraints_hold_small() {
        let table = solve_virasoro(1, 5, 10).unwrap();
        let pot = assemble_potential(&table, Truncation::with_genus(5, 5, 1)).unwrap();
        for n in -1..=3 {
            let r = constraint_residual(n, &pot).unwrap();
            assert!(r.is_zero(), "n = {n}: {r}");
        }
    }
}
