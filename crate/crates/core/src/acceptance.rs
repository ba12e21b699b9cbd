//! The acceptance suite, shared by the integration test and `gwcone selftest`.
//!
//! Every criterion is an exact identity; the time budget is part of the
//! verdict and is reported next to the measured time.

use std::fmt;
use std::time::{Duration, Instant};

use crate::cone::{check_on_cone, cone_point, euler_residual, genus0_potential, genus0_potential_t, ConeTruncation};
use crate::correlators::sorted_compositions;
use crate::error::Result;
use crate::frobenius::FrobeniusAlgebra;
use crate::hspace::{from_darboux, omega, to_darboux, HElement};
use crate::localization::{ev_infty_push, theorem1_verify};
use crate::oracle::{DvvOracle, StringOracle};
use crate::sampling;
use crate::scalar::Scalar;
use crate::series::{SeriesSpace, TruncatedSeries, Truncation};
use crate::virasoro::{
    assemble_potential, closed_form_hamiltonian, closed_form_operator, constraint_residual, genus0_point_table,
    quantized_virasoro, solve_virasoro, virasoro_generator, virasoro_hamiltonian,
};

#[derive(Clone, Debug)]
pub struct AcceptanceConfig {
    /// Genus bound for the constraint and oracle criteria.
    pub max_genus: u32,
    /// Total `t`-degree bound for the constraint and oracle criteria.
    pub max_degree: u32,
    pub cone_degree: u32,
    pub cone_depth: u32,
    pub zdepth: u32,
    pub cone_samples: usize,
    pub kernel_samples: usize,
    pub seed: u64,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        AcceptanceConfig {
            max_genus: 3,
            max_degree: 8,
            cone_degree: 6,
            cone_depth: 4,
            zdepth: 5,
            cone_samples: 20,
            kernel_samples: 100,
            seed: 20240611,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub identity_holds: bool,
    pub elapsed: Duration,
    pub budget: Duration,
    pub detail: String,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.identity_holds && self.elapsed <= self.budget
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} criterion {}: {} [exact; {:.2}s of {}s budget] {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

fn timed(id: u32, name: &'static str, budget_secs: u64, f: impl FnOnce() -> Result<(bool, String)>) -> CriterionResult {
    let start = Instant::now();
    let (identity_holds, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id,
        name,
        identity_holds,
        elapsed: start.elapsed(),
        budget: Duration::from_secs(budget_secs),
        detail,
    }
}

/// Hamiltonians and operators of `l_{−1}..l_3` against their closed forms.
pub fn criterion_1() -> CriterionResult {
    timed(1, "Virasoro operators match the closed-form displays", 1, || {
        let depth = 8;
        let pt = FrobeniusAlgebra::point();
        let mut problems = Vec::new();
        for n in -1..=3 {
            let h = virasoro_hamiltonian(n, depth)?;
            for (a, b, x, y) in h.differences(&closed_form_hamiltonian(n, depth)) {
                problems.push(format!(
                    "h(l_{n}) {}*{}: computed {x}, display {y}",
                    a.name(&pt),
                    b.name(&pt)
                ));
            }
            let op = quantized_virasoro(n, depth)?;
            let diff = op.try_sub(&closed_form_operator(n, depth)?)?;
            if !diff.is_zero() {
                problems.push(format!("l̂_{n}: computed minus display = {diff}"));
            }
        }
        let ok = problems.is_empty();
        let detail = if ok {
            "5 Hamiltonians and 5 operators agree".to_string()
        } else {
            format!("{} discrepancies; {}", problems.len(), problems.join("; "))
        };
        Ok((ok, detail))
    })
}

/// `(l̂_n − δ_{n,0}/16)𝒟 = 0` for `−1 ≤ n ≤ 4`.
pub fn criterion_2(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(2, "Virasoro constraints annihilate the assembled potential", 60, || {
        let g = cfg.max_genus;
        let d = cfg.max_degree;
        let depth = (3 * g as i64 - 3 + d as i64).max(1) as u32;
        let table = solve_virasoro(g, d as usize, depth)?;
        let pot = assemble_potential(&table, Truncation::with_genus(d, depth, g))?;
        let mut bad = Vec::new();
        let mut checked = 0;
        for n in -1..=4 {
            let r = constraint_residual(n, &pot)?;
            checked += 1;
            if !r.is_zero() {
                bad.push(format!("n = {n}: {} nonzero terms, e.g. {}", r.len(), first_terms(&r)));
            }
        }
        let detail = if bad.is_empty() {
            format!(
                "{checked} constraints vanish through genus {g}, degree {d} ({} correlators)",
                table.len()
            )
        } else {
            bad.join("; ")
        };
        Ok((bad.is_empty(), detail))
    })
}

fn first_terms(s: &TruncatedSeries) -> String {
    let text = s.to_string();
    match text.char_indices().nth(120) {
        Some((i, _)) => format!("{}...", &text[..i]),
        None => text,
    }
}

/// Solver against DVV and the string recursion.
pub fn criterion_3(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(
        3,
        "Virasoro solver agrees with DVV and the string recursion",
        30,
        || {
            let gmax = cfg.max_genus;
            let kmax = cfg.max_degree;
            let nmax = cfg.max_degree as usize;
            let table = solve_virasoro(gmax, nmax, kmax)?;
            let mut dvv = DvvOracle::new();
            let mut string = StringOracle::new();
            let mut compared = 0;
            let mut bad = Vec::new();
            for g in 0..=gmax {
                for n in 1..=nmax {
                    let total = 3 * g as i64 - 3 + n as i64;
                    if 2 * g as i64 - 2 + n as i64 <= 0 || total < 0 || total > kmax as i64 {
                        continue;
                    }
                    for ks in sorted_compositions(n, total as u32, total as u32) {
                        let engine = table.point(g, &ks)?;
                        let oracle = dvv.correlator(g, &ks)?;
                        compared += 1;
                        if engine != oracle {
                            bad.push(format!("g={g} {ks:?}: solver {engine}, DVV {oracle}"));
                        }
                        if g == 0 {
                            let s = string.correlator(&ks)?;
                            if s != oracle {
                                bad.push(format!("g=0 {ks:?}: string {s}, DVV {oracle}"));
                            }
                        }
                    }
                }
            }
            let spots = [
                (0u32, vec![0u32, 0, 0], Scalar::one()),
                (1, vec![1], Scalar::new(1, 24)),
                (2, vec![4], Scalar::new(1, 1152)),
            ];
            for (g, ks, want) in spots {
                if g > gmax {
                    continue;
                }
                let got = table.point(g, &ks)?;
                if got != want {
                    bad.push(format!("spot g={g} {ks:?}: {got}, expected {want}"));
                }
            }
            let detail = if bad.is_empty() {
                format!("{compared} correlators agree (g ≤ {gmax}, Σk ≤ {kmax}, n ≤ {nmax}); spot values hold")
            } else {
                bad.join("; ")
            };
            Ok((bad.is_empty(), detail))
        },
    )
}

/// Antisymmetry, polarization, Darboux round trip and symplecticity of `l_n`.
pub fn criterion_4(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(4, "Symplectic kernel properties", 10, || {
        let mut rng = sampling::rng(cfg.seed ^ 0x5eed_0004);
        let algebras = [FrobeniusAlgebra::point(), FrobeniusAlgebra::projective_line()];
        let scalars = SeriesSpace::scalars();
        let mut bad = Vec::new();
        for i in 0..cfg.kernel_samples {
            let alg = &algebras[i % 2];
            let f = sampling::random_element(&mut rng, alg, (-4, 4));
            let g = sampling::random_element(&mut rng, alg, (-4, 4));
            if omega(&f, &g)? != -omega(&g, &f)? {
                bad.push(format!("sample {i}: Ω not antisymmetric"));
            }
            if !omega(&f.plus_part(), &g.plus_part())?.is_zero() || !omega(&f.minus_part(), &g.minus_part())?.is_zero()
            {
                bad.push(format!("sample {i}: H± not isotropic"));
            }
            let (df, dg) = (to_darboux(&f), to_darboux(&g));
            if from_darboux(&df, alg, &scalars)? != f {
                bad.push(format!("sample {i}: Darboux round trip"));
            }
            if df.pairing(&dg)?.constant_term() != omega(&f, &g)? {
                bad.push(format!("sample {i}: Darboux pairing differs from Ω"));
            }
        }
        for n in -1..=3 {
            let l = virasoro_generator(n, (-6, 6))?;
            let defects = l.symplectic_defects()?;
            if !defects.is_empty() {
                bad.push(format!("l_{n}: {} symplecticity defects", defects.len()));
            }
        }
        let detail = if bad.is_empty() {
            format!("{} random pairs and l_-1..l_3 on z^-6..z^6", cfg.kernel_samples)
        } else {
            bad.join("; ")
        };
        Ok((bad.is_empty(), detail))
    })
}

/// `[l_m, l_n]` against `c · l_{m+n}` on window-interior vectors; returns
/// (pairs agreeing, vectors compared, first disagreement).
pub fn witt_check(coefficient: impl Fn(i32, i32) -> i32) -> Result<(usize, usize, Option<String>)> {
    let window = (-8, 8);
    let mut agreeing = 0;
    let mut compared = 0;
    let mut first = None;
    for m in -1..=3 {
        for n in (m + 1)..=3 {
            let lm = virasoro_generator(m, window)?;
            let ln = virasoro_generator(n, window)?;
            let bracket = lm.commutator(&ln)?;
            let rhs = virasoro_generator(m + n, window)?.scale(&Scalar::from_int(coefficient(m, n) as i64));
            let common = bracket.domain().filter(|&(k, mu)| rhs.image(k, mu).is_some()).count();
            let bad = bracket.mismatches(&rhs);
            compared += common;
            if bad.is_empty() && common > 0 {
                agreeing += 1;
            } else if first.is_none() {
                let (k, _) = bad.first().copied().unwrap_or((0, 0));
                first = Some(format!(
                    "[l_{m}, l_{n}] on z^{k}: {} vs {}·l_{}",
                    bracket.image(k, 0).map(|e| e.to_string()).unwrap_or_default(),
                    coefficient(m, n),
                    m + n
                ));
            }
        }
    }
    Ok((agreeing, compared, first))
}

/// `[l_m, l_n] = (m − n) l_{m+n}`, `−1 ≤ m < n ≤ 3`.
pub fn criterion_5() -> CriterionResult {
    timed(5, "Witt relations [l_m, l_n] = (m-n) l_{m+n}", 5, || {
        let (agree, compared, first) = witt_check(|m, n| m - n)?;
        let (agree_rev, _, _) = witt_check(|m, n| n - m)?;
        let ok = agree == 10;
        let detail = format!(
            "{agree}/10 pairs hold as stated over {compared} vectors{}; with (n-m) instead: {agree_rev}/10",
            first.map(|s| format!(", first failure {s}")).unwrap_or_default()
        );
        Ok((ok, detail))
    })
}

fn cone_inputs(cfg: &AcceptanceConfig) -> Result<Vec<HElement>> {
    let mut rng = sampling::rng(cfg.seed ^ 0x5eed_0006);
    let space = sampling::parameter_space(3, cfg.cone_degree)?;
    let alg = FrobeniusAlgebra::point();
    Ok((0..cfg.cone_samples)
        .map(|_| sampling::random_plus_element(&mut rng, &alg, &space, cfg.cone_depth))
        .collect())
}

fn cone_table(cfg: &AcceptanceConfig) -> Result<crate::correlators::CorrelatorTable> {
    genus0_point_table(cfg.cone_degree)
}

/// `check_on_cone(cone_point(t))` for random `t`, and the Euler identity.
pub fn criterion_6(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(6, "Cone points satisfy the graph property", 30, || {
        let table = cone_table(cfg)?;
        let trunc = ConeTruncation::new(cfg.cone_depth, cfg.zdepth);
        let mut bad = Vec::new();
        let mut coords = 0;
        let mut minus_terms = 0;
        for (i, t) in cone_inputs(cfg)?.iter().enumerate() {
            let j = cone_point(t, &table, trunc)?;
            minus_terms +=
                j.j.minus_part()
                    .components()
                    .flat_map(|(_, row)| row.iter().map(|c| c.len()))
                    .sum::<usize>();
            let c = check_on_cone(&j.j, &table, trunc)?;
            coords += c.checked;
            if !c.on_cone {
                bad.push(format!("sample {i}: {:?}", c.first_failure));
            }
        }
        let depth = cfg.cone_depth.max(cfg.zdepth);
        let f0 = genus0_potential_t(&table, Truncation::new(cfg.cone_degree + 1, depth))?;
        let euler = euler_residual(&f0, &FrobeniusAlgebra::point())?;
        if !euler.is_zero() {
            bad.push(format!("Euler residual {}", first_terms(&euler)));
        }
        let detail = if bad.is_empty() {
            format!(
                "{} samples, {coords} p-coordinates, {minus_terms} terms in the H- parts; Σq∂F⁰/∂q = 2F⁰ through degree {}",
                cfg.cone_samples, cfg.cone_degree
            )
        } else {
            bad.join("; ")
        };
        Ok((bad.is_empty(), detail))
    })
}

/// `ev_∞` pushforward against `cone_point`, with the exceptional loci
/// contributing exactly `t − z`.
pub fn criterion_7(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(7, "Localization pushforward equals the cone point", 60, || {
        let table = cone_table(cfg)?;
        let trunc = ConeTruncation::new(cfg.cone_depth, cfg.zdepth);
        let mut bad = Vec::new();
        for (i, t) in cone_inputs(cfg)?.iter().enumerate() {
            let r = theorem1_verify(t, &table, trunc)?;
            if !r.holds {
                bad.push(format!(
                    "sample {i}: mismatch {:?}, exceptional {:?}, on cone {}",
                    r.mismatch, r.exceptional_mismatch, r.cone.on_cone
                ));
            }
        }
        let detail = if bad.is_empty() {
            format!("{} samples agree; exceptional loci sum to t - z", cfg.cone_samples)
        } else {
            bad.join("; ")
        };
        Ok((bad.is_empty(), detail))
    })
}

/// `t = t_0`: the `z^{−1}` coefficient is `−t_0²/2` on both sides and
/// `p_0 = ∂F⁰/∂q_0`.
pub fn criterion_8(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(8, "Closed form at t = t_0", 1, || {
        let table = cone_table(cfg)?;
        let space = SeriesSpace::new(["t_0"], Truncation::new(cfg.cone_degree, 0))?;
        let alg = FrobeniusAlgebra::point();
        let mut t = HElement::zero(&alg, &space);
        t.add_component(0, 0, TruncatedSeries::var(&space, "t_0")?);
        let trunc = ConeTruncation::new(0, cfg.zdepth);
        let want = TruncatedSeries::monomial(&space, &[("t_0", 2)], 0, Scalar::new(-1, 2))?;
        let j = cone_point(&t, &table, trunc)?.j;
        let push = ev_infty_push(&t, &table, trunc)?.total;
        let f0 = genus0_potential(&table, Truncation::new(3, 0))?;
        let dq0 = f0.derive("q_0")?;
        let p0 = to_darboux(&j).p[0][0].clone();
        let dq0_at_t0 = TruncatedSeries::monomial(
            &space,
            &[("t_0", 2)],
            0,
            dq0.coefficient(&crate::cone::monomial_of(dq0.space(), &[("q_0", 2)])?),
        )?;
        let mut bad = Vec::new();
        if j.coefficient(-1, 0) != want {
            bad.push(format!("cone_point z^-1: {}", j.coefficient(-1, 0)));
        }
        if push.coefficient(-1, 0) != want {
            bad.push(format!("ev_infty_push z^-1: {}", push.coefficient(-1, 0)));
        }
        if p0 != dq0_at_t0 || dq0.len() != 1 {
            bad.push(format!("p_0 = {p0}, ∂F⁰/∂q_0 = {dq0}"));
        }
        let detail = if bad.is_empty() {
            "z^-1 coefficient is -1/2*t_0^2 on both sides; p_0 = t_0^2/2 = ∂(q_0^3/6)/∂q_0".to_string()
        } else {
            bad.join("; ")
        };
        Ok((bad.is_empty(), detail))
    })
}

pub fn run_all(cfg: &AcceptanceConfig) -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(cfg),
        criterion_3(cfg),
        criterion_4(cfg),
        criterion_5(),
        criterion_6(cfg),
        criterion_7(cfg),
        criterion_8(cfg),
    ]
}
