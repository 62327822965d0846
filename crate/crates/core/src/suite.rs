//! Reproducibility suite: every published identity as one pass/fail entry.
//!
//! Reports are deterministic for a given `(level, seed)`; timings are left to the caller.

use std::path::PathBuf;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::construct::{
    exponent_data, homogeneous_components, taylor_solution, taylor_solution_factored, ExponentData, FactoredSolution,
    Kappa, ProblemSpec,
};
use crate::curves::{CurveChecker, CurveKind, SurfaceChecker};
use crate::error::{Error, Result};
use crate::ffpoly::{Ambient, Monomial, SparsePoly, Var};
use crate::field::{is_prime, FieldElement, PrimeField};
use crate::fpintegral::{check_integral_theorem_with, integrate_fpk, integrate_grid, power_sum};
use crate::sl2rep::{diagonal_matrix, Generator, HighestWeights, MultiIndex, WeightVector};
use crate::verify::{
    check_cohomology_k1, check_flatness, check_kz, check_kz_factored, check_resonance_linear, check_singular,
    check_ze_resonance, resonance_ell, CheckReport,
};

/// Environment variable holding the worker count for parallel checks.
pub const WORKERS_ENV: &str = "KZMODP_WORKERS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub level: Level,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            level: Level::Quick,
            seed: 42,
            out: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub level: Level,
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

const MAX_FAILURES: usize = 20;

#[derive(Default)]
struct Tally {
    checks: usize,
    failed: usize,
    notes: Vec<String>,
    failures: Vec<String>,
}

impl Tally {
    fn fail(&mut self, msg: String) {
        self.failed += 1;
        if self.failures.len() < MAX_FAILURES {
            self.failures.push(msg);
        }
    }

    fn expect(&mut self, ok: bool, label: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(label());
        }
    }

    fn report(&mut self, label: &str, r: Result<CheckReport>) {
        self.checks += 1;
        match r {
            Ok(r) if r.passed => {}
            Ok(r) => {
                let w = serde_json::to_string(&r.witness).unwrap_or_default();
                self.fail(format!("{label}: {} failed {w}", r.name));
            }
            Err(e) => self.fail(format!("{label}: {e}")),
        }
    }

    fn error(&mut self, label: &str, e: Error) {
        self.checks += 1;
        self.fail(format!("{label}: {e}"));
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    fn finish(mut self, id: u32, name: &'static str) -> CriterionReport {
        if self.failed > self.failures.len() {
            self.failures.push(format!("{} further failures omitted", self.failed - self.failures.len()));
        }
        CriterionReport {
            id,
            name,
            passed: self.failed == 0,
            checks: self.checks,
            notes: self.notes,
            failures: self.failures,
        }
    }
}

pub const CRITERIA: [(u32, &str); 10] = [
    (1, "two-slot m=(2,2) solution at p=3 matches closed form"),
    (2, "kappa=2, p=3 elementary-symmetric family for n=3..8"),
    (3, "Taylor solution sweep passes KZ and singular checks"),
    (4, "n=5, k=2 solution at p=3 and its squared-Vandermonde factor"),
    (5, "k=1 grid-integral identity at p=5,7"),
    (6, "k=2 grid-integral identity at p=7"),
    (7, "curve and surface point-sum identities"),
    (8, "resonance equations"),
    (9, "property suites"),
    (10, "k=1 cohomological identities"),
];

/// Builds the global worker pool from `KZMODP_WORKERS`, once; later calls are no-ops.
pub fn configure_workers() {
    if let Some(n) = std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    configure_workers();
    let criteria: Vec<CriterionReport> = CRITERIA.iter().map(|&(id, _)| run_criterion(id, cfg)).collect();
    SuiteReport {
        level: cfg.level,
        seed: cfg.seed,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}

/// Runs one criterion by number; unknown numbers give a failed entry.
pub fn run_criterion(id: u32, cfg: &SuiteConfig) -> CriterionReport {
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown criterion", |c| c.1);
    let mut t = Tally::default();
    match id {
        1 => closed_form_two_slots(&mut t),
        2 => symmetric_family(&mut t),
        3 => sweep_kz(&mut t, cfg),
        4 => five_points_k2(&mut t),
        5 => grid_integral_k1(&mut t, cfg),
        6 => grid_integral_k2(&mut t, cfg),
        7 => curve_identities(&mut t, cfg),
        8 => resonances(&mut t, cfg),
        9 => properties(&mut t, cfg),
        10 => cohomology(&mut t, cfg),
        _ => t.fail(format!("no criterion {id}")),
    }
    t.finish(id, name)
}

fn rng(cfg: &SuiteConfig, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    r.set_stream(stream);
    r
}

fn problem(p: u64, kappa: &str, m: &[u32], k: u32, q: &[i64], l: &[u32]) -> Result<(ProblemSpec, ExponentData)> {
    let spec = ProblemSpec::new(p, kappa.parse::<Kappa>()?, m.to_vec(), k, q, l)?;
    let exps = exponent_data(&spec, None)?;
    Ok((spec, exps))
}

fn z_linear(amb: Ambient, a: usize, b: usize) -> SparsePoly {
    SparsePoly::linear(amb, 0, &[], &[(a, 1), (b, -1)]).expect("slots in range")
}

fn closed_form_two_slots(t: &mut Tally) {
    let run = || -> Result<bool> {
        let (spec, exps) = problem(3, "4", &[2, 2], 2, &[0, 0], &[1, 1])?;
        let got = taylor_solution(&spec, &exps)?;
        let amb = spec.z_ambient();
        let sq = z_linear(amb, 0, 1).pow(2);
        let expected = WeightVector::from_coords(
            spec.weights().clone(),
            amb,
            [
                (MultiIndex(vec![2, 0]), sq.clone()),
                (MultiIndex(vec![1, 1]), -&sq),
                (MultiIndex(vec![0, 2]), sq),
            ],
        )?;
        Ok(got == expected)
    };
    match run() {
        Ok(ok) => t.expect(ok, || "p=3, kappa=4, m=(2,2): solution differs from (z1-z2)^2 (1, -1, 1)".into()),
        Err(e) => t.error("m=(2,2)", e),
    }
}

/// `e_r` of the variables other than `skip`.
fn elementary_without(amb: Ambient, r: usize, skip: usize) -> SparsePoly {
    let vars: Vec<usize> = (0..amb.n()).filter(|&s| s != skip).collect();
    let mut terms = Vec::new();
    subsets(&vars, r, &mut Vec::new(), &mut |chosen| {
        let mut z = vec![0u32; amb.n()];
        for &s in chosen {
            z[s] = 1;
        }
        terms.push((Monomial::new(&vec![0; amb.k()], &z), 1));
    });
    SparsePoly::from_terms(amb, terms).expect("matching ambient")
}

fn subsets(items: &[usize], r: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == r {
        f(cur);
        return;
    }
    for (i, &x) in items.iter().enumerate() {
        cur.push(x);
        subsets(&items[i + 1..], r, cur, f);
        cur.pop();
    }
}

/// `Π_{a<b}(z_a - z_b) · (e_r(z without z_j))_j` for `m = 1^n`, `k = 1`.
pub fn symmetric_family_member(p: u64, n: usize, r: usize) -> Result<FactoredSolution> {
    let weights = HighestWeights::new(vec![1; n], 1)?;
    let amb = Ambient::new(p, 0, n)?;
    let coords = (0..n).map(|j| {
        let mut unit = vec![0; n];
        unit[j] = 1;
        (MultiIndex(unit), elementary_without(amb, r, j))
    });
    Ok(FactoredSolution {
        prefactor: vec![1; n * (n - 1) / 2],
        reduced: WeightVector::from_coords(weights, amb, coords)?,
    })
}

fn proportional(a: &WeightVector, b: &WeightVector) -> bool {
    let f = a.field();
    (1..f.p()).any(|c| &a.scale(c) == b)
}

fn symmetric_family(t: &mut Tally) {
    for n in 3..=8usize {
        for r in (0..n).filter(|r| r % 3 == n % 3) {
            let label = format!("n={n}, r={r}");
            let run = |t: &mut Tally| -> Result<()> {
                let (spec, exps) = problem(3, "2", &vec![1; n], 1, &[0], &[1])?;
                let member = symmetric_family_member(3, n, r)?;
                t.expect(member.prefactor == exps.mij, || format!("{label}: prefactor exponents {:?}", exps.mij));
                t.report(&format!("{label} kz"), check_kz_factored(&member, &spec));
                t.report(&format!("{label} singular"), check_singular(&member.reduced));
                let l = ((n - r) / 3) as u32;
                for q in 0..3i64 {
                    let s = spec.with_cycle(&[q], &[l])?;
                    let sol = taylor_solution_factored(&s, &exps)?;
                    let found = sol
                        .homogeneous_components()
                        .iter()
                        .any(|c| proportional(&c.reduced, &member.reduced));
                    t.expect(found, || format!("{label}: not a component of the q={q}, l={l} Taylor solution"));
                }
                Ok(())
            };
            if let Err(e) = run(t) {
                t.error(&label, e);
            }
        }
    }
}

/// One tuple of the sweep grid.
#[derive(Clone, Debug)]
pub struct SweepTuple {
    pub p: u64,
    pub kappa: &'static str,
    pub m: Vec<u32>,
    pub k: u32,
    pub q: Vec<i64>,
    pub l: Vec<u32>,
}

impl SweepTuple {
    fn label(&self) -> String {
        format!(
            "p={} kappa={} m={:?} k={} q={:?} l={:?}",
            self.p, self.kappa, self.m, self.k, self.q, self.l
        )
    }
}

/// `p ∈ {3,5,7}`, nine weight vectors with `n ≤ 5` and `m_s ≤ 2`, `k ∈ {1,2}`,
/// `κ ∈ {2,4}`, and `(q, l) ∈ {(0,1), (1,1), (0,(2,1,..))}`; `Full` adds `κ = 8` and `q = 2`.
pub fn sweep_grid(level: Level) -> Vec<SweepTuple> {
    let ms: [&[u32]; 9] = [
        &[1, 1],
        &[1, 2],
        &[2, 2],
        &[1, 1, 1],
        &[2, 1, 1],
        &[1, 2, 2],
        &[1, 1, 1, 1],
        &[2, 1, 1, 1],
        &[1, 1, 1, 1, 1],
    ];
    let (kappas, cycles): (&[&str], &[(i64, u32)]) = match level {
        Level::Quick => (&["2", "4"], &[(0, 1), (1, 1), (0, 2)]),
        Level::Full => (&["2", "4", "8"], &[(0, 1), (1, 1), (2, 1), (0, 2)]),
    };
    let mut out = Vec::new();
    for p in [3, 5, 7] {
        for m in ms {
            for k in 1..=2u32 {
                for &kappa in kappas {
                    for &(q, l0) in cycles {
                        let mut l = vec![1; k as usize];
                        l[0] = l0;
                        out.push(SweepTuple {
                            p,
                            kappa,
                            m: m.to_vec(),
                            k,
                            q: vec![q; k as usize],
                            l,
                        });
                    }
                }
            }
        }
    }
    out
}

type Solved = Result<(ProblemSpec, ExponentData, FactoredSolution)>;

fn sweep_solutions(level: Level) -> Vec<(SweepTuple, Solved)> {
    sweep_grid(level)
        .into_par_iter()
        .map(|tu| {
            let sol = problem(tu.p, tu.kappa, &tu.m, tu.k, &tu.q, &tu.l).and_then(|(spec, exps)| {
                let sol = taylor_solution_factored(&spec, &exps)?;
                Ok((spec, exps, sol))
            });
            (tu, sol)
        })
        .collect()
}

fn sweep_kz(t: &mut Tally, cfg: &SuiteConfig) {
    let sols = sweep_solutions(cfg.level);
    let reports: Vec<(String, Result<CheckReport>, Result<CheckReport>, bool)> = sols
        .into_par_iter()
        .map(|(tu, r)| {
            let label = tu.label();
            match r {
                Ok((spec, _, sol)) => {
                    let kz = check_kz_factored(&sol, &spec);
                    let sing = check_singular(&sol.reduced);
                    (label, kz, sing, !sol.reduced.is_zero())
                }
                Err(e) => (label, Err(e), Ok(CheckReport::pass("singular")), false),
            }
        })
        .collect();
    let nonzero = reports.iter().filter(|r| r.3).count();
    t.note(format!("{} tuples, {} with a nonzero solution", reports.len(), nonzero));
    for (label, kz, sing, _) in reports {
        t.report(&label, kz);
        t.report(&label, sing);
    }
}

fn five_points_k2(t: &mut Tally) {
    let run = |t: &mut Tally| -> Result<()> {
        let (spec, exps) = problem(3, "4", &[1; 5], 2, &[0, 0], &[4, 3])?;
        let sol = taylor_solution_factored(&spec, &exps)?;
        let amb = spec.z_ambient();
        t.expect(sol.prefactor.iter().all(|&e| e == 2), || {
            format!("prefactor exponents {:?}, expected all 2", sol.prefactor)
        });
        let printed = WeightVector::from_coords(
            spec.weights().clone(),
            amb,
            spec.weights().basis().into_iter().map(|j| {
                let outside: Vec<(usize, i64)> = (0..5).filter(|&s| j.0[s] == 0).map(|s| (s, -1)).collect();
                let poly = SparsePoly::linear(amb, 0, &[], &outside).expect("slots in range");
                (j, poly)
            }),
        )?;
        t.expect(sol.reduced == printed, || {
            "reduced coordinates differ from -(sum of z_s outside supp J)".into()
        });
        t.report("factored kz", check_kz_factored(&sol, &spec));
        t.report("singular", check_singular(&sol.reduced));
        let full = sol.expand()?;
        t.report("expanded kz", check_kz(&full, &spec));
        t.report("expanded singular", check_singular(&full));
        let bare = FactoredSolution {
            prefactor: vec![0; sol.prefactor.len()],
            reduced: printed,
        };
        let bare_passes = check_kz_factored(&bare, &spec)?.passed;
        t.note(format!(
            "coordinates are prod_(a<b) (z_a - z_b)^2 times the linear forms; the linear forms alone {} KZ",
            if bare_passes { "also satisfy" } else { "do not satisfy" }
        ));
        Ok(())
    };
    if let Err(e) = run(t) {
        t.error("n=5, k=2", e);
    }
}

/// Every ordered `n`-tuple of distinct elements of `F_p`.
pub fn ordered_distinct(p: u64, n: usize) -> Vec<Vec<FieldElement>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(p: u64, n: usize, cur: &mut Vec<FieldElement>, out: &mut Vec<Vec<FieldElement>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for x in 0..p {
            if !cur.contains(&x) {
                cur.push(x);
                rec(p, n, cur, out);
                cur.pop();
            }
        }
    }
    rec(p, n, &mut cur, &mut out);
    out
}

fn sampled_distinct(rng: &mut ChaCha8Rng, p: u64, n: usize, count: usize) -> Vec<Vec<FieldElement>> {
    (0..count)
        .map(|_| sample(rng, p as usize, n).into_iter().map(|x| x as u64).collect())
        .collect()
}

fn integral_over_all(t: &mut Tally, label: &str, spec: &ProblemSpec, exps: &ExponentData) {
    let sol = match taylor_solution_factored(spec, exps) {
        Ok(s) => s,
        Err(e) => return t.error(label, e),
    };
    let reports: Vec<(Vec<FieldElement>, Result<CheckReport>)> = ordered_distinct(spec.p(), spec.n())
        .into_par_iter()
        .map(|x| {
            let r = check_integral_theorem_with(&sol, spec, exps, &x);
            (x, r)
        })
        .collect();
    for (x, r) in reports {
        t.report(&format!("{label} x={x:?}"), r);
    }
}

fn grid_integral_k1(t: &mut Tally, cfg: &SuiteConfig) {
    let qs: &[i64] = match cfg.level {
        Level::Quick => &[0, 1],
        Level::Full => &[0, 1, 2, 3],
    };
    for p in [5, 7] {
        for &q in qs {
            let label = format!("p={p} q={q}");
            match problem(p, "2", &[1, 1, 1], 1, &[q], &[1]) {
                Ok((spec, exps)) => integral_over_all(t, &label, &spec, &exps),
                Err(e) => t.error(&label, e),
            }
        }
    }
}

fn grid_integral_k2(t: &mut Tally, cfg: &SuiteConfig) {
    let qs: &[[i64; 2]] = match cfg.level {
        Level::Quick => &[[0, 0], [1, 3]],
        Level::Full => &[[0, 0], [1, 3], [2, 2], [6, 5]],
    };
    for q in qs {
        let label = format!("p=7 q={q:?}");
        match problem(7, "4", &[2, 2], 2, q, &[1, 1]) {
            Ok((spec, exps)) => integral_over_all(t, &label, &spec, &exps),
            Err(e) => t.error(&label, e),
        }
    }
}

fn tuples_for(cfg: &SuiteConfig, stream: u64, p: u64, n: usize) -> Vec<Vec<FieldElement>> {
    let exhaustive_up_to = match cfg.level {
        Level::Quick => 7,
        Level::Full => 11,
    };
    if p <= exhaustive_up_to {
        ordered_distinct(p, n)
    } else {
        sampled_distinct(&mut rng(cfg, stream), p, n, 50)
    }
}

fn curve_identities(t: &mut Tally, cfg: &SuiteConfig) {
    let plan: [(CurveKind, &[u64]); 4] = [
        (CurveKind::Elliptic, &[5, 7, 11]),
        (CurveKind::Quartic, &[7, 11]),
        (CurveKind::Cubic3, &[7, 13]),
        (CurveKind::Genus2, &[7, 13]),
    ];
    let mut stream = 0;
    for (kind, primes) in plan {
        for &p in primes {
            stream += 1;
            let label = format!("{kind} p={p}");
            let checker = match CurveChecker::new(kind, p) {
                Ok(c) => c,
                Err(e) => {
                    t.error(&label, e);
                    continue;
                }
            };
            let tuples = tuples_for(cfg, stream, p, kind.n());
            let reports: Vec<_> = tuples.into_par_iter().map(|x| (x.clone(), checker.check(&x))).collect();
            for (x, r) in reports {
                t.report(&format!("{label} x={x:?}"), r);
            }
        }
    }
    for p in [7, 11] {
        stream += 1;
        let label = format!("surface p={p}");
        let checker = match SurfaceChecker::new(p) {
            Ok(c) => c,
            Err(e) => {
                t.error(&label, e);
                continue;
            }
        };
        let tuples = tuples_for(cfg, stream, p, 2);
        let reports: Vec<_> = tuples.into_par_iter().map(|x| (x.clone(), checker.check(x[0], x[1]))).collect();
        for (x, r) in reports {
            t.report(&format!("{label} x={x:?}"), r);
        }
    }
    anomaly_notes(t);
}

/// The excluded `p = 3` cases, run without the gate and reported as notes.
fn anomaly_notes(t: &mut Tally) {
    match CurveChecker::without_min_prime(CurveKind::Elliptic, 3).and_then(|c| c.values(&[0, 1, 2])) {
        Ok(v) => t.note(format!(
            "excluded: elliptic p=3 x=(0,1,2) point sums {:?} vs coefficient side {:?}",
            v.integrals, v.expected
        )),
        Err(e) => t.error("elliptic p=3", e),
    }
    match SurfaceChecker::without_min_prime(3).and_then(|c| c.values(0, 1)) {
        Ok(v) => t.note(format!(
            "excluded: surface p=3 x=(0,1) surface sums {:?} vs coefficient side {:?}",
            v.integrals, v.expected
        )),
        Err(e) => t.error("surface p=3", e),
    }
}

fn resonances(t: &mut Tally, cfg: &SuiteConfig) {
    for n in [5usize, 8] {
        for r in (0..n).filter(|r| r % 3 == n % 3) {
            let label = format!("linear n={n} r={r}");
            let run = || -> Result<CheckReport> {
                let (_, exps) = problem(3, "2", &vec![1; n], 1, &[0], &[1])?;
                check_resonance_linear(&symmetric_family_member(3, n, r)?.reduced, &exps)
            };
            t.report(&label, run());
        }
    }
    let run = || -> Result<(Option<u32>, CheckReport)> {
        let (spec, exps) = problem(3, "4", &[1; 5], 2, &[0, 0], &[4, 3])?;
        let sol = taylor_solution_factored(&spec, &exps)?;
        Ok((resonance_ell(spec.field(), &exps, 2), check_ze_resonance(&sol.reduced, &exps, 2)?))
    };
    match run() {
        Ok((ell, rep)) => {
            t.expect(ell == Some(2), || format!("n=5, k=2: least resonant ell is {ell:?}, expected 2"));
            t.report("n=5, k=2 (ze)^2", Ok(rep));
        }
        Err(e) => t.error("n=5, k=2 (ze)^2", e),
    }
    let sols = sweep_solutions(cfg.level);
    let mut effective = 0;
    for (tu, r) in sols {
        let label = tu.label();
        match r {
            Ok((spec, exps, sol)) => match resonance_ell(spec.field(), &exps, tu.k) {
                Some(ell) => {
                    if ell <= tu.k {
                        effective += 1;
                    }
                    t.report(&format!("{label} ell={ell}"), check_ze_resonance(&sol.reduced, &exps, ell));
                }
                None => t.note(format!("{label}: no resonant ell in 1..=p")),
            },
            Err(e) => t.error(&label, e),
        }
    }
    t.note(format!("{effective} sweep tuples have a resonant ell <= k"));
}

fn flatness_cases() -> Vec<(Vec<u32>, u32)> {
    vec![
        (vec![1, 1, 1], 1),
        (vec![2, 2], 2),
        (vec![2, 1, 1], 2),
        (vec![1, 1, 1, 1], 2),
        (vec![2, 2, 1], 2),
        (vec![1, 2, 1, 2], 3),
    ]
}

fn properties(t: &mut Tally, cfg: &SuiteConfig) {
    let p = 11;
    let field = PrimeField::new(p).expect("prime");
    let mut r = rng(cfg, 100);
    for (m, k) in flatness_cases() {
        let weights = HighestWeights::new(m.clone(), k).expect("valid weights");
        let points = sampled_distinct(&mut r, p, m.len(), 50);
        let reports: Vec<_> = points
            .into_par_iter()
            .map(|z| (z.clone(), check_flatness(field, &weights, &z)))
            .collect();
        for (z, rep) in reports {
            t.report(&format!("flatness m={m:?} k={k} z={z:?}"), rep);
        }
    }
    sl2_brackets(t);
    module_closure(t);
    two_path_integrals(t, cfg);
    mutations(t);
    power_sums(t);
}

fn sl2_brackets(t: &mut Tally) {
    let field = PrimeField::new(7).expect("prime");
    for m in [vec![1u32, 1, 1], vec![2, 1], vec![2, 2, 1], vec![3, 1, 2]] {
        let total: i64 = m.iter().map(|&x| x as i64).sum();
        for k in 0..=total {
            let e_k = diagonal_matrix(field, &m, k, Generator::E);
            let f_k = diagonal_matrix(field, &m, k, Generator::F);
            let h_k = diagonal_matrix(field, &m, k, Generator::H);
            let e_up = diagonal_matrix(field, &m, k + 1, Generator::E);
            let f_down = diagonal_matrix(field, &m, k - 1, Generator::F);
            let h_up = diagonal_matrix(field, &m, k + 1, Generator::H);
            let h_down = diagonal_matrix(field, &m, k - 1, Generator::H);
            let ef = e_up.mul(&f_k).sub(&f_down.mul(&e_k));
            t.expect(ef == h_k, || format!("[e,f] = h fails for m={m:?} k={k}"));
            let he = h_down.mul(&e_k).sub(&e_k.mul(&h_k));
            t.expect(he == e_k.scale(2), || format!("[h,e] = 2e fails for m={m:?} k={k}"));
            let hf = h_up.mul(&f_k).sub(&f_k.mul(&h_k));
            t.expect(hf == f_k.scale(field.neg(2)), || format!("[h,f] = -2f fails for m={m:?} k={k}"));
        }
    }
}

fn module_closure(t: &mut Tally) {
    let run = |t: &mut Tally| -> Result<()> {
        let (spec, exps) = problem(5, "6", &[1, 2, 1], 2, &[1, 3], &[1, 1])?;
        let sol = taylor_solution_factored(&spec, &exps)?;
        let amb = spec.z_ambient();
        let p = spec.p() as u32;
        let g = SparsePoly::from_terms(
            amb,
            [
                (Monomial::new(&[], &[p, 0, 0]), 1),
                (Monomial::new(&[], &[0, p, p]), 3),
                (Monomial::new(&[], &[0, 0, 0]), 2),
            ],
        )?;
        let scaled = FactoredSolution {
            prefactor: sol.prefactor.clone(),
            reduced: sol.reduced.mul_poly(&g)?,
        };
        t.expect(!scaled.reduced.is_zero(), || "module closure: base solution is zero".into());
        t.report("z^p multiple kz", check_kz_factored(&scaled, &spec));
        t.report("z^p multiple singular", check_singular(&scaled.reduced));
        for (i, c) in homogeneous_components(&sol.expand()?).into_iter().enumerate() {
            t.report(&format!("homogeneous component {i}"), check_kz(&c, &spec));
        }
        Ok(())
    };
    if let Err(e) = run(t) {
        t.error("module closure", e);
    }
}

fn random_t_poly(r: &mut ChaCha8Rng, field: PrimeField, k: usize) -> SparsePoly {
    use rand::Rng;
    let amb = Ambient::with_field(field, k, 0);
    let p = field.p() as u32;
    let terms: Vec<_> = (0..6)
        .map(|_| {
            let t: Vec<u32> = (0..k).map(|_| r.gen_range(0..3 * p)).collect();
            (Monomial::new(&t, &[]), r.gen_range(0..field.p()))
        })
        .collect();
    SparsePoly::from_terms(amb, terms).expect("t-only ambient")
}

fn two_path_integrals(t: &mut Tally, cfg: &SuiteConfig) {
    let mut r = rng(cfg, 200);
    for p in [3, 5, 7] {
        let field = PrimeField::new(p).expect("prime");
        for k in 1..=2 {
            for _ in 0..10 {
                let f = random_t_poly(&mut r, field, k);
                let ok = match (integrate_grid(&f), integrate_fpk(&f)) {
                    (Ok(a), Ok(b)) => a == b,
                    _ => false,
                };
                t.expect(ok, || format!("grid and power-sum integrals differ for {f} over F_{p}^{k}"));
            }
        }
    }
}

fn mutations(t: &mut Tally) {
    let run = |t: &mut Tally| -> Result<()> {
        let (spec, exps) = problem(5, "6", &[1, 2, 1], 2, &[1, 3], &[1, 1])?;
        let sol = taylor_solution_factored(&spec, &exps)?;
        t.expect(!sol.reduced.is_zero(), || "mutation base solution is zero".into());
        let amb = spec.z_ambient();
        let z1 = SparsePoly::var(amb, Var::Z(0))?;
        for j in spec.weights().basis() {
            let mut bumped = sol.clone();
            bumped.reduced.add_to(j.clone(), &z1)?;
            let kz = check_kz_factored(&bumped, &spec)?.passed;
            let sing = check_singular(&bumped.reduced)?.passed;
            t.expect(!(kz && sing), || format!("adding z1 to coordinate {:?} still passes", j.0));
        }
        let mut shifted = sol.clone();
        shifted.prefactor[0] += 1;
        t.expect(!check_kz_factored(&shifted, &spec)?.passed, || {
            "raising a prefactor exponent still passes".into()
        });
        Ok(())
    };
    if let Err(e) = run(t) {
        t.error("mutation", e);
    }
}

fn power_sums(t: &mut Tally) {
    for p in (3..=13).filter(|&p| is_prime(p)) {
        let field = PrimeField::new(p).expect("prime");
        for i in 0..=3 * (p - 1) {
            let brute = (0..p).fold(0, |acc, x| field.add(acc, field.pow(x, i)));
            t.expect(power_sum(field, i) == brute, || format!("power sum p={p} i={i}"));
        }
    }
}

/// All `m ∈ {1,2}^n` for `n ≤ 4`; `Quick` keeps only non-increasing `m` when `n = 4`.
fn cohomology(t: &mut Tally, cfg: &SuiteConfig) {
    let kappas: &[&str] = match cfg.level {
        Level::Quick => &["2", "4"],
        Level::Full => &["2", "4", "8", "5/4"],
    };
    let mut cases = Vec::new();
    for p in [3u64, 5, 7] {
        for n in 1..=4usize {
            for bits in 0..(1u32 << n) {
                let m: Vec<u32> = (0..n).map(|s| 1 + (bits >> s & 1)).collect();
                if cfg.level == Level::Quick && n == 4 && !m.windows(2).all(|w| w[0] >= w[1]) {
                    continue;
                }
                for &kappa in kappas {
                    cases.push((p, kappa, m.clone()));
                }
            }
        }
    }
    let reports: Vec<_> = cases
        .into_par_iter()
        .map(|(p, kappa, m)| {
            let label = format!("p={p} kappa={kappa} m={m:?}");
            let rep = problem(p, kappa, &m, 1, &[0], &[1]).and_then(|(spec, exps)| check_cohomology_k1(&spec, &exps));
            (label, rep)
        })
        .collect();
    for (label, rep) in reports {
        match rep {
            Err(Error::InvalidSpec(msg)) => t.note(format!("{label}: skipped ({msg})")),
            other => t.report(&label, other),
        }
    }
}
