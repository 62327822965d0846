//! Command-line front end. Every report is JSON on stdout (or `--out`); timings go to stderr.
//!
//! Exit codes: 0 all checks pass, 1 some check failed, 2 usage or precondition error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::construct::{
    exponent_data, master_times_weight_at, taylor_solution_factored, ExponentData, FactoredSolution, Kappa, ProblemSpec,
    Provenance,
};
use crate::curves::{CurveChecker, CurveKind, SurfaceChecker};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::fpintegral::{check_gamma_decomposition, check_integral_theorem_with, gamma_partition, integrate_fpk};
use crate::sl2rep::{HighestWeights, WeightVector};
use crate::suite::{self, Level, SuiteConfig};
use crate::verify::{
    check_cohomology_k1, check_flatness, check_kz, check_kz_factored, check_resonance_linear, check_singular,
    check_ze_resonance, resonance_ell, CheckReport,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "kzmodp", version, about = "Polynomial KZ solutions over F_p and their checks")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Taylor-coefficient solution as WeightVector JSON with a provenance block
    Solve(SolveArgs),
    /// Run one verifier
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
    /// Grid integral against the Taylor side, per basis index
    Integrate(IntegrateArgs),
    /// Point-sum identities on curves and surfaces
    Curve(CurveArgs),
    /// All acceptance criteria as one pass/fail matrix
    Suite(SuiteArgs),
}

#[derive(Args, Debug, Clone)]
struct ProblemArgs {
    /// Problem as JSON: {"p", "kappa", "m", "k", "q", "l", optional "exponents"}
    #[arg(long, conflicts_with_all = ["p", "kappa", "m", "k"])]
    spec: Option<PathBuf>,
    #[arg(long)]
    p: Option<u64>,
    /// κ as "a/b" or "a"
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<u32>>,
    #[arg(long)]
    k: Option<u32>,
    /// Shift point; defaults to zeros
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    q: Option<Vec<i64>>,
    /// Cycle multiplicities; default to ones
    #[arg(long, value_delimiter = ',')]
    l: Option<Vec<u32>>,
    /// JSON exponent override {"ms", "mij", "m0", "kinv"}, checked against the congruences
    #[arg(long)]
    exponents: Option<PathBuf>,
}

#[derive(Deserialize)]
struct ProblemFile {
    p: u64,
    kappa: String,
    m: Vec<u32>,
    k: u32,
    #[serde(default)]
    q: Option<Vec<i64>>,
    #[serde(default)]
    l: Option<Vec<u32>>,
    #[serde(default)]
    exponents: Option<ExponentData>,
}

impl ProblemArgs {
    fn resolve(&self) -> Result<(ProblemSpec, ExponentData)> {
        let file = match &self.spec {
            Some(path) => serde_json::from_str::<ProblemFile>(&read(path)?)?,
            None => {
                let missing = |f: &str| Error::Parse(format!("--{f} is required without --spec"));
                ProblemFile {
                    p: self.p.ok_or_else(|| missing("p"))?,
                    kappa: self.kappa.clone().ok_or_else(|| missing("kappa"))?,
                    m: self.m.clone().ok_or_else(|| missing("m"))?,
                    k: self.k.ok_or_else(|| missing("k"))?,
                    q: None,
                    l: None,
                    exponents: None,
                }
            }
        };
        let k = file.k as usize;
        let q = self.q.clone().or(file.q).unwrap_or_else(|| vec![0; k]);
        let l = self.l.clone().or(file.l).unwrap_or_else(|| vec![1; k]);
        let spec = ProblemSpec::new(file.p, file.kappa.parse::<Kappa>()?, file.m, file.k, &q, &l)?;
        let custom = match &self.exponents {
            Some(path) => Some(serde_json::from_str::<ExponentData>(&read(path)?)?),
            None => file.exponents,
        };
        let exps = exponent_data(&spec, custom.as_ref())?;
        Ok((spec, exps))
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Write `reduced` coordinates and the `prefactor` exponents instead of expanding
    #[arg(long)]
    factored: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolArg {
    /// Output of `solve`
    #[arg(long)]
    sol: PathBuf,
}

#[derive(Subcommand, Debug)]
enum CheckCommand {
    /// KZ equations
    Kz(SolArg),
    /// Annihilation by e
    Singular(SolArg),
    /// Σ z_s M_s I_s = 0 (k = 1, Σ M_s ≡ -1)
    Resonance(SolArg),
    /// (ze)^ℓ I = 0, with ℓ defaulting to the least resonant one
    Ze {
        #[command(flatten)]
        sol: SolArg,
        #[arg(long)]
        ell: Option<u32>,
    },
    /// Gaudin Hamiltonians commute with each other and with the diagonal action
    Flatness {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',')]
        m: Vec<u32>,
        #[arg(long)]
        k: u32,
        #[arg(long, value_delimiter = ',')]
        z: Vec<u64>,
    },
    /// The three k = 1 polynomial identities
    Cohomology(ProblemArgs),
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Evaluation point, pairwise distinct
    #[arg(long, value_delimiter = ',')]
    x: Vec<u64>,
    /// Also split the grid into the cells of the Gamma-type decomposition
    #[arg(long)]
    gamma: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CurveChoice {
    Elliptic,
    Quartic,
    Cubic3,
    Genus2,
    Surface,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[arg(value_enum)]
    kind: CurveChoice,
    #[arg(long)]
    p: u64,
    /// Branch points; omit to sweep
    #[arg(long, value_delimiter = ',')]
    x: Option<Vec<u64>>,
    /// Sweep size when --x is absent; 0 means every ordered tuple of distinct points
    #[arg(long, default_value_t = 0)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Run below the minimum prime where the identity is known to fail
    #[arg(long)]
    no_gate: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    #[arg(long, value_enum, default_value_t = Level::Quick)]
    level: Level,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Run only these criteria
    #[arg(long, value_delimiter = ',')]
    criterion: Option<Vec<u32>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// `solve` output, also accepted by `check --sol`.
#[derive(Serialize, Deserialize)]
struct SolutionFile {
    #[serde(flatten)]
    vector: Value,
    provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prefactor: Option<Vec<u64>>,
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn emit(value: &impl Serialize, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn verdict(passed: bool) -> i32 {
    if passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Parses `argv` (including the program name) and runs it; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    suite::configure_workers();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Solve(a) => solve(a),
        Command::Check { what } => check(what),
        Command::Integrate(a) => integrate(a),
        Command::Curve(a) => curve(a),
        Command::Suite(a) => run_suite(a),
    }
}

fn solve(a: SolveArgs) -> Result<i32> {
    let (spec, exps) = a.problem.resolve()?;
    let started = Instant::now();
    let sol = taylor_solution_factored(&spec, &exps)?;
    let (vector, prefactor) = if a.factored {
        (serde_json::to_value(&sol.reduced)?, Some(sol.prefactor.clone()))
    } else {
        (serde_json::to_value(sol.expand()?)?, None)
    };
    eprintln!("solve: {:.3}s", started.elapsed().as_secs_f64());
    let file = SolutionFile {
        vector,
        provenance: Provenance::new(&spec, &exps),
        prefactor,
    };
    emit(&file, a.out.as_deref())?;
    Ok(EXIT_PASS)
}

struct Loaded {
    spec: ProblemSpec,
    exps: ExponentData,
    vector: WeightVector,
    prefactor: Option<Vec<u64>>,
}

fn load(path: &Path) -> Result<Loaded> {
    let file: SolutionFile = serde_json::from_str(&read(path)?)?;
    let (spec, exps) = file.provenance.spec()?;
    let vector: WeightVector = serde_json::from_value(file.vector)?;
    Ok(Loaded {
        spec,
        exps,
        vector,
        prefactor: file.prefactor,
    })
}

fn report_and_exit(r: CheckReport) -> Result<i32> {
    emit(&r, None)?;
    Ok(verdict(r.passed))
}

fn check(what: CheckCommand) -> Result<i32> {
    let r = match what {
        CheckCommand::Kz(s) => {
            let l = load(&s.sol)?;
            match l.prefactor {
                Some(prefactor) => check_kz_factored(
                    &FactoredSolution {
                        prefactor,
                        reduced: l.vector,
                    },
                    &l.spec,
                )?,
                None => check_kz(&l.vector, &l.spec)?,
            }
        }
        CheckCommand::Singular(s) => check_singular(&load(&s.sol)?.vector)?,
        CheckCommand::Resonance(s) => {
            let l = load(&s.sol)?;
            check_resonance_linear(&l.vector, &l.exps)?
        }
        CheckCommand::Ze { sol, ell } => {
            let l = load(&sol.sol)?;
            let k = l.spec.weights().k();
            let ell = match ell.or_else(|| resonance_ell(l.spec.field(), &l.exps, k)) {
                Some(e) => e,
                None => return Err(Error::Precondition("no resonant ℓ in 1..=p".into())),
            };
            check_ze_resonance(&l.vector, &l.exps, ell)?
        }
        CheckCommand::Flatness { p, m, k, z } => {
            let field = crate::field::PrimeField::new(p)?;
            check_flatness(field, &HighestWeights::new(m, k)?, &z)?
        }
        CheckCommand::Cohomology(problem) => {
            let (spec, exps) = problem.resolve()?;
            check_cohomology_k1(&spec, &exps)?
        }
    };
    report_and_exit(r)
}

#[derive(Serialize)]
struct IntegralEntry {
    #[serde(rename = "J")]
    j: Vec<u32>,
    taylor: FieldElement,
    grid: FieldElement,
}

fn integrate(a: IntegrateArgs) -> Result<i32> {
    let (spec, exps) = a.problem.resolve()?;
    let sol = taylor_solution_factored(&spec, &exps)?;
    let report = check_integral_theorem_with(&sol, &spec, &exps, &a.x)?;
    let field = spec.field();
    let pre = sol.prefactor_poly()?.eval(&[], &a.x)?;
    let sign = if spec.k() % 2 == 0 { 1 } else { field.neg(1) };
    let mut values = Vec::new();
    for j in spec.weights().basis() {
        let taylor = field.mul(pre, sol.reduced.coord(&j).eval(&[], &a.x)?);
        let grid = field.mul(sign, integrate_fpk(&master_times_weight_at(&spec, &exps, &j, &a.x)?)?);
        values.push(IntegralEntry { j: j.0, taylor, grid });
    }
    let mut passed = report.passed;
    let mut out = json!({ "x": a.x, "values": values, "report": report });
    if a.gamma {
        let partition = gamma_partition(&spec, &a.x)?;
        let decomposition = check_gamma_decomposition(&spec, &a.x)?;
        let symmetry = partition.check_symmetry();
        passed &= decomposition.passed && symmetry.passed;
        out["gamma"] = json!({
            "generator": partition.generator,
            "cell_sizes": partition.cells.iter().map(Vec::len).collect::<Vec<_>>(),
            "decomposition": decomposition,
            "symmetry": symmetry,
        });
    }
    emit(&out, a.out.as_deref())?;
    Ok(verdict(passed))
}

fn curve_tuples(a: &CurveArgs, n: usize) -> Vec<Vec<u64>> {
    use rand::seq::index::sample;
    use rand::SeedableRng;
    if let Some(x) = &a.x {
        return vec![x.clone()];
    }
    if a.samples == 0 {
        return crate::suite::ordered_distinct(a.p, n);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
    (0..a.samples)
        .map(|_| sample(&mut rng, a.p as usize, n).into_iter().map(|v| v as u64).collect())
        .collect()
}

fn curve(a: CurveArgs) -> Result<i32> {
    let kind = match a.kind {
        CurveChoice::Elliptic => Some(CurveKind::Elliptic),
        CurveChoice::Quartic => Some(CurveKind::Quartic),
        CurveChoice::Cubic3 => Some(CurveKind::Cubic3),
        CurveChoice::Genus2 => Some(CurveKind::Genus2),
        CurveChoice::Surface => None,
    };
    let mut passed = true;
    let mut tuples = Vec::new();
    match kind {
        Some(kind) => {
            let checker = if a.no_gate {
                CurveChecker::without_min_prime(kind, a.p)?
            } else {
                CurveChecker::new(kind, a.p)?
            };
            for x in curve_tuples(&a, kind.n()) {
                let v = checker.values(&x)?;
                let ok = v.integrals == v.expected;
                passed &= ok;
                tuples.push(json!({ "values": v, "passed": ok }));
            }
        }
        None => {
            let checker = if a.no_gate {
                SurfaceChecker::without_min_prime(a.p)?
            } else {
                SurfaceChecker::new(a.p)?
            };
            for x in curve_tuples(&a, 2) {
                if x.len() != 2 {
                    return Err(Error::LengthMismatch { expected: 2, got: x.len() });
                }
                let v = checker.values(x[0], x[1])?;
                let ok = v.integrals == v.expected;
                passed &= ok;
                tuples.push(json!({ "values": v, "passed": ok }));
            }
        }
    }
    let name = format!("{:?}", a.kind).to_lowercase();
    emit(
        &json!({ "kind": name, "p": a.p, "passed": passed, "tuples": tuples }),
        a.out.as_deref(),
    )?;
    Ok(verdict(passed))
}

fn run_suite(a: SuiteArgs) -> Result<i32> {
    let cfg = SuiteConfig {
        level: a.level,
        seed: a.seed,
        out: a.out.clone(),
    };
    let ids: Vec<u32> = match a.criterion {
        Some(ids) => ids,
        None => suite::CRITERIA.iter().map(|c| c.0).collect(),
    };
    let mut criteria = Vec::new();
    for id in ids {
        let started = Instant::now();
        let r = suite::run_criterion(id, &cfg);
        eprintln!(
            "criterion {id}: {} ({:.2}s)",
            if r.passed { "pass" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
        criteria.push(r);
    }
    let report = suite::SuiteReport {
        level: cfg.level,
        seed: cfg.seed,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    };
    emit(&report, cfg.out.as_deref())?;
    Ok(verdict(report.passed))
}
