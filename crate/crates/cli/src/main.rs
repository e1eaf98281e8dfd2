//! `scg`: generate, solve, verify and audit social coordination games.
//!
//! Instance files use 0-based indices. On the command line and in reports
//! profiles are 1-based comma lists (`--profile 1,2,3`), as is `--k0`.
//!
//! Exit codes: 0 success, 2 argument or input error, 3 enumeration too
//! large, 4 verification failed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use scg::analysis::{
    brute_force_optimum, deviation_report, equilibrium_census, payment_stabilize,
    verify_approx_strong, CensusOptions, CensusRow, DeviationReport, StrategyCount,
    StrongDeviationReport,
};
use scg::bounds::{alpha_sweep, bounds_table, standard_grid, BoundsRow};
use scg::dynamics::{
    algorithm1_two, hybrid, one_shot_alpha_br, one_shot_stability_bound, sqrt2_three, strong_two,
};
use scg::generalized::{
    hypergraph_cc_recover, lex_strong_eq, one_shot_generalized, parse_generalized,
    parse_hypergraph, parse_omega, verify_generalized, GeneralizedGame, HypergraphGame,
    HypergraphPotential, OmegaGame,
};
use scg::generators::{generate, GeneratorSpec, WeightRange};
use scg::io::parse_instance;
use scg::model::{instance_stats, GameInstance};
use scg::numeric::{format_rational, parse_rational, to_decimal};
use scg::potentials::{
    cc_recover, exhaustive_audit, ordinal_audit, PairwisePotential, PotentialCertificate,
};
use scg::{Error, Exec, Extended, Game, Num, Profile, Threshold, ENUMERATION_LIMIT};

#[derive(Parser)]
#[command(
    name = "scg",
    version,
    about = "Social coordination games: equilibria, payments and potentials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance as JSON.
    Gen(GenArgs),
    /// Run a constructive algorithm on an instance.
    Solve(SolveArgs),
    /// Check a profile against a stability notion.
    Verify(VerifyArgs),
    /// Enumerate all profiles: optimum, equilibria, PoA and PoS.
    Census(CensusArgs),
    /// Minimal payments that make a profile (default: the optimum) stable.
    Payments(PaymentsArgs),
    /// Guaranteed welfare fraction of the hybrid algorithm.
    Bounds(BoundsArgs),
    /// Recover a CC certificate and audit its potential.
    AuditPotential(AuditArgs),
    /// Scan random symmetric instances for one without a strong equilibrium.
    SearchNoSne(SearchArgs),
}

fn num(text: &str) -> Result<Num, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    CyclicTriangle,
    HubStar,
    PosTight,
    Triangle,
    Random,
    RandomCc,
    RandomSymmetric,
    RandomSupermodular,
    RandomOmega,
    RandomHypergraphCc,
}

#[derive(Args)]
struct GenArgs {
    kind: GenKind,
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, value_parser = num, default_value = "1")]
    r: Num,
    #[arg(long, value_parser = num, default_value = "1/100")]
    eps: Num,
    #[arg(long, value_parser = num, default_value = "2")]
    c: Num,
    #[arg(long, value_parser = num, default_value = "1/2")]
    omega: Num,
    #[arg(long, default_value_t = 4)]
    gamma_max: u32,
    #[arg(long, default_value_t = 10)]
    max_num: u32,
    #[arg(long, default_value_t = 4)]
    max_den: u32,
    /// Keep random shares strictly inside (0, 1).
    #[arg(long)]
    finite_gamma: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Algorithm1,
    Strong2,
    Sqrt2,
    Oneshot,
    Hybrid,
    Lexstrong,
    OneshotGen,
}

#[derive(Args)]
struct SolveArgs {
    algorithm: Algorithm,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_parser = num)]
    alpha: Option<Num>,
    /// Starting strategy (1-based) for the one-shot runs.
    #[arg(long)]
    k0: Option<usize>,
    /// Starting profile for algorithm1 (1-based comma list).
    #[arg(long)]
    profile: Option<String>,
    /// Compare against the brute-force optimum.
    #[arg(long)]
    opt_oracle: bool,
    /// Write the move trace as JSON lines (oneshot only).
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyKind {
    Nash,
    Strong,
    Generalized,
}

#[derive(Args)]
struct VerifyArgs {
    kind: VerifyKind,
    #[arg(long = "in")]
    input: PathBuf,
    /// Rational factor, or `sqrt2` (nash only).
    #[arg(long, default_value = "1")]
    alpha: String,
    #[arg(long)]
    profile: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_parser = num, default_value = "1")]
    alpha: Num,
    /// Also run the exhaustive strong check on every equilibrium.
    #[arg(long)]
    strong: bool,
    /// CSV: one row per profile instead of per equilibrium.
    #[arg(long)]
    all: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PaymentsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Profile to stabilize (1-based); defaults to the brute-force optimum.
    #[arg(long)]
    profile: Option<String>,
    /// Also report ρ_α of the hybrid algorithm and the ν ≤ ρ_α/(α−1) check.
    #[arg(long, value_parser = num)]
    alpha: Option<Num>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Comma list of rationals.
    #[arg(long, value_delimiter = ',', value_parser = num)]
    alpha: Vec<Num>,
    /// Comma list of rationals or `inf`.
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<Extended>,
    /// Comma list of integers or `inf`.
    #[arg(long, value_delimiter = ',')]
    m: Vec<StrategyCount>,
    /// Add the m → ∞ limit (1/m = 0) to the m list.
    #[arg(long)]
    asymptotic: bool,
    /// The α ∈ {2, 1.618}, γ ∈ {1, 2, 10}, m ∈ {4, ∞} grid.
    #[arg(long)]
    grid: bool,
    /// Replace the α list by N+1 even steps from 1.618 to 2.
    #[arg(long)]
    sweep: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Check every unilateral deviation of every profile instead of sampling.
    #[arg(long)]
    exhaustive: bool,
    /// Audit this certificate (JSON array) instead of a recovered one.
    #[arg(long)]
    cert: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 200)]
    tries: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Core(Error),
    Io(PathBuf, std::io::Error),
    /// The checked object is not stable; the report has been written.
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Outcome {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(path.clone(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: &Option<PathBuf>, value: &Value) -> Outcome {
    emit(out, &serde_json::to_string_pretty(value).expect("json"))
}

fn n_str(x: &Num) -> String {
    format_rational(x)
}

fn decimal(x: &Extended) -> String {
    match x {
        Extended::Finite(v) => to_decimal(v, 6),
        Extended::Infinite => "inf".into(),
    }
}

/// Any of the supported game files, told apart by their top-level keys.
enum AnyGame {
    Instance(GameInstance),
    Table(GeneralizedGame),
    Hypergraph(HypergraphGame),
    Omega(OmegaGame),
}

impl AnyGame {
    fn load(path: &Path) -> Result<Self, Failure> {
        let text = read(path)?;
        let value: Value = serde_json::from_str(&text).map_err(Error::from)?;
        let has = |key: &str| value.get(key).is_some();
        Ok(if has("intrinsic") {
            AnyGame::Instance(parse_instance(&text)?)
        } else if has("players") {
            AnyGame::Table(parse_generalized(&text)?)
        } else if has("omega") {
            AnyGame::Omega(parse_omega(&text)?)
        } else {
            AnyGame::Hypergraph(parse_hypergraph(&text)?)
        })
    }

    fn game(&self) -> &dyn Game {
        match self {
            AnyGame::Instance(g) => g,
            AnyGame::Table(g) => g,
            AnyGame::Hypergraph(g) => g,
            AnyGame::Omega(g) => g,
        }
    }
}

fn load_instance(path: &Path) -> Result<GameInstance, Failure> {
    Ok(parse_instance(&read(path)?)?)
}

fn report_json(report: &DeviationReport) -> Value {
    json!({
        "max_factor": report.max_factor.to_string(),
        "max_factor_decimal": decimal(&report.max_factor),
        "witness_player": report.witness,
        "players": report.players.iter().map(|d| json!({
            "best_response": d.strategy + 1,
            "current": n_str(&d.current),
            "best": n_str(&d.utility),
            "factor": d.factor.to_string(),
        })).collect::<Vec<_>>(),
    })
}

fn strong_json(report: &StrongDeviationReport) -> Value {
    match &report.witness {
        None => json!({"alpha": n_str(&report.alpha), "stable": true}),
        Some(w) => json!({
            "alpha": n_str(&report.alpha),
            "stable": false,
            "deviation": w.profile.to_one_based(),
            "coalition": w.coalition,
            "factors": w.factors.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        }),
    }
}

fn run_gen(args: GenArgs) -> Outcome {
    let spec = match args.kind {
        GenKind::CyclicTriangle => GeneratorSpec::CyclicTriangle { r: args.r },
        GenKind::HubStar => GeneratorSpec::HubStar {
            m: args.m,
            r: args.r,
            eps: args.eps,
        },
        GenKind::PosTight => GeneratorSpec::SymmetricPosTight {
            m: args.m,
            r: args.r,
            eps: args.eps,
        },
        GenKind::Triangle => GeneratorSpec::TriangleC { c: args.c },
        GenKind::Random => GeneratorSpec::Random {
            n: args.n,
            m: args.m,
            weights: WeightRange {
                max_num: args.max_num,
                max_den: args.max_den,
            },
            finite_gamma: args.finite_gamma,
            seed: args.seed,
        },
        GenKind::RandomCc => GeneratorSpec::RandomCc {
            n: args.n,
            m: args.m,
            gamma_max: args.gamma_max,
            seed: args.seed,
        },
        GenKind::RandomSymmetric => GeneratorSpec::RandomSymmetric {
            n: args.n,
            m: args.m,
            seed: args.seed,
        },
        GenKind::RandomSupermodular => GeneratorSpec::RandomSupermodular {
            n: args.n,
            m: args.m,
            r: args.r,
            seed: args.seed,
        },
        GenKind::RandomOmega => GeneratorSpec::RandomOmega {
            n: args.n,
            m: args.m,
            omega: args.omega,
            seed: args.seed,
        },
        GenKind::RandomHypergraphCc => GeneratorSpec::RandomHypergraphCc {
            n: args.n,
            m: args.m,
            seed: args.seed,
        },
    };
    emit(&args.out, &generate(&spec)?.to_json())
}

fn k0_of(args: &SolveArgs, m: usize, default: usize) -> Result<usize, Failure> {
    match args.k0 {
        None => Ok(default),
        Some(k) if k >= 1 && k <= m => Ok(k - 1),
        Some(k) => Err(Error::Argument(format!("--k0 {k} outside 1..={m}")).into()),
    }
}

fn optimum_fields(game: &dyn Game, welfare: &Num) -> Result<Value, Failure> {
    let (opt_profile, opt) = brute_force_optimum(game, ENUMERATION_LIMIT, Exec::default())?;
    let ratio = if opt == Num::from_integer(0.into()) {
        Num::from_integer(1.into())
    } else {
        welfare / &opt
    };
    Ok(json!({
        "opt_profile": opt_profile.to_one_based(),
        "opt_welfare": n_str(&opt),
        "ratio": n_str(&ratio),
    }))
}

fn run_solve(args: SolveArgs) -> Outcome {
    let loaded = AnyGame::load(&args.input)?;
    let wrong_input =
        |what: &str| -> Failure { Error::Argument(format!("this algorithm needs {what}")).into() };
    let mut report = json!({});
    let (profile, factor): (Profile, String) = match (args.algorithm, &loaded) {
        (Algorithm::Algorithm1, AnyGame::Instance(g)) => {
            let start = match &args.profile {
                Some(text) => Profile::parse_one_based(text, g.n(), g.m())?,
                None => Profile::uniform(g.n(), 0),
            };
            (algorithm1_two(g, &start)?, "1".into())
        }
        (Algorithm::Strong2, AnyGame::Instance(g)) => (strong_two(g)?, "1".into()),
        (Algorithm::Sqrt2, AnyGame::Instance(g)) => (sqrt2_three(g)?, "sqrt2".into()),
        (Algorithm::Oneshot, AnyGame::Instance(g)) => {
            let alpha = args
                .alpha
                .clone()
                .unwrap_or_else(|| Num::from_integer(1.into()));
            let k0 = k0_of(&args, g.m(), instance_stats(g).k_star)?;
            let (profile, trace) = one_shot_alpha_br(g, k0, &alpha)?;
            if let Some(path) = &args.trace {
                fs::write(path, trace.to_json_lines()).map_err(|e| Failure::Io(path.clone(), e))?;
            }
            report["alpha"] = json!(n_str(&alpha));
            report["k0"] = json!(k0 + 1);
            report["moves"] = json!(trace.moves.len());
            (profile, n_str(&one_shot_stability_bound(&alpha)))
        }
        (Algorithm::Hybrid, AnyGame::Instance(g)) => {
            let alpha = args
                .alpha
                .clone()
                .ok_or_else(|| Failure::Core(Error::Argument("hybrid needs --alpha".into())))?;
            let opt = if args.opt_oracle {
                Some(brute_force_optimum(g, ENUMERATION_LIMIT, Exec::default())?.1)
            } else {
                None
            };
            let h = hybrid(g, &alpha, opt.as_ref())?;
            report["alpha"] = json!(n_str(&h.alpha));
            report["beta"] = json!(n_str(&h.beta));
            report["k_star"] = json!(h.k_star + 1);
            report["s1"] = json!(h.s1.to_one_based());
            report["s2"] = json!(h.s2.to_one_based());
            report["welfare1"] = json!(n_str(&h.welfare1));
            report["welfare2"] = json!(n_str(&h.welfare2));
            if let Some(rho) = &h.rho {
                report["rho"] = json!(n_str(rho));
                report["opt_welfare"] = json!(n_str(opt.as_ref().expect("opt")));
            }
            (h.chosen.clone(), n_str(&h.stability_bound))
        }
        (Algorithm::Lexstrong, AnyGame::Omega(g)) => {
            let out = lex_strong_eq(g, ENUMERATION_LIMIT, Exec::default())?;
            report["pi"] = json!(out.pi.iter().map(n_str).collect::<Vec<_>>());
            (
                out.profile,
                n_str(&(Num::from_integer(1.into()) / g.omega())),
            )
        }
        (Algorithm::OneshotGen, AnyGame::Table(g)) => {
            let k0 = k0_of(&args, g.m(), 0)?;
            let out = one_shot_generalized(g, k0)?;
            report["r"] = json!(n_str(&out.r));
            report["alpha_used"] = json!(n_str(&out.alpha_used));
            report["k0"] = json!(k0 + 1);
            (out.profile, n_str(&out.bound))
        }
        (Algorithm::Lexstrong, _) => return Err(wrong_input("an omega-game file")),
        (Algorithm::OneshotGen, _) => return Err(wrong_input("a table-game file")),
        _ => return Err(wrong_input("an instance file")),
    };
    let game = loaded.game();
    let welfare = game.social_welfare(&profile);
    let dev = deviation_report(game, &profile);
    report["algorithm"] = json!(args
        .algorithm
        .to_possible_value()
        .expect("named")
        .get_name());
    report["profile"] = json!(profile.to_one_based());
    report["welfare"] = json!(n_str(&welfare));
    report["advertised_factor"] = json!(factor);
    report["max_factor"] = json!(dev.max_factor.to_string());
    if args.opt_oracle && report.get("rho").is_none() {
        report["optimum"] = optimum_fields(game, &welfare)?;
    }
    emit_json(&args.out, &report)
}

fn run_verify(args: VerifyArgs) -> Outcome {
    let threshold: Threshold =
        args.alpha
            .parse()
            .map_err(|e: scg::numeric::ParseRationalError| {
                Failure::Core(Error::Argument(e.to_string()))
            })?;
    let loaded = AnyGame::load(&args.input)?;
    let game = loaded.game();
    let profile = Profile::parse_one_based(&args.profile, game.players(), game.strategies())?;
    let (value, ok) = match args.kind {
        VerifyKind::Nash => {
            let report = deviation_report(game, &profile);
            let ok = report.within(&threshold);
            (report_json(&report), ok)
        }
        VerifyKind::Generalized => {
            let AnyGame::Table(g) = &loaded else {
                return Err(Error::Argument(
                    "generalized verification needs a table-game file".into(),
                )
                .into());
            };
            let report = verify_generalized(g, &profile)?;
            let ok = report.within(&threshold);
            (report_json(&report), ok)
        }
        VerifyKind::Strong => {
            let Threshold::Rational(alpha) = &threshold else {
                return Err(
                    Error::Argument("strong verification needs a rational --alpha".into()).into(),
                );
            };
            if !game.is_feasible(&profile) {
                return Err(Error::Argument("profile co-locates a conflicting pair".into()).into());
            }
            let report =
                verify_approx_strong(game, &profile, alpha, ENUMERATION_LIMIT, Exec::default())?;
            let ok = report.is_stable();
            (strong_json(&report), ok)
        }
    };
    let mut value = value;
    value["profile"] = json!(profile.to_one_based());
    value["alpha"] = json!(threshold.to_string());
    value["stable"] = json!(ok);
    emit_json(&args.out, &value)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "profile {} is not stable at {threshold}",
            profile.to_one_based()
        )))
    }
}

fn census_rows_csv(rows: &[CensusRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["profile", "welfare", "max_factor", "is_nash", "is_strong"])
        .expect("in-memory write");
    for row in rows {
        let strong = row.is_strong.map(|b| b.to_string()).unwrap_or_default();
        w.write_record([
            row.profile.to_one_based(),
            n_str(&row.welfare),
            row.max_factor.to_string(),
            row.is_nash.to_string(),
            strong,
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn run_census(args: CensusArgs) -> Outcome {
    let loaded = AnyGame::load(&args.input)?;
    let options = CensusOptions {
        strong: args.strong,
        all_rows: args.all && args.format == Format::Csv,
        ..CensusOptions::default()
    };
    let c = equilibrium_census(loaded.game(), &args.alpha, options)?;
    if args.format == Format::Csv {
        return emit(&args.out, &census_rows_csv(&c.rows));
    }
    let row = |r: &CensusRow| {
        json!({
            "profile": r.profile.to_one_based(),
            "welfare": n_str(&r.welfare),
            "max_factor": r.max_factor.to_string(),
            "is_strong": r.is_strong,
        })
    };
    let mut value = json!({
        "alpha": n_str(&c.alpha),
        "profiles": c.profiles,
        "opt_profile": c.opt_profile.to_one_based(),
        "opt_welfare": n_str(&c.opt_welfare),
        "exists": c.exists,
        "equilibria": c.equilibria.iter().map(row).collect::<Vec<_>>(),
        "poa": c.poa.as_ref().map(|x| x.to_string()),
        "pos": c.pos.as_ref().map(|x| x.to_string()),
    });
    if let Some(pos) = &c.pos {
        value["pos_decimal"] = json!(format!("{:.6}", pos.to_f64()));
    }
    if let AnyGame::Instance(g) = &loaded {
        value["m"] = json!(g.m());
    }
    emit_json(&args.out, &value)
}

fn run_payments(args: PaymentsArgs) -> Outcome {
    let g = load_instance(&args.input)?;
    let (opt_profile, opt) = brute_force_optimum(&g, ENUMERATION_LIMIT, Exec::default())?;
    let profile = match &args.profile {
        Some(text) => Profile::parse_one_based(text, g.n(), g.m())?,
        None => opt_profile,
    };
    let plan = payment_stabilize(&g, &profile, &opt)?;
    let mut value = json!({
        "profile": profile.to_one_based(),
        "payments": plan.payments.iter().map(n_str).collect::<Vec<_>>(),
        "best_responses": plan.best_responses.iter().map(|k| k + 1).collect::<Vec<_>>(),
        "total": n_str(&plan.total),
        "opt_welfare": n_str(&plan.opt_welfare),
        "nu": n_str(&plan.nu),
        "a_total": n_str(&plan.a_total),
        "total_within_a_total": plan.within_a_total,
        "post_payment_max_factor": plan.post_max_factor.to_string(),
    });
    if let Some(alpha) = &args.alpha {
        let h = hybrid(&g, alpha, Some(&opt))?;
        let rho = h.rho.expect("opt supplied");
        let cap = &rho / (alpha - Num::from_integer(1.into()));
        value["rho"] = json!(n_str(&rho));
        value["nu_cap"] = json!(n_str(&cap));
        value["nu_within_cap"] = json!(plan.nu <= cap);
    }
    emit_json(&args.out, &value)
}

fn bounds_csv(rows: &[BoundsRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["alpha", "gamma", "m", "fraction", "decimal"])
        .expect("in-memory write");
    for r in rows {
        w.write_record([&r.alpha, &r.gamma, &r.m, &r.fraction, &r.decimal])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn run_bounds(args: BoundsArgs) -> Outcome {
    if args.grid {
        return emit(&args.out, &bounds_csv(&standard_grid()?));
    }
    let alphas = match args.sweep {
        Some(steps) => alpha_sweep(steps),
        None => args.alpha.clone(),
    };
    let mut ms = args.m.clone();
    if args.asymptotic && !ms.contains(&StrategyCount::Infinite) {
        ms.push(StrategyCount::Infinite);
    }
    if alphas.is_empty() || args.gamma.is_empty() || ms.is_empty() {
        return Err(Error::Argument(
            "need --alpha (or --sweep), --gamma and --m, or --grid".into(),
        )
        .into());
    }
    let rows = bounds_table(&alphas, &args.gamma, &ms)?;
    if rows.len() == 1 {
        return emit(&args.out, &rows[0].fraction);
    }
    emit(&args.out, &bounds_csv(&rows))
}

fn run_audit(args: AuditArgs) -> Outcome {
    let loaded = AnyGame::load(&args.input)?;
    let forced = match &args.cert {
        Some(path) => Some(PotentialCertificate::from_json(&read(path)?)?),
        None => None,
    };
    let exec = Exec::default();
    let (cert, report) = match &loaded {
        AnyGame::Instance(g) => {
            let cert = match forced {
                Some(c) => c,
                None => match cc_recover(g) {
                    Ok(c) => c,
                    Err(f) => {
                        emit_json(
                            &args.out,
                            &json!({"cc": false, "edge": f.edge, "cycle": f.cycle, "reason": f.reason}),
                        )?;
                        return Err(Failure::Verification(format!("no CC certificate: {f}")));
                    }
                },
            };
            let pot = PairwisePotential::new(g, &cert)?;
            let report = if args.exhaustive {
                exhaustive_audit(g, &pot, ENUMERATION_LIMIT, exec)?
            } else {
                ordinal_audit(g, &pot, args.trials, args.seed, exec)
            };
            (cert, report)
        }
        AnyGame::Hypergraph(g) => {
            let cert = match forced {
                Some(c) => c,
                None => match hypergraph_cc_recover(g) {
                    Ok(c) => c,
                    Err(f) => {
                        emit_json(
                            &args.out,
                            &json!({"cc": false, "edge": f.edge, "cycle": f.cycle, "reason": f.reason}),
                        )?;
                        return Err(Failure::Verification(format!("no CC certificate: {f}")));
                    }
                },
            };
            let pot = HypergraphPotential::new(g, &cert)?;
            let report = if args.exhaustive {
                exhaustive_audit(g, &pot, ENUMERATION_LIMIT, exec)?
            } else {
                ordinal_audit(g, &pot, args.trials, args.seed, exec)
            };
            (cert, report)
        }
        _ => {
            return Err(Error::Argument("audit needs an instance or hypergraph file".into()).into())
        }
    };
    let counterexample = report.counterexample.as_ref().map(|c| {
        json!({
            "profile": c.profile.to_one_based(),
            "player": c.player,
            "strategy": c.strategy + 1,
            "delta_utility": n_str(&c.delta_utility),
            "delta_potential": n_str(&c.delta_potential),
        })
    });
    let value = json!({
        "cc": true,
        "gamma": cert.gamma.iter().map(n_str).collect::<Vec<_>>(),
        "checked": report.checked,
        "violations": report.violations,
        "counterexample": counterexample,
    });
    emit_json(&args.out, &value)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "{} sign violations",
            report.violations
        )))
    }
}

/// A profile is a strong equilibrium iff no alternative makes every mover
/// strictly better off.
fn has_strong_equilibrium(g: &GameInstance) -> Result<bool, Failure> {
    let one = Num::from_integer(1.into());
    let census = equilibrium_census(g, &one, CensusOptions::default())?;
    for row in &census.equilibria {
        if verify_approx_strong(g, &row.profile, &one, ENUMERATION_LIMIT, Exec::default())?
            .is_stable()
        {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Writes the first instance without a strong equilibrium to `--out`; the
/// summary on stdout says whether one was found.
fn run_search(args: SearchArgs) -> Outcome {
    for t in 0..args.tries {
        let seed = args.seed.wrapping_add(t);
        let g = scg::generators::random_symmetric(args.n, args.m, seed)?;
        if !has_strong_equilibrium(&g)? {
            if let Some(path) = &args.out {
                fs::write(path, scg::io::serialize_instance(&g))
                    .map_err(|e| Failure::Io(path.clone(), e))?;
            }
            return emit_json(&None, &json!({"found": true, "seed": seed, "tried": t + 1}));
        }
    }
    emit_json(&None, &json!({"found": false, "tried": args.tries}))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Solve(a) => run_solve(a),
        Command::Verify(a) => run_verify(a),
        Command::Census(a) => run_census(a),
        Command::Payments(a) => run_payments(a),
        Command::Bounds(a) => run_bounds(a),
        Command::AuditPotential(a) => run_audit(a),
        Command::SearchNoSne(a) => run_search(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e @ Error::TooLarge { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(4)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn rational_flags_parse() {
        assert_eq!(n_str(&num("8/14").unwrap()), "4/7");
        assert!(num("x").is_err());
    }
}
