//! `sosbid` — generate, solve, enumerate, convert and benchmark bid
//! optimization instances.
//!
//! Exit codes: 0 success, 1 infeasible (or a solution that fails
//! verification), 2 limit hit without an incumbent, 3 input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sosbid::generate::{generate_instance, scale_suite, CountRange, CurveShape, GenParams};
use sosbid::io::{parse_solution, read_mps, run_benchmark, values_from_columns, write_mps, write_solution, BenchCase};
use sosbid::model::{build_model, toy, Instance, LpModel, SosType};
use sosbid::oracle::{enumerate_sos1, enumerate_sos2, verify, Interval, DEFAULT_CAP};
use sosbid::search::{branch_and_bound, campaign_bids, Limits, SearchOptions, SearchStatus, Strategy};

#[derive(Debug)]
enum Failure {
    Infeasible(String),
    NoIncumbent(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Infeasible(_) => 1,
            Failure::NoIncumbent(_) => 2,
            Failure::Input(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Infeasible(m) | Failure::NoIncumbent(m) | Failure::Input(m) => m,
        }
    }
}

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

#[derive(Parser)]
#[command(name = "sosbid", version, about = "Budget-constrained bid optimization with SOS1/SOS2 branch and bound")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance as JSON.
    Generate(GenerateArgs),
    /// Solve an instance (JSON) or model (MPS).
    Solve(SolveArgs),
    /// Exhaustively enumerate a small instance.
    Oracle(OracleArgs),
    /// Convert instance JSON to MPS, or MPS to model JSON.
    Convert(ConvertArgs),
    /// Run every strategy over a suite and print the degradation CSV.
    Bench(BenchArgs),
    /// Check a solution file against an instance.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Toy {
    T1,
    TwoBusiness,
    FixingTrap,
}

#[derive(Args, Clone)]
struct GenFlags {
    #[arg(long, default_value_t = 1)]
    businesses: usize,
    /// Campaigns per business, `N` or `MIN-MAX`.
    #[arg(long, default_value = "5")]
    campaigns: CountRange,
    /// Levels per campaign including do-nothing, `N` or `MIN-MAX`.
    #[arg(long, default_value = "4")]
    levels: CountRange,
    #[arg(long, default_value_t = 0.7)]
    budget_tightness: f64,
    #[arg(long, default_value_t = 2.0)]
    impression_tightness: f64,
    /// uniform, front-loaded or back-loaded.
    #[arg(long, default_value = "uniform")]
    curve_shape: CurveShape,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GenFlags {
    fn params(&self) -> GenParams {
        GenParams {
            businesses: self.businesses,
            campaigns_per_business: self.campaigns,
            levels_per_campaign: self.levels,
            budget_tightness: self.budget_tightness,
            impression_tightness: self.impression_tightness,
            curve_shape: self.curve_shape,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    gen: GenFlags,
    /// Emit a built-in hand-checkable instance instead.
    #[arg(long, value_enum)]
    toy: Option<Toy>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SearchFlags {
    /// 1, 2, 3 or none.
    #[arg(long, default_value = "none")]
    strategy: Strategy,
    /// Set type to branch on (strategy 3 always uses 2).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    sos: u8,
    /// Stop at the first incumbent (default).
    #[arg(long, conflicts_with = "prove")]
    first_solution: bool,
    /// Search until optimality is proven within the gap.
    #[arg(long)]
    prove: bool,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    node_limit: Option<usize>,
    #[arg(long, default_value_t = 1e-4)]
    gap: f64,
    /// Print measured times; without it times print as NA so runs are byte-identical.
    #[arg(long)]
    timing: bool,
}

impl SearchFlags {
    fn options(&self) -> Result<SearchOptions<f64>, Failure> {
        let requested = if self.sos == 2 { SosType::Sos2 } else { SosType::Sos1 };
        let time = match self.time_limit {
            Some(s) if !(s.is_finite() && s >= 0.0) => return Err(input(format!("--time-limit must be non-negative, got {s}"))),
            Some(s) => Some(Duration::from_secs_f64(s)),
            None => None,
        };
        if !(self.gap.is_finite() && self.gap >= 0.0) {
            return Err(input(format!("--gap must be non-negative, got {}", self.gap)));
        }
        let mut opts = SearchOptions {
            strategy: self.strategy,
            sos_type: self.strategy.sos_type(requested),
            limits: Limits { time, nodes: self.node_limit, gap: self.gap, first_solution: !self.prove },
            ..SearchOptions::default()
        };
        apply_env(&mut opts)?;
        Ok(opts)
    }
}

/// Tolerance overrides, read from the environment.
fn apply_env(opts: &mut SearchOptions<f64>) -> Result<(), Failure> {
    let slots: [(&str, &mut f64); 5] = [
        ("SOSBID_FEAS_TOL", &mut opts.simplex.feasibility_tol),
        ("SOSBID_OPT_TOL", &mut opts.simplex.optimality_tol),
        ("SOSBID_ZERO_TOL", &mut opts.zero_tol),
        ("SOSBID_NEAR_ONE_TOL", &mut opts.near_one_tol),
        ("SOSBID_RC_TOL", &mut opts.rc_tol),
    ];
    for (name, slot) in slots {
        if let Some(v) = env_f64(name)? {
            *slot = v;
        }
    }
    Ok(())
}

fn env_f64(name: &str) -> Result<Option<f64>, Failure> {
    match std::env::var(name) {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => Ok(Some(v)),
            _ => Err(input(format!("{name}: '{s}' is not a non-negative number"))),
        },
        Err(_) => Ok(None),
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON, or an MPS file (no bids are reported for MPS input).
    input: PathBuf,
    #[command(flatten)]
    search: SearchFlags,
    /// Also write the model as MPS.
    #[arg(long)]
    mps_out: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    sos: u8,
    /// Largest number of patterns to enumerate.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    /// `.json` instance or `.mps` model.
    input: PathBuf,
    /// Output path; its extension picks nothing, the input's does.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance JSON files; the model name is the file stem.
    instances: Vec<PathBuf>,
    /// Generate one instance per SOS count, named 1, 2, ... in order.
    #[arg(long, value_delimiter = ',')]
    scale: Vec<usize>,
    #[command(flatten)]
    gen: GenFlags,
    /// Strategies to run, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "none,1,2,3")]
    strategies: Vec<Strategy>,
    #[command(flatten)]
    search: SearchFlags,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    solution: PathBuf,
    /// Largest allowed row or bound violation (scaled by the row's largest coefficient).
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    Instance::from_json(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn is_mps(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("mps"))
}

fn generate(args: GenerateArgs) -> Result<(), Failure> {
    let instance = match args.toy {
        Some(Toy::T1) => toy::t1(),
        Some(Toy::TwoBusiness) => toy::two_business(),
        Some(Toy::FixingTrap) => toy::fixing_trap(),
        None => generate_instance(&args.gen.params()).map_err(input)?,
    };
    emit(args.output.as_deref(), &(instance.to_json() + "\n"))
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    let opts = args.search.options()?;
    let (instance, model): (Option<Instance>, LpModel<f64>) = if is_mps(&args.input) {
        let model = read_mps(&read(&args.input)?).map_err(|e| input(format!("{}: {e}", args.input.display())))?;
        (None, model)
    } else {
        let instance = load_instance(&args.input)?;
        let model = build_model(&instance).map_err(input)?;
        (Some(instance), model)
    };
    if let Some(p) = &args.mps_out {
        emit(Some(p), &write_mps(&model))?;
    }
    let result = branch_and_bound(&model, &opts);
    let bids = match (&instance, &result.solution) {
        (Some(inst), Some(x)) => campaign_bids(inst, &model, x, opts.zero_tol),
        _ => Vec::new(),
    };
    let text = write_solution(&result.report, result.solution.as_deref(), &model, &bids, opts.zero_tol, args.search.timing);
    emit(args.output.as_deref(), &text)?;
    match result.report.status {
        SearchStatus::Infeasible | SearchStatus::Unbounded => Err(Failure::Infeasible(format!("model is {}", result.report.status))),
        SearchStatus::LimitReached if result.solution.is_none() => Err(Failure::NoIncumbent("limit reached before any incumbent".into())),
        _ => Ok(()),
    }
}

fn oracle(args: OracleArgs) -> Result<(), Failure> {
    let instance = load_instance(&args.input)?;
    if let Some(v) = sosbid::model::validate_instance(&instance).first() {
        return Err(input(v));
    }
    let mut out = String::new();
    if args.sos == 1 {
        let best = enumerate_sos1(&instance, args.cap).map_err(input)?;
        out += &format!("OBJECTIVE {:.12}\n", best.objective);
        for (c, j) in instance.campaigns.iter().zip(&best.levels) {
            out += &format!("LEVEL {} {j}\n", c.id);
        }
    } else {
        let best = enumerate_sos2(&instance, args.cap).map_err(input)?;
        out += &format!("OBJECTIVE {:.12}\n", best.objective);
        for (c, iv) in instance.campaigns.iter().zip(&best.intervals) {
            match *iv {
                Interval::Single(j) => out += &format!("LEVEL {} {j}\n", c.id),
                Interval::Pair { lower, weights: (a, b) } => {
                    out += &format!("LEVEL {} {lower} {a:.12} {} {b:.12}\n", c.id, lower + 1);
                }
            }
        }
    }
    emit(args.output.as_deref(), &out)
}

fn convert(args: ConvertArgs) -> Result<(), Failure> {
    let text = if is_mps(&args.input) {
        let model: LpModel<f64> = read_mps(&read(&args.input)?).map_err(|e| input(format!("{}: {e}", args.input.display())))?;
        model_json(&model)
    } else {
        let model: LpModel<f64> = build_model(&load_instance(&args.input)?).map_err(input)?;
        write_mps(&model)
    };
    emit(args.output.as_deref(), &text)
}

/// The model as JSON: the instance data behind an MPS file (bids, CTR/CPC
/// split, business grouping) is not recoverable, so this is the model itself.
fn model_json(model: &LpModel<f64>) -> String {
    let columns: Vec<_> = model
        .columns
        .iter()
        .map(|c| json!({ "name": c.name, "objective": c.objective, "lower": c.lower, "upper": c.upper }))
        .collect();
    let rows: Vec<_> = model
        .rows
        .iter()
        .map(|r| {
            let coefficients: Vec<_> = r.coefficients.iter().map(|&(j, v)| json!([model.columns[j].name, v])).collect();
            json!({ "name": r.name, "sense": format!("{:?}", r.sense), "rhs": r.rhs, "coefficients": coefficients })
        })
        .collect();
    let sets: Vec<_> = model
        .sos_sets
        .iter()
        .map(|s| {
            let members: Vec<_> = s.members.iter().map(|&j| &model.columns[j].name).collect();
            json!({ "name": s.name, "type": s.sos_type.as_u8(), "members": members, "weights": s.weights })
        })
        .collect();
    let doc = json!({ "name": model.name, "sense": format!("{:?}", model.sense), "columns": columns, "rows": rows, "sos": sets });
    serde_json::to_string_pretty(&doc).expect("model serializes") + "\n"
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let opts = args.search.options()?;
    let mut named: Vec<(String, Instance)> = Vec::new();
    for path in &args.instances {
        let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        named.push((name, load_instance(path)?));
    }
    if !args.scale.is_empty() {
        let suite = scale_suite(&args.gen.params(), &args.scale).map_err(input)?;
        named.extend(suite.into_iter().enumerate().map(|(i, inst)| ((i + 1).to_string(), inst)));
    }
    if named.is_empty() {
        return Err(input("bench needs instance files or --scale"));
    }
    let cases: Vec<BenchCase<'_>> = named.iter().map(|(name, instance)| BenchCase { name: name.clone(), instance }).collect();
    let csv = run_benchmark(&cases, &args.strategies, &opts, args.search.timing).map_err(input)?;
    emit(args.output.as_deref(), &csv)
}

fn verify_cmd(args: VerifyArgs) -> Result<(), Failure> {
    let instance = load_instance(&args.instance)?;
    let file = parse_solution(&read(&args.solution)?).map_err(|e| input(format!("{}: {e}", args.solution.display())))?;
    if file.objective.is_none() {
        return Err(input(format!("{}: no solution to verify (status {})", args.solution.display(), file.status)));
    }
    let values = values_from_columns(&instance, &file.columns).map_err(input)?;
    let zero_tol = env_f64("SOSBID_ZERO_TOL")?.unwrap_or(1e-6);
    let problems = verify(&instance, &values, file.sos_type, zero_tol, args.tol);
    if problems.is_empty() {
        println!("OK objective {:.12}", sosbid::oracle::objective(&instance, &values));
        Ok(())
    } else {
        Err(Failure::Infeasible(problems.join("\n")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Oracle(a) => oracle(a),
        Command::Convert(a) => convert(a),
        Command::Bench(a) => bench(a),
        Command::Verify(a) => verify_cmd(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("sosbid: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
