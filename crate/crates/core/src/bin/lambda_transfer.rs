use clap::{Parser, Subcommand, ValueEnum};
use lambda_transfer::congruence::{self, LevelChoice};
use lambda_transfer::ingest::{self, IngestConfig, Record};
use lambda_transfer::iwasawa::{self, FactorKind};
use lambda_transfer::quadfield::{brink_s_ell, ImagQuadField};
use lambda_transfer::report::{self, PipelineOptions};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "lambda-transfer",
    about = "Verify transfer hypotheses for residually congruent forms and compute the transferred anticyclotomic lambda-invariant",
    version
)]
struct Cli {
    /// The ordinary prime p.
    #[arg(long, global = true, default_value_t = 5)]
    p: u64,

    /// Positive squarefree D with K = Q(sqrt(-D)).
    #[arg(long, global = true, default_value_t = 51)]
    d: u64,

    /// Never touch the network; serve only fixtures and warm cache.
    #[arg(long, global = true)]
    offline: bool,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Emit::Text)]
    emit: Emit,

    /// Level fed to the Sturm bound.
    #[arg(long, global = true, value_enum, default_value_t = LevelArg::Lcm)]
    level: LevelArg,

    /// Run the Brink computation even where d_ell = 0 short-circuits it.
    #[arg(long, global = true)]
    audit_brink: bool,

    /// Treat pass_with_skips congruence verdicts as failures.
    #[arg(long, global = true)]
    strict_congruence: bool,

    /// Cache directory for remote curve records.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Base URL of the curve database serving GET {base}/{label}.
    #[arg(long, global = true, default_value = "https://example.invalid/curves")]
    base_url: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Lcm,
    Product,
}

impl From<LevelArg> for LevelChoice {
    fn from(l: LevelArg) -> Self {
        match l {
            LevelArg::Lcm => LevelChoice::Lcm,
            LevelArg::Product => LevelChoice::Product,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Conductor, reduction table, Tamagawa product, a_p, torsion evidence.
    Inspect { input: String },
    /// Residual congruence check up to the Sturm bound.
    Congruent { input1: String, input2: String },
    /// Local Euler factor and root multiplicity d_ell at one prime.
    Euler {
        input: String,
        #[arg(long)]
        ell: u64,
    },
    /// Brink decomposition count s_ell for a split prime.
    Brink {
        #[arg(long)]
        ell: u64,
    },
    /// Full hypothesis dossier for a single form.
    Verify { input: String },
    /// Hypothesis dossier for a pair plus the lambda-transfer formula.
    Transfer { input1: String, input2: String },
}

fn config_from(cli: &Cli) -> IngestConfig {
    let cache_dir = cli
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("LAMBDA_TRANSFER_CACHE").map(PathBuf::from))
        .unwrap_or_else(|| std::env::temp_dir().join("lambda-transfer-cache"));
    let mut config = IngestConfig::new(&cli.base_url, &cache_dir);
    config.offline = cli.offline;
    config
}

fn load(input: &str, config: &IngestConfig) -> Result<Record, String> {
    ingest::resolve_input(input, config).map_err(|e| e.to_string())
}

fn emit<T: Serialize>(emit: Emit, value: &T, text: String) {
    match emit {
        Emit::Json => println!("{}", serde_json::to_string_pretty(value).unwrap()),
        Emit::Text => print!("{text}"),
    }
}

fn input_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INPUT_ERROR)
}

#[derive(Serialize)]
struct EulerOut {
    schema: &'static str,
    ell: u64,
    p: u64,
    kind: FactorKind,
    a_ell: String,
    /// Coefficients of P_v(f)(X) mod p, constant term first.
    poly_mod_p: Vec<u64>,
    d_ell: u32,
}

#[derive(Serialize)]
struct BrinkOut {
    schema: &'static str,
    d: u64,
    p: u64,
    class_number: u64,
    result: lambda_transfer::quadfield::BrinkResult,
}

#[derive(Serialize)]
struct CongruentOut {
    schema: &'static str,
    f1: String,
    f2: String,
    report: congruence::CongruenceReport,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !lambda_transfer::arith::is_prime_u64(cli.p) {
        return input_error(&format!("p = {} is not prime", cli.p));
    }
    let config = config_from(&cli);
    match &cli.command {
        Command::Inspect { input } => {
            let rec = match load(input, &config) {
                Ok(r) => r,
                Err(e) => return input_error(&e),
            };
            match report::run_inspect(&rec, cli.p, Some(cli.d)) {
                Ok(rep) => {
                    let text = report::render_inspect_text(&rep);
                    emit(cli.emit, &rep, text);
                    ExitCode::SUCCESS
                }
                Err(e) => input_error(&e),
            }
        }
        Command::Congruent { input1, input2 } => {
            let (r1, r2) = match (load(input1, &config), load(input2, &config)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return input_error(&e),
            };
            let f1 = report::resolve_form(&r1);
            let f2 = report::resolve_form(&r2);
            match congruence::check_congruence(f1.as_form(), f2.as_form(), cli.p, cli.level.into())
            {
                Ok(rep) => {
                    let verdict = rep.verdict;
                    let out = CongruentOut {
                        schema: report::SCHEMA,
                        f1: f1.as_form().describe(),
                        f2: f2.as_form().describe(),
                        report: rep,
                    };
                    let text = format!(
                        "congruence of {} and {} mod {}: {:?} (Sturm bound {}, level {})\n",
                        out.f1,
                        out.f2,
                        cli.p,
                        out.report.verdict,
                        out.report.sturm_bound,
                        out.report.level_used
                    );
                    emit(cli.emit, &out, text);
                    match verdict {
                        congruence::Verdict::Fail => ExitCode::from(1),
                        _ => ExitCode::SUCCESS,
                    }
                }
                Err(e) => input_error(&e.to_string()),
            }
        }
        Command::Euler { input, ell } => {
            let rec = match load(input, &config) {
                Ok(r) => r,
                Err(e) => return input_error(&e),
            };
            let rf = report::resolve_form(&rec);
            let f = rf.as_form();
            let kind = FactorKind::from_reduction(f.local_kind(*ell));
            let a = match f.a_ell(*ell) {
                Some(a) => a,
                None => return input_error(&format!("no coefficient at ell = {ell}")),
            };
            let factor = match iwasawa::euler_factor(&a, *ell, kind, cli.p) {
                Ok(f) => f,
                Err(e) => return input_error(&e.to_string()),
            };
            let d = match iwasawa::d_ell(&factor, cli.p) {
                Ok(d) => d,
                Err(e) => return input_error(&e.to_string()),
            };
            let out = EulerOut {
                schema: report::SCHEMA,
                ell: *ell,
                p: cli.p,
                kind,
                a_ell: a.to_string(),
                poly_mod_p: factor.poly.coeffs().to_vec(),
                d_ell: d,
            };
            let text = format!(
                "ell = {}: kind {:?}, a_ell = {}, P_v mod {} = {:?}, d_ell = {}\n",
                out.ell, out.kind, out.a_ell, out.p, out.poly_mod_p, out.d_ell
            );
            emit(cli.emit, &out, text);
            ExitCode::SUCCESS
        }
        Command::Brink { ell } => {
            let k = match ImagQuadField::new(cli.d) {
                Ok(k) => k,
                Err(e) => return input_error(&e.to_string()),
            };
            match brink_s_ell(&k, *ell, cli.p) {
                Ok(result) => {
                    let text = format!(
                        "ell = {}: {}^h_K = a² + ab + {}·b² with (a, b) = ({}, {}); \
                         (a + bω)^{} = {} + {}·ω; t = v_{}(b*) = {}; s_ell = {}\n",
                        ell,
                        ell,
                        (cli.d + 1) / 4,
                        result.rep.0,
                        result.rep.1,
                        cli.p - 1,
                        result.astar,
                        result.bstar,
                        cli.p,
                        result.t,
                        result.s_ell
                    );
                    let out = BrinkOut {
                        schema: report::SCHEMA,
                        d: cli.d,
                        p: cli.p,
                        class_number: k.class_number(),
                        result,
                    };
                    emit(cli.emit, &out, text);
                    ExitCode::SUCCESS
                }
                Err(e) => input_error(&e.to_string()),
            }
        }
        Command::Verify { input } => {
            let rec = match load(input, &config) {
                Ok(r) => r,
                Err(e) => return input_error(&e),
            };
            match report::run_verify(&rec, cli.p, cli.d) {
                Ok(rep) => {
                    let text = report::render_verify_text(&rep);
                    let code = rep.outcome.exit_code();
                    emit(cli.emit, &rep, text);
                    ExitCode::from(code as u8)
                }
                Err(e) => input_error(&e),
            }
        }
        Command::Transfer { input1, input2 } => {
            let (r1, r2) = match (load(input1, &config), load(input2, &config)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return input_error(&e),
            };
            let opts = PipelineOptions {
                p: cli.p,
                d: cli.d,
                level_choice: cli.level.into(),
                strict_congruence: cli.strict_congruence,
                audit_brink: cli.audit_brink,
            };
            match report::run_transfer(&r1, &r2, &opts) {
                Ok(dossier) => {
                    let text = report::render_transfer_text(&dossier);
                    let code = dossier.outcome.exit_code();
                    emit(cli.emit, &dossier, text);
                    ExitCode::from(code as u8)
                }
                Err(e) => input_error(&e),
            }
        }
    }
}
