//! The `hsdp` command-line tool.
//!
//! Grammar: `hsdp <command> [subcommand] [flags]`. Scalar flags resolve as
//! command line > `--config` JSON file > built-in default; `HSDP_SEED`
//! replaces only the default seed. Every order parameter can be given in
//! γ-space (`--gamma`) or ε-space (`--eps`), never both.
//!
//! Exit codes: 0 success, 1 property failure, 2 I/O or parse error,
//! 3 validation or range error.

pub mod figures;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use hsdp_core::channel::ChannelFile;
use hsdp_core::contraction::{containment_check, EstimatorBudget};
use hsdp_core::divergence::{evaluate, Divergence, FGenerator, QUAD_TOL};
use hsdp_core::matrix::MatrixFile;
use hsdp_core::privacy::{compose_eps_delta, compose_heterogeneous, compose_homogeneous, dasgupta_bound, purify_delta, re_ldp_bound};
use hsdp_core::verify::{run_all, Fault, VerifyConfig};
use hsdp_core::{DensityOperator, Error, QuantumChannel};

use figures::{FigureKind, RevPinskerSpec, SweepMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable or unparsable input, unwritable output.
    Io(String),
    /// Inputs that parse but violate a precondition.
    Validation(String),
    /// A property suite found a counterexample.
    Property(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => EXIT_IO,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Property(_) => EXIT_PROPERTY,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Validation(m) | CliError::Property(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::MalformedMatrix(_) => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Formats a report value with 12 significant digits.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x > 0.0 { "inf".into() } else if x < 0.0 { "-inf".into() } else { "nan".into() };
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..12).contains(&exp) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - exp).max(0) as usize;
    // rounding may carry into one extra digit (9.99… → 10.0…)
    format!("{x:.decimals$}")
}

#[derive(Parser, Debug)]
#[command(name = "hsdp", version, about = "Hockey-stick divergences, SDPI bounds and privacy accounting")]
pub struct Cli {
    /// JSON object supplying values for flags that are not given
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a divergence between two state files
    #[command(subcommand)]
    Div(DivCommand),
    /// Decide membership of a channel in B^{γ,δ} (equivalently (ln γ, δ)-QLDP)
    Certify(CertifyArgs),
    /// Emit the data behind the three figures as CSV
    #[command(subcommand)]
    Figure(FigureCommand),
    /// Run the randomized property suites
    Verify(VerifyArgs),
    /// Privacy composition and bound calculators
    #[command(subcommand)]
    Privacy(PrivacyCommand),
}

#[derive(Args, Debug)]
struct StatePair {
    /// State file for ρ
    #[arg(long)]
    rho: PathBuf,
    /// State file for σ
    #[arg(long)]
    sigma: PathBuf,
}

#[derive(Args, Debug, Default)]
struct Order {
    /// Order γ ≥ 1
    #[arg(long, conflicts_with = "eps", allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Order in ε-space, γ = e^ε
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct OrderPrime {
    /// Evaluated order γ' ≥ 1
    #[arg(long = "gamma-prime", conflicts_with = "eps_prime", allow_negative_numbers = true)]
    gamma_prime: Option<f64>,
    /// Evaluated order in ε-space, γ' = e^ε'
    #[arg(long = "eps-prime", allow_negative_numbers = true)]
    eps_prime: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    stop: Option<f64>,
    /// Number of grid points (at least 2)
    #[arg(long)]
    points: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum DivCommand {
    /// Hockey-stick divergence E_γ(ρ‖σ)
    Egamma {
        #[command(flatten)]
        pair: StatePair,
        #[command(flatten)]
        order: Order,
    },
    /// Trace distance ½‖ρ − σ‖₁
    Trace {
        #[command(flatten)]
        pair: StatePair,
    },
    /// Max-relative entropy D_max(ρ‖σ)
    Dmax {
        #[command(flatten)]
        pair: StatePair,
    },
    /// Smoothed max-relative entropy
    SmoothDmax {
        #[command(flatten)]
        pair: StatePair,
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
    },
    /// f-divergence D_f(ρ‖σ)
    Fdiv {
        #[command(flatten)]
        pair: StatePair,
        /// kl, tv, chi2 or hockey_stick:<γ>
        #[arg(long)]
        generator: Option<String>,
        #[arg(long = "quad-tol")]
        quad_tol: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct BudgetArgs {
    #[arg(long)]
    restarts: Option<u64>,
    #[arg(long)]
    iters: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    /// Channel file with Kraus operators
    #[arg(long)]
    channel: PathBuf,
    #[command(flatten)]
    order: Order,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args, Debug)]
struct Output {
    /// Output file, `-` for stdout (the default)
    #[arg(long)]
    output: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    LambdaSweep,
    EpsilonSweep,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FigureName {
    Compare,
    Mixing,
    Revpinsker,
}

#[derive(Subcommand, Debug)]
enum FigureCommand {
    /// DPI, linear and non-linear SDPI curves: `t,dpi,linear,nonlinear`
    Compare {
        #[command(flatten)]
        order: Order,
        #[command(flatten)]
        order_prime: OrderPrime,
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Linear and non-linear mixing-time bounds: `beta,linear,nonlinear`
    Mixing {
        #[command(flatten)]
        order: Order,
        #[command(flatten)]
        order_prime: OrderPrime,
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Relative-entropy LDP bound against the prior bound: `x,ours_<tag>,prior_<tag>,…`
    Revpinsker {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Swept families: ε values for a λ-sweep, δ values for an ε-sweep
        #[arg(long = "family", allow_negative_numbers = true)]
        families: Vec<f64>,
        /// Fixed δ of a λ-sweep
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
        /// Fixed λ = m of an ε-sweep
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        tau: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Print a gnuplot script for a CSV produced by another figure command
    Gnuplot {
        #[arg(long, value_enum)]
        figure: FigureName,
        /// Path of the CSV file to plot
        #[arg(long)]
        data: String,
        /// Number of swept families in a revpinsker CSV
        #[arg(long, default_value_t = 3)]
        families: usize,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Instances per suite
    #[arg(long)]
    trials: Option<u64>,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Halve the SDPI bound to check that failures are reported
    #[arg(long = "inject-fault")]
    inject_fault: bool,
}

#[derive(Subcommand, Debug)]
enum PrivacyCommand {
    /// n-fold composition of an (ε, 0) mechanism reported at level ε'
    Compose {
        #[command(flatten)]
        order: Order,
        #[command(flatten)]
        order_prime: OrderPrime,
        #[arg(long)]
        n: Option<u64>,
    },
    /// Composition of (ε_i, 0) mechanisms; repeat --eps (or --gamma) per mechanism
    ComposeHetero {
        #[arg(long = "eps", conflicts_with = "gamma", allow_negative_numbers = true)]
        eps: Vec<f64>,
        #[arg(long = "gamma", allow_negative_numbers = true)]
        gamma: Vec<f64>,
    },
    /// n-fold composition of an (ε, δ) mechanism reported at level ε'
    ComposeEpsdelta {
        #[command(flatten)]
        order: Order,
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
        #[arg(long)]
        n: Option<u64>,
        #[command(flatten)]
        order_prime: OrderPrime,
    },
    /// Repetitions that turn an (ε, δ) mechanism into an (ε', 0) one
    Purify {
        #[command(flatten)]
        order: Order,
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
        #[command(flatten)]
        order_prime: OrderPrime,
        /// Smallest eigenvalue of the fixed point
        #[arg(long = "lambda-min", allow_negative_numbers = true)]
        lambda_min: Option<f64>,
    },
    /// Relative-entropy bound for an (ε, δ) mechanism, with the prior bound for comparison
    BoundRe {
        #[command(flatten)]
        order: Order,
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        tau: Option<f64>,
        /// inf over states of λ_min of the output
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
        /// Truncation mass of the prior bound (defaults to λ)
        #[arg(long, allow_negative_numbers = true)]
        m: Option<f64>,
    },
}

/// Values from `--config`, keyed by flag name with `_` for `-`.
#[derive(Debug, Default)]
struct Config {
    values: Map<String, Value>,
    source: String,
}

impl Config {
    fn load(path: Option<&Path>) -> CliResult<Config> {
        let Some(path) = path else { return Ok(Config::default()) };
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        match serde_json::from_str::<Value>(&text) {
            Ok(Value::Object(values)) => Ok(Config { values, source: path.display().to_string() }),
            Ok(_) => Err(CliError::Io(format!("{}: config must be a JSON object", path.display()))),
            Err(e) => Err(CliError::Io(format!("{}: {e}", path.display()))),
        }
    }

    fn f64(&self, key: &str) -> CliResult<Option<f64>> {
        match self.values.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| CliError::Io(format!("{}: `{key}` must be a number", self.source))),
        }
    }

    fn u64(&self, key: &str) -> CliResult<Option<u64>> {
        match self.values.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_u64()
                .map(Some)
                .ok_or_else(|| CliError::Io(format!("{}: `{key}` must be a non-negative integer", self.source))),
        }
    }

    fn f64_list(&self, key: &str) -> CliResult<Option<Vec<f64>>> {
        match self.values.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| CliError::Io(format!("{}: `{key}` must hold numbers", self.source))))
                .collect::<CliResult<Vec<_>>>()
                .map(Some),
            Some(_) => Err(CliError::Io(format!("{}: `{key}` must be an array", self.source))),
        }
    }

    fn scalar(&self, flag: Option<f64>, key: &str, default: Option<f64>) -> CliResult<f64> {
        if let Some(v) = flag {
            return Ok(v);
        }
        self.f64(key)?
            .or(default)
            .ok_or_else(|| CliError::Validation(format!("missing required value --{}", key.replace('_', "-"))))
    }

    fn integer(&self, flag: Option<u64>, key: &str, default: Option<u64>) -> CliResult<u64> {
        if let Some(v) = flag {
            return Ok(v);
        }
        self.u64(key)?
            .or(default)
            .ok_or_else(|| CliError::Validation(format!("missing required value --{}", key.replace('_', "-"))))
    }

    /// γ from `--gamma`/`--eps` (or their config keys), canonical form γ.
    fn gamma(&self, gamma: Option<f64>, eps: Option<f64>, keys: (&str, &str), default: Option<f64>) -> CliResult<f64> {
        match (gamma, eps) {
            (Some(g), None) => return Ok(g),
            (None, Some(e)) => return Ok(e.exp()),
            (Some(_), Some(_)) => {
                return Err(CliError::Validation(format!("give only one of --{} and --{}", dash(keys.0), dash(keys.1))))
            }
            (None, None) => {}
        }
        match (self.f64(keys.0)?, self.f64(keys.1)?) {
            (Some(_), Some(_)) => Err(CliError::Validation(format!("{}: give only one of `{}` and `{}`", self.source, keys.0, keys.1))),
            (Some(g), None) => Ok(g),
            (None, Some(e)) => Ok(e.exp()),
            (None, None) => default.ok_or_else(|| {
                CliError::Validation(format!("missing required value --{} (or --{})", dash(keys.0), dash(keys.1)))
            }),
        }
    }

    fn order(&self, o: &Order, default: Option<f64>) -> CliResult<f64> {
        let g = self.gamma(o.gamma, o.eps, ("gamma", "eps"), default)?;
        check_order(g, "gamma")
    }

    fn order_prime(&self, o: &OrderPrime, default: Option<f64>) -> CliResult<f64> {
        let g = self.gamma(o.gamma_prime, o.eps_prime, ("gamma_prime", "eps_prime"), default)?;
        check_order(g, "gamma'")
    }

    fn seed(&self, flag: Option<u64>) -> CliResult<u64> {
        if let Some(s) = flag {
            return Ok(s);
        }
        if let Some(s) = self.u64("seed")? {
            return Ok(s);
        }
        match std::env::var("HSDP_SEED") {
            Ok(v) => v.trim().parse().map_err(|_| CliError::Validation(format!("HSDP_SEED = {v:?} is not a non-negative integer"))),
            Err(_) => Ok(0),
        }
    }

    fn budget(&self, b: &BudgetArgs) -> CliResult<EstimatorBudget> {
        let d = EstimatorBudget::default();
        Ok(EstimatorBudget {
            restarts: self.integer(b.restarts, "restarts", Some(d.restarts as u64))? as usize,
            iters: self.integer(b.iters, "iters", Some(d.iters as u64))? as usize,
            seed: self.seed(b.seed)?,
        })
    }

    fn grid(&self, g: &GridArgs, default: (f64, f64, u64)) -> CliResult<Vec<f64>> {
        let start = self.scalar(g.start, "start", Some(default.0))?;
        let stop = self.scalar(g.stop, "stop", Some(default.1))?;
        let points = self.integer(g.points, "points", Some(default.2))?;
        Ok(figures::grid(start, stop, points as usize)?)
    }
}

fn dash(key: &str) -> String {
    key.replace('_', "-")
}

fn check_order(g: f64, name: &str) -> CliResult<f64> {
    if g >= 1.0 && g.is_finite() {
        Ok(g)
    } else {
        Err(CliError::Validation(format!("{name} = {g} must be finite and >= 1 (eps >= 0)")))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path, e: Error) -> CliError {
    match CliError::from(e) {
        CliError::Io(m) => CliError::Io(format!("{}: {m}", path.display())),
        CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn read_state(path: &Path) -> CliResult<DensityOperator> {
    DensityOperator::from_file(read_json::<MatrixFile>(path)?).map_err(|e| with_path(path, e))
}

fn read_channel(path: &Path) -> CliResult<QuantumChannel> {
    QuantumChannel::from_file(read_json::<ChannelFile>(path)?).map_err(|e| with_path(path, e))
}

fn emit(output: &Output, content: &str, out: &mut dyn Write) -> CliResult<()> {
    match output.output.as_deref() {
        None | Some("-") => out.write_all(content.as_bytes()).map_err(|e| CliError::Io(format!("cannot write stdout: {e}"))),
        Some(path) => fs::write(path, content).map_err(|e| CliError::Io(format!("cannot write {path}: {e}"))),
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io(format!("cannot write output: {e}"))
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Div(c) => cmd_div(c, &cfg, out),
        Command::Certify(a) => cmd_certify(a, &cfg, out),
        Command::Figure(c) => cmd_figure(c, &cfg, out),
        Command::Verify(a) => cmd_verify(a, &cfg, out, err),
        Command::Privacy(c) => cmd_privacy(c, &cfg, out),
    }
}

fn cmd_div(c: &DivCommand, cfg: &Config, out: &mut dyn Write) -> CliResult<()> {
    let (pair, which) = match c {
        DivCommand::Egamma { pair, order } => {
            let gamma = cfg.gamma(order.gamma, order.eps, ("gamma", "eps"), None)?;
            (pair, Divergence::HockeyStick { gamma })
        }
        DivCommand::Trace { pair } => (pair, Divergence::TraceDistance),
        DivCommand::Dmax { pair } => (pair, Divergence::DMax),
        DivCommand::SmoothDmax { pair, delta } => (pair, Divergence::SmoothDMax { delta: cfg.scalar(*delta, "delta", None)? }),
        DivCommand::Fdiv { pair, generator, quad_tol } => {
            let name = match generator {
                Some(g) => g.clone(),
                None => cfg.values.get("generator").and_then(Value::as_str).unwrap_or("kl").to_string(),
            };
            let generator = FGenerator::by_name(&name)?;
            (pair, Divergence::F { generator, quad_tol: cfg.scalar(*quad_tol, "quad_tol", Some(QUAD_TOL))? })
        }
    };
    let rho = read_state(&pair.rho)?;
    let sigma = read_state(&pair.sigma)?;
    let v = evaluate(&which, &rho, &sigma)?;
    writeln!(out, "{}", fmt12(v.value)).map_err(io)?;
    writeln!(out, "method: {}", v.method).map_err(io)
}

fn cmd_certify(a: &CertifyArgs, cfg: &Config, out: &mut dyn Write) -> CliResult<()> {
    let gamma = cfg.order(&a.order, None)?;
    let delta = cfg.scalar(a.delta, "delta", None)?;
    let budget = cfg.budget(&a.budget)?;
    let n = read_channel(&a.channel)?;
    let cert = containment_check(&n, gamma, delta, budget)?;
    writeln!(out, "verdict: {}", cert.verdict).map_err(io)?;
    writeln!(out, "reason: {}", cert.reason).map_err(io)?;
    writeln!(out, "evidence: {}", fmt12(cert.numeric_evidence)).map_err(io)
}

fn cmd_figure(c: &FigureCommand, cfg: &Config, out: &mut dyn Write) -> CliResult<()> {
    match c {
        FigureCommand::Compare { order, order_prime, delta, grid, output } => {
            let gamma = cfg.order(order, Some(6.0))?;
            let gamma_prime = cfg.order_prime(order_prime, Some(2.5))?;
            let delta = cfg.scalar(*delta, "delta", Some(0.01))?;
            let ts = cfg.grid(grid, (0.0, 1.0, 201))?;
            let rows = figures::compare_rows(gamma, gamma_prime, delta, &ts)?;
            emit(output, &figures::compare_csv(&rows), out)
        }
        FigureCommand::Mixing { order, order_prime, delta, grid, output } => {
            let gamma = cfg.order(order, Some(8.0))?;
            let gamma_prime = cfg.order_prime(order_prime, Some(3.0))?;
            let delta = cfg.scalar(*delta, "delta", Some(0.0))?;
            let betas = cfg.grid(grid, (0.0, 1.0, 101))?;
            let rows = figures::mixing_rows(gamma, gamma_prime, delta, &betas)?;
            emit(output, &figures::mixing_csv(&rows), out)
        }
        FigureCommand::Revpinsker { mode, families, delta, lambda, tau, grid, output } => {
            let mut spec = match mode {
                Mode::LambdaSweep => RevPinskerSpec::lambda_default(),
                Mode::EpsilonSweep => RevPinskerSpec::epsilon_default(),
            };
            if !families.is_empty() {
                spec.families = families.clone();
            } else if let Some(list) = cfg.f64_list("families")? {
                spec.families = list;
            }
            spec.fixed = match spec.mode {
                SweepMode::Lambda => cfg.scalar(*delta, "delta", Some(spec.fixed))?,
                SweepMode::Epsilon => cfg.scalar(*lambda, "lambda", Some(spec.fixed))?,
            };
            spec.tau = cfg.scalar(*tau, "tau", Some(spec.tau))?;
            let (start, stop) = spec.default_range();
            let xs = cfg.grid(grid, (start, stop, 50))?;
            let table = figures::revpinsker_table(&spec, &xs)?;
            emit(output, &figures::revpinsker_csv(&table), out)
        }
        FigureCommand::Gnuplot { figure, data, families } => {
            let kind = match figure {
                FigureName::Compare => FigureKind::Compare,
                FigureName::Mixing => FigureKind::Mixing,
                FigureName::Revpinsker => FigureKind::RevPinsker,
            };
            out.write_all(figures::gnuplot_script(kind, data, *families).as_bytes()).map_err(io)
        }
    }
}

fn cmd_verify(a: &VerifyArgs, cfg: &Config, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let defaults = VerifyConfig::default();
    let trials = cfg.integer(a.trials, "trials", Some(defaults.trials as u64))? as usize;
    let seed = cfg.seed(a.budget.seed)?;
    let budget = EstimatorBudget {
        restarts: cfg.integer(a.budget.restarts, "restarts", Some(defaults.budget.restarts as u64))? as usize,
        iters: cfg.integer(a.budget.iters, "iters", Some(defaults.budget.iters as u64))? as usize,
        seed,
    };
    let fault = if a.inject_fault { Fault::HalveSdpiBound } else { Fault::None };
    let report = run_all(&VerifyConfig { seed, trials, budget, fault })?;
    for s in &report.suites {
        let status = if s.passed() { "pass" } else { "FAIL" };
        writeln!(out, "{:<22} {status}  checks={} failures={} skipped={}", s.name, s.checks, s.failures, s.skipped).map_err(io)?;
    }
    let total = report.total_checks();
    writeln!(out, "seed={} trials={} total checks={}", seed, trials, total).map_err(io)?;
    if total == 0 {
        let _ = writeln!(err, "warning: 0 checks were run");
    }
    if report.passed() {
        return Ok(());
    }
    for s in report.suites.iter().filter(|s| !s.passed()) {
        if let Some(ce) = &s.counterexample {
            let dump = serde_json::to_string_pretty(ce).unwrap_or_default();
            writeln!(out, "counterexample ({}):\n{dump}", s.name).map_err(io)?;
        }
    }
    let failed: Vec<&str> = report.suites.iter().filter(|s| !s.passed()).map(|s| s.name.as_str()).collect();
    Err(CliError::Property(format!("property failures in {}", failed.join(", "))))
}

fn to_eps(gamma: f64) -> f64 {
    gamma.ln()
}

fn positive_n(n: u64) -> CliResult<u32> {
    u32::try_from(n)
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Validation(format!("n = {n} must be a positive 32-bit integer")))
}

fn cmd_privacy(c: &PrivacyCommand, cfg: &Config, out: &mut dyn Write) -> CliResult<()> {
    match c {
        PrivacyCommand::Compose { order, order_prime, n } => {
            let eps = to_eps(cfg.order(order, None)?);
            let eps_prime = to_eps(cfg.order_prime(order_prime, None)?);
            let n = positive_n(cfg.integer(*n, "n", None)?)?;
            print_composition(&compose_homogeneous(eps, n, eps_prime)?, out)
        }
        PrivacyCommand::ComposeHetero { eps, gamma } => {
            let list: Vec<f64> = if !eps.is_empty() {
                eps.clone()
            } else if !gamma.is_empty() {
                gamma.iter().map(|&g| check_order(g, "gamma").map(to_eps)).collect::<CliResult<_>>()?
            } else if let Some(list) = cfg.f64_list("eps")? {
                list
            } else {
                return Err(CliError::Validation("give at least one --eps (or --gamma)".into()));
            };
            print_composition(&compose_heterogeneous(&list)?, out)
        }
        PrivacyCommand::ComposeEpsdelta { order, delta, n, order_prime } => {
            let eps = to_eps(cfg.order(order, None)?);
            let delta = cfg.scalar(*delta, "delta", None)?;
            let n = positive_n(cfg.integer(*n, "n", None)?)?;
            let eps_prime = to_eps(cfg.order_prime(order_prime, None)?);
            print_composition(&compose_eps_delta(eps, delta, n, eps_prime)?, out)
        }
        PrivacyCommand::Purify { order, delta, order_prime, lambda_min } => {
            let eps = to_eps(cfg.order(order, None)?);
            let delta = cfg.scalar(*delta, "delta", None)?;
            let eps_prime = to_eps(cfg.order_prime(order_prime, None)?);
            let lambda_min = cfg.scalar(*lambda_min, "lambda_min", None)?;
            let n = purify_delta(eps, delta, eps_prime, lambda_min)?;
            writeln!(out, "n: {n}").map_err(io)?;
            writeln!(out, "epsilon_out: {}", fmt12(eps_prime)).map_err(io)?;
            writeln!(out, "delta_out: 0").map_err(io)?;
            writeln!(out, "rule: purification").map_err(io)
        }
        PrivacyCommand::BoundRe { order, delta, tau, lambda, m } => {
            let eps = to_eps(cfg.order(order, None)?);
            let delta = cfg.scalar(*delta, "delta", None)?;
            let tau = cfg.scalar(*tau, "tau", None)?;
            let lambda = cfg.scalar(*lambda, "lambda", None)?;
            let m = cfg.scalar(*m, "m", Some(lambda))?;
            writeln!(out, "bound: {}", fmt12(re_ldp_bound(eps, delta, tau, lambda)?)).map_err(io)?;
            match dasgupta_bound(eps, delta, tau, m) {
                Ok(prior) => writeln!(out, "prior: {}", fmt12(prior)).map_err(io)?,
                Err(_) => writeln!(out, "prior: undefined").map_err(io)?,
            }
            writeln!(out, "rule: re_ldp").map_err(io)
        }
    }
}

fn print_composition(r: &hsdp_core::privacy::CompositionResult, out: &mut dyn Write) -> CliResult<()> {
    writeln!(out, "epsilon_out: {}", fmt12(r.epsilon_out)).map_err(io)?;
    writeln!(out, "delta_out: {}", fmt12(r.delta_out)).map_err(io)?;
    if let Some(ratio) = r.raw_ratio {
        writeln!(out, "raw_ratio: {}", fmt12(ratio)).map_err(io)?;
    }
    writeln!(out, "rule: {}", r.rule).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt12_examples() {
        assert_eq!(fmt12(0.15), "0.150000000000");
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(1.25f64.ln()), "0.223143551314");
        assert_eq!(fmt12(3.0), "3.00000000000");
        assert_eq!(fmt12(1e-9), "1.00000000000e-9");
        assert_eq!(fmt12(f64::INFINITY), "inf");
    }
}
