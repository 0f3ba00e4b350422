use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ghzv::analysis::{
    adversarial_num_tests, gme_single_test_region, gme_tests, num_tests, GmeKind, Scenario, VerificationPlan,
};
use ghzv::reports::{fig1, fig2, table1, write_csv};
use ghzv::simulator::{estimate_fidelity_run, run, write_jsonl, SourceSpec};
use ghzv::strategies::{build_named, Strategy, StrategyName, StrategyParams, HOMOGENEITY_TOL};

/// `println!` that exits quietly when stdout is closed (e.g. piped to `head`).
macro_rules! outln {
    ($($arg:tt)*) => {
        if writeln!(io::stdout(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    };
}

#[derive(Parser)]
#[command(name = "ghzv", version, about = "Optimal verification of GHZ and GHZ-like states")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct StrategyArgs {
    /// omega1..omega9 or omega5prime.
    #[arg(long)]
    strategy: String,
    /// Number of parties.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Local dimension (inferred from --lambdas when omitted).
    #[arg(long)]
    d: Option<usize>,
    /// Number of 2-design bases.
    #[arg(long)]
    m: Option<usize>,
    /// Mixing probability; defaults to the strategy's optimal value.
    #[arg(long)]
    p: Option<f64>,
    /// Second-largest eigenvalue for omega7 (default 1/e).
    #[arg(long)]
    beta: Option<f64>,
    /// GHZ-like amplitudes, e.g. 0.8367,0.5477 (normalised and sorted).
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
}

impl StrategyArgs {
    fn build(&self) -> Result<Strategy, Failure> {
        let name: StrategyName = self.strategy.parse().map_err(|e: ghzv::Error| Failure::Usage(e.to_string()))?;
        let params = StrategyParams {
            n: self.n,
            d: self.d,
            m: self.m,
            p: self.p,
            beta: self.beta,
            lambdas: self.lambdas.clone(),
        };
        Ok(build_named(name, &params)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GmeKindArg {
    Optimal,
    Plm,
    Zh,
}

#[derive(Subcommand)]
enum Command {
    /// Build a strategy and print its JSON description.
    Build {
        #[command(flatten)]
        s: StrategyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral data of a strategy.
    Gap {
        #[command(flatten)]
        s: StrategyArgs,
    },
    /// Number of tests for infidelity eps and significance delta.
    Ntests {
        /// Spectral gap; alternatively give --strategy.
        #[arg(long, conflicts_with = "strategy", required_unless_present = "strategy")]
        nu: Option<f64>,
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        /// Use the adversarial high-precision formula (needs --beta or --strategy).
        #[arg(long)]
        adversarial: bool,
    },
    /// Tests needed to certify genuine multipartite entanglement.
    Gme {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value = "optimal")]
        kind: GmeKindArg,
        /// Party count, used by --kind plm.
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Monte-Carlo run of a strategy against a source.
    Simulate {
        #[command(flatten)]
        s: StrategyArgs,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// target, depolarized:w or file:path.
        #[arg(long, default_value = "target")]
        source: String,
        /// Write the trial log as JSON lines.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fidelity estimate from a simulated run of a homogeneous strategy.
    Estimate {
        #[command(flatten)]
        s: StrategyArgs,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "target")]
        source: String,
    },
    /// Strategy comparison table as CSV.
    Table1 {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Odd prime local dimension for the qudit rows.
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Figure data: fig1.csv and fig2.csv in the output directory.
    Figdata {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Party counts for the GHZ-like curves.
        #[arg(long, value_delimiter = ',', default_value = "3")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        /// Number of angles in (0, pi/4].
        #[arg(long, default_value_t = 90)]
        steps: usize,
        /// Largest local dimension in fig1.csv.
        #[arg(long, default_value_t = 200)]
        d_max: usize,
    },
    /// Run the identity and consistency suite.
    Check,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<ghzv::Error> for Failure {
    fn from(e: ghzv::Error) -> Self {
        Failure::Numerical(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Numerical(format!("i/o: {e}"))
    }
}

fn open_out(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", path.display())))
}

fn print_json(v: &serde_json::Value) {
    outln!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Build { s, out } => {
            let strategy = s.build()?;
            let text = strategy.to_json();
            match out {
                Some(path) => writeln!(open_out(&path)?, "{text}")?,
                None => outln!("{text}"),
            }
        }
        Command::Gap { s } => {
            let strategy = s.build()?;
            let sd = strategy.spectral_data()?;
            let homogeneous = strategy.is_homogeneous(HOMOGENEITY_TOL)?;
            if cli.json {
                print_json(&json!({
                    "strategy": strategy.name, "beta": sd.beta, "nu": sd.nu, "tau": sd.tau,
                    "homogeneous": homogeneous, "tests": strategy.tests.len(),
                }));
            } else {
                outln!("strategy={} tests={}", strategy.name, strategy.tests.len());
                outln!("beta={:.12}", sd.beta);
                outln!("nu={:.12}", sd.nu);
                outln!("tau={:.12}", sd.tau);
                outln!("homogeneous={homogeneous}");
            }
        }
        Command::Ntests { nu, strategy, n, d, m, p, beta, lambdas, eps, delta, adversarial } => {
            let built = match &strategy {
                Some(name) => Some(StrategyArgs { strategy: name.clone(), n, d, m, p, beta, lambdas }.build()?),
                None => None,
            };
            let (count, label) = if adversarial {
                let b = match (&built, beta) {
                    (Some(s), _) => s.spectral_data()?.beta,
                    (None, Some(b)) => b,
                    (None, None) => return Err(Failure::Usage("--adversarial needs --beta or --strategy".into())),
                };
                (adversarial_num_tests(b, eps, delta)?, "high-precision approximation")
            } else {
                let nu = match (&built, nu) {
                    (Some(s), _) => s.spectral_data()?.nu,
                    (None, Some(nu)) => nu,
                    (None, None) => unreachable!("clap requires --nu or --strategy"),
                };
                (num_tests(&VerificationPlan::new(eps, delta, nu)?)?, "exact")
            };
            if cli.json {
                print_json(&json!({ "N": count, "eps": eps, "delta": delta, "kind": label }));
            } else {
                outln!("{count}");
            }
        }
        Command::Gme { d, delta, kind, n } => {
            let kind = match kind {
                GmeKindArg::Optimal => GmeKind::Optimal,
                GmeKindArg::Plm => GmeKind::Plm { n },
                GmeKindArg::Zh => GmeKind::Zh,
            };
            let count = gme_tests(d, delta, kind)?;
            let single = gme_single_test_region(d, delta, Scenario::Nonadversarial);
            let single_adv = gme_single_test_region(d, delta, Scenario::Adversarial);
            if cli.json {
                print_json(&json!({
                    "N_E": count, "d": d, "delta": delta,
                    "single_test_nonadversarial": single, "single_test_adversarial": single_adv,
                }));
            } else {
                outln!("{count} test{}", if count == 1 { "" } else { "s" });
            }
        }
        Command::Simulate { s, trials, seed, source, out } => {
            let spec: SourceSpec = source.parse().map_err(|e: ghzv::Error| Failure::Usage(e.to_string()))?;
            let strategy = s.build()?;
            let src = spec.resolve(&strategy.target)?;
            let (summary, records) = run(&strategy, &src, trials, seed)?;
            if let Some(path) = out {
                let mut w = open_out(&path)?;
                write_jsonl(&mut w, &records)?;
                w.flush()?;
            }
            if cli.json {
                outln!("{}", serde_json::to_string_pretty(&summary).expect("json"));
            } else {
                outln!("strategy={} seed={} trials={}", summary.strategy, summary.seed, summary.trials);
                outln!("passes={} pass_rate={:.6} decision={}", summary.passes, summary.pass_rate, summary.decision);
                if let (Some(f), Some(sd)) = (summary.fidelity, summary.fidelity_std) {
                    outln!("fidelity={f:.6} std={sd:.6}");
                }
            }
        }
        Command::Estimate { s, trials, seed, source } => {
            let spec: SourceSpec = source.parse().map_err(|e: ghzv::Error| Failure::Usage(e.to_string()))?;
            let strategy = s.build()?;
            let src = spec.resolve(&strategy.target)?;
            let (f, sd) = estimate_fidelity_run(&strategy, &src, trials, seed)?;
            if cli.json {
                print_json(&json!({ "fidelity": f, "std": sd, "trials": trials, "seed": seed }));
            } else {
                outln!("fidelity={f:.6} std={sd:.6}");
            }
        }
        Command::Table1 { n, d, eps, delta, out } => {
            let rows = table1(n, d, d, eps, delta)?;
            match out {
                Some(path) => write_csv(open_out(&path)?, &rows)?,
                None => write_csv(io::stdout().lock(), &rows)?,
            }
        }
        Command::Figdata { out, n, eps, delta, steps, d_max } => {
            std::fs::create_dir_all(&out)?;
            write_csv(open_out(&out.join("fig1.csv"))?, &fig1(d_max))?;
            write_csv(open_out(&out.join("fig2.csv"))?, &fig2(&n, steps, eps, delta)?)?;
            if !cli.json {
                outln!("wrote {} and {}", out.join("fig1.csv").display(), out.join("fig2.csv").display());
            }
        }
        Command::Check => {
            let results = ghzv::check::run_all();
            if cli.json {
                outln!("{}", serde_json::to_string_pretty(&results).expect("json"));
            } else {
                for r in &results {
                    outln!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
                }
            }
            if results.iter().any(|r| !r.passed) {
                return Err(Failure::Numerical("identity suite reported failures".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
