use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use locald::graph::{io::parse_graph, FamilySpec};
use locald::harness::{self, Algorithm, ExperimentSpec, Input, Suite};
use locald::ilp::{json::from_json, Sense};
use locald::sim::ConstantProfile;
use locald::Error;

#[derive(Parser)]
#[command(name = "locald", version, about = "LOCAL-model decompositions and packing/covering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Low-diameter decompositions on a graph.
    Ldd(LddArgs),
    /// Approximate packing on an ILP JSON file.
    Pack(IlpArgs),
    /// Approximate covering on an ILP JSON file.
    Cover(IlpArgs),
    /// Reproduce the adversarial clique or clustering claim.
    Adversarial(AdversarialArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum LddAlgo {
    Expclock,
    Mpx,
    Whp,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    eps: f64,
    /// Upper bound on the vertex count known to every vertex.
    #[arg(long)]
    nhat: Option<usize>,
    #[arg(long, env = "LOCALD_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// `paper`, `desk`, or a JSON profile file.
    #[arg(long, default_value = "desk")]
    profile: String,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-trial rows `trial,seed,metric,value`.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct LddArgs {
    #[arg(long, value_enum)]
    algo: LddAlgo,
    /// Edge-list graph file.
    #[arg(long, conflicts_with = "family", required_unless_present = "family")]
    graph: Option<PathBuf>,
    /// Family such as `cycle:200`, `gnp:500:0.006`, `grid:10x10`, `mpx:20`.
    #[arg(long)]
    family: Option<String>,
    /// Clock rate for `expclock` and `mpx` (defaults to eps).
    #[arg(long)]
    lambda: Option<f64>,
    /// Split `whp` clusters into balls of small strong diameter.
    #[arg(long)]
    refine: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct IlpArgs {
    #[arg(long)]
    ilp: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum Claim {
    Clique,
    Mpx,
}

#[derive(Args)]
struct AdversarialArgs {
    #[arg(value_enum)]
    claim: Claim,
    /// Clique size, or the block size t of the clustering family.
    #[arg(long)]
    size: usize,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 5000)]
    trials: usize,
    #[arg(long, env = "LOCALD_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
    #[arg(long, env = "LOCALD_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Observations,
    Tails,
    Claims,
}

fn load_profile(name: &str) -> anyhow::Result<ConstantProfile> {
    match name {
        "paper" | "desk" => Ok(ConstantProfile::by_name(name)?),
        path => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading profile {path}"))?;
            Ok(ConstantProfile::from_json(&text)?)
        }
    }
}

fn run_experiment(algorithm: Algorithm, input: Input, lambda: Option<f64>, c: &Common) -> anyhow::Result<()> {
    let spec = ExperimentSpec {
        algorithm,
        input,
        eps: Some(c.eps),
        lambda,
        n_tilde: c.nhat,
        profile: load_profile(&c.profile)?,
        seed: c.seed,
        trials: c.trials,
    };
    let report = harness::run_trials(&spec)?;
    let json = report.to_json();
    match &c.out {
        Some(path) => std::fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?,
        None => println!("{json}"),
    }
    if let Some(path) = &c.csv {
        std::fs::write(path, report.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    for (metric, agg) in &report.aggregates {
        eprintln!("{metric:>28}: mean {:.6} ± {:.6} (min {}, max {})", agg.mean, agg.ci95, agg.min, agg.max);
    }
    Ok(())
}

fn load_ilp(path: &PathBuf, sense: Sense) -> anyhow::Result<Input> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let inst = from_json(&text)?;
    if inst.sense() != sense {
        bail!("{} is not a {} instance", path.display(), if sense == Sense::Packing { "packing" } else { "covering" });
    }
    Ok(Input::Ilp(inst))
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Ldd(a) => {
            let input = match (&a.graph, &a.family) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    Input::Graph(parse_graph(&text)?)
                }
                (None, Some(f)) => Input::Family(f.parse::<FamilySpec>()?),
                (None, None) => bail!("one of --graph or --family is required"),
            };
            let algorithm = match (a.algo, a.refine) {
                (LddAlgo::Expclock, _) => Algorithm::ExpClock,
                (LddAlgo::Mpx, _) => Algorithm::Mpx,
                (LddAlgo::Whp, false) => Algorithm::Whp,
                (LddAlgo::Whp, true) => Algorithm::WhpRefined,
            };
            run_experiment(algorithm, input, Some(a.lambda.unwrap_or(a.common.eps)), &a.common)?;
            Ok(true)
        }
        Command::Pack(a) => {
            run_experiment(Algorithm::Pack, load_ilp(&a.ilp, Sense::Packing)?, None, &a.common)?;
            Ok(true)
        }
        Command::Cover(a) => {
            run_experiment(Algorithm::Cover, load_ilp(&a.ilp, Sense::Covering)?, None, &a.common)?;
            Ok(true)
        }
        Command::Adversarial(a) => {
            let json = match a.claim {
                Claim::Clique => serde_json::to_string_pretty(&harness::claim_clique(a.size, a.eps, a.trials, a.seed)?)?,
                Claim::Mpx => {
                    let c = harness::claim_mpx(a.size, a.eps, a.trials, a.seed)?;
                    if c.implication_violations > 0 {
                        println!("{}", serde_json::to_string_pretty(&c)?);
                        return Ok(false);
                    }
                    serde_json::to_string_pretty(&c)?
                }
            };
            println!("{json}");
            Ok(true)
        }
        Command::Verify(a) => {
            let suite = match a.suite {
                SuiteArg::Observations => Suite::Observations,
                SuiteArg::Tails => Suite::Tails,
                SuiteArg::Claims => Suite::Claims,
            };
            let report = harness::verify(suite, a.seed)?;
            for line in &report.lines {
                println!("{} {}: {}", if line.passed { "PASS" } else { "FAIL" }, line.name, line.detail);
            }
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let invariant = e.downcast_ref::<Error>().is_some_and(Error::is_invariant);
            ExitCode::from(if invariant { 1 } else { 2 })
        }
    }
}
