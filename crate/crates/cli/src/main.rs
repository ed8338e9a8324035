use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ddrank_cli::commands::{self, BaselineArgs, BaselineKind, EvalKind, ToyArgs};
use ddrank_cli::error::{EXIT_OK, EXIT_VALIDATION};
use ddrank_cli::{CliError, Format, Overrides, RunManifest};
use ddrank_core::orchestrator::RankKey;

#[derive(Parser)]
#[command(
    name = "ddrank",
    version,
    about = "Score distilled datasets against random selection"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Run manifest (TOML).
    #[arg(long, short)]
    manifest: PathBuf,
    /// Worker threads for independent seeds.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<String>>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Baseline cache directory; beats DDRANK_CACHE_DIR and the manifest.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long, default_value = "table")]
    format: Format,
}

impl Common {
    fn manifest(&self) -> Result<RunManifest, CliError> {
        let o = Overrides {
            models: self.models.clone(),
            seeds: self.seeds.clone(),
            lambda: self.lambda,
            gamma: self.gamma,
            jobs: self.jobs,
            output_dir: self.output_dir.clone(),
            cache_dir: self.cache_dir.clone(),
        };
        Ok(RunManifest::load(&self.manifest)?.with_overrides(&o)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Key {
    Lrs,
    Ars,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Random,
    Noise,
}

#[derive(Subcommand)]
enum Cmd {
    /// Train the four LRS arms for every artifact and model.
    EvalLrs(Common),
    /// Train the four ARS arms for every artifact and model.
    EvalArs(Common),
    /// Write a random-subset or noise artifact.
    Baseline {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "random")]
        kind: Kind,
        #[arg(long)]
        ipc: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Artifact whose recipe to copy.
        #[arg(long)]
        like: Option<PathBuf>,
        /// Also train two random subsets per seed and report their gap.
        #[arg(long)]
        self_check: bool,
    },
    /// Rank logged methods and save leaderboard.csv / leaderboard.md.
    Rank {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "lrs")]
        by: Key,
    },
    /// LRS over the manifest's λ values.
    Sweep(Common),
    /// LRS of each artifact across the manifest's models.
    Robustness(Common),
    /// Re-render a saved leaderboard csv.
    Report {
        input: PathBuf,
        #[arg(long, default_value = "table")]
        format: Format,
    },
    /// Generate a synthetic dataset, two artifacts and a manifest.
    Toy {
        #[arg(long, default_value = "toy")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        size: usize,
        #[arg(long, default_value_t = 50)]
        train_per_class: usize,
        #[arg(long, default_value_t = 20)]
        test_per_class: usize,
        #[arg(long, default_value_t = 10)]
        ipc: usize,
        #[arg(long, default_value_t = 15)]
        epochs: usize,
    },
}

fn run(cmd: Cmd) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cmd {
        Cmd::EvalLrs(c) => commands::eval(&c.manifest()?, EvalKind::Lrs, c.format, &mut out),
        Cmd::EvalArs(c) => commands::eval(&c.manifest()?, EvalKind::Ars, c.format, &mut out),
        Cmd::Baseline {
            common,
            kind,
            ipc,
            seed,
            out: path,
            like,
            self_check,
        } => {
            let args = BaselineArgs {
                kind: match kind {
                    Kind::Random => BaselineKind::Random,
                    Kind::Noise => BaselineKind::Noise,
                },
                ipc,
                seed,
                out: path,
                like,
                self_check,
            };
            commands::baseline(&common.manifest()?, &args, &mut out)
        }
        Cmd::Rank { common, by } => {
            let key = match by {
                Key::Lrs => RankKey::Lrs,
                Key::Ars => RankKey::Ars,
            };
            commands::rank(
                &common.manifest()?,
                key,
                common.format,
                &mut out,
                &mut io::stderr(),
            )
        }
        Cmd::Sweep(c) => commands::sweep(&c.manifest()?, c.format, &mut out),
        Cmd::Robustness(c) => commands::robustness(&c.manifest()?, c.format, &mut out),
        Cmd::Report { input, format } => commands::report(&input, format, &mut out),
        Cmd::Toy {
            out: dir,
            seed,
            size,
            train_per_class,
            test_per_class,
            ipc,
            epochs,
        } => commands::toy(
            &ToyArgs {
                out: dir,
                seed,
                size,
                train_per_class,
                test_per_class,
                ipc,
                epochs,
            },
            &mut out,
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli.cmd) {
        Ok(()) => {
            let _ = io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
