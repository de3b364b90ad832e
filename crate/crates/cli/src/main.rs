use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand};

use eqsteenrod::fixtures::{self, Fixture};
use eqsteenrod_cli::commands::{Model, Suite, VerifyOptions};
use eqsteenrod_cli::report::exit_status;
use eqsteenrod_cli::{emit, problem, required_top_dim, CliError, CliResult, Command, Format};

/// Bredon–Illman cohomology with local coefficients and Steenrod reduced
/// powers of one-vertex G-simplicial sets.
#[derive(Parser)]
#[command(name = "eqsteenrod", version)]
struct Cli {
    /// output format
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Source {
    /// JSON problem file
    #[arg(long, conflicts_with = "fixture")]
    input: Option<PathBuf>,
    /// built-in fixture
    #[arg(long, value_parser = PossibleValuesParser::new(fixtures::NAMES))]
    fixture: Option<String>,
    /// truncation of a built-in fixture; defaults to the smallest that
    /// answers the command
    #[arg(long, requires = "fixture")]
    top_dim: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a problem and summarize it
    Check {
        #[command(flatten)]
        source: Source,
    },
    /// Print the problem as a fully explicit problem file
    Export {
        #[command(flatten)]
        source: Source,
    },
    /// Cohomology dimensions up to a degree
    Cohomology {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        max_degree: usize,
        #[arg(long, value_enum, default_value_t = Model::Bredon)]
        model: Model,
    },
    /// Cup products of all pairs of basis classes
    Cup {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        max_degree: usize,
        #[arg(long, value_enum, default_value_t = Model::Bredon)]
        model: Model,
    },
    /// P^s (or βP^s, or Sq^s at p = 2) on every basis class
    Power {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_hyphen_values = true)]
        s: i64,
        #[arg(long)]
        beta: bool,
        #[arg(long)]
        max_degree: usize,
        #[arg(long, value_enum, default_value_t = Model::Bredon)]
        model: Model,
    },
    /// Run a property suite
    Verify {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        max_degree: usize,
        /// largest s in the Cartan formula
        #[arg(long, default_value_t = 2)]
        max_s: i64,
        /// Adem relation for P^a P^b
        #[arg(long, default_value_t = 1)]
        a: i64,
        #[arg(long, default_value_t = 1)]
        b: i64,
        /// random cup pairs per degree for the mu suite
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 3)]
        seed: u64,
        /// cone-first, cone-last or solve-N
        #[arg(long, default_value = "cone-first")]
        lift: String,
    },
    /// Run the acceptance criteria
    Selftest {
        /// comma-separated criterion numbers
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

fn load(source: &Source, cmd: Option<&Command>) -> CliResult<Fixture> {
    match (&source.input, &source.fixture) {
        (Some(path), _) => {
            let file = problem::parse(path)?;
            problem::build(&file, &path.display().to_string())
        }
        (None, Some(name)) => {
            let p = if name == "bz2-constant" { 2 } else { 3 };
            let top = source
                .top_dim
                .unwrap_or_else(|| cmd.map_or(4, |c| required_top_dim(c, p)));
            fixtures::by_name(name, top)
                .expect("name checked by the argument parser")
                .map_err(CliError::from)
        }
        (None, None) => Err(CliError::Usage("give --input FILE or --fixture NAME".into())),
    }
}

fn execute(cli: Cli) -> CliResult<(String, u8)> {
    let (source, cmd) = match cli.command {
        Cmd::Export { source } => {
            let fx = load(&source, None)?;
            let mut text = problem::to_json(&problem::export(&fx));
            text.push('\n');
            return Ok((text, 0));
        }
        Cmd::Selftest { only } => {
            let report = eqsteenrod_cli::selftest(&only)?;
            return Ok((emit(&report, cli.format), exit_status(&report)));
        }
        Cmd::Check { source } => (source, Command::Check),
        Cmd::Cohomology { source, max_degree, model } => (source, Command::Cohomology { max_degree, model }),
        Cmd::Cup { source, max_degree, model } => (source, Command::Cup { max_degree, model }),
        Cmd::Power {
            source,
            s,
            beta,
            max_degree,
            model,
        } => (
            source,
            Command::Power {
                s,
                beta,
                max_degree,
                model,
            },
        ),
        Cmd::Verify {
            source,
            suite,
            max_degree,
            max_s,
            a,
            b,
            pairs,
            seed,
            lift,
        } => (
            source,
            Command::Verify(VerifyOptions {
                suite,
                max_degree,
                max_s,
                a,
                b,
                pairs,
                seed,
                lift,
            }),
        ),
    };
    let fx = load(&source, Some(&cmd))?;
    let report = eqsteenrod_cli::run(&cmd, &fx)?;
    Ok((emit(&report, cli.format), exit_status(&report)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match execute(cli) {
        Ok((text, status)) => {
            print!("{text}");
            ExitCode::from(status)
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.class());
            if format == Format::Json {
                let payload = serde_json::json!({
                    "schema": eqsteenrod_cli::report::SCHEMA,
                    "error": { "class": e.class(), "message": e.to_string() },
                });
                println!("{}", serde_json::to_string_pretty(&payload).expect("json"));
            }
            ExitCode::from(2)
        }
    }
}
