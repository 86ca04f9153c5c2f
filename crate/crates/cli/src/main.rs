use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pcp_sketch::generate::GeneratorSpec;
use pcp_sketch::sketching::Scheme;
use pcp_sketch_cli::{run, Command, Format, Input, RunConfig};

/// Projection-cost preserving row-sampling sketches.
#[derive(Parser)]
#[command(name = "pcps", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw a sampling plan and write it (json) or its probabilities (csv).
    Sketch {
        #[command(flatten)]
        common: Common,
        /// Also write the sketched matrix WA (CSV, or MatrixMarket for .mtx).
        #[arg(long)]
        sketch_output: Option<PathBuf>,
    },
    /// Measure the structural conditions of one plan and check the certificate.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Verify this plan (JSON) instead of drawing one.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Monte-Carlo trials at one or more sample sizes.
    Experiment {
        #[command(flatten)]
        common: Common,
    },
    /// Clustering-cost preservation on mixture data.
    KmeansDemo {
        #[command(flatten)]
        common: Common,
        /// Random partitions per trial.
        #[arg(long, default_value_t = 50)]
        assignments: usize,
        /// Lloyd-refined partitions per trial.
        #[arg(long, default_value_t = 5)]
        refined: usize,
        /// Lloyd iterations for refined partitions.
        #[arg(long, default_value_t = 3)]
        lloyd_iters: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Uniform,
    Leverage,
    Ridge,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Uniform => Scheme::Uniform,
            SchemeArg::Leverage => Scheme::LeverageMixed,
            SchemeArg::Ridge => Scheme::Ridge,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Matrix file: CSV, or MatrixMarket (.mtx).
    #[arg(long, conflicts_with = "generate")]
    input: Option<PathBuf>,
    /// Generator spec, e.g. powerlaw:300x40:alpha=1.0.
    #[arg(long)]
    generate: Option<GeneratorSpec>,
    /// Target rank (default 5, or 3 for kmeans-demo).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 0.2)]
    delta: f64,
    #[arg(long, value_enum, default_value = "leverage")]
    scheme: SchemeArg,
    /// Sample size override; a comma list runs experiment once per size.
    #[arg(long, value_delimiter = ',')]
    s: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 50)]
    x_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    /// Report path; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
}

impl Common {
    fn into_config(self, command: Command) -> Result<RunConfig, String> {
        let input = match (self.input, self.generate) {
            (Some(p), _) => Input::Path(p),
            (None, Some(g)) => Input::Generate(g),
            (None, None) if command == Command::KmeansDemo => Input::Generate(GeneratorSpec::Mixture {
                features: 50,
                points: 400,
                clusters: 3,
                spread: 1.0,
            }),
            (None, None) => return Err("one of --input or --generate is required".into()),
        };
        let mut c = RunConfig::new(command, input);
        c.k = self.k.unwrap_or(if command == Command::KmeansDemo { 3 } else { 5 });
        c.eps = self.eps;
        c.delta = self.delta;
        c.scheme = self.scheme.into();
        c.s = self.s;
        c.trials = self.trials;
        c.x_samples = self.x_samples;
        c.seed = self.seed;
        c.threads = self.threads;
        c.output = self.output;
        c.format = match self.format {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        };
        Ok(c)
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let config = match cli.command {
        Cmd::Sketch { common, sketch_output } => common.into_config(Command::Sketch).map(|mut c| {
            c.sketch_output = sketch_output;
            c
        }),
        Cmd::Verify { common, plan } => common.into_config(Command::Verify).map(|mut c| {
            c.plan = plan;
            c
        }),
        Cmd::Experiment { common } => common.into_config(Command::Experiment),
        Cmd::KmeansDemo { common, assignments, refined, lloyd_iters } => {
            common.into_config(Command::KmeansDemo).map(|mut c| {
                c.assignments = assignments;
                c.refined = refined;
                c.lloyd_iters = lloyd_iters;
                c
            })
        }
    };
    match config {
        Ok(c) => ExitCode::from(run(&c).code() as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
