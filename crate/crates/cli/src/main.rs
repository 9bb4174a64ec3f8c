//! `realchip`: invariants, ranks, reductions, generators and a property
//! fuzzer for graphs with a real structure. Input and output are JSON.

mod commands;
mod error;

use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use realchip::builders::GraphProfile;
use realchip::metric::QMetricGraph;
use realchip::properties::{parse_property_list, Limits};
use realchip::{Budget, RealGraph};
use serde_json::Value;

use commands::{CliResult, FuzzRequest, Report};
use error::{CliError, EXIT_DOMAIN, EXIT_VIOLATED};

#[derive(Debug, Parser)]
#[command(name = "realchip", version, about = "Divisors and chip-firing on graphs with a real structure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print g, s', isolated real edges, s, a and the bound check
    Info(GraphArg),
    /// Rank of a divisor, or real rank with --real
    Rank {
        #[command(flatten)]
        graph: GraphArg,
        /// Divisor as a JSON map from vertex id to coefficient
        #[arg(long)]
        divisor: String,
        #[arg(long)]
        real: bool,
    },
    /// Decide linear equivalence and print a witness
    Equivalent {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Degree parities of a real divisor on the real-locus components
    Parity {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        divisor: String,
    },
    /// Totally real effective divisor equivalent to a real effective one on an M-graph
    Reduce {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        divisor: String,
    },
    /// Real effective degree-2 divisor of rank at least 1 on a strong M-graph
    G12(GraphArg),
    /// Generate a graph
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Cut every edge into --parts pieces, or split isolated real edges with --split
    Subdivide {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = 2, conflicts_with = "split")]
        parts: usize,
        #[arg(long)]
        split: bool,
    },
    /// Rational metric graphs
    Metric {
        #[command(subcommand)]
        command: MetricCommand,
    },
    /// Check the property suite on seeded random instances
    Fuzz(FuzzArgs),
}

#[derive(Debug, Args)]
struct GraphArg {
    /// Graph JSON file, or `-` for stdin
    #[arg(default_value = "-")]
    graph: String,
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// Graph realizing an admissible (g, s, a)
    Example1 {
        #[arg(long)]
        g: i64,
        #[arg(long)]
        s: i64,
        #[arg(long)]
        a: u8,
    },
    /// Two swapped copies of a base graph joined through a real vertex `v`
    Example2 {
        /// Base graph JSON file; defaults to a cycle
        #[arg(long, conflicts_with = "cycle")]
        base: Option<String>,
        /// Length of the cycle used as base
        #[arg(long, default_value_t = 3)]
        cycle: usize,
        /// Base vertex id where the copies are attached
        #[arg(long)]
        attach: Option<String>,
    },
    /// Seeded random graph; metric with --max-denominator
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        max_vertices: usize,
        #[arg(long, default_value_t = 16)]
        max_edges: usize,
        /// mixed, m-graph, strong-m-graph, empty-real-locus or identity
        #[arg(long, default_value = "mixed")]
        profile: GraphProfile,
        #[arg(long)]
        max_denominator: Option<i64>,
    },
}

#[derive(Debug, Subcommand)]
enum MetricCommand {
    Info(GraphArg),
    Rank {
        #[command(flatten)]
        graph: GraphArg,
        /// Divisor as a JSON list of [point, coefficient] pairs
        #[arg(long)]
        divisor: String,
        #[arg(long)]
        real: bool,
        /// Multiple of the least model scale to compute on
        #[arg(long, default_value_t = 1)]
        refine: i64,
    },
    Equivalent {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    Parity {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        divisor: String,
    },
    Reduce {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        divisor: String,
    },
    G12(GraphArg),
}

#[derive(Debug, Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 10)]
    max_vertices: usize,
    #[arg(long, default_value_t = 16)]
    max_edges: usize,
    /// Comma-separated property names, or `all`
    #[arg(long, default_value = "all")]
    properties: String,
    /// Worker threads; 0 uses every core, 1 runs serially
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

fn read_text(path: &str) -> CliResult<String> {
    let io = |source| CliError::Io { path: path.to_owned(), source };
    if path == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(io)?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

fn load_graph(arg: &GraphArg) -> CliResult<RealGraph> {
    Ok(RealGraph::from_json(&read_text(&arg.graph)?)?)
}

fn load_metric(arg: &GraphArg) -> CliResult<QMetricGraph> {
    Ok(QMetricGraph::from_json(&read_text(&arg.graph)?)?)
}

fn run(command: Command, budget: Budget) -> CliResult<Report> {
    let plain = |json: Value| Report { json, violated: false };
    Ok(match command {
        Command::Info(graph) => commands::info(&load_graph(&graph)?),
        Command::Rank { graph, divisor, real } => {
            let g = load_graph(&graph)?;
            commands::rank(&g, &commands::parse_divisor(&g, &divisor)?, real, &budget)?
        }
        Command::Equivalent { graph, from, to } => {
            let g = load_graph(&graph)?;
            commands::equivalent(&g, &commands::parse_divisor(&g, &from)?, &commands::parse_divisor(&g, &to)?)
        }
        Command::Parity { graph, divisor } => {
            let g = load_graph(&graph)?;
            commands::parity(&g, &commands::parse_divisor(&g, &divisor)?)?
        }
        Command::Reduce { graph, divisor } => {
            let g = load_graph(&graph)?;
            commands::reduce(&g, &commands::parse_divisor(&g, &divisor)?)?
        }
        Command::G12(graph) => commands::g12(&load_graph(&graph)?, &budget)?,
        Command::Gen { kind } => plain(match kind {
            GenKind::Example1 { g, s, a } => commands::gen_example1(g, s, a)?,
            GenKind::Example2 { base, cycle, attach } => {
                let base = base.map(|path| load_graph(&GraphArg { graph: path })).transpose()?;
                commands::gen_example2(base, cycle, attach.as_deref())?
            }
            GenKind::Random { seed, max_vertices, max_edges, profile, max_denominator } => {
                commands::gen_random(seed, max_vertices, max_edges, profile, max_denominator)?
            }
        }),
        Command::Subdivide { graph, parts, split } => {
            plain(commands::subdivide_graph(&load_graph(&graph)?, parts, split)?)
        }
        Command::Metric { command } => run_metric(command, budget)?,
        Command::Fuzz(args) => {
            let properties = parse_property_list(&args.properties).map_err(CliError::Usage)?;
            let request = FuzzRequest {
                seed: args.seed,
                trials: args.trials,
                limits: Limits { max_vertices: args.max_vertices.max(1), max_edges: args.max_edges },
                properties,
                jobs: args.jobs,
            };
            commands::fuzz(request, budget)?
        }
    })
}

fn run_metric(command: MetricCommand, budget: Budget) -> CliResult<Report> {
    match command {
        MetricCommand::Info(graph) => Ok(commands::metric_info(&load_metric(&graph)?)),
        MetricCommand::Rank { graph, divisor, real, refine } => {
            let gamma = load_metric(&graph)?;
            let d = commands::parse_metric_divisor(&gamma, &divisor)?;
            commands::metric_rank(&gamma, &d, real, refine, &budget)
        }
        MetricCommand::Equivalent { graph, from, to } => {
            let gamma = load_metric(&graph)?;
            let (d1, d2) =
                (commands::parse_metric_divisor(&gamma, &from)?, commands::parse_metric_divisor(&gamma, &to)?);
            commands::metric_equivalent_report(&gamma, &d1, &d2, &budget)
        }
        MetricCommand::Parity { graph, divisor } => {
            let gamma = load_metric(&graph)?;
            commands::metric_parity(&gamma, &commands::parse_metric_divisor(&gamma, &divisor)?)
        }
        MetricCommand::Reduce { graph, divisor } => {
            let gamma = load_metric(&graph)?;
            commands::metric_reduce(&gamma, &commands::parse_metric_divisor(&gamma, &divisor)?, &budget)
        }
        MetricCommand::G12(graph) => commands::metric_g12(&load_metric(&graph)?, &budget),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_DOMAIN) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command, Budget::from_env()) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report.json).expect("reports serialize");
            let mut out = std::io::stdout().lock();
            if writeln!(out, "{text}").is_err() {
                return ExitCode::from(EXIT_DOMAIN);
            }
            if report.violated {
                ExitCode::from(EXIT_VIOLATED)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
