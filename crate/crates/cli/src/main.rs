use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

mod budget;
mod commands;

use budget::Budget;
use commands::{Outcome, Source};

/// Elastic graph energies, rationality certificates and obstructions for
/// virtual endomorphisms of ribbon graphs.
#[derive(Parser, Debug)]
#[command(name = "elastigraph", version, after_help = "Caps can be raised with ELASTIGRAPH_BUDGET=key=value,... \
(keys: restarts, levels, evaluations, curve_len, components, scan_len, scan_cap, tower_cap, ribbon).\n\
Exit status: 0 on success, 2 when certify finds an obstruction, 1 on errors.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Input files in the stanza format.
    files: Vec<PathBuf>,
    /// Built-in example instead of, or in addition to, files.
    #[arg(long)]
    fixture: Option<String>,
    /// Which virtual endomorphism to use when several are loaded.
    #[arg(long)]
    vend: Option<String>,
    /// Print a JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Seed for randomized restarts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for restarts; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse inputs and check every graph, map, vend, curve and train track.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Energies of a graph map or of one level of a virtual endomorphism.
    Energy {
        #[command(flatten)]
        common: Common,
        /// Named graph map from the inputs.
        #[arg(long)]
        map: Option<String>,
        #[arg(long, default_value_t = 1)]
        level: usize,
        /// Exponent for the p-conformal energy: 1, p > 1, or inf.
        #[arg(long, default_value = "2")]
        p: String,
    },
    /// Look for an obstruction, then a level whose map has energy below 1.
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        max_n: usize,
    },
    /// Bounds on the asymptotic energy from levels 1..max-n.
    Asf {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        #[arg(long, default_value = "2")]
        p: String,
        /// Also check cover invariance and submultiplicativity of witnesses.
        #[arg(long)]
        audit: bool,
    },
    /// Obstruction matrix of a curve, or a scan over short simple curves.
    Obstruct {
        #[command(flatten)]
        common: Common,
        /// Named curve or words such as "a ~b".
        #[arg(long)]
        curve: Option<String>,
        /// Longest curve tried by the scan.
        #[arg(long, value_name = "MAX_LEN")]
        scan: Option<usize>,
        #[arg(long, default_value = "2")]
        p: String,
    },
    /// Thickened surface of a graph and extremal-length bounds for a curve.
    Thicken {
        #[command(flatten)]
        common: Common,
        /// Graph to thicken; defaults to the base graph of the vend.
        #[arg(long)]
        graph: Option<String>,
        #[arg(long)]
        curve: Option<String>,
        /// Thickness; defaults to a quarter of the shortest edge.
        #[arg(long)]
        eps: Option<String>,
        /// Print the rectangle gluing table.
        #[arg(long)]
        table: bool,
    },
    /// Wreath recursion read off the collapsed spine.
    Automaton {
        #[command(flatten)]
        common: Common,
    },
    /// Marked points and their images with local degrees.
    Portrait {
        #[command(flatten)]
        common: Common,
    },
    /// List the built-in examples, or print one.
    Fixtures {
        name: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

fn source(c: &Common) -> Source {
    Source { files: c.files.clone(), fixture: c.fixture.clone(), vend: c.vend.clone() }
}

fn budget(c: &Common) -> Result<Budget> {
    let mut b = Budget::from_env()?;
    b.certify.minimize.seed = c.seed;
    b.certify.minimize.jobs = c.jobs.max(1);
    Ok(b)
}

fn run(cmd: &Command) -> Result<(Outcome, bool)> {
    Ok(match cmd {
        Command::Validate { common } => (commands::validate(&source(common), &budget(common)?)?, common.json),
        Command::Energy { common, map, level, p } => {
            (commands::energy(&source(common), map.as_deref(), *level, p, &budget(common)?)?, common.json)
        }
        Command::Certify { common, max_n } => (commands::certify_cmd(&source(common), *max_n, &budget(common)?)?, common.json),
        Command::Asf { common, max_n, p, audit } => {
            (commands::asf(&source(common), *max_n, p, *audit, &budget(common)?)?, common.json)
        }
        Command::Obstruct { common, curve, scan, p } => {
            (commands::obstruct(&source(common), curve.as_deref(), *scan, p, &budget(common)?)?, common.json)
        }
        Command::Thicken { common, graph, curve, eps, table } => (
            commands::thicken(&source(common), graph.as_deref(), curve.as_deref(), eps.as_deref(), *table, &budget(common)?)?,
            common.json,
        ),
        Command::Automaton { common } => (commands::automaton(&source(common), &budget(common)?)?, common.json),
        Command::Portrait { common } => (commands::portrait(&source(common), &budget(common)?)?, common.json),
        Command::Fixtures { name, json } => (commands::fixtures_cmd(name.as_deref())?, *json),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok((out, json)) => {
            let mut stdout = std::io::stdout().lock();
            let written = if json {
                writeln!(stdout, "{}", serde_json::to_string_pretty(&out.json).expect("reports serialize"))
            } else {
                write!(stdout, "{}", out.text)
            };
            match written.and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != ErrorKind::BrokenPipe => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
                _ => ExitCode::from(out.code as u8),
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
