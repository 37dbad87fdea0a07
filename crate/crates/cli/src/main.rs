use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lntm_cli::{
    algorithm_listing, cmd_centrality, cmd_compact, cmd_inequality, cmd_snapshot, CentralityArgs,
    CompactArgs, InequalityArgs, LabeledPath, SnapshotArgs,
};
use lntm_core::DEFAULT_AMOUNTS_MSAT;

#[derive(Parser)]
#[command(
    name = "lntm",
    version,
    about = "Replay Lightning gossip archives and measure routing centralization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rebuild the public network view as of an instant.
    Snapshot {
        #[arg(long)]
        store: PathBuf,
        /// Unix seconds, inclusive.
        #[arg(long)]
        at: u64,
        /// Snapshot JSON to write.
        #[arg(long)]
        out: PathBuf,
        /// Archive format (gsr1, jsonl); inferred from the extension if unset.
        #[arg(long)]
        format: Option<String>,
    },
    /// Fee-weighted betweenness for each transaction amount.
    Centrality {
        #[arg(long)]
        snapshot: PathBuf,
        /// Repeatable; defaults to 10^7, 10^9 and 10^10 msat.
        #[arg(long = "amount-msat")]
        amounts_msat: Vec<u64>,
        /// Skip arcs whose HTLC limits exclude the amount.
        #[arg(long)]
        enforce_htlc_bounds: bool,
        /// Drop directions not updated within this many seconds of the snapshot.
        #[arg(long)]
        prune_stale_after: Option<u64>,
        #[arg(long, default_value = "brandes")]
        algorithm: String,
        /// Worker threads; results do not depend on it.
        #[arg(long, env = "LNTM_THREADS")]
        threads: Option<usize>,
        /// Output prefix, e.g. `results/t7`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Lorenz curves, Gini trend, top-share and rank timelines.
    Inequality {
        /// `LABEL=PATH` or `PATH` (labelled T1..Tn by position); repeatable.
        #[arg(long = "report", required = true)]
        reports: Vec<LabeledPath>,
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Label whose top-k is tracked; defaults to the last report.
        #[arg(long)]
        anchor: Option<String>,
        /// Show ranks beyond this as the cap in the rank matrix.
        #[arg(long)]
        rank_cap: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rewrite an archive deduplicated and in replay order.
    Compact {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        out_format: Option<String>,
    },
    /// List the available centrality algorithms.
    Algorithms,
}

fn run(command: Command) -> lntm_cli::Result<String> {
    Ok(match command {
        Command::Snapshot {
            store,
            at,
            out,
            format,
        } => cmd_snapshot(&SnapshotArgs {
            store,
            format,
            at,
            out,
        })?
        .to_string(),
        Command::Centrality {
            snapshot,
            amounts_msat,
            enforce_htlc_bounds,
            prune_stale_after,
            algorithm,
            threads,
            out,
        } => {
            let amounts_msat = if amounts_msat.is_empty() {
                DEFAULT_AMOUNTS_MSAT.to_vec()
            } else {
                amounts_msat
            };
            cmd_centrality(&CentralityArgs {
                snapshot,
                amounts_msat,
                enforce_htlc_bounds,
                prune_stale_after,
                algorithm,
                threads,
                out,
            })?
            .to_string()
        }
        Command::Inequality {
            reports,
            k,
            anchor,
            rank_cap,
            out,
        } => cmd_inequality(&InequalityArgs {
            reports,
            k,
            anchor,
            rank_cap,
            out,
        })?
        .to_string(),
        Command::Compact {
            store,
            format,
            out,
            out_format,
        } => {
            let n = cmd_compact(&CompactArgs {
                store,
                format,
                out,
                out_format,
            })?;
            format!("{n} messages written")
        }
        Command::Algorithms => algorithm_listing().trim_end().to_owned(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
