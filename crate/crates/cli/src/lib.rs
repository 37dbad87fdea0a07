//! File-based pipeline commands behind the `lntm` binary.
//!
//! Every command writes its outputs plus a `<out>.manifest.json` listing the
//! inputs and outputs with SHA-256 digests, the tool version, and every
//! parameter that can change an output byte. Thread count is deliberately
//! absent: it never changes output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use lntm_core::inequality::{self, InequalityError};
use lntm_core::metrics::{AlgorithmRegistry, CentralityReport, ComputeOptions};
use lntm_core::store::{deduplicate_and_order, FormatRegistry, OrderedFeed, StoreError};
use lntm_core::timemachine::{replay, routing_view, NetworkSnapshot};
use lntm_core::{build_graph, DEFAULT_AMOUNTS_MSAT};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const TOOL_VERSION: &str = concat!("lntm ", env!("CARGO_PKG_VERSION"));

/// Share of nodes used for the headline top-share statistic.
pub const TOP_FRACTION: f64 = 0.10;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or semantically invalid input. Exit 1.
    #[error("{0}")]
    Input(String),
    /// An output could not be written. Exit 2.
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Write { .. } => 2,
        }
    }
}

fn input_err(context: impl std::fmt::Display, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{context}: {e}"))
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub name: String,
    pub sha256: String,
}

fn digest(name: String, bytes: &[u8]) -> FileDigest {
    FileDigest {
        name,
        sha256: hex::encode(Sha256::digest(bytes)),
    }
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ManifestFlags {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enforce_htlc_bounds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub prune_stale_after: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_cap: Option<usize>,
}

/// Reproducibility envelope written next to every command's outputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub amounts_msat: Vec<u64>,
    pub as_of: Option<u64>,
    pub command: String,
    pub flags: ManifestFlags,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub tool_version: String,
}

impl RunManifest {
    fn new(command: &str) -> Self {
        RunManifest {
            amounts_msat: Vec::new(),
            as_of: None,
            command: command.to_owned(),
            flags: ManifestFlags::default(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            tool_version: TOOL_VERSION.to_owned(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("manifest serializes");
        out.push('\n');
        out
    }
}

/// Collects outputs for one command run and writes them with a manifest.
struct OutputSet {
    manifest: RunManifest,
    manifest_path: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputSet {
    fn new(command: &str, manifest_path: PathBuf) -> Self {
        OutputSet {
            manifest: RunManifest::new(command),
            manifest_path,
            written: Vec::new(),
        }
    }

    fn read_input(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = fs::read(path).map_err(|e| input_err(path.display(), e))?;
        self.manifest.inputs.push(digest(file_name(path), &bytes));
        Ok(bytes)
    }

    fn write(&mut self, path: PathBuf, contents: &[u8]) -> Result<()> {
        write_file(&path, contents)?;
        self.manifest
            .outputs
            .push(digest(file_name(&path), contents));
        self.written.push(path);
        Ok(())
    }

    fn finish(mut self) -> Result<Vec<PathBuf>> {
        write_file(&self.manifest_path, self.manifest.to_json().as_bytes())?;
        self.written.push(self.manifest_path);
        Ok(self.written)
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    let wrap = |source| CliError::Write {
        path: path.to_owned(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(wrap)?;
    }
    fs::write(path, contents).map_err(wrap)
}

/// `<prefix><suffix>`, keeping any directory part of the prefix.
fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Picks an archive format: explicit name, else `jsonl` for `.jsonl` files,
/// else `gsr1`.
pub fn detect_format(path: &Path, explicit: Option<&str>) -> String {
    match explicit {
        Some(name) => name.to_owned(),
        None if path.extension().is_some_and(|e| e == "jsonl") => "jsonl".into(),
        None => "gsr1".into(),
    }
}

fn load_feed(outputs: &mut OutputSet, store: &Path, format: Option<&str>) -> Result<OrderedFeed> {
    // Digest the exact bytes that are parsed.
    outputs.read_input(store)?;
    let registry = FormatRegistry::default();
    let format = registry
        .get(&detect_format(store, format))
        .map_err(|e| input_err("--format", e))?;
    let stream = format.open(store).map_err(|e| store_err(store, e))?;
    deduplicate_and_order(stream).map_err(|e| store_err(store, e))
}

fn store_err(path: &Path, e: StoreError) -> CliError {
    input_err(path.display(), e)
}

#[derive(Debug, Clone)]
pub struct SnapshotArgs {
    pub store: PathBuf,
    pub format: Option<String>,
    pub at: u64,
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct SnapshotSummary {
    pub snapshot: NetworkSnapshot,
    pub files: Vec<PathBuf>,
}

impl std::fmt::Display for SnapshotSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = &self.snapshot;
        let d = &s.diagnostics;
        writeln!(
            f,
            "as_of={} nodes={} channels={} policies={}",
            s.as_of,
            s.node_count(),
            s.channel_count(),
            s.policy_count()
        )?;
        write!(
            f,
            "dropped_channel_updates={} orphan_node_announcements={} conflicting_channel_announcements={}",
            d.dropped_channel_updates, d.orphan_node_announcements, d.conflicting_channel_announcements
        )
    }
}

pub fn cmd_snapshot(args: &SnapshotArgs) -> Result<SnapshotSummary> {
    let mut outputs = OutputSet::new("snapshot", with_suffix(&args.out, ".manifest.json"));
    let feed = load_feed(&mut outputs, &args.store, args.format.as_deref())?;
    let snapshot = replay(&feed, args.at);
    outputs.manifest.as_of = Some(args.at);
    outputs.write(args.out.clone(), snapshot.to_json().as_bytes())?;
    Ok(SnapshotSummary {
        snapshot,
        files: outputs.finish()?,
    })
}

#[derive(Debug, Clone)]
pub struct CompactArgs {
    pub store: PathBuf,
    pub format: Option<String>,
    pub out: PathBuf,
    pub out_format: Option<String>,
}

/// Re-serializes the ordered, deduplicated feed. Arrival times become
/// effective timestamps, so compacting twice is a no-op.
pub fn cmd_compact(args: &CompactArgs) -> Result<usize> {
    let mut outputs = OutputSet::new("compact", with_suffix(&args.out, ".manifest.json"));
    let feed = load_feed(&mut outputs, &args.store, args.format.as_deref())?;
    let format = FormatRegistry::default()
        .get(&detect_format(&args.out, args.out_format.as_deref()))
        .map_err(|e| input_err("--out-format", e))?;
    let mut buf = Vec::new();
    format
        .write(&mut buf, &feed.to_records())
        .map_err(|source| CliError::Write {
            path: args.out.clone(),
            source,
        })?;
    outputs.write(args.out.clone(), &buf)?;
    outputs.finish()?;
    Ok(feed.len())
}

#[derive(Debug, Clone)]
pub struct CentralityArgs {
    pub snapshot: PathBuf,
    pub amounts_msat: Vec<u64>,
    pub enforce_htlc_bounds: bool,
    pub prune_stale_after: Option<u64>,
    pub algorithm: String,
    pub threads: Option<usize>,
    pub out: PathBuf,
}

impl CentralityArgs {
    pub fn new(snapshot: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        CentralityArgs {
            snapshot: snapshot.into(),
            amounts_msat: DEFAULT_AMOUNTS_MSAT.to_vec(),
            enforce_htlc_bounds: false,
            prune_stale_after: None,
            algorithm: "brandes".into(),
            threads: None,
            out: out.into(),
        }
    }
}

pub fn report_path(prefix: &Path, amount_msat: u64) -> PathBuf {
    with_suffix(prefix, &format!(".{amount_msat}msat.csv"))
}

pub fn histogram_path(prefix: &Path, amount_msat: u64) -> PathBuf {
    with_suffix(prefix, &format!(".{amount_msat}msat.hist.csv"))
}

/// Bins per decade in the histogram output.
const HISTOGRAM_BINS_PER_DECADE: i32 = 4;

/// Log-binned counts of the nonzero values: leaves (value 0) are left out
/// so the distribution of routing nodes stays readable on a log axis.
pub fn log_histogram_csv(report: &CentralityReport) -> String {
    let per = f64::from(HISTOGRAM_BINS_PER_DECADE);
    let edge = |k: i32| 10f64.powf(f64::from(k) / per);
    let bin = |v: f64| {
        let mut k = (v.log10() * per).floor() as i32;
        // log10 can land a hair below an exact power of ten.
        while edge(k + 1) <= v {
            k += 1;
        }
        while edge(k) > v {
            k -= 1;
        }
        k
    };
    let bins: Vec<i32> = report
        .values
        .iter()
        .filter(|(_, v)| *v > 0.0)
        .map(|(_, v)| bin(*v))
        .collect();
    let mut out = String::from("bin_lower,bin_upper,count\n");
    if let (Some(&lo), Some(&hi)) = (bins.iter().min(), bins.iter().max()) {
        let mut counts = vec![0usize; (hi - lo + 1) as usize];
        for k in &bins {
            counts[(k - lo) as usize] += 1;
        }
        for (i, count) in counts.iter().enumerate() {
            let k = lo + i as i32;
            let _ = writeln!(out, "{},{},{count}", edge(k), edge(k + 1));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct CentralitySummary {
    pub reports: Vec<CentralityReport>,
    pub files: Vec<PathBuf>,
}

impl std::fmt::Display for CentralitySummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, r) in self.reports.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let top = r
                .ranked()
                .first()
                .map(|(id, v)| format!("{id} ({v})"))
                .unwrap_or_default();
            write!(
                f,
                "amount_msat={} nodes={} leaves={} top={top}",
                r.amount_msat,
                r.len(),
                r.leaf_count
            )?;
        }
        Ok(())
    }
}

pub fn cmd_centrality(args: &CentralityArgs) -> Result<CentralitySummary> {
    let mut outputs = OutputSet::new("centrality", with_suffix(&args.out, ".manifest.json"));
    let text = outputs.read_input(&args.snapshot)?;
    let text = std::str::from_utf8(&text).map_err(|e| input_err(args.snapshot.display(), e))?;
    let snapshot =
        NetworkSnapshot::from_json(text).map_err(|e| input_err(args.snapshot.display(), e))?;
    let algorithm = AlgorithmRegistry::default()
        .get(&args.algorithm)
        .map_err(|e| input_err("--algorithm", e))?;
    if args.amounts_msat.is_empty() {
        return Err(CliError::Input(
            "at least one --amount-msat is required".into(),
        ));
    }

    let m = &mut outputs.manifest;
    m.as_of = Some(snapshot.as_of);
    m.amounts_msat = args.amounts_msat.clone();
    m.flags.algorithm = Some(args.algorithm.clone());
    m.flags.enforce_htlc_bounds = Some(args.enforce_htlc_bounds);
    m.flags.prune_stale_after = args.prune_stale_after;

    let view = routing_view(&snapshot, args.prune_stale_after);
    let opts = ComputeOptions {
        threads: args.threads,
    };
    let mut reports = Vec::new();
    for &amount in &args.amounts_msat {
        let graph = build_graph(&view, amount, args.enforce_htlc_bounds)
            .map_err(|e| input_err(format!("amount {amount}"), e))?;
        let values = algorithm
            .compute(&graph, &opts)
            .map_err(|e| input_err(format!("amount {amount}"), e))?;
        let report = CentralityReport::from_values(&graph, values);
        outputs.write(report_path(&args.out, amount), report.to_csv().as_bytes())?;
        outputs.write(
            histogram_path(&args.out, amount),
            log_histogram_csv(&report).as_bytes(),
        )?;
        reports.push(report);
    }
    Ok(CentralitySummary {
        reports,
        files: outputs.finish()?,
    })
}

#[derive(Debug, Clone)]
pub struct LabeledPath {
    pub label: Option<String>,
    pub path: PathBuf,
}

impl std::str::FromStr for LabeledPath {
    type Err = std::convert::Infallible;

    /// `LABEL=PATH` or a bare `PATH`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.split_once('=') {
            Some((label, path)) if !label.is_empty() && !label.contains(['/', '\\']) => {
                LabeledPath {
                    label: Some(label.to_owned()),
                    path: path.into(),
                }
            }
            _ => LabeledPath {
                label: None,
                path: s.into(),
            },
        })
    }
}

#[derive(Debug, Clone)]
pub struct InequalityArgs {
    pub reports: Vec<LabeledPath>,
    pub k: usize,
    pub anchor: Option<String>,
    pub rank_cap: Option<usize>,
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct InequalitySummary {
    pub gini: Vec<(String, f64)>,
    pub top_share: Vec<(String, inequality::TopShare)>,
    pub files: Vec<PathBuf>,
}

impl std::fmt::Display for InequalitySummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, ((label, gini), (_, top))) in self.gini.iter().zip(&self.top_share).enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(
                f,
                "{label}: gini={gini} top{}%={}",
                (top.fraction * 100.0).round(),
                top.share
            )?;
        }
        Ok(())
    }
}

fn ineq_err(e: InequalityError) -> CliError {
    CliError::Input(e.to_string())
}

pub fn top_share_csv(rows: &[(String, inequality::TopShare)]) -> String {
    let mut out = String::from("label,fraction,count,share,degenerate\n");
    for (label, t) in rows {
        let _ = writeln!(
            out,
            "{label},{},{},{},{}",
            t.fraction, t.count, t.share, t.degenerate
        );
    }
    out
}

/// Labels default to `T1..Tn` in input order.
pub fn resolve_labels(reports: &[LabeledPath]) -> Vec<String> {
    reports
        .iter()
        .enumerate()
        .map(|(i, r)| r.label.clone().unwrap_or_else(|| format!("T{}", i + 1)))
        .collect()
}

pub fn cmd_inequality(args: &InequalityArgs) -> Result<InequalitySummary> {
    if args.reports.is_empty() {
        return Err(CliError::Input("at least one --report is required".into()));
    }
    let mut outputs = OutputSet::new("inequality", with_suffix(&args.out, ".manifest.json"));
    let labels = resolve_labels(&args.reports);
    let anchor = args
        .anchor
        .clone()
        .unwrap_or_else(|| labels.last().cloned().expect("nonempty"));

    let mut reports = Vec::new();
    for (label, input) in labels.iter().zip(&args.reports) {
        let bytes = outputs.read_input(&input.path)?;
        let text = std::str::from_utf8(&bytes).map_err(|e| input_err(input.path.display(), e))?;
        let report = CentralityReport::from_csv(text, 0, 0)
            .map_err(|e| input_err(input.path.display(), e))?;
        reports.push((label.clone(), report));
    }

    let m = &mut outputs.manifest;
    m.flags.k = Some(args.k);
    m.flags.anchor = Some(anchor.clone());
    m.flags.labels = Some(labels.clone());
    m.flags.rank_cap = args.rank_cap;

    let gini = inequality::gini_trend(&reports).map_err(ineq_err)?;
    let timelines = inequality::rank_timelines(&reports, args.k, &anchor).map_err(ineq_err)?;
    let mut top_share = Vec::new();
    for (label, report) in &reports {
        let series = inequality::lorenz(report).map_err(ineq_err)?;
        outputs.write(
            with_suffix(&args.out, &format!(".lorenz.{label}.csv")),
            inequality::lorenz_csv(&series).as_bytes(),
        )?;
        top_share.push((
            label.clone(),
            inequality::top_share(report, TOP_FRACTION).map_err(ineq_err)?,
        ));
    }
    outputs.write(
        with_suffix(&args.out, ".gini.csv"),
        inequality::gini_trend_csv(&gini).as_bytes(),
    )?;
    outputs.write(
        with_suffix(&args.out, ".top-share.csv"),
        top_share_csv(&top_share).as_bytes(),
    )?;
    outputs.write(
        with_suffix(&args.out, ".ranks.csv"),
        inequality::rank_matrix_csv(&timelines, &labels, args.rank_cap).as_bytes(),
    )?;
    Ok(InequalitySummary {
        gini,
        top_share,
        files: outputs.finish()?,
    })
}

/// `name: description` per registered centrality algorithm.
pub fn algorithm_listing() -> String {
    let mut out = String::new();
    for algo in AlgorithmRegistry::default().iter() {
        let _ = writeln!(out, "{}\t{}", algo.name(), algo.description());
    }
    out
}
