//! Command-line front end. Reports are JSON on stdout (or `--out`); `--pretty` switches
//! to plain-text tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    greedy_oracle_suite, group_benchmark, layer_sweep, misclassification_report, BenchmarkParams, ChannelCount,
    GroupBenchmark, OracleSuite,
};
use crate::config::{binarize, config_distances, knn, ConfigurationStore, Metric, NeuronSet};
use crate::error::{Error, Result};
use crate::refnet::{
    export_activations, load_weights, plane_slice_features, sample_inputs, teacher_labels, RefNet, DEFAULT_DIMS,
    WEIGHTS_FILE,
};
use crate::region::{build_rdr, NegativePolicy, RegionReport, DEFAULT_K, DEFAULT_T};
use crate::store::{ingest, ActivationDataset, LayerId};
use crate::synth::{subclass_dataset, SubclassSpec};

#[derive(Debug, Parser)]
#[command(name = "rdr", version, about = "Concept regions over binarized network activations")]
pub struct Cli {
    /// Seed for every stochastic choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout (for `export`: the dump directory).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Plain-text tables instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a dump and summarize its layers.
    Ingest(DataArgs),
    /// Nearest neighbors of one instance under one or more metrics.
    Knn(KnnArgs),
    /// Build the relaxed decision region of one instance.
    Rdr(RegionArgs),
    /// Purity and entropy of regions versus k-NN and random groups (needs subclass labels).
    Eval(EvalArgs),
    /// Region of a misclassified instance contrasted with its true class.
    Misclassify(MisclassifyArgs),
    /// One region per layer.
    Sweep(RegionArgs),
    /// Boundary segments of a 2-D slice through three instances (refnet dumps only).
    Plane(PlaneArgs),
    /// Synthetic subclass benchmark plus the greedy-versus-exhaustive oracle suite.
    Bench(BenchArgs),
    /// Write a seeded reference-network dump to `--out`.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dump directory.
    #[arg(long)]
    pub data: PathBuf,
    /// Comma-separated layer ids; all layers when omitted.
    #[arg(long, value_delimiter = ',')]
    pub layers: Vec<LayerId>,
}

#[derive(Debug, Args)]
pub struct KnnArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Instance id (or row index).
    #[arg(long)]
    pub target: String,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    #[arg(long, value_delimiter = ',', default_value = "configuration")]
    pub metric: Vec<String>,
    /// Layer whose raw activations feed euclidean/cosine; defaults to the last selected layer.
    #[arg(long)]
    pub feature_layer: Option<LayerId>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NegativeArg {
    Rest,
    TrueLabel,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub target: String,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_T)]
    pub t: usize,
    #[arg(long, value_enum, default_value = "rest")]
    pub negative: NegativeArg,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_T)]
    pub t: usize,
    /// Number of random targets.
    #[arg(long, default_value_t = 50)]
    pub targets: usize,
    #[arg(long, default_value_t = 30)]
    pub group_size: usize,
}

#[derive(Debug, Args)]
pub struct MisclassifyArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub target: String,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_T)]
    pub t: usize,
    /// Also write one PGM activation map per member here.
    #[arg(long)]
    pub maps: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlaneArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Three comma-separated instance ids.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub target: Vec<String>,
    /// Layer the plane lives in.
    #[arg(long, default_value_t = 1)]
    pub layer: LayerId,
    /// Defaults to `<data>/refnet.weights`.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    /// Neurons above the plane to trace.
    #[arg(long, default_value_t = 20)]
    pub neurons: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    /// Each synthetic subclass owns three designated neurons.
    #[arg(long, default_value_t = 3)]
    pub t: usize,
    #[arg(long, default_value_t = 50)]
    pub targets: usize,
    #[arg(long, default_value_t = 30)]
    pub group_size: usize,
    /// Random profiles for the oracle suite.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, default_value_t = 2000)]
    pub instances: usize,
    /// Comma-separated layer widths, input first, logits last.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_DIMS.to_vec())]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub bias_scale: f64,
}

/// Parses `std::env::args`, runs the command and returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code().into()
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let out = Output {
        path: cli.out.as_deref(),
        pretty: cli.pretty,
    };
    match &cli.command {
        Command::Ingest(args) => cmd_ingest(args, &out),
        Command::Knn(args) => cmd_knn(args, &out),
        Command::Rdr(args) => cmd_rdr(args, &out),
        Command::Eval(args) => cmd_eval(args, cli.seed, &out),
        Command::Misclassify(args) => cmd_misclassify(args, &out),
        Command::Sweep(args) => cmd_sweep(args, &out),
        Command::Plane(args) => cmd_plane(args, cli.seed, &out),
        Command::Bench(args) => cmd_bench(args, cli.seed, &out),
        Command::Export(args) => cmd_export(args, cli.seed, cli.out.as_deref()),
    }
}

struct Output<'a> {
    path: Option<&'a Path>,
    pretty: bool,
}

impl Output<'_> {
    fn write(&self, text: &str) -> Result<()> {
        match self.path {
            Some(p) => fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }

    fn report<T: Serialize>(&self, value: &T, table: impl FnOnce() -> String) -> Result<()> {
        if self.pretty {
            self.write(&table())
        } else {
            let mut json = serde_json::to_string_pretty(value)?;
            json.push('\n');
            self.write(&json)
        }
    }
}

fn load(args: &DataArgs) -> Result<(ActivationDataset, Arc<ConfigurationStore>)> {
    let dataset = ingest(&args.data)?;
    let set = if args.layers.is_empty() {
        NeuronSet::all(&dataset)?
    } else {
        NeuronSet::from_dataset(&dataset, &args.layers)?
    };
    let store = Arc::new(binarize(&dataset, &set)?);
    Ok((dataset, store))
}

fn negative_policy(arg: NegativeArg, dataset: &ActivationDataset, target: usize) -> Result<NegativePolicy> {
    match arg {
        NegativeArg::Rest => Ok(NegativePolicy::Rest),
        NegativeArg::TrueLabel => {
            let labels = dataset.meta().labels.as_ref().ok_or_else(|| Error::query("true-label needs a label column"))?;
            Ok(NegativePolicy::SameTrueLabel(labels[target]))
        }
    }
}

#[derive(Serialize)]
struct LayerSummary {
    layer_id: LayerId,
    name: String,
    shape: Vec<usize>,
    neurons: usize,
}

#[derive(Serialize)]
struct IngestSummary {
    instances: usize,
    neurons: usize,
    layers: Vec<LayerSummary>,
    labels: bool,
    predictions: bool,
    subclass_labels: bool,
}

fn cmd_ingest(args: &DataArgs, out: &Output) -> Result<()> {
    let ds = ingest(&args.data)?;
    let meta = ds.meta();
    let summary = IngestSummary {
        instances: ds.num_instances(),
        neurons: ds.layers().iter().map(|l| l.neurons()).sum(),
        layers: ds
            .layers()
            .iter()
            .map(|l| LayerSummary {
                layer_id: l.layer_id,
                name: l.name.clone(),
                shape: l.shape.dims(),
                neurons: l.neurons(),
            })
            .collect(),
        labels: meta.labels.is_some(),
        predictions: meta.predictions.is_some(),
        subclass_labels: meta.subclass_labels.is_some(),
    };
    out.report(&summary, || {
        let mut s = format!("{} instances, {} neurons\n", summary.instances, summary.neurons);
        for l in ds.layers() {
            writeln!(s, "{:>6}  {:<24} {}", l.layer_id, l.name, l.shape).unwrap();
        }
        s
    })
}

#[derive(Serialize)]
struct NeighborEntry {
    instance: String,
    index: usize,
    distance: f64,
    configuration_distance: u32,
}

#[derive(Serialize)]
struct NeighborList {
    metric: Metric,
    #[serde(skip_serializing_if = "Option::is_none")]
    feature_layer: Option<LayerId>,
    neighbors: Vec<NeighborEntry>,
}

#[derive(Serialize)]
struct KnnReport {
    target: String,
    target_index: usize,
    k: usize,
    layers: Vec<LayerId>,
    lists: Vec<NeighborList>,
}

fn cmd_knn(args: &KnnArgs, out: &Output) -> Result<()> {
    let metrics = args.metric.iter().map(|m| m.parse()).collect::<Result<Vec<Metric>>>()?;
    let (ds, store) = load(&args.data)?;
    let target = ds.resolve_instance(&args.target)?;
    let layers = store.neuron_set().layer_ids();
    let feature_layer = args.feature_layer.unwrap_or(*layers.last().expect("non-empty neuron set"));
    let config = config_distances(&store, target)?;
    let lists = metrics
        .iter()
        .map(|&metric| {
            let layer = (metric != Metric::Configuration).then_some(feature_layer);
            let neighbors = knn(&store, Some(&ds), target, args.k, metric, layer)?
                .into_iter()
                .map(|n| NeighborEntry {
                    instance: store.instance_id(n.index).to_string(),
                    index: n.index,
                    distance: n.distance,
                    configuration_distance: config[n.index],
                })
                .collect();
            Ok(NeighborList {
                metric,
                feature_layer: layer,
                neighbors,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = KnnReport {
        target: store.instance_id(target).to_string(),
        target_index: target,
        k: args.k,
        layers,
        lists,
    };
    out.report(&report, || {
        let mut s = String::new();
        for list in &report.lists {
            writeln!(s, "{}", list.metric).unwrap();
            for n in &list.neighbors {
                writeln!(s, "  {:<16} {:>12.6} ({})", n.instance, n.distance, n.configuration_distance).unwrap();
            }
        }
        s
    })
}

fn region_table(r: &RegionReport) -> String {
    let mut s = format!(
        "target {}  k={} t={} negative={}  candidates={}  objective={:.6}\n",
        r.target, r.k, r.t, r.negative_policy, r.candidate_count, r.objective
    );
    writeln!(s, "{:>6} {:>8} {:>5} {:>10}", "layer", "index", "state", "score").unwrap();
    for n in &r.selected {
        writeln!(s, "{:>6} {:>8} {:>5} {:>10.6}", n.layer, n.index, n.state, n.score).unwrap();
    }
    writeln!(s, "members: {}", r.member_count).unwrap();
    s
}

fn cmd_rdr(args: &RegionArgs, out: &Output) -> Result<()> {
    let (ds, store) = load(&args.data)?;
    let target = ds.resolve_instance(&args.target)?;
    let policy = negative_policy(args.negative, &ds, target)?;
    let region = build_rdr(&store, target, args.k, args.t, policy)?;
    let report = RegionReport::new(&region);
    out.report(&report, || region_table(&report))
}

fn eval_table(b: &GroupBenchmark) -> String {
    let mut s = format!("{} targets, group size {}\n", b.targets, b.group_size);
    writeln!(s, "{:<8} {:>8} {:>8}", "method", "purity", "entropy").unwrap();
    for (name, m) in [("rdr", &b.rdr), ("knn", &b.knn), ("random", &b.random)] {
        writeln!(s, "{:<8} {:>8.4} {:>8.4}", name, m.mean_purity, m.mean_entropy).unwrap();
    }
    s
}

fn cmd_eval(args: &EvalArgs, seed: u64, out: &Output) -> Result<()> {
    let (_, store) = load(&args.data)?;
    let params = BenchmarkParams {
        targets: args.targets,
        group_size: args.group_size,
        k: args.k,
        t: args.t,
        seed,
    };
    let bench = group_benchmark(&store, &params)?;
    out.report(&bench, || eval_table(&bench))
}

#[derive(Serialize)]
struct MisclassifyOutput {
    region: RegionReport,
    class_counts: BTreeMap<u32, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    localization_layer: Option<LayerId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    channels: Option<Vec<ChannelCount>>,
}

fn cmd_misclassify(args: &MisclassifyArgs, out: &Output) -> Result<()> {
    let (ds, store) = load(&args.data)?;
    let target = ds.resolve_instance(&args.target)?;
    let report = misclassification_report(&ds, &store, target, args.k, args.t)?;
    if let (Some(dir), Some(loc)) = (&args.maps, &report.localization) {
        loc.write_pgms(dir)?;
    }
    let output = MisclassifyOutput {
        region: RegionReport::new(&report.region),
        class_counts: report.class_ratio.counts.clone(),
        localization_layer: report.localization.as_ref().map(|l| l.layer),
        channels: report.localization.as_ref().map(|l| l.channels.clone()),
    };
    out.report(&output, || {
        let mut s = region_table(&output.region);
        for (label, count) in &output.class_counts {
            writeln!(s, "class {label}: {count}").unwrap();
        }
        if let Some(channels) = &output.channels {
            for c in channels {
                writeln!(s, "channel {:>4}: {} neurons", c.channel, c.neurons).unwrap();
            }
        }
        s
    })
}

fn cmd_sweep(args: &RegionArgs, out: &Output) -> Result<()> {
    let ds = ingest(&args.data.data)?;
    let target = ds.resolve_instance(&args.target)?;
    let layers: Vec<LayerId> = if args.data.layers.is_empty() {
        ds.layers().iter().map(|l| l.layer_id).collect()
    } else {
        args.data.layers.clone()
    };
    let policy = negative_policy(args.negative, &ds, target)?;
    let sweep = layer_sweep(&ds, target, &layers, args.k, args.t, policy)?;
    let reports: BTreeMap<LayerId, RegionReport> = sweep.iter().map(|(&l, r)| (l, RegionReport::new(r))).collect();
    out.report(&reports, || {
        let mut s = format!("{:>6} {:>8} {:>10}\n", "layer", "members", "objective");
        for (layer, r) in &reports {
            writeln!(s, "{:>6} {:>8} {:>10.6}", layer, r.member_count, r.objective).unwrap();
        }
        s
    })
}

fn cmd_plane(args: &PlaneArgs, seed: u64, out: &Output) -> Result<()> {
    if args.target.len() != 3 {
        return Err(Error::query(format!("plane needs exactly three targets, got {}", args.target.len())));
    }
    let ds = ingest(&args.data)?;
    let weights = args.weights.clone().unwrap_or_else(|| args.data.join(WEIGHTS_FILE));
    let net = load_weights(&weights)?;
    let acts = ds.activations(args.layer)?;
    let anchor = |id: &str| -> Result<ndarray::Array1<f64>> {
        let i = ds.resolve_instance(id)?;
        Ok(acts.row(i).mapv(f64::from))
    };
    let anchors = [anchor(&args.target[0])?, anchor(&args.target[1])?, anchor(&args.target[2])?];
    let slice = plane_slice_features(&net, anchors, args.layer as usize, args.grid, args.neurons, seed)?;
    out.write(&slice.to_csv())
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct BenchReport {
    checks: Vec<Check>,
    subclass: GroupBenchmark,
    oracle: OracleSummary,
}

#[derive(Serialize)]
struct OracleSummary {
    trials: usize,
    mismatches: usize,
}

impl From<&OracleSuite> for OracleSummary {
    fn from(s: &OracleSuite) -> Self {
        OracleSummary {
            trials: s.trials,
            mismatches: s.mismatches,
        }
    }
}

fn cmd_bench(args: &BenchArgs, seed: u64, out: &Output) -> Result<()> {
    let data = subclass_dataset(&SubclassSpec::default(), seed)?;
    let set = NeuronSet::all(&data.dataset)?;
    let store = Arc::new(binarize(&data.dataset, &set)?);
    let params = BenchmarkParams {
        targets: args.targets,
        group_size: args.group_size,
        k: args.k,
        t: args.t,
        seed,
    };
    let subclass = group_benchmark(&store, &params)?;
    let oracle = greedy_oracle_suite(args.trials, seed)?;
    let checks = vec![
        Check {
            name: "greedy matches brute force",
            pass: oracle.mismatches == 0,
            detail: format!("{} mismatches in {} profiles", oracle.mismatches, oracle.trials),
        },
        Check {
            name: "rdr purity >= 0.9",
            pass: subclass.rdr.mean_purity >= 0.9,
            detail: format!("{:.4} (random {:.4})", subclass.rdr.mean_purity, subclass.random.mean_purity),
        },
        Check {
            name: "rdr entropy <= 0.3",
            pass: subclass.rdr.mean_entropy <= 0.3,
            detail: format!("{:.4} (random {:.4})", subclass.rdr.mean_entropy, subclass.random.mean_entropy),
        },
    ];
    let report = BenchReport {
        checks,
        oracle: OracleSummary::from(&oracle),
        subclass,
    };
    out.report(&report, || {
        let mut s = String::new();
        for c in &report.checks {
            writeln!(s, "{}  {:<28} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail).unwrap();
        }
        s.push('\n');
        s + &eval_table(&report.subclass)
    })?;
    if oracle.mismatches > 0 {
        return Err(Error::Invariant(format!("greedy selection differed from brute force {} times", oracle.mismatches)));
    }
    Ok(())
}

#[derive(Serialize)]
struct ExportSummary {
    dir: PathBuf,
    instances: usize,
    dims: Vec<usize>,
    seed: u64,
}

fn cmd_export(args: &ExportArgs, seed: u64, dir: Option<&Path>) -> Result<()> {
    let dir = dir.ok_or_else(|| Error::query("export needs --out DIR"))?;
    let net = RefNet::seeded(&args.dims, seed, args.bias_scale)?;
    let inputs = sample_inputs(args.instances, net.input_dim(), seed);
    let labels = teacher_labels(&inputs, net.output_dim(), seed);
    export_activations(&net, &inputs, Some(labels), dir)?;
    let summary = ExportSummary {
        dir: dir.to_path_buf(),
        instances: args.instances,
        dims: net.dims(),
        seed,
    };
    let mut json = serde_json::to_string_pretty(&summary)?;
    json.push('\n');
    print!("{json}");
    Ok(())
}
