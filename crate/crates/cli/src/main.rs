//! `topostat` command-line interface.

mod grid;

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use topostat::clustering::{
    baseline_hierarchical, baseline_kmeans, cluster_accuracy, simulate_circles, ws_kmeans_graphs,
    KMeansParams, Pattern, SimulationParams,
};
use topostat::complex::{
    betti_from_boundaries, boundary_matrices, rips_complex, RipsParams, DEFAULT_MAX_SIMPLICES,
};
use topostat::graphfilt::{betti_curve_with, birth_death_decompose, Direction, WeightedGraph};
use topostat::inference::{
    permutation_test_with, transposition_test_chains, GroupLabels, DEFAULT_INTERVAL,
};
use topostat::morse1d::{morse_diagram, SmoothingParams};
use topostat::wasserstein::{pairwise_loss_with, LossChannel, LossMatrix};
use topostat::{io as tio, Error, Execution, Result};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(
    name = "topostat",
    version,
    about = "Persistent homology statistics on point clouds, signals and networks"
)]
struct Cli {
    /// RNG seed; required by stochastic commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file (or directory for commands that write several files).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rips complex of a point cloud with its Betti numbers.
    Rips(RipsArgs),
    /// β0/β1 curve of a graph filtration.
    Betti(BettiArgs),
    /// Birth and death sets of a weighted graph.
    Decompose(DecomposeArgs),
    /// Pairwise topological loss matrices over a collection of graphs.
    Pdist(PdistArgs),
    /// Permutation or transposition test of the ratio statistic.
    Permtest(PermtestArgs),
    /// Cluster a collection of graphs.
    Cluster(ClusterArgs),
    /// Sublevel-set persistence of a 1D signal.
    Morse(MorseArgs),
    /// Generate noisy circle networks.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct RipsArgs {
    /// Point cloud CSV, one point per row.
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    radius: f64,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_SIMPLICES)]
    max_simplices: usize,
    /// Also write each boundary matrix as `B<k>.csv` into this directory.
    #[arg(long)]
    boundary_dir: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DirectionArg {
    /// Keep edges with weight above the threshold.
    Above,
    /// Keep edges with weight at most the threshold (distance data).
    Rips,
}

#[derive(Args, Debug)]
struct BettiArgs {
    /// Square weight matrix CSV.
    #[arg(long)]
    graph: PathBuf,
    /// `start:step:stop` (stop may be `max`) or a comma-separated list.
    #[arg(long)]
    thresholds: String,
    #[arg(long, value_enum, default_value = "above")]
    direction: DirectionArg,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Death value for the 0D diagram; defaults to the largest weight + 1.
    #[arg(long)]
    sentinel: Option<f64>,
}

#[derive(Args, Debug)]
struct PdistArgs {
    /// Directory of weight-matrix CSVs, read in file-name order.
    #[arg(long)]
    graphs: PathBuf,
    /// Wasserstein order.
    #[arg(long, default_value_t = 2.0)]
    r: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TestMethod {
    Permutation,
    Transposition,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ChannelArg {
    D0,
    D1,
    D01,
}

#[derive(Args, Debug)]
struct PermtestArgs {
    /// Square loss matrix CSV, or a JSON loss object written by `pdist`.
    #[arg(long)]
    loss: PathBuf,
    /// Which channel to use when `--loss` is a JSON loss object.
    #[arg(long, value_enum, default_value = "d01")]
    channel: ChannelArg,
    /// Group labels (1 or 2), one per row.
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, value_enum, default_value = "transposition")]
    method: TestMethod,
    /// Permutations or transpositions per chain; accepts `1e6`.
    #[arg(long, value_parser = parse_count, default_value = "10000")]
    steps: usize,
    /// Transpositions between full relabelings.
    #[arg(long, default_value_t = DEFAULT_INTERVAL)]
    interval: usize,
    /// Independent transposition chains.
    #[arg(long, default_value_t = 1)]
    chains: usize,
    /// Histogram bins for the null distribution.
    #[arg(long, default_value_t = 50)]
    bins: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ClusterMethod {
    Ws,
    Kmeans,
    Hier,
}

#[derive(Args, Debug)]
struct ClusterArgs {
    #[arg(long)]
    graphs: PathBuf,
    #[arg(long)]
    k: usize,
    /// Random restarts (ws) or repeated runs (kmeans).
    #[arg(long, default_value_t = 100)]
    seeds: usize,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    #[arg(long, value_enum, default_value = "ws")]
    method: ClusterMethod,
    /// True labels in 1..=k; enables accuracy reporting.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MorseArgs {
    /// Signal CSV with columns t,y.
    #[arg(long)]
    signal: PathBuf,
    #[arg(long, default_value_t = 100)]
    degree: usize,
    #[arg(long, default_value_t = 1e-4)]
    bandwidth: f64,
    /// Pair the raw samples without smoothing.
    #[arg(long)]
    no_smooth: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PatternArg {
    Equiv,
    Diff,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    pattern: PatternArg,
    #[arg(long, default_value_t = 60)]
    nodes: usize,
    #[arg(long, default_value_t = 0.3)]
    sd: f64,
    #[arg(long, default_value_t = 5)]
    per_group: usize,
    #[arg(long, default_value_t = 4)]
    groups: usize,
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a count"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= usize::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(format!("'{s}' is not a whole nonnegative count"))
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { row, msg } => Error::Parse {
            row,
            msg: format!("{}: {msg}", path.display()),
        },
        other => other,
    })
}

fn read_graph(path: &Path) -> Result<WeightedGraph> {
    with_path(path, tio::read_matrix(open(path)?)).map(WeightedGraph::new)
}

/// Graph CSVs in a directory, sorted by name; `labels.csv` is skipped.
fn graph_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries =
        fs::read_dir(dir).map_err(|e| Error::InvalidInput(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry?.path();
        let is_csv = path.extension().is_some_and(|e| e == "csv");
        let is_labels = path.file_name().is_some_and(|n| n == "labels.csv");
        if path.is_file() && is_csv && !is_labels {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no graph CSV files in {}",
            dir.display()
        )));
    }
    Ok(files)
}

fn read_graphs(dir: &Path) -> Result<Vec<WeightedGraph>> {
    graph_files(dir)?.iter().map(|p| read_graph(p)).collect()
}

struct Ctx {
    seed: Option<u64>,
    output: Option<PathBuf>,
    format: Option<Format>,
    exec: Execution,
}

impl Ctx {
    fn require_seed(&self, command: &str) -> Result<u64> {
        self.seed.ok_or_else(|| {
            Error::InvalidParameter(format!("`{command}` is stochastic; pass --seed"))
        })
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    /// Output file, or stdout.
    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.output {
            Some(p) => Box::new(create(p)?),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn output_dir(&self, command: &str) -> Result<&Path> {
        let dir = self.output.as_deref().ok_or_else(|| {
            Error::InvalidParameter(format!(
                "`{command}` writes several files; pass --output DIR"
            ))
        })?;
        fs::create_dir_all(dir)?;
        Ok(dir)
    }

    fn emit_json(&self, value: &Value) -> Result<()> {
        let mut w = self.sink()?;
        tio::write_json(&mut w, value)?;
        w.flush()?;
        Ok(())
    }
}

fn meta(seed: u64, parameters: Value) -> Value {
    json!({ "seed": seed, "parameters": parameters, "version": VERSION })
}

fn cmd_rips(ctx: &Ctx, a: &RipsArgs) -> Result<()> {
    let cloud = with_path(&a.points, tio::read_points(open(&a.points)?))?;
    let params = RipsParams {
        max_dim: a.max_dim,
        radius: a.radius,
        max_simplices: a.max_simplices,
    };
    let complex = rips_complex(&cloud.distances(), &params)?;
    let boundaries = boundary_matrices(&complex)?;
    let betti = betti_from_boundaries(&boundaries, complex.n_vertices())?;
    if let Some(dir) = &a.boundary_dir {
        fs::create_dir_all(dir)?;
        for b in &boundaries {
            let mut w = create(&dir.join(format!("B{}.csv", b.dim())))?;
            tio::write_boundary(&mut w, b)?;
            w.flush()?;
        }
    }
    let counts = complex.counts();
    ctx.emit_json(&json!({
        "complex": complex,
        "counts": counts,
        "betti": betti,
        "ranks": boundaries.iter().map(|b| b.rank()).collect::<Vec<_>>(),
    }))?;
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let summary = format!("{} | {}", join(&counts), join(betti.as_slice()));
    if ctx.output.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn cmd_betti(ctx: &Ctx, a: &BettiArgs) -> Result<()> {
    let g = read_graph(&a.graph)?;
    let grid = grid::parse_grid(&a.thresholds, g.max_weight()).map_err(Error::InvalidParameter)?;
    let direction = match a.direction {
        DirectionArg::Above => Direction::Above,
        DirectionArg::Rips => Direction::Below,
    };
    let curve = betti_curve_with(&g, &grid, direction)?;
    match ctx.format_or(Format::Csv) {
        Format::Csv => {
            let mut w = ctx.sink()?;
            tio::write_betti_curve(&mut w, &curve)?;
            w.flush()?;
            Ok(())
        }
        Format::Json => ctx.emit_json(&serde_json::to_value(&curve)?),
    }
}

fn cmd_decompose(ctx: &Ctx, a: &DecomposeArgs) -> Result<()> {
    let g = read_graph(&a.graph)?;
    let sets = birth_death_decompose(&g)?;
    let sentinel = a.sentinel.unwrap_or(g.max_weight() + 1.0);
    let mut v = serde_json::to_value(&sets)?;
    v["sentinel"] = json!(sentinel);
    v["diagram0"] = json!(sets.zero_dim_diagram(Some(sentinel)));
    ctx.emit_json(&v)
}

fn cmd_pdist(ctx: &Ctx, a: &PdistArgs) -> Result<()> {
    let graphs = read_graphs(&a.graphs)?;
    let loss = pairwise_loss_with(&graphs, a.r, ctx.exec)?;
    match ctx.format_or(Format::Csv) {
        Format::Json => ctx.emit_json(&serde_json::to_value(&loss)?),
        Format::Csv => {
            let dir = ctx.output_dir("pdist --format csv")?;
            for (name, m) in [("D0", &loss.d0), ("D1", &loss.d1), ("D01", &loss.d01)] {
                let mut w = create(&dir.join(format!("{name}.csv")))?;
                tio::write_matrix(&mut w, m)?;
                w.flush()?;
            }
            Ok(())
        }
    }
}

fn read_loss(path: &Path, channel: ChannelArg) -> Result<topostat::SymmetricMatrix> {
    if path.extension().is_some_and(|e| e == "json") {
        let loss: LossMatrix = tio::read_json(open(path)?)?;
        let c = match channel {
            ChannelArg::D0 => LossChannel::D0,
            ChannelArg::D1 => LossChannel::D1,
            ChannelArg::D01 => LossChannel::D01,
        };
        Ok(loss.channel(c).clone())
    } else {
        with_path(path, tio::read_matrix(open(path)?))
    }
}

fn cmd_permtest(ctx: &Ctx, a: &PermtestArgs) -> Result<()> {
    let seed = ctx.require_seed("permtest")?;
    let loss = read_loss(&a.loss, a.channel)?;
    let raw = with_path(&a.labels, tio::read_labels(open(&a.labels)?))?;
    let labels = GroupLabels::new(
        raw.iter()
            .map(|&l| u8::try_from(l).unwrap_or(u8::MAX))
            .collect(),
    )?;
    let result = match a.method {
        TestMethod::Permutation => permutation_test_with(&loss, &labels, a.steps, seed, ctx.exec)?,
        TestMethod::Transposition => transposition_test_chains(
            &loss, &labels, a.steps, a.interval, a.chains, seed, ctx.exec,
        )?,
    };
    let method = match a.method {
        TestMethod::Permutation => "permutation",
        TestMethod::Transposition => "transposition",
    };
    ctx.emit_json(&json!({
        "observed": result.observed,
        "p_value": result.p_value,
        "n_perms": result.n_perms,
        "skipped": result.skipped,
        "null_histogram": result.histogram(a.bins),
        "meta": meta(seed, json!({
            "method": method,
            "steps": a.steps,
            "interval": a.interval,
            "chains": a.chains,
            "loss": a.loss,
            "labels": a.labels,
        })),
    }))
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let sd = if v.len() > 1 {
        (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (m, sd)
}

fn cmd_cluster(ctx: &Ctx, a: &ClusterArgs) -> Result<()> {
    let graphs = read_graphs(&a.graphs)?;
    let truth = match &a.labels {
        Some(p) => {
            let t = with_path(p, tio::read_labels(open(p)?))?;
            if t.len() != graphs.len() {
                return Err(Error::InvalidInput(format!(
                    "{} labels for {} graphs",
                    t.len(),
                    graphs.len()
                )));
            }
            Some(t)
        }
        None => None,
    };
    let accuracy = |pred: &[usize]| -> Result<Option<(f64, Value)>> {
        match &truth {
            Some(t) => {
                let (acc, f) = cluster_accuracy(t, pred, a.k)?;
                Ok(Some((acc, json!(f.counts))))
            }
            None => Ok(None),
        }
    };
    let mut out = json!({});
    let (labels, run_labels): (Vec<usize>, Vec<Vec<usize>>) = match a.method {
        ClusterMethod::Ws => {
            let seed = ctx.require_seed("cluster --method ws")?;
            let params = KMeansParams {
                k: a.k,
                n_seeds: a.seeds,
                max_iter: a.max_iter,
                seed,
            };
            let r = ws_kmeans_graphs(&graphs, &params, ctx.exec)?;
            out["objective"] = json!(r.best.objective);
            out["iterations"] = json!(r.best.iterations);
            out["converged"] = json!(r.best.converged);
            out["run_objectives"] = json!(r.runs.iter().map(|s| s.objective).collect::<Vec<_>>());
            out["meta"] = meta(
                seed,
                json!({"method": "ws", "k": a.k, "seeds": a.seeds, "max_iter": a.max_iter}),
            );
            (
                r.best.assignment.clone(),
                r.runs.into_iter().map(|s| s.assignment).collect(),
            )
        }
        ClusterMethod::Kmeans => {
            let seed = ctx.require_seed("cluster --method kmeans")?;
            if a.seeds == 0 {
                return Err(Error::InvalidParameter("--seeds must be at least 1".into()));
            }
            let runs: Vec<Vec<usize>> = (0..a.seeds as u64)
                .map(|s| baseline_kmeans(&graphs, a.k, seed.wrapping_add(s)))
                .collect::<Result<_>>()?;
            out["meta"] = meta(
                seed,
                json!({"method": "kmeans", "k": a.k, "seeds": a.seeds}),
            );
            (runs[0].clone(), runs)
        }
        ClusterMethod::Hier => {
            let l = baseline_hierarchical(&graphs, a.k)?;
            (l.clone(), vec![l])
        }
    };
    if let Some((acc, confusion)) = accuracy(&labels)? {
        out["accuracy"] = json!(acc);
        out["confusion"] = confusion;
        let accs = run_labels
            .iter()
            .map(|l| accuracy(l).map(|x| x.map(|(a, _)| a).unwrap_or_default()))
            .collect::<Result<Vec<f64>>>()?;
        let (m, sd) = mean_sd(&accs);
        out["accuracy_mean"] = json!(m);
        out["accuracy_sd"] = json!(sd);
    }
    out["labels"] = json!(labels);
    ctx.emit_json(&out)
}

fn cmd_morse(ctx: &Ctx, a: &MorseArgs) -> Result<()> {
    let signal = with_path(&a.signal, tio::read_signal(open(&a.signal)?))?;
    let params = SmoothingParams::new(a.degree, a.bandwidth)?;
    let pairs = morse_diagram(&signal, (!a.no_smooth).then_some(&params))?;
    match ctx.format_or(Format::Csv) {
        Format::Csv => {
            let mut w = ctx.sink()?;
            tio::write_morse_pairs(&mut w, &pairs)?;
            w.flush()?;
            Ok(())
        }
        Format::Json => ctx.emit_json(&json!({
            "pairs": pairs.pairs.iter().map(|p| json!({
                "birth": p.birth,
                "death": p.death,
                "birth_t": p.birth_position,
                "death_t": p.death_position,
            })).collect::<Vec<_>>(),
            "essential_birth": pairs.essential,
        })),
    }
}

fn cmd_simulate(ctx: &Ctx, a: &SimulateArgs) -> Result<()> {
    let seed = ctx.require_seed("simulate")?;
    let dir = ctx.output_dir("simulate")?.to_path_buf();
    let pattern = match a.pattern {
        PatternArg::Equiv => Pattern::Equivalent,
        PatternArg::Diff => Pattern::Different,
    };
    let params = SimulationParams {
        n_nodes: a.nodes,
        noise_sd: a.sd,
        per_group: a.per_group,
        groups: a.groups,
    };
    let data = simulate_circles(pattern, &params, seed)?;
    let pattern_name = match a.pattern {
        PatternArg::Equiv => "equiv",
        PatternArg::Diff => "diff",
    };
    let header = format!(
        "# topostat {VERSION} simulate seed={seed} pattern={pattern_name} nodes={} sd={} per_group={} groups={}\n",
        a.nodes, a.sd, a.per_group, a.groups
    );
    let width = data.graphs.len().to_string().len().max(3);
    for (i, g) in data.graphs.iter().enumerate() {
        let mut w = create(&dir.join(format!("graph_{:0width$}.csv", i + 1)))?;
        w.write_all(header.as_bytes())?;
        tio::write_matrix(&mut w, g.matrix())?;
        w.flush()?;
    }
    let mut w = create(&dir.join("labels.csv"))?;
    tio::write_labels(&mut w, &data.labels)?;
    w.flush()?;
    let mut w = create(&dir.join("meta.json"))?;
    tio::write_json(
        &mut w,
        &meta(
            seed,
            json!({
                "pattern": pattern_name,
                "nodes": a.nodes,
                "sd": a.sd,
                "per_group": a.per_group,
                "groups": a.groups,
            }),
        ),
    )?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let exec = match cli.jobs {
        Some(0) => return Err(Error::InvalidParameter("--jobs must be at least 1".into())),
        Some(1) => Execution::Sequential,
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::Internal(e.to_string()))?;
            Execution::Parallel
        }
        None => Execution::Parallel,
    };
    let ctx = Ctx {
        seed: cli.seed,
        output: cli.output,
        format: cli.format,
        exec,
    };
    match &cli.command {
        Command::Rips(a) => cmd_rips(&ctx, a),
        Command::Betti(a) => cmd_betti(&ctx, a),
        Command::Decompose(a) => cmd_decompose(&ctx, a),
        Command::Pdist(a) => cmd_pdist(&ctx, a),
        Command::Permtest(a) => cmd_permtest(&ctx, a),
        Command::Cluster(a) => cmd_cluster(&ctx, a),
        Command::Morse(a) => cmd_morse(&ctx, a),
        Command::Simulate(a) => cmd_simulate(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numeric() { 3 } else { 2 })
        }
    }
}
