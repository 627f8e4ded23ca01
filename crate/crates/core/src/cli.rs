//! Command-line front end.
//!
//! Every command that writes a file also writes `<out>.json`, holding the
//! resolved configuration and a summary of the results. Without `--out` the
//! table goes to stdout and the sidecar and messages go to stderr.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::experiment::{
    fit_thresholds, run_curves, sweep_clustering, sweep_m, threshold_from_curves, GraphSource,
    Model, RunConfig, SweepRecord, ThresholdFit, DEFAULT_HORIZON,
};
use crate::format::{opt_sig6, sig6};
use crate::game::PayoffMatrix;
use crate::graphs::{enumerate_k_regular_connected, graph6, triangle_counts, Graph, GraphSetEntry};

pub const EXIT_PARAMETER: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_CAPACITY: i32 = 4;
pub const EXIT_INPUT: i32 = 5;
pub const EXIT_RUNTIME: i32 = 6;

#[derive(Debug, Parser)]
#[command(
    name = "coopnet",
    version,
    about = "Reputation-based cooperation on k-regular networks"
)]
pub struct Cli {
    /// Cap on worker threads; output bytes do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write every connected k-regular graph on n nodes (one per isomorphism class) as graph6.
    Enumerate {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Clustering coefficient and per-node triangle counts for each graph in a graph6 file.
    Clustering {
        #[arg(long)]
        graphs: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run-averaged payoff curves and the cooperation threshold for one configuration.
    Threshold {
        #[arg(long, value_enum, default_value_t = ModelArg::Vanilla)]
        model: ModelArg,
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// graph6 file holding exactly one graph to use in every run.
        #[arg(long)]
        graphs: Option<PathBuf>,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Cooperation threshold as a function of the number of cheaters.
    SweepM {
        #[arg(long, value_enum, default_value_t = ModelChoice::Both)]
        model: ModelChoice,
        /// Comma-separated cheater counts; defaults to 1..n-1.
        #[arg(long, value_delimiter = ',')]
        m: Vec<usize>,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Threshold for every graph in a graph6 file, regressed on clustering.
    SweepClustering {
        #[arg(long)]
        graphs: PathBuf,
        #[arg(long, value_enum, default_value_t = ModelArg::Gossip)]
        model: ModelArg,
        /// Comma-separated cheater counts.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        m: Vec<usize>,
        #[command(flatten)]
        sim: SimArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[arg(long, default_value_t = 1000)]
    pub runs: usize,
    /// Horizon in plays per agent.
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    pub horizon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true, default_value_t = PayoffMatrix::default().cc)]
    pub pcc: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = PayoffMatrix::default().cd)]
    pub pcd: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = PayoffMatrix::default().dc)]
    pub pdc: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = PayoffMatrix::default().dd)]
    pub pdd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Vanilla,
    Gossip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    Vanilla,
    Gossip,
    Both,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Vanilla => Model::Vanilla,
            ModelArg::Gossip => Model::Gossip,
        }
    }
}

impl ModelChoice {
    fn models(self) -> Vec<Model> {
        match self {
            ModelChoice::Vanilla => vec![Model::Vanilla],
            ModelChoice::Gossip => vec![Model::Gossip],
            ModelChoice::Both => vec![Model::Vanilla, Model::Gossip],
        }
    }
}

impl SimArgs {
    fn payoffs(&self) -> PayoffMatrix {
        let p = PayoffMatrix {
            cc: self.pcc,
            cd: self.pcd,
            dc: self.pdc,
            dd: self.pdd,
        };
        for v in p.dilemma_violations() {
            log::warn!("payoff matrix is not a cooperation dilemma: {v}");
        }
        p
    }

    fn config(&self, model: Model, m: usize, graph_source: GraphSource) -> RunConfig {
        RunConfig {
            model,
            n: self.n,
            k: self.k,
            m,
            payoffs: self.payoffs(),
            horizon_r: self.horizon,
            runs: self.runs,
            master_seed: self.seed,
            graph_source,
        }
    }
}

/// Maps an error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) => EXIT_PARAMETER,
        Error::Io(_) => EXIT_IO,
        Error::Capacity(_) => EXIT_CAPACITY,
        Error::Parse { .. } | Error::Validation(_) => EXIT_INPUT,
        Error::GenerationFailure { .. } | Error::DegenerateRegression => EXIT_RUNTIME,
    }
}

/// Parses `std::env::args`, runs, and returns the exit code.
pub fn main() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .try_init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARAMETER } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.threads {
        Some(0) => Err(Error::invalid("--threads must be at least 1")),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::invalid(format!("cannot build thread pool: {e}")))?;
            pool.install(|| dispatch(cli.command))
        }
        None => dispatch(cli.command),
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Enumerate { n, k, out } => cmd_enumerate(n, k, out.as_deref()),
        Command::Clustering { graphs, out } => cmd_clustering(&graphs, out.as_deref()),
        Command::Threshold {
            model,
            m,
            graphs,
            sim,
        } => cmd_threshold(model.into(), m, graphs.as_deref(), &sim),
        Command::SweepM { model, m, sim } => cmd_sweep_m(&model.models(), &m, &sim),
        Command::SweepClustering {
            graphs,
            model,
            m,
            sim,
        } => cmd_sweep_clustering(&graphs, model.into(), &m, &sim),
    }
}

/// Destination for the primary output plus its sidecar.
struct Output<'a> {
    path: Option<&'a Path>,
}

impl<'a> Output<'a> {
    fn new(path: Option<&'a Path>) -> Self {
        Output { path }
    }

    fn write(&self, body: &str) -> Result<()> {
        match self.path {
            Some(p) => {
                let mut w = BufWriter::new(File::create(p).map_err(with_path(p))?);
                w.write_all(body.as_bytes()).map_err(with_path(p))?;
                w.flush().map_err(with_path(p))?;
            }
            None => {
                let mut out = io::stdout().lock();
                out.write_all(body.as_bytes())?;
                out.flush()?;
            }
        }
        Ok(())
    }

    fn sidecar(
        &self,
        command: &str,
        config: impl Serialize,
        summary: impl Serialize,
    ) -> Result<()> {
        let doc = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "summary": summary,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("sidecar is serializable");
        text.push('\n');
        match self.path {
            Some(p) => {
                let side = sidecar_path(p);
                std::fs::write(&side, text).map_err(with_path(&side))?
            }
            None => eprint!("{text}"),
        }
        Ok(())
    }

    /// Human-readable line: stdout when the table went to a file, stderr otherwise.
    fn note(&self, line: &str) {
        if self.path.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
}

/// `results.csv` -> `results.csv.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn with_path(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn read_graph_file(path: &Path) -> Result<Vec<Graph>> {
    let file = File::open(path).map_err(with_path(path))?;
    graph6::read_graphs(BufReader::new(file)).map_err(|e| match e {
        Error::Io(e) => with_path(path)(e),
        other => other,
    })
}

pub fn cmd_enumerate(n: usize, k: usize, out: Option<&Path>) -> Result<()> {
    let set = enumerate_k_regular_connected(n, k)?;
    let mut body = String::new();
    for e in &set {
        body.push_str(&graph6::encode(&e.graph));
        body.push('\n');
    }
    let out = Output::new(out);
    out.write(&body)?;
    out.sidecar(
        "enumerate",
        json!({ "n": n, "k": k }),
        json!({ "count": set.len() }),
    )?;
    out.note(&format!(
        "{} connected {k}-regular graphs on {n} nodes",
        set.len()
    ));
    Ok(())
}

pub fn cmd_clustering(graphs: &Path, out: Option<&Path>) -> Result<()> {
    let entries: Vec<GraphSetEntry> = read_graph_file(graphs)?
        .into_iter()
        .map(GraphSetEntry::new)
        .collect();
    let mut body = String::from("graph_id,chi,triangles\n");
    for e in &entries {
        let tri: Vec<String> = triangle_counts(&e.graph)
            .iter()
            .map(|t| t.to_string())
            .collect();
        body.push_str(&format!(
            "{},{},{}\n",
            e.canonical_key,
            sig6(e.chi),
            tri.join(";")
        ));
    }
    let chis = entries.iter().map(|e| e.chi);
    let min = chis.clone().fold(f64::INFINITY, f64::min);
    let max = chis.fold(f64::NEG_INFINITY, f64::max);
    let out = Output::new(out);
    out.write(&body)?;
    let summary = if entries.is_empty() {
        json!({ "count": 0 })
    } else {
        json!({ "count": entries.len(), "chi_min": min, "chi_max": max })
    };
    out.sidecar("clustering", json!({ "graphs": graphs }), summary)?;
    out.note(&format!(
        "{} graphs, chi in [{}, {}]",
        entries.len(),
        sig6(min),
        sig6(max)
    ));
    Ok(())
}

pub fn cmd_threshold(model: Model, m: usize, graphs: Option<&Path>, sim: &SimArgs) -> Result<()> {
    let (cfg, graph) = match graphs {
        Some(path) => {
            let mut gs = read_graph_file(path)?;
            if gs.len() != 1 {
                return Err(Error::Validation(format!(
                    "{} holds {} graphs; threshold needs exactly one",
                    path.display(),
                    gs.len()
                )));
            }
            let g = gs.pop().expect("one graph");
            let mut cfg = sim.config(model, m, GraphSource::Fixed);
            cfg.n = g.node_count();
            cfg.k = g.regular_degree().unwrap_or(0);
            (cfg, Some(g))
        }
        None => {
            let source = match model {
                Model::Vanilla => GraphSource::Complete,
                Model::Gossip => GraphSource::RandomPerRun,
            };
            (sim.config(model, m, source), None)
        }
    };
    let curves = run_curves(&cfg, graph.as_ref())?;
    let threshold = threshold_from_curves(&curves);
    let mut body = String::from("r,coop_mean,cheat_mean\n");
    for p in &curves.points {
        body.push_str(&format!(
            "{},{},{}\n",
            sig6(p.r),
            opt_sig6(p.coop_mean()),
            opt_sig6(p.cheat_mean())
        ));
    }
    let out = Output::new(sim.out.as_deref());
    out.write(&body)?;
    let graph_id = graph
        .as_ref()
        .map(|g| crate::graphs::canonical_key(g).to_string());
    out.sidecar(
        "threshold",
        json!({ "run": cfg, "graph": graph_id }),
        json!({ "r_star": threshold.r_star, "step": threshold.step }),
    )?;
    out.note(&format!("r_star={}", opt_sig6(threshold.r_star)));
    Ok(())
}

pub fn cmd_sweep_m(models: &[Model], m_values: &[usize], sim: &SimArgs) -> Result<()> {
    let m_values: Vec<usize> = if m_values.is_empty() {
        (1..sim.n).collect()
    } else {
        m_values.to_vec()
    };
    let mut body = String::from("m,model,r_star\n");
    let mut rows = Vec::new();
    let mut configs = Vec::new();
    for &model in models {
        let source = match model {
            Model::Vanilla => GraphSource::Complete,
            Model::Gossip => GraphSource::RandomPerRun,
        };
        let template = sim.config(model, m_values[0], source);
        for (m, t) in sweep_m(&template, &m_values, None)? {
            body.push_str(&format!("{m},{model},{}\n", opt_sig6(t.r_star)));
            rows.push(json!({ "m": m, "model": model, "r_star": t.r_star }));
        }
        configs.push(template);
    }
    let out = Output::new(sim.out.as_deref());
    out.write(&body)?;
    out.sidecar(
        "sweep-m",
        json!({ "templates": configs, "m_values": m_values }),
        rows,
    )?;
    out.note(&format!("{} rows", m_values.len() * models.len()));
    Ok(())
}

pub fn cmd_sweep_clustering(
    graphs: &Path,
    model: Model,
    m_values: &[usize],
    sim: &SimArgs,
) -> Result<()> {
    let entries: Vec<GraphSetEntry> = read_graph_file(graphs)?
        .into_iter()
        .map(GraphSetEntry::new)
        .collect();
    if m_values.is_empty() {
        return Err(Error::invalid("at least one --m value is required"));
    }
    let template = sim.config(model, m_values[0], GraphSource::Fixed);
    let mut body = String::from("graph_id,chi,m,r_star\n");
    let mut fits: Vec<ThresholdFit> = Vec::new();
    for &m in m_values {
        let records: Vec<SweepRecord> = sweep_clustering(&entries, m, &template)?;
        for r in &records {
            body.push_str(&format!(
                "{},{},{},{}\n",
                r.graph_id,
                sig6(r.chi),
                r.m,
                opt_sig6(r.threshold.r_star)
            ));
        }
        fits.push(fit_thresholds(&records)?);
    }
    let out = Output::new(sim.out.as_deref());
    out.write(&body)?;
    let (n, k) = crate::experiment::validate_graph_set(&entries)?;
    out.sidecar(
        "sweep-clustering",
        json!({ "graphs": graphs, "template": RunConfig { n, k, ..template }, "m_values": m_values }),
        json!({ "ols": fits }),
    )?;
    for f in &fits {
        out.note(&format!(
            "m={}: slope={} intercept={} r2={} points={} excluded={}",
            f.m,
            sig6(f.fit.slope),
            sig6(f.fit.intercept),
            sig6(f.fit.r_squared),
            f.fit.points,
            f.excluded
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flags() {
        let cli = Cli::try_parse_from([
            "coopnet", "sweep-m", "--model", "vanilla", "--m", "1,2,3", "--runs", "5", "--pcd",
            "-2",
        ])
        .unwrap();
        match cli.command {
            Command::SweepM { model, m, sim } => {
                assert_eq!(model, ModelChoice::Vanilla);
                assert_eq!(m, vec![1, 2, 3]);
                assert_eq!(sim.runs, 5);
                assert_eq!(sim.pcd, -2.0);
                assert_eq!(sim.pcc, 1.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_flags() {
        assert!(Cli::try_parse_from(["coopnet", "enumerate", "--bogus", "1"]).is_err());
        assert!(Cli::try_parse_from(["coopnet", "threshold", "--model", "tit-for-tat"]).is_err());
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            exit_code(&Error::invalid("x")),
            exit_code(&Error::Io(io::Error::other("x"))),
            exit_code(&Error::Capacity("x".into())),
            exit_code(&Error::parse(0, "x")),
        ];
        for (i, a) in codes.iter().enumerate() {
            assert_ne!(*a, 0);
            for b in &codes[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            sidecar_path(Path::new("a/b.csv")),
            PathBuf::from("a/b.csv.json")
        );
    }
}
