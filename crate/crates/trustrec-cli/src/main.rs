//! Command-line driver for the trust-propagation recommendation pipeline:
//! ingestion, eigenvalue estimation, similarity construction, ranking,
//! evaluation, and the full configuration sweep.
//!
//! Every run setting can come from a flat `key=value` file (`--config`);
//! explicit flags override file entries, and built-in defaults fill the rest.

use std::collections::HashMap;
use std::fs;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use trustrec::eigen::spectral_radius;
use trustrec::evaluate::{
    cold_start_split, recommend_for_split, run_experiment, sweep_configs, ExperimentConfig,
    ExperimentSettings, MetricsReport,
};
use trustrec::graph::{degree_vector, Convention, DegreeMode};
use trustrec::ingest::{build_dataset, parse_ratings, parse_trust_edges, Dataset};
use trustrec::katz::{build_similarity, BoostDiag, KatzConfig, RowNorm};
use trustrec::persist::{
    write_curves_csv, write_id_map, write_metrics_csv, write_recommendations, write_similarity,
};

/// `println!` that treats a closed stdout (e.g. piping into `head`) as a
/// normal early exit instead of a panic.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if let Err(e) = writeln!(std::io::stdout(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            eprintln!("error: cannot write to stdout: {e}");
            std::process::exit(1);
        }
    }};
}

#[derive(Parser)]
#[command(
    name = "trustrec",
    version,
    about = "Trust-propagation similarity and cold-start recommendation toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the input files, print corpus statistics, persist the id maps
    Ingest(CommonArgs),
    /// Estimate the trust network's dominant eigenvalue by power iteration
    Eigen(CommonArgs),
    /// Build the user-user similarity matrix and write it with its settings
    Similarity(CommonArgs),
    /// Rank items for every cold-start user under one configuration
    Recommend(RecommendArgs),
    /// Score configurations against the held-out cold users
    Evaluate(EvaluateArgs),
    /// Score the whole configuration grid plus the baselines
    Sweep(CommonArgs),
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// Flat key=value settings file; explicit flags override its entries
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Trust statements, one `truster trustee [weight]` per line
    #[arg(long, value_name = "FILE")]
    trust: Option<PathBuf>,

    /// Ratings, one `user item rating` per line with ratings in 1..=5
    #[arg(long, value_name = "FILE")]
    ratings: Option<PathBuf>,

    /// Directory for output files, created when missing
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Input field delimiter; splits on any whitespace when absent
    #[arg(long, value_name = "CHAR")]
    delimiter: Option<char>,

    /// Cap the worker thread pool at this many threads
    #[arg(long, value_name = "N")]
    threads: Option<usize>,

    /// Start-vector seed for the eigenvalue estimator
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,

    /// Attenuation per propagation step, in (0, 1)
    #[arg(long, value_name = "A")]
    alpha: Option<f64>,

    /// Propagation depth: 1 keeps direct edges, 2 adds two-step paths
    #[arg(long, value_name = "K")]
    kmax: Option<usize>,

    /// Degree compensation: none, in, or combined
    #[arg(long, value_name = "MODE")]
    degree_norm: Option<String>,

    /// Row rescaling: none, l1, l2, or max
    #[arg(long, value_name = "NORM")]
    row_norm: Option<String>,

    /// Re-inject direct-trust edges at similarity 1 after propagation
    #[arg(long)]
    boost: bool,

    /// Diagonal handling while boosting: keep or drop
    #[arg(long, value_name = "MODE")]
    boost_diag: Option<String>,

    /// Adjacency orientation: trustee-rows (row i = users who trust i) or
    /// truster-rows (row u = users u trusts); the tokens `as-paper` and
    /// `transposed` are accepted as compatibility aliases, respectively
    #[arg(long, value_name = "NAME")]
    convention: Option<String>,

    /// Neighborhood size used when scoring items
    #[arg(long, value_name = "N")]
    neighbors: Option<usize>,

    /// Length of each ranked recommendation list
    #[arg(long, value_name = "N")]
    topn: Option<usize>,

    /// Largest rating count that still counts a user as cold
    #[arg(long, value_name = "N")]
    cold_threshold: Option<usize>,
}

#[derive(Args, Debug)]
struct RecommendArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Configuration label to rank with (e.g. KS_PCMB, MP, Trust_exp,
    /// Trust_jac); defaults to the flag-built propagation configuration
    #[arg(long, value_name = "LABEL")]
    label: Option<String>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Configuration labels to score; repeatable. Without any label the
    /// three baselines plus the flag-built configuration are scored
    #[arg(long = "label", value_name = "LABEL")]
    labels: Vec<String>,

    /// Score the whole configuration grid plus the baselines
    #[arg(long)]
    all: bool,
}

/// Flag/file/default resolution result: everything a command might need.
struct Settings {
    trust: Option<PathBuf>,
    ratings: Option<PathBuf>,
    out: PathBuf,
    delimiter: Option<char>,
    threads: Option<usize>,
    seed: u64,
    alpha: f64,
    kmax: usize,
    degree_norm: Option<DegreeMode>,
    row_norm: Option<RowNorm>,
    boost: bool,
    boost_diag: BoostDiag,
    convention: Convention,
    neighbors: usize,
    topn: usize,
    cold_threshold: usize,
}

const CONFIG_KEYS: &[&str] = &[
    "trust",
    "ratings",
    "out",
    "delimiter",
    "threads",
    "seed",
    "alpha",
    "kmax",
    "degree-norm",
    "row-norm",
    "boost",
    "boost-diag",
    "convention",
    "neighbors",
    "topn",
    "cold-threshold",
];

fn load_config_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let mut map = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("{}:{}: expected key=value", path.display(), idx + 1))?;
        let key = key.trim();
        if !CONFIG_KEYS.contains(&key) {
            bail!(
                "{}:{}: unknown setting '{key}' (known: {})",
                path.display(),
                idx + 1,
                CONFIG_KEYS.join(", ")
            );
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_convention(s: &str) -> Result<Convention> {
    match s {
        "as-paper" => Ok(Convention::TrusteeRows),
        "transposed" => Ok(Convention::TrusterRows),
        other => Ok(Convention::parse(other)?),
    }
}

fn resolve(args: &CommonArgs) -> Result<Settings> {
    let file = match &args.config {
        Some(path) => load_config_file(path)?,
        None => HashMap::new(),
    };
    let lookup = |key: &str| file.get(key).map(String::as_str);
    fn from_file<T: std::str::FromStr>(value: Option<&str>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        value
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| anyhow!("config setting '{key}={v}': {e}"))
            })
            .transpose()
    }

    let settings = Settings {
        trust: args
            .trust
            .clone()
            .or_else(|| lookup("trust").map(PathBuf::from)),
        ratings: args
            .ratings
            .clone()
            .or_else(|| lookup("ratings").map(PathBuf::from)),
        out: args
            .out
            .clone()
            .or_else(|| lookup("out").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(".")),
        delimiter: match args.delimiter {
            Some(d) => Some(d),
            None => from_file::<char>(lookup("delimiter"), "delimiter")?,
        },
        threads: args.threads.or(from_file(lookup("threads"), "threads")?),
        seed: args
            .seed
            .or(from_file(lookup("seed"), "seed")?)
            .unwrap_or(42),
        alpha: args
            .alpha
            .or(from_file(lookup("alpha"), "alpha")?)
            .unwrap_or(0.008),
        kmax: args
            .kmax
            .or(from_file(lookup("kmax"), "kmax")?)
            .unwrap_or(2),
        degree_norm: match args.degree_norm.as_deref().or(lookup("degree-norm")) {
            None | Some("none") => None,
            Some(other) => Some(DegreeMode::parse(other)?),
        },
        row_norm: match args.row_norm.as_deref().or(lookup("row-norm")) {
            None | Some("none") => None,
            Some(other) => Some(RowNorm::parse(other)?),
        },
        boost: args.boost || from_file(lookup("boost"), "boost")?.unwrap_or(false),
        boost_diag: match args.boost_diag.as_deref().or(lookup("boost-diag")) {
            None => BoostDiag::default(),
            Some(other) => BoostDiag::parse(other)?,
        },
        convention: match args.convention.as_deref().or(lookup("convention")) {
            None => Convention::default(),
            Some(other) => parse_convention(other)?,
        },
        neighbors: args
            .neighbors
            .or(from_file(lookup("neighbors"), "neighbors")?)
            .unwrap_or(trustrec::recommend::DEFAULT_NEIGHBORS),
        topn: args
            .topn
            .or(from_file(lookup("topn"), "topn")?)
            .unwrap_or(trustrec::recommend::DEFAULT_TOP_N),
        cold_threshold: args
            .cold_threshold
            .or(from_file(lookup("cold-threshold"), "cold-threshold")?)
            .unwrap_or(trustrec::evaluate::DEFAULT_COLD_THRESHOLD),
    };
    if let Some(n) = settings.threads {
        trustrec::set_thread_count(n)?;
    }
    Ok(settings)
}

impl Settings {
    fn katz_config(&self) -> Result<KatzConfig> {
        let config = KatzConfig {
            alpha: self.alpha,
            k_max: self.kmax,
            degree_norm: self.degree_norm,
            row_norm: self.row_norm,
            boost: self.boost,
            boost_diag: self.boost_diag,
            convention: self.convention,
        };
        config.validate()?;
        Ok(config)
    }

    fn experiment_settings(&self) -> ExperimentSettings {
        ExperimentSettings {
            k_neighbors: self.neighbors,
            top_n: self.topn,
            min_rating: None,
        }
    }

    fn trust_path(&self) -> Result<&Path> {
        self.trust.as_deref().ok_or_else(|| {
            anyhow!(
                "a trust file is required: pass --trust <FILE> or set trust= in the config file"
            )
        })
    }

    fn ratings_path(&self) -> Result<&Path> {
        self.ratings
            .as_deref()
            .ok_or_else(|| anyhow!("a ratings file is required: pass --ratings <FILE> or set ratings= in the config file"))
    }

    /// Loads both input files; `need_ratings: false` tolerates a missing
    /// ratings file (graph-only commands) and yields an empty rating table.
    fn load(&self, need_ratings: bool) -> Result<Dataset> {
        let trust_path = self.trust_path()?;
        let trust = parse_trust_edges(
            BufReader::new(
                File::open(trust_path)
                    .with_context(|| format!("cannot open {}", trust_path.display()))?,
            ),
            self.delimiter,
        )
        .with_context(|| format!("while parsing {}", trust_path.display()))?;
        let ratings = match (&self.ratings, need_ratings) {
            (Some(path), _) => parse_ratings(
                BufReader::new(
                    File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
                ),
                self.delimiter,
            )
            .with_context(|| format!("while parsing {}", path.display()))?,
            (None, true) => return Err(self.ratings_path().unwrap_err()),
            (None, false) => Vec::new(),
        };
        Ok(build_dataset(&trust, &ratings, self.convention)?)
    }

    fn ensure_out(&self) -> Result<&Path> {
        fs::create_dir_all(&self.out)
            .with_context(|| format!("cannot create output directory {}", self.out.display()))?;
        Ok(&self.out)
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Ingest(args) => cmd_ingest(&args),
        Command::Eigen(args) => cmd_eigen(&args),
        Command::Similarity(args) => cmd_similarity(&args),
        Command::Recommend(args) => cmd_recommend(&args),
        Command::Evaluate(args) => cmd_evaluate(&args.common, &args.labels, args.all),
        Command::Sweep(args) => cmd_evaluate(&args, &[], true),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn cmd_ingest(args: &CommonArgs) -> Result<()> {
    let s = resolve(args)?;
    s.ratings_path()?;
    let data = s.load(true)?;
    let out = s.ensure_out()?;
    let users_path = out.join("users.txt");
    let items_path = out.join("items.txt");
    write_id_map(&users_path, &data.user_map)?;
    write_id_map(&items_path, &data.item_map)?;
    out!("{}", data.stats.summary_line());
    out!(
        "id maps: {} and {}",
        users_path.display(),
        items_path.display()
    );
    Ok(())
}

fn cmd_eigen(args: &CommonArgs) -> Result<()> {
    let s = resolve(args)?;
    let data = s.load(false)?;
    let estimate = spectral_radius(data.graph.adjacency(), 1e-6, 1_000, s.seed);
    out!(
        "spectral radius estimate {:.6} (iterations={}, converged={})",
        estimate.value,
        estimate.iterations,
        estimate.converged
    );
    if estimate.value > 0.0 {
        out!(
            "similarity series converges for alpha below {:.6}",
            1.0 / estimate.value
        );
    }
    Ok(())
}

fn cmd_similarity(args: &CommonArgs) -> Result<()> {
    let s = resolve(args)?;
    let config = s.katz_config()?;
    let data = s.load(false)?;
    let degrees = config
        .degree_norm
        .map(|mode| degree_vector(&data.graph, mode));
    let sigma = build_similarity(&data.graph, degrees.as_ref(), &config)?;
    let out = s.ensure_out()?;
    let path = out.join("similarity.txt");
    write_similarity(&path, &sigma)?;
    write_id_map(&out.join("users.txt"), &data.user_map)?;
    out!(
        "{}: {} users, {} stored entries, density {:.6}",
        config.label(),
        sigma.n_users(),
        sigma.matrix().nnz(),
        sigma.density()
    );
    out!("wrote {}", path.display());
    Ok(())
}

/// Parses a configuration label, folding the run's alpha/convention into
/// propagation configurations so labels and flags compose.
fn config_from_label(label: &str, s: &Settings) -> Result<ExperimentConfig> {
    match ExperimentConfig::parse_label(label)? {
        ExperimentConfig::Katz(c) => {
            let config = KatzConfig {
                alpha: s.alpha,
                convention: s.convention,
                ..c
            };
            config.validate()?;
            Ok(ExperimentConfig::Katz(config))
        }
        other => Ok(other),
    }
}

fn cmd_recommend(args: &RecommendArgs) -> Result<()> {
    let s = resolve(&args.common)?;
    let config = match &args.label {
        Some(label) => config_from_label(label, &s)?,
        None => ExperimentConfig::Katz(s.katz_config()?),
    };
    let data = s.load(true)?;
    let split = cold_start_split(&data.ratings, s.cold_threshold)?;
    let recs = recommend_for_split(&data.graph, &split, &config, &s.experiment_settings())?;
    let out = s.ensure_out()?;
    let path = out.join("recommendations.txt");
    write_recommendations(
        &path,
        &recs,
        &data.user_map,
        &data.item_map,
        &config.label(),
    )?;
    let nonempty = recs.iter().filter(|r| !r.is_empty()).count();
    out!(
        "{}: ranked items for {} cold users ({} nonempty lists)",
        config.label(),
        recs.len(),
        nonempty
    );
    out!("wrote {}", path.display());
    Ok(())
}

fn cmd_evaluate(args: &CommonArgs, labels: &[String], all: bool) -> Result<()> {
    let s = resolve(args)?;
    let configs: Vec<ExperimentConfig> = if all {
        sweep_configs(s.alpha, s.convention)
    } else if !labels.is_empty() {
        labels
            .iter()
            .map(|label| config_from_label(label, &s))
            .collect::<Result<_>>()?
    } else {
        vec![
            ExperimentConfig::MostPopular,
            ExperimentConfig::TrustExplicit,
            ExperimentConfig::TrustJaccard { trusted_sets: true },
            ExperimentConfig::Katz(s.katz_config()?),
        ]
    };
    let data = s.load(true)?;
    let split = cold_start_split(&data.ratings, s.cold_threshold)?;
    out!(
        "{} cold users (1..={} ratings), {} training ratings, {} configurations",
        split.n_cold(),
        split.threshold(),
        split.train().n_ratings(),
        configs.len()
    );
    let rows = run_experiment(&data.graph, &split, &configs, &s.experiment_settings())?;
    let reports: Vec<MetricsReport> = rows
        .iter()
        .filter_map(|(label, outcome)| match outcome {
            Ok(report) => Some(report.clone()),
            Err(e) => {
                eprintln!("warning: {label} failed: {e}");
                None
            }
        })
        .collect();
    let out = s.ensure_out()?;
    let metrics_path = out.join("metrics.csv");
    let curves_path = out.join("curves.csv");
    write_metrics_csv(&metrics_path, &reports)?;
    write_curves_csv(&curves_path, &reports)?;
    print_summary_table(&reports);
    out!(
        "wrote {} and {}",
        metrics_path.display(),
        curves_path.display()
    );
    Ok(())
}

fn print_summary_table(reports: &[MetricsReport]) {
    out!(
        "{:<12} {:>8} {:>10} {:>13} {:>7} {:>7}",
        "config",
        "nDCG@10",
        "Recall@10",
        "Precision@10",
        "users",
        "empty"
    );
    for report in reports {
        out!(
            "{:<12} {:>8.4} {:>10.4} {:>13.4} {:>7} {:>7}",
            report.label(),
            report.ndcg_at(10),
            report.recall_at(10),
            report.precision_at(10),
            report.evaluated_users(),
            report.empty_lists()
        );
    }
}
