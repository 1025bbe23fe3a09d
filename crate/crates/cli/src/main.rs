//! `causal-vc` command-line interface.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data or model errors.
//! Errors are written to stderr as a single JSON object.

mod output;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use causal_vc::bounds::{self, ModelClass};
use causal_vc::harness::{self, ExperimentConfig, ExperimentKind};
use causal_vc::learners::{self, LabeledQuery};
use causal_vc::models::{glue_gaussian_chain, AncestorReading, ModelFile, Polytree};
use causal_vc::stattests::{self, AnmConfig, AnmTester, HsicConfig, Tester};
use causal_vc::synthgen::{self, GamConfig, Scm};
use causal_vc::{load_dataset, Dataset, Error, Property, PropertyQuery, Result, Universe};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::output::{emit, Format};

#[derive(Parser, Debug)]
#[command(name = "causal-vc", version, about = "Causal models as predictors of statistical test outcomes")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "CAUSAL_VC_SEED", default_value_t = 0)]
    seed: u64,
    /// Progress messages on stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random SCM and sample a dataset from it.
    Gen(GenArgs),
    /// Run a statistical test on a dataset.
    Test(TestArgs),
    /// Fit a model to a dataset.
    Fit(FitArgs),
    /// Predict a property from a model file.
    Predict(PredictArgs),
    /// Glue two bivariate Gaussian covariances along a chain X - Y - Z.
    Merge(MergeArgs),
    /// Generalization bound for a model class.
    Bound(BoundArgs),
    /// Number of tests needed for a target gap.
    Plan(PlanArgs),
    /// Run a risk-gap experiment.
    Experiment(ExperimentArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ScmKind {
    Linear,
    Gam,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(value_enum)]
    kind: ScmKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.5)]
    degree: f64,
    /// Number of samples.
    #[arg(long, default_value_t = 1000)]
    l: usize,
    /// Dataset CSV.
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth JSON (default: `<out>.truth.json`).
    #[arg(long)]
    truth: Option<PathBuf>,
    /// GAM only: allow negative mechanism weights.
    #[arg(long)]
    negative_weights: bool,
}

#[derive(Args, Debug)]
struct TestArgs {
    #[arg(long)]
    data: PathBuf,
    /// e.g. `ci:1,4|2`, `anm:3->5`, `corr:2,6`, `sign:2,6`.
    #[arg(long)]
    query: String,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// JSON `{"names": [...]}` resolving named CSV headers.
    #[arg(long)]
    universe: Option<PathBuf>,
    /// HSIC p-values from this many permutations instead of the gamma fit.
    #[arg(long)]
    permutations: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FitMethod {
    Pc,
    Polytree,
    Path,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(value_enum)]
    method: FitMethod,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Polytree only: number of ordered pairs to test (default: all).
    #[arg(long)]
    k: Option<usize>,
    /// PC only: largest conditioning set.
    #[arg(long, default_value_t = 1)]
    max_cond: usize,
    #[arg(long)]
    out: PathBuf,
    /// Training labels CSV (default: `<out>.labels.csv`).
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    universe: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Reading {
    Latent,
    Literal,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    query: String,
    /// How causal sufficiency is read for `lingam:` queries.
    #[arg(long, value_enum, default_value_t = Reading::Latent)]
    reading: Reading,
}

#[derive(Args, Debug)]
struct MergeArgs {
    /// 2x2 covariance of (X, Y) as a JSON array.
    #[arg(long)]
    xy: PathBuf,
    /// 2x2 covariance of (Y, Z).
    #[arg(long)]
    yz: PathBuf,
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[arg(long)]
    class: ModelClass,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: u64,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long, default_value_t = 0.0)]
    empirical: f64,
}

#[derive(Args, Debug)]
struct PlanArgs {
    #[arg(long)]
    class: ModelClass,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExperimentName {
    Ci,
    Anm,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(value_enum)]
    kind: ExperimentName,
    /// JSON experiment config; missing fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report CSV; metadata goes to `<out>.meta.json`.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.render().to_string();
            eprintln!("{}", json!({ "error": "UsageError", "message": text.trim_end() }));
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::from(2)
        }
    }
}

fn log(cli: &Cli, msg: impl AsRef<str>) {
    if cli.verbose > 0 {
        eprintln!("{}", msg.as_ref());
    }
}

fn run(cli: &Cli) -> Result<()> {
    let value = match &cli.command {
        Command::Gen(a) => gen(cli, a)?,
        Command::Test(a) => test(a)?,
        Command::Fit(a) => fit(cli, a)?,
        Command::Predict(a) => predict(cli, a)?,
        Command::Merge(a) => merge(a)?,
        Command::Bound(a) => serde_json::to_value(bounds::bound_report(a.class, a.n, a.k, a.eta, a.empirical)?)?,
        Command::Plan(a) => serde_json::to_value(bounds::plan(a.class, a.n, a.eps, a.eta)?)?,
        Command::Experiment(a) => experiment(cli, a)?,
    };
    emit(&value, cli.format)
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(f, v)?;
    Ok(())
}

fn load(data: &Path, universe: &Option<PathBuf>) -> Result<Dataset> {
    let u = universe.as_ref().map(Universe::load).transpose()?;
    load_dataset(data, u.as_ref())
}

fn gen(cli: &Cli, a: &GenArgs) -> Result<Value> {
    let scm: Scm = match a.kind {
        ScmKind::Linear => synthgen::gen_linear_scm(a.n, a.degree, cli.seed)?.into(),
        ScmKind::Gam => {
            let cfg = GamConfig { negative_weights: a.negative_weights, ..Default::default() };
            synthgen::gen_gam_scm_with(a.n, a.degree, &cfg, cli.seed)?.into()
        }
    };
    let edges = scm.dag().n_edges();
    log(cli, format!("sampling {} rows from a model with {edges} edges", a.l));
    let s = synthgen::sample(scm, a.l, causal_vc::rng::derive_seed(cli.seed, &[1]))?;
    s.dataset.write_csv(BufWriter::new(File::create(&a.out)?))?;
    let truth_path = a.truth.clone().unwrap_or_else(|| sidecar(&a.out, ".truth.json"));
    write_json(&truth_path, &s.truth.truth_json())?;
    Ok(json!({
        "data": a.out.display().to_string(),
        "truth": truth_path.display().to_string(),
        "rows": a.l,
        "columns": a.n,
        "edges": edges,
    }))
}

fn test(a: &TestArgs) -> Result<Value> {
    let pq: PropertyQuery = a.query.parse()?;
    let d = load(&a.data, &a.universe)?;
    let q = &pq.query;
    let outcome = match pq.property {
        Property::Ci => stattests::fisher_z_ci(&d, q, a.alpha)?,
        Property::Anm => {
            let hsic = match a.permutations {
                Some(b) => HsicConfig::permutation(b, 0),
                None => HsicConfig::default(),
            };
            let cfg = AnmConfig { hsic, ..Default::default() };
            AnmTester::with_config(&d, a.alpha, cfg).test(q)?
        }
        Property::Corr => stattests::corr_estimate(&d, q)?,
        Property::Sign => stattests::sign_estimate(&d, q)?,
        Property::Dir | Property::Lingam => {
            return Err(Error::Unsupported(format!("no statistical test for {} queries", pq.property.prefix())))
        }
    };
    Ok(serde_json::to_value(outcome)?)
}

fn write_labels(path: &Path, property: Property, labels: &[LabeledQuery]) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(["query", "outcome", "p_value"])?;
    for l in labels {
        let q = PropertyQuery { property, query: l.query.clone() }.to_string();
        let v = match l.outcome.value.as_binary() {
            Some(b) => b.to_string(),
            None => serde_json::to_string(&l.outcome.value)?,
        };
        let p = l.outcome.p_value.map(|p| p.to_string()).unwrap_or_default();
        w.write_record([q, v, p])?;
    }
    w.flush()?;
    Ok(())
}

fn fit(cli: &Cli, a: &FitArgs) -> Result<Value> {
    let d = load(&a.data, &a.universe)?;
    let n = d.n_cols();
    let labels_path = a.labels.clone().unwrap_or_else(|| sidecar(&a.out, ".labels.csv"));
    let (model, labels, property) = match a.method {
        FitMethod::Pc => {
            let (c, labels) = learners::pc_fit(&d, a.alpha, a.max_cond)?;
            (ModelFile::Cpdag(c), labels, Property::Ci)
        }
        FitMethod::Polytree => {
            let k = a.k.unwrap_or(n * n.saturating_sub(1));
            log(cli, format!("testing {k} ordered pairs"));
            let (p, labels): (Polytree, _) = learners::polytree_from_anm(&d, k, a.alpha, cli.seed)?;
            (ModelFile::Polytree(p), labels, Property::Anm)
        }
        FitMethod::Path => (ModelFile::Path(learners::fit_path_model(&d)?), Vec::new(), Property::Corr),
    };
    write_json(&a.out, &model.to_json())?;
    let mut training_error = Value::Null;
    if !labels.is_empty() {
        write_labels(&labels_path, property, &labels)?;
        let pred: Vec<_> = labels
            .iter()
            .map(|l| model.predict(&PropertyQuery { property, query: l.query.clone() }, AncestorReading::default(), cli.seed))
            .collect::<Result<_>>()?;
        let truth: Vec<_> = labels.iter().map(|l| l.outcome.value.clone()).collect();
        training_error = json!(causal_vc::empirical_error(&pred, &truth)?);
    }
    Ok(json!({
        "model": model.name(),
        "out": a.out.display().to_string(),
        "labels": if labels.is_empty() { Value::Null } else { json!(labels_path.display().to_string()) },
        "training_queries": labels.len(),
        "training_error": training_error,
    }))
}

fn predict(cli: &Cli, a: &PredictArgs) -> Result<Value> {
    let pq: PropertyQuery = a.query.parse()?;
    let model = ModelFile::load(&a.model)?;
    let reading = match a.reading {
        Reading::Latent => AncestorReading::LatentConfounder,
        Reading::Literal => AncestorReading::Literal,
    };
    Ok(serde_json::to_value(model.predict(&pq, reading, cli.seed)?)?)
}

fn read_cov(path: &Path) -> Result<[[f64; 2]; 2]> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn merge(a: &MergeArgs) -> Result<Value> {
    Ok(json!(glue_gaussian_chain(&read_cov(&a.xy)?, &read_cov(&a.yz)?)?))
}

fn experiment(cli: &Cli, a: &ExperimentArgs) -> Result<Value> {
    let mut raw = match &a.config {
        Some(p) => serde_json::from_str::<Value>(&std::fs::read_to_string(p)?)?,
        None => json!({}),
    };
    let obj = raw
        .as_object_mut()
        .ok_or_else(|| Error::InvalidParams("experiment config must be a JSON object".into()))?;
    let kind = match a.kind {
        ExperimentName::Ci => ExperimentKind::Ci,
        ExperimentName::Anm => ExperimentKind::Anm,
    };
    obj.insert("experiment".into(), json!(kind));
    obj.entry("seed").or_insert(json!(cli.seed));
    if kind == ExperimentKind::Anm {
        let n = obj.get("n").and_then(Value::as_u64).unwrap_or(ExperimentConfig::default().n as u64);
        obj.entry("k_values").or_insert(json!([n * (n - 1)]));
    }
    let cfg: ExperimentConfig = serde_json::from_value(raw)?;
    log(cli, format!("running {} experiment on {} datasets", kind.name(), cfg.datasets));
    let records = harness::run_experiment(&cfg)?;
    harness::write_report_csv(&records, BufWriter::new(File::create(&a.out)?))?;
    let meta = harness::report_meta(&cfg, &records)?;
    let meta_path = sidecar(&a.out, ".meta.json");
    write_json(&meta_path, &serde_json::to_value(&meta)?)?;
    Ok(serde_json::to_value(&meta.summaries)?)
}
