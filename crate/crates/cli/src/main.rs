//! `remap`: extract, pair, score and evaluate cross-project method mappings.

mod manifest;

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use remap_core::evalkit::{self, LabeledPair, TrainingExample, TunerConfig};
use remap_core::extractor::{self, ExcludedMethod, ExtractConfig, ProjectSnapshot};
use remap_core::ingest;
use remap_core::mapper::{self, FilterConfig, MappingResult, Profile, ReportFormat, Task};
use remap_core::normalizer::{Normalizer, RuleSet};
use remap_core::pair::{CandidatePair, PairKey, Provenance};
use remap_core::prefilter::{self, EmbedderRegistry, PrefilterConfig};
use remap_core::project::{CodeType, ProjectRole};
use remap_core::simcore::{Ablation, AbsencePolicy, FieldSims, WeightConfig};
use remap_core::Error;

use manifest::RunManifest;

/// Directory searched for `rules.toml`, `weights.toml` and named rule files.
const CONFIG_DIR_ENV: &str = "REMAP_CONFIG_DIR";

#[derive(Parser)]
#[command(
    name = "remap",
    version,
    about = "Redesign-aware code mapping between two Java projects"
)]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a Java source tree into a method snapshot.
    Extract(ExtractArgs),
    /// Write normalized token sequences for every method of a snapshot.
    Normalize(NormalizeArgs),
    /// Generate candidate pairs by class pre-filtering or exhaustively.
    Pairs(PairsArgs),
    /// Bind a clone detector report to snapshot methods.
    Ingest(IngestArgs),
    /// Score candidate pairs and apply the threshold.
    Score(ScoreArgs),
    /// Evaluate scored pairs against a labeled dataset.
    Eval(EvalArgs),
    /// Evaluate scored pairs over a ladder of thresholds.
    Sweep(SweepArgs),
    /// Score and evaluate under every ablation setting.
    Ablate(AblateArgs),
    /// Compare a full run with an ablation run.
    Impact(ImpactArgs),
    /// Grid-search score weights on a labeled training split.
    Tune(TuneArgs),
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    root: PathBuf,
    #[arg(long)]
    role: ProjectRole,
    /// Project name; defaults to the root directory name.
    #[arg(long)]
    name: Option<String>,
    /// Path prefix marking test sources; repeatable.
    #[arg(long = "test-root", default_value = "src/test/")]
    test_roots: Vec<String>,
    /// Extra excluded method, `name` or `name/arity`; repeatable.
    #[arg(long = "exclude-method")]
    exclude_methods: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RuleArgs {
    /// Builtin rule set name (`soot-sootup`, `findbugs-spotbugs`, `none`) or a rule file.
    #[arg(long)]
    rules: Option<String>,
    /// Project-pair profile; picks default rules and thresholds.
    #[arg(long, default_value = "heavy")]
    profile: Profile,
}

#[derive(Args)]
struct NormalizeArgs {
    #[arg(long)]
    snapshot: PathBuf,
    #[command(flatten)]
    rules: RuleArgs,
    #[arg(long)]
    no_renaming: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairMode {
    Prefilter,
    Exhaustive,
}

#[derive(Args)]
struct PairsArgs {
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
    #[arg(long, value_enum)]
    mode: PairMode,
    #[arg(long, default_value_t = 0.5)]
    class_sim: f64,
    #[arg(long, default_value_t = 2.0)]
    line_ratio: f64,
    #[arg(long, default_value_t = 0.5)]
    embed_threshold: f64,
    #[arg(long, default_value = prefilter::BAG_OF_TOKENS)]
    embedder: String,
    /// Minimum method length for exhaustive pairing.
    #[arg(long, default_value_t = 5)]
    min_loc: usize,
    #[command(flatten)]
    rules: RuleArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum IngestFormat {
    Generic,
    NicadXml,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long, value_enum)]
    format: IngestFormat,
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoringArgs {
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
    #[arg(long, default_value = "cm")]
    task: Task,
    /// Overrides the profile's default threshold.
    #[arg(long)]
    threshold: Option<f64>,
    /// Weight file (TOML or JSON) with alpha..phi and an optional [policy] table.
    #[arg(long)]
    weights: Option<PathBuf>,
    #[command(flatten)]
    rules: RuleArgs,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[command(flatten)]
    scoring: ScoringArgs,
    #[arg(long, default_value = "all")]
    ablation: Ablation,
    #[arg(long, default_value = "jsonl")]
    format: ReportFormat,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DatasetArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Snapshots used to expand signature-style dataset keys to method ids.
    #[arg(long, requires = "key_right")]
    key_left: Option<PathBuf>,
    #[arg(long, requires = "key_left")]
    key_right: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    scores: PathBuf,
    #[command(flatten)]
    dataset: DatasetArgs,
    #[arg(long, default_value = "cm")]
    task: Task,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    scores: PathBuf,
    #[command(flatten)]
    dataset: DatasetArgs,
    #[arg(long, default_value = "cm")]
    task: Task,
    /// Explicit ascending thresholds, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "step")]
    thresholds: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    #[arg(long)]
    out: PathBuf,
    /// Also write (threshold, metric) rows as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct AblateArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[command(flatten)]
    scoring: ScoringArgs,
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ImpactArgs {
    /// Scores from the full setting.
    #[arg(long)]
    all: PathBuf,
    /// Scores from one ablation setting over the same pairs.
    #[arg(long)]
    ablated: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TuneArgs {
    /// Labeled training split; its pairs are the training examples.
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
    #[arg(long, default_value = "cm")]
    task: Task,
    #[arg(long, default_value_t = 0.05)]
    grid_step: f64,
    /// Top-K cut; defaults to the number of positives.
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    rules: RuleArgs,
    #[arg(long)]
    out: PathBuf,
}

/// A failure with its exit code: 2 for usage, missing input and schema
/// problems, 1 for everything else.
struct CliError {
    code: u8,
    kind: &'static str,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            kind: "usage",
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Io { source, .. } if source.kind() == ErrorKind::NotFound => (2, "missing_input"),
            Error::Io { .. } => (1, "io"),
            Error::RootNotFound(_) => (2, "missing_input"),
            Error::Regex { .. } | Error::Config(_) => (2, "config"),
            Error::Format { .. } | Error::Dataset { .. } => (2, "schema"),
            Error::UnresolvedId { .. } => (1, "unresolved_id"),
            Error::MostlyUnresolved { .. } => (1, "mostly_unresolved"),
            Error::Embedding { .. } => (1, "embedding"),
            Error::NoPositives => (1, "no_positives"),
            Error::PairSetMismatch(_) => (1, "pair_set_mismatch"),
        };
        CliError {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    let code = if e.kind() == ErrorKind::NotFound { 2 } else { 1 };
    CliError {
        code,
        kind: if code == 2 { "missing_input" } else { "io" },
        message: format!("{}: {e}", path.display()),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn finish(m: RunManifest, out: &Path) -> CliResult {
    m.finish(out).map_err(|e| io_err(&RunManifest::path_for(out), e))
}

fn config_dir() -> Option<PathBuf> {
    std::env::var_os(CONFIG_DIR_ENV).map(PathBuf::from)
}

/// Named builtin, a file path, or a file in the config directory.
fn load_rules(args: &RuleArgs, m: &mut RunManifest) -> CliResult<RuleSet> {
    let spec = match &args.rules {
        Some(s) => s.clone(),
        None => match config_dir().map(|d| d.join("rules.toml")).filter(|p| p.is_file()) {
            Some(p) => p.to_string_lossy().into_owned(),
            None => match args.profile {
                Profile::Heavy => "soot-sootup".into(),
                Profile::Light => "findbugs-spotbugs".into(),
            },
        },
    };
    if spec == "none" {
        let rules = RuleSet::empty();
        m.config("rules", rules.to_toml_string().as_bytes());
        return Ok(rules);
    }
    if let Some(rules) = RuleSet::builtin(&spec) {
        m.config("rules", rules.to_toml_string().as_bytes());
        return Ok(rules);
    }
    let direct = PathBuf::from(&spec);
    let path = if direct.is_file() {
        direct
    } else {
        config_dir()
            .into_iter()
            .flat_map(|d| [d.join(&spec), d.join(format!("{spec}.toml"))])
            .find(|p| p.is_file())
            .ok_or_else(|| CliError {
                code: 2,
                kind: "missing_input",
                message: format!("no builtin rule set or rule file named `{spec}`"),
            })?
    };
    m.config("rules", read(&path)?.as_bytes());
    m.input(&path);
    Ok(RuleSet::from_path(&path)?)
}

#[derive(Debug, Default, Deserialize, Serialize)]
struct WeightFile {
    #[serde(flatten)]
    weights: WeightConfig,
    #[serde(default)]
    policy: AbsencePolicy,
}

fn load_weights(path: Option<&Path>, m: &mut RunManifest) -> CliResult<(WeightConfig, AbsencePolicy)> {
    let path = match path {
        Some(p) => Some(p.to_path_buf()),
        None => config_dir()
            .map(|d| d.join("weights.toml"))
            .filter(|p| p.is_file()),
    };
    let Some(path) = path else {
        return Ok((WeightConfig::default(), AbsencePolicy::default()));
    };
    let text = read(&path)?;
    m.config("weights", text.as_bytes());
    m.input(&path);
    let parsed: WeightFile = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text)
            .map_err(|e| CliError::from(Error::Config(format!("{}: {e}", path.display()))))?
    } else {
        toml::from_str(&text)
            .map_err(|e| CliError::from(Error::Config(format!("{}: {e}", path.display()))))?
    };
    parsed.weights.validate()?;
    Ok((parsed.weights, parsed.policy))
}

fn load_snapshot(path: &Path, role: ProjectRole, m: &mut RunManifest) -> CliResult<ProjectSnapshot> {
    let snap = ProjectSnapshot::load(path)?;
    if snap.role() != role {
        return Err(CliError::usage(format!(
            "{} holds the {} project, expected {}",
            path.display(),
            snap.role(),
            role
        )));
    }
    m.input(path);
    Ok(snap)
}

fn load_dataset(args: &DatasetArgs, m: &mut RunManifest) -> CliResult<Vec<LabeledPair>> {
    let mut dataset = evalkit::read_dataset(&args.dataset)?;
    m.input(&args.dataset);
    if let (Some(l), Some(r)) = (&args.key_left, &args.key_right) {
        let left = load_snapshot(l, ProjectRole::Original, m)?;
        let right = load_snapshot(r, ProjectRole::Redesigned, m)?;
        let unresolved = evalkit::resolve_dataset_keys(&mut dataset, &left, &right);
        m.count("unresolved_dataset_keys", unresolved);
    }
    m.count("dataset_pairs", dataset.len());
    Ok(dataset)
}

fn load_results(path: &Path, m: &mut RunManifest) -> CliResult<Vec<MappingResult>> {
    let text = read(path)?;
    m.input(path);
    mapper::read_results_jsonl(&text).map_err(|msg| CliError {
        code: 2,
        kind: "schema",
        message: format!("malformed score JSONL in {}: {msg}", path.display()),
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn normalizer_for(rules: RuleSet) -> Normalizer {
    Normalizer::new(rules)
}

fn filter_config(args: &ScoringArgs, ablation: Ablation, m: &mut RunManifest) -> CliResult<FilterConfig> {
    let (weights, policy) = load_weights(args.weights.as_deref(), m)?;
    let mut cfg = FilterConfig::new(args.task, args.rules.profile);
    if let Some(t) = args.threshold {
        cfg.threshold = t;
    }
    cfg.weights = weights;
    cfg.policy = policy;
    cfg.ablation = ablation;
    cfg.validate()?;
    m.count("threshold", cfg.threshold);
    m.count("task", cfg.task);
    m.count("ablation", cfg.ablation);
    Ok(cfg)
}

fn cmd_extract(a: ExtractArgs) -> CliResult {
    let mut m = RunManifest::start();
    let name = a.name.clone().unwrap_or_else(|| {
        a.root
            .canonicalize()
            .unwrap_or_else(|_| a.root.clone())
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "project".into())
    });
    let mut cfg = ExtractConfig::new(a.role, name).with_test_roots(&a.test_roots);
    for spec in &a.exclude_methods {
        let excluded = match spec.split_once('/') {
            Some((n, arity)) => ExcludedMethod::new(
                n,
                Some(
                    arity
                        .parse()
                        .map_err(|_| CliError::usage(format!("bad arity in --exclude-method `{spec}`")))?,
                ),
            ),
            None => ExcludedMethod::new(spec, None),
        };
        cfg.excluded_methods.push(excluded);
    }
    m.config("extract", to_json(&cfg).as_bytes());
    let snap = extractor::extract(&a.root, &cfg)?;
    snap.save(&a.out)?;
    for d in &snap.summary().diagnostics {
        eprintln!("warning: {}: {}", d.file, d.message);
    }
    let s = snap.summary();
    m.input(&a.root);
    m.output(&a.out);
    m.output(&ProjectSnapshot::sidecar_path(&a.out));
    m.count("files_seen", s.files_seen);
    m.count("files_parsed", s.files_parsed);
    m.count("files_failed", s.files_failed);
    m.count("classes", snap.classes().len());
    m.count("methods", snap.records().len());
    finish(m, &a.out)
}

fn cmd_normalize(a: NormalizeArgs) -> CliResult {
    let mut m = RunManifest::start();
    let snap = ProjectSnapshot::load(&a.snapshot)?;
    m.input(&a.snapshot);
    let mut normalizer = normalizer_for(load_rules(&a.rules, &mut m)?);
    if a.no_renaming {
        normalizer = normalizer.without_renaming();
    }
    #[derive(Serialize)]
    struct Line<'a> {
        id: &'a str,
        #[serde(flatten)]
        details: remap_core::normalizer::NormalizedDetails,
    }
    let mut out = String::new();
    for rec in snap.records() {
        let details = normalizer.normalize_record(rec, snap.class_of(rec), snap.role());
        out.push_str(&serde_json::to_string(&Line { id: &rec.id, details }).expect("serializes"));
        out.push('\n');
    }
    write(&a.out, &out)?;
    m.output(&a.out);
    m.count("methods", snap.records().len());
    finish(m, &a.out)
}

fn cmd_pairs(a: PairsArgs) -> CliResult {
    let mut m = RunManifest::start();
    let left = load_snapshot(&a.left, ProjectRole::Original, &mut m)?;
    let right = load_snapshot(&a.right, ProjectRole::Redesigned, &mut m)?;
    let pairs = match a.mode {
        PairMode::Exhaustive => {
            m.count("min_loc", a.min_loc);
            prefilter::exhaustive_pairs(&left, &right, a.min_loc)
        }
        PairMode::Prefilter => {
            let cfg = PrefilterConfig {
                class_sim_threshold: a.class_sim,
                line_ratio_cutoff: a.line_ratio,
                embed_threshold: a.embed_threshold,
                embedder: a.embedder.clone(),
            };
            cfg.validate()?;
            m.config("prefilter", to_json(&cfg).as_bytes());
            let normalizer = normalizer_for(load_rules(&a.rules, &mut m)?);
            let registry = EmbedderRegistry::default();
            let embedder = registry.get(&cfg.embedder)?;
            let classes = prefilter::filter_classes(&left, &right, &normalizer, &cfg);
            m.count("class_pairs_total", left.classes().len() * right.classes().len());
            m.count("class_pairs_retained", classes.len());
            m.count("method_pairs_total", left.records().len() * right.records().len());
            prefilter::generate_pairs(&classes, &left, &right, &normalizer, embedder.as_ref(), &cfg)?
        }
    };
    ingest::write_pairs(&a.out, &pairs)?;
    m.output(&a.out);
    m.count("pairs_out", pairs.len());
    finish(m, &a.out)
}

fn cmd_ingest(a: IngestArgs) -> CliResult {
    let mut m = RunManifest::start();
    let left = load_snapshot(&a.left, ProjectRole::Original, &mut m)?;
    let right = load_snapshot(&a.right, ProjectRole::Redesigned, &mut m)?;
    m.input(&a.report);
    let outcome = match a.format {
        IngestFormat::Generic => ingest::ingest_generic(&a.report, &left, &right)?,
        IngestFormat::NicadXml => ingest::ingest_nicad_xml(&a.report, &left, &right)?,
    };
    for d in &outcome.stats.diagnostics {
        eprintln!("warning: {}: {d}", a.report.display());
    }
    ingest::write_pairs(&a.out, &outcome.pairs)?;
    m.output(&a.out);
    let s = &outcome.stats;
    m.count("pairs_in", s.reported_pairs);
    m.count("pairs_out", s.emitted);
    m.count("malformed_lines", s.malformed_lines);
    m.count("unresolved_fragments", s.unresolved_fragments);
    m.count("unresolved_pairs", s.unresolved_pairs);
    m.count("unknown_files", s.unknown_files);
    m.count("same_project", s.same_project);
    m.count("duplicates", s.duplicates);
    finish(m, &a.out)
}

fn cmd_score(a: ScoreArgs) -> CliResult {
    let mut m = RunManifest::start();
    let left = load_snapshot(&a.scoring.left, ProjectRole::Original, &mut m)?;
    let right = load_snapshot(&a.scoring.right, ProjectRole::Redesigned, &mut m)?;
    let pairs = ingest::read_pairs(&a.pairs)?;
    m.input(&a.pairs);
    let cfg = filter_config(&a.scoring, a.ablation, &mut m)?;
    let normalizer = normalizer_for(load_rules(&a.scoring.rules, &mut m)?);
    let results = mapper::score_pairs(&pairs, &left, &right, &normalizer, &cfg)?;
    write(&a.out, &mapper::report(&results, a.format))?;
    m.output(&a.out);
    let summary = mapper::summarize(&results);
    m.count("pairs_in", pairs.len());
    m.count("pairs_scored", summary.overall.orig);
    m.count("pairs_kept", summary.overall.filt);
    finish(m, &a.out)
}

fn cmd_eval(a: EvalArgs) -> CliResult {
    let mut m = RunManifest::start();
    let results = load_results(&a.scores, &mut m)?;
    let dataset = load_dataset(&a.dataset, &mut m)?;
    let report = evalkit::evaluate_results(&results, &dataset, a.task);
    write(&a.out, &to_json(&report))?;
    m.output(&a.out);
    m.count("pairs_scored", results.len());
    finish(m, &a.out)
}

fn cmd_sweep(a: SweepArgs) -> CliResult {
    let mut m = RunManifest::start();
    let results = load_results(&a.scores, &mut m)?;
    let dataset = load_dataset(&a.dataset, &mut m)?;
    let thresholds = match &a.thresholds {
        Some(t) => t.clone(),
        None => evalkit::threshold_ladder(a.step)?,
    };
    let report = evalkit::sweep(&results, &dataset, a.task, &thresholds)?;
    write(&a.out, &to_json(&report))?;
    m.output(&a.out);
    if let Some(csv) = &a.csv {
        write(csv, &report.to_csv())?;
        m.output(csv);
    }
    m.count("thresholds", thresholds.len());
    if let Some(best) = &report.best {
        m.count("best_threshold", best.threshold);
    }
    finish(m, &a.out)
}

fn cmd_ablate(a: AblateArgs) -> CliResult {
    let mut m = RunManifest::start();
    let left = load_snapshot(&a.scoring.left, ProjectRole::Original, &mut m)?;
    let right = load_snapshot(&a.scoring.right, ProjectRole::Redesigned, &mut m)?;
    let pairs = ingest::read_pairs(&a.pairs)?;
    m.input(&a.pairs);
    let cfg = filter_config(&a.scoring, Ablation::All, &mut m)?;
    let normalizer = normalizer_for(load_rules(&a.scoring.rules, &mut m)?);
    let dataset = load_dataset(
        &DatasetArgs {
            dataset: a.dataset.clone(),
            key_left: Some(a.scoring.left.clone()),
            key_right: Some(a.scoring.right.clone()),
        },
        &mut m,
    )?;
    let (rows, runs) = evalkit::ablate(&pairs, &left, &right, &normalizer, &cfg, &dataset)?;
    let impacts = runs
        .iter()
        .filter(|(ab, _)| **ab != Ablation::All)
        .map(|(ab, run)| evalkit::rule_impact(&runs[&Ablation::All], run, *ab))
        .collect::<remap_core::Result<Vec<_>>>()?;
    #[derive(Serialize)]
    struct Report {
        threshold: f64,
        task: Task,
        settings: Vec<evalkit::AblationRow>,
        impact: Vec<evalkit::ImpactReport>,
    }
    let report = Report {
        threshold: cfg.threshold,
        task: cfg.task,
        settings: rows,
        impact: impacts,
    };
    write(&a.out, &to_json(&report))?;
    m.output(&a.out);
    m.count("pairs_in", pairs.len());
    finish(m, &a.out)
}

fn cmd_impact(a: ImpactArgs) -> CliResult {
    let mut m = RunManifest::start();
    let all = load_results(&a.all, &mut m)?;
    let ex = load_results(&a.ablated, &mut m)?;
    let settings: BTreeSet<Ablation> = ex.iter().map(|r| r.breakdown.ablation).collect();
    let ablation = match settings.len() {
        0 => Ablation::All,
        1 => *settings.iter().next().unwrap(),
        _ => {
            return Err(CliError::usage(format!(
                "{} mixes ablation settings",
                a.ablated.display()
            )))
        }
    };
    let report = evalkit::rule_impact(&all, &ex, ablation)?;
    write(&a.out, &to_json(&report))?;
    m.output(&a.out);
    m.count("affected", report.overall.affected);
    finish(m, &a.out)
}

fn cmd_tune(a: TuneArgs) -> CliResult {
    let mut m = RunManifest::start();
    let left = load_snapshot(&a.left, ProjectRole::Original, &mut m)?;
    let right = load_snapshot(&a.right, ProjectRole::Redesigned, &mut m)?;
    let dataset = load_dataset(
        &DatasetArgs {
            dataset: a.dataset.clone(),
            key_left: Some(a.left.clone()),
            key_right: Some(a.right.clone()),
        },
        &mut m,
    )?;
    let normalizer = normalizer_for(load_rules(&a.rules, &mut m)?);
    let pairs: Vec<CandidatePair> = dataset
        .iter()
        .map(|lp| CandidatePair::new(&lp.pair.left, &lp.pair.right, Provenance::Exhaustive))
        .collect();
    let sims = mapper::field_sims(&pairs, &left, &right, &normalizer)?;
    let examples = training_examples(sims, &dataset, a.task);
    let cfg = TunerConfig {
        grid_step: a.grid_step,
        k: a.k,
        policy: AbsencePolicy::default(),
    };
    m.config("tuner", to_json(&cfg).as_bytes());
    let outcome = evalkit::tune(&examples, &cfg)?;
    write(&a.out, &to_json(&outcome))?;
    m.output(&a.out);
    m.count("examples", examples.len());
    m.count("grid_points", outcome.grid_points);
    m.count("objective", outcome.objective);
    finish(m, &a.out)
}

fn training_examples(
    sims: Vec<(CandidatePair, CodeType, FieldSims)>,
    dataset: &[LabeledPair],
    task: Task,
) -> Vec<TrainingExample> {
    let labels: HashMap<&PairKey, bool> = dataset
        .iter()
        .map(|lp| (&lp.pair, lp.is_positive(task)))
        .collect();
    sims.into_iter()
        .map(|(pair, _, fields)| {
            let key = pair.key();
            TrainingExample {
                positive: labels[&key],
                pair: key,
                fields,
            }
        })
        .collect()
}

fn run(cli: Cli) -> CliResult {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("--jobs: {e}")))?;
    }
    match cli.command {
        Command::Extract(a) => cmd_extract(a),
        Command::Normalize(a) => cmd_normalize(a),
        Command::Pairs(a) => cmd_pairs(a),
        Command::Ingest(a) => cmd_ingest(a),
        Command::Score(a) => cmd_score(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Ablate(a) => cmd_ablate(a),
        Command::Impact(a) => cmd_impact(a),
        Command::Tune(a) => cmd_tune(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = serde_json::json!({"error": {"kind": e.kind, "message": e.message}});
            eprintln!("{body}");
            ExitCode::from(e.code)
        }
    }
}
