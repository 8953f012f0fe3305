//! Evaluation against labeled pairs, threshold sweeps, ablation runs,
//! per-rule impact and weight tuning.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extractor::ProjectSnapshot;
use crate::mapper::{rank_order, score_pairs, FilterConfig, MappingResult, Task};
use crate::normalizer::Normalizer;
use crate::pair::{CandidatePair, PairKey};
use crate::project::CodeType;
use crate::simcore::{
    passes_threshold, Ablation, AbsencePolicy, Components, FieldSims, WeightConfig, SCORE_EPSILON,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CloneType {
    #[serde(rename = "non_clone")]
    NonClone,
    T1,
    T2,
    T3,
    T4,
}

impl CloneType {
    pub fn is_clone(self) -> bool {
        self != CloneType::NonClone
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CloneType::NonClone => "non_clone",
            CloneType::T1 => "T1",
            CloneType::T2 => "T2",
            CloneType::T3 => "T3",
            CloneType::T4 => "T4",
        }
    }
}

impl fmt::Display for CloneType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CloneType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "non_clone" | "nonclone" | "none" | "no" => Ok(CloneType::NonClone),
            "t1" | "type1" | "type_1" | "1" => Ok(CloneType::T1),
            "t2" | "type2" | "type_2" | "2" => Ok(CloneType::T2),
            "t3" | "type3" | "type_3" | "3" => Ok(CloneType::T3),
            "t4" | "type4" | "type_4" | "4" => Ok(CloneType::T4),
            _ => Err(format!("unknown clone type `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub pair: PairKey,
    pub clone_type: CloneType,
    pub is_code_mapping: bool,
    pub code_type: CodeType,
    pub tools: BTreeSet<String>,
}

impl LabeledPair {
    pub fn new(
        pair: PairKey,
        clone_type: CloneType,
        is_code_mapping: bool,
        code_type: CodeType,
    ) -> std::result::Result<Self, String> {
        if is_code_mapping && !clone_type.is_clone() {
            return Err("a code mapping must be a genuine clone".into());
        }
        Ok(LabeledPair {
            pair,
            clone_type,
            is_code_mapping,
            code_type,
            tools: BTreeSet::new(),
        })
    }

    pub fn is_positive(&self, task: Task) -> bool {
        match task {
            Task::GenuineClone => self.clone_type.is_clone(),
            Task::CodeMapping => self.is_code_mapping,
        }
    }
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "y" => Ok(true),
        "false" | "0" | "no" | "n" | "" => Ok(false),
        _ => Err(format!("expected a boolean, got `{s}`")),
    }
}

#[derive(Debug, Deserialize)]
struct DatasetRow {
    left_key: String,
    right_key: String,
    clone_type: String,
    is_code_mapping: String,
    code_type: String,
    #[serde(default)]
    tools: String,
}

/// Reads a labeled dataset: CSV with a header row and the columns
/// `left_key,right_key,clone_type,is_code_mapping,code_type,tools`, where
/// `tools` is a `;`-separated list. Rows are numbered from 1 after the header.
pub fn read_dataset(path: &Path) -> Result<Vec<LabeledPair>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::format("dataset CSV", path, e))?;
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, row) in reader.deserialize::<DatasetRow>().enumerate() {
        let row_no = i + 1;
        let bad = |message: String| Error::Dataset { row: row_no, message };
        let row = row.map_err(|e| bad(e.to_string()))?;
        let clone_type = row.clone_type.parse().map_err(bad)?;
        let is_cm = parse_bool(&row.is_code_mapping).map_err(bad)?;
        let code_type = row.code_type.parse().map_err(bad)?;
        let mut labeled = LabeledPair::new(
            PairKey::new(row.left_key, row.right_key),
            clone_type,
            is_cm,
            code_type,
        )
        .map_err(bad)?;
        labeled.tools = row
            .tools
            .split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect();
        if !seen.insert(labeled.pair.clone()) {
            return Err(bad(format!("duplicate pair {}", labeled.pair)));
        }
        out.push(labeled);
    }
    Ok(out)
}

/// Rewrites signature-style dataset keys to full method ids. Returns the
/// number of keys that matched no method; those rows keep their keys.
pub fn resolve_dataset_keys(
    dataset: &mut [LabeledPair],
    left: &ProjectSnapshot,
    right: &ProjectSnapshot,
) -> usize {
    let mut unresolved = 0;
    for lp in dataset.iter_mut() {
        for (key, snap) in [(&mut lp.pair.left, left), (&mut lp.pair.right, right)] {
            match snap.resolve_key(key) {
                Some(rec) => *key = rec.id.clone(),
                None => unresolved += 1,
            }
        }
    }
    unresolved
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub fpr: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1_pos: f64,
    pub f1_neg: f64,
    pub avg_f1: f64,
}

impl MetricsReport {
    /// Empty denominators yield 0.
    pub fn from_counts(c: &ConfusionCounts) -> Self {
        let precision = ratio(c.tp, c.tp + c.fp);
        let recall = ratio(c.tp, c.tp + c.fn_);
        let npv = ratio(c.tn, c.tn + c.fn_);
        let specificity = ratio(c.tn, c.tn + c.fp);
        let f1_pos = f1(precision, recall);
        let f1_neg = f1(npv, specificity);
        MetricsReport {
            fpr: ratio(c.fp, c.fp + c.tn),
            precision,
            recall,
            f1_pos,
            f1_neg,
            avg_f1: (f1_pos + f1_neg) / 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub counts: ConfusionCounts,
    pub metrics: MetricsReport,
}

/// Every dataset pair is evaluated; those absent from `kept` count as
/// predicted negatives. Predictions outside the dataset are ignored.
pub fn evaluate(kept: &BTreeSet<PairKey>, dataset: &[LabeledPair], task: Task) -> Evaluation {
    evaluate_with(|k| kept.contains(k), dataset, task)
}

fn evaluate_with(kept: impl Fn(&PairKey) -> bool, dataset: &[LabeledPair], task: Task) -> Evaluation {
    let mut c = ConfusionCounts::default();
    for lp in dataset {
        match (kept(&lp.pair), lp.is_positive(task)) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Evaluation {
        counts: c,
        metrics: MetricsReport::from_counts(&c),
    }
}

/// Overall evaluation plus one per code type present in the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: Task,
    pub overall: Evaluation,
    pub by_code_type: BTreeMap<CodeType, Evaluation>,
}

pub fn evaluate_results(results: &[MappingResult], dataset: &[LabeledPair], task: Task) -> EvalReport {
    let kept: BTreeSet<PairKey> = results
        .iter()
        .filter(|r| r.kept)
        .map(|r| r.pair.clone())
        .collect();
    let mut groups: BTreeMap<CodeType, Vec<LabeledPair>> = BTreeMap::new();
    for lp in dataset {
        groups.entry(lp.code_type).or_default().push(lp.clone());
    }
    EvalReport {
        task,
        overall: evaluate(&kept, dataset, task),
        by_code_type: groups
            .into_iter()
            .map(|(ct, lps)| (ct, evaluate(&kept, &lps, task)))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub threshold: f64,
    pub counts: ConfusionCounts,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub task: Task,
    pub points: Vec<SweepPoint>,
    /// The lowest threshold reaching the highest average F1.
    pub best: Option<SweepPoint>,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "threshold",
            "tp",
            "fp",
            "tn",
            "fn",
            "fpr",
            "precision",
            "recall",
            "f1_pos",
            "f1_neg",
            "avg_f1",
        ])
        .expect("in-memory write");
        for p in &self.points {
            let (c, m) = (&p.counts, &p.metrics);
            w.write_record([
                p.threshold.to_string(),
                c.tp.to_string(),
                c.fp.to_string(),
                c.tn.to_string(),
                c.fn_.to_string(),
                m.fpr.to_string(),
                m.precision.to_string(),
                m.recall.to_string(),
                m.f1_pos.to_string(),
                m.f1_neg.to_string(),
                m.avg_f1.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

/// Thresholds `i / n` for `i` in `0..=n`, where `step = 1 / n`.
pub fn threshold_ladder(step: f64) -> Result<Vec<f64>> {
    let n = grid_divisions(step)?;
    Ok((0..=n).map(|i| i as f64 / n as f64).collect())
}

/// Re-thresholds scored results at each threshold and evaluates.
pub fn sweep(
    results: &[MappingResult],
    dataset: &[LabeledPair],
    task: Task,
    thresholds: &[f64],
) -> Result<SweepReport> {
    if let Some(w) = thresholds.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!(
            "sweep thresholds must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    let sas: HashMap<&PairKey, f64> = results.iter().map(|r| (&r.pair, r.sas())).collect();
    let points: Vec<SweepPoint> = thresholds
        .par_iter()
        .map(|&t| {
            let e = evaluate_with(
                |k| sas.get(k).is_some_and(|&s| passes_threshold(s, t)),
                dataset,
                task,
            );
            SweepPoint {
                threshold: t,
                counts: e.counts,
                metrics: e.metrics,
            }
        })
        .collect();
    let best = points.iter().fold(None::<SweepPoint>, |best, p| match best {
        Some(b) if b.metrics.avg_f1 >= p.metrics.avg_f1 => Some(b),
        _ => Some(*p),
    });
    Ok(SweepReport { task, points, best })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub ablation: Ablation,
    pub kept: usize,
    pub evaluation: Evaluation,
}

/// Scored results per ablation setting.
pub type AblationRuns = BTreeMap<Ablation, Vec<MappingResult>>;

/// Scores the same pairs under every ablation setting.
pub fn ablate(
    pairs: &[CandidatePair],
    left: &ProjectSnapshot,
    right: &ProjectSnapshot,
    normalizer: &Normalizer,
    cfg: &FilterConfig,
    dataset: &[LabeledPair],
) -> Result<(Vec<AblationRow>, AblationRuns)> {
    let mut rows = Vec::new();
    let mut runs = BTreeMap::new();
    for ablation in Ablation::SETTINGS {
        let run_cfg = FilterConfig {
            ablation,
            ..cfg.clone()
        };
        let results = score_pairs(pairs, left, right, normalizer, &run_cfg)?;
        let report = evaluate_results(&results, dataset, cfg.task);
        rows.push(AblationRow {
            ablation,
            kept: results.iter().filter(|r| r.kept).count(),
            evaluation: report.overall,
        });
        runs.insert(ablation, results);
    }
    Ok((rows, runs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactRow {
    pub pairs: usize,
    /// Pairs whose score moved by more than the score epsilon.
    pub affected: usize,
    pub max_sas_change: f64,
    /// Rank under the full setting minus rank under the ablation, with the
    /// largest magnitude; positive wins a tie in magnitude.
    pub max_rank_change: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactReport {
    pub ablation: Ablation,
    pub overall: ImpactRow,
    pub by_code_type: BTreeMap<CodeType, ImpactRow>,
}

/// 1-based ranks over all given results, by sas descending then pair key.
fn ranks<'a>(results: &[&'a MappingResult]) -> HashMap<&'a PairKey, i64> {
    let mut sorted: Vec<&MappingResult> = results.to_vec();
    sorted.sort_by(|a, b| rank_order((a.sas(), &a.pair), (b.sas(), &b.pair)));
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, r)| (&r.pair, i as i64 + 1))
        .collect()
}

fn impact_row(all: &[&MappingResult], ex: &HashMap<&PairKey, &MappingResult>) -> ImpactRow {
    let ex_group: Vec<&MappingResult> = all.iter().map(|r| ex[&r.pair]).collect();
    let rank_all = ranks(all);
    let rank_ex = ranks(&ex_group);
    let mut row = ImpactRow {
        pairs: all.len(),
        affected: 0,
        max_sas_change: 0.0,
        max_rank_change: 0,
    };
    for r in all {
        let delta = (r.sas() - ex[&r.pair].sas()).abs();
        if delta > SCORE_EPSILON {
            row.affected += 1;
        }
        row.max_sas_change = row.max_sas_change.max(delta);
        let d = rank_all[&r.pair] - rank_ex[&r.pair];
        let cur = row.max_rank_change;
        if d.abs() > cur.abs() || (d.abs() == cur.abs() && d > cur) {
            row.max_rank_change = d;
        }
    }
    row
}

/// Compares a full run with an ablation run over the same pairs. Ranks cover
/// every pair in a group, kept or not.
pub fn rule_impact(all: &[MappingResult], ex: &[MappingResult], ablation: Ablation) -> Result<ImpactReport> {
    let ex_map: HashMap<&PairKey, &MappingResult> = ex.iter().map(|r| (&r.pair, r)).collect();
    let all_keys: BTreeSet<&PairKey> = all.iter().map(|r| &r.pair).collect();
    if all_keys.len() != ex_map.len() || all_keys.iter().any(|k| !ex_map.contains_key(k)) {
        let missing = all_keys
            .iter()
            .find(|k| !ex_map.contains_key(*k))
            .map(|k| k.to_string())
            .or_else(|| {
                ex_map
                    .keys()
                    .find(|k| !all_keys.contains(*k))
                    .map(|k| k.to_string())
            })
            .unwrap_or_else(|| "duplicate pair keys".into());
        return Err(Error::PairSetMismatch(missing));
    }
    let everything: Vec<&MappingResult> = all.iter().collect();
    let mut groups: BTreeMap<CodeType, Vec<&MappingResult>> = BTreeMap::new();
    for r in all {
        groups.entry(r.code_type).or_default().push(r);
    }
    Ok(ImpactReport {
        ablation,
        overall: impact_row(&everything, &ex_map),
        by_code_type: groups
            .into_iter()
            .map(|(ct, rs)| (ct, impact_row(&rs, &ex_map)))
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunerConfig {
    pub grid_step: f64,
    /// Top-K cut; the number of positives when unset.
    pub k: Option<usize>,
    pub policy: AbsencePolicy,
}

impl Default for TunerConfig {
    fn default() -> Self {
        TunerConfig {
            grid_step: 0.05,
            k: None,
            policy: AbsencePolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingExample {
    pub pair: PairKey,
    pub fields: FieldSims,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneOutcome {
    pub weights: WeightConfig,
    /// True positives among the top K at `weights`.
    pub objective: usize,
    pub k: usize,
    pub grid_points: usize,
    /// Grid points sharing the best objective.
    pub optimal_points: usize,
}

/// Integer compositions of `n` into three parts, in lexicographic order.
pub fn simplex_grid(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for i in 0..=n {
        for j in 0..=n - i {
            out.push([i, j, n - i - j]);
        }
    }
    out
}

fn grid_divisions(step: f64) -> Result<usize> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::Config(format!("grid step {step} outside (0, 1]")));
    }
    let n = (1.0 / step).round();
    if ((n * step) - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("grid step {step} does not divide 1")));
    }
    Ok(n as usize)
}

/// True positives among the `k` highest-scoring examples.
pub fn top_k_true_positives(
    examples: &[TrainingExample],
    w: &WeightConfig,
    policy: &AbsencePolicy,
    k: usize,
) -> usize {
    let mut scored: Vec<(f64, &PairKey, bool)> = examples
        .iter()
        .map(|e| {
            let c = Components::compute(&e.fields, w, Ablation::All, policy);
            (c.sas(w, policy), &e.pair, e.positive)
        })
        .collect();
    scored.sort_by(|a, b| rank_order((a.0, a.1), (b.0, b.1)));
    scored.iter().take(k).filter(|s| s.2).count()
}

/// Exhaustive grid search. Among grid points with the best objective, the one
/// with the largest minimum weight wins, then the lexicographically largest
/// `(alpha, beta, theta, delta, eta, phi)`.
pub fn tune(examples: &[TrainingExample], cfg: &TunerConfig) -> Result<TuneOutcome> {
    let positives = examples.iter().filter(|e| e.positive).count();
    if positives == 0 {
        return Err(Error::NoPositives);
    }
    let n = grid_divisions(cfg.grid_step)?;
    let k = cfg.k.unwrap_or(positives);
    let grid = simplex_grid(n);
    let points: Vec<([usize; 3], [usize; 3])> = grid
        .iter()
        .flat_map(|outer| grid.iter().map(move |header| (*outer, *header)))
        .collect();
    let to_weights = |o: [usize; 3], h: [usize; 3]| {
        let f = |x: usize| x as f64 / n as f64;
        WeightConfig {
            alpha: f(o[0]),
            beta: f(o[1]),
            theta: f(o[2]),
            delta: f(h[0]),
            eta: f(h[1]),
            phi: f(h[2]),
        }
    };
    let scored: Vec<(usize, [usize; 6])> = points
        .par_iter()
        .map(|&(o, h)| {
            let obj = top_k_true_positives(examples, &to_weights(o, h), &cfg.policy, k);
            (obj, [o[0], o[1], o[2], h[0], h[1], h[2]])
        })
        .collect();
    let best_obj = scored.iter().map(|s| s.0).max().expect("grid is nonempty");
    let (_, best) = scored
        .iter()
        .filter(|s| s.0 == best_obj)
        .max_by(|a, b| {
            let min_a = a.1.iter().min();
            let min_b = b.1.iter().min();
            min_a.cmp(&min_b).then_with(|| a.1.cmp(&b.1))
        })
        .expect("at least one optimum");
    Ok(TuneOutcome {
        weights: to_weights([best[0], best[1], best[2]], [best[3], best[4], best[5]]),
        objective: best_obj,
        k,
        grid_points: points.len(),
        optimal_points: scored.iter().filter(|s| s.0 == best_obj).count(),
    })
}
