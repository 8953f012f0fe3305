//! Scoring candidate pairs, threshold post-filtering and ranked reports.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extractor::{MethodRecord, ProjectSnapshot};
use crate::normalizer::{NormalizedDetails, Normalizer};
use crate::pair::{CandidatePair, PairKey, Provenance};
use crate::project::{CodeType, ProjectRole};
use crate::simcore::{passes_threshold, Ablation, AbsencePolicy, FieldSims, SasBreakdown, WeightConfig};

/// What the positives of a run are.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    GenuineClone,
    CodeMapping,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::GenuineClone => "genuine_clone",
            Task::CodeMapping => "code_mapping",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "gc" | "genuine_clone" => Ok(Task::GenuineClone),
            "cm" | "code_mapping" => Ok(Task::CodeMapping),
            _ => Err(format!("unknown task `{s}` (expected gc or cm)")),
        }
    }
}

/// How far the redesigned project drifted; selects default thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Soot to SootUp style: packages, core types and idioms renamed.
    #[default]
    Heavy,
    /// FindBugs to SpotBugs style: mostly the same code under a new name.
    Light,
}

impl Profile {
    pub fn default_threshold(self, task: Task) -> f64 {
        match (self, task) {
            (Profile::Heavy, Task::GenuineClone) => 0.5,
            (Profile::Heavy, Task::CodeMapping) => 0.6,
            (Profile::Light, Task::GenuineClone) => 0.6,
            (Profile::Light, Task::CodeMapping) => 0.8,
        }
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "heavy" | "soot-sootup" => Ok(Profile::Heavy),
            "light" | "findbugs-spotbugs" => Ok(Profile::Light),
            _ => Err(format!("unknown profile `{s}` (expected heavy or light)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub threshold: f64,
    pub task: Task,
    pub weights: WeightConfig,
    pub ablation: Ablation,
    pub policy: AbsencePolicy,
}

impl FilterConfig {
    pub fn new(task: Task, profile: Profile) -> Self {
        FilterConfig {
            threshold: profile.default_threshold(task),
            task,
            weights: WeightConfig::default(),
            ablation: Ablation::All,
            policy: AbsencePolicy::default(),
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Config(format!(
                "threshold {} outside [0, 1]",
                self.threshold
            )));
        }
        self.weights.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingResult {
    pub pair: PairKey,
    pub provenance: Provenance,
    /// Test when either side is test code.
    pub code_type: CodeType,
    pub breakdown: SasBreakdown,
    pub kept: bool,
    /// 1-based position among kept pairs.
    pub rank: Option<usize>,
}

impl MappingResult {
    pub fn sas(&self) -> f64 {
        self.breakdown.sas
    }
}

/// Orders by sas descending, then by pair key.
pub fn rank_order(a: (f64, &PairKey), b: (f64, &PairKey)) -> std::cmp::Ordering {
    b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1))
}

/// Assigns `kept` and `rank` for a threshold and sorts kept pairs first by
/// rank, the rest by pair key.
pub fn apply_threshold(results: &mut [MappingResult], threshold: f64) {
    for r in results.iter_mut() {
        r.kept = passes_threshold(r.breakdown.sas, threshold);
        r.rank = None;
    }
    results.sort_by(|a, b| {
        b.kept.cmp(&a.kept).then_with(|| {
            if a.kept {
                rank_order((a.sas(), &a.pair), (b.sas(), &b.pair))
            } else {
                a.pair.cmp(&b.pair)
            }
        })
    });
    for (i, r) in results.iter_mut().take_while(|r| r.kept).enumerate() {
        r.rank = Some(i + 1);
    }
}

/// Normalized details for one side, computed once per method.
fn normalize_side<'a>(
    snap: &'a ProjectSnapshot,
    ids: &BTreeSet<&'a str>,
    normalizer: &Normalizer,
    role: ProjectRole,
) -> Result<HashMap<&'a str, (&'a MethodRecord, NormalizedDetails)>> {
    let side = role.as_str();
    let records: Vec<&MethodRecord> = ids
        .iter()
        .map(|id| {
            snap.get(id).ok_or_else(|| Error::UnresolvedId {
                side,
                id: id.to_string(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(records
        .into_par_iter()
        .map(|rec| {
            let details = normalizer.normalize_record(rec, snap.class_of(rec), role);
            (rec.id.as_str(), (rec, details))
        })
        .collect())
}

/// Weight-independent field similarities for every distinct pair, sorted by
/// pair key. Shared by scoring, ablation runs and the tuner.
pub fn field_sims(
    pairs: &[CandidatePair],
    left: &ProjectSnapshot,
    right: &ProjectSnapshot,
    normalizer: &Normalizer,
) -> Result<Vec<(CandidatePair, CodeType, FieldSims)>> {
    let mut unique: BTreeMap<PairKey, &CandidatePair> = BTreeMap::new();
    for p in pairs {
        unique.entry(p.key()).or_insert(p);
    }
    let left_ids: BTreeSet<&str> = unique.values().map(|p| p.left.as_str()).collect();
    let right_ids: BTreeSet<&str> = unique.values().map(|p| p.right.as_str()).collect();
    let l = normalize_side(left, &left_ids, normalizer, ProjectRole::Original)?;
    let r = normalize_side(right, &right_ids, normalizer, ProjectRole::Redesigned)?;

    Ok(unique
        .into_values()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|p| {
            let (lrec, ld) = &l[p.left.as_str()];
            let (rrec, rd) = &r[p.right.as_str()];
            let code_type = if lrec.is_test || rrec.is_test {
                CodeType::Test
            } else {
                CodeType::Production
            };
            (p.clone(), code_type, FieldSims::compute(ld, rd))
        })
        .collect())
}

/// Scores, thresholds and ranks a set of candidate pairs. Duplicate pair keys
/// collapse to the first occurrence.
pub fn score_pairs(
    pairs: &[CandidatePair],
    left: &ProjectSnapshot,
    right: &ProjectSnapshot,
    normalizer: &Normalizer,
    cfg: &FilterConfig,
) -> Result<Vec<MappingResult>> {
    cfg.validate()?;
    let normalizer = if cfg.ablation.disables_renaming() {
        normalizer.clone().without_renaming()
    } else {
        normalizer.clone()
    };
    let sims = field_sims(pairs, left, right, &normalizer)?;
    let mut results: Vec<MappingResult> = sims
        .into_iter()
        .map(|(pair, code_type, fields)| MappingResult {
            pair: pair.key(),
            provenance: pair.provenance,
            code_type,
            breakdown: SasBreakdown::from_fields(fields, &cfg.weights, cfg.ablation, &cfg.policy),
            kept: false,
            rank: None,
        })
        .collect();
    apply_threshold(&mut results, cfg.threshold);
    Ok(results)
}

/// Table-style accounting of a post-filtering run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterCounts {
    pub orig: usize,
    pub filt: usize,
    pub filtered_out: usize,
    pub out_pct: f64,
}

impl FilterCounts {
    pub fn new(orig: usize, filt: usize) -> Self {
        let filtered_out = orig - filt;
        let out_pct = if orig == 0 {
            0.0
        } else {
            100.0 * filtered_out as f64 / orig as f64
        };
        FilterCounts {
            orig,
            filt,
            filtered_out,
            out_pct,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub overall: FilterCounts,
    pub production: FilterCounts,
    pub test: FilterCounts,
}

pub fn summarize(results: &[MappingResult]) -> Summary {
    let count = |ct: Option<CodeType>| {
        let sel = results.iter().filter(|r| ct.is_none_or(|c| r.code_type == c));
        let (orig, filt) = sel.fold((0, 0), |(o, f), r| (o + 1, f + r.kept as usize));
        FilterCounts::new(orig, filt)
    };
    Summary {
        overall: count(None),
        production: count(Some(CodeType::Production)),
        test: count(Some(CodeType::Test)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Jsonl,
    Csv,
    Summary,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "jsonl" => Ok(ReportFormat::Jsonl),
            "csv" => Ok(ReportFormat::Csv),
            "summary" => Ok(ReportFormat::Summary),
            _ => Err(format!("unknown report format `{s}`")),
        }
    }
}

const CSV_HEADER: [&str; 20] = [
    "rank",
    "kept",
    "left",
    "right",
    "code_type",
    "provenance",
    "sas",
    "sim_class",
    "sim_method_header",
    "sim_optional",
    "sim_class_name",
    "sim_class_doc",
    "sim_method_name",
    "sim_return_type",
    "sim_param",
    "sim_local_var",
    "sim_method_doc",
    "sim_comment",
    "ablation",
    "detector",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Serializes results; absent field similarities are empty CSV cells and
/// `null` in JSON.
pub fn report(results: &[MappingResult], fmt: ReportFormat) -> String {
    match fmt {
        ReportFormat::Jsonl => {
            let mut out = String::new();
            for r in results {
                out.push_str(&serde_json::to_string(r).expect("results serialize"));
                out.push('\n');
            }
            out
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER).expect("in-memory write");
            for r in results {
                let b = &r.breakdown;
                let f = &b.fields;
                let (kind, detector) = match &r.provenance {
                    Provenance::Detector(d) => ("detector", d.as_str()),
                    Provenance::Prefilter => ("prefilter", ""),
                    Provenance::Exhaustive => ("exhaustive", ""),
                };
                w.write_record([
                    r.rank.map(|x| x.to_string()).unwrap_or_default(),
                    r.kept.to_string(),
                    r.pair.left.clone(),
                    r.pair.right.clone(),
                    r.code_type.to_string(),
                    kind.to_string(),
                    b.sas.to_string(),
                    b.sim_class.to_string(),
                    b.sim_method_header.to_string(),
                    b.sim_optional.to_string(),
                    opt(f.sim_class_name),
                    opt(f.sim_class_doc),
                    opt(f.sim_method_name),
                    opt(f.sim_return_type),
                    opt(f.sim_param),
                    opt(f.sim_local_var),
                    opt(f.sim_method_doc),
                    opt(f.sim_comment),
                    b.ablation.to_string(),
                    detector.to_string(),
                ])
                .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
        }
        ReportFormat::Summary => {
            let mut s = serde_json::to_string_pretty(&summarize(results)).expect("summary serializes");
            s.push('\n');
            s
        }
    }
}

pub fn read_results_jsonl(text: &str) -> std::result::Result<Vec<MappingResult>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| serde_json::from_str(l).map_err(|e| format!("line {}: {e}", n + 1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(left: &str, sas: f64) -> MappingResult {
        MappingResult {
            pair: PairKey::new(left, "r"),
            provenance: Provenance::Exhaustive,
            code_type: CodeType::Production,
            breakdown: SasBreakdown {
                fields: FieldSims::default(),
                sim_class: 0.0,
                sim_method_header: 0.0,
                sim_optional: 0.0,
                sas,
                ablation: Ablation::All,
            },
            kept: false,
            rank: None,
        }
    }

    #[test]
    fn threshold_is_inclusive_and_ranks_descend() {
        let mut rs = vec![
            result("a", 0.49),
            result("b", 0.7),
            result("c", 0.9),
            result("d", 0.5),
        ];
        apply_threshold(&mut rs, 0.5);
        let view: Vec<_> = rs
            .iter()
            .map(|r| (r.pair.left.as_str(), r.kept, r.rank))
            .collect();
        assert_eq!(
            view,
            vec![
                ("c", true, Some(1)),
                ("b", true, Some(2)),
                ("d", true, Some(3)),
                ("a", false, None)
            ]
        );
    }

    #[test]
    fn equal_scores_rank_by_key() {
        let mut rs = vec![result("z", 0.8), result("m", 0.8)];
        apply_threshold(&mut rs, 0.0);
        assert_eq!(rs[0].pair.left, "m");
        assert_eq!(rs[1].rank, Some(2));
    }

    #[test]
    fn out_percentage() {
        let c = FilterCounts::new(512, 182);
        assert_eq!(c.filtered_out, 330);
        assert!((c.out_pct - 64.45).abs() < 0.005);
        assert_eq!(FilterCounts::new(0, 0).out_pct, 0.0);
        assert_eq!(FilterCounts::new(70, 70).out_pct, 0.0);
    }

    #[test]
    fn default_thresholds() {
        assert_eq!(Profile::Heavy.default_threshold(Task::GenuineClone), 0.5);
        assert_eq!(Profile::Heavy.default_threshold(Task::CodeMapping), 0.6);
        assert_eq!(Profile::Light.default_threshold(Task::GenuineClone), 0.6);
        assert_eq!(Profile::Light.default_threshold(Task::CodeMapping), 0.8);
        assert_eq!("cm".parse::<Task>(), Ok(Task::CodeMapping));
    }

    #[test]
    fn csv_and_summary_render() {
        let mut rs = vec![result("a", 0.3), result("b", 0.9)];
        rs[0].code_type = CodeType::Test;
        apply_threshold(&mut rs, 0.5);
        let csv = report(&rs, ReportFormat::Csv);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("1,true,b,r,production,exhaustive,0.9"));
        let s = summarize(&rs);
        assert_eq!(s.overall, FilterCounts::new(2, 1));
        assert_eq!(s.test, FilterCounts::new(1, 0));
        let back = read_results_jsonl(&report(&rs, ReportFormat::Jsonl)).unwrap();
        assert_eq!(back, rs);
    }
}
