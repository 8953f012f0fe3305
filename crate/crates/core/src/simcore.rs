//! Semantic alignment scoring.
//!
//! Every method detail is compared with an LCS ratio, `2 * lcs / (n + m)`.
//! The eight field similarities are folded into three components:
//!
//! ```text
//! class    = name + (1 - name) * class_doc
//! header   = delta * method_name + eta * return_type + phi * params
//! optional = mean(local_vars, method_doc, comments)
//! ```
//!
//! and the score is `alpha * class + beta * header + theta * optional`.
//!
//! Two empty sequences have no similarity (`None`). How such a field enters
//! its component is set by [`AbsencePolicy`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalizer::{NormalizedDetails, TokenSeq};

/// Slack for comparing scores against thresholds and weight sums.
pub const SCORE_EPSILON: f64 = 1e-9;

/// `true` when `score` clears `threshold` (inclusive, with [`SCORE_EPSILON`] slack).
pub fn passes_threshold(score: f64, threshold: f64) -> bool {
    score + SCORE_EPSILON >= threshold
}

/// Length of the longest common subsequence.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; short.len() + 1];
    let mut cur = vec![0usize; short.len() + 1];
    for x in long {
        for (j, y) in short.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

/// `2 * lcs / (n + m)`, or `None` when both sequences are empty.
pub fn lcs_ratio<T: PartialEq>(a: &[T], b: &[T]) -> Option<f64> {
    let total = a.len() + b.len();
    if total == 0 {
        return None;
    }
    Some(2.0 * lcs_len(a, b) as f64 / total as f64)
}

pub fn lcs_sim(a: &TokenSeq, b: &TokenSeq) -> Option<f64> {
    lcs_ratio(a.as_slice(), b.as_slice())
}

/// Component and sub-component weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WeightConfig {
    /// Class component.
    pub alpha: f64,
    /// Method header component.
    pub beta: f64,
    /// Optional details component.
    pub theta: f64,
    /// Method name, within the header.
    pub delta: f64,
    /// Return type, within the header.
    pub eta: f64,
    /// Parameters, within the header.
    pub phi: f64,
}

impl Default for WeightConfig {
    fn default() -> Self {
        WeightConfig {
            alpha: 0.5,
            beta: 0.25,
            theta: 0.25,
            delta: 0.5,
            eta: 0.35,
            phi: 0.15,
        }
    }
}

impl WeightConfig {
    pub fn new(alpha: f64, beta: f64, theta: f64, delta: f64, eta: f64, phi: f64) -> Result<Self> {
        let w = WeightConfig {
            alpha,
            beta,
            theta,
            delta,
            eta,
            phi,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.alpha, self.beta, self.theta, self.delta, self.eta, self.phi]
    }

    pub fn min_weight(&self) -> f64 {
        self.as_array().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in ["alpha", "beta", "theta", "delta", "eta", "phi"]
            .iter()
            .zip(self.as_array())
        {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("weight {name} = {v} is outside [0, 1]")));
            }
        }
        let outer = self.alpha + self.beta + self.theta;
        if (outer - 1.0).abs() > SCORE_EPSILON {
            return Err(Error::Config(format!(
                "alpha + beta + theta must be 1, got {outer}"
            )));
        }
        let header = self.delta + self.eta + self.phi;
        if (header - 1.0).abs() > SCORE_EPSILON {
            return Err(Error::Config(format!(
                "delta + eta + phi must be 1, got {header}"
            )));
        }
        Ok(())
    }
}

/// How fields that are empty on both sides enter the components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AbsencePolicy {
    /// Stand-in for an absent class-doc similarity.
    pub class_doc: f64,
    /// Stand-in for two empty parameter lists.
    pub params: f64,
    /// Drop absent optional fields from the mean instead of counting them as 0.
    pub drop_absent_optional: bool,
    /// With no optional evidence at all, rescale to `(alpha*class + beta*header) / (alpha + beta)`.
    pub renormalize_without_optional: bool,
}

impl Default for AbsencePolicy {
    fn default() -> Self {
        AbsencePolicy {
            class_doc: 0.0,
            params: 1.0,
            drop_absent_optional: true,
            renormalize_without_optional: false,
        }
    }
}

/// Which rule a run leaves out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ablation {
    #[default]
    All,
    /// No renaming rules during normalization.
    Exr1,
    /// Local variables and the method header are zeroed.
    Exr2,
    /// Method and class docs are zeroed.
    Exr3,
    /// Inline comments are zeroed.
    Exr4,
}

impl Ablation {
    pub const SETTINGS: [Ablation; 5] = [
        Ablation::All,
        Ablation::Exr1,
        Ablation::Exr2,
        Ablation::Exr3,
        Ablation::Exr4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Ablation::All => "all",
            Ablation::Exr1 => "exr1",
            Ablation::Exr2 => "exr2",
            Ablation::Exr3 => "exr3",
            Ablation::Exr4 => "exr4",
        }
    }

    pub fn disables_renaming(self) -> bool {
        self == Ablation::Exr1
    }
}

impl fmt::Display for Ablation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Ablation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ablation::SETTINGS
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown ablation setting `{s}`"))
    }
}

/// Weight-independent per-field similarities; `None` means both sides empty.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldSims {
    pub sim_class_name: Option<f64>,
    pub sim_class_doc: Option<f64>,
    pub sim_method_name: Option<f64>,
    pub sim_return_type: Option<f64>,
    pub sim_param: Option<f64>,
    pub sim_local_var: Option<f64>,
    pub sim_method_doc: Option<f64>,
    pub sim_comment: Option<f64>,
}

impl FieldSims {
    pub fn compute(a: &NormalizedDetails, b: &NormalizedDetails) -> Self {
        FieldSims {
            sim_class_name: lcs_sim(&a.class_name, &b.class_name),
            sim_class_doc: lcs_sim(&a.class_doc, &b.class_doc),
            sim_method_name: lcs_sim(&a.method_name, &b.method_name),
            sim_return_type: lcs_sim(&a.return_type, &b.return_type),
            sim_param: lcs_sim(&a.params, &b.params),
            sim_local_var: lcs_sim(&a.local_vars, &b.local_vars),
            sim_method_doc: lcs_sim(&a.method_doc, &b.method_doc),
            sim_comment: lcs_sim(&a.comments, &b.comments),
        }
    }

    /// Ablation overrides on the field level: forced fields become present zeros.
    pub fn ablated(mut self, ablation: Ablation) -> Self {
        match ablation {
            Ablation::All | Ablation::Exr1 => {}
            Ablation::Exr2 => self.sim_local_var = Some(0.0),
            Ablation::Exr3 => {
                self.sim_method_doc = Some(0.0);
                self.sim_class_doc = Some(0.0);
            }
            Ablation::Exr4 => self.sim_comment = Some(0.0),
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Components {
    pub sim_class: f64,
    pub sim_method_header: f64,
    pub sim_optional: f64,
    /// False when every optional field was absent.
    pub has_optional: bool,
}

impl Components {
    pub fn compute(fields: &FieldSims, w: &WeightConfig, ablation: Ablation, policy: &AbsencePolicy) -> Self {
        let f = fields.ablated(ablation);

        let name = f.sim_class_name.unwrap_or(0.0);
        let doc = f.sim_class_doc.unwrap_or(policy.class_doc);
        let sim_class = name + (1.0 - name) * doc;

        let sim_method_header = if ablation == Ablation::Exr2 {
            0.0
        } else {
            w.delta * f.sim_method_name.unwrap_or(0.0)
                + w.eta * f.sim_return_type.unwrap_or(0.0)
                + w.phi * f.sim_param.unwrap_or(policy.params)
        };

        let optional = [f.sim_local_var, f.sim_method_doc, f.sim_comment];
        let present: Vec<f64> = if policy.drop_absent_optional {
            optional.iter().flatten().copied().collect()
        } else {
            optional.iter().map(|v| v.unwrap_or(0.0)).collect()
        };
        let has_optional = optional.iter().any(Option::is_some);
        let sim_optional = if present.is_empty() {
            0.0
        } else {
            present.iter().sum::<f64>() / present.len() as f64
        };

        Components {
            sim_class: sim_class.clamp(0.0, 1.0),
            sim_method_header: sim_method_header.clamp(0.0, 1.0),
            sim_optional: sim_optional.clamp(0.0, 1.0),
            has_optional,
        }
    }

    pub fn sas(&self, w: &WeightConfig, policy: &AbsencePolicy) -> f64 {
        let score = if policy.renormalize_without_optional && !self.has_optional {
            let denom = w.alpha + w.beta;
            if denom > 0.0 {
                (w.alpha * self.sim_class + w.beta * self.sim_method_header) / denom
            } else {
                0.0
            }
        } else {
            w.alpha * self.sim_class + w.beta * self.sim_method_header + w.theta * self.sim_optional
        };
        score.clamp(0.0, 1.0)
    }
}

/// Everything that went into one pair's score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SasBreakdown {
    #[serde(flatten)]
    pub fields: FieldSims,
    pub sim_class: f64,
    pub sim_method_header: f64,
    pub sim_optional: f64,
    pub sas: f64,
    pub ablation: Ablation,
}

impl SasBreakdown {
    pub fn from_fields(
        fields: FieldSims,
        w: &WeightConfig,
        ablation: Ablation,
        policy: &AbsencePolicy,
    ) -> Self {
        let c = Components::compute(&fields, w, ablation, policy);
        SasBreakdown {
            fields,
            sim_class: c.sim_class,
            sim_method_header: c.sim_method_header,
            sim_optional: c.sim_optional,
            sas: c.sas(w, policy),
            ablation,
        }
    }
}

/// Scores one pair of normalized methods.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Scorer {
    pub weights: WeightConfig,
    pub ablation: Ablation,
    pub policy: AbsencePolicy,
}

impl Scorer {
    pub fn new(weights: WeightConfig, ablation: Ablation) -> Self {
        Scorer {
            weights,
            ablation,
            policy: AbsencePolicy::default(),
        }
    }

    pub fn score(&self, a: &NormalizedDetails, b: &NormalizedDetails) -> SasBreakdown {
        SasBreakdown::from_fields(
            FieldSims::compute(a, b),
            &self.weights,
            self.ablation,
            &self.policy,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(items: &[&str]) -> TokenSeq {
        items.iter().copied().collect()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9
    }

    #[test]
    fn lcs_examples() {
        assert_eq!(lcs_sim(&seq(&["a", "b", "c"]), &seq(&["a", "b", "c"])), Some(1.0));
        assert_eq!(lcs_sim(&seq(&["a"]), &seq(&["b"])), Some(0.0));
        assert!(close(
            lcs_sim(&seq(&["get", "name"]), &seq(&["get", "id", "name"])).unwrap(),
            0.8
        ));
        assert_eq!(lcs_sim(&seq(&[]), &seq(&[])), None);
        assert_eq!(lcs_sim(&seq(&["a"]), &seq(&[])), Some(0.0));
    }

    #[test]
    fn class_component() {
        let w = WeightConfig::default();
        let p = AbsencePolicy::default();
        let mut f = FieldSims {
            sim_class_name: Some(0.5),
            sim_class_doc: Some(0.4),
            ..Default::default()
        };
        assert!(close(
            Components::compute(&f, &w, Ablation::All, &p).sim_class,
            0.7
        ));
        f.sim_class_name = Some(1.0);
        f.sim_class_doc = Some(0.123);
        assert!(close(
            Components::compute(&f, &w, Ablation::All, &p).sim_class,
            1.0
        ));
        f.sim_class_name = Some(0.3);
        f.sim_class_doc = None;
        assert!(close(
            Components::compute(&f, &w, Ablation::All, &p).sim_class,
            0.3
        ));
    }

    #[test]
    fn optional_mean_skips_absent() {
        let f = FieldSims {
            sim_local_var: None,
            sim_method_doc: Some(0.6),
            sim_comment: Some(0.2),
            ..Default::default()
        };
        let w = WeightConfig::default();
        let c = Components::compute(&f, &w, Ablation::All, &AbsencePolicy::default());
        assert!(close(c.sim_optional, 0.4));

        let counted = AbsencePolicy {
            drop_absent_optional: false,
            ..Default::default()
        };
        let c = Components::compute(&f, &w, Ablation::All, &counted);
        assert!(close(c.sim_optional, 0.8 / 3.0));

        let none = Components::compute(
            &FieldSims::default(),
            &w,
            Ablation::All,
            &AbsencePolicy::default(),
        );
        assert_eq!(none.sim_optional, 0.0);
        assert!(!none.has_optional);
    }

    #[test]
    fn header_with_zero_arity() {
        let f = FieldSims {
            sim_method_name: Some(1.0),
            sim_return_type: Some(1.0),
            sim_param: None,
            ..Default::default()
        };
        let w = WeightConfig::default();
        let c = Components::compute(&f, &w, Ablation::All, &AbsencePolicy::default());
        assert!(close(c.sim_method_header, 1.0));
    }

    #[test]
    fn weighted_sum() {
        let w = WeightConfig::default();
        let p = AbsencePolicy::default();
        let c = |a, b, o| Components {
            sim_class: a,
            sim_method_header: b,
            sim_optional: o,
            has_optional: true,
        };
        assert!(close(c(1.0, 1.0, 1.0).sas(&w, &p), 1.0));
        assert!(close(c(0.8, 0.6, 0.4).sas(&w, &p), 0.65));
        assert_eq!(c(0.0, 0.0, 0.0).sas(&w, &p), 0.0);
    }

    #[test]
    fn renormalize_toggle() {
        let w = WeightConfig::default();
        let p = AbsencePolicy {
            renormalize_without_optional: true,
            ..Default::default()
        };
        let c = Components {
            sim_class: 0.6,
            sim_method_header: 0.9,
            sim_optional: 0.0,
            has_optional: false,
        };
        assert!(close(c.sas(&w, &p), (0.5 * 0.6 + 0.25 * 0.9) / 0.75));
    }

    #[test]
    fn ablations_zero_their_fields() {
        let full = FieldSims {
            sim_class_name: Some(0.5),
            sim_class_doc: Some(1.0),
            sim_method_name: Some(1.0),
            sim_return_type: Some(1.0),
            sim_param: Some(1.0),
            sim_local_var: Some(1.0),
            sim_method_doc: Some(1.0),
            sim_comment: Some(1.0),
        };
        let w = WeightConfig::default();
        let p = AbsencePolicy::default();
        let exr2 = Components::compute(&full, &w, Ablation::Exr2, &p);
        assert_eq!(exr2.sim_method_header, 0.0);
        assert!(close(exr2.sim_optional, 2.0 / 3.0));
        let exr3 = Components::compute(&full, &w, Ablation::Exr3, &p);
        assert!(close(exr3.sim_class, 0.5));
        assert!(close(exr3.sim_optional, 2.0 / 3.0));
        let exr4 = Components::compute(&full, &w, Ablation::Exr4, &p);
        assert!(close(exr4.sim_optional, 2.0 / 3.0));
        let exr1 = Components::compute(&full, &w, Ablation::Exr1, &p);
        assert_eq!(exr1, Components::compute(&full, &w, Ablation::All, &p));
    }

    #[test]
    fn weight_validation() {
        assert!(WeightConfig::default().validate().is_ok());
        assert!(WeightConfig::new(0.5, 0.5, 0.5, 0.5, 0.35, 0.15).is_err());
        assert!(WeightConfig::new(0.5, 0.25, 0.25, 0.5, 0.5, 0.15).is_err());
        assert!(WeightConfig::new(1.2, -0.1, -0.1, 1.0, 0.0, 0.0).is_err());
        assert!(WeightConfig::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0).is_ok());
    }

    fn opt_sim() -> impl Strategy<Value = Option<f64>> {
        prop_oneof![Just(None), (0.0f64..=1.0).prop_map(Some)]
    }

    fn field_sims() -> impl Strategy<Value = FieldSims> {
        (
            (opt_sim(), opt_sim(), opt_sim(), opt_sim()),
            (opt_sim(), opt_sim(), opt_sim(), opt_sim()),
        )
            .prop_map(|((a, b, c, d), (e, f, g, h))| FieldSims {
                sim_class_name: a,
                sim_class_doc: b,
                sim_method_name: c,
                sim_return_type: d,
                sim_param: e,
                sim_local_var: f,
                sim_method_doc: g,
                sim_comment: h,
            })
    }

    fn small_seq() -> impl Strategy<Value = Vec<u8>> {
        proptest::collection::vec(0u8..5, 0..10)
    }

    proptest! {
        #[test]
        fn lcs_is_symmetric(a in small_seq(), b in small_seq()) {
            prop_assert_eq!(lcs_ratio(&a, &b), lcs_ratio(&b, &a));
        }

        #[test]
        fn lcs_self_is_one(a in proptest::collection::vec(0u8..5, 1..10)) {
            prop_assert_eq!(lcs_ratio(&a, &a), Some(1.0));
        }

        #[test]
        fn scores_stay_in_unit_interval(f in field_sims(), which in 0usize..5) {
            let b = SasBreakdown::from_fields(f, &WeightConfig::default(), Ablation::SETTINGS[which], &AbsencePolicy::default());
            for v in [b.sim_class, b.sim_method_header, b.sim_optional, b.sas] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            prop_assert!(b.sim_class + 1e-12 >= f.sim_class_name.unwrap_or(0.0));
            let expected = 0.5 * b.sim_class + 0.25 * b.sim_method_header + 0.25 * b.sim_optional;
            prop_assert!((b.sas - expected).abs() <= 1e-9);
        }

        #[test]
        fn sas_is_monotone_in_components(
            c in 0.0f64..=1.0, h in 0.0f64..=1.0, o in 0.0f64..=1.0, bump in 0.0f64..=1.0, which in 0usize..3,
        ) {
            let w = WeightConfig::default();
            let p = AbsencePolicy::default();
            let base = Components { sim_class: c, sim_method_header: h, sim_optional: o, has_optional: true };
            let mut up = base;
            match which {
                0 => up.sim_class = (c + bump).min(1.0),
                1 => up.sim_method_header = (h + bump).min(1.0),
                _ => up.sim_optional = (o + bump).min(1.0),
            }
            prop_assert!(up.sas(&w, &p) + 1e-12 >= base.sas(&w, &p));
        }

        #[test]
        fn exr4_ignores_comments(f in field_sims(), other in opt_sim()) {
            let g = FieldSims { sim_comment: other, ..f };
            let w = WeightConfig::default();
            let p = AbsencePolicy::default();
            let a = SasBreakdown::from_fields(f, &w, Ablation::Exr4, &p);
            let b = SasBreakdown::from_fields(g, &w, Ablation::Exr4, &p);
            prop_assert_eq!(a.sas, b.sas);
        }
    }
}
