//! Scoring predictions against ground truth.

use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::corpus::{
    AnnotationKind, AnnotationSite, Category, Corpus, GroundTruthEntry, KindCounts, Snippet,
};
use crate::translator::{Prediction, PredictionSet};
use crate::typeexpr::{CanonicalType, TypeNormalizer, TypeSet};

#[derive(Debug, thiserror::Error)]
pub enum AnalyzeError {
    #[error("top-n requires n >= 1, got {0}")]
    InvalidN(usize),
    #[error("percentage of {numer} over a zero denominator")]
    ZeroDenominator { numer: usize },
    #[error("{snippet}: ground truth {site}: {message}")]
    GroundTruth {
        snippet: String,
        site: String,
        message: String,
    },
}

/// One ground-truth annotation paired with the tool's answer, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationVerdict {
    pub site: AnnotationSite,
    pub kind: AnnotationKind,
    pub gt_types: TypeSet,
    /// Candidates as the tool ordered them; `None` when the site was not
    /// predicted.
    pub candidates: Option<Vec<CanonicalType>>,
    pub ranked: bool,
    pub exact: bool,
}

impl AnnotationVerdict {
    pub fn pred_types(&self) -> Option<TypeSet> {
        self.candidates
            .as_ref()
            .map(|c| c.iter().cloned().collect())
    }

    pub fn sound_at_site(&self) -> bool {
        self.pred_types()
            .is_some_and(|p| self.gt_types.is_subset(&p))
    }

    pub fn complete_at_site(&self) -> bool {
        self.pred_types()
            .is_none_or(|p| p.is_subset(&self.gt_types))
    }
}

/// Normalized ground-truth type set of an entry.
pub fn ground_truth_types(
    entry: &GroundTruthEntry,
    normalizer: &TypeNormalizer,
) -> Result<TypeSet, String> {
    let mut set = TypeSet::new();
    for text in &entry.types {
        set.extend(normalizer.decompose(text).map_err(|e| e.to_string())?);
    }
    Ok(set)
}

/// Joins ground truth with predictions on the full site key. Returns the
/// verdicts, in ground-truth order, and the number of predictions at sites
/// the ground truth does not have.
pub fn align(
    snippet: &str,
    gt: &[GroundTruthEntry],
    preds: &[Prediction],
    normalizer: &TypeNormalizer,
) -> Result<(Vec<AnnotationVerdict>, usize), AnalyzeError> {
    let gt_error = |entry: &GroundTruthEntry, message: String| AnalyzeError::GroundTruth {
        snippet: snippet.to_string(),
        site: entry.site.to_string(),
        message,
    };
    let by_site: BTreeMap<&AnnotationSite, &Prediction> =
        preds.iter().map(|p| (&p.site, p)).collect();
    let mut verdicts = Vec::with_capacity(gt.len());
    let mut matched = BTreeSet::new();
    for entry in gt {
        let kind = entry
            .site
            .kind()
            .map_err(|e| gt_error(entry, e.to_string()))?;
        let gt_types = ground_truth_types(entry, normalizer).map_err(|m| gt_error(entry, m))?;
        let pred = by_site.get(&entry.site);
        if pred.is_some() {
            matched.insert(&entry.site);
        }
        let candidates = pred.map(|p| p.candidates.clone());
        let exact = candidates
            .as_ref()
            .is_some_and(|c| c.iter().cloned().collect::<TypeSet>() == gt_types);
        verdicts.push(AnnotationVerdict {
            site: entry.site.clone(),
            kind,
            gt_types,
            ranked: pred.is_some_and(|p| p.ranked),
            candidates,
            exact,
        });
    }
    let ignored = by_site.keys().filter(|s| !matched.contains(*s)).count();
    Ok((verdicts, ignored))
}

/// Exact matches per kind.
pub fn score_exact(verdicts: &[AnnotationVerdict]) -> KindCounts {
    let mut counts = KindCounts::default();
    for v in verdicts.iter().filter(|v| v.exact) {
        counts.add(v.kind);
    }
    counts
}

/// Whether `gt` falls within the first `n` candidates. When `n` reaches
/// the end of the list the candidates must equal `gt` exactly. Unranked
/// candidates have no meaningful prefix, so they always take the
/// whole-list rule.
pub fn top_n_match(
    gt: &TypeSet,
    candidates: &[CanonicalType],
    ranked: bool,
    n: usize,
) -> Result<bool, AnalyzeError> {
    if n < 1 {
        return Err(AnalyzeError::InvalidN(n));
    }
    let all: TypeSet = candidates.iter().cloned().collect();
    if !ranked || n >= candidates.len() {
        return Ok(all == *gt);
    }
    let prefix: TypeSet = candidates[..n].iter().cloned().collect();
    Ok(gt.is_subset(&prefix))
}

pub fn score_top_n(verdicts: &[AnnotationVerdict], n: usize) -> Result<KindCounts, AnalyzeError> {
    if n < 1 {
        return Err(AnalyzeError::InvalidN(n));
    }
    let mut counts = KindCounts::default();
    for v in verdicts {
        if let Some(c) = &v.candidates {
            if top_n_match(&v.gt_types, c, v.ranked, n)? {
                counts.add(v.kind);
            }
        }
    }
    Ok(counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PrecisionRecall {
    pub true_positives: usize,
    pub predicted: usize,
    pub actual: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

impl PrecisionRecall {
    fn add(&mut self, v: &AnnotationVerdict) {
        self.actual += v.gt_types.len();
        if let Some(p) = v.pred_types() {
            self.predicted += p.len();
            self.true_positives += p.intersection(&v.gt_types).count();
        }
    }

    fn finish(mut self) -> Self {
        let ratio = |d: usize| (d > 0).then(|| self.true_positives as f64 / d as f64);
        self.precision = ratio(self.predicted);
        self.recall = ratio(self.actual);
        self
    }
}

/// Micro-averaged over type instances.
pub fn precision_recall<'a>(
    verdicts: impl IntoIterator<Item = &'a AnnotationVerdict>,
) -> PrecisionRecall {
    let mut pr = PrecisionRecall::default();
    for v in verdicts {
        pr.add(v);
    }
    pr.finish()
}

/// Every ground-truth type is covered at every site. A snippet without
/// tool output is never sound.
pub fn snippet_soundness(verdicts: &[AnnotationVerdict], has_output: bool) -> bool {
    has_output && verdicts.iter().all(AnnotationVerdict::sound_at_site)
}

/// No predicted type falls outside the ground truth; vacuous when nothing
/// was predicted.
pub fn snippet_completeness(verdicts: &[AnnotationVerdict]) -> bool {
    verdicts.iter().all(AnnotationVerdict::complete_at_site)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub snippet: String,
    #[serde(flatten)]
    pub site: AnnotationSite,
    pub types: Vec<CanonicalType>,
}

/// Ground-truth types no prediction covered, and predicted types the
/// ground truth lacks.
pub fn diff_reports(
    snippet: &str,
    verdicts: &[AnnotationVerdict],
) -> (Vec<DiffEntry>, Vec<DiffEntry>) {
    let mut missing = Vec::new();
    let mut mismatch = Vec::new();
    let entry = |site: &AnnotationSite, types: Vec<CanonicalType>| DiffEntry {
        snippet: snippet.to_string(),
        site: site.clone(),
        types,
    };
    for v in verdicts {
        let pred = v.pred_types().unwrap_or_default();
        let absent: Vec<_> = v.gt_types.difference(&pred).cloned().collect();
        if !absent.is_empty() {
            missing.push(entry(&v.site, absent));
        }
        let extra: Vec<_> = pred.difference(&v.gt_types).cloned().collect();
        if !extra.is_empty() {
            mismatch.push(entry(&v.site, extra));
        }
    }
    (missing, mismatch)
}

/// `floor(100 * numer / denom)`.
pub fn format_percentage(numer: usize, denom: usize) -> Result<u64, AnalyzeError> {
    if denom == 0 {
        return Err(AnalyzeError::ZeroDenominator { numer });
    }
    Ok((100 * numer as u128 / denom as u128) as u64)
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CategoryMetrics {
    pub exact: KindCounts,
    pub annotations: KindCounts,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopNRow {
    pub n: usize,
    pub matches: KindCounts,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnippetVerdict {
    pub snippet: String,
    pub sound: bool,
    pub complete: bool,
    pub has_output: bool,
}

/// Everything measured for one tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub tool: String,
    pub ranked: bool,
    pub snippet_count: usize,
    pub categories: BTreeMap<Category, CategoryMetrics>,
    pub totals: CategoryMetrics,
    pub precision_recall: PrecisionRecall,
    pub sound: usize,
    pub complete: usize,
    pub no_output: usize,
    pub top_n: Vec<TopNRow>,
    pub snippets: Vec<SnippetVerdict>,
    pub missing: Vec<DiffEntry>,
    pub mismatch: Vec<DiffEntry>,
    /// Predictions at sites absent from the ground truth, which no metric
    /// counts.
    pub ignored_predictions: usize,
}

/// Verdicts for one snippet plus whether the tool produced output for it.
pub struct ScoredSnippet<'a> {
    pub snippet: &'a Snippet,
    pub verdicts: Vec<AnnotationVerdict>,
    pub has_output: bool,
    pub ignored: usize,
}

pub fn score_snippet<'a>(
    snippet: &'a Snippet,
    preds: Option<&[Prediction]>,
    normalizer: &TypeNormalizer,
) -> Result<ScoredSnippet<'a>, AnalyzeError> {
    let (verdicts, ignored) = align(
        &snippet.id(),
        &snippet.ground_truth,
        preds.unwrap_or(&[]),
        normalizer,
    )?;
    Ok(ScoredSnippet {
        snippet,
        verdicts,
        has_output: preds.is_some(),
        ignored,
    })
}

/// Scores one tool over the whole corpus. Snippets missing from
/// `predictions` count as producing no output.
pub fn analyze_tool(
    corpus: &Corpus,
    predictions: &PredictionSet,
    normalizer: &TypeNormalizer,
    top_n: &[usize],
) -> Result<MetricsReport, AnalyzeError> {
    if let Some(&bad) = top_n.iter().find(|&&n| n < 1) {
        return Err(AnalyzeError::InvalidN(bad));
    }
    for id in predictions.snippets.keys() {
        if corpus.snippet(id).is_none() {
            warn!(
                "{}: predictions for unknown snippet {id} ignored",
                predictions.tool
            );
        }
    }
    let mut ns: Vec<usize> = top_n.to_vec();
    ns.sort_unstable();
    ns.dedup();

    let mut report = MetricsReport {
        tool: predictions.tool.clone(),
        ranked: predictions.ranked,
        snippet_count: corpus.len(),
        categories: BTreeMap::new(),
        totals: CategoryMetrics::default(),
        precision_recall: PrecisionRecall::default(),
        sound: 0,
        complete: 0,
        no_output: 0,
        top_n: ns
            .iter()
            .map(|&n| TopNRow {
                n,
                matches: KindCounts::default(),
            })
            .collect(),
        snippets: Vec::with_capacity(corpus.len()),
        missing: Vec::new(),
        mismatch: Vec::new(),
        ignored_predictions: 0,
    };
    let mut pr = PrecisionRecall::default();
    for (category, snippets) in corpus.categories() {
        let metrics = report.categories.entry(category).or_default();
        for snippet in snippets {
            let id = snippet.id();
            let scored = score_snippet(snippet, predictions.for_snippet(&id), normalizer)?;
            for v in &scored.verdicts {
                metrics.annotations.add(v.kind);
                pr.add(v);
            }
            metrics.exact.merge(&score_exact(&scored.verdicts));
            for row in &mut report.top_n {
                row.matches.merge(&score_top_n(&scored.verdicts, row.n)?);
            }
            let verdict = SnippetVerdict {
                snippet: id.clone(),
                sound: snippet_soundness(&scored.verdicts, scored.has_output),
                complete: snippet_completeness(&scored.verdicts),
                has_output: scored.has_output,
            };
            report.sound += verdict.sound as usize;
            report.complete += verdict.complete as usize;
            report.no_output += !verdict.has_output as usize;
            report.snippets.push(verdict);
            let (missing, mismatch) = diff_reports(&id, &scored.verdicts);
            report.missing.extend(missing);
            report.mismatch.extend(mismatch);
            report.ignored_predictions += scored.ignored;
        }
        report.totals.exact.merge(&metrics.exact);
        report.totals.annotations.merge(&metrics.annotations);
    }
    report.precision_recall = pr.finish();
    if report.ignored_predictions > 0 {
        warn!(
            "{}: {} predictions at sites outside the ground truth ignored",
            report.tool, report.ignored_predictions
        );
    }
    Ok(report)
}
