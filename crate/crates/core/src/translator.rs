//! Conversion of raw tool output into uniform [`Prediction`]s.
//!
//! Translators are plug-ins keyed by id. Two are built in: `standard-json`
//! reads the ground-truth annotation schema (with `type` read as a candidate
//! list and an optional per-entry `ranked` flag), and `mock` reads the same
//! format strictly, failing on any entry it cannot use.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::corpus::AnnotationSite;
use crate::runner::{RunRecord, RunStatus};
use crate::typeexpr::{CanonicalType, TypeNormalizer};

pub const STANDARD_JSON: &str = "standard-json";
pub const MOCK: &str = "mock";

/// A tool's answer for one site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    #[serde(flatten)]
    pub site: AnnotationSite,
    /// Normalized, duplicate-free candidates. Best first when `ranked`.
    pub candidates: Vec<CanonicalType>,
    pub ranked: bool,
}

impl Prediction {
    pub fn type_set(&self) -> BTreeSet<CanonicalType> {
        self.candidates.iter().cloned().collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TranslateError {
    #[error("no translator registered as `{0}`")]
    UnknownTranslator(String),
    #[error("{snippet}: output is not valid {format}: {message}")]
    Format {
        snippet: String,
        format: String,
        message: String,
    },
    #[error("site {site} has both ranked and unranked predictions")]
    Consistency { site: String },
}

pub struct TranslateContext<'a> {
    /// `category/name` of the snippet the output belongs to.
    pub snippet: &'a str,
    /// Whether candidate order is meaningful when an entry does not say.
    pub ranked: bool,
    pub normalizer: &'a TypeNormalizer,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Translation {
    pub predictions: Vec<Prediction>,
    pub warnings: Vec<String>,
}

pub trait Translator: Send + Sync {
    fn translate(
        &self,
        raw: &[u8],
        ctx: &TranslateContext<'_>,
    ) -> Result<Translation, TranslateError>;
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PredictionRecord {
    file: String,
    line_number: u32,
    col_offset: u32,
    #[serde(default)]
    function: Option<String>,
    #[serde(default)]
    variable: Option<String>,
    #[serde(default)]
    parameter: Option<String>,
    #[serde(rename = "type")]
    types: Vec<String>,
    #[serde(default)]
    ranked: Option<bool>,
}

/// Reader for the annotation schema shared with the corpus.
pub struct StandardJson {
    /// Fail on unusable entries instead of dropping them.
    pub strict: bool,
}

impl StandardJson {
    fn entry(
        &self,
        value: serde_json::Value,
        ctx: &TranslateContext<'_>,
        warnings: &mut Vec<String>,
    ) -> Result<Prediction, String> {
        let record: PredictionRecord = serde_json::from_value(value).map_err(|e| e.to_string())?;
        let site = AnnotationSite {
            file: record.file,
            line_number: record.line_number,
            col_offset: record.col_offset,
            function: record.function,
            variable: record.variable,
            parameter: record.parameter,
        };
        site.check().map_err(|e| format!("{site}: {e}"))?;
        let mut candidates = Vec::new();
        for text in &record.types {
            match ctx.normalizer.decompose(text) {
                Ok(set) => {
                    for ty in set {
                        if !candidates.contains(&ty) {
                            candidates.push(ty);
                        }
                    }
                }
                Err(e) if self.strict => return Err(format!("{site}: {e}")),
                Err(e) => warnings.push(format!("{}: {site}: dropped type: {e}", ctx.snippet)),
            }
        }
        if candidates.is_empty() {
            return Err(format!("{site}: no usable types"));
        }
        Ok(Prediction {
            site,
            candidates,
            ranked: record.ranked.unwrap_or(ctx.ranked),
        })
    }
}

impl Translator for StandardJson {
    fn translate(
        &self,
        raw: &[u8],
        ctx: &TranslateContext<'_>,
    ) -> Result<Translation, TranslateError> {
        let format_error = |message: String| TranslateError::Format {
            snippet: ctx.snippet.to_string(),
            format: if self.strict { MOCK } else { STANDARD_JSON }.to_string(),
            message,
        };
        let value: serde_json::Value =
            serde_json::from_slice(raw).map_err(|e| format_error(e.to_string()))?;
        let serde_json::Value::Array(items) = value else {
            return Err(format_error("expected a JSON array of annotations".into()));
        };
        let mut translation = Translation::default();
        for (index, item) in items.into_iter().enumerate() {
            match self.entry(item, ctx, &mut translation.warnings) {
                Ok(p) => translation.predictions.push(p),
                Err(message) if self.strict => {
                    return Err(format_error(format!("entry {index}: {message}")))
                }
                Err(message) => translation
                    .warnings
                    .push(format!("{}: entry {index} dropped: {message}", ctx.snippet)),
            }
        }
        for w in &translation.warnings {
            warn!("{w}");
        }
        Ok(translation)
    }
}

/// Translators by id.
pub struct TranslatorRegistry {
    translators: BTreeMap<String, Box<dyn Translator>>,
}

impl Default for TranslatorRegistry {
    fn default() -> Self {
        let mut registry = TranslatorRegistry {
            translators: BTreeMap::new(),
        };
        registry.register(STANDARD_JSON, StandardJson { strict: false });
        registry.register(MOCK, StandardJson { strict: true });
        registry
    }
}

impl TranslatorRegistry {
    pub fn register(&mut self, id: impl Into<String>, translator: impl Translator + 'static) {
        self.translators.insert(id.into(), Box::new(translator));
    }

    pub fn contains(&self, id: &str) -> bool {
        self.translators.contains_key(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.translators.keys().map(String::as_str)
    }

    /// Runs translator `id` over `raw` and merges predictions per site.
    pub fn translate_raw_output(
        &self,
        id: &str,
        raw: &[u8],
        ctx: &TranslateContext<'_>,
    ) -> Result<Translation, TranslateError> {
        let translator = self
            .translators
            .get(id)
            .ok_or_else(|| TranslateError::UnknownTranslator(id.to_string()))?;
        let mut translation = translator.translate(raw, ctx)?;
        translation.predictions = merge_predictions(translation.predictions)?;
        Ok(translation)
    }
}

/// Merges predictions that share a site. Ranked candidate lists are
/// concatenated keeping first occurrences; unranked ones are unioned and
/// sorted. Output is ordered by site.
pub fn merge_predictions(preds: Vec<Prediction>) -> Result<Vec<Prediction>, TranslateError> {
    let mut by_site: BTreeMap<AnnotationSite, Prediction> = BTreeMap::new();
    for pred in preds {
        match by_site.get_mut(&pred.site) {
            None => {
                by_site.insert(pred.site.clone(), pred);
            }
            Some(existing) if existing.ranked != pred.ranked => {
                return Err(TranslateError::Consistency {
                    site: pred.site.to_string(),
                });
            }
            Some(existing) => existing.candidates.extend(pred.candidates),
        }
    }
    Ok(by_site
        .into_values()
        .map(|mut p| {
            if p.ranked {
                let mut seen = BTreeSet::new();
                p.candidates.retain(|c| seen.insert(c.clone()));
            } else {
                p.candidates = p.type_set().into_iter().collect();
            }
            p
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputStatus {
    Translated,
    NoOutput,
    TranslationError,
}

/// Translated output for one snippet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnippetPredictions {
    pub status: OutputStatus,
    pub predictions: Vec<Prediction>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SnippetPredictions {
    pub fn has_output(&self) -> bool {
        self.status == OutputStatus::Translated
    }

    fn missing(status: OutputStatus, error: String) -> Self {
        SnippetPredictions {
            status,
            predictions: Vec::new(),
            warnings: Vec::new(),
            error: Some(error),
        }
    }
}

/// All predictions of one tool, keyed by snippet id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionSet {
    pub tool: String,
    pub ranked: bool,
    pub snippets: BTreeMap<String, SnippetPredictions>,
}

impl PredictionSet {
    pub fn new(tool: impl Into<String>, ranked: bool) -> Self {
        PredictionSet {
            tool: tool.into(),
            ranked,
            snippets: BTreeMap::new(),
        }
    }

    /// Predictions for a snippet, or `None` when the tool produced nothing
    /// usable for it.
    pub fn for_snippet(&self, id: &str) -> Option<&[Prediction]> {
        self.snippets
            .get(id)
            .filter(|s| s.has_output())
            .map(|s| s.predictions.as_slice())
    }
}

/// Translates every run record of one tool. `raw_root` is the directory
/// that record `raw_output` paths are relative to.
pub fn translate_records(
    registry: &TranslatorRegistry,
    translator_id: &str,
    tool: &str,
    ranked: bool,
    records: &[RunRecord],
    raw_root: &Path,
    normalizer: &TypeNormalizer,
) -> Result<PredictionSet, TranslateError> {
    if !registry.contains(translator_id) {
        return Err(TranslateError::UnknownTranslator(translator_id.to_string()));
    }
    let mut set = PredictionSet::new(tool, ranked);
    for record in records {
        let entry = match (&record.status, &record.raw_output) {
            (RunStatus::Ok, Some(rel)) => match std::fs::read(raw_root.join(rel)) {
                Ok(raw) => {
                    let ctx = TranslateContext {
                        snippet: &record.snippet,
                        ranked,
                        normalizer,
                    };
                    match registry.translate_raw_output(translator_id, &raw, &ctx) {
                        Ok(t) => SnippetPredictions {
                            status: OutputStatus::Translated,
                            predictions: t.predictions,
                            warnings: t.warnings,
                            error: None,
                        },
                        Err(e) => {
                            warn!("{tool}: {e}");
                            SnippetPredictions::missing(
                                OutputStatus::TranslationError,
                                e.to_string(),
                            )
                        }
                    }
                }
                Err(e) => SnippetPredictions::missing(
                    OutputStatus::TranslationError,
                    format!("cannot read raw output {rel}: {e}"),
                ),
            },
            (status, _) => {
                SnippetPredictions::missing(OutputStatus::NoOutput, format!("run status {status}"))
            }
        };
        set.snippets.insert(record.snippet.clone(), entry);
    }
    Ok(set)
}
