//! The micro-benchmark corpus: snippets grouped by language-feature category,
//! each with a side-car ground-truth annotation file.
//!
//! On disk a corpus looks like `<root>/<category>/<snippet>/main.py` plus
//! `<root>/<category>/<snippet>/main_gt.json`.

mod profile;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::typeexpr::{parse_type_expr, TypeNormalizer};

pub use profile::{CorpusProfile, CountRule, ExpectedTotals};

pub const SOURCE_FILE: &str = "main.py";
pub const GROUND_TRUTH_FILE: &str = "main_gt.json";

macro_rules! categories {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// Language-feature category of a snippet.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum Category {
            $($variant),*
        }

        impl Category {
            pub const ALL: [Category; 18] = [$(Category::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Category::$variant => $name),*
                }
            }
        }

        impl FromStr for Category {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($name => Ok(Category::$variant),)*
                    other => Err(format!("unknown category `{other}`")),
                }
            }
        }
    };
}

categories! {
    Args => "args",
    Assignments => "assignments",
    Builtins => "builtins",
    Classes => "classes",
    Decorators => "decorators",
    Dicts => "dicts",
    DirectCalls => "direct_calls",
    Dynamic => "dynamic",
    Exceptions => "exceptions",
    External => "external",
    Functions => "functions",
    Generators => "generators",
    Imports => "imports",
    Kwargs => "kwargs",
    Lambdas => "lambdas",
    Lists => "lists",
    Mro => "mro",
    Returns => "returns",
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What an annotation describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AnnotationKind {
    #[serde(rename = "FR")]
    FunctionReturn,
    #[serde(rename = "FP")]
    FunctionParameter,
    #[serde(rename = "LV")]
    LocalVariable,
}

impl AnnotationKind {
    pub const ALL: [AnnotationKind; 3] = [
        AnnotationKind::FunctionReturn,
        AnnotationKind::FunctionParameter,
        AnnotationKind::LocalVariable,
    ];

    pub fn abbrev(self) -> &'static str {
        match self {
            AnnotationKind::FunctionReturn => "FR",
            AnnotationKind::FunctionParameter => "FP",
            AnnotationKind::LocalVariable => "LV",
        }
    }
}

impl fmt::Display for AnnotationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.abbrev())
    }
}

/// Per-kind counters with a running total.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCounts {
    #[serde(rename = "FR")]
    pub fr: usize,
    #[serde(rename = "FP")]
    pub fp: usize,
    #[serde(rename = "LV")]
    pub lv: usize,
    pub total: usize,
}

impl KindCounts {
    pub fn add(&mut self, kind: AnnotationKind) {
        self.add_n(kind, 1);
    }

    pub fn add_n(&mut self, kind: AnnotationKind, n: usize) {
        match kind {
            AnnotationKind::FunctionReturn => self.fr += n,
            AnnotationKind::FunctionParameter => self.fp += n,
            AnnotationKind::LocalVariable => self.lv += n,
        }
        self.total += n;
    }

    pub fn get(&self, kind: AnnotationKind) -> usize {
        match kind {
            AnnotationKind::FunctionReturn => self.fr,
            AnnotationKind::FunctionParameter => self.fp,
            AnnotationKind::LocalVariable => self.lv,
        }
    }

    pub fn merge(&mut self, other: &KindCounts) {
        for kind in AnnotationKind::ALL {
            self.add_n(kind, other.get(kind));
        }
    }
}

/// The location an annotation refers to. Also the join key between ground
/// truth and predictions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AnnotationSite {
    pub file: String,
    pub line_number: u32,
    /// 0-based column of the first character of the annotated identifier.
    pub col_offset: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SiteError {
    #[error("line_number must be at least 1")]
    ZeroLine,
    #[error("both `variable` and `parameter` are set")]
    VariableAndParameter,
    #[error("`parameter` is set without `function`")]
    ParameterWithoutFunction,
    #[error("none of `function`, `variable` or `parameter` is set")]
    Unclassifiable,
}

impl AnnotationSite {
    /// Checks the structural invariants of a site.
    pub fn check(&self) -> Result<(), SiteError> {
        if self.line_number == 0 {
            return Err(SiteError::ZeroLine);
        }
        self.kind().map(|_| ())
    }

    /// Derives the annotation kind from the discriminator fields.
    pub fn kind(&self) -> Result<AnnotationKind, SiteError> {
        match (&self.function, &self.variable, &self.parameter) {
            (_, Some(_), Some(_)) => Err(SiteError::VariableAndParameter),
            (None, _, Some(_)) => Err(SiteError::ParameterWithoutFunction),
            (Some(_), None, Some(_)) => Ok(AnnotationKind::FunctionParameter),
            (_, Some(_), None) => Ok(AnnotationKind::LocalVariable),
            (Some(_), None, None) => Ok(AnnotationKind::FunctionReturn),
            (None, None, None) => Err(SiteError::Unclassifiable),
        }
    }
}

impl fmt::Display for AnnotationSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line_number, self.col_offset)?;
        match (&self.function, &self.variable, &self.parameter) {
            (Some(func), _, Some(param)) => write!(f, " {func}({param})"),
            (Some(func), Some(var), _) => write!(f, " {func}.{var}"),
            (None, Some(var), _) => write!(f, " {var}"),
            (Some(func), None, None) => write!(f, " {func}()"),
            _ => Ok(()),
        }
    }
}

/// One ground-truth annotation: a site plus the runtime types it can hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruthEntry {
    pub site: AnnotationSite,
    /// Type names exactly as written in the file.
    pub types: Vec<String>,
}

/// Classifies a ground-truth entry into FR, FP or LV.
pub fn classify_site(entry: &GroundTruthEntry) -> Result<AnnotationKind, SiteError> {
    entry.site.kind()
}

/// On-disk shape of one ground-truth entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroundTruthRecord {
    file: String,
    line_number: u32,
    col_offset: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    variable: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parameter: Option<String>,
    #[serde(rename = "type")]
    types: Vec<String>,
}

impl From<GroundTruthRecord> for GroundTruthEntry {
    fn from(r: GroundTruthRecord) -> Self {
        GroundTruthEntry {
            site: AnnotationSite {
                file: r.file,
                line_number: r.line_number,
                col_offset: r.col_offset,
                function: r.function,
                variable: r.variable,
                parameter: r.parameter,
            },
            types: r.types,
        }
    }
}

impl From<&GroundTruthEntry> for GroundTruthRecord {
    fn from(e: &GroundTruthEntry) -> Self {
        GroundTruthRecord {
            file: e.site.file.clone(),
            line_number: e.site.line_number,
            col_offset: e.site.col_offset,
            function: e.site.function.clone(),
            variable: e.site.variable.clone(),
            parameter: e.site.parameter.clone(),
            types: e.types.clone(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{line}:{column}: malformed JSON: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}:{line}:{column}: schema error: {message}", path.display())]
    Schema {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}: {message}", path.display())]
    Validation { path: PathBuf, message: String },
    #[error("{}: unknown category directory `{name}`", path.display())]
    UnknownCategory { path: PathBuf, name: String },
    #[error("{}: missing category directories: {}", path.display(), missing.join(", "))]
    MissingCategories { path: PathBuf, missing: Vec<String> },
}

/// Parses a ground-truth document. `path` is only used in error messages.
pub fn parse_ground_truth(text: &str, path: &Path) -> Result<Vec<GroundTruthEntry>, CorpusError> {
    let records: Vec<GroundTruthRecord> = serde_json::from_str(text).map_err(|e| {
        let (line, column, message) = (e.line(), e.column(), e.to_string());
        if e.is_data() {
            CorpusError::Schema {
                path: path.to_path_buf(),
                line,
                column,
                message,
            }
        } else {
            CorpusError::Parse {
                path: path.to_path_buf(),
                line,
                column,
                message,
            }
        }
    })?;
    let mut entries = Vec::with_capacity(records.len());
    for (index, record) in records.into_iter().enumerate() {
        let entry = GroundTruthEntry::from(record);
        let invalid = |message: String| CorpusError::Validation {
            path: path.to_path_buf(),
            message: format!("entry {index} ({}): {message}", entry.site),
        };
        if entry.types.is_empty() {
            return Err(invalid("empty type list".into()));
        }
        entry.site.check().map_err(|e| invalid(e.to_string()))?;
        for ty in &entry.types {
            if let Err(e) = parse_type_expr(ty) {
                return Err(invalid(e.to_string()));
            }
        }
        entries.push(entry);
    }
    Ok(entries)
}

/// Serializes ground truth in the on-disk format (pretty-printed, LF).
pub fn ground_truth_to_json(entries: &[GroundTruthEntry]) -> String {
    let records: Vec<GroundTruthRecord> = entries.iter().map(GroundTruthRecord::from).collect();
    let mut text = serde_json::to_string_pretty(&records).expect("ground truth serializes");
    text.push('\n');
    text
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snippet {
    pub category: Category,
    pub name: String,
    /// Directory holding the snippet's code and ground truth.
    pub dir: PathBuf,
    pub source_path: PathBuf,
    pub ground_truth: Vec<GroundTruthEntry>,
}

impl Snippet {
    /// `category/name`, the identifier used across the pipeline.
    pub fn id(&self) -> String {
        format!("{}/{}", self.category, self.name)
    }
}

/// Loaded corpus. Immutable once built; snippets are kept in
/// (category, name) order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    root: PathBuf,
    categories: BTreeMap<Category, Vec<Snippet>>,
}

impl Corpus {
    /// Assembles a corpus from in-memory snippets, without checking that
    /// every category is present.
    pub fn from_snippets(root: impl Into<PathBuf>, snippets: Vec<Snippet>) -> Self {
        let mut categories: BTreeMap<Category, Vec<Snippet>> = BTreeMap::new();
        for snippet in snippets {
            categories
                .entry(snippet.category)
                .or_default()
                .push(snippet);
        }
        for list in categories.values_mut() {
            list.sort_by(|a, b| a.name.cmp(&b.name));
        }
        Corpus {
            root: root.into(),
            categories,
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn categories(&self) -> impl Iterator<Item = (Category, &[Snippet])> {
        self.categories.iter().map(|(c, s)| (*c, s.as_slice()))
    }

    pub fn category(&self, category: Category) -> &[Snippet] {
        self.categories
            .get(&category)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn snippets(&self) -> impl Iterator<Item = &Snippet> {
        self.categories.values().flatten()
    }

    pub fn snippet(&self, id: &str) -> Option<&Snippet> {
        let (category, name) = id.split_once('/')?;
        let category: Category = category.parse().ok()?;
        self.category(category).iter().find(|s| s.name == name)
    }

    pub fn len(&self) -> usize {
        self.categories.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes every snippet's ground truth (and a copy of its source, when
    /// the source exists) under `root` in the on-disk layout.
    pub fn write_to(&self, root: &Path) -> std::io::Result<()> {
        for snippet in self.snippets() {
            let dir = root.join(snippet.category.as_str()).join(&snippet.name);
            fs::create_dir_all(&dir)?;
            if snippet.source_path.is_file() {
                fs::copy(&snippet.source_path, dir.join(SOURCE_FILE))?;
            } else {
                fs::write(dir.join(SOURCE_FILE), "")?;
            }
            fs::write(
                dir.join(GROUND_TRUTH_FILE),
                ground_truth_to_json(&snippet.ground_truth),
            )?;
        }
        for category in Category::ALL {
            fs::create_dir_all(root.join(category.as_str()))?;
        }
        Ok(())
    }
}

fn sorted_subdirs(path: &Path) -> Result<Vec<(String, PathBuf)>, CorpusError> {
    let io = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut dirs = Vec::new();
    for entry in fs::read_dir(path).map_err(io)? {
        let entry = entry.map_err(io)?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') || name == "__pycache__" {
            continue;
        }
        if entry.file_type().map_err(io)?.is_dir() {
            dirs.push((name, entry.path()));
        }
    }
    dirs.sort();
    Ok(dirs)
}

/// Loads and validates a corpus directory.
pub fn load_corpus(root: &Path) -> Result<Corpus, CorpusError> {
    if !root.is_dir() {
        return Err(CorpusError::Validation {
            path: root.to_path_buf(),
            message: "corpus root is not a directory".into(),
        });
    }
    let mut snippets = Vec::new();
    let mut seen = BTreeSet::new();
    for (name, dir) in sorted_subdirs(root)? {
        let category: Category = name.parse().map_err(|_| CorpusError::UnknownCategory {
            path: dir.clone(),
            name: name.clone(),
        })?;
        seen.insert(category);
        for (snippet_name, snippet_dir) in sorted_subdirs(&dir)? {
            snippets.push(load_snippet(category, snippet_name, snippet_dir)?);
        }
    }
    let missing: Vec<String> = Category::ALL
        .iter()
        .filter(|c| !seen.contains(c))
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(CorpusError::MissingCategories {
            path: root.to_path_buf(),
            missing,
        });
    }
    Ok(Corpus::from_snippets(root, snippets))
}

fn load_snippet(category: Category, name: String, dir: PathBuf) -> Result<Snippet, CorpusError> {
    let source_path = dir.join(SOURCE_FILE);
    if !source_path.is_file() {
        return Err(CorpusError::Validation {
            path: dir,
            message: format!("snippet has no {SOURCE_FILE}"),
        });
    }
    let gt_path = dir.join(GROUND_TRUTH_FILE);
    let text = fs::read_to_string(&gt_path).map_err(|source| CorpusError::Io {
        path: gt_path.clone(),
        source,
    })?;
    let ground_truth = parse_ground_truth(&text, &gt_path)?;
    Ok(Snippet {
        category,
        name,
        dir,
        source_path,
        ground_truth,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryStats {
    pub snippets: usize,
    pub annotations: KindCounts,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub snippets: usize,
    pub annotations: KindCounts,
    pub categories: BTreeMap<Category, CategoryStats>,
}

/// Snippet and annotation counts per category and overall.
pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut stats = CorpusStats::default();
    for (category, snippets) in corpus.categories() {
        let cat = stats.categories.entry(category).or_default();
        cat.snippets += snippets.len();
        for entry in snippets.iter().flat_map(|s| &s.ground_truth) {
            if let Ok(kind) = classify_site(entry) {
                cat.annotations.add(kind);
            }
        }
        stats.snippets += cat.snippets;
        stats.annotations.merge(&cat.annotations);
    }
    stats
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    AnyType,
    DuplicateSite,
    DanglingFile,
    NonCanonicalType {
        given: String,
        canonical: Vec<String>,
    },
    InvalidSite(SiteError),
    EmptyTypes,
}

/// A ground-truth problem reported by [`validate_ground_truth`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub snippet: String,
    pub site: AnnotationSite,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: ", self.snippet, self.site)?;
        match &self.kind {
            ViolationKind::AnyType => f.write_str(
                "`Any` is not a valid ground-truth type; list the concrete runtime types instead",
            ),
            ViolationKind::DuplicateSite => f.write_str("duplicate annotation site"),
            ViolationKind::DanglingFile => {
                write!(f, "file `{}` does not exist in the snippet", self.site.file)
            }
            ViolationKind::NonCanonicalType { given, canonical } => write!(
                f,
                "type `{given}` is not canonical (expected {})",
                canonical.join(", ")
            ),
            ViolationKind::InvalidSite(e) => write!(f, "invalid site: {e}"),
            ViolationKind::EmptyTypes => f.write_str("empty type list"),
        }
    }
}

/// Lists every ground-truth problem in the corpus. An empty result means
/// the corpus is clean.
pub fn validate_ground_truth(corpus: &Corpus, normalizer: &TypeNormalizer) -> Vec<Violation> {
    let mut violations = Vec::new();
    for snippet in corpus.snippets() {
        let mut sites = BTreeSet::new();
        for entry in &snippet.ground_truth {
            let mut report = |kind| {
                violations.push(Violation {
                    snippet: snippet.id(),
                    site: entry.site.clone(),
                    kind,
                })
            };
            if !sites.insert(&entry.site) {
                report(ViolationKind::DuplicateSite);
            }
            if let Err(e) = entry.site.check() {
                report(ViolationKind::InvalidSite(e));
            }
            if !snippet.dir.join(&entry.site.file).is_file() {
                report(ViolationKind::DanglingFile);
            }
            if entry.types.is_empty() {
                report(ViolationKind::EmptyTypes);
            }
            for ty in &entry.types {
                let canonical = normalizer.decompose(ty).ok();
                if canonical
                    .as_ref()
                    .is_some_and(|set| set.iter().any(|t| t.is_any()))
                {
                    report(ViolationKind::AnyType);
                } else if !normalizer.is_canonical_name(ty) {
                    report(ViolationKind::NonCanonicalType {
                        given: ty.clone(),
                        canonical: canonical
                            .map(|set| set.iter().map(|t| t.to_string()).collect())
                            .unwrap_or_default(),
                    });
                }
            }
        }
    }
    violations
}
