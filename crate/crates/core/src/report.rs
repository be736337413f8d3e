//! Rendering metrics as Markdown tables, CSV, and JSON.
//!
//! Rendering is a pure function of the [`MetricsReport`]s: the only
//! arithmetic is the floor percentage. Tools appear in descending order of
//! total exact matches, ties broken by name.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analyzer::{format_percentage, MetricsReport};
use crate::corpus::{AnnotationKind, Category};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("reports disagree: {0}")]
    Consistency(String),
    #[error("no tool reports to render")]
    Empty,
    #[error("unknown report format `{0}` (expected md, csv, or json)")]
    UnknownFormat(String),
    #[error("results document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported results schema version {0}")]
    SchemaVersion(u32),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ReportFormat {
    Markdown,
    Csv,
    Json,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 3] = [
        ReportFormat::Markdown,
        ReportFormat::Csv,
        ReportFormat::Json,
    ];

    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Markdown => "md",
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportDocument {
    pub format: ReportFormat,
    pub body: Vec<u8>,
}

/// Tools best first.
pub fn rank_tools(reports: &[MetricsReport]) -> Vec<&MetricsReport> {
    let mut ranked: Vec<&MetricsReport> = reports.iter().collect();
    ranked.sort_by(|a, b| {
        b.totals
            .exact
            .total
            .cmp(&a.totals.exact.total)
            .then_with(|| a.tool.cmp(&b.tool))
    });
    ranked
}

fn check_consistent(reports: &[MetricsReport]) -> Result<(), ReportError> {
    let Some(first) = reports.first() else {
        return Err(ReportError::Empty);
    };
    for other in &reports[1..] {
        let same_shape = first.categories.len() == other.categories.len()
            && first
                .categories
                .iter()
                .zip(&other.categories)
                .all(|((c1, m1), (c2, m2))| c1 == c2 && m1.annotations == m2.annotations);
        if !same_shape || first.snippet_count != other.snippet_count {
            return Err(ReportError::Consistency(format!(
                "`{}` and `{}` were scored on different corpora",
                first.tool, other.tool
            )));
        }
    }
    Ok(())
}

fn row(out: &mut String, cells: &[String]) {
    out.push('|');
    for cell in cells {
        out.push(' ');
        out.push_str(cell);
        out.push_str(" |");
    }
    out.push('\n');
}

fn fraction(numer: usize, denom: usize) -> String {
    match format_percentage(numer, denom) {
        Ok(pct) => format!("{numer}/{denom} ({pct}%)"),
        Err(_) => format!("{numer}/{denom}"),
    }
}

/// Exact matches per category and kind, with sound and complete counts.
pub fn render_category_table(reports: &[MetricsReport]) -> Result<String, ReportError> {
    check_consistent(reports)?;
    let tools = rank_tools(reports);
    let first = tools[0];
    let mut out = String::new();
    let mut header = vec!["Category".to_string()];
    for prefix in std::iter::once("Annotations").chain(tools.iter().map(|t| t.tool.as_str())) {
        for kind in AnnotationKind::ALL {
            header.push(format!("{prefix} {kind}"));
        }
    }
    row(&mut out, &header);
    let mut rule = vec!["---".to_string()];
    rule.extend(std::iter::repeat_n("---:".to_string(), header.len() - 1));
    row(&mut out, &rule);

    for (category, gt) in &first.categories {
        let mut cells = vec![category.to_string()];
        cells.extend(AnnotationKind::ALL.map(|k| gt.annotations.get(k).to_string()));
        for tool in &tools {
            let exact = &tool.categories[category].exact;
            cells.extend(AnnotationKind::ALL.map(|k| exact.get(k).to_string()));
        }
        row(&mut out, &cells);
    }

    let annotations = &first.totals.annotations;
    let mut total = vec!["**Total**".to_string()];
    total.extend(AnnotationKind::ALL.map(|k| annotations.get(k).to_string()));
    let blank = || vec![String::new(); 2];
    let mut exact = vec!["**Exact**".to_string(), annotations.total.to_string()];
    exact.extend(blank());
    let mut sound = vec!["**Sound**".to_string(), first.snippet_count.to_string()];
    sound.extend(blank());
    let mut complete = sound.clone();
    complete[0] = "**Complete**".to_string();
    for tool in &tools {
        total.extend(AnnotationKind::ALL.map(|k| tool.totals.exact.get(k).to_string()));
        exact.push(fraction(tool.totals.exact.total, annotations.total));
        exact.extend(blank());
        sound.push(format!("{}/{}", tool.sound, tool.snippet_count));
        sound.extend(blank());
        complete.push(format!("{}/{}", tool.complete, tool.snippet_count));
        complete.extend(blank());
    }
    for cells in [total, exact, sound, complete] {
        row(&mut out, &cells);
    }
    Ok(out)
}

/// Top-n exact matches per tool. Unranked tools get a single n = 1 row,
/// which is their exact-match count.
pub fn render_top_n_table(reports: &[MetricsReport]) -> String {
    let mut out = String::new();
    row(
        &mut out,
        &["Tool", "n", "FR", "FP", "LV", "Total"].map(String::from),
    );
    row(
        &mut out,
        &["---", "---:", "---:", "---:", "---:", "---:"].map(String::from),
    );
    for tool in rank_tools(reports) {
        let rows: Vec<(usize, &crate::corpus::KindCounts)> = if tool.ranked {
            tool.top_n.iter().map(|r| (r.n, &r.matches)).collect()
        } else {
            vec![(1, &tool.totals.exact)]
        };
        for (n, counts) in rows {
            let mut cells = vec![tool.tool.clone(), n.to_string()];
            cells.extend(AnnotationKind::ALL.map(|k| counts.get(k).to_string()));
            cells.push(counts.total.to_string());
            row(&mut out, &cells);
        }
    }
    out
}

fn ratio(value: Option<f64>) -> String {
    value.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3}"))
}

pub fn render_summary_table(reports: &[MetricsReport]) -> String {
    let mut out = String::new();
    row(
        &mut out,
        &[
            "Tool",
            "Precision",
            "Recall",
            "Sound",
            "Complete",
            "No output",
            "Ignored predictions",
        ]
        .map(String::from),
    );
    row(
        &mut out,
        &["---", "---:", "---:", "---:", "---:", "---:", "---:"].map(String::from),
    );
    for tool in rank_tools(reports) {
        row(
            &mut out,
            &[
                tool.tool.clone(),
                ratio(tool.precision_recall.precision),
                ratio(tool.precision_recall.recall),
                format!("{}/{}", tool.sound, tool.snippet_count),
                format!("{}/{}", tool.complete, tool.snippet_count),
                format!("{}/{}", tool.no_output, tool.snippet_count),
                tool.ignored_predictions.to_string(),
            ],
        );
    }
    out
}

pub fn render_markdown(reports: &[MetricsReport]) -> Result<String, ReportError> {
    let mut out = String::from("# Type inference benchmark\n\n## Exact matches by category\n\n");
    out.push_str(&render_category_table(reports)?);
    out.push_str("\n## Top-n exact matches\n\n");
    out.push_str(&render_top_n_table(reports));
    out.push_str("\n## Summary\n\n");
    out.push_str(&render_summary_table(reports));
    Ok(out)
}

/// One row per category, tool, and kind, followed by `total` rows.
pub fn render_csv(reports: &[MetricsReport]) -> Result<String, ReportError> {
    check_consistent(reports)?;
    let tools = rank_tools(reports);
    let mut out = String::from("category,tool,kind,exact,annotations\n");
    let categories: Vec<Category> = tools[0].categories.keys().copied().collect();
    for category in &categories {
        for tool in &tools {
            let metrics = &tool.categories[category];
            for kind in AnnotationKind::ALL {
                let _ = writeln!(
                    out,
                    "{category},{},{kind},{},{}",
                    tool.tool,
                    metrics.exact.get(kind),
                    metrics.annotations.get(kind)
                );
            }
        }
    }
    for tool in &tools {
        for kind in AnnotationKind::ALL {
            let _ = writeln!(
                out,
                "total,{},{kind},{},{}",
                tool.tool,
                tool.totals.exact.get(kind),
                tool.totals.annotations.get(kind)
            );
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct ResultsDocument {
    schema_version: u32,
    tools: Vec<MetricsReport>,
}

/// Compact JSON results document.
pub fn emit_results_json(reports: &[MetricsReport]) -> String {
    let doc = ResultsDocument {
        schema_version: SCHEMA_VERSION,
        tools: rank_tools(reports).into_iter().cloned().collect(),
    };
    serde_json::to_string(&doc).expect("metrics serialize")
}

pub fn parse_results_json(text: &str) -> Result<Vec<MetricsReport>, ReportError> {
    let doc: ResultsDocument = serde_json::from_str(text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(ReportError::SchemaVersion(doc.schema_version));
    }
    Ok(doc.tools)
}

pub fn render(
    format: ReportFormat,
    reports: &[MetricsReport],
) -> Result<ReportDocument, ReportError> {
    let body = match format {
        ReportFormat::Markdown => render_markdown(reports)?,
        ReportFormat::Csv => render_csv(reports)?,
        ReportFormat::Json => emit_results_json(reports),
    };
    Ok(ReportDocument {
        format,
        body: body.into_bytes(),
    })
}

/// Writes `<out>/report.<ext>` for each format and returns the paths.
pub fn write_reports(
    out: &Path,
    formats: &[ReportFormat],
    reports: &[MetricsReport],
) -> Result<Vec<PathBuf>, ReportError> {
    fs::create_dir_all(out).map_err(|source| ReportError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for &format in formats {
        let doc = render(format, reports)?;
        let path = out.join(format!("report.{}", format.extension()));
        fs::write(&path, &doc.body).map_err(|source| ReportError::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
