//! The `typebench` command line.
//!
//! Stage artifacts live under the output directory so each stage can be
//! re-run on its own:
//!
//! ```text
//! <out>/run/records.json                   run records for every tool
//! <out>/run/<tool>/<category>/<snippet>/   raw output and logs
//! <out>/translate/<tool>.json              normalized predictions
//! <out>/analyze/results.json               metrics
//! <out>/report.{md,csv,json}
//! ```

use std::borrow::Cow;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use clap::{Args, Parser, Subcommand};
use log::info;
use serde::Deserialize;

use crate::analyzer::{analyze_tool, MetricsReport};
use crate::corpus::{corpus_stats, load_corpus, validate_ground_truth, Corpus, CorpusProfile};
use crate::report::{emit_results_json, parse_results_json, write_reports, ReportFormat};
use crate::runner::{
    check_tool, load_adapters, read_records, run_tool_on_corpus, summarize_runs, write_records,
    RunOptions, RunRecord, RunnerError, ToolAdapterSpec,
};
use crate::translator::{translate_records, PredictionSet, TranslatorRegistry};
use crate::typeexpr::TypeNormalizer;

pub const ORACLE_ENV: &str = "TYPEBENCH_ORACLE";

#[derive(Debug, Parser)]
#[command(
    name = "typebench",
    version,
    about = "Benchmark harness for type inference tools"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Check the corpus and its ground truth.
    Validate(CommonArgs),
    /// Execute every tool over the corpus.
    Run(CommonArgs),
    /// Convert raw tool output into predictions.
    Translate(CommonArgs),
    /// Score predictions against the ground truth.
    Analyze(CommonArgs),
    /// Render reports from analysis results.
    Report(CommonArgs),
    /// All stages in order.
    Bench(CommonArgs),
    /// Trace a snippet with the runtime oracle.
    Trace(TraceArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// JSON config; its relative paths are resolved against its directory.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// JSON array of tool adapters.
    #[arg(long)]
    pub adapters: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub top_n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub format: Option<Vec<String>>,
    /// Extra alias table merged over the built-in one.
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    /// Corpus profile to enforce: `seed` or `full`.
    #[arg(long)]
    pub profile: Option<String>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    /// Snippet directory (or corpus root) to trace.
    pub path: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, conflicts_with = "write")]
    pub verify: bool,
    #[arg(long)]
    pub write: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    corpus: Option<PathBuf>,
    adapters: Option<PathBuf>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    top_n: Option<Vec<usize>>,
    formats: Option<Vec<String>>,
    aliases: Option<PathBuf>,
    container_runtime: Option<String>,
    profile: Option<String>,
}

/// Settings after merging the config file with command-line flags.
#[derive(Debug, Clone, PartialEq)]
pub struct HarnessConfig {
    pub corpus: PathBuf,
    pub adapters: Option<PathBuf>,
    pub out: PathBuf,
    pub jobs: usize,
    pub top_n: Vec<usize>,
    pub formats: Vec<ReportFormat>,
    pub aliases: Option<PathBuf>,
    pub container_runtime: Option<String>,
    pub profile: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Validate,
    Run,
    Translate,
    Analyze,
    Report,
    Trace,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Validate => "validate",
            Stage::Run => "run",
            Stage::Translate => "translate",
            Stage::Analyze => "analyze",
            Stage::Report => "report",
            Stage::Trace => "trace",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    Validation = 1,
    ToolExecution = 2,
    Internal = 3,
}

#[derive(Debug)]
pub struct PipelineError {
    pub stage: Stage,
    pub tool: Option<String>,
    pub failure: Failure,
    pub message: String,
}

impl PipelineError {
    fn new(stage: Stage, failure: Failure, message: impl fmt::Display) -> Self {
        PipelineError {
            stage,
            tool: None,
            failure,
            message: message.to_string(),
        }
    }

    fn tool(mut self, tool: &str) -> Self {
        self.tool = Some(tool.to_string());
        self
    }

    pub fn exit_code(&self) -> u8 {
        self.failure as u8
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {}", self.stage)?;
        if let Some(tool) = &self.tool {
            write!(f, ", tool {tool}")?;
        }
        write!(f, ": {}", self.message)
    }
}

type Result<T> = std::result::Result<T, PipelineError>;

fn config_error(message: impl fmt::Display) -> PipelineError {
    PipelineError::new(Stage::Config, Failure::Validation, message)
}

fn relative_to(base: &Path, path: PathBuf) -> PathBuf {
    if path.is_absolute() {
        path
    } else {
        base.join(path)
    }
}

impl HarnessConfig {
    pub fn from_args(args: &CommonArgs) -> Result<Self> {
        let (file, base) = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| config_error(format!("{}: {e}", path.display())))?;
                let file: ConfigFile = serde_json::from_str(&text)
                    .map_err(|e| config_error(format!("{}: {e}", path.display())))?;
                let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (file, base)
            }
            None => (ConfigFile::default(), PathBuf::new()),
        };
        let from_file = |p: Option<PathBuf>| p.map(|p| relative_to(&base, p));
        let formats: Vec<String> = args
            .format
            .clone()
            .or(file.formats)
            .unwrap_or_else(|| vec!["md".into(), "csv".into(), "json".into()]);
        let formats = formats
            .iter()
            .map(|f| f.parse::<ReportFormat>().map_err(config_error))
            .collect::<Result<Vec<_>>>()?;
        let config = HarnessConfig {
            corpus: args
                .corpus
                .clone()
                .or(from_file(file.corpus))
                .unwrap_or_else(|| PathBuf::from("corpus")),
            adapters: args.adapters.clone().or(from_file(file.adapters)),
            out: args
                .out
                .clone()
                .or(from_file(file.out))
                .unwrap_or_else(|| PathBuf::from("typebench-out")),
            jobs: args.jobs.or(file.jobs).unwrap_or(1),
            top_n: args
                .top_n
                .clone()
                .or(file.top_n)
                .unwrap_or_else(|| vec![1, 3, 5]),
            formats,
            aliases: args.aliases.clone().or(from_file(file.aliases)),
            container_runtime: file.container_runtime,
            profile: args.profile.clone().or(file.profile),
        };
        if config.jobs < 1 {
            return Err(config_error("jobs must be at least 1"));
        }
        if let Some(n) = config.top_n.iter().find(|&&n| n < 1) {
            return Err(config_error(format!(
                "top-n values must be at least 1, got {n}"
            )));
        }
        if let Some(name) = &config.profile {
            if CorpusProfile::by_name(name).is_none() {
                return Err(config_error(format!(
                    "unknown profile `{name}` (expected seed or full)"
                )));
            }
        }
        Ok(config)
    }

    fn run_dir(&self) -> PathBuf {
        self.out.join("run")
    }

    fn translate_dir(&self) -> PathBuf {
        self.out.join("translate")
    }

    fn results_path(&self) -> PathBuf {
        self.out.join("analyze").join("results.json")
    }
}

/// Loaded inputs shared by the stages.
struct Session {
    config: HarnessConfig,
    normalizer: Cow<'static, TypeNormalizer>,
}

impl Session {
    fn new(config: HarnessConfig) -> Result<Self> {
        let normalizer = match &config.aliases {
            None => Cow::Borrowed(TypeNormalizer::builtin()),
            Some(path) => {
                let mut n = TypeNormalizer::builtin().clone();
                n.extend_from_file(path).map_err(config_error)?;
                Cow::Owned(n)
            }
        };
        Ok(Session { config, normalizer })
    }

    fn corpus(&self) -> Result<Corpus> {
        load_corpus(&self.config.corpus)
            .map_err(|e| PipelineError::new(Stage::Validate, Failure::Validation, e))
    }

    fn adapters(&self) -> Result<Vec<ToolAdapterSpec>> {
        let path = self.config.adapters.as_ref().ok_or_else(|| {
            config_error("no adapters file given (--adapters or config `adapters`)")
        })?;
        let mut specs = load_adapters(path).map_err(config_error)?;
        // Relative program paths are relative to the adapters file.
        let base = path.parent().unwrap_or(Path::new(""));
        for spec in &mut specs {
            let program = Path::new(&spec.invocation[0]);
            if spec.mode == crate::runner::AdapterMode::Command
                && program.is_relative()
                && spec.invocation[0].contains('/')
            {
                spec.invocation[0] = base.join(program).display().to_string();
            }
        }
        let registry = TranslatorRegistry::default();
        if let Some(spec) = specs.iter().find(|s| !registry.contains(&s.translator_id)) {
            return Err(config_error(format!(
                "adapter `{}` names unknown translator `{}`",
                spec.name, spec.translator_id
            ))
            .tool(&spec.name));
        }
        Ok(specs)
    }

    fn run_options(&self) -> RunOptions {
        RunOptions {
            out_dir: self.config.run_dir(),
            jobs: self.config.jobs,
            container_runtime: self.config.container_runtime.clone(),
        }
    }
}

fn io_failure(stage: Stage, path: &Path, e: impl fmt::Display) -> PipelineError {
    PipelineError::new(stage, Failure::Internal, format!("{}: {e}", path.display()))
}

fn validate_stage(session: &Session) -> Result<Corpus> {
    let corpus = session.corpus()?;
    let violations = validate_ground_truth(&corpus, &session.normalizer);
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(PipelineError::new(
            Stage::Validate,
            Failure::Validation,
            format!(
                "{} ground-truth problems:\n  {}",
                lines.len(),
                lines.join("\n  ")
            ),
        ));
    }
    let stats = corpus_stats(&corpus);
    if let Some(name) = &session.config.profile {
        let profile = CorpusProfile::by_name(name).expect("profile checked at startup");
        let problems = profile.check(&stats);
        if !problems.is_empty() {
            return Err(PipelineError::new(
                Stage::Validate,
                Failure::Validation,
                format!(
                    "corpus does not match profile `{name}`:\n  {}",
                    problems.join("\n  ")
                ),
            ));
        }
    }
    println!(
        "corpus {}: {} snippets, {} annotations (FR {}, FP {}, LV {})",
        corpus.root().display(),
        stats.snippets,
        stats.annotations.total,
        stats.annotations.fr,
        stats.annotations.fp,
        stats.annotations.lv
    );
    Ok(corpus)
}

fn runner_failure(stage: Stage, spec: &ToolAdapterSpec, e: RunnerError) -> PipelineError {
    let failure = match &e {
        e if e.is_config() => Failure::Validation,
        RunnerError::ToolUnavailable { .. } => Failure::ToolExecution,
        _ => Failure::Internal,
    };
    PipelineError::new(stage, failure, e).tool(&spec.name)
}

fn run_stage(
    session: &Session,
    corpus: &Corpus,
    specs: &[ToolAdapterSpec],
) -> Result<Vec<RunRecord>> {
    let opts = session.run_options();
    // Every tool must be startable before any snippet runs.
    for spec in specs {
        check_tool(spec, &opts).map_err(|e| runner_failure(Stage::Run, spec, e))?;
    }
    let mut records = Vec::new();
    for spec in specs {
        records.extend(
            run_tool_on_corpus(spec, corpus, &opts)
                .map_err(|e| runner_failure(Stage::Run, spec, e))?,
        );
    }
    let path = opts.out_dir.join("records.json");
    write_records(&path, &records).map_err(|e| io_failure(Stage::Run, &path, e))?;
    for (tool, counts) in summarize_runs(&records) {
        let parts: Vec<String> = counts.iter().map(|(s, n)| format!("{s} {n}")).collect();
        println!("run {tool}: {}", parts.join(", "));
    }
    Ok(records)
}

fn prediction_path(session: &Session, tool: &str) -> PathBuf {
    session.config.translate_dir().join(format!("{tool}.json"))
}

fn translate_stage(
    session: &Session,
    specs: &[ToolAdapterSpec],
    records: &[RunRecord],
) -> Result<Vec<PredictionSet>> {
    let registry = TranslatorRegistry::default();
    let dir = session.config.translate_dir();
    fs::create_dir_all(&dir).map_err(|e| io_failure(Stage::Translate, &dir, e))?;
    let mut sets = Vec::new();
    for spec in specs {
        let own: Vec<RunRecord> = records
            .iter()
            .filter(|r| r.tool == spec.name)
            .cloned()
            .collect();
        if own.is_empty() {
            return Err(PipelineError::new(
                Stage::Translate,
                Failure::Validation,
                "no run records; run the `run` stage first",
            )
            .tool(&spec.name));
        }
        let set = translate_records(
            &registry,
            &spec.translator_id,
            &spec.name,
            spec.ranked,
            &own,
            &session.config.run_dir(),
            &session.normalizer,
        )
        .map_err(|e| {
            PipelineError::new(Stage::Translate, Failure::Validation, e).tool(&spec.name)
        })?;
        let path = prediction_path(session, &spec.name);
        let text = serde_json::to_string_pretty(&set).expect("predictions serialize") + "\n";
        fs::write(&path, text).map_err(|e| io_failure(Stage::Translate, &path, e))?;
        sets.push(set);
    }
    Ok(sets)
}

fn load_prediction_sets(
    session: &Session,
    specs: &[ToolAdapterSpec],
) -> Result<Vec<PredictionSet>> {
    specs
        .iter()
        .map(|spec| {
            let path = prediction_path(session, &spec.name);
            let fail = |e: &dyn fmt::Display| {
                PipelineError::new(
                    Stage::Analyze,
                    Failure::Validation,
                    format!("{}: {e}", path.display()),
                )
                .tool(&spec.name)
            };
            let text = fs::read_to_string(&path).map_err(|e| fail(&e))?;
            serde_json::from_str(&text).map_err(|e| fail(&e))
        })
        .collect()
}

fn analyze_stage(
    session: &Session,
    corpus: &Corpus,
    sets: &[PredictionSet],
) -> Result<Vec<MetricsReport>> {
    let mut reports = Vec::new();
    for set in sets {
        let report = analyze_tool(corpus, set, &session.normalizer, &session.config.top_n)
            .map_err(|e| {
                PipelineError::new(Stage::Analyze, Failure::Validation, e).tool(&set.tool)
            })?;
        println!(
            "analyze {}: exact {}/{}, sound {}/{}, complete {}/{}",
            report.tool,
            report.totals.exact.total,
            report.totals.annotations.total,
            report.sound,
            report.snippet_count,
            report.complete,
            report.snippet_count
        );
        reports.push(report);
    }
    let path = session.config.results_path();
    fs::create_dir_all(path.parent().expect("results path has a parent"))
        .map_err(|e| io_failure(Stage::Analyze, &path, e))?;
    fs::write(&path, emit_results_json(&reports))
        .map_err(|e| io_failure(Stage::Analyze, &path, e))?;
    Ok(reports)
}

fn report_stage(session: &Session, reports: &[MetricsReport]) -> Result<()> {
    let written = write_reports(&session.config.out, &session.config.formats, reports)
        .map_err(|e| PipelineError::new(Stage::Report, Failure::Internal, e))?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn load_results(session: &Session) -> Result<Vec<MetricsReport>> {
    let path = session.config.results_path();
    let fail = |e: &dyn fmt::Display| {
        PipelineError::new(
            Stage::Report,
            Failure::Validation,
            format!("{}: {e}", path.display()),
        )
    };
    let text = fs::read_to_string(&path).map_err(|e| fail(&e))?;
    parse_results_json(&text).map_err(|e| fail(&e))
}

fn load_run_records(session: &Session) -> Result<Vec<RunRecord>> {
    let path = session.config.run_dir().join("records.json");
    read_records(&path).map_err(|e| PipelineError::new(Stage::Translate, Failure::Validation, e))
}

/// Locates the oracle: `TYPEBENCH_ORACLE`, else `oracle` on `PATH`.
pub fn find_oracle() -> Option<PathBuf> {
    match std::env::var_os(ORACLE_ENV) {
        Some(path) if !path.is_empty() => {
            let path = PathBuf::from(path);
            path.is_file().then_some(path)
        }
        _ => which::which("oracle").ok(),
    }
}

fn trace(args: &TraceArgs) -> Result<()> {
    let oracle = find_oracle().ok_or_else(|| {
        PipelineError::new(
            Stage::Trace,
            Failure::ToolExecution,
            format!("runtime oracle not found; set {ORACLE_ENV} or put `oracle` on PATH"),
        )
    })?;
    let mut command = Command::new(&oracle);
    command.arg("trace").arg(&args.path);
    if let Some(out) = &args.out {
        command.arg("--out").arg(out);
    }
    if args.verify {
        command.arg("--verify");
    }
    if args.write {
        command.arg("--write");
    }
    info!("{command:?}");
    let status = command.status().map_err(|e| {
        PipelineError::new(
            Stage::Trace,
            Failure::ToolExecution,
            format!("cannot run {}: {e}", oracle.display()),
        )
    })?;
    if !status.success() {
        return Err(PipelineError::new(
            Stage::Trace,
            Failure::Validation,
            format!("oracle reported problems ({status})"),
        ));
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    let args = match &cli.command {
        Cmd::Trace(t) => return trace(t),
        Cmd::Validate(a)
        | Cmd::Run(a)
        | Cmd::Translate(a)
        | Cmd::Analyze(a)
        | Cmd::Report(a)
        | Cmd::Bench(a) => a,
    };
    let session = Session::new(HarnessConfig::from_args(args)?)?;
    match &cli.command {
        Cmd::Validate(_) => validate_stage(&session).map(drop),
        Cmd::Run(_) => {
            let specs = session.adapters()?;
            let corpus = validate_stage(&session)?;
            run_stage(&session, &corpus, &specs).map(drop)
        }
        Cmd::Translate(_) => {
            let specs = session.adapters()?;
            let records = load_run_records(&session)?;
            translate_stage(&session, &specs, &records).map(drop)
        }
        Cmd::Analyze(_) => {
            let specs = session.adapters()?;
            let corpus = validate_stage(&session)?;
            let sets = load_prediction_sets(&session, &specs)?;
            analyze_stage(&session, &corpus, &sets).map(drop)
        }
        Cmd::Report(_) => report_stage(&session, &load_results(&session)?),
        Cmd::Bench(_) => {
            let specs = session.adapters()?;
            let corpus = validate_stage(&session)?;
            let records = run_stage(&session, &corpus, &specs)?;
            let sets = translate_stage(&session, &specs, &records)?;
            let reports = analyze_stage(&session, &corpus, &sets)?;
            report_stage(&session, &reports)
        }
        Cmd::Trace(_) => unreachable!(),
    }
}

/// Runs the command line and maps failures to exit codes: 1 for
/// validation or configuration problems, 2 for tools that cannot be
/// executed, 3 for internal errors.
pub fn main_with(cli: Cli) -> ExitCode {
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("typebench: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_paths_are_relative_to_the_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        fs::write(
            &path,
            r#"{"corpus": "c", "adapters": "/abs/a.json", "top_n": [1, 2], "formats": ["md"]}"#,
        )
        .unwrap();
        let config = HarnessConfig::from_args(&CommonArgs {
            config: Some(path),
            jobs: Some(4),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(config.corpus, dir.path().join("c"));
        assert_eq!(config.adapters, Some(PathBuf::from("/abs/a.json")));
        assert_eq!(config.jobs, 4);
        assert_eq!(config.top_n, [1, 2]);
        assert_eq!(config.formats, [ReportFormat::Markdown]);
    }

    #[test]
    fn flags_override_config() {
        let config = HarnessConfig::from_args(&CommonArgs {
            corpus: Some("x".into()),
            format: Some(vec!["csv".into()]),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(config.corpus, PathBuf::from("x"));
        assert_eq!(config.top_n, [1, 3, 5]);
        assert_eq!(config.formats, [ReportFormat::Csv]);
    }

    #[test]
    fn bad_settings_are_validation_failures() {
        for args in [
            CommonArgs {
                jobs: Some(0),
                ..Default::default()
            },
            CommonArgs {
                top_n: Some(vec![0]),
                ..Default::default()
            },
            CommonArgs {
                format: Some(vec!["pdf".into()]),
                ..Default::default()
            },
            CommonArgs {
                profile: Some("huge".into()),
                ..Default::default()
            },
            CommonArgs {
                config: Some("/no/such/config.json".into()),
                ..Default::default()
            },
        ] {
            let err = HarnessConfig::from_args(&args).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{err}");
        }
    }

    #[test]
    fn error_messages_name_stage_and_tool() {
        let e = PipelineError::new(Stage::Run, Failure::ToolExecution, "boom").tool("sniffer");
        assert_eq!(e.to_string(), "stage run, tool sniffer: boom");
        assert_eq!(e.exit_code(), 2);
    }
}
