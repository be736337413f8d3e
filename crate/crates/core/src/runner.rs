//! Executing inference tools over a corpus.
//!
//! Each tool is described by a [`ToolAdapterSpec`]. The runner gives the
//! tool a read-only copy of each snippet, captures whatever it writes to
//! `{output_file}` along with its stdout and stderr, and records a
//! [`RunRecord`] per snippet. A tool that hangs, crashes, or stays silent
//! affects only its own records.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::os::unix::fs::PermissionsExt;
use std::os::unix::process::{CommandExt, ExitStatusExt};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitStatus, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use log::{debug, info, warn};
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Snippet};

pub const RAW_OUTPUT_FILE: &str = "output.json";
pub const STDOUT_LOG: &str = "stdout.log";
pub const STDERR_LOG: &str = "stderr.log";
pub const RUNTIME_ENV: &str = "TYPEBENCH_CONTAINER_RUNTIME";
const DEFAULT_RUNTIME: &str = "docker";
const CONTAINER_SNIPPET_DIR: &str = "/typebench/snippet";
const CONTAINER_OUTPUT_DIR: &str = "/typebench/output";

const SNIPPET_PLACEHOLDERS: &[&str] =
    &["snippet_dir", "output_file", "category", "snippet", "tool"];
const CORPUS_PLACEHOLDERS: &[&str] = &["corpus_dir", "output_dir", "tool"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdapterMode {
    Command,
    ContainerImage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvocationScope {
    /// One invocation per snippet.
    #[default]
    Snippet,
    /// One invocation for the whole corpus; the tool writes
    /// `{output_dir}/<category>/<snippet>.json`.
    Corpus,
}

fn default_timeout() -> f64 {
    60.0
}

fn default_translator() -> String {
    crate::translator::STANDARD_JSON.to_string()
}

/// How to invoke one tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolAdapterSpec {
    pub name: String,
    pub mode: AdapterMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<String>,
    /// Program and arguments, with `{placeholder}`s filled in per run.
    pub invocation: Vec<String>,
    #[serde(default = "default_timeout")]
    pub timeout_s: f64,
    /// Whether the tool's candidate lists are ordered best first.
    #[serde(default)]
    pub ranked: bool,
    #[serde(default = "default_translator")]
    pub translator_id: String,
    #[serde(default)]
    pub invocation_scope: InvocationScope,
}

#[derive(Debug, thiserror::Error)]
pub enum RunnerError {
    #[error("adapter `{tool}`: {message}")]
    InvalidAdapter { tool: String, message: String },
    #[error("adapter file {path}: {message}")]
    AdapterFile { path: PathBuf, message: String },
    #[error("tool `{tool}` is not available: {message}")]
    ToolUnavailable { tool: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunnerError {
    /// Whether the error is a problem with the adapter configuration
    /// rather than with executing the tool.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            RunnerError::InvalidAdapter { .. } | RunnerError::AdapterFile { .. }
        )
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> RunnerError + '_ {
    move |source| RunnerError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// `{name}` tokens in `arg`, skipping shell-style `${name}`.
fn placeholders(arg: &str) -> Vec<&str> {
    let bytes = arg.as_bytes();
    let mut found = Vec::new();
    let mut i = 0;
    while let Some(open) = arg[i..].find('{').map(|p| p + i) {
        let Some(close) = arg[open..].find('}').map(|p| p + open) else {
            break;
        };
        let inner = &arg[open + 1..close];
        let shell = open > 0 && bytes[open - 1] == b'$';
        if !shell && !inner.is_empty() && inner.bytes().all(|b| b.is_ascii_lowercase() || b == b'_')
        {
            found.push(inner);
        }
        i = open + 1;
    }
    found
}

fn fill(arg: &str, values: &[(&str, &str)]) -> String {
    let mut out = arg.to_string();
    for (key, value) in values {
        out = out.replace(&format!("{{{key}}}"), value);
    }
    out
}

impl ToolAdapterSpec {
    pub fn validate(&self) -> Result<(), RunnerError> {
        let invalid = |message: String| RunnerError::InvalidAdapter {
            tool: self.name.clone(),
            message,
        };
        let name_ok = !self.name.is_empty()
            && !self.name.starts_with('.')
            && self
                .name
                .bytes()
                .all(|b| b.is_ascii_alphanumeric() || b"._-".contains(&b));
        if !name_ok {
            return Err(invalid(
                "name must be non-empty and use only [A-Za-z0-9._-]".into(),
            ));
        }
        if !(self.timeout_s.is_finite() && self.timeout_s > 0.0) {
            return Err(invalid(format!(
                "timeout_s must be positive, got {}",
                self.timeout_s
            )));
        }
        if self.invocation.is_empty() || self.invocation[0].is_empty() {
            return Err(invalid("invocation must name a program".into()));
        }
        if self.mode == AdapterMode::ContainerImage
            && self.image.as_deref().is_none_or(str::is_empty)
        {
            return Err(invalid("container-image mode requires `image`".into()));
        }
        let (allowed, required): (&[&str], &[&str]) = match self.invocation_scope {
            InvocationScope::Snippet => (SNIPPET_PLACEHOLDERS, &["snippet_dir", "output_file"]),
            InvocationScope::Corpus => (CORPUS_PLACEHOLDERS, &["corpus_dir", "output_dir"]),
        };
        let used: Vec<&str> = self
            .invocation
            .iter()
            .flat_map(|a| placeholders(a))
            .collect();
        if let Some(bad) = used.iter().find(|p| !allowed.contains(p)) {
            return Err(invalid(format!("unknown placeholder {{{bad}}}")));
        }
        if let Some(missing) = required.iter().find(|r| !used.contains(r)) {
            return Err(invalid(format!("invocation must use {{{missing}}}")));
        }
        Ok(())
    }

    fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_s)
    }
}

/// Checks each adapter and that names are unique.
pub fn validate_adapters(specs: &[ToolAdapterSpec]) -> Result<(), RunnerError> {
    let mut seen = std::collections::BTreeSet::new();
    for spec in specs {
        spec.validate()?;
        if !seen.insert(spec.name.as_str()) {
            return Err(RunnerError::InvalidAdapter {
                tool: spec.name.clone(),
                message: "duplicate adapter name".into(),
            });
        }
    }
    Ok(())
}

/// Reads a JSON array of adapters.
pub fn load_adapters(path: &Path) -> Result<Vec<ToolAdapterSpec>, RunnerError> {
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    let specs: Vec<ToolAdapterSpec> =
        serde_json::from_str(&text).map_err(|e| RunnerError::AdapterFile {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    validate_adapters(&specs)?;
    Ok(specs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Ok,
    Timeout,
    Crash,
    NoOutput,
}

impl RunStatus {
    pub const ALL: [RunStatus; 4] = [
        RunStatus::Ok,
        RunStatus::Timeout,
        RunStatus::Crash,
        RunStatus::NoOutput,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::Timeout => "timeout",
            RunStatus::Crash => "crash",
            RunStatus::NoOutput => "no-output",
        }
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of running one tool on one snippet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub snippet: String,
    pub status: RunStatus,
    pub duration_s: f64,
    /// Raw output path relative to the run directory, when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exit_code: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<(), RunnerError> {
    let mut text = serde_json::to_string_pretty(records).expect("records serialize");
    text.push('\n');
    fs::write(path, text).map_err(io_error(path))
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>, RunnerError> {
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    serde_json::from_str(&text).map_err(|e| RunnerError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
    })
}

/// Per-tool status counts.
pub fn summarize_runs(records: &[RunRecord]) -> BTreeMap<String, BTreeMap<RunStatus, usize>> {
    let mut summary: BTreeMap<String, BTreeMap<RunStatus, usize>> = BTreeMap::new();
    for record in records {
        *summary
            .entry(record.tool.clone())
            .or_default()
            .entry(record.status)
            .or_default() += 1;
    }
    summary
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Run directory. Raw output lands in `<out_dir>/<tool>/<category>/<snippet>/`.
    pub out_dir: PathBuf,
    pub jobs: usize,
    /// Container runtime; falls back to `TYPEBENCH_CONTAINER_RUNTIME`, then `docker`.
    pub container_runtime: Option<String>,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        RunOptions {
            out_dir: out_dir.into(),
            jobs: 1,
            container_runtime: None,
        }
    }
}

/// Program (or container runtime) resolved before any snippet runs.
struct Resolved {
    program: PathBuf,
    runtime: Option<PathBuf>,
}

fn resolve_program(tool: &str, program: &str) -> Result<PathBuf, RunnerError> {
    let unavailable = |message: String| RunnerError::ToolUnavailable {
        tool: tool.to_string(),
        message,
    };
    if program.contains('/') {
        let path = std::path::absolute(program).map_err(|e| unavailable(e.to_string()))?;
        return if path.is_file() {
            Ok(path)
        } else {
            Err(unavailable(format!("{} does not exist", path.display())))
        };
    }
    which::which(program).map_err(|_| unavailable(format!("`{program}` not found on PATH")))
}

fn resolve(spec: &ToolAdapterSpec, opts: &RunOptions) -> Result<Resolved, RunnerError> {
    match spec.mode {
        AdapterMode::Command => Ok(Resolved {
            program: resolve_program(&spec.name, &spec.invocation[0])?,
            runtime: None,
        }),
        AdapterMode::ContainerImage => {
            let name = opts
                .container_runtime
                .clone()
                .or_else(|| std::env::var(RUNTIME_ENV).ok().filter(|s| !s.is_empty()))
                .unwrap_or_else(|| DEFAULT_RUNTIME.to_string());
            let runtime = resolve_program(&spec.name, &name)?;
            let image = spec.image.as_deref().unwrap_or_default();
            let status = Command::new(&runtime)
                .args(["image", "inspect", image])
                .stdin(Stdio::null())
                .stdout(Stdio::null())
                .stderr(Stdio::null())
                .status()
                .map_err(|e| RunnerError::ToolUnavailable {
                    tool: spec.name.clone(),
                    message: format!("cannot run {}: {e}", runtime.display()),
                })?;
            if !status.success() {
                return Err(RunnerError::ToolUnavailable {
                    tool: spec.name.clone(),
                    message: format!("image `{image}` not found by {}", runtime.display()),
                });
            }
            Ok(Resolved {
                program: PathBuf::from(&spec.invocation[0]),
                runtime: Some(runtime),
            })
        }
    }
}

fn copy_tree(from: &Path, to: &Path) -> std::io::Result<()> {
    fs::create_dir_all(to)?;
    for entry in fs::read_dir(from)? {
        let entry = entry?;
        let name = entry.file_name();
        if name == "__pycache__" {
            continue;
        }
        let target = to.join(&name);
        if entry.file_type()?.is_dir() {
            copy_tree(&entry.path(), &target)?;
        } else {
            fs::copy(entry.path(), &target)?;
        }
    }
    Ok(())
}

fn set_tree_mode(path: &Path, dir_mode: u32, file_mode: u32) -> std::io::Result<()> {
    if path.is_dir() {
        // Make the directory traversable before descending.
        fs::set_permissions(path, fs::Permissions::from_mode(0o755))?;
        for entry in fs::read_dir(path)? {
            set_tree_mode(&entry?.path(), dir_mode, file_mode)?;
        }
        fs::set_permissions(path, fs::Permissions::from_mode(dir_mode))
    } else {
        fs::set_permissions(path, fs::Permissions::from_mode(file_mode))
    }
}

/// Read-only copy of a directory tree, made writable again on drop so the
/// temporary directory can be removed.
struct ReadOnlyCopy {
    work: tempfile::TempDir,
    tree: PathBuf,
}

impl ReadOnlyCopy {
    fn new(source: &Path, leaf: &str) -> std::io::Result<Self> {
        let work = tempfile::Builder::new().prefix("typebench-").tempdir()?;
        let tree = work.path().join(leaf);
        copy_tree(source, &tree)?;
        set_tree_mode(&tree, 0o555, 0o444)?;
        Ok(ReadOnlyCopy { work, tree })
    }
}

impl Drop for ReadOnlyCopy {
    fn drop(&mut self) {
        if let Err(e) = set_tree_mode(&self.tree, 0o755, 0o644) {
            warn!(
                "cannot restore permissions under {}: {e}",
                self.tree.display()
            );
        }
    }
}

struct Exited {
    status: Option<ExitStatus>,
    timed_out: bool,
    spawn_error: Option<String>,
    duration: Duration,
}

fn kill_group(pid: u32) {
    // The child leads its own process group, so this reaches grandchildren.
    unsafe {
        libc::kill(-(pid as libc::pid_t), libc::SIGKILL);
    }
}

fn execute(
    argv: &[String],
    program: &Path,
    cwd: &Path,
    logs: &Path,
    timeout: Duration,
    on_timeout: impl FnOnce(),
) -> Result<Exited, RunnerError> {
    let stdout_path = logs.join(STDOUT_LOG);
    let stderr_path = logs.join(STDERR_LOG);
    let stdout = File::create(&stdout_path).map_err(io_error(&stdout_path))?;
    let stderr = File::create(&stderr_path).map_err(io_error(&stderr_path))?;
    let start = Instant::now();
    let spawned = Command::new(program)
        .args(&argv[1..])
        .current_dir(cwd)
        .stdin(Stdio::null())
        .stdout(stdout)
        .stderr(stderr)
        .process_group(0)
        .spawn();
    let mut child = match spawned {
        Ok(child) => child,
        Err(e) => {
            return Ok(Exited {
                status: None,
                timed_out: false,
                spawn_error: Some(format!("cannot start {}: {e}", program.display())),
                duration: start.elapsed(),
            })
        }
    };
    let mut pause = Duration::from_millis(1);
    loop {
        match child.try_wait() {
            Ok(Some(status)) => {
                // Reap anything the tool left running in its group.
                kill_group(child.id());
                return Ok(Exited {
                    status: Some(status),
                    timed_out: false,
                    spawn_error: None,
                    duration: start.elapsed(),
                });
            }
            Ok(None) if start.elapsed() >= timeout => {
                kill_group(child.id());
                on_timeout();
                let _ = child.wait();
                return Ok(Exited {
                    status: None,
                    timed_out: true,
                    spawn_error: None,
                    duration: start.elapsed(),
                });
            }
            Ok(None) => {
                std::thread::sleep(pause.min(timeout.saturating_sub(start.elapsed())));
                pause = (pause * 2).min(Duration::from_millis(20));
            }
            Err(e) => {
                kill_group(child.id());
                let _ = child.wait();
                return Ok(Exited {
                    status: None,
                    timed_out: false,
                    spawn_error: Some(format!("cannot wait for tool: {e}")),
                    duration: start.elapsed(),
                });
            }
        }
    }
}

fn describe(status: ExitStatus) -> String {
    match (status.code(), status.signal()) {
        (Some(code), _) => format!("exit status {code}"),
        (None, Some(signal)) => format!("killed by signal {signal}"),
        _ => status.to_string(),
    }
}

fn has_content(path: &Path) -> bool {
    fs::read(path)
        .map(|bytes| bytes.iter().any(|b| !b.is_ascii_whitespace()))
        .unwrap_or(false)
}

/// Classifies a finished invocation. `output` is where the tool should
/// have written its result.
fn classify(
    exited: &Exited,
    output: &Path,
    timeout_s: f64,
) -> (RunStatus, Option<i32>, Option<String>) {
    if exited.timed_out {
        return (
            RunStatus::Timeout,
            None,
            Some(format!("exceeded {timeout_s} s")),
        );
    }
    if let Some(error) = &exited.spawn_error {
        return (RunStatus::Crash, None, Some(error.clone()));
    }
    let status = exited.status.expect("finished process has a status");
    if !status.success() {
        return (RunStatus::Crash, status.code(), Some(describe(status)));
    }
    if !has_content(output) {
        return (
            RunStatus::NoOutput,
            Some(0),
            Some("tool wrote no output".into()),
        );
    }
    (RunStatus::Ok, Some(0), None)
}

fn raw_dir(out_dir: &Path, tool: &str, snippet: &Snippet) -> PathBuf {
    out_dir
        .join(tool)
        .join(snippet.category.as_str())
        .join(&snippet.name)
}

fn relative_output(tool: &str, snippet: &Snippet) -> String {
    format!(
        "{tool}/{}/{}/{RAW_OUTPUT_FILE}",
        snippet.category, snippet.name
    )
}

fn fresh_dir(path: &Path) -> Result<(), RunnerError> {
    if path.exists() {
        fs::remove_dir_all(path).map_err(io_error(path))?;
    }
    fs::create_dir_all(path).map_err(io_error(path))
}

static CONTAINER_SEQ: AtomicUsize = AtomicUsize::new(0);

fn container_name(tool: &str, what: &str) -> String {
    let seq = CONTAINER_SEQ.fetch_add(1, Ordering::Relaxed);
    let raw = format!("typebench-{tool}-{what}-{}-{seq}", std::process::id());
    raw.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

/// Full argv: the filled invocation, wrapped in `runtime run` for
/// container adapters.
fn command_line(
    spec: &ToolAdapterSpec,
    resolved: &Resolved,
    values: &[(&str, &str)],
    mounts: &[(&Path, &str, bool)],
    name: &str,
) -> (PathBuf, Vec<String>) {
    let filled: Vec<String> = spec.invocation.iter().map(|a| fill(a, values)).collect();
    match &resolved.runtime {
        None => (resolved.program.clone(), filled),
        Some(runtime) => {
            let mut argv = vec![
                runtime.display().to_string(),
                "run".into(),
                "--rm".into(),
                "--name".into(),
                name.to_string(),
            ];
            for (host, guest, read_only) in mounts {
                argv.push("-v".into());
                let suffix = if *read_only { ":ro" } else { "" };
                argv.push(format!("{}:{guest}{suffix}", host.display()));
            }
            argv.push(spec.image.clone().unwrap_or_default());
            argv.extend(filled);
            (runtime.clone(), argv)
        }
    }
}

fn kill_container(runtime: Option<&Path>, name: &str) {
    if let Some(runtime) = runtime {
        let _ = Command::new(runtime)
            .args(["kill", name])
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .status();
    }
}

fn run_snippet(
    spec: &ToolAdapterSpec,
    resolved: &Resolved,
    snippet: &Snippet,
    out_dir: &Path,
) -> Result<RunRecord, RunnerError> {
    let raw = raw_dir(out_dir, &spec.name, snippet);
    fresh_dir(&raw)?;
    let raw = fs::canonicalize(&raw).map_err(io_error(&raw))?;
    let copy = ReadOnlyCopy::new(&snippet.dir, "snippet").map_err(io_error(&snippet.dir))?;
    let output = raw.join(RAW_OUTPUT_FILE);
    let category = snippet.category.as_str();
    let (snippet_dir, output_file) = match resolved.runtime {
        None => (
            copy.tree.display().to_string(),
            output.display().to_string(),
        ),
        Some(_) => (
            CONTAINER_SNIPPET_DIR.to_string(),
            format!("{CONTAINER_OUTPUT_DIR}/{RAW_OUTPUT_FILE}"),
        ),
    };
    let values = [
        ("snippet_dir", snippet_dir.as_str()),
        ("output_file", output_file.as_str()),
        ("category", category),
        ("snippet", snippet.name.as_str()),
        ("tool", spec.name.as_str()),
    ];
    let name = container_name(&spec.name, &format!("{category}-{}", snippet.name));
    let mounts = [
        (copy.tree.as_path(), CONTAINER_SNIPPET_DIR, true),
        (raw.as_path(), CONTAINER_OUTPUT_DIR, false),
    ];
    let (program, argv) = command_line(spec, resolved, &values, &mounts, &name);
    debug!("{}: {}: {:?}", spec.name, snippet.id(), argv);
    let exited = execute(
        &argv,
        &program,
        copy.work.path(),
        &raw,
        spec.timeout(),
        || kill_container(resolved.runtime.as_deref(), &name),
    )?;
    let (status, exit_code, detail) = classify(&exited, &output, spec.timeout_s);
    Ok(RunRecord {
        tool: spec.name.clone(),
        snippet: snippet.id(),
        status,
        duration_s: exited.duration.as_secs_f64(),
        raw_output: output
            .is_file()
            .then(|| relative_output(&spec.name, snippet)),
        exit_code,
        detail,
    })
}

fn run_corpus_scope(
    spec: &ToolAdapterSpec,
    resolved: &Resolved,
    corpus: &Corpus,
    out_dir: &Path,
) -> Result<Vec<RunRecord>, RunnerError> {
    let tool_dir = out_dir.join(&spec.name);
    fresh_dir(&tool_dir)?;
    let tool_dir = fs::canonicalize(&tool_dir).map_err(io_error(&tool_dir))?;
    let collected = tool_dir.join("_corpus_output");
    fs::create_dir_all(&collected).map_err(io_error(&collected))?;
    let copy = ReadOnlyCopy::new(corpus.root(), "corpus").map_err(io_error(corpus.root()))?;
    let (corpus_dir, output_dir) = match resolved.runtime {
        None => (
            copy.tree.display().to_string(),
            collected.display().to_string(),
        ),
        Some(_) => (
            CONTAINER_SNIPPET_DIR.to_string(),
            CONTAINER_OUTPUT_DIR.to_string(),
        ),
    };
    let values = [
        ("corpus_dir", corpus_dir.as_str()),
        ("output_dir", output_dir.as_str()),
        ("tool", spec.name.as_str()),
    ];
    let name = container_name(&spec.name, "corpus");
    let mounts = [
        (copy.tree.as_path(), CONTAINER_SNIPPET_DIR, true),
        (collected.as_path(), CONTAINER_OUTPUT_DIR, false),
    ];
    let (program, argv) = command_line(spec, resolved, &values, &mounts, &name);
    let exited = execute(
        &argv,
        &program,
        copy.work.path(),
        &tool_dir,
        spec.timeout(),
        || kill_container(resolved.runtime.as_deref(), &name),
    )?;
    let mut records = Vec::with_capacity(corpus.len());
    for snippet in corpus.snippets() {
        let raw = raw_dir(out_dir, &spec.name, snippet);
        fs::create_dir_all(&raw).map_err(io_error(&raw))?;
        let produced = collected
            .join(snippet.category.as_str())
            .join(format!("{}.json", snippet.name));
        let output = raw.join(RAW_OUTPUT_FILE);
        if produced.is_file() {
            fs::copy(&produced, &output).map_err(io_error(&produced))?;
        }
        let (status, exit_code, detail) = classify(&exited, &output, spec.timeout_s);
        records.push(RunRecord {
            tool: spec.name.clone(),
            snippet: snippet.id(),
            status,
            duration_s: exited.duration.as_secs_f64(),
            raw_output: output
                .is_file()
                .then(|| relative_output(&spec.name, snippet)),
            exit_code,
            detail,
        });
    }
    Ok(records)
}

/// Checks that a tool can be started: its program exists or, for container
/// adapters, the runtime and image are present.
pub fn check_tool(spec: &ToolAdapterSpec, opts: &RunOptions) -> Result<(), RunnerError> {
    spec.validate()?;
    resolve(spec, opts).map(|_| ())
}

/// Runs one tool over every snippet. Fails only when the tool cannot be
/// started at all or the run directory cannot be written; per-snippet
/// failures are recorded in the returned records, in corpus order.
pub fn run_tool_on_corpus(
    spec: &ToolAdapterSpec,
    corpus: &Corpus,
    opts: &RunOptions,
) -> Result<Vec<RunRecord>, RunnerError> {
    spec.validate()?;
    let resolved = resolve(spec, opts)?;
    fs::create_dir_all(&opts.out_dir).map_err(io_error(&opts.out_dir))?;
    info!("running {} on {} snippets", spec.name, corpus.len());
    if spec.invocation_scope == InvocationScope::Corpus {
        return run_corpus_scope(spec, &resolved, corpus, &opts.out_dir);
    }
    let snippets: Vec<&Snippet> = corpus.snippets().collect();
    let results: Vec<Mutex<Option<Result<RunRecord, RunnerError>>>> =
        snippets.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..opts.jobs.clamp(1, snippets.len().max(1)) {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                let Some(snippet) = snippets.get(index) else {
                    break;
                };
                let result = run_snippet(spec, &resolved, snippet, &opts.out_dir);
                if let Ok(record) = &result {
                    if record.status != RunStatus::Ok {
                        warn!(
                            "{}: {}: {}{}",
                            record.tool,
                            record.snippet,
                            record.status,
                            record
                                .detail
                                .as_deref()
                                .map(|d| format!(" ({d})"))
                                .unwrap_or_default()
                        );
                    }
                }
                *results[index].lock().unwrap() = Some(result);
            });
        }
    });
    results
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("every snippet was run"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(invocation: &[&str]) -> ToolAdapterSpec {
        ToolAdapterSpec {
            name: "tool".into(),
            mode: AdapterMode::Command,
            image: None,
            invocation: invocation.iter().map(|s| s.to_string()).collect(),
            timeout_s: 5.0,
            ranked: false,
            translator_id: default_translator(),
            invocation_scope: InvocationScope::Snippet,
        }
    }

    #[test]
    fn adapter_defaults() {
        let s: ToolAdapterSpec = serde_json::from_str(
            r#"{"name": "t", "mode": "command", "invocation": ["t", "{snippet_dir}", "{output_file}"]}"#,
        )
        .unwrap();
        assert_eq!(s.timeout_s, 60.0);
        assert!(!s.ranked);
        assert_eq!(s.translator_id, "standard-json");
        assert_eq!(s.invocation_scope, InvocationScope::Snippet);
        s.validate().unwrap();
    }

    #[test]
    fn unknown_adapter_fields_are_rejected() {
        let r: Result<ToolAdapterSpec, _> = serde_json::from_str(
            r#"{"name": "t", "mode": "command", "invocation": ["t"], "timeout": 3}"#,
        );
        assert!(r.is_err());
    }

    #[test]
    fn placeholder_scan() {
        assert_eq!(
            placeholders("cp {snippet_dir}/x ${HOME} {output_file}"),
            ["snippet_dir", "output_file"]
        );
        assert_eq!(placeholders("{a,b} {} {Upper}"), Vec::<&str>::new());
    }

    #[test]
    fn validation_rules() {
        assert!(spec(&["t", "{snippet_dir}", "{output_file}"])
            .validate()
            .is_ok());
        assert!(spec(&["t", "{snippet_dir}"]).validate().is_err());
        assert!(spec(&["t", "{snippet_dir}", "{output_file}", "{nope}"])
            .validate()
            .is_err());
        assert!(spec(&[]).validate().is_err());
        let mut s = spec(&["t", "{snippet_dir}", "{output_file}"]);
        s.timeout_s = 0.0;
        assert!(s.validate().is_err());
        s.timeout_s = 1.0;
        s.name = "../x".into();
        assert!(s.validate().is_err());
        s.name = "ok".into();
        s.mode = AdapterMode::ContainerImage;
        assert!(s.validate().is_err());
        s.image = Some("img:1".into());
        assert!(s.validate().is_ok());
        s.invocation_scope = InvocationScope::Corpus;
        assert!(s.validate().is_err());
        s.invocation = vec!["t".into(), "{corpus_dir}".into(), "{output_dir}".into()];
        assert!(s.validate().is_ok());
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let a = spec(&["t", "{snippet_dir}", "{output_file}"]);
        assert!(validate_adapters(std::slice::from_ref(&a)).is_ok());
        assert!(validate_adapters(&[a.clone(), a]).is_err());
    }

    #[test]
    fn missing_program_is_unavailable() {
        let s = spec(&["typebench-no-such-tool", "{snippet_dir}", "{output_file}"]);
        let err = resolve(&s, &RunOptions::new("/tmp")).err().unwrap();
        assert!(matches!(err, RunnerError::ToolUnavailable { .. }));
        assert!(!err.is_config());
    }

    #[test]
    fn fill_replaces_every_occurrence() {
        assert_eq!(fill("{a}-{a}-{b}", &[("a", "1"), ("b", "2")]), "1-1-2");
    }

    #[test]
    fn summaries_count_statuses() {
        let record = |tool: &str, status| RunRecord {
            tool: tool.into(),
            snippet: "args/a".into(),
            status,
            duration_s: 0.0,
            raw_output: None,
            exit_code: None,
            detail: None,
        };
        let summary = summarize_runs(&[
            record("a", RunStatus::Ok),
            record("a", RunStatus::Ok),
            record("a", RunStatus::Timeout),
            record("b", RunStatus::Crash),
        ]);
        assert_eq!(summary["a"][&RunStatus::Ok], 2);
        assert_eq!(summary["a"][&RunStatus::Timeout], 1);
        assert_eq!(summary["b"][&RunStatus::Crash], 1);
        assert_eq!(summary["b"].get(&RunStatus::Ok), None);
    }
}
