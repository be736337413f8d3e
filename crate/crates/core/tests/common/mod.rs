#![allow(dead_code)]

pub mod naive;
pub mod synthetic;

use std::path::{Path, PathBuf};

use typebench::corpus::{load_corpus, Corpus};
use typebench::runner::{
    run_tool_on_corpus, AdapterMode, InvocationScope, RunOptions, RunRecord, ToolAdapterSpec,
};
use typebench::translator::{translate_records, PredictionSet, TranslatorRegistry, STANDARD_JSON};
use typebench::typeexpr::TypeNormalizer;

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn seed_corpus_dir() -> PathBuf {
    manifest_dir().join("../../corpus")
}

pub fn seed_corpus() -> Corpus {
    load_corpus(&seed_corpus_dir()).expect("seed corpus loads")
}

pub fn fixture_dir(mode: &str) -> PathBuf {
    manifest_dir().join("tests/fixtures/mock").join(mode)
}

/// Adapter that replays checked-in output for `mode`, writing nothing
/// when a snippet has no fixture.
pub fn mock_adapter(name: &str, mode: &str, ranked: bool) -> ToolAdapterSpec {
    let fixtures = fixture_dir(mode);
    let script = format!(
        "test -d {{snippet_dir}} || exit 9; f={}/{{category}}/{{snippet}}.json; if [ -f \"$f\" ]; then cp \"$f\" {{output_file}}; fi",
        fixtures.display()
    );
    shell_adapter(name, &script, ranked)
}

pub fn shell_adapter(name: &str, script: &str, ranked: bool) -> ToolAdapterSpec {
    ToolAdapterSpec {
        name: name.to_string(),
        mode: AdapterMode::Command,
        image: None,
        invocation: vec!["sh".into(), "-c".into(), script.to_string()],
        timeout_s: 20.0,
        ranked,
        translator_id: STANDARD_JSON.to_string(),
        invocation_scope: InvocationScope::Snippet,
    }
}

pub struct MockRun {
    pub dir: tempfile::TempDir,
    pub records: Vec<RunRecord>,
    pub predictions: PredictionSet,
}

/// Runs, then translates, a spec over the corpus in a fresh directory.
pub fn run_and_translate(spec: &ToolAdapterSpec, corpus: &Corpus) -> MockRun {
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions::new(dir.path());
    let records = run_tool_on_corpus(spec, corpus, &opts).expect("tool runs");
    let predictions = translate_records(
        &TranslatorRegistry::default(),
        &spec.translator_id,
        &spec.name,
        spec.ranked,
        &records,
        dir.path(),
        TypeNormalizer::builtin(),
    )
    .expect("translation");
    MockRun {
        dir,
        records,
        predictions,
    }
}

pub fn run_mock(mode: &str, ranked: bool, corpus: &Corpus) -> MockRun {
    run_and_translate(&mock_adapter(mode, mode, ranked), corpus)
}

pub fn write_executable(path: &Path, text: &str) {
    use std::os::unix::fs::PermissionsExt;
    std::fs::write(path, text).unwrap();
    std::fs::set_permissions(path, std::fs::Permissions::from_mode(0o755)).unwrap();
}

/// Predictions built in memory from each ground-truth entry. `transform`
/// returns the candidate strings (already canonical) or `None` to leave
/// the site unpredicted; `keep` decides which snippets have output.
pub fn predictions_from(
    corpus: &Corpus,
    tool: &str,
    ranked: bool,
    keep: impl Fn(usize) -> bool,
    transform: impl Fn(&typebench::corpus::GroundTruthEntry) -> Option<Vec<String>>,
) -> PredictionSet {
    use typebench::translator::{merge_predictions, OutputStatus, Prediction, SnippetPredictions};
    use typebench::typeexpr::CanonicalType;
    let mut set = PredictionSet::new(tool, ranked);
    for (index, snippet) in corpus.snippets().enumerate() {
        if !keep(index) {
            continue;
        }
        let preds: Vec<Prediction> = snippet
            .ground_truth
            .iter()
            .filter_map(|e| {
                transform(e).map(|types| Prediction {
                    site: e.site.clone(),
                    candidates: types.into_iter().map(CanonicalType::new).collect(),
                    ranked,
                })
            })
            .collect();
        set.snippets.insert(
            snippet.id(),
            SnippetPredictions {
                status: OutputStatus::Translated,
                predictions: merge_predictions(preds).unwrap(),
                warnings: Vec::new(),
                error: None,
            },
        );
    }
    set
}

/// Raw JSON records for a snippet's ground truth.
pub fn gt_records(snippet: &typebench::corpus::Snippet) -> Vec<serde_json::Value> {
    serde_json::from_str(&typebench::corpus::ground_truth_to_json(
        &snippet.ground_truth,
    ))
    .unwrap()
}

/// Raw JSON records for translated predictions, in the tool schema.
pub fn prediction_records(preds: &[typebench::translator::Prediction]) -> Vec<serde_json::Value> {
    preds
        .iter()
        .map(|p| {
            let mut v = serde_json::to_value(&p.site).unwrap();
            v["type"] =
                serde_json::json!(p.candidates.iter().map(|c| c.as_str()).collect::<Vec<_>>());
            v["ranked"] = serde_json::json!(p.ranked);
            v
        })
        .collect()
}
