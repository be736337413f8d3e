//! In-memory corpora of arbitrary size.

use std::path::PathBuf;

use typebench::corpus::{AnnotationSite, Category, Corpus, GroundTruthEntry, Snippet};

/// Snippets per category in the full-size benchmark.
pub const FULL_COUNTS: [(Category, usize); 18] = [
    (Category::Args, 8),
    (Category::Assignments, 8),
    (Category::Builtins, 7),
    (Category::Classes, 26),
    (Category::Decorators, 8),
    (Category::Dicts, 15),
    (Category::DirectCalls, 6),
    (Category::Dynamic, 3),
    (Category::Exceptions, 2),
    (Category::External, 7),
    (Category::Functions, 9),
    (Category::Generators, 6),
    (Category::Imports, 14),
    (Category::Kwargs, 4),
    (Category::Lambdas, 6),
    (Category::Lists, 10),
    (Category::Mro, 7),
    (Category::Returns, 8),
];

const POOL: [&str; 8] = [
    "None", "bool", "callable", "dict", "float", "int", "list", "str",
];

fn types_for(i: usize) -> Vec<String> {
    let mut types = vec![POOL[i % POOL.len()].to_string()];
    if i.is_multiple_of(5) {
        let other = POOL[(i / 5 + 3) % POOL.len()].to_string();
        if other != types[0] {
            types.push(other);
        }
    }
    types.sort();
    types
}

/// Corpus with the given per-category snippet counts and annotation
/// totals spread round-robin over the snippets. Every site is unique and
/// every type list is canonical and sorted.
pub fn synthetic_corpus(counts: &[(Category, usize)], fr: usize, fp: usize, lv: usize) -> Corpus {
    let mut snippets: Vec<Snippet> = Vec::new();
    for (category, n) in counts {
        for k in 0..*n {
            let name = format!("s{k:02}");
            snippets.push(Snippet {
                category: *category,
                name: name.clone(),
                dir: PathBuf::from(format!("/synthetic/{category}/{name}")),
                source_path: PathBuf::from(format!("/synthetic/{category}/{name}/main.py")),
                ground_truth: Vec::new(),
            });
        }
    }
    let total = snippets.len();
    for i in 0..fr + fp + lv {
        let (function, variable, parameter) = if i < fr {
            (Some(format!("f{i}")), None, None)
        } else if i < fr + fp {
            (Some(format!("f{i}")), None, Some(format!("p{i}")))
        } else {
            (None, Some(format!("v{i}")), None)
        };
        let entry = GroundTruthEntry {
            site: AnnotationSite {
                file: "main.py".into(),
                line_number: i as u32 + 1,
                col_offset: (i % 7) as u32,
                function,
                variable,
                parameter,
            },
            types: types_for(i),
        };
        snippets[i % total].ground_truth.push(entry);
    }
    Corpus::from_snippets("/synthetic", snippets)
}

pub fn full_scale_corpus() -> Corpus {
    synthetic_corpus(&FULL_COUNTS, 239, 88, 518)
}
