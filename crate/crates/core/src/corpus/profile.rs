use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Category, CorpusStats};

/// Bound on the number of snippets in a category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountRule {
    AtLeast(usize),
    Exactly(usize),
}

impl CountRule {
    fn accepts(self, n: usize) -> bool {
        match self {
            CountRule::AtLeast(min) => n >= min,
            CountRule::Exactly(want) => n == want,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedTotals {
    pub snippets: usize,
    pub annotations: usize,
    pub fr: usize,
    pub fp: usize,
    pub lv: usize,
}

/// Target shape of a corpus: per-category snippet counts and, optionally,
/// exact annotation totals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusProfile {
    pub name: String,
    pub categories: BTreeMap<Category, CountRule>,
    #[serde(default)]
    pub totals: Option<ExpectedTotals>,
}

/// Snippets per category in the full-size benchmark.
const FULL_CATEGORY_COUNTS: [(Category, usize); 18] = [
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

impl CorpusProfile {
    /// The bundled seed corpus: at least three snippets in every category.
    pub fn seed() -> Self {
        CorpusProfile {
            name: "seed".into(),
            categories: Category::ALL
                .iter()
                .map(|c| (*c, CountRule::AtLeast(3)))
                .collect(),
            totals: None,
        }
    }

    /// The full-size benchmark: 154 snippets, 845 annotations.
    pub fn full_scale() -> Self {
        CorpusProfile {
            name: "full".into(),
            categories: FULL_CATEGORY_COUNTS
                .iter()
                .map(|(c, n)| (*c, CountRule::Exactly(*n)))
                .collect(),
            totals: Some(ExpectedTotals {
                snippets: 154,
                annotations: 845,
                fr: 239,
                fp: 88,
                lv: 518,
            }),
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "seed" => Some(Self::seed()),
            "full" => Some(Self::full_scale()),
            _ => None,
        }
    }

    /// Returns one message per deviation from the profile.
    pub fn check(&self, stats: &CorpusStats) -> Vec<String> {
        let mut problems = Vec::new();
        for (category, rule) in &self.categories {
            let n = stats.categories.get(category).map_or(0, |c| c.snippets);
            if !rule.accepts(n) {
                problems.push(format!(
                    "category `{category}` has {n} snippets, profile `{}` requires {rule:?}",
                    self.name
                ));
            }
        }
        if let Some(t) = &self.totals {
            let a = &stats.annotations;
            let checks = [
                ("snippets", stats.snippets, t.snippets),
                ("annotations", a.total, t.annotations),
                ("FR annotations", a.fr, t.fr),
                ("FP annotations", a.fp, t.fp),
                ("LV annotations", a.lv, t.lv),
            ];
            for (what, got, want) in checks {
                if got != want {
                    problems.push(format!(
                        "{got} {what}, profile `{}` requires exactly {want}",
                        self.name
                    ));
                }
            }
        }
        problems
    }
}
