//! Type expression parsing and canonicalization.
//!
//! Tools spell the same runtime type in many ways (`List[int]`,
//! `typing.List`, `builtins.list`). Every type string that enters the
//! comparison domain is parsed, stripped of its generic arguments and mapped
//! through an alias table onto a canonical name. Unions and optionals become
//! sets of canonical names.

mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub use parse::{parse_type_expr, TypeExprTree, TypeParseError};
use parse::{LIST_HEAD, UNION_HEAD};

const OPTIONAL_HEAD: &str = "Optional";
const NONE: &str = "None";

/// Module prefixes that are looked up with and without the prefix.
const TRANSPARENT_PREFIXES: &[&str] = &["builtins.", "typing.", "typing_extensions."];

/// Alias table shipped with the harness.
pub const BUILTIN_ALIASES: &str = include_str!("../../data/type_aliases.json");

/// A type name in the comparison domain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalType(String);

impl CanonicalType {
    pub fn new(name: impl Into<String>) -> Self {
        CanonicalType(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_any(&self) -> bool {
        self.0 == "Any"
    }
}

impl fmt::Display for CanonicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CanonicalType {
    fn from(s: &str) -> Self {
        CanonicalType::new(s)
    }
}

/// Deduplicated type set, iterated (and serialized) in lexicographic order.
pub type TypeSet = BTreeSet<CanonicalType>;

/// Builds a [`TypeSet`] from canonical names.
pub fn type_set<I, S>(names: I) -> TypeSet
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    names.into_iter().map(|s| CanonicalType::new(s)).collect()
}

/// Order- and duplication-insensitive comparison.
pub fn type_sets_equal(a: &TypeSet, b: &TypeSet) -> bool {
    a == b
}

#[derive(Debug, thiserror::Error)]
pub enum AliasTableError {
    #[error("alias table is not a JSON object of strings: {0}")]
    Format(#[from] serde_json::Error),
    #[error("cannot read alias table {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("alias `{0}` is not a valid type name")]
    InvalidName(String),
    #[error("alias cycle through `{0}`")]
    Cycle(String),
}

/// Maps type expressions onto canonical type sets.
#[derive(Debug, Clone)]
pub struct TypeNormalizer {
    aliases: BTreeMap<String, String>,
}

impl TypeNormalizer {
    /// Normalizer backed by the bundled alias table.
    pub fn builtin() -> &'static TypeNormalizer {
        static BUILTIN: OnceLock<TypeNormalizer> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            TypeNormalizer::from_json(BUILTIN_ALIASES).expect("bundled alias table is valid")
        })
    }

    pub fn from_json(text: &str) -> Result<Self, AliasTableError> {
        let mut normalizer = TypeNormalizer {
            aliases: BTreeMap::new(),
        };
        normalizer.extend_from_json(text)?;
        Ok(normalizer)
    }

    /// Adds (or overrides) aliases from a JSON object of `alias -> canonical`.
    pub fn extend_from_json(&mut self, text: &str) -> Result<(), AliasTableError> {
        let extra: BTreeMap<String, String> = serde_json::from_str(text)?;
        let mut aliases = self.aliases.clone();
        for (alias, target) in extra {
            for name in [&alias, &target] {
                match parse_type_expr(name) {
                    Ok(tree) if tree.args.is_empty() => {}
                    _ => return Err(AliasTableError::InvalidName(name.clone())),
                }
            }
            aliases.insert(alias, target);
        }
        self.aliases = resolve_chains(aliases)?;
        Ok(())
    }

    pub fn extend_from_file(&mut self, path: &Path) -> Result<(), AliasTableError> {
        let text = std::fs::read_to_string(path).map_err(|source| AliasTableError::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.extend_from_json(&text)
    }

    fn lookup(&self, head: &str) -> Option<&str> {
        if let Some(target) = self.aliases.get(head) {
            return Some(target);
        }
        TRANSPARENT_PREFIXES
            .iter()
            .filter_map(|prefix| head.strip_prefix(prefix))
            .find_map(|rest| self.aliases.get(rest))
            .map(String::as_str)
    }

    /// Canonical name for a bare head. Unknown heads are returned verbatim.
    pub fn canonical_head(&self, head: &str) -> CanonicalType {
        CanonicalType::new(self.lookup(head).unwrap_or(head))
    }

    /// True when `head` is part of the alias vocabulary.
    pub fn is_known(&self, head: &str) -> bool {
        self.lookup(head).is_some()
    }

    /// Erases generic arguments and resolves aliases. `Union`, `Optional`
    /// and `|` decompose into sets; `Optional[T]` is `{T, None}`.
    pub fn normalize(&self, tree: &TypeExprTree) -> TypeSet {
        let mut out = TypeSet::new();
        self.normalize_into(tree, &mut out);
        out
    }

    fn normalize_into(&self, tree: &TypeExprTree, out: &mut TypeSet) {
        if tree.head == LIST_HEAD {
            for arg in &tree.args {
                self.normalize_into(arg, out);
            }
            return;
        }
        let canonical = self.canonical_head(&tree.head);
        match canonical.as_str() {
            UNION_HEAD => {
                for arg in &tree.args {
                    self.normalize_into(arg, out);
                }
            }
            OPTIONAL_HEAD => {
                for arg in &tree.args {
                    self.normalize_into(arg, out);
                }
                out.insert(CanonicalType::new(NONE));
            }
            _ => {
                out.insert(canonical);
            }
        }
    }

    /// Parses and normalizes `text` into a flat, deduplicated set.
    pub fn decompose(&self, text: &str) -> Result<TypeSet, TypeParseError> {
        Ok(self.normalize(&parse_type_expr(text)?))
    }

    /// True when `name` already is its own canonical form.
    pub fn is_canonical_name(&self, name: &str) -> bool {
        match self.decompose(name) {
            Ok(set) => set.len() == 1 && set.iter().next().map(CanonicalType::as_str) == Some(name),
            Err(_) => false,
        }
    }
}

/// Collapses alias chains so every alias points at a fixpoint.
fn resolve_chains(
    aliases: BTreeMap<String, String>,
) -> Result<BTreeMap<String, String>, AliasTableError> {
    let mut resolved = BTreeMap::new();
    for alias in aliases.keys() {
        let mut seen = BTreeSet::new();
        let mut current = alias.as_str();
        loop {
            if !seen.insert(current) {
                return Err(AliasTableError::Cycle(alias.clone()));
            }
            match aliases.get(current) {
                Some(next) if next != current => current = next,
                _ => break,
            }
        }
        resolved.insert(alias.clone(), current.to_string());
    }
    Ok(resolved)
}

/// [`TypeNormalizer::decompose`] with the bundled alias table.
pub fn decompose_to_type_set(text: &str) -> Result<TypeSet, TypeParseError> {
    TypeNormalizer::builtin().decompose(text)
}

/// [`TypeNormalizer::normalize`] with the bundled alias table.
pub fn normalize_type_expr(tree: &TypeExprTree) -> TypeSet {
    TypeNormalizer::builtin().normalize(tree)
}
