//! Direct-enumeration reimplementation of the metrics, working on raw JSON
//! annotation records. Types are compared as plain strings, so inputs must
//! already be canonical.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::Value;

const KEYS: [&str; 6] = [
    "file",
    "line_number",
    "col_offset",
    "function",
    "variable",
    "parameter",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NaiveMetrics {
    /// FR, FP, LV.
    pub exact: [usize; 3],
    pub annotations: [usize; 3],
    pub true_positives: usize,
    pub predicted: usize,
    pub actual: usize,
    pub sound: bool,
    pub complete: bool,
    pub top_n: BTreeMap<usize, [usize; 3]>,
    pub missing: usize,
    pub mismatch: usize,
    pub ignored: usize,
}

pub fn kind_index(entry: &Value) -> usize {
    if entry.get("parameter").is_some_and(|v| !v.is_null()) {
        1
    } else if entry.get("variable").is_some_and(|v| !v.is_null()) {
        2
    } else {
        0
    }
}

fn same_site(a: &Value, b: &Value) -> bool {
    KEYS.iter().all(|k| {
        let x = a.get(k).filter(|v| !v.is_null());
        let y = b.get(k).filter(|v| !v.is_null());
        x == y
    })
}

fn strings(entry: &Value) -> Vec<String> {
    entry["type"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t.as_str().unwrap().to_string())
        .collect()
}

fn top_n(gt: &BTreeSet<String>, candidates: &[String], ranked: bool, n: usize) -> bool {
    let all: BTreeSet<String> = candidates.iter().cloned().collect();
    if !ranked || n >= candidates.len() {
        return all == *gt;
    }
    candidates[..n].iter().filter(|c| gt.contains(*c)).count() == gt.len()
}

/// `preds = None` means the tool produced no output for the snippet.
pub fn naive_snippet(
    gt: &[Value],
    preds: Option<&[Value]>,
    ranked_default: bool,
    ns: &[usize],
) -> NaiveMetrics {
    let mut m = NaiveMetrics {
        sound: preds.is_some(),
        complete: true,
        ..Default::default()
    };
    for &n in ns {
        m.top_n.insert(n, [0; 3]);
    }
    let preds = preds.unwrap_or(&[]);
    for g in gt {
        let k = kind_index(g);
        m.annotations[k] += 1;
        let gt_types: BTreeSet<String> = strings(g).into_iter().collect();
        m.actual += gt_types.len();
        let mut found: Option<&Value> = None;
        for p in preds {
            if same_site(g, p) {
                found = Some(p);
            }
        }
        let Some(p) = found else {
            m.sound = false;
            m.missing += 1;
            continue;
        };
        let mut candidates: Vec<String> = Vec::new();
        for t in strings(p) {
            if !candidates.contains(&t) {
                candidates.push(t);
            }
        }
        let ranked = p
            .get("ranked")
            .and_then(Value::as_bool)
            .unwrap_or(ranked_default);
        let pred_types: BTreeSet<String> = candidates.iter().cloned().collect();
        m.predicted += pred_types.len();
        let mut hits = 0;
        let mut covered = true;
        for t in &gt_types {
            if pred_types.contains(t) {
                hits += 1;
            } else {
                covered = false;
            }
        }
        m.true_positives += hits;
        let mut extra = false;
        for t in &pred_types {
            if !gt_types.contains(t) {
                extra = true;
            }
        }
        if !covered {
            m.sound = false;
            m.missing += 1;
        }
        if extra {
            m.complete = false;
            m.mismatch += 1;
        }
        if covered && !extra {
            m.exact[k] += 1;
        }
        for &n in ns {
            if top_n(&gt_types, &candidates, ranked, n) {
                m.top_n.get_mut(&n).unwrap()[k] += 1;
            }
        }
    }
    for p in preds {
        if !gt.iter().any(|g| same_site(g, p)) {
            m.ignored += 1;
        }
    }
    m
}
