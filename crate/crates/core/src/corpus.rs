//! The versioned corpus of filtrations and pinned cases driving the suites.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{subgroup_generated, FiniteGroup, GroupSpec, Subgroup};
use crate::schema::{ElementRef, FiltrationDoc, SchemaError};
use crate::suite::{Case, Expectation};
use crate::wd::InertiaModel;

pub const CORPUS_VERSION: u64 = 1;

const SHIPPED: &str = include_str!("../corpus/corpus-v1.json");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus version {0} is not supported (expected {CORPUS_VERSION})")]
    UnknownVersion(u64),
    #[error("corpus is not valid JSON: {0}")]
    Parse(String),
    #[error("filtration `{name}`: {source}")]
    Entry { name: String, source: SchemaError },
    #[error("filtration `{0}` has no residue characteristic")]
    MissingPrime(String),
    #[error("duplicate filtration name `{0}`")]
    DuplicateName(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedFiltration {
    pub name: String,
    pub model: FiltrationDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PinnedCase {
    pub name: String,
    pub case: Case,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusDoc {
    pub version: u64,
    pub filtrations: Vec<NamedFiltration>,
    #[serde(default)]
    pub pinned: Vec<PinnedCase>,
}

/// A validated filtration with its built model.
#[derive(Clone, Debug)]
pub struct Entry {
    pub name: String,
    pub doc: FiltrationDoc,
    pub model: Arc<InertiaModel>,
}

impl Entry {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.model.group()
    }

    /// Prime `q` when the whole group is a nontrivial `q`-group.
    pub fn p_group_prime(&self) -> Option<u64> {
        self.group().prime_power_order().map(|(q, _)| q)
    }
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub entries: Vec<Entry>,
    pub pinned: Vec<PinnedCase>,
}

impl Corpus {
    pub fn shipped() -> Corpus {
        Corpus::from_json(SHIPPED).expect("shipped corpus is valid")
    }

    /// Checks the version before anything else so that a newer layout is
    /// reported as such rather than as a parse error.
    pub fn from_json(text: &str) -> Result<Corpus, CorpusError> {
        let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| CorpusError::Parse(e.to_string()))?;
        let version = raw.get("version").and_then(|v| v.as_u64()).unwrap_or(0);
        if version != CORPUS_VERSION {
            return Err(CorpusError::UnknownVersion(version));
        }
        let doc: CorpusDoc = serde_json::from_value(raw).map_err(|e| CorpusError::Parse(e.to_string()))?;
        Corpus::from_doc(doc)
    }

    pub fn from_doc(doc: CorpusDoc) -> Result<Corpus, CorpusError> {
        if doc.version != CORPUS_VERSION {
            return Err(CorpusError::UnknownVersion(doc.version));
        }
        let mut names = BTreeSet::new();
        let mut entries = Vec::with_capacity(doc.filtrations.len());
        for f in doc.filtrations {
            if !names.insert(f.name.clone()) {
                return Err(CorpusError::DuplicateName(f.name));
            }
            if f.model.p.is_none() {
                return Err(CorpusError::MissingPrime(f.name));
            }
            let model = f.model.model().map_err(|source| CorpusError::Entry {
                name: f.name.clone(),
                source,
            })?;
            entries.push(Entry {
                name: f.name,
                doc: f.model,
                model,
            });
        }
        Ok(Corpus {
            entries,
            pinned: doc.pinned,
        })
    }

    pub fn entry(&self, name: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn p_group_entries(&self) -> Vec<&Entry> {
        self.entries.iter().filter(|e| e.p_group_prime().is_some()).collect()
    }

    /// Distinct subgroups of `spec` seen in the corpus: every chain step on
    /// that group and every cyclic subgroup, each with a generator list.
    pub fn subgroups(&self, spec: &GroupSpec) -> Vec<(Vec<ElementRef>, Subgroup)> {
        let mut out: Vec<(Vec<ElementRef>, Subgroup)> = Vec::new();
        let mut seen = BTreeSet::new();
        let mut push = |gens: Vec<ElementRef>, h: Subgroup| {
            if seen.insert(h.elements().to_vec()) {
                out.push((gens, h));
            }
        };
        let mut group = None;
        for e in self.entries.iter().filter(|e| &e.doc.group == spec) {
            let g = e.group();
            group = Some(g.clone());
            for (gens, step) in e.doc.chain.iter().zip(e.model.filtration().steps()) {
                push(gens.clone(), step.clone());
            }
        }
        if let Some(g) = group {
            for x in 0..g.order() {
                let h = subgroup_generated(&g, &[x]).expect("element is in range");
                push(vec![ElementRef::Label(g.label(x).to_string())], h);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_corpus_loads() {
        let c = Corpus::shipped();
        assert!(c.entries.len() >= 20);
        let kinds: BTreeSet<String> = c.entries.iter().map(|e| e.doc.group.to_string()).collect();
        for k in ["C4", "C8", "C9", "Q8", "D4", "Heis(3)", "Aff(5)", "C3^2"] {
            assert!(kinds.contains(k), "{k}");
        }
        let primes: BTreeSet<u64> = c.p_group_entries().iter().filter_map(|e| e.p_group_prime()).collect();
        assert_eq!(primes, [2, 3, 5].into_iter().collect());
        assert!(c
            .entries
            .iter()
            .any(|e| e.model.filtration().steps().iter().any(|s| !s.is_normal())));
        assert!(!c.pinned.is_empty());
    }

    #[test]
    fn version_gate() {
        let bumped = SHIPPED.replacen("\"version\": 1", "\"version\": 2", 1);
        assert!(matches!(Corpus::from_json(&bumped), Err(CorpusError::UnknownVersion(2))));
        assert!(matches!(Corpus::from_json("{}"), Err(CorpusError::UnknownVersion(0))));
    }

    #[test]
    fn subgroup_lists_are_distinct() {
        let c = Corpus::shipped();
        let subs = c.subgroups(&GroupSpec::Quaternion8);
        // 1, <-1>, <i>, <j>, <k>, Q8
        assert_eq!(subs.len(), 6);
    }
}
