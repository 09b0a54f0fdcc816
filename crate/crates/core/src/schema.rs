//! Serializable descriptions of filtrations and local data.
//!
//! Groups are named by [`GroupSpec`]; every step of a filtration is given by
//! a list of generators, each an element index or label. Characters are
//! multiplicity vectors in the order of the computed character table.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::character::CharError;
use crate::group::{build_group, make_filtration, subgroup_generated, Filtration, FiniteGroup, GroupError, GroupSpec};
use crate::wd::{AbVarDatum, InertiaModel, WdError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemaError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Wd(#[from] WdError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error("residue characteristic p is required here")]
    MissingPrime,
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementRef {
    Index(usize),
    Label(String),
}

impl ElementRef {
    pub fn resolve(&self, g: &FiniteGroup) -> Result<usize, GroupError> {
        match self {
            ElementRef::Index(i) if *i < g.order() => Ok(*i),
            ElementRef::Index(i) => Err(GroupError::ElementOutOfRange(*i)),
            ElementRef::Label(l) => g.element_by_label(l),
        }
    }
}

/// Process-wide cache so that every case on the same group shares one
/// multiplication table and one character table.
pub fn shared_group(spec: &GroupSpec) -> Result<Arc<FiniteGroup>, GroupError> {
    static CACHE: OnceLock<Mutex<HashMap<GroupSpec, Arc<FiniteGroup>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(g) = cache.lock().expect("group cache poisoned").get(spec) {
        return Ok(g.clone());
    }
    let g = build_group(spec)?;
    // a concurrent builder may have won; keep whichever landed first
    let mut map = cache.lock().expect("group cache poisoned");
    Ok(map.entry(spec.clone()).or_insert(g).clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationDoc {
    pub group: GroupSpec,
    /// Generators of `G_0, G_1, ...`; the trivial tail may be omitted.
    pub chain: Vec<Vec<ElementRef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
}

impl FiltrationDoc {
    pub fn group(&self) -> Result<Arc<FiniteGroup>, SchemaError> {
        Ok(shared_group(&self.group)?)
    }

    pub fn filtration(&self) -> Result<Filtration, SchemaError> {
        let g = self.group()?;
        let steps = self
            .chain
            .iter()
            .map(|gens| {
                let idx = gens.iter().map(|r| r.resolve(&g)).collect::<Result<Vec<_>, _>>()?;
                subgroup_generated(&g, &idx)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(make_filtration(&g, steps)?)
    }

    pub fn model(&self) -> Result<Arc<InertiaModel>, SchemaError> {
        let p = self.p.ok_or(SchemaError::MissingPrime)?;
        Ok(InertiaModel::new(self.filtration()?, p)?)
    }
}

/// `rho = tau (+) sigma (x) sp(2)` as two multiplicity vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbVarDoc {
    pub tau: Vec<u64>,
    pub sigma: Vec<u64>,
}

impl AbVarDoc {
    pub fn datum(&self, model: &Arc<InertiaModel>) -> Result<AbVarDatum, SchemaError> {
        Ok(AbVarDatum::from_multiplicities(model, &self.tau, &self.sigma)?)
    }
}

/// Input of a single local computation for a pair of abelian varieties.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalPairDoc {
    pub model: FiltrationDoc,
    #[serde(rename = "A")]
    pub a: AbVarDoc,
    #[serde(rename = "B")]
    pub b: AbVarDoc,
}

impl LocalPairDoc {
    pub fn data(&self) -> Result<(AbVarDatum, AbVarDatum), SchemaError> {
        let model = self.model.model()?;
        Ok((self.a.datum(&model)?, self.b.datum(&model)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_build() {
        let doc: FiltrationDoc = serde_json::from_str(
            r#"{"group": {"kind": "quaternion8"}, "chain": [["i", "j"], ["-1"]], "p": 2}"#,
        )
        .unwrap();
        let f = doc.filtration().unwrap();
        assert_eq!(f.indices(), vec![1, 4, 8]);
        assert!(doc.model().is_ok());
        let by_index: FiltrationDoc =
            serde_json::from_str(r#"{"group": {"kind": "cyclic", "n": 4}, "chain": [[1], [2]]}"#).unwrap();
        assert_eq!(by_index.filtration().unwrap().indices(), vec![1, 2, 4]);
        assert_eq!(by_index.model().unwrap_err(), SchemaError::MissingPrime);
        let bad: FiltrationDoc =
            serde_json::from_str(r#"{"group": {"kind": "cyclic", "n": 4}, "chain": [[2], [1]]}"#).unwrap();
        assert!(bad.filtration().is_err());
        assert!(serde_json::from_str::<FiltrationDoc>(r#"{"group": {"kind": "cyclic", "n": 4}, "chain": [], "x": 1}"#).is_err());
    }

    #[test]
    fn shared_groups_are_reused() {
        let a = shared_group(&GroupSpec::Cyclic { n: 6 }).unwrap();
        let b = shared_group(&GroupSpec::Cyclic { n: 6 }).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
