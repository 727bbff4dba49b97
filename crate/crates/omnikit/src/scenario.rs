//! Scenario files: user roles, one source backend, optional processing
//! plans and scenario transforms. Role validity is enforced on parse.

use crate::entropy::{
    FiniteLinearSource, HypergraphSource, SourceModel, TabularSource, ValueKind,
};
use crate::error::{KitError, Result};
use crate::ground::{popcount, Ground, Mask, UserId};
use crate::value::{parse_rat, Rat};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const FORMAT_VERSION: u32 = 1;

/// A secret-key-agreement scenario: user sets (A, S, D, V) plus the source.
#[derive(Clone, Debug)]
pub struct Scenario {
    ground: Ground,
    active: Mask,
    untrusted: Mask,
    silent: Mask,
    pub source: SourceModel,
    pub plans: Vec<PlanSpec>,
    pub transforms: Vec<TransformSpec>,
}

impl Scenario {
    pub fn new(
        source: SourceModel,
        active_ids: &[UserId],
        silent_ids: &[UserId],
        untrusted_ids: &[UserId],
    ) -> Result<Self> {
        let ground = source.ground().clone();
        let active = ground.mask_of(active_ids)?;
        let silent = ground.mask_of(silent_ids)?;
        let untrusted = ground.mask_of(untrusted_ids)?;
        let s = Scenario {
            ground,
            active,
            untrusted,
            silent,
            source,
            plans: Vec::new(),
            transforms: Vec::new(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.ground.full_mask();
        if self.ground.len() < 2 {
            return Err(KitError::Validation("a scenario needs at least two users".into()));
        }
        if popcount(self.active) < 2 {
            return Err(KitError::Validation("at least two active users required".into()));
        }
        if self.active & self.untrusted != 0 {
            return Err(KitError::Validation(
                "untrusted active user: untrusted helpers must not be active".into(),
            ));
        }
        if self.silent & !self.active != 0 {
            if self.silent & self.untrusted != 0 {
                return Err(KitError::Validation(
                    "silent untrusted user: unsupported scenario shape".into(),
                ));
            }
            return Err(KitError::Validation(
                "silent trusted helper: silent users must be active".into(),
            ));
        }
        if self.silent == self.active {
            return Err(KitError::Validation(
                "at least one vocal active user required (S must be a proper subset of A)".into(),
            ));
        }
        debug_assert_eq!(self.active & !v, 0);
        Ok(())
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn all(&self) -> Mask {
        self.ground.full_mask()
    }

    pub fn active(&self) -> Mask {
        self.active
    }

    pub fn untrusted(&self) -> Mask {
        self.untrusted
    }

    pub fn silent(&self) -> Mask {
        self.silent
    }

    /// Trusted helpers V ∖ A ∖ D.
    pub fn trusted_helpers(&self) -> Mask {
        self.all() & !self.active & !self.untrusted
    }

    /// Vocal users V ∖ S.
    pub fn vocal(&self) -> Mask {
        self.all() & !self.silent
    }

    /// The rate-bearing users V ∖ D ∖ S.
    pub fn discussers(&self) -> Mask {
        self.all() & !self.untrusted & !self.silent
    }

    pub fn is_exact(&self) -> bool {
        self.source.is_exact()
    }

    pub fn kind(&self) -> ValueKind {
        self.source.kind()
    }

    pub fn oracle(&self) -> crate::entropy::EntropyOracle {
        self.source.oracle()
    }

    /// Same users and roles, different source.
    pub fn with_source(&self, source: SourceModel) -> Result<Scenario> {
        if source.ground() != &self.ground {
            return Err(KitError::Internal("source replacement changed the ground set".into()));
        }
        let mut s = self.clone();
        s.source = source;
        Ok(s)
    }

    /// Rebuild with explicit role masks (used by transforms); revalidates.
    pub fn with_roles(
        &self,
        source: SourceModel,
        active_ids: &[UserId],
        silent_ids: &[UserId],
        untrusted_ids: &[UserId],
    ) -> Result<Scenario> {
        Scenario::new(source, active_ids, silent_ids, untrusted_ids)
    }

    pub fn summary(&self) -> String {
        format!(
            "V={:?} A={:?} S={:?} D={:?}",
            self.ground.ids(),
            self.ground.ids_of(self.active),
            self.ground.ids_of(self.silent),
            self.ground.ids_of(self.untrusted),
        )
    }
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub version: u32,
    pub users: Vec<UserDecl>,
    pub source: SourceDecl,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub plans: Vec<PlanSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transforms: Vec<TransformSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UserDecl {
    pub id: UserId,
    #[serde(default)]
    pub active: bool,
    #[serde(default)]
    pub untrusted: bool,
    #[serde(default)]
    pub silent: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SourceDecl {
    Hypergraph {
        edges: Vec<EdgeDecl>,
    },
    Linear {
        field: u64,
        seed_dim: usize,
        /// User id (as string key) to row list.
        matrices: BTreeMap<String, Vec<Vec<u64>>>,
    },
    Tabular {
        alphabets: BTreeMap<String, Vec<String>>,
        pmf: Vec<PmfEntry>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeDecl {
    pub label: String,
    pub on: Vec<UserId>,
    pub weight: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PmfEntry {
    pub z: Vec<String>,
    pub p: String,
}

/// One block-processing plan: labels with probabilities and per-user
/// processing (hypergraph: retained edge labels; tabular: lookup tables).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanSpec {
    #[serde(default)]
    pub name: String,
    pub labels: Vec<PlanLabel>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanLabel {
    pub q: String,
    pub p: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub keep: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub map: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransformSpec {
    /// Vocal active user becomes silent; a trusted copy is added.
    SilenceActive { user: UserId, copy_id: UserId },
    /// Remove a trusted helper.
    RemoveTrustedHelper { user: UserId },
    /// Remove a trusted helper whose source is determined by a vocal user.
    RemoveDeterminedHelper { user: UserId, by: UserId },
    /// Remove a silent active user entirely.
    RemoveSilent { user: UserId },
    /// Make a silent active user vocal.
    VocalizeSilent { user: UserId },
    /// Vocal untrusted user becomes silent untrusted plus a trusted copy.
    UntrustedToSilent { user: UserId, copy_id: UserId },
    /// Drop hyperedges incident to the wiretapped set D.
    DropWiretappedEdges,
    /// Drop hyperedges observed only by silent users.
    DropSilentOnlyEdges,
}

fn parse_user_key(k: &str) -> Result<UserId> {
    k.parse::<UserId>()
        .map_err(|_| KitError::Parse(format!("user key {k:?} is not an id")))
}

pub fn source_from_decl(decl: &SourceDecl, ground: Ground) -> Result<SourceModel> {
    match decl {
        SourceDecl::Hypergraph { edges } => {
            let parsed = edges
                .iter()
                .map(|e| Ok((e.label.clone(), e.on.clone(), parse_rat(&e.weight)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(SourceModel::Hypergraph(HypergraphSource::new(ground, parsed)?))
        }
        SourceDecl::Linear { field, seed_dim, matrices } => {
            let mut mats = Vec::with_capacity(ground.len());
            for &id in ground.ids() {
                let rows = matrices
                    .get(&id.to_string())
                    .ok_or_else(|| KitError::Validation(format!("no matrix for user {id}")))?;
                mats.push(rows.clone());
            }
            Ok(SourceModel::Linear(FiniteLinearSource::new(ground, *field, *seed_dim, mats)?))
        }
        SourceDecl::Tabular { alphabets, pmf } => {
            let mut alpha = Vec::with_capacity(ground.len());
            for &id in ground.ids() {
                let a = alphabets
                    .get(&id.to_string())
                    .ok_or_else(|| KitError::Validation(format!("no alphabet for user {id}")))?;
                alpha.push(a.clone());
            }
            let outcomes = pmf
                .iter()
                .map(|e| Ok((e.z.clone(), parse_rat(&e.p)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(SourceModel::Tabular(TabularSource::with_alphabets(ground, alpha, outcomes)?))
        }
    }
}

pub fn scenario_from_file(file: &ScenarioFile) -> Result<Scenario> {
    if file.version != FORMAT_VERSION {
        return Err(KitError::Parse(format!(
            "unsupported format version {} (expected {FORMAT_VERSION})",
            file.version
        )));
    }
    let ids: Vec<UserId> = file.users.iter().map(|u| u.id).collect();
    let ground = Ground::new(ids)?;
    let active: Vec<UserId> = file.users.iter().filter(|u| u.active).map(|u| u.id).collect();
    let silent: Vec<UserId> = file.users.iter().filter(|u| u.silent).map(|u| u.id).collect();
    let untrusted: Vec<UserId> =
        file.users.iter().filter(|u| u.untrusted).map(|u| u.id).collect();
    let source = source_from_decl(&file.source, ground)?;
    let mut scenario = Scenario::new(source, &active, &silent, &untrusted)?;
    scenario.plans = file.plans.clone();
    scenario.transforms = file.transforms.clone();
    Ok(scenario)
}

pub fn parse_scenario_str(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| {
        KitError::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;
    scenario_from_file(&file)
}

pub fn parse_scenario(path: &std::path::Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| KitError::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario_str(&text)
}

/// Render a scenario back to its file form (used by the transform command).
pub fn scenario_to_file(s: &Scenario) -> ScenarioFile {
    let users = s
        .ground()
        .ids()
        .iter()
        .map(|&id| {
            let bit = s.ground().singleton(id).expect("own id");
            UserDecl {
                id,
                active: s.active() & bit != 0,
                untrusted: s.untrusted() & bit != 0,
                silent: s.silent() & bit != 0,
            }
        })
        .collect();
    let source = match &s.source {
        SourceModel::Hypergraph(h) => SourceDecl::Hypergraph {
            edges: h
                .edges()
                .iter()
                .map(|e| EdgeDecl {
                    label: e.label.clone(),
                    on: h.ground().ids_of(e.on),
                    weight: e.weight.to_string(),
                })
                .collect(),
        },
        SourceModel::Linear(l) => {
            let mut matrices = BTreeMap::new();
            for (i, &id) in l.ground().ids().iter().enumerate() {
                matrices.insert(id.to_string(), l.rows_of(i).to_vec());
            }
            SourceDecl::Linear { field: l.q(), seed_dim: l.seed_dim(), matrices }
        }
        SourceModel::Tabular(t) => {
            let mut alphabets = BTreeMap::new();
            for (i, &id) in t.ground().ids().iter().enumerate() {
                alphabets.insert(id.to_string(), t.alphabets()[i].clone());
            }
            let pmf = t
                .outcome_rows()
                .into_iter()
                .map(|(z, p)| PmfEntry { z, p: p.to_string() })
                .collect();
            SourceDecl::Tabular { alphabets, pmf }
        }
    };
    ScenarioFile {
        version: FORMAT_VERSION,
        users,
        source,
        plans: s.plans.clone(),
        transforms: s.transforms.clone(),
    }
}

pub fn plan_user_map<T: Clone>(map: &BTreeMap<String, T>) -> Result<BTreeMap<UserId, T>> {
    map.iter()
        .map(|(k, v)| Ok((parse_user_key(k)?, v.clone())))
        .collect()
}

pub fn parse_weight(p: &str) -> Result<Rat> {
    parse_rat(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    const XJ: &str = r#"{
      "version": 1,
      "users": [{"id": 1, "active": true}, {"id": 2, "active": true}],
      "source": {
        "type": "tabular",
        "alphabets": {"1": ["00","01","10","11"], "2": ["00","01","10","11"]},
        "pmf": [
          {"z": ["00","00"], "p": "1/8"}, {"z": ["00","01"], "p": "1/8"},
          {"z": ["01","00"], "p": "1/8"}, {"z": ["01","11"], "p": "1/8"},
          {"z": ["10","10"], "p": "1/8"}, {"z": ["10","01"], "p": "1/8"},
          {"z": ["11","10"], "p": "1/8"}, {"z": ["11","11"], "p": "1/8"}
        ]
      }
    }"#;

    #[test]
    fn parses_two_user_tabular_scenario() {
        let s = parse_scenario_str(XJ).unwrap();
        assert_eq!(s.ground().ids(), &[1, 2]);
        assert_eq!(s.active(), 0b11);
        assert!(!s.is_exact());
        let o = s.oracle();
        assert_eq!(o.entropy_ids(&[1, 2]).unwrap().rat, crate::value::rat_int(3));
    }

    #[test]
    fn rejects_all_silent_actives() {
        let text = XJ.replace(
            r#"[{"id": 1, "active": true}, {"id": 2, "active": true}]"#,
            r#"[{"id": 1, "active": true, "silent": true}, {"id": 2, "active": true, "silent": true}]"#,
        );
        let err = parse_scenario_str(&text).unwrap_err();
        assert!(err.to_string().contains("vocal active"), "{err}");
    }

    #[test]
    fn rejects_untrusted_active_overlap() {
        let text = XJ.replace(
            r#"{"id": 2, "active": true}"#,
            r#"{"id": 2, "active": true, "untrusted": true}"#,
        );
        let err = parse_scenario_str(&text).unwrap_err();
        assert!(err.to_string().contains("untrusted active"), "{err}");
    }

    #[test]
    fn json_errors_carry_position() {
        let err = parse_scenario_str("{ not json").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn scenario_round_trips_through_file_form() {
        let s = parse_scenario_str(XJ).unwrap();
        let file = scenario_to_file(&s);
        let text = serde_json::to_string(&file).unwrap();
        let again = parse_scenario_str(&text).unwrap();
        assert_eq!(again.ground().ids(), s.ground().ids());
        assert_eq!(again.oracle().h(0b11), s.oracle().h(0b11));
    }
}
