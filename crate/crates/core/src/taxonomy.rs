//! Class taxonomy: which semantic IDs are safety-critical, which may be
//! restyled, and which are ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// TOML source of the built-in driving taxonomy.
pub const DEFAULT_TAXONOMY_TOML: &str = include_str!("../config/driving_taxonomy.toml");

/// Role a class ID plays in region construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassRole {
    Critical,
    Augmentable,
    Ignore,
}

/// On-disk form of a taxonomy. Kept separate from [`ClassTaxonomy`] so the
/// validated type can only be obtained through [`ClassTaxonomy::from_spec`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaxonomySpec {
    pub critical_ids: Vec<u32>,
    pub augmentable_ids: Vec<u32>,
    #[serde(default)]
    pub ignore_ids: Vec<u32>,
    #[serde(default)]
    pub names: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassTaxonomy {
    critical: BTreeSet<u32>,
    augmentable: BTreeSet<u32>,
    ignore: BTreeSet<u32>,
    names: BTreeMap<u32, String>,
}

impl ClassTaxonomy {
    pub fn from_spec(spec: &TaxonomySpec) -> Result<Self> {
        let critical: BTreeSet<u32> = spec.critical_ids.iter().copied().collect();
        let augmentable: BTreeSet<u32> = spec.augmentable_ids.iter().copied().collect();
        let ignore: BTreeSet<u32> = spec.ignore_ids.iter().copied().collect();

        if critical.is_empty() {
            return Err(Error::Config("critical_ids must not be empty".into()));
        }
        let pairs = [
            ("critical_ids", &critical, "augmentable_ids", &augmentable),
            ("critical_ids", &critical, "ignore_ids", &ignore),
            ("augmentable_ids", &augmentable, "ignore_ids", &ignore),
        ];
        for (name_a, a, name_b, b) in pairs {
            if let Some(id) = a.intersection(b).next() {
                return Err(Error::Config(format!(
                    "class {id} listed in both {name_a} and {name_b}"
                )));
            }
        }

        let mut names = BTreeMap::new();
        for (key, label) in &spec.names {
            let id: u32 = key
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("names key {key:?} is not a class ID")))?;
            names.insert(id, label.clone());
        }

        Ok(Self {
            critical,
            augmentable,
            ignore,
            names,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: TaxonomySpec =
            toml::from_str(text).map_err(|e| Error::Config(format!("taxonomy: {e}")))?;
        Self::from_spec(&spec)
    }

    /// The built-in Cityscapes-ID driving taxonomy.
    pub fn driving_default() -> Self {
        Self::from_toml_str(DEFAULT_TAXONOMY_TOML).expect("built-in taxonomy is valid")
    }

    pub fn role(&self, id: u32) -> Option<ClassRole> {
        if self.critical.contains(&id) {
            Some(ClassRole::Critical)
        } else if self.augmentable.contains(&id) {
            Some(ClassRole::Augmentable)
        } else if self.ignore.contains(&id) {
            Some(ClassRole::Ignore)
        } else {
            None
        }
    }

    pub fn critical_ids(&self) -> &BTreeSet<u32> {
        &self.critical
    }

    pub fn augmentable_ids(&self) -> &BTreeSet<u32> {
        &self.augmentable
    }

    pub fn ignore_ids(&self) -> &BTreeSet<u32> {
        &self.ignore
    }

    pub fn name(&self, id: u32) -> Option<&str> {
        self.names.get(&id).map(String::as_str)
    }

    /// First ID whose name matches `label` exactly.
    pub fn id_of(&self, label: &str) -> Option<u32> {
        self.names
            .iter()
            .find_map(|(id, name)| (name == label).then_some(*id))
    }

    pub fn to_spec(&self) -> TaxonomySpec {
        TaxonomySpec {
            critical_ids: self.critical.iter().copied().collect(),
            augmentable_ids: self.augmentable.iter().copied().collect(),
            ignore_ids: self.ignore.iter().copied().collect(),
            names: self
                .names
                .iter()
                .map(|(id, n)| (id.to_string(), n.clone()))
                .collect(),
        }
    }
}

/// Reads a taxonomy file with top-level `critical_ids`, `augmentable_ids`,
/// `ignore_ids` arrays and a `[names]` table.
pub fn load_taxonomy(config: &Path) -> Result<ClassTaxonomy> {
    let text = std::fs::read_to_string(config).map_err(|e| Error::io(config, e))?;
    ClassTaxonomy::from_toml_str(&text)
}
