use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::ops::Range;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use super::Group;
use crate::error::{Error, Result};

/// Maps feature names to dense ids.
///
/// Names are collected while unfrozen; [`freeze`](Self::freeze) sorts them by
/// (group, name) so every group occupies one contiguous id range. Lookups on
/// an unfrozen registry fail.
#[derive(Debug, Clone, Default)]
pub struct FeatureRegistry {
    pending: BTreeSet<(Group, String)>,
    names: Vec<String>,
    index: HashMap<String, u32>,
    ranges: Vec<Range<u32>>,
    frozen: bool,
}

impl FeatureRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `name`. Names without a known group prefix are rejected;
    /// adding to a frozen registry is a no-op.
    pub fn insert(&mut self, name: &str) -> Result<()> {
        if self.frozen {
            return Ok(());
        }
        let group = Group::of(name)
            .ok_or_else(|| Error::InvalidInput(format!("feature `{name}` has no group prefix")))?;
        self.pending.insert((group, name.to_string()));
        Ok(())
    }

    pub fn freeze(&mut self) {
        if self.frozen {
            return;
        }
        let pending = std::mem::take(&mut self.pending);
        self.names = pending.into_iter().map(|(_, n)| n).collect();
        self.rebuild();
    }

    fn rebuild(&mut self) {
        self.index = self
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect();
        self.ranges = Group::ALL
            .iter()
            .map(|&g| {
                let start = self.names.partition_point(|n| Group::of(n).expect("validated") < g);
                let end = self.names.partition_point(|n| Group::of(n).expect("validated") <= g);
                start as u32..end as u32
            })
            .collect();
        self.frozen = true;
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn len(&self) -> usize {
        if self.frozen {
            self.names.len()
        } else {
            self.pending.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Id of `name`, `None` when unknown.
    pub fn id(&self, name: &str) -> Result<Option<u32>> {
        if !self.frozen {
            return Err(Error::UnfrozenRegistry);
        }
        Ok(self.index.get(name).copied())
    }

    pub fn name(&self, id: u32) -> Option<&str> {
        self.names.get(id as usize).map(String::as_str)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn group_range(&self, group: Group) -> Range<u32> {
        self.ranges
            .get(group as usize)
            .cloned()
            .unwrap_or(0..0)
    }

    pub fn group_of(&self, id: u32) -> Option<Group> {
        self.name(id).and_then(Group::of)
    }

    /// `id<TAB>name` lines.
    pub fn manifest(&self) -> String {
        let mut out = String::new();
        for (i, name) in self.names.iter().enumerate() {
            let _ = writeln!(out, "{i}\t{name}");
        }
        out
    }

    /// SHA-256 of the manifest, hex encoded. Stored with trained models so a
    /// model is never applied to vectors from a different registry.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.manifest().as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

#[derive(Serialize, Deserialize)]
struct Repr {
    names: Vec<String>,
}

impl Serialize for FeatureRegistry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.frozen {
            return Err(serde::ser::Error::custom("cannot serialize an unfrozen registry"));
        }
        Repr {
            names: self.names.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FeatureRegistry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = Repr::deserialize(d)?;
        if let Some(bad) = repr.names.iter().find(|n| Group::of(n).is_none()) {
            return Err(serde::de::Error::custom(format!("feature `{bad}` has no group prefix")));
        }
        let mut reg = FeatureRegistry {
            names: repr.names,
            ..Default::default()
        };
        reg.rebuild();
        Ok(reg)
    }
}
