use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CONTAINER_FORMAT: &str = "floorcast-model";
pub const CONTAINER_VERSION: u32 = 1;

/// Versioned JSON envelope for a trained model. The registry hash pins the
/// feature ids the parameters refer to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelContainer<T> {
    pub format: String,
    pub version: u32,
    pub registry_hash: String,
    pub kind: String,
    pub hyperparameters: serde_json::Value,
    pub model: T,
}

impl<T: Serialize + DeserializeOwned> ModelContainer<T> {
    pub fn new(kind: &str, registry_hash: &str, hyperparameters: serde_json::Value, model: T) -> Self {
        ModelContainer {
            format: CONTAINER_FORMAT.to_string(),
            version: CONTAINER_VERSION,
            registry_hash: registry_hash.to_string(),
            kind: kind.to_string(),
            hyperparameters,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Parses and checks format, version and, when given, the registry hash.
    pub fn from_json(text: &str, expected_hash: Option<&str>) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        if c.format != CONTAINER_FORMAT {
            return Err(Error::InvalidInput(format!("not a model container: format `{}`", c.format)));
        }
        if c.version != CONTAINER_VERSION {
            return Err(Error::InvalidInput(format!("unsupported container version {}", c.version)));
        }
        if let Some(expected) = expected_hash {
            if c.registry_hash != expected {
                return Err(Error::RegistryMismatch {
                    expected: c.registry_hash,
                    found: expected.to_string(),
                });
            }
        }
        Ok(c)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path, expected_hash: Option<&str>) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, expected_hash)
    }
}
