use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

const DEFAULT_MAPPING: &str = include_str!("software_clusters.toml");

static DEFAULT: LazyLock<SoftwareMapping> =
    LazyLock::new(|| SoftwareMapping::from_toml(DEFAULT_MAPPING).expect("bundled software mapping is valid"));

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub name: String,
    pub patterns: Vec<String>,
}

/// Ordered cluster list used to canonicalize creator-tool strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoftwareMapping {
    pub other: String,
    #[serde(rename = "cluster")]
    pub clusters: Vec<Cluster>,
}

impl SoftwareMapping {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        let mut mapping: SoftwareMapping = toml::from_str(text)?;
        for c in &mut mapping.clusters {
            for p in &mut c.patterns {
                *p = p.to_lowercase();
            }
        }
        Ok(mapping)
    }

    /// The mapping shipped with the crate.
    pub fn bundled() -> &'static SoftwareMapping {
        &DEFAULT
    }

    pub fn bundled_toml() -> &'static str {
        DEFAULT_MAPPING
    }

    /// Named clusters in declaration order, then the catch-all.
    pub fn cluster_names(&self) -> Vec<&str> {
        self.clusters
            .iter()
            .map(|c| c.name.as_str())
            .chain(std::iter::once(self.other.as_str()))
            .collect()
    }

    /// Cluster of a single value, if any pattern matches.
    pub fn match_value(&self, value: &str) -> Option<&str> {
        let value = value.to_lowercase();
        if value.trim().is_empty() {
            return None;
        }
        self.clusters
            .iter()
            .find(|c| c.patterns.iter().any(|p| value.contains(p.as_str())))
            .map(|c| c.name.as_str())
    }

    /// First match over `values`, which are given in priority order
    /// (xmp creator tool, docinfo creator tool, producer).
    pub fn canonicalize<S: AsRef<str>>(&self, values: &[S]) -> String {
        values
            .iter()
            .find_map(|v| self.match_value(v.as_ref()))
            .unwrap_or(&self.other)
            .to_string()
    }
}

/// Canonical cluster using the bundled mapping.
pub fn canonicalize_creator<S: AsRef<str>>(values: &[S]) -> String {
    SoftwareMapping::bundled().canonicalize(values)
}
