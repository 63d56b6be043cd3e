use std::path::Path;

use ghom_core::kmatrix::EnumBudget;
use ghom_core::permanent::PermanentConfig;
use serde::Deserialize;

/// Optional TOML file with resource budgets. Every key may be omitted.
///
/// ```toml
/// [permanent]
/// max_side = 22
///
/// [enumeration]
/// max_visits = 10000000
/// max_nodes = 1000000000
///
/// [scan]
/// max_inputs = 100
/// time_budget_secs = 600
///
/// [dist]
/// total_cap = 24
/// ```
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub permanent: PermanentSection,
    pub enumeration: EnumerationSection,
    pub scan: ScanSection,
    pub dist: DistSection,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PermanentSection {
    pub max_side: usize,
}

impl Default for PermanentSection {
    fn default() -> Self {
        Self {
            max_side: PermanentConfig::default().max_side,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnumerationSection {
    pub max_visits: u64,
    pub max_nodes: u64,
}

impl Default for EnumerationSection {
    fn default() -> Self {
        let b = EnumBudget::default();
        Self {
            max_visits: b.max_visits,
            max_nodes: b.max_nodes,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    pub max_inputs: Option<usize>,
    pub time_budget_secs: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistSection {
    pub total_cap: u32,
}

impl Default for DistSection {
    fn default() -> Self {
        Self { total_cap: 24 }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    pub fn permanent(&self) -> PermanentConfig {
        PermanentConfig::with_max_side(self.permanent.max_side)
    }

    pub fn budget(&self) -> EnumBudget {
        EnumBudget {
            max_visits: self.enumeration.max_visits,
            max_nodes: self.enumeration.max_nodes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file() {
        let c: Config = toml::from_str("[permanent]\nmax_side = 8\n").unwrap();
        assert_eq!(c.permanent().max_side, 8);
        assert_eq!(c.budget(), EnumBudget::default());
        assert_eq!(c.dist.total_cap, 24);
        assert!(toml::from_str::<Config>("[permanent]\nmax_sides = 8\n").is_err());
    }
}
