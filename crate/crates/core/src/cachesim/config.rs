use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WritePolicy {
    #[default]
    WriteBackWriteAllocate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheLevelConfig {
    pub name: String,
    /// Bytes.
    pub capacity: u64,
    pub associativity: u32,
    /// Bytes; a power of two.
    pub line_size: u32,
    #[serde(default)]
    pub write_policy: WritePolicy,
}

impl CacheLevelConfig {
    pub fn new(name: impl Into<String>, capacity: u64, associativity: u32, line_size: u32) -> Self {
        CacheLevelConfig {
            name: name.into(),
            capacity,
            associativity,
            line_size,
            write_policy: WritePolicy::WriteBackWriteAllocate,
        }
    }

    /// Single-set cache holding `lines` lines.
    pub fn fully_associative(name: impl Into<String>, lines: u32, line_size: u32) -> Self {
        Self::new(name, lines as u64 * line_size as u64, lines, line_size)
    }

    pub fn sets(&self) -> u64 {
        self.capacity / (self.line_size as u64 * self.associativity as u64)
    }

    pub fn lines(&self) -> u64 {
        self.capacity / self.line_size as u64
    }

    pub(crate) fn validate(&self, path: &str) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::config(format!("{path}.name"), "level name is empty"));
        }
        if self.associativity == 0 {
            return Err(Error::config(format!("{path}.associativity"), "must be >= 1"));
        }
        if self.line_size == 0 || !self.line_size.is_power_of_two() {
            return Err(Error::config(
                format!("{path}.line_size"),
                format!("must be a power of two, got {}", self.line_size),
            ));
        }
        let way_bytes = self.line_size as u64 * self.associativity as u64;
        if self.capacity == 0 || !self.capacity.is_multiple_of(way_bytes) {
            return Err(Error::config(
                format!("{path}.capacity"),
                format!(
                    "{} is not a positive multiple of line_size x associativity ({way_bytes})",
                    self.capacity
                ),
            ));
        }
        Ok(())
    }
}

/// Cache levels nearest-first plus the name given to memory beyond them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchyConfig {
    pub levels: Vec<CacheLevelConfig>,
    #[serde(default = "default_memory_name")]
    pub memory: String,
}

fn default_memory_name() -> String {
    "DRAM".to_string()
}

impl HierarchyConfig {
    pub fn new(levels: Vec<CacheLevelConfig>) -> Self {
        HierarchyConfig {
            levels,
            memory: default_memory_name(),
        }
    }

    /// All levels share one line size so inclusion holds line-for-line.
    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::config("$.levels", "hierarchy has no cache levels"));
        }
        for (i, level) in self.levels.iter().enumerate() {
            level.validate(&format!("$.levels[{i}]"))?;
            if level.line_size != self.levels[0].line_size {
                return Err(Error::config(
                    format!("$.levels[{i}].line_size"),
                    "all levels must share one line size",
                ));
            }
            if self.levels[..i].iter().any(|l| l.name.eq_ignore_ascii_case(&level.name)) {
                return Err(Error::config(format!("$.levels[{i}].name"), "duplicate level name"));
            }
            if level.name.eq_ignore_ascii_case(&self.memory) {
                return Err(Error::config(format!("$.levels[{i}].name"), "clashes with memory name"));
            }
        }
        if self.memory.trim().is_empty() {
            return Err(Error::config("$.memory", "memory name is empty"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: HierarchyConfig = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::config(format!("$.{}", e.path()), e.inner().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn line_size(&self) -> u32 {
        self.levels[0].line_size
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let ok = HierarchyConfig::new(vec![
            CacheLevelConfig::new("L1", 32 * 1024, 8, 64),
            CacheLevelConfig::new("L2", 1 << 20, 16, 64),
        ]);
        assert!(ok.validate().is_ok());
        assert_eq!(ok.levels[0].sets(), 64);

        assert!(HierarchyConfig::new(vec![]).validate().is_err());
        for bad in [
            CacheLevelConfig::new("L1", 1000, 8, 64),
            CacheLevelConfig::new("L1", 4096, 0, 64),
            CacheLevelConfig::new("L1", 4096, 1, 48),
        ] {
            assert!(HierarchyConfig::new(vec![bad]).validate().is_err());
        }
        let mixed = HierarchyConfig::new(vec![
            CacheLevelConfig::new("L1", 4096, 1, 64),
            CacheLevelConfig::new("L2", 8192, 1, 128),
        ]);
        assert!(mixed.validate().is_err());
    }

    #[test]
    fn json_errors_carry_paths() {
        let err = HierarchyConfig::from_json(
            r#"{"levels":[{"name":"L1","capacity":"big","associativity":1,"line_size":64}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("levels[0].capacity"), "{err}");
        let cfg = HierarchyConfig::from_json(
            r#"{"levels":[{"name":"L1","capacity":4096,"associativity":1,"line_size":64}]}"#,
        )
        .unwrap();
        assert_eq!(cfg.memory, "DRAM");
    }
}
