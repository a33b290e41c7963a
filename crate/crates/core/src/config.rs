use alloc::format;
use alloc::string::String;

use serde::{Deserialize, Serialize};

/// Which extraction backend answers NER, RE, AE and Classify.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Mock,
    Rules,
    Remote,
}

impl BackendKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "mock" => Some(Self::Mock),
            "rules" => Some(Self::Rules),
            "remote" => Some(Self::Remote),
            _ => None,
        }
    }
}

/// How plans are produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    /// Fixed NER → AE → update plan for the detected task type.
    #[default]
    Template,
    /// Chat-model planner over the remote endpoint.
    Llm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub backend: BackendKind,
    pub planner: PlannerKind,
    pub fixtures_path: Option<String>,
    pub max_revisions: u32,
    pub max_restarts: u32,
    pub demo_k: usize,
    pub link_threshold: f64,
    pub categorical_k: usize,
    pub seed: u64,
    pub exec_timeout_s: u64,
    pub parallelism: usize,
    /// Include (truncated) documents in the planner prompt.
    pub prompt_documents: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            backend: BackendKind::Mock,
            planner: PlannerKind::Template,
            fixtures_path: None,
            max_revisions: 10,
            max_restarts: 2,
            demo_k: 20,
            link_threshold: 0.85,
            categorical_k: 12,
            seed: 0,
            exec_timeout_s: 300,
            parallelism: 1,
            prompt_documents: false,
        }
    }
}

impl EngineConfig {
    /// The single-generation baseline: no revisions, no restarts.
    pub fn one_shot() -> Self {
        Self {
            max_revisions: 0,
            max_restarts: 0,
            ..Self::default()
        }
    }

    /// Upper bound on plan generations for one instance.
    pub fn generation_budget(&self) -> u64 {
        (u64::from(self.max_restarts) + 1) * (u64::from(self.max_revisions) + 1)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.demo_k == 0 {
            return Err("demo_k must be positive".into());
        }
        if self.categorical_k == 0 {
            return Err("categorical_k must be positive".into());
        }
        if self.exec_timeout_s == 0 {
            return Err("exec_timeout_s must be positive".into());
        }
        if self.parallelism == 0 {
            return Err("parallelism must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.link_threshold) {
            return Err(format!(
                "link_threshold must lie in [0, 1], got {}",
                self.link_threshold
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = EngineConfig::default();
        assert_eq!((c.max_revisions, c.max_restarts, c.demo_k), (10, 2, 20));
        assert_eq!(c.link_threshold, 0.85);
        assert_eq!(c.categorical_k, 12);
        assert_eq!(c.exec_timeout_s, 300);
        assert_eq!(c.generation_budget(), 33);
        assert_eq!(EngineConfig::one_shot().generation_budget(), 1);
        assert!(c.validate().is_ok());
        assert!(EngineConfig {
            parallelism: 0,
            ..c
        }
        .validate()
        .is_err());
    }
}
