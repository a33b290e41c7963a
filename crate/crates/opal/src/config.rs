//! Settings from defaults, environment, a JSON config file and flags, in
//! increasing precedence.

use std::path::Path;

use opal_core::config::{BackendKind, EngineConfig, PlannerKind};
use serde::Deserialize;

use crate::instance::{read, InstanceError};

pub const ENV_ENDPOINT: &str = "OPAL_LLM_ENDPOINT";
pub const ENV_API_KEY: &str = "OPAL_LLM_API_KEY";
pub const ENV_MODEL: &str = "OPAL_LLM_MODEL";
pub const DEFAULT_MODEL: &str = "gpt-4-1106-preview";

/// Where and how to reach the remote model.
#[derive(Clone, Debug, PartialEq)]
pub struct RemoteSettings {
    pub endpoint: Option<String>,
    pub api_key: Option<String>,
    pub model: String,
    pub max_in_flight: usize,
    pub request_timeout_s: u64,
}

impl Default for RemoteSettings {
    fn default() -> Self {
        Self {
            endpoint: None,
            api_key: None,
            model: DEFAULT_MODEL.into(),
            max_in_flight: 4,
            request_timeout_s: 120,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    pub engine: EngineConfig,
    pub remote: RemoteSettings,
}

/// A partial configuration. The config file has this shape: the
/// [`EngineConfig`] fields plus the remote endpoint settings, all
/// optional. The API key is only read from the environment.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub backend: Option<BackendKind>,
    pub planner: Option<PlannerKind>,
    pub fixtures_path: Option<String>,
    pub max_revisions: Option<u32>,
    pub max_restarts: Option<u32>,
    pub demo_k: Option<usize>,
    pub link_threshold: Option<f64>,
    pub categorical_k: Option<usize>,
    pub seed: Option<u64>,
    pub exec_timeout_s: Option<u64>,
    pub parallelism: Option<usize>,
    pub prompt_documents: Option<bool>,
    pub llm_endpoint: Option<String>,
    pub llm_model: Option<String>,
    pub max_in_flight: Option<usize>,
    pub request_timeout_s: Option<u64>,
    #[serde(skip)]
    pub llm_api_key: Option<String>,
}

impl Layer {
    /// The layer the environment provides, read through `get`.
    pub fn from_env(get: impl Fn(&str) -> Option<String>) -> Self {
        let nonempty = |k| get(k).filter(|v: &String| !v.trim().is_empty());
        Layer {
            llm_endpoint: nonempty(ENV_ENDPOINT),
            llm_api_key: nonempty(ENV_API_KEY),
            llm_model: nonempty(ENV_MODEL),
            ..Layer::default()
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, InstanceError> {
        let bytes = read(path)?;
        serde_json::from_slice(&bytes).map_err(|e| InstanceError::Invalid {
            path: path.into(),
            message: e.to_string(),
        })
    }

    fn apply(self, s: &mut Settings) {
        let e = &mut s.engine;
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    e.$field = v;
                }
            )*};
        }
        set!(
            backend,
            planner,
            max_revisions,
            max_restarts,
            demo_k,
            link_threshold,
            categorical_k,
            seed,
            exec_timeout_s,
            parallelism,
            prompt_documents
        );
        if self.fixtures_path.is_some() {
            e.fixtures_path = self.fixtures_path;
        }
        let r = &mut s.remote;
        if self.llm_endpoint.is_some() {
            r.endpoint = self.llm_endpoint;
        }
        if self.llm_api_key.is_some() {
            r.api_key = self.llm_api_key;
        }
        if let Some(m) = self.llm_model {
            r.model = m;
        }
        if let Some(n) = self.max_in_flight {
            r.max_in_flight = n;
        }
        if let Some(t) = self.request_timeout_s {
            r.request_timeout_s = t;
        }
    }
}

/// Defaults overlaid by `env`, then `file`, then `flags`; validated.
pub fn resolve(env: Layer, file: Option<Layer>, flags: Layer) -> Result<Settings, String> {
    let mut s = Settings::default();
    env.apply(&mut s);
    if let Some(f) = file {
        f.apply(&mut s);
    }
    flags.apply(&mut s);
    s.engine.validate()?;
    if s.remote.max_in_flight == 0 {
        return Err("max_in_flight must be positive".into());
    }
    Ok(s)
}
