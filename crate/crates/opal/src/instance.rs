//! Task instances on disk.
//!
//! An instance directory holds `instruction.txt`, `docs/*.txt`,
//! `before.json` and, for scored instances, `gold.json`. An optional
//! `meta.json` gives `id`, `task_type` and `domain`, and an optional
//! `fixtures.json` answers extraction calls for the mock backend.
//!
//! A manifest is a JSON document `{"instances": [...]}` whose entries are
//! directory paths (relative to the manifest) or objects
//! `{"dir", "id"?, "task_type"?, "domain"?}`.

use std::fs;
use std::path::{Path, PathBuf};

use opal_core::eval::{TaskInstance, TaskType};
use opal_core::planner::infer_task_type;
use opal_core::tools::FixtureSet;
use serde::Deserialize;

use crate::format::{load_database, load_fixtures, FormatError};

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: FormatError },
    #[error("{}: {message}", path.display())]
    Invalid { path: PathBuf, message: String },
}

pub(crate) fn read(path: &Path) -> Result<Vec<u8>, InstanceError> {
    fs::read(path).map_err(|source| InstanceError::Io {
        path: path.into(),
        source,
    })
}

fn read_text(path: &Path) -> Result<String, InstanceError> {
    String::from_utf8(read(path)?).map_err(|_| InstanceError::Invalid {
        path: path.into(),
        message: "not UTF-8".into(),
    })
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceMeta {
    #[serde(default)]
    pub id: Option<String>,
    #[serde(default)]
    pub task_type: Option<TaskType>,
    #[serde(default)]
    pub domain: Option<String>,
}

impl InstanceMeta {
    fn or(self, other: InstanceMeta) -> InstanceMeta {
        InstanceMeta {
            id: self.id.or(other.id),
            task_type: self.task_type.or(other.task_type),
            domain: self.domain.or(other.domain),
        }
    }
}

/// An instance with the fixtures found next to it.
#[derive(Clone, Debug)]
pub struct LoadedInstance {
    pub dir: PathBuf,
    pub instance: TaskInstance,
    pub fixtures: Option<FixtureSet>,
}

/// Loads the instance in `dir`. `overrides` take precedence over
/// `meta.json`; a missing task type is read off the instruction.
pub fn load_instance(dir: &Path, overrides: InstanceMeta) -> Result<LoadedInstance, InstanceError> {
    let meta_path = dir.join("meta.json");
    let meta = if meta_path.exists() {
        let bytes = read(&meta_path)?;
        serde_json::from_slice::<InstanceMeta>(&bytes).map_err(|e| InstanceError::Invalid {
            path: meta_path.clone(),
            message: e.to_string(),
        })?
    } else {
        InstanceMeta::default()
    };
    let meta = overrides.or(meta);

    let instruction = read_text(&dir.join("instruction.txt"))?.trim().to_string();
    let docs_dir = dir.join("docs");
    let mut doc_paths: Vec<PathBuf> = fs::read_dir(&docs_dir)
        .map_err(|source| InstanceError::Io {
            path: docs_dir.clone(),
            source,
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .collect();
    doc_paths.sort();
    let documents = doc_paths
        .iter()
        .map(|p| read_text(p))
        .collect::<Result<Vec<_>, _>>()?;

    let load_db = |path: PathBuf| -> Result<_, InstanceError> {
        let bytes = read(&path)?;
        load_database(&bytes).map_err(|source| InstanceError::Format { path, source })
    };
    let db_before = load_db(dir.join("before.json"))?;
    let gold_path = dir.join("gold.json");
    let db_gold = if gold_path.exists() {
        Some(load_db(gold_path)?)
    } else {
        None
    };

    let fixtures_path = dir.join("fixtures.json");
    let fixtures = if fixtures_path.exists() {
        let bytes = read(&fixtures_path)?;
        Some(
            load_fixtures(&bytes).map_err(|source| InstanceError::Format {
                path: fixtures_path,
                source,
            })?,
        )
    } else {
        None
    };

    let id = meta.id.unwrap_or_else(|| {
        dir.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "instance".into())
    });
    let instance = TaskInstance {
        id,
        task_type: meta
            .task_type
            .unwrap_or_else(|| infer_task_type(&instruction)),
        instruction,
        documents,
        db_before,
        db_gold,
        domain: meta.domain.unwrap_or_else(|| "general".into()),
    };
    instance
        .validate()
        .map_err(|message| InstanceError::Invalid {
            path: dir.into(),
            message,
        })?;
    Ok(LoadedInstance {
        dir: dir.into(),
        instance,
        fixtures,
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ManifestEntry {
    Dir(String),
    Full {
        dir: String,
        #[serde(flatten)]
        meta: ManifestMeta,
    },
}

#[derive(Deserialize, Default)]
struct ManifestMeta {
    id: Option<String>,
    task_type: Option<TaskType>,
    domain: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    instances: Vec<ManifestEntry>,
}

/// Instance directories and their metadata listed by the manifest at `path`.
pub fn read_manifest(path: &Path) -> Result<Vec<(PathBuf, InstanceMeta)>, InstanceError> {
    let bytes = read(path)?;
    let m: Manifest = serde_json::from_slice(&bytes).map_err(|e| InstanceError::Invalid {
        path: path.into(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(m.instances
        .into_iter()
        .map(|e| match e {
            ManifestEntry::Dir(d) => (base.join(d), InstanceMeta::default()),
            ManifestEntry::Full { dir, meta } => (
                base.join(dir),
                InstanceMeta {
                    id: meta.id,
                    task_type: meta.task_type,
                    domain: meta.domain,
                },
            ),
        })
        .collect())
}
