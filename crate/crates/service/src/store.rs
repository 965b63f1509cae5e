//! Document storage for dashboards and metric series.
//!
//! [`FileStore`] keeps one JSON file per document and replaces files by
//! writing a temporary sibling, syncing it and renaming it over the target,
//! so a reader never sees a half-written document even if the writer dies.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use dashlang_core::metrics::{MetricSeries, MetricsError};
use dashlang_core::model::{parse_model, serialize_model, DashboardModel, ParseError};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelSummary {
    pub id: String,
    pub name: String,
    pub revision: u64,
}

impl From<&DashboardModel> for ModelSummary {
    fn from(m: &DashboardModel) -> Self {
        ModelSummary {
            id: m.id.clone(),
            name: m.name.clone(),
            revision: m.revision,
        }
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("`{0}` not found")]
    NotFound(String),
    #[error("`{0}` already exists")]
    AlreadyExists(String),
    #[error("revision conflict: expected {expected}, stored {actual}")]
    Conflict { expected: u64, actual: u64 },
    #[error("invalid document id `{0}`")]
    InvalidId(String),
    #[error("invalid series: {0}")]
    InvalidSeries(#[from] MetricsError),
    #[error("stored document `{id}` is unreadable: {reason}")]
    Corrupt { id: String, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Storage interface of the service.
///
/// `put_model` is a compare-and-set: with `expected = Some(r)` it succeeds
/// only if the stored revision is `r`, and stores the model at revision
/// `r + 1`. With `expected = None` it creates a new document at revision 0.
pub trait DocumentStore: Send + Sync + 'static {
    fn get_model(&self, id: &str) -> Result<DashboardModel, StoreError>;
    fn put_model(&self, model: &DashboardModel, expected: Option<u64>) -> Result<u64, StoreError>;
    fn list_models(&self) -> Result<Vec<ModelSummary>, StoreError>;
    fn delete_model(&self, id: &str) -> Result<(), StoreError>;
    fn get_series(&self, id: &str) -> Result<MetricSeries, StoreError>;
    fn put_series(&self, series: &MetricSeries) -> Result<(), StoreError>;
}

/// Ids become file names, so they are restricted to a portable alphabet.
pub fn check_id(id: &str) -> Result<(), StoreError> {
    let ok = !id.is_empty()
        && id.len() <= 128
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if ok {
        Ok(())
    } else {
        Err(StoreError::InvalidId(id.to_string()))
    }
}

fn cas(id: &str, stored: Option<u64>, expected: Option<u64>) -> Result<u64, StoreError> {
    match (stored, expected) {
        (None, None) => Ok(0),
        (Some(_), None) => Err(StoreError::AlreadyExists(id.to_string())),
        (None, Some(_)) => Err(StoreError::NotFound(id.to_string())),
        (Some(actual), Some(expected)) if actual == expected => Ok(expected + 1),
        (Some(actual), Some(expected)) => Err(StoreError::Conflict { expected, actual }),
    }
}

#[derive(Default)]
pub struct MemoryStore {
    models: RwLock<BTreeMap<String, DashboardModel>>,
    series: RwLock<BTreeMap<String, MetricSeries>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }
}

impl DocumentStore for MemoryStore {
    fn get_model(&self, id: &str) -> Result<DashboardModel, StoreError> {
        self.models
            .read()
            .expect("lock")
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(id.to_string()))
    }

    fn put_model(&self, model: &DashboardModel, expected: Option<u64>) -> Result<u64, StoreError> {
        check_id(&model.id)?;
        let mut models = self.models.write().expect("lock");
        let revision = cas(&model.id, models.get(&model.id).map(|m| m.revision), expected)?;
        let mut stored = model.clone();
        stored.revision = revision;
        models.insert(model.id.clone(), stored);
        Ok(revision)
    }

    fn list_models(&self) -> Result<Vec<ModelSummary>, StoreError> {
        Ok(self.models.read().expect("lock").values().map(ModelSummary::from).collect())
    }

    fn delete_model(&self, id: &str) -> Result<(), StoreError> {
        self.models
            .write()
            .expect("lock")
            .remove(id)
            .map(|_| ())
            .ok_or_else(|| StoreError::NotFound(id.to_string()))
    }

    fn get_series(&self, id: &str) -> Result<MetricSeries, StoreError> {
        self.series
            .read()
            .expect("lock")
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(id.to_string()))
    }

    fn put_series(&self, series: &MetricSeries) -> Result<(), StoreError> {
        check_id(&series.id)?;
        series.validate()?;
        self.series.write().expect("lock").insert(series.id.clone(), series.clone());
        Ok(())
    }
}

/// File-backed store rooted at a data directory:
/// `dashboards/<id>.json`, `metrics/<id>.json`, and `quarantine/` for
/// documents that failed to parse at startup.
pub struct FileStore {
    root: PathBuf,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl FileStore {
    /// Open (creating the layout if needed). Dashboards that do not parse are
    /// moved to `quarantine/` and reported; the store opens regardless.
    pub fn open(root: impl Into<PathBuf>) -> Result<(FileStore, Vec<String>), StoreError> {
        let store = FileStore {
            root: root.into(),
            locks: Mutex::new(HashMap::new()),
        };
        for dir in ["dashboards", "metrics", "quarantine"] {
            fs::create_dir_all(store.root.join(dir))?;
        }
        let quarantined = store.sweep()?;
        Ok((store, quarantined))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn dashboards(&self) -> PathBuf {
        self.root.join("dashboards")
    }

    fn model_path(&self, id: &str) -> PathBuf {
        self.dashboards().join(format!("{id}.json"))
    }

    fn series_path(&self, id: &str) -> PathBuf {
        self.root.join("metrics").join(format!("{id}.json"))
    }

    /// Remove stale temporaries and quarantine unreadable dashboards.
    fn sweep(&self) -> Result<Vec<String>, StoreError> {
        let mut quarantined = Vec::new();
        for entry in fs::read_dir(self.dashboards())? {
            let path = entry?.path();
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
            if name.starts_with(".tmp") {
                let _ = fs::remove_file(&path);
                continue;
            }
            if !name.ends_with(".json") {
                continue;
            }
            let problem = match fs::read_to_string(&path) {
                Ok(text) => parse_model(&text).err().map(|e| e.to_string()),
                Err(e) => Some(e.to_string()),
            };
            if let Some(reason) = problem {
                tracing::warn!(file = %path.display(), %reason, "quarantining unreadable dashboard");
                fs::rename(&path, self.root.join("quarantine").join(&name))?;
                quarantined.push(name);
            }
        }
        quarantined.sort();
        Ok(quarantined)
    }

    fn lock(&self, id: &str) -> Arc<Mutex<()>> {
        self.locks
            .lock()
            .expect("lock table")
            .entry(id.to_string())
            .or_default()
            .clone()
    }

    fn read_model(&self, id: &str) -> Result<Option<DashboardModel>, StoreError> {
        match fs::read_to_string(self.model_path(id)) {
            Ok(text) => parse_model(&text).map(Some).map_err(|e: ParseError| StoreError::Corrupt {
                id: id.to_string(),
                reason: e.to_string(),
            }),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }
}

/// Write `contents` to `path` atomically: temp file in the same directory,
/// fsync, rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::Builder::new().prefix(".tmp").tempfile_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

impl DocumentStore for FileStore {
    fn get_model(&self, id: &str) -> Result<DashboardModel, StoreError> {
        check_id(id)?;
        self.read_model(id)?.ok_or_else(|| StoreError::NotFound(id.to_string()))
    }

    fn put_model(&self, model: &DashboardModel, expected: Option<u64>) -> Result<u64, StoreError> {
        check_id(&model.id)?;
        let lock = self.lock(&model.id);
        let _guard = lock.lock().expect("document lock");
        let stored = self.read_model(&model.id)?.map(|m| m.revision);
        let revision = cas(&model.id, stored, expected)?;
        let mut next = model.clone();
        next.revision = revision;
        write_atomic(&self.model_path(&model.id), serialize_model(&next).as_bytes())?;
        Ok(revision)
    }

    fn list_models(&self) -> Result<Vec<ModelSummary>, StoreError> {
        let mut out = Vec::new();
        for entry in fs::read_dir(self.dashboards())? {
            let path = entry?.path();
            let Some(id) = path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_suffix(".json"))
            else {
                continue;
            };
            if id.starts_with('.') {
                continue;
            }
            match self.read_model(id) {
                Ok(Some(m)) => out.push(ModelSummary::from(&m)),
                Ok(None) => {}
                Err(e) => tracing::warn!(%id, error = %e, "skipping unreadable dashboard"),
            }
        }
        out.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(out)
    }

    fn delete_model(&self, id: &str) -> Result<(), StoreError> {
        check_id(id)?;
        let lock = self.lock(id);
        let _guard = lock.lock().expect("document lock");
        fs::remove_file(self.model_path(id)).map_err(|e| match e.kind() {
            io::ErrorKind::NotFound => StoreError::NotFound(id.to_string()),
            _ => e.into(),
        })
    }

    fn get_series(&self, id: &str) -> Result<MetricSeries, StoreError> {
        check_id(id)?;
        match fs::read_to_string(self.series_path(id)) {
            Ok(text) => MetricSeries::from_json(&text).map_err(|e| StoreError::Corrupt {
                id: id.to_string(),
                reason: e.to_string(),
            }),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Err(StoreError::NotFound(id.to_string())),
            Err(e) => Err(e.into()),
        }
    }

    fn put_series(&self, series: &MetricSeries) -> Result<(), StoreError> {
        check_id(&series.id)?;
        series.validate()?;
        let lock = self.lock(&format!("metrics/{}", series.id));
        let _guard = lock.lock().expect("document lock");
        write_atomic(&self.series_path(&series.id), series.to_json().as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dashlang_core::fixtures::sample;

    fn exercise(store: &dyn DocumentStore) {
        let m = sample();
        assert_eq!(store.put_model(&m, None).unwrap(), 0);
        assert!(matches!(store.put_model(&m, None), Err(StoreError::AlreadyExists(_))));
        assert_eq!(store.put_model(&m, Some(0)).unwrap(), 1);
        assert!(matches!(
            store.put_model(&m, Some(0)),
            Err(StoreError::Conflict { expected: 0, actual: 1 })
        ));
        assert_eq!(store.get_model("Dashboard_Sample").unwrap().revision, 1);
        assert_eq!(
            store.list_models().unwrap(),
            [ModelSummary {
                id: "Dashboard_Sample".into(),
                name: "Sample Dashboard".into(),
                revision: 1
            }]
        );
        store.delete_model("Dashboard_Sample").unwrap();
        assert!(matches!(store.get_model("Dashboard_Sample"), Err(StoreError::NotFound(_))));
        assert!(matches!(store.delete_model("Dashboard_Sample"), Err(StoreError::NotFound(_))));
        assert!(matches!(store.get_model("../etc/passwd"), Err(StoreError::InvalidId(_)) | Err(StoreError::NotFound(_))));
    }

    #[test]
    fn memory_store_contract() {
        exercise(&MemoryStore::new());
    }

    #[test]
    fn file_store_contract() {
        let dir = tempfile::tempdir().unwrap();
        let (store, quarantined) = FileStore::open(dir.path()).unwrap();
        assert!(quarantined.is_empty());
        exercise(&store);
    }

    #[test]
    fn corrupt_dashboards_are_quarantined() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir_all(dir.path().join("dashboards")).unwrap();
        fs::write(dir.path().join("dashboards/broken.json"), "{\"id\": ").unwrap();
        fs::write(dir.path().join("dashboards/.tmpabc"), "partial").unwrap();
        let (store, quarantined) = FileStore::open(dir.path()).unwrap();
        assert_eq!(quarantined, ["broken.json"]);
        assert!(dir.path().join("quarantine/broken.json").exists());
        assert!(!dir.path().join("dashboards/.tmpabc").exists());
        assert!(store.list_models().unwrap().is_empty());
    }

    #[test]
    fn ids_are_restricted() {
        assert!(check_id("Dashboard_Sample").is_ok());
        for bad in ["", "../x", ".hidden", "a/b", "a b"] {
            assert!(check_id(bad).is_err(), "{bad}");
        }
    }
}
