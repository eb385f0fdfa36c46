//! On-disk catalog of configurations and their cached leading coefficients.
//!
//! One JSON file maps canonical configuration strings to entries. Writes go to a
//! sibling temporary file which is then renamed over the catalog, so readers
//! never observe a partial file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::configurations::{dual, Configuration};
use crate::ctengine::{linear_form_model, ENGINE_VERSION};
use crate::error::{Error, Result};

pub const CACHE_DIR_ENV: &str = "CELLFORM_CACHE_DIR";
pub const CATALOG_FILE: &str = "catalog.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub configuration: String,
    pub n_points: usize,
    pub convergent: bool,
    /// Interval model, present for convergent configurations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<Vec<(u32, u32)>>,
    /// `J(0), J(1), ...` as decimal strings.
    #[serde(default)]
    pub terms: Vec<String>,
    pub engine_version: String,
    pub dual: String,
}

impl CatalogEntry {
    pub fn for_configuration(c: &Configuration) -> Result<Self> {
        let c = c.canonical();
        let convergent = c.is_convergent();
        let intervals = if convergent { Some(linear_form_model(&c)?.factors().to_vec()) } else { None };
        Ok(CatalogEntry {
            configuration: c.key(),
            n_points: c.n_points(),
            convergent,
            intervals,
            terms: Vec::new(),
            engine_version: ENGINE_VERSION.to_string(),
            dual: dual(&c).key(),
        })
    }

    pub fn parsed_terms(&self) -> Result<Vec<BigInt>> {
        self.terms
            .iter()
            .map(|t| t.parse::<BigInt>().map_err(|e| Error::Parse(format!("term {t:?}: {e}"))))
            .collect()
    }
}

pub type CatalogMap = BTreeMap<String, CatalogEntry>;

#[derive(Clone, Debug)]
pub struct Catalog {
    path: PathBuf,
}

impl Catalog {
    /// Catalog stored in `dir/catalog.json`; the directory is created on first write.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        Catalog { path: dir.as_ref().join(CATALOG_FILE) }
    }

    pub fn at_path(path: impl Into<PathBuf>) -> Self {
        Catalog { path: path.into() }
    }

    /// `$CELLFORM_CACHE_DIR`, else `$XDG_CACHE_HOME/cellform`, else `~/.cache/cellform`.
    pub fn default_dir() -> PathBuf {
        if let Some(dir) = std::env::var_os(CACHE_DIR_ENV) {
            return PathBuf::from(dir);
        }
        if let Some(dir) = std::env::var_os("XDG_CACHE_HOME") {
            return PathBuf::from(dir).join("cellform");
        }
        match std::env::var_os("HOME") {
            Some(home) => PathBuf::from(home).join(".cache").join("cellform"),
            None => std::env::temp_dir().join("cellform"),
        }
    }

    pub fn open_default() -> Result<Self> {
        Ok(Catalog::in_dir(Self::default_dir()))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn load(&self) -> Result<CatalogMap> {
        match fs::read_to_string(&self.path) {
            Ok(text) => Ok(serde_json::from_str(&text)?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(CatalogMap::new()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&self, map: &CatalogMap) -> Result<()> {
        write_atomic(&self.path, &to_json(map)?)
    }

    /// Cached terms for `c` from the current engine version; empty if absent or stale.
    pub fn cached_terms(&self, c: &Configuration) -> Result<Vec<BigInt>> {
        let map = self.load()?;
        match map.get(&c.canonical().key()) {
            Some(entry) if entry.engine_version == ENGINE_VERSION => entry.parsed_terms(),
            _ => Ok(Vec::new()),
        }
    }

    /// Record `terms` for `c`, replacing a stale or shorter entry.
    pub fn store_terms(&self, c: &Configuration, terms: &[BigInt]) -> Result<()> {
        let mut map = self.load()?;
        let key = c.canonical().key();
        let fresh = match map.remove(&key) {
            Some(entry) if entry.engine_version == ENGINE_VERSION => entry,
            _ => CatalogEntry::for_configuration(c)?,
        };
        let mut entry = fresh;
        if terms.len() > entry.terms.len() {
            entry.terms = terms.iter().map(BigInt::to_string).collect();
        }
        map.insert(key, entry);
        self.save(&map)
    }

    /// Add entries for configurations not yet present.
    pub fn insert_configurations<'a>(&self, configs: impl IntoIterator<Item = &'a Configuration>) -> Result<usize> {
        let mut map = self.load()?;
        let mut added = 0;
        for c in configs {
            let key = c.canonical().key();
            if !map.contains_key(&key) {
                map.insert(key, CatalogEntry::for_configuration(c)?);
                added += 1;
            }
        }
        self.save(&map)?;
        Ok(added)
    }
}

pub fn to_json(map: &CatalogMap) -> Result<String> {
    let mut text = serde_json::to_string_pretty(map)?;
    text.push('\n');
    Ok(text)
}

/// Write `contents` to a temporary file next to `path` and rename it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("catalog");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, contents)?;
    if let Err(e) = fs::rename(&tmp, path) {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}
