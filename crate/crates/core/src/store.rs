//! On-disk dataset store.
//!
//! ```text
//! <store>/manifest.json        name, fingerprint, columns
//! <store>/data.csv             the table, nulls as empty fields
//! <store>/summaries.json       one MomentSummary per column
//! <store>/sketches/manifest.json
//! <store>/sketches/col<id>.hps one hyperplane sketch per numeric column
//! ```

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{ingest_csv_with_kinds, write_csv, ColumnKind, CsvOptions, Dataset};
use crate::error::{Error, Result};
use crate::moments::MomentSummary;
use crate::query::{Engine, EngineConfig};
use crate::sketch::{read_sketch, write_sketch, HyperplaneSketch};

pub const STORE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnEntry {
    pub name: String,
    pub kind: ColumnKind,
    pub valid_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreManifest {
    pub format_version: u32,
    pub name: String,
    pub fingerprint: String,
    pub n_rows: usize,
    pub columns: Vec<ColumnEntry>,
}

impl StoreManifest {
    pub fn of(ds: &Dataset) -> Self {
        Self {
            format_version: STORE_FORMAT_VERSION,
            name: ds.name().to_string(),
            fingerprint: ds.fingerprint_hex(),
            n_rows: ds.n_rows(),
            columns: ds
                .columns()
                .iter()
                .map(|c| ColumnEntry {
                    name: c.name().to_string(),
                    kind: c.kind(),
                    valid_count: c.valid_count(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SketchEntry {
    pub column_id: u32,
    pub name: String,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SketchManifest {
    pub k: usize,
    pub seed: u64,
    pub fingerprint: String,
    pub columns: Vec<SketchEntry>,
    pub build_ms: f64,
    /// Bytes of finalized sign vectors (`columns × k / 8`).
    pub sign_bytes: usize,
    /// Bytes of the mergeable accumulators written to disk.
    pub file_bytes: u64,
}

/// A dataset loaded from a store directory.
#[derive(Debug)]
pub struct Store {
    pub dir: PathBuf,
    pub manifest: StoreManifest,
    pub dataset: Dataset,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    std::io::Write::flush(&mut w)?;
    Ok(())
}

impl Store {
    /// Writes `ds` and its summaries into `dir` (created if missing).
    pub fn create(dir: impl AsRef<Path>, ds: Dataset) -> Result<Store> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        let manifest = StoreManifest::of(&ds);
        {
            let mut w = BufWriter::new(File::create(dir.join("data.csv"))?);
            write_csv(&ds, &mut w, &CsvOptions::default())?;
        }
        let summaries: Vec<MomentSummary> =
            ds.columns().iter().map(MomentSummary::of_column).collect();
        write_json(&dir.join("summaries.json"), &summaries)?;
        write_json(&dir.join("manifest.json"), &manifest)?;
        let stale = dir.join("sketches");
        if stale.exists() {
            fs::remove_dir_all(stale)?;
        }
        Ok(Store {
            dir,
            manifest,
            dataset: ds,
        })
    }

    pub fn open(dir: impl AsRef<Path>) -> Result<Store> {
        let dir = dir.as_ref().to_path_buf();
        let manifest: StoreManifest = read_json(&dir.join("manifest.json"))?;
        if manifest.format_version != STORE_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                expected: STORE_FORMAT_VERSION,
                found: manifest.format_version,
            });
        }
        let kinds: Vec<ColumnKind> = manifest.columns.iter().map(|c| c.kind).collect();
        let file = BufReader::new(File::open(dir.join("data.csv"))?);
        let dataset = ingest_csv_with_kinds(&manifest.name, file, &CsvOptions::default(), &kinds)?;
        let found = dataset.fingerprint_hex();
        if found != manifest.fingerprint {
            return Err(Error::FingerprintMismatch {
                expected: manifest.fingerprint,
                found,
            });
        }
        Ok(Store {
            dir,
            manifest,
            dataset,
        })
    }

    pub fn summaries(&self) -> Result<Vec<MomentSummary>> {
        let s: Vec<MomentSummary> = read_json(&self.dir.join("summaries.json"))?;
        if s.len() != self.dataset.n_cols() {
            return Err(Error::Malformed(format!(
                "{} summaries for {} columns",
                s.len(),
                self.dataset.n_cols()
            )));
        }
        Ok(s)
    }

    fn sketch_dir(&self) -> PathBuf {
        self.dir.join("sketches")
    }

    pub fn write_sketches(
        &self,
        sketches: &[HyperplaneSketch],
        build_ms: f64,
    ) -> Result<SketchManifest> {
        let dir = self.sketch_dir();
        fs::create_dir_all(&dir)?;
        let cfg = sketches
            .first()
            .map(|s| s.config)
            .unwrap_or_else(|| crate::sketch::HyperplaneConfig::for_rows(self.dataset.n_rows(), 0));
        let mut columns = Vec::new();
        let mut file_bytes = 0;
        for s in sketches {
            let file = format!("col{}.hps", s.column_id);
            let path = dir.join(&file);
            let mut w = BufWriter::new(File::create(&path)?);
            write_sketch(&mut w, s)?;
            std::io::Write::flush(&mut w)?;
            drop(w);
            file_bytes += fs::metadata(&path)?.len();
            columns.push(SketchEntry {
                column_id: s.column_id,
                name: self.dataset.column(s.column_id as usize).name().to_string(),
                file,
            });
        }
        let manifest = SketchManifest {
            k: cfg.k,
            seed: cfg.seed,
            fingerprint: self.manifest.fingerprint.clone(),
            sign_bytes: sketches.len() * cfg.k.div_ceil(8),
            columns,
            build_ms,
            file_bytes,
        };
        write_json(&dir.join("manifest.json"), &manifest)?;
        Ok(manifest)
    }

    /// Persisted sketches, or `None` when `sketch` has not been run.
    pub fn read_sketches(&self) -> Result<Option<(SketchManifest, Vec<HyperplaneSketch>)>> {
        let dir = self.sketch_dir();
        let path = dir.join("manifest.json");
        if !path.exists() {
            return Ok(None);
        }
        let manifest: SketchManifest = read_json(&path)?;
        if manifest.fingerprint != self.manifest.fingerprint {
            return Err(Error::FingerprintMismatch {
                expected: self.manifest.fingerprint.clone(),
                found: manifest.fingerprint,
            });
        }
        let sketches = manifest
            .columns
            .iter()
            .map(|e| read_sketch(BufReader::new(File::open(dir.join(&e.file))?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Some((manifest, sketches)))
    }

    /// Engine over the stored dataset, reusing persisted sketches when present.
    pub fn engine(self, config: EngineConfig) -> Result<Engine> {
        let sketches = self.read_sketches()?;
        let engine = Engine::new(self.dataset, config);
        match sketches {
            Some((_, s)) => engine.with_hyperplane_sketches(s),
            None => Ok(engine),
        }
    }
}
