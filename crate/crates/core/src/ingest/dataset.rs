use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::filename::{parse_profile_id, ProfileMeta};
use super::normalize::{normalize_image, rebinarize, Bitmap};
use super::IngestError;

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRecord {
    pub meta: ProfileMeta,
    pub pixels: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub records: Vec<ProfileRecord>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.records.first().map_or(0, |r| r.pixels.len())
    }

    /// Basenames in record order, used as leaf labels downstream.
    pub fn labels(&self) -> Vec<String> {
        self.records.iter().map(|r| r.meta.file_name()).collect()
    }

    /// Row-major `len() x dim()` copy of all pixel vectors.
    pub fn to_rows(&self) -> Vec<f64> {
        self.records.iter().flat_map(|r| r.pixels.iter().copied()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileStatus {
    Ok,
    MalformedName,
    EmptyImage,
    DecodeError,
}

impl fmt::Display for FileStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FileStatus::Ok => "ok",
            FileStatus::MalformedName => "malformed_name",
            FileStatus::EmptyImage => "empty_image",
            FileStatus::DecodeError => "decode_error",
        })
    }
}

impl FromStr for FileStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ok" => Ok(FileStatus::Ok),
            "malformed_name" => Ok(FileStatus::MalformedName),
            "empty_image" => Ok(FileStatus::EmptyImage),
            "decode_error" => Ok(FileStatus::DecodeError),
            other => Err(format!("unknown file status {other:?}")),
        }
    }
}

/// One row of `manifest.csv`. `path` is the basename relative to the input directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub catalogue_id: String,
    pub page: String,
    pub figure_id: String,
    pub status: FileStatus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadOptions {
    pub threshold: f64,
    /// Snap resampled coverage back to {0, 1}.
    pub rebinarize: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self { threshold: 0.5, rebinarize: false }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub dataset: Dataset,
    pub manifest: Vec<ManifestEntry>,
}

impl LoadedDataset {
    pub fn skipped(&self) -> usize {
        self.manifest.iter().filter(|e| e.status != FileStatus::Ok).count()
    }
}

fn decode_png(path: &Path) -> Result<Bitmap, IngestError> {
    let decode_err = |source| IngestError::Decode { path: path.display().to_string(), source };
    let img = image::ImageReader::open(path)?
        .with_guessed_format()?
        .decode()
        .map_err(decode_err)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img {
        image::DynamicImage::ImageLuma8(g) => Bitmap::from_luma8(w, h, g.as_raw()),
        other => Bitmap::from_rgb8(w, h, other.to_rgb8().as_raw()),
    }
}

fn load_one(path: &Path, opts: LoadOptions) -> (ManifestEntry, Option<ProfileRecord>) {
    let base = path.file_name().and_then(|b| b.to_str()).unwrap_or_default().to_string();
    let meta = match parse_profile_id(&path.to_string_lossy()) {
        Ok(meta) => meta,
        Err(_) => {
            let entry = ManifestEntry {
                path: base,
                catalogue_id: String::new(),
                page: String::new(),
                figure_id: String::new(),
                status: FileStatus::MalformedName,
            };
            return (entry, None);
        }
    };
    let mut entry = ManifestEntry {
        path: base,
        catalogue_id: meta.catalogue_id.clone(),
        page: meta.page.clone(),
        figure_id: meta.figure_id.clone(),
        status: FileStatus::Ok,
    };
    let pixels = decode_png(path).and_then(|bmp| normalize_image(&bmp, opts.threshold));
    match pixels {
        Ok(mut pixels) => {
            if opts.rebinarize {
                rebinarize(&mut pixels);
            }
            (entry, Some(ProfileRecord { meta, pixels }))
        }
        Err(IngestError::EmptyImage) => {
            entry.status = FileStatus::EmptyImage;
            (entry, None)
        }
        Err(_) => {
            entry.status = FileStatus::DecodeError;
            (entry, None)
        }
    }
}

fn png_files(root: &Path) -> Result<Vec<PathBuf>, IngestError> {
    let mut files = Vec::new();
    for entry in fs::read_dir(root)? {
        let entry = entry?;
        if !entry.file_type()?.is_file() {
            continue;
        }
        let path = entry.path();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if is_png {
            files.push(path);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

/// Loads every `.png` directly inside `root`, in lexicographic filename order.
///
/// Files that fail to parse or decode are listed in the manifest with their
/// status and left out of the dataset.
pub fn load_dataset(root: &Path, name: &str, opts: LoadOptions) -> Result<LoadedDataset, IngestError> {
    if !(opts.threshold > 0.0 && opts.threshold < 1.0) {
        return Err(IngestError::BadThreshold(opts.threshold));
    }
    let files = png_files(root)?;
    if files.is_empty() {
        return Err(IngestError::EmptyDirectory(root.display().to_string()));
    }

    let loaded: Vec<_> = files.par_iter().map(|p| load_one(p, opts)).collect();
    let mut manifest = Vec::with_capacity(loaded.len());
    let mut records = Vec::new();
    for (entry, record) in loaded {
        manifest.push(entry);
        records.extend(record);
    }
    if records.is_empty() {
        return Err(IngestError::NoUsableProfiles(root.display().to_string()));
    }
    Ok(LoadedDataset { dataset: Dataset { name: name.to_string(), records }, manifest })
}

pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_path(path)?;
    for e in entries {
        w.serialize(e)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, IngestError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}
