//! Loading profile drawings into fixed-length vectors.

mod dataset;
mod filename;
mod normalize;

pub use dataset::{
    load_dataset, read_manifest, write_manifest, Dataset, FileStatus, LoadOptions, LoadedDataset,
    ManifestEntry, ProfileRecord,
};
pub use filename::{parse_profile_id, ProfileMeta};
pub use normalize::{normalize_image, rebinarize, Bitmap, CANVAS_SIDE, PROFILE_LEN};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("malformed profile filename {name:?}: {reason}")]
    MalformedFilename { name: String, reason: String },
    #[error("no ink pixel after binarization")]
    EmptyImage,
    #[error("binarization threshold {0} is outside (0, 1)")]
    BadThreshold(f64),
    #[error("bitmap of {width}x{height} cannot hold {len} samples")]
    BadBitmap { width: usize, height: usize, len: usize },
    #[error("no .png files in {0}")]
    EmptyDirectory(String),
    #[error("no profile in {0} could be loaded")]
    NoUsableProfiles(String),
    #[error("cannot decode {path}: {source}")]
    Decode {
        path: String,
        #[source]
        source: image::ImageError,
    },
    #[error("manifest: {0}")]
    Manifest(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
