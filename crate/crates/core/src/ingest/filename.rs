//! Catalogue metadata carried in profile filenames.
//!
//! Profiles are named `IDCAT-PAGNUM.FIGID.png`: a catalogue id, the page
//! of the catalogue the drawing comes from, and the figure id on that page.
//! Figure ids are free-form and may contain dots and spaces.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IngestError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProfileMeta {
    pub catalogue_id: String,
    pub page: String,
    pub figure_id: String,
    pub source_path: String,
}

impl ProfileMeta {
    /// Rebuilds the basename this metadata was parsed from.
    ///
    /// The extension is taken from `source_path` so that `.PNG` files round-trip.
    pub fn file_name(&self) -> String {
        let ext = Path::new(&self.source_path)
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("png");
        format!("{}-{}.{}.{}", self.catalogue_id, self.page, self.figure_id, ext)
    }
}

/// Parses `IDCAT-PAGNUM.FIGID.png` into its components.
///
/// `filename` may be a full path; only the basename is parsed, but the
/// argument is kept verbatim as `source_path`.
pub fn parse_profile_id(filename: &str) -> Result<ProfileMeta, IngestError> {
    let malformed = |reason: &str| IngestError::MalformedFilename {
        name: filename.to_string(),
        reason: reason.to_string(),
    };

    let base = Path::new(filename)
        .file_name()
        .and_then(|b| b.to_str())
        .ok_or_else(|| malformed("no basename"))?;

    let stem = match base.len().checked_sub(4) {
        Some(cut) if base.is_char_boundary(cut) && base[cut..].eq_ignore_ascii_case(".png") => {
            &base[..cut]
        }
        _ => return Err(malformed("extension is not .png")),
    };

    let mut parts = stem.split('-');
    let (catalogue_id, rest) = match (parts.next(), parts.next(), parts.next()) {
        (Some(cat), Some(rest), None) => (cat, rest),
        (_, None, _) => return Err(malformed("missing '-' after catalogue id")),
        _ => return Err(malformed("more than one '-'")),
    };
    let (page, figure_id) = rest
        .split_once('.')
        .ok_or_else(|| malformed("missing '.' between page and figure id"))?;

    if catalogue_id.is_empty() {
        return Err(malformed("empty catalogue id"));
    }
    if page.is_empty() {
        return Err(malformed("empty page"));
    }
    if figure_id.is_empty() {
        return Err(malformed("empty figure id"));
    }

    Ok(ProfileMeta {
        catalogue_id: catalogue_id.to_string(),
        page: page.to_string(),
        figure_id: figure_id.to_string(),
        source_path: filename.to_string(),
    })
}
