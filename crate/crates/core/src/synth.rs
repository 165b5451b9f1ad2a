//! Seeded synthetic shape drawings for demos, benches and end-to-end tests.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::Bitmap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeClass {
    Ellipse,
    Rectangle,
    Annulus,
}

impl ShapeClass {
    pub const ALL: [ShapeClass; 3] = [ShapeClass::Ellipse, ShapeClass::Rectangle, ShapeClass::Annulus];

    /// Catalogue id used in generated filenames.
    pub fn catalogue_id(self) -> &'static str {
        match self {
            ShapeClass::Ellipse => "ELL",
            ShapeClass::Rectangle => "REC",
            ShapeClass::Annulus => "ANN",
        }
    }

    pub fn from_catalogue_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.catalogue_id() == id)
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticShape {
    pub class: ShapeClass,
    pub file_name: String,
    pub bitmap: Bitmap,
}

/// Draws one shape of `class` on a randomly sized white sheet.
///
/// The shape's bounding box has a random aspect ratio in `[0.85, 1]` and sits
/// at a random offset; annuli have an inner radius of 45-65% of the outer one.
pub fn draw_shape(class: ShapeClass, rng: &mut impl Rng) -> Bitmap {
    let width = rng.random_range(60..=160usize);
    let height = rng.random_range(60..=160usize);
    let long = rng.random_range(40..=width.min(height) - 8) as f64;
    let short = long * rng.random_range(0.85..=1.0);
    let (bw, bh) = if rng.random_bool(0.5) { (long, short) } else { (short, long) };
    let x0 = rng.random_range(0.0..=(width as f64 - bw - 1.0));
    let y0 = rng.random_range(0.0..=(height as f64 - bh - 1.0));
    let (cx, cy) = (x0 + bw / 2.0, y0 + bh / 2.0);
    let (ax, ay) = (bw / 2.0, bh / 2.0);
    let inner = rng.random_range(0.45..=0.65);

    Bitmap::from_mask(width, height, |x, y| {
        let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
        let r2 = ((px - cx) / ax).powi(2) + ((py - cy) / ay).powi(2);
        match class {
            ShapeClass::Ellipse => r2 <= 1.0,
            ShapeClass::Rectangle => px >= x0 && px <= x0 + bw && py >= y0 && py <= y0 + bh,
            ShapeClass::Annulus => r2 <= 1.0 && r2 >= inner * inner,
        }
    })
}

/// `per_class` shapes of every class, classes interleaved, all from one seed.
pub fn generate(per_class: usize, seed: u64) -> Vec<SyntheticShape> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(per_class * 3);
    for i in 0..per_class {
        for class in ShapeClass::ALL {
            let bitmap = draw_shape(class, &mut rng);
            let file_name = format!("{}-{}.{}.png", class.catalogue_id(), i / 10 + 1, i % 10 + 1);
            out.push(SyntheticShape { class, file_name, bitmap });
        }
    }
    out
}

/// Writes shapes as 8-bit grayscale PNGs into `dir`.
pub fn write_pngs(shapes: &[SyntheticShape], dir: &Path) -> Result<Vec<PathBuf>, image::ImageError> {
    std::fs::create_dir_all(dir)?;
    shapes
        .iter()
        .map(|s| {
            let b = &s.bitmap;
            let pixels: Vec<u8> = b.intensities().iter().map(|&v| (v * 255.0).round() as u8).collect();
            let img = image::GrayImage::from_raw(b.width() as u32, b.height() as u32, pixels)
                .expect("buffer matches dimensions");
            let path = dir.join(&s.file_name);
            img.save(&path)?;
            Ok(path)
        })
        .collect()
}
