//! Aspect-preserving normalization of profile drawings onto a fixed canvas.

use super::IngestError;

/// Side of the square canvas every profile is normalized onto.
pub const CANVAS_SIDE: usize = 128;
/// Length of a normalized profile vector.
pub const PROFILE_LEN: usize = CANVAS_SIDE * CANVAS_SIDE;

/// A grayscale raster with intensities in `[0, 1]` (0 = black, 1 = white).
#[derive(Debug, Clone, PartialEq)]
pub struct Bitmap {
    width: usize,
    height: usize,
    intensity: Vec<f64>,
}

impl Bitmap {
    pub fn new(width: usize, height: usize, intensity: Vec<f64>) -> Result<Self, IngestError> {
        if width == 0 || height == 0 || intensity.len() != width * height {
            return Err(IngestError::BadBitmap { width, height, len: intensity.len() });
        }
        Ok(Self { width, height, intensity })
    }

    /// Builds a bitmap from an ink mask (`true` = ink, drawn black).
    pub fn from_mask(width: usize, height: usize, ink: impl Fn(usize, usize) -> bool) -> Self {
        let mut intensity = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                intensity.push(if ink(x, y) { 0.0 } else { 1.0 });
            }
        }
        Self { width, height, intensity }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.intensity[y * self.width + x]
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensity
    }

    /// Converts 8-bit luma samples.
    pub fn from_luma8(width: usize, height: usize, luma: &[u8]) -> Result<Self, IngestError> {
        Self::new(width, height, luma.iter().map(|&v| f64::from(v) / 255.0).collect())
    }

    /// Converts packed 8-bit RGB samples with 0.299/0.587/0.114 luma weights.
    pub fn from_rgb8(width: usize, height: usize, rgb: &[u8]) -> Result<Self, IngestError> {
        let intensity = rgb
            .chunks_exact(3)
            .map(|p| {
                (0.299 * f64::from(p[0]) + 0.587 * f64::from(p[1]) + 0.114 * f64::from(p[2])) / 255.0
            })
            .collect();
        Self::new(width, height, intensity)
    }
}

/// Inclusive-exclusive pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct BoundingBox {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl BoundingBox {
    pub fn width(&self) -> usize {
        self.x1 - self.x0
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0
    }
}

pub(crate) fn ink_bounding_box(ink: &[bool], width: usize) -> Option<BoundingBox> {
    let mut bb: Option<BoundingBox> = None;
    for (i, _) in ink.iter().enumerate().filter(|(_, &v)| v) {
        let (x, y) = (i % width, i / width);
        bb = Some(match bb {
            None => BoundingBox { x0: x, y0: y, x1: x + 1, y1: y + 1 },
            Some(b) => BoundingBox {
                x0: b.x0.min(x),
                y0: b.y0.min(y),
                x1: b.x1.max(x + 1),
                y1: b.y1.max(y + 1),
            },
        });
    }
    bb
}

/// Target extent of the scaled crop: the longer side becomes `side`, the
/// shorter one is rounded, never below one pixel.
pub(crate) fn scaled_extent(width: usize, height: usize, side: usize) -> (usize, usize) {
    let long = width.max(height) as f64;
    let scale = |v: usize| ((v as f64 * side as f64 / long).round() as usize).clamp(1, side);
    if width >= height {
        (side, scale(height))
    } else {
        (scale(width), side)
    }
}

/// Overlap weights of every output cell with the source cells along one axis.
///
/// Output cell `o` covers `[o * len_in / len_out, (o + 1) * len_in / len_out)`
/// in source coordinates; weights are overlap lengths divided by that span
/// so they sum to one.
fn area_weights(len_in: usize, len_out: usize) -> Vec<Vec<(usize, f64)>> {
    let span = len_in as f64 / len_out as f64;
    (0..len_out)
        .map(|o| {
            let lo = o as f64 * span;
            let hi = (o + 1) as f64 * span;
            let first = lo.floor() as usize;
            let last = (hi.ceil() as usize).min(len_in);
            (first..last)
                .filter_map(|s| {
                    let overlap = hi.min((s + 1) as f64) - lo.max(s as f64);
                    (overlap > 0.0).then_some((s, overlap / span))
                })
                .collect()
        })
        .collect()
}

/// Area-averaging resample of a coverage raster (separable, rows then columns).
pub(crate) fn resample_area(
    src: &[f64],
    width: usize,
    height: usize,
    out_w: usize,
    out_h: usize,
) -> Vec<f64> {
    let wx = area_weights(width, out_w);
    let wy = area_weights(height, out_h);

    let mut rows = vec![0.0; out_w * height];
    for y in 0..height {
        let line = &src[y * width..(y + 1) * width];
        for (ox, weights) in wx.iter().enumerate() {
            rows[y * out_w + ox] = weights.iter().map(|&(s, w)| w * line[s]).sum();
        }
    }

    let mut out = vec![0.0; out_w * out_h];
    for (oy, weights) in wy.iter().enumerate() {
        for ox in 0..out_w {
            let v: f64 = weights.iter().map(|&(s, w)| w * rows[s * out_w + ox]).sum();
            out[oy * out_w + ox] = v.clamp(0.0, 1.0);
        }
    }
    out
}

/// Normalizes a drawing onto the square canvas.
///
/// Pixels darker than `threshold` are ink. The ink bounding box is cropped,
/// scaled so its longer side spans the canvas and centred, with any odd
/// leftover padding column or row going to the right or bottom. Output is
/// row-major ink coverage: 1.0 is ink, 0.0 background.
pub fn normalize_image(raw: &Bitmap, threshold: f64) -> Result<Vec<f64>, IngestError> {
    normalize_onto(raw, threshold, CANVAS_SIDE)
}

pub(crate) fn normalize_onto(raw: &Bitmap, threshold: f64, side: usize) -> Result<Vec<f64>, IngestError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(IngestError::BadThreshold(threshold));
    }
    let ink: Vec<bool> = raw.intensity.iter().map(|&v| v < threshold).collect();
    let bb = ink_bounding_box(&ink, raw.width).ok_or(IngestError::EmptyImage)?;

    let (cw, ch) = (bb.width(), bb.height());
    let mut crop = Vec::with_capacity(cw * ch);
    for y in bb.y0..bb.y1 {
        crop.extend(ink[y * raw.width + bb.x0..y * raw.width + bb.x1].iter().map(|&b| f64::from(u8::from(b))));
    }

    let (out_w, out_h) = scaled_extent(cw, ch, side);
    let scaled = resample_area(&crop, cw, ch, out_w, out_h);

    let left = (side - out_w) / 2;
    let top = (side - out_h) / 2;
    let mut canvas = vec![0.0; side * side];
    for y in 0..out_h {
        let dst = (top + y) * side + left;
        canvas[dst..dst + out_w].copy_from_slice(&scaled[y * out_w..(y + 1) * out_w]);
    }
    Ok(canvas)
}

/// Snaps coverage values to {0, 1} at 0.5.
pub fn rebinarize(pixels: &mut [f64]) {
    for p in pixels {
        *p = if *p >= 0.5 { 1.0 } else { 0.0 };
    }
}
