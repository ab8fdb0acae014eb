//! Bit-exact PPM rendering of spacetime diagrams.
//!
//! Output is binary PPM (P6): the header `P6\n{width} {height}\n255\n`
//! followed by rows of RGB triples, top row first. White cells render as
//! (255,255,255), grey as (128,128,128), black as (0,0,0). Identical inputs
//! produce identical bytes, which makes the format golden-file testable.

use crate::rule::Color;
use crate::tape::{SpacetimeDiagram, Window};

/// Fixed color map: white, mid-grey, black.
pub const COLOR_MAP: [[u8; 3]; 3] = [[255, 255, 255], [128, 128, 128], [0, 0, 0]];

/// How to map a diagram onto pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageSpec {
    /// Pixels per cell, at least 1.
    pub scale: u32,
    /// Tape index range to render.
    pub window: Window,
}

impl ImageSpec {
    /// Cover the light-cone span of the diagram at unit scale, so every
    /// live cell of every row is inside the image. An all-white diagram
    /// gets a single-column window at the origin.
    pub fn light_cone(diagram: &SpacetimeDiagram) -> ImageSpec {
        ImageSpec {
            scale: 1,
            window: diagram
                .light_cone_window()
                .unwrap_or_else(|| Window::new(0, 1)),
        }
    }

    pub fn with_scale(mut self, scale: u32) -> ImageSpec {
        self.scale = scale.max(1);
        self
    }

    pub fn with_window(mut self, window: Window) -> ImageSpec {
        self.window = window;
        self
    }
}

/// A rendered image plus render metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderOutput {
    /// The complete PPM byte stream.
    pub bytes: Vec<u8>,
    /// True when some live (non-white) cell fell outside the window and was
    /// clipped from the image.
    pub clipped: bool,
}

/// Render the diagram to PPM bytes. Pixel `(r, c)` shows the cell at time
/// `r / scale` and tape index `window.start + c / scale`.
pub fn render_ppm(diagram: &SpacetimeDiagram, spec: &ImageSpec) -> RenderOutput {
    let scale = spec.scale.max(1) as usize;
    let window = spec.window;
    let width = window.len * scale;
    let height = diagram.rows().len() * scale;

    let mut clipped = false;
    for row in diagram.rows() {
        if let Some((lo, hi)) = row.support() {
            if lo < window.start || hi >= window.end() {
                clipped = true;
                break;
            }
        }
    }

    let header = format!("P6\n{width} {height}\n255\n");
    let mut bytes = Vec::with_capacity(header.len() + 3 * width * height);
    bytes.extend_from_slice(header.as_bytes());
    let mut scanline = Vec::with_capacity(3 * width);
    for row in diagram.rows() {
        scanline.clear();
        for index in window.indices() {
            let rgb = COLOR_MAP[row.get(index).index()];
            for _ in 0..scale {
                scanline.extend_from_slice(&rgb);
            }
        }
        for _ in 0..scale {
            bytes.extend_from_slice(&scanline);
        }
    }
    RenderOutput { bytes, clipped }
}
