use super::sample::Frame;
use super::svg::CELL_INSET;
use crate::color::Rgba;
use crate::layout::{Point, Shape, Style, ViewBox};

/// An RGBA8 image, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PixelGrid {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<[u8; 4]>,
}

impl PixelGrid {
    pub fn filled(width: u32, height: u32, color: [u8; 4]) -> Self {
        PixelGrid { width, height, pixels: vec![color; width as usize * height as usize] }
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 4] {
        self.pixels[(y * self.width + x) as usize]
    }
}

/// Subsamples per pixel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Supersample {
    X1,
    /// A 2x2 grid per pixel, box filtered.
    #[default]
    X4,
}

impl Supersample {
    fn offsets(self) -> &'static [(f64, f64)] {
        match self {
            Supersample::X1 => &[(0.5, 0.5)],
            Supersample::X4 => &[(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)],
        }
    }
}

/// Uniform world-to-pixel transform that fits a view box inside the canvas,
/// centered, with letterbox bars on the slack axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mapping {
    pub origin: Point,
    pub scale: f64,
    pub offset_x: f64,
    pub offset_y: f64,
    pub width_px: u32,
    pub height_px: u32,
}

impl Mapping {
    pub fn new(view_box: &ViewBox, width_px: u32, height_px: u32) -> Self {
        let (w, h) = (f64::from(width_px), f64::from(height_px));
        let scale = (w / view_box.width()).min(h / view_box.height());
        Mapping {
            origin: view_box.min,
            scale,
            offset_x: (w - view_box.width() * scale) / 2.0,
            offset_y: (h - view_box.height() * scale) / 2.0,
            width_px,
            height_px,
        }
    }

    pub fn to_px(&self, p: Point) -> Point {
        Point::new(
            (p.x - self.origin.x) * self.scale + self.offset_x,
            (p.y - self.origin.y) * self.scale + self.offset_y,
        )
    }

    /// The world rectangle that lands on the full canvas.
    pub fn visible_world(&self) -> ViewBox {
        let (w, h) = (f64::from(self.width_px), f64::from(self.height_px));
        ViewBox {
            min: Point::new(
                self.origin.x - self.offset_x / self.scale,
                self.origin.y - self.offset_y / self.scale,
            ),
            max: Point::new(
                self.origin.x + (w - self.offset_x) / self.scale,
                self.origin.y + (h - self.offset_y) / self.scale,
            ),
        }
    }
}

// Coverage tests, all in pixel space.
enum Cover {
    Disc { c: Point, r2: f64 },
    Ring { c: Point, inner2: f64, outer2: f64 },
    Band { p0: Point, dir: Point, len: f64, half: f64 },
    Rect { min: Point, max: Point },
    Border { outer_min: Point, outer_max: Point, inner_min: Point, inner_max: Point },
}

impl Cover {
    fn hit(&self, x: f64, y: f64) -> bool {
        let in_rect = |min: Point, max: Point| min.x <= x && x < max.x && min.y <= y && y < max.y;
        match *self {
            Cover::Disc { c, r2 } => {
                let (dx, dy) = (x - c.x, y - c.y);
                dx * dx + dy * dy <= r2
            }
            Cover::Ring { c, inner2, outer2 } => {
                let (dx, dy) = (x - c.x, y - c.y);
                let d2 = dx * dx + dy * dy;
                inner2 <= d2 && d2 <= outer2
            }
            Cover::Band { p0, dir, len, half } => {
                let (vx, vy) = (x - p0.x, y - p0.y);
                let along = vx * dir.x + vy * dir.y;
                let across = (vx * dir.y - vy * dir.x).abs();
                (0.0..=len).contains(&along) && across <= half
            }
            Cover::Rect { min, max } => in_rect(min, max),
            Cover::Border { outer_min, outer_max, inner_min, inner_max } => {
                in_rect(outer_min, outer_max) && !in_rect(inner_min, inner_max)
            }
        }
    }
}

struct Op {
    cover: Cover,
    rgb: [f32; 3],
    alpha: f32,
    // Pixel bounds, half-open, clipped to the canvas.
    x0: u32,
    y0: u32,
    x1: u32,
    y1: u32,
}

struct OpBuilder<'a> {
    map: &'a Mapping,
    ops: Vec<Op>,
}

impl<'a> OpBuilder<'a> {
    fn push(&mut self, cover: Cover, min: Point, max: Point, color: Rgba, opacity: f64) {
        let alpha = (color.alpha() * opacity) as f32;
        if alpha <= 0.0 {
            return;
        }
        let (w, h) = (self.map.width_px, self.map.height_px);
        let clip = |v: f64, hi: u32| v.clamp(0.0, f64::from(hi)) as u32;
        let op = Op {
            cover,
            rgb: [f32::from(color.r), f32::from(color.g), f32::from(color.b)],
            alpha: alpha.min(1.0),
            x0: clip(min.x.floor(), w),
            y0: clip(min.y.floor(), h),
            x1: clip(max.x.ceil(), w),
            y1: clip(max.y.ceil(), h),
        };
        if op.x0 < op.x1 && op.y0 < op.y1 {
            self.ops.push(op);
        }
    }

    fn fill_rect(&mut self, min: Point, max: Point, color: Rgba, opacity: f64) {
        let (a, b) = (self.map.to_px(min), self.map.to_px(max));
        self.push(Cover::Rect { min: a, max: b }, a, b, color, opacity);
    }

    fn border(&mut self, min: Point, max: Point, style: &Style) {
        if style.stroke_width <= 0.0 {
            return;
        }
        let (a, b) = (self.map.to_px(min), self.map.to_px(max));
        let h = 0.5 * style.stroke_width * self.map.scale;
        let outer_min = Point::new(a.x - h, a.y - h);
        let outer_max = Point::new(b.x + h, b.y + h);
        let cover = Cover::Border {
            outer_min,
            outer_max,
            inner_min: Point::new(a.x + h, a.y + h),
            inner_max: Point::new(b.x - h, b.y - h),
        };
        self.push(cover, outer_min, outer_max, style.stroke, style.opacity);
    }

    fn shape(&mut self, shape: &Shape, style: &Style) {
        let s = self.map.scale;
        match shape {
            Shape::Circle { center, radius } => {
                let c = self.map.to_px(*center);
                let r = radius * s;
                let ext = |e: f64| (Point::new(c.x - e, c.y - e), Point::new(c.x + e, c.y + e));
                let (a, b) = ext(r);
                self.push(Cover::Disc { c, r2: r * r }, a, b, style.fill, style.opacity);
                if style.stroke_width > 0.0 {
                    let h = 0.5 * style.stroke_width * s;
                    let inner = (r - h).max(0.0);
                    let (a, b) = ext(r + h);
                    let cover = Cover::Ring { c, inner2: inner * inner, outer2: (r + h) * (r + h) };
                    self.push(cover, a, b, style.stroke, style.opacity);
                }
            }
            Shape::Rect { min, max } => {
                self.fill_rect(*min, *max, style.fill, style.opacity);
                self.border(*min, *max, style);
            }
            Shape::Segment { p0, p1 } => {
                if style.stroke_width <= 0.0 {
                    return;
                }
                let (a, b) = (self.map.to_px(*p0), self.map.to_px(*p1));
                let (dx, dy) = (b.x - a.x, b.y - a.y);
                let len = (dx * dx + dy * dy).sqrt();
                if len == 0.0 {
                    return;
                }
                let half = 0.5 * style.stroke_width * s;
                let min = Point::new(a.x.min(b.x) - half, a.y.min(b.y) - half);
                let max = Point::new(a.x.max(b.x) + half, a.y.max(b.y) + half);
                let cover = Cover::Band { p0: a, dir: Point::new(dx / len, dy / len), len, half };
                self.push(cover, min, max, style.stroke, style.opacity);
            }
            Shape::CellGrid { origin, cell_size, rows, cols, values } => {
                let inset = CELL_INSET * cell_size;
                for r in 0..*rows {
                    for c in 0..*cols {
                        let fill = match values {
                            Some(v) => Rgba::gray(v[(r * cols + c) as usize]),
                            None => style.fill,
                        };
                        let min = Point::new(
                            origin.x + f64::from(c) * cell_size + inset,
                            origin.y + f64::from(r) * cell_size + inset,
                        );
                        let side = cell_size - 2.0 * inset;
                        self.fill_rect(min, Point::new(min.x + side, min.y + side), fill, style.opacity);
                    }
                }
                let max = Point::new(
                    origin.x + f64::from(*cols) * cell_size,
                    origin.y + f64::from(*rows) * cell_size,
                );
                self.border(*origin, max, style);
            }
        }
    }
}

const BAND_ROWS: u32 = 16;

/// Rasterizes with the default 2x2 supersampling.
pub fn rasterize(
    frame: &Frame,
    view_box: &ViewBox,
    width_px: u32,
    height_px: u32,
    background: Rgba,
) -> PixelGrid {
    rasterize_with(frame, view_box, width_px, height_px, background, Supersample::X4)
}

/// Paints the frame's draw list over the background with source-over alpha
/// compositing, evaluating coverage per subsample and box filtering.
///
/// A translucent background is first composited over black so the output is
/// always opaque.
pub fn rasterize_with(
    frame: &Frame,
    view_box: &ViewBox,
    width_px: u32,
    height_px: u32,
    background: Rgba,
    supersample: Supersample,
) -> PixelGrid {
    let map = Mapping::new(view_box, width_px, height_px);
    let mut builder = OpBuilder { map: &map, ops: Vec::new() };
    for (shape, style) in frame.draw_list() {
        builder.shape(shape, style);
    }
    let ops = builder.ops;

    let offsets = supersample.offsets();
    let n = offsets.len();
    let ba = background.alpha() as f32;
    let bg = [
        f32::from(background.r) * ba,
        f32::from(background.g) * ba,
        f32::from(background.b) * ba,
    ];
    let w = width_px as usize;
    let mut out = Vec::with_capacity(w * height_px as usize);
    let mut buf = vec![bg; w * BAND_ROWS as usize * n];

    let mut y0 = 0;
    while y0 < height_px {
        let y1 = (y0 + BAND_ROWS).min(height_px);
        buf.fill(bg);
        for op in ops.iter().filter(|op| op.y0 < y1 && op.y1 > y0) {
            let keep = 1.0 - op.alpha;
            for py in op.y0.max(y0)..op.y1.min(y1) {
                let row = (py - y0) as usize * w;
                for px in op.x0..op.x1 {
                    let base = (row + px as usize) * n;
                    for (k, (ox, oy)) in offsets.iter().enumerate() {
                        if op.cover.hit(f64::from(px) + ox, f64::from(py) + oy) {
                            let s = &mut buf[base + k];
                            for c in 0..3 {
                                s[c] = op.rgb[c] * op.alpha + s[c] * keep;
                            }
                        }
                    }
                }
            }
        }
        for py in y0..y1 {
            let row = (py - y0) as usize * w;
            for px in 0..w {
                let samples = &buf[(row + px) * n..(row + px + 1) * n];
                let mut px_rgba = [0u8, 0, 0, 255];
                for c in 0..3 {
                    let sum: f32 = samples.iter().map(|s| s[c]).sum();
                    px_rgba[c] = (sum / n as f32).round().clamp(0.0, 255.0) as u8;
                }
                out.push(px_rgba);
            }
        }
        y0 = y1;
    }
    PixelGrid { width: width_px, height: height_px, pixels: out }
}
