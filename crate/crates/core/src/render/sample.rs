use std::collections::HashMap;

use super::RenderError;
use crate::anim::{easing_eval, Property, Timeline, Track, Value};
use crate::color::Rgba;
use crate::layout::{Point, PrimId, Primitive, SceneGraph, Shape, Style, Z_OVERLAY};

const PULSE_RADIUS: f64 = 0.06;
const HIGHLIGHT_FILL_ALPHA: u8 = 90;
const HIGHLIGHT_STROKE_WIDTH: f64 = 0.02;

/// A transient shape drawn above the scene while its track is active.
#[derive(Clone, Debug, PartialEq)]
pub struct Overlay {
    /// Target of the track that produced this overlay.
    pub source: PrimId,
    pub shape: Shape,
    pub style: Style,
}

/// The scene at one instant, with every animated property resolved.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub index: usize,
    pub t: f64,
    /// Scene primitives; `base_style` holds the effective style at `t`.
    pub primitives: Vec<Primitive>,
    pub overlays: Vec<Overlay>,
}

impl Frame {
    /// Shapes in paint order: ascending z, ties in list order, overlays last
    /// within their z.
    pub fn draw_list(&self) -> Vec<(&Shape, &Style)> {
        let mut items: Vec<(i32, &Shape, &Style)> = self
            .primitives
            .iter()
            .map(|p| (p.z, &p.shape, &p.base_style))
            .chain(self.overlays.iter().map(|o| (Z_OVERLAY, &o.shape, &o.style)))
            .collect();
        items.sort_by_key(|(z, _, _)| *z);
        items.into_iter().map(|(_, s, st)| (s, st)).collect()
    }
}

/// `ceil(duration * fps)` frame times `k / fps`, treating products within
/// 1e-9 above an integer as that integer.
pub fn frame_times(duration_s: f64, fps: u32) -> Vec<f64> {
    let exact = duration_s * f64::from(fps);
    let mut n = exact.ceil();
    if n - exact > 1.0 - 1e-9 {
        n -= 1.0;
    }
    let n = (n as usize).max(1);
    (0..n).map(|k| k as f64 / f64::from(fps)).collect()
}

/// Value of a track at `t`: held before the first key and after the last,
/// eased with the later key's easing in between.
pub fn track_value(track: &Track, t: f64) -> Value {
    let keys = &track.keys;
    let first = keys.first().expect("tracks have at least one key");
    if t < first.t {
        return first.value;
    }
    let last = keys.last().expect("non-empty");
    if t >= last.t {
        return last.value;
    }
    let i = keys.partition_point(|k| k.t <= t);
    let (k0, k1) = (&keys[i - 1], &keys[i]);
    let u = (t - k0.t) / (k1.t - k0.t);
    let e = easing_eval(k1.easing, u);
    match (k0.value, k1.value) {
        (Value::Real(a), Value::Real(b)) => Value::Real(a + e * (b - a)),
        (Value::Color(a), Value::Color(b)) => Value::Color(a.lerp(b, e)),
        // Mixed kinds never come out of the compiler; step at the key.
        (a, b) => {
            if e < 1.0 {
                a
            } else {
                b
            }
        }
    }
}

/// Samples one timeline over one scene repeatedly.
pub struct Sampler<'a> {
    timeline: &'a Timeline,
    scene: &'a SceneGraph,
    pulse_color: Rgba,
    index: HashMap<&'a PrimId, usize>,
}

impl<'a> Sampler<'a> {
    pub fn new(timeline: &'a Timeline, scene: &'a SceneGraph, pulse_color: Rgba) -> Self {
        let index = scene.primitives.iter().enumerate().map(|(i, p)| (&p.id, i)).collect();
        Sampler { timeline, scene, pulse_color, index }
    }

    pub fn sample(&self, index: usize, t: f64) -> Result<Frame, RenderError> {
        let duration = self.timeline.duration_s;
        if !(0.0..=duration).contains(&t) {
            return Err(RenderError::OutOfRange { t, duration });
        }
        let mut primitives = self.scene.primitives.clone();
        let mut overlays = Vec::new();
        for track in &self.timeline.tracks {
            let Some(&pi) = self.index.get(&track.target) else { continue };
            match track.property {
                Property::Opacity | Property::Fill | Property::Stroke => {
                    let style = &mut primitives[pi].base_style;
                    match (track.property, track_value(track, t)) {
                        (Property::Opacity, Value::Real(v)) => style.opacity = v.clamp(0.0, 1.0),
                        (Property::Fill, Value::Color(c)) => style.fill = c,
                        (Property::Stroke, Value::Color(c)) => style.stroke = c,
                        _ => {}
                    }
                }
                Property::PulsePos if track.is_active(t) => {
                    if let Shape::Segment { p0, p1 } = self.scene.primitives[pi].shape {
                        let p = track_value(track, t).as_real().unwrap_or(0.0);
                        overlays.push(Overlay {
                            source: track.target.clone(),
                            shape: Shape::Circle { center: p0.lerp(p1, p), radius: PULSE_RADIUS },
                            style: Style {
                                fill: self.pulse_color,
                                stroke: self.pulse_color,
                                stroke_width: 0.0,
                                opacity: 1.0,
                            },
                        });
                    }
                }
                Property::HighlightRect { window, stride, per_row } if track.is_active(t) => {
                    if let Shape::CellGrid { origin, cell_size, .. } = self.scene.primitives[pi].shape {
                        let i = track_value(track, t).as_real().unwrap_or(0.0).max(0.0) as u32;
                        let (row, col) = (i / per_row.max(1), i % per_row.max(1));
                        let min = Point::new(
                            origin.x + f64::from(col * stride) * cell_size,
                            origin.y + f64::from(row * stride) * cell_size,
                        );
                        let side = f64::from(window) * cell_size;
                        let c = self.pulse_color;
                        overlays.push(Overlay {
                            source: track.target.clone(),
                            shape: Shape::Rect { min, max: Point::new(min.x + side, min.y + side) },
                            style: Style {
                                fill: Rgba::new(c.r, c.g, c.b, HIGHLIGHT_FILL_ALPHA),
                                stroke: c,
                                stroke_width: HIGHLIGHT_STROKE_WIDTH,
                                opacity: 1.0,
                            },
                        });
                    }
                }
                _ => {}
            }
        }
        Ok(Frame { index, t, primitives, overlays })
    }
}

/// One-off sample; prefer [`Sampler`] for many frames.
pub fn sample_at(
    timeline: &Timeline,
    scene: &SceneGraph,
    pulse_color: Rgba,
    t: f64,
) -> Result<Frame, RenderError> {
    Sampler::new(timeline, scene, pulse_color).sample(0, t)
}
