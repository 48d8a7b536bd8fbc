use std::fmt::Write;

use super::raster::Mapping;
use super::sample::Frame;
use crate::color::Rgba;
use crate::layout::{Point, Shape, Style, ViewBox};

/// Fraction of a cell left blank on each side so grid lines show through.
pub(crate) const CELL_INSET: f64 = 0.06;

/// Fixed 4-decimal formatting, round-half-even on the exact binary value,
/// with negative zero printed as `0.0000`.
pub fn fmt_real(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

fn paint(out: &mut String, kind: &str, color: Rgba, opacity: f64) {
    let _ = write!(
        out,
        " {kind}=\"{}\" {kind}-opacity=\"{}\"",
        color.hex6(),
        fmt_real(color.alpha() * opacity)
    );
}

fn stroke_attrs(out: &mut String, style: &Style) {
    if style.stroke_width > 0.0 {
        paint(out, "stroke", style.stroke, style.opacity);
        let _ = write!(out, " stroke-width=\"{}\"", fmt_real(style.stroke_width));
    }
}

fn rect(out: &mut String, min: Point, w: f64, h: f64) {
    let _ = write!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"",
        fmt_real(min.x),
        fmt_real(min.y),
        fmt_real(w),
        fmt_real(h)
    );
}

/// Serializes a frame as a standalone SVG 1.1 document.
///
/// The world view box becomes the `viewBox`; the background rect covers the
/// whole letterboxed canvas, matching the rasterizer.
pub fn emit_svg(
    frame: &Frame,
    view_box: &ViewBox,
    width_px: u32,
    height_px: u32,
    background: Rgba,
) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width_px}\" height=\"{height_px}\" viewBox=\"{} {} {} {}\">",
        fmt_real(view_box.min.x),
        fmt_real(view_box.min.y),
        fmt_real(view_box.width()),
        fmt_real(view_box.height()),
    );

    let canvas = Mapping::new(view_box, width_px, height_px).visible_world();
    rect(&mut out, canvas.min, canvas.width(), canvas.height());
    paint(&mut out, "fill", background, 1.0);
    out.push_str("/>\n");

    for (shape, style) in frame.draw_list() {
        match shape {
            Shape::Circle { center, radius } => {
                let _ = write!(
                    out,
                    "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"",
                    fmt_real(center.x),
                    fmt_real(center.y),
                    fmt_real(*radius)
                );
                paint(&mut out, "fill", style.fill, style.opacity);
                stroke_attrs(&mut out, style);
                out.push_str("/>\n");
            }
            Shape::Rect { min, max } => {
                rect(&mut out, *min, max.x - min.x, max.y - min.y);
                paint(&mut out, "fill", style.fill, style.opacity);
                stroke_attrs(&mut out, style);
                out.push_str("/>\n");
            }
            Shape::Segment { p0, p1 } => {
                let _ = write!(
                    out,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"",
                    fmt_real(p0.x),
                    fmt_real(p0.y),
                    fmt_real(p1.x),
                    fmt_real(p1.y)
                );
                stroke_attrs(&mut out, style);
                out.push_str("/>\n");
            }
            Shape::CellGrid { origin, cell_size, rows, cols, values } => {
                let inset = CELL_INSET * cell_size;
                let side = cell_size - 2.0 * inset;
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
                        rect(&mut out, min, side, side);
                        paint(&mut out, "fill", fill, style.opacity);
                        out.push_str("/>\n");
                    }
                }
                rect(&mut out, *origin, f64::from(*cols) * cell_size, f64::from(*rows) * cell_size);
                out.push_str(" fill=\"none\"");
                stroke_attrs(&mut out, style);
                out.push_str("/>\n");
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{PrimId, Primitive};

    fn frame(prims: Vec<Primitive>) -> Frame {
        Frame { index: 0, t: 0.0, primitives: prims, overlays: vec![] }
    }

    fn vb() -> ViewBox {
        ViewBox { min: Point::new(-1.0, -1.0), max: Point::new(1.0, 1.0) }
    }

    #[test]
    fn formatting_rules() {
        assert_eq!(fmt_real(0.15625), "0.1562");
        assert_eq!(fmt_real(0.46875), "0.4688");
        assert_eq!(fmt_real(-0.00001), "0.0000");
        assert_eq!(fmt_real(-0.0), "0.0000");
        assert_eq!(fmt_real(-1.5), "-1.5000");
        assert_eq!(fmt_real(2.0), "2.0000");
    }

    #[test]
    fn white_circle_line() {
        let f = frame(vec![Primitive {
            id: PrimId::neuron(0, 0),
            shape: Shape::Circle { center: Point::new(0.0, 0.0), radius: 0.2 },
            base_style: Style { fill: Rgba::WHITE, stroke: Rgba::WHITE, stroke_width: 0.0, opacity: 1.0 },
            z: 1,
        }]);
        let svg = emit_svg(&f, &vb(), 100, 100, Rgba::BLACK);
        assert!(svg.contains(
            "<circle cx=\"0.0000\" cy=\"0.0000\" r=\"0.2000\" fill=\"#FFFFFF\" fill-opacity=\"1.0000\"/>"
        ));
    }

    #[test]
    fn empty_frame_is_background_only() {
        let svg = emit_svg(&frame(vec![]), &vb(), 200, 100, Rgba::rgb(0x1C, 0x1C, 0x1C));
        assert_eq!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"200\" height=\"100\" viewBox=\"-1.0000 -1.0000 2.0000 2.0000\">\n\
             <rect x=\"-2.0000\" y=\"-1.0000\" width=\"4.0000\" height=\"2.0000\" fill=\"#1C1C1C\" fill-opacity=\"1.0000\"/>\n\
             </svg>\n"
        );
        assert_eq!(svg.matches("<rect").count(), 1);
    }
}
