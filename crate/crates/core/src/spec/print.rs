use std::fmt::Write;

use super::{AnimationDirective, LayerSpec, NetworkSpec, OutputFormat};

/// Writes a spec back out as canonical source text with every parameter
/// spelled out. Parsing the result yields an equal [`NetworkSpec`].
pub fn to_source(spec: &NetworkSpec) -> String {
    let mut out = String::from("network {\n");
    for layer in &spec.layers {
        let body = match layer {
            LayerSpec::Image { source } => format!("source: {}", quote(source)),
            LayerSpec::FeedForward { units } => format!("units: {units}"),
            LayerSpec::Convolutional2D { feature_maps, map_size, filter_size } => format!(
                "feature_maps: {feature_maps}, map_size: {map_size}, filter_size: {filter_size}"
            ),
            LayerSpec::MaxPooling2D { kernel } => format!("kernel: {kernel}"),
        };
        let _ = writeln!(out, "  layer {} {{ {body} }}", layer.kind().keyword());
    }
    out.push_str("}\n");

    for d in &spec.directives {
        match d {
            AnimationDirective::ForwardPass => out.push_str("animate forward_pass {}\n"),
            AnimationDirective::Dropout { rate, seed } => {
                let _ = writeln!(out, "animate dropout {{ rate: {}, seed: {seed} }}", real(*rate));
            }
        }
    }

    let r = &spec.render;
    let _ = writeln!(
        out,
        "render {{ fps: {}, width_px: {}, height_px: {}, pair_duration_s: {}, formats: {} }}",
        r.fps,
        r.width_px,
        r.height_px,
        real(r.pair_duration_s),
        quote(&OutputFormat::join(&r.formats)),
    );
    let s = &spec.style;
    let _ = writeln!(
        out,
        "style {{ background: {}, neuron_fill: {}, neuron_stroke: {}, edge_color: {}, pulse_color: {}, dropped_opacity: {} }}",
        s.background, s.neuron_fill, s.neuron_stroke, s.edge_color, s.pulse_color,
        real(s.dropped_opacity),
    );
    out
}

// Shortest round-tripping representation; always contains `.` or `e`.
fn real(v: f64) -> String {
    format!("{v:?}")
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            '\t' => q.push_str("\\t"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}
