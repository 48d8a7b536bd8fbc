mod common;

use std::collections::{BTreeSet, HashMap};

use common::{build, directives, images, net_shape, spec_text, Dir};
use nnanim::anim::{plan_dropout, Easing, Property, Track, Value};
use nnanim::layout::{layout_network, LayoutConfig, PrimId, Point, Primitive, Shape, Style};
use nnanim::render::{
    encode_gif, rasterize, track_value, Frame, PixelGrid,
};
use nnanim::spec::{compatibility, parse_spec, validate_network_with, LayerKind};
use nnanim::Rgba;
use proptest::prelude::*;

// ---------- validation ----------

#[derive(Clone, Debug)]
enum Raw {
    Ff(u32),
    Image,
    // `map_size: None` means "whatever arrives".
    Conv { maps: u32, size: Option<u32>, filter: u32 },
    Pool(u32),
}

fn raw_layer() -> impl Strategy<Value = Raw> {
    prop_oneof![
        (1u32..=4).prop_map(Raw::Ff),
        Just(Raw::Image),
        (1u32..=2, prop::option::weighted(0.3, 1u32..=10), 1u32..=7)
            .prop_map(|(maps, size, filter)| Raw::Conv { maps, size, filter }),
        (2u32..=4).prop_map(Raw::Pool),
    ]
}

fn kind(r: &Raw) -> LayerKind {
    match r {
        Raw::Ff(_) => LayerKind::FeedForward,
        Raw::Image => LayerKind::Image,
        Raw::Conv { .. } => LayerKind::Convolutional2D,
        Raw::Pool(_) => LayerKind::MaxPooling2D,
    }
}

// Independent walk: Some(output sizes) when the list should validate.
fn oracle_sizes(layers: &[(Raw, u32)]) -> Option<Vec<Option<u32>>> {
    let allowed = [
        ("Image", "Convolutional2D"),
        ("Image", "FeedForward"),
        ("Convolutional2D", "Convolutional2D"),
        ("Convolutional2D", "MaxPooling2D"),
        ("Convolutional2D", "FeedForward"),
        ("MaxPooling2D", "Convolutional2D"),
        ("MaxPooling2D", "FeedForward"),
        ("FeedForward", "FeedForward"),
    ];
    let name = |r: &Raw| format!("{}", kind(r));
    let mut sizes = Vec::new();
    let mut incoming: Option<u32> = None;
    for (i, (layer, declared)) in layers.iter().enumerate() {
        if i > 0 {
            let pair = (name(&layers[i - 1].0), name(layer));
            if !allowed.iter().any(|&(a, b)| a == pair.0 && b == pair.1) {
                return None;
            }
        }
        let out = match layer {
            Raw::Ff(_) => None,
            Raw::Image => Some(6),
            Raw::Conv { filter, .. } => {
                let input = *declared;
                if incoming.is_some_and(|s| s != input) {
                    return None;
                }
                if *filter > input {
                    return None;
                }
                Some(input - filter + 1)
            }
            Raw::Pool(k) => {
                let input = incoming?;
                if input / k == 0 {
                    return None;
                }
                Some(input / k)
            }
        };
        incoming = out;
        sizes.push(out);
    }
    Some(sizes)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn validate_accepts_exactly_the_oracle(raw in prop::collection::vec(raw_layer(), 2..=6)) {
        // Resolve "whatever arrives" against the oracle's running size.
        let mut layers = Vec::new();
        let mut incoming: Option<u32> = None;
        for r in &raw {
            let declared = match r {
                Raw::Conv { size, .. } => size.or(incoming).unwrap_or(8),
                _ => 0,
            };
            incoming = match r {
                Raw::Ff(_) => None,
                Raw::Image => Some(6),
                Raw::Conv { filter, .. } => declared.checked_sub(*filter).map(|d| d + 1),
                Raw::Pool(k) => incoming.map(|s| s / k).filter(|&s| s > 0),
            };
            layers.push((r.clone(), declared));
        }
        let body: Vec<String> = layers
            .iter()
            .map(|(r, declared)| match r {
                Raw::Ff(u) => format!("layer ff {{ units: {u} }}"),
                Raw::Image => "layer image { source: \"six.pgm\" }".into(),
                Raw::Conv { maps, filter, .. } => format!(
                    "layer conv2d {{ feature_maps: {maps}, map_size: {declared}, filter_size: {filter} }}"
                ),
                Raw::Pool(k) => format!("layer maxpool2d {{ kernel: {k} }}"),
            })
            .collect();
        let src = format!("network {{ {} }} animate forward_pass {{}}", body.join(" "));
        let got = validate_network_with(parse_spec(&src).unwrap(), &images());
        match oracle_sizes(&layers) {
            Some(sizes) => {
                let net = got.unwrap_or_else(|e| panic!("rejected: {e}\n{src}"));
                let resolved: Vec<Option<u32>> = net.layers.iter().map(|l| l.output_size).collect();
                prop_assert_eq!(resolved, sizes);
                for w in net.layers.windows(2) {
                    prop_assert!(compatibility(w[0].kind(), w[1].kind()));
                }
            }
            None => prop_assert!(got.is_err(), "accepted: {}", src),
        }
    }
}

// ---------- layout ----------

fn element_ids(p: &PrimId) -> Option<(usize, usize, usize, usize)> {
    let rest = p.as_str().strip_prefix('E')?;
    let (layers, elems) = rest.split_once('/')?;
    let (i, j) = layers.split_once('-')?;
    let (a, b) = elems.split_once('-')?;
    Some((i.parse().ok()?, j.parse().ok()?, a.parse().ok()?, b.parse().ok()?))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn layout_invariants(shape in net_shape()) {
        let c = build(&format!("{} animate forward_pass {{}}", shape.network()));
        let scene = &c.scene;
        prop_assert_eq!(scene, &layout_network(&c.net, &LayoutConfig::default()));

        for (&i, ids) in &scene.layers {
            let ys: Vec<f64> = ids.iter().map(|id| scene.find(id).unwrap().shape.center().y).collect();
            let mean = ys.iter().sum::<f64>() / ys.len() as f64;
            prop_assert!(mean.abs() < 1e-9, "layer {} mean y {}", i, mean);
        }
        for p in &scene.primitives {
            prop_assert!(scene.view_box.contains(&p.shape.bounds()), "{} escapes", p.id);
        }

        let mut per_pair: HashMap<(usize, usize), usize> = HashMap::new();
        for p in scene.primitives.iter().filter(|p| p.id.as_str().starts_with('E')) {
            let (i, j, a, b) = element_ids(&p.id).expect("edge id");
            *per_pair.entry((i, j)).or_default() += 1;
            let src = &scene.layers[&i][a];
            let dst = &scene.layers[&j][b];
            prop_assert_eq!(dst, &PrimId::neuron(j, b));
            let expected_src = match c.net.layers[i].kind() {
                LayerKind::FeedForward => PrimId::neuron(i, a),
                LayerKind::Image => PrimId::image(i),
                _ => PrimId::feature_map(i, a),
            };
            prop_assert_eq!(src, &expected_src);
            let Shape::Segment { p0, p1 } = p.shape else { panic!("edge is not a segment") };
            prop_assert_eq!(p0, scene.find(src).unwrap().shape.center());
            prop_assert_eq!(p1, scene.find(dst).unwrap().shape.center());
        }
        for i in 0..c.net.layers.len() - 1 {
            let (l, r) = (&c.net.layers[i], &c.net.layers[i + 1]);
            let want = match (l.kind(), r.kind()) {
                (LayerKind::FeedForward, LayerKind::FeedForward) => l.units().unwrap() * r.units().unwrap(),
                (LayerKind::Image, LayerKind::FeedForward) => r.units().unwrap(),
                (_, LayerKind::FeedForward) => l.channels.unwrap() * r.units().unwrap(),
                _ => 0,
            };
            prop_assert_eq!(per_pair.get(&(i, i + 1)).copied().unwrap_or(0), want as usize);
        }
    }
}

// ---------- timeline ----------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn durations_and_track_order(shape in net_shape(), dirs in directives(), pair_s in 0.05f64..3.0) {
        let c = build(&spec_text(&shape, &dirs, pair_s));
        let l = c.net.layers.len() as f64;
        let mut want = 0.0;
        for d in &c.net.spec.directives {
            want += match d {
                nnanim::spec::AnimationDirective::ForwardPass => (l - 1.0) * pair_s,
                nnanim::spec::AnimationDirective::Dropout { .. } => 0.5 * pair_s + (l - 1.0) * pair_s + 0.5 * pair_s,
            };
        }
        prop_assert_eq!(c.timeline.duration_s, want);

        let segs = &c.timeline.segments;
        prop_assert_eq!(segs.len(), dirs.len());
        prop_assert_eq!(segs[0].start_s, 0.0);
        prop_assert_eq!(segs.last().unwrap().end_s, c.timeline.duration_s);
        for w in segs.windows(2) {
            prop_assert_eq!(w[0].end_s, w[1].start_s);
        }
        for s in segs {
            prop_assert!(s.start_s < s.end_s);
        }
        for t in &c.timeline.tracks {
            prop_assert!(!t.keys.is_empty());
            for w in t.keys.windows(2) {
                prop_assert!(w[0].t < w[1].t, "{} {:?}", t.target, t.property);
            }
            prop_assert!(t.start() >= 0.0 && t.end() <= c.timeline.duration_s);
        }
    }
}

// ---------- dropout ----------

fn ff_src(units: &[u32]) -> String {
    let layers: String = units.iter().map(|u| format!("layer ff {{ units: {u} }} ")).collect();
    format!("network {{ {layers} }} animate forward_pass {{}}")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dropout_plans(units in prop::collection::vec(1u32..=12, 2..=4), rate in 0.0f64..1.0, seed: u64) {
        let c = build(&ff_src(&units));
        let a = plan_dropout(&c.net, rate, seed).unwrap();
        prop_assert_eq!(&a, &plan_dropout(&c.net, rate, seed).unwrap());
        prop_assert_eq!(a.layers.len(), units.len() - 1);
        for l in &a.layers {
            let n = units[l.layer] as usize;
            prop_assert_eq!(l.dropped.len(), (rate * n as f64).floor() as usize);
            let distinct: BTreeSet<_> = l.dropped.iter().collect();
            prop_assert_eq!(distinct.len(), l.dropped.len());
            prop_assert!(l.dropped.iter().all(|&j| j < n));
        }
    }

    #[test]
    fn seeds_move_plans(n in 4u32..=12, rate in 0.25f64..0.75, base: u64, others in prop::collection::vec(any::<u64>(), 100)) {
        let c = build(&ff_src(&[n, 2]));
        let p0 = plan_dropout(&c.net, rate, base).unwrap();
        let moved = others.iter().filter(|&&s| s != base).any(|&s| plan_dropout(&c.net, rate, s).unwrap() != p0);
        prop_assert!(moved);
    }

    #[test]
    fn surviving_edges_carry_the_pulses(a in 1u32..=6, b in 1u32..=6, c3 in 1u32..=6, rate in 0.0f64..0.9, seed: u64) {
        let src = format!(
            "network {{ layer ff {{ units: {a} }} layer ff {{ units: {b} }} layer ff {{ units: {c3} }} }} \
             animate dropout {{ rate: {rate:?}, seed: {seed} }}"
        );
        let c = build(&src);
        let plan = plan_dropout(&c.net, rate, seed).unwrap();
        let dropped: BTreeSet<(usize, usize)> =
            plan.layers.iter().flat_map(|l| l.dropped.iter().map(move |&j| (l.layer, j))).collect();
        let sizes = [a as usize, b as usize, c3 as usize];
        let mut want = BTreeSet::new();
        for i in 0..2 {
            for x in 0..sizes[i] {
                for y in 0..sizes[i + 1] {
                    if !dropped.contains(&(i, x)) && !dropped.contains(&(i + 1, y)) {
                        want.insert(format!("E{i}-{}/{x}-{y}", i + 1));
                    }
                }
            }
        }
        let got: BTreeSet<String> = c
            .timeline
            .tracks
            .iter()
            .filter(|t| t.property == Property::PulsePos)
            .map(|t| t.target.as_str().to_string())
            .collect();
        prop_assert_eq!(got, want);
    }
}

// ---------- sampling ----------

proptest! {
    #[test]
    fn fades_are_monotone(a in 0.0f64..=1.0, b in 0.0f64..=1.0, t0 in 0.0f64..5.0, len in 0.01f64..5.0, smooth: bool) {
        let easing = if smooth { Easing::SmoothStep } else { Easing::Linear };
        let track = Track::new(PrimId::neuron(0, 0), Property::Opacity)
            .key(t0, Value::Real(a), Easing::Linear)
            .key(t0 + len, Value::Real(b), easing);
        let vals: Vec<f64> = (0..=64)
            .map(|i| track_value(&track, t0 + len * f64::from(i) / 64.0).as_real().unwrap())
            .collect();
        for w in vals.windows(2) {
            if b >= a {
                prop_assert!(w[1] >= w[0]);
            } else {
                prop_assert!(w[1] <= w[0]);
            }
        }
        prop_assert_eq!(vals[0], a);
        prop_assert_eq!(*vals.last().unwrap(), b);
    }
}

// ---------- raster / svg ----------

fn rect_frame(rects: &[((f64, f64, f64, f64), (u8, u8, u8))]) -> Frame {
    let primitives = rects
        .iter()
        .enumerate()
        .map(|(i, &((x, y, w, h), (r, g, b)))| Primitive {
            id: PrimId::neuron(0, i),
            shape: Shape::Rect { min: Point::new(x, y), max: Point::new(x + w, y + h) },
            base_style: Style { fill: Rgba::rgb(r, g, b), stroke: Rgba::BLACK, stroke_width: 0.0, opacity: 1.0 },
            z: 1,
        })
        .collect();
    Frame { index: 0, t: 0.0, primitives, overlays: vec![] }
}

fn attr(tag: &str, name: &str) -> String {
    let key = format!(" {name}=\"");
    let start = tag.find(&key).unwrap() + key.len();
    tag[start..].split('"').next().unwrap().to_string()
}

fn num(tag: &str, name: &str) -> f64 {
    attr(tag, name).parse().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn raster_matches_svg_on_opaque_rects(
        rects in prop::collection::vec(((-2.0f64..2.0, -1.0f64..1.0, 0.1f64..2.0, 0.1f64..1.5), any::<(u8, u8, u8)>()), 1..6),
        w in 40u32..120,
        h in 30u32..90,
    ) {
        let frame = rect_frame(&rects);
        let vb = nnanim::layout::ViewBox { min: Point::new(-2.0, -1.5), max: Point::new(2.5, 1.5) };
        let bg = Rgba::rgb(28, 28, 28);
        let svg = nnanim::render::emit_svg(&frame, &vb, w, h, bg);
        let grid = rasterize(&frame, &vb, w, h, bg);

        // Viewer semantics: viewBox scaled uniformly and centered.
        let root = svg.lines().next().unwrap();
        let v: Vec<f64> = attr(root, "viewBox").split(' ').map(|s| s.parse().unwrap()).collect();
        let s = (f64::from(w) / v[2]).min(f64::from(h) / v[3]);
        let (tx, ty) = ((f64::from(w) - v[2] * s) / 2.0, (f64::from(h) - v[3] * s) / 2.0);
        let to_px = |x: f64, y: f64| ((x - v[0]) * s + tx, (y - v[1]) * s + ty);
        let painted: Vec<((f64, f64, f64, f64), [u8; 3])> = svg
            .lines()
            .filter(|l| l.starts_with("<rect"))
            .map(|l| {
                let (x0, y0) = to_px(num(l, "x"), num(l, "y"));
                let (x1, y1) = to_px(num(l, "x") + num(l, "width"), num(l, "y") + num(l, "height"));
                let hex = attr(l, "fill");
                let c = u32::from_str_radix(&hex[1..], 16).unwrap();
                ((x0, y0, x1, y1), [(c >> 16) as u8, (c >> 8) as u8, c as u8])
            })
            .collect();
        prop_assert_eq!(painted.len(), rects.len() + 1);

        for py in 0..h {
            for px in 0..w {
                let (cx, cy) = (f64::from(px) + 0.5, f64::from(py) + 0.5);
                let near_edge = painted.iter().any(|&((x0, y0, x1, y1), _)| {
                    let inside_band = |v: f64, lo: f64, hi: f64| v > lo - 1.0 && v < hi + 1.0;
                    inside_band(cx, x0, x1) && inside_band(cy, y0, y1)
                        && ((cx - x0).abs() < 1.0 || (cx - x1).abs() < 1.0 || (cy - y0).abs() < 1.0 || (cy - y1).abs() < 1.0)
                });
                if near_edge {
                    continue;
                }
                let top = painted
                    .iter()
                    .rev()
                    .find(|&&((x0, y0, x1, y1), _)| x0 <= cx && cx < x1 && y0 <= cy && cy < y1)
                    .map_or([28, 28, 28], |p| p.1);
                let got = grid.get(px, py);
                prop_assert_eq!([got[0], got[1], got[2]], top, "pixel {},{}", px, py);
            }
        }
    }
}

// ---------- gif ----------

fn decode(bytes: &[u8]) -> Vec<(u16, u16, Vec<u8>)> {
    let mut opts = gif::DecodeOptions::new();
    opts.set_color_output(gif::ColorOutput::RGBA);
    let mut dec = opts.read_info(bytes).unwrap();
    let mut out = Vec::new();
    while let Some(f) = dec.read_next_frame().unwrap() {
        out.push((f.width, f.height, f.buffer.to_vec()));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn gif_round_trip(
        colors in 1usize..=256,
        w in 1u32..=70,
        h in 1u32..=70,
        count in 1usize..=4,
        seed: u64,
        fps in 1u32..=60,
    ) {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as usize
        };
        let palette: Vec<[u8; 4]> = (0..colors).map(|i| [i as u8, (i * 7) as u8, 255 - i as u8, 255]).collect();
        let frames: Vec<PixelGrid> = (0..count)
            .map(|_| PixelGrid {
                width: w,
                height: h,
                pixels: (0..w * h).map(|_| palette[next() % colors]).collect(),
            })
            .collect();
        let bytes = encode_gif(&frames, fps).unwrap();
        let decoded = decode(&bytes);
        prop_assert_eq!(decoded.len(), frames.len());
        for (f, (dw, dh, buf)) in frames.iter().zip(&decoded) {
            prop_assert_eq!((u32::from(*dw), u32::from(*dh)), (w, h));
            prop_assert_eq!(buf, &f.pixels.concat());
        }
    }
}

#[test]
fn large_noisy_frame_survives_dictionary_resets() {
    let mut state = 1u64;
    let pixels = (0..200 * 150)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let v = (state % 256) as u8;
            [v, v.wrapping_mul(3), 0, 255]
        })
        .collect();
    let g = PixelGrid { width: 200, height: 150, pixels };
    let bytes = encode_gif(std::slice::from_ref(&g), 30).unwrap();
    let decoded = decode(&bytes);
    assert_eq!(decoded[0].2, g.pixels.concat());
}

// ---------- concurrency ----------

#[test]
fn threaded_rendering_matches_sequential() {
    let shape_src = "network { layer image { source: \"six.pgm\" } layer conv2d { feature_maps: 2, map_size: 6, filter_size: 3 } \
                     layer maxpool2d { kernel: 2 } layer ff { units: 4 } layer ff { units: 3 } layer ff { units: 2 } } \
                     animate forward_pass {} animate dropout { rate: 0.5, seed: 5 } \
                     render { fps: 6, width_px: 96, height_px: 54 }";
    let c = build(shape_src);
    assert_eq!(c.frames(1).unwrap(), c.frames(4).unwrap());
    assert_eq!(c.svg_frames(1).unwrap(), c.svg_frames(3).unwrap());
    let seq = c.raster_frames(nnanim::render::Supersample::X4, 1).unwrap();
    assert_eq!(seq, c.raster_frames(nnanim::render::Supersample::X4, 5).unwrap());
    let again = c.frames(2).unwrap();
    assert_eq!(again.len(), c.frame_times().len());
    assert!(again.iter().enumerate().all(|(i, f)| f.index == i));
}

#[test]
fn dropout_directive_in_spec_shapes_are_reachable() {
    // Generated specs must exercise dropout at least sometimes.
    let shape = common::NetShape { start: common::Start::FeedForward, spatial: vec![], ff: vec![3, 3] };
    let src = spec_text(&shape, &[Dir::Dropout { rate: 0.5, seed: 1 }], 1.0);
    assert!(src.contains("animate dropout"));
    build(&src);
}
