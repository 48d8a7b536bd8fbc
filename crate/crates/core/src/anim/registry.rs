use std::collections::BTreeMap;
use std::sync::Arc;

use super::{AnimationError, Easing, Property, Track, Value};
use crate::layout::{PrimId, SceneGraph};
use crate::spec::{LayerKind, ResolvedLayer, StyleSpec, COMPATIBLE_PAIRS};

use LayerKind::*;

/// A half-open time window `[start, end)` in seconds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    pub fn new(start: f64, end: f64) -> Self {
        Window { start, end }
    }

    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn mid(&self) -> f64 {
        self.start + 0.5 * self.len()
    }

    /// Sub-window `i` of `n` equal slices; the last one ends exactly at `end`.
    pub fn slice(&self, i: usize, n: usize) -> Window {
        let step = self.len() / n as f64;
        let start = self.start + i as f64 * step;
        let end = if i + 1 == n { self.end } else { self.start + (i + 1) as f64 * step };
        Window { start, end }
    }
}

/// Everything a pair builder may look at. The element lists may be a filtered
/// subset of the scene's (dropout removes dropped neurons and their edges).
#[derive(Clone, Debug)]
pub struct PairContext<'a> {
    pub from: usize,
    pub source: &'a ResolvedLayer,
    pub dest: &'a ResolvedLayer,
    pub source_elems: Vec<PrimId>,
    pub dest_elems: Vec<PrimId>,
    pub edges: Vec<PrimId>,
    pub style: &'a StyleSpec,
    pub scene: &'a SceneGraph,
}

impl<'a> PairContext<'a> {
    /// The unfiltered context for layers `from` and `from + 1`.
    pub fn full(
        scene: &'a SceneGraph,
        layers: &'a [ResolvedLayer],
        style: &'a StyleSpec,
        from: usize,
    ) -> Self {
        PairContext {
            from,
            source: &layers[from],
            dest: &layers[from + 1],
            source_elems: scene.layer(from).to_vec(),
            dest_elems: scene.layer(from + 1).to_vec(),
            edges: scene.pair_edges(from).to_vec(),
            style,
            scene,
        }
    }

    pub fn kinds(&self) -> (LayerKind, LayerKind) {
        (self.source.kind(), self.dest.kind())
    }

    fn base(&self, id: &PrimId) -> crate::layout::Style {
        self.scene.find(id).expect("context ids come from the scene").base_style
    }
}

pub type PairBuilder = Arc<dyn Fn(&PairContext<'_>, Window) -> Vec<Track> + Send + Sync>;

/// Transition builders keyed by ordered layer-kind pair.
#[derive(Clone)]
pub struct PairAnimationRegistry {
    builders: BTreeMap<(LayerKind, LayerKind), PairBuilder>,
}

impl std::fmt::Debug for PairAnimationRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.builders.keys()).finish()
    }
}

impl PairAnimationRegistry {
    pub fn empty() -> Self {
        PairAnimationRegistry { builders: BTreeMap::new() }
    }

    /// One builder for every compatible pair.
    pub fn standard() -> Self {
        let mut r = PairAnimationRegistry::empty();
        for pair in COMPATIBLE_PAIRS {
            let builder: PairBuilder = match pair {
                (FeedForward, FeedForward) => Arc::new(ff_to_ff),
                (_, FeedForward) => Arc::new(spatial_to_ff),
                (Image | MaxPooling2D, Convolutional2D) => Arc::new(into_conv),
                (Convolutional2D, Convolutional2D) => Arc::new(conv_scan),
                (Convolutional2D, MaxPooling2D) => Arc::new(pool_scan),
                other => unreachable!("no standard builder for {other:?}"),
            };
            r.register(pair.0, pair.1, builder);
        }
        r
    }

    /// Adds or replaces the builder for `first -> second`.
    pub fn register(&mut self, first: LayerKind, second: LayerKind, builder: PairBuilder) {
        self.builders.insert((first, second), builder);
    }

    pub fn pairs(&self) -> impl Iterator<Item = (LayerKind, LayerKind)> + '_ {
        self.builders.keys().copied()
    }

    pub fn transition(
        &self,
        ctx: &PairContext<'_>,
        window: Window,
    ) -> Result<Vec<Track>, AnimationError> {
        let (first, second) = ctx.kinds();
        let builder = self
            .builders
            .get(&(first, second))
            .ok_or(AnimationError::UnregisteredPair { first, second })?;
        Ok(builder(ctx, window))
    }
}

impl Default for PairAnimationRegistry {
    fn default() -> Self {
        PairAnimationRegistry::standard()
    }
}

/// Runs the standard transition for the context's layer pair.
pub fn pair_transition(ctx: &PairContext<'_>, window: Window) -> Result<Vec<Track>, AnimationError> {
    PairAnimationRegistry::standard().transition(ctx, window)
}

// Opacity of the source elements eases down to half and back.
const DIP_FACTOR: f64 = 0.5;

fn flash(target: PrimId, property: Property, base: Value, peak: Value, w: Window) -> Track {
    Track::new(target, property)
        .key(w.start, base, Easing::Linear)
        .key(w.mid(), peak, Easing::SmoothStep)
        .key(w.end, base, Easing::SmoothStep)
}

fn dip(ctx: &PairContext<'_>, id: &PrimId, w: Window) -> Track {
    let base = ctx.base(id).opacity;
    flash(
        id.clone(),
        Property::Opacity,
        Value::Real(base),
        Value::Real(base * DIP_FACTOR),
        w,
    )
}

fn ff_to_ff(ctx: &PairContext<'_>, w: Window) -> Vec<Track> {
    let mut out = Vec::with_capacity(2 * ctx.edges.len());
    for e in &ctx.edges {
        out.push(
            Track::new(e.clone(), Property::PulsePos)
                .key(w.start, Value::Real(0.0), Easing::Linear)
                .key(w.end, Value::Real(1.0), Easing::SmoothStep),
        );
        out.push(flash(
            e.clone(),
            Property::Stroke,
            Value::Color(ctx.base(e).stroke),
            Value::Color(ctx.style.pulse_color),
            w,
        ));
    }
    out
}

/// Source maps (or image) dip while destination neurons flash one by one.
fn spatial_to_ff(ctx: &PairContext<'_>, w: Window) -> Vec<Track> {
    let mut out: Vec<Track> = ctx.source_elems.iter().map(|id| dip(ctx, id, w)).collect();
    let n = ctx.dest_elems.len();
    for (j, id) in ctx.dest_elems.iter().enumerate() {
        out.push(flash(
            id.clone(),
            Property::Fill,
            Value::Color(ctx.base(id).fill),
            Value::Color(ctx.style.pulse_color),
            w.slice(j, n),
        ));
    }
    out
}

/// Source dips while destination feature maps flash their outline in turn.
fn into_conv(ctx: &PairContext<'_>, w: Window) -> Vec<Track> {
    let mut out: Vec<Track> = ctx.source_elems.iter().map(|id| dip(ctx, id, w)).collect();
    let n = ctx.dest_elems.len();
    for (k, id) in ctx.dest_elems.iter().enumerate() {
        out.push(flash(
            id.clone(),
            Property::Stroke,
            Value::Color(ctx.base(id).stroke),
            Value::Color(ctx.style.pulse_color),
            w.slice(k, n),
        ));
    }
    out
}

/// `steps` evenly spaced Hold keys of the window index, then a final key at
/// the window end.
fn scan_track(target: PrimId, property: Property, steps: u32, w: Window) -> Track {
    let n = steps as usize;
    let mut t = Track::new(target, property);
    for i in 0..n {
        t = t.key(w.slice(i, n).start, Value::Real(i as f64), Easing::Hold);
    }
    t.key(w.end, Value::Real((n - 1) as f64), Easing::Hold)
}

fn scan(ctx: &PairContext<'_>, w: Window, window: u32, stride: u32, per_row: u32) -> Vec<Track> {
    let steps = per_row * per_row;
    let src = Property::HighlightRect { window, stride, per_row };
    let dst = Property::HighlightRect { window: 1, stride: 1, per_row };
    ctx.source_elems
        .iter()
        .map(|id| scan_track(id.clone(), src, steps, w))
        .chain(ctx.dest_elems.iter().map(|id| scan_track(id.clone(), dst, steps, w)))
        .collect()
}

/// The filter window slides over every source map in raster order while the
/// matching output cell lights up on every destination map.
fn conv_scan(ctx: &PairContext<'_>, w: Window) -> Vec<Track> {
    let filter = match ctx.source.spec {
        crate::spec::LayerSpec::Convolutional2D { filter_size, .. } => filter_size,
        _ => unreachable!("conv_scan on a non-conv source"),
    };
    let out = ctx.source.output_size.expect("resolved conv output");
    scan(ctx, w, filter, 1, out)
}

/// Non-overlapping `kernel x kernel` windows over the pool's input.
fn pool_scan(ctx: &PairContext<'_>, w: Window) -> Vec<Track> {
    let kernel = match ctx.dest.spec {
        crate::spec::LayerSpec::MaxPooling2D { kernel } => kernel,
        _ => unreachable!("pool_scan on a non-pool destination"),
    };
    let out = ctx.dest.output_size.expect("resolved pool output");
    scan(ctx, w, kernel, kernel, out)
}
