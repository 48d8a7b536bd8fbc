//! Static placement of every drawable element in world coordinates.
//!
//! World units are abstract and y grows downward, matching SVG. Layers sit
//! left to right at `x = i * layer_spacing` and are vertically centered on
//! `y = 0`. Mapping to pixels happens only at render time.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::color::Rgba;
use crate::spec::{LayerKind, ResolvedLayer, StyleSpec, ValidatedNetwork};

/// Stable identity of a scene primitive, e.g. `L1/n3` or `E0-1/2-4`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PrimId(String);

impl PrimId {
    pub fn neuron(layer: usize, j: usize) -> Self {
        PrimId(format!("L{layer}/n{j}"))
    }

    pub fn feature_map(layer: usize, k: usize) -> Self {
        PrimId(format!("L{layer}/fm{k}"))
    }

    pub fn image(layer: usize) -> Self {
        PrimId(format!("L{layer}/img"))
    }

    pub fn edge(from: usize, to: usize, a: usize, b: usize) -> Self {
        PrimId(format!("E{from}-{to}/{a}-{b}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PrimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(self.x + t * (other.x - self.x), self.y + t * (other.y - self.y))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Circle { center: Point, radius: f64 },
    Rect { min: Point, max: Point },
    Segment { p0: Point, p1: Point },
    /// A `rows x cols` grid of square cells; `values` holds per-cell gray
    /// levels in `[0, 1]` for image layers.
    CellGrid {
        origin: Point,
        cell_size: f64,
        rows: u32,
        cols: u32,
        values: Option<Vec<f64>>,
    },
}

impl Shape {
    /// Axis-aligned geometric bounds, ignoring stroke width.
    pub fn bounds(&self) -> ViewBox {
        match *self {
            Shape::Circle { center, radius } => ViewBox {
                min: Point::new(center.x - radius, center.y - radius),
                max: Point::new(center.x + radius, center.y + radius),
            },
            Shape::Rect { min, max } => ViewBox { min, max },
            Shape::Segment { p0, p1 } => ViewBox {
                min: Point::new(p0.x.min(p1.x), p0.y.min(p1.y)),
                max: Point::new(p0.x.max(p1.x), p0.y.max(p1.y)),
            },
            Shape::CellGrid { origin, cell_size, rows, cols, .. } => ViewBox {
                min: origin,
                max: Point::new(
                    origin.x + f64::from(cols) * cell_size,
                    origin.y + f64::from(rows) * cell_size,
                ),
            },
        }
    }

    /// Geometric center of the shape.
    pub fn center(&self) -> Point {
        match *self {
            Shape::Circle { center, .. } => center,
            Shape::Segment { p0, p1 } => p0.lerp(p1, 0.5),
            _ => {
                let b = self.bounds();
                b.min.lerp(b.max, 0.5)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Style {
    pub fill: Rgba,
    pub stroke: Rgba,
    pub stroke_width: f64,
    pub opacity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Primitive {
    pub id: PrimId,
    pub shape: Shape,
    pub base_style: Style,
    pub z: i32,
}

/// Draw layers: edges under nodes under highlight overlays.
pub const Z_EDGE: i32 = 0;
pub const Z_NODE: i32 = 1;
pub const Z_OVERLAY: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ViewBox {
    pub min: Point,
    pub max: Point,
}

impl ViewBox {
    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn union(&self, other: &ViewBox) -> ViewBox {
        ViewBox {
            min: Point::new(self.min.x.min(other.min.x), self.min.y.min(other.min.y)),
            max: Point::new(self.max.x.max(other.max.x), self.max.y.max(other.max.y)),
        }
    }

    pub fn contains(&self, other: &ViewBox) -> bool {
        self.min.x <= other.min.x
            && self.min.y <= other.min.y
            && other.max.x <= self.max.x
            && other.max.y <= self.max.y
    }
}

/// The edges connecting one adjacent layer pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairEdges {
    pub from: usize,
    pub to: usize,
    pub edges: Vec<PrimId>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SceneGraph {
    pub primitives: Vec<Primitive>,
    pub view_box: ViewBox,
    /// Element ids per layer, top to bottom.
    pub layers: BTreeMap<usize, Vec<PrimId>>,
    /// Edge ids per adjacent pair, in `(source, dest)` lexicographic order.
    pub pairs: Vec<PairEdges>,
}

impl SceneGraph {
    pub fn find(&self, id: &PrimId) -> Option<&Primitive> {
        self.primitives.iter().find(|p| &p.id == id)
    }

    pub fn layer(&self, index: usize) -> &[PrimId] {
        self.layers.get(&index).map_or(&[], Vec::as_slice)
    }

    pub fn pair_edges(&self, from: usize) -> &[PrimId] {
        self.pairs
            .iter()
            .find(|p| p.from == from)
            .map_or(&[], |p| p.edges.as_slice())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayoutConfig {
    pub layer_spacing: f64,
    pub node_spacing: f64,
    pub neuron_radius: f64,
    pub fm_cell: f64,
    pub fm_gap: f64,
    pub margin: f64,
    /// Feature-map stacks taller than this are drawn overlapping.
    pub stack_limit: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            layer_spacing: 2.0,
            node_spacing: 0.6,
            neuron_radius: 0.2,
            fm_cell: 0.12,
            fm_gap: 0.3,
            margin: 0.5,
            stack_limit: 6.0,
        }
    }
}

const NEURON_STROKE_WIDTH: f64 = 0.04;
const GRID_STROKE_WIDTH: f64 = 0.02;
const EDGE_STROKE_WIDTH: f64 = 0.02;
// Horizontal stagger per map, in map widths, when a stack overlaps.
const STACK_STAGGER: f64 = 0.15;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extent {
    pub width: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("cannot fit a view box around an empty scene")]
    EmptyScene,
}

// Vertical placement of a stack of `count` square maps of side `side`.
struct Stack {
    side: f64,
    step: f64,
    stagger: f64,
    count: u32,
}

impl Stack {
    fn new(count: u32, side: f64, cfg: &LayoutConfig) -> Self {
        let m = f64::from(count);
        let plain = m * side + (m - 1.0) * cfg.fm_gap;
        if count <= 1 || plain <= cfg.stack_limit {
            Stack { side, step: side + cfg.fm_gap, stagger: 0.0, count }
        } else {
            let step = ((cfg.stack_limit - side) / (m - 1.0)).max(0.1 * side);
            Stack { side, step, stagger: STACK_STAGGER * side, count }
        }
    }

    fn height(&self) -> f64 {
        self.side + f64::from(self.count - 1) * self.step
    }

    fn width(&self) -> f64 {
        self.side + f64::from(self.count - 1) * self.stagger
    }

    /// Top-left corner of map `k` for a stack centered on `(x, 0)`.
    fn origin(&self, k: u32, x: f64) -> Point {
        let mid = f64::from(self.count - 1) / 2.0;
        let cx = x + (f64::from(k) - mid) * self.stagger;
        let cy = (f64::from(k) - mid) * self.step;
        Point::new(cx - self.side / 2.0, cy - self.side / 2.0)
    }
}

fn stack_for(layer: &ResolvedLayer, cfg: &LayoutConfig) -> Option<Stack> {
    let side = |cells: u32| f64::from(cells) * cfg.fm_cell;
    match layer.kind() {
        LayerKind::Convolutional2D => Some(Stack::new(
            layer.channels.unwrap_or(1),
            side(layer.input_size.unwrap_or(1)),
            cfg,
        )),
        LayerKind::MaxPooling2D => Some(Stack::new(
            layer.channels.unwrap_or(1),
            side(layer.output_size.unwrap_or(1)),
            cfg,
        )),
        _ => None,
    }
}

/// Width and height a layer occupies.
pub fn layer_extent(layer: &ResolvedLayer, cfg: &LayoutConfig) -> Extent {
    match layer.kind() {
        LayerKind::FeedForward => {
            let n = f64::from(layer.units().unwrap_or(1));
            Extent {
                width: 2.0 * cfg.neuron_radius,
                height: (n - 1.0) * cfg.node_spacing + 2.0 * cfg.neuron_radius,
            }
        }
        LayerKind::Image => {
            let (w, h) = layer.image.as_ref().map_or((1, 1), |g| (g.width, g.height));
            Extent {
                width: f64::from(w) * cfg.fm_cell,
                height: f64::from(h) * cfg.fm_cell,
            }
        }
        LayerKind::Convolutional2D | LayerKind::MaxPooling2D => {
            let s = stack_for(layer, cfg).expect("spatial layer");
            Extent { width: s.width(), height: s.height() }
        }
    }
}

/// Union of all primitive bounds, grown by `margin` on every side.
pub fn fit_view(prims: &[Primitive], margin: f64) -> Result<ViewBox, LayoutError> {
    let first = prims.first().ok_or(LayoutError::EmptyScene)?;
    let b = prims
        .iter()
        .skip(1)
        .fold(first.shape.bounds(), |acc, p| acc.union(&p.shape.bounds()));
    Ok(ViewBox {
        min: Point::new(b.min.x - margin, b.min.y - margin),
        max: Point::new(b.max.x + margin, b.max.y + margin),
    })
}

/// Places every layer element and edge of the network.
pub fn layout_network(net: &ValidatedNetwork, cfg: &LayoutConfig) -> SceneGraph {
    let style = &net.spec.style;
    let mut primitives = Vec::new();
    let mut layers: BTreeMap<usize, Vec<PrimId>> = BTreeMap::new();

    for (i, layer) in net.layers.iter().enumerate() {
        let x = i as f64 * cfg.layer_spacing;
        let start = primitives.len();
        emit_layer(i, layer, x, cfg, style, &mut primitives);
        layers.insert(i, primitives[start..].iter().map(|p| p.id.clone()).collect());
    }

    let mut pairs = Vec::new();
    for i in 0..net.layers.len().saturating_sub(1) {
        let mut edges = Vec::new();
        if net.layers[i + 1].kind() == LayerKind::FeedForward {
            // Anchored at element centers; spatial sources contribute one
            // anchor per map.
            let centers = |idx: usize| -> Vec<Point> {
                layers[&idx]
                    .iter()
                    .map(|id| find(&primitives, id).shape.center())
                    .collect()
            };
            let (a_pts, b_pts) = (centers(i), centers(i + 1));
            for (a, &p0) in a_pts.iter().enumerate() {
                for (b, &p1) in b_pts.iter().enumerate() {
                    let id = PrimId::edge(i, i + 1, a, b);
                    edges.push(id.clone());
                    primitives.push(Primitive {
                        id,
                        shape: Shape::Segment { p0, p1 },
                        base_style: Style {
                            fill: style.edge_color,
                            stroke: style.edge_color,
                            stroke_width: EDGE_STROKE_WIDTH,
                            opacity: 1.0,
                        },
                        z: Z_EDGE,
                    });
                }
            }
        }
        pairs.push(PairEdges { from: i, to: i + 1, edges });
    }

    let view_box = fit_view(&primitives, cfg.margin).expect("a validated network is never empty");
    SceneGraph { primitives, view_box, layers, pairs }
}

fn find<'a>(prims: &'a [Primitive], id: &PrimId) -> &'a Primitive {
    prims.iter().rev().find(|p| &p.id == id).expect("id emitted earlier")
}

fn emit_layer(
    i: usize,
    layer: &ResolvedLayer,
    x: f64,
    cfg: &LayoutConfig,
    style: &StyleSpec,
    out: &mut Vec<Primitive>,
) {
    let node_style = |stroke_width| Style {
        fill: style.neuron_fill,
        stroke: style.neuron_stroke,
        stroke_width,
        opacity: 1.0,
    };
    match layer.kind() {
        LayerKind::FeedForward => {
            let n = layer.units().unwrap_or(1) as usize;
            let mid = (n as f64 - 1.0) / 2.0;
            for j in 0..n {
                out.push(Primitive {
                    id: PrimId::neuron(i, j),
                    shape: Shape::Circle {
                        center: Point::new(x, (j as f64 - mid) * cfg.node_spacing),
                        radius: cfg.neuron_radius,
                    },
                    base_style: node_style(NEURON_STROKE_WIDTH),
                    z: Z_NODE,
                });
            }
        }
        LayerKind::Image => {
            let img = layer.image.as_ref().expect("validated image layer has pixels");
            let (w, h) = (f64::from(img.width), f64::from(img.height));
            out.push(Primitive {
                id: PrimId::image(i),
                shape: Shape::CellGrid {
                    origin: Point::new(x - w * cfg.fm_cell / 2.0, -h * cfg.fm_cell / 2.0),
                    cell_size: cfg.fm_cell,
                    rows: img.height,
                    cols: img.width,
                    values: Some(img.pixels.clone()),
                },
                base_style: Style { fill: Rgba::WHITE, ..node_style(GRID_STROKE_WIDTH) },
                z: Z_NODE,
            });
        }
        LayerKind::Convolutional2D | LayerKind::MaxPooling2D => {
            let stack = stack_for(layer, cfg).expect("spatial layer");
            let cells = match layer.kind() {
                LayerKind::Convolutional2D => layer.input_size,
                _ => layer.output_size,
            }
            .unwrap_or(1);
            for k in 0..stack.count {
                out.push(Primitive {
                    id: PrimId::feature_map(i, k as usize),
                    shape: Shape::CellGrid {
                        origin: stack.origin(k, x),
                        cell_size: cfg.fm_cell,
                        rows: cells,
                        cols: cells,
                        values: None,
                    },
                    base_style: node_style(GRID_STROKE_WIDTH),
                    z: Z_NODE,
                });
            }
        }
    }
}
