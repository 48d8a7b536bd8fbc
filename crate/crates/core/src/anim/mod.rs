//! Keyframe timelines and the compiler that builds them from animation
//! directives.

mod compile;
mod dropout;
mod easing;
mod prng;
mod registry;

use serde::Serialize;
use thiserror::Error;

use crate::color::Rgba;
use crate::layout::PrimId;
use crate::spec::LayerKind;

pub use compile::{compile_animations, compile_with, directive_duration};
pub use dropout::{dropout_timeline, plan_dropout, DropPlan, LayerDrop};
pub use easing::{easing_eval, Easing};
pub use prng::{prng_next, SplitMix64};
pub use registry::{pair_transition, PairAnimationRegistry, PairBuilder, PairContext, Window};

/// A keyframed value: a scalar or a color.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Real(f64),
    Color(Rgba),
}

impl Value {
    pub fn as_real(&self) -> Option<f64> {
        match *self {
            Value::Real(v) => Some(v),
            Value::Color(_) => None,
        }
    }

    pub fn as_color(&self) -> Option<Rgba> {
        match *self {
            Value::Color(c) => Some(c),
            Value::Real(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Keyframe {
    pub t: f64,
    pub value: Value,
    /// Easing used when approaching this key from the previous one.
    pub easing: Easing,
}

/// The animated property of a track.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Opacity,
    Fill,
    Stroke,
    /// Position in `[0, 1]` of a pulse dot travelling along a segment.
    PulsePos,
    /// Index of the highlighted `window x window` cell block on a cell grid.
    /// Window `i` starts at row `(i / per_row) * stride`, column
    /// `(i % per_row) * stride`.
    HighlightRect { window: u32, stride: u32, per_row: u32 },
}

impl Property {
    /// Overlay properties draw something only while their track is active;
    /// the rest restyle the target primitive.
    pub fn is_overlay(&self) -> bool {
        matches!(self, Property::PulsePos | Property::HighlightRect { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Track {
    pub target: PrimId,
    pub property: Property,
    pub keys: Vec<Keyframe>,
}

impl Track {
    pub fn new(target: PrimId, property: Property) -> Self {
        Track { target, property, keys: Vec::new() }
    }

    pub fn key(mut self, t: f64, value: Value, easing: Easing) -> Self {
        self.keys.push(Keyframe { t, value, easing });
        self
    }

    pub fn start(&self) -> f64 {
        self.keys.first().map_or(0.0, |k| k.t)
    }

    pub fn end(&self) -> f64 {
        self.keys.last().map_or(0.0, |k| k.t)
    }

    /// Whether an overlay track draws at time `t`.
    pub fn is_active(&self, t: f64) -> bool {
        !self.keys.is_empty() && self.start() <= t && t <= self.end()
    }

    /// Number of discrete scan steps of a highlight track.
    pub fn step_count(&self) -> usize {
        self.keys.len().saturating_sub(1)
    }
}

/// The time span one directive occupies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DirectiveSegment {
    pub directive: usize,
    pub start_s: f64,
    pub end_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timeline {
    pub tracks: Vec<Track>,
    pub duration_s: f64,
    pub segments: Vec<DirectiveSegment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnimationError {
    #[error("no transition animation registered for {first} -> {second}")]
    UnregisteredPair { first: LayerKind, second: LayerKind },
    #[error("dropout needs a feed-forward layer before the last one")]
    NoEligibleLayers,
}
