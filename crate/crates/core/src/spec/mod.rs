//! The network description language: data model, parser, printer and
//! validation.

mod error;
mod lexer;
mod parser;
mod pgm;
mod print;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::color::Rgba;

pub use error::{ParseError, ValidationError};
pub use parser::parse_spec;
pub use pgm::{load_pgm, parse_pgm, GrayscaleGrid, PgmError};
pub use print::to_source;
pub use validate::{
    compatibility, validate_network, validate_network_with, FsImages, ImageSource, MemoryImages,
    ResolvedLayer, ValidatedNetwork, COMPATIBLE_PAIRS,
};

/// The four layer kinds the language knows about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LayerKind {
    Image,
    FeedForward,
    Convolutional2D,
    MaxPooling2D,
}

impl LayerKind {
    pub const ALL: [LayerKind; 4] = [
        LayerKind::Image,
        LayerKind::FeedForward,
        LayerKind::Convolutional2D,
        LayerKind::MaxPooling2D,
    ];

    /// The keyword used after `layer` in source text.
    pub fn keyword(self) -> &'static str {
        match self {
            LayerKind::Image => "image",
            LayerKind::FeedForward => "ff",
            LayerKind::Convolutional2D => "conv2d",
            LayerKind::MaxPooling2D => "maxpool2d",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        LayerKind::ALL.into_iter().find(|k| k.keyword() == word)
    }

    pub fn is_spatial(self) -> bool {
        !matches!(self, LayerKind::FeedForward)
    }
}

impl fmt::Display for LayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            LayerKind::Image => "Image",
            LayerKind::FeedForward => "FeedForward",
            LayerKind::Convolutional2D => "Convolutional2D",
            LayerKind::MaxPooling2D => "MaxPooling2D",
        };
        f.write_str(name)
    }
}

/// One declared layer with its kind-specific hyperparameters.
#[derive(Clone, Debug, PartialEq)]
pub enum LayerSpec {
    Image { source: String },
    FeedForward { units: u32 },
    Convolutional2D { feature_maps: u32, map_size: u32, filter_size: u32 },
    MaxPooling2D { kernel: u32 },
}

impl LayerSpec {
    pub fn kind(&self) -> LayerKind {
        match self {
            LayerSpec::Image { .. } => LayerKind::Image,
            LayerSpec::FeedForward { .. } => LayerKind::FeedForward,
            LayerSpec::Convolutional2D { .. } => LayerKind::Convolutional2D,
            LayerSpec::MaxPooling2D { .. } => LayerKind::MaxPooling2D,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnimationDirective {
    ForwardPass,
    Dropout { rate: f64, seed: u64 },
}

impl AnimationDirective {
    pub const DEFAULT_DROPOUT_RATE: f64 = 0.2;
    pub const DEFAULT_DROPOUT_SEED: u64 = 0;
}

#[derive(Clone, Debug, PartialEq)]
pub struct StyleSpec {
    pub background: Rgba,
    pub neuron_fill: Rgba,
    pub neuron_stroke: Rgba,
    pub edge_color: Rgba,
    pub pulse_color: Rgba,
    pub dropped_opacity: f64,
}

impl Default for StyleSpec {
    fn default() -> Self {
        StyleSpec {
            background: Rgba::rgb(0x1C, 0x1C, 0x1C),
            neuron_fill: Rgba::rgb(0x3A, 0x6E, 0xA5),
            neuron_stroke: Rgba::WHITE,
            edge_color: Rgba::rgb(0x8A, 0x8A, 0x8A),
            pulse_color: Rgba::rgb(0xFF, 0xD8, 0x61),
            dropped_opacity: 0.15,
        }
    }
}

/// Output encodings a render can produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OutputFormat {
    Svg,
    Gif,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Svg => "svg",
            OutputFormat::Gif => "gif",
        }
    }

    /// Parses a comma-separated list such as `"svg,gif"`. Returns `None` on
    /// an empty list or an unknown name.
    pub fn parse_list(list: &str) -> Option<BTreeSet<OutputFormat>> {
        let mut out = BTreeSet::new();
        for item in list.split(',') {
            match item.trim() {
                "svg" => out.insert(OutputFormat::Svg),
                "gif" => out.insert(OutputFormat::Gif),
                _ => return None,
            };
        }
        Some(out)
    }

    pub fn join(formats: &BTreeSet<OutputFormat>) -> String {
        formats.iter().map(|f| f.name()).collect::<Vec<_>>().join(",")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderSettings {
    pub fps: u32,
    pub width_px: u32,
    pub height_px: u32,
    pub pair_duration_s: f64,
    pub formats: BTreeSet<OutputFormat>,
}

impl RenderSettings {
    pub const FPS_RANGE: std::ops::RangeInclusive<u32> = 1..=120;
    pub const SIZE_RANGE: std::ops::RangeInclusive<u32> = 16..=4096;
    pub const PAIR_DURATION_RANGE: std::ops::RangeInclusive<f64> = 0.01..=600.0;
}

impl Default for RenderSettings {
    fn default() -> Self {
        RenderSettings {
            fps: 30,
            width_px: 960,
            height_px: 540,
            pair_duration_s: 1.0,
            formats: BTreeSet::from([OutputFormat::Svg]),
        }
    }
}

/// A parsed but unvalidated network description.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSpec {
    pub layers: Vec<LayerSpec>,
    pub directives: Vec<AnimationDirective>,
    pub style: StyleSpec,
    pub render: RenderSettings,
}

impl NetworkSpec {
    /// Replaces the seed of every dropout directive.
    pub fn override_seed(&mut self, seed: u64) {
        for d in &mut self.directives {
            if let AnimationDirective::Dropout { seed: s, .. } = d {
                *s = seed;
            }
        }
    }
}
