use std::collections::HashMap;
use std::path::PathBuf;

use super::pgm::{parse_pgm, GrayscaleGrid, PgmError};
use super::{
    AnimationDirective, LayerKind, LayerSpec, NetworkSpec, RenderSettings, ValidationError,
};

use LayerKind::*;

/// Every ordered pair of adjacent layer kinds that has a transition animation.
pub const COMPATIBLE_PAIRS: [(LayerKind, LayerKind); 8] = [
    (Image, Convolutional2D),
    (Image, FeedForward),
    (Convolutional2D, Convolutional2D),
    (Convolutional2D, MaxPooling2D),
    (Convolutional2D, FeedForward),
    (MaxPooling2D, Convolutional2D),
    (MaxPooling2D, FeedForward),
    (FeedForward, FeedForward),
];

/// Whether `first` may directly feed `second`.
pub fn compatibility(first: LayerKind, second: LayerKind) -> bool {
    COMPATIBLE_PAIRS.contains(&(first, second))
}

const MAX_UNITS: u32 = 512;
const MAX_FEATURE_MAPS: u32 = 64;
const MAX_MAP_SIZE: u32 = 128;

/// Where image layers get their pixels from.
pub trait ImageSource {
    fn load(&self, source: &str) -> Result<GrayscaleGrid, ValidationError>;
}

/// Resolves image sources as paths relative to a base directory.
#[derive(Clone, Debug, Default)]
pub struct FsImages {
    pub base: PathBuf,
}

impl FsImages {
    pub fn new(base: impl Into<PathBuf>) -> Self {
        FsImages { base: base.into() }
    }
}

impl ImageSource for FsImages {
    fn load(&self, source: &str) -> Result<GrayscaleGrid, ValidationError> {
        let path = self.base.join(source);
        let shown = path.display().to_string();
        if !path.is_file() {
            return Err(ValidationError::MissingImageFile { path: shown });
        }
        super::load_pgm(&path).map_err(|e| ValidationError::BadPgm {
            path: shown,
            reason: match e {
                PgmError::Io(r) | PgmError::Format(r) => r,
            },
        })
    }
}

/// In-memory PGM texts keyed by source name.
#[derive(Clone, Debug, Default)]
pub struct MemoryImages(pub HashMap<String, String>);

impl ImageSource for MemoryImages {
    fn load(&self, source: &str) -> Result<GrayscaleGrid, ValidationError> {
        let text = self
            .0
            .get(source)
            .ok_or_else(|| ValidationError::MissingImageFile { path: source.to_string() })?;
        parse_pgm(text).map_err(|e| ValidationError::BadPgm {
            path: source.to_string(),
            reason: e.to_string(),
        })
    }
}

/// A layer plus the sizes derived by walking the network.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedLayer {
    pub spec: LayerSpec,
    /// Side length of the square map entering a conv or pool layer.
    pub input_size: Option<u32>,
    /// Side length of the square map this layer hands to its successor.
    pub output_size: Option<u32>,
    /// Number of maps a spatial layer carries.
    pub channels: Option<u32>,
    pub image: Option<GrayscaleGrid>,
}

impl ResolvedLayer {
    pub fn kind(&self) -> LayerKind {
        self.spec.kind()
    }

    /// Units of a feed-forward layer.
    pub fn units(&self) -> Option<u32> {
        match self.spec {
            LayerSpec::FeedForward { units } => Some(units),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidatedNetwork {
    pub spec: NetworkSpec,
    pub layers: Vec<ResolvedLayer>,
}

impl ValidatedNetwork {
    /// Indices of layers dropout may act on: every feed-forward layer except
    /// the last one.
    pub fn dropout_layers(&self) -> Vec<usize> {
        let mut ff: Vec<usize> = (0..self.layers.len())
            .filter(|&i| self.layers[i].kind() == FeedForward)
            .collect();
        ff.pop();
        ff
    }
}

/// Validates against image files relative to the current directory.
pub fn validate_network(spec: NetworkSpec) -> Result<ValidatedNetwork, ValidationError> {
    validate_network_with(spec, &FsImages::default())
}

pub fn validate_network_with(
    spec: NetworkSpec,
    images: &dyn ImageSource,
) -> Result<ValidatedNetwork, ValidationError> {
    if spec.layers.len() < 2 {
        return Err(ValidationError::TooFewLayers { count: spec.layers.len() });
    }
    if spec.directives.is_empty() {
        return Err(ValidationError::NoDirectives);
    }
    check_settings(&spec)?;

    let mut layers: Vec<ResolvedLayer> = Vec::with_capacity(spec.layers.len());
    for (index, layer) in spec.layers.iter().enumerate() {
        check_layer_ranges(index, layer)?;
        let prev = layers.last();
        if let Some(p) = prev {
            if !compatibility(p.kind(), layer.kind()) {
                return Err(ValidationError::IncompatiblePair {
                    index: index - 1,
                    first: p.kind(),
                    second: layer.kind(),
                });
            }
        }
        let resolved = resolve(index, layer, prev, images)?;
        layers.push(resolved);
    }

    let net = ValidatedNetwork { spec, layers };
    if net.dropout_layers().is_empty() {
        if let Some(directive) = net
            .spec
            .directives
            .iter()
            .position(|d| matches!(d, AnimationDirective::Dropout { .. }))
        {
            return Err(ValidationError::NoDropoutLayers { directive });
        }
    }
    Ok(net)
}

fn out_of_range(param: impl Into<String>, value: impl ToString, allowed: &str) -> ValidationError {
    ValidationError::OutOfRange {
        param: param.into(),
        value: value.to_string(),
        allowed: allowed.to_string(),
    }
}

fn check_settings(spec: &NetworkSpec) -> Result<(), ValidationError> {
    let r = &spec.render;
    if !RenderSettings::FPS_RANGE.contains(&r.fps) {
        return Err(out_of_range("render.fps", r.fps, "1..=120"));
    }
    for (name, v) in [("render.width_px", r.width_px), ("render.height_px", r.height_px)] {
        if !RenderSettings::SIZE_RANGE.contains(&v) {
            return Err(out_of_range(name, v, "16..=4096"));
        }
    }
    if !RenderSettings::PAIR_DURATION_RANGE.contains(&r.pair_duration_s) {
        return Err(out_of_range("render.pair_duration_s", r.pair_duration_s, "0.01..=600"));
    }
    let o = spec.style.dropped_opacity;
    if !(0.0..=1.0).contains(&o) {
        return Err(out_of_range("style.dropped_opacity", o, "[0, 1]"));
    }
    for (i, d) in spec.directives.iter().enumerate() {
        if let AnimationDirective::Dropout { rate, .. } = d {
            if !(0.0..1.0).contains(rate) {
                return Err(out_of_range(format!("directives[{i}].rate"), rate, "[0, 1)"));
            }
        }
    }
    Ok(())
}

fn check_layer_ranges(index: usize, layer: &LayerSpec) -> Result<(), ValidationError> {
    let p = |name: &str| format!("layers[{index}].{name}");
    match *layer {
        LayerSpec::FeedForward { units } if units > MAX_UNITS => {
            Err(out_of_range(p("units"), units, "1..=512"))
        }
        LayerSpec::Convolutional2D { feature_maps, .. } if feature_maps > MAX_FEATURE_MAPS => {
            Err(out_of_range(p("feature_maps"), feature_maps, "1..=64"))
        }
        LayerSpec::Convolutional2D { map_size, .. } if map_size > MAX_MAP_SIZE => {
            Err(out_of_range(p("map_size"), map_size, "1..=128"))
        }
        LayerSpec::MaxPooling2D { kernel } if kernel < 2 => {
            Err(out_of_range(p("kernel"), kernel, ">= 2"))
        }
        _ => Ok(()),
    }
}

fn resolve(
    index: usize,
    layer: &LayerSpec,
    prev: Option<&ResolvedLayer>,
    images: &dyn ImageSource,
) -> Result<ResolvedLayer, ValidationError> {
    let mut out = ResolvedLayer {
        spec: layer.clone(),
        input_size: None,
        output_size: None,
        channels: None,
        image: None,
    };
    match *layer {
        LayerSpec::FeedForward { .. } => {}
        LayerSpec::Image { ref source } => {
            let img = images.load(source)?;
            if img.width > MAX_MAP_SIZE || img.height > MAX_MAP_SIZE {
                return Err(out_of_range(
                    format!("layers[{index}].source"),
                    format!("{}x{}", img.width, img.height),
                    "at most 128x128",
                ));
            }
            out.output_size = (img.width == img.height).then_some(img.width);
            out.channels = Some(1);
            out.image = Some(img);
        }
        LayerSpec::Convolutional2D { feature_maps, map_size, filter_size } => {
            let input = match prev {
                None => map_size,
                Some(p) => match (p.output_size, &p.image) {
                    (Some(s), _) if s == map_size => s,
                    (_, Some(img)) => {
                        return Err(ValidationError::SizeMismatch {
                            index,
                            declared: map_size,
                            incoming: format!("{}x{}", img.width, img.height),
                        })
                    }
                    (Some(s), None) => {
                        return Err(ValidationError::SizeMismatch {
                            index,
                            declared: map_size,
                            incoming: format!("{s}x{s}"),
                        })
                    }
                    (None, None) => return Err(ValidationError::UnresolvedSize { index }),
                },
            };
            if filter_size > input {
                return Err(ValidationError::DegenerateConv { index });
            }
            out.input_size = Some(input);
            out.output_size = Some(input - filter_size + 1);
            out.channels = Some(feature_maps);
        }
        LayerSpec::MaxPooling2D { kernel } => {
            let Some(input) = prev.and_then(|p| p.output_size) else {
                return Err(ValidationError::UnresolvedSize { index });
            };
            let output = input / kernel;
            if output < 1 {
                return Err(ValidationError::DegeneratePool { index });
            }
            out.input_size = Some(input);
            out.output_size = Some(output);
            out.channels = prev.and_then(|p| p.channels);
        }
    }
    Ok(out)
}
