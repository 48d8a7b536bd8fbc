#![allow(dead_code)]

use std::collections::HashMap;

use nnanim::pipeline::{compile_source, Compiled};
use nnanim::spec::MemoryImages;
use proptest::prelude::*;

/// A 6x6 gradient available as `source: "six.pgm"`.
pub const SIX_PGM: &str = "P2\n6 6\n35\n\
    0 1 2 3 4 5\n6 7 8 9 10 11\n12 13 14 15 16 17\n\
    18 19 20 21 22 23\n24 25 26 27 28 29\n30 31 32 33 34 35\n";

pub fn images() -> MemoryImages {
    MemoryImages(HashMap::from([("six.pgm".to_string(), SIX_PGM.to_string())]))
}

pub fn build(src: &str) -> Compiled {
    compile_source(src, &images(), |_| {}).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

#[derive(Clone, Debug)]
pub enum Start {
    FeedForward,
    Image,
    Conv { maps: u32, size: u32, filter: u32 },
}

#[derive(Clone, Debug)]
pub struct NetShape {
    pub start: Start,
    /// `(is_pool, param, maps)` steps, skipped when they would not fit.
    pub spatial: Vec<(bool, u32, u32)>,
    pub ff: Vec<u32>,
}

impl NetShape {
    /// Layer lines that always validate.
    pub fn layers(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut size = 0;
        let mut prev_pool = true;
        match self.start {
            Start::FeedForward => {}
            Start::Image => {
                out.push("layer image { source: \"six.pgm\" }".to_string());
                size = 6;
            }
            Start::Conv { maps, size: s, filter } => {
                let f = filter.min(s);
                out.push(format!("layer conv2d {{ feature_maps: {maps}, map_size: {s}, filter_size: {f} }}"));
                size = s - f + 1;
                prev_pool = false;
            }
        }
        if !matches!(self.start, Start::FeedForward) {
            for &(is_pool, p, maps) in &self.spatial {
                if is_pool {
                    let k = p + 1;
                    if prev_pool || size / k == 0 {
                        continue;
                    }
                    out.push(format!("layer maxpool2d {{ kernel: {k} }}"));
                    size /= k;
                    prev_pool = true;
                } else {
                    let f = p.min(size);
                    out.push(format!("layer conv2d {{ feature_maps: {maps}, map_size: {size}, filter_size: {f} }}"));
                    size = size - f + 1;
                    prev_pool = false;
                }
            }
        }
        let mut ff = self.ff.clone();
        if matches!(self.start, Start::FeedForward) && ff.len() < 2 {
            ff.push(2);
        }
        out.extend(ff.iter().map(|u| format!("layer ff {{ units: {u} }}")));
        out
    }

    pub fn ff_count(&self) -> usize {
        self.layers().iter().filter(|l| l.starts_with("layer ff")).count()
    }

    pub fn network(&self) -> String {
        format!("network {{\n  {}\n}}\n", self.layers().join("\n  "))
    }
}

pub fn net_shape() -> impl Strategy<Value = NetShape> {
    let start = prop_oneof![
        2 => Just(Start::FeedForward),
        1 => Just(Start::Image),
        1 => (1u32..=3, 4u32..=12, 1u32..=4).prop_map(|(maps, size, filter)| Start::Conv { maps, size, filter }),
    ];
    (
        start,
        prop::collection::vec((any::<bool>(), 1u32..=4, 1u32..=3), 0..=3),
        prop::collection::vec(1u32..=6, 1..=3),
    )
        .prop_map(|(start, spatial, ff)| NetShape { start, spatial, ff })
}

#[derive(Clone, Debug)]
pub enum Dir {
    Forward,
    Dropout { rate: f64, seed: u64 },
}

pub fn directives() -> impl Strategy<Value = Vec<Dir>> {
    prop::collection::vec(
        prop_oneof![
            Just(Dir::Forward),
            (0.0f64..0.9, any::<u64>()).prop_map(|(rate, seed)| Dir::Dropout { rate, seed }),
        ],
        1..=4,
    )
}

/// Full spec text; dropout directives become forward passes when the
/// network has no dropout-eligible layer.
pub fn spec_text(net: &NetShape, dirs: &[Dir], pair_s: f64) -> String {
    let eligible = net.ff_count() >= 2;
    let mut s = net.network();
    for d in dirs {
        match d {
            Dir::Dropout { rate, seed } if eligible => {
                s += &format!("animate dropout {{ rate: {rate:?}, seed: {seed} }}\n");
            }
            _ => s += "animate forward_pass {}\n",
        }
    }
    s += &format!("render {{ fps: 10, width_px: 64, height_px: 36, pair_duration_s: {pair_s:?} }}\n");
    s
}
