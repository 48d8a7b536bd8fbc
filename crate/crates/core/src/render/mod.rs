//! Turning a timeline into pictures: frame sampling, SVG text, a small
//! supersampling rasterizer and an animated GIF encoder.

mod gif;
mod raster;
mod sample;
mod svg;

use thiserror::Error;

pub use self::gif::{encode_gif, lzw_encode};
pub use raster::{rasterize, rasterize_with, Mapping, PixelGrid, Supersample};
pub use sample::{frame_times, sample_at, track_value, Frame, Overlay, Sampler};
pub use svg::{emit_svg, fmt_real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("time {t} s is outside the timeline [0, {duration}]")]
    OutOfRange { t: f64, duration: f64 },
    #[error("{count} distinct colors exceed the 256-entry GIF palette")]
    PaletteOverflow { count: usize },
    #[error("frame {index} is {found:?} but the first frame is {expected:?}")]
    FrameSizeMismatch {
        index: usize,
        expected: (u32, u32),
        found: (u32, u32),
    },
    #[error("cannot encode a GIF without frames")]
    NoFrames,
}
