//! The whole pipeline behind one call, plus frame fan-out across threads.

use std::num::NonZeroUsize;

use crate::anim::{compile_animations, Timeline};
use crate::error::Error;
use crate::layout::{layout_network, LayoutConfig, SceneGraph};
use crate::render::{
    emit_svg, encode_gif, frame_times, rasterize_with, Frame, PixelGrid, RenderError, Sampler,
    Supersample,
};
use crate::spec::{parse_spec, validate_network_with, ImageSource, NetworkSpec, ValidatedNetwork};

/// Output size presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quality {
    Low,
    Medium,
    High,
}

impl Quality {
    /// `(fps, width_px, height_px)`.
    pub fn settings(self) -> (u32, u32, u32) {
        match self {
            Quality::Low => (15, 480, 270),
            Quality::Medium => (30, 960, 540),
            Quality::High => (60, 1920, 1080),
        }
    }

    pub fn from_letter(s: &str) -> Option<Self> {
        match s {
            "l" => Some(Quality::Low),
            "m" => Some(Quality::Medium),
            "h" => Some(Quality::High),
            _ => None,
        }
    }
}

/// A validated network with its scene and timeline.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub net: ValidatedNetwork,
    pub scene: SceneGraph,
    pub timeline: Timeline,
}

/// Parses, lets `adjust` tweak the spec, then validates, lays out and
/// compiles.
pub fn compile_source(
    text: &str,
    images: &dyn ImageSource,
    adjust: impl FnOnce(&mut NetworkSpec),
) -> Result<Compiled, Error> {
    let mut spec = parse_spec(text)?;
    adjust(&mut spec);
    compile_spec(spec, images)
}

pub fn compile_spec(spec: NetworkSpec, images: &dyn ImageSource) -> Result<Compiled, Error> {
    let net = validate_network_with(spec, images)?;
    let scene = layout_network(&net, &LayoutConfig::default());
    let timeline = compile_animations(&net, &scene);
    Ok(Compiled { net, scene, timeline })
}

/// Threads to use when the caller does not say.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, NonZeroUsize::get)
}

/// Runs `f` for every index in `0..n` on up to `threads` workers and returns
/// the results in index order. The first error by index wins.
pub fn parallel_map<T, E, F>(n: usize, threads: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync,
{
    let threads = threads.clamp(1, n.max(1));
    if threads == 1 {
        return (0..n).map(f).collect();
    }
    let chunk = n.div_ceil(threads);
    let f = &f;
    let parts: Vec<Vec<Result<T, E>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let range = (w * chunk).min(n)..((w + 1) * chunk).min(n);
                s.spawn(move || range.map(f).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("render worker panicked")).collect()
    });
    parts.into_iter().flatten().collect()
}

impl Compiled {
    pub fn frame_times(&self) -> Vec<f64> {
        frame_times(self.timeline.duration_s, self.net.spec.render.fps)
    }

    pub fn sampler(&self) -> Sampler<'_> {
        Sampler::new(&self.timeline, &self.scene, self.net.spec.style.pulse_color)
    }

    pub fn frames(&self, threads: usize) -> Result<Vec<Frame>, RenderError> {
        let times = self.frame_times();
        let sampler = self.sampler();
        parallel_map(times.len(), threads, |k| sampler.sample(k, times[k]))
    }

    pub fn frame_svg(&self, frame: &Frame) -> String {
        let r = &self.net.spec.render;
        emit_svg(frame, &self.scene.view_box, r.width_px, r.height_px, self.net.spec.style.background)
    }

    pub fn svg_frames(&self, threads: usize) -> Result<Vec<String>, RenderError> {
        let times = self.frame_times();
        let sampler = self.sampler();
        parallel_map(times.len(), threads, |k| Ok(self.frame_svg(&sampler.sample(k, times[k])?)))
    }

    pub fn raster_frames(&self, supersample: Supersample, threads: usize) -> Result<Vec<PixelGrid>, RenderError> {
        let times = self.frame_times();
        let sampler = self.sampler();
        let r = &self.net.spec.render;
        let bg = self.net.spec.style.background;
        parallel_map(times.len(), threads, |k| {
            let frame = sampler.sample(k, times[k])?;
            Ok(rasterize_with(&frame, &self.scene.view_box, r.width_px, r.height_px, bg, supersample))
        })
    }

    /// Encodes the animation as a GIF, falling back to one sample per pixel
    /// when antialiasing produces more than 256 colors.
    pub fn gif(&self, threads: usize) -> Result<GifOutput, RenderError> {
        let fps = self.net.spec.render.fps;
        let mut last = None;
        for ss in [Supersample::X4, Supersample::X1] {
            let frames = self.raster_frames(ss, threads)?;
            match encode_gif(&frames, fps) {
                Ok(bytes) => return Ok(GifOutput { bytes, frames, supersample: ss }),
                Err(e @ RenderError::PaletteOverflow { .. }) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("attempted at least once"))
    }
}

/// An encoded GIF together with the frames that went into it.
pub struct GifOutput {
    pub bytes: Vec<u8>,
    pub frames: Vec<PixelGrid>,
    pub supersample: Supersample,
}
