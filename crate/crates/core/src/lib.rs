//! `nnanim` turns a small declarative description of a layered neural network
//! into an animation.
//!
//! The pipeline has four stages, each in its own module:
//!
//! 1. [`spec`] parses the text format into a [`spec::NetworkSpec`] and
//!    validates it into a [`spec::ValidatedNetwork`].
//! 2. [`layout`] places every neuron, feature map and edge in world
//!    coordinates, producing a [`layout::SceneGraph`].
//! 3. [`anim`] compiles the animation directives into a [`anim::Timeline`] of
//!    keyframed property tracks, one registered builder per layer pair.
//! 4. [`render`] samples the timeline into frames and writes SVG text or
//!    rasterizes and encodes an animated GIF.
//!
//! [`pipeline`] wires the stages together for callers that just want output.

pub mod anim;
pub mod color;
pub mod error;
pub mod layout;
pub mod pipeline;
pub mod render;
pub mod spec;

pub use color::Rgba;
pub use error::Error;
