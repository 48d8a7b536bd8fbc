use thiserror::Error;

use crate::anim::AnimationError;
use crate::layout::LayoutError;
use crate::render::RenderError;
use crate::spec::{ParseError, ValidationError};

/// Any failure from text to output bytes.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Animation(#[from] AnimationError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
