use thiserror::Error;

use super::LayerKind;

/// Errors raised while turning source text into a [`super::NetworkSpec`].
///
/// Every variant carries the 1-based line and column of the offending token.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    #[error("{line}:{column}: unknown layer kind `{name}`")]
    UnknownLayerKind { line: usize, column: usize, name: String },
    #[error("{line}:{column}: unknown directive `{name}`")]
    UnknownDirective { line: usize, column: usize, name: String },
    #[error("{line}:{column}: unknown parameter `{name}` for `{block}`")]
    UnknownParam {
        line: usize,
        column: usize,
        block: String,
        name: String,
    },
    #[error("{line}:{column}: parameter `{param}` expects {expected}")]
    TypeMismatch {
        line: usize,
        column: usize,
        param: String,
        expected: String,
    },
    #[error("{line}:{column}: `{block}` is missing required parameter `{name}`")]
    MissingParam {
        line: usize,
        column: usize,
        block: String,
        name: String,
    },
    #[error("{line}:{column}: parameter `{name}` given more than once")]
    DuplicateParam { line: usize, column: usize, name: String },
    #[error("{line}:{column}: `{block}` block given more than once")]
    DuplicateBlock { line: usize, column: usize, block: String },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match *self {
            ParseError::Syntax { line, column, .. }
            | ParseError::UnknownLayerKind { line, column, .. }
            | ParseError::UnknownDirective { line, column, .. }
            | ParseError::UnknownParam { line, column, .. }
            | ParseError::TypeMismatch { line, column, .. }
            | ParseError::MissingParam { line, column, .. }
            | ParseError::DuplicateParam { line, column, .. }
            | ParseError::DuplicateBlock { line, column, .. } => (line, column),
        }
    }
}

/// Errors raised by [`super::validate_network`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("a network needs at least 2 layers, found {count}")]
    TooFewLayers { count: usize },
    #[error("no animation directives given")]
    NoDirectives,
    #[error("layer {index} ({first}) cannot feed layer {next} ({second})", next = index + 1)]
    IncompatiblePair {
        index: usize,
        first: LayerKind,
        second: LayerKind,
    },
    #[error("layer {index}: convolution output size would be below 1")]
    DegenerateConv { index: usize },
    #[error("layer {index}: pooling output size would be below 1")]
    DegeneratePool { index: usize },
    #[error("layer {index}: declared map size {declared} does not match incoming {incoming}")]
    SizeMismatch {
        index: usize,
        declared: u32,
        incoming: String,
    },
    #[error("layer {index}: cannot resolve an input size, no spatial layer precedes it")]
    UnresolvedSize { index: usize },
    #[error("{param} = {value} is out of range, allowed {allowed}")]
    OutOfRange {
        param: String,
        value: String,
        allowed: String,
    },
    #[error("dropout directive {directive} has no eligible feed-forward layer")]
    NoDropoutLayers { directive: usize },
    #[error("image file not found: {path}")]
    MissingImageFile { path: String },
    #[error("bad PGM file {path}: {reason}")]
    BadPgm { path: String, reason: String },
}
