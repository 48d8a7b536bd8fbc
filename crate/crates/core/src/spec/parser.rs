use std::collections::HashMap;

use super::lexer::{tokenize, Tok, Token};
use super::{
    AnimationDirective, LayerKind, LayerSpec, NetworkSpec, OutputFormat, ParseError,
    RenderSettings, StyleSpec,
};
use crate::color::Rgba;

/// Parses source text into a [`NetworkSpec`].
///
/// Layer and directive counts are not checked here; that is left to
/// validation so the parser stays a pure grammar check.
pub fn parse_spec(text: &str) -> Result<NetworkSpec, ParseError> {
    let toks = tokenize(text)?;
    Parser { toks, pos: 0 }.spec()
}

#[derive(Clone, Copy, PartialEq)]
enum Ty {
    PositiveInt,
    U64,
    Real,
    Str,
    Color,
}

impl Ty {
    fn describe(self) -> &'static str {
        match self {
            Ty::PositiveInt => "positive integer",
            Ty::U64 => "unsigned 64-bit integer",
            Ty::Real => "number",
            Ty::Str => "string",
            Ty::Color => "color",
        }
    }
}

#[derive(Clone, Debug)]
enum Typed {
    Int(u64),
    Real(f64),
    Str(String),
    Color(Rgba),
}

struct Param {
    name: String,
    name_at: (usize, usize),
    value: Tok,
    value_at: (usize, usize),
}

struct Block {
    name: String,
    at: (usize, usize),
    values: HashMap<&'static str, (Typed, (usize, usize))>,
}

impl Block {
    fn missing(&self, name: &str) -> ParseError {
        ParseError::MissingParam {
            line: self.at.0,
            column: self.at.1,
            block: self.name.clone(),
            name: name.to_string(),
        }
    }

    fn int(&self, name: &str) -> Option<u64> {
        match self.values.get(name) {
            Some((Typed::Int(v), _)) => Some(*v),
            _ => None,
        }
    }

    fn req_u32(&self, name: &str) -> Result<u32, ParseError> {
        self.int(name).map(|v| v as u32).ok_or_else(|| self.missing(name))
    }

    fn real(&self, name: &str) -> Option<f64> {
        match self.values.get(name) {
            Some((Typed::Real(v), _)) => Some(*v),
            _ => None,
        }
    }

    fn string(&self, name: &str) -> Option<(String, (usize, usize))> {
        match self.values.get(name) {
            Some((Typed::Str(s), at)) => Some((s.clone(), *at)),
            _ => None,
        }
    }

    fn color(&self, name: &str) -> Option<Rgba> {
        match self.values.get(name) {
            Some((Typed::Color(c), _)) => Some(*c),
            _ => None,
        }
    }
}

fn schema(block: &str) -> &'static [(&'static str, Ty)] {
    match block {
        "image" => &[("source", Ty::Str)],
        "ff" => &[("units", Ty::PositiveInt)],
        "conv2d" => &[
            ("feature_maps", Ty::PositiveInt),
            ("map_size", Ty::PositiveInt),
            ("filter_size", Ty::PositiveInt),
        ],
        "maxpool2d" => &[("kernel", Ty::PositiveInt)],
        "forward_pass" => &[],
        "dropout" => &[("rate", Ty::Real), ("seed", Ty::U64)],
        "render" => &[
            ("fps", Ty::PositiveInt),
            ("width_px", Ty::PositiveInt),
            ("height_px", Ty::PositiveInt),
            ("pair_duration_s", Ty::Real),
            ("formats", Ty::Str),
        ],
        "style" => &[
            ("background", Ty::Color),
            ("neuron_fill", Ty::Color),
            ("neuron_stroke", Ty::Color),
            ("edge_color", Ty::Color),
            ("pulse_color", Ty::Color),
            ("dropped_opacity", Ty::Real),
        ],
        _ => &[],
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError::Syntax {
            line: t.line,
            column: t.column,
            expected: expected.to_string(),
            found: t.tok.to_string(),
        }
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(w) if w == word)
    }

    fn keyword(&mut self, word: &str) -> Result<Token, ParseError> {
        if self.at_keyword(word) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&format!("`{word}`")))
        }
    }

    fn punct(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn spec(mut self) -> Result<NetworkSpec, ParseError> {
        self.keyword("network")?;
        self.punct(Tok::LBrace)?;
        let mut layers = Vec::new();
        while self.at_keyword("layer") {
            layers.push(self.layer()?);
        }
        if self.peek().tok != Tok::RBrace {
            return Err(self.unexpected("`layer` or `}`"));
        }
        self.bump();

        let mut directives = Vec::new();
        while self.at_keyword("animate") {
            directives.push(self.directive()?);
        }

        let mut style = None;
        let mut render = None;
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::Ident(w) if w == "render" || w == "style" => {
                    let seen = if w == "render" { render.is_some() } else { style.is_some() };
                    if seen {
                        return Err(ParseError::DuplicateBlock {
                            line: t.line,
                            column: t.column,
                            block: w.clone(),
                        });
                    }
                    self.bump();
                    let block = self.block(w, (t.line, t.column))?;
                    if w == "render" {
                        render = Some(build_render(&block)?);
                    } else {
                        style = Some(build_style(&block));
                    }
                }
                Tok::Eof => break,
                _ => {
                    let expected = if style.is_none() && render.is_none() {
                        "`animate`, `render`, `style` or end of input"
                    } else {
                        "`render`, `style` or end of input"
                    };
                    return Err(self.unexpected(expected));
                }
            }
        }

        Ok(NetworkSpec {
            layers,
            directives,
            style: style.unwrap_or_default(),
            render: render.unwrap_or_default(),
        })
    }

    fn layer(&mut self) -> Result<LayerSpec, ParseError> {
        self.keyword("layer")?;
        let t = self.peek().clone();
        let Tok::Ident(name) = &t.tok else {
            return Err(self.unexpected("layer kind"));
        };
        let kind = LayerKind::from_keyword(name).ok_or_else(|| ParseError::UnknownLayerKind {
            line: t.line,
            column: t.column,
            name: name.clone(),
        })?;
        self.bump();
        let block = self.block(kind.keyword(), (t.line, t.column))?;
        Ok(match kind {
            LayerKind::Image => LayerSpec::Image {
                source: block.string("source").ok_or_else(|| block.missing("source"))?.0,
            },
            LayerKind::FeedForward => LayerSpec::FeedForward { units: block.req_u32("units")? },
            LayerKind::Convolutional2D => LayerSpec::Convolutional2D {
                feature_maps: block.req_u32("feature_maps")?,
                map_size: block.req_u32("map_size")?,
                filter_size: block.req_u32("filter_size")?,
            },
            LayerKind::MaxPooling2D => LayerSpec::MaxPooling2D { kernel: block.req_u32("kernel")? },
        })
    }

    fn directive(&mut self) -> Result<AnimationDirective, ParseError> {
        self.keyword("animate")?;
        let t = self.peek().clone();
        let Tok::Ident(name) = &t.tok else {
            return Err(self.unexpected("directive name"));
        };
        if name != "forward_pass" && name != "dropout" {
            return Err(ParseError::UnknownDirective {
                line: t.line,
                column: t.column,
                name: name.clone(),
            });
        }
        self.bump();
        let block = self.block(name, (t.line, t.column))?;
        Ok(if name == "forward_pass" {
            AnimationDirective::ForwardPass
        } else {
            AnimationDirective::Dropout {
                rate: block.real("rate").unwrap_or(AnimationDirective::DEFAULT_DROPOUT_RATE),
                seed: block.int("seed").unwrap_or(AnimationDirective::DEFAULT_DROPOUT_SEED),
            }
        })
    }

    /// `"{" params? "}"`, type-checked against the block's schema.
    fn block(&mut self, name: &str, at: (usize, usize)) -> Result<Block, ParseError> {
        self.punct(Tok::LBrace)?;
        let mut params = Vec::new();
        loop {
            if self.peek().tok == Tok::RBrace {
                self.bump();
                break;
            }
            params.push(self.param()?);
            match self.peek().tok {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RBrace => {}
                _ => return Err(self.unexpected("`,` or `}`")),
            }
        }

        let schema = schema(name);
        let mut values = HashMap::new();
        for p in params {
            let Some(&(key, ty)) = schema.iter().find(|(k, _)| *k == p.name) else {
                return Err(ParseError::UnknownParam {
                    line: p.name_at.0,
                    column: p.name_at.1,
                    block: name.to_string(),
                    name: p.name,
                });
            };
            if values.contains_key(key) {
                return Err(ParseError::DuplicateParam {
                    line: p.name_at.0,
                    column: p.name_at.1,
                    name: p.name,
                });
            }
            let mismatch = || ParseError::TypeMismatch {
                line: p.value_at.0,
                column: p.value_at.1,
                param: key.to_string(),
                expected: ty.describe().to_string(),
            };
            let typed = match (ty, &p.value) {
                (Ty::PositiveInt, Tok::Int(v)) if (1..=u32::MAX as i128).contains(v) => {
                    Typed::Int(*v as u64)
                }
                (Ty::U64, Tok::Int(v)) if (0..=u64::MAX as i128).contains(v) => {
                    Typed::Int(*v as u64)
                }
                (Ty::Real, Tok::Int(v)) => Typed::Real(*v as f64),
                (Ty::Real, Tok::Real(v)) => Typed::Real(*v),
                (Ty::Str, Tok::Str(s)) => Typed::Str(s.clone()),
                (Ty::Color, Tok::Color(c)) => Typed::Color(*c),
                _ => return Err(mismatch()),
            };
            values.insert(key, (typed, p.value_at));
        }
        Ok(Block { name: name.to_string(), at, values })
    }

    fn param(&mut self) -> Result<Param, ParseError> {
        let t = self.peek().clone();
        let Tok::Ident(name) = t.tok else {
            return Err(self.unexpected("parameter name or `}`"));
        };
        self.bump();
        self.punct(Tok::Colon)?;
        let v = self.peek().clone();
        match v.tok {
            Tok::Int(_) | Tok::Real(_) | Tok::Str(_) | Tok::Color(_) => {
                self.bump();
            }
            _ => return Err(self.unexpected("value")),
        }
        Ok(Param {
            name,
            name_at: (t.line, t.column),
            value: v.tok,
            value_at: (v.line, v.column),
        })
    }
}

fn build_render(block: &Block) -> Result<RenderSettings, ParseError> {
    let d = RenderSettings::default();
    let formats = match block.string("formats") {
        None => d.formats,
        Some((list, at)) => OutputFormat::parse_list(&list).ok_or(ParseError::TypeMismatch {
            line: at.0,
            column: at.1,
            param: "formats".into(),
            expected: "comma-separated list of svg, gif".into(),
        })?,
    };
    Ok(RenderSettings {
        fps: block.int("fps").map_or(d.fps, |v| v as u32),
        width_px: block.int("width_px").map_or(d.width_px, |v| v as u32),
        height_px: block.int("height_px").map_or(d.height_px, |v| v as u32),
        pair_duration_s: block.real("pair_duration_s").unwrap_or(d.pair_duration_s),
        formats,
    })
}

fn build_style(block: &Block) -> StyleSpec {
    let d = StyleSpec::default();
    StyleSpec {
        background: block.color("background").unwrap_or(d.background),
        neuron_fill: block.color("neuron_fill").unwrap_or(d.neuron_fill),
        neuron_stroke: block.color("neuron_stroke").unwrap_or(d.neuron_stroke),
        edge_color: block.color("edge_color").unwrap_or(d.edge_color),
        pulse_color: block.color("pulse_color").unwrap_or(d.pulse_color),
        dropped_opacity: block.real("dropped_opacity").unwrap_or(d.dropped_opacity),
    }
}
