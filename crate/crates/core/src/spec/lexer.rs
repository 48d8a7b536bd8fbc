use std::fmt;

use super::ParseError;
use crate::color::Rgba;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Int(i128),
    Real(f64),
    Str(String),
    Color(Rgba),
    LBrace,
    RBrace,
    Colon,
    Comma,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(i) => write!(f, "integer {i}"),
            Tok::Real(r) => write!(f, "number {r}"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::Color(c) => write!(f, "color {c}"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

/// Splits source text into tokens.
///
/// `#` opens a line comment everywhere except directly after a `:`, where it
/// starts a color literal.
pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out: Vec<Token> = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    let syntax = |line, column, expected: &str, found: String| ParseError::Syntax {
        line,
        column,
        expected: expected.to_string(),
        found,
    };

    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '#' => {
                let after_colon = matches!(out.last(), Some(Token { tok: Tok::Colon, .. }));
                if after_colon {
                    let start = i + 1;
                    let mut end = start;
                    while end < chars.len() && chars[end].is_ascii_alphanumeric() {
                        end += 1;
                    }
                    let digits: String = chars[start..end].iter().collect();
                    let color = Rgba::from_hex_digits(&digits).ok_or_else(|| {
                        syntax(tl, tc, "color #RRGGBB or #RRGGBBAA", format!("#{digits}"))
                    })?;
                    out.push(Token { tok: Tok::Color(color), line: tl, column: tc });
                    advance(end - i, &mut i, &mut col);
                } else {
                    while i < chars.len() && chars[i] != '\n' {
                        advance(1, &mut i, &mut col);
                    }
                }
            }
            '{' | '}' | ':' | ',' => {
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ':' => Tok::Colon,
                    _ => Tok::Comma,
                };
                out.push(Token { tok, line: tl, column: tc });
                advance(1, &mut i, &mut col);
            }
            '"' => {
                let mut j = i + 1;
                let mut s = String::new();
                loop {
                    match chars.get(j) {
                        None | Some('\n') => {
                            return Err(syntax(tl, tc, "closing `\"`", "end of line".into()))
                        }
                        Some('"') => break,
                        Some('\\') => {
                            let esc = match chars.get(j + 1) {
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                other => {
                                    return Err(syntax(
                                        line,
                                        col + (j - i),
                                        "escape \\\" \\\\ \\n or \\t",
                                        other.map_or("end of input".into(), |c| format!("\\{c}")),
                                    ))
                                }
                            };
                            s.push(esc);
                            j += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            j += 1;
                        }
                    }
                }
                out.push(Token { tok: Tok::Str(s), line: tl, column: tc });
                advance(j + 1 - i, &mut i, &mut col);
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' => {
                let (tok, len) = lex_number(&chars[i..])
                    .ok_or_else(|| syntax(tl, tc, "number", format!("`{c}`")))?;
                out.push(Token { tok, line: tl, column: tc });
                advance(len, &mut i, &mut col);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                out.push(Token { tok: Tok::Ident(word), line: tl, column: tc });
                advance(j - i, &mut i, &mut col);
            }
            other => return Err(syntax(tl, tc, "token", format!("`{other}`"))),
        }
    }
    out.push(Token { tok: Tok::Eof, line, column: col });
    Ok(out)
}

/// `[+-]? digits ('.' digits)? ([eE] [+-]? digits)?`
fn lex_number(s: &[char]) -> Option<(Tok, usize)> {
    let digits_from = |mut j: usize| {
        let start = j;
        while j < s.len() && s[j].is_ascii_digit() {
            j += 1;
        }
        (j > start).then_some(j)
    };
    let mut j = 0;
    if matches!(s.first(), Some('-' | '+')) {
        j = 1;
    }
    j = digits_from(j)?;
    let mut real = false;
    if s.get(j) == Some(&'.') {
        j = digits_from(j + 1)?;
        real = true;
    }
    if matches!(s.get(j), Some('e' | 'E')) {
        let mut k = j + 1;
        if matches!(s.get(k), Some('-' | '+')) {
            k += 1;
        }
        j = digits_from(k)?;
        real = true;
    }
    if s.get(j).is_some_and(|c| c.is_ascii_alphabetic() || *c == '_') {
        return None;
    }
    let text: String = s[..j].iter().collect();
    let tok = if real {
        Tok::Real(text.parse().ok()?)
    } else {
        Tok::Int(text.parse().ok()?)
    };
    Some((tok, j))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn hash_is_color_only_after_colon() {
        assert_eq!(
            toks("a: #FF000080 # trailing comment\n"),
            vec![
                Tok::Ident("a".into()),
                Tok::Colon,
                Tok::Color(Rgba::new(255, 0, 0, 128)),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn numbers() {
        assert_eq!(toks("-1")[0], Tok::Int(-1));
        assert_eq!(toks("0.25")[0], Tok::Real(0.25));
        assert_eq!(toks("1e-3")[0], Tok::Real(1e-3));
        assert_eq!(toks("18446744073709551615")[0], Tok::Int(u64::MAX as i128));
        assert!(tokenize("1.").is_err());
        assert!(tokenize("12abc").is_err());
    }

    #[test]
    fn positions_are_one_based() {
        let t = tokenize("network {\n  layer").unwrap();
        assert_eq!((t[0].line, t[0].column), (1, 1));
        assert_eq!((t[1].line, t[1].column), (1, 9));
        assert_eq!((t[2].line, t[2].column), (2, 3));
    }

    #[test]
    fn string_escapes() {
        assert_eq!(toks(r#""a\"b\\c""#)[0], Tok::Str("a\"b\\c".into()));
        assert!(tokenize("\"open").is_err());
    }

    #[test]
    fn bad_color_reports_position() {
        let err = tokenize("x:\n  #12345").unwrap_err();
        assert_eq!(err.position(), (2, 3));
    }
}
