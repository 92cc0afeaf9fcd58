use super::{ParseError, ParseErrorKind, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Number(u32),
    Colon,
    LParen,
    RParen,
    Comma,
    Dot,
    Equals,
    Tilde,
    Pipe,
    Amp,
    Arrow,
    Iff,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{}`", s),
            Tok::Number(n) => format!("`{}`", n),
            Tok::Colon => "`:`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(crate) fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;
    while i < bytes.len() {
        let start = i;
        let (sline, scol) = (line, col);
        let c = bytes[i] as char;
        let advance = |i: &mut usize, line: &mut u32, col: &mut u32| {
            if bytes[*i] == b'\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        };
        if c.is_ascii_whitespace() {
            advance(&mut i, &mut line, &mut col);
            continue;
        }
        if c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                advance(&mut i, &mut line, &mut col);
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len()
                && ((bytes[i] as char).is_ascii_alphanumeric()
                    || bytes[i] == b'_'
                    || bytes[i] == b'\'')
            {
                advance(&mut i, &mut line, &mut col);
            }
            out.push(Spanned {
                tok: Tok::Ident(src[start..i].to_string()),
                span: SourceSpan::new(start, i, sline, scol),
            });
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                advance(&mut i, &mut line, &mut col);
            }
            let text = &src[start..i];
            let n: u32 = text.parse().map_err(|_| {
                ParseError::new(
                    SourceSpan::new(start, i, sline, scol),
                    ParseErrorKind::Lex,
                    format!("sort number `{}` out of range", text),
                )
            })?;
            out.push(Spanned {
                tok: Tok::Number(n),
                span: SourceSpan::new(start, i, sline, scol),
            });
            continue;
        }
        let simple = match c {
            ':' => Some(Tok::Colon),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '=' => Some(Tok::Equals),
            '~' => Some(Tok::Tilde),
            '|' => Some(Tok::Pipe),
            '&' => Some(Tok::Amp),
            _ => None,
        };
        if let Some(tok) = simple {
            advance(&mut i, &mut line, &mut col);
            out.push(Spanned {
                tok,
                span: SourceSpan::new(start, i, sline, scol),
            });
            continue;
        }
        if c == '-' {
            if bytes.get(i + 1) == Some(&b'>') {
                advance(&mut i, &mut line, &mut col);
                advance(&mut i, &mut line, &mut col);
                out.push(Spanned {
                    tok: Tok::Arrow,
                    span: SourceSpan::new(start, i, sline, scol),
                });
                continue;
            }
            return Err(ParseError::new(
                SourceSpan::new(start, i + 1, sline, scol),
                ParseErrorKind::Lex,
                "expected `->`",
            ));
        }
        if c == '<' {
            if src[i..].starts_with("<->") {
                for _ in 0..3 {
                    advance(&mut i, &mut line, &mut col);
                }
                out.push(Spanned {
                    tok: Tok::Iff,
                    span: SourceSpan::new(start, i, sline, scol),
                });
                continue;
            }
            return Err(ParseError::new(
                SourceSpan::new(start, i + 1, sline, scol),
                ParseErrorKind::Lex,
                "expected `<->`",
            ));
        }
        return Err(ParseError::new(
            SourceSpan::new(start, i + c.len_utf8(), sline, scol),
            ParseErrorKind::Lex,
            format!("unexpected character `{}`", c),
        ));
    }
    out.push(Spanned {
        tok: Tok::Eof,
        span: SourceSpan::new(src.len(), src.len(), line, col),
    });
    Ok(out)
}
