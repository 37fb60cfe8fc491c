//! Minimal protocol-buffer text format: enough to build, print and re-parse
//! section files. No schema; field order and repetition are preserved.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum TextValue {
    Str(String),
    /// Numeric literal kept verbatim.
    Number(String),
    /// Bare identifier such as an enum value or `true`.
    Enum(String),
    Message(TextMessage),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TextMessage {
    pub fields: Vec<(String, TextValue)>,
}

impl TextMessage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn str(mut self, key: &str, value: impl Into<String>) -> Self {
        self.fields.push((key.into(), TextValue::Str(value.into())));
        self
    }

    pub fn number(mut self, key: &str, value: impl ToString) -> Self {
        self.fields.push((key.into(), TextValue::Number(value.to_string())));
        self
    }

    pub fn enumeration(mut self, key: &str, value: &str) -> Self {
        self.fields.push((key.into(), TextValue::Enum(value.into())));
        self
    }

    pub fn message(mut self, key: &str, value: TextMessage) -> Self {
        self.fields.push((key.into(), TextValue::Message(value)));
        self
    }

    /// First value stored under `key`.
    pub fn get(&self, key: &str) -> Option<&TextValue> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn get_all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a TextValue> + 'a {
        self.fields.iter().filter(move |(k, _)| k == key).map(|(_, v)| v)
    }

    /// Every dotted field path in the tree, e.g. `Body.Items.RooflineChart`.
    pub fn key_paths(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_paths("", &mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_paths(&self, prefix: &str, out: &mut Vec<String>) {
        for (k, v) in &self.fields {
            let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
            if let TextValue::Message(m) = v {
                m.collect_paths(&path, out);
            }
            out.push(path);
        }
    }

    /// Every string value in the tree, depth first.
    pub fn strings(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for (_, v) in &self.fields {
            match v {
                TextValue::Str(s) => out.push(s.as_str()),
                TextValue::Message(m) => out.extend(m.strings()),
                _ => {}
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out
    }

    fn write(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        for (k, v) in &self.fields {
            match v {
                TextValue::Str(s) => {
                    let _ = writeln!(out, "{pad}{k}: \"{}\"", quote(s));
                }
                TextValue::Number(n) | TextValue::Enum(n) => {
                    let _ = writeln!(out, "{pad}{k}: {n}");
                }
                TextValue::Message(m) => {
                    let _ = writeln!(out, "{pad}{k} {{");
                    m.write(out, depth + 1);
                    let _ = writeln!(out, "{pad}}}");
                }
            }
        }
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Ident(String),
    Str(String),
    Number(String),
    Colon,
    Open,
    Close,
}

fn err(line: usize, message: impl std::fmt::Display) -> Error {
    Error::malformed("section", format!("line {line}: {message}"))
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1;
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() || c == ',' || c == ';' => {
                chars.next();
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            ':' => {
                chars.next();
                tokens.push((Token::Colon, line));
            }
            '{' | '<' => {
                chars.next();
                tokens.push((Token::Open, line));
            }
            '}' | '>' => {
                chars.next();
                tokens.push((Token::Close, line));
            }
            '"' | '\'' => {
                let delim = c;
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        None | Some('\n') => return Err(err(line, "unterminated string")),
                        Some(c) if c == delim => break,
                        Some('\\') => match chars.next() {
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            Some(c @ ('"' | '\'' | '\\')) => s.push(c),
                            other => return Err(err(line, format!("bad escape {other:?}"))),
                        },
                        Some(c) => s.push(c),
                    }
                }
                tokens.push((Token::Str(s), line));
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '+') {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push((Token::Number(s), line));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || matches!(c, '_' | '.') {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push((Token::Ident(s), line));
            }
            other => return Err(err(line, format!("unexpected character {other:?}"))),
        }
    }
    Ok(tokens)
}

/// Parses text-format input into a [`TextMessage`] tree.
pub fn parse_text_format(text: &str) -> Result<TextMessage> {
    let tokens = tokenize(text)?;
    let mut pos = 0;
    let msg = parse_message(&tokens, &mut pos, false)?;
    Ok(msg)
}

fn parse_message(tokens: &[(Token, usize)], pos: &mut usize, nested: bool) -> Result<TextMessage> {
    let mut msg = TextMessage::new();
    loop {
        let Some((tok, line)) = tokens.get(*pos) else {
            if nested {
                let line = tokens.last().map_or(1, |t| t.1);
                return Err(err(line, "missing closing brace"));
            }
            return Ok(msg);
        };
        let line = *line;
        let key = match tok {
            Token::Close if nested => {
                *pos += 1;
                return Ok(msg);
            }
            Token::Ident(k) => k.clone(),
            other => return Err(err(line, format!("expected field name, found {other:?}"))),
        };
        *pos += 1;
        let mut colon = false;
        if let Some((Token::Colon, _)) = tokens.get(*pos) {
            colon = true;
            *pos += 1;
        }
        let value = match tokens.get(*pos) {
            Some((Token::Open, _)) => {
                *pos += 1;
                TextValue::Message(parse_message(tokens, pos, true)?)
            }
            Some((Token::Str(s), _)) if colon => {
                *pos += 1;
                let mut s = s.clone();
                // Adjacent literals concatenate.
                while let Some((Token::Str(more), _)) = tokens.get(*pos) {
                    s.push_str(more);
                    *pos += 1;
                }
                TextValue::Str(s)
            }
            Some((Token::Number(n), _)) if colon => {
                *pos += 1;
                TextValue::Number(n.clone())
            }
            Some((Token::Ident(v), _)) if colon => {
                *pos += 1;
                TextValue::Enum(v.clone())
            }
            _ => return Err(err(line, format!("field {key} has no value"))),
        };
        msg.fields.push((key, value));
    }
}
