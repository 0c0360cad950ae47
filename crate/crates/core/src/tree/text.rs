//! Parser and label quoting for the ASCII tree notation.
//!
//! ```text
//! tree   := "tau" | label | op "(" tree ("," tree)+ ")"
//! op     := "x" | "->" | "/\" | "loop"
//! label  := bare | '"' (char | '\"' | '\\')* '"'
//! ```
//!
//! The glyphs `×`, `→`, `∧`, `↺` and `τ` are accepted as well.

use super::{Operator, ProcessTree};
use crate::error::{Error, Result};

fn is_bare(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '+' | '#' | '@')
}

pub(crate) fn quote_label(label: &str) -> String {
    if !label.is_empty() && label != "tau" && label != "τ" && label.chars().all(is_bare) {
        return label.to_owned();
    }
    let mut out = String::with_capacity(label.len() + 2);
    out.push('"');
    for c in label.chars() {
        if matches!(c, '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.pos,
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn tree(&mut self) -> Result<ProcessTree> {
        self.skip_ws();
        match self.peek() {
            None => self.err("expected a tree, found end of input"),
            Some('"') => Ok(ProcessTree::Leaf(self.quoted()?)),
            Some(_) => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | ',' | '"') {
                        break;
                    }
                    self.bump();
                }
                let token = &self.src[start..self.pos];
                if token.is_empty() {
                    return self.err(format!("unexpected `{}`", self.peek().unwrap_or(' ')));
                }
                self.skip_ws();
                if self.peek() == Some('(') {
                    let op = match token {
                        "x" | "×" => Operator::Xor,
                        "->" | "→" => Operator::Sequence,
                        "/\\" | "∧" => Operator::Parallel,
                        "loop" | "↺" => Operator::Loop,
                        other => {
                            self.pos = start;
                            return self.err(format!("unknown operator `{other}`"));
                        }
                    };
                    self.bump();
                    let children = self.children()?;
                    if children.len() < 2 {
                        self.pos = start;
                        return self.err(format!("`{token}` needs at least two children"));
                    }
                    return Ok(ProcessTree::Node(op, children));
                }
                Ok(match token {
                    "tau" | "τ" => ProcessTree::Tau,
                    label => ProcessTree::Leaf(label.to_owned()),
                })
            }
        }
    }

    fn children(&mut self) -> Result<Vec<ProcessTree>> {
        let mut out = vec![self.tree()?];
        loop {
            self.skip_ws();
            match self.bump() {
                Some(',') => out.push(self.tree()?),
                Some(')') => return Ok(out),
                Some(c) => {
                    self.pos -= c.len_utf8();
                    return self.err(format!("expected `,` or `)`, found `{c}`"));
                }
                None => return self.err("unclosed `(`"),
            }
        }
    }

    fn quoted(&mut self) -> Result<String> {
        let start = self.pos;
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some(c) => out.push(c),
                    None => break,
                },
                Some(c) => out.push(c),
                None => break,
            }
        }
        self.pos = start;
        self.err("unterminated quoted label")
    }
}

/// Parses the ASCII notation produced by [`ProcessTree`]'s `Display`.
pub fn parse_text(src: &str) -> Result<ProcessTree> {
    let mut p = Parser { src, pos: 0 };
    let tree = p.tree()?;
    p.skip_ws();
    if p.pos != src.len() {
        return p.err("trailing input");
    }
    Ok(tree)
}
