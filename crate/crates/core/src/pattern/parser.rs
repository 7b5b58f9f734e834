//! Recursive-descent parser for the pattern DSL.
//!
//! ```text
//! pattern := alt
//! alt     := seq ( "|" seq )*
//! seq     := postfix+
//! postfix := atom "?"*
//! atom    := STRING | "=" STRING | NUM | PCT | DUR | WORD
//!          | "gap<=" INT | "cap:" IDENT "(" alt ")" | "(" alt ")"
//! ```
//!
//! `#` starts a comment running to the end of the line.

use std::collections::HashSet;

use super::ast::{Node, PatternAst, TokenClass};
use crate::error::{Error, Result};
use crate::lexical::tokenize;

struct Parser {
    chars: Vec<char>,
    pos: usize,
    captures: HashSet<String>,
}

/// Compiles DSL source into a pattern.
pub fn compile(source: &str) -> Result<PatternAst> {
    let mut parser = Parser {
        chars: source.chars().collect(),
        pos: 0,
        captures: HashSet::new(),
    };
    parser.skip_trivia();
    if parser.at_end() {
        return Err(parser.error("empty pattern"));
    }
    let root = parser.alt()?;
    parser.skip_trivia();
    if !parser.at_end() {
        return Err(parser.error(&format!("unexpected `{}`", parser.chars[parser.pos])));
    }
    Ok(PatternAst::new(source.trim().to_string(), root))
}

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn position(&self) -> (usize, usize) {
        let mut line = 1;
        let mut column = 1;
        for &c in &self.chars[..self.pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        (line, column)
    }

    fn error(&self, message: &str) -> Error {
        let (line, column) = self.position();
        Error::Syntax {
            line,
            column,
            message: message.to_string(),
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += 1;
            } else if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        let n = s.chars().count();
        if self.chars.len() >= self.pos + n && self.chars[self.pos..self.pos + n].iter().copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn alt(&mut self) -> Result<Node> {
        let mut branches = vec![self.seq()?];
        loop {
            self.skip_trivia();
            if self.eat("|") {
                branches.push(self.seq()?);
            } else {
                break;
            }
        }
        Ok(if branches.len() == 1 { branches.pop().unwrap() } else { Node::Alt(branches) })
    }

    fn seq(&mut self) -> Result<Node> {
        let mut items = Vec::new();
        loop {
            self.skip_trivia();
            match self.peek() {
                None | Some('|') | Some(')') => break,
                _ => items.push(self.postfix()?),
            }
        }
        match items.len() {
            0 => Err(self.error("empty alternative")),
            1 => Ok(items.pop().unwrap()),
            _ => Ok(Node::Seq(items)),
        }
    }

    fn postfix(&mut self) -> Result<Node> {
        let mut node = self.atom()?;
        loop {
            self.skip_trivia();
            if self.eat("?") {
                node = Node::Opt(Box::new(node));
            } else {
                return Ok(node);
            }
        }
    }

    fn atom(&mut self) -> Result<Node> {
        self.skip_trivia();
        match self.peek() {
            Some('"') => self.literal(true),
            Some('=') => {
                self.pos += 1;
                if self.peek() != Some('"') {
                    return Err(self.error("expected a quoted literal after `=`"));
                }
                self.literal(false)
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.alt()?;
                self.skip_trivia();
                if !self.eat(")") {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_alphabetic() => self.keyword(),
            Some(c) => Err(self.error(&format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of pattern")),
        }
    }

    fn literal(&mut self, case_insensitive: bool) -> Result<Node> {
        let start = self.pos;
        self.pos += 1;
        let mut text = String::new();
        loop {
            match self.peek() {
                None => {
                    self.pos = start;
                    return Err(self.error("unterminated string literal"));
                }
                Some('"') => {
                    self.pos += 1;
                    break;
                }
                Some('\\') => {
                    self.pos += 1;
                    match self.peek() {
                        Some(c) => {
                            text.push(c);
                            self.pos += 1;
                        }
                        None => return Err(self.error("dangling escape")),
                    }
                }
                Some(c) => {
                    text.push(c);
                    self.pos += 1;
                }
            }
        }
        let tokens = tokenize(&text);
        if tokens.is_empty() {
            self.pos = start;
            return Err(self.error("empty literal"));
        }
        let mut nodes: Vec<Node> = tokens
            .into_iter()
            .map(|t| Node::Literal {
                text: if case_insensitive { t.text.to_lowercase() } else { t.text },
                case_insensitive,
            })
            .collect();
        Ok(if nodes.len() == 1 { nodes.pop().unwrap() } else { Node::Seq(nodes) })
    }

    fn ident(&mut self) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                out.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        out
    }

    fn keyword(&mut self) -> Result<Node> {
        let start = self.pos;
        let word = self.ident();
        match word.as_str() {
            "NUM" => Ok(Node::Class(TokenClass::Num)),
            "PCT" => Ok(Node::Class(TokenClass::Pct)),
            "DUR" => Ok(Node::Class(TokenClass::Dur)),
            "WORD" => Ok(Node::Class(TokenClass::Word)),
            "gap" => {
                if !self.eat("<=") {
                    return Err(self.error("expected `<=` after `gap`"));
                }
                let digits_at = self.pos;
                let digits = self.ident();
                match digits.parse::<usize>() {
                    Ok(k) => Ok(Node::Gap(k)),
                    Err(_) => {
                        self.pos = digits_at;
                        Err(self.error("expected a non-negative gap bound"))
                    }
                }
            }
            "cap" => {
                if !self.eat(":") {
                    return Err(self.error("expected `:` after `cap`"));
                }
                let name_at = self.pos;
                let name = self.ident();
                if name.is_empty() {
                    return Err(self.error("expected a capture name"));
                }
                if !self.captures.insert(name.clone()) {
                    self.pos = name_at;
                    return Err(self.error(&format!("duplicate capture name `{name}`")));
                }
                self.skip_trivia();
                if !self.eat("(") {
                    return Err(self.error("expected `(` after capture name"));
                }
                let inner = self.alt()?;
                self.skip_trivia();
                if !self.eat(")") {
                    return Err(self.error("expected `)`"));
                }
                Ok(Node::Capture {
                    name,
                    node: Box::new(inner),
                })
            }
            _ => {
                self.pos = start;
                Err(self.error(&format!("unknown keyword `{word}`")))
            }
        }
    }
}
