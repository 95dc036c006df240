//! Tokenizer for the definition language with line and column tracking.

use crate::ast::Pos;
use crate::parser::ParseError;

/// One lexical token; keywords are classified by the parser.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Semi,
    Comma,
    Eq,
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("`{}`", s),
            TokenKind::Int(n) => format!("`{}`", n),
            TokenKind::LBrace => "`{`".to_string(),
            TokenKind::RBrace => "`}`".to_string(),
            TokenKind::LBracket => "`[`".to_string(),
            TokenKind::RBracket => "`]`".to_string(),
            TokenKind::LParen => "`(`".to_string(),
            TokenKind::RParen => "`)`".to_string(),
            TokenKind::Semi => "`;`".to_string(),
            TokenKind::Comma => "`,`".to_string(),
            TokenKind::Eq => "`=`".to_string(),
            TokenKind::Plus => "`+`".to_string(),
            TokenKind::Minus => "`-`".to_string(),
            TokenKind::Star => "`*`".to_string(),
            TokenKind::Caret => "`^`".to_string(),
            TokenKind::Slash => "`/`".to_string(),
            TokenKind::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Pos,
}

struct Cursor {
    chars: Vec<char>,
    i: usize,
    line: u32,
    col: u32,
}

impl Cursor {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn bump(&mut self) -> char {
        let c = self.chars[self.i];
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }
}

/// Tokenize a whole source text. `#` starts a comment running to the end
/// of the line.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor { chars: src.chars().collect(), i: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        let pos = cur.pos();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }
        if c.is_ascii_digit() {
            let mut text = String::new();
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                text.push(cur.bump());
            }
            let n: i64 = text.parse().map_err(|_| ParseError {
                pos,
                msg: format!("integer literal `{}` is too large", text),
            })?;
            out.push(Token { kind: TokenKind::Int(n), pos });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut text = String::new();
            while cur.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                text.push(cur.bump());
            }
            out.push(Token { kind: TokenKind::Ident(text), pos });
            continue;
        }
        let kind = match c {
            '{' => TokenKind::LBrace,
            '}' => TokenKind::RBrace,
            '[' => TokenKind::LBracket,
            ']' => TokenKind::RBracket,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            ';' => TokenKind::Semi,
            ',' => TokenKind::Comma,
            '=' => TokenKind::Eq,
            '+' => TokenKind::Plus,
            '-' => TokenKind::Minus,
            '*' => TokenKind::Star,
            '^' => TokenKind::Caret,
            '/' => TokenKind::Slash,
            other => {
                return Err(ParseError { pos, msg: format!("unexpected character `{}`", other) })
            }
        };
        cur.bump();
        out.push(Token { kind, pos });
    }
    out.push(Token { kind: TokenKind::Eof, pos: cur.pos() });
    Ok(out)
}
