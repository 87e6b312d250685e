//! Tokenizer for hO source text.
//!
//! Keywords are recognized in ALL-UPPERCASE or all-lowercase spelling only;
//! any other casing is an identifier. Comments `(* ... *)` do not nest: the
//! first `*)` closes the comment.

use std::fmt;
use std::ops::Range;

use thiserror::Error;

use crate::source::{FileId, Loc};

macro_rules! keywords {
    ($($variant:ident => $text:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Keyword {
            $($variant),*
        }

        impl Keyword {
            pub const ALL: &'static [Keyword] = &[$(Keyword::$variant),*];

            /// Canonical (uppercase) spelling.
            pub fn as_str(self) -> &'static str {
                match self {
                    $(Keyword::$variant => $text),*
                }
            }

            fn from_upper(s: &str) -> Option<Keyword> {
                match s {
                    $($text => Some(Keyword::$variant),)*
                    _ => None,
                }
            }
        }
    };
}

keywords! {
    Module => "MODULE",
    Var => "VAR",
    Begin => "BEGIN",
    End => "END",
    Import => "IMPORT",
    Procedure => "PROCEDURE",
    Contract => "CONTRACT",
    Const => "CONST",
    Type => "TYPE",
    Include => "INCLUDE",
    If => "IF",
    Then => "THEN",
    Elsif => "ELSIF",
    Else => "ELSE",
    Case => "CASE",
    Of => "OF",
    While => "WHILE",
    Repeat => "REPEAT",
    Times => "TIMES",
    Select => "SELECT",
    Next => "NEXT",
    State => "STATE",
    Local => "LOCAL",
    External => "EXTERNAL",
    Return => "RETURN",
    Require => "REQUIRE",
    Provide => "PROVIDE",
    Invariant => "INVARIANT",
    Log => "LOG",
    True => "TRUE",
    False => "FALSE",
    And => "AND",
    Or => "OR",
    Not => "NOT",
    Div => "DIV",
    Mod => "MOD",
    Size => "SIZE",
    Record => "RECORD",
    Array => "ARRAY",
    Pointer => "POINTER",
    To => "TO",
    Volatile => "VOLATILE",
}

impl Keyword {
    /// Looks up a keyword; only the all-upper and all-lower spellings match.
    pub fn lookup(word: &str) -> Option<Keyword> {
        if word.bytes().all(|b| !b.is_ascii_lowercase()) {
            Keyword::from_upper(word)
        } else if word.bytes().all(|b| !b.is_ascii_uppercase()) {
            Keyword::from_upper(&word.to_ascii_uppercase())
        } else {
            None
        }
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Punct {
    Assign,     // :=
    Colon,      // :
    Semi,       // ;
    Comma,      // ,
    Dot,        // .
    DotDot,     // ..
    LParen,     // (
    RParen,     // )
    LBracket,   // [
    RBracket,   // ]
    Caret,      // ^
    Star,       // *
    Plus,       // +
    Minus,      // -
    Slash,      // /
    BitAnd,     // /\
    BitOr,      // \/
    BitXor,     // ><
    Tilde,      // ~
    Shl,        // <<
    Shr,        // >>
    Eq,         // =
    Hash,       // #
    Lt,         // <
    Gt,         // >
    Le,         // <=
    Ge,         // >=
    Bar,        // |
}

impl Punct {
    pub fn as_str(self) -> &'static str {
        match self {
            Punct::Assign => ":=",
            Punct::Colon => ":",
            Punct::Semi => ";",
            Punct::Comma => ",",
            Punct::Dot => ".",
            Punct::DotDot => "..",
            Punct::LParen => "(",
            Punct::RParen => ")",
            Punct::LBracket => "[",
            Punct::RBracket => "]",
            Punct::Caret => "^",
            Punct::Star => "*",
            Punct::Plus => "+",
            Punct::Minus => "-",
            Punct::Slash => "/",
            Punct::BitAnd => "/\\",
            Punct::BitOr => "\\/",
            Punct::BitXor => "><",
            Punct::Tilde => "~",
            Punct::Shl => "<<",
            Punct::Shr => ">>",
            Punct::Eq => "=",
            Punct::Hash => "#",
            Punct::Lt => "<",
            Punct::Gt => ">",
            Punct::Le => "<=",
            Punct::Ge => ">=",
            Punct::Bar => "|",
        }
    }
}

// Longest match first.
const PUNCTS: &[(&str, Punct)] = &[
    (":=", Punct::Assign),
    ("..", Punct::DotDot),
    ("/\\", Punct::BitAnd),
    ("\\/", Punct::BitOr),
    ("><", Punct::BitXor),
    ("<<", Punct::Shl),
    (">>", Punct::Shr),
    ("<=", Punct::Le),
    (">=", Punct::Ge),
    (":", Punct::Colon),
    (";", Punct::Semi),
    (",", Punct::Comma),
    (".", Punct::Dot),
    ("(", Punct::LParen),
    (")", Punct::RParen),
    ("[", Punct::LBracket),
    ("]", Punct::RBracket),
    ("^", Punct::Caret),
    ("*", Punct::Star),
    ("+", Punct::Plus),
    ("-", Punct::Minus),
    ("/", Punct::Slash),
    ("~", Punct::Tilde),
    ("=", Punct::Eq),
    ("#", Punct::Hash),
    ("<", Punct::Lt),
    (">", Punct::Gt),
    ("|", Punct::Bar),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident,
    Int,
    Str,
    Punct(Punct),
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// The lexeme exactly as written.
    pub text: String,
    /// Numeric value of an integer literal (zero otherwise).
    pub value: u64,
    pub loc: Loc,
    /// Byte range of the lexeme in the source.
    pub span: Range<usize>,
}

impl Token {
    pub fn is_keyword(&self, kw: Keyword) -> bool {
        self.kind == TokenKind::Keyword(kw)
    }

    pub fn is_punct(&self, p: Punct) -> bool {
        self.kind == TokenKind::Punct(p)
    }

    /// Contents of a string literal, without the quotes.
    pub fn string_value(&self) -> &str {
        debug_assert_eq!(self.kind, TokenKind::Str);
        &self.text[1..self.text.len() - 1]
    }

    /// True for keywords written in lowercase. The parser accepts these as
    /// identifiers in positions where the keyword itself cannot occur.
    pub fn is_lowercase_keyword(&self) -> bool {
        matches!(self.kind, TokenKind::Keyword(_)) && self.text.bytes().all(|b| !b.is_ascii_uppercase())
    }

    pub fn describe(&self) -> String {
        match self.kind {
            TokenKind::Eof => "end of file".to_string(),
            TokenKind::Str => format!("string {}", self.text),
            _ => format!("`{}`", self.text),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexErrorKind {
    UnterminatedComment,
    UnterminatedString,
    MalformedNumber,
    IllegalCharacter,
    LiteralOverflow,
}

impl fmt::Display for LexErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LexErrorKind::UnterminatedComment => "unterminated comment",
            LexErrorKind::UnterminatedString => "unterminated string",
            LexErrorKind::MalformedNumber => "malformed number",
            LexErrorKind::IllegalCharacter => "illegal character",
            LexErrorKind::LiteralOverflow => "literal overflow",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}: `{text}`")]
pub struct LexError {
    pub loc: Loc,
    pub kind: LexErrorKind,
    pub text: String,
}

pub const MAX_LITERAL: u64 = u32::MAX as u64;

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
    file: FileId,
}

impl<'a> Cursor<'a> {
    fn peek(&self, ahead: usize) -> Option<u8> {
        self.src.get(self.pos + ahead).copied()
    }

    fn loc(&self) -> Loc {
        Loc::new(self.file, self.line, self.col)
    }

    fn bump(&mut self) -> u8 {
        let b = self.src[self.pos];
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        b
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s.as_bytes())
    }
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

fn is_ident_char(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

fn is_printable(b: u8) -> bool {
    (0x20..0x7f).contains(&b)
}

/// Splits `source` into tokens. The result always ends with an `Eof` token.
pub fn tokenize(source: &str, file: FileId) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor {
        src: source.as_bytes(),
        pos: 0,
        line: 1,
        col: 1,
        file,
    };
    let mut tokens = Vec::new();

    loop {
        // Skip whitespace and comments.
        loop {
            match cur.peek(0) {
                Some(b' ' | b'\t' | b'\r' | b'\n' | b'\x0c') => {
                    cur.bump();
                }
                Some(b'(') if cur.peek(1) == Some(b'*') => {
                    let loc = cur.loc();
                    let start = cur.pos;
                    cur.bump();
                    cur.bump();
                    loop {
                        if cur.pos >= cur.src.len() {
                            return Err(LexError {
                                loc,
                                kind: LexErrorKind::UnterminatedComment,
                                text: snippet(&source[start..]),
                            });
                        }
                        if cur.starts_with("*)") {
                            cur.bump();
                            cur.bump();
                            break;
                        }
                        cur.bump();
                    }
                }
                _ => break,
            }
        }

        let loc = cur.loc();
        let start = cur.pos;
        let Some(b) = cur.peek(0) else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                text: String::new(),
                value: 0,
                loc,
                span: start..start,
            });
            return Ok(tokens);
        };

        let (kind, value) = if is_ident_start(b) {
            while cur.peek(0).is_some_and(is_ident_char) {
                cur.bump();
            }
            match Keyword::lookup(&source[start..cur.pos]) {
                Some(kw) => (TokenKind::Keyword(kw), 0),
                None => (TokenKind::Ident, 0),
            }
        } else if b.is_ascii_digit() {
            while cur.peek(0).is_some_and(is_ident_char) {
                cur.bump();
            }
            let value = number_value(&source[start..cur.pos], loc)?;
            (TokenKind::Int, value)
        } else if b == b'\'' {
            cur.bump();
            while cur.peek(0).is_some_and(|c| c != b'\'' && c != b'\n') {
                cur.bump();
            }
            if cur.peek(0) != Some(b'\'') {
                return Err(LexError {
                    loc,
                    kind: LexErrorKind::MalformedNumber,
                    text: source[start..cur.pos].to_string(),
                });
            }
            cur.bump();
            let body = &cur.src[start + 1..cur.pos - 1];
            if body.len() != 1 || !is_printable(body[0]) {
                return Err(LexError {
                    loc,
                    kind: LexErrorKind::MalformedNumber,
                    text: source[start..cur.pos].to_string(),
                });
            }
            (TokenKind::Int, body[0] as u64)
        } else if b == b'"' {
            cur.bump();
            loop {
                match cur.peek(0) {
                    Some(b'"') => {
                        cur.bump();
                        break;
                    }
                    Some(c) if is_printable(c) => {
                        cur.bump();
                    }
                    Some(b'\n') | Some(b'\r') | None => {
                        return Err(LexError {
                            loc,
                            kind: LexErrorKind::UnterminatedString,
                            text: source[start..cur.pos].to_string(),
                        });
                    }
                    Some(_) => {
                        let at = cur.loc();
                        return Err(LexError {
                            loc: at,
                            kind: LexErrorKind::IllegalCharacter,
                            text: char_at(source, cur.pos),
                        });
                    }
                }
            }
            (TokenKind::Str, 0)
        } else if let Some(&(text, p)) = PUNCTS.iter().find(|(text, _)| cur.starts_with(text)) {
            for _ in 0..text.len() {
                cur.bump();
            }
            (TokenKind::Punct(p), 0)
        } else {
            return Err(LexError {
                loc,
                kind: LexErrorKind::IllegalCharacter,
                text: char_at(source, start),
            });
        };

        tokens.push(Token {
            kind,
            text: source[start..cur.pos].to_string(),
            value,
            loc,
            span: start..cur.pos,
        });
    }
}

/// Decimal `digit{digit}` or hex `digit{hexdigit}h`.
fn number_value(text: &str, loc: Loc) -> Result<u64, LexError> {
    let malformed = || LexError {
        loc,
        kind: LexErrorKind::MalformedNumber,
        text: text.to_string(),
    };
    let overflow = || LexError {
        loc,
        kind: LexErrorKind::LiteralOverflow,
        text: text.to_string(),
    };
    let (digits, radix) = match text.strip_suffix('h') {
        Some(hex) => (hex, 16),
        None => (text, 10),
    };
    let valid = if radix == 16 {
        digits.bytes().all(|b| b.is_ascii_hexdigit())
    } else {
        digits.bytes().all(|b| b.is_ascii_digit())
    };
    if digits.is_empty() || !valid {
        return Err(malformed());
    }
    let mut value: u64 = 0;
    for b in digits.bytes() {
        let d = (b as char).to_digit(radix).ok_or_else(malformed)? as u64;
        value = value * radix as u64 + d;
        if value > MAX_LITERAL {
            return Err(overflow());
        }
    }
    Ok(value)
}

fn char_at(source: &str, pos: usize) -> String {
    source[pos..].chars().next().map(String::from).unwrap_or_default()
}

fn snippet(s: &str) -> String {
    s.chars().take(16).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src, 0)
            .unwrap()
            .into_iter()
            .map(|t| t.kind)
            .collect()
    }

    fn single(src: &str) -> Token {
        let toks = tokenize(src, 0).unwrap();
        assert_eq!(toks.len(), 2, "{toks:?}");
        toks.into_iter().next().unwrap()
    }

    fn err(src: &str) -> LexErrorKind {
        tokenize(src, 0).unwrap_err().kind
    }

    #[test]
    fn hex_literal() {
        let t = single("80000100h");
        assert_eq!(t.kind, TokenKind::Int);
        assert_eq!(t.value, 0x8000_0100);
        assert_eq!(single("0FFh").value, 255);
        assert_eq!(single("0ffh").value, 255);
    }

    #[test]
    fn hex_needs_leading_digit() {
        assert_eq!(single("FFh").kind, TokenKind::Ident);
    }

    #[test]
    fn comment_then_keyword() {
        assert_eq!(
            kinds("(* note *) MODULE"),
            vec![TokenKind::Keyword(Keyword::Module), TokenKind::Eof]
        );
    }

    #[test]
    fn comments_do_not_nest() {
        // the first `*)` closes, the rest is ordinary text
        let toks = tokenize("(* a (* b *) x *)", 0).unwrap();
        assert_eq!(toks[0].kind, TokenKind::Ident);
        assert_eq!(toks[0].text, "x");
        assert_eq!(toks[1].kind, TokenKind::Punct(Punct::Star));
        assert_eq!(toks[2].kind, TokenKind::Punct(Punct::RParen));
    }

    #[test]
    fn char_literal() {
        let t = single("'A'");
        assert_eq!(t.kind, TokenKind::Int);
        assert_eq!(t.value, 65);
    }

    #[test]
    fn keyword_casing() {
        assert_eq!(single("IF").kind, TokenKind::Keyword(Keyword::If));
        assert_eq!(single("if").kind, TokenKind::Keyword(Keyword::If));
        assert_eq!(single("If").kind, TokenKind::Ident);
        assert_eq!(single("iF").kind, TokenKind::Ident);
    }

    #[test]
    fn operators_longest_match() {
        let toks: Vec<_> = tokenize("a /\\ b \\/ c >< d << 1 >> 2 <= >= := .. /", 0)
            .unwrap()
            .into_iter()
            .filter_map(|t| match t.kind {
                TokenKind::Punct(p) => Some(p),
                _ => None,
            })
            .collect();
        assert_eq!(
            toks,
            vec![
                Punct::BitAnd,
                Punct::BitOr,
                Punct::BitXor,
                Punct::Shl,
                Punct::Shr,
                Punct::Le,
                Punct::Ge,
                Punct::Assign,
                Punct::DotDot,
                Punct::Slash
            ]
        );
    }

    #[test]
    fn range_after_number() {
        assert_eq!(
            kinds("1..5"),
            vec![
                TokenKind::Int,
                TokenKind::Punct(Punct::DotDot),
                TokenKind::Int,
                TokenKind::Eof
            ]
        );
    }

    #[test]
    fn locations_point_at_lexeme_start() {
        let toks = tokenize("MODULE m;\n  x := 1", 0).unwrap();
        assert_eq!(toks[0].loc, Loc::new(0, 1, 1));
        assert_eq!(toks[1].loc, Loc::new(0, 1, 8));
        assert_eq!(toks[3].loc, Loc::new(0, 2, 3));
        assert_eq!(toks[4].loc, Loc::new(0, 2, 5));
    }

    #[test]
    fn strings() {
        let t = single("\"hello world\"");
        assert_eq!(t.kind, TokenKind::Str);
        assert_eq!(t.string_value(), "hello world");
    }

    #[test]
    fn error_kinds() {
        assert_eq!(err("(* open"), LexErrorKind::UnterminatedComment);
        assert_eq!(err("\"open"), LexErrorKind::UnterminatedString);
        assert_eq!(err("\"a\nb\""), LexErrorKind::UnterminatedString);
        assert_eq!(err("12ab"), LexErrorKind::MalformedNumber);
        assert_eq!(err("'ab'"), LexErrorKind::MalformedNumber);
        assert_eq!(err("''"), LexErrorKind::MalformedNumber);
        assert_eq!(err("x $ y"), LexErrorKind::IllegalCharacter);
        assert_eq!(err("4294967296"), LexErrorKind::LiteralOverflow);
        assert_eq!(err("100000000h"), LexErrorKind::LiteralOverflow);
    }

    #[test]
    fn max_literal_accepted() {
        assert_eq!(single("4294967295").value, u32::MAX as u64);
        assert_eq!(single("0FFFFFFFFh").value, u32::MAX as u64);
    }

    #[test]
    fn error_message_names_kind() {
        let e = tokenize("a @", 0).unwrap_err();
        assert!(e.to_string().starts_with("illegal character"));
        assert_eq!(e.loc, Loc::new(0, 1, 3));
    }
}
