use proptest::prelude::*;

use hoc::lexer::{tokenize, Keyword, TokenKind};

/// Reserved words of the grammar, listed independently of the lexer table.
const GRAMMAR_KEYWORDS: [&str; 42] = [
    "AND", "ARRAY", "BEGIN", "CASE", "CONST", "CONTRACT", "DIV", "ELSE", "ELSIF", "END", "EXTERNAL", "FALSE", "IF",
    "IMPORT", "INCLUDE", "INVARIANT", "LOCAL", "LOG", "MODULE", "MOD", "NEXT", "NOT", "OF", "OR", "POINTER",
    "PROCEDURE", "PROVIDE", "RECORD", "REPEAT", "REQUIRE", "RETURN", "SELECT", "SIZE", "STATE", "THEN", "TIMES",
    "TO", "TRUE", "TYPE", "VAR", "VOLATILE", "WHILE",
];

#[test]
fn keyword_table_matches_the_grammar() {
    let mut table: Vec<&str> = Keyword::ALL.iter().map(|k| k.as_str()).collect();
    table.sort();
    let mut grammar = GRAMMAR_KEYWORDS.to_vec();
    grammar.sort();
    assert_eq!(table, grammar);
}

fn single(src: &str) -> TokenKind {
    let toks = tokenize(src, 0).unwrap();
    assert_eq!(toks.len(), 2, "{src}: {toks:?}");
    assert_eq!(toks[1].kind, TokenKind::Eof);
    toks[0].kind
}

#[test]
fn every_keyword_in_both_casings_and_no_other() {
    for word in GRAMMAR_KEYWORDS {
        let upper = single(word);
        assert!(matches!(upper, TokenKind::Keyword(k) if k.as_str() == word), "{word}");
        assert_eq!(single(&word.to_lowercase()), upper, "{word}");
        let mut mixed = word.to_lowercase();
        mixed.replace_range(0..1, &word[0..1]);
        assert_eq!(single(&mixed), TokenKind::Ident, "{mixed}");
        if word.len() > 1 {
            let mut mixed = word.to_string();
            mixed.replace_range(0..1, &word[0..1].to_lowercase());
            assert_eq!(single(&mixed), TokenKind::Ident, "{mixed}");
        }
    }
}

/// Source fragments that each lex to exactly one token, or to none
/// (whitespace and comments).
fn piece() -> impl Strategy<Value = String> {
    let keyword = (proptest::sample::select(GRAMMAR_KEYWORDS.to_vec()), 0..3u8).prop_map(|(k, case)| match case {
        0 => k.to_string(),
        1 => k.to_lowercase(),
        _ => {
            let mut s = k.to_lowercase();
            s.replace_range(0..1, &k[0..1]);
            s
        }
    });
    let punct = proptest::sample::select(vec![
        ":=", "..", "<<", ">>", "<=", ">=", "\\/", "><", ":", ";", ",", ".", "(", ")", "[", "]", "^", "*", "+", "-",
        "/", "~", "=", "#", "<", ">", "|",
    ])
    .prop_map(str::to_string);
    prop_oneof![
        keyword,
        "[a-z_][a-zA-Z0-9_]{0,8}",
        (0u32..=u32::MAX).prop_map(|n| n.to_string()),
        (0u32..=u32::MAX).prop_map(|n| format!("0{n:X}h")),
        "'[ -&(-~]'",
        "\"[ !#-~]{0,10}\"",
        punct,
        "\\(\\*[a-z (*]{0,12}\\*\\)",
        "[ \t\n]{1,3}",
    ]
}

fn is_gap(text: &str) -> bool {
    let mut rest = text;
    loop {
        rest = rest.trim_start_matches([' ', '\t', '\n', '\r']);
        if rest.is_empty() {
            return true;
        }
        let Some(body) = rest.strip_prefix("(*") else {
            return false;
        };
        let Some(end) = body.find("*)") else {
            return false;
        };
        rest = &body[end + 2..];
    }
}

proptest! {
    #[test]
    fn spans_are_lossless(pieces in proptest::collection::vec(piece(), 0..30)) {
        // Separate pieces so adjacent ones cannot fuse into one lexeme.
        let src = pieces.join(" ");
        let toks = tokenize(&src, 0).unwrap();
        prop_assert_eq!(toks.last().map(|t| t.kind), Some(TokenKind::Eof));
        let mut rebuilt = String::new();
        let mut at = 0;
        for t in &toks {
            prop_assert!(t.span.start >= at);
            let gap = &src[at..t.span.start];
            prop_assert!(is_gap(gap), "gap {:?}", gap);
            rebuilt += gap;
            prop_assert_eq!(&src[t.span.clone()], t.text.as_str());
            rebuilt += &t.text;
            // loc is the first byte of the lexeme.
            let before = &src[..t.span.start];
            let line = before.matches('\n').count() as u32 + 1;
            let col = (before.len() - before.rfind('\n').map_or(0, |i| i + 1)) as u32 + 1;
            prop_assert_eq!((t.loc.line, t.loc.col), (line, col));
            at = t.span.end;
        }
        rebuilt += &src[at..];
        prop_assert_eq!(rebuilt, src.clone());
        prop_assert_eq!(tokenize(&src, 0).unwrap(), toks);
    }

    #[test]
    fn one_token_per_piece(pieces in proptest::collection::vec(piece(), 1..20)) {
        let src = pieces.join(" ");
        let toks = tokenize(&src, 0).unwrap();
        let expected = pieces.iter().filter(|p| !is_gap(p)).count();
        prop_assert_eq!(toks.len(), expected + 1);
    }

    #[test]
    fn literal_values(n in 0u32..=u32::MAX) {
        let dec = tokenize(&n.to_string(), 0).unwrap();
        prop_assert_eq!((dec[0].kind, dec[0].value), (TokenKind::Int, n as u64));
        let hex = tokenize(&format!("0{n:x}h"), 0).unwrap();
        prop_assert_eq!((hex[0].kind, hex[0].value), (TokenKind::Int, n as u64));
    }

    #[test]
    fn literals_beyond_32_bits_are_rejected(n in (u32::MAX as u64 + 1)..u64::MAX) {
        prop_assert!(tokenize(&n.to_string(), 0).is_err());
    }
}
