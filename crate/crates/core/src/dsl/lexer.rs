use super::{Code, Diagnostic};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Kw(Kw),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    DotDot,
    Assign,
    EqEq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Caret,
    Arrow,
    DoubleArrow,
    Eof,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kw {
    Puzzle,
    Require,
    Structure,
    Domain,
    Hidden,
    Constraint,
    Combine,
    On,
    Forall,
    Exists,
    In,
    Where,
    And,
    Or,
    Not,
    Sum,
    Prod,
    Null,
    Undecided,
    X,
}

impl Kw {
    const ALL: [(&'static str, Kw); 20] = [
        ("puzzle", Kw::Puzzle),
        ("require", Kw::Require),
        ("structure", Kw::Structure),
        ("domain", Kw::Domain),
        ("hidden", Kw::Hidden),
        ("constraint", Kw::Constraint),
        ("combine", Kw::Combine),
        ("on", Kw::On),
        ("forall", Kw::Forall),
        ("exists", Kw::Exists),
        ("in", Kw::In),
        ("where", Kw::Where),
        ("and", Kw::And),
        ("or", Kw::Or),
        ("not", Kw::Not),
        ("sum", Kw::Sum),
        ("prod", Kw::Prod),
        ("null", Kw::Null),
        ("undecided", Kw::Undecided),
        ("x", Kw::X),
    ];

    pub fn lookup(word: &str) -> Option<Kw> {
        Self::ALL.iter().find(|(w, _)| *w == word).map(|(_, k)| *k)
    }

    pub fn is_keyword(word: &str) -> bool {
        Self::lookup(word).is_some()
    }

    pub fn starts_statement(self) -> bool {
        matches!(
            self,
            Kw::Puzzle | Kw::Require | Kw::Structure | Kw::Domain | Kw::Hidden | Kw::Constraint
        )
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut k, mut line, mut col) = (0usize, 1usize, 1usize);
    while k < chars.len() {
        let c = chars[k];
        let (tl, tc) = (line, col);
        let err = |msg: String| Diagnostic::error(Code::Syntax, tl, tc, msg);
        if c == '\n' {
            k += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            k += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while k < chars.len() && chars[k] != '\n' {
                k += 1;
            }
            continue;
        }
        let two: String = chars[k..(k + 2).min(chars.len())].iter().collect();
        let three: String = chars[k..(k + 3).min(chars.len())].iter().collect();
        let (tok, len) = if three == "<->" {
            (Tok::DoubleArrow, 3)
        } else if two == "->" {
            (Tok::Arrow, 2)
        } else if two == ".." {
            (Tok::DotDot, 2)
        } else if two == "==" {
            (Tok::EqEq, 2)
        } else if two == "!=" {
            (Tok::Ne, 2)
        } else if two == "<=" {
            (Tok::Le, 2)
        } else if two == ">=" {
            (Tok::Ge, 2)
        } else if c.is_ascii_digit() {
            let start = k;
            let mut end = k;
            while end < chars.len() && chars[end].is_ascii_digit() {
                end += 1;
            }
            let text: String = chars[start..end].iter().collect();
            let v = text
                .parse::<i64>()
                .map_err(|_| err(format!("integer `{text}` is too large")))?;
            (Tok::Int(v), end - start)
        } else if c.is_alphabetic() || c == '_' {
            let mut end = k;
            while end < chars.len() && (chars[end].is_alphanumeric() || chars[end] == '_') {
                end += 1;
            }
            let word: String = chars[k..end].iter().collect();
            let tok = match Kw::lookup(&word) {
                Some(kw) => Tok::Kw(kw),
                None => Tok::Ident(word),
            };
            (tok, end - k)
        } else if c == '"' {
            let mut end = k + 1;
            let mut text = String::new();
            while end < chars.len() && chars[end] != '"' {
                if chars[end] == '\n' {
                    return Err(err("unterminated string".into()));
                }
                if chars[end] == '\\' && end + 1 < chars.len() {
                    end += 1;
                }
                text.push(chars[end]);
                end += 1;
            }
            if end >= chars.len() {
                return Err(err("unterminated string".into()));
            }
            (Tok::Str(text), end + 1 - k)
        } else {
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                '=' => Tok::Assign,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '^' => Tok::Caret,
                other => return Err(err(format!("unexpected character `{other}`"))),
            };
            (tok, 1)
        };
        out.push(Token {
            tok,
            line: tl,
            col: tc,
        });
        k += len;
        col += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_operators_and_ranges() {
        let toks: Vec<Tok> = lex("a <-> b -> 0..n*m # tail\nx")
            .unwrap()
            .into_iter()
            .map(|t| t.tok)
            .collect();
        assert_eq!(
            toks,
            vec![
                Tok::Ident("a".into()),
                Tok::DoubleArrow,
                Tok::Ident("b".into()),
                Tok::Arrow,
                Tok::Int(0),
                Tok::DotDot,
                Tok::Ident("n".into()),
                Tok::Star,
                Tok::Ident("m".into()),
                Tok::Kw(Kw::X),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn reports_position() {
        let e = lex("puzzle \"a\"\n  $").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
    }
}
