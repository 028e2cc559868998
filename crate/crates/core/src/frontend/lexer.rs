//! Tokenizer for the world DSL. Produces positioned tokens; `//` comments
//! and whitespace are skipped.

use std::fmt;

use crate::model::SourceLoc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    // keywords
    Package,
    Imports,
    Class,
    Extends,
    Extension,
    Method,
    Script,
    Return,
    Fail,
    SelfKw,
    New,
    Field,
    // punctuation
    LBrace,
    RBrace,
    LParen,
    RParen,
    Dot,
    Comma,
    Semi,
    Slash,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(n) => write!(f, "integer `{n}`"),
            Tok::Str(_) => write!(f, "string literal"),
            Tok::Package => write!(f, "`package`"),
            Tok::Imports => write!(f, "`imports`"),
            Tok::Class => write!(f, "`class`"),
            Tok::Extends => write!(f, "`extends`"),
            Tok::Extension => write!(f, "`extension`"),
            Tok::Method => write!(f, "`method`"),
            Tok::Script => write!(f, "`script`"),
            Tok::Return => write!(f, "`return`"),
            Tok::Fail => write!(f, "`fail`"),
            Tok::SelfKw => write!(f, "`self`"),
            Tok::New => write!(f, "`new`"),
            Tok::Field => write!(f, "`field`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub loc: SourceLoc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub loc: SourceLoc,
    pub message: String,
}

/// Tokenizes the whole input; the final token is always `Eof` (carrying
/// the end-of-input position, used for unterminated-construct messages).
pub fn lex(source: &str) -> Result<Vec<Token>, LexError> {
    let mut tokens = Vec::new();
    let mut chars = source.chars().peekable();
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if let Some(c) = c {
                if c == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
            }
            c
        }};
    }

    loop {
        let loc = SourceLoc::new(line, col);
        let Some(&c) = chars.peek() else { break };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '/' => {
                bump!();
                if chars.peek() == Some(&'/') {
                    while let Some(&c) = chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        bump!();
                    }
                } else {
                    tokens.push(Token { tok: Tok::Slash, loc });
                }
            }
            '{' => {
                bump!();
                tokens.push(Token { tok: Tok::LBrace, loc });
            }
            '}' => {
                bump!();
                tokens.push(Token { tok: Tok::RBrace, loc });
            }
            '(' => {
                bump!();
                tokens.push(Token { tok: Tok::LParen, loc });
            }
            ')' => {
                bump!();
                tokens.push(Token { tok: Tok::RParen, loc });
            }
            '.' => {
                bump!();
                tokens.push(Token { tok: Tok::Dot, loc });
            }
            ',' => {
                bump!();
                tokens.push(Token { tok: Tok::Comma, loc });
            }
            ';' => {
                bump!();
                tokens.push(Token { tok: Tok::Semi, loc });
            }
            '"' => {
                bump!();
                let mut value = String::new();
                loop {
                    match bump!() {
                        Some('"') => break,
                        Some('\\') => match bump!() {
                            Some('"') => value.push('"'),
                            Some('\\') => value.push('\\'),
                            Some(c) => {
                                return Err(LexError {
                                    loc: SourceLoc::new(line, col),
                                    message: format!("unsupported escape `\\{c}`"),
                                })
                            }
                            None => {
                                return Err(LexError {
                                    loc: SourceLoc::new(line, col),
                                    message: "unterminated string literal".into(),
                                })
                            }
                        },
                        Some('\n') | None => {
                            return Err(LexError {
                                loc,
                                message: "unterminated string literal".into(),
                            })
                        }
                        Some(c) => value.push(c),
                    }
                }
                tokens.push(Token { tok: Tok::Str(value), loc });
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        digits.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let value = digits.parse().map_err(|_| LexError {
                    loc,
                    message: format!("integer literal `{digits}` out of range"),
                })?;
                tokens.push(Token { tok: Tok::Int(value), loc });
            }
            c if c.is_ascii_alphabetic() => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let tok = match word.as_str() {
                    "package" => Tok::Package,
                    "imports" => Tok::Imports,
                    "class" => Tok::Class,
                    "extends" => Tok::Extends,
                    "extension" => Tok::Extension,
                    "method" => Tok::Method,
                    "script" => Tok::Script,
                    "return" => Tok::Return,
                    "fail" => Tok::Fail,
                    "self" => Tok::SelfKw,
                    "new" => Tok::New,
                    "field" => Tok::Field,
                    _ => Tok::Ident(word),
                };
                tokens.push(Token { tok, loc });
            }
            other => {
                return Err(LexError { loc, message: format!("unexpected character `{other}`") })
            }
        }
    }
    tokens.push(Token { tok: Tok::Eof, loc: SourceLoc::new(line, col) });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        lex(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn lexes_declaration_shapes() {
        assert_eq!(
            toks("method at/1(index) {"),
            vec![
                Tok::Method,
                Tok::Ident("at".into()),
                Tok::Slash,
                Tok::Int(1),
                Tok::LParen,
                Tok::Ident("index".into()),
                Tok::RParen,
                Tok::LBrace,
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn comments_and_strings() {
        assert_eq!(
            toks("// header\n\"a \\\"b\\\"\" ;"),
            vec![Tok::Str("a \"b\"".into()), Tok::Semi, Tok::Eof]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let tokens = lex("ab\n  cd").unwrap();
        assert_eq!(tokens[0].loc, SourceLoc::new(1, 1));
        assert_eq!(tokens[1].loc, SourceLoc::new(2, 3));
        assert_eq!(tokens[2].loc, SourceLoc::new(2, 5)); // Eof
    }

    #[test]
    fn unterminated_string_errors() {
        let err = lex("\"abc").unwrap_err();
        assert_eq!(err.loc, SourceLoc::new(1, 1));
    }
}
