use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// A bare identifier or a quoted string.
    Name(String),
    Sym(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

const SYMBOLS: [&str; 13] = [
    "->", "{", "}", "(", ")", "<", ">", ",", ":", ";", "=", "@", ".",
];

fn is_name_char(c: char) -> bool {
    !c.is_whitespace() && !"{}()<>,:;=\"@.".contains(c)
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, column: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *column = 1;
        } else {
            *column += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut column, c);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (l, col) = (line, column);
        if c == '"' {
            advance(&mut i, &mut line, &mut column, c);
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(ParseError::new(l, col, "unterminated string")),
                    Some('"') => {
                        advance(&mut i, &mut line, &mut column, '"');
                        break;
                    }
                    Some('\\') if matches!(chars.get(i + 1), Some('"' | '\\')) => {
                        s.push(chars[i + 1]);
                        advance(&mut i, &mut line, &mut column, '\\');
                        advance(&mut i, &mut line, &mut column, 'x');
                    }
                    Some(&ch) => {
                        s.push(ch);
                        advance(&mut i, &mut line, &mut column, ch);
                    }
                }
            }
            out.push(Token {
                tok: Tok::Name(s),
                line: l,
                column: col,
            });
            continue;
        }
        if let Some(sym) = SYMBOLS.iter().find(|s| {
            let n = s.chars().count();
            chars[i..].iter().take(n).copied().eq(s.chars())
        }) {
            for ch in sym.chars() {
                advance(&mut i, &mut line, &mut column, ch);
            }
            out.push(Token {
                tok: Tok::Sym(sym),
                line: l,
                column: col,
            });
            continue;
        }
        let mut s = String::new();
        while i < chars.len() && is_name_char(chars[i]) {
            if chars[i] == '-' && chars.get(i + 1) == Some(&'>') {
                break;
            }
            if chars[i] == '/' && chars.get(i + 1) == Some(&'/') {
                break;
            }
            let ch = chars[i];
            s.push(ch);
            advance(&mut i, &mut line, &mut column, ch);
        }
        if s.is_empty() {
            return Err(ParseError::new(
                l,
                col,
                format!("unexpected character `{c}`"),
            ));
        }
        out.push(Token {
            tok: Tok::Name(s),
            line: l,
            column: col,
        });
    }
    Ok(out)
}
