use std::fmt;

use thiserror::Error;

/// Regular expression over event identifiers.
///
/// `Concat` and `Union` always hold at least two children; build them with
/// [`Expr::concat`] and [`Expr::union`], which flatten nested lists. Union
/// children are additionally sorted by their printed form and deduplicated,
/// so `a + b` and `b + a` are the same tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Epsilon,
    Sym(String),
    Concat(Vec<Expr>),
    Union(Vec<Expr>),
    Star(Box<Expr>),
    /// Prefix closure, written `pc(...)`.
    PrefClose(Box<Expr>),
}

impl Expr {
    pub fn sym(id: impl Into<String>) -> Expr {
        Expr::Sym(id.into())
    }

    pub fn concat(children: impl IntoIterator<Item = Expr>) -> Expr {
        let mut out = Vec::new();
        for c in children {
            match c {
                Expr::Concat(inner) => out.extend(inner),
                Expr::Epsilon => {}
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Expr::Epsilon,
            1 => out.pop().unwrap(),
            _ => Expr::Concat(out),
        }
    }

    pub fn union(children: impl IntoIterator<Item = Expr>) -> Expr {
        let mut out = Vec::new();
        for c in children {
            match c {
                Expr::Union(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        let mut keyed: Vec<(String, Expr)> = out.into_iter().map(|e| (e.to_string(), e)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        let mut out: Vec<Expr> = keyed.into_iter().map(|(_, e)| e).collect();
        match out.len() {
            0 => Expr::Epsilon,
            1 => out.pop().unwrap(),
            _ => Expr::Union(out),
        }
    }

    pub fn star(child: Expr) -> Expr {
        Expr::Star(Box::new(child))
    }

    pub fn pc(child: Expr) -> Expr {
        Expr::PrefClose(Box::new(child))
    }

    /// Event identifiers in left-to-right order, with repetitions.
    pub fn symbols(&self) -> Vec<&str> {
        fn walk<'a>(e: &'a Expr, out: &mut Vec<&'a str>) {
            match e {
                Expr::Epsilon => {}
                Expr::Sym(s) => out.push(s),
                Expr::Concat(cs) | Expr::Union(cs) => cs.iter().for_each(|c| walk(c, out)),
                Expr::Star(c) | Expr::PrefClose(c) => walk(c, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Epsilon => f.write_str("()"),
            Expr::Sym(s) => f.write_str(s),
            Expr::Concat(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    match c {
                        Expr::Union(_) => write!(f, "({c})")?,
                        _ => write!(f, "{c}")?,
                    }
                }
                Ok(())
            }
            Expr::Union(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
            Expr::Star(c) => match **c {
                Expr::Sym(_) | Expr::Epsilon | Expr::PrefClose(_) => write!(f, "{c}*"),
                _ => write!(f, "({c})*"),
            },
            Expr::PrefClose(c) => write!(f, "pc({c})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Pc,
    LParen,
    RParen,
    Plus,
    Star,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier {s:?}"),
            Tok::Pc => f.write_str("'pc'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError { line, column, message: message.into() }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while let Some(&c) = self.chars.peek() {
                if c == '#' {
                    while let Some(&c) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                } else if c.is_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let (line, column) = (self.line, self.column);
            let Some(c) = self.bump() else {
                out.push((Tok::Eof, line, column));
                return Ok(out);
            };
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '+' => Tok::Plus,
                '*' => Tok::Star,
                c if c.is_ascii_alphabetic() => {
                    let mut id = String::from(c);
                    while let Some(&c) = self.chars.peek() {
                        if c.is_ascii_alphanumeric() || c == '.' || c == '_' {
                            id.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if id == "pc" {
                        Tok::Pc
                    } else {
                        Tok::Ident(id)
                    }
                }
                other => return Err(Self::err(line, column, format!("unexpected character {other:?}"))),
            };
            out.push((tok, line, column));
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (_, line, column) = self.toks[self.pos];
        ParseError { line, column, message: message.into() }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.advance();
            Ok(())
        } else {
            Err(self.error(format!("expected {t}, found {}", self.peek())))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        while *self.peek() == Tok::Plus {
            self.advance();
            terms.push(self.term()?);
        }
        Ok(Expr::union(terms))
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen | Tok::Pc)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        if !self.starts_factor() {
            return Err(self.error(format!("expected an expression, found {}", self.peek())));
        }
        let mut factors = Vec::new();
        while self.starts_factor() {
            factors.push(self.factor()?);
        }
        Ok(Expr::concat(factors))
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let atom = self.atom()?;
        if *self.peek() == Tok::Star {
            self.advance();
            return Ok(Expr::star(atom));
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.advance() {
            Tok::Ident(id) => Ok(Expr::Sym(id)),
            Tok::LParen => {
                if *self.peek() == Tok::RParen {
                    self.advance();
                    return Ok(Expr::Epsilon);
                }
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Pc => {
                if *self.peek() != Tok::LParen {
                    return Err(self.error("'pc' is reserved and cannot be used as an event id"));
                }
                self.advance();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::pc(e))
            }
            _ => unreachable!("checked by starts_factor"),
        }
    }
}

/// Parse a specification expression.
///
/// Juxtaposition is concatenation, `+` is union, postfix `*` is Kleene star
/// and `pc(...)` is prefix closure; `()` denotes the empty string. Star binds
/// tighter than concatenation, which binds tighter than union. `#` starts a
/// comment running to the end of the line.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = Lexer { chars: text.chars().peekable(), line: 1, column: 1 }.tokens()?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(format!("unexpected {}", p.peek())));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_of_pair() {
        assert_eq!(parse("(a b)*").unwrap(), Expr::star(Expr::Concat(vec![Expr::sym("a"), Expr::sym("b")])));
    }

    #[test]
    fn precedence() {
        let e = parse("a b* + c").unwrap();
        assert_eq!(
            e,
            Expr::Union(vec![Expr::Concat(vec![Expr::sym("a"), Expr::star(Expr::sym("b"))]), Expr::sym("c")])
        );
    }

    #[test]
    fn union_order_independent() {
        assert_eq!(parse("b + a + (c + a)").unwrap(), parse("a + b + c").unwrap());
        assert_eq!(parse("a + b").unwrap().to_string(), "a + b");
    }

    #[test]
    fn trailing_plus_is_error_at_end() {
        let err = parse("a + ").unwrap_err();
        assert_eq!((err.line, err.column), (1, 5));
        assert!(err.message.contains("end of input"), "{err}");
    }

    #[test]
    fn comments_and_lines() {
        let e = parse("# header\n  pc( C1.load # load\n C1.move )\n").unwrap();
        assert_eq!(e, Expr::pc(Expr::Concat(vec![Expr::sym("C1.load"), Expr::sym("C1.move")])));
        let err = parse("a\n  ) b").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
    }

    #[test]
    fn pc_is_reserved() {
        let err = parse("a pc b").unwrap_err();
        assert!(err.message.contains("reserved"), "{err}");
        assert!(parse("pcx").is_ok());
    }

    #[test]
    fn stray_characters() {
        assert!(parse("a - b").is_err());
        assert!(parse("").is_err());
        assert!(parse("(a").is_err());
        assert!(parse("a**").is_err());
    }

    #[test]
    fn epsilon_and_display_round_trip() {
        for text in ["()", "pc((a b)*)", "a (b + c)* d", "pc(a)*", "(a + b c)*"] {
            let e = parse(text).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{text}");
        }
    }
}
