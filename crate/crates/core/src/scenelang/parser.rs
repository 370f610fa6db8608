use super::expr::{BinOp, Expr, ExprKind, Func};
use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, Span};

const ADD_BP: (u8, u8) = (10, 11);
const MUL_BP: (u8, u8) = (20, 21);
const UNARY_BP: u8 = 30;
const POW_BP: (u8, u8) = (40, 39);

/// A right-hand side: a single expression or a parenthesized tuple.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(Expr),
    Tuple(Vec<Expr>, Span),
}

impl Value {
    pub fn span(&self) -> Span {
        match self {
            Value::Scalar(e) => e.span,
            Value::Tuple(_, s) => *s,
        }
    }
}

pub(crate) struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Self { tokens: tokenize(src)?, pos: 0 })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError::syntax(format!("unexpected {}", t.tok.describe()), t.span).expecting(expected)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, ParseError> {
        if self.peek().tok == tok {
            Ok(self.next())
        } else {
            Err(self.unexpected(&[what]))
        }
    }

    pub(crate) fn expect_end(&self) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected(&["operator", "end of input"]))
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, ParseError> {
        self.expr_bp(0)
    }

    fn expr_bp(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.prefix()?;
        loop {
            let (op, (lbp, rbp)) = match self.peek().tok {
                Tok::Plus => (BinOp::Add, ADD_BP),
                Tok::Minus => (BinOp::Sub, ADD_BP),
                Tok::Star => (BinOp::Mul, MUL_BP),
                Tok::Slash => (BinOp::Div, MUL_BP),
                Tok::Caret => (BinOp::Pow, POW_BP),
                _ => break,
            };
            if lbp <= min_bp {
                break;
            }
            self.next();
            let rhs = self.expr_bp(rbp)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        let tok = self.next();
        match tok.tok {
            Tok::Num(v) => Ok(Expr::new(ExprKind::Num(v), tok.span)),
            Tok::Minus => {
                let operand = self.expr_bp(UNARY_BP)?;
                let span = tok.span.join(operand.span);
                Ok(Expr::new(ExprKind::Neg(Box::new(operand)), span))
            }
            Tok::LParen => {
                let mut inner = self.expr()?;
                let close = self.expect(Tok::RParen, "`)`")?;
                inner.span = tok.span.join(close.span);
                Ok(inner)
            }
            Tok::Ident(name) => self.identifier(name, tok.span),
            _ => {
                Err(ParseError::syntax(format!("unexpected {}", tok.tok.describe()), tok.span)
                    .expecting(&["number", "variable", "function", "`(`", "`-`"]))
            }
        }
    }

    fn identifier(&mut self, name: String, span: Span) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::LParen {
            let func = Func::from_name(&name)
                .ok_or_else(|| ParseError::semantic(format!("unknown function `{name}`"), span))?;
            self.next();
            if func == Func::Norm {
                let arg = self.next();
                if arg.tok != Tok::Ident("x".into()) {
                    return Err(ParseError::semantic("norm takes the position vector `x`", arg.span)
                        .expecting(&["`x`"]));
                }
                let close = self.expect(Tok::RParen, "`)`")?;
                return Ok(Expr::new(ExprKind::Call(func, Vec::new()), span.join(close.span)));
            }
            let mut args = vec![self.expr()?];
            while self.peek().tok == Tok::Comma {
                self.next();
                args.push(self.expr()?);
            }
            let close = self.expect(Tok::RParen, "`)`")?;
            let full = span.join(close.span);
            if args.len() != func.arity() {
                return Err(ParseError::semantic(
                    format!("`{}` takes {} argument(s), got {}", func.name(), func.arity(), args.len()),
                    full,
                ));
            }
            return Ok(Expr::new(ExprKind::Call(func, args), full));
        }
        if name == "t" {
            return Ok(Expr::new(ExprKind::Time, span));
        }
        if let Some(digits) = name.strip_prefix('x') {
            if let Ok(k) = digits.parse::<usize>() {
                if k >= 1 && !digits.starts_with('0') {
                    return Ok(Expr::new(ExprKind::Coord(k - 1), span));
                }
            }
        }
        if Func::from_name(&name).is_some() {
            return Err(ParseError::syntax(format!("function `{name}` needs arguments"), span)
                .expecting(&["`(`"]));
        }
        Err(ParseError::semantic(format!("unknown variable `{name}`"), span))
    }

    pub(crate) fn value(&mut self) -> Result<Value, ParseError> {
        if self.peek().tok == Tok::LParen {
            let start = self.pos;
            let open = self.next();
            let first = self.expr()?;
            if self.peek().tok == Tok::Comma {
                let mut items = vec![first];
                while self.peek().tok == Tok::Comma {
                    self.next();
                    items.push(self.expr()?);
                }
                let close = self.expect(Tok::RParen, "`)` or `,`")?;
                return Ok(Value::Tuple(items, open.span.join(close.span)));
            }
            self.pos = start;
        }
        Ok(Value::Scalar(self.expr()?))
    }

    /// Parses `(a, b) x (c, d) x …`.
    pub(crate) fn interval_product(&mut self) -> Result<Vec<(Expr, Expr, Span)>, ParseError> {
        let mut out = Vec::new();
        loop {
            let open = self.expect(Tok::LParen, "`(`")?;
            let lo = self.expr()?;
            self.expect(Tok::Comma, "`,`")?;
            let hi = self.expr()?;
            let close = self.expect(Tok::RParen, "`)`")?;
            out.push((lo, hi, open.span.join(close.span)));
            match &self.peek().tok {
                Tok::Ident(s) if s == "x" => {
                    self.next();
                }
                Tok::Star => {
                    self.next();
                }
                _ => break,
            }
        }
        Ok(out)
    }
}

/// Parses a single expression; variables are not checked against a dimension.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let run = || {
        let mut p = Parser::new(src)?;
        let e = p.expr()?;
        p.expect_end()?;
        Ok(e)
    };
    run().map_err(|e: ParseError| e.locate(src))
}

/// Parses an expression or a tuple `(e1, …, ek)`.
pub fn parse_value(src: &str) -> Result<Value, ParseError> {
    let run = || {
        let mut p = Parser::new(src)?;
        let v = p.value()?;
        p.expect_end()?;
        Ok(v)
    };
    run().map_err(|e: ParseError| e.locate(src))
}

#[cfg(test)]
mod tests {
    use super::super::ParseErrorKind;
    use super::*;

    fn tree(src: &str) -> String {
        fn go(e: &Expr) -> String {
            match &e.kind {
                ExprKind::Num(v) => format!("{v}"),
                ExprKind::Time => "t".into(),
                ExprKind::Coord(i) => format!("x{}", i + 1),
                ExprKind::Neg(a) => format!("(neg {})", go(a)),
                ExprKind::Binary(op, a, b) => format!("({} {} {})", op.symbol(), go(a), go(b)),
                ExprKind::Call(f, args) => {
                    let a: Vec<String> = args.iter().map(go).collect();
                    format!("({} {})", f.name(), a.join(" "))
                }
            }
        }
        go(&parse_expr(src).unwrap())
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(tree("1 + 2 * 3"), "(+ 1 (* 2 3))");
        assert_eq!(tree("1 - 2 - 3"), "(- (- 1 2) 3)");
        assert_eq!(tree("8 / 4 / 2"), "(/ (/ 8 4) 2)");
        assert_eq!(tree("2 ^ 3 ^ 2"), "(^ 2 (^ 3 2))");
        assert_eq!(tree("-x1 ^ 2"), "(neg (^ x1 2))");
        assert_eq!(tree("-x1 * x2"), "(* (neg x1) x2)");
        assert_eq!(tree("2 ^ -x1"), "(^ 2 (neg x1))");
        assert_eq!(tree("sin(1)"), "(sin 1)");
        assert_eq!(tree("max(x1, t) - norm(x)"), "(- (max x1 t) (norm ))");
        assert_eq!(tree("--x1"), "(neg (neg x1))");
    }

    #[test]
    fn tuples_and_parenthesized_scalars() {
        assert!(matches!(parse_value("(0, 1.0)").unwrap(), Value::Tuple(ref v, _) if v.len() == 2));
        assert!(matches!(parse_value("(x1 + 1) * 2").unwrap(), Value::Scalar(_)));
        assert!(matches!(parse_value("(x1)").unwrap(), Value::Scalar(_)));
        assert!(parse_value("(1, 2) + 3").is_err());
    }

    #[test]
    fn diagnostics() {
        let e = parse_expr("x1 +").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!((e.line, e.column), (1, 5));
        assert!(!e.expected.is_empty());
        let e = parse_expr("foo(1)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Semantic);
        let e = parse_expr("y + 1").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Semantic);
        let e = parse_expr("min(1)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Semantic);
        let e = parse_expr("(1 + 2").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!(e.expected, vec!["`)`".to_string()]);
        assert!(parse_expr("x0").is_err());
        assert!(parse_expr("x01").is_err());
        assert!(parse_expr("norm(x1)").is_err());
        assert!(parse_expr("1 2").is_err());
        assert!(parse_expr("").is_err());
    }
}
