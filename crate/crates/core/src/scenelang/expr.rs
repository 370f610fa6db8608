use std::fmt;

use super::Span;

/// Largest jet length: one time slot plus up to four coordinates.
pub const MAX_DUAL: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Min,
    Max,
    Norm,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            "norm" => Func::Norm,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
            Func::Norm => "norm",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            Func::Norm => 0,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Num(f64),
    Time,
    /// Zero-based coordinate index; `x1` is `Coord(0)`.
    Coord(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// `norm(x)` is stored with no arguments.
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

/// Structural equality; spans are ignored.
impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalError {
    pub message: String,
    pub span: Span,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at byte {}", self.message, self.span.start)
    }
}

impl std::error::Error for EvalError {}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Self { kind, span }
    }

    pub fn num(v: f64) -> Self {
        Self::new(ExprKind::Num(v), Span::default())
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Self {
        let span = a.span.join(b.span);
        Self::new(ExprKind::Binary(op, Box::new(a), Box::new(b)), span)
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(op, ..) => op.precedence(),
            ExprKind::Neg(_) => 3,
            _ => 5,
        }
    }

    /// Largest coordinate index referenced plus one (0 if none).
    pub fn coords_used(&self) -> usize {
        match &self.kind {
            ExprKind::Coord(i) => i + 1,
            ExprKind::Neg(a) => a.coords_used(),
            ExprKind::Binary(_, a, b) => a.coords_used().max(b.coords_used()),
            ExprKind::Call(_, args) => args.iter().map(Expr::coords_used).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// Whether `norm(x)` appears.
    pub fn uses_norm(&self) -> bool {
        match &self.kind {
            ExprKind::Call(Func::Norm, _) => true,
            ExprKind::Neg(a) => a.uses_norm(),
            ExprKind::Binary(_, a, b) => a.uses_norm() || b.uses_norm(),
            ExprKind::Call(_, args) => args.iter().any(Expr::uses_norm),
            _ => false,
        }
    }

    pub fn uses_time(&self) -> bool {
        match &self.kind {
            ExprKind::Time => true,
            ExprKind::Neg(a) => a.uses_time(),
            ExprKind::Binary(_, a, b) => a.uses_time() || b.uses_time(),
            ExprKind::Call(_, args) => args.iter().any(Expr::uses_time),
            _ => false,
        }
    }

    /// Finds the first subexpression for which `pred` holds (pre-order).
    pub fn find(&self, pred: &dyn Fn(&Expr) -> bool) -> Option<&Expr> {
        if pred(self) {
            return Some(self);
        }
        match &self.kind {
            ExprKind::Neg(a) => a.find(pred),
            ExprKind::Binary(_, a, b) => a.find(pred).or_else(|| b.find(pred)),
            ExprKind::Call(_, args) => args.iter().find_map(|a| a.find(pred)),
            _ => None,
        }
    }

    /// Evaluates at `(t, x)`. Division by zero, domain errors and overflow
    /// are reported with the span of the offending node.
    pub fn eval(&self, t: f64, x: &[f64]) -> Result<f64, EvalError> {
        let fail = |msg: &str| EvalError { message: msg.to_string(), span: self.span };
        let value = match &self.kind {
            ExprKind::Num(v) => *v,
            ExprKind::Time => t,
            ExprKind::Coord(i) => *x.get(*i).ok_or_else(|| fail("coordinate out of range"))?,
            ExprKind::Neg(a) => -a.eval(t, x)?,
            ExprKind::Binary(op, a, b) => {
                let a = a.eval(t, x)?;
                let b = b.eval(t, x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(fail("division by zero"));
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        if a < 0.0 && b.fract() != 0.0 {
                            return Err(fail("negative base with non-integer exponent"));
                        }
                        if a == 0.0 && b < 0.0 {
                            return Err(fail("zero raised to a negative power"));
                        }
                        a.powf(b)
                    }
                }
            }
            ExprKind::Call(func, args) => {
                if *func == Func::Norm {
                    x.iter().map(|v| v * v).sum::<f64>().sqrt()
                } else {
                    let a = args[0].eval(t, x)?;
                    match func {
                        Func::Sin => a.sin(),
                        Func::Cos => a.cos(),
                        Func::Exp => a.exp(),
                        Func::Log => {
                            if a <= 0.0 {
                                return Err(fail("log of a non-positive value"));
                            }
                            a.ln()
                        }
                        Func::Sqrt => {
                            if a < 0.0 {
                                return Err(fail("sqrt of a negative value"));
                            }
                            a.sqrt()
                        }
                        Func::Abs => a.abs(),
                        Func::Min => a.min(args[1].eval(t, x)?),
                        Func::Max => a.max(args[1].eval(t, x)?),
                        Func::Norm => unreachable!(),
                    }
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(fail("non-finite result"))
        }
    }

    /// Evaluates value and first derivatives with respect to `(t, x1, …, xn)`.
    pub fn eval_jet(&self, t: f64, x: &[f64]) -> Result<Jet, EvalError> {
        let n = x.len() + 1;
        assert!(n <= MAX_DUAL, "jet evaluation supports at most {} coordinates", MAX_DUAL - 1);
        self.jet(t, x, n)
    }

    fn jet(&self, t: f64, x: &[f64], n: usize) -> Result<Jet, EvalError> {
        let fail = |msg: &str| EvalError { message: msg.to_string(), span: self.span };
        let out = match &self.kind {
            ExprKind::Num(v) => Jet::constant(*v),
            ExprKind::Time => Jet::variable(t, 0),
            ExprKind::Coord(i) => {
                Jet::variable(*x.get(*i).ok_or_else(|| fail("coordinate out of range"))?, i + 1)
            }
            ExprKind::Neg(a) => a.jet(t, x, n)?.scale(-1.0),
            ExprKind::Binary(op, a, b) => {
                let a = a.jet(t, x, n)?;
                let b = b.jet(t, x, n)?;
                match op {
                    BinOp::Add => a.zip(&b, |p, q| p + q, a.v + b.v),
                    BinOp::Sub => a.zip(&b, |p, q| p - q, a.v - b.v),
                    BinOp::Mul => a.zip(&b, |p, q| p * b.v + a.v * q, a.v * b.v),
                    BinOp::Div => {
                        if b.v == 0.0 {
                            return Err(fail("division by zero"));
                        }
                        let v = a.v / b.v;
                        a.zip(&b, |p, q| (p - v * q) / b.v, v)
                    }
                    BinOp::Pow => {
                        if a.v < 0.0 && b.v.fract() != 0.0 {
                            return Err(fail("negative base with non-integer exponent"));
                        }
                        if a.v == 0.0 && b.v < 0.0 {
                            return Err(fail("zero raised to a negative power"));
                        }
                        let v = a.v.powf(b.v);
                        let da = if b.v == 0.0 { 0.0 } else { b.v * a.v.powf(b.v - 1.0) };
                        if b.is_constant() {
                            a.map(|p| da * p, v)
                        } else {
                            if a.v <= 0.0 {
                                return Err(fail("variable exponent requires a positive base"));
                            }
                            let ln = a.v.ln();
                            a.zip(&b, |p, q| da * p + v * ln * q, v)
                        }
                    }
                }
            }
            ExprKind::Call(func, args) => {
                if *func == Func::Norm {
                    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let mut d = [0.0; MAX_DUAL];
                    if r > 0.0 {
                        for (i, xi) in x.iter().enumerate() {
                            d[i + 1] = xi / r;
                        }
                    }
                    Jet { v: r, d }
                } else {
                    let a = args[0].jet(t, x, n)?;
                    match func {
                        Func::Sin => a.map(|p| a.v.cos() * p, a.v.sin()),
                        Func::Cos => a.map(|p| -a.v.sin() * p, a.v.cos()),
                        Func::Exp => {
                            let e = a.v.exp();
                            a.map(|p| e * p, e)
                        }
                        Func::Log => {
                            if a.v <= 0.0 {
                                return Err(fail("log of a non-positive value"));
                            }
                            a.map(|p| p / a.v, a.v.ln())
                        }
                        Func::Sqrt => {
                            if a.v < 0.0 {
                                return Err(fail("sqrt of a negative value"));
                            }
                            let s = a.v.sqrt();
                            a.map(|p| if p == 0.0 { 0.0 } else { p / (2.0 * s) }, s)
                        }
                        Func::Abs => {
                            let sg = if a.v < 0.0 { -1.0 } else { 1.0 };
                            a.scale(sg)
                        }
                        Func::Min | Func::Max => {
                            let b = args[1].jet(t, x, n)?;
                            let take_a = if *func == Func::Min { a.v <= b.v } else { a.v >= b.v };
                            if take_a {
                                a
                            } else {
                                b
                            }
                        }
                        Func::Norm => unreachable!(),
                    }
                }
            }
        };
        if out.v.is_finite() && out.d[..n].iter().all(|d| d.is_finite()) {
            Ok(out)
        } else {
            Err(fail("non-finite result"))
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, child: &Expr, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

/// Prints with the minimum parentheses needed to reparse to the same tree.
/// Numbers use the shortest exact round-trip representation.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Num(v) => {
                if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) {
                    write!(f, "({v:?})")
                } else {
                    write!(f, "{v:?}")
                }
            }
            ExprKind::Time => write!(f, "t"),
            ExprKind::Coord(i) => write!(f, "x{}", i + 1),
            ExprKind::Neg(a) => {
                write!(f, "-")?;
                self.fmt_child(f, a, a.precedence() < 3)
            }
            ExprKind::Binary(op, a, b) => {
                let p = op.precedence();
                let right_assoc = *op == BinOp::Pow;
                let left_parens = if right_assoc { a.precedence() <= p } else { a.precedence() < p };
                let right_parens = if right_assoc { b.precedence() < p } else { b.precedence() <= p };
                self.fmt_child(f, a, left_parens)?;
                write!(f, " {} ", op.symbol())?;
                self.fmt_child(f, b, right_parens)
            }
            ExprKind::Call(Func::Norm, _) => write!(f, "norm(x)"),
            ExprKind::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Value with first derivatives; slot 0 is `t`, slot `k` is `x_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d: [f64; MAX_DUAL],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Self { v, d: [0.0; MAX_DUAL] }
    }

    pub fn variable(v: f64, slot: usize) -> Self {
        let mut d = [0.0; MAX_DUAL];
        d[slot] = 1.0;
        Self { v, d }
    }

    pub fn dt(&self) -> f64 {
        self.d[0]
    }

    pub fn grad(&self, dim: usize) -> Vec<f64> {
        self.d[1..=dim].to_vec()
    }

    fn is_constant(&self) -> bool {
        self.d.iter().all(|d| *d == 0.0)
    }

    fn scale(mut self, s: f64) -> Self {
        self.v *= s;
        for d in &mut self.d {
            *d *= s;
        }
        self
    }

    fn map(&self, f: impl Fn(f64) -> f64, v: f64) -> Self {
        let mut d = [0.0; MAX_DUAL];
        for (o, p) in d.iter_mut().zip(&self.d) {
            *o = f(*p);
        }
        Self { v, d }
    }

    fn zip(&self, other: &Jet, f: impl Fn(f64, f64) -> f64, v: f64) -> Self {
        Self { v, d: std::array::from_fn(|i| f(self.d[i], other.d[i])) }
    }
}
