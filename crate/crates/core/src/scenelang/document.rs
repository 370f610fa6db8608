use std::collections::BTreeMap;

use super::expr::{Expr, MAX_DUAL};
use super::parser::{Parser, Value};
use super::{ParseError, ParseErrorKind, Span};

/// Optional overrides of the validation tolerances.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ToleranceOverrides {
    pub interface: Option<f64>,
    pub grazing: Option<f64>,
    pub noslip: Option<f64>,
    pub transmission: Option<f64>,
}

/// Parsed and checked scene file.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneDocument {
    pub name: String,
    pub description: String,
    pub dim: usize,
    pub time: (f64, f64),
    pub domain: Vec<(f64, f64)>,
    pub chart_width: Option<f64>,
    pub phi: Expr,
    pub v_plus: Vec<Expr>,
    pub v_minus: Vec<Expr>,
    pub rho_plus: Expr,
    pub rho_minus: Expr,
    pub rho_min: Option<f64>,
    pub growth: Option<f64>,
    pub lipschitz: Option<f64>,
    pub tolerances: ToleranceOverrides,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("scene", &["name", "description", "dim", "time", "domain", "chart_width"]),
    ("interface", &["phi"]),
    ("fields", &["v_plus", "v_minus", "growth", "lipschitz"]),
    ("densities", &["rho_plus", "rho_minus", "rho_min"]),
    ("tolerances", &["interface", "grazing", "noslip", "transmission"]),
];

const VALIDATION_SAMPLES: usize = 64;

struct Entry {
    text: String,
    offset: usize,
    key_span: Span,
}

/// Parses a scene file. Errors carry 1-based line and column.
pub fn parse(source: &str) -> Result<SceneDocument, ParseError> {
    parse_inner(source).map_err(|e| e.locate(source))
}

fn parse_inner(source: &str) -> Result<SceneDocument, ParseError> {
    let mut entries: BTreeMap<(String, String), Entry> = BTreeMap::new();
    let mut section: Option<&'static (&'static str, &'static [&'static str])> = None;
    let mut offset = 0;
    for raw in source.split_inclusive('\n') {
        let line_start = offset;
        offset += raw.len();
        let content = raw.split('#').next().unwrap_or("").trim_end_matches(['\n', '\r']);
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let lead = content.len() - content.trim_start().len();
        let start = line_start + lead;
        let span = Span::new(start, start + trimmed.len());
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| {
                ParseError::syntax("unterminated section header", span).expecting(&["`]`"])
            })?;
            let name = name.trim();
            section = Some(SECTIONS.iter().find(|(s, _)| *s == name).ok_or_else(|| {
                ParseError::semantic(format!("unknown section `[{name}]`"), span)
                    .expecting(&SECTIONS.iter().map(|(s, _)| *s).collect::<Vec<_>>())
            })?);
            continue;
        }
        let Some(eq) = trimmed.find('=') else {
            return Err(ParseError::syntax("expected `key = value`", span).expecting(&["`=`"]));
        };
        let key = trimmed[..eq].trim();
        let key_span = Span::new(start, start + eq);
        let Some((sec, keys)) = section else {
            return Err(ParseError::semantic("key outside of any section", key_span)
                .expecting(&["`[scene]`"]));
        };
        if !keys.contains(&key) {
            return Err(ParseError::semantic(format!("unknown key `{key}` in [{sec}]"), key_span)
                .expecting(keys));
        }
        let value = &trimmed[eq + 1..];
        let value_offset = start + eq + 1;
        let slot = (sec.to_string(), key.to_string());
        if entries.contains_key(&slot) {
            return Err(ParseError::semantic(format!("duplicate key `{key}` in [{sec}]"), key_span));
        }
        entries.insert(slot, Entry { text: value.to_string(), offset: value_offset, key_span });
    }
    let end_span = Span::new(source.len(), source.len());
    Document { entries, end_span }.build()
}

struct Document {
    entries: BTreeMap<(String, String), Entry>,
    end_span: Span,
}

impl Document {
    fn get(&self, sec: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(sec.to_string(), key.to_string()))
    }

    fn require(&self, sec: &str, key: &str) -> Result<&Entry, ParseError> {
        self.get(sec, key).ok_or_else(|| {
            ParseError::semantic(format!("missing required key `{key}` in [{sec}]"), self.end_span)
        })
    }

    fn with_parser<T>(
        entry: &Entry,
        f: impl FnOnce(&mut Parser) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        let shift = |mut e: ParseError| {
            e.span = e.span.shifted(entry.offset);
            e
        };
        let mut p = Parser::new(&entry.text).map_err(shift)?;
        let out = f(&mut p).map_err(shift)?;
        p.expect_end().map_err(shift)?;
        Ok(out)
    }

    fn expr(entry: &Entry) -> Result<Expr, ParseError> {
        Self::with_parser(entry, |p| p.expr()).map(|e| shift_expr(e, entry.offset))
    }

    fn value(entry: &Entry) -> Result<Value, ParseError> {
        Self::with_parser(entry, |p| p.value()).map(|v| match v {
            Value::Scalar(e) => Value::Scalar(shift_expr(e, entry.offset)),
            Value::Tuple(items, span) => Value::Tuple(
                items.into_iter().map(|e| shift_expr(e, entry.offset)).collect(),
                span.shifted(entry.offset),
            ),
        })
    }

    fn constant(expr: &Expr) -> Result<f64, ParseError> {
        if expr.uses_time() || expr.coords_used() > 0 || expr.uses_norm() {
            return Err(ParseError::semantic("value must be a constant", expr.span));
        }
        expr.eval(0.0, &[]).map_err(|e| ParseError::new(ParseErrorKind::Eval, e.message, e.span))
    }

    fn number(&self, sec: &str, key: &str) -> Result<Option<f64>, ParseError> {
        match self.get(sec, key) {
            None => Ok(None),
            Some(entry) => Self::constant(&Self::expr(entry)?).map(Some),
        }
    }

    fn positive(&self, sec: &str, key: &str) -> Result<Option<f64>, ParseError> {
        let v = self.number(sec, key)?;
        if let (Some(v), Some(entry)) = (v, self.get(sec, key)) {
            if v <= 0.0 {
                return Err(ParseError::semantic(format!("`{key}` must be positive"), entry.key_span));
            }
        }
        Ok(v)
    }

    fn text(&self, sec: &str, key: &str) -> Option<String> {
        self.get(sec, key).map(|e| e.text.trim().to_string())
    }

    fn vector(&self, key: &str, dim: usize) -> Result<Vec<Expr>, ParseError> {
        let entry = self.require("fields", key)?;
        let items = match Self::value(entry)? {
            Value::Tuple(items, _) => items,
            Value::Scalar(e) => vec![e],
        };
        if items.len() != dim {
            return Err(ParseError::semantic(
                format!("`{key}` has {} components but dim = {dim}", items.len()),
                entry.key_span,
            ));
        }
        Ok(items)
    }

    fn build(self) -> Result<SceneDocument, ParseError> {
        let dim_entry = self.require("scene", "dim")?;
        let dim_value = Self::constant(&Self::expr(dim_entry)?)?;
        if dim_value.fract() != 0.0 || dim_value < 1.0 || dim_value > (MAX_DUAL - 1) as f64 {
            return Err(ParseError::semantic(
                format!("dim must be an integer between 1 and {}", MAX_DUAL - 1),
                dim_entry.key_span,
            ));
        }
        let dim = dim_value as usize;

        let time_entry = self.require("scene", "time")?;
        let time = match Self::value(time_entry)? {
            Value::Tuple(items, span) if items.len() == 2 => {
                let a = Self::constant(&items[0])?;
                let b = Self::constant(&items[1])?;
                if a >= b {
                    return Err(ParseError::semantic("time window must satisfy start < end", span));
                }
                (a, b)
            }
            other => {
                return Err(ParseError::semantic("time must be a pair `(start, end)`", other.span()))
            }
        };

        let domain_entry = self.require("scene", "domain")?;
        let intervals = Self::with_parser(domain_entry, |p| p.interval_product())?;
        if intervals.len() != dim {
            return Err(ParseError::semantic(
                format!("domain has {} intervals but dim = {dim}", intervals.len()),
                domain_entry.key_span,
            ));
        }
        let mut domain = Vec::with_capacity(dim);
        for (lo, hi, span) in &intervals {
            let (lo, hi) = (Self::constant(lo)?, Self::constant(hi)?);
            if lo >= hi {
                return Err(ParseError::semantic(
                    "domain interval must satisfy lo < hi",
                    span.shifted(domain_entry.offset),
                ));
            }
            domain.push((lo, hi));
        }

        let phi = Self::expr(self.require("interface", "phi")?)?;
        let v_plus = self.vector("v_plus", dim)?;
        let v_minus = self.vector("v_minus", dim)?;
        let rho_plus = Self::expr(self.require("densities", "rho_plus")?)?;
        let rho_minus = Self::expr(self.require("densities", "rho_minus")?)?;

        let all: Vec<&Expr> = std::iter::once(&phi)
            .chain(&v_plus)
            .chain(&v_minus)
            .chain([&rho_plus, &rho_minus])
            .collect();
        for e in &all {
            if let Some(bad) = e.find(&|x| matches!(x.kind, super::ExprKind::Coord(i) if i >= dim)) {
                return Err(ParseError::semantic(
                    format!("variable `{bad}` exceeds dim = {dim}"),
                    bad.span,
                ));
            }
        }

        let doc = SceneDocument {
            name: self.text("scene", "name").unwrap_or_else(|| "unnamed".to_string()),
            description: self.text("scene", "description").unwrap_or_default(),
            dim,
            time,
            domain,
            chart_width: self.positive("scene", "chart_width")?,
            phi,
            v_plus,
            v_minus,
            rho_plus,
            rho_minus,
            rho_min: self.positive("densities", "rho_min")?,
            growth: self.positive("fields", "growth")?,
            lipschitz: self.positive("fields", "lipschitz")?,
            tolerances: ToleranceOverrides {
                interface: self.positive("tolerances", "interface")?,
                grazing: self.positive("tolerances", "grazing")?,
                noslip: self.positive("tolerances", "noslip")?,
                transmission: self.positive("tolerances", "transmission")?,
            },
        };
        doc.check_samples()?;
        Ok(doc)
    }
}

fn shift_expr(mut e: Expr, offset: usize) -> Expr {
    fn go(e: &mut Expr, offset: usize) {
        e.span = e.span.shifted(offset);
        match &mut e.kind {
            super::ExprKind::Neg(a) => go(a, offset),
            super::ExprKind::Binary(_, a, b) => {
                go(a, offset);
                go(b, offset);
            }
            super::ExprKind::Call(_, args) => args.iter_mut().for_each(|a| go(a, offset)),
            _ => {}
        }
    }
    go(&mut e, offset);
    e
}

/// Radical inverse in the given base.
fn halton(mut index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

const PRIMES: [usize; 5] = [2, 3, 5, 7, 11];

impl SceneDocument {
    /// Deterministic space-time sample points strictly inside the domain.
    pub fn sample_points(&self, count: usize) -> Vec<(f64, Vec<f64>)> {
        (1..=count)
            .map(|i| {
                let t = self.time.0 + (self.time.1 - self.time.0) * halton(i, PRIMES[0]);
                let x = self
                    .domain
                    .iter()
                    .enumerate()
                    .map(|(k, (lo, hi))| lo + (hi - lo) * halton(i, PRIMES[k + 1]))
                    .collect();
                (t, x)
            })
            .collect()
    }

    fn check_samples(&self) -> Result<(), ParseError> {
        let eval_err = |e: super::EvalError| ParseError::new(ParseErrorKind::Eval, e.message, e.span);
        for (t, x) in self.sample_points(VALIDATION_SAMPLES) {
            self.phi.eval(t, &x).map_err(eval_err)?;
            for e in self.v_plus.iter().chain(&self.v_minus) {
                e.eval(t, &x).map_err(eval_err)?;
            }
            for rho in [&self.rho_plus, &self.rho_minus] {
                let v = rho.eval(t, &x).map_err(eval_err)?;
                if v <= 0.0 || self.rho_min.is_some_and(|a| v < a) {
                    return Err(ParseError::semantic(
                        format!("density {v} at t = {t}, x = {x:?} is not bounded below"),
                        rho.span,
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const S1: &str = "\
[scene]
name = S1     # moving plane
dim = 2
time = (-1, 5)
domain = (-2, 2) x (-2, 3)

[interface]
phi = x2 - 0.2*t

[fields]
v_plus = (0, 0.6)
v_minus = (0, 1.0)

[densities]
rho_plus = 2
rho_minus = 1
";

    #[test]
    fn parses_a_minimal_scene() {
        let doc = parse(S1).unwrap();
        assert_eq!(doc.name, "S1");
        assert_eq!(doc.dim, 2);
        assert_eq!(doc.time, (-1.0, 5.0));
        assert_eq!(doc.domain, vec![(-2.0, 2.0), (-2.0, 3.0)]);
        assert_eq!(doc.phi.eval(1.0, &[0.0, 0.2]).unwrap(), 0.0);
        assert_eq!(doc.v_plus[1].eval(0.0, &[0.0, 0.0]).unwrap(), 0.6);
        assert!(doc.chart_width.is_none());
    }

    fn err(src: String) -> ParseError {
        parse(&src).unwrap_err()
    }

    #[test]
    fn semantic_errors_point_at_the_source() {
        let e = err(S1.replace("rho_plus = 2", "rho_plus = 1 - x1"));
        assert_eq!(e.kind, ParseErrorKind::Semantic);
        assert_eq!(e.line, 15);
        assert_eq!(e.column, 12);

        let e = err(S1.replace("v_minus = (0, 1.0)", "v_minus = (0, 1.0, 2)"));
        assert_eq!(e.kind, ParseErrorKind::Semantic);
        assert_eq!(e.line, 12);

        let e = err(S1.replace("x2 - 0.2*t", "x3 - 0.2*t"));
        assert_eq!((e.kind, e.line, e.column), (ParseErrorKind::Semantic, 8, 7));

        let e = err(S1.replace("[densities]", "[density]"));
        assert_eq!(e.kind, ParseErrorKind::Semantic);
        assert!(!e.expected.is_empty());

        let e = err(S1.replace("rho_minus = 1\n", ""));
        assert!(e.message.contains("rho_minus"));

        let e = err(S1.replace("time = (-1, 5)", "time = (5, -1)"));
        assert_eq!(e.kind, ParseErrorKind::Semantic);

        let e = err(S1.replace("dim = 2", "dim = 2.5"));
        assert_eq!(e.kind, ParseErrorKind::Semantic);

        let e = err(format!("{S1}rho_plus = 3\n"));
        assert!(e.message.contains("duplicate"));
    }

    #[test]
    fn syntax_and_eval_errors() {
        let e = err(S1.replace("x2 - 0.2*t", "x2 - * t"));
        assert_eq!((e.kind, e.line, e.column), (ParseErrorKind::Syntax, 8, 12));

        let e = err(S1.replace("v_plus = (0, 0.6)", "v_plus = (0, log(x1 - 5))"));
        assert_eq!((e.kind, e.line), (ParseErrorKind::Eval, 11));
        assert_eq!(e.column, 14);

        let e = err(S1.replace("dim = 2", "dim 2"));
        assert_eq!((e.kind, e.line), (ParseErrorKind::Syntax, 3));

        let e = err(S1.replace("domain = (-2, 2) x (-2, 3)", "domain = (-2, 2) x (-2 3)"));
        assert_eq!(e.kind, ParseErrorKind::Syntax);
    }

    #[test]
    fn samples_cover_the_domain() {
        let doc = parse(S1).unwrap();
        for (t, x) in doc.sample_points(200) {
            assert!(t > -1.0 && t < 5.0);
            assert!(x[0] > -2.0 && x[0] < 2.0 && x[1] > -2.0 && x[1] < 3.0);
        }
    }
}
