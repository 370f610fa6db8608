mod common;

use proptest::prelude::*;

use pathline::scenelang::{compile_str, parse, parse_expr, ParseErrorKind};
use pathline::scenes::{builtin_source, BUILTINS};
use pathline::vector;

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, ..ProptestConfig::default() })]

    #[test]
    fn printing_is_a_fixed_point(src in common::expression(2)) {
        let e = parse_expr(&src).unwrap();
        let printed = e.to_string();
        let again = parse_expr(&printed).unwrap();
        prop_assert_eq!(again.to_string(), printed);
    }

    #[test]
    fn arbitrary_text_never_panics(src in "\\PC{0,40}") {
        let _ = parse_expr(&src);
        let _ = parse(&src);
    }
}

#[test]
fn moving_plane_expression() {
    let e = parse_expr("x2 - 0.2*t").unwrap();
    assert_eq!(e.eval(1.0, &[0.0, 0.2]).unwrap(), 0.0);
}

#[test]
fn precedence_and_associativity() {
    let eval = |s: &str| parse_expr(s).unwrap().eval(0.0, &[]).unwrap();
    assert_eq!(eval("-2^2"), -4.0);
    assert_eq!(eval("2^3^2"), 512.0);
    assert_eq!(eval("8/4/2"), 1.0);
    assert_eq!(eval("1 - 2 - 3"), -4.0);
    assert_eq!(eval("2 * -3"), -6.0);
}

#[test]
fn diagnostics_carry_positions() {
    let err = parse_expr("1 + * 2").unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::Syntax);
    assert_eq!((err.line, err.column), (1, 5));
    assert!(!err.expected.is_empty());

    let err = parse_expr("sin(x1) + foo(2)").unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::Semantic);
    assert_eq!(err.column, 11);
}

#[test]
fn dimension_mismatch_is_semantic() {
    let src = builtin_source("S1").unwrap().replace("v_plus = (0, 0.6)", "v_plus = (0, 0.6, 1)");
    let err = parse(&src).unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::Semantic);
    let src = builtin_source("S1").unwrap().replace("phi = x2 - 0.2*t", "phi = x3 - 0.2*t");
    assert_eq!(parse(&src).unwrap_err().kind, ParseErrorKind::Semantic);
}

#[test]
fn evaluation_errors_cover_the_failing_subexpression() {
    let e = parse_expr("1 / (x1 - 1)").unwrap();
    let err = e.eval(0.0, &[1.0]).unwrap_err();
    assert!(err.message.contains("division"));
    assert_eq!((err.span.start, err.span.end), (0, 12));
}

#[test]
fn builtins_parse_and_compile_with_their_documented_fields() {
    for s in BUILTINS {
        let doc = parse(s.source).unwrap();
        assert_eq!(doc.name, s.name);
        compile_str(s.source).unwrap();
    }
    let s1 = compile_str(builtin_source("S1").unwrap()).unwrap();
    assert_eq!(s1.v_plus.eval(0.0, &vector(&[0.0, 1.0])), vector(&[0.0, 0.6]));
    assert_eq!(s1.rho_plus.eval(0.0, &vector(&[0.0, 1.0])), 2.0);
}
