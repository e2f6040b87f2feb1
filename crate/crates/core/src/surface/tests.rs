use super::*;

fn st() -> Theory {
    Theory::new(vec![
        OpDecl::new("get", Type::Unit, Type::Int),
        OpDecl::new("set", Type::Int, Type::Unit),
    ])
}

fn round_trip(t: Term) {
    let text = t.to_string();
    let back = parse_term_like(&text, &t).unwrap_or_else(|d| panic!("{text}: {d}"));
    assert!(back.alpha_eq(&t), "{text} read back as {back:?}");
}

#[test]
fn box_with_bind_parses_to_kernel_form() {
    let e = parse_expr("box {get:unit=>int, set:int=>unit}. x <- get(); ret x").unwrap();
    let expected = Expr::boxed(st(), Comp::bind(Stmt::Op("get".into(), Expr::Unit), "x", Comp::ret(Expr::var("x"))));
    assert_eq!(e, expected);
}

#[test]
fn abbreviated_statement_parses_identically() {
    let short = parse_expr("box {get:unit=>int, set:int=>unit}. get()").unwrap();
    let long = parse_expr("box {get:unit=>int, set:int=>unit}. y <- get(); ret y").unwrap();
    assert!(short.alpha_eq(&long));
}

#[test]
fn ret_ret_is_a_syntax_error() {
    let errs = parse("ret ret").unwrap_err();
    assert!(errs[0].message.contains("syntax error"), "{}", errs[0]);
}

#[test]
fn unknown_handler_name_is_an_unbound_definition() {
    let errs = parse("handle u with H init 0").unwrap_err();
    assert!(errs[0].message.contains("unbound definition `H`"), "{}", errs[0]);
    assert_eq!(errs[0].span, Span::new(1, 15, 1));
}

#[test]
fn duplicate_handler_clause_is_rejected() {
    let text = "handle u with handler for {op:unit=>int} { op(x; k; z) -> k(1; z), op(x; k; z) -> k(2; z), return(x; z) -> ret x } init 0";
    let errs = parse(text).unwrap_err();
    assert!(errs[0].message.contains("duplicate clause"), "{}", errs[0]);
}

#[test]
fn elided_sequence_is_empty() {
    let s = parse_stmt("handle u with handler for {} { return(x; z) -> ret x } init 0").unwrap();
    match s {
        Stmt::Handle(u, seq, _, init) => {
            assert_eq!(u, "u");
            assert!(seq.is_empty());
            assert_eq!(init, Expr::Int(0));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn ret_bind_is_encoded_through_a_box() {
    let c = parse_comp("x <- ret 5; ret (x + 1)").unwrap();
    match &c {
        Comp::LetBox(u, Expr::Box(theory, body), rest) => {
            assert!(theory.is_empty());
            assert_eq!(**body, Comp::ret(Expr::Int(5)));
            assert!(matches!(rest.as_ref(), Comp::Bind(Stmt::Handle(v, _, _, Expr::Unit), x, _) if v == u && x == "x"));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn canonical_layouts() {
    assert_eq!(Comp::ret(Expr::Int(42)).to_string(), "ret 42");
    assert_eq!(Expr::boxed(Theory::empty(), Comp::ret(Expr::Int(0))).to_string(), "box {}. ret 0");
    let simple = parse_handler("handler for {} { return(x; z) -> ret (x, z) }").unwrap();
    let seq = HandlingSeq {
        clauses: vec![SeqClause {
            handler: simple.clone(),
            init: Expr::Int(12),
            x: "x".into(),
            cont: Comp::ret(Expr::Fst(Box::new(Expr::var("x")))),
        }],
    };
    assert_eq!(seq.to_string(), format!("[{simple} init 12 as x. ret (fst x)]"));
    assert_eq!(
        Type::arrow(Type::Int, Type::modal(st(), Type::Int)).to_string(),
        "int -> [ {get:unit=>int, set:int=>unit} ] int"
    );
}

#[test]
fn type_precedence() {
    let t = parse_type("int * int -> list int * bool -> unit").unwrap();
    assert_eq!(
        t,
        Type::arrow(
            Type::prod(Type::Int, Type::Int),
            Type::arrow(Type::prod(Type::list(Type::Int), Type::Bool), Type::Unit)
        )
    );
    let t = parse_type("[{}] int -> int").unwrap();
    assert_eq!(t, Type::arrow(Type::modal(Theory::empty(), Type::Int), Type::Int));
}

#[test]
fn expression_precedence() {
    let e = parse_expr("f x + 2 * 3 = 7").unwrap();
    let expected = Expr::cmp(
        CmpOp::Eq,
        Expr::arith(
            ArithOp::Add,
            Expr::app(Expr::var("f"), Expr::var("x")),
            Expr::arith(ArithOp::Mul, Expr::Int(2), Expr::Int(3)),
        ),
        Expr::Int(7),
    );
    assert_eq!(e, expected);
    assert_eq!(parse_expr("1 - -2").unwrap(), Expr::arith(ArithOp::Sub, Expr::Int(1), Expr::Int(-2)));
    assert_eq!(parse_expr("1 - (-2)").unwrap(), Expr::arith(ArithOp::Sub, Expr::Int(1), Expr::Int(-2)));
}

#[test]
fn definitions_splice_in() {
    let text = "
        def St = {get:unit=>int, set:int=>unit};;
        def handlerSt = handler for St {
            get(x; k; z) -> k(z; z),
            set(x; k; z) -> k((); x),
            return(x; z) -> ret (x, z)
        };;
        def incr = box St. x <- get(); _ <- set(x + 1); ret x;;
        let box u = incr in handle u with handlerSt init 0
    ";
    let file = parse(text).unwrap();
    assert_eq!(file.definitions.len(), 3);
    match &file.main {
        Term::Comp(Comp::LetBox(_, Expr::Box(theory, _), _)) => assert_eq!(*theory, st()),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn local_binders_shadow_definitions() {
    let file = parse("def n = 5;; fn n:int. n").unwrap();
    assert_eq!(file.main, Term::Expr(Expr::lam("n", Type::Int, Expr::var("n"))));
}

#[test]
fn main_term_prefers_computation() {
    assert!(matches!(parse("let box u = box {}. ret 1 in eval u").unwrap().main, Term::Expr(_)));
    assert!(matches!(parse("let box u = box {}. ret 1 in ret 2").unwrap().main, Term::Comp(_)));
}

#[test]
fn ambiguous_expressions_print_parenthesized() {
    let e = Term::Expr(Expr::app(Expr::var("f"), Expr::app(Expr::var("g"), Expr::Int(2))));
    let text = pretty(&e);
    assert_eq!(text, "(f (g 2))");
    assert_eq!(parse(&text).unwrap().main, e);
}

#[test]
fn empty_input_is_a_parse_error() {
    assert!(parse("  -- nothing\n").is_err());
}

#[test]
fn locate_finds_identifiers() {
    let file = parse("fn x:int.\n  y").unwrap();
    assert_eq!(file.locate("y"), Span::new(2, 3, 1));
    assert_eq!(file.locate("zzz"), file.main_span);
}

#[test]
fn round_trips() {
    round_trip(Term::Expr(parse_expr("fn x:int. let box u = box {}. ret (x, [1, 2] ++ nil int) in eval u").unwrap()));
    round_trip(Term::Expr(
        parse_expr("let fix f(n:int):[{}] int = if n < 1 then ret 0 else ret (n + fst (1, 2)) in f 3").unwrap(),
    ));
    round_trip(Term::Comp(
        parse_comp("x <- handle u [handler for {} { return(x; z) -> ret (x, z) } init 1 as y. ret (snd y)] with id[{op:int=>int}] init (); ret x")
            .unwrap(),
    ));
    round_trip(Term::Expr(Expr::Int(-4)));
    round_trip(Term::Expr(Expr::arith(ArithOp::Sub, Expr::Int(1), Expr::arith(ArithOp::Sub, Expr::Int(2), Expr::Int(3)))));
    round_trip(Term::Expr(Expr::app(Expr::lam("x", Type::Int, Expr::var("x")), Expr::Int(5))));
}
