use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use pzl_core::board::{CompletedBoard, Given};
use pzl_core::corpus;
use pzl_core::dsl::ast::*;
use pzl_core::dsl::parser::{parse, parse_expr};
use pzl_core::dsl::serialize_rule;
use pzl_core::grid::{
    build_elements, canonicalize, compare, Element, ElementKind, GridDims, RelSet, RelationKind,
    Structure,
};
use pzl_core::model::Model;
use pzl_core::semantics::{cross, eval_expr, Outcome};
use pzl_core::solver::Solver;
use pzl_core::Value;

const KINDS: [RelationKind; 4] = [
    RelationKind::H,
    RelationKind::V,
    RelationKind::D,
    RelationKind::M,
];

fn dims() -> impl Strategy<Value = GridDims> {
    (1u32..=3, 1u32..=3).prop_map(|(m, n)| GridDims { m, n })
}

fn element(d: GridDims) -> impl Strategy<Value = Element> {
    let all: Vec<Element> = build_elements(d).unwrap().all().collect();
    proptest::sample::select(all)
}

fn leaf() -> impl Strategy<Value = Structure> {
    element(GridDims { m: 3, n: 3 }).prop_map(Structure::Leaf)
}

fn structure() -> impl Strategy<Value = Structure> {
    leaf().prop_recursive(2, 12, 4, |inner| {
        proptest::collection::vec(inner, 1..4).prop_map(Structure::Seq)
    })
}

#[test]
fn relations_are_symmetric_and_irreflexive() {
    for m in 1..=3 {
        for n in 1..=3 {
            let els: Vec<Element> = build_elements(GridDims { m, n }).unwrap().all().collect();
            for &x in &els {
                for k in KINDS {
                    let one = RelSet::of(&[k]);
                    assert_eq!(
                        one.relates_elements(x, x),
                        k == RelationKind::M,
                        "{k:?} on {x}"
                    );
                    for &y in &els {
                        assert_eq!(
                            one.relates_elements(x, y),
                            one.relates_elements(y, x),
                            "{k:?} {x} {y}"
                        );
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lifted_relations_are_symmetric(a in structure(), b in structure()) {
        for k in KINDS {
            let r = RelSet::of(&[k]);
            prop_assert_eq!(r.relates(&a, &b), r.relates(&b, &a));
        }
    }

    #[test]
    fn order_is_total(a in structure(), b in structure(), c in structure()) {
        prop_assert_eq!(compare(&a, &b), compare(&b, &a).reverse());
        prop_assert_eq!(compare(&a, &b) == Ordering::Equal, a == b);
        prop_assert_eq!(compare(&a, &a), Ordering::Equal);
        if compare(&a, &b) != Ordering::Greater && compare(&b, &c) != Ordering::Greater {
            prop_assert_ne!(compare(&a, &c), Ordering::Greater);
        }
    }

    #[test]
    fn canonicalize_is_idempotent(seq in proptest::collection::vec(structure(), 1..6)) {
        let once = canonicalize(seq);
        let twice = canonicalize(once.members().to_vec());
        prop_assert_eq!(&once, &twice);
        let m = once.members();
        prop_assert!(m.windows(2).all(|w| compare(&w[0], &w[1]) == Ordering::Less));
    }

    #[test]
    fn cross_handshake(d in dims(), bits in proptest::collection::vec(any::<bool>(), 24)) {
        let els = build_elements(d).unwrap();
        let mut elements = BTreeMap::new();
        let mut drawn = 0;
        for (k, e) in els.ep().into_iter().enumerate() {
            let on = bits[k % bits.len()];
            drawn += usize::from(on);
            elements.insert(e, Value::Int(i64::from(on)));
        }
        let board = CompletedBoard {
            rule: "t".into(),
            dims: d,
            families: BTreeMap::new(),
            elements,
            instance_values: BTreeMap::new(),
        };
        let mut total = 0;
        for p in els.of_kind(ElementKind::Point) {
            let c = cross(&board, *p).unwrap();
            prop_assert!((0..=4).contains(&c));
            total += c;
        }
        prop_assert_eq!(total, 2 * drawn as i64);
    }

    #[test]
    fn quantifiers_over_nothing(d in dims(), body in proptest::sample::select(vec![
        "1 == 2", "1 == 1", "size(a) > 3", "solution(a) == x", "is_rectangle(a)",
    ])) {
        let rule = pzl_core::dsl::parse_rule(
            "puzzle \"t\"\nstructure A = combine {H, V} on C\nconstraint 1 == 1",
        ).unwrap();
        let model = Model::from_rule(&rule, d).unwrap();
        let els = build_elements(d).unwrap();
        let board = CompletedBoard {
            rule: "t".into(),
            dims: d,
            families: BTreeMap::from([("A".to_string(), vec![])]),
            elements: els.all().map(|e| (e, Value::Null)).collect(),
            instance_values: BTreeMap::from([("A".to_string(), vec![])]),
        };
        let ev = |s: String| eval_expr(&model, &board, &parse_expr(&s).unwrap()).unwrap();
        prop_assert_eq!(ev(format!("forall a in B(A): {body}")), Outcome::Bool(true));
        prop_assert_eq!(ev(format!("exists a in B(A): {body}")), Outcome::Bool(false));
        prop_assert_eq!(ev("count(B(A))".into()), Outcome::Value(Value::Int(0)));
        prop_assert_eq!(ev("sum(a in B(A): size(a))".into()), Outcome::Value(Value::Int(0)));
        prop_assert_eq!(ev("prod(a in B(A): size(a))".into()), Outcome::Value(Value::Int(1)));
    }
}

// Random rules for the round trip. Parsing folds `-<int>` into a literal,
// so negation is only generated over non-literals.

const WORDS: [&str; 8] = ["a", "b", "cell", "e2", "n", "m", "k", "r_1"];
const FAMS: [&str; 6] = ["A", "Ah", "Gp", "C", "Ep", "P"];

fn word() -> impl Strategy<Value = String> {
    proptest::sample::select(WORDS.to_vec()).prop_map(String::from)
}

fn fam() -> impl Strategy<Value = String> {
    proptest::sample::select(FAMS.to_vec()).prop_map(String::from)
}

fn relset() -> impl Strategy<Value = RelSet> {
    proptest::sample::subsequence(KINDS.to_vec(), 1..=4).prop_map(|ks| RelSet::of(&ks))
}

fn literal() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-20i64..100).prop_map(Expr::int),
        Just(Expr::Lit(Value::Null)),
        Just(Expr::Lit(Value::Mark)),
        Just(Expr::Lit(Value::Undecided)),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![literal(), word().prop_map(Expr::Ident)];
    leaf.prop_recursive(4, 48, 4, |inner| {
        let ops = proptest::sample::select(vec![
            BinOp::Iff,
            BinOp::Implies,
            BinOp::Or,
            BinOp::And,
            BinOp::Eq,
            BinOp::Ne,
            BinOp::Lt,
            BinOp::Le,
            BinOp::Gt,
            BinOp::Ge,
            BinOp::In,
            BinOp::Add,
            BinOp::Sub,
            BinOp::Mul,
            BinOp::Pow,
        ]);
        let one_arg = proptest::sample::select(vec![
            Builtin::Solution,
            Builtin::Size,
            Builtin::Count,
            Builtin::Members,
            Builtin::Cross,
            Builtin::Cycle,
            Builtin::AllDifferent,
            Builtin::IsRectangle,
            Builtin::IsSquare,
            Builtin::Factorial,
        ]);
        prop_oneof![
            (ops, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::bin(op, a, b)),
            inner
                .clone()
                .prop_map(|a| Expr::Unary(UnOp::Not, Box::new(a))),
            inner
                .clone()
                .prop_filter("negated literal folds", |a| !matches!(
                    a,
                    Expr::Lit(Value::Int(_))
                ))
                .prop_map(|a| Expr::Unary(UnOp::Neg, Box::new(a))),
            (
                any::<bool>(),
                word(),
                inner.clone(),
                proptest::option::of(inner.clone()),
                inner.clone()
            )
                .prop_map(|(all, var, coll, filter, body)| Expr::Quant {
                    q: if all {
                        Quantifier::Forall
                    } else {
                        Quantifier::Exists
                    },
                    var,
                    coll: Box::new(coll),
                    filter: filter.map(Box::new),
                    body: Box::new(body),
                }),
            (
                any::<bool>(),
                word(),
                inner.clone(),
                proptest::option::of(inner.clone()),
                inner.clone()
            )
                .prop_map(|(sum, var, coll, filter, body)| Expr::Agg {
                    op: if sum { AggOp::Sum } else { AggOp::Prod },
                    var,
                    coll: Box::new(coll),
                    filter: filter.map(Box::new),
                    body: Box::new(body),
                }),
            (word(), inner.clone(), proptest::option::of(inner.clone())).prop_map(
                |(var, coll, pred)| {
                    Expr::SetBuilder {
                        var,
                        coll: Box::new(coll),
                        pred: pred.map(Box::new),
                    }
                }
            ),
            (one_arg, inner.clone()).prop_map(|(b, a)| Expr::Call(b, vec![Arg::Expr(a)])),
            fam().prop_map(|f| Expr::Call(Builtin::Board, vec![Arg::Family(f)])),
            fam().prop_map(|f| Expr::Call(Builtin::NoOverlap, vec![Arg::Family(f)])),
            proptest::collection::vec(fam(), 1..3).prop_map(|fs| Expr::Call(
                Builtin::Fill,
                fs.into_iter().map(Arg::Family).collect()
            )),
            (fam(), inner.clone())
                .prop_map(|(f, e)| Expr::Call(Builtin::Region, vec![Arg::Family(f), Arg::Expr(e)])),
            (inner, relset(), proptest::option::of(fam())).prop_map(|(e, r, f)| {
                let mut args = vec![Arg::Expr(e), Arg::Relations(r)];
                args.extend(f.map(Arg::Family));
                Expr::Call(Builtin::Connect, args)
            }),
        ]
    })
}

fn bound() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0i64..20).prop_map(Expr::int),
        proptest::sample::select(vec!["n", "m", "k"]).prop_map(|s| Expr::Ident(s.into())),
        (proptest::sample::select(vec!["n", "m"]), 1i64..4).prop_map(|(s, v)| Expr::bin(
            BinOp::Mul,
            Expr::Ident(s.into()),
            Expr::int(v)
        )),
    ]
}

fn valueset() -> impl Strategy<Value = ValueSet> {
    let item = prop_oneof![
        literal().prop_map(|e| match e {
            Expr::Lit(v) => ValueItem::Value(v),
            _ => unreachable!(),
        }),
        (bound(), bound()).prop_map(|(a, b)| ValueItem::Range(a, b)),
    ];
    proptest::collection::vec(item, 1..5).prop_map(ValueSet::normalized)
}

fn rule() -> impl Strategy<Value = Rule> {
    let structures = proptest::collection::vec(
        (fam(), relset(), fam()).prop_map(|(name, relations, base)| StructDef {
            name,
            relations,
            base,
        }),
        0..3,
    );
    (
        "[a-z][a-z0-9 _-]{0,10}",
        proptest::collection::vec(expr(), 0..2),
        structures,
        proptest::collection::vec((fam(), valueset()), 0..3),
        proptest::collection::vec((fam(), valueset()), 0..3),
        proptest::collection::vec(expr(), 0..4),
    )
        .prop_map(
            |(name, requires, structures, domains, hidden, constraints)| Rule {
                name,
                requires,
                structures,
                domains,
                hidden,
                constraints,
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn random_rules_round_trip(r in rule()) {
        let text = serialize_rule(&r);
        let (back, _) = parse(&text).map_err(|d| TestCaseError::fail(format!("{d}\n{text}")))?;
        prop_assert_eq!(&back, &r, "{}", text);
        prop_assert_eq!(serialize_rule(&back), text);
    }
}

#[test]
fn corpus_rules_round_trip() {
    for e in corpus::entries() {
        let r = e.rule();
        let text = serialize_rule(&r);
        let back = pzl_core::dsl::parse_rule(&text).unwrap();
        assert_eq!(back, r, "{}", e.name);
    }
}

// Solver behaviour on small grids.

fn small_entries() -> Vec<(&'static corpus::CorpusEntry, GridDims)> {
    [
        "slitherlink",
        "shikaku",
        "fillomino",
        "norinori",
        "sukoro",
        "kurotto",
        "hitori",
    ]
    .iter()
    .map(|n| (corpus::entry(n).unwrap(), GridDims { m: 2, n: 2 }))
    .chain([(corpus::entry("sudoku").unwrap(), GridDims { m: 4, n: 4 })])
    .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generation_is_repeatable(seed in any::<u64>(), pick in 0usize..8) {
        let (e, d) = small_entries()[pick];
        let s = Solver::from_rule(&e.rule(), d).unwrap();
        let a = s.generate(seed, 4, 200_000).unwrap();
        let b = s.generate(seed, 4, 200_000).unwrap();
        prop_assert_eq!(a.boards, b.boards);
        prop_assert_eq!(a.nodes, b.nodes);
    }

    #[test]
    fn constructive_boards_are_enumerated(seed in any::<u64>(), pick in 0usize..7) {
        let (e, d) = small_entries()[pick];
        let s = Solver::from_rule(&e.rule(), d).unwrap();
        let all: BTreeSet<CompletedBoard> =
            s.enumerate(&Given::default(), usize::MAX, 1_000_000).unwrap().boards.into_iter().collect();
        for b in s.generate(seed, 6, 200_000).unwrap().boards {
            prop_assert!(all.contains(&b));
        }
    }

    #[test]
    fn more_givens_never_add_completions(seed in any::<u64>(), mask in proptest::collection::vec(any::<bool>(), 64)) {
        let e = corpus::entry("sudoku").unwrap();
        let s = Solver::from_rule(&e.rule(), GridDims { m: 4, n: 4 }).unwrap();
        let board = s.generate(seed, 1, 200_000).unwrap().boards.remove(0);
        let cells: Vec<Element> = board.elements.keys().copied().filter(|e| e.kind == ElementKind::Cell).collect();
        let mut given = Given::default();
        let mut last = u64::MAX;
        for (k, c) in cells.iter().enumerate() {
            if !mask[k % mask.len()] {
                continue;
            }
            given.elements.insert(*c, board.value(*c));
            let (count, _) = s.count(&given, u64::MAX, 2_000_000).unwrap();
            prop_assert!(count >= 1 && count <= last);
            last = count;
        }
    }
}
