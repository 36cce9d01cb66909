use proptest::prelude::*;
use veq::build::{build, spec_of_matrix, spec_of_tabulated, BuildError, Model};
use veq::cli::validate;
use veq::fixtures;
use veq::spec::{parse_spec, Decl, FragmentDecl, InstanceDecl, InstanceKind, MoritaDecl, PathExpr, SpecFile};
use veq_core::instances::{b2, terminal};
use veq_core::Status;

const RESERVED: [&str; 18] = [
    "object",
    "varrow",
    "vcomp",
    "proarrow",
    "cell",
    "paste",
    "whisker",
    "instance",
    "matrix",
    "fragment",
    "declared",
    "bool_matrix",
    "tropical_matrix",
    "objects",
    "arrows",
    "proarrows",
    "morita",
    "id",
];

fn ident() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9_']{0,5}".prop_filter("reserved word", |s| !RESERVED.contains(&s.as_str()))
}

fn idents(max: usize) -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(ident(), 1..=max)
}

fn path_expr() -> impl Strategy<Value = PathExpr> {
    prop_oneof![ident().prop_map(PathExpr::Empty), idents(4).prop_map(PathExpr::Arrows)]
}

fn fragment() -> impl Strategy<Value = FragmentDecl> {
    let morita = prop::collection::vec(
        (ident(), ident(), any::<bool>()).prop_map(|(a, b, equivalent)| MoritaDecl { a, b, equivalent }),
        0..3,
    );
    (
        prop::collection::vec(ident(), 0..3),
        prop::collection::vec(ident(), 0..3),
        prop::collection::vec(ident(), 0..3),
        morita,
    )
        .prop_map(|(objects, arrows, proarrows, morita)| FragmentDecl {
            objects,
            arrows,
            proarrows,
            morita,
        })
}

fn decl() -> impl Strategy<Value = Decl> {
    let kind = prop_oneof![
        Just(InstanceKind::BoolMatrix),
        (1u8..9).prop_map(|cap| InstanceKind::TropicalMatrix { cap })
    ];
    let rows = (1usize..4, 1usize..4).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec("[0-9]|inf|top", c..=c), r..=r)
    });
    prop_oneof![
        ident().prop_map(Decl::Object),
        (ident(), ident(), ident()).prop_map(|(name, dom, cod)| Decl::VArrow { name, dom, cod }),
        (ident(), ident(), ident()).prop_map(|(g, f, h)| Decl::VComp { g, f, h }),
        (ident(), ident(), ident()).prop_map(|(name, src, tgt)| Decl::Proarrow { name, src, tgt }),
        (ident(), path_expr(), ident(), ident(), ident()).prop_map(|(name, domain, left, right, codomain)| {
            Decl::Cell {
                name,
                domain,
                left,
                right,
                codomain,
            }
        }),
        (ident(), idents(4), ident()).prop_map(|(outer, inners, result)| Decl::Paste { outer, inners, result }),
        (ident(), ident(), ident()).prop_map(|(cell, arrow, result)| Decl::Whisker { cell, arrow, result }),
        (kind, any::<bool>(), prop::collection::vec((ident(), 1usize..5), 1..4))
            .prop_map(|(kind, declared, sets)| Decl::Instance(InstanceDecl { kind, declared, sets })),
        (ident(), rows).prop_map(|(name, rows)| Decl::Matrix { name, rows }),
        fragment().prop_map(Decl::Fragment),
    ]
}

proptest! {
    #[test]
    fn printing_then_parsing_is_the_identity(decls in prop::collection::vec(decl(), 0..12)) {
        let spec = SpecFile { decls };
        let text = spec.to_string();
        let parsed = parse_spec(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(parsed, spec);
    }
}

#[test]
fn b2_fixture_round_trips() {
    let spec = parse_spec(fixtures::B2).unwrap();
    assert_eq!(parse_spec(&spec.to_string()).unwrap(), spec);
    let loaded = build(&spec, "B2").unwrap();
    let Model::Matrix(m) = &loaded.model else {
        panic!("B2 is a matrix instance")
    };
    assert_eq!(m.vdc().proarrow_count(), b2().vdc().proarrow_count());
    let again = spec_of_matrix(m, spec.fragment().cloned());
    let rebuilt = build(&parse_spec(&again.to_string()).unwrap(), "B2").unwrap();
    assert_eq!(rebuilt.scope, loaded.scope);
}

#[test]
fn golden_tabulated_file_matches_the_fixture() {
    let text = include_str!("data/terminal3.veq");
    let spec = parse_spec(text).unwrap();
    assert_eq!(spec, spec_of_tabulated(&terminal(3)).unwrap());
    let loaded = build(&spec, "terminal3").unwrap();
    let r = validate(&loaded, 3);
    assert_eq!(r.status, Status::Pass, "{:?}", r.first_failure());
}

#[test]
fn corrupted_golden_file_fails_validation_at_the_entry() {
    let spec = parse_spec(include_str!("data/terminal3_corrupt.veq")).unwrap();
    let loaded = build(&spec, "terminal3_corrupt").unwrap();
    let r = validate(&loaded, 3);
    assert_eq!(r.status, Status::Fail);
    let bad = r.first_failure().unwrap();
    assert!(bad.counterexamples[0].description.contains("m2(eta, m2)"), "{bad:#?}");
}

#[test]
fn missing_vertical_composite_names_the_pair() {
    let text = "object A\nobject B\nobject C\nvarrow f : A -> B\nvarrow g : B -> C\n";
    let err = build(&parse_spec(text).unwrap(), "t").err().expect("composite is missing");
    match &err {
        BuildError::Resolution { kind, name } => {
            assert_eq!(*kind, "vertical composite");
            assert_eq!(name, "g . f");
        }
        other => panic!("unexpected {other:?}"),
    }
    let fixed = format!("{text}varrow h : A -> C\nvcomp g . f = h\n");
    assert!(build(&parse_spec(&fixed).unwrap(), "t").is_ok());
}

#[test]
fn unknown_names_are_resolution_errors() {
    let text = "object A\nproarrow J : A -|> B\n";
    let err = build(&parse_spec(text).unwrap(), "t").err().expect("B is undeclared");
    assert!(matches!(err, BuildError::Resolution { ref name, .. } if name == "B"), "{err:?}");
}

#[test]
fn parse_errors_carry_positions() {
    let err = parse_spec("object A\nproarrow J : A -> A\n").unwrap_err();
    assert_eq!(err.line, 2);
    assert_eq!(err.column, 16);
    assert!(err.expected.iter().any(|e| e.contains("-|>")), "{err}");
}
