use pcsp_core::io::{parse_instance, serialize_instance};
use pcsp_core::*;

fn two_sat_folded() -> Template {
    expand_folded_idempotent(&zoo::two_sat()).unwrap()
}

#[test]
fn eval_examples() {
    let t = two_sat_folded();
    let inst = Instance::new(&t, 2, vec![Clause::new(0, vec![Literal::pos(0), Literal::pos(1)], 1.0)]).unwrap();
    let a = Assignment::new(Side::Weak, vec![1, 1]);
    assert_eq!(eval_value(&t, &inst, &a, Side::Weak).unwrap(), 1.0);

    let t = zoo::one_in_three_vs_nae();
    let inst = Instance::new(&t, 3, vec![Clause::new(0, (0..3).map(Literal::pos).collect(), 1.0)]).unwrap();
    let a = Assignment::new(Side::Strong, vec![1, 1, 1]);
    assert_eq!(eval_value(&t, &inst, &a, Side::Strong).unwrap(), 0.0);

    let t = two_sat_folded();
    let inst = Instance::new(
        &t,
        2,
        vec![
            Clause::new(0, vec![Literal::pos(0), Literal::pos(0)], 0.5),
            Clause::new(0, vec![Literal::pos(1), Literal::pos(1)], 0.5),
        ],
    )
    .unwrap();
    let a = Assignment::new(Side::Strong, vec![1, 0]);
    assert!((eval_value(&t, &inst, &a, Side::Strong).unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn eval_errors() {
    let t = two_sat_folded();
    let inst = Instance::new(&t, 2, vec![Clause::new(0, vec![Literal::pos(0), Literal::pos(1)], 1.0)]).unwrap();
    assert!(eval_value(&t, &inst, &Assignment::new(Side::Strong, vec![1, 1]), Side::Weak).is_err());
    assert!(eval_value(&t, &inst, &Assignment::new(Side::Weak, vec![2, 1]), Side::Weak).is_err());
    let plain = zoo::two_sat();
    let err = Instance::new(&plain, 2, vec![Clause::new(0, vec![Literal::neg(0), Literal::pos(1)], 1.0)]);
    assert_eq!(err, Err(PcspError::BadSign(-1)));
}

#[test]
fn expansion() {
    let t = two_sat_folded();
    assert!(t.folded && t.idempotent);
    assert_eq!(t.pairs.len(), 3);
    assert_eq!(t.pairs[0], zoo::two_sat().pairs[0]);
    assert_eq!(expand_folded_idempotent(&t).unwrap(), t);

    // every sign pattern of (x or y) is expressible through literals
    let inst_for = |s0: i8, s1: i8| {
        Instance::new(
            &t,
            2,
            vec![Clause::new(0, vec![Literal { var: 0, sign: s0 }, Literal { var: 1, sign: s1 }], 1.0)],
        )
        .unwrap()
    };
    for (s0, s1, falsifier) in [(1, 1, [0, 0]), (1, -1, [0, 1]), (-1, 1, [1, 0]), (-1, -1, [1, 1])] {
        let inst = inst_for(s0, s1);
        for x in 0..2 {
            for y in 0..2 {
                let v = eval_value(&t, &inst, &Assignment::new(Side::Strong, vec![x, y]), Side::Strong).unwrap();
                assert_eq!(v == 0.0, [x, y] == falsifier);
            }
        }
    }

    let fi = expand_folded_idempotent(&zoo::one_in_three_vs_nae()).unwrap();
    assert_eq!(fi.pairs.len(), 3);
    assert_eq!(fi.pairs[1].strong.tuples(), &[vec![1]]);
    assert_eq!(fi.pairs[2].strong.tuples(), &[vec![0]]);
    assert_eq!(fi.pairs[1].weak.tuples(), &[vec![1]]);
    assert!(expand_folded_idempotent(&zoo::unique_games(3)).is_err());
}

#[test]
fn round_trip_and_validation() {
    let t = two_sat_folded();
    let inst = Instance::new(
        &t,
        3,
        vec![
            Clause::new(0, vec![Literal::pos(0), Literal::neg(1)], 0.2),
            Clause::new(0, vec![Literal::neg(1), Literal::pos(2)], 0.3),
            Clause::new(1, vec![Literal::pos(2)], 0.5),
        ],
    )
    .unwrap();
    let bytes = serialize_instance(&t, &inst);
    let (t2, i2) = parse_instance(&bytes).unwrap();
    assert_eq!(t2, t);
    assert_eq!(i2, inst);
    assert_eq!(serialize_instance(&t2, &i2), bytes);

    let base = r#"{"domain":{"a":2,"b":2,"hom":[0,1]},"pairs":[{"arity":2,"strong":[[0,1],[1,0],[1,1]],"weak":[[0,1],[1,0],[1,1]]}],"folded":true,"idempotent":false,"n_vars":2,"clauses":[CLAUSE]}"#;
    let bad_arity = base.replace("CLAUSE", r#"{"pair":0,"lits":[[0,1]],"w":1.0}"#);
    assert!(matches!(parse_instance(bad_arity.as_bytes()), Err(PcspError::ArityMismatch { .. })));
    let neg = base.replace("CLAUSE", r#"{"pair":0,"lits":[[0,1],[1,1]],"w":-0.5}"#);
    assert!(matches!(parse_instance(neg.as_bytes()), Err(PcspError::NegativeWeight(_))));
    let range = base.replace("[[0,1],[1,0],[1,1]],\"weak\"", "[[0,2]],\"weak\"").replace("CLAUSE", "");
    assert!(matches!(parse_instance(range.as_bytes()), Err(PcspError::OutOfRange { .. })));
    assert!(matches!(parse_instance(b"{not json"), Err(PcspError::Malformed(_))));
    let ok = base.replace("CLAUSE", r#"{"pair":0,"lits":[[0,1],[1,-1]],"w":3.0}"#);
    let (_, i) = parse_instance(ok.as_bytes()).unwrap();
    assert_eq!(i.clauses[0].weight, 1.0);
}

#[test]
fn non_homomorphic_template_rejected() {
    let strong = Relation::new(1, 2, vec![vec![0]]).unwrap();
    let weak = Relation::new(1, 2, vec![vec![1]]).unwrap();
    let pair = PromisePair::new(strong, weak).unwrap();
    assert!(matches!(Template::new(DomainPair::same(2), vec![pair], false, false), Err(PcspError::NotHomomorphic(_))));
}
