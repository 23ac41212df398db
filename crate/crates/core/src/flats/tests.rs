use proptest::prelude::*;

use super::*;
use crate::cover::{expand_cover, CoreReport};
use crate::tower::{AttachOptions, Block, Summand};

const BUDGET: usize = 16;

fn names(s: &[&str]) -> Vec<String> {
    s.iter().map(|x| x.to_string()).collect()
}

fn free_ab() -> Tower {
    Tower::new_height0(vec![Summand::Free { names: names(&["a", "b"]) }], BUDGET).unwrap()
}

fn a_block(t: &Tower, w: &str, rank: usize, letters: &[&str]) -> Tower {
    let attach = t.parse(w).unwrap();
    t.attach_block(Block::A { attach, rank, letters: names(letters) }, &AttachOptions::default()).unwrap()
}

fn genus2_host() -> Tower {
    a_block(&free_ab(), "[a,b]", 2, &["t"])
}

fn core(t: &Tower, gens: &[&str]) -> CoreReport {
    let ws: Vec<Word> = gens.iter().map(|g| t.parse(g).unwrap()).collect();
    expand_cover(t.top().graph(), &ws, 0, BUDGET).unwrap().extract_core(&[]).unwrap()
}

fn top(t: &Tower) -> Option<BlockKind> {
    t.blocks().last().map(Block::kind)
}

#[test]
fn inventory_counts() {
    assert!(flat_inventory(&free_ab(), BUDGET).is_empty());
    let t = genus2_host();
    let inv = flat_inventory(&t, BUDGET);
    assert_eq!(inv.len(), 1);
    assert_eq!(inv[0].lattice, vec!["a b a^-1 b^-1", "t"]);
    assert_eq!(inv[0].rank, 2);
    assert!(inv[0].commuting.is_verified());

    let two = a_block(&a_block(&free_ab(), "a", 2, &["s"]), "b", 2, &["u"]);
    let inv = flat_inventory(&two, BUDGET);
    assert_eq!(inv.len(), 2);
    assert_eq!(inv[0].origin, FlatOrigin::Block(0));
    assert_eq!(inv[1].origin, FlatOrigin::Block(1));

    // a torus block on an existing flat replaces it
    let attach = vec![t.parse("[a,b]").unwrap(), t.parse("t").unwrap()];
    let tt = t
        .attach_block(Block::T { attach, rank: 3, letters: names(&["s"]) }, &AttachOptions::default())
        .unwrap();
    let inv = flat_inventory(&tt, BUDGET);
    assert_eq!(inv.len(), 1);
    assert_eq!(inv[0].rank, 3);

    let ab = Tower::new_height0(
        vec![Summand::Free { names: names(&["a"]) }, Summand::Abelian { names: names(&["x", "y"]) }],
        BUDGET,
    )
    .unwrap();
    let inv = flat_inventory(&ab, BUDGET);
    assert_eq!(inv.len(), 1);
    assert_eq!(inv[0].origin, FlatOrigin::Summand(1));
}

#[test]
fn coloring_rules() {
    let t = genus2_host();
    let r = core(&t, &["a", "b", "t a t^-1", "t b t^-1"]);
    let c = color_vertices(&r, top(&t)).unwrap();
    let kinds: Vec<(VertexType, Color)> = c.vertices.iter().map(|v| (v.kind, v.color)).collect();
    assert_eq!(kinds, vec![(VertexType::M, Color::G), (VertexType::N, Color::B), (VertexType::M, Color::G)]);

    let c = color_vertices(&r, Some(BlockKind::Q)).unwrap();
    assert_eq!(c.vertices[1].color, Color::G);
    assert_eq!(c.vertices[0].color, Color::B);

    let single = core(&t, &["a"]);
    let c = color_vertices(&single, top(&t)).unwrap();
    assert_eq!(c.vertices.len(), 1);
    assert_eq!(c.vertices[0].color, Color::G);

    let f = free_ab();
    assert_eq!(color_vertices(&core(&f, &["a"]), top(&f)).unwrap_err(), FlatsError::HeightZero);
}

#[test]
fn genus_two_double_hypotheses() {
    let t = genus2_host();
    let r = core(&t, &["a", "b", "t a t^-1", "t b t^-1"]);
    let c = color_vertices(&r, top(&t)).unwrap();
    let rep = check_isolation_hypotheses(&c, &t, 6, BUDGET);
    for i in 0..3 {
        assert!(rep.hypothesis(i).is_verified(), "{i}: {:?}", rep.hypothesis(i));
    }
    let pair = rep
        .pairs
        .iter()
        .find(|p| p.vertex == 0 && p.u == "a b a^-1 b^-1" && p.conjugator.as_deref() == Some("a"))
        .unwrap();
    assert_eq!(pair.v, "a a b a^-1 b^-1 a^-1");
    assert!(pair.check.is_verified());
}

#[test]
fn duplicated_edge_is_parallel() {
    let t = genus2_host();
    let mut r = core(&t, &["a", "b", "t a t^-1", "t b t^-1"]);
    let dup = r.edges[0].clone();
    r.edges.push(dup);
    let c = color_vertices(&r, top(&t)).unwrap();
    let rep = check_isolation_hypotheses(&c, &t, 2, BUDGET);
    match rep.hypothesis(1) {
        Check::Refuted(d) => assert!(d.contains("^1 = "), "{d}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn proper_power_attachment_bounds_a_half_flat() {
    let f = free_ab();
    let attach = f.parse("a^2").unwrap();
    let opts = AttachOptions { budget: BUDGET, assume: true };
    let t = f.attach_block(Block::A { attach, rank: 2, letters: names(&["t"]) }, &opts).unwrap();
    let r = core(&t, &["a", "t"]);
    let c = color_vertices(&r, top(&t)).unwrap();
    let rep = check_isolation_hypotheses(&c, &t, 4, BUDGET);
    match rep.hypothesis(2) {
        Check::Refuted(d) => assert!(d.contains("(a)^2"), "{d}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn quadratic_top_block() {
    let t = free_ab();
    let block = Block::Q {
        genus: 1,
        punctures: 1,
        gens: names(&["x", "y"]),
        boundary: vec![t.parse("[a,b]").unwrap()],
        retract: vec![t.parse("a").unwrap(), t.parse("b").unwrap()],
        letters: vec![],
    };
    let q = t.attach_block(block, &AttachOptions::default()).unwrap();
    let r = core(&q, &["x", "y", "a"]);
    let c = color_vertices(&r, top(&q)).unwrap();
    let rep = check_isolation_hypotheses(&c, &q, 4, BUDGET);
    assert!(rep.hypothesis(0).is_verified());
    assert!(matches!(rep.hypothesis(2), Check::NotApplicable(_)));
}

#[test]
fn verdicts_monotone_in_power_budget() {
    let t = genus2_host();
    let mut r = core(&t, &["a", "b", "t a t^-1", "t b t^-1"]);
    let dup = r.edges[1].clone();
    r.edges.push(dup);
    let c = color_vertices(&r, top(&t)).unwrap();
    let mut prev: Option<IsolationReport> = None;
    for pb in 1..=5 {
        let rep = check_isolation_hypotheses(&c, &t, pb, BUDGET);
        if let Some(p) = &prev {
            for (a, b) in p.pairs.iter().zip(&rep.pairs) {
                if a.check.is_refuted() {
                    assert!(b.check.is_refuted());
                }
                if matches!(a.check, Check::VerifiedToBudget(_)) {
                    assert!(!matches!(b.check, Check::Unchecked(_)));
                }
            }
        }
        prev = Some(rep);
    }
}

#[test]
fn bound_spot_values() {
    let b = compose_isolation_bound(&[SymbolicBound::atom("phi_v")], &[], None, &["diam_e".into()]).unwrap();
    let env = BoundEnv::default().atom("phi_v", &[]).constant("diam_e", 5);
    assert_eq!(b.eval(3, &env).unwrap(), 11);
    assert_eq!(b.to_string(), "max{phi_v(2k) + 2k, diam_e + 2k}");

    let sq = compose_isolation_bound(&[SymbolicBound::atom("phi_v")], &[], None, &[]).unwrap();
    let env = BoundEnv::default().atom("phi_v", &[0, 0, 1]);
    assert_eq!(sq.eval(3, &env).unwrap(), 42);

    assert_eq!(compose_isolation_bound(&[], &[], None, &[]).unwrap_err(), FlatsError::EmptyBound);
    assert!(matches!(b.eval(1, &BoundEnv::default()), Err(FlatsError::Unassigned(_))));
}

#[test]
fn nested_bound_matches_hand_expansion() {
    let inner = compose_isolation_bound(
        &[SymbolicBound::atom("phi_v")],
        &[SymbolicBound::atom("psi_e")],
        Some(&SymbolicBound::atom("psi1")),
        &["d1".into()],
    )
    .unwrap();
    let outer = compose_isolation_bound(&[inner], &[SymbolicBound::atom("psi_f")], None, &["d2".into()]).unwrap();
    assert!(outer.to_string().starts_with("max{max{phi_v(4k) + 4k, psi_e(4k) + 4k, psi1(4k) + 4k, d1 + 4k} + 2k, "), "{outer}");
    let env = BoundEnv::default()
        .atom("phi_v", &[1, 0, 1])
        .atom("psi_e", &[3, 2])
        .atom("psi1", &[0, 5])
        .atom("psi_f", &[7])
        .constant("d1", 4)
        .constant("d2", 9);
    for k in [1u64, 2, 4] {
        let phi = |x: u64| 1 + x * x;
        let psi = |x: u64| 3 + 2 * x;
        let psi1 = |x: u64| 5 * x;
        let inner = |x: u64| {
            [phi(2 * x) + 2 * x, psi(2 * x) + 2 * x, psi1(2 * x) + 2 * x, 4 + 2 * x].into_iter().max().unwrap()
        };
        let hand = [inner(2 * k) + 2 * k, 7 + 2 * k, 9 + 2 * k].into_iter().max().unwrap();
        assert_eq!(outer.eval(k, &env).unwrap(), hand, "k = {k}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bound_is_monotone_and_dominates(
        phi in proptest::collection::vec(0u64..6, 0..3),
        psi in proptest::collection::vec(0u64..6, 0..3),
        diam in 0u64..20,
    ) {
        let b = compose_isolation_bound(
            &[SymbolicBound::atom("phi")],
            &[SymbolicBound::atom("psi")],
            None,
            &["diam".into()],
        ).unwrap();
        let env = BoundEnv::default().atom("phi", &phi).atom("psi", &psi).constant("diam", diam);
        let mut last = 0;
        for k in 0..=16u64 {
            let v = b.eval(k, &env).unwrap();
            prop_assert!(v >= last);
            last = v;
            for t in [SymbolicBound::atom("phi"), SymbolicBound::atom("psi"), SymbolicBound::constant("diam")] {
                prop_assert!(v >= t.eval(k, &env).unwrap());
            }
        }
    }
}
