use proptest::prelude::*;

use super::*;
use crate::graphgroups::{GraphBuilder, VertexGroup};
use crate::tower::Summand;

const BUDGET: usize = 16;

fn names(s: &[&str]) -> Vec<String> {
    s.iter().map(|x| x.to_string()).collect()
}

fn free_ab() -> Tower {
    Tower::new_height0(vec![Summand::Free { names: names(&["a", "b"]) }], BUDGET).unwrap()
}

fn hom(target: &Tower, imgs: &[&str]) -> GroupHom {
    GroupHom::new(imgs.iter().map(|s| target.parse(s).unwrap()).collect())
}

/// `<a,b> *_{[a,b]=[c,d]} <c,d>`.
fn genus2_double() -> SplittingData {
    let al = Alphabet::new(&["a", "b", "c", "d"]).unwrap();
    let mut b = GraphBuilder::new(al.clone());
    b.add_vertex(VertexGroup::new("A", VertexKind::Free { gens: vec![0, 1] }));
    b.add_vertex(VertexGroup::new("B", VertexKind::Free { gens: vec![2, 3] }));
    b.add_edge(0, 1, vec![al.parse("[a,b]").unwrap()], vec![al.parse("[c,d]").unwrap()], None);
    SplittingData::new(SplittingKind::AmalgamRigidRigid, b.build(0, BUDGET).unwrap()).unwrap()
}

fn double_quotient(imgs: &[&str]) -> StrictQuotientData {
    let t = free_ab();
    StrictQuotientData::direct(hom(&t, imgs), t)
}

fn double_embedding() -> EmbeddingResult {
    embed_step(&genus2_double(), &double_quotient(&["a", "b", "a", "b"]), &AttachOptions::default()).unwrap()
}

#[test]
fn genus2_double_example() {
    let r = double_embedding();
    assert_eq!(r.tower.presentation().format(), "< a,b,t | a b a^-1 b^-1 t b a b^-1 a^-1 t^-1 >");
    let s = genus2_double();
    let table = r.j_table(s.alphabet());
    let expect = [("a", "a"), ("b", "b"), ("c", "t a t^-1"), ("d", "t b t^-1")];
    for ((g, img), (eg, eimg)) in table.iter().zip(expect) {
        assert_eq!((g.as_str(), img.as_str()), (eg, eimg));
    }
    let rel = s.alphabet().parse("[a,b][c,d]^-1").unwrap();
    let img = r.j.apply(&rel).unwrap();
    assert_eq!(r.tower.alphabet().format(&img), "a b a^-1 b^-1 t b a b^-1 a^-1 t^-1");
    assert_eq!(r.tower.word_problem(&img, BUDGET).unwrap(), Verdict::Trivial);
    assert_eq!(r.u.lattice, vec![r.tower.parse("[a,b]").unwrap()]);
    assert!(r.obligations.iter().all(|o| o.status.is_verified()), "{:?}", r.obligations);
}

#[test]
fn amalgam_identity_on_b_side() {
    let s = genus2_double();
    let d = double_quotient(&["a", "b", "b a", "b"]);
    // [ba, b] = b [a,b] b^-1 is not [a,b]: nu fails to be a homomorphism
    assert!(matches!(embed_step(&s, &d, &AttachOptions::default()), Err(EmbedError::NotHomomorphism { .. })));
    let r = double_embedding();
    let nu = double_quotient(&["a", "b", "a", "b"]).nu().unwrap();
    let t = r.tower.parse("t").unwrap();
    for w in enumerate_ball(2, 3) {
        let bw = GroupHom::new(vec![Word::generator(2), Word::generator(3)]).apply(&w).unwrap();
        let direct = r.j.apply(&bw).unwrap();
        let conj = t.mul(&nu.apply(&bw).unwrap()).mul(&t.inverse());
        assert_eq!(direct, conj);
    }
}

use crate::words::enumerate_ball;

#[test]
fn certify_double() {
    let r = double_embedding();
    let s = genus2_double();
    let c = certify_injectivity_on_ball(&r, s.graph(), 2, BUDGET);
    assert!(c.full, "{:?} {:?}", c.refutations, c.unknown);
    assert!(c.nontrivial > 0);
    let c0 = certify_injectivity_on_ball(&r, s.graph(), 0, BUDGET);
    assert!(c0.full);
    assert_eq!(c0.nontrivial, 0);

    let mut bad = r.clone();
    bad.j.set_image(2, r.tower.parse("a").unwrap());
    let c = certify_injectivity_on_ball(&bad, s.graph(), 2, BUDGET);
    assert!(!c.full);
    assert!(c.refutations.contains(&"c a^-1".to_string()), "{:?}", c.refutations);
}

#[test]
fn validate_double() {
    let s = genus2_double();
    let rep = validate_strict_quotient(&s, &double_quotient(&["a", "b", "a", "b"]), 2, BUDGET).unwrap();
    assert!(rep.all_verified(), "{rep:?}");
    assert!(rep.status("edge group injective").unwrap().is_verified());
    assert!(rep.status("edge image maximal abelian").unwrap().is_verified());

    let rep = validate_strict_quotient(&s, &double_quotient(&["a", "a", "a", "a"]), 2, BUDGET).unwrap();
    assert!(rep.status("nu is a homomorphism").unwrap().is_verified());
    assert_eq!(
        rep.status("edge group injective"),
        Some(&Status::Refuted("a b a^-1 b^-1 maps to 1".into()))
    );
}

/// `<a,b,s | [s,a]>` as an HNN extension of `<a,b>`.
fn hnn() -> SplittingData {
    let al = Alphabet::new(&["a", "b"]).unwrap();
    let mut b = GraphBuilder::new(al);
    b.add_vertex(VertexGroup::new("A", VertexKind::Free { gens: vec![0, 1] }));
    b.add_edge(0, 0, vec![Word::generator(0)], vec![Word::generator(0)], Some("s"));
    SplittingData::new(SplittingKind::HnnRigid, b.build(0, BUDGET).unwrap()).unwrap()
}

#[test]
fn hnn_example() {
    let s = hnn();
    let t0 = free_ab();
    let d = StrictQuotientData::direct(hom(&t0, &["a", "b", "a"]), t0);
    let r = embed_step(&s, &d, &AttachOptions::default()).unwrap();
    assert_eq!(r.tower.presentation().format(), "< a,b,t | a t a^-1 t^-1 >");
    let sl = s.stable_letter().unwrap();
    assert_eq!(r.tower.alphabet().format(r.j.image(sl)), "t a");
    let c = certify_injectivity_on_ball(&r, s.graph(), 3, BUDGET);
    assert!(c.full, "{:?} {:?}", c.refutations, c.unknown);
    let rep = validate_strict_quotient(&s, &d, 2, BUDGET).unwrap();
    assert!(rep.status("edge group injective").unwrap().is_verified());
}

#[test]
fn maximal_abelian_takes_roots() {
    let t = free_ab();
    let u = maximal_abelian(&t, &[t.parse("b a^2 b^-1").unwrap()], BUDGET).unwrap();
    assert_eq!(u.lattice, vec![t.parse("b a b^-1").unwrap()]);
    assert_eq!(u.flat, None);
    let z2 = Tower::new_height0(
        vec![Summand::Free { names: names(&["a"]) }, Summand::Abelian { names: names(&["x", "y"]) }],
        BUDGET,
    )
    .unwrap();
    let u = maximal_abelian(&z2, &[z2.parse("x^2 y").unwrap()], BUDGET).unwrap();
    assert_eq!(u.flat, Some(0));
    assert!(maximal_abelian(&t, &[Word::empty()], BUDGET).is_err());
}

#[test]
fn complement_examples() {
    let c = complement(&[vec![2, 3]], 2).unwrap();
    let det = 2 * c[0][1] - 3 * c[0][0];
    assert_eq!(det.abs(), 1);
    assert!(complement(&[vec![2, 0]], 2).is_none());
    assert!(complement(&[vec![1, 0, 0], vec![0, 1, 1]], 3).is_some());
    assert_eq!(complement(&[vec![1, 0], vec![0, 1]], 2), Some(vec![]));
}

/// `Z^2 = <x,y>` glued along `x = [a,b]` to `<a,b>`.
fn abelian_vertex() -> SplittingData {
    let al = Alphabet::new(&["x", "y", "a", "b"]).unwrap();
    let mut b = GraphBuilder::new(al.clone());
    b.add_vertex(VertexGroup::new("A", VertexKind::FreeAbelian { gens: vec![0, 1] }));
    b.add_vertex(VertexGroup::new("B", VertexKind::Free { gens: vec![2, 3] }));
    b.add_edge(0, 1, vec![Word::generator(0)], vec![al.parse("[a,b]").unwrap()], None);
    SplittingData::new(SplittingKind::AbelianVertex, b.build(0, BUDGET).unwrap()).unwrap()
}

#[test]
fn abelian_vertex_example() {
    let s = abelian_vertex();
    let t0 = free_ab();
    let d = StrictQuotientData::direct(hom(&t0, &["[a,b]", "", "a", "b"]), t0);
    let r = embed_step(&s, &d, &AttachOptions::default()).unwrap();
    let block = &r.tower.blocks()[0];
    match block {
        Block::T { attach, rank, .. } => assert_eq!((attach.len(), *rank), (1, 2)),
        b => panic!("unexpected block {b:?}"),
    }
    let al = r.tower.alphabet();
    assert_eq!(al.format(r.j.image(0)), "a b a^-1 b^-1");
    // y goes to the new lattice letter, up to the attaching element
    let y = r.j.image(1);
    assert_eq!(y.abelianize(al.len())[2].abs(), 1);
    let c = certify_injectivity_on_ball(&r, s.graph(), 2, BUDGET);
    assert!(c.full, "{:?} {:?}", c.refutations, c.unknown);
    let rep = validate_strict_quotient(&s, &d, 2, BUDGET).unwrap();
    assert!(rep.status("peripheral subgroup injective").unwrap().is_verified());
}

/// Once-punctured torus `<x,y>` with boundary `[x,y]` glued to `[a,b]`.
fn qh() -> SplittingData {
    let al = Alphabet::new(&["x", "y", "a", "b"]).unwrap();
    let mut b = GraphBuilder::new(al.clone());
    let surface = SurfacePresentation::bounded(1, 1, vec![0, 1]).unwrap();
    b.add_vertex(VertexGroup::new("S", VertexKind::Surface(surface)));
    b.add_vertex(VertexGroup::new("B", VertexKind::Free { gens: vec![2, 3] }));
    b.add_edge(0, 1, vec![al.parse("[x,y]").unwrap()], vec![al.parse("[a,b]").unwrap()], None);
    SplittingData::new(SplittingKind::QhVertex, b.build(0, BUDGET).unwrap()).unwrap()
}

#[test]
fn qh_vertex_example() {
    let s = qh();
    let t0 = free_ab();
    let d = StrictQuotientData::direct(hom(&t0, &["a", "b", "a", "b"]), t0.clone());
    let r = embed_step(&s, &d, &AttachOptions::default()).unwrap();
    assert_eq!(r.tower.presentation().format(), "< a,b,x,y | x y x^-1 y^-1 b a b^-1 a^-1 >");
    let rep = validate_strict_quotient(&s, &d, 2, BUDGET).unwrap();
    assert!(rep.status("surface image nonabelian").unwrap().is_verified());
    let c = certify_injectivity_on_ball(&r, s.graph(), 2, BUDGET);
    assert!(c.full);

    let d = StrictQuotientData::direct(hom(&t0, &["a", "a^2", "a", "a^3"]), t0);
    let rep = validate_strict_quotient(&s, &d, 2, BUDGET).unwrap();
    assert!(matches!(rep.status("surface image nonabelian"), Some(Status::Refuted(_))));
    assert!(embed_step(&s, &d, &AttachOptions::default()).is_err());
}

#[test]
fn malformed_splittings() {
    let s = genus2_double();
    assert!(SplittingData::new(SplittingKind::HnnRigid, s.graph().clone()).is_err());
    assert!(SplittingData::new(SplittingKind::QhVertex, s.graph().clone()).is_err());
    assert!(SplittingData::new(SplittingKind::AbelianVertex, s.graph().clone()).is_err());
}

#[test]
fn document_round_trip() {
    let text = r#"{
        "case": "amalgam-rigid-rigid",
        "vertices": [{"kind": "free", "gens": ["a", "b"]}, {"kind": "free", "gens": ["c", "d"]}],
        "edge": {"from": 0, "to": 1, "from_images": ["[a,b]"], "to_images": ["[c,d]"]},
        "nu": {"a": "a", "b": "b", "c": "a", "d": "b"}
    }"#;
    let doc: SplittingDocument = serde_json::from_str(text).unwrap();
    let again: SplittingDocument = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(doc, again);
    let s = doc.splitting(BUDGET).unwrap();
    let d = doc.quotient(&s, free_ab()).unwrap();
    let r = embed_step(&s, &d, &AttachOptions::default()).unwrap();
    assert_eq!(r.j, double_embedding().j);

    let mut two = doc.clone();
    two.quotient = Some(QuotientDoc { alphabet: names(&["p"]), q: Default::default(), i: Default::default() });
    assert!(two.quotient(&s, free_ab()).is_err());
    let mut missing = doc;
    missing.nu.as_mut().unwrap().remove("d");
    assert!(missing.quotient(&s, free_ab()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn double_never_refutes(r in 0usize..4) {
        let e = double_embedding();
        let c = certify_injectivity_on_ball(&e, genus2_double().graph(), r, BUDGET);
        prop_assert!(c.refutations.is_empty());
    }

    #[test]
    fn validation_is_monotone_in_budget(ci in 0usize..12, di in 0usize..12) {
        let pool = ["a", "b", "a b", "b a", "a^2", "b^-1", "a b^-1", "", "a^-1", "b a b^-1", "a^3", "b^2"];
        let d = |budget: usize| {
            let rep = validate_strict_quotient(
                &genus2_double(),
                &double_quotient(&["a", "b", pool[ci], pool[di]]),
                1,
                budget,
            )
            .unwrap();
            rep.bullets
        };
        let lo = d(4);
        let hi = d(16);
        for (x, y) in lo.iter().zip(&hi) {
            let flip = matches!((&x.status, &y.status), (Status::Verified(_), Status::Refuted(_)) | (Status::Refuted(_), Status::Verified(_)));
            prop_assert!(!flip, "{} flipped", x.name);
        }
    }
}
