//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints one PASS or FAIL line; any failure makes the target fail.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rft_core::cover::expand_cover;
use rft_core::dsl::{parse_tower, BlockDecl, SummandDecl, TowerDocument};
use rft_core::embed::{certify_injectivity_on_ball, embed_step, SplittingDocument};
use rft_core::flats::{check_isolation_hypotheses, color_vertices, compose_isolation_bound, flat_inventory, BoundEnv, SymbolicBound};
use rft_core::graphgroups::Verdict;
use rft_core::tower::{AttachOptions, Summand, Tower};
use rft_core::words::{enumerate_ball, Alphabet, Letter, SurfacePresentation, Word};

const BUDGET: usize = 16;
const EMBED_RADIUS: usize = 3;
const EMBED_TIME: Duration = Duration::from_secs(60);
const MAX_EXPONENT: i64 = 16;
const WP_LENGTH: usize = 5;
const WP_TIME: Duration = Duration::from_secs(120);
const DEHN_PRODUCTS: usize = 100;
const CORE_SAMPLES: usize = 200;
const BOUND_SAMPLES: usize = 500;
const POWER_BUDGET: i64 = 8;
const SEED: u64 = 20_240_601;

const DOUBLE: &str = include_str!("../../../towers/genus2_double.json");
const WEDGE: &str = include_str!("../../../towers/wedge2.rft");
const HOST: &str = include_str!("../../../towers/genus2host.rft");
const FLAT_CORPUS: [(&str, &str); 6] = [
    ("torus_wedge", include_str!("../../../towers/torus_wedge.rft")),
    ("genus2host", HOST),
    ("surface_rank3", include_str!("../../../towers/surface_rank3.rft")),
    ("genus2_torus", include_str!("../../../towers/genus2_torus.rft")),
    ("two_tori", include_str!("../../../towers/two_tori.rft")),
    ("handle_then_torus", include_str!("../../../towers/handle_then_torus.rft")),
];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn tower(text: &str) -> Tower {
    parse_tower(text, BUDGET).expect("corpus tower builds").1
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn all_words(rank: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for g in 0..rank {
                for inv in [false, true] {
                    let mut v = w.clone();
                    v.push(Letter::new(g, inv));
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn double_embedding(radius: usize) -> Outcome {
    let start = Instant::now();
    let doc: SplittingDocument = serde_json::from_str(DOUBLE).map_err(|e| e.to_string())?;
    let s = doc.splitting(BUDGET).map_err(|e| e.to_string())?;
    let d = doc.quotient(&s, tower(WEDGE)).map_err(|e| e.to_string())?;
    let r = embed_step(&s, &d, &AttachOptions::default()).map_err(|e| e.to_string())?;
    let p = r.tower.presentation().format();
    ensure(p == "< a,b,t | a b a^-1 b^-1 t b a b^-1 a^-1 t^-1 >", format!("presentation {p}"))?;
    let al = r.tower.alphabet();
    let src = s.alphabet();
    for (g, want) in [("a", "a"), ("b", "b"), ("c", "t a t^-1"), ("d", "t b t^-1")] {
        let got = al.format(r.j.image(src.index_of(g).unwrap()));
        ensure(got == want, format!("j({g}) = {got}"))?;
    }
    for rel in &s.graph().fundamental_presentation().relators {
        let img = r.j.apply(rel).map_err(|e| e.to_string())?;
        ensure(r.tower.word_problem(&img, BUDGET) == Ok(Verdict::Trivial), "a relator image is not trivial")?;
    }
    let cert = certify_injectivity_on_ball(&r, s.graph(), radius, BUDGET);
    ensure(cert.refutations.is_empty(), format!("refuted on {:?}", cert.refutations))?;
    ensure(cert.unknown.is_empty(), format!("{} undecided", cert.unknown.len()))?;
    ensure(cert.full, "certificate not full")?;
    let took = start.elapsed();
    ensure(took <= EMBED_TIME, format!("took {took:?}"))?;
    Ok(format!("radius {radius}: {} nontrivial elements certified in {:.1?}", cert.nontrivial, took))
}

fn witness() -> Outcome {
    let t = tower(HOST);
    let ball = enumerate_ball(3, 2);
    let cert = t.find_rf_witness(&ball, BUDGET, 1);
    ensure(cert.valid, "no valid certificate")?;
    let again = t.find_rf_witness(&ball, BUDGET, 1);
    ensure(
        serde_json::to_string(&cert).unwrap() == serde_json::to_string(&again).unwrap(),
        "two runs with one seed differ",
    )?;
    let target = Alphabet::new(&cert.target).map_err(|e| e.to_string())?;
    ensure(cert.target == ["a", "b"], format!("target {:?}", cert.target))?;
    let hom = cert.hom_over(&target)?;
    ensure(hom.image(0) == &Word::generator(0) && hom.image(1) == &Word::generator(1), "a, b not fixed")?;
    let c = Word::commutator(&Word::generator(0), &Word::generator(1));
    let n = (-MAX_EXPONENT..=MAX_EXPONENT)
        .find(|&n| n != 0 && c.pow(n) == hom.image(2).reduce())
        .ok_or_else(|| format!("t maps to {}", target.format(hom.image(2))))?;
    // replay with free reduction only
    for r in &t.presentation().relators {
        ensure(hom.apply(r).unwrap().reduce().is_empty(), "a relator survives")?;
    }
    let mut images: Vec<Word> = ball.iter().map(|w| hom.apply(w).unwrap().reduce()).collect();
    images.sort();
    images.dedup();
    ensure(images.len() == ball.len(), "images collide")?;
    Ok(format!("t -> [a,b]^{n} separates all {} ball elements", ball.len()))
}

fn word_problem() -> Outcome {
    let start = Instant::now();
    let t = tower(HOST);
    let words = all_words(2, WP_LENGTH);
    let (mut unknown, mut wrong) = (0, 0);
    for w in &words {
        let want = if w.reduce().is_empty() { Verdict::Trivial } else { Verdict::Nontrivial };
        match t.word_problem(w, BUDGET) {
            Ok(Verdict::Unknown) | Err(_) => unknown += 1,
            Ok(v) if v != want => wrong += 1,
            Ok(_) => {}
        }
    }
    let took = start.elapsed();
    ensure(wrong == 0 && unknown == 0, format!("{wrong} disagreements, {unknown} unknown"))?;
    ensure(took <= WP_TIME, format!("took {took:?}"))?;
    Ok(format!("{} words agree with free reduction in {:.1?}", words.len(), took))
}

fn dehn() -> Outcome {
    let s = SurfacePresentation::closed(2, vec![0, 1, 2, 3]).map_err(|e| e.to_string())?;
    let r = s.relator().cloned().ok_or("closed surface without relator")?;
    let trivial = |w: &Word| s.is_trivial(w).unwrap();
    let abelian_zero = |w: &Word| w.abelianize(4).iter().all(|&x| x == 0);
    let mut must_die = vec![r.clone(), r.inverse()];
    must_die.extend(r.rotations());
    must_die.extend(r.inverse().rotations());
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let random_word = |rng: &mut ChaCha8Rng, len: usize| {
        Word::from_letters((0..len).map(|_| Letter::new(rng.gen_range(0..4), rng.gen())).collect()).reduce()
    };
    for _ in 0..DEHN_PRODUCTS {
        let (g, h) = (random_word(&mut rng, 6), random_word(&mut rng, 6));
        let ri = if rng.gen() { r.clone() } else { r.inverse() };
        let rj = if rng.gen() { r.clone() } else { r.inverse() };
        must_die.push(g.conjugate(&ri).mul(&h.conjugate(&rj)));
    }
    let died = must_die.iter().filter(|w| trivial(w)).count();
    ensure(died == must_die.len(), format!("{} of {} relator products survive", must_die.len() - died, must_die.len()))?;
    let mut must_live: Vec<Word> = (0..4).map(Word::generator).collect();
    must_live.extend(enumerate_ball(4, 2).into_iter().filter(|w| w.len() == 2 && !abelian_zero(w)));
    let lived = must_live.iter().filter(|w| !trivial(w)).count();
    ensure(lived == must_live.len(), format!("{} short words die", must_live.len() - lived))?;
    let checked: Vec<Word> = enumerate_ball(4, 3).into_iter().chain(must_die.iter().cloned()).collect();
    let contradictions = checked.iter().filter(|w| trivial(w) && !abelian_zero(w)).count();
    ensure(contradictions == 0, format!("{contradictions} verdicts contradict abelianization"))?;
    Ok(format!("{} trivial, {} nontrivial, {} checked against abelianization", died, lived, checked.len()))
}

/// Basepointed Stallings graph of a subgroup of a free group, written from
/// scratch: petals, folding until deterministic, then trimming hairs away
/// from the base.
struct Folded {
    base: usize,
    edges: Vec<(usize, usize, usize)>,
}

impl Folded {
    fn new(gens: &[Word]) -> Folded {
        let mut n = 1;
        let mut edges = Vec::new();
        for w in gens {
            let w = w.reduce();
            if w.is_empty() {
                continue;
            }
            let mut at = 0;
            for (i, l) in w.letters().iter().enumerate() {
                let next = if i + 1 == w.len() {
                    0
                } else {
                    n += 1;
                    n - 1
                };
                if l.is_inverse() {
                    edges.push((next, l.gen(), at));
                } else {
                    edges.push((at, l.gen(), next));
                }
                at = next;
            }
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        loop {
            for e in edges.iter_mut() {
                *e = (find(&mut parent, e.0), e.1, find(&mut parent, e.2));
            }
            edges.sort();
            edges.dedup();
            let mut out: HashMap<(usize, usize), usize> = HashMap::new();
            let mut inc: HashMap<(usize, usize), usize> = HashMap::new();
            let mut merge = None;
            for &(f, g, t) in &edges {
                if let Some(&t2) = out.get(&(f, g)) {
                    if t2 != t {
                        merge = Some((t, t2));
                        break;
                    }
                }
                if let Some(&f2) = inc.get(&(t, g)) {
                    if f2 != f {
                        merge = Some((f, f2));
                        break;
                    }
                }
                out.insert((f, g), t);
                inc.insert((t, g), f);
            }
            match merge {
                Some((x, y)) => {
                    let (x, y) = (find(&mut parent, x), find(&mut parent, y));
                    let (keep, gone) = (x.min(y), x.max(y));
                    parent[gone] = keep;
                }
                None => break,
            }
        }
        loop {
            let mut degree: HashMap<usize, usize> = HashMap::new();
            for &(f, _, t) in &edges {
                *degree.entry(f).or_default() += 1;
                *degree.entry(t).or_default() += 1;
            }
            let before = edges.len();
            edges.retain(|&(f, _, t)| !((f != 0 && degree[&f] == 1) || (t != 0 && degree[&t] == 1)));
            if edges.len() == before {
                break;
            }
        }
        Folded { base: find(&mut parent, 0), edges }
    }

    fn vertices(&self) -> usize {
        let mut vs: Vec<usize> = self.edges.iter().flat_map(|&(f, _, t)| [f, t]).chain([self.base]).collect();
        vs.sort();
        vs.dedup();
        vs.len()
    }

    fn complete(&self, rank: usize) -> bool {
        let n = self.vertices();
        self.edges.len() == n * rank
            && (0..rank).all(|g| {
                let mut from: Vec<usize> = self.edges.iter().filter(|e| e.1 == g).map(|e| e.0).collect();
                from.sort();
                from.dedup();
                from.len() == n
            })
    }
}

/// Relabels a folded graph by breadth-first search from its base, so two
/// basepointed folded graphs are isomorphic iff their forms are equal.
fn canonical(base: usize, edges: &[(usize, usize, usize)]) -> Vec<(usize, usize, usize)> {
    let mut adj: BTreeMap<usize, Vec<(usize, bool, usize)>> = BTreeMap::new();
    for &(f, g, t) in edges {
        adj.entry(f).or_default().push((g, false, t));
        adj.entry(t).or_default().push((g, true, f));
    }
    for v in adj.values_mut() {
        v.sort();
    }
    let mut label = HashMap::from([(base, 0usize)]);
    let mut queue = VecDeque::from([base]);
    while let Some(v) = queue.pop_front() {
        for &(_, _, w) in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            if !label.contains_key(&w) {
                label.insert(w, label.len());
                queue.push_back(w);
            }
        }
    }
    let mut out: Vec<_> = edges.iter().map(|&(f, g, t)| (label[&f], g, label[&t])).collect();
    out.sort();
    out
}

fn core_vs_stallings() -> Outcome {
    let t = Tower::new_height0(vec![Summand::Free { names: vec!["a".into(), "b".into()] }], BUDGET)
        .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut samples: Vec<Vec<Word>> = vec![["a^2", "b", "a b a^-1"].iter().map(|w| t.parse(w).unwrap()).collect()];
    while samples.len() <= CORE_SAMPLES {
        let k = rng.gen_range(1..=3);
        let gens: Vec<Word> = (0..k)
            .map(|_| loop {
                let len = rng.gen_range(1..=4);
                let w = Word::from_letters((0..len).map(|_| Letter::new(rng.gen_range(0..2), rng.gen())).collect());
                if w.is_reduced() {
                    break w;
                }
            })
            .collect();
        samples.push(gens);
    }
    let (mut finite, mut kernel_ok) = (0, false);
    for (i, gens) in samples.iter().enumerate() {
        let r = expand_cover(t.top().graph(), gens, 0, BUDGET)
            .and_then(|c| c.extract_core(&[]))
            .map_err(|e| format!("sample {i}: {e}"))?;
        let oracle = Folded::new(gens);
        let ours = canonical(0, &r.letter_edges());
        let theirs = canonical(oracle.base, &oracle.edges);
        ensure(ours == theirs, format!("sample {i} {:?}: {ours:?} vs {theirs:?}", gens))?;
        ensure(r.vertices.len() == oracle.vertices(), format!("sample {i}: vertex count"))?;
        if oracle.complete(2) {
            let n = oracle.vertices();
            ensure(r.rank == n + 1, format!("sample {i}: index {n} but rank {}", r.rank))?;
            finite += 1;
            kernel_ok |= i == 0 && n == 2;
        }
    }
    ensure(kernel_ok, "index-2 kernel not recognised")?;
    Ok(format!("{} subgroups isomorphic to the oracle core, {finite} of finite index", samples.len()))
}

fn expected_flats(doc: &TowerDocument) -> usize {
    let summands = doc
        .base
        .iter()
        .filter(|s| matches!(s, SummandDecl::Abelian { gens } if gens.len() >= 2))
        .count();
    // a T block extends exactly one existing flat, so it never adds a class
    let blocks = doc.blocks.iter().filter(|b| matches!(b, BlockDecl::A { rank, .. } if *rank >= 2)).count();
    summands + blocks
}

fn flats() -> Outcome {
    let mut heights = Vec::new();
    let mut kinds = String::new();
    for (name, text) in FLAT_CORPUS {
        let (doc, t) = parse_tower(text, BUDGET).map_err(|e| format!("{name}: {e}"))?;
        let inv = flat_inventory(&t, BUDGET);
        let want = expected_flats(&doc);
        let live = t.flat_records().iter().filter(|f| f.superseded_by.is_none()).count();
        ensure(inv.len() == want && live == want, format!("{name}: {} classes, {want} declared", inv.len()))?;
        for c in &inv {
            for x in 0..c.words.len() {
                for y in x + 1..c.words.len() {
                    let comm = Word::commutator(&c.words[x], &c.words[y]);
                    ensure(
                        t.word_problem(&comm, BUDGET) == Ok(Verdict::Trivial),
                        format!("{name}: lattice {:?} does not commute", c.lattice),
                    )?;
                }
            }
        }
        heights.push(t.height());
        for b in &doc.blocks {
            kinds.push(match b {
                BlockDecl::A { .. } => 'A',
                BlockDecl::T { .. } => 'T',
                BlockDecl::Q { .. } => 'Q',
            });
        }
    }
    ensure(heights.contains(&0) && heights.contains(&2), format!("heights {heights:?}"))?;
    ensure(["A", "T", "Q"].iter().all(|k| kinds.contains(k)), "corpus misses a block kind")?;

    let t = tower(HOST);
    let gens: Vec<Word> = ["a", "b", "t a t^-1", "t b t^-1"].iter().map(|w| t.parse(w).unwrap()).collect();
    let r = expand_cover(t.top().graph(), &gens, 0, BUDGET)
        .and_then(|c| c.extract_core(&[]))
        .map_err(|e| e.to_string())?;
    let c = color_vertices(&r, t.blocks().last().map(|b| b.kind())).map_err(|e| e.to_string())?;
    let rep = check_isolation_hypotheses(&c, &t, POWER_BUDGET, BUDGET);
    for i in 0..3 {
        ensure(rep.hypothesis(i).is_verified(), format!("hypothesis ({i}): {:?}", rep.hypothesis(i)))?;
    }
    // the exactness of (1) rests on a and [a,b] not commuting
    let a_comm = Word::commutator(&t.parse("a").unwrap(), &t.parse("[a,b]").unwrap());
    ensure(t.word_problem(&a_comm, BUDGET) == Ok(Verdict::Nontrivial), "a commutes with [a,b]")?;
    Ok(format!("6 towers (heights {heights:?}, blocks {kinds}); hypotheses (0)(1)(2) verified exactly"))
}

fn bounds() -> Outcome {
    let phi = SymbolicBound::atom("phi_v");
    let b = compose_isolation_bound(std::slice::from_ref(&phi), &[], None, &["diam_e".into()]).map_err(|e| e.to_string())?;
    let shown = b.to_string();
    ensure(shown == "max{phi_v(2k) + 2k, diam_e + 2k}", format!("renders as {shown}"))?;
    let v = b.eval(3, &BoundEnv::default().atom("phi_v", &[]).constant("diam_e", 5)).map_err(|e| e.to_string())?;
    ensure(v == 11, format!("phi(3) = {v}"))?;

    let inner = compose_isolation_bound(
        &[SymbolicBound::atom("phi_v")],
        &[SymbolicBound::atom("psi_e")],
        Some(&SymbolicBound::atom("psi1")),
        &["d1".into()],
    )
    .map_err(|e| e.to_string())?;
    let outer = compose_isolation_bound(&[inner], &[SymbolicBound::atom("psi_f")], None, &["d2".into()])
        .map_err(|e| e.to_string())?;
    let env = BoundEnv::default()
        .atom("phi_v", &[2, 1])
        .atom("psi_e", &[0, 0, 1])
        .atom("psi1", &[6])
        .atom("psi_f", &[1, 3])
        .constant("d1", 10)
        .constant("d2", 40);
    for k in [1u64, 2, 4] {
        let inner = |x: u64| [2 + 3 * 2 * x, 4 * x * x + 2 * x, 6 + 2 * x, 10 + 2 * x].into_iter().max().unwrap();
        let hand = [inner(2 * k) + 2 * k, 1 + 3 * 2 * k + 2 * k, 40 + 2 * k].into_iter().max().unwrap();
        let got = outer.eval(k, &env).map_err(|e| e.to_string())?;
        ensure(got == hand, format!("nested bound at k = {k}: {got}, by hand {hand}"))?;
    }

    let b = compose_isolation_bound(
        &[SymbolicBound::atom("phi")],
        &[SymbolicBound::atom("psi")],
        Some(&SymbolicBound::atom("psi1")),
        &["diam".into()],
    )
    .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let coeffs = |rng: &mut ChaCha8Rng| -> Vec<u64> { (0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..8)).collect() };
    for i in 0..BOUND_SAMPLES {
        let env = BoundEnv::default()
            .atom("phi", &coeffs(&mut rng))
            .atom("psi", &coeffs(&mut rng))
            .atom("psi1", &coeffs(&mut rng))
            .constant("diam", rng.gen_range(0..50));
        let mut last = 0;
        for k in 0..=12u64 {
            let v = b.eval(k, &env).map_err(|e| e.to_string())?;
            ensure(v >= last, format!("assignment {i}: not monotone at k = {k}"))?;
            last = v;
            for part in ["phi", "psi", "psi1"] {
                let a = SymbolicBound::atom(part).eval(k, &env).unwrap();
                ensure(v >= a, format!("assignment {i}: {part} not dominated at k = {k}"))?;
            }
            ensure(v >= env.consts["diam"], format!("assignment {i}: diameter not dominated"))?;
        }
    }
    Ok(format!("phi(3) = 11, nesting matches at k = 1, 2, 4, {BOUND_SAMPLES} assignments monotone and dominating"))
}

fn limit_group_properties() -> Outcome {
    let t = tower(HOST);
    let ball = enumerate_ball(3, 2);
    let wp = |w: &Word| t.word_problem(w, BUDGET).unwrap_or(Verdict::Unknown);
    let (mut roots, mut conj, mut bad, mut unknown) = (0, 0, Vec::new(), 0);
    for x in &ball {
        for y in &ball {
            if x == y {
                continue;
            }
            match wp(&x.mul(&y.inverse())) {
                Verdict::Nontrivial => {}
                Verdict::Trivial => continue,
                Verdict::Unknown => {
                    unknown += 1;
                    continue;
                }
            }
            for n in [2, 3] {
                roots += 1;
                match wp(&x.pow(n).mul(&y.pow(-n))) {
                    Verdict::Nontrivial => {}
                    Verdict::Trivial => bad.push(format!("roots: {x:?}, {y:?}, n = {n}")),
                    Verdict::Unknown => unknown += 1,
                }
            }
        }
    }
    for x in &ball {
        if wp(x) != Verdict::Nontrivial {
            continue;
        }
        for g in &ball {
            let xg = g.conjugate(x);
            match wp(&Word::commutator(x, &xg)) {
                Verdict::Trivial => {}
                Verdict::Nontrivial => continue,
                Verdict::Unknown => {
                    unknown += 1;
                    continue;
                }
            }
            conj += 1;
            match wp(&x.inverse().mul(&xg)) {
                Verdict::Trivial => {}
                Verdict::Nontrivial => bad.push(format!("conjugates: {x:?} by {g:?}")),
                Verdict::Unknown => unknown += 1,
            }
        }
    }
    ensure(bad.is_empty(), format!("{} counterexamples, first {:?}", bad.len(), bad.first()))?;
    ensure(unknown == 0, format!("{unknown} unknown verdicts"))?;
    Ok(format!("{roots} root pairs and {conj} commuting conjugates, no counterexample, no unknown"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("genus two double embedding", || double_embedding(EMBED_RADIUS)),
        ("residual freeness witness", witness),
        ("word problem matches free reduction", word_problem),
        ("dehn algorithm on genus two", dehn),
        ("core against stallings oracle", core_vs_stallings),
        ("flat bookkeeping", flats),
        ("bound calculus", bounds),
        ("limit group properties", limit_group_properties),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
