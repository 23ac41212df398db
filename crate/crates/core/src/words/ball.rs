use super::{Letter, Word};

/// All reduced words of length at most `radius` over `rank` generators, in
/// shortlex order with letters ordered `g0 < g0^-1 < g1 < g1^-1 < ..`.
pub fn enumerate_ball(rank: usize, radius: usize) -> Vec<Word> {
    let letters: Vec<Letter> =
        (0..rank).flat_map(|g| [Letter::new(g, false), Letter::new(g, true)]).collect();
    let mut out = vec![Word::empty()];
    let mut shell = vec![Word::empty()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &shell {
            for &l in &letters {
                if w.letters().last() == Some(&l.inverse()) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        shell = next;
    }
    out
}

/// `1 + sum_{i=1..r} 2n(2n-1)^(i-1)`.
pub fn ball_size(rank: usize, radius: usize) -> usize {
    if rank == 0 {
        return 1;
    }
    let mut total = 1;
    let mut shell = 2 * rank;
    for _ in 0..radius {
        total += shell;
        shell *= 2 * rank - 1;
    }
    total
}
