//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use bratteli::premorphism::Premorphism;
use bratteli::transforms::{positive_reach, Reach};
use bratteli::{Alphabet, IndexSeq, Morphism, OrderedBratteliDiagram, Tail, Word};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn names(prefix: &str, k: usize) -> Alphabet {
    Alphabet::new((0..k).map(|i| format!("{prefix}{i}"))).unwrap()
}

fn random_word(rng: &mut ChaCha8Rng, letters: usize, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    (0..len).map(|_| rng.gen_range(0..letters)).collect()
}

/// Appends every unused codomain letter to some image, so the morphism
/// leaves no zero column.
fn cover(rng: &mut ChaCha8Rng, images: &mut [Word], codomain: usize) {
    for a in 0..codomain {
        if !images.iter().flatten().any(|&b| b == a) {
            let i = rng.gen_range(0..images.len());
            images[i].push(a);
        }
    }
}

/// A valid diagram with 2 to 4 represented levels of at most `max_size`
/// letters; periodic from some level on when `periodic`.
pub fn random_diagram(rng: &mut ChaCha8Rng, max_size: usize, periodic: bool) -> OrderedBratteliDiagram {
    let depth = rng.gen_range(2..=4);
    let mut sizes = vec![1];
    sizes.extend((0..depth).map(|_| rng.gen_range(1..=max_size)));
    let tail = periodic.then(|| {
        let start = rng.gen_range(2..=depth);
        sizes[depth] = sizes[start - 1];
        Tail {
            start,
            period: depth - start + 1,
        }
    });
    let mut levels = vec![Alphabet::root()];
    let mut morphisms = Vec::new();
    for n in 1..=depth {
        levels.push(names("a", sizes[n]));
        let mut images: Vec<Word> = (0..sizes[n]).map(|_| random_word(rng, sizes[n - 1], 3)).collect();
        cover(rng, &mut images, sizes[n - 1]);
        morphisms.push(Morphism::new(images));
    }
    OrderedBratteliDiagram::new(levels, morphisms, tail).unwrap()
}

/// A strictly increasing telescoping spec, periodic when `periodic`.
pub fn random_spec(rng: &mut ChaCha8Rng, periodic: bool) -> IndexSeq {
    loop {
        let s = spec_candidate(rng, periodic);
        if s.check_telescope().is_ok() {
            return s;
        }
    }
}

fn spec_candidate(rng: &mut ChaCha8Rng, periodic: bool) -> IndexSeq {
    let mut head = vec![0];
    for _ in 0..rng.gen_range(0..3) {
        let last = *head.last().unwrap();
        head.push(last + rng.gen_range(1..=2));
    }
    if periodic {
        let lag = rng.gen_range(1..=2);
        let shift = rng.gen_range(lag..=3);
        while head.len() < lag + 1 {
            let last = *head.last().unwrap();
            head.push(last + 1);
        }
        IndexSeq::new(head, Some(bratteli::periodic::Step { lag, shift })).unwrap()
    } else {
        if head.len() == 1 {
            head.push(1);
        }
        IndexSeq::finite(head).unwrap()
    }
}

/// A stationary premorphism `B1 -> B2` with `σ^{B2} = G ∘ τ` and
/// `σ^{B1} = τ ∘ G` for random `τ: W -> V^*` and `G: V -> W^*`.
///
/// Every `G(v)` starts with the first and ends with the last letter of `W`,
/// so B2 has a unique minimal and maximal path. Instances whose diagrams
/// are not simple (no positive product of incidence matrices) are redrawn.
pub fn stationary_premorphism(rng: &mut ChaCha8Rng, max_v: usize, max_w: usize) -> Premorphism {
    loop {
        let f = stationary_candidate(rng, max_v, max_w);
        let simple = |d: &OrderedBratteliDiagram| matches!(positive_reach(d, 1, 16), Ok(Reach::At(_)));
        if simple(f.b1()) && simple(f.b2()) {
            return f;
        }
    }
}

fn stationary_candidate(rng: &mut ChaCha8Rng, max_v: usize, max_w: usize) -> Premorphism {
    let nv = rng.gen_range(1..=max_v);
    let nw = rng.gen_range(1..=max_w);
    let mut tau: Vec<Word> = (0..nw).map(|_| random_word(rng, nv, 3)).collect();
    cover(rng, &mut tau, nv);
    let mut g: Vec<Word> = (0..nv)
        .map(|_| {
            let mut w = vec![0];
            w.extend(random_word(rng, nw, 3));
            w.push(nw - 1);
            w
        })
        .collect();
    for a in 0..nw {
        if !g.iter().flatten().any(|&b| b == a) {
            let words: Vec<usize> = (0..nv).collect();
            let i = *words.choose(rng).unwrap();
            let at = g[i].len() - 1;
            g[i].insert(at, a);
        }
    }
    let (tau, g) = (Morphism::new(tau), Morphism::new(g));
    let h1: Vec<usize> = (0..nv).map(|_| rng.gen_range(1..=3)).collect();
    let h2: Vec<usize> = (0..nw).map(|w| tau.image(w).iter().map(|&v| h1[v]).sum()).collect();
    let root = |h: &[usize]| Morphism::new(h.iter().map(|&k| vec![0; k]).collect());
    let (v, w) = (names("v", nv), names("w", nw));
    let tail = Some(Tail { start: 2, period: 1 });
    let b1 = OrderedBratteliDiagram::new(
        vec![Alphabet::root(), v.clone(), v],
        vec![root(&h1), tau.after(&g)],
        tail,
    )
    .unwrap();
    let b2 = OrderedBratteliDiagram::new(
        vec![Alphabet::root(), w.clone(), w],
        vec![root(&h2), g.after(&tau)],
        tail,
    )
    .unwrap();
    Premorphism::new(
        b1,
        b2,
        IndexSeq::identity(),
        vec![tau],
        Some(Tail { start: 1, period: 1 }),
    )
    .unwrap()
}
