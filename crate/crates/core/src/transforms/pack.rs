use std::collections::HashSet;

use super::TransformError;
use crate::alphabet::{Alphabet, Word};
use crate::diagram::OrderedBratteliDiagram;
use crate::morphism::Morphism;
use crate::words::{check_code, factorize_greedy, minimal_generating_subset};

/// Letter names for code words over `alphabet`: `[xxy]` for single-character
/// names, `[x1.x1.y1]` otherwise, `[~i]` if those would collide.
pub fn pack_names(alphabet: &Alphabet, code: &[Word]) -> Vec<String> {
    let compact = alphabet.names().iter().all(|n| n.chars().count() == 1);
    let names: Vec<String> = code
        .iter()
        .map(|w| {
            let parts: Vec<&str> = w.iter().map(|&a| alphabet.name(a)).collect();
            format!("[{}]", parts.join(if compact { "" } else { "." }))
        })
        .collect();
    let distinct: HashSet<&String> = names.iter().collect();
    if distinct.len() == names.len() {
        names
    } else {
        (0..code.len()).map(|i| format!("[~{i}]")).collect()
    }
}

/// Inserts the words of `code` (over `V_{k-1}`) as a new level between
/// `V_{k-1}` and `V_k`.
///
/// The new level maps each code word to itself, and `σ_k(v)` is replaced by
/// the fixed (greedy) factorization of `σ_k(v)` over the code, so the
/// composite of the two new morphisms is the old `σ_k`.
pub fn pack(d: &OrderedBratteliDiagram, k: usize, code: &[Word]) -> Result<OrderedBratteliDiagram, TransformError> {
    if k == 0 {
        return Err(TransformError::BadLevel(k));
    }
    check_code(code)?;
    let below = d.alphabet(k - 1)?.clone();
    if let Some(&a) = code.iter().flatten().find(|&&a| a >= below.len()) {
        return Err(TransformError::Malformed(format!(
            "code letter index {a} is outside level {}",
            k - 1
        )));
    }
    let here = d.alphabet(k)?;
    let sigma = d.morphism(k)?;
    let mut factored: Vec<Word> = Vec::with_capacity(here.len());
    for v in 0..here.len() {
        match factorize_greedy(sigma.image(v), code) {
            Some(f) => factored.push(f),
            None => {
                return Err(TransformError::NotCovered {
                    level: k,
                    letter: here.name(v).to_string(),
                })
            }
        }
    }
    let kept = minimal_generating_subset(code, sigma.images())?;
    if kept.len() < code.len() {
        let missing = (0..code.len()).find(|i| !kept.contains(i)).unwrap();
        return Err(TransformError::NotMinimal {
            word: below.render(&code[missing]),
        });
    }
    let new_level = Alphabet::new(pack_names(&below, code)).expect("pack names are valid tokens");

    // Old level n sits at n for n < k and at n + 1 for n >= k.
    let (last, period) = match d.tail() {
        None => (d.depth() + 1, None),
        Some(t) => {
            let settled = (t.start + 1).max(k + 2).max(d.depth() + 1);
            (settled + 2 * t.period, Some(t.period))
        }
    };
    let old = |n: usize| if n < k { n } else { n - 1 };
    let mut levels = Vec::with_capacity(last + 1);
    let mut morphisms: Vec<Morphism> = Vec::with_capacity(last);
    for n in 0..=last {
        let level = if n == k {
            new_level.clone()
        } else {
            d.alphabet(old(n))?.clone()
        };
        levels.push(level);
        if n == 0 {
            continue;
        }
        let m = if n == k {
            Morphism::new(code.to_vec())
        } else if n == k + 1 {
            Morphism::new(factored.clone())
        } else {
            d.morphism(old(n))?.clone()
        };
        morphisms.push(m);
    }
    Ok(match period {
        Some(p) => OrderedBratteliDiagram::with_detected_tail(levels, morphisms, p)?,
        None => OrderedBratteliDiagram::new(levels, morphisms, None)?,
    })
}
