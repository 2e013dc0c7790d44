use std::collections::HashMap;

use super::{telescope, TransformError};
use crate::alphabet::Letter;
use crate::diagram::OrderedBratteliDiagram;
use crate::matrix::Support;
use crate::morphism::Morphism;
use crate::periodic::{IndexSeq, Step};

/// A telescoping after which every image at each level starts with one
/// common letter and ends with one common letter.
#[derive(Clone, Debug)]
pub struct ProperForm {
    pub spec: IndexSeq,
    pub diagram: OrderedBratteliDiagram,
}

impl ProperForm {
    /// `(v_min, v_max)` of level `k` of the telescoped diagram: the common
    /// first and last letters of the images of `σ_{k+1}`.
    pub fn extremes(&self, k: usize) -> Option<(Letter, Letter)> {
        common_ends(self.diagram.morphism(k + 1).ok()?)
    }
}

/// Common first and last letter of all images, if there are such.
pub fn common_ends(m: &Morphism) -> Option<(Letter, Letter)> {
    let first = *m.images().first()?.first()?;
    let last = *m.images().first()?.last()?;
    m.images()
        .iter()
        .all(|w| w.first() == Some(&first) && w.last() == Some(&last))
        .then_some((first, last))
}

/// First-letter (or last-letter) map of one morphism.
fn end_map(m: &Morphism, last: bool) -> Option<Vec<Letter>> {
    m.images()
        .iter()
        .map(|w| if last { w.last().copied() } else { w.first().copied() })
        .collect()
}

fn constant(map: &[Letter]) -> bool {
    map.windows(2).all(|p| p[0] == p[1])
}

/// Greedy search for a proper-form telescoping: from level `a` the next
/// selected level is the smallest `b` (at most `max_depth` further) for
/// which the first letters and the last letters of `σ_{[a,b]}` are constant.
///
/// On a periodic diagram the search stops as soon as it revisits a tail
/// phase, which makes the selected sequence periodic from there on. On a
/// finite diagram the spec stops at the last level it can reach.
pub fn proper_form_search(d: &OrderedBratteliDiagram, max_depth: usize) -> Result<ProperForm, TransformError> {
    let spec = greedy_spec(d, max_depth, false, 1)?;
    let diagram = telescope(d, &spec)?;
    Ok(ProperForm { spec, diagram })
}

/// Like [`proper_form_search`], but every selected step must also be
/// entrywise positive (when `positive`) and land on a level with at least
/// `min_size` letters. Returns only the spec.
pub fn greedy_spec(
    d: &OrderedBratteliDiagram,
    max_depth: usize,
    positive: bool,
    min_size: usize,
) -> Result<IndexSeq, TransformError> {
    let mut idx = vec![0usize];
    let mut phases: HashMap<usize, usize> = HashMap::new();
    loop {
        let a = *idx.last().unwrap();
        if let Some(t) = d.tail() {
            if a >= d.depth() {
                let phase = (a - t.start) % t.period;
                if let Some(&i) = phases.get(&phase) {
                    let lag = idx.len() - 1 - i;
                    let step = Step { lag, shift: a - idx[i] };
                    let seq = IndexSeq::new(idx.clone(), Some(step))?;
                    return Ok(IndexSeq::compress(&seq.prefix(idx.len() + 2 * lag), step));
                }
                phases.insert(phase, idx.len() - 1);
            }
        }
        let mut first: Vec<Letter> = Vec::new();
        let mut last: Vec<Letter> = Vec::new();
        let mut support: Option<Support> = None;
        let mut found = None;
        for b in a + 1..=a + max_depth {
            if !d.has_level(b) {
                break;
            }
            let m = d.morphism(b)?;
            let (Some(f), Some(l)) = (end_map(m, false), end_map(m, true)) else {
                break;
            };
            if b == a + 1 {
                first = f;
                last = l;
            } else {
                first = f.iter().map(|&x| first[x]).collect();
                last = l.iter().map(|&x| last[x]).collect();
            }
            let mut ok = constant(&first) && constant(&last) && d.level_size(b)? >= min_size;
            if positive {
                let step = Support::of(&d.incidence_matrix::<u64>(b)?);
                let next = match support.take() {
                    None => step,
                    Some(prev) => step.mul(&prev),
                };
                ok &= next.is_positive();
                support = Some(next);
            }
            if ok {
                found = Some(b);
                break;
            }
        }
        match found {
            Some(b) => idx.push(b),
            None if !d.is_infinite() && a + max_depth >= d.depth() => {
                return Ok(IndexSeq::finite(idx)?);
            }
            None => return Err(TransformError::Inconclusive(max_depth)),
        }
    }
}

/// Outcome of [`positive_reach`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Reach {
    /// Smallest `N` with `A_N ⋯ A_{n+1}` entrywise positive.
    At(usize),
    Inconclusive,
}

/// Smallest `N` in `n+1 ..= n+max_depth` whose product matrix from level `n`
/// is entrywise positive.
pub fn positive_reach(d: &OrderedBratteliDiagram, n: usize, max_depth: usize) -> Result<Reach, TransformError> {
    let mut acc: Option<Support> = None;
    for big_n in n + 1..=n + max_depth {
        if !d.has_level(big_n) {
            break;
        }
        let a = Support::of(&d.incidence_matrix::<u64>(big_n)?);
        let next = match acc {
            None => a,
            Some(prev) => a.mul(&prev),
        };
        if next.is_positive() {
            return Ok(Reach::At(big_n));
        }
        acc = Some(next);
    }
    Ok(Reach::Inconclusive)
}

/// Largest level size over the represented levels (level 0 excluded).
pub fn diagram_rank(d: &OrderedBratteliDiagram) -> usize {
    d.rank()
}
