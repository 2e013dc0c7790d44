use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::Hash;

use super::concat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodeError {
    #[error("code word {0} is empty")]
    EmptyWord(usize),
    #[error("code words {0} and {1} are equal")]
    Duplicate(usize, usize),
    #[error("the code is not independent")]
    NotIndependent,
    #[error("target {0} does not factorize over the code")]
    Ungenerated(usize),
}

/// Checks that `code` has no empty word and no repeated word.
pub fn check_code<T: Eq + Hash>(code: &[Vec<T>]) -> Result<(), CodeError> {
    let mut seen: HashMap<&[T], usize> = HashMap::new();
    for (i, c) in code.iter().enumerate() {
        if c.is_empty() {
            return Err(CodeError::EmptyWord(i));
        }
        if let Some(&j) = seen.get(c.as_slice()) {
            return Err(CodeError::Duplicate(j, i));
        }
        seen.insert(c, i);
    }
    Ok(())
}

/// Result of the independence test.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Independence<T> {
    Independent,
    /// `word` equals both concatenations (lists of code-word indices).
    Dependent {
        word: Vec<T>,
        left: Vec<usize>,
        right: Vec<usize>,
    },
}

impl<T> Independence<T> {
    pub fn is_independent(&self) -> bool {
        matches!(self, Independence::Independent)
    }
}

/// Decides unique decipherability by the dangling-suffix method.
///
/// A state is a pair of partial factorizations whose concatenations agree
/// except that one runs ahead of the other by a dangling suffix. Equal
/// words in `code` count as a dependence.
pub fn is_independent<T: Clone + Eq + Hash>(code: &[Vec<T>]) -> Independence<T> {
    struct State<T> {
        dangling: Vec<T>,
        behind: Vec<usize>,
        ahead: Vec<usize>,
    }

    for i in 0..code.len() {
        for j in i + 1..code.len() {
            if code[i] == code[j] {
                return Independence::Dependent {
                    word: code[i].clone(),
                    left: vec![i],
                    right: vec![j],
                };
            }
        }
    }

    let mut queue = VecDeque::new();
    let mut seen: HashSet<Vec<T>> = HashSet::new();
    for (i, a) in code.iter().enumerate() {
        for (j, b) in code.iter().enumerate() {
            if i != j && a.len() < b.len() && b.starts_with(a) {
                let d = b[a.len()..].to_vec();
                if seen.insert(d.clone()) {
                    queue.push_back(State {
                        dangling: d,
                        behind: vec![i],
                        ahead: vec![j],
                    });
                }
            }
        }
    }
    while let Some(st) = queue.pop_front() {
        for (c, word) in code.iter().enumerate() {
            let d = &st.dangling;
            if word == d {
                let mut left = st.behind.clone();
                left.push(c);
                return Independence::Dependent {
                    word: concat(code, &left),
                    left,
                    right: st.ahead.clone(),
                };
            }
            let next = if word.len() < d.len() && d.starts_with(word) {
                let mut behind = st.behind.clone();
                behind.push(c);
                State {
                    dangling: d[word.len()..].to_vec(),
                    behind,
                    ahead: st.ahead.clone(),
                }
            } else if d.len() < word.len() && word.starts_with(d) {
                let mut ahead = st.behind.clone();
                ahead.push(c);
                State {
                    dangling: word[d.len()..].to_vec(),
                    behind: st.ahead.clone(),
                    ahead,
                }
            } else {
                continue;
            };
            if seen.insert(next.dangling.clone()) {
                queue.push_back(next);
            }
        }
    }
    Independence::Independent
}

/// Factorization strategies.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FactorMode {
    /// The only factorization; requires an independent code.
    Unique,
    /// Leftmost-longest with backtracking.
    Greedy,
    /// Every factorization.
    All,
}

/// Factorizations of `w` over `code`, as lists of code-word indices.
///
/// `Greedy` and `Unique` give at most one result.
pub fn factorize<T: Clone + Eq + Hash>(
    w: &[T],
    code: &[Vec<T>],
    mode: FactorMode,
) -> Result<Vec<Vec<usize>>, CodeError> {
    match mode {
        FactorMode::Greedy => Ok(factorize_greedy(w, code).into_iter().collect()),
        FactorMode::Unique => Ok(factorize_unique(w, code)?.into_iter().collect()),
        FactorMode::All => Ok(factorize_all(w, code)),
    }
}

/// Deterministic factorization: at each position the longest matching code
/// word is tried first (earlier code words win ties), backtracking on
/// failure. Finds a factorization whenever one exists.
pub fn factorize_greedy<T: Eq>(w: &[T], code: &[Vec<T>]) -> Option<Vec<usize>> {
    let mut order: Vec<usize> = (0..code.len()).filter(|&i| !code[i].is_empty()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(code[i].len()));
    let mut dead = vec![false; w.len() + 1];
    let mut out = Vec::new();
    if greedy_from(w, code, &order, 0, &mut dead, &mut out) {
        Some(out)
    } else {
        None
    }
}

fn greedy_from<T: Eq>(
    w: &[T],
    code: &[Vec<T>],
    order: &[usize],
    pos: usize,
    dead: &mut [bool],
    out: &mut Vec<usize>,
) -> bool {
    if pos == w.len() {
        return true;
    }
    if dead[pos] {
        return false;
    }
    for &i in order {
        let c = &code[i];
        if w[pos..].starts_with(c) {
            out.push(i);
            if greedy_from(w, code, order, pos + c.len(), dead, out) {
                return true;
            }
            out.pop();
        }
    }
    dead[pos] = true;
    false
}

/// Every factorization of `w` over `code`, in lexicographic order of the
/// index lists. The number of results can grow exponentially with `|w|`.
pub fn factorize_all<T: Eq>(w: &[T], code: &[Vec<T>]) -> Vec<Vec<usize>> {
    // reach[p]: a factorization of w[p..] exists.
    let n = w.len();
    let mut reach = vec![false; n + 1];
    reach[n] = true;
    for p in (0..n).rev() {
        reach[p] = code
            .iter()
            .any(|c| !c.is_empty() && w[p..].starts_with(c) && reach[p + c.len()]);
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    all_from(w, code, &reach, 0, &mut cur, &mut out);
    out
}

fn all_from<T: Eq>(
    w: &[T],
    code: &[Vec<T>],
    reach: &[bool],
    pos: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if pos == w.len() {
        out.push(cur.clone());
        return;
    }
    for (i, c) in code.iter().enumerate() {
        if !c.is_empty() && w[pos..].starts_with(c) && reach[pos + c.len()] {
            cur.push(i);
            all_from(w, code, reach, pos + c.len(), cur, out);
            cur.pop();
        }
    }
}

/// The factorization of `w` over an independent code, if any.
pub fn factorize_unique<T: Clone + Eq + Hash>(w: &[T], code: &[Vec<T>]) -> Result<Option<Vec<usize>>, CodeError> {
    if !is_independent(code).is_independent() {
        return Err(CodeError::NotIndependent);
    }
    Ok(factorize_greedy(w, code))
}

/// Indices of an inclusion-minimal subset of `code` over which every target
/// still factorizes.
///
/// Generation is monotone in the code, so one removal pass in index order
/// already yields a minimal subset.
pub fn minimal_generating_subset<T: Eq>(code: &[Vec<T>], targets: &[Vec<T>]) -> Result<Vec<usize>, CodeError> {
    if let Some(t) = targets.iter().position(|t| factorize_greedy(t, code).is_none()) {
        return Err(CodeError::Ungenerated(t));
    }
    let mut keep: Vec<bool> = vec![true; code.len()];
    for i in 0..code.len() {
        keep[i] = false;
        let ok = targets.iter().all(|t| generated_by(t, code, &keep));
        if !ok {
            keep[i] = true;
        }
    }
    Ok((0..code.len()).filter(|&i| keep[i]).collect())
}

fn generated_by<T: Eq>(w: &[T], code: &[Vec<T>], keep: &[bool]) -> bool {
    let n = w.len();
    let mut reach = vec![false; n + 1];
    reach[n] = true;
    for p in (0..n).rev() {
        reach[p] = code
            .iter()
            .zip(keep)
            .any(|(c, &k)| k && !c.is_empty() && w[p..].starts_with(c) && reach[p + c.len()]);
    }
    reach[0]
}
