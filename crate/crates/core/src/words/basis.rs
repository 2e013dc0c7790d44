use std::hash::Hash;

use super::code::factorize_greedy;
use super::period::fine_wilf_reduce;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BasisError {
    #[error("pair {0}: s_i t_i is not the word w")]
    NotSplit(usize),
    #[error("pair {0}: s_i is not a suffix of s")]
    NotSuffix(usize),
    #[error("pair {0}: t_i is not a prefix of t")]
    NotPrefix(usize),
    #[error("length difference {0} is not a period of w")]
    NotPeriodic(usize),
    #[error("constructed set does not generate pair {0}")]
    NotGenerating(usize),
}

/// Which branch of the construction produced the set.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BasisCase {
    /// No pair with both sides nonempty: `{w}` (or nothing for empty `w`).
    Whole,
    /// One distinct pair: `{s_1, t_1}`.
    Single,
    /// `|s_1|` is a multiple of the period: `{u, u'}`.
    I,
    /// The remainder of `s_1` and all of `t_1` fit in one period:
    /// `{u_1, u_1', t_1}`.
    II,
    /// `{u_1, u_1', u'}`.
    III,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Basis<T> {
    pub words: Vec<Vec<T>>,
    pub case: BasisCase,
    /// Common period `h` of `w` when at least two distinct pairs remain.
    pub period: Option<usize>,
}

/// A set of at most three nonempty words generating every `s_i` and `t_i`,
/// where `w = s_i t_i`, each `s_i` is a suffix of `s` and each `t_i` a
/// prefix of `t`.
///
/// Write `h` for the gcd of the gaps between the lengths of the distinct
/// `s_i`; `w` has period `h`, so `w = u^k u'` with `|u| = h`. Every `s_i`
/// ends with the same proper prefix `u_1` of `u = u_1 u_1'`, and the
/// `t_i` are `u_1' u^j u'` (or `t_1` itself when it is shorter than
/// `u_1'`).
pub fn three_word_basis<T: Clone + Eq + Hash>(
    w: &[T],
    pairs: &[(Vec<T>, Vec<T>)],
    s: &[T],
    t: &[T],
) -> Result<Basis<T>, BasisError> {
    for (i, (si, ti)) in pairs.iter().enumerate() {
        if si.len() + ti.len() != w.len() || !w.starts_with(si) || !w.ends_with(ti) {
            return Err(BasisError::NotSplit(i));
        }
        if !s.ends_with(si) {
            return Err(BasisError::NotSuffix(i));
        }
        if !t.starts_with(ti) {
            return Err(BasisError::NotPrefix(i));
        }
    }
    // s_i determines t_i, so distinct pairs have distinct s_i lengths.
    let mut cuts: Vec<usize> = pairs
        .iter()
        .map(|(si, _)| si.len())
        .filter(|&l| l > 0 && l < w.len())
        .collect();
    cuts.sort_unstable_by(|a, b| b.cmp(a));
    cuts.dedup();

    let (words, case, period) = match cuts.as_slice() {
        [] => {
            let words = if w.is_empty() { vec![] } else { vec![w.to_vec()] };
            (words, BasisCase::Whole, None)
        }
        [c] => (vec![w[..*c].to_vec(), w[*c..].to_vec()], BasisCase::Single, None),
        _ => {
            let gaps: Vec<usize> = cuts.windows(2).map(|p| p[0] - p[1]).collect();
            let h = match fine_wilf_reduce(w, &gaps) {
                Ok(Some(h)) => h,
                Ok(None) => unreachable!("gaps sum to less than |w|"),
                Err(e) => return Err(BasisError::NotPeriodic(e.period)),
            };
            let u = &w[..h];
            let u_tail = &w[(w.len() / h) * h..];
            let r = cuts[0] % h;
            let (u1, u1p) = u.split_at(r);
            let t1 = &w[cuts[0]..];
            let (words, case) = if r == 0 {
                (vec![u.to_vec(), u_tail.to_vec()], BasisCase::I)
            } else if u1p.len() > t1.len() {
                (vec![u1.to_vec(), u1p.to_vec(), t1.to_vec()], BasisCase::II)
            } else {
                (vec![u1.to_vec(), u1p.to_vec(), u_tail.to_vec()], BasisCase::III)
            };
            (words, case, Some(h))
        }
    };
    let mut out: Vec<Vec<T>> = Vec::new();
    for x in words {
        if !x.is_empty() && !out.contains(&x) {
            out.push(x);
        }
    }
    for (i, (si, ti)) in pairs.iter().enumerate() {
        if factorize_greedy(si, &out).is_none() || factorize_greedy(ti, &out).is_none() {
            return Err(BasisError::NotGenerating(i));
        }
    }
    Ok(Basis {
        words: out,
        case,
        period,
    })
}
