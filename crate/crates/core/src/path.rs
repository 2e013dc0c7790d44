//! Finite paths from the root, their ordinals and the Vershik successor.

use crate::alphabet::Letter;
use crate::diagram::{DiagramError, OrderedBratteliDiagram};
use crate::scalar::{self, Count};

/// A path in `E_{0,k}`: for each level `i = 1..=k` the range letter `v_i`
/// and the position `o_i` of the edge inside `σ_i(v_i)`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct PathPrefix {
    letters: Vec<Letter>,
    ordinals: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("every edge of the path is maximal; the successor lies beyond depth {0}")]
    AllMax(usize),
    #[error("ordinal {ordinal} out of range: only {count} paths end at the letter")]
    OrdinalOutOfRange { ordinal: String, count: String },
    #[error("level {level}: {reason}")]
    Invalid { level: usize, reason: String },
    #[error("letter index {letter} does not exist at level {level}")]
    NoSuchLetter { level: usize, letter: Letter },
}

impl From<crate::scalar::Overflow> for PathError {
    fn from(e: crate::scalar::Overflow) -> Self {
        PathError::Diagram(DiagramError::Overflow(e))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Extreme {
    Min,
    Max,
}

impl PathPrefix {
    /// Builds and checks a path; `records[i - 1] = (v_i, o_i)`.
    pub fn new(d: &OrderedBratteliDiagram, records: &[(Letter, usize)]) -> Result<PathPrefix, PathError> {
        let p = PathPrefix {
            letters: records.iter().map(|r| r.0).collect(),
            ordinals: records.iter().map(|r| r.1).collect(),
        };
        p.check(d)?;
        Ok(p)
    }

    pub fn depth(&self) -> usize {
        self.letters.len()
    }

    /// Range letter at the deepest level (`None` at depth 0).
    pub fn range(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    /// `v_i` for `1 <= i <= depth`.
    pub fn letter(&self, i: usize) -> Letter {
        self.letters[i - 1]
    }

    /// `o_i` for `1 <= i <= depth`.
    pub fn ordinal_at(&self, i: usize) -> usize {
        self.ordinals[i - 1]
    }

    pub fn records(&self) -> impl Iterator<Item = (Letter, usize)> + '_ {
        self.letters.iter().copied().zip(self.ordinals.iter().copied())
    }

    /// The first `k` levels.
    pub fn truncate(&self, k: usize) -> PathPrefix {
        PathPrefix {
            letters: self.letters[..k].to_vec(),
            ordinals: self.ordinals[..k].to_vec(),
        }
    }

    pub fn check(&self, d: &OrderedBratteliDiagram) -> Result<(), PathError> {
        for i in 1..=self.depth() {
            let v = self.letter(i);
            let size = d.level_size(i)?;
            if v >= size {
                return Err(PathError::NoSuchLetter { level: i, letter: v });
            }
            let img = d.morphism(i)?.image(v);
            let o = self.ordinal_at(i);
            if o >= img.len() {
                return Err(PathError::Invalid {
                    level: i,
                    reason: format!("edge position {o} but the image has length {}", img.len()),
                });
            }
            let below = if i == 1 { 0 } else { self.letter(i - 1) };
            if img[o] != below {
                return Err(PathError::Invalid {
                    level: i,
                    reason: format!("edge {o} does not come from the letter of level {}", i - 1),
                });
            }
        }
        Ok(())
    }

    /// Renders as `v_1[o_1] v_2[o_2] ...` with letter names.
    pub fn render(&self, d: &OrderedBratteliDiagram) -> String {
        let parts: Vec<String> = (1..=self.depth())
            .map(|i| {
                let name = d.alphabet(i).map(|a| a.name(self.letter(i)).to_string());
                format!("{}[{}]", name.unwrap_or_else(|_| "?".into()), self.ordinal_at(i))
            })
            .collect();
        parts.join(" ")
    }
}

/// Position of `p` among all paths into its range letter, deepest level
/// dominant. Equals the position in `σ_{[0,k]}(v_k)` of the edge read by `p`.
pub fn path_ordinal<C: Count>(d: &OrderedBratteliDiagram, p: &PathPrefix) -> Result<C, PathError> {
    let table = d.path_count_table::<C>(p.depth())?;
    let mut total = C::zero();
    for i in 1..=p.depth() {
        let img = d.morphism(i)?.image(p.letter(i));
        for &a in &img[..p.ordinal_at(i)] {
            total = scalar::add(&total, &table[i - 1][a])?;
        }
    }
    Ok(total)
}

/// Inverse of [`path_ordinal`].
pub fn path_from_ordinal<C: Count>(
    d: &OrderedBratteliDiagram,
    n: usize,
    v: Letter,
    j: &C,
) -> Result<PathPrefix, PathError> {
    if v >= d.level_size(n)? {
        return Err(PathError::NoSuchLetter { level: n, letter: v });
    }
    let table = d.path_count_table::<C>(n)?;
    if *j >= table[n][v] {
        return Err(PathError::OrdinalOutOfRange {
            ordinal: j.to_string(),
            count: table[n][v].to_string(),
        });
    }
    let mut letters = vec![0; n];
    let mut ordinals = vec![0; n];
    let mut rest = j.clone();
    let mut cur = v;
    for i in (1..=n).rev() {
        letters[i - 1] = cur;
        let img = d.morphism(i)?.image(cur);
        let mut chosen = None;
        for (o, &a) in img.iter().enumerate() {
            let h = &table[i - 1][a];
            if rest < *h {
                chosen = Some((o, a));
                break;
            }
            rest = rest.checked_sub(h).expect("ordinal below total");
        }
        let (o, a) = chosen.expect("ordinal below the path count");
        ordinals[i - 1] = o;
        cur = a;
    }
    Ok(PathPrefix { letters, ordinals })
}

/// All paths into `v` at level `n`, in ordinal order, by direct recursion
/// over the images.
pub fn enumerate_paths(d: &OrderedBratteliDiagram, n: usize, v: Letter) -> Result<Vec<PathPrefix>, PathError> {
    if n == 0 {
        return Ok(vec![PathPrefix {
            letters: vec![],
            ordinals: vec![],
        }]);
    }
    let img = d.morphism(n)?.image(v).to_vec();
    let mut out = Vec::new();
    for (o, a) in img.into_iter().enumerate() {
        for mut p in enumerate_paths(d, n - 1, a)? {
            p.letters.push(v);
            p.ordinals.push(o);
            out.push(p);
        }
    }
    Ok(out)
}

/// Writes the extreme path of depth `top` into `cur` over levels `1..=top`.
fn fill_extreme(
    d: &OrderedBratteliDiagram,
    letters: &mut [Letter],
    ordinals: &mut [usize],
    top: usize,
    mut cur: Letter,
    which: Extreme,
) -> Result<(), PathError> {
    for i in (1..=top).rev() {
        letters[i - 1] = cur;
        let img = d.morphism(i)?.image(cur);
        if img.is_empty() {
            return Err(PathError::Invalid {
                level: i,
                reason: "empty image".into(),
            });
        }
        let o = match which {
            Extreme::Min => 0,
            Extreme::Max => img.len() - 1,
        };
        ordinals[i - 1] = o;
        cur = img[o];
    }
    Ok(())
}

/// Successor in the induced order: the lowest non-maximal edge moves to
/// its next sibling and everything below becomes minimal.
pub fn vershik_successor(d: &OrderedBratteliDiagram, p: &PathPrefix) -> Result<PathPrefix, PathError> {
    let k = p.depth();
    let mut letters = p.letters.clone();
    let mut ordinals = p.ordinals.clone();
    for i in 1..=k {
        let img = d.morphism(i)?.image(letters[i - 1]);
        let o = ordinals[i - 1];
        if o + 1 < img.len() {
            ordinals[i - 1] = o + 1;
            let next = img[o + 1];
            fill_extreme(d, &mut letters, &mut ordinals, i - 1, next, Extreme::Min)?;
            return Ok(PathPrefix { letters, ordinals });
        }
    }
    Err(PathError::AllMax(k))
}

/// Path of depth `k` with every edge extremal, ending at `range` if given.
///
/// Without a range the letter at level `k` is the first (for `Min`) or last
/// (for `Max`) letter of `σ_{k+1}` applied to the first letter of level
/// `k + 1`, so that the path extends the extreme path one level deeper.
/// Past the represented levels of a finite diagram the first letter of
/// level `k` is used.
pub fn extreme_path(
    d: &OrderedBratteliDiagram,
    k: usize,
    which: Extreme,
    range: Option<Letter>,
) -> Result<PathPrefix, PathError> {
    d.level_size(k)?;
    let top = match range {
        Some(v) => {
            if v >= d.level_size(k)? {
                return Err(PathError::NoSuchLetter { level: k, letter: v });
            }
            v
        }
        None if k == 0 => 0,
        None => match d.morphism(k + 1) {
            Ok(m) => {
                let img = m.image(0);
                match which {
                    Extreme::Min => *img.first().unwrap_or(&0),
                    Extreme::Max => *img.last().unwrap_or(&0),
                }
            }
            Err(_) => 0,
        },
    };
    let mut letters = vec![0; k];
    let mut ordinals = vec![0; k];
    if k > 0 {
        fill_extreme(d, &mut letters, &mut ordinals, k, top, which)?;
    }
    Ok(PathPrefix { letters, ordinals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::tests::chacon;
    use num_bigint::BigUint;

    #[test]
    fn ordinals_round_trip_on_chacon() {
        let d = chacon();
        for n in 0..=4 {
            for v in 0..d.level_size(n).unwrap() {
                let all = enumerate_paths(&d, n, v).unwrap();
                assert_eq!(all.len() as u64, d.path_count::<u64>(n, v).unwrap());
                for (j, p) in all.iter().enumerate() {
                    assert_eq!(path_ordinal::<u64>(&d, p).unwrap(), j as u64);
                    assert_eq!(&path_from_ordinal(&d, n, v, &(j as u64)).unwrap(), p);
                }
            }
        }
    }

    #[test]
    fn successor_counts_up() {
        let d = chacon();
        let mut p = extreme_path(&d, 3, Extreme::Min, Some(1)).unwrap();
        let total = d.path_count::<u64>(3, 1).unwrap();
        for j in 1..total {
            p = vershik_successor(&d, &p).unwrap();
            assert_eq!(path_ordinal::<u64>(&d, &p).unwrap(), j);
        }
        assert_eq!(vershik_successor(&d, &p), Err(PathError::AllMax(3)));
    }

    #[test]
    fn extreme_paths() {
        let d = chacon();
        let max = extreme_path(&d, 3, Extreme::Max, Some(0)).unwrap();
        let count = d.path_count::<BigUint>(3, 0).unwrap();
        assert_eq!(path_ordinal::<BigUint>(&d, &max).unwrap() + 1u32, count);
        let m3 = extreme_path(&d, 3, Extreme::Min, None).unwrap();
        let m4 = extreme_path(&d, 4, Extreme::Min, None).unwrap();
        assert_eq!(m4.truncate(3), m3);
        assert!(m3.records().all(|(_, o)| o == 0));
    }

    #[test]
    fn out_of_range_ordinal() {
        let d = chacon();
        assert!(matches!(
            path_from_ordinal(&d, 2, 0, &5u32),
            Err(PathError::OrdinalOutOfRange { .. })
        ));
    }

    #[test]
    fn invalid_paths_are_rejected() {
        let d = chacon();
        assert!(PathPrefix::new(&d, &[(0, 1), (1, 1)]).is_err());
        assert!(PathPrefix::new(&d, &[(0, 1), (0, 0)]).is_ok());
    }
}
