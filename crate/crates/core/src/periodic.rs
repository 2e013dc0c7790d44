//! Eventually periodic data: index sequences and tail bookkeeping.

use std::fmt;

use num_integer::Integer;

/// Eventual periodicity of a level-indexed family: from `start` on, the
/// object at index `n` depends only on `(n - start) mod period`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Periodicity {
    pub start: usize,
    pub period: usize,
}

impl Periodicity {
    pub fn join(self, other: Periodicity) -> Periodicity {
        Periodicity {
            start: self.start.max(other.start),
            period: self.period.lcm(&other.period),
        }
    }

    /// First index past one full period after the start: checking every
    /// index below this bound covers all phases.
    pub fn horizon(self) -> usize {
        self.start + self.period
    }
}

/// Combines optional periodicities; `None` (a finite object) absorbs.
pub fn join_all<I: IntoIterator<Item = Option<Periodicity>>>(items: I) -> Option<Periodicity> {
    let mut acc: Option<Periodicity> = None;
    for p in items {
        let p = p?;
        acc = Some(match acc {
            None => p,
            Some(a) => a.join(p),
        });
    }
    acc
}

/// Shortest tail of a generated family `items[0..]` (item `i` standing for
/// index `i + offset`) whose period divides `period`.
///
/// Returns `(start, period)` with `start` as an index (offset included).
/// The family must repeat with `period` from some index `t` on and be
/// generated through at least `t + 2 * period`.
pub fn detect_tail<T: PartialEq>(items: &[T], offset: usize, period: usize) -> Option<Periodicity> {
    let e = items.len();
    for d in (1..=period).filter(|d| period.is_multiple_of(*d)) {
        if e < d + 1 {
            continue;
        }
        let mut s = e - d;
        while s > 0 && items[s - 1] == items[s - 1 + d] {
            s -= 1;
        }
        if s + d + period <= e {
            return Some(Periodicity {
                start: s + offset,
                period: d,
            });
        }
    }
    None
}

/// Step rule `x_i = x_{i - lag} + shift`, applied past the explicit head.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Step {
    pub lag: usize,
    pub shift: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexSeqError {
    #[error("index sequence is empty")]
    Empty,
    #[error("step lag must be between 1 and the head length")]
    BadLag,
    #[error("index sequence must start at 0")]
    NotFromZero,
    #[error("index sequence is not strictly increasing at position {0}")]
    NotIncreasing(usize),
    #[error("index sequence decreases at position {0}")]
    Decreasing(usize),
    #[error("malformed index sequence: {0}")]
    Syntax(String),
}

/// Eventually arithmetic-periodic sequence of nonnegative integers.
///
/// Used for telescoping specs (`n_0 = 0 < n_1 < ...`) and premorphism scales.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct IndexSeq {
    head: Vec<usize>,
    step: Option<Step>,
}

impl IndexSeq {
    pub fn finite(head: Vec<usize>) -> Result<Self, IndexSeqError> {
        Self::new(head, None)
    }

    pub fn new(head: Vec<usize>, step: Option<Step>) -> Result<Self, IndexSeqError> {
        if head.is_empty() {
            return Err(IndexSeqError::Empty);
        }
        if let Some(s) = step {
            if s.lag == 0 || s.lag > head.len() {
                return Err(IndexSeqError::BadLag);
            }
        }
        Ok(IndexSeq { head, step })
    }

    /// `0, 1, 2, ...`
    pub fn identity() -> Self {
        IndexSeq {
            head: vec![0],
            step: Some(Step { lag: 1, shift: 1 }),
        }
    }

    /// `0, k, 2k, ...`
    pub fn arithmetic(k: usize) -> Self {
        IndexSeq {
            head: vec![0],
            step: Some(Step { lag: 1, shift: k }),
        }
    }

    pub fn head(&self) -> &[usize] {
        &self.head
    }

    pub fn step(&self) -> Option<Step> {
        self.step
    }

    pub fn is_identity(&self) -> bool {
        self.get(0) == Some(0) && self.step.is_some() && (0..=self.head.len() + 1).all(|i| self.get(i) == Some(i))
    }

    /// Number of terms, `None` when infinite.
    pub fn len(&self) -> Option<usize> {
        match self.step {
            Some(_) => None,
            None => Some(self.head.len()),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> Option<usize> {
        let h = self.head.len();
        if i < h {
            return Some(self.head[i]);
        }
        let s = self.step?;
        let base = h - s.lag;
        let q = (i - base) / s.lag;
        let r = (i - base) % s.lag;
        Some(self.head[base + r] + q * s.shift)
    }

    /// Terms with index `< n` (fewer if the sequence is finite).
    pub fn prefix(&self, n: usize) -> Vec<usize> {
        (0..n).map_while(|i| self.get(i)).collect()
    }

    /// Index of the first term `>= value`, if any.
    pub fn position_at_least(&self, value: usize) -> Option<usize> {
        let mut i = 0;
        loop {
            let x = self.get(i)?;
            if x >= value {
                return Some(i);
            }
            if self.step.is_some_and(|s| s.shift == 0) && i > self.head.len() {
                return None;
            }
            i += 1;
        }
    }

    /// Index from which every gap `x_{i+1} - x_i` repeats with the step lag.
    fn settled(&self) -> usize {
        self.head.len()
    }

    /// Checks `x_0 = 0` and strict increase.
    pub fn check_telescope(&self) -> Result<(), IndexSeqError> {
        if self.head[0] != 0 {
            return Err(IndexSeqError::NotFromZero);
        }
        let bound = self.settled() + self.step.map_or(0, |s| s.lag) + 1;
        for i in 1..bound {
            match (self.get(i - 1), self.get(i)) {
                (Some(a), Some(b)) if b <= a => return Err(IndexSeqError::NotIncreasing(i)),
                _ => {}
            }
        }
        Ok(())
    }

    /// Checks `x_0 = 0` and that the sequence never decreases.
    pub fn check_scale(&self) -> Result<(), IndexSeqError> {
        if self.head[0] != 0 {
            return Err(IndexSeqError::NotFromZero);
        }
        let bound = self.settled() + self.step.map_or(0, |s| s.lag) + 1;
        for i in 1..bound {
            match (self.get(i - 1), self.get(i)) {
                (Some(a), Some(b)) if b < a => return Err(IndexSeqError::Decreasing(i)),
                _ => {}
            }
        }
        Ok(())
    }

    /// Unbounded (cofinal) sequences.
    pub fn is_cofinal(&self) -> bool {
        self.step.is_some_and(|s| s.shift > 0)
    }

    /// From which index on the gap pattern is periodic, and its period.
    pub fn gap_periodicity(&self) -> Option<Periodicity> {
        let s = self.step?;
        Some(Periodicity {
            start: self.head.len(),
            period: s.lag,
        })
    }

    /// `i -> self[outer[i]]`: telescoping along `self` then along `outer`.
    pub fn compose(&self, outer: &IndexSeq) -> IndexSeq {
        match (self.step, outer.step) {
            (Some(inner), Some(out)) => {
                // After k rounds of the outer step, k * out.shift is a multiple
                // of inner.lag, so self advances by whole steps of its own.
                let k = if out.shift == 0 {
                    1
                } else {
                    inner.lag / out.shift.gcd(&inner.lag)
                };
                let lag = out.lag * k;
                let shift = inner.shift * (out.shift * k / inner.lag);
                let mut start = outer.head.len() + lag;
                if out.shift > 0 {
                    while outer.get(start - lag).unwrap() < self.head.len() {
                        start += 1;
                    }
                }
                let values: Vec<usize> = (0..start + 2 * lag)
                    .map(|i| self.get(outer.get(i).unwrap()).unwrap())
                    .collect();
                IndexSeq::compress(&values, Step { lag, shift })
            }
            _ => {
                let values: Vec<usize> = (0..)
                    .map_while(|i| outer.get(i).and_then(|j| self.get(j)))
                    .take(outer.len().unwrap_or(usize::MAX))
                    .collect();
                IndexSeq {
                    head: values,
                    step: None,
                }
            }
        }
    }

    /// Shortest representation of `values` continued by `step`.
    ///
    /// `values` must satisfy the step rule from some index `t` on, and extend
    /// to at least `t + 2 * step.lag` terms so that shorter lags dividing
    /// `step.lag` can be detected too.
    pub fn compress(values: &[usize], step: Step) -> IndexSeq {
        let n = values.len();
        for lag in (1..=step.lag).filter(|d| step.lag.is_multiple_of(*d)) {
            if !(step.shift * lag).is_multiple_of(step.lag) {
                continue;
            }
            let shift = step.shift * lag / step.lag;
            let mut h = n;
            while h > lag && values[h - 1] == values[h - 1 - lag] + shift {
                h -= 1;
            }
            if h + step.lag <= n {
                return IndexSeq {
                    head: values[..h].to_vec(),
                    step: Some(Step { lag, shift }),
                };
            }
        }
        IndexSeq {
            head: values.to_vec(),
            step: Some(step),
        }
    }

    /// Parses `0 1 3 tail +2` / `0 1 tail 2 +4` / `0 2 5`.
    pub fn parse(text: &str) -> Result<IndexSeq, IndexSeqError> {
        let toks: Vec<&str> = text.split_whitespace().collect();
        let split = toks.iter().position(|t| *t == "tail");
        let (head_toks, step_toks) = match split {
            Some(i) => (&toks[..i], Some(&toks[i + 1..])),
            None => (&toks[..], None),
        };
        let num = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| IndexSeqError::Syntax(format!("expected an integer, found {t:?}")))
        };
        let head = head_toks.iter().map(|t| num(t)).collect::<Result<Vec<_>, _>>()?;
        let step = match step_toks {
            None => None,
            Some(rest) => {
                let (lag, shift_tok) = match rest {
                    [s] => (1, *s),
                    [l, s] => (num(l)?, *s),
                    _ => return Err(IndexSeqError::Syntax("expected `tail [lag] +shift`".into())),
                };
                let shift = shift_tok
                    .strip_prefix('+')
                    .ok_or_else(|| IndexSeqError::Syntax(format!("expected `+shift`, found {shift_tok:?}")))?;
                Some(Step {
                    lag,
                    shift: num(shift)?,
                })
            }
        };
        IndexSeq::new(head, step)
    }
}

impl fmt::Display for IndexSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.head.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" "))?;
        match self.step {
            Some(Step { lag: 1, shift }) => write!(f, " tail +{shift}"),
            Some(Step { lag, shift }) => write!(f, " tail {lag} +{shift}"),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_levels() {
        let s = IndexSeq::parse("0 1 tail +2").unwrap();
        assert_eq!(s.prefix(5), vec![0, 1, 3, 5, 7]);
        assert_eq!(s.to_string(), "0 1 tail +2");
        assert!(s.check_telescope().is_ok());
    }

    #[test]
    fn lagged_step() {
        let s = IndexSeq::parse("0 1 3 tail 2 +5").unwrap();
        assert_eq!(s.prefix(7), vec![0, 1, 3, 6, 8, 11, 13]);
        assert_eq!(IndexSeq::parse(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(IndexSeq::parse("1 2").unwrap().check_telescope().is_err());
        assert!(IndexSeq::parse("0 2 2").unwrap().check_telescope().is_err());
        assert!(IndexSeq::parse("0 2 2").unwrap().check_scale().is_ok());
        assert!(IndexSeq::parse("0 tail 2 +1").is_err());
        assert!(IndexSeq::parse("0 tail x").is_err());
    }

    #[test]
    fn compose_matches_pointwise() {
        let inner = IndexSeq::parse("0 1 tail +2").unwrap();
        let outer = IndexSeq::parse("0 2 3 tail 2 +3").unwrap();
        let c = inner.compose(&outer);
        for i in 0..40 {
            assert_eq!(c.get(i), inner.get(outer.get(i).unwrap()));
        }
        let fin = IndexSeq::finite(vec![0, 1, 2]).unwrap();
        assert_eq!(inner.compose(&fin).prefix(10), vec![0, 1, 3]);
    }

    #[test]
    fn compress_finds_short_form() {
        let vals: Vec<usize> = (0..10).map(|i| 2 * i).collect();
        let s = IndexSeq::compress(&vals, Step { lag: 2, shift: 4 });
        assert_eq!(s, IndexSeq::arithmetic(2));
        assert!(IndexSeq::identity().is_identity());
    }
}
