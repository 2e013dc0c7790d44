//! Ordered Bratteli diagrams stored as morphism sequences.

use std::fmt;

use crate::alphabet::{Alphabet, Letter, Word, ROOT};
use crate::matrix::CountMatrix;
use crate::morphism::Morphism;
use crate::periodic::{detect_tail, Periodicity};
use crate::scalar::{Count, Overflow};

/// Periodic continuation: for `n` past the represented levels, level `n`
/// repeats level `start + (n - start) mod period`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Tail {
    pub start: usize,
    pub period: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiagramError {
    #[error("level 0 must be the single root letter `@`")]
    BadRoot,
    #[error("letter name `@` is reserved for level 0 (found at level {0})")]
    ReservedName(usize),
    #[error("expected {expected} morphisms for {levels} levels, found {found}")]
    MorphismCount {
        levels: usize,
        expected: usize,
        found: usize,
    },
    #[error("morphism {level} has {found} images but level {level} has {expected} letters")]
    ImageCount {
        level: usize,
        expected: usize,
        found: usize,
    },
    #[error("morphism {level} uses letter index {letter} outside level {prev}")]
    LetterOutOfRange { level: usize, prev: usize, letter: Letter },
    #[error("tail start must be at least 1 and period at least 1")]
    BadTail,
    #[error("tail from {start} period {period} needs levels through {need}, only {have} represented")]
    TailTooLong {
        start: usize,
        period: usize,
        need: usize,
        have: usize,
    },
    #[error("tail wraps level {wrap} onto level {onto} but their sizes differ")]
    TailSizeMismatch { wrap: usize, onto: usize },
    #[error("level {level} is beyond the represented levels (0..={depth}) of a finite diagram")]
    OutOfRange { level: usize, depth: usize },
    #[error(transparent)]
    Overflow(#[from] Overflow),
}

/// One invariant violation found by [`OrderedBratteliDiagram::validate`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    /// `σ_level(letter)` is the empty word.
    EmptyRow { level: usize, letter: String },
    /// `letter` of level `level - 1` occurs in no image of `σ_level`.
    ZeroColumn { level: usize, letter: String },
    /// A represented level past the first period disagrees with the level it
    /// should repeat.
    TailInconsistent { level: usize, repeats: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyRow { level, letter } => {
                write!(f, "level {level}: empty row (image of {letter} is empty)")
            }
            Violation::ZeroColumn { level, letter } => write!(
                f,
                "level {level}: zero column ({letter} of level {} has no outgoing edge)",
                level - 1
            ),
            Violation::TailInconsistent { level, repeats } => {
                write!(f, "level {level}: does not repeat level {repeats} as the tail requires")
            }
        }
    }
}

/// Sequence of level alphabets `V_0 .. V_L` and morphisms
/// `σ_n: V_n -> V_{n-1}^*`, with an optional periodic tail.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrderedBratteliDiagram {
    levels: Vec<Alphabet>,
    morphisms: Vec<Morphism>,
    tail: Option<Tail>,
}

impl OrderedBratteliDiagram {
    /// Checks structural well-formedness. Edge-count invariants (nonempty
    /// rows and columns) are left to [`validate`](Self::validate) so that
    /// defective inputs can still be loaded and reported on.
    pub fn new(levels: Vec<Alphabet>, morphisms: Vec<Morphism>, tail: Option<Tail>) -> Result<Self, DiagramError> {
        if levels.first() != Some(&Alphabet::root()) {
            return Err(DiagramError::BadRoot);
        }
        if let Some(n) = levels.iter().skip(1).position(|a| a.contains(ROOT)) {
            return Err(DiagramError::ReservedName(n + 1));
        }
        if morphisms.len() + 1 != levels.len() {
            return Err(DiagramError::MorphismCount {
                levels: levels.len(),
                expected: levels.len() - 1,
                found: morphisms.len(),
            });
        }
        for (i, m) in morphisms.iter().enumerate() {
            let level = i + 1;
            if m.domain_len() != levels[level].len() {
                return Err(DiagramError::ImageCount {
                    level,
                    expected: levels[level].len(),
                    found: m.domain_len(),
                });
            }
            if let Some(letter) = m.max_letter().filter(|&a| a >= levels[i].len()) {
                return Err(DiagramError::LetterOutOfRange { level, prev: i, letter });
            }
        }
        if let Some(t) = tail {
            if t.start == 0 || t.period == 0 {
                return Err(DiagramError::BadTail);
            }
            let have = levels.len() - 1;
            let need = t.start + t.period - 1;
            if need > have {
                return Err(DiagramError::TailTooLong {
                    start: t.start,
                    period: t.period,
                    need,
                    have,
                });
            }
            // Unrolled level start + period reads its images over level
            // start + period - 1 with the indices of level start - 1.
            if levels[t.start - 1].len() != levels[need].len() {
                return Err(DiagramError::TailSizeMismatch {
                    wrap: t.start - 1,
                    onto: need,
                });
            }
        }
        Ok(OrderedBratteliDiagram {
            levels,
            morphisms,
            tail,
        })
    }

    /// Builds a diagram from generated levels `0..=E`, detecting the shortest
    /// tail whose period divides `period`.
    ///
    /// The generated data must repeat with `period` from some level `t` on,
    /// with `E >= t + 2 * period`.
    pub fn with_detected_tail(
        levels: Vec<Alphabet>,
        morphisms: Vec<Morphism>,
        period: usize,
    ) -> Result<Self, DiagramError> {
        // Item n (n >= 1) carries everything level n depends on.
        let items: Vec<(usize, &Alphabet, &Morphism)> = (1..levels.len())
            .map(|n| (levels[n - 1].len(), &levels[n], &morphisms[n - 1]))
            .collect();
        match detect_tail(&items, 1, period) {
            Some(p) => {
                let keep = p.start + p.period;
                let mut levels = levels;
                let mut morphisms = morphisms;
                levels.truncate(keep);
                morphisms.truncate(keep - 1);
                Self::new(
                    levels,
                    morphisms,
                    Some(Tail {
                        start: p.start,
                        period: p.period,
                    }),
                )
            }
            None => Self::new(levels, morphisms, None),
        }
    }

    /// Highest represented level `L`.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn tail(&self) -> Option<Tail> {
        self.tail
    }

    pub fn is_infinite(&self) -> bool {
        self.tail.is_some()
    }

    pub fn periodicity(&self) -> Option<Periodicity> {
        self.tail.map(|t| Periodicity {
            start: t.start,
            period: t.period,
        })
    }

    /// Represented level that level `n` repeats.
    pub fn rep(&self, n: usize) -> Option<usize> {
        if n <= self.depth() {
            return Some(n);
        }
        let t = self.tail?;
        Some(t.start + (n - t.start) % t.period)
    }

    fn rep_or_err(&self, n: usize) -> Result<usize, DiagramError> {
        self.rep(n).ok_or(DiagramError::OutOfRange {
            level: n,
            depth: self.depth(),
        })
    }

    pub fn has_level(&self, n: usize) -> bool {
        self.rep(n).is_some()
    }

    pub fn alphabet(&self, n: usize) -> Result<&Alphabet, DiagramError> {
        Ok(&self.levels[self.rep_or_err(n)?])
    }

    pub fn level_size(&self, n: usize) -> Result<usize, DiagramError> {
        Ok(self.alphabet(n)?.len())
    }

    /// `σ_n`, for `n >= 1`.
    pub fn morphism(&self, n: usize) -> Result<&Morphism, DiagramError> {
        assert!(n >= 1, "there is no morphism at level 0");
        Ok(&self.morphisms[self.rep_or_err(n)? - 1])
    }

    pub fn represented_levels(&self) -> &[Alphabet] {
        &self.levels
    }

    pub fn represented_morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    /// `σ_{[i,j]} = σ_{i+1} ∘ ... ∘ σ_j`, mapping `V_j` into `V_i^*`.
    pub fn compose(&self, i: usize, j: usize) -> Result<Morphism, DiagramError> {
        assert!(i <= j, "compose needs i <= j");
        let mut acc = Morphism::identity(self.level_size(j)?);
        for n in (i + 1..=j).rev() {
            acc = self.morphism(n)?.after(&acc);
        }
        Ok(acc)
    }

    /// First `len` letters of `σ_{[i,j]}(v)`, expanded lazily so that deep
    /// composites are never built in full.
    pub fn image_prefix(&self, i: usize, j: usize, v: Letter, len: usize) -> Result<Word, DiagramError> {
        assert!(i <= j, "image_prefix needs i <= j");
        if v >= self.level_size(j)? {
            return Err(DiagramError::LetterOutOfRange {
                level: j,
                prev: j,
                letter: v,
            });
        }
        let mut out = Vec::with_capacity(len);
        self.expand(i, j, v, len, &mut out)?;
        Ok(out)
    }

    fn expand(&self, i: usize, j: usize, v: Letter, len: usize, out: &mut Word) -> Result<(), DiagramError> {
        if out.len() >= len {
            return Ok(());
        }
        if j == i {
            out.push(v);
            return Ok(());
        }
        for &a in self.morphism(j)?.image(v) {
            self.expand(i, j - 1, a, len, out)?;
            if out.len() >= len {
                break;
            }
        }
        Ok(())
    }

    /// `A_n`, of size `|V_n| x |V_{n-1}|`.
    pub fn incidence_matrix<C: Count>(&self, n: usize) -> Result<CountMatrix<C>, DiagramError> {
        let prev = self.level_size(n - 1)?;
        Ok(self.morphism(n)?.matrix(prev)?)
    }

    /// `A_j ⋯ A_{i+1}`, the matrix of `σ_{[i,j]}`.
    pub fn product_matrix<C: Count>(&self, i: usize, j: usize) -> Result<CountMatrix<C>, DiagramError> {
        assert!(i <= j, "product_matrix needs i <= j");
        let mut acc = CountMatrix::identity(self.level_size(i)?);
        for n in i + 1..=j {
            acc = self.incidence_matrix::<C>(n)?.checked_mul(&acc)?;
        }
        Ok(acc)
    }

    /// Path counts `h_n(v) = |σ_{[0,n]}(v)|` for every letter of level `n`.
    pub fn path_counts<C: Count>(&self, n: usize) -> Result<Vec<C>, DiagramError> {
        let mut h = vec![C::one()];
        for m in 1..=n {
            h = self.morphism(m)?.weighted_lengths(&h)?;
        }
        Ok(h)
    }

    /// Path counts for every level `0..=n`.
    pub fn path_count_table<C: Count>(&self, n: usize) -> Result<Vec<Vec<C>>, DiagramError> {
        let mut table = vec![vec![C::one()]];
        for m in 1..=n {
            let next = self.morphism(m)?.weighted_lengths(&table[m - 1])?;
            table.push(next);
        }
        Ok(table)
    }

    /// Number of paths from the root to `v` at level `n`.
    pub fn path_count<C: Count>(&self, n: usize, v: Letter) -> Result<C, DiagramError> {
        Ok(self.path_counts::<C>(n)?.swap_remove(v))
    }

    /// Largest level size over levels `1..=L`.
    pub fn rank(&self) -> usize {
        self.levels.iter().skip(1).map(Alphabet::len).max().unwrap_or(1)
    }

    /// Levels whose checks cover the whole (possibly infinite) diagram:
    /// the represented prefix, which already contains one full tail period.
    pub fn horizon(&self) -> usize {
        self.depth()
    }

    /// Lists every invariant violation; empty iff the diagram is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for n in 1..=self.depth() {
            let m = &self.morphisms[n - 1];
            let here = &self.levels[n];
            let prev = &self.levels[n - 1];
            for (v, img) in m.images().iter().enumerate() {
                if img.is_empty() {
                    out.push(Violation::EmptyRow {
                        level: n,
                        letter: here.name(v).to_string(),
                    });
                }
            }
            for a in m.unused(prev.len()) {
                out.push(Violation::ZeroColumn {
                    level: n,
                    letter: prev.name(a).to_string(),
                });
            }
        }
        if let Some(t) = self.tail {
            for n in t.start + t.period..=self.depth() {
                let r = t.start + (n - t.start) % t.period;
                let rp = if r == t.start { t.start + t.period - 1 } else { r - 1 };
                let consistent = self.levels[n].len() == self.levels[r].len()
                    && self.levels[n - 1].len() == self.levels[rp].len()
                    && self.morphisms[n - 1] == self.morphisms[r - 1];
                if !consistent {
                    out.push(Violation::TailInconsistent { level: n, repeats: r });
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Compares two diagrams level by level (names and images).
    ///
    /// Returns the first disagreement, and otherwise the depth through which
    /// agreement was checked together with whether that covers every level.
    pub fn agreement(&self, other: &Self) -> Agreement {
        let (bound, complete) = match (self.periodicity(), other.periodicity()) {
            (Some(a), Some(b)) => {
                let j = a.join(b);
                (j.horizon().max(self.depth()).max(other.depth()), true)
            }
            (None, None) if self.depth() == other.depth() => (self.depth(), true),
            _ => (self.depth().min(other.depth()), false),
        };
        for n in 0..=bound {
            let (a, b) = (self.alphabet(n).unwrap(), other.alphabet(n).unwrap());
            if a.names() != b.names() {
                return Agreement::Differs(Mismatch::Alphabet {
                    level: n,
                    expected: a.names().to_vec(),
                    actual: b.names().to_vec(),
                });
            }
            if n == 0 {
                continue;
            }
            let (ma, mb) = (self.morphism(n).unwrap(), other.morphism(n).unwrap());
            let prev = self.alphabet(n - 1).unwrap();
            for v in 0..a.len() {
                if ma.image(v) != mb.image(v) {
                    return Agreement::Differs(Mismatch::Image {
                        level: n,
                        letter: a.name(v).to_string(),
                        expected: prev.render(ma.image(v)),
                        actual: prev.render(mb.image(v)),
                    });
                }
            }
        }
        Agreement::Agrees {
            through: bound,
            complete,
        }
    }
}

/// Outcome of [`OrderedBratteliDiagram::agreement`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Agreement {
    Agrees { through: usize, complete: bool },
    Differs(Mismatch),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Mismatch {
    Alphabet {
        level: usize,
        expected: Vec<String>,
        actual: Vec<String>,
    },
    Image {
        level: usize,
        letter: String,
        expected: String,
        actual: String,
    },
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::Alphabet {
                level,
                expected,
                actual,
            } => write!(
                f,
                "level {level}: expected letters [{}], found [{}]",
                expected.join(" "),
                actual.join(" ")
            ),
            Mismatch::Image {
                level,
                letter,
                expected,
                actual,
            } => write!(f, "level {level}, letter {letter}: expected {expected}, found {actual}"),
        }
    }
}
