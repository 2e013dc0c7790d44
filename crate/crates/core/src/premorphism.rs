//! Ordered premorphisms between two diagrams, read as morphism sequences.

use std::collections::HashMap;
use std::fmt;

use crate::alphabet::{Alphabet, Letter};
use crate::diagram::{DiagramError, OrderedBratteliDiagram, Tail};
use crate::morphism::Morphism;
use crate::path::{path_from_ordinal, path_ordinal, PathError, PathPrefix};
use crate::periodic::{detect_tail, join_all, IndexSeq, IndexSeqError, Periodicity, Step};
use crate::scalar::{self, Count};
use crate::transforms::{telescope, TransformError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PremorphismError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("scale: {0}")]
    Scale(#[from] IndexSeqError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("tau {level} has {found} images but level {scale_level} of B2 has {expected} letters")]
    TauShape {
        level: usize,
        scale_level: usize,
        expected: usize,
        found: usize,
    },
    #[error("tau {level} uses letter index {letter} outside level {level} of B1")]
    TauLetter { level: usize, letter: Letter },
    #[error("tau tail from {start} period {period} does not fit the {count} represented taus")]
    BadTauTail { start: usize, period: usize, count: usize },
    #[error("tau {0} is not defined (no tau tail and beyond the represented taus)")]
    TauOutOfRange(usize),
    #[error("scale is not defined at {0}")]
    ScaleOutOfRange(usize),
    #[error("scale does not increase within its represented period")]
    NonCofinal,
    #[error("path has depth {found}, expected f_{n} = {expected}")]
    PathDepth { n: usize, expected: usize, found: usize },
}

/// Premorphism `B1 -> B2`: a scale `f` with `f_0 = 0` and morphisms
/// `τ_n: W_{f_n} -> V_n^*` (with `τ_0` the identity on the root).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Premorphism {
    b1: OrderedBratteliDiagram,
    b2: OrderedBratteliDiagram,
    scale: IndexSeq,
    taus: Vec<Morphism>,
    tau_tail: Option<Tail>,
}

/// One failed invariant, as found by [`Premorphism::validate`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PremorphismViolation {
    EmptyImage {
        level: usize,
        letter: String,
    },
    /// A letter of `V_n` occurs in no `τ_n` image.
    UnusedLetter {
        level: usize,
        letter: String,
    },
    /// `τ_n ∘ σ^{B2}_{[f_n, f_{n+1}]}` and `σ^{B1}_{n+1} ∘ τ_{n+1}` differ at `letter`
    /// of `W_{f_{n+1}}`.
    Commutativity {
        level: usize,
        letter: String,
        lhs: String,
        rhs: String,
    },
    TauTailInconsistent {
        level: usize,
        repeats: usize,
    },
    NotCofinal,
}

impl fmt::Display for PremorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PremorphismViolation::EmptyImage { level, letter } => {
                write!(f, "tau {level}: image of {letter} is empty")
            }
            PremorphismViolation::UnusedLetter { level, letter } => {
                write!(f, "tau {level}: letter {letter} of B1 occurs in no image")
            }
            PremorphismViolation::Commutativity {
                level,
                letter,
                lhs,
                rhs,
            } => write!(
                f,
                "commutativity at n = {level}, letter {letter}: tau side {lhs}, sigma side {rhs}"
            ),
            PremorphismViolation::TauTailInconsistent { level, repeats } => {
                write!(f, "tau {level}: does not repeat tau {repeats} as the tail requires")
            }
            PremorphismViolation::NotCofinal => write!(f, "scale is bounded"),
        }
    }
}

/// Result of [`Premorphism::validate`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PremorphismReport {
    pub violations: Vec<PremorphismViolation>,
    /// Commutativity was checked for `n` in `0..checked`.
    pub checked: usize,
    /// Whether the checked range covers every `n` (all data periodic).
    pub complete: bool,
}

impl PremorphismReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Premorphism {
    pub fn new(
        b1: OrderedBratteliDiagram,
        b2: OrderedBratteliDiagram,
        scale: IndexSeq,
        taus: Vec<Morphism>,
        tau_tail: Option<Tail>,
    ) -> Result<Self, PremorphismError> {
        scale.check_scale()?;
        if let Some(t) = tau_tail {
            if t.start == 0 || t.period == 0 || t.start + t.period > taus.len() + 1 {
                return Err(PremorphismError::BadTauTail {
                    start: t.start,
                    period: t.period,
                    count: taus.len(),
                });
            }
        }
        let f = Premorphism {
            b1,
            b2,
            scale,
            taus,
            tau_tail,
        };
        let (bound, _) = f.check_range();
        for n in 1..=bound.max(f.taus.len()) {
            let Ok(tau) = f.tau(n) else { break };
            let Some(fnn) = f.scale.get(n) else { break };
            let (Ok(w), Ok(v)) = (f.b2.level_size(fnn), f.b1.level_size(n)) else {
                break;
            };
            if tau.domain_len() != w {
                return Err(PremorphismError::TauShape {
                    level: n,
                    scale_level: fnn,
                    expected: w,
                    found: tau.domain_len(),
                });
            }
            if let Some(letter) = tau.max_letter().filter(|&a| a >= v) {
                return Err(PremorphismError::TauLetter { level: n, letter });
            }
        }
        Ok(f)
    }

    pub fn b1(&self) -> &OrderedBratteliDiagram {
        &self.b1
    }

    pub fn b2(&self) -> &OrderedBratteliDiagram {
        &self.b2
    }

    pub fn scale(&self) -> &IndexSeq {
        &self.scale
    }

    pub fn represented_taus(&self) -> &[Morphism] {
        &self.taus
    }

    pub fn tau_tail(&self) -> Option<Tail> {
        self.tau_tail
    }

    pub fn f(&self, n: usize) -> Result<usize, PremorphismError> {
        self.scale.get(n).ok_or(PremorphismError::ScaleOutOfRange(n))
    }

    /// `τ_n`; `τ_0` is the identity on the root.
    pub fn tau(&self, n: usize) -> Result<Morphism, PremorphismError> {
        if n == 0 {
            return Ok(Morphism::identity(1));
        }
        let i = if n <= self.taus.len() {
            n
        } else {
            let t = self.tau_tail.ok_or(PremorphismError::TauOutOfRange(n))?;
            t.start + (n - t.start) % t.period
        };
        Ok(self.taus[i - 1].clone())
    }

    fn tau_periodicity(&self) -> Option<Periodicity> {
        self.tau_tail.map(|t| Periodicity {
            start: self.taus.len() + 1,
            period: t.period,
        })
    }

    /// Periodicity (in `n`) of the B2 segment `[f_n, f_{n+1}]`.
    fn segment_periodicity(&self) -> Option<Periodicity> {
        let step = self.scale.step()?;
        if step.shift == 0 {
            // Eventually constant: every later segment is an identity.
            return Some(Periodicity {
                start: self.scale.head().len(),
                period: step.lag,
            });
        }
        let tail = self.b2.tail()?;
        let mut start = self.scale.head().len();
        while self.scale.get(start).unwrap() <= self.b2.depth() + 1 {
            start += 1;
        }
        let period = step.lag * (tail.period / num_integer::gcd(step.shift, tail.period));
        Some(Periodicity { start, period })
    }

    fn diagram_periodicity(d: &OrderedBratteliDiagram) -> Option<Periodicity> {
        d.tail().map(|t| Periodicity {
            start: d.depth() + 2,
            period: t.period,
        })
    }

    /// Joint periodicity of everything the commutativity check at `n` reads.
    pub fn periodicity(&self) -> Option<Periodicity> {
        join_all([
            Self::diagram_periodicity(&self.b1),
            self.tau_periodicity(),
            self.segment_periodicity(),
        ])
    }

    /// `(bound, complete)`: commutativity is checkable for `n < bound`.
    fn check_range(&self) -> (usize, bool) {
        if let Some(p) = self.periodicity() {
            return (p.horizon(), true);
        }
        let mut n = 0;
        loop {
            let ok = self.b1.has_level(n + 1)
                && self.tau(n + 1).is_ok()
                && self.scale.get(n + 1).is_some_and(|x| self.b2.has_level(x));
            if !ok {
                return (n, false);
            }
            n += 1;
        }
    }

    /// `τ_n ∘ σ^{B2}_{[f_n, f_{n+1}]}`, the left side of the square at `n`.
    pub fn tau_side(&self, n: usize) -> Result<Morphism, PremorphismError> {
        let seg = self.b2.compose(self.f(n)?, self.f(n + 1)?)?;
        Ok(self.tau(n)?.after(&seg))
    }

    /// `σ^{B1}_{n+1} ∘ τ_{n+1}`, the right side of the square at `n`.
    pub fn sigma_side(&self, n: usize) -> Result<Morphism, PremorphismError> {
        Ok(self.b1.morphism(n + 1)?.after(&self.tau(n + 1)?))
    }

    /// Checks nonempty images, surjectivity onto each `V_n`, the tau tail
    /// and ordered commutativity at every `n` in the prefix plus one joint
    /// period.
    pub fn validate(&self) -> PremorphismReport {
        let mut violations = Vec::new();
        let (bound, complete) = self.check_range();
        if !self.scale.is_cofinal() && self.scale.step().is_some() {
            violations.push(PremorphismViolation::NotCofinal);
        }
        if let Some(t) = self.tau_tail {
            for n in t.start + t.period..=self.taus.len() {
                let r = t.start + (n - t.start) % t.period;
                if self.taus[n - 1] != self.taus[r - 1] {
                    violations.push(PremorphismViolation::TauTailInconsistent { level: n, repeats: r });
                }
            }
        }
        for n in 1..=bound {
            let (Ok(tau), Ok(v)) = (self.tau(n), self.b1.alphabet(n)) else {
                continue;
            };
            let w = self.f(n).ok().and_then(|x| self.b2.alphabet(x).ok());
            for (i, img) in tau.images().iter().enumerate() {
                if img.is_empty() {
                    violations.push(PremorphismViolation::EmptyImage {
                        level: n,
                        letter: w.map_or_else(|| i.to_string(), |a| a.name(i).to_string()),
                    });
                }
            }
            for a in tau.unused(v.len()) {
                violations.push(PremorphismViolation::UnusedLetter {
                    level: n,
                    letter: v.name(a).to_string(),
                });
            }
        }
        for n in 0..bound {
            if let Some(v) = self.square_violation(n) {
                violations.push(v);
            }
        }
        PremorphismReport {
            violations,
            checked: bound,
            complete,
        }
    }

    fn square_violation(&self, n: usize) -> Option<PremorphismViolation> {
        let lhs = self.tau_side(n).ok()?;
        let rhs = self.sigma_side(n).ok()?;
        let v = self.b1.alphabet(n).ok()?;
        let w = self.b2.alphabet(self.f(n + 1).ok()?).ok()?;
        (0..lhs.domain_len())
            .find(|&a| lhs.image(a) != rhs.image(a))
            .map(|a| PremorphismViolation::Commutativity {
                level: n,
                letter: w.name(a).to_string(),
                lhs: v.render(lhs.image(a)),
                rhs: v.render(rhs.image(a)),
            })
    }

    /// Same premorphism with `f_n = n`, obtained by telescoping B2 along a
    /// strictly increasing subsequence of the scale (and B1 along the
    /// matching indices when the scale repeats values).
    pub fn normalize_scale(&self) -> Result<Premorphism, PremorphismError> {
        if self.scale.is_identity() {
            return Ok(self.clone());
        }
        let picks = self.normalizing_spec()?;
        let b1 = telescope(&self.b1, &picks)?;
        let b2 = telescope(&self.b2, &self.scale.compose(&picks))?;
        let (taus, tau_tail) = self.sample_taus(&picks)?;
        Premorphism::new(b1, b2, IndexSeq::identity(), taus, tau_tail)
    }

    /// The telescoping of B1 performed by [`Premorphism::normalize_scale`];
    /// B2 is telescoped along `scale ∘ spec`.
    pub fn normalizing_spec(&self) -> Result<IndexSeq, PremorphismError> {
        if self.scale.is_identity() {
            return Ok(IndexSeq::identity());
        }
        self.scale_subsequence()
    }

    /// Telescopes both diagrams of a normalized premorphism along `spec`,
    /// keeping `τ_{spec_k}` at level `k`.
    pub fn telescope_along(&self, spec: &IndexSeq) -> Result<Premorphism, PremorphismError> {
        assert!(self.scale.is_identity(), "telescope_along needs a normalized scale");
        let b1 = telescope(&self.b1, spec)?;
        let b2 = telescope(&self.b2, spec)?;
        let (taus, tau_tail) = self.sample_taus(spec)?;
        Premorphism::new(b1, b2, IndexSeq::identity(), taus, tau_tail)
    }

    /// Normalized premorphism from B1 to B2 telescoped along `0, 2, 3, ...`
    /// with `τ'_n = σ^{B1}_{n+1} ∘ τ_{n+1}`. When every `σ^{B1}_{n+1}` is
    /// positive, every `τ'_n(w)` contains every letter of `V_n`.
    pub fn shift(&self) -> Result<Premorphism, PremorphismError> {
        assert!(self.scale.is_identity(), "shift needs a normalized scale");
        let spec = IndexSeq::new(vec![0, 2], Some(Step { lag: 1, shift: 1 }))?;
        let b2 = telescope(&self.b2, &spec)?;
        let period = join_all([
            self.b1.tail().map(|t| Periodicity {
                start: self.b1.depth() + 1,
                period: t.period,
            }),
            self.tau_tail.map(|t| Periodicity {
                start: self.taus.len().max(1),
                period: t.period,
            }),
        ]);
        let (taus, tau_tail) = tabulate(period, |k| Ok(self.b1.morphism(k + 1)?.after(&self.tau(k + 1)?)))?;
        Premorphism::new(self.b1.clone(), b2, IndexSeq::identity(), taus, tau_tail)
    }

    /// `τ_{picks_k}` for `k >= 1`, with a tail when both are periodic.
    fn sample_taus(&self, picks: &IndexSeq) -> Result<(Vec<Morphism>, Option<Tail>), PremorphismError> {
        let period = match (picks.step(), self.tau_periodicity()) {
            (Some(step), Some(tp)) if step.shift > 0 => {
                let period = step.lag * (tp.period / num_integer::gcd(step.shift, tp.period));
                let mut settled = picks.head().len();
                while picks.get(settled).unwrap() < tp.start {
                    settled += 1;
                }
                Some(Periodicity { start: settled, period })
            }
            _ => None,
        };
        tabulate(period, |k| {
            let n = picks.get(k).ok_or(PremorphismError::ScaleOutOfRange(k))?;
            self.tau(n)
        })
    }

    /// `(bound, complete)`: commutativity is checkable for `n < bound`.
    pub(crate) fn checkable(&self) -> (usize, bool) {
        self.check_range()
    }

    /// `n_0 = 0`, `n_{k+1}` = least `n > n_k` with `f_n > f_{n_k}`.
    fn scale_subsequence(&self) -> Result<IndexSeq, PremorphismError> {
        let scale = &self.scale;
        let next = |n: usize| -> Option<usize> {
            let base = scale.get(n)?;
            (n + 1..)
                .map_while(|m| scale.get(m).map(|x| (m, x)))
                .find(|&(_, x)| x > base)
                .map(|(m, _)| m)
        };
        let Some(step) = scale.step() else {
            let mut picks = vec![0];
            while let Some(m) = next(*picks.last().unwrap()) {
                picks.push(m);
            }
            return Ok(IndexSeq::finite(picks)?);
        };
        if step.shift == 0 {
            return Err(PremorphismError::NonCofinal);
        }
        // Past the head, next(n + lag) = next(n) + lag, so the picks repeat
        // as soon as a phase modulo the lag comes back.
        let h = scale.head().len();
        let mut picks = vec![0usize];
        let mut seen: HashMap<usize, usize> = HashMap::new();
        loop {
            let n = *picks.last().unwrap();
            if n >= h {
                if let Some(&i) = seen.get(&((n - h) % step.lag)) {
                    let s = Step {
                        lag: picks.len() - 1 - i,
                        shift: n - picks[i],
                    };
                    let seq = IndexSeq::new(picks.clone(), Some(s))?;
                    return Ok(IndexSeq::compress(&seq.prefix(picks.len() + 2 * s.lag), s));
                }
                seen.insert((n - h) % step.lag, picks.len() - 1);
            }
            picks.push(next(n).expect("cofinal scale"));
        }
    }
}

/// Taus `gen(1), gen(2), ...`. With a periodicity (the family repeats
/// from `start` on), enough terms are generated to detect the shortest tail;
/// otherwise terms are taken until `gen` fails.
fn tabulate<F>(period: Option<Periodicity>, gen: F) -> Result<(Vec<Morphism>, Option<Tail>), PremorphismError>
where
    F: Fn(usize) -> Result<Morphism, PremorphismError>,
{
    let Some(p) = period else {
        return Ok(((1..).map_while(|k| gen(k).ok()).collect(), None));
    };
    let count = p.start.max(1) + 2 * p.period;
    let taus = (1..=count).map(gen).collect::<Result<Vec<_>, _>>()?;
    Ok(match detect_tail(&taus, 1, p.period) {
        Some(t) => (
            taus[..t.start + t.period - 1].to_vec(),
            Some(Tail {
                start: t.start,
                period: t.period,
            }),
        ),
        None => (taus, None),
    })
}

/// Builds `τ_n` from edge-list data `(source in V_n, range in
/// W_{f_n}, position among the edges into the range)`.
pub fn tau_from_edge_list(
    source: &Alphabet,
    range: &Alphabet,
    edges: &[(String, String, usize)],
) -> Result<Morphism, EdgeListError> {
    let mut slots: Vec<Vec<Option<Letter>>> = vec![Vec::new(); range.len()];
    for (src, dst, order) in edges {
        let a = source
            .letter(src)
            .ok_or_else(|| EdgeListError::UnknownLetter(src.clone()))?;
        let w = range
            .letter(dst)
            .ok_or_else(|| EdgeListError::UnknownLetter(dst.clone()))?;
        let slot = &mut slots[w];
        if slot.len() <= *order {
            slot.resize(order + 1, None);
        }
        if slot[*order].replace(a).is_some() {
            return Err(EdgeListError::Duplicate {
                letter: dst.clone(),
                order: *order,
            });
        }
    }
    let mut images = Vec::with_capacity(range.len());
    for (w, slot) in slots.into_iter().enumerate() {
        if slot.is_empty() {
            return Err(EdgeListError::EmptyRange(range.name(w).to_string()));
        }
        let img: Option<Vec<Letter>> = slot.iter().copied().collect();
        match img {
            Some(img) => images.push(img),
            None => {
                let missing = slot.iter().position(Option::is_none).unwrap();
                return Err(EdgeListError::Gap {
                    letter: range.name(w).to_string(),
                    missing,
                });
            }
        }
    }
    Ok(Morphism::new(images))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EdgeListError {
    #[error("unknown letter {0}")]
    UnknownLetter(String),
    #[error("two edges into {letter} have order index {order}")]
    Duplicate { letter: String, order: usize },
    #[error("edges into {letter} skip order index {missing}")]
    Gap { letter: String, missing: usize },
    #[error("no edge ends at {0}")]
    EmptyRange(String),
}

/// Image of a B2 path `p` of depth `f_n` under the induced factor map: the
/// B1 path of depth `n` with the same ordinal in the composite order, where
/// the position inside `τ_n(w)` is the dominant coordinate.
pub fn factor_image<C: Count>(f: &Premorphism, p: &PathPrefix, n: usize) -> Result<PathPrefix, PremorphismError> {
    let fn_ = f.f(n)?;
    if p.depth() != fn_ {
        return Err(PremorphismError::PathDepth {
            n,
            expected: fn_,
            found: p.depth(),
        });
    }
    p.check(f.b2())?;
    let w = p.range().unwrap_or(0);
    let mut j: C = path_ordinal(f.b2(), p)?;
    let heights = f.b1().path_counts::<C>(n)?;
    let tau = f.tau(n)?;
    for &v in tau.image(w) {
        let h = &heights[v];
        if j < *h {
            return Ok(path_from_ordinal(f.b1(), n, v, &j)?);
        }
        j = j.checked_sub(h).expect("j >= h");
    }
    // Only reachable when commutativity fails.
    let total = heights.iter().try_fold(C::zero(), |acc, h| scalar::add(&acc, h));
    Err(PremorphismError::Path(PathError::OrdinalOutOfRange {
        ordinal: j.to_string(),
        count: total.map(|t| t.to_string()).unwrap_or_default(),
    }))
}
