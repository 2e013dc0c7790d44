//! Rank reduction: an equivalent diagram whose levels are codes with at
//! most three words per letter of the target diagram.
//!
//! The premorphism is first telescoped until B1 is positive and properly
//! ordered at every step and every `τ_n(w)` meets every letter of `V_n`.
//! Then, along a chain `1 = ℓ_1 < ℓ_2 < ...`, each `σ_{[ℓ_k, ℓ_{k+1}]}`
//! is factored through a small code `C_{ℓ_k}` and the codes are inserted as
//! new levels. Telescoping the result along its even levels keeps only the
//! codes.

use std::collections::HashMap;
use std::ops::Range;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::diagram::{DiagramError, OrderedBratteliDiagram};
use crate::morphism::Morphism;
use crate::periodic::{IndexSeq, Periodicity, Step};
use crate::premorphism::{Premorphism, PremorphismError};
use crate::transforms::{
    common_ends, diagram_rank, greedy_spec, pack_names, telescope, verify_equivalence_certificate, CertVerdict,
    EquivalenceCertificate, TransformError, INTERLEAVED_EVEN,
};
use crate::words::{factorize_greedy, minimal_generating_subset, three_word_basis, BasisCase, BasisError, CodeError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RankError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Premorphism(#[from] PremorphismError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("premorphism is not valid: {0}")]
    Invalid(String),
    #[error("rank reduction needs eventually periodic diagrams, taus and scale")]
    NotPeriodic,
    #[error("{stage}: nothing found within {max_depth} levels past level {level}")]
    Inconclusive {
        stage: &'static str,
        level: usize,
        max_depth: usize,
    },
    #[error("level {level}: the construction needs {letters} letters of composite images, over the budget")]
    TooLarge { level: usize, letters: u64 },
    #[error("assumption violated during the construction: {0}")]
    AssumptionDrift(String),
    #[error("the emitted certificate does not verify: {0}")]
    Unsound(String),
}

/// A normalized premorphism satisfying the four working assumptions, with
/// the telescopings that produced it.
#[derive(Clone, Debug)]
pub struct PreparedTriple {
    pub premorphism: Premorphism,
    /// Original B1 telescoped along `b1_spec` is `premorphism.b1()`.
    pub b1_spec: IndexSeq,
    /// Original B2 telescoped along `b2_spec` is `premorphism.b2()`.
    pub b2_spec: IndexSeq,
    /// Whether `τ` had to be shifted one level to reach every letter.
    pub shifted: bool,
    /// `(v_min, v_max)` of levels `0..extremes.len()`.
    pub extremes: Vec<(Letter, Letter)>,
    pub periodicity: Periodicity,
}

impl PreparedTriple {
    pub fn b1(&self) -> &OrderedBratteliDiagram {
        self.premorphism.b1()
    }

    pub fn b2(&self) -> &OrderedBratteliDiagram {
        self.premorphism.b2()
    }

    /// `(v_min^n, v_max^n)`: the common first and last letters of `σ_{n+1}`.
    pub fn extreme(&self, n: usize) -> (Letter, Letter) {
        let p = self.periodicity;
        let k = if n < self.extremes.len() {
            n
        } else {
            p.start + (n - p.start) % p.period
        };
        self.extremes[k]
    }

    /// Rechecks positivity, proper order, level sizes and full connection on
    /// levels `1..horizon` (`0..horizon` for the first two).
    pub fn check(&self) -> Result<(), RankError> {
        let f = &self.premorphism;
        let b1 = f.b1();
        for n in 0..self.periodicity.horizon() + 1 {
            let m = b1.morphism(n + 1)?;
            let below = b1.level_size(n)?;
            if let Some(v) = (0..m.domain_len()).find(|&v| misses(m.image(v), below)) {
                return Err(RankError::AssumptionDrift(format!(
                    "σ_{} of letter {} misses a letter of level {n}",
                    n + 1,
                    b1.alphabet(n + 1)?.name(v)
                )));
            }
            if common_ends(m) != Some(self.extreme(n)) {
                return Err(RankError::AssumptionDrift(format!(
                    "σ_{} is not properly ordered",
                    n + 1
                )));
            }
            if n >= 1 {
                if b1.level_size(n)? < 2 {
                    return Err(RankError::AssumptionDrift(format!("level {n} has a single letter")));
                }
                let tau = f.tau(n)?;
                if let Some(w) = (0..tau.domain_len()).find(|&w| misses(tau.image(w), below)) {
                    return Err(RankError::AssumptionDrift(format!(
                        "τ_{n} of letter {} misses a letter of level {n}",
                        f.b2().alphabet(n)?.name(w)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Whether some letter below `size` is missing from `word`.
fn misses(word: &[Letter], size: usize) -> bool {
    let mut seen = vec![false; size];
    for &a in word {
        seen[a] = true;
    }
    seen.contains(&false)
}

fn full_connection(f: &Premorphism, bound: usize) -> Result<bool, RankError> {
    for n in 1..bound {
        let tau = f.tau(n)?;
        let size = f.b1().level_size(n)?;
        if (0..tau.domain_len()).any(|w| misses(tau.image(w), size)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Telescopes a valid, eventually periodic premorphism until B1 is positive
/// and properly ordered at every step with at least two letters per level,
/// `f_n = n`, and every `τ_n(w)` contains every letter of `V_n`.
pub fn preprocess_assumptions(f: &Premorphism, max_depth: usize) -> Result<PreparedTriple, RankError> {
    let report = f.validate();
    if let Some(v) = report.violations.first() {
        return Err(RankError::Invalid(v.to_string()));
    }
    if f.periodicity().is_none() {
        return Err(RankError::NotPeriodic);
    }
    let picks = f.normalizing_spec()?;
    let g = f.normalize_scale()?;
    let b2_picks = f.scale().compose(&picks);
    let spec = greedy_spec(g.b1(), max_depth, true, 2).map_err(|e| match e {
        TransformError::Inconclusive(_) => RankError::Inconclusive {
            stage: "positive proper telescoping",
            level: 0,
            max_depth,
        },
        e => e.into(),
    })?;
    let g = g.telescope_along(&spec)?;
    let b1_spec = picks.compose(&spec);
    let mut b2_spec = b2_picks.compose(&spec);
    let horizon = g.periodicity().ok_or(RankError::NotPeriodic)?.horizon();
    let shifted = !full_connection(&g, horizon + 1)?;
    let g = if shifted {
        let shift = IndexSeq::new(vec![0, 2], Some(Step { lag: 1, shift: 1 })).expect("valid spec");
        b2_spec = b2_spec.compose(&shift);
        g.shift()?
    } else {
        g
    };
    let periodicity = g.periodicity().ok_or(RankError::NotPeriodic)?;
    let mut extremes = Vec::new();
    for n in 0..periodicity.horizon() + 1 {
        let m = g.b1().morphism(n + 1)?;
        extremes.push(
            common_ends(m).ok_or_else(|| {
                RankError::AssumptionDrift(format!("σ_{} has no common first and last letters", n + 1))
            })?,
        );
    }
    let t = PreparedTriple {
        premorphism: g,
        b1_spec,
        b2_spec,
        shifted,
        extremes,
        periodicity,
    };
    t.check()?;
    Ok(t)
}

/// A boundary between two consecutive blocks `σ_{[n,ℓ]}(v_k)` that falls
/// strictly inside some `z_j = τ_n(w_j)`, splitting it as `s t`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cut {
    /// The boundary lies after block `k` (1-based).
    pub after: usize,
    /// Index `j` (1-based) of the split `z_j`.
    pub z: usize,
    /// The letter `w_j` of `W_n`.
    pub letter: Letter,
    pub s: Word,
    pub t: Word,
}

/// Code `C_n` over `V_n` through which every `σ_{[n,ℓ]}(v)` factorizes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoverBasis {
    pub n: usize,
    pub ell: usize,
    /// First letter of `W_ℓ`.
    pub w0: Letter,
    pub code: Vec<Word>,
    /// Factorization of `σ_{[n,ℓ]}(v)` over `code`, for each `v` in `V_ℓ`.
    pub factorizations: Vec<Vec<usize>>,
    pub cuts: Vec<Cut>,
    /// `T_k` as ranges of `z` indices (0-based, end exclusive).
    pub blocks: Vec<Range<usize>>,
    /// For each `w` of `W_n`: how its words were produced (`None` when it
    /// was not split and contributes `τ_n(w)` itself).
    pub cases: Vec<Option<BasisCase>>,
}

/// Most letters [`cover_basis`] will hold in composite images at once.
pub const WORD_BUDGET: u64 = 1 << 24;

/// Letters in `σ_{[n,ℓ-1]}`, `σ_{[n,ℓ]}` and `σ^{B2}_{[n,ℓ]}(w_0)`, given
/// `upper[v] = |σ_{[n,ℓ-1]}(v)|`; saturates instead of overflowing.
fn composite_letters(t: &PreparedTriple, n: usize, ell: usize, upper: &[u64]) -> u64 {
    let f = &t.premorphism;
    let mut total = upper.iter().fold(0u64, |a, &b| a.saturating_add(b));
    if let Ok(m) = f.b1().morphism(ell) {
        for img in m.images() {
            total = img.iter().fold(total, |a, &v| a.saturating_add(upper[v]));
        }
    }
    let mut w = vec![1u64; f.b2().level_size(n).unwrap_or(0)];
    for m in n + 1..=ell {
        let Ok(sigma) = f.b2().morphism(m) else { return u64::MAX };
        w = sigma
            .images()
            .iter()
            .map(|img| img.iter().fold(0u64, |a, &x| a.saturating_add(w[x])))
            .collect();
    }
    total.saturating_add(w.first().copied().unwrap_or(0))
}

/// Builds `C_n` for `n >= 1` on a prepared triple.
///
/// `ℓ` is the smallest level past `n + 1` (at most `max_depth` further)
/// where `σ_{[n,ℓ-1]}` of both extreme letters of level `ℓ - 1` is longer
/// than every `τ_n(w)`.
pub fn cover_basis(t: &PreparedTriple, n: usize, max_depth: usize) -> Result<CoverBasis, RankError> {
    assert!(n >= 1, "cover_basis starts at level 1");
    let f = &t.premorphism;
    let (b1, b2) = (f.b1(), f.b2());
    let tau_n = f.tau(n)?;
    let longest = tau_n.images().iter().map(Vec::len).max().unwrap_or(0);

    let mut lengths: Vec<u64> = vec![1; b1.level_size(n)?];
    let mut ell = None;
    for m in n + 1..=n + max_depth {
        lengths = b1
            .morphism(m)?
            .weighted_lengths(&lengths)
            .map_err(|e| RankError::Diagram(e.into()))?;
        let (lo, hi) = t.extreme(m);
        if lengths[lo] > longest as u64 && lengths[hi] > longest as u64 {
            ell = Some(m + 1);
            break;
        }
    }
    let ell = ell.ok_or(RankError::Inconclusive {
        stage: "length condition",
        level: n,
        max_depth,
    })?;

    let letters = composite_letters(t, n, ell, &lengths);
    if letters > WORD_BUDGET {
        return Err(RankError::TooLarge { level: n, letters });
    }
    let upper = b1.compose(n, ell - 1)?;
    let (lo, hi) = t.extreme(ell - 1);
    let s_word = upper.image(hi).to_vec();
    let t_word = upper.image(lo).to_vec();
    let sigma = upper.after(b1.morphism(ell)?);

    let w0 = 0;
    let vs = f.tau(ell)?.image(w0).to_vec();
    if misses(&vs, b1.level_size(ell)?) {
        return Err(RankError::AssumptionDrift(format!(
            "τ_{ell} of the first letter misses a letter"
        )));
    }
    let ws = b2.compose(n, ell)?.image(w0).to_vec();

    // Both segmentations of σ_[n,ℓ](τ_ℓ(w_0)) = τ_n(σ^B2_[n,ℓ](w_0)) are
    // tracked by their boundaries only; the word itself can be huge.
    let mut vb = vec![0usize];
    for &v in &vs {
        let block = sigma.image(v);
        if !block.starts_with(&t_word) || !block.ends_with(&s_word) {
            return Err(RankError::AssumptionDrift(format!(
                "σ_[{n},{ell}] of a letter does not start and end with the extreme images"
            )));
        }
        vb.push(vb.last().unwrap() + block.len());
    }
    let mut zb = vec![0usize];
    for &w in &ws {
        zb.push(zb.last().unwrap() + tau_n.image(w).len());
    }
    if zb.last() != vb.last() {
        return Err(RankError::AssumptionDrift(format!(
            "commutativity fails between levels {n} and {ell}"
        )));
    }

    let mut cuts = Vec::new();
    let mut blocks = Vec::new();
    let mut j = 0;
    let mut block_start = 0;
    for k in 1..vs.len() {
        let p = vb[k];
        while zb[j + 1] <= p {
            j += 1;
        }
        blocks.push(block_start..j);
        if zb[j] == p {
            block_start = j;
        } else {
            block_start = j + 1;
            let (s, t) = tau_n.image(ws[j]).split_at(p - zb[j]);
            cuts.push(Cut {
                after: k,
                z: j + 1,
                letter: ws[j],
                s: s.to_vec(),
                t: t.to_vec(),
            });
        }
    }
    blocks.push(block_start..ws.len());

    let w_count = b2.level_size(n)?;
    let mut union: Vec<Word> = Vec::new();
    let mut cases = Vec::with_capacity(w_count);
    for w in 0..w_count {
        let pairs: Vec<(Word, Word)> = cuts
            .iter()
            .filter(|c| c.letter == w)
            .map(|c| (c.s.clone(), c.t.clone()))
            .collect();
        let words = if pairs.is_empty() {
            cases.push(None);
            vec![tau_n.image(w).to_vec()]
        } else {
            let basis = three_word_basis(tau_n.image(w), &pairs, &s_word, &t_word)?;
            cases.push(Some(basis.case));
            basis.words
        };
        for x in words {
            if !union.contains(&x) {
                union.push(x);
            }
        }
    }
    let targets = sigma.images();
    let kept = minimal_generating_subset(&union, targets)?;
    let code: Vec<Word> = kept.into_iter().map(|i| union[i].clone()).collect();
    if code.len() > 3 * w_count {
        return Err(RankError::AssumptionDrift(format!(
            "code at level {n} has {} words for {w_count} letters",
            code.len()
        )));
    }
    let factorizations = targets
        .iter()
        .map(|x| factorize_greedy(x, &code))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| RankError::AssumptionDrift(format!("code at level {n} lost a target")))?;
    Ok(CoverBasis {
        n,
        ell,
        w0,
        code,
        factorizations,
        cuts,
        blocks,
        cases,
    })
}

/// Output of [`reduce_rank`].
#[derive(Clone, Debug)]
pub struct RankReduction {
    /// `None` for the rank-one shortcut.
    pub prepared: Option<PreparedTriple>,
    /// `0 = ℓ_0, 1 = ℓ_1, ℓ_2, ...` on the prepared B1.
    pub chain: IndexSeq,
    /// Bases for `ℓ_1, ℓ_2, ...` up to the first repeated phase.
    pub bases: Vec<CoverBasis>,
    /// Levels `V_0, V_{ℓ_1}, C_{ℓ_1}, V_{ℓ_2}, C_{ℓ_2}, ...`.
    pub interleaved: OrderedBratteliDiagram,
    /// `interleaved` telescoped along its even levels.
    pub reduced: OrderedBratteliDiagram,
    /// Odd levels of `interleaved` are the original B1 along this spec.
    pub odd_spec: IndexSeq,
}

impl RankReduction {
    pub fn is_rank_one(&self) -> bool {
        self.prepared.is_none()
    }

    /// Certificate relating the original B1 (at `b1_path`) and the reduced
    /// diagram (at `reduced_path`).
    pub fn certificate(&self, b1_path: &str, reduced_path: &str) -> EquivalenceCertificate {
        EquivalenceCertificate {
            interleaved: self.interleaved.clone(),
            odd_ref: b1_path.to_string(),
            even_ref: reduced_path.to_string(),
            odd_spec: self.odd_spec.clone(),
            even_spec: IndexSeq::identity(),
        }
    }
}

/// Builds a diagram equivalent to B1 with rank at most three times the rank
/// of B2, and checks its certificate before returning.
pub fn reduce_rank(f: &Premorphism, max_depth: usize) -> Result<RankReduction, RankError> {
    if diagram_rank(f.b1()) == 1 {
        let cert = EquivalenceCertificate::identity(f.b1(), "")?;
        return Ok(RankReduction {
            prepared: None,
            chain: IndexSeq::identity(),
            bases: Vec::new(),
            interleaved: cert.interleaved,
            reduced: f.b1().clone(),
            odd_spec: IndexSeq::identity(),
        });
    }
    let prepared = preprocess_assumptions(f, max_depth)?;
    let per = prepared.periodicity;

    let mut chain = vec![0usize, 1];
    let mut bases: Vec<CoverBasis> = Vec::new();
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let (repeat_from, step) = loop {
        let k = chain.len() - 1;
        let n = chain[k];
        if n >= per.start {
            let phase = (n - per.start) % per.period;
            if let Some(&i) = seen.get(&phase) {
                break (
                    i,
                    Step {
                        lag: k - i,
                        shift: n - chain[i],
                    },
                );
            }
            seen.insert(phase, k);
        }
        let cb = cover_basis(&prepared, n, max_depth)?;
        chain.push(cb.ell);
        bases.push(cb);
    };
    let spec = IndexSeq::new(chain.clone(), Some(step)).map_err(TransformError::from)?;
    // Basis for chain index k >= 1.
    let basis = |k: usize| -> &CoverBasis {
        let r = if k < chain.len() - 1 {
            k
        } else {
            repeat_from + (k - repeat_from) % step.lag
        };
        &bases[r - 1]
    };

    let b1 = prepared.b1();
    let rounds = repeat_from + 2 * step.lag + 1;
    let mut levels: Vec<Alphabet> = vec![b1.alphabet(0)?.clone(), b1.alphabet(1)?.clone()];
    let mut morphisms: Vec<Morphism> = vec![b1.morphism(1)?.clone()];
    for k in 1..=rounds {
        let cb = basis(k);
        let here = b1.alphabet(spec.get(k).unwrap())?;
        levels.push(Alphabet::new(pack_names(here, &cb.code)).expect("pack names are valid tokens"));
        morphisms.push(Morphism::new(cb.code.clone()));
        levels.push(b1.alphabet(spec.get(k + 1).unwrap())?.clone());
        morphisms.push(Morphism::new(cb.factorizations.clone()));
    }
    let interleaved = OrderedBratteliDiagram::with_detected_tail(levels, morphisms, 2 * step.lag)?;
    let reduced = telescope(&interleaved, &IndexSeq::parse(INTERLEAVED_EVEN).expect("valid spec"))?;
    let odd_spec = prepared.b1_spec.compose(&spec);

    let out = RankReduction {
        prepared: Some(prepared),
        chain: IndexSeq::compress(&spec.prefix(chain.len() + 2 * step.lag), step),
        bases,
        interleaved,
        reduced,
        odd_spec,
    };
    let cert = out.certificate("", "");
    match verify_equivalence_certificate(&cert, f.b1(), &out.reduced)? {
        CertVerdict::Verified { .. } => Ok(out),
        CertVerdict::Counterexample { side, mismatch } => Err(RankError::Unsound(format!("{side} side: {mismatch:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::premorphism::tests::chacon_premorphism;

    #[test]
    fn chacon_preprocessing_is_trivial() {
        let t = preprocess_assumptions(&chacon_premorphism(), 4).unwrap();
        assert!(t.b1_spec.is_identity());
        assert!(!t.shifted);
        assert_eq!(t.extreme(7), (0, 1));
    }

    #[test]
    fn chacon_cover_basis() {
        let t = preprocess_assumptions(&chacon_premorphism(), 4).unwrap();
        let cb = cover_basis(&t, 1, 6).unwrap();
        // 3^{ℓ-2} > 9 first holds at ℓ = 5.
        assert_eq!(cb.ell, 5);
        assert!(cb.code.len() <= 9);
        let sigma = t.b1().compose(1, 5).unwrap();
        for (v, fac) in cb.factorizations.iter().enumerate() {
            assert_eq!(&crate::words::concat(&cb.code, fac), sigma.image(v));
        }
    }

    #[test]
    fn chacon_reduction_verifies() {
        let f = chacon_premorphism();
        let r = reduce_rank(&f, 6).unwrap();
        assert!(diagram_rank(&r.reduced) <= 9);
        assert_eq!(r.chain.to_string(), "0 1 tail +4");
        let cert = r.certificate("c.obd", "r.obd");
        assert!(verify_equivalence_certificate(&cert, f.b1(), &r.reduced)
            .unwrap()
            .is_verified());
    }

    #[test]
    fn short_search_is_inconclusive() {
        let t = preprocess_assumptions(&chacon_premorphism(), 4).unwrap();
        assert!(matches!(cover_basis(&t, 1, 2), Err(RankError::Inconclusive { .. })));
    }
}
