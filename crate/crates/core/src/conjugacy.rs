//! Conjugacy criterion: when the `τ_n`-images form an independent code
//! that generates B1 a few levels down, B1 and B2 interleave into one
//! diagram through bridge morphisms `G_n: V_{n+1} -> W_n^*`.

use std::collections::HashMap;
use std::fmt;

use crate::alphabet::{Letter, Word};
use crate::diagram::{DiagramError, OrderedBratteliDiagram};
use crate::morphism::Morphism;
use crate::periodic::{IndexSeq, Periodicity, Step};
use crate::premorphism::{Premorphism, PremorphismError};
use crate::transforms::{verify_equivalence_certificate, CertVerdict, EquivalenceCertificate, TransformError};
use crate::words::{factorize_greedy, is_independent, minimal_generating_subset, Independence};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConjugacyError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Premorphism(#[from] PremorphismError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("premorphism is not valid: {0}")]
    Invalid(String),
    #[error("bridge at level {level}, letter {letter}: {reason}")]
    PostconditionFailure {
        level: usize,
        letter: String,
        reason: String,
    },
    #[error("{needed} bridges are needed, only {found} given")]
    MissingBridges { needed: usize, found: usize },
    #[error("the emitted certificate does not verify: {0}")]
    Unsound(String),
}

/// Outcome of trying one `ℓ` at one level.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Generation {
    /// Every `σ_{[n,ℓ]}(v)` lies in `D_n^*` and no proper subset suffices.
    Generated,
    /// `σ_{[n,ℓ]}(letter)` does not factorize over `D_n`.
    Ungenerated { letter: String },
    /// The images factorize, but `D_n` minus `word` already generates them.
    NotMinimal { word: String },
}

/// The criterion at one level `n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LevelCheck {
    pub n: usize,
    /// Two letters of `W_n` with the same `τ_n`-image.
    pub duplicate: Option<(String, String)>,
    pub independence: Independence<Letter>,
    /// Each tried `ℓ` in increasing order.
    pub attempts: Vec<(usize, Generation)>,
}

impl LevelCheck {
    /// The `ℓ` for which the criterion holds, if any.
    pub fn ell(&self) -> Option<usize> {
        self.attempts
            .iter()
            .find(|(_, g)| *g == Generation::Generated)
            .map(|(l, _)| *l)
    }

    /// Failed for a reason that no larger `ℓ` can repair.
    pub fn refuted(&self) -> bool {
        self.duplicate.is_some()
            || !self.independence.is_independent()
            || self
                .attempts
                .iter()
                .any(|(_, g)| matches!(g, Generation::NotMinimal { .. }))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    /// The criterion holds at infinitely many levels (`complete`) or at some
    /// level of a finite input.
    Satisfied { complete: bool },
    /// Every level of one full period fails for good.
    Refuted,
    /// Some level ran out of `ℓ` candidates.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Satisfied { complete: true } => f.write_str("satisfied"),
            Verdict::Satisfied { complete: false } => f.write_str("satisfied (partial)"),
            Verdict::Refuted => f.write_str("refuted"),
            Verdict::Inconclusive => f.write_str("inconclusive"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CriterionReport {
    /// Checks for `n = 1, 2, ...`.
    pub levels: Vec<LevelCheck>,
    /// Periodicity of the levels (`levels[n - 1]` repeats from `start`).
    pub periodicity: Option<Periodicity>,
    pub verdict: Verdict,
}

impl CriterionReport {
    /// The check at any `n >= 1`, using periodicity past the table.
    pub fn level(&self, n: usize) -> Option<(usize, &LevelCheck)> {
        if n == 0 {
            return None;
        }
        if n <= self.levels.len() {
            return Some((n, &self.levels[n - 1]));
        }
        let p = self.periodicity?;
        let r = p.start + (n - p.start) % p.period;
        Some((r, &self.levels[r - 1]))
    }

    /// `ℓ` at level `n`, shifted from the table when `n` lies past it.
    pub fn ell(&self, n: usize) -> Option<usize> {
        let (r, check) = self.level(n)?;
        check.ell().map(|l| l - r + n)
    }
}

fn images_named(f: &Premorphism, n: usize) -> Result<(Vec<Word>, Option<(String, String)>), ConjugacyError> {
    let tau = f.tau(n)?;
    let w = f.b2().alphabet(n)?;
    let images = tau.images().to_vec();
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if images[i] == images[j] {
                return Ok((images, Some((w.name(i).to_string(), w.name(j).to_string()))));
            }
        }
    }
    Ok((images, None))
}

fn check_level(f: &Premorphism, n: usize, max_depth: usize) -> Result<LevelCheck, ConjugacyError> {
    let (d, duplicate) = images_named(f, n)?;
    let independence = is_independent(&d);
    let mut attempts = Vec::new();
    if duplicate.is_none() && independence.is_independent() {
        let v = f.b1().alphabet(n)?;
        for ell in n + 1..=n + max_depth {
            if !f.b1().has_level(ell) {
                break;
            }
            let sigma = f.b1().compose(n, ell)?;
            let above = f.b1().alphabet(ell)?;
            let outcome = match (0..sigma.domain_len()).find(|&a| factorize_greedy(sigma.image(a), &d).is_none()) {
                Some(a) => Generation::Ungenerated {
                    letter: above.name(a).to_string(),
                },
                None => {
                    let kept = minimal_generating_subset(&d, sigma.images()).expect("all images factorize");
                    match (0..d.len()).find(|i| !kept.contains(i)) {
                        Some(i) => Generation::NotMinimal { word: v.render(&d[i]) },
                        None => Generation::Generated,
                    }
                }
            };
            // A larger ℓ only helps when some image was not generated.
            let stop = !matches!(outcome, Generation::Ungenerated { .. });
            attempts.push((ell, outcome));
            if stop {
                break;
            }
        }
    }
    Ok(LevelCheck {
        n,
        duplicate,
        independence,
        attempts,
    })
}

/// Tests the criterion at every level `n >= 1` of a normalized premorphism
/// up to one joint period past the prefix, trying `ℓ` in `n+1 ..= n+max_depth`.
pub fn criterion_check(f: &Premorphism, max_depth: usize) -> Result<CriterionReport, ConjugacyError> {
    assert!(
        f.scale().is_identity(),
        "criterion_check needs a normalized premorphism"
    );
    let periodicity = f.periodicity();
    let bound = match periodicity {
        Some(p) => p.horizon(),
        None => {
            let (bound, _) = f.checkable();
            bound + 1
        }
    };
    let mut levels = Vec::new();
    for n in 1..bound {
        if f.tau(n).is_err() || !f.b1().has_level(n) {
            break;
        }
        levels.push(check_level(f, n, max_depth)?);
    }
    let window: &[LevelCheck] = match periodicity {
        Some(p) => &levels[p.start.max(1) - 1..],
        None => &levels,
    };
    let verdict = if window.iter().any(|c| c.ell().is_some()) {
        Verdict::Satisfied {
            complete: periodicity.is_some(),
        }
    } else if !window.is_empty() && window.iter().all(LevelCheck::refuted) {
        Verdict::Refuted
    } else {
        Verdict::Inconclusive
    };
    Ok(CriterionReport {
        levels,
        periodicity: periodicity.map(|p| Periodicity {
            start: p.start.max(1),
            period: p.period,
        }),
        verdict,
    })
}

/// `G_n`: `σ^{B1}_{n+1}(v)` read as a word over `W_n` through the unique
/// factorization over `D_n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BridgeMorphism {
    pub level: usize,
    pub morphism: Morphism,
}

/// Builds `G_n` on a premorphism where the criterion holds at `n` with
/// `ℓ = n + 1`, and checks `τ_n ∘ G_n = σ^{B1}_{n+1}`,
/// `G_n ∘ τ_{n+1} = σ^{B2}_{n+1}` and that every letter of `W_n` is used.
pub fn build_bridge(f: &Premorphism, n: usize) -> Result<BridgeMorphism, ConjugacyError> {
    let tau_n = f.tau(n)?;
    let d = tau_n.images();
    let sigma = f.b1().morphism(n + 1)?;
    let above = f.b1().alphabet(n + 1)?;
    let fail = |letter: String, reason: &str| ConjugacyError::PostconditionFailure {
        level: n,
        letter,
        reason: reason.to_string(),
    };
    if !is_independent(d).is_independent() {
        return Err(fail(String::new(), "τ-images are not independent"));
    }
    let mut images = Vec::with_capacity(sigma.domain_len());
    for v in 0..sigma.domain_len() {
        match factorize_greedy(sigma.image(v), d) {
            Some(fac) => images.push(fac),
            None => return Err(fail(above.name(v).to_string(), "image does not factorize over D_n")),
        }
    }
    let g = Morphism::new(images);
    if tau_n.after(&g) != *sigma {
        return Err(fail(String::new(), "τ_n ∘ G_n differs from σ^B1"));
    }
    let tau_next = f.tau(n + 1)?;
    let lhs = g.after(&tau_next);
    let rhs = f.b2().morphism(n + 1)?;
    if let Some(w) = (0..lhs.domain_len()).find(|&w| lhs.image(w) != rhs.image(w)) {
        return Err(fail(
            f.b2().alphabet(n + 1)?.name(w).to_string(),
            "G_n ∘ τ_{n+1} differs from σ^B2",
        ));
    }
    if let Some(&w) = g.unused(tau_n.domain_len()).first() {
        return Err(fail(
            f.b2().alphabet(n)?.name(w).to_string(),
            "letter of W_n is never used",
        ));
    }
    Ok(BridgeMorphism { level: n, morphism: g })
}

/// Number of bridges `G_1, G_2, ...` that [`interleave_and_certify`] needs.
pub fn bridges_needed(f: &Premorphism) -> usize {
    match f.periodicity() {
        Some(p) => p.start.max(1) + 2 * p.period + 1,
        None => f.checkable().0.saturating_sub(1),
    }
}

/// Interleaves `V_0, V_1, W_1, V_2, W_2, ...` with morphisms
/// `σ^{B1}_1, τ_1, G_1, τ_2, G_2, ...` and returns the certificate with
/// the given specs and empty references. Checks `σ^{B1}_1 ∘ τ_1 = σ^{B2}_1`.
pub fn interleave_and_certify(
    f: &Premorphism,
    bridges: &[BridgeMorphism],
    odd_spec: IndexSeq,
    even_spec: IndexSeq,
) -> Result<EquivalenceCertificate, ConjugacyError> {
    let needed = bridges_needed(f);
    if bridges.len() < needed {
        return Err(ConjugacyError::MissingBridges {
            needed,
            found: bridges.len(),
        });
    }
    let base = f.b1().morphism(1)?.after(&f.tau(1)?);
    if base != *f.b2().morphism(1)? {
        return Err(ConjugacyError::PostconditionFailure {
            level: 0,
            letter: String::new(),
            reason: "σ^B1_1 ∘ τ_1 differs from σ^B2_1".into(),
        });
    }
    let mut levels = vec![f.b1().alphabet(0)?.clone(), f.b1().alphabet(1)?.clone()];
    let mut morphisms = vec![f.b1().morphism(1)?.clone()];
    for (k, g) in bridges.iter().take(needed).enumerate() {
        let k = k + 1;
        levels.push(f.b2().alphabet(k)?.clone());
        morphisms.push(f.tau(k)?);
        levels.push(f.b1().alphabet(k + 1)?.clone());
        morphisms.push(g.morphism.clone());
    }
    let interleaved = match f.periodicity() {
        Some(p) => OrderedBratteliDiagram::with_detected_tail(levels, morphisms, 2 * p.period)?,
        None => OrderedBratteliDiagram::new(levels, morphisms, None)?,
    };
    Ok(EquivalenceCertificate {
        interleaved,
        odd_ref: String::new(),
        even_ref: String::new(),
        odd_spec,
        even_spec,
    })
}

/// A certified conjugacy.
#[derive(Clone, Debug)]
pub struct Conjugacy {
    pub report: CriterionReport,
    /// Levels of the normalized premorphism where the criterion is used.
    pub chain: IndexSeq,
    /// The normalized premorphism telescoped along `chain`.
    pub telescoped: Premorphism,
    pub bridges: Vec<BridgeMorphism>,
    pub certificate: EquivalenceCertificate,
}

#[derive(Clone, Debug)]
pub enum ConjugacyOutcome {
    Certified(Box<Conjugacy>),
    NotCertified(CriterionReport),
}

/// Chain `0 = n_0 < n_1 < ...`: `n_1` is the first level where the
/// criterion holds and `n_{k+1}` the first such level at or past `ℓ(n_k)`.
fn criterion_chain(report: &CriterionReport) -> Option<IndexSeq> {
    let satisfied_from = |m: usize| -> Option<usize> {
        let limit = match report.periodicity {
            Some(p) => m.max(p.start) + p.period,
            None => report.levels.len() + 1,
        };
        (m..limit).find(|&n| report.ell(n).is_some())
    };
    let mut chain = vec![0usize, satisfied_from(1)?];
    let Some(p) = report.periodicity else {
        while let Some(n) = report.ell(*chain.last().unwrap()).and_then(satisfied_from) {
            chain.push(n);
        }
        return IndexSeq::finite(chain).ok();
    };
    let mut seen: HashMap<usize, usize> = HashMap::new();
    loop {
        let k = chain.len() - 1;
        let n = chain[k];
        if n >= p.start {
            let phase = (n - p.start) % p.period;
            if let Some(&i) = seen.get(&phase) {
                let step = Step {
                    lag: k - i,
                    shift: n - chain[i],
                };
                let seq = IndexSeq::new(chain.clone(), Some(step)).ok()?;
                return Some(IndexSeq::compress(&seq.prefix(chain.len() + 2 * step.lag), step));
            }
            seen.insert(phase, k);
        }
        chain.push(satisfied_from(report.ell(n)?)?);
    }
}

/// Runs the criterion, builds the bridges along the chain of levels where it
/// holds and returns a certificate relating the original B1 (odd side) and
/// B2 (even side). The certificate is verified before returning.
pub fn check_conjugacy(f: &Premorphism, max_depth: usize) -> Result<ConjugacyOutcome, ConjugacyError> {
    let report = f.validate();
    if let Some(v) = report.violations.first() {
        return Err(ConjugacyError::Invalid(v.to_string()));
    }
    let picks = f.normalizing_spec()?;
    let g = f.normalize_scale()?;
    let report = criterion_check(&g, max_depth)?;
    if !matches!(report.verdict, Verdict::Satisfied { .. }) {
        return Ok(ConjugacyOutcome::NotCertified(report));
    }
    let Some(chain) = criterion_chain(&report) else {
        return Ok(ConjugacyOutcome::NotCertified(report));
    };
    let h = g.telescope_along(&chain)?;
    let needed = bridges_needed(&h);
    let bridges = (1..=needed)
        .map(|k| build_bridge(&h, k))
        .collect::<Result<Vec<_>, _>>()?;
    let odd_spec = picks.compose(&chain);
    let even_spec = f.scale().compose(&picks).compose(&chain);
    let certificate = interleave_and_certify(&h, &bridges, odd_spec, even_spec)?;
    match verify_equivalence_certificate(&certificate, f.b1(), f.b2())? {
        CertVerdict::Verified { .. } => {}
        CertVerdict::Counterexample { side, mismatch } => {
            return Err(ConjugacyError::Unsound(format!("{side} side: {mismatch:?}")))
        }
    }
    Ok(ConjugacyOutcome::Certified(Box::new(Conjugacy {
        report,
        chain,
        telescoped: h,
        bridges,
        certificate,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::tests::chacon;
    use crate::diagram::Tail;
    use crate::premorphism::tests::chacon_premorphism;

    #[test]
    fn chacon_needs_two_levels() {
        let f = chacon_premorphism();
        let r = criterion_check(&f, 3).unwrap();
        assert_eq!(r.verdict, Verdict::Satisfied { complete: true });
        let c = &r.levels[0];
        assert!(c.independence.is_independent());
        assert_eq!(
            c.attempts,
            vec![
                (2, Generation::Ungenerated { letter: "y".into() }),
                (3, Generation::Generated)
            ]
        );
        assert_eq!(r.ell(10), Some(12));
    }

    #[test]
    fn chacon_bridge_and_certificate() {
        let f = chacon_premorphism();
        let ConjugacyOutcome::Certified(c) = check_conjugacy(&f, 3).unwrap() else {
            panic!("expected a certificate");
        };
        assert_eq!(c.chain.to_string(), "0 1 tail +2");
        let g = &c.bridges[0].morphism;
        let w = c.telescoped.b2().alphabet(1).unwrap();
        assert_eq!(w.render(g.image(0)), "u v");
        assert_eq!(w.render(g.image(1)), "w");
    }

    #[test]
    fn identity_premorphism_is_letterwise() {
        let d = chacon();
        let f = Premorphism::new(
            d.clone(),
            d,
            IndexSeq::identity(),
            vec![Morphism::identity(2)],
            Some(Tail { start: 1, period: 1 }),
        )
        .unwrap();
        let r = criterion_check(&f, 2).unwrap();
        assert_eq!(r.levels[0].ell(), Some(2));
        let ConjugacyOutcome::Certified(c) = check_conjugacy(&f, 2).unwrap() else {
            panic!("expected a certificate");
        };
        assert!(c.chain.is_identity());
        assert_eq!(c.bridges[0].morphism, *c.telescoped.b1().morphism(2).unwrap());
    }

    #[test]
    fn mutated_bridge_is_rejected() {
        let f = chacon_premorphism();
        let ConjugacyOutcome::Certified(c) = check_conjugacy(&f, 3).unwrap() else {
            panic!("expected a certificate");
        };
        let mut bridges = c.bridges.clone();
        let mut images = bridges[1].morphism.clone().into_images();
        images[0] = vec![1, 0];
        bridges[1].morphism = Morphism::new(images);
        let cert = interleave_and_certify(
            &c.telescoped,
            &bridges,
            c.certificate.odd_spec.clone(),
            c.certificate.even_spec.clone(),
        )
        .unwrap();
        let v = verify_equivalence_certificate(&cert, f.b1(), f.b2()).unwrap();
        assert!(matches!(v, CertVerdict::Counterexample { .. }));
    }
}
