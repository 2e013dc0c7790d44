use std::fmt;

use super::{telescope_within, TransformError};
use crate::diagram::{Agreement, Mismatch, OrderedBratteliDiagram};
use crate::morphism::Morphism;
use crate::periodic::IndexSeq;

/// Levels `0, 1, 3, 5, ...` of an interleaved diagram.
pub const INTERLEAVED_ODD: &str = "0 1 tail +2";
/// Levels `0, 2, 4, ...` of an interleaved diagram.
pub const INTERLEAVED_EVEN: &str = "0 tail +2";

/// Replayable equivalence witness.
///
/// Telescoping `interleaved` along its odd levels must reproduce the
/// diagram `odd_ref` telescoped along `odd_spec`, and telescoping along its
/// even levels must reproduce `even_ref` telescoped along `even_spec`, letter
/// for letter.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EquivalenceCertificate {
    pub interleaved: OrderedBratteliDiagram,
    pub odd_ref: String,
    pub even_ref: String,
    pub odd_spec: IndexSeq,
    pub even_spec: IndexSeq,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Odd,
    Even,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Odd => "odd",
            Side::Even => "even",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CertVerdict {
    /// Agreement on every level (`complete`) or only through `through`
    /// because some participant is finite.
    Verified {
        through: usize,
        complete: bool,
    },
    Counterexample {
        side: Side,
        mismatch: Mismatch,
    },
}

impl CertVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, CertVerdict::Verified { .. })
    }
}

impl EquivalenceCertificate {
    /// `d` interleaved with identity copies of its own levels.
    pub fn identity(d: &OrderedBratteliDiagram, path: &str) -> Result<Self, TransformError> {
        let (levels_needed, period) = match d.tail() {
            Some(t) => (d.depth() + 2 * t.period + 1, Some(2 * t.period)),
            None => (d.depth(), None),
        };
        let mut levels = vec![d.alphabet(0)?.clone()];
        let mut morphisms = Vec::new();
        for j in 1..=levels_needed {
            let a = d.alphabet(j)?;
            levels.push(a.clone());
            morphisms.push(d.morphism(j)?.clone());
            levels.push(a.clone());
            morphisms.push(Morphism::identity(a.len()));
        }
        let interleaved = match period {
            Some(p) => OrderedBratteliDiagram::with_detected_tail(levels, morphisms, p)?,
            None => OrderedBratteliDiagram::new(levels, morphisms, None)?,
        };
        Ok(EquivalenceCertificate {
            interleaved,
            odd_ref: path.to_string(),
            even_ref: path.to_string(),
            odd_spec: IndexSeq::identity(),
            even_spec: IndexSeq::identity(),
        })
    }
}

/// Replays a certificate against the two referenced diagrams.
pub fn verify_equivalence_certificate(
    cert: &EquivalenceCertificate,
    odd: &OrderedBratteliDiagram,
    even: &OrderedBratteliDiagram,
) -> Result<CertVerdict, TransformError> {
    let mut through = usize::MAX;
    let mut complete = true;
    let sides = [
        (Side::Odd, INTERLEAVED_ODD, odd, &cert.odd_spec),
        (Side::Even, INTERLEAVED_EVEN, even, &cert.even_spec),
    ];
    for (side, levels, target, spec) in sides {
        let actual = telescope_within(&cert.interleaved, &IndexSeq::parse(levels)?)?;
        let expected =
            telescope_within(target, spec).map_err(|e| TransformError::Malformed(format!("{side} spec: {e}")))?;
        match expected.agreement(&actual) {
            Agreement::Differs(mismatch) => return Ok(CertVerdict::Counterexample { side, mismatch }),
            Agreement::Agrees {
                through: t,
                complete: c,
            } => {
                through = through.min(t);
                complete &= c;
            }
        }
    }
    Ok(CertVerdict::Verified { through, complete })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::tests::chacon;

    #[test]
    fn self_certificate_verifies() {
        let d = chacon();
        let cert = EquivalenceCertificate::identity(&d, "c.obd").unwrap();
        let v = verify_equivalence_certificate(&cert, &d, &d).unwrap();
        assert!(matches!(v, CertVerdict::Verified { complete: true, .. }));
    }

    #[test]
    fn mutation_is_located() {
        let d = chacon();
        let cert = EquivalenceCertificate::identity(&d, "c.obd").unwrap();
        let mut levels = cert.interleaved.represented_levels().to_vec();
        let mut morphisms = cert.interleaved.represented_morphisms().to_vec();
        // Level 3 is the copy of σ_2; flip the last letter of the image of x.
        let mut images = morphisms[2].clone().into_images();
        images[0][2] = 0;
        morphisms[2] = Morphism::new(images);
        let bad = OrderedBratteliDiagram::new(std::mem::take(&mut levels), morphisms, cert.interleaved.tail()).unwrap();
        let cert = EquivalenceCertificate {
            interleaved: bad,
            ..cert
        };
        match verify_equivalence_certificate(&cert, &d, &d).unwrap() {
            CertVerdict::Counterexample { side, mismatch } => {
                assert_eq!(side, Side::Odd);
                assert_eq!(
                    mismatch,
                    Mismatch::Image {
                        level: 2,
                        letter: "x".into(),
                        expected: "x x y".into(),
                        actual: "x x x".into()
                    }
                );
            }
            other => panic!("expected a counterexample, got {other:?}"),
        }
    }
}
