mod common;

use bratteli::conjugacy::{check_conjugacy, ConjugacyOutcome};
use bratteli::rank_reduction::reduce_rank;
use bratteli::transforms::{diagram_rank, verify_equivalence_certificate};
use common::stationary_premorphism;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn rank_reduction_sweep() {
    let mut failures = Vec::new();
    for seed in 100..130u64 {
        let f = stationary_premorphism(&mut ChaCha8Rng::seed_from_u64(seed), 3, 3);
        match reduce_rank(&f, 8) {
            Ok(r) => {
                let bound = 3 * diagram_rank(f.b2());
                if diagram_rank(&r.reduced) > bound {
                    failures.push(format!("{seed}: rank {} > {bound}", diagram_rank(&r.reduced)));
                }
                let cert = r.certificate("b1", "reduced");
                let v = verify_equivalence_certificate(&cert, f.b1(), &r.reduced).unwrap();
                if !v.is_verified() {
                    failures.push(format!("{seed}: {v:?}"));
                }
            }
            Err(e) => failures.push(format!("{seed}: {e}")),
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn conjugacy_certificates_verify_when_issued() {
    let mut certified = 0;
    for seed in 0..60u64 {
        let f = stationary_premorphism(&mut ChaCha8Rng::seed_from_u64(seed), 3, 3);
        if let ConjugacyOutcome::Certified(c) = check_conjugacy(&f, 4).unwrap() {
            let v = verify_equivalence_certificate(&c.certificate, f.b1(), f.b2()).unwrap();
            assert!(v.is_verified(), "seed {seed}");
            certified += 1;
        }
    }
    assert!(certified > 0);
}
