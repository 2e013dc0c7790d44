//! Maps from letters to words over another alphabet.

use crate::alphabet::{Letter, Word};
use crate::matrix::CountMatrix;
use crate::scalar::{self, Count, Overflow};

/// A morphism `A -> B^*`, stored as one image word per letter of `A`.
///
/// In a diagram the morphism at level `n` maps `V_n` into `V_{n-1}^*`;
/// the order of an image word is the order of the edges with that range.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Morphism {
    images: Vec<Word>,
}

impl Morphism {
    pub fn new(images: Vec<Word>) -> Self {
        Morphism { images }
    }

    pub fn identity(n: usize) -> Self {
        Morphism {
            images: (0..n).map(|a| vec![a]).collect(),
        }
    }

    /// Number of letters in the domain.
    pub fn domain_len(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, a: Letter) -> &[Letter] {
        &self.images[a]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn into_images(self) -> Vec<Word> {
        self.images
    }

    pub fn apply(&self, word: &[Letter]) -> Word {
        let mut out = Vec::with_capacity(word.len());
        for &a in word {
            out.extend_from_slice(&self.images[a]);
        }
        out
    }

    /// `self ∘ inner`: first `inner`, then `self` on every letter.
    pub fn after(&self, inner: &Morphism) -> Morphism {
        Morphism {
            images: inner.images.iter().map(|w| self.apply(w)).collect(),
        }
    }

    /// True when every image is a single letter and no two images coincide.
    pub fn is_letterwise(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.images.iter().all(|w| w.len() == 1 && seen.insert(w[0]))
    }

    /// Letters of the codomain (of size `codomain_len`) that occur in no image.
    pub fn unused(&self, codomain_len: usize) -> Vec<Letter> {
        let mut used = vec![false; codomain_len];
        for w in &self.images {
            for &a in w {
                used[a] = true;
            }
        }
        (0..codomain_len).filter(|&a| !used[a]).collect()
    }

    pub fn max_letter(&self) -> Option<Letter> {
        self.images.iter().flatten().copied().max()
    }

    /// Occurrence-count matrix, `domain_len x codomain_len`.
    pub fn matrix<C: Count>(&self, codomain_len: usize) -> Result<CountMatrix<C>, Overflow> {
        let mut m = CountMatrix::zeros(self.images.len(), codomain_len);
        for (v, w) in self.images.iter().enumerate() {
            for &a in w {
                let next = scalar::add(m.get(v, a), &C::one())?;
                m.set(v, a, next);
            }
        }
        Ok(m)
    }

    /// Image lengths weighted by `weights` on the codomain.
    pub fn weighted_lengths<C: Count>(&self, weights: &[C]) -> Result<Vec<C>, Overflow> {
        self.images
            .iter()
            .map(|w| w.iter().try_fold(C::zero(), |acc, &a| scalar::add(&acc, &weights[a])))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chacon() -> Morphism {
        Morphism::new(vec![vec![0, 0, 1], vec![0, 1, 1]])
    }

    #[test]
    fn composition_reads_inner_first() {
        let s = chacon();
        let s2 = s.after(&s);
        assert_eq!(s2.image(0), &[0, 0, 1, 0, 0, 1, 0, 1, 1]);
        assert_eq!(Morphism::identity(2).after(&s), s);
        assert_eq!(s.after(&Morphism::identity(2)), s);
    }

    #[test]
    fn matrix_counts_occurrences() {
        let m = chacon().matrix::<u64>(2).unwrap();
        assert_eq!(m.to_rows(), vec![vec![2, 1], vec![1, 2]]);
    }

    #[test]
    fn letterwise_and_unused() {
        assert!(Morphism::identity(3).is_letterwise());
        assert!(!Morphism::new(vec![vec![0], vec![0]]).is_letterwise());
        assert_eq!(Morphism::new(vec![vec![0, 2]]).unused(3), vec![1]);
    }
}
