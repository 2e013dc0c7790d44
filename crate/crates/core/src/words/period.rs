use num_integer::Integer;

/// `w_i = w_{i+p}` wherever both sides exist.
pub fn has_period<T: PartialEq>(w: &[T], p: usize) -> bool {
    assert!(p >= 1, "periods are positive");
    p >= w.len() || w.iter().zip(&w[p..]).all(|(a, b)| a == b)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{period} is not a period of the word")]
pub struct PeriodViolation {
    pub period: usize,
}

/// Generalized Fine–Wilf: if every `p` in `periods` is a period of `w` and
/// `|w| >= Σp - gcd`, then `gcd(periods)` is a period too.
///
/// Returns `None` when the length hypothesis fails (or `periods` is empty);
/// no claim is made then.
pub fn fine_wilf_reduce<T: PartialEq>(w: &[T], periods: &[usize]) -> Result<Option<usize>, PeriodViolation> {
    for &p in periods {
        if !has_period(w, p) {
            return Err(PeriodViolation { period: p });
        }
    }
    let Some(g) = periods.iter().copied().reduce(|a, b| a.gcd(&b)) else {
        return Ok(None);
    };
    let sum: usize = periods.iter().sum();
    if w.len() + g >= sum {
        debug_assert!(has_period(w, g));
        Ok(Some(g))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn periods() {
        assert!(has_period(&chars("abab"), 2));
        assert!(!has_period(&chars("abc"), 2));
        assert!(has_period(&chars("xyzwxyzwxyzwx"), 4));
        assert!(has_period(&chars("ab"), 5));
    }

    #[test]
    fn reduce() {
        assert_eq!(fine_wilf_reduce(&chars("aaaaa"), &[2, 3]), Ok(Some(1)));
        assert_eq!(fine_wilf_reduce(&chars("abaab"), &[3]), Ok(Some(3)));
        assert_eq!(
            fine_wilf_reduce(&chars("abaab"), &[2]),
            Err(PeriodViolation { period: 2 })
        );
        // abaaba has periods 3 and 5 but is too short for Fine–Wilf to apply.
        assert_eq!(fine_wilf_reduce(&chars("abaaba"), &[3, 5]), Ok(None));
        assert_eq!(fine_wilf_reduce(&chars("ab"), &[]), Ok(None));
    }
}
