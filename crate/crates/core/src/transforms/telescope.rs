use num_integer::Integer;

use super::TransformError;
use crate::diagram::OrderedBratteliDiagram;
use crate::periodic::IndexSeq;

/// Telescoping along `spec = (0 = n_0 < n_1 < ...)`: level `i` of the result
/// is `V_{n_i}` and its morphism is `σ_{[n_{i-1}, n_i]}`.
pub fn telescope(d: &OrderedBratteliDiagram, spec: &IndexSeq) -> Result<OrderedBratteliDiagram, TransformError> {
    spec.check_telescope()?;
    let (count, period) = match (spec.step(), d.tail()) {
        (None, _) => (spec.head().len(), None),
        (Some(_), None) => return Err(TransformError::SpecBeyondDiagram { depth: d.depth() }),
        (Some(step), Some(tail)) => {
            // Level i depends on the phase of n_{i-1} modulo the diagram
            // period and on the gap n_i - n_{i-1}; both repeat with `period`
            // once n_{i-1} is past the represented levels.
            let period = step.lag * (tail.period / step.shift.gcd(&tail.period));
            let mut t = spec.head().len() + 1;
            while spec.get(t - 1).unwrap() < d.depth() {
                t += 1;
            }
            (t + 2 * period + 1, Some(period))
        }
    };
    let idx = spec.prefix(count);
    if period.is_none() && !d.has_level(*idx.last().unwrap()) {
        return Err(TransformError::SpecBeyondDiagram { depth: d.depth() });
    }
    let mut levels = Vec::with_capacity(count);
    let mut morphisms = Vec::with_capacity(count);
    levels.push(d.alphabet(0)?.clone());
    for i in 1..count {
        levels.push(d.alphabet(idx[i])?.clone());
        morphisms.push(d.compose(idx[i - 1], idx[i])?);
    }
    Ok(match period {
        Some(p) => OrderedBratteliDiagram::with_detected_tail(levels, morphisms, p)?,
        None => OrderedBratteliDiagram::new(levels, morphisms, None)?,
    })
}

/// Like [`telescope`], but a periodic spec on a finite diagram is cut at the
/// last represented level instead of failing.
pub fn telescope_within(d: &OrderedBratteliDiagram, spec: &IndexSeq) -> Result<OrderedBratteliDiagram, TransformError> {
    if d.is_infinite() || spec.step().is_none() {
        return telescope(d, spec);
    }
    spec.check_telescope()?;
    let head: Vec<usize> = (0..).map_while(|i| spec.get(i).filter(|&x| x <= d.depth())).collect();
    telescope(d, &IndexSeq::finite(head)?)
}
