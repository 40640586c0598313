//! Reference implementations that share no code with `rsgt`.
//!
//! Everything here is written for clarity rather than speed and is only
//! linked into test targets.

pub mod dd;

use dd::Dd;

/// Sum of sines evaluated term by term in double-double arithmetic.
///
/// `terms` holds `(amplitude, frequency, phase)` triples.
pub fn sum_of_sines_dd(terms: &[(f64, f64, f64)], x: f64) -> f64 {
    let mut acc = Dd::ZERO;
    for &(a, f, phi) in terms {
        let inner = Dd::TWO_PI.mul_f64(x).add(Dd::from(phi));
        let arg = inner.mul_f64(f);
        acc = acc.add(arg.sin().mul_f64(a));
    }
    acc.to_f64()
}

/// Quantile by full sort and linear interpolation between order statistics.
pub fn sorted_quantile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    let h = p / 100.0 * (n - 1) as f64;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return v[n - 1];
    }
    v[lo] + (h - lo as f64) * (v[lo + 1] - v[lo])
}

/// Dice by explicit set counting.
pub fn dice_by_counting(a: &[bool], b: &[bool]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut both = 0usize;
    let mut na = 0usize;
    let mut nb = 0usize;
    for i in 0..a.len() {
        if a[i] {
            na += 1;
        }
        if b[i] {
            nb += 1;
        }
        if a[i] && b[i] {
            both += 1;
        }
    }
    if na + nb == 0 {
        1.0
    } else {
        2.0 * both as f64 / (na + nb) as f64
    }
}

/// Histogram over `[0, 1]` by comparing each value against explicit bin edges.
pub fn histogram_by_edges(values: &[f64], bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    for &v in values {
        let mut placed = false;
        for b in 0..bins {
            let lo = b as f64 / bins as f64;
            let hi = (b + 1) as f64 / bins as f64;
            if (v >= lo && v < hi) || (b == bins - 1 && v == 1.0) {
                counts[b] += 1;
                placed = true;
                break;
            }
        }
        assert!(placed, "value {v} outside [0, 1]");
    }
    counts
}
