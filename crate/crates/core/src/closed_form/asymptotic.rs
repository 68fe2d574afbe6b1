//! Large-rate expansion of the continuation value.
//!
//! Substituting `V ~ Σ_{m≥1} a_m x^{−m}` into the steady equation gives `a₁ = c`,
//! `a₂ = kc` and `a_{m+1} = k m a_m + (m − 1)(σ²m/2 − kθ) a_{m−1}`. The series for
//! `x·V = c + kc/x + …` is asymptotic, not convergent: its terms shrink while
//! `m ≲ x/k` and then grow factorially, so it is summed up to its smallest term.

use serde::Serialize;

use crate::model::CirParams;

const MAX_TERMS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailExpansion {
    /// Optimally truncated sum for `x·V(x)`.
    pub x_v: f64,
    /// Magnitude of the first omitted term, the usual error scale of the truncation.
    pub smallest_term: f64,
    pub terms_used: usize,
}

/// Sums the expansion of `x·V(x)` up to (excluding) its smallest term.
pub fn tail_expansion(cir: &CirParams, c: f64, x: f64) -> TailExpansion {
    let CirParams { k, theta, sigma } = *cir;
    let s2 = sigma * sigma;
    // t_m = a_m x^{1−m}; the recurrence is applied directly to the scaled terms.
    let (mut prev, mut cur) = (0.0, c);
    let mut sum = 0.0;
    let mut smallest = f64::INFINITY;
    let mut used = 0;
    for m in 1..=MAX_TERMS {
        if cur.abs() >= smallest && m > 2 {
            break;
        }
        smallest = smallest.min(cur.abs());
        sum += cur;
        used = m;
        let mf = m as f64;
        let next = (k * mf * cur + (mf - 1.0) * (0.5 * s2 * mf - k * theta) * prev / x) / x;
        prev = cur;
        cur = next;
    }
    TailExpansion {
        x_v: sum,
        smallest_term: cur.abs(),
        terms_used: used,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_terms() {
        let cir = CirParams::new(0.25, 0.06, 0.1).unwrap();
        let t = tail_expansion(&cir, 0.05, 1e6);
        assert!((t.x_v - 0.05 * (1.0 + 0.25e-6)).abs() < 1e-14);
        // a₃ = k·2·a₂ + 1·(σ² − kθ)·a₁
        let x = 100.0;
        let a3 = 0.25 * 2.0 * 0.25 * 0.05 + (0.01 - 0.015) * 0.05;
        let three = tail_expansion(&cir, 0.05, x);
        assert!(three.terms_used > 3);
        let head = 0.05 + 0.25 * 0.05 / x + a3 / (x * x);
        assert!((three.x_v - head).abs() < 1e-6 * 0.05);
    }

    #[test]
    fn truncation_stops_at_smallest_term() {
        let cir = CirParams::new(0.5, 0.1, 0.2).unwrap();
        let t = tail_expansion(&cir, 0.08, 2.0);
        assert!(t.terms_used < MAX_TERMS);
        assert!(t.smallest_term > 0.0);
    }
}
