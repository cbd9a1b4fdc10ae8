//! Truncated `l_q` sums, sup norms, decay indices and convergence verdicts.
//!
//! Every partial sum is accumulated in index order with Neumaier
//! compensation, so results are reproducible bit for bit and independent of
//! how callers chunk the index range.

use crate::error::{require_positive, Error, Result};
use crate::sequence::{ScalarSequence, EXACT_F64_INDEX};

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator in (for sums over disjoint ranges).
    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        acc.extend(iter);
        acc
    }
}

/// `|x|^q`. Every q-sum in the crate goes through this function, so equal
/// inputs produce equal summands.
#[inline]
pub fn abs_pow(x: f64, q: f64) -> f64 {
    let a = x.abs();
    if q == 1.0 {
        a
    } else if q == 2.0 {
        a * a
    } else {
        a.powf(q)
    }
}

fn check_exponent(q: f64) -> Result<f64> {
    require_positive("q", q)
}

/// `sum_{j=1}^{n} |x_j|^q`.
pub fn lq_partial(seq: &ScalarSequence, q: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroIndex(n));
    }
    lq_partial_over(seq, q, 1..=n)
}

/// `sum |x_j|^q` over the given indices, in iteration order.
pub fn lq_partial_over<I>(seq: &ScalarSequence, q: f64, indices: I) -> Result<f64>
where
    I: IntoIterator<Item = u64>,
{
    let q = check_exponent(q)?;
    let mut acc = NeumaierSum::new();
    for j in indices {
        acc.add(abs_pow(seq.eval(j)?, q));
    }
    Ok(acc.value())
}

/// `max_{j <= n} |x_j|`.
pub fn sup_norm_truncated(seq: &ScalarSequence, n: u64) -> f64 {
    (1..=n).map(|j| seq.get(j).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormPolicy {
    /// Largest summation index.
    pub budget: u64,
    pub divergence_threshold: f64,
    /// Summation stops early once the tail bound drops below
    /// `tolerance * partial`.
    pub tolerance: f64,
}

impl Default for NormPolicy {
    fn default() -> Self {
        NormPolicy {
            budget: 1_000_000,
            divergence_threshold: 1e6,
            tolerance: 1e-6,
        }
    }
}

impl NormPolicy {
    pub fn new(budget: u64, divergence_threshold: f64, tolerance: f64) -> Result<Self> {
        if budget == 0 {
            return Err(Error::ZeroIndex(budget));
        }
        require_positive("divergence_threshold", divergence_threshold)?;
        require_positive("tolerance", tolerance)?;
        Ok(NormPolicy {
            budget,
            divergence_threshold,
            tolerance,
        })
    }

    pub fn with_budget(self, budget: u64) -> Result<Self> {
        Self::new(budget, self.divergence_threshold, self.tolerance)
    }

    pub fn with_threshold(self, threshold: f64) -> Result<Self> {
        Self::new(self.budget, threshold, self.tolerance)
    }
}

/// Outcome of an inequality check `lhs <= rhs + tolerance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl BoundCheck {
    pub fn new(lhs: f64, rhs: f64, tolerance: f64) -> Self {
        BoundCheck {
            lhs,
            rhs,
            holds: lhs <= rhs + tolerance,
        }
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Outcome of a q-sum certificate search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvergenceVerdict {
    /// The full sum lies in `[value, value + remainder_bound]`; `value` is the
    /// partial sum through `at_index`.
    Converged {
        value: f64,
        remainder_bound: f64,
        at_index: u64,
    },
    /// The partial sum through `crossing_index` is `partial > threshold`.
    DivergenceCertificate {
        threshold: f64,
        crossing_index: u64,
        partial: f64,
    },
    Undecided {
        budget: u64,
        partial: f64,
    },
}

impl ConvergenceVerdict {
    pub fn is_converged(&self) -> bool {
        matches!(self, ConvergenceVerdict::Converged { .. })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, ConvergenceVerdict::DivergenceCertificate { .. })
    }

    /// Interval known to contain the full sum (converged verdicts only).
    pub fn enclosure(&self) -> Option<(f64, f64)> {
        match *self {
            ConvergenceVerdict::Converged {
                value, remainder_bound, ..
            } => Some((value, value + remainder_bound)),
            _ => None,
        }
    }

    /// Midpoint of the enclosure.
    pub fn corrected_value(&self) -> Option<f64> {
        self.enclosure().map(|(lo, hi)| 0.5 * (lo + hi))
    }
}

/// Terms between tolerance checks when a tail bound is available.
const CHECKPOINT: u64 = 4096;

/// Sums `term(1), term(2), ...` until `threshold` is strictly exceeded or the
/// budget runs out.
pub(crate) fn scan_for_divergence<F>(mut term: F, threshold: f64, budget: u64) -> ConvergenceVerdict
where
    F: FnMut(u64) -> f64,
{
    let mut acc = NeumaierSum::new();
    for j in 1..=budget {
        acc.add(term(j));
        let partial = acc.value();
        if partial > threshold {
            return ConvergenceVerdict::DivergenceCertificate {
                threshold,
                crossing_index: j,
                partial,
            };
        }
    }
    ConvergenceVerdict::Undecided {
        budget,
        partial: acc.value(),
    }
}

/// Sums terms while `remainder(n)` bounds the tail beyond `n`; stops at the
/// first checkpoint where the bound meets the relative tolerance.
pub(crate) fn scan_for_convergence<F, R>(mut term: F, remainder: R, tolerance: f64, budget: u64) -> ConvergenceVerdict
where
    F: FnMut(u64) -> f64,
    R: Fn(u64) -> Option<f64>,
{
    let mut acc = NeumaierSum::new();
    for j in 1..=budget {
        acc.add(term(j));
        if j % CHECKPOINT == 0 {
            let partial = acc.value();
            if let Some(rem) = remainder(j) {
                if rem <= tolerance * partial {
                    return ConvergenceVerdict::Converged {
                        value: partial,
                        remainder_bound: rem,
                        at_index: j,
                    };
                }
            }
        }
    }
    let partial = acc.value();
    match remainder(budget) {
        Some(rem) => ConvergenceVerdict::Converged {
            value: partial,
            remainder_bound: rem,
            at_index: budget,
        },
        None => ConvergenceVerdict::Undecided { budget, partial },
    }
}

/// Decides membership of `seq` in `l_q` at the policy's scale.
///
/// Finitely supported sequences converge exactly. Sequences with a
/// registered tail envelope that is finite at `q` are summed towards
/// [`ConvergenceVerdict::Converged`]; everything else is searched for a
/// threshold crossing.
pub fn classify(seq: &ScalarSequence, q: f64, policy: &NormPolicy) -> Result<ConvergenceVerdict> {
    let q = check_exponent(q)?;
    if let Some(end) = seq.support_end() {
        let at_index = end.max(1);
        if at_index > policy.budget {
            let partial = lq_partial(seq, q, policy.budget)?;
            return Ok(ConvergenceVerdict::Undecided {
                budget: policy.budget,
                partial,
            });
        }
        return Ok(ConvergenceVerdict::Converged {
            value: lq_partial(seq, q, at_index)?,
            remainder_bound: 0.0,
            at_index,
        });
    }

    let envelope = seq
        .envelope()
        .filter(|_| seq.tail_monotone_from().is_some())
        .filter(|env| env.remainder(q, policy.budget.max(3)).is_some());
    let term = |j| abs_pow(seq.get(j), q);
    Ok(match envelope {
        Some(env) => scan_for_convergence(term, |n| env.remainder(q, n), policy.tolerance, policy.budget),
        None => scan_for_divergence(term, policy.divergence_threshold, policy.budget),
    })
}

/// Index from which every term is below the decay tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayIndex {
    /// Least integer index with `|x_j| < eps`.
    Exact(u64),
    /// An index past `2^53`, least among the `f64`-representable indices
    /// the search could distinguish.
    Sampled(f64),
}

impl DecayIndex {
    pub fn as_f64(&self) -> f64 {
        match *self {
            DecayIndex::Exact(j) => j as f64,
            DecayIndex::Sampled(x) => x,
        }
    }
}

/// Evaluation cap for [`c0_decay_check`].
pub const DEFAULT_DECAY_EVALUATIONS: u64 = 10_000;

/// Least index `J >= tail_monotone_from` with `|x_J| < eps`; by monotonicity
/// of the tail every later term is below `eps` as well.
pub fn c0_decay_check(seq: &ScalarSequence, eps: f64) -> Result<DecayIndex> {
    c0_decay_check_with(seq, eps, DEFAULT_DECAY_EVALUATIONS)
}

pub fn c0_decay_check_with(seq: &ScalarSequence, eps: f64, max_evaluations: u64) -> Result<DecayIndex> {
    let eps = require_positive("epsilon", eps)?;
    let start = seq
        .tail_monotone_from()
        .ok_or_else(|| Error::NoMonotoneTail(seq.label().to_owned()))?;
    let not_found = || Error::DecayNotFound {
        epsilon: eps,
        evaluations: max_evaluations,
    };
    let mut evaluations = 0u64;
    let mut below = |value: f64| -> Result<bool> {
        evaluations += 1;
        if evaluations > max_evaluations {
            return Err(not_found());
        }
        Ok(value.abs() < eps)
    };

    // Gallop over exact integer indices, then bisect the last bracket.
    if below(seq.get(start))? {
        return Ok(DecayIndex::Exact(start));
    }
    let mut failing = start;
    let mut step = 1u64;
    while failing < EXACT_F64_INDEX {
        let candidate = failing.saturating_add(step).min(EXACT_F64_INDEX);
        if below(seq.get(candidate))? {
            let (mut lo, mut hi) = (failing, candidate);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if below(seq.get(mid))? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(DecayIndex::Exact(hi));
        }
        failing = candidate;
        step = step.saturating_mul(2);
    }

    // Past 2^53 only the formula's real extension can be evaluated.
    let mut lo = failing as f64;
    loop {
        let hi = lo * 2.0;
        if !hi.is_finite() {
            return Err(not_found());
        }
        let value = seq.eval_real(hi).ok_or_else(not_found)?;
        if below(value)? {
            let mut hi = hi;
            loop {
                let mid = (0.5 * (lo + hi)).floor();
                if mid <= lo || mid >= hi {
                    return Ok(DecayIndex::Sampled(hi));
                }
                let value = seq.eval_real(mid).ok_or_else(not_found)?;
                if below(value)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
        lo = hi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_digits() {
        let values = [1.0, 1e100, 1.0, -1e100];
        let naive: f64 = values.iter().sum();
        let compensated: NeumaierSum = values.iter().copied().collect();
        assert_eq!(naive, 0.0);
        assert_eq!(compensated.value(), 2.0);
    }

    #[test]
    fn merge_matches_single_pass_on_exact_data() {
        let whole: NeumaierSum = (1..=1000).map(|k| k as f64 * 0.5).collect();
        let mut left: NeumaierSum = (1..=400).map(|k| k as f64 * 0.5).collect();
        let right: NeumaierSum = (401..=1000).map(|k| k as f64 * 0.5).collect();
        left.merge(&right);
        assert_eq!(left.value(), whole.value());
    }

    #[test]
    fn lq_partial_examples() {
        let e1 = ScalarSequence::unit(1).unwrap();
        assert_eq!(lq_partial(&e1, 2.0, 100).unwrap(), 1.0);

        let harmonic = ScalarSequence::mother_ell_p_plus(1.0).unwrap();
        let h4 = lq_partial(&harmonic, 1.0, 4).unwrap();
        assert!((h4 - 25.0 / 12.0).abs() < 1e-15);

        let zero = ScalarSequence::zero();
        for q in [0.3, 1.0, 7.0] {
            assert_eq!(lq_partial(&zero, q, 50).unwrap(), 0.0);
        }
    }

    #[test]
    fn lq_partial_domain_errors() {
        let e1 = ScalarSequence::unit(1).unwrap();
        assert!(lq_partial(&e1, 0.0, 10).is_err());
        assert!(lq_partial(&e1, -1.0, 10).is_err());
        assert!(lq_partial(&e1, 1.0, 0).is_err());
    }

    #[test]
    fn sup_norms() {
        assert_eq!(sup_norm_truncated(&ScalarSequence::unit(3).unwrap(), 10), 1.0);
        assert_eq!(
            sup_norm_truncated(&ScalarSequence::mother_c0(), 10),
            1.0 / std::f64::consts::LN_2
        );
        assert_eq!(sup_norm_truncated(&ScalarSequence::zero(), 10), 0.0);
    }

    #[test]
    fn finite_support_converges_exactly() {
        let e7 = ScalarSequence::unit(7).unwrap();
        for q in [0.5, 1.0, 3.0] {
            let v = classify(&e7, q, &NormPolicy::default()).unwrap();
            assert_eq!(
                v,
                ConvergenceVerdict::Converged {
                    value: 1.0,
                    remainder_bound: 0.0,
                    at_index: 7
                }
            );
        }
        let tight = NormPolicy::new(5, 1e6, 1e-6).unwrap();
        assert!(matches!(
            classify(&e7, 1.0, &tight).unwrap(),
            ConvergenceVerdict::Undecided { budget: 5, .. }
        ));
    }

    #[test]
    fn ell_p_mother_vector_converges_with_log_remainder() {
        let xi = ScalarSequence::mother_ell_p(2.0).unwrap();
        let policy = NormPolicy::new(100_000, 1e6, 1e-6).unwrap();
        match classify(&xi, 2.0, &policy).unwrap() {
            ConvergenceVerdict::Converged {
                remainder_bound,
                at_index,
                value,
            } => {
                assert_eq!(at_index, 100_000);
                assert_eq!(remainder_bound, 1.0 / 100_000f64.ln());
                assert!(value > 3.0 && value < 3.5);
            }
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn ell_p_mother_vector_diverges_below_p() {
        // Oracle: plain partial sums of 1/(sqrt(j) ln(j+1)).
        let xi = ScalarSequence::mother_ell_p(2.0).unwrap();
        let policy = NormPolicy::new(1_000_000, 5.0, 1e-6).unwrap();
        let verdict = classify(&xi, 1.0, &policy).unwrap();
        let ConvergenceVerdict::DivergenceCertificate {
            crossing_index,
            partial,
            ..
        } = verdict
        else {
            panic!("expected divergence, got {verdict:?}");
        };
        let mut plain = 0.0;
        let mut first = None;
        for j in 1..=crossing_index {
            let jf = j as f64;
            plain += 1.0 / (jf.sqrt() * (jf + 1.0).ln());
            if plain > 5.0 && first.is_none() {
                first = Some(j);
            }
        }
        assert_eq!(first, Some(crossing_index));
        assert!((plain - partial).abs() <= 1e-9 * partial);
    }

    #[test]
    fn harmonic_crossing_matches_known_index() {
        // H_n > 10 first at n = 12367.
        let harmonic = ScalarSequence::mother_ell_p_plus(1.0).unwrap();
        let policy = NormPolicy::new(100_000, 10.0, 1e-6).unwrap();
        let v = classify(&harmonic, 1.0, &policy).unwrap();
        assert!(matches!(
            v,
            ConvergenceVerdict::DivergenceCertificate {
                crossing_index: 12367,
                ..
            }
        ));
    }

    #[test]
    fn basel_sum_within_remainder() {
        let harmonic = ScalarSequence::mother_ell_p_plus(1.0).unwrap();
        let v = classify(&harmonic, 2.0, &NormPolicy::default()).unwrap();
        let (lo, hi) = v.enclosure().unwrap();
        let basel = std::f64::consts::PI.powi(2) / 6.0;
        assert!(lo <= basel && basel <= hi + 1e-15);
        assert!((v.corrected_value().unwrap() - basel).abs() < 1e-6);
    }

    #[test]
    fn no_envelope_without_crossing_is_undecided() {
        let xi = ScalarSequence::mother_ell_p_plus(1.0).unwrap();
        let unregistered = ScalarSequence::lin_comb(&[(1.0, xi)]);
        let v = classify(&unregistered, 2.0, &NormPolicy::default()).unwrap();
        assert!(matches!(v, ConvergenceVerdict::Undecided { budget: 1_000_000, .. }));
    }

    #[test]
    fn classify_rejects_bad_exponent() {
        let xi = ScalarSequence::mother_c0();
        assert!(classify(&xi, 0.0, &NormPolicy::default()).is_err());
    }

    #[test]
    fn decay_examples() {
        let c0 = ScalarSequence::mother_c0();
        assert_eq!(c0_decay_check(&c0, 0.5).unwrap(), DecayIndex::Exact(7));
        let e1 = ScalarSequence::unit(1).unwrap();
        assert_eq!(c0_decay_check(&e1, 0.5).unwrap(), DecayIndex::Exact(2));
        let root = ScalarSequence::mother_ell_p_plus(2.0).unwrap();
        assert_eq!(c0_decay_check(&root, 0.1).unwrap(), DecayIndex::Exact(101));
    }

    #[test]
    fn decay_beyond_exact_indices_uses_the_formula() {
        // 1/ln(j+1) < 1e-2 iff j + 1 > e^100.
        let c0 = ScalarSequence::mother_c0();
        let DecayIndex::Sampled(j) = c0_decay_check(&c0, 1e-2).unwrap() else {
            panic!("expected a sampled index");
        };
        let oracle = 100f64.exp();
        assert!((j - oracle).abs() <= 1e-12 * oracle, "{j} vs {oracle}");
        assert!(c0.eval_real(j).unwrap() < 1e-2);
    }

    #[test]
    fn decay_requires_monotone_tail_and_budget() {
        let noisy = ScalarSequence::from_fn("noise", |j| (j as f64).sin());
        assert!(matches!(c0_decay_check(&noisy, 0.1), Err(Error::NoMonotoneTail(_))));
        let c0 = ScalarSequence::mother_c0();
        assert!(matches!(
            c0_decay_check_with(&c0, 1e-2, 20),
            Err(Error::DecayNotFound { .. })
        ));
    }
}
