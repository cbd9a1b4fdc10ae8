//! The operator `T((w_j)_j) = sum_j y_j (x) w_j` on finitely supported lists,
//! its norm estimates and the certificates showing that nonzero range
//! elements avoid the smaller sum spaces.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg;
use crate::norm::{
    abs_pow, c0_decay_check, lq_partial, scan_for_convergence, scan_for_divergence, BoundCheck, ConvergenceVerdict,
    DecayIndex, NeumaierSum, NormPolicy,
};
use crate::partition::PartitionScheme;
use crate::sequence::ScalarSequence;
use crate::spread::family::IsomorphFamily;
use crate::spread::tensor::{make_y, tensor_coord, tilde_s};

/// Relative slack granted when a product is compared with a product of
/// separately rounded norms.
pub const TERMWISE_RTOL: f64 = 1e-12;

/// How far to look for a nonzero entry of `xi` when one sample per block is
/// needed.
const XI_SEARCH_LIMIT: u64 = 1 << 20;

/// `T` applied to a finite list `w_1, ..., w_k` of model vectors, so that
/// coordinate `n = i_j` of the image is `xi_j R_n(w_i)` for `i <= k` and
/// zero otherwise.
#[derive(Debug, Clone)]
pub struct SpreadOperator {
    xi: ScalarSequence,
    scheme: PartitionScheme,
    family: IsomorphFamily,
    slots: Arc<[Vec<f64>]>,
}

impl SpreadOperator {
    pub fn new(
        xi: ScalarSequence,
        scheme: PartitionScheme,
        family: IsomorphFamily,
        slots: Vec<Vec<f64>>,
    ) -> Result<Self> {
        for w in &slots {
            if w.len() != family.model_dim() {
                return Err(Error::DimensionMismatch {
                    expected: family.model_dim(),
                    actual: w.len(),
                });
            }
        }
        Ok(SpreadOperator {
            xi,
            scheme,
            family,
            slots: slots.into(),
        })
    }

    pub fn xi(&self) -> &ScalarSequence {
        &self.xi
    }

    pub fn scheme(&self) -> PartitionScheme {
        self.scheme
    }

    pub fn family(&self) -> &IsomorphFamily {
        &self.family
    }

    pub fn slots(&self) -> &[Vec<f64>] {
        &self.slots
    }

    /// `w_i`, or `None` past the end of the list (an implicit zero).
    pub fn slot(&self, i: u64) -> Option<&[f64]> {
        let idx = usize::try_from(i.checked_sub(1)?).ok()?;
        self.slots.get(idx).map(Vec::as_slice)
    }

    /// `||w_i||`, zero past the end of the list.
    pub fn slot_norm(&self, i: u64) -> f64 {
        self.slot(i).map_or(0.0, |w| self.family.norm(w))
    }

    /// First slot holding a nonzero vector.
    pub fn first_nonzero_slot(&self) -> Option<u64> {
        self.slots
            .iter()
            .position(|w| w.iter().any(|v| *v != 0.0))
            .map(|k| k as u64 + 1)
    }

    /// Coordinate `n` of `T(w)`, read off the block decomposition of `n`.
    pub fn coord(&self, n: u64) -> Result<Vec<f64>> {
        let b = self.scheme.decode(n)?;
        match self.slot(b.block) {
            Some(w) => {
                let xj = self.xi.get(b.position);
                let mut z = self.family.forward(n, w)?;
                for v in &mut z {
                    *v *= xj;
                }
                Ok(z)
            }
            None => Ok(vec![0.0; self.family.components().component_dim(n)]),
        }
    }

    /// Coordinate `n` of `sum_i y_i (x) w_i`, summing every term.
    pub fn coord_by_direct_sum(&self, n: u64) -> Result<Vec<f64>> {
        let mut z = vec![0.0; self.family.components().component_dim(n)];
        for (k, w) in self.slots.iter().enumerate() {
            let y = make_y(k as u64 + 1, &self.xi, self.scheme);
            for (acc, v) in z.iter_mut().zip(tensor_coord(&y, w, &self.family, n)?) {
                *acc += v;
            }
        }
        Ok(z)
    }

    /// `||z_n||` for `z = T(w)`; `n >= 1`.
    pub fn coord_norm(&self, n: u64) -> f64 {
        let b = self.scheme.decode(n).expect("coordinates are 1-indexed");
        self.block_term_norm_at(b.block, b.position, n)
    }

    /// `||z_{i_j}|| = ||xi_j R_{i_j}(w_i)||`.
    pub fn block_term_norm(&self, block: u64, position: u64) -> Result<f64> {
        let n = self.scheme.encode(block, position)?;
        Ok(self.block_term_norm_at(block, position, n))
    }

    fn block_term_norm_at(&self, block: u64, position: u64, n: u64) -> f64 {
        match self.slot(block) {
            Some(w) => self.family.scaled_image_norm(n, self.xi.get(position), w),
            None => 0.0,
        }
    }

    /// The scalar sequence `n -> ||z_n||`.
    pub fn component_norms(&self) -> ScalarSequence {
        let op = self.clone();
        ScalarSequence::from_fn(format!("||T(w)_n|| over {}", self.xi.label()), move |n| {
            op.coord_norm(n)
        })
    }
}

/// Coordinate `n` of `T(w_list)`.
pub fn t_coord(
    xi: &ScalarSequence,
    scheme: PartitionScheme,
    family: &IsomorphFamily,
    w_list: &[Vec<f64>],
    n: u64,
) -> Result<Vec<f64>> {
    SpreadOperator::new(xi.clone(), scheme, *family, w_list.to_vec())?.coord(n)
}

fn check_exponent(name: &'static str, q: f64) -> Result<f64> {
    if q.is_finite() && q > 0.0 {
        Ok(q)
    } else {
        Err(Error::domain(name, q, "must be finite and positive"))
    }
}

/// `BoundCheck` with slack at least `-tol * max(1, rhs)`.
fn scaled_check(lhs: f64, rhs: f64, tol: f64) -> BoundCheck {
    BoundCheck::new(lhs, rhs, tol * rhs.abs().max(1.0))
}

/// The estimates behind the well-definedness of `T`, truncated to the first
/// `truncation` members of every block.
#[derive(Debug, Clone, PartialEq)]
pub struct NormBoundReport {
    /// `p`, with `0` meaning the sup norm.
    pub p: f64,
    pub s_tilde: f64,
    pub truncation: u64,
    /// `||y_j (x) w_j||_p <= delta ||w_j|| ||xi||_p`, one per slot.
    pub per_term: Vec<BoundCheck>,
    /// `sum_j ||y_j (x) w_j||_p^s <= delta^s ||xi||_p^s sum_j ||w_j||^s`.
    pub aggregate: BoundCheck,
    /// `||T(w)||_p^s <= sum_j ||y_j (x) w_j||_p^s`.
    pub operator: BoundCheck,
}

impl NormBoundReport {
    pub fn holds(&self) -> bool {
        self.per_term.iter().all(|c| c.holds) && self.aggregate.holds && self.operator.holds
    }
}

/// Checks the norm estimates for `T` at exponent `p` (`p = 0`: sup norm,
/// with domain exponent 1). Each inequality holds when its slack is at
/// least `-tol * max(1, rhs)`.
pub fn t_norm_bound_check(op: &SpreadOperator, p: f64, truncation: u64, tol: f64) -> Result<NormBoundReport> {
    if truncation == 0 {
        return Err(Error::ZeroIndex(truncation));
    }
    let sup = p == 0.0;
    let s = if sup { 1.0 } else { tilde_s(p)? };
    let delta = op.family().delta();

    let xi_norm = if sup {
        (1..=truncation).map(|j| op.xi().get(j).abs()).fold(0.0, f64::max)
    } else {
        lq_partial(op.xi(), p, truncation)?.powf(1.0 / p)
    };

    let mut per_term = Vec::with_capacity(op.slots().len());
    let mut term_norms_s = NeumaierSum::new();
    let mut slot_norms_s = NeumaierSum::new();
    // p-th powers of every block, for the norm of the whole image
    let mut total_pow = NeumaierSum::new();
    let mut total_sup = 0.0f64;
    for i in 1..=op.slots().len() as u64 {
        let members = op.scheme().block_prefix(i, truncation)?;
        let lhs = if sup {
            let m = members.iter().map(|&n| op.coord_norm(n)).fold(0.0, f64::max);
            total_sup = total_sup.max(m);
            m
        } else {
            let acc: NeumaierSum = members.iter().map(|&n| abs_pow(op.coord_norm(n), p)).collect();
            total_pow.merge(&acc);
            acc.value().powf(1.0 / p)
        };
        let w_norm = op.slot_norm(i);
        per_term.push(scaled_check(lhs, delta * w_norm * xi_norm, tol));
        term_norms_s.add(lhs.powf(s));
        slot_norms_s.add(w_norm.powf(s));
    }

    let aggregate = scaled_check(
        term_norms_s.value(),
        (delta * xi_norm).powf(s) * slot_norms_s.value(),
        tol,
    );
    let image_norm = if sup {
        total_sup
    } else {
        total_pow.value().powf(1.0 / p)
    };
    let operator = scaled_check(image_norm.powf(s), term_norms_s.value(), tol);
    Ok(NormBoundReport {
        p,
        s_tilde: s,
        truncation,
        per_term,
        aggregate,
        operator,
    })
}

/// The lower-bound chain `sum_j ||z_{m_j}||^q >= delta^{-q} ||w_m||^q sum_j |xi_j|^q`,
/// verified term by term up to `terms`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainCheck {
    pub terms: u64,
    /// `sum_{j <= terms} ||z_{m_j}||^q`.
    pub partial: f64,
    /// `sum_{j <= terms} |xi_j|^q`, bit-identical to `lq_partial(xi, q, terms)`.
    pub xi_partial: f64,
    /// `delta^{-q} ||w_m||^q * xi_partial`.
    pub lower_bound: f64,
    /// First position where `||z_{m_j}||^q < delta^{-q} ||w_m||^q |xi_j|^q`
    /// beyond the relative tolerance.
    pub first_violation: Option<u64>,
}

impl ChainCheck {
    pub fn holds(&self) -> bool {
        self.first_violation.is_none() && self.partial >= self.lower_bound * (1.0 - TERMWISE_RTOL)
    }
}

/// Membership certificate for `z = T(w)` at exponent `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeCertificate {
    pub q: f64,
    /// Block `m` of the first nonzero `w_m`.
    pub block: u64,
    /// `delta^{-q} ||w_m||^q`.
    pub scale: f64,
    /// A divergence verdict sums over block `m` only and its threshold is
    /// `policy.divergence_threshold * scale`; a convergence verdict sums
    /// over every block.
    pub verdict: ConvergenceVerdict,
    /// Present for verdicts computed on block `m`.
    pub chain: Option<ChainCheck>,
}

impl RangeCertificate {
    pub fn certifies_divergence(&self) -> bool {
        self.verdict.is_divergent() && self.chain.is_some_and(|c| c.holds())
    }
}

/// Decides whether `T(w)` lies in the `q`-sum at the policy's scale.
///
/// When `xi` carries a tail envelope finite at `q` the whole image is summed
/// with tail bound `delta^q sum_i ||w_i||^q * remainder(xi)`. Otherwise the
/// `q`-sum over block `m` is searched for a crossing of the scaled threshold
/// while the chain of lower bounds is checked term by term.
pub fn range_divergence_certificate(op: &SpreadOperator, q: f64, policy: &NormPolicy) -> Result<RangeCertificate> {
    let q = check_exponent("q", q)?;
    let block = op.first_nonzero_slot().ok_or(Error::ZeroVectorList)?;
    let delta = op.family().delta();
    let scale = op.slot_norm(block).powf(q) / delta.powf(q);
    let xi = op.xi();

    let envelope = xi
        .envelope()
        .filter(|_| xi.tail_monotone_from().is_some())
        .filter(|env| env.remainder(q, policy.budget.max(3)).is_some());
    let finite = xi.support_end().filter(|&end| end <= policy.budget);
    if envelope.is_some() || finite.is_some() {
        let slots = op.slots().len() as u64;
        let weight: f64 = (1..=slots).map(|i| op.slot_norm(i).powf(q)).sum::<f64>() * delta.powf(q);
        let term = |j: u64| -> f64 {
            (1..=slots)
                .map(|i| op.block_term_norm(i, j).map_or(f64::INFINITY, |v| abs_pow(v, q)))
                .sum()
        };
        let verdict = match (finite, envelope) {
            (Some(end), _) => {
                let end = end.max(1);
                let value: NeumaierSum = (1..=end).map(term).collect();
                ConvergenceVerdict::Converged {
                    value: value.value(),
                    remainder_bound: 0.0,
                    at_index: end,
                }
            }
            (None, Some(env)) => scan_for_convergence(
                term,
                |n| env.remainder(q, n).map(|r| weight * r),
                policy.tolerance,
                policy.budget,
            ),
            (None, None) => unreachable!(),
        };
        return Ok(RangeCertificate {
            q,
            block,
            scale,
            verdict,
            chain: None,
        });
    }

    let threshold = policy.divergence_threshold * scale;
    let mut xi_acc = NeumaierSum::new();
    let mut first_violation = None;
    let mut verdict = scan_for_divergence(
        |j| {
            let t = op.block_term_norm(block, j).map_or(f64::NAN, |v| abs_pow(v, q));
            let x = abs_pow(xi.get(j), q);
            xi_acc.add(x);
            if first_violation.is_none() && !(t >= scale * x * (1.0 - TERMWISE_RTOL)) {
                first_violation = Some(j);
            }
            t
        },
        threshold,
        policy.budget,
    );
    let (terms, partial) = match verdict {
        ConvergenceVerdict::DivergenceCertificate {
            crossing_index,
            partial,
            ..
        } => (crossing_index, partial),
        ConvergenceVerdict::Undecided { budget, partial } => (budget, partial),
        ConvergenceVerdict::Converged { .. } => unreachable!("divergence scans never converge"),
    };
    if partial.is_nan() {
        verdict = ConvergenceVerdict::Undecided {
            budget: policy.budget,
            partial,
        };
    }
    let xi_partial = xi_acc.value();
    Ok(RangeCertificate {
        q,
        block,
        scale,
        verdict,
        chain: Some(ChainCheck {
            terms,
            partial,
            xi_partial,
            lower_bound: scale * xi_partial,
            first_violation,
        }),
    })
}

/// `n -> ||z_n||` tends to zero: an index past which every component norm of
/// `T(w)` is below `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeDecay {
    pub epsilon: f64,
    /// `(i, J_i)`: `|xi_j| delta ||w_i|| < eps` for every `j >= J_i`.
    pub per_block: Vec<(u64, DecayIndex)>,
    /// `max_i i_{J_i}`; exact when every entry fits a `u64`.
    pub index: DecayIndex,
}

/// Index of the `position`-th member of `block` as a real, for positions
/// beyond the integer range.
fn encode_real(scheme: PartitionScheme, block: u64, position: f64) -> f64 {
    let i = block as f64;
    match scheme {
        PartitionScheme::Dyadic => 2f64.powf(i - 1.0) * (2.0 * position - 1.0),
        PartitionScheme::Cantor => {
            let d = i + position - 1.0;
            d * (d - 1.0) / 2.0 + position
        }
    }
}

pub fn range_decay_check(op: &SpreadOperator, eps: f64) -> Result<RangeDecay> {
    let eps = check_exponent("epsilon", eps)?;
    let delta = op.family().delta();
    let mut per_block = Vec::new();
    let mut exact_max = 1u64;
    let mut real_max: Option<f64> = None;
    for i in 1..=op.slots().len() as u64 {
        let w_norm = op.slot_norm(i);
        if w_norm == 0.0 {
            continue;
        }
        let idx = c0_decay_check(op.xi(), eps / (delta * w_norm))?;
        match idx {
            DecayIndex::Exact(j) => match op.scheme().encode(i, j) {
                Ok(n) => exact_max = exact_max.max(n),
                Err(_) => {
                    let n = encode_real(op.scheme(), i, j as f64);
                    real_max = Some(real_max.map_or(n, |m| m.max(n)));
                }
            },
            DecayIndex::Sampled(j) => {
                let n = encode_real(op.scheme(), i, j);
                real_max = Some(real_max.map_or(n, |m| m.max(n)));
            }
        }
        per_block.push((i, idx));
    }
    let index = match real_max {
        Some(r) => DecayIndex::Sampled(r.max(exact_max as f64)),
        None => DecayIndex::Exact(exact_max),
    };
    Ok(RangeDecay {
        epsilon: eps,
        per_block,
        index,
    })
}

/// Rank of the coordinate-evaluation matrix of `k` range elements.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceReport {
    /// Row `i`: the image of `w_i` alone, evaluated at one sampled coordinate
    /// of each block (`n_c = c_{j_c}` with `xi_{j_c} != 0`, at the component
    /// where `R_{n_c}(w_c)` is largest).
    pub matrix: Vec<Vec<f64>>,
    pub sampled_coordinates: Vec<u64>,
    pub rank: usize,
}

pub fn range_independence_check(
    xi: &ScalarSequence,
    scheme: PartitionScheme,
    family: &IsomorphFamily,
    basis_w: &[Vec<f64>],
) -> Result<IndependenceReport> {
    if basis_w.is_empty() {
        return Err(Error::domain("k", 0.0, "need at least one model vector"));
    }
    let k = basis_w.len();
    let position = (1..=XI_SEARCH_LIMIT).find(|&j| xi.get(j) != 0.0);
    let mut sampled = Vec::with_capacity(k);
    let mut columns = Vec::with_capacity(k);
    for (c, w) in basis_w.iter().enumerate() {
        let block = c as u64 + 1;
        let n = scheme.encode(block, position.unwrap_or(1))?;
        let image = family.forward(n, w)?;
        let component = image
            .iter()
            .enumerate()
            .fold(
                (0, 0.0f64),
                |best, (idx, v)| if v.abs() > best.1 { (idx, v.abs()) } else { best },
            )
            .0;
        sampled.push(n);
        columns.push((n, component));
    }
    let mut matrix = Vec::with_capacity(k);
    for i in 0..k {
        let mut slots = vec![vec![0.0; family.model_dim()]; i + 1];
        slots[i] = basis_w[i].clone();
        let op = SpreadOperator::new(xi.clone(), scheme, *family, slots)?;
        let row = columns
            .iter()
            .map(|&(n, component)| op.coord(n).map(|z| z[component]))
            .collect::<Result<Vec<f64>>>()?;
        matrix.push(row);
    }
    let rank = linalg::rank(&matrix, 1e-12);
    Ok(IndependenceReport {
        matrix,
        sampled_coordinates: sampled,
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spread::family::{ComponentNorm, ComponentSpaceFamily, ScaleProfile};

    fn comps(dim: usize) -> ComponentSpaceFamily {
        ComponentSpaceFamily::homogeneous(dim, ComponentNorm::L1).unwrap()
    }

    fn unit(dim: usize, k: usize) -> Vec<f64> {
        let mut w = vec![0.0; dim];
        w[k] = 1.0;
        w
    }

    #[test]
    fn coordinate_formula_examples() {
        let xi = ScalarSequence::mother_ell_p(2.0).unwrap();
        let fam = IsomorphFamily::new(4.0, comps(3), ScaleProfile::Dyadic { seed: 3 }).unwrap();
        let w = vec![1.0, -2.0, 0.5];
        let op = SpreadOperator::new(xi.clone(), PartitionScheme::Dyadic, fam, vec![w.clone()]).unwrap();
        // n = 5 is the third member of block 1
        let expected: Vec<f64> = fam.forward(5, &w).unwrap().iter().map(|v| v * xi.get(3)).collect();
        assert_eq!(op.coord(5).unwrap(), expected);
        assert!(op.coord(2).unwrap().iter().all(|v| *v == 0.0));

        let shifted = SpreadOperator::new(xi, PartitionScheme::Dyadic, fam, vec![vec![0.0; 3], w]).unwrap();
        assert!(shifted.coord(5).unwrap().iter().all(|v| *v == 0.0));
        assert_eq!(shifted.first_nonzero_slot(), Some(2));
    }

    #[test]
    fn direct_sum_agrees() {
        let xi = ScalarSequence::mother_c0();
        let fam = IsomorphFamily::new(2.0, comps(2), ScaleProfile::Dyadic { seed: 5 }).unwrap();
        let slots = vec![vec![1.0, 2.0], vec![-0.5, 0.25], vec![3.0, 0.0]];
        for scheme in PartitionScheme::ALL {
            let op = SpreadOperator::new(xi.clone(), scheme, fam, slots.clone()).unwrap();
            for n in 1..=200 {
                assert_eq!(op.coord(n).unwrap(), op.coord_by_direct_sum(n).unwrap());
            }
        }
    }

    #[test]
    fn identity_family_meets_the_bound_with_equality() {
        let xi = ScalarSequence::mother_ell_p(2.0).unwrap();
        let fam = IsomorphFamily::identity(comps(4));
        let op = SpreadOperator::new(xi, PartitionScheme::Dyadic, fam, vec![unit(4, 2)]).unwrap();
        let report = t_norm_bound_check(&op, 2.0, 1000, 1e-12).unwrap();
        assert!(report.holds());
        assert_eq!(report.per_term[0].lhs, report.per_term[0].rhs);
    }

    #[test]
    fn zero_list_bound_is_trivial() {
        let xi = ScalarSequence::mother_ell_p(2.0).unwrap();
        let fam = IsomorphFamily::identity(comps(2));
        let op = SpreadOperator::new(xi, PartitionScheme::Dyadic, fam, vec![vec![0.0; 2]; 3]).unwrap();
        for p in [0.0, 0.5, 2.0] {
            let report = t_norm_bound_check(&op, p, 100, 1e-12).unwrap();
            assert!(report.holds());
            assert_eq!((report.aggregate.lhs, report.aggregate.rhs), (0.0, 0.0));
        }
    }

    #[test]
    fn doubling_delta_doubles_rhs() {
        let xi = ScalarSequence::mother_ell_p(1.5).unwrap();
        let w = vec![vec![0.5, -1.0], vec![0.0, 2.0]];
        let one = IsomorphFamily::identity(comps(2));
        let two = IsomorphFamily::new(2.0, comps(2), ScaleProfile::Dyadic { seed: 9 }).unwrap();
        let r1 = t_norm_bound_check(
            &SpreadOperator::new(xi.clone(), PartitionScheme::Cantor, one, w.clone()).unwrap(),
            1.5,
            500,
            1e-12,
        )
        .unwrap();
        let r2 = t_norm_bound_check(
            &SpreadOperator::new(xi, PartitionScheme::Cantor, two, w).unwrap(),
            1.5,
            500,
            1e-12,
        )
        .unwrap();
        assert!(r1.holds() && r2.holds());
        for (a, b) in r1.per_term.iter().zip(&r2.per_term) {
            assert_eq!(b.rhs, 2.0 * a.rhs);
            assert!(b.lhs <= 2.0 * a.lhs * (1.0 + 1e-12));
        }
    }

    #[test]
    fn divergence_fires_below_p_and_convergence_at_p() {
        let xi = ScalarSequence::mother_ell_p(2.0).unwrap();
        let fam = IsomorphFamily::new(2.0, comps(3), ScaleProfile::Dyadic { seed: 1 }).unwrap();
        let op = SpreadOperator::new(xi, PartitionScheme::Dyadic, fam, vec![unit(3, 0)]).unwrap();
        let policy = NormPolicy::new(1_000_000, 20.0, 1e-6).unwrap();
        let cert = range_divergence_certificate(&op, 1.0, &policy).unwrap();
        assert!(cert.certifies_divergence(), "{cert:?}");
        let chain = cert.chain.unwrap();
        assert_eq!(chain.xi_partial, lq_partial(op.xi(), 1.0, chain.terms).unwrap());
        assert!(chain.partial >= chain.lower_bound);

        let at_p = range_divergence_certificate(&op, 2.0, &policy).unwrap();
        assert!(at_p.verdict.is_converged(), "{at_p:?}");
    }

    #[test]
    fn zero_list_is_rejected() {
        let fam = IsomorphFamily::identity(comps(2));
        let op = SpreadOperator::new(
            ScalarSequence::mother_c0(),
            PartitionScheme::Dyadic,
            fam,
            vec![vec![0.0; 2]],
        )
        .unwrap();
        let err = range_divergence_certificate(&op, 1.0, &NormPolicy::default());
        assert_eq!(err, Err(Error::ZeroVectorList));
    }

    #[test]
    fn finitely_supported_xi_converges_exactly() {
        let xi = ScalarSequence::finite(&[1.0, 0.5]);
        let fam = IsomorphFamily::identity(comps(1));
        let op = SpreadOperator::new(xi, PartitionScheme::Dyadic, fam, vec![vec![2.0]]).unwrap();
        let cert = range_divergence_certificate(&op, 1.0, &NormPolicy::default()).unwrap();
        assert_eq!(
            cert.verdict,
            ConvergenceVerdict::Converged {
                value: 3.0,
                remainder_bound: 0.0,
                at_index: 2
            }
        );
    }

    #[test]
    fn range_decays_in_sup_norm() {
        let xi = ScalarSequence::mother_ell_p_plus(1.0).unwrap();
        let fam = IsomorphFamily::new(2.0, comps(2), ScaleProfile::Dyadic { seed: 4 }).unwrap();
        let op = SpreadOperator::new(xi, PartitionScheme::Dyadic, fam, vec![vec![1.0, 0.0], vec![0.0, 0.5]]).unwrap();
        let decay = range_decay_check(&op, 0.01).unwrap();
        // 1/j * 2 * 1 < 0.01 first at j = 201, 1/j * 2 * 0.5 < 0.01 at j = 101
        assert_eq!(
            decay.per_block,
            vec![(1, DecayIndex::Exact(201)), (2, DecayIndex::Exact(101))]
        );
        // members 401 and 2 * 201 = 402
        assert_eq!(decay.index, DecayIndex::Exact(402));
        let norms = op.component_norms();
        assert!((402..5000).all(|n| norms.get(n) < 0.01));
    }

    #[test]
    fn huge_decay_indices_are_sampled() {
        let fam = IsomorphFamily::identity(comps(1));
        let op = SpreadOperator::new(
            ScalarSequence::mother_c0(),
            PartitionScheme::Cantor,
            fam,
            vec![vec![1.0]],
        )
        .unwrap();
        let decay = range_decay_check(&op, 1e-2).unwrap();
        assert!(matches!(decay.index, DecayIndex::Sampled(x) if x > 1e80));
    }

    #[test]
    fn independence_examples() {
        let xi = ScalarSequence::mother_ell_p(2.0).unwrap();
        let fam = IsomorphFamily::new(2.0, comps(3), ScaleProfile::Dyadic { seed: 2 }).unwrap();
        let one = range_independence_check(&xi, PartitionScheme::Dyadic, &fam, &[vec![0.0, 1.0, 1.0]]).unwrap();
        assert_eq!(one.rank, 1);
        let three: Vec<Vec<f64>> = (0..3).map(|k| unit(3, k)).collect();
        assert_eq!(
            range_independence_check(&xi, PartitionScheme::Cantor, &fam, &three)
                .unwrap()
                .rank,
            3
        );
        let holed = [unit(3, 1), vec![0.0; 3]];
        assert_eq!(
            range_independence_check(&xi, PartitionScheme::Dyadic, &fam, &holed)
                .unwrap()
                .rank,
            1
        );
        assert!(range_independence_check(&xi, PartitionScheme::Dyadic, &fam, &[]).is_err());
    }
}
