//! The intersection of the `q`-sums over `q > p`, seen through a countable
//! ladder of norms `||.||_{p_k}` with `p_k` decreasing to `p`.

use crate::error::{Error, Result};
use crate::norm::{abs_pow, lq_partial, BoundCheck, NeumaierSum, NormPolicy};
use crate::spread::operator::{range_divergence_certificate, RangeCertificate, SpreadOperator};

pub const DEFAULT_RUNGS: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct PlusSpaceLadder {
    p: f64,
    rungs: Vec<f64>,
}

impl PlusSpaceLadder {
    /// `p_k = p + 1/k` for `k = 1..=rungs`.
    pub fn new(p: f64, rungs: usize) -> Result<Self> {
        Self::from_rungs(p, (1..=rungs).map(|k| p + 1.0 / k as f64).collect())
    }

    pub fn from_rungs(p: f64, rungs: Vec<f64>) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::domain("p", p, "must be finite and at least 1"));
        }
        if rungs.is_empty() {
            return Err(Error::domain("rungs", 0.0, "need at least one rung"));
        }
        for (k, &q) in rungs.iter().enumerate() {
            if !(q.is_finite() && q > p) {
                return Err(Error::domain("rung", q, "must exceed p"));
            }
            if k > 0 && !(q < rungs[k - 1]) {
                return Err(Error::domain("rung", q, "rungs must strictly decrease"));
            }
        }
        Ok(PlusSpaceLadder { p, rungs })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn rungs(&self) -> &[f64] {
        &self.rungs
    }
}

/// Convergence of `s_n = sum_{j <= n} y_j (x) w_j` in one norm `||.||_q`,
/// truncated to the first `truncation` members of each block.
#[derive(Debug, Clone, PartialEq)]
pub struct RungReport {
    pub q: f64,
    /// `sum_{j <= n} ||y_j (x) w_j||_q <= delta ||xi||_q ||(w_j)||_1`, for each `n`.
    pub partial_sum_bounds: Vec<BoundCheck>,
    /// `||s_n - S||_q` for `n = 0, 1, ..., k`, where `S = s_k` is the limit.
    pub tails: Vec<f64>,
    /// `||s_n - S||_q <= delta ||xi||_q sum_{j > n} ||w_j||`.
    pub tail_bounds: Vec<BoundCheck>,
    /// Coordinates of `S` at the sampled indices, as evaluated for this rung.
    pub limit_coordinates: Vec<Vec<f64>>,
}

impl RungReport {
    pub fn tails_shrink(&self) -> bool {
        self.tails.windows(2).all(|w| w[1] <= w[0]) && self.tails.last().is_none_or(|t| *t == 0.0)
    }

    pub fn holds(&self) -> bool {
        self.partial_sum_bounds.iter().all(|c| c.holds)
            && self.tail_bounds.iter().all(|c| c.holds)
            && self.tails_shrink()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlusSpaceReport {
    pub rungs: Vec<RungReport>,
    /// Every rung produced bit-identical limit coordinates.
    pub rung_independent: bool,
    pub sampled_coordinates: Vec<u64>,
    /// `||.||_p` divergence of the limit; `None` for an all-zero list.
    pub divergence_at_p: Option<RangeCertificate>,
}

impl PlusSpaceReport {
    pub fn holds(&self) -> bool {
        self.rungs.iter().all(RungReport::holds)
            && self.rung_independent
            && self.divergence_at_p.as_ref().is_none_or(|c| c.certifies_divergence())
    }
}

/// Runs the ladder checks for `op` (whose `xi` should lie in every `l_q`,
/// `q > p`, but not in `l_p`).
pub fn plus_space_cauchy_check(
    op: &SpreadOperator,
    ladder: &PlusSpaceLadder,
    truncation: u64,
    sample_coordinates: u64,
    policy: &NormPolicy,
    tol: f64,
) -> Result<PlusSpaceReport> {
    if truncation == 0 {
        return Err(Error::ZeroIndex(truncation));
    }
    let delta = op.family().delta();
    let k = op.slots().len() as u64;
    let w_norms: Vec<f64> = (1..=k).map(|i| op.slot_norm(i)).collect();
    let w_l1: f64 = w_norms.iter().sum();
    let sampled: Vec<u64> = (1..=sample_coordinates).collect();

    let mut rungs = Vec::with_capacity(ladder.rungs().len());
    for &q in ladder.rungs() {
        let xi_norm = lq_partial(op.xi(), q, truncation)?.powf(1.0 / q);
        let rhs = delta * xi_norm * w_l1;

        // q-th power sums of each y_j (x) w_j over its block
        let mut block_pows = Vec::with_capacity(k as usize);
        for i in 1..=k {
            let mut acc = NeumaierSum::new();
            for j in 1..=truncation {
                acc.add(abs_pow(op.block_term_norm(i, j)?, q));
            }
            block_pows.push(acc.value());
        }

        let mut running = 0.0;
        let mut partial_sum_bounds = Vec::with_capacity(k as usize);
        for pow in &block_pows {
            running += pow.powf(1.0 / q);
            partial_sum_bounds.push(BoundCheck::new(running, rhs, tol * rhs.max(1.0)));
        }

        // disjoint blocks: ||s_n - s_k||_q^q = sum_{j > n} ||y_j (x) w_j||_q^q
        let mut tails = vec![0.0; k as usize + 1];
        let mut tail_bounds = Vec::with_capacity(k as usize + 1);
        let mut tail_pow = NeumaierSum::new();
        for n in (0..k as usize).rev() {
            tail_pow.add(block_pows[n]);
            tails[n] = tail_pow.value().powf(1.0 / q);
        }
        for (n, &tail) in tails.iter().enumerate() {
            let w_rest: f64 = w_norms[n..].iter().sum();
            let bound = delta * xi_norm * w_rest;
            tail_bounds.push(BoundCheck::new(tail, bound, tol * bound.max(1.0)));
        }

        let limit_coordinates = sampled
            .iter()
            .map(|&n| op.coord_by_direct_sum(n))
            .collect::<Result<Vec<_>>>()?;
        rungs.push(RungReport {
            q,
            partial_sum_bounds,
            tails,
            tail_bounds,
            limit_coordinates,
        });
    }

    let rung_independent = rungs
        .windows(2)
        .all(|w| w[0].limit_coordinates == w[1].limit_coordinates)
        && rungs.first().is_none_or(|r| {
            r.limit_coordinates
                .iter()
                .zip(&sampled)
                .all(|(z, &n)| op.coord(n).is_ok_and(|c| &c == z))
        });

    let divergence_at_p = match op.first_nonzero_slot() {
        Some(_) => Some(range_divergence_certificate(op, ladder.p(), policy)?),
        None => None,
    };
    Ok(PlusSpaceReport {
        rungs,
        rung_independent,
        sampled_coordinates: sampled,
        divergence_at_p,
    })
}
