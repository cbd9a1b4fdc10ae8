use crate::error::{Error, Result};
use crate::linalg;
use crate::norm::{classify, BoundCheck, ConvergenceVerdict, NormPolicy};
use crate::partition::PartitionScheme;
use crate::sequence::ScalarSequence;

/// A point `(x_1, ..., x_N, 0, 0, ...)` of `c_0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TruncatedPoint {
    coords: Vec<f64>,
}

impl TruncatedPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        TruncatedPoint { coords }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `scale * e_n`.
    pub fn unit(n: u64, scale: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroIndex(n));
        }
        let mut coords = vec![0.0; n as usize];
        coords[n as usize - 1] = scale;
        Ok(TruncatedPoint { coords })
    }

    /// `x_n`, zero beyond the truncation.
    #[inline]
    pub fn coord(&self, n: u64) -> f64 {
        debug_assert!(n >= 1);
        self.coords.get((n - 1) as usize).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> u64 {
        self.coords.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn sup_norm(&self) -> f64 {
        self.coords.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// `f_n(x) = sqrt|x_n| + 1/(n+1)`.
#[inline]
pub fn dieudonne_coord(n: u64, x: &TruncatedPoint) -> f64 {
    x.coord(n).abs().sqrt() + 1.0 / (n as f64 + 1.0)
}

/// Coordinate `n` of the spread of Dieudonné's field over `block`.
pub fn spread_coord(block: u64, scheme: PartitionScheme, n: u64, x: &TruncatedPoint) -> Result<f64> {
    let at = scheme.decode(n)?;
    Ok(if at.block == block { dieudonne_coord(n, x) } else { 0.0 })
}

/// A coefficient sequence `(a_i)` with a certified finite `l_1` norm.
#[derive(Debug, Clone)]
pub struct L1Coefficients {
    seq: ScalarSequence,
    l1_bound: f64,
    /// No nonzero coefficient lies beyond this index.
    search_limit: Option<u64>,
}

impl L1Coefficients {
    pub fn finite(values: &[f64]) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain("coefficient", *bad, "must be finite"));
        }
        let seq = ScalarSequence::finite(values);
        Ok(L1Coefficients {
            l1_bound: values.iter().map(|v| v.abs()).sum(),
            search_limit: seq.support_end(),
            seq,
        })
    }

    /// Accepts `seq` when its `l_1` sum is certified convergent under `policy`.
    pub fn certify(seq: ScalarSequence, policy: &NormPolicy) -> Result<Self> {
        match classify(&seq, 1.0, policy)? {
            ConvergenceVerdict::Converged {
                value, remainder_bound, ..
            } => Ok(L1Coefficients {
                l1_bound: value + remainder_bound,
                search_limit: seq.support_end(),
                seq,
            }),
            _ => Err(Error::NotSummable(seq.label().to_owned())),
        }
    }

    #[inline]
    pub fn get(&self, i: u64) -> f64 {
        self.seq.get(i)
    }

    pub fn sequence(&self) -> &ScalarSequence {
        &self.seq
    }

    /// Upper bound on `sum |a_i|`.
    pub fn l1_bound(&self) -> f64 {
        self.l1_bound
    }

    /// `sum_{i <= m} |a_i|`.
    pub fn partial_l1(&self, m: u64) -> f64 {
        (1..=m).map(|i| self.get(i).abs()).sum()
    }

    /// Least `i <= limit` with `a_i != 0`.
    pub fn first_nonzero(&self, limit: u64) -> Option<u64> {
        let limit = self.search_limit.map_or(limit, |end| end.min(limit));
        (1..=limit).find(|&i| self.get(i) != 0.0)
    }
}

/// Coordinate `n` of `L(a) = sum_i a_i N_i f`: with `n` in block `i`, only
/// the `i`-th term is nonzero there, so the value is `a_i f_n(x)`.
pub fn combined_eval(a: &L1Coefficients, scheme: PartitionScheme, n: u64, x: &TruncatedPoint) -> Result<f64> {
    let block = scheme.decode(n)?.block;
    Ok(a.get(block) * dieudonne_coord(n, x))
}

/// Coordinate `n` of the partial sum `sum_{i <= m} a_i N_i f`, term by term.
pub fn partial_combined_coord(
    a: &L1Coefficients,
    scheme: PartitionScheme,
    m: u64,
    n: u64,
    x: &TruncatedPoint,
) -> Result<f64> {
    let mut acc = 0.0;
    for i in 1..=m {
        acc += a.get(i) * spread_coord(i, scheme, n, x)?;
    }
    Ok(acc)
}

/// A coordinatewise vector field on `c_0`.
#[derive(Debug, Clone)]
pub enum CoordinateField {
    Dieudonne,
    Spread {
        block: u64,
        scheme: PartitionScheme,
    },
    Combined {
        coefficients: L1Coefficients,
        scheme: PartitionScheme,
    },
}

impl CoordinateField {
    pub fn coord(&self, n: u64, x: &TruncatedPoint) -> Result<f64> {
        if n == 0 {
            return Err(Error::ZeroIndex(n));
        }
        match self {
            CoordinateField::Dieudonne => Ok(dieudonne_coord(n, x)),
            CoordinateField::Spread { block, scheme } => spread_coord(*block, *scheme, n, x),
            CoordinateField::Combined { coefficients, scheme } => combined_eval(coefficients, *scheme, n, x),
        }
    }

    /// Coordinates `1..=n_max` of the field at `x`.
    pub fn eval(&self, x: &TruncatedPoint, n_max: u64) -> Result<Vec<f64>> {
        (1..=n_max).map(|n| self.coord(n, x)).collect()
    }
}

/// `||sum_{i<=m} a_i N_i f(x)|| <= ||f(x)|| sum_{i<=m} |a_i|`, sup norms over
/// coordinates `1..=n_trunc`.
pub fn l1_bound_check(
    a: &L1Coefficients,
    scheme: PartitionScheme,
    x: &TruncatedPoint,
    m: u64,
    n_trunc: u64,
    tolerance: f64,
) -> Result<BoundCheck> {
    if m == 0 {
        return Err(Error::ZeroIndex(m));
    }
    let mut lhs = 0.0f64;
    let mut field_sup = 0.0f64;
    for n in 1..=n_trunc {
        lhs = lhs.max(partial_combined_coord(a, scheme, m, n, x)?.abs());
        field_sup = field_sup.max(dieudonne_coord(n, x).abs());
    }
    Ok(BoundCheck::new(lhs, field_sup * a.partial_l1(m), tolerance))
}

/// `||sum a_i N_i f(x) - sum a_i N_i f(y)|| <= ||f(x) - f(y)|| sum_{i<=m} |a_i|`.
pub fn lipschitz_transfer_check(
    a: &L1Coefficients,
    scheme: PartitionScheme,
    x: &TruncatedPoint,
    y: &TruncatedPoint,
    m: u64,
    n_trunc: u64,
    tolerance: f64,
) -> Result<BoundCheck> {
    if m == 0 {
        return Err(Error::ZeroIndex(m));
    }
    let mut lhs = 0.0f64;
    let mut diff_sup = 0.0f64;
    for n in 1..=n_trunc {
        let fx = partial_combined_coord(a, scheme, m, n, x)?;
        let fy = partial_combined_coord(a, scheme, m, n, y)?;
        lhs = lhs.max((fx - fy).abs());
        diff_sup = diff_sup.max((dieudonne_coord(n, x) - dieudonne_coord(n, y)).abs());
    }
    Ok(BoundCheck::new(lhs, diff_sup * a.partial_l1(m), tolerance))
}

/// Evaluation matrix of the spreads over `blocks` at `x`, one sampled
/// coordinate (the block's first member) per block. Row `r` is coordinate
/// `encode(blocks[r], 1)`, column `s` is field `N_{blocks[s]} f`.
pub fn spread_evaluation_matrix(blocks: &[u64], scheme: PartitionScheme, x: &TruncatedPoint) -> Result<Vec<Vec<f64>>> {
    blocks
        .iter()
        .map(|&row_block| {
            let n = scheme.encode(row_block, 1)?;
            blocks
                .iter()
                .map(|&col_block| spread_coord(col_block, scheme, n, x))
                .collect()
        })
        .collect()
}

pub fn spread_independence_rank(blocks: &[u64], scheme: PartitionScheme, x: &TruncatedPoint) -> Result<usize> {
    let matrix = spread_evaluation_matrix(blocks, scheme, x)?;
    Ok(linalg::rank(&matrix, 1e-12))
}
