use crate::error::{Error, Result};
use crate::norm::lq_partial_over;
use crate::partition::PartitionScheme;
use crate::sequence::ScalarSequence;
use crate::spread::family::IsomorphFamily;

/// Exponent of the domain `l_s(X)` of the spreading operator into a
/// `p`-sum: `1` for `p >= 1`, `p` for `0 < p < 1`.
pub fn tilde_s(p: f64) -> Result<f64> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::domain("p", p, "must be finite and positive"));
    }
    Ok(if p >= 1.0 { 1.0 } else { p })
}

/// `y_i = sum_j xi_j e_{i_j}`: `xi` copied onto block `i`.
pub fn make_y(block: u64, xi: &ScalarSequence, scheme: PartitionScheme) -> ScalarSequence {
    let inner = xi.clone();
    ScalarSequence::from_fn(format!("y_{block}[{}]", xi.label()), move |n| match scheme.decode(n) {
        Ok(b) if b.block == block => inner.get(b.position),
        _ => 0.0,
    })
}

/// `sum_{j <= count} |y_{i_j}|^r` over the first `count` members of block `i`.
pub fn block_restricted_partial(
    y: &ScalarSequence,
    block: u64,
    scheme: PartitionScheme,
    r: f64,
    count: u64,
) -> Result<f64> {
    lq_partial_over(y, r, scheme.block_prefix(block, count)?)
}

/// `x_n * R_n(w)`.
pub fn tensor_coord(x: &ScalarSequence, w: &[f64], fam: &IsomorphFamily, n: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::ZeroIndex(n));
    }
    let xn = x.get(n);
    let mut z = fam.forward(n, w)?;
    for v in &mut z {
        *v *= xn;
    }
    Ok(z)
}

/// `x (x) w = (x_n R_n(w))_n`, evaluated lazily.
#[derive(Debug, Clone)]
pub struct TensorSequence {
    x: ScalarSequence,
    w: Vec<f64>,
    family: IsomorphFamily,
}

impl TensorSequence {
    pub fn new(x: ScalarSequence, w: Vec<f64>, family: IsomorphFamily) -> Result<Self> {
        if w.len() != family.model_dim() {
            return Err(Error::DimensionMismatch {
                expected: family.model_dim(),
                actual: w.len(),
            });
        }
        Ok(TensorSequence { x, w, family })
    }

    pub fn scalar_part(&self) -> &ScalarSequence {
        &self.x
    }

    pub fn vector_part(&self) -> &[f64] {
        &self.w
    }

    pub fn family(&self) -> &IsomorphFamily {
        &self.family
    }

    pub fn coord(&self, n: u64) -> Result<Vec<f64>> {
        tensor_coord(&self.x, &self.w, &self.family, n)
    }

    /// `||x_n R_n(w)||`.
    pub fn coord_norm(&self, n: u64) -> f64 {
        self.family.scaled_image_norm(n, self.x.get(n), &self.w)
    }
}
