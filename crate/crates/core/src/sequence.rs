//! Formula-defined real sequences indexed from 1.
//!
//! A [`ScalarSequence`] is an immutable, cheaply clonable handle around a
//! pure generator. Built-in mother vectors additionally carry a registered
//! [`TailEnvelope`] (closed-form integral-test bound for the tail of
//! `sum |x_j|^q`) and a real-argument extension of their formula, which the
//! norm engine uses for certificates that reach beyond `u64` indices.

use std::fmt;
use std::sync::Arc;

use crate::error::{require_positive, Error, Result};

type Generator = Arc<dyn Fn(u64) -> f64 + Send + Sync>;
type Extension = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Largest index at which an `f64` still represents every integer exactly.
pub const EXACT_F64_INDEX: u64 = 1 << 53;

/// Closed-form upper bounds for `sum_{j > n} |x_j|^q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailEnvelope {
    /// `|x_j| = (j ln^2(j+1))^(-1/p)`.
    LogSquared { p: f64 },
    /// `|x_j| = j^(-1/p)`.
    Power { p: f64 },
    /// `|x_j| <= scale * |ratio|^j` with `|ratio| < 1`.
    Geometric { scale: f64, ratio: f64 },
}

impl TailEnvelope {
    /// Upper bound on `sum_{j > n} |x_j|^q`, or `None` when the tail series
    /// diverges at `q` or the bound is not valid at `n`.
    pub fn remainder(&self, q: f64, n: u64) -> Option<f64> {
        if !(q > 0.0) || n == 0 {
            return None;
        }
        let nf = n as f64;
        match *self {
            TailEnvelope::LogSquared { p } => {
                // For x >= n >= 3: (x ln^2(x+1))^-r <= (x ln^2 x)^-1 (n ln^2 n)^(1-r),
                // and the integral of (x ln^2 x)^-1 over [n, inf) is 1/ln n.
                let r = q / p;
                if r < 1.0 || n < 3 {
                    return None;
                }
                let ln = nf.ln();
                Some((nf * ln * ln).powf(1.0 - r) / ln)
            }
            TailEnvelope::Power { p } => {
                let r = q / p;
                if r <= 1.0 {
                    return None;
                }
                Some(nf.powf(1.0 - r) / (r - 1.0))
            }
            TailEnvelope::Geometric { scale, ratio } => {
                let rq = ratio.abs().powf(q);
                if rq >= 1.0 {
                    return None;
                }
                Some(scale.abs().powf(q) * rq.powf(nf + 1.0) / (1.0 - rq))
            }
        }
    }
}

/// A total map from indices `j >= 1` to reals.
#[derive(Clone)]
pub struct ScalarSequence {
    generator: Generator,
    extension: Option<Extension>,
    tail_monotone_from: Option<u64>,
    envelope: Option<TailEnvelope>,
    support_end: Option<u64>,
    label: String,
}

impl fmt::Debug for ScalarSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarSequence")
            .field("label", &self.label)
            .field("tail_monotone_from", &self.tail_monotone_from)
            .field("envelope", &self.envelope)
            .field("support_end", &self.support_end)
            .finish()
    }
}

impl ScalarSequence {
    /// Wraps an arbitrary generator. No tail information is attached.
    pub fn from_fn<F>(label: impl Into<String>, generator: F) -> Self
    where
        F: Fn(u64) -> f64 + Send + Sync + 'static,
    {
        ScalarSequence {
            generator: Arc::new(generator),
            extension: None,
            tail_monotone_from: None,
            envelope: None,
            support_end: None,
            label: label.into(),
        }
    }

    pub fn zero() -> Self {
        let mut seq = Self::from_fn("0", |_| 0.0);
        seq.support_end = Some(0);
        seq.tail_monotone_from = Some(1);
        seq
    }

    /// Canonical unit vector `e_n`.
    pub fn unit(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroIndex(n));
        }
        let mut seq = Self::from_fn(format!("e_{n}"), move |j| if j == n { 1.0 } else { 0.0 });
        seq.support_end = Some(n);
        seq.tail_monotone_from = Some(n);
        Ok(seq)
    }

    /// `(values[0], values[1], ..., 0, 0, ...)`.
    pub fn finite(values: &[f64]) -> Self {
        let values: Arc<[f64]> = values.into();
        let end = values.iter().rposition(|v| *v != 0.0).map_or(0, |k| k as u64 + 1);
        let label = format!("finite[{}]", values.len());
        let mut seq = Self::from_fn(label, move |j| {
            values.get((j as usize).wrapping_sub(1)).copied().unwrap_or(0.0)
        });
        seq.support_end = Some(end);
        seq.tail_monotone_from = Some(end.max(1));
        seq
    }

    /// `x_j = scale * ratio^j`, summable for `|ratio| < 1`.
    pub fn geometric(scale: f64, ratio: f64) -> Result<Self> {
        if !scale.is_finite() {
            return Err(Error::domain("scale", scale, "must be finite"));
        }
        if !(ratio.abs() < 1.0) {
            return Err(Error::domain("ratio", ratio, "must satisfy |ratio| < 1"));
        }
        let mut seq = Self::from_fn(format!("{scale}*({ratio})^j"), move |j| scale * ratio.powf(j as f64));
        if ratio >= 0.0 {
            seq.extension = Some(Arc::new(move |x| scale * ratio.powf(x)));
        }
        seq.tail_monotone_from = Some(1);
        seq.envelope = Some(TailEnvelope::Geometric { scale, ratio });
        Ok(seq)
    }

    /// `x_j = (j ln^2(j+1))^(-1/p)`: in `l_p` but in no `l_q` with `q < p`.
    pub fn mother_ell_p(p: f64) -> Result<Self> {
        let p = require_positive("p", p)?;
        let formula = move |x: f64| {
            let l = x.ln_1p();
            (x * l * l).powf(-1.0 / p)
        };
        let mut seq = Self::from_fn(format!("(j ln^2(j+1))^(-1/{p})"), move |j| formula(j as f64));
        seq.extension = Some(Arc::new(formula));
        seq.tail_monotone_from = Some(1);
        seq.envelope = Some(TailEnvelope::LogSquared { p });
        Ok(seq)
    }

    /// `x_j = 1/ln(j+1)`: null, but in no `l_q`.
    pub fn mother_c0() -> Self {
        let formula = |x: f64| 1.0 / x.ln_1p();
        let mut seq = Self::from_fn("1/ln(j+1)", move |j| formula(j as f64));
        seq.extension = Some(Arc::new(formula));
        seq.tail_monotone_from = Some(1);
        seq
    }

    /// `x_j = j^(-1/p)`: in every `l_q` with `q > p` but not in `l_p`.
    pub fn mother_ell_p_plus(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::domain("p", p, "must be finite and at least 1"));
        }
        let formula = move |x: f64| x.powf(-1.0 / p);
        let mut seq = Self::from_fn(format!("j^(-1/{p})"), move |j| formula(j as f64));
        seq.extension = Some(Arc::new(formula));
        seq.tail_monotone_from = Some(1);
        seq.envelope = Some(TailEnvelope::Power { p });
        Ok(seq)
    }

    /// Pointwise `sum c_k * s_k`. An empty list is the zero sequence.
    ///
    /// Tail information is dropped, except that finite support survives when
    /// every term is finitely supported.
    pub fn lin_comb(terms: &[(f64, ScalarSequence)]) -> Self {
        if terms.is_empty() {
            return Self::zero();
        }
        let support_end = terms
            .iter()
            .map(|(_, s)| s.support_end)
            .try_fold(0u64, |acc, end| end.map(|e| acc.max(e)));
        let label = terms
            .iter()
            .map(|(c, s)| format!("{c}*[{}]", s.label))
            .collect::<Vec<_>>()
            .join(" + ");
        let parts: Arc<[(f64, Generator)]> = terms.iter().map(|(c, s)| (*c, Arc::clone(&s.generator))).collect();
        let mut seq = Self::from_fn(label, move |j| parts.iter().fold(0.0, |acc, (c, g)| acc + c * g(j)));
        seq.support_end = support_end;
        seq
    }

    /// Value at `j`. Callers guarantee `j >= 1`.
    #[inline]
    pub fn get(&self, j: u64) -> f64 {
        debug_assert!(j >= 1, "sequences are 1-indexed");
        (self.generator)(j)
    }

    pub fn eval(&self, j: u64) -> Result<f64> {
        if j == 0 {
            return Err(Error::ZeroIndex(j));
        }
        Ok(self.get(j))
    }

    /// Value at a real index `x >= 1`: the registered formula extension when
    /// present, else the generator at exactly representable integers.
    pub fn eval_real(&self, x: f64) -> Option<f64> {
        if !(x >= 1.0) {
            return None;
        }
        match &self.extension {
            Some(ext) => Some(ext(x)),
            None if x.fract() == 0.0 && x <= EXACT_F64_INDEX as f64 => Some(self.get(x as u64)),
            None => None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn tail_monotone_from(&self) -> Option<u64> {
        self.tail_monotone_from
    }

    pub fn envelope(&self) -> Option<TailEnvelope> {
        self.envelope
    }

    /// Last index that may be nonzero, when the support is known to be finite.
    pub fn support_end(&self) -> Option<u64> {
        self.support_end
    }
}
