//! Finite-dimensional stand-ins for the components `X_n` and for a family of
//! uniform isomorphs `R_n: X -> X_n`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Norm used on every component and on the model space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ComponentNorm {
    #[default]
    L1,
    L2,
    Sup,
}

impl ComponentNorm {
    pub fn norm(self, v: &[f64]) -> f64 {
        self.norm_of(v.iter().copied())
    }

    /// Norm of a vector given by its coordinates in order. Zero padding does
    /// not change any of the three norms.
    pub fn norm_of<I: IntoIterator<Item = f64>>(self, coords: I) -> f64 {
        let coords = coords.into_iter();
        match self {
            ComponentNorm::L1 => coords.fold(0.0, |acc, v| acc + v.abs()),
            ComponentNorm::L2 => coords.fold(0.0, |acc, v| acc + v * v).sqrt(),
            ComponentNorm::Sup => coords.fold(0.0, |acc: f64, v| acc.max(v.abs())),
        }
    }
}

impl fmt::Display for ComponentNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComponentNorm::L1 => "l1",
            ComponentNorm::L2 => "l2",
            ComponentNorm::Sup => "sup",
        })
    }
}

impl FromStr for ComponentNorm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "l1" => Ok(ComponentNorm::L1),
            "l2" => Ok(ComponentNorm::L2),
            "sup" => Ok(ComponentNorm::Sup),
            other => Err(format!("unknown component norm `{other}` (expected l1, l2 or sup)")),
        }
    }
}

/// The components `X_n = R^{d_n}` with `d_n = model_dim + (n mod (padding + 1))`.
///
/// `padding = 0` is the homogeneous case `X_n = X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentSpaceFamily {
    model_dim: usize,
    padding: usize,
    norm: ComponentNorm,
}

impl ComponentSpaceFamily {
    pub fn homogeneous(model_dim: usize, norm: ComponentNorm) -> Result<Self> {
        Self::padded(model_dim, 0, norm)
    }

    pub fn padded(model_dim: usize, padding: usize, norm: ComponentNorm) -> Result<Self> {
        if model_dim == 0 {
            return Err(Error::domain("model_dim", 0.0, "must be at least 1"));
        }
        Ok(ComponentSpaceFamily {
            model_dim,
            padding,
            norm,
        })
    }

    pub fn model_dim(&self) -> usize {
        self.model_dim
    }

    pub fn norm(&self) -> ComponentNorm {
        self.norm
    }

    pub fn component_dim(&self, n: u64) -> usize {
        self.model_dim + (n % (self.padding as u64 + 1)) as usize
    }

    /// Where the copy of `X` starts inside `X_n`.
    fn offset(&self, n: u64) -> usize {
        let room = (self.component_dim(n) - self.model_dim) as u64;
        ((n / (self.padding as u64 + 1)) % (room + 1)) as usize
    }
}

/// How the scale `c_n` of `R_n = c_n * embedding` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleProfile {
    /// `c_n = 2^{k_n}` with `k_n` drawn from `[-K, K]`, `K = floor(log2 delta)`,
    /// by hashing `(seed, n)`. Powers of two make `R_n^{-1} R_n` exact.
    Dyadic { seed: u64 },
    /// The same `c` for every `n`.
    Constant(f64),
}

/// Uniform isomorphs `R_n(w) = c_n * J_n(w)` with `J_n` an isometric
/// coordinate embedding of `X = R^{model_dim}` into `X_n` and
/// `1/delta <= c_n <= delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsomorphFamily {
    delta: f64,
    components: ComponentSpaceFamily,
    profile: ScaleProfile,
    max_exponent: i32,
}

impl IsomorphFamily {
    pub fn new(delta: f64, components: ComponentSpaceFamily, profile: ScaleProfile) -> Result<Self> {
        if !(delta.is_finite() && delta >= 1.0) {
            return Err(Error::domain("delta", delta, "must be finite and at least 1"));
        }
        if let ScaleProfile::Constant(c) = profile {
            if !(c.is_finite() && c >= 1.0 / delta && c <= delta) {
                return Err(Error::domain("scale", c, "must lie in [1/delta, delta]"));
            }
        }
        Ok(IsomorphFamily {
            delta,
            components,
            profile,
            max_exponent: delta.log2().floor() as i32,
        })
    }

    /// Isometric embeddings, `delta = 1`.
    pub fn identity(components: ComponentSpaceFamily) -> Self {
        Self::new(1.0, components, ScaleProfile::Constant(1.0)).expect("identity family is valid")
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn components(&self) -> &ComponentSpaceFamily {
        &self.components
    }

    pub fn model_dim(&self) -> usize {
        self.components.model_dim
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        self.components.norm.norm(v)
    }

    /// `c_n`, which equals both `||R_n||` and `1/||R_n^{-1}||`.
    pub fn scale(&self, n: u64) -> f64 {
        match self.profile {
            ScaleProfile::Constant(c) => c,
            ScaleProfile::Dyadic { seed } => {
                let span = 2 * self.max_exponent as u64 + 1;
                let k = (mix64(seed ^ mix64(n)) % span) as i32 - self.max_exponent;
                2f64.powi(k)
            }
        }
    }

    fn check_model(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.model_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.model_dim(),
                actual: w.len(),
            });
        }
        Ok(())
    }

    /// `R_n(w)` as a vector of length `d_n`.
    pub fn forward(&self, n: u64, w: &[f64]) -> Result<Vec<f64>> {
        self.check_model(w)?;
        let mut out = vec![0.0; self.components.component_dim(n)];
        let offset = self.components.offset(n);
        let c = self.scale(n);
        for (slot, &wk) in out[offset..].iter_mut().zip(w) {
            *slot = c * wk;
        }
        Ok(out)
    }

    /// `R_n^{-1}(z)` for `z` in the range of `R_n`; coordinates outside the
    /// embedded copy are ignored.
    pub fn backward(&self, n: u64, z: &[f64]) -> Result<Vec<f64>> {
        let dim = self.components.component_dim(n);
        if z.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: z.len(),
            });
        }
        let offset = self.components.offset(n);
        let c = self.scale(n);
        Ok(z[offset..offset + self.model_dim()].iter().map(|v| v / c).collect())
    }

    /// `||s * R_n(w)||` without materializing the vector; the coordinates are
    /// formed exactly as `s * forward(n, w)[k]`.
    pub(crate) fn scaled_image_norm(&self, n: u64, s: f64, w: &[f64]) -> f64 {
        let c = self.scale(n);
        self.components.norm.norm_of(w.iter().map(|&wk| s * (c * wk)))
    }
}

/// The splitmix64 finalizer, used as a stateless hash of coordinate indices.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn components() -> ComponentSpaceFamily {
        ComponentSpaceFamily::homogeneous(4, ComponentNorm::L1).unwrap()
    }

    #[test]
    fn norms() {
        let v = [3.0, -4.0, 0.0];
        assert_eq!(ComponentNorm::L1.norm(&v), 7.0);
        assert_eq!(ComponentNorm::L2.norm(&v), 5.0);
        assert_eq!(ComponentNorm::Sup.norm(&v), 4.0);
        for n in [ComponentNorm::L1, ComponentNorm::L2, ComponentNorm::Sup] {
            assert_eq!(n.to_string().parse::<ComponentNorm>().unwrap(), n);
        }
    }

    #[test]
    fn invalid_families() {
        assert!(ComponentSpaceFamily::homogeneous(0, ComponentNorm::L1).is_err());
        assert!(IsomorphFamily::new(0.5, components(), ScaleProfile::Constant(1.0)).is_err());
        assert!(IsomorphFamily::new(2.0, components(), ScaleProfile::Constant(3.0)).is_err());
        assert!(IsomorphFamily::new(2.0, components(), ScaleProfile::Constant(0.5)).is_ok());
    }

    #[test]
    fn dyadic_scales_stay_in_range_and_vary() {
        let fam = IsomorphFamily::new(8.0, components(), ScaleProfile::Dyadic { seed: 7 }).unwrap();
        let scales: Vec<f64> = (1..=200).map(|n| fam.scale(n)).collect();
        assert!(scales
            .iter()
            .all(|&c| (0.125..=8.0).contains(&c) && c.log2().fract() == 0.0));
        assert!(scales.iter().any(|&c| c < 1.0) && scales.iter().any(|&c| c > 1.0));
        // delta < 2 leaves only c_n = 1
        let fam = IsomorphFamily::new(1.9, components(), ScaleProfile::Dyadic { seed: 7 }).unwrap();
        assert!((1..=50).all(|n| fam.scale(n) == 1.0));
    }

    #[test]
    fn padded_components_round_trip() {
        let comps = ComponentSpaceFamily::padded(3, 2, ComponentNorm::L2).unwrap();
        let fam = IsomorphFamily::new(4.0, comps, ScaleProfile::Dyadic { seed: 1 }).unwrap();
        let w = [0.3, -1.7, 2.25];
        for n in 1..=30 {
            let z = fam.forward(n, &w).unwrap();
            assert_eq!(z.len(), 3 + (n % 3) as usize);
            assert_eq!(fam.backward(n, &z).unwrap(), w.to_vec());
            assert_eq!(fam.norm(&z), fam.scaled_image_norm(n, 1.0, &w));
        }
        assert!(fam.forward(1, &[1.0]).is_err());
        assert!(fam.backward(1, &[1.0]).is_err());
    }
}
