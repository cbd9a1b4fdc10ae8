use crate::error::{require_positive, Error, Result};
use crate::partition::PartitionScheme;
use crate::peano::field::L1Coefficients;
use crate::peano::ode::{integrate_scalar, ScalarCauchyProblem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessConfig {
    pub t0: f64,
    pub t_star: f64,
    /// Common initial value `b_n` of the sampled coordinates.
    pub initial_value: f64,
    pub step: f64,
    pub tolerance: f64,
    /// How far to look for the first nonzero coefficient of an infinite `a`.
    pub coefficient_search: u64,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig {
            t0: 0.0,
            t_star: 4.0,
            initial_value: 0.0,
            step: 1e-4,
            tolerance: 1e-3,
            coefficient_search: 1 << 20,
        }
    }
}

/// One sampled coordinate `n = m_j` of the witness block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledCoordinate {
    pub position: u64,
    pub coordinate: u64,
    pub gamma: f64,
    /// `|u_n(t*)|` from RK4.
    pub value: f64,
}

/// Numerical form of the contradiction: every coordinate of block `m` of a
/// would-be solution is bounded below at `t*` by the same positive constant,
/// so `(u_{m_j}(t*))_j` cannot tend to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupWitness {
    pub block: u64,
    pub coefficient: f64,
    pub t0: f64,
    pub horizon: f64,
    pub initial_value: f64,
    /// Negative coefficients are handled through `v(s) = u(-s)`.
    pub time_reversed: bool,
    /// `(|a_m| (t* - t0)/2 - sqrt|b|)_+^2`.
    pub lower_bound: f64,
    pub samples: Vec<SampledCoordinate>,
    /// `min_j |u_{m_j}(t*)|`.
    pub uniform_lower_bound: f64,
    pub tolerance: f64,
}

impl BlowupWitness {
    /// Every sample clears the bound (up to tolerance) and the uniform bound
    /// is positive.
    pub fn holds(&self) -> bool {
        self.uniform_lower_bound > 0.0
            && self
                .samples
                .iter()
                .all(|s| s.value >= self.lower_bound - self.tolerance)
    }

    /// `max_j |u_{m_j}(t*)| - min_j |u_{m_j}(t*)|`.
    pub fn spread(&self) -> f64 {
        let max = self.samples.iter().map(|s| s.value).fold(f64::NEG_INFINITY, f64::max);
        max - self.uniform_lower_bound
    }
}

/// The scalar problem of coordinate `n`, already reversed in time when the
/// coefficient is negative, so it always runs forward from its own `t0`.
pub fn coordinate_problem(coefficient: f64, n: u64, cfg: &WitnessConfig) -> Result<ScalarCauchyProblem> {
    let gamma = 1.0 / (n as f64 + 1.0);
    let problem = ScalarCauchyProblem::new(coefficient, gamma, cfg.t0, cfg.initial_value)?;
    Ok(if coefficient < 0.0 {
        problem.time_reversed()
    } else {
        problem
    })
}

/// Integrates each sampled coordinate `m_j` of the first block `m` with
/// `a_m != 0` up to `t*` and collects the `j`-uniform lower bound.
pub fn peano_failure_witness(
    a: &L1Coefficients,
    scheme: PartitionScheme,
    positions: &[u64],
    cfg: &WitnessConfig,
) -> Result<BlowupWitness> {
    require_positive("step", cfg.step)?;
    if !(cfg.t_star > cfg.t0) {
        return Err(Error::domain("t_star", cfg.t_star, "must exceed t0"));
    }
    let block = a.first_nonzero(cfg.coefficient_search).ok_or(Error::ZeroField)?;
    let coefficient = a.get(block);
    let horizon = cfg.t_star - cfg.t0;

    let mut samples = Vec::with_capacity(positions.len());
    for &position in positions {
        let coordinate = scheme.encode(block, position)?;
        let problem = coordinate_problem(coefficient, coordinate, cfg)?;
        let trajectory = integrate_scalar(&problem, cfg.step, problem.t0 + horizon)?;
        let (_, value) = trajectory.last().expect("trajectory has samples");
        samples.push(SampledCoordinate {
            position,
            coordinate,
            gamma: problem.gamma,
            value: value.abs(),
        });
    }
    let uniform_lower_bound = samples.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
    let reach = (0.5 * coefficient.abs() * horizon - cfg.initial_value.abs().sqrt()).max(0.0);

    Ok(BlowupWitness {
        block,
        coefficient,
        t0: cfg.t0,
        horizon,
        initial_value: cfg.initial_value,
        time_reversed: coefficient < 0.0,
        lower_bound: reach * reach,
        samples,
        uniform_lower_bound,
        tolerance: cfg.tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn positions() -> Vec<u64> {
        (1..=16).collect()
    }

    #[test]
    fn positive_coefficient_blows_up_uniformly() {
        let a = L1Coefficients::finite(&[1.0]).unwrap();
        let w = peano_failure_witness(&a, PartitionScheme::Dyadic, &positions(), &WitnessConfig::default()).unwrap();
        assert_eq!(w.block, 1);
        assert_eq!(w.lower_bound, 4.0);
        assert!(w.holds());
        assert!(w.uniform_lower_bound >= 4.0 - 1e-3);
        assert!(!w.time_reversed);
        // larger coordinates have smaller gamma, so the bound is approached from above
        let values: Vec<f64> = w.samples.iter().map(|s| s.value).collect();
        assert!(values.windows(2).all(|p| p[1] <= p[0]));
    }

    #[test]
    fn negative_coefficient_matches_positive_one() {
        let pos = L1Coefficients::finite(&[0.0, 1.0]).unwrap();
        let neg = L1Coefficients::finite(&[0.0, -1.0]).unwrap();
        let cfg = WitnessConfig::default();
        let wp = peano_failure_witness(&pos, PartitionScheme::Cantor, &positions(), &cfg).unwrap();
        let wn = peano_failure_witness(&neg, PartitionScheme::Cantor, &positions(), &cfg).unwrap();
        assert!(wn.time_reversed);
        assert_eq!(wn.block, 2);
        assert_eq!(wp.uniform_lower_bound, wn.uniform_lower_bound);
        assert!(wn.holds());
    }

    #[test]
    fn zero_field_has_no_witness() {
        let a = L1Coefficients::finite(&[0.0, 0.0]).unwrap();
        let err = peano_failure_witness(&a, PartitionScheme::Dyadic, &positions(), &WitnessConfig::default());
        assert_eq!(err, Err(Error::ZeroField));
    }

    #[test]
    fn nonzero_initial_value_shifts_the_bound() {
        let a = L1Coefficients::finite(&[2.0]).unwrap();
        let cfg = WitnessConfig {
            initial_value: 1.0,
            ..WitnessConfig::default()
        };
        let w = peano_failure_witness(&a, PartitionScheme::Dyadic, &positions(), &cfg).unwrap();
        // (2 * 4 / 2 - 1)^2 = 9
        assert_eq!(w.lower_bound, 9.0);
        assert!(w.holds());
    }
}
