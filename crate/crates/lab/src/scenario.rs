//! Scenario files: TOML documents naming a construction, its parameters and
//! the budgets of its certificate suite.
//!
//! A file only needs `kind`; every other field falls back to the defaults of
//! that kind (see `lab print-default-config <kind>`).

use std::fmt;
use std::str::FromStr;

use mvlab::spread::ComponentNorm;
use mvlab::PartitionScheme;
use serde::{Deserialize, Serialize};

use crate::error::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Peano,
    SpreadLp,
    SpreadC0,
    SpreadLpPlus,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::Peano, Kind::SpreadLp, Kind::SpreadC0, Kind::SpreadLpPlus];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Peano => "peano",
            Kind::SpreadLp => "spread_lp",
            Kind::SpreadC0 => "spread_c0",
            Kind::SpreadLpPlus => "spread_lp_plus",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown kind `{s}` (expected peano, spread_lp, spread_c0 or spread_lp_plus)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mother {
    /// `(j ln^2(j+1))^{-1/p}`: in `l_p`, in no smaller `l_q`.
    EllP,
    /// `1/ln(j+1)`: null, in no `l_q`.
    C0,
    /// `j^{-1/p}`: in every `l_q` with `q > p`, not in `l_p`.
    EllPPlus,
}

/// Integer budgets. `LAB_BUDGET_SCALE` multiplies every one of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    /// Largest summation index of convergence and divergence searches.
    pub summation: u64,
    /// Members per block in truncated norms and identities.
    pub truncation: u64,
    /// Block positions `j` sampled by the blow-up witness.
    pub block_sample: u64,
    /// Coordinates sampled by coordinate-formula checks.
    pub sample_coordinates: u64,
    /// Randomized draws per property check.
    pub random_draws: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Partial sums above this certify divergence.
    pub divergence: f64,
    /// Relative tail tolerance for early convergence stops.
    pub tolerance: f64,
    /// Inequalities hold when their slack is at least minus this.
    pub bound_slack: f64,
    /// Relative agreement required between RK4 and the analytic oracle.
    pub ode_rtol: f64,
    /// Slack granted to the blow-up lower bound.
    pub witness_tolerance: f64,
    /// `eps` of null-sequence decay checks.
    pub decay_epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeanoSection {
    /// `a_1, a_2, ...` of the field `L(a) = sum_i a_i N_i f`.
    pub coefficients: Vec<f64>,
    pub t0: f64,
    /// `t* - t0`.
    pub horizon: f64,
    /// Common initial value of the sampled coordinates.
    pub initial_value: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpreadSection {
    pub mother: Mother,
    /// Target exponent; `0` for the null-sequence space.
    pub p: f64,
    /// Exponents certified as excluded (`spread_lp`, `spread_c0`) or, for
    /// `spread_lp_plus`, explicit ladder rungs (empty: `p + 1/k`).
    pub q_list: Vec<f64>,
    pub ladder_rungs: usize,
    pub delta: f64,
    pub model_dim: usize,
    /// Component `n` has dimension `model_dim + (n mod (padding + 1))`.
    pub padding: usize,
    #[serde(with = "as_string")]
    pub norm: ComponentNorm,
    /// Number of random model vectors `w_1, ..., w_k` fed to `T`.
    pub slots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: Kind,
    pub seed: u64,
    #[serde(with = "as_string")]
    pub scheme: PartitionScheme,
    pub budgets: Budgets,
    pub thresholds: Thresholds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peano: Option<PeanoSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spread: Option<SpreadSection>,
}

mod as_string {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(value)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr<Err = String>,
        D: Deserializer<'de>,
    {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }
}

impl Scenario {
    pub fn default_for(kind: Kind) -> Scenario {
        let budgets = Budgets {
            summation: 1_000_000,
            truncation: 10_000,
            block_sample: 64,
            sample_coordinates: 2_000,
            random_draws: 1_000,
        };
        let thresholds = Thresholds {
            divergence: 5.0,
            tolerance: 1e-6,
            bound_slack: 1e-12,
            ode_rtol: 1e-6,
            witness_tolerance: 1e-3,
            decay_epsilon: 1e-2,
        };
        let spread = |mother, p: f64, q_list: Vec<f64>| SpreadSection {
            mother,
            p,
            q_list,
            ladder_rungs: mvlab::spread::DEFAULT_RUNGS,
            delta: 2.0,
            model_dim: 8,
            padding: 0,
            norm: ComponentNorm::L1,
            slots: 3,
        };
        let (peano, spread) = match kind {
            Kind::Peano => (
                Some(PeanoSection {
                    coefficients: vec![1.0, -0.5, 0.25],
                    t0: 0.0,
                    horizon: 4.0,
                    initial_value: 0.0,
                    step: 1e-4,
                }),
                None,
            ),
            Kind::SpreadLp => (None, Some(spread(Mother::EllP, 2.0, vec![0.5, 1.0, 1.5]))),
            Kind::SpreadC0 => {
                // Decay indices of 1/ln(j+1) grow like exp(delta ||w|| / eps);
                // sup-normed components keep them inside the f64 range.
                let mut sec = spread(Mother::C0, 0.0, vec![1.0, 2.0, 5.0]);
                sec.norm = ComponentNorm::Sup;
                (None, Some(sec))
            }
            Kind::SpreadLpPlus => (None, Some(spread(Mother::EllPPlus, 1.0, Vec::new()))),
        };
        Scenario {
            kind,
            seed: 20_240_601,
            scheme: PartitionScheme::Dyadic,
            budgets,
            thresholds,
            peano,
            spread,
        }
    }

    /// Reads a scenario, filling omitted fields from the defaults of its kind.
    pub fn from_toml(text: &str) -> Result<Scenario, LabError> {
        let user: toml::Table = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        let kind = match user.get("kind") {
            Some(toml::Value::String(s)) => s.parse::<Kind>().map_err(LabError::Config)?,
            Some(other) => return Err(LabError::Config(format!("`kind` must be a string, got {other}"))),
            None => return Err(LabError::Config("missing `kind`".into())),
        };
        let mut merged =
            toml::Table::try_from(Scenario::default_for(kind)).map_err(|e| LabError::Config(e.to_string()))?;
        merge(&mut merged, user);
        let scenario: Scenario = toml::Value::Table(merged)
            .try_into()
            .map_err(|e: toml::de::Error| LabError::Config(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenarios serialize")
    }

    pub fn peano(&self) -> &PeanoSection {
        self.peano.as_ref().expect("validated peano scenario")
    }

    pub fn spread(&self) -> &SpreadSection {
        self.spread.as_ref().expect("validated spread scenario")
    }

    /// Multiplies every integer budget by `factor` (at least 1 each).
    pub fn scale_budgets(&mut self, factor: f64) -> Result<(), LabError> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(LabError::Config(format!(
                "budget scale must be a positive real, got {factor}"
            )));
        }
        let scale = |b: &mut u64| *b = ((*b as f64 * factor).round() as u64).max(1);
        let b = &mut self.budgets;
        for budget in [
            &mut b.summation,
            &mut b.truncation,
            &mut b.block_sample,
            &mut b.sample_coordinates,
            &mut b.random_draws,
        ] {
            scale(budget);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let fail = |msg: String| Err(LabError::Config(msg));
        if self.seed > i64::MAX as u64 {
            return fail(format!("seed {} exceeds {}", self.seed, i64::MAX));
        }
        let b = &self.budgets;
        for (name, v) in [
            ("summation", b.summation),
            ("truncation", b.truncation),
            ("block_sample", b.block_sample),
            ("sample_coordinates", b.sample_coordinates),
            ("random_draws", b.random_draws),
        ] {
            if v == 0 {
                return fail(format!("budgets.{name} must be positive"));
            }
        }
        let t = &self.thresholds;
        for (name, v) in [
            ("divergence", t.divergence),
            ("tolerance", t.tolerance),
            ("bound_slack", t.bound_slack),
            ("ode_rtol", t.ode_rtol),
            ("witness_tolerance", t.witness_tolerance),
            ("decay_epsilon", t.decay_epsilon),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return fail(format!("thresholds.{name} must be a positive real, got {v}"));
            }
        }

        match self.kind {
            Kind::Peano => {
                if self.spread.is_some() {
                    return fail("section [spread] is not used by kind peano".into());
                }
                let Some(p) = &self.peano else {
                    return fail("kind peano needs a [peano] section".into());
                };
                if p.coefficients.iter().any(|a| !a.is_finite()) {
                    return fail("peano.coefficients must be finite".into());
                }
                if p.coefficients.iter().all(|a| *a == 0.0) {
                    return fail(
                        "peano.coefficients are all zero: the zero field has solutions, so no witness exists".into(),
                    );
                }
                for (name, v) in [("horizon", p.horizon), ("step", p.step)] {
                    if !(v.is_finite() && v > 0.0) {
                        return fail(format!("peano.{name} must be a positive real, got {v}"));
                    }
                }
                if !p.t0.is_finite() || !p.initial_value.is_finite() {
                    return fail("peano.t0 and peano.initial_value must be finite".into());
                }
                if p.step > p.horizon {
                    return fail("peano.step exceeds peano.horizon".into());
                }
            }
            kind => {
                if self.peano.is_some() {
                    return fail(format!("section [peano] is not used by kind {kind}"));
                }
                let Some(s) = &self.spread else {
                    return fail(format!("kind {kind} needs a [spread] section"));
                };
                self.validate_spread(kind, s)?;
            }
        }
        Ok(())
    }

    fn validate_spread(&self, kind: Kind, s: &SpreadSection) -> Result<(), LabError> {
        let fail = |msg: String| Err(LabError::Config(msg));
        let expected = match kind {
            Kind::SpreadLp => Mother::EllP,
            Kind::SpreadC0 => Mother::C0,
            _ => Mother::EllPPlus,
        };
        if s.mother != expected {
            return fail(format!(
                "kind {kind} spreads the {expected:?} mother vector, not {:?}",
                s.mother
            ));
        }
        if !(s.delta.is_finite() && s.delta >= 1.0) {
            return fail(format!("spread.delta must be at least 1, got {}", s.delta));
        }
        if s.model_dim == 0 || s.slots == 0 {
            return fail("spread.model_dim and spread.slots must be positive".into());
        }
        if s.q_list.iter().any(|q| !q.is_finite()) {
            return fail("spread.q_list entries must be finite".into());
        }
        match kind {
            Kind::SpreadLp => {
                if !(s.p > 0.0) {
                    return fail(format!("spread.p must be positive for spread_lp, got {}", s.p));
                }
                if s.q_list.is_empty() {
                    return fail("spread.q_list must name at least one q < p".into());
                }
                if let Some(q) = s.q_list.iter().find(|&&q| !(q > 0.0 && q < s.p)) {
                    return fail(format!(
                        "spread_lp needs 0 < q < p for every q, got q = {q} with p = {}",
                        s.p
                    ));
                }
            }
            Kind::SpreadC0 => {
                if s.p != 0.0 {
                    return fail(format!(
                        "spread_c0 works in the null-sequence space, p must be 0, got {}",
                        s.p
                    ));
                }
                if s.q_list.is_empty() {
                    return fail("spread.q_list must name at least one q > 0".into());
                }
                if let Some(q) = s.q_list.iter().find(|&&q| !(q > 0.0)) {
                    return fail(format!("spread_c0 needs q > 0, got {q}"));
                }
            }
            _ => {
                if !(s.p >= 1.0) {
                    return fail(format!("spread_lp_plus needs p >= 1, got {}", s.p));
                }
                if s.q_list.is_empty() && s.ladder_rungs == 0 {
                    return fail("spread.ladder_rungs must be positive".into());
                }
                if let Some(q) = s.q_list.iter().find(|&&q| !(q > s.p)) {
                    return fail(format!("ladder rungs must lie above p = {}, got {q}", s.p));
                }
                if s.q_list.windows(2).any(|w| !(w[1] < w[0])) {
                    return fail("explicit ladder rungs must strictly decrease".into());
                }
            }
        }
        Ok(())
    }
}

/// Overlays `user` onto `base`, recursing into tables.
fn merge(base: &mut toml::Table, user: toml::Table) {
    for (key, value) in user {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) => merge(b, u),
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}
