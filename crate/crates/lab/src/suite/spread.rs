use mvlab::norm::{c0_decay_check, classify, lq_partial};
use mvlab::spread::{
    block_restricted_partial, make_y, plus_space_cauchy_check, range_decay_check, range_divergence_certificate,
    range_independence_check, t_norm_bound_check, tensor_coord, ComponentSpaceFamily, IsomorphFamily, PlusSpaceLadder,
    RangeCertificate, ScaleProfile, SpreadOperator,
};
use mvlab::{Error, ScalarSequence};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{attempt, convergence_status, divergence_status, policy, record_decay, record_verdict, rng, verdict_name};
use crate::report::{Check, Status};
use crate::scenario::{Kind, Mother, Scenario};

/// Blocks and exponents of the spread-norm identity.
const IDENTITY_BLOCKS: u64 = 8;
const IDENTITY_EXPONENTS: [f64; 4] = [0.5, 1.0, 2.0, 3.0];
/// Length of the finitely supported scalar factors in tensor samples.
const TENSOR_SUPPORT: usize = 32;

/// `k / 256` with `|k| <= 256`; products of a few of these are exact.
fn dyadic(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-256i32..=256) as f64 / 256.0
}

fn dyadic_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| dyadic(rng)).collect()
}

/// The common objects of a spread scenario.
struct Setup {
    xi: ScalarSequence,
    family: IsomorphFamily,
    op: SpreadOperator,
}

fn setup(s: &Scenario) -> mvlab::Result<Setup> {
    let sec = s.spread();
    let xi = match sec.mother {
        Mother::EllP => ScalarSequence::mother_ell_p(sec.p)?,
        Mother::C0 => ScalarSequence::mother_c0(),
        Mother::EllPPlus => ScalarSequence::mother_ell_p_plus(sec.p)?,
    };
    let components = ComponentSpaceFamily::padded(sec.model_dim, sec.padding, sec.norm)?;
    let family = IsomorphFamily::new(sec.delta, components, ScaleProfile::Dyadic { seed: s.seed })?;
    let mut rng = rng(s.seed, 100);
    let slots = (0..sec.slots)
        .map(|_| {
            let mut w = dyadic_vector(&mut rng, sec.model_dim);
            if w.iter().all(|v| *v == 0.0) {
                w[0] = 1.0;
            }
            w
        })
        .collect();
    let op = SpreadOperator::new(xi.clone(), s.scheme, family, slots)?;
    Ok(Setup { xi, family, op })
}

pub(super) fn run(s: &Scenario) -> Vec<Check> {
    let st = match setup(s) {
        Ok(st) => st,
        Err(e) => return vec![Check::new("setup", "T(w) is well defined").errored(e)],
    };
    let mut checks = vec![
        partition_roundtrip(s),
        spread_norm_identity(s, &st),
        isomorph_sandwich(s, &st),
        tensor_bilinearity(s, &st),
        coordinate_formula(s, &st),
        norm_bound(s, &st),
        range_independence(s, &st),
    ];
    let sec = s.spread();
    match s.kind {
        Kind::SpreadLp => {
            checks.push(mother_membership("mother_in_lp".into(), s, &st, sec.p));
            for &q in &sec.q_list {
                checks.push(mother_divergence(format!("mother_divergence.q={q}"), s, &st, q));
                checks.push(range_divergence(format!("range_divergence.q={q}"), s, &st, q));
            }
            checks.push(range_membership(s, &st));
        }
        Kind::SpreadC0 => {
            checks.push(mother_decay(s, &st));
            checks.push(range_decay(s, &st));
            for &q in &sec.q_list {
                checks.push(mother_divergence(format!("mother_divergence.q={q}"), s, &st, q));
                checks.push(range_divergence(format!("range_divergence.q={q}"), s, &st, q));
            }
        }
        Kind::SpreadLpPlus => {
            let ladder = if sec.q_list.is_empty() {
                PlusSpaceLadder::new(sec.p, sec.ladder_rungs)
            } else {
                PlusSpaceLadder::from_rungs(sec.p, sec.q_list.clone())
            };
            match ladder {
                Ok(ladder) => {
                    checks.push(mother_divergence(
                        format!("mother_divergence.q={}", sec.p),
                        s,
                        &st,
                        sec.p,
                    ));
                    for &q in ladder.rungs() {
                        checks.push(mother_membership(format!("mother_convergence.q={q}"), s, &st, q));
                    }
                    checks.push(plus_ladder(s, &st, &ladder));
                }
                Err(e) => checks.push(Check::new("plus_ladder", "p_k decreases to p").errored(e)),
            }
        }
        Kind::Peano => unreachable!("peano scenarios run their own suite"),
    }
    checks
}

fn partition_roundtrip(s: &Scenario) -> Check {
    attempt(
        "partition_roundtrip",
        "n -> (i, j) is a bijection onto blocks partitioning N",
        |check| {
            let mut mismatches = 0u64;
            let mut order_breaks = 0u64;
            for n in 1..=s.budgets.summation {
                let b = s.scheme.decode(n)?;
                if s.scheme.encode(b.block, b.position)? != n {
                    mismatches += 1;
                }
            }
            for block in 1..=IDENTITY_BLOCKS {
                let prefix = s.scheme.block_prefix(block, s.budgets.truncation)?;
                order_breaks += prefix.windows(2).filter(|w| w[0] >= w[1]).count() as u64;
            }
            check.set("checked_indices", s.budgets.summation);
            check.set("roundtrip_mismatches", mismatches);
            check.set("block_order_breaks", order_breaks);
            Ok(Status::from_bool(mismatches == 0 && order_breaks == 0))
        },
    )
}

fn spread_norm_identity(s: &Scenario, st: &Setup) -> Check {
    attempt(
        "spread_norm_identity",
        "||y_i||_r = ||xi||_r for every block i",
        |check| {
            let n = s.budgets.truncation;
            let mut mismatches = 0u64;
            for r in IDENTITY_EXPONENTS {
                let reference = lq_partial(&st.xi, r, n)?;
                for block in 1..=IDENTITY_BLOCKS {
                    let y = make_y(block, &st.xi, s.scheme);
                    if block_restricted_partial(&y, block, s.scheme, r, n)? != reference {
                        mismatches += 1;
                    }
                }
                check.set(&format!("xi_partial.r={r}"), reference);
            }
            check.set("blocks", IDENTITY_BLOCKS);
            check.set("truncation", n);
            check.set("mismatches", mismatches);
            Ok(Status::from_bool(mismatches == 0))
        },
    )
}

fn isomorph_sandwich(s: &Scenario, st: &Setup) -> Check {
    attempt(
        "isomorph_sandwich",
        "||w||/delta <= ||R_n w|| <= delta ||w|| and R_n^{-1} R_n = id",
        |check| {
            let mut rng = rng(s.seed, 101);
            let fam = &st.family;
            let delta = fam.delta();
            let mut violations = 0u64;
            let mut inverse_mismatches = 0u64;
            let (mut min_ratio, mut max_ratio) = (f64::INFINITY, 0.0f64);
            for _ in 0..s.budgets.random_draws {
                let n = rng.random_range(1..=s.budgets.summation);
                let w: Vec<f64> = (0..fam.model_dim()).map(|_| rng.random_range(-100.0..100.0)).collect();
                let z = fam.forward(n, &w)?;
                let (nw, nz) = (fam.norm(&w), fam.norm(&z));
                if nz > delta * nw * (1.0 + 1e-15) || nw > delta * nz * (1.0 + 1e-15) {
                    violations += 1;
                }
                if nw > 0.0 {
                    min_ratio = min_ratio.min(nz / nw);
                    max_ratio = max_ratio.max(nz / nw);
                }
                if fam.backward(n, &z)? != w {
                    inverse_mismatches += 1;
                }
            }
            check.set("delta", delta);
            check.set("draws", s.budgets.random_draws);
            check.set("min_ratio", min_ratio);
            check.set("max_ratio", max_ratio);
            check.set("violations", violations);
            check.set("inverse_mismatches", inverse_mismatches);
            Ok(Status::from_bool(violations == 0 && inverse_mismatches == 0))
        },
    )
}

fn tensor_bilinearity(s: &Scenario, st: &Setup) -> Check {
    attempt(
        "tensor_bilinearity",
        "(x + x') (x) w = x (x) w + x' (x) w, x (x) (w + w') = x (x) w + x (x) w', (lambda x) (x) w = lambda (x (x) w) = x (x) (lambda w)",
        |check| {
            let mut rng = rng(s.seed, 102);
            let dim = st.family.model_dim();
            let mut failures = 0u64;
            let add = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + q).collect() };
            for _ in 0..s.budgets.random_draws {
                let xs: Vec<f64> = (0..TENSOR_SUPPORT).map(|_| dyadic(&mut rng)).collect();
                let xs2: Vec<f64> = (0..TENSOR_SUPPORT).map(|_| dyadic(&mut rng)).collect();
                let (w1, w2) = (dyadic_vector(&mut rng, dim), dyadic_vector(&mut rng, dim));
                let lambda = dyadic(&mut rng);
                let n = rng.random_range(1..=TENSOR_SUPPORT as u64);
                let fam = &st.family;
                let x = ScalarSequence::finite(&xs);
                let x2 = ScalarSequence::finite(&xs2);
                let x_sum = ScalarSequence::finite(&add(&xs, &xs2));
                let x_scaled = ScalarSequence::finite(&xs.iter().map(|v| lambda * v).collect::<Vec<_>>());
                let w_scaled: Vec<f64> = w1.iter().map(|v| lambda * v).collect();

                let a = tensor_coord(&x, &w1, fam, n)?;
                let b = tensor_coord(&x, &w2, fam, n)?;
                let c = tensor_coord(&x2, &w1, fam, n)?;
                let scaled: Vec<f64> = a.iter().map(|v| lambda * v).collect();
                let ok = tensor_coord(&x, &add(&w1, &w2), fam, n)? == add(&a, &b)
                    && tensor_coord(&x_sum, &w1, fam, n)? == add(&a, &c)
                    && tensor_coord(&x_scaled, &w1, fam, n)? == scaled
                    && tensor_coord(&x, &w_scaled, fam, n)? == scaled;
                if !ok {
                    failures += 1;
                }
            }
            check.set("draws", s.budgets.random_draws);
            check.set("failures", failures);
            Ok(Status::from_bool(failures == 0))
        },
    )
}

fn coordinate_formula(s: &Scenario, st: &Setup) -> Check {
    attempt(
        "coordinate_formula",
        "the i_j-th coordinate of T(w) is xi_j R_{i_j}(w_i)",
        |check| {
            let mut mismatches = 0u64;
            for n in 1..=s.budgets.sample_coordinates {
                if st.op.coord(n)? != st.op.coord_by_direct_sum(n)? {
                    mismatches += 1;
                }
            }
            check.set("coordinates", s.budgets.sample_coordinates);
            check.set("mismatches", mismatches);
            Ok(Status::from_bool(mismatches == 0))
        },
    )
}

fn norm_bound(s: &Scenario, st: &Setup) -> Check {
    attempt(
        "norm_bound",
        "||y_j (x) w_j||_p <= delta ||w_j|| ||xi||_p and sum_j ||y_j (x) w_j||_p^s <= delta^s ||xi||_p^s ||(w_j)||_s^s",
        |check| {
            let r = t_norm_bound_check(&st.op, s.spread().p, s.budgets.truncation, s.thresholds.bound_slack)?;
            check.set("p", r.p);
            check.set("s_tilde", r.s_tilde);
            check.set("truncation", r.truncation);
            check.set("aggregate_lhs", r.aggregate.lhs);
            check.set("aggregate_rhs", r.aggregate.rhs);
            check.set("operator_lhs", r.operator.lhs);
            check.set("operator_rhs", r.operator.rhs);
            let min_term_slack = r.per_term.iter().map(|b| b.slack()).fold(f64::INFINITY, f64::min);
            check.set("min_term_slack", min_term_slack);
            Ok(Status::from_bool(r.holds()))
        },
    )
}

fn range_independence(s: &Scenario, st: &Setup) -> Check {
    attempt(
        "range_independence",
        "T is injective: images of model vectors in distinct slots are independent",
        |check| {
            let r = range_independence_check(&st.xi, s.scheme, &st.family, st.op.slots())?;
            check.set("slots", st.op.slots().len());
            check.set("rank", r.rank);
            check.set("sampled_coordinates", &r.sampled_coordinates);
            Ok(Status::from_bool(r.rank == st.op.slots().len()))
        },
    )
}

fn mother_membership(name: String, s: &Scenario, st: &Setup, q: f64) -> Check {
    attempt(name, "the mother vector lies in l_q", |check| {
        let policy = policy(s)?;
        let verdict = classify(&st.xi, q, &policy)?;
        check.set("q", q);
        record_verdict(check, &verdict);
        Ok(convergence_status(&verdict))
    })
}

fn mother_divergence(name: String, s: &Scenario, st: &Setup, q: f64) -> Check {
    attempt(name, "the mother vector lies in no l_q for this q", |check| {
        let policy = policy(s)?;
        let verdict = classify(&st.xi, q, &policy)?;
        check.set("q", q);
        record_verdict(check, &verdict);
        Ok(divergence_status(&verdict))
    })
}

fn record_certificate(check: &mut Check, cert: &RangeCertificate) {
    check.set("q", cert.q);
    check.set("block", cert.block);
    check.set("scale", cert.scale);
    record_verdict(check, &cert.verdict);
    if let Some(chain) = &cert.chain {
        check.set("chain_terms", chain.terms);
        check.set("chain_lower_bound", chain.lower_bound);
        check.set("chain_xi_partial", chain.xi_partial);
        check.set("chain_holds", chain.holds());
    }
}

fn range_divergence(name: String, s: &Scenario, st: &Setup, q: f64) -> Check {
    attempt(
        name,
        "||z||_q^q >= delta^{-q} ||w_m||^q ||xi||_q^q = infinity for every nonzero z in the range",
        |check| {
            let cert = range_divergence_certificate(&st.op, q, &policy(s)?)?;
            record_certificate(check, &cert);
            let status = divergence_status(&cert.verdict);
            let chain_ok = cert.chain.as_ref().is_none_or(|c| c.holds());
            Ok(if chain_ok { status } else { Status::Failed })
        },
    )
}

fn range_membership(s: &Scenario, st: &Setup) -> Check {
    attempt(
        "range_membership",
        "T(w) lies in the p-sum of the components",
        |check| {
            let cert = range_divergence_certificate(&st.op, s.spread().p, &policy(s)?)?;
            record_certificate(check, &cert);
            Ok(convergence_status(&cert.verdict))
        },
    )
}

/// The decay index exists but lies past the largest finite `f64`.
fn beyond_range(check: &mut Check, e: Error) -> Status {
    check.set("search", e.to_string());
    Status::Undecided
}

fn mother_decay(s: &Scenario, st: &Setup) -> Check {
    attempt("mother_decay", "the mother vector is a null sequence", |check| {
        let eps = s.thresholds.decay_epsilon;
        check.set("epsilon", eps);
        match c0_decay_check(&st.xi, eps) {
            Ok(index) => {
                record_decay(check, "index", &index);
                Ok(Status::Certified)
            }
            Err(e @ Error::DecayNotFound { .. }) => Ok(beyond_range(check, e)),
            Err(e) => Err(e),
        }
    })
}

fn range_decay(s: &Scenario, st: &Setup) -> Check {
    attempt("range_decay", "||T(w)_n|| tends to zero", |check| {
        check.set("epsilon", s.thresholds.decay_epsilon);
        let d = match range_decay_check(&st.op, s.thresholds.decay_epsilon) {
            Ok(d) => d,
            Err(e @ Error::DecayNotFound { .. }) => return Ok(beyond_range(check, e)),
            Err(e) => return Err(e),
        };
        record_decay(check, "index", &d.index);
        check.set("blocks", d.per_block.len());
        Ok(Status::from_bool(!d.per_block.is_empty()))
    })
}

fn plus_ladder(s: &Scenario, st: &Setup, ladder: &PlusSpaceLadder) -> Check {
    attempt(
        "plus_ladder",
        "sum_j ||y_j (x) w_j||_q <= delta ||xi||_q ||(w_j)||_1 on every rung, with a rung-independent limit",
        |check| {
            let r = plus_space_cauchy_check(
                &st.op,
                ladder,
                s.budgets.truncation,
                s.budgets.sample_coordinates,
                &policy(s)?,
                s.thresholds.bound_slack,
            )?;
            check.set("rungs", ladder.rungs());
            check.set("rung_independent", r.rung_independent);
            check.set("rungs_holding", r.rungs.iter().filter(|k| k.holds()).count());
            let min_slack = r
                .rungs
                .iter()
                .flat_map(|k| k.partial_sum_bounds.iter().chain(&k.tail_bounds))
                .map(|b| b.slack())
                .fold(f64::INFINITY, f64::min);
            check.set("min_slack", min_slack);
            let structural = r.rungs.iter().all(|k| k.holds()) && r.rung_independent;
            let status = match &r.divergence_at_p {
                Some(cert) => {
                    check.set("divergence_at_p", verdict_name(&cert.verdict));
                    check.set("divergence_block", cert.block);
                    if !structural {
                        Status::Failed
                    } else {
                        divergence_status(&cert.verdict)
                    }
                }
                None => Status::from_bool(structural),
            };
            Ok(status)
        },
    )
}
