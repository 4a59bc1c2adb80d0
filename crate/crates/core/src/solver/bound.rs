//! Approximation-factor bound for the greedy solver and the per-GP price audit behind it.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Deployment, GreedyTrace};
use crate::venue::Venue;

/// Non-finite values serialize as `null` and read back as `+∞`.
pub(crate) mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

const REL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Closed-form factor; `+∞` when some greedy iteration satisfies no new GP.
    #[serde(with = "finite_or_null")]
    pub analytic_ratio: f64,
    pub l_star: usize,
    pub l_greedy: usize,
    /// Greedy iterations needed to satisfy every GP the exact solution satisfies.
    pub l_star_circ: Option<usize>,
    /// `l_star_circ / l_star`, `None` when greedy never covers that set.
    pub observed_ratio: Option<f64>,
    /// `l_greedy / l_star`.
    pub greedy_ratio: f64,
    pub covers_optimum: bool,
    /// `l_star_circ ≤ analytic_ratio · l_star`; `None` when not comparable.
    pub bound_holds: Option<bool>,
}

fn ratio(a: usize, b: usize) -> f64 {
    if a == 0 && b == 0 {
        1.0
    } else {
        a as f64 / b as f64
    }
}

/// GPs the exact solution satisfies through its APs (the no-AP base set excluded).
fn optimum_set(trace: &GreedyTrace, exact: &Deployment) -> BTreeSet<usize> {
    let base: BTreeSet<usize> = trace.base_satisfied.iter().copied().collect();
    exact.satisfied_set().difference(&base).copied().collect()
}

/// Satisfied members of each exact AP.
fn optimum_covers(exact: &Deployment, m_star: &BTreeSet<usize>) -> Vec<Vec<usize>> {
    exact
        .selected
        .iter()
        .map(|ap| {
            ap.assigned
                .iter()
                .copied()
                .filter(|m| m_star.contains(m))
                .collect()
        })
        .collect()
}

pub fn approximation_bound(venue: &Venue, trace: &GreedyTrace, exact: &Deployment) -> BoundReport {
    let q = |m: usize| venue.grid_positions[m].q;
    let m_star = optimum_set(trace, exact);
    let l_star = exact.ap_count();
    let l_greedy = trace.steps.len();

    let max_c_star = optimum_covers(exact, &m_star)
        .iter()
        .map(Vec::len)
        .max()
        .unwrap_or(0);
    let min_c = trace
        .steps
        .iter()
        .map(|s| s.cover.newly_satisfied.len())
        .min()
        .unwrap_or(0);
    let q_max = m_star
        .iter()
        .map(|&m| q(m))
        .fold(f64::NEG_INFINITY, f64::max);
    let q_min = m_star.iter().map(|&m| q(m)).fold(f64::INFINITY, f64::min);
    let analytic_ratio = if m_star.is_empty() {
        1.0
    } else if min_c == 0 || q_min <= 0.0 {
        f64::INFINITY
    } else {
        (max_c_star as f64 * q_max) / (min_c as f64 * q_min)
    };

    let mut covered = BTreeSet::new();
    let mut l_star_circ = m_star.is_empty().then_some(0);
    for (i, step) in trace.steps.iter().enumerate() {
        if l_star_circ.is_some() {
            break;
        }
        covered.extend(step.cover.newly_satisfied.iter().copied());
        if m_star.is_subset(&covered) {
            l_star_circ = Some(i + 1);
        }
    }
    let observed_ratio = l_star_circ.map(|k| ratio(k, l_star));
    let bound_holds =
        l_star_circ.map(|k| k as f64 <= analytic_ratio * l_star as f64 * (1.0 + REL_TOL));
    BoundReport {
        analytic_ratio,
        l_star,
        l_greedy,
        l_star_circ,
        observed_ratio,
        greedy_ratio: ratio(l_greedy, l_star),
        covers_optimum: l_star_circ.is_some(),
        bound_holds,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationPrices {
    pub iteration: usize,
    /// `u_{i-1}(C) − u_i(C)`: members covered for the first time.
    pub newly_covered: usize,
    /// `α_i(C) − α_{i-1}(C)`: presence weight they add.
    pub weight_gain: f64,
    /// Price charged to each newly covered member; `+∞` when the weight gain is zero.
    #[serde(with = "finite_or_null")]
    pub price: f64,
    pub max_member_q: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriceViolation {
    /// `"a"`: per-member price floor, `"b"`: optimum overcounting, `"c"`: final bound.
    pub inequality: String,
    pub iteration: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub iterations: Vec<IterationPrices>,
    /// Iterations that only moved probability mass, so no member got a price.
    pub zero_weight_iterations: Vec<usize>,
    pub greedy_price_total: f64,
    pub optimum_price_total: f64,
    pub bound: BoundReport,
    pub violations: Vec<PriceViolation>,
}

impl AuditReport {
    pub fn clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Recomputes the per-member prices of a greedy run and checks the inequality chain
/// of the approximation bound against an exact solution.
pub fn audit_greedy_prices(venue: &Venue, trace: &GreedyTrace, exact: &Deployment) -> AuditReport {
    let q = |m: usize| venue.grid_positions[m].q;
    let mut price_of = vec![0.0; venue.num_gps()];
    let mut first_covered = BTreeSet::new();
    let mut iterations = Vec::new();
    let mut zero_weight_iterations = Vec::new();
    let mut violations = Vec::new();

    for step in &trace.steps {
        let newly = &step.cover.newly_satisfied;
        let weight_gain: f64 = newly.iter().map(|&m| q(m)).fold(0.0, |acc, x| acc + x);
        let max_member_q = step.cover.members.iter().map(|&m| q(m)).fold(0.0, f64::max);
        let price = if newly.is_empty() {
            zero_weight_iterations.push(step.iteration);
            0.0
        } else if weight_gain > 0.0 {
            newly.len() as f64 / weight_gain
        } else {
            zero_weight_iterations.push(step.iteration);
            f64::INFINITY
        };
        for &m in newly {
            price_of[m] = price;
            first_covered.insert(m);
        }
        if !newly.is_empty() && 1.0 / max_member_q > price * (1.0 + REL_TOL) {
            violations.push(PriceViolation {
                inequality: "a".into(),
                iteration: Some(step.iteration),
                detail: format!("1/max q = {} exceeds price {}", 1.0 / max_member_q, price),
            });
        }
        iterations.push(IterationPrices {
            iteration: step.iteration,
            newly_covered: newly.len(),
            weight_gain,
            price,
            max_member_q,
        });
    }

    let m_star = optimum_set(trace, exact);
    let greedy_price_total: f64 = m_star
        .intersection(&first_covered)
        .map(|&m| price_of[m])
        .fold(0.0, |acc, x| acc + x);
    let optimum_price_total: f64 = optimum_covers(exact, &m_star)
        .iter()
        .flatten()
        .map(|&m| price_of[m])
        .fold(0.0, |acc, x| acc + x);
    if greedy_price_total > optimum_price_total * (1.0 + REL_TOL) + REL_TOL {
        violations.push(PriceViolation {
            inequality: "b".into(),
            iteration: None,
            detail: format!(
                "greedy price total {greedy_price_total} exceeds optimum price total {optimum_price_total}"
            ),
        });
    }

    let bound = approximation_bound(venue, trace, exact);
    if bound.bound_holds == Some(false) {
        violations.push(PriceViolation {
            inequality: "c".into(),
            iteration: bound.l_star_circ,
            detail: format!(
                "{} greedy APs exceed {} × {} optimum APs",
                bound.l_star_circ.unwrap_or(0),
                bound.analytic_ratio,
                bound.l_star
            ),
        });
    }

    AuditReport {
        iterations,
        zero_weight_iterations,
        greedy_price_total,
        optimum_price_total,
        bound,
        violations,
    }
}
