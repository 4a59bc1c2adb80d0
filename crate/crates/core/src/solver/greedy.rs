use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_alpha, finalize, Deployment, Parallelism, PlacedAp};
use crate::error::{Error, Infeasible, Result};
use crate::instance::Instance;
use crate::scenarios::{bit, meets, LinkMask, PROB_EPS};
use crate::FORMAT_VERSION;

/// Lexicographic objective of one cover set: newly satisfied presence first,
/// probability mass gained on unsatisfied GPs second.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub satisfied: f64,
    pub mass: f64,
}

impl Score {
    pub fn is_zero(&self) -> bool {
        self.satisfied <= 0.0 && self.mass <= 0.0
    }

    fn cmp(&self, other: &Score) -> Ordering {
        self.satisfied
            .total_cmp(&other.satisfied)
            .then(self.mass.total_cmp(&other.mass))
    }
}

/// One `(candidate, steering, members)` choice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverSet {
    pub candidate: usize,
    pub steering_index: usize,
    pub theta: f64,
    pub phi: f64,
    /// Assigned GPs, ascending.
    pub members: Vec<usize>,
    /// Members that become satisfied, ascending.
    pub newly_satisfied: Vec<usize>,
    pub score: Score,
}

impl CoverSet {
    fn order(&self, other: &CoverSet) -> Ordering {
        self.score.cmp(&other.score).then_with(|| {
            (other.candidate, other.steering_index).cmp(&(self.candidate, self.steering_index))
        })
    }
}

/// Committed greedy progress: assignments, current probabilities and the remaining pool.
#[derive(Clone, Debug)]
pub struct GreedyState {
    pub assigned: Vec<LinkMask>,
    pub prob: Vec<f64>,
    pub satisfied: Vec<bool>,
    pub coverage: f64,
    pub pool: Vec<usize>,
    pub selected: Vec<PlacedAp>,
}

impl GreedyState {
    pub fn new(inst: &Instance<'_>) -> Self {
        let n = inst.num_gps();
        let prob = vec![0.0; n];
        let satisfied: Vec<bool> = (0..n).map(|m| meets(0.0, inst.betas[m])).collect();
        let coverage = (0..n)
            .filter(|&m| satisfied[m])
            .map(|m| inst.q(m))
            .fold(0.0, |acc, x| acc + x);
        Self {
            assigned: vec![0; n],
            prob,
            satisfied,
            coverage,
            pool: (0..inst.num_candidates()).collect(),
            selected: Vec::new(),
        }
    }

    pub fn commit(&mut self, inst: &Instance<'_>, cover: &CoverSet) {
        for &m in &cover.members {
            self.assigned[m] |= bit(cover.candidate);
            self.prob[m] = inst.connectivity(m, self.assigned[m]);
        }
        for &m in &cover.newly_satisfied {
            self.satisfied[m] = true;
            self.coverage += inst.q(m);
        }
        self.pool.retain(|&l| l != cover.candidate);
        self.selected.push(PlacedAp {
            loc: cover.candidate,
            theta: cover.theta,
            phi: cover.phi,
            assigned: cover.members.clone(),
        });
    }
}

/// Best member subset of at most `T` GPs for AP `l` at steering `s`.
fn evaluate(inst: &Instance<'_>, state: &GreedyState, l: usize, s: usize) -> CoverSet {
    struct Gain {
        m: usize,
        sat: f64,
        mass: f64,
        newly: bool,
    }
    let mut gains: Vec<Gain> = inst
        .footprint(l, s)
        .iter()
        .filter(|&&m| !state.satisfied[m] && inst.profile(m, l).in_lm)
        .filter_map(|&m| {
            let p = inst.connectivity(m, state.assigned[m] | bit(l));
            let dp = p - state.prob[m];
            if dp <= 0.0 {
                return None;
            }
            let q = inst.q(m);
            let newly = meets(p, inst.betas[m]);
            Some(Gain {
                m,
                sat: if newly { q } else { 0.0 },
                mass: q * dp,
                newly,
            })
        })
        .collect();
    gains.sort_by(|a, b| {
        b.sat
            .total_cmp(&a.sat)
            .then(b.mass.total_cmp(&a.mass))
            .then(a.m.cmp(&b.m))
    });
    gains.truncate(inst.params.capacity_per_beam);
    let score = gains.iter().fold(Score::default(), |acc, g| Score {
        satisfied: acc.satisfied + g.sat,
        mass: acc.mass + g.mass,
    });
    let mut members: Vec<usize> = gains.iter().map(|g| g.m).collect();
    let mut newly_satisfied: Vec<usize> = gains.iter().filter(|g| g.newly).map(|g| g.m).collect();
    members.sort_unstable();
    newly_satisfied.sort_unstable();
    let st = inst.steering(s);
    CoverSet {
        candidate: l,
        steering_index: s,
        theta: st.theta,
        phi: st.phi,
        members,
        newly_satisfied,
        score,
    }
}

fn better(a: CoverSet, b: CoverSet) -> CoverSet {
    if b.order(&a) == Ordering::Greater {
        b
    } else {
        a
    }
}

/// Scans every `(candidate in pool, steering)` pair and returns the best cover set
/// together with the number of pairs evaluated. `None` when the pool is empty.
pub fn greedy_iteration_best(
    inst: &Instance<'_>,
    state: &GreedyState,
    parallelism: Parallelism,
) -> Option<(CoverSet, usize)> {
    let steer = inst.params.steering_count();
    let pairs: Vec<(usize, usize)> = state
        .pool
        .iter()
        .flat_map(|&l| (0..steer).map(move |s| (l, s)))
        .collect();
    let evaluated = pairs.len();
    let best = match parallelism {
        Parallelism::Serial => pairs
            .iter()
            .map(|&(l, s)| evaluate(inst, state, l, s))
            .reduce(better),
        Parallelism::Parallel => pairs
            .par_iter()
            .map(|&(l, s)| evaluate(inst, state, l, s))
            .reduce_with(better),
    }?;
    Some((best, evaluated))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyStep {
    pub iteration: usize,
    pub cover: CoverSet,
    /// `Σ q_m` over the newly satisfied members.
    pub marginal_weight: f64,
    pub running_coverage: f64,
    pub running_normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyTrace {
    #[serde(default = "crate::default_format_version")]
    pub format_version: u32,
    pub alpha: f64,
    /// Coverage of GPs satisfied before any AP is placed (those with `β = 0`).
    pub base_coverage: f64,
    /// GPs satisfied with no AP at all.
    pub base_satisfied: Vec<usize>,
    pub total_presence: f64,
    pub steps: Vec<GreedyStep>,
    /// Number of `(candidate, steering)` pairs scored over the whole run.
    pub evaluations: usize,
}

impl GreedyTrace {
    /// GPs satisfied after the first `k` iterations (excluding the `β = 0` base set).
    pub fn satisfied_after(&self, k: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.steps[..k]
            .iter()
            .flat_map(|s| s.cover.newly_satisfied.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    pub fn from_json(text: &str) -> Result<GreedyTrace> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Greedy placement and steering until normalized coverage reaches `alpha`.
pub fn greedy_place(
    inst: &Instance<'_>,
    alpha: f64,
    parallelism: Parallelism,
) -> Result<(Deployment, GreedyTrace)> {
    check_alpha(alpha)?;
    let mut state = GreedyState::new(inst);
    let mut trace = GreedyTrace {
        format_version: FORMAT_VERSION,
        alpha,
        base_coverage: state.coverage,
        base_satisfied: (0..inst.num_gps())
            .filter(|&m| state.satisfied[m])
            .collect(),
        total_presence: inst.total_presence(),
        steps: Vec::new(),
        evaluations: 0,
    };
    let reached = |state: &GreedyState| inst.normalize(state.coverage) + PROB_EPS >= alpha;
    while !reached(&state) {
        let Some((best, evaluated)) = greedy_iteration_best(inst, &state, parallelism) else {
            return Err(infeasible(
                inst,
                alpha,
                state,
                trace,
                "candidate pool exhausted",
            ));
        };
        trace.evaluations += evaluated;
        if best.score.is_zero() {
            return Err(infeasible(
                inst,
                alpha,
                state,
                trace,
                "no remaining candidate improves any unsatisfied grid position",
            ));
        }
        state.commit(inst, &best);
        trace.steps.push(GreedyStep {
            iteration: trace.steps.len() + 1,
            marginal_weight: best.score.satisfied,
            cover: best,
            running_coverage: state.coverage,
            running_normalized: inst.normalize(state.coverage),
        });
    }
    Ok((finalize(inst, state.selected), trace))
}

fn infeasible(
    inst: &Instance<'_>,
    alpha: f64,
    state: GreedyState,
    trace: GreedyTrace,
    reason: &str,
) -> Error {
    let deployment = finalize(inst, state.selected);
    Error::Infeasible(Box::new(Infeasible {
        target: alpha,
        achieved: deployment.normalized_coverage,
        deployment,
        trace: Some(trace),
        reason: reason.to_string(),
    }))
}
