//! Exhaustive minimum-AP search over sites, steerings and assignments.

use rayon::prelude::*;

use super::{check_alpha, finalize, Deployment, Parallelism, PlacedAp};
use crate::error::{Error, Infeasible, Result};
use crate::instance::Instance;
use crate::scenarios::PROB_EPS;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_l: usize,
    pub max_m: usize,
}

impl Default for ExactLimits {
    fn default() -> Self {
        Self {
            max_l: 6,
            max_m: 12,
        }
    }
}

/// Hard ceiling from the 64-bit GP masks used for steering deduplication.
const MASK_BITS: usize = 64;

/// Sites beyond this make the per-GP submask tables impractically large.
const MAX_SITES: usize = 10;

/// A distinct steering of one AP: the GPs it can serve, with the lowest steering index producing them.
#[derive(Clone, Debug)]
struct SteerOption {
    s: usize,
    mask: u64,
}

fn steer_options(inst: &Instance<'_>, l: usize) -> Vec<SteerOption> {
    let mut out: Vec<SteerOption> = Vec::new();
    for s in 0..inst.params.steering_count() {
        let mask = inst
            .footprint(l, s)
            .iter()
            .filter(|&&m| inst.profile(m, l).in_lm)
            .fold(0u64, |acc, &m| acc | 1 << m);
        if mask != 0 && out.iter().all(|o| o.mask != mask) {
            out.push(SteerOption { s, mask });
        }
    }
    out
}

/// Per-GP tables over candidate masks: satisfaction, and minimal satisfying submasks.
struct SatTable {
    minimal: Vec<Vec<Vec<u64>>>,
    satisfied: Vec<Vec<bool>>,
}

impl SatTable {
    fn new(inst: &Instance<'_>) -> Self {
        let full = 1usize << inst.num_candidates();
        let satisfied: Vec<Vec<bool>> = (0..inst.num_gps())
            .map(|m| (0..full).map(|c| inst.satisfied(m, c as u64)).collect())
            .collect();
        let minimal = satisfied
            .iter()
            .map(|sat| {
                let minimal_sub: Vec<bool> = (0..full)
                    .map(|c| sat[c] && (0..64).all(|b| c & (1 << b) == 0 || !sat[c & !(1 << b)]))
                    .collect();
                (0..full)
                    .map(|cov| {
                        let mut subs: Vec<u64> = (1..full)
                            .filter(|&c| c & !cov == 0 && minimal_sub[c])
                            .map(|c| c as u64)
                            .collect();
                        subs.sort_by_key(|c| (c.count_ones(), *c));
                        subs
                    })
                    .collect()
            })
            .collect();
        Self { minimal, satisfied }
    }
}

struct ConfigResult {
    coverage: f64,
    /// Per GP: candidate mask it is assigned to (0 = unassigned).
    assignment: Vec<u64>,
}

struct Search<'s> {
    gps: Vec<(usize, f64, &'s [u64])>,
    suffix: Vec<f64>,
    slot_of: [usize; MASK_BITS],
    load: Vec<usize>,
    capacity: usize,
    need: f64,
    best: Option<f64>,
    current: Vec<u64>,
    best_assignment: Vec<u64>,
}

impl Search<'_> {
    fn dfs(&mut self, i: usize, cur: f64) {
        if i == self.gps.len() {
            if cur + 1e-9 >= self.need && self.best.is_none_or(|b| cur > b) {
                self.best = Some(cur);
                self.best_assignment.clone_from(&self.current);
            }
            return;
        }
        let bound = cur + self.suffix[i];
        if bound + 1e-9 < self.need || self.best.is_some_and(|b| bound <= b) {
            return;
        }
        let (_, q, options) = self.gps[i];
        for &sub in options {
            let fits = bits(sub).all(|l| self.load[self.slot_of[l]] < self.capacity);
            if !fits {
                continue;
            }
            for l in bits(sub) {
                self.load[self.slot_of[l]] += 1;
            }
            self.current[i] = sub;
            self.dfs(i + 1, cur + q);
            self.current[i] = 0;
            for l in bits(sub) {
                self.load[self.slot_of[l]] -= 1;
            }
        }
        self.dfs(i + 1, cur);
    }
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..MASK_BITS).filter(move |&b| mask & (1 << b) != 0)
}

/// Best assignment for one configuration (sites with chosen steering masks).
fn solve_config(
    inst: &Instance<'_>,
    table: &SatTable,
    order: &[usize],
    config: &[(usize, u64)],
    need: f64,
) -> Option<ConfigResult> {
    let mut slot_of = [usize::MAX; MASK_BITS];
    for (slot, &(l, _)) in config.iter().enumerate() {
        slot_of[l] = slot;
    }
    let gps: Vec<(usize, f64, &[u64])> = order
        .iter()
        .filter_map(|&m| {
            let cov = config
                .iter()
                .filter(|(_, mask)| mask & (1 << m) != 0)
                .fold(0u64, |acc, &(l, _)| acc | 1 << l);
            if !table.satisfied[m][cov as usize] {
                return None;
            }
            Some((m, inst.q(m), table.minimal[m][cov as usize].as_slice()))
        })
        .collect();
    let mut suffix = vec![0.0; gps.len() + 1];
    for i in (0..gps.len()).rev() {
        suffix[i] = suffix[i + 1] + gps[i].1;
    }
    let n = gps.len();
    let ids: Vec<usize> = gps.iter().map(|g| g.0).collect();
    let mut search = Search {
        gps,
        suffix,
        slot_of,
        load: vec![0; config.len()],
        capacity: inst.params.capacity_per_beam,
        need,
        best: None,
        current: vec![0; n],
        best_assignment: vec![0; n],
    };
    search.dfs(0, 0.0);
    let coverage = search.best?;
    let mut assignment = vec![0u64; inst.num_gps()];
    for (k, &m) in ids.iter().enumerate() {
        assignment[m] = search.best_assignment[k];
    }
    Some(ConfigResult {
        coverage,
        assignment,
    })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Mixed-radix decode: the first site is the most significant digit.
fn decode(mut index: usize, radices: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; radices.len()];
    for (d, &r) in digits.iter_mut().zip(radices).rev() {
        *d = index % r;
        index /= r;
    }
    digits
}

struct Best {
    coverage: f64,
    selected: Vec<PlacedAp>,
}

fn build_selected(
    inst: &Instance<'_>,
    config: &[(usize, usize)],
    assignment: &[u64],
) -> Vec<PlacedAp> {
    config
        .iter()
        .map(|&(l, s)| {
            let st = inst.steering(s);
            PlacedAp {
                loc: l,
                theta: st.theta,
                phi: st.phi,
                assigned: (0..inst.num_gps())
                    .filter(|&m| assignment[m] & (1 << l) != 0)
                    .collect(),
            }
        })
        .filter(|ap| !ap.assigned.is_empty())
        .collect()
}

/// Searches one set of sites over all steering tuples.
fn best_for_sites(
    inst: &Instance<'_>,
    table: &SatTable,
    order: &[usize],
    options: &[Vec<SteerOption>],
    sites: &[usize],
    need: f64,
    parallelism: Parallelism,
) -> Option<Best> {
    let radices: Vec<usize> = sites.iter().map(|&l| options[l].len()).collect();
    if radices.contains(&0) {
        return None;
    }
    let total: usize = radices.iter().product();
    let run = |t: usize| {
        let digits = decode(t, &radices);
        let config: Vec<(usize, u64)> = sites
            .iter()
            .zip(&digits)
            .map(|(&l, &d)| (l, options[l][d].mask))
            .collect();
        solve_config(inst, table, order, &config, need).map(|r| (t, r))
    };
    let pick = |a: Option<(usize, ConfigResult)>, b: Option<(usize, ConfigResult)>| match (a, b) {
        (Some(a), Some(b)) => {
            if b.1.coverage > a.1.coverage || (b.1.coverage == a.1.coverage && b.0 < a.0) {
                Some(b)
            } else {
                Some(a)
            }
        }
        (a, b) => a.or(b),
    };
    let found = match parallelism {
        Parallelism::Serial => (0..total).map(run).fold(None, pick),
        Parallelism::Parallel => (0..total).into_par_iter().map(run).reduce(|| None, pick),
    };
    let (t, res) = found?;
    let digits = decode(t, &radices);
    let config: Vec<(usize, usize)> = sites
        .iter()
        .zip(&digits)
        .map(|(&l, &d)| (l, options[l][d].s))
        .collect();
    Some(Best {
        coverage: res.coverage,
        selected: build_selected(inst, &config, &res.assignment),
    })
}

/// Minimum number of APs meeting `alpha`; ties go to higher coverage, then to the
/// lexicographically first (sites, steering) configuration.
pub fn exact_place(
    inst: &Instance<'_>,
    alpha: f64,
    limits: ExactLimits,
    parallelism: Parallelism,
) -> Result<Deployment> {
    check_alpha(alpha)?;
    let (l_count, m_count) = (inst.num_candidates(), inst.num_gps());
    let max_m = limits.max_m.min(MASK_BITS);
    let max_l = limits.max_l.min(MAX_SITES);
    if l_count > max_l || m_count > max_m {
        return Err(Error::LimitExceeded {
            l: l_count,
            m: m_count,
            max_l,
            max_m,
        });
    }
    let base: f64 = (0..m_count)
        .filter(|&m| inst.satisfied(m, 0))
        .map(|m| inst.q(m))
        .fold(0.0, |acc, x| acc + x);
    let need = (alpha - PROB_EPS) * inst.total_presence() - base;
    if need <= 0.0 {
        return Ok(finalize(inst, Vec::new()));
    }
    let table = SatTable::new(inst);
    let options: Vec<Vec<SteerOption>> = (0..l_count).map(|l| steer_options(inst, l)).collect();
    let mut order: Vec<usize> = (0..m_count).filter(|&m| !inst.satisfied(m, 0)).collect();
    order.sort_by(|&a, &b| inst.q(b).total_cmp(&inst.q(a)).then(a.cmp(&b)));

    for k in 1..=l_count {
        let mut level: Option<Best> = None;
        for sites in combinations(l_count, k) {
            let Some(found) =
                best_for_sites(inst, &table, &order, &options, &sites, need, parallelism)
            else {
                continue;
            };
            // earlier site sets win ties
            if level.as_ref().is_none_or(|b| found.coverage > b.coverage) {
                level = Some(found);
            }
        }
        if let Some(best) = level {
            return Ok(finalize(inst, best.selected));
        }
    }

    let usable: Vec<usize> = (0..l_count).filter(|&l| !options[l].is_empty()).collect();
    let partial = best_for_sites(
        inst,
        &table,
        &order,
        &options,
        &usable,
        f64::NEG_INFINITY,
        parallelism,
    )
    .map(|b| b.selected)
    .unwrap_or_default();
    let deployment = finalize(inst, partial);
    Err(Error::Infeasible(Box::new(Infeasible {
        target: alpha,
        achieved: deployment.normalized_coverage,
        deployment,
        trace: None,
        reason: "not reachable even with every candidate deployed".into(),
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelParams;
    use crate::venue::{generate_venue, GeneratorOverrides, VenueKind};

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(
            combinations(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn decode_is_mixed_radix() {
        assert_eq!(decode(0, &[2, 3]), vec![0, 0]);
        assert_eq!(decode(1, &[2, 3]), vec![0, 1]);
        assert_eq!(decode(3, &[2, 3]), vec![1, 0]);
        assert_eq!(decode(5, &[2, 3]), vec![1, 2]);
    }

    fn toy_params() -> ChannelParams {
        ChannelParams {
            capacity_per_beam: 3,
            ..ChannelParams::default()
        }
    }

    #[test]
    fn zero_target_needs_no_ap() {
        let v = generate_venue(VenueKind::Toy, &GeneratorOverrides::default());
        let p = toy_params();
        let inst = Instance::with_beta(&v, &p, 0.7).unwrap();
        let d = exact_place(&inst, 0.0, ExactLimits::default(), Parallelism::Serial).unwrap();
        assert_eq!(d.ap_count(), 0);
    }

    #[test]
    fn limits_are_checked_before_search() {
        let v = generate_venue(VenueKind::Toy, &GeneratorOverrides::default());
        let p = toy_params();
        let inst = Instance::with_beta(&v, &p, 0.7).unwrap();
        let tight = ExactLimits {
            max_l: 3,
            max_m: 12,
        };
        match exact_place(&inst, 0.5, tight, Parallelism::Serial) {
            Err(Error::LimitExceeded { l, max_l, .. }) => assert_eq!((l, max_l), (4, 3)),
            other => panic!("{other:?}"),
        }
        let tight = ExactLimits { max_l: 6, max_m: 5 };
        assert!(matches!(
            exact_place(&inst, 0.5, tight, Parallelism::Serial),
            Err(Error::LimitExceeded { m: 6, .. })
        ));
    }

    #[test]
    fn serial_and_parallel_agree() {
        let v = generate_venue(VenueKind::Toy, &GeneratorOverrides::default());
        let p = toy_params();
        let inst = Instance::with_beta(&v, &p, 0.7).unwrap();
        for alpha in [0.3, 0.6, 0.9] {
            let a = exact_place(&inst, alpha, ExactLimits::default(), Parallelism::Serial);
            let b = exact_place(&inst, alpha, ExactLimits::default(), Parallelism::Parallel);
            match (a, b) {
                (Ok(a), Ok(b)) => assert_eq!(a, b),
                (Err(Error::Infeasible(a)), Err(Error::Infeasible(b))) => {
                    assert_eq!(a.deployment, b.deployment)
                }
                (a, b) => panic!("{a:?} vs {b:?}"),
            }
        }
    }
}
