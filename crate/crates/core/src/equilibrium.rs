//! Extremal equilibria via 1-cores of adjusted networks, best-response
//! dynamics, full enumeration, and checks on the equilibrium lattice.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::game::{ActionProfile, IntRows, ThresholdGame, TiePolicy, Utility};
use crate::graph::{AgentId, AgentSet};
use crate::kcore::core_within;
use crate::par::{self, Exec};
use crate::rational::Rational;
use crate::transform::{adjust_default, AdjustedNetwork};

pub const DEFAULT_CORE_MAX_AGENTS: usize = 25;
pub const DEFAULT_BRUTE_MAX_AGENTS: usize = 20;

/// Agents with more out-neighbours than this are assumed to admit an
/// indifference rather than searched.
pub const MAX_INDIFFERENCE_NEIGHBORS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    CoreCharacterization,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumSet {
    /// In canonical (bitmask) order.
    pub profiles: Vec<ActionProfile>,
    pub method: Method,
}

impl EquilibriumSet {
    /// The element below every other one, if there is one.
    pub fn minimum(&self) -> Option<&ActionProfile> {
        self.profiles.iter().find(|x| self.profiles.iter().all(|y| x.leq(y)))
    }

    /// The element above every other one, if there is one.
    pub fn maximum(&self) -> Option<&ActionProfile> {
        self.profiles.iter().find(|x| self.profiles.iter().all(|y| y.leq(x)))
    }

    pub fn contains(&self, x: &ActionProfile) -> bool {
        self.profiles.binary_search(x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicsTrace {
    pub states: Vec<ActionProfile>,
    /// Index into `states` of the fixed point.
    pub converged_at: usize,
}

impl DynamicsTrace {
    pub fn fixed_point(&self) -> &ActionProfile {
        &self.states[self.converged_at]
    }
}

fn shadow_core(h: &AdjustedNetwork) -> Vec<bool> {
    let n = h.network().len();
    let mut prot = vec![false; n];
    prot[h.shadow().index()] = true;
    core_within(h.network(), &Rational::one(), &prot, vec![true; n], None)
}

/// Agent `i` plays 1 exactly when it is in the 1-core of `H(G, k)`.
pub fn maximal_equilibrium(game: &ThresholdGame) -> Result<ActionProfile> {
    let h = adjust_default(game)?;
    let core = shadow_core(&h);
    Ok(ActionProfile::from_bools(core[..game.len()].to_vec()))
}

/// Agent `i` plays 1 exactly when it is *not* in the 1-core of the adjusted
/// complementary network.
pub fn minimal_equilibrium(game: &ThresholdGame) -> Result<ActionProfile> {
    let h = adjust_default(&game.complementary())?;
    let core = shadow_core(&h);
    Ok(ActionProfile::from_bools(core[..game.len()].iter().map(|&c| !c).collect()))
}

/// One synchronous round: every agent plays its tie-resolved best response
/// to the current profile.
pub fn best_response_step(game: &ThresholdGame, x: &ActionProfile, ties: TiePolicy) -> ActionProfile {
    ActionProfile::from_bools(
        game.network()
            .agents()
            .map(|i| {
                crate::game::BestResponse::from_comparison(&game.neighbor_sum(i, x), game.threshold(i)).resolve(ties)
            })
            .collect(),
    )
}

/// Synchronous best-response dynamics from `initial` until a fixed point.
/// Fails with `NonConvergent` on a cycle or after `2^n` rounds.
pub fn br_dynamics(game: &ThresholdGame, initial: &ActionProfile, ties: TiePolicy) -> Result<DynamicsTrace> {
    if initial.len() != game.len() {
        return Err(Error::InvalidParams("initial profile length does not match game".into()));
    }
    let limit: u64 = if game.len() >= 63 { u64::MAX } else { 1 << game.len() };
    let mut states = vec![initial.clone()];
    let mut seen: HashSet<ActionProfile> = HashSet::from([initial.clone()]);
    let mut rounds = 0u64;
    loop {
        let current = states.last().expect("non-empty");
        let next = best_response_step(game, current, ties);
        if next == *current {
            let converged_at = states.len() - 1;
            return Ok(DynamicsTrace { states, converged_at });
        }
        rounds += 1;
        if rounds > limit || !seen.insert(next.clone()) {
            return Err(Error::NonConvergent { rounds });
        }
        states.push(next);
    }
}

/// An agent together with a set of its out-neighbours whose weights sum to
/// exactly its threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Indifference {
    pub agent: AgentId,
    /// `None` when the agent has too many neighbours to search.
    pub witness: Option<AgentSet>,
}

/// Searches, agent by agent, for a subset of out-neighbours whose weight is
/// exactly the threshold (meet in the middle over the two halves of the
/// neighbourhood).
pub fn find_indifference(game: &ThresholdGame) -> Option<Indifference> {
    let net = game.network();
    net.agents().find_map(|i| {
        let k = game.threshold(i);
        if k.is_negative() {
            return None;
        }
        let row = net.out_edges(i);
        if row.len() > MAX_INDIFFERENCE_NEIGHBORS {
            return Some(Indifference { agent: i, witness: None });
        }
        let (left, right) = row.split_at(row.len() / 2);
        let sums = |half: &[(AgentId, Rational)]| -> Vec<(Rational, u32)> {
            (0u32..1 << half.len())
                .map(|m| {
                    let s: Rational = half
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| m >> b & 1 == 1)
                        .map(|(_, (_, w))| w)
                        .sum();
                    (s, m)
                })
                .filter(|(s, _)| s <= k)
                .collect()
        };
        let mut lookup: HashMap<Rational, u32> = HashMap::new();
        for (s, m) in sums(left) {
            lookup.entry(s).or_insert(m);
        }
        sums(right).into_iter().find_map(|(s, rm)| {
            lookup.get(&(k - &s)).map(|&lm| {
                let mut witness = AgentSet::new();
                witness.extend(left.iter().enumerate().filter(|(b, _)| lm >> b & 1 == 1).map(|(_, (j, _))| *j));
                witness.extend(right.iter().enumerate().filter(|(b, _)| rm >> b & 1 == 1).map(|(_, (j, _))| *j));
                Indifference {
                    agent: i,
                    witness: Some(witness),
                }
            })
        })
    })
}

fn enumeration_limit(n: usize, max_agents: usize) -> Result<()> {
    if n > max_agents || n >= 64 {
        return Err(Error::TooLarge { n, max: max_agents.min(63) });
    }
    Ok(())
}

/// Every equilibrium of an indifference-free game: `M` is an equilibrium iff
/// each member of `M` is in the 1-core of `H[M + shadow]` and no outsider
/// `i` is in the 1-core of `H[M + i + shadow]`.
pub fn all_equilibria_core(game: &ThresholdGame, max_agents: usize) -> Result<EquilibriumSet> {
    all_equilibria_core_with(game, max_agents, Exec::default())
}

pub fn all_equilibria_core_with(game: &ThresholdGame, max_agents: usize, exec: Exec) -> Result<EquilibriumSet> {
    let n = game.len();
    enumeration_limit(n, max_agents)?;
    if let Some(ind) = find_indifference(game) {
        return Err(Error::IndifferencePresent {
            agent: game.network().label(ind.agent).to_string(),
            threshold: game.threshold(ind.agent).to_string(),
        });
    }
    let h = adjust_default(game)?;
    let hnet = h.network();
    let s = h.shadow().index();
    let mut prot = vec![false; n + 1];
    prot[s] = true;
    let one = Rational::one();
    let profiles = par::filter_map(exec, 1u64 << n, |mask| {
        let mut alive: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        alive.push(true);
        if core_within(hnet, &one, &prot, alive.clone(), None) != alive {
            return None;
        }
        for i in (0..n).filter(|i| mask >> i & 1 == 0) {
            let mut grown = alive.clone();
            grown[i] = true;
            if core_within(hnet, &one, &prot, grown, None)[i] {
                return None;
            }
        }
        Some(ActionProfile::from_mask(n, mask))
    });
    Ok(EquilibriumSet {
        profiles,
        method: Method::CoreCharacterization,
    })
}

/// Every equilibrium, by testing all `2^n` profiles. Exact indifferences
/// are handled: an indifferent agent may play either action.
pub fn all_equilibria_brute(game: &ThresholdGame, max_agents: usize) -> Result<EquilibriumSet> {
    all_equilibria_brute_with(game, max_agents, Exec::default())
}

pub fn all_equilibria_brute_with(game: &ThresholdGame, max_agents: usize, exec: Exec) -> Result<EquilibriumSet> {
    let n = game.len();
    enumeration_limit(n, max_agents)?;
    let rows = IntRows::for_game(game);
    let profiles = par::filter_map(exec, 1u64 << n, |mask| {
        let x = ActionProfile::from_mask(n, mask);
        let nash = match &rows {
            Some(r) => r.is_nash(x.as_slice()),
            None => game.is_nash(&x),
        };
        nash.then_some(x)
    });
    Ok(EquilibriumSet {
        profiles,
        method: Method::BruteForce,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeReport {
    /// Members of the set that are not equilibria.
    pub non_equilibria: Vec<ActionProfile>,
    pub minimum: Option<ActionProfile>,
    pub maximum: Option<ActionProfile>,
    /// Members not between the minimum and the maximum.
    pub out_of_bounds: Vec<ActionProfile>,
    /// Pairs whose join or meet, closed under best responses, does not land
    /// on a bounding equilibrium in the set.
    pub closure_failures: Vec<(ActionProfile, ActionProfile)>,
    /// Pairs whose raw elementwise join is not itself an equilibrium. This is
    /// informational: equilibrium sets need not be sublattices.
    pub raw_join_not_nash: usize,
    pub raw_meet_not_nash: usize,
}

impl LatticeReport {
    pub fn passed(&self) -> bool {
        self.non_equilibria.is_empty()
            && self.minimum.is_some()
            && self.maximum.is_some()
            && self.out_of_bounds.is_empty()
            && self.closure_failures.is_empty()
    }
}

/// Checks the lattice structure of a complete equilibrium set: a least and a
/// greatest element exist, and each pair has an upper bound (reached from
/// the join by ties-to-1 dynamics) and a lower bound (reached from the meet
/// by ties-to-0 dynamics) inside the set.
pub fn verify_lattice(game: &ThresholdGame, eqs: &EquilibriumSet) -> LatticeReport {
    let non_equilibria: Vec<ActionProfile> = eqs.profiles.iter().filter(|x| !game.is_nash(x)).cloned().collect();
    let minimum = eqs.minimum().cloned();
    let maximum = eqs.maximum().cloned();
    let mut report = LatticeReport {
        non_equilibria,
        minimum: minimum.clone(),
        maximum: maximum.clone(),
        out_of_bounds: Vec::new(),
        closure_failures: Vec::new(),
        raw_join_not_nash: 0,
        raw_meet_not_nash: 0,
    };
    if !report.non_equilibria.is_empty() {
        return report;
    }
    if let (Some(lo), Some(hi)) = (&minimum, &maximum) {
        report.out_of_bounds = eqs.profiles.iter().filter(|x| !(lo.leq(x) && x.leq(hi))).cloned().collect();
    }
    let n = game.len();
    for (a, x) in eqs.profiles.iter().enumerate() {
        for y in &eqs.profiles[a + 1..] {
            let join = x.join(y);
            let meet = x.meet(y);
            report.raw_join_not_nash += usize::from(!game.is_nash(&join));
            report.raw_meet_not_nash += usize::from(!game.is_nash(&meet));
            let up = br_dynamics(game, &join, TiePolicy::TiesTo1).ok();
            let down = br_dynamics(game, &meet, TiePolicy::TiesTo0).ok();
            let up_ok = up.is_some_and(|t| {
                let u = t.fixed_point();
                t.converged_at <= n && x.leq(u) && y.leq(u) && eqs.contains(u)
            });
            let down_ok = down.is_some_and(|t| {
                let d = t.fixed_point();
                t.converged_at <= n && d.leq(x) && d.leq(y) && eqs.contains(d)
            });
            if !(up_ok && down_ok) {
                report.closure_failures.push((x.clone(), y.clone()));
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParetoViolation {
    pub equilibrium: ActionProfile,
    pub agent: AgentId,
    pub at_maximum: Rational,
    pub at_equilibrium: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParetoReport {
    pub maximum: Option<ActionProfile>,
    /// Agents strictly better off at some other equilibrium.
    pub violations: Vec<ParetoViolation>,
    /// Other equilibria that no agent strictly prefers the maximum to; only
    /// collected when strictness was requested.
    pub not_strict: Vec<ActionProfile>,
}

impl ParetoReport {
    pub fn passed(&self) -> bool {
        self.maximum.is_some() && self.violations.is_empty() && self.not_strict.is_empty()
    }
}

/// Checks that the maximal equilibrium weakly Pareto dominates every other
/// equilibrium in `eqs`. With `require_strict` (strictly positive spillovers
/// on a strongly connected network) each other equilibrium must also leave
/// some agent strictly worse off.
pub fn pareto_check(
    game: &ThresholdGame,
    utility: &dyn Utility,
    eqs: &EquilibriumSet,
    require_strict: bool,
) -> ParetoReport {
    let maximum = eqs.maximum().cloned();
    let mut report = ParetoReport {
        maximum: maximum.clone(),
        violations: Vec::new(),
        not_strict: Vec::new(),
    };
    let Some(top) = maximum else {
        return report;
    };
    let strict = require_strict && game.network().is_strongly_connected();
    let best: Vec<Rational> = game.network().agents().map(|i| utility.utility(i, &top)).collect();
    for x in eqs.profiles.iter().filter(|x| **x != top) {
        let mut some_strict = false;
        for i in game.network().agents() {
            let u = utility.utility(i, x);
            let b = &best[i.index()];
            if u > *b {
                report.violations.push(ParetoViolation {
                    equilibrium: x.clone(),
                    agent: i,
                    at_maximum: b.clone(),
                    at_equilibrium: u,
                });
            } else if u < *b {
                some_strict = true;
            }
        }
        if strict && !some_strict {
            report.not_strict.push(x.clone());
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{LinearQuadraticParams, LqUtility};
    use crate::graph::Network;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn p(bits: &str) -> ActionProfile {
        ActionProfile::from_bools(bits.chars().map(|c| c == '1').collect())
    }

    fn two_cycle(k: (i64, i64)) -> ThresholdGame {
        let net = Network::from_edges(&["A", "B"], &[("A", "B", q(1, 1)), ("B", "A", q(1, 1))]).unwrap();
        ThresholdGame::new(net, vec![q(k.0, 1), q(k.1, 1)]).unwrap()
    }

    fn chain(n: usize) -> ThresholdGame {
        let mut b = Network::builder();
        for i in 0..n {
            b.agent(format!("c{i}")).unwrap();
        }
        for i in 0..n.saturating_sub(1) {
            b.edge(AgentId::new(i), AgentId::new(i + 1), q(1, 1)).unwrap();
            b.edge(AgentId::new(i + 1), AgentId::new(i), q(1, 1)).unwrap();
        }
        let mut k = vec![q(1, 2); n];
        k[0] = q(-1, 1);
        ThresholdGame::new(b.build(), k).unwrap()
    }

    #[test]
    fn maximal_examples() {
        assert_eq!(maximal_equilibrium(&two_cycle((1, 1))).unwrap(), p("11"));
        assert_eq!(maximal_equilibrium(&two_cycle((3, 3))).unwrap(), p("00"));
        assert_eq!(maximal_equilibrium(&two_cycle((-1, 1))).unwrap(), p("11"));
    }

    #[test]
    fn minimal_examples() {
        assert_eq!(minimal_equilibrium(&two_cycle((1, 1))).unwrap(), p("00"));
        assert_eq!(minimal_equilibrium(&two_cycle((0, -2))).unwrap(), p("11"));
        assert_eq!(minimal_equilibrium(&chain(3)).unwrap(), p("111"));
        assert_eq!(minimal_equilibrium(&two_cycle((-1, -3))).unwrap(), p("11"));
        // a zero threshold only ties when nobody else acts, so the empty
        // profile stays an equilibrium
        assert_eq!(minimal_equilibrium(&two_cycle((0, 0))).unwrap(), p("00"));
        assert_eq!(maximal_equilibrium(&two_cycle((0, 0))).unwrap(), p("11"));
    }

    #[test]
    fn dynamics_examples() {
        let t = br_dynamics(&two_cycle((1, 2)), &p("00"), TiePolicy::TiesTo0).unwrap();
        assert_eq!(t.states, vec![p("00")]);
        assert_eq!(t.converged_at, 0);

        let t = br_dynamics(&chain(3), &p("000"), TiePolicy::TiesTo0).unwrap();
        assert_eq!(t.states, vec![p("000"), p("100"), p("110"), p("111")]);
        assert_eq!(t.converged_at, 3);

        let g = two_cycle((1, 1));
        let t = br_dynamics(&g, &p("11"), TiePolicy::TiesTo1).unwrap();
        assert_eq!(t.fixed_point(), &maximal_equilibrium(&g).unwrap());
    }

    #[test]
    fn dynamics_can_cycle() {
        // each agent wants to copy the other; synchronous updates swap them
        let g = two_cycle((1, 1));
        let err = br_dynamics(&g, &p("10"), TiePolicy::TiesTo1).unwrap_err();
        assert!(matches!(err, Error::NonConvergent { .. }));
    }

    #[test]
    fn enumeration_examples() {
        let g = two_cycle((1, 1));
        let brute = all_equilibria_brute(&g, DEFAULT_BRUTE_MAX_AGENTS).unwrap();
        assert_eq!(brute.profiles, vec![p("00"), p("11")]);
        // the 2-cycle at k = 1 is indifferent when the partner is active
        assert!(matches!(
            all_equilibria_core(&g, DEFAULT_CORE_MAX_AGENTS),
            Err(Error::IndifferencePresent { .. })
        ));
        let g = two_cycle((1, 2)).with_threshold(AgentId::new(0), q(1, 2)).unwrap();
        let g = g.with_threshold(AgentId::new(1), q(1, 2)).unwrap();
        let core = all_equilibria_core(&g, DEFAULT_CORE_MAX_AGENTS).unwrap();
        assert_eq!(core.profiles, vec![p("00"), p("11")]);
        assert_eq!(core.profiles, all_equilibria_brute(&g, 20).unwrap().profiles);

        let single = ThresholdGame::uniform(Network::from_edges(&["A"], &[]).unwrap(), q(-1, 1));
        assert_eq!(all_equilibria_core(&single, 25).unwrap().profiles, vec![p("1")]);

        let hopeless = two_cycle((5, 5));
        assert_eq!(all_equilibria_brute(&hopeless, 20).unwrap().profiles, vec![p("00")]);
    }

    #[test]
    fn brute_force_keeps_both_tie_resolutions() {
        // A is indifferent exactly when B plays 1; B always plays 1
        let net = Network::from_edges(&["A", "B"], &[("A", "B", q(3, 2))]).unwrap();
        let g = ThresholdGame::new(net, vec![q(3, 2), q(-1, 1)]).unwrap();
        let eqs = all_equilibria_brute(&g, 20).unwrap();
        assert_eq!(eqs.profiles, vec![p("01"), p("11")]);
        assert_eq!(
            find_indifference(&g),
            Some(Indifference {
                agent: AgentId::new(0),
                witness: Some([AgentId::new(1)].into())
            })
        );
    }

    #[test]
    fn zero_threshold_counts_as_indifferent() {
        let g = two_cycle((0, 1)).with_threshold(AgentId::new(1), q(1, 3)).unwrap();
        let ind = find_indifference(&g).unwrap();
        assert_eq!(ind.agent, AgentId::new(0));
        assert_eq!(ind.witness, Some(AgentSet::new()));
    }

    #[test]
    fn size_limits() {
        let g = chain(6);
        assert_eq!(all_equilibria_brute(&g, 5), Err(Error::TooLarge { n: 6, max: 5 }));
        assert_eq!(all_equilibria_core(&g, 5), Err(Error::TooLarge { n: 6, max: 5 }));
    }

    #[test]
    fn lattice_checks() {
        let g = two_cycle((1, 1));
        let eqs = all_equilibria_brute(&g, 20).unwrap();
        assert!(verify_lattice(&g, &eqs).passed());

        let mut bad = eqs.clone();
        bad.profiles.insert(1, p("10"));
        let r = verify_lattice(&g, &bad);
        assert!(!r.passed());
        assert_eq!(r.non_equilibria, vec![p("10")]);
    }

    #[test]
    fn pareto_examples() {
        let g = two_cycle((1, 1));
        let eqs = all_equilibria_brute(&g, 20).unwrap();
        let params = LinearQuadraticParams::uniform(2, q(1, 4), q(1, 1), q(1, 2)).unwrap();
        let u = LqUtility {
            params: &params,
            network: g.network(),
        };
        assert_eq!(u.utility(AgentId::new(0), &p("11")), q(1, 4));
        let r = pareto_check(&g, &u, &eqs, false);
        assert!(r.passed());

        let single = EquilibriumSet {
            profiles: vec![p("00")],
            method: Method::BruteForce,
        };
        assert!(pareto_check(&g, &u, &single, true).passed());

        let net = g.network().clone();
        let spiteful = move |i: AgentId, x: &ActionProfile| -> Rational {
            -net.out_edges(i).iter().filter(|(j, _)| x.get(*j)).map(|(_, w)| w).sum::<Rational>()
        };
        let r = pareto_check(&g, &spiteful, &eqs, false);
        assert!(!r.passed());
        assert_eq!(r.violations.len(), 2);
        assert_eq!(r.violations[0].equilibrium, p("00"));
    }
}
