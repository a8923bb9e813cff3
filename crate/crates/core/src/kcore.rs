//! Weighted directed k-cores (by out-degree), peeling values, and maximal
//! q-cohesive sets.

use std::fmt;

use crate::error::{Error, Result};
use crate::game::ThresholdGame;
use crate::graph::{AgentId, AgentSet, Network};
use crate::rational::Rational;
use crate::transform::adjust_default;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreResult {
    pub members: AgentSet,
    pub subnetwork: Network,
    /// Agents deleted in each round, in round order.
    pub trace: Vec<AgentSet>,
}

/// Repeatedly deletes every unprotected agent whose out-degree within the
/// surviving agents is strictly below `k`. Protected agents are never
/// deleted, though links to deleted agents still disappear.
pub fn k_core(net: &Network, k: &Rational, protected: &AgentSet) -> CoreResult {
    let mask = protection_mask(net, protected);
    let mut trace = Vec::new();
    let alive = core_within(net, k, &mask, vec![true; net.len()], Some(&mut trace));
    let members: AgentSet = net.agents().filter(|a| alive[a.index()]).collect();
    let subnetwork = net
        .induced_subnetwork(&members)
        .expect("members are agents of the network");
    CoreResult {
        members,
        subnetwork,
        trace,
    }
}

pub(crate) fn protection_mask(net: &Network, protected: &AgentSet) -> Vec<bool> {
    let mut mask = vec![false; net.len()];
    for p in protected {
        if p.index() < mask.len() {
            mask[p.index()] = true;
        }
    }
    mask
}

/// Core of the sub-network induced by `alive`; returns the survivors.
pub(crate) fn core_within(
    net: &Network,
    k: &Rational,
    protected: &[bool],
    mut alive: Vec<bool>,
    mut trace: Option<&mut Vec<AgentSet>>,
) -> Vec<bool> {
    let n = net.len();
    let mut degree: Vec<Rational> = (0..n)
        .map(|i| {
            if alive[i] {
                net.out_edges(AgentId::new(i))
                    .iter()
                    .filter(|(j, _)| alive[j.index()])
                    .map(|(_, w)| w)
                    .sum()
            } else {
                Rational::zero()
            }
        })
        .collect();
    let below = |i: usize, alive: &[bool], degree: &[Rational]| alive[i] && !protected[i] && degree[i] < *k;
    let mut doomed: Vec<usize> = (0..n).filter(|&i| below(i, &alive, &degree)).collect();
    let mut flagged = vec![false; n];
    while !doomed.is_empty() {
        for &i in &doomed {
            alive[i] = false;
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(doomed.iter().map(|&i| AgentId::new(i)).collect());
        }
        let mut next = Vec::new();
        for &j in &doomed {
            for (i, w) in net.in_edges(AgentId::new(j)) {
                let i = i.index();
                if alive[i] {
                    degree[i] -= w;
                    if !flagged[i] && below(i, &alive, &degree) {
                        flagged[i] = true;
                        next.push(i);
                    }
                }
            }
        }
        next.sort_unstable();
        doomed = next;
    }
    alive
}

/// Peeling value of one agent: the largest `k` whose k-core contains it.
/// Protected agents are in every core.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Peel {
    Finite(Rational),
    Unbounded,
}

impl Peel {
    pub fn at_least(&self, k: &Rational) -> bool {
        match self {
            Peel::Finite(v) => v >= k,
            Peel::Unbounded => true,
        }
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Peel::Finite(v) => Some(v),
            Peel::Unbounded => None,
        }
    }
}

impl fmt::Display for Peel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Peel::Finite(v) => write!(f, "{v}"),
            Peel::Unbounded => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeelingValues {
    values: Vec<Peel>,
}

impl PeelingValues {
    pub fn get(&self, i: AgentId) -> &Peel {
        &self.values[i.index()]
    }

    pub fn as_slice(&self) -> &[Peel] {
        &self.values
    }

    /// Whether `i` belongs to the `k`-core.
    pub fn in_core(&self, i: AgentId, k: &Rational) -> bool {
        self.get(i).at_least(k)
    }

    /// Every threshold at which core membership can change, the midpoints
    /// between them, and one value beyond each end.
    pub fn candidate_thresholds(&self) -> Vec<Rational> {
        let mut vals: Vec<Rational> = self.values.iter().filter_map(|p| p.finite().cloned()).collect();
        vals.push(Rational::zero());
        vals.sort();
        vals.dedup();
        let half = Rational::new(1, 2);
        let mut out = Vec::with_capacity(vals.len() * 2 + 2);
        out.push(&vals[0] - Rational::one());
        for pair in vals.windows(2) {
            out.push(pair[0].clone());
            out.push((&pair[0] + &pair[1]) * &half);
        }
        let last = vals.last().expect("non-empty");
        out.push(last.clone());
        out.push(last + Rational::one());
        out
    }
}

/// Greedy minimum-degree peeling: repeatedly remove the unprotected agent of
/// smallest current out-degree (lowest index on ties). An agent's peeling
/// value is the largest such minimum seen up to its removal.
pub fn peeling_values(net: &Network, protected: &AgentSet) -> PeelingValues {
    let n = net.len();
    let prot = protection_mask(net, protected);
    let mut alive = vec![true; n];
    let mut degree: Vec<Rational> = net.degrees().to_vec();
    let mut values: Vec<Peel> = vec![Peel::Unbounded; n];
    let mut level: Option<Rational> = None;
    let mut remaining = prot.iter().filter(|&&p| !p).count();
    while remaining > 0 {
        let next = (0..n)
            .filter(|&i| alive[i] && !prot[i])
            .min_by(|&a, &b| degree[a].cmp(&degree[b]).then(a.cmp(&b)))
            .expect("an unprotected agent remains");
        let current = match level.take() {
            Some(l) => l.max(degree[next].clone()),
            None => degree[next].clone(),
        };
        values[next] = Peel::Finite(current.clone());
        level = Some(current);
        alive[next] = false;
        remaining -= 1;
        for (i, w) in net.in_edges(AgentId::new(next)) {
            if alive[i.index()] {
                degree[i.index()] -= w;
            }
        }
    }
    PeelingValues { values }
}

fn check_fraction(q: &Rational) -> Result<()> {
    if !q.is_positive() || *q >= Rational::one() {
        return Err(Error::InvalidParams(format!("q = {q} must lie strictly between 0 and 1")));
    }
    Ok(())
}

/// Strategic members of the 1-core of `H(G, k)` started from `within`
/// (the shadow is always kept and never deleted).
fn adjusted_one_core(game: &ThresholdGame, within: &AgentSet) -> Result<AgentSet> {
    let net = game.network();
    for a in within {
        net.check(*a)?;
    }
    let h = adjust_default(game)?;
    let mut alive = vec![false; h.network().len()];
    for a in within {
        alive[a.index()] = true;
    }
    alive[h.shadow().index()] = true;
    let mut prot = vec![false; h.network().len()];
    prot[h.shadow().index()] = true;
    let alive = core_within(h.network(), &Rational::one(), &prot, alive, None);
    Ok(net.agents().filter(|a| alive[a.index()]).collect())
}

/// Largest set in which every member has at least a fraction `q` of its
/// out-weight inside the set, computed as the 1-core of `H(G, q d)`.
///
/// Over the whole network this is always every agent; see
/// [`max_q_cohesive_within`] for the largest such set inside a region.
pub fn max_q_cohesive(net: &Network, q: &Rational) -> Result<AgentSet> {
    max_q_cohesive_within(net, q, &net.agents().collect())
}

/// Largest q-cohesive subset of `within`. Proportions are taken against each
/// agent's full out-degree in `net`; agents with no out-links always qualify.
pub fn max_q_cohesive_within(net: &Network, q: &Rational, within: &AgentSet) -> Result<AgentSet> {
    check_fraction(q)?;
    let thresholds = net.degrees().iter().map(|d| q * d).collect();
    let game = ThresholdGame::new(net.clone(), thresholds)?;
    adjusted_one_core(&game, within)
}

/// The 1-core of `H(G, d - q d)` inside `within`: the complementary-game
/// construction of the largest `(1 - q)`-cohesive subset.
pub fn max_complement_cohesive_within(net: &Network, q: &Rational, within: &AgentSet) -> Result<AgentSet> {
    check_fraction(q)?;
    let thresholds = net.degrees().iter().map(|d| q * d).collect();
    let game = ThresholdGame::new(net.clone(), thresholds)?.complementary();
    adjusted_one_core(&game, within)
}
