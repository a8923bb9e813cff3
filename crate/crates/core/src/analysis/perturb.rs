use std::cmp::Ordering;
use std::fmt;

use crate::equilibrium::{maximal_equilibrium, minimal_equilibrium};
use crate::error::{Error, Result};
use crate::game::{lq_utility, thresholds_from_lq, ActionProfile, LinearQuadraticParams, ThresholdGame};
use crate::graph::{AgentId, AgentSet, Network};
use crate::rational::Rational;

/// A single change to a game. `delta` is added to the current value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Change {
    Edge { src: AgentId, dst: AgentId, delta: Rational },
    Threshold { agent: AgentId, delta: Rational },
}

impl Change {
    /// `Greater` if the change makes action 1 weakly more attractive to
    /// everyone, `Less` if weakly less, `Equal` if nothing moves.
    pub fn direction(&self) -> Ordering {
        match self {
            Change::Edge { delta, .. } => delta.cmp(&Rational::zero()),
            Change::Threshold { delta, .. } => Rational::zero().cmp(delta),
        }
    }
}

fn signed(r: &Rational) -> String {
    if r.is_negative() {
        r.to_string()
    } else {
        format!("+{r}")
    }
}

impl fmt::Display for Change {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Change::Edge { src, dst, delta } => write!(f, "edge {src}->{dst} {}", signed(delta)),
            Change::Threshold { agent, delta } => write!(f, "threshold {agent} {}", signed(delta)),
        }
    }
}

fn changed_network(net: &Network, change: &Change) -> Result<Option<Network>> {
    match change {
        Change::Edge { src, dst, delta } => {
            if src == dst {
                return Err(Error::InvalidParams(format!("self-loop at {src}")));
            }
            let w = net.weight(*src, *dst) + delta;
            if w.is_negative() {
                return Err(Error::InvalidParams(format!("weight of {src}->{dst} would become {w}")));
            }
            Ok(Some(net.with_weight(*src, *dst, w)?))
        }
        Change::Threshold { agent, .. } => {
            net.check(*agent)?;
            Ok(None)
        }
    }
}

pub fn apply_change(game: &ThresholdGame, change: &Change) -> Result<ThresholdGame> {
    match change {
        Change::Edge { .. } => {
            let net = changed_network(game.network(), change)?.expect("edge change");
            game.with_network(net)
        }
        Change::Threshold { agent, delta } => {
            game.network().check(*agent)?;
            game.with_threshold(*agent, game.threshold(*agent) + delta)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extremal {
    pub minimal: ActionProfile,
    pub maximal: ActionProfile,
}

impl Extremal {
    pub fn of(game: &ThresholdGame) -> Result<Self> {
        Ok(Extremal {
            minimal: minimal_equilibrium(game)?,
            maximal: maximal_equilibrium(game)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationResult {
    pub change: Change,
    pub before: Extremal,
    pub after: Extremal,
    /// Agents whose action differs in either extremal equilibrium.
    pub affected: AgentSet,
    /// Both extremal equilibria moved (weakly) in the direction of the change.
    pub monotone: bool,
}

fn moved_with(direction: Ordering, before: &ActionProfile, after: &ActionProfile) -> bool {
    match direction {
        Ordering::Greater => before.leq(after),
        Ordering::Less => after.leq(before),
        Ordering::Equal => before == after,
    }
}

pub fn perturb(game: &ThresholdGame, change: Change) -> Result<PerturbationResult> {
    let changed = apply_change(game, &change)?;
    let before = Extremal::of(game)?;
    let after = Extremal::of(&changed)?;
    let mut affected = before.minimal.diff(&after.minimal);
    affected.extend(before.maximal.diff(&after.maximal));
    let dir = change.direction();
    let monotone =
        moved_with(dir, &before.minimal, &after.minimal) && moved_with(dir, &before.maximal, &after.maximal);
    Ok(PerturbationResult {
        change,
        before,
        after,
        affected,
        monotone,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WelfareViolation {
    pub agent: AgentId,
    /// `false` for the minimal equilibrium, `true` for the maximal one.
    pub at_maximal: bool,
    pub before: Rational,
    pub after: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WelfareReport {
    pub perturbation: PerturbationResult,
    pub violations: Vec<WelfareViolation>,
}

impl WelfareReport {
    pub fn passed(&self) -> bool {
        self.perturbation.monotone && self.violations.is_empty()
    }
}

/// Applies `change` to the linear-quadratic game with binary actions and
/// checks that every agent's utility at both extremal equilibria moves in
/// the direction of the change. A threshold change of `delta` for agent `j`
/// is realised as `a_j - phi_j * delta`.
pub fn perturb_welfare(params: &LinearQuadraticParams, net: &Network, change: Change) -> Result<WelfareReport> {
    let game = thresholds_from_lq(params, net)?;
    let mut params_after = params.clone();
    let net_after = match &change {
        Change::Threshold { agent, delta } => {
            net.check(*agent)?;
            let j = agent.index();
            params_after.a[j] = &params.a[j] - &params.phi[j] * delta;
            if params_after.a[j].is_negative() {
                return Err(Error::InvalidParams(format!(
                    "threshold change would need a[{j}] = {} < 0",
                    params_after.a[j]
                )));
            }
            net.clone()
        }
        Change::Edge { .. } => changed_network(net, &change)?.expect("edge change"),
    };
    let perturbation = perturb(&game, change)?;
    debug_assert_eq!(
        Extremal::of(&thresholds_from_lq(&params_after, &net_after)?)?,
        perturbation.after
    );
    let dir = perturbation.change.direction();
    let mut violations = Vec::new();
    for (at_maximal, before_x, after_x) in [
        (false, &perturbation.before.minimal, &perturbation.after.minimal),
        (true, &perturbation.before.maximal, &perturbation.after.maximal),
    ] {
        for i in net.agents() {
            let before = lq_utility(params, net, i, before_x);
            let after = lq_utility(&params_after, &net_after, i, after_x);
            let ok = match dir {
                Ordering::Greater => after >= before,
                Ordering::Less => after <= before,
                Ordering::Equal => after == before,
            };
            if !ok {
                violations.push(WelfareViolation {
                    agent: i,
                    at_maximal,
                    before,
                    after,
                });
            }
        }
    }
    Ok(WelfareReport {
        perturbation,
        violations,
    })
}
