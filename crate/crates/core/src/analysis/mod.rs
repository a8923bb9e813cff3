//! Centralities, removal effects, seeds and comparative statics built on top
//! of the equilibrium characterisations.

mod centrality;
mod perturb;

pub use centrality::{
    bonacich, intercentrality, rank_descending, solve_bonacich, spectral_radius, spectral_radius_bounds,
    BonacichSolution, SPECTRAL_TOLERANCE,
};
pub use perturb::{
    apply_change, perturb, perturb_welfare, Change, Extremal, PerturbationResult, WelfareReport,
    WelfareViolation,
};

use crate::equilibrium::maximal_equilibrium;
use crate::error::{Error, Result};
use crate::game::{LinearQuadraticParams, ThresholdGame};
use crate::graph::{AgentId, AgentSet};
use crate::kcore::peeling_values;
use crate::par::{self, Exec};
use crate::rational::Rational;
use crate::transform::adjust_default;

/// Agents whose threshold is strictly negative: they act whatever their
/// neighbours do.
pub fn endogenous_seeds(game: &ThresholdGame) -> AgentSet {
    game.network().agents().filter(|&i| game.threshold(i).is_negative()).collect()
}

/// Removing agent `i` is modelled by raising its threshold above its degree.
pub fn removal_game(game: &ThresholdGame, i: AgentId) -> Result<ThresholdGame> {
    let d = game.network().degree(i)?;
    game.with_threshold(i, d + Rational::one())
}

/// Drop in the number of agents acting in the maximal equilibrium when `i`
/// is removed.
pub fn cascade_number(game: &ThresholdGame, i: AgentId) -> Result<usize> {
    let before = maximal_equilibrium(game)?.count_active();
    cascade_number_from(game, i, before)
}

fn cascade_number_from(game: &ThresholdGame, i: AgentId, before: usize) -> Result<usize> {
    let after = maximal_equilibrium(&removal_game(game, i)?)?.count_active();
    Ok(before.checked_sub(after).expect("removal can only shrink the maximal equilibrium"))
}

pub fn cascade_numbers(game: &ThresholdGame) -> Result<Vec<usize>> {
    cascade_numbers_with(game, Exec::default())
}

pub fn cascade_numbers_with(game: &ThresholdGame, exec: Exec) -> Result<Vec<usize>> {
    let before = maximal_equilibrium(game)?.count_active();
    par::map(exec, game.len() as u64, |i| cascade_number_from(game, AgentId::new(i as usize), before))
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyPlayerMetric {
    Cascade,
    Intercentrality,
}

fn argmax<T: Ord>(values: &[T]) -> AgentSet {
    match values.iter().max() {
        Some(best) => values
            .iter()
            .enumerate()
            .filter(|(_, v)| *v == best)
            .map(|(i, _)| AgentId::new(i))
            .collect(),
        None => AgentSet::new(),
    }
}

/// Every agent attaining the largest removal effect under `metric`.
pub fn key_players(
    game: &ThresholdGame,
    metric: KeyPlayerMetric,
    lq: Option<&LinearQuadraticParams>,
) -> Result<AgentSet> {
    match metric {
        KeyPlayerMetric::Cascade => Ok(argmax(&cascade_numbers(game)?)),
        KeyPlayerMetric::Intercentrality => {
            let lq = lq.ok_or_else(|| Error::InvalidParams("inter-centrality needs linear-quadratic parameters".into()))?;
            lq.validate()?;
            Ok(argmax(&intercentrality(game.network(), &lq.phi, &lq.a)?))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityReport {
    /// Peeling value in the adjusted network.
    pub peel: Vec<Rational>,
    pub bonacich: Vec<Rational>,
    pub cascade_number: Vec<usize>,
    pub intercentrality: Vec<Rational>,
    pub spectral_radius: f64,
}

pub fn centrality_report(game: &ThresholdGame, phi: &[Rational], a: &[Rational]) -> Result<CentralityReport> {
    let h = adjust_default(game)?;
    let peels = peeling_values(h.network(), &[h.shadow()].into());
    let peel = game
        .network()
        .agents()
        .map(|i| peels.get(i).finite().cloned().expect("strategic agents are always peeled"))
        .collect();
    let solution = solve_bonacich(game.network(), phi, a)?;
    Ok(CentralityReport {
        peel,
        intercentrality: solution.intercentrality(),
        bonacich: solution.centrality,
        cascade_number: cascade_numbers(game)?,
        spectral_radius: solution.spectral_radius,
    })
}
