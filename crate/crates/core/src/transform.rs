//! The adjusted network `H(G, k)`: heterogeneous thresholds rewritten as a
//! common threshold of 1 on a rescaled network with an extra, always-active
//! shadow agent.
//!
//! For strategic agent `i`:
//!
//! | threshold | `H_ij` (strategic `j`) | `H_is` |
//! |-----------|------------------------|--------|
//! | `k_i > 0` | `G_ij / k_i`           | none   |
//! | `k_i < 0` | `G_ij / |k_i|`         | 2      |
//! | `k_i = 0` | `G_ij`                 | 1      |
//!
//! and the shadow links to every strategic agent with weight `eta >= 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{ActionProfile, BestResponse, IntRows, ThresholdGame};
use crate::graph::{AgentId, Network, NetworkBuilder};
use crate::par::{self, Exec};
use crate::rational::Rational;

/// Label reserved for the shadow agent; input files may not use it.
pub const SHADOW_LABEL: &str = "__shadow__";

/// Profiles are checked exhaustively up to this many strategic agents.
pub const EXHAUSTIVE_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjustedNetwork {
    network: Network,
    shadow: AgentId,
    eta: Rational,
}

impl AdjustedNetwork {
    /// The `n + 1` agent network; strategic agents keep their indices and the
    /// shadow is last.
    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn shadow(&self) -> AgentId {
        self.shadow
    }

    pub fn eta(&self) -> &Rational {
        &self.eta
    }

    pub fn strategic_len(&self) -> usize {
        self.network.len() - 1
    }

    /// Strategic profile extended with the shadow playing 1.
    pub fn with_shadow(&self, x: &ActionProfile) -> Vec<bool> {
        let mut v = x.as_slice().to_vec();
        v.push(true);
        v
    }

    /// Best response of strategic agent `i` in `(H, 1)` with `x_s = 1`.
    pub fn best_response(&self, i: AgentId, x: &ActionProfile) -> BestResponse {
        let sum: Rational = self
            .network
            .out_edges(i)
            .iter()
            .filter(|(j, _)| *j == self.shadow || x.get(*j))
            .map(|(_, w)| w)
            .sum();
        BestResponse::from_comparison(&sum, &Rational::one())
    }
}

pub fn adjust(game: &ThresholdGame, eta: &Rational) -> Result<AdjustedNetwork> {
    if *eta < Rational::one() {
        return Err(Error::InvalidParams(format!("eta = {eta} must be at least 1")));
    }
    let g = game.network();
    let mut b = NetworkBuilder::new();
    for label in g.labels() {
        if label == SHADOW_LABEL {
            return Err(Error::NameClash(label.clone()));
        }
        b.agent(label.clone())?;
    }
    let shadow = b.agent(SHADOW_LABEL)?;
    let two = Rational::from_integer(2);
    for i in g.agents() {
        let k = game.threshold(i);
        let scale = if k.is_zero() { Rational::one() } else { k.abs().recip() };
        for (j, w) in g.out_edges(i) {
            b.edge(i, *j, w * &scale)?;
        }
        if k.is_negative() {
            b.edge(i, shadow, two.clone())?;
        } else if k.is_zero() {
            b.edge(i, shadow, Rational::one())?;
        }
        b.edge(shadow, i, eta.clone())?;
    }
    Ok(AdjustedNetwork {
        network: b.build(),
        shadow,
        eta: eta.clone(),
    })
}

/// `adjust` with the smallest admissible `eta`.
pub fn adjust_default(game: &ThresholdGame) -> Result<AdjustedNetwork> {
    adjust(game, &Rational::one())
}

/// Two games over the same agents are best-response equivalent iff their
/// adjusted networks coincide.
pub fn br_equivalent(g1: &ThresholdGame, g2: &ThresholdGame) -> Result<bool> {
    let (l1, l2) = (g1.network().labels(), g2.network().labels());
    let mut s1 = l1.to_vec();
    let mut s2 = l2.to_vec();
    s1.sort();
    s2.sort();
    if s1 != s2 {
        return Err(Error::Mismatch(format!("{l1:?} vs {l2:?}")));
    }
    let h1 = adjust_default(g1)?;
    let h2 = adjust_default(g2)?;
    let (n1, n2) = (h1.network(), h2.network());
    // compare by label so differing input orders still match
    for i in n1.agents() {
        let i2 = n2.agent(n1.label(i))?;
        let row1: Vec<(&str, &Rational)> = n1.out_edges(i).iter().map(|(j, w)| (n1.label(*j), w)).collect();
        let mut row2: Vec<(&str, &Rational)> = n2.out_edges(i2).iter().map(|(j, w)| (n2.label(*j), w)).collect();
        let mut row1 = row1;
        row1.sort();
        row2.sort();
        if row1 != row2 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub profile: ActionProfile,
    pub agent: AgentId,
    pub original: BestResponse,
    pub adjusted: BestResponse,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub exhaustive: bool,
    pub profiles_checked: u64,
    pub counterexample: Option<Counterexample>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks that every strategic agent has the same best response in `(G, k)`
/// and in `(H, 1)` with the shadow active. Exhaustive when `n` is at most
/// [`EXHAUSTIVE_LIMIT`], otherwise `trials` profiles drawn from `seed`.
pub fn verify_equivalence(
    game: &ThresholdGame,
    adjusted: &AdjustedNetwork,
    trials: u64,
    seed: u64,
) -> EquivalenceReport {
    verify_equivalence_with(game, adjusted, trials, seed, Exec::default())
}

pub fn verify_equivalence_with(
    game: &ThresholdGame,
    adjusted: &AdjustedNetwork,
    trials: u64,
    seed: u64,
    exec: Exec,
) -> EquivalenceReport {
    let n = game.len();
    if adjusted.strategic_len() != n {
        let agent = AgentId::new(n.min(adjusted.strategic_len()));
        return EquivalenceReport {
            exhaustive: false,
            profiles_checked: 0,
            counterexample: Some(Counterexample {
                profile: ActionProfile::zeros(n),
                agent,
                original: BestResponse::Either,
                adjusted: BestResponse::Either,
            }),
        };
    }
    let exhaustive = n <= EXHAUSTIVE_LIMIT;
    let count = if exhaustive { 1u64 << n } else { trials };
    let g_rows = IntRows::for_game(game);
    let h_net = adjusted.network();
    let one = Rational::one();
    let h_rows = IntRows::new(h_net.agents().take(n).map(|i| (h_net.out_edges(i), &one)));

    let profile_at = |t: u64| -> ActionProfile {
        if exhaustive {
            ActionProfile::from_mask(n, t)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ t.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            ActionProfile::from_bools((0..n).map(|_| rng.gen()).collect())
        }
    };
    let check = |t: u64| -> Option<Counterexample> {
        let x = profile_at(t);
        let xs = adjusted.with_shadow(&x);
        for i in game.network().agents() {
            let original = match &g_rows {
                Some(r) => r.best_response(i.index(), x.as_slice()),
                None => BestResponse::from_comparison(&game.neighbor_sum(i, &x), game.threshold(i)),
            };
            let adj = match &h_rows {
                Some(r) => r.best_response(i.index(), &xs),
                None => adjusted.best_response(i, &x),
            };
            if original != adj {
                return Some(Counterexample {
                    profile: x,
                    agent: i,
                    original,
                    adjusted: adj,
                });
            }
        }
        None
    };
    let counterexample = par::find_first(exec, count, check);
    EquivalenceReport {
        exhaustive,
        profiles_checked: count,
        counterexample,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn pair(weight: Rational, k: Rational) -> ThresholdGame {
        let net = Network::from_edges(&["I", "J"], &[("I", "J", weight)]).unwrap();
        ThresholdGame::new(net, vec![k, q(1, 1)]).unwrap()
    }

    #[test]
    fn positive_threshold_rescales() {
        let h = adjust_default(&pair(q(1, 1), q(2, 1))).unwrap();
        let (i, j, s) = (AgentId::new(0), AgentId::new(1), h.shadow());
        assert_eq!(h.network().weight(i, j), q(1, 2));
        assert_eq!(h.network().weight(i, s), q(0, 1));
        assert_eq!(h.network().weight(s, i), q(1, 1));
        assert_eq!(h.network().label(s), SHADOW_LABEL);
    }

    #[test]
    fn negative_threshold_links_to_shadow() {
        let h = adjust_default(&pair(q(2, 1), q(-1, 1))).unwrap();
        let (i, j, s) = (AgentId::new(0), AgentId::new(1), h.shadow());
        assert_eq!(h.network().weight(i, j), q(2, 1));
        assert_eq!(h.network().weight(i, s), q(2, 1));
    }

    #[test]
    fn zero_threshold_keeps_weights() {
        let h = adjust(&pair(q(1, 2), q(0, 1)), &q(3, 1)).unwrap();
        let (i, j, s) = (AgentId::new(0), AgentId::new(1), h.shadow());
        assert_eq!(h.network().weight(i, j), q(1, 2));
        assert_eq!(h.network().weight(i, s), q(1, 1));
        assert_eq!(h.network().weight(s, j), q(3, 1));
    }

    #[test]
    fn adjust_errors() {
        assert!(matches!(adjust(&pair(q(1, 1), q(1, 1)), &q(1, 2)), Err(Error::InvalidParams(_))));
        let net = Network::from_edges(&["A", SHADOW_LABEL], &[]).unwrap();
        let g = ThresholdGame::uniform(net, q(1, 1));
        assert_eq!(adjust_default(&g), Err(Error::NameClash(SHADOW_LABEL.into())));
    }

    fn triangle(k: [Rational; 3]) -> ThresholdGame {
        let net = Network::from_edges(
            &["A", "B", "C"],
            &[("A", "B", q(1, 1)), ("B", "C", q(1, 2)), ("C", "A", q(3, 2)), ("B", "A", q(2, 1))],
        )
        .unwrap();
        ThresholdGame::new(net, k.to_vec()).unwrap()
    }

    #[test]
    fn br_equivalence_examples() {
        let g = triangle([q(1, 1), q(2, 3), q(5, 2)]);
        assert!(br_equivalent(&g, &g).unwrap());

        let doubled_net = {
            let mut b = Network::builder();
            for l in g.network().labels() {
                b.agent(l.clone()).unwrap();
            }
            for (s, d, w) in g.network().edges() {
                b.edge(s, d, w * q(2, 1)).unwrap();
            }
            b.build()
        };
        let doubled = ThresholdGame::new(doubled_net, g.thresholds().iter().map(|k| k * q(2, 1)).collect()).unwrap();
        assert!(br_equivalent(&g, &doubled).unwrap());

        let moved = g.with_threshold(AgentId::new(1), q(1, 1)).unwrap();
        assert!(!br_equivalent(&g, &moved).unwrap());

        let other = ThresholdGame::uniform(Network::from_edges(&["X"], &[]).unwrap(), q(1, 1));
        assert!(matches!(br_equivalent(&g, &other), Err(Error::Mismatch(_))));
    }

    #[test]
    fn equivalence_holds_on_small_games() {
        let g = triangle([q(-1, 1), q(2, 3), q(5, 2)]);
        let report = verify_equivalence(&g, &adjust_default(&g).unwrap(), 0, 0);
        assert!(report.passed());
        assert!(report.exhaustive);
        assert_eq!(report.profiles_checked, 8);

        let g = triangle([q(0, 1), q(0, 1), q(-3, 1)]);
        assert!(verify_equivalence(&g, &adjust_default(&g).unwrap(), 0, 0).passed());
    }

    #[test]
    fn corrupted_adjustment_is_caught() {
        let g = triangle([q(1, 1), q(1, 1), q(1, 1)]);
        let h = adjust_default(&g).unwrap();
        // A's only link is A->B with H weight 1; nudging it below 1 breaks the
        // tie A faces when B alone is active.
        let (a, b) = (AgentId::new(0), AgentId::new(1));
        let bad = AdjustedNetwork {
            network: h.network().with_weight(a, b, q(99, 100)).unwrap(),
            ..h.clone()
        };
        let report = verify_equivalence(&g, &bad, 0, 0);
        let cx = report.counterexample.expect("perturbation must be detected");
        assert_eq!(cx.agent, a);
        assert!(cx.profile.get(b));
        assert_eq!(cx.original, BestResponse::Either);
        assert_eq!(cx.adjusted, BestResponse::Only0);
    }

    #[test]
    fn eta_does_not_change_strategic_best_responses() {
        let g = triangle([q(-1, 1), q(0, 1), q(3, 2)]);
        let h1 = adjust(&g, &q(1, 1)).unwrap();
        let h5 = adjust(&g, &q(5, 1)).unwrap();
        for m in 0..8 {
            let x = ActionProfile::from_mask(3, m);
            for i in g.network().agents() {
                assert_eq!(h1.best_response(i, &x), h5.best_response(i, &x));
            }
        }
    }

    #[test]
    fn sampled_check_for_large_games() {
        let n = 20;
        let mut b = Network::builder();
        for i in 0..n {
            b.agent(format!("v{i}")).unwrap();
        }
        for i in 0..n {
            b.edge(AgentId::new(i), AgentId::new((i + 1) % n), q(1, 1)).unwrap();
        }
        let g = ThresholdGame::new(b.build(), (0..n).map(|i| q(i as i64 % 3 - 1, 1)).collect()).unwrap();
        let report = verify_equivalence(&g, &adjust_default(&g).unwrap(), 500, 7);
        assert!(!report.exhaustive);
        assert_eq!(report.profiles_checked, 500);
        assert!(report.passed());
    }
}
