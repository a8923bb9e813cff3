//! Binary-action threshold games on a network.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::graph::{AgentId, AgentSet, Network};
use crate::rational::Rational;

/// A binary action per agent, indexed by [`AgentId`].
///
/// Profiles are totally ordered as the integer whose bit `i` is agent `i`'s
/// action; this is the canonical enumeration order. The equilibrium partial
/// order is [`ActionProfile::le`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ActionProfile(Vec<bool>);

impl ActionProfile {
    pub fn zeros(n: usize) -> Self {
        ActionProfile(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        ActionProfile(vec![true; n])
    }

    pub fn from_bools(actions: Vec<bool>) -> Self {
        ActionProfile(actions)
    }

    pub fn from_active(n: usize, active: &AgentSet) -> Self {
        let mut x = Self::zeros(n);
        for a in active {
            x.0[a.index()] = true;
        }
        x
    }

    /// Bit `i` of `mask` is agent `i`'s action.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        ActionProfile((0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn to_mask(&self) -> Option<u64> {
        if self.0.len() > 64 {
            return None;
        }
        Some(self.0.iter().enumerate().fold(0, |m, (i, &b)| m | (u64::from(b) << i)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: AgentId) -> bool {
        self.0[i.index()]
    }

    pub fn set(&mut self, i: AgentId, action: bool) {
        self.0[i.index()] = action;
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn active(&self) -> AgentSet {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| AgentId::new(i))
            .collect()
    }

    pub fn count_active(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Elementwise `self <= other`.
    pub fn leq(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(&a, &b)| !a || b)
    }

    pub fn join(&self, other: &Self) -> Self {
        ActionProfile(self.0.iter().zip(&other.0).map(|(&a, &b)| a || b).collect())
    }

    pub fn meet(&self, other: &Self) -> Self {
        ActionProfile(self.0.iter().zip(&other.0).map(|(&a, &b)| a && b).collect())
    }

    pub fn complement(&self) -> Self {
        ActionProfile(self.0.iter().map(|&b| !b).collect())
    }

    /// Agents whose action differs between the two profiles.
    pub fn diff(&self, other: &Self) -> AgentSet {
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| AgentId::new(i))
            .collect()
    }
}

impl Ord for ActionProfile {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for ActionProfile {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ActionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(f, "({s})")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BestResponse {
    Only0,
    Only1,
    Either,
}

impl BestResponse {
    /// Compares a neighbour sum against a threshold.
    pub fn from_comparison(sum: &Rational, threshold: &Rational) -> Self {
        match sum.cmp(threshold) {
            Ordering::Greater => BestResponse::Only1,
            Ordering::Equal => BestResponse::Either,
            Ordering::Less => BestResponse::Only0,
        }
    }

    pub fn allows(self, action: bool) -> bool {
        match self {
            BestResponse::Only0 => !action,
            BestResponse::Only1 => action,
            BestResponse::Either => true,
        }
    }

    pub fn resolve(self, ties: TiePolicy) -> bool {
        match self {
            BestResponse::Only0 => false,
            BestResponse::Only1 => true,
            BestResponse::Either => ties == TiePolicy::TiesTo1,
        }
    }

    /// The correspondence with the roles of the two actions swapped.
    pub fn flip(self) -> Self {
        match self {
            BestResponse::Only0 => BestResponse::Only1,
            BestResponse::Only1 => BestResponse::Only0,
            BestResponse::Either => BestResponse::Either,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TiePolicy {
    TiesTo0,
    TiesTo1,
}

/// A network plus one threshold per agent: agent `i` prefers action 1 when
/// the weight of its active out-neighbours exceeds `k_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdGame {
    network: Network,
    thresholds: Vec<Rational>,
}

impl ThresholdGame {
    pub fn new(network: Network, thresholds: Vec<Rational>) -> Result<Self> {
        if thresholds.len() != network.len() {
            return Err(Error::InvalidParams(format!(
                "{} thresholds for {} agents",
                thresholds.len(),
                network.len()
            )));
        }
        Ok(ThresholdGame { network, thresholds })
    }

    /// Every agent gets the same threshold.
    pub fn uniform(network: Network, threshold: Rational) -> Self {
        let thresholds = vec![threshold; network.len()];
        ThresholdGame { network, thresholds }
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn len(&self) -> usize {
        self.network.len()
    }

    pub fn is_empty(&self) -> bool {
        self.network.is_empty()
    }

    pub fn threshold(&self, i: AgentId) -> &Rational {
        &self.thresholds[i.index()]
    }

    pub fn thresholds(&self) -> &[Rational] {
        &self.thresholds
    }

    /// `sum_j G_ij x_j`; `x_i` itself never contributes.
    pub fn neighbor_sum(&self, i: AgentId, x: &ActionProfile) -> Rational {
        self.network
            .out_edges(i)
            .iter()
            .filter(|(j, _)| x.get(*j))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn best_response(&self, i: AgentId, others: &ActionProfile) -> Result<BestResponse> {
        self.network.check(i)?;
        if others.len() != self.len() {
            return Err(Error::InvalidParams("profile length does not match game".into()));
        }
        Ok(BestResponse::from_comparison(&self.neighbor_sum(i, others), self.threshold(i)))
    }

    pub fn is_nash(&self, x: &ActionProfile) -> bool {
        x.len() == self.len()
            && self.network.agents().all(|i| {
                BestResponse::from_comparison(&self.neighbor_sum(i, x), self.threshold(i)).allows(x.get(i))
            })
    }

    /// Same network, thresholds `d_i - k_i`: best responses phrased in terms
    /// of action 0.
    pub fn complementary(&self) -> ThresholdGame {
        let thresholds = self
            .network
            .degrees()
            .iter()
            .zip(&self.thresholds)
            .map(|(d, k)| d - k)
            .collect();
        ThresholdGame {
            network: self.network.clone(),
            thresholds,
        }
    }

    pub fn with_threshold(&self, i: AgentId, k: Rational) -> Result<ThresholdGame> {
        self.network.check(i)?;
        let mut g = self.clone();
        g.thresholds[i.index()] = k;
        Ok(g)
    }

    pub fn with_network(&self, network: Network) -> Result<ThresholdGame> {
        if network.labels() != self.network.labels() {
            return Err(Error::Mismatch("replacement network has different agents".into()));
        }
        Ok(ThresholdGame {
            network,
            thresholds: self.thresholds.clone(),
        })
    }
}

/// Same game with every row scaled to integers, for exhaustive loops.
///
/// Row `i` (weights and threshold) is multiplied by the lcm of its
/// denominators, which preserves every comparison exactly.
#[derive(Debug, Clone)]
pub(crate) struct IntRows {
    rows: Vec<Vec<(usize, i128)>>,
    thresholds: Vec<i128>,
}

impl IntRows {
    pub(crate) fn new<'a, I>(rows: I) -> Option<Self>
    where
        I: IntoIterator<Item = (&'a [(AgentId, Rational)], &'a Rational)>,
    {
        const LIMIT: i128 = 1 << 100;
        let mut out_rows = Vec::new();
        let mut thresholds = Vec::new();
        for (row, k) in rows {
            let scale = row
                .iter()
                .map(|(_, w)| w.denom())
                .fold(k.denom(), |acc, d| acc.lcm(&d));
            let to_int = |x: &Rational| -> Option<i128> {
                let v: BigInt = x.numer() * (&scale / x.denom());
                v.to_i128().filter(|v| v.abs() < LIMIT)
            };
            let mut total: i128 = 0;
            let mut scaled = Vec::with_capacity(row.len());
            for (j, w) in row {
                let v = to_int(w)?;
                total = total.checked_add(v).filter(|t| t.abs() < LIMIT)?;
                scaled.push((j.index(), v));
            }
            thresholds.push(to_int(k)?);
            out_rows.push(scaled);
        }
        Some(IntRows {
            rows: out_rows,
            thresholds,
        })
    }

    pub(crate) fn for_game(game: &ThresholdGame) -> Option<Self> {
        let net = game.network();
        Self::new(net.agents().map(|i| (net.out_edges(i), game.threshold(i))))
    }

    #[inline]
    pub(crate) fn best_response(&self, i: usize, x: &[bool]) -> BestResponse {
        let sum: i128 = self.rows[i].iter().filter(|(j, _)| x[*j]).map(|(_, w)| w).sum();
        match sum.cmp(&self.thresholds[i]) {
            Ordering::Greater => BestResponse::Only1,
            Ordering::Equal => BestResponse::Either,
            Ordering::Less => BestResponse::Only0,
        }
    }

    pub(crate) fn is_nash(&self, x: &[bool]) -> bool {
        (0..self.rows.len()).all(|i| self.best_response(i, x).allows(x[i]))
    }
}

/// Parameters of the linear-quadratic utility
/// `u_i = a_i x_i - c_i x_i^2 / 2 + phi_i sum_j G_ij x_i x_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearQuadraticParams {
    pub a: Vec<Rational>,
    pub c: Vec<Rational>,
    pub phi: Vec<Rational>,
}

impl LinearQuadraticParams {
    pub fn new(a: Vec<Rational>, c: Vec<Rational>, phi: Vec<Rational>) -> Result<Self> {
        let p = LinearQuadraticParams { a, c, phi };
        p.validate()?;
        Ok(p)
    }

    pub fn uniform(n: usize, a: Rational, c: Rational, phi: Rational) -> Result<Self> {
        Self::new(vec![a; n], vec![c; n], vec![phi; n])
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.a.len();
        if self.c.len() != n || self.phi.len() != n {
            return Err(Error::InvalidParams("a, c and phi must have equal length".into()));
        }
        for i in 0..n {
            if self.a[i].is_negative() {
                return Err(Error::InvalidParams(format!("a[{i}] = {} < 0", self.a[i])));
            }
            if !self.c[i].is_positive() {
                return Err(Error::InvalidParams(format!("c[{i}] = {} <= 0", self.c[i])));
            }
            if !self.phi[i].is_positive() {
                return Err(Error::InvalidParams(format!("phi[{i}] = {} <= 0", self.phi[i])));
            }
        }
        Ok(())
    }

    /// `k_i = (c_i - 2 a_i) / (2 phi_i)`.
    pub fn threshold(&self, i: usize) -> Rational {
        let two = Rational::from_integer(2);
        (&self.c[i] - &two * &self.a[i]) / (&two * &self.phi[i])
    }
}

/// The threshold game induced by restricting the linear-quadratic game to
/// binary actions.
pub fn thresholds_from_lq(params: &LinearQuadraticParams, net: &Network) -> Result<ThresholdGame> {
    params.validate()?;
    if params.len() != net.len() {
        return Err(Error::InvalidParams(format!(
            "parameters for {} agents, network has {}",
            params.len(),
            net.len()
        )));
    }
    let thresholds = (0..net.len()).map(|i| params.threshold(i)).collect();
    ThresholdGame::new(net.clone(), thresholds)
}

pub fn lq_utility(params: &LinearQuadraticParams, net: &Network, i: AgentId, x: &ActionProfile) -> Rational {
    if !x.get(i) {
        return Rational::zero();
    }
    let idx = i.index();
    let spill: Rational = net.out_edges(i).iter().filter(|(j, _)| x.get(*j)).map(|(_, w)| w).sum();
    &params.a[idx] - &params.c[idx] / Rational::from_integer(2) + &params.phi[idx] * spill
}

/// Payoff of one agent at a full profile.
pub trait Utility: Sync {
    fn utility(&self, agent: AgentId, x: &ActionProfile) -> Rational;
}

impl<F> Utility for F
where
    F: Fn(AgentId, &ActionProfile) -> Rational + Sync,
{
    fn utility(&self, agent: AgentId, x: &ActionProfile) -> Rational {
        self(agent, x)
    }
}

/// [`lq_utility`] bound to its parameters and network.
#[derive(Debug, Clone, Copy)]
pub struct LqUtility<'a> {
    pub params: &'a LinearQuadraticParams,
    pub network: &'a Network,
}

impl Utility for LqUtility<'_> {
    fn utility(&self, agent: AgentId, x: &ActionProfile) -> Rational {
        lq_utility(self.params, self.network, agent, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn two_cycle(k: (i64, i64)) -> ThresholdGame {
        let net = Network::from_edges(&["A", "B"], &[("A", "B", q(1, 1)), ("B", "A", q(1, 1))]).unwrap();
        ThresholdGame::new(net, vec![q(k.0, 1), q(k.1, 1)]).unwrap()
    }

    #[test]
    fn best_response_branches() {
        let net = Network::from_edges(
            &["I", "J", "K"],
            &[("I", "J", q(1, 1)), ("I", "K", q(1, 2))],
        )
        .unwrap();
        let i = AgentId::new(0);
        let g = ThresholdGame::new(net.clone(), vec![q(-1, 1), q(0, 1), q(0, 1)]).unwrap();
        assert_eq!(g.best_response(i, &ActionProfile::zeros(3)).unwrap(), BestResponse::Only1);

        let g = ThresholdGame::new(net.clone(), vec![q(1, 1), q(0, 1), q(0, 1)]).unwrap();
        let x = ActionProfile::from_bools(vec![false, true, false]);
        assert_eq!(g.best_response(i, &x).unwrap(), BestResponse::Either);

        let g = ThresholdGame::new(net, vec![q(2, 1), q(0, 1), q(0, 1)]).unwrap();
        let x = ActionProfile::from_bools(vec![true, true, true]);
        assert_eq!(g.best_response(i, &x).unwrap(), BestResponse::Only0);
        assert!(g.best_response(AgentId::new(7), &x).is_err());
    }

    #[test]
    fn nash_examples() {
        let g = two_cycle((2, 2));
        assert!(g.is_nash(&ActionProfile::zeros(2)));
        assert!(!g.is_nash(&ActionProfile::ones(2)));
        let g = two_cycle((1, 1));
        let nash: Vec<u64> = (0..4).filter(|&m| g.is_nash(&ActionProfile::from_mask(2, m))).collect();
        assert_eq!(nash, vec![0b00, 0b11]);
    }

    #[test]
    fn complementary_examples() {
        let net = Network::from_edges(&["A", "B", "C"], &[("A", "B", q(1, 1)), ("A", "C", q(1, 1)), ("B", "A", q(1, 1))]).unwrap();
        let g = ThresholdGame::new(net, vec![q(0, 1), q(-1, 1), q(5, 1)]).unwrap();
        let c = g.complementary();
        assert_eq!(c.thresholds(), &[q(2, 1), q(2, 1), q(-5, 1)]);
        assert_eq!(c.complementary(), g);
    }

    #[test]
    fn lq_thresholds() {
        let net = Network::from_edges(&["A"], &[]).unwrap();
        let p = LinearQuadraticParams::uniform(1, q(1, 4), q(1, 1), q(1, 4)).unwrap();
        assert_eq!(thresholds_from_lq(&p, &net).unwrap().thresholds(), &[q(1, 1)]);
        let p = LinearQuadraticParams::uniform(1, q(1, 2), q(1, 1), q(7, 3)).unwrap();
        assert_eq!(thresholds_from_lq(&p, &net).unwrap().thresholds(), &[q(0, 1)]);
        let p = LinearQuadraticParams::uniform(1, q(3, 4), q(1, 1), q(1, 4)).unwrap();
        assert_eq!(thresholds_from_lq(&p, &net).unwrap().thresholds(), &[q(-1, 1)]);

        assert!(LinearQuadraticParams::uniform(1, q(-1, 4), q(1, 1), q(1, 4)).is_err());
        assert!(LinearQuadraticParams::uniform(1, q(1, 4), q(0, 1), q(1, 4)).is_err());
        assert!(LinearQuadraticParams::uniform(1, q(1, 4), q(1, 1), q(0, 1)).is_err());
    }

    #[test]
    fn lq_utility_examples() {
        let net = Network::from_edges(&["I", "J"], &[("I", "J", q(2, 1))]).unwrap();
        let i = AgentId::new(0);
        let p = LinearQuadraticParams::uniform(2, q(1, 4), q(1, 1), q(1, 4)).unwrap();
        assert_eq!(lq_utility(&p, &net, i, &ActionProfile::from_bools(vec![false, true])), q(0, 1));
        assert_eq!(lq_utility(&p, &net, i, &ActionProfile::from_bools(vec![true, false])), q(-1, 4));
        assert_eq!(lq_utility(&p, &net, i, &ActionProfile::ones(2)), q(1, 4));
    }

    #[test]
    fn profile_order_is_mask_order() {
        let mut all: Vec<ActionProfile> = (0..8).rev().map(|m| ActionProfile::from_mask(3, m)).collect();
        all.sort();
        let masks: Vec<u64> = all.iter().map(|x| x.to_mask().unwrap()).collect();
        assert_eq!(masks, (0..8).collect::<Vec<_>>());
    }

    fn arb_game() -> impl Strategy<Value = ThresholdGame> {
        (1usize..6).prop_flat_map(|n| {
            (
                proptest::collection::vec((0i64..4, 1i64..4), n * n),
                proptest::collection::vec((-4i64..6, 1i64..4), n),
            )
                .prop_map(move |(w, k)| {
                    let mut b = Network::builder();
                    for i in 0..n {
                        b.agent(format!("v{i}")).unwrap();
                    }
                    for s in 0..n {
                        for d in 0..n {
                            if s != d {
                                let (num, den) = w[s * n + d];
                                b.edge(AgentId::new(s), AgentId::new(d), q(num, den)).unwrap();
                            }
                        }
                    }
                    let k = k.into_iter().map(|(a, b)| q(a, b)).collect();
                    ThresholdGame::new(b.build(), k).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn best_responses_are_isotone(g in arb_game(), lo in any::<u64>(), extra in any::<u64>()) {
            let n = g.len();
            let x = ActionProfile::from_mask(n, lo);
            let y = x.join(&ActionProfile::from_mask(n, extra));
            for i in g.network().agents() {
                let (bx, by) = (g.best_response(i, &x).unwrap(), g.best_response(i, &y).unwrap());
                if bx == BestResponse::Only1 { prop_assert_eq!(by, BestResponse::Only1); }
                if by == BestResponse::Only0 { prop_assert_eq!(bx, BestResponse::Only0); }
            }
        }

        #[test]
        fn complementary_flips_best_responses(g in arb_game(), m in any::<u64>()) {
            let x = ActionProfile::from_mask(g.len(), m);
            let c = g.complementary();
            for i in g.network().agents() {
                let orig = g.best_response(i, &x).unwrap();
                let comp = c.best_response(i, &x.complement()).unwrap();
                prop_assert_eq!(comp, orig.flip());
            }
        }

        #[test]
        fn lq_best_response_matches_utility(
            g in arb_game(),
            m in any::<u64>(),
            a in 0i64..6, c in 1i64..6, phi in 1i64..4,
        ) {
            let n = g.len();
            let p = LinearQuadraticParams::uniform(n, q(a, 2), q(c, 1), q(phi, 4)).unwrap();
            let lq = thresholds_from_lq(&p, g.network()).unwrap();
            let x = ActionProfile::from_mask(n, m);
            for i in g.network().agents() {
                let mut on = x.clone();
                on.set(i, true);
                let mut off = x.clone();
                off.set(i, false);
                let prefers_one = lq_utility(&p, g.network(), i, &on) >= lq_utility(&p, g.network(), i, &off);
                prop_assert_eq!(prefers_one, lq.best_response(i, &x).unwrap() != BestResponse::Only0);
            }
        }

        #[test]
        fn integer_rows_agree_with_rationals(g in arb_game(), m in any::<u64>()) {
            let rows = IntRows::for_game(&g).unwrap();
            let x = ActionProfile::from_mask(g.len(), m);
            for i in g.network().agents() {
                prop_assert_eq!(rows.best_response(i.index(), x.as_slice()), g.best_response(i, &x).unwrap());
            }
            prop_assert_eq!(rows.is_nash(x.as_slice()), g.is_nash(&x));
        }
    }
}
