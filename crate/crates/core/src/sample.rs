//! Seeded random games for property tests, benches and experiments.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::game::{LinearQuadraticParams, ThresholdGame};
use crate::graph::{AgentId, AgentSet, Network};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct GameConfig {
    pub min_agents: usize,
    pub max_agents: usize,
    /// Probability that any given ordered pair is linked.
    pub density: f64,
    /// Weights are `p / q` with `1 <= q <= max_denominator`, `1 <= p <= max_numerator`.
    pub max_numerator: i64,
    pub max_denominator: i64,
    /// Thresholds are drawn from `[-bound, bound + degree]` in steps of
    /// `1 / threshold_denominator`.
    pub threshold_bound: i64,
    pub threshold_denominator: i64,
    /// Keep thresholds off every subset sum of incoming weights: thresholds
    /// are `p / 7` with `7` not dividing `p`, weights have denominators
    /// coprime to 7.
    pub indifference_free: bool,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            min_agents: 1,
            max_agents: 10,
            density: 0.35,
            max_numerator: 4,
            max_denominator: 4,
            threshold_bound: 1,
            threshold_denominator: 2,
            indifference_free: false,
        }
    }
}

impl GameConfig {
    pub fn with_agents(mut self, min: usize, max: usize) -> Self {
        self.min_agents = min;
        self.max_agents = max;
        self
    }

    pub fn indifference_free(mut self) -> Self {
        self.indifference_free = true;
        self.max_denominator = self.max_denominator.min(6);
        self
    }
}

fn label(i: usize) -> String {
    let mut s = String::new();
    let mut k = i;
    loop {
        s.insert(0, (b'A' + (k % 26) as u8) as char);
        if k < 26 {
            break;
        }
        k = k / 26 - 1;
    }
    s
}

/// `A, B, ..., Z, AA, AB, ...`
pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(label).collect()
}

pub fn weight<R: Rng + ?Sized>(rng: &mut R, max_numerator: i64, max_denominator: i64) -> Rational {
    Rational::new(rng.gen_range(1..=max_numerator), rng.gen_range(1..=max_denominator))
}

pub fn network<R: Rng + ?Sized>(rng: &mut R, n: usize, cfg: &GameConfig) -> Network {
    let mut b = Network::builder();
    for l in labels(n) {
        b.agent(l).expect("labels are distinct");
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(cfg.density) {
                let w = weight(rng, cfg.max_numerator, cfg.max_denominator.max(1));
                b.edge(AgentId::new(i), AgentId::new(j), w).expect("fresh edge");
            }
        }
    }
    b.build()
}

pub fn game<R: Rng + ?Sized>(rng: &mut R, cfg: &GameConfig) -> ThresholdGame {
    let n = rng.gen_range(cfg.min_agents..=cfg.max_agents);
    let mut cfg = cfg.clone();
    if cfg.indifference_free {
        // denominators 1..=6 are coprime to 7
        cfg.max_denominator = cfg.max_denominator.clamp(1, 6);
    }
    let net = network(rng, n, &cfg);
    let thresholds = net
        .degrees()
        .iter()
        .map(|d| {
            if cfg.indifference_free {
                let span = 7 * (cfg.threshold_bound + d.to_f64().ceil() as i64);
                loop {
                    let p = rng.gen_range(-7 * cfg.threshold_bound..=span);
                    if p % 7 != 0 {
                        break Rational::new(p, 7);
                    }
                }
            } else {
                let den = cfg.threshold_denominator.max(1);
                let hi = den * (cfg.threshold_bound + d.to_f64().ceil() as i64);
                Rational::new(rng.gen_range(-den * cfg.threshold_bound..=hi), den)
            }
        })
        .collect();
    ThresholdGame::new(net, thresholds).expect("one threshold per agent")
}

/// Linear-quadratic parameters with positive spillovers. `a` is kept large
/// enough that threshold moves of up to `slack` stay valid.
pub fn lq_params<R: Rng + ?Sized>(rng: &mut R, n: usize, slack: i64) -> LinearQuadraticParams {
    let pick = |rng: &mut R, lo: i64, hi: i64, den: i64| Rational::new(rng.gen_range(lo..=hi), den);
    let mut a = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    for _ in 0..n {
        let f = pick(rng, 1, 4, 4);
        a.push(&f * Rational::from_integer(slack) + pick(rng, 0, 8, 4));
        c.push(pick(rng, 1, 12, 2));
        phi.push(f);
    }
    LinearQuadraticParams::new(a, c, phi).expect("positive by construction")
}

/// Random subset, each agent kept with probability `p`.
pub fn subset<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> AgentSet {
    (0..n).filter(|_| rng.gen_bool(p)).map(AgentId::new).collect()
}

pub fn shuffled<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<AgentId> {
    let mut v: Vec<AgentId> = (0..n).map(AgentId::new).collect();
    v.shuffle(rng);
    v
}
