//! Bonacich centrality and inter-centrality of the continuous-action
//! linear-quadratic game, solved exactly.

use crate::error::{Error, Result};
use crate::graph::{AgentId, Network};
use crate::rational::Rational;

/// Relative gap at which the spectral-radius bracket is considered tight.
pub const SPECTRAL_TOLERANCE: f64 = 1e-9;
const SPECTRAL_MAX_ITERS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BonacichSolution {
    /// `b` solving `(I - Phi G) b = a`.
    pub centrality: Vec<Rational>,
    /// `M = (I - Phi G)^-1`.
    pub inverse: Vec<Vec<Rational>>,
    /// Floating-point estimate of the spectral radius of `Phi G`.
    pub spectral_radius: f64,
}

impl BonacichSolution {
    /// `b_i^2 / M_ii`.
    pub fn intercentrality(&self) -> Vec<Rational> {
        self.centrality
            .iter()
            .enumerate()
            .map(|(i, b)| b * b / &self.inverse[i][i])
            .collect()
    }
}

fn weighted_matrix(net: &Network, phi: &[Rational]) -> Vec<Vec<Rational>> {
    let n = net.len();
    let mut m = vec![vec![Rational::zero(); n]; n];
    for (s, d, w) in net.edges() {
        m[s.index()][d.index()] = &phi[s.index()] * w;
    }
    m
}

/// Bracket on the spectral radius of a nonnegative matrix by
/// Collatz-Wielandt bounds on `A + I` (the shift makes the iteration converge
/// for periodic matrices). Returns `(lower, upper)`.
pub fn spectral_radius_bounds(matrix: &[Vec<f64>]) -> (f64, f64) {
    let n = matrix.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mut v = vec![1.0f64; n];
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    for _ in 0..SPECTRAL_MAX_ITERS {
        let w: Vec<f64> = (0..n)
            .map(|i| v[i] + matrix[i].iter().zip(&v).map(|(a, x)| a * x).sum::<f64>())
            .collect();
        let ratios = w.iter().zip(&v).map(|(a, b)| a / b);
        lo = ratios.clone().fold(f64::INFINITY, f64::min);
        hi = ratios.fold(0.0, f64::max);
        if hi - lo <= SPECTRAL_TOLERANCE * hi {
            break;
        }
        let scale = w.iter().cloned().fold(0.0, f64::max);
        v = w.iter().map(|x| x / scale).collect();
    }
    (lo - 1.0, hi - 1.0)
}

pub fn spectral_radius(net: &Network, phi: &[Rational]) -> f64 {
    let m: Vec<Vec<f64>> = weighted_matrix(net, phi)
        .iter()
        .map(|row| row.iter().map(Rational::to_f64).collect())
        .collect();
    let (lo, hi) = spectral_radius_bounds(&m);
    (lo + hi) / 2.0
}

/// Exact Gauss-Jordan inverse; `None` when singular.
fn invert(mut m: Vec<Vec<Rational>>) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let p = m[col][col].recip();
        for j in 0..n {
            m[col][j] = &m[col][j] * &p;
            inv[col][j] = &inv[col][j] * &p;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for j in 0..n {
                let dm = &f * &m[col][j];
                m[r][j] -= dm;
                let di = &f * &inv[col][j];
                inv[r][j] -= di;
            }
        }
    }
    Some(inv)
}

fn check_inputs(net: &Network, phi: &[Rational], a: &[Rational]) -> Result<()> {
    let n = net.len();
    if phi.len() != n || a.len() != n {
        return Err(Error::InvalidParams(format!("phi and a need {n} entries")));
    }
    if let Some(i) = phi.iter().position(Rational::is_negative) {
        return Err(Error::InvalidParams(format!("phi[{}] = {} < 0", net.label(AgentId::new(i)), phi[i])));
    }
    if let Some(i) = a.iter().position(Rational::is_negative) {
        return Err(Error::InvalidParams(format!("a[{}] = {} < 0", net.label(AgentId::new(i)), a[i])));
    }
    Ok(())
}

/// Solves `(I - Phi G) b = a` exactly.
///
/// `I - Phi G` has a nonnegative inverse exactly when the spectral radius of
/// `Phi G` is below 1, so the exact sign check on `M` decides solvability;
/// the floating-point radius is reported alongside.
pub fn solve_bonacich(net: &Network, phi: &[Rational], a: &[Rational]) -> Result<BonacichSolution> {
    check_inputs(net, phi, a)?;
    let n = net.len();
    let spectral_radius = spectral_radius(net, phi);
    let weighted = weighted_matrix(net, phi);
    let system: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let id = if i == j { Rational::one() } else { Rational::zero() };
                    id - &weighted[i][j]
                })
                .collect()
        })
        .collect();
    let inverse = invert(system).ok_or_else(|| {
        Error::Divergent(format!("I - Phi G is singular (spectral radius ~ {spectral_radius:.12})"))
    })?;
    if inverse.iter().flatten().any(Rational::is_negative) {
        return Err(Error::Divergent(format!(
            "spectral radius of Phi G is at least 1 (~ {spectral_radius:.12})"
        )));
    }
    let centrality = inverse
        .iter()
        .map(|row| row.iter().zip(a).map(|(m, ai)| m * ai).sum())
        .collect();
    Ok(BonacichSolution {
        centrality,
        inverse,
        spectral_radius,
    })
}

pub fn bonacich(net: &Network, phi: &[Rational], a: &[Rational]) -> Result<Vec<Rational>> {
    Ok(solve_bonacich(net, phi, a)?.centrality)
}

pub fn intercentrality(net: &Network, phi: &[Rational], a: &[Rational]) -> Result<Vec<Rational>> {
    Ok(solve_bonacich(net, phi, a)?.intercentrality())
}

/// Agents sorted by descending value; ties keep input order.
pub fn rank_descending(values: &[Rational]) -> Vec<AgentId> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&x, &y| values[y].cmp(&values[x]).then(x.cmp(&y)));
    order.into_iter().map(AgentId::new).collect()
}
