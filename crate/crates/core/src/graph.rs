//! Weighted directed networks with exact, strictly positive link weights.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Dense index of an agent within one [`Network`]. Indices follow input
/// order, so ordering by `AgentId` is the canonical reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(usize);

impl AgentId {
    pub const fn new(index: usize) -> Self {
        AgentId(index)
    }

    pub const fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

pub type AgentSet = BTreeSet<AgentId>;

/// An immutable weighted directed network. `weight(i, j)` is how much agent
/// `i` cares about agent `j`; the out-degree of `i` is the sum of its row.
#[derive(Clone)]
pub struct Network {
    labels: Vec<String>,
    lookup: HashMap<String, usize>,
    out: Vec<Vec<(AgentId, Rational)>>,
    inc: Vec<Vec<(AgentId, Rational)>>,
    degree: Vec<Rational>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.out == other.out
    }
}

impl Eq for Network {}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (i, label) in self.labels.iter().enumerate() {
            let row: Vec<String> = self.out[i]
                .iter()
                .map(|(j, w)| format!("{}:{}", self.labels[j.0], w))
                .collect();
            m.entry(label, &row);
        }
        m.finish()
    }
}

#[derive(Debug, Default, Clone)]
pub struct NetworkBuilder {
    labels: Vec<String>,
    lookup: HashMap<String, usize>,
    edges: BTreeMap<(usize, usize), Rational>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn agent(&mut self, label: impl Into<String>) -> Result<AgentId> {
        let label = label.into();
        if self.lookup.contains_key(&label) {
            return Err(Error::InvalidParams(format!("duplicate agent {label:?}")));
        }
        let id = self.labels.len();
        self.lookup.insert(label.clone(), id);
        self.labels.push(label);
        Ok(AgentId(id))
    }

    pub fn id(&self, label: &str) -> Result<AgentId> {
        self.lookup
            .get(label)
            .map(|&i| AgentId(i))
            .ok_or_else(|| Error::NotFound(label.to_string()))
    }

    /// Adds link `src -> dst`. Zero weights are accepted and dropped.
    pub fn edge(&mut self, src: AgentId, dst: AgentId, weight: Rational) -> Result<&mut Self> {
        let n = self.labels.len();
        if src.0 >= n || dst.0 >= n {
            return Err(Error::NotFound(format!("{src}->{dst}")));
        }
        if src == dst {
            return Err(Error::InvalidParams(format!("self-loop on {:?}", self.labels[src.0])));
        }
        if weight.is_negative() {
            return Err(Error::InvalidParams(format!(
                "negative weight {weight} on {:?}->{:?}",
                self.labels[src.0], self.labels[dst.0]
            )));
        }
        if self.edges.contains_key(&(src.0, dst.0)) {
            return Err(Error::InvalidParams(format!(
                "duplicate edge {:?}->{:?}",
                self.labels[src.0], self.labels[dst.0]
            )));
        }
        if !weight.is_zero() {
            self.edges.insert((src.0, dst.0), weight);
        }
        Ok(self)
    }

    pub fn labeled_edge(&mut self, src: &str, dst: &str, weight: Rational) -> Result<&mut Self> {
        let (s, d) = (self.id(src)?, self.id(dst)?);
        self.edge(s, d, weight)
    }

    pub fn build(self) -> Network {
        let n = self.labels.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for ((s, d), w) in self.edges {
            out[s].push((AgentId(d), w.clone()));
            inc[d].push((AgentId(s), w));
        }
        let degree = out.iter().map(|row| row.iter().map(|(_, w)| w).sum()).collect();
        Network {
            labels: self.labels,
            lookup: self.lookup,
            out,
            inc,
            degree,
        }
    }
}

impl Network {
    pub fn builder() -> NetworkBuilder {
        NetworkBuilder::new()
    }

    /// Convenience constructor from labels and labeled edges.
    pub fn from_edges<S: AsRef<str>>(labels: &[S], edges: &[(&str, &str, Rational)]) -> Result<Self> {
        let mut b = NetworkBuilder::new();
        for l in labels {
            b.agent(l.as_ref())?;
        }
        for (s, d, w) in edges {
            b.labeled_edge(s, d, w.clone())?;
        }
        Ok(b.build())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn agents(&self) -> impl ExactSizeIterator<Item = AgentId> + Clone {
        (0..self.labels.len()).map(AgentId)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: AgentId) -> &str {
        &self.labels[i.0]
    }

    pub fn agent(&self, label: &str) -> Result<AgentId> {
        self.lookup
            .get(label)
            .map(|&i| AgentId(i))
            .ok_or_else(|| Error::NotFound(label.to_string()))
    }

    pub fn contains(&self, i: AgentId) -> bool {
        i.0 < self.labels.len()
    }

    pub(crate) fn check(&self, i: AgentId) -> Result<()> {
        if self.contains(i) {
            Ok(())
        } else {
            Err(Error::NotFound(i.to_string()))
        }
    }

    /// Out-links of `i` as `(dst, weight)`, sorted by `dst`.
    pub fn out_edges(&self, i: AgentId) -> &[(AgentId, Rational)] {
        &self.out[i.0]
    }

    /// In-links of `j` as `(src, weight)`, sorted by `src`.
    pub fn in_edges(&self, j: AgentId) -> &[(AgentId, Rational)] {
        &self.inc[j.0]
    }

    pub fn edges(&self) -> impl Iterator<Item = (AgentId, AgentId, &Rational)> {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(s, row)| row.iter().map(move |(d, w)| (AgentId(s), *d, w)))
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn weight(&self, i: AgentId, j: AgentId) -> Rational {
        self.out[i.0]
            .binary_search_by_key(&j, |(d, _)| *d)
            .map(|pos| self.out[i.0][pos].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    /// Sum of `i`'s outward link weights.
    pub fn degree(&self, i: AgentId) -> Result<&Rational> {
        self.check(i)?;
        Ok(&self.degree[i.0])
    }

    pub fn degrees(&self) -> &[Rational] {
        &self.degree
    }

    /// True iff every ordered pair of agents is joined by a directed path.
    /// The empty network is vacuously connected.
    pub fn is_strongly_connected(&self) -> bool {
        if self.len() <= 1 {
            return true;
        }
        let reach = |adj: &Vec<Vec<(AgentId, Rational)>>| {
            let mut seen = vec![false; self.len()];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(u) = queue.pop_front() {
                for (v, _) in &adj[u] {
                    if !seen[v.0] {
                        seen[v.0] = true;
                        queue.push_back(v.0);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(&self.out) && reach(&self.inc)
    }

    /// The sub-network on `members` with every original link between two
    /// members. Agents keep their relative order; indices are reassigned.
    pub fn induced_subnetwork(&self, members: &AgentSet) -> Result<Network> {
        let mut remap = vec![None; self.len()];
        let mut b = NetworkBuilder::new();
        for &m in members {
            self.check(m)?;
            remap[m.0] = Some(b.agent(self.labels[m.0].clone())?);
        }
        for (s, d, w) in self.edges() {
            if let (Some(s2), Some(d2)) = (remap[s.0], remap[d.0]) {
                b.edge(s2, d2, w.clone())?;
            }
        }
        Ok(b.build())
    }

    /// A copy with link `i -> j` set to `weight` (zero removes it).
    pub fn with_weight(&self, i: AgentId, j: AgentId, weight: Rational) -> Result<Network> {
        self.check(i)?;
        self.check(j)?;
        let mut b = NetworkBuilder::new();
        for l in &self.labels {
            b.agent(l.clone())?;
        }
        for (s, d, w) in self.edges() {
            if (s, d) != (i, j) {
                b.edge(s, d, w.clone())?;
            }
        }
        b.edge(i, j, weight)?;
        Ok(b.build())
    }
}
