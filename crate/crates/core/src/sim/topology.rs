use std::collections::{HashMap, VecDeque};

use crate::graph::{Graph, Vertex};

pub type LinkId = u32;

/// Underlying undirected, unweighted communication network of a graph. Each
/// adjacent pair `{u, v}` contributes two link directions.
#[derive(Clone, Debug)]
pub struct Topology {
    n: usize,
    neighbors: Vec<Vec<Vertex>>,
    links: Vec<(Vertex, Vertex)>,
    index: HashMap<(Vertex, Vertex), LinkId>,
    diameter: usize,
    connected: bool,
}

impl Topology {
    pub fn new(g: &Graph) -> Self {
        let n = g.n();
        let mut neighbors = vec![Vec::new(); n];
        for e in g.edges() {
            neighbors[e.from].push(e.to);
            neighbors[e.to].push(e.from);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        let mut links = Vec::new();
        let mut index = HashMap::new();
        for (u, list) in neighbors.iter().enumerate() {
            for &v in list {
                index.insert((u, v), links.len() as LinkId);
                links.push((u, v));
            }
        }
        let mut topo = Topology { n, neighbors, links, index, diameter: 0, connected: true };
        let mut diameter = 0;
        for s in 0..n {
            let d = topo.hop_distances(s);
            if d.iter().any(Option::is_none) {
                topo.connected = false;
            }
            diameter = diameter.max(d.into_iter().flatten().max().unwrap_or(0));
        }
        topo.diameter = diameter;
        topo
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.neighbors[v]
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn link(&self, id: LinkId) -> (Vertex, Vertex) {
        self.links[id as usize]
    }

    pub fn link_id(&self, from: Vertex, to: Vertex) -> Option<LinkId> {
        self.index.get(&(from, to)).copied()
    }

    /// Undirected hop diameter (largest finite eccentricity when disconnected).
    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn hop_distances(&self, s: Vertex) -> Vec<Option<usize>> {
        let mut d = vec![None; self.n];
        d[s] = Some(0);
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in &self.neighbors[u] {
                if d[v].is_none() {
                    d[v] = Some(d[u].unwrap() + 1);
                    q.push_back(v);
                }
            }
        }
        d
    }
}
