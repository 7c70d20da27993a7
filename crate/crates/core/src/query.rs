//! Replacement-distance queries `(x, y, e)` and their answers.

use std::fmt;

use thiserror::Error;

use crate::graph::{Dist, EdgeId, Graph, Vertex};

/// Distance from `x` to `y` avoiding the edge `(u, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Query {
    pub x: Vertex,
    pub y: Vertex,
    pub u: Vertex,
    pub v: Vertex,
}

impl Query {
    pub fn new(x: Vertex, y: Vertex, u: Vertex, v: Vertex) -> Self {
        Query { x, y, u, v }
    }

    /// Checks the endpoints and resolves the failed edge.
    pub fn resolve(&self, g: &Graph) -> Result<EdgeId, QueryError> {
        for w in [self.x, self.y, self.u, self.v] {
            if w >= g.n() {
                return Err(QueryError::VertexOutOfRange(w));
            }
        }
        g.edge_id(self.u, self.v).ok_or(QueryError::NoSuchEdge(self.u, self.v))
    }
}

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(Vertex),
    #[error("edge ({0}, {1}) is not in the graph")]
    NoSuchEdge(Vertex, Vertex),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryBatch {
    pub queries: Vec<Query>,
}

impl QueryBatch {
    pub fn new(queries: Vec<Query>) -> Self {
        QueryBatch { queries }
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    /// The failed edge shared by every query, if there is one.
    pub fn common_edge(&self) -> Option<(Vertex, Vertex)> {
        let first = self.queries.first()?;
        self.queries.iter().all(|q| (q.u, q.v) == (first.u, first.v)).then_some((first.u, first.v))
    }
}

impl FromIterator<Query> for QueryBatch {
    fn from_iter<I: IntoIterator<Item = Query>>(iter: I) -> Self {
        QueryBatch::new(iter.into_iter().collect())
    }
}

/// Which rule produced an answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AnswerCase {
    /// The failed edge is not on the tree path, so the distance is unchanged.
    OffPath,
    /// A stored distance for an edge near the source or the sink, or the
    /// hop-limited Bellman-Ford of the sampling oracle.
    ShortHop,
    /// The combination through the two level vertices flanking the edge.
    LevelVertex,
    /// A sampled source in a sampled subgraph.
    Sampled,
    /// A direct shortest-path computation in `G - e`.
    Direct,
}

impl fmt::Display for AnswerCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnswerCase::OffPath => "off_path",
            AnswerCase::ShortHop => "short_hop",
            AnswerCase::LevelVertex => "level",
            AnswerCase::Sampled => "sampled",
            AnswerCase::Direct => "direct",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryAnswer {
    pub query: Query,
    pub result: Result<Dist, QueryError>,
    pub case: Option<AnswerCase>,
}

/// Answers of a batch, in query order, with the rounds the query phase cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchAnswers {
    pub answers: Vec<QueryAnswer>,
    pub rounds: u64,
}

impl BatchAnswers {
    /// Distances of the valid queries (`None` for rejected ones).
    pub fn distances(&self) -> Vec<Option<Dist>> {
        self.answers.iter().map(|a| a.result.ok()).collect()
    }
}

/// Makes every valid query known to all nodes: each query, initially known
/// at its source, is broadcast as a 3-word record. Returns the trace.
pub(crate) fn announce(run: &mut crate::sim::NetworkRun<'_>, batch: &QueryBatch, valid: &[bool]) -> crate::sim::Trace {
    let tree = run.comm_tree(0, "query");
    let records: Vec<(Vertex, usize)> = batch.queries.iter().zip(valid).filter(|(_, &ok)| ok).map(|(q, _)| (q.x, 3)).collect();
    crate::sim::broadcast_many(run.sim(), &tree, &records).trace
}
