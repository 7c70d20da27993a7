//! Text formats for requests, queries and results.
//!
//! Distances print as integers, with `INF` for unreachable. Comments start
//! with `#`; blank lines are skipped.

use std::fmt::Write as _;

use crate::apsisp::SispTable;
use crate::exclude::{ExcludeRequest, ExcludeResult};
use crate::graph::{Dist, Graph, PathSpec, Vertex, INF};
use crate::query::{BatchAnswers, Query, QueryBatch};
use crate::{Error, Result};

pub fn format_dist(d: Dist) -> String {
    if d == INF {
        "INF".into()
    } else {
        d.to_string()
    }
}

/// Content lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim())).filter(|(_, l)| !l.is_empty())
}

fn parse_vertex(s: &str, line: usize) -> Result<Vertex> {
    s.parse().map_err(|_| Error::Parse { line, msg: format!("expected a vertex id, got {s:?}") })
}

/// Parses lines `source; path = v0 v1 ... vk`. Lines with the same source
/// form one request, in order of first appearance; an empty vertex list
/// adds a source with no paths.
pub fn parse_exclude_requests(text: &str, g: &Graph) -> Result<Vec<ExcludeRequest>> {
    let mut reqs: Vec<ExcludeRequest> = Vec::new();
    for (line, content) in content_lines(text) {
        let bad = |msg: &str| Error::Parse { line, msg: msg.into() };
        let (src, rest) = content.split_once(';').ok_or_else(|| bad("expected `source; path = v0 v1 ...`"))?;
        let (key, list) = rest.split_once('=').ok_or_else(|| bad("expected `path = ...` after the source"))?;
        if key.trim() != "path" {
            return Err(bad("expected `path = ...` after the source"));
        }
        let source = parse_vertex(src.trim(), line)?;
        g.check_vertex(source).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        let vertices = list.split_whitespace().map(|s| parse_vertex(s, line)).collect::<Result<Vec<_>>>()?;
        let idx = match reqs.iter().position(|r| r.source == source) {
            Some(i) => i,
            None => {
                reqs.push(ExcludeRequest::new(source, Vec::new()));
                reqs.len() - 1
            }
        };
        if !vertices.is_empty() {
            let path = PathSpec::from_vertices(g, source, &vertices).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
            reqs[idx].paths.push(path);
        }
    }
    Ok(reqs)
}

/// CSV `x,y,path_start,distance`, one row per vertex below a path.
pub fn write_exclude_results(reqs: &[ExcludeRequest], results: &[ExcludeResult]) -> String {
    let mut s = String::from("x,y,path_start,distance\n");
    for (req, res) in reqs.iter().zip(results) {
        for (y, i, d) in res.entries() {
            let _ = writeln!(s, "{},{},{},{}", res.source, y, req.paths[i].start_vertex, format_dist(d));
        }
    }
    s
}

/// Parses lines `x y u v`.
pub fn parse_queries(text: &str) -> Result<QueryBatch> {
    content_lines(text)
        .map(|(line, content)| {
            let f = content.split_whitespace().map(|s| parse_vertex(s, line)).collect::<Result<Vec<_>>>()?;
            match f[..] {
                [x, y, u, v] => Ok(Query::new(x, y, u, v)),
                _ => Err(Error::Parse { line, msg: "query lines must be `x y u v`".into() }),
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(QueryBatch::new)
}

pub fn write_queries(batch: &QueryBatch) -> String {
    batch.queries.iter().map(|q| format!("{} {} {} {}\n", q.x, q.y, q.u, q.v)).collect()
}

/// CSV `x,y,u,v,distance,rounds_charged`, plus a `case` column when asked.
/// Rejected queries print `ERR` as the distance.
pub fn write_answers(answers: &BatchAnswers, with_case: bool) -> String {
    let mut s = String::from("x,y,u,v,distance,rounds_charged");
    s.push_str(if with_case { ",case\n" } else { "\n" });
    for a in &answers.answers {
        let q = a.query;
        let d = a.result.map_or_else(|_| "ERR".to_string(), format_dist);
        let _ = write!(s, "{},{},{},{},{},{}", q.x, q.y, q.u, q.v, d, answers.rounds);
        if with_case {
            let _ = write!(s, ",{}", a.case.map_or_else(String::new, |c| c.to_string()));
        }
        s.push('\n');
    }
    s
}

/// CSV `x,y,d2` over all ordered pairs.
pub fn write_d2(table: &SispTable) -> String {
    let mut s = String::from("x,y,d2\n");
    for (x, row) in table.d2.iter().enumerate() {
        for (y, &d) in row.iter().enumerate() {
            let _ = writeln!(s, "{x},{y},{}", format_dist(d));
        }
    }
    s
}
