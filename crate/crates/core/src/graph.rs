//! A growing multigraph with loops and parallel edges.
//!
//! Endpoint choices in the process are degree-proportional, which the flat
//! half-edge array realizes in O(1): every edge contributes its two
//! endpoints (a loop contributes its vertex twice), so a uniform draw from
//! the array is a degree-weighted vertex draw. Vertex ids are dense 1-based
//! integers in birth order.

use std::io::{BufRead, Write};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

pub type VertexId = u32;

/// Memory guard for generation requests; estimated up front from the step
/// count so oversized runs fail before allocating.
pub(crate) const MEMORY_BUDGET_BYTES: u64 = 6 << 30;

#[derive(Debug, Clone)]
pub struct Multigraph {
    /// Two entries per edge; entry = endpoint vertex id.
    half_edges: Vec<VertexId>,
    /// Degree per vertex (index = id - 1). Loops count twice.
    degrees: Vec<u64>,
    /// Birth time per vertex; vertex 1 has birth time 1.
    birth_times: Vec<u64>,
    /// Running degree sum, equal to 2t at all times.
    degree_sum: u64,
    /// Seed of the trajectory this graph belongs to (provenance).
    seed: u64,
    /// Current time = number of edges.
    t: u64,
}

impl Multigraph {
    /// The initial state: one vertex carrying one loop.
    pub(crate) fn initial(seed: u64) -> Self {
        Self {
            half_edges: vec![1, 1],
            degrees: vec![2],
            birth_times: vec![1],
            degree_sum: 2,
            seed,
            t: 1,
        }
    }

    /// Builds a graph from an explicit edge list, mainly for fixtures and
    /// imported files. Birth times are synthesized from the id order (the
    /// true times are not recoverable from an edge list); percolation does
    /// not read them.
    pub fn from_edges(num_vertices: u64, edges: &[(VertexId, VertexId)], seed: u64) -> Result<Self> {
        if num_vertices < 1 || num_vertices > u32::MAX as u64 {
            return Err(Error::InvalidParameter {
                name: "num_vertices",
                reason: format!("vertex count {num_vertices} out of range"),
            });
        }
        let mut g = Self {
            half_edges: Vec::with_capacity(edges.len() * 2),
            degrees: vec![0; num_vertices as usize],
            birth_times: (1..=num_vertices).collect(),
            degree_sum: 0,
            seed,
            t: 0,
        };
        for &(u, v) in edges {
            if u < 1 || u as u64 > num_vertices || v < 1 || v as u64 > num_vertices {
                return Err(Error::InvalidParameter {
                    name: "edges",
                    reason: format!("edge ({u}, {v}) references a vertex outside 1..={num_vertices}"),
                });
            }
            g.push_edge(u, v);
        }
        Ok(g)
    }

    /// Number of edges, i.e. the process time.
    pub fn num_edges(&self) -> u64 {
        self.t
    }

    /// Number of vertices born so far.
    pub fn num_vertices(&self) -> u64 {
        self.degrees.len() as u64
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Degree of `v`; 0 for vertices that have not been born.
    pub fn degree(&self, v: VertexId) -> u64 {
        if v >= 1 && (v as usize) <= self.degrees.len() {
            self.degrees[v as usize - 1]
        } else {
            0
        }
    }

    /// Birth time of `v`, if born.
    pub fn birth_time(&self, v: VertexId) -> Option<u64> {
        if v >= 1 && (v as usize) <= self.birth_times.len() {
            Some(self.birth_times[v as usize - 1])
        } else {
            None
        }
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn birth_times(&self) -> &[u64] {
        &self.birth_times
    }

    pub fn half_edges(&self) -> &[VertexId] {
        &self.half_edges
    }

    /// Uniform draw over half-edges: picks vertex `u` with probability
    /// degree(u) / 2t.
    pub fn sample_vertex<R: Rng + ?Sized>(&self, rng: &mut R) -> VertexId {
        self.half_edges[rng.random_range(0..self.half_edges.len())]
    }

    pub(crate) fn add_vertex(&mut self, birth_time: u64) -> VertexId {
        self.degrees.push(0);
        self.birth_times.push(birth_time);
        self.degrees.len() as VertexId
    }

    pub(crate) fn push_edge(&mut self, u: VertexId, v: VertexId) {
        self.half_edges.push(u);
        self.half_edges.push(v);
        self.degrees[u as usize - 1] += 1;
        self.degrees[v as usize - 1] += 1;
        self.degree_sum += 2;
        self.t += 1;
        debug_assert_eq!(self.degree_sum, 2 * self.t);
        debug_assert_eq!(self.half_edges.len() as u64, 2 * self.t);
    }

    /// Edge endpoints in insertion order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.half_edges.chunks_exact(2).map(|c| (c[0], c[1]))
    }

    /// Writes the edge-list text format:
    /// a `# t=<int> V=<int> seed=<int>` header, then one `u v` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# t={} V={} seed={}",
            self.t,
            self.num_vertices(),
            self.seed
        )?;
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    /// Parses the edge-list text format written by [`write_edge_list`].
    ///
    /// [`write_edge_list`]: Multigraph::write_edge_list
    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::EdgeListParse {
            line: 1,
            reason: "empty file".into(),
        })?;
        let header = header?;
        let (t, v, seed) = parse_header(&header).ok_or_else(|| Error::EdgeListParse {
            line: 1,
            reason: format!("expected `# t=<int> V=<int> seed=<int>`, got `{header}`"),
        })?;
        let mut edges = Vec::with_capacity(t as usize);
        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            let parse = |s: Option<&str>| -> Option<VertexId> { s?.parse().ok() };
            let (a, b) = match (parse(parts.next()), parse(parts.next()), parts.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(Error::EdgeListParse {
                        line: line_no,
                        reason: format!("expected `u v`, got `{trimmed}`"),
                    })
                }
            };
            if a < 1 || a as u64 > v || b < 1 || b as u64 > v {
                return Err(Error::EdgeListParse {
                    line: line_no,
                    reason: format!("endpoint outside 1..={v}"),
                });
            }
            edges.push((a, b));
        }
        if edges.len() as u64 != t {
            return Err(Error::EdgeListParse {
                line: edges.len() + 1,
                reason: format!("header announces {t} edges but file holds {}", edges.len()),
            });
        }
        Self::from_edges(v, &edges, seed)
    }
}

fn parse_header(line: &str) -> Option<(u64, u64, u64)> {
    let rest = line.strip_prefix('#')?.trim();
    let mut t = None;
    let mut v = None;
    let mut seed = None;
    for field in rest.split_whitespace() {
        let (key, value) = field.split_once('=')?;
        let value: u64 = value.parse().ok()?;
        match key {
            "t" => t = Some(value),
            "V" => v = Some(value),
            "seed" => seed = Some(value),
            _ => return None,
        }
    }
    Some((t?, v?, seed?))
}

/// Per-vertex aggregated incidence: for each vertex, its incident partners
/// as `(partner, multiplicity)` sorted by partner id. A loop at `v` shows up
/// in `v`'s own list as `(v, k)` with `k` the number of loop edges, so
/// `degree(v) = sum of non-loop multiplicities + 2 * loop multiplicity`.
#[derive(Debug, Clone, Serialize)]
pub struct Adjacency {
    lists: Vec<Vec<(VertexId, u64)>>,
}

impl Adjacency {
    pub fn from_graph(g: &Multigraph) -> Self {
        let n = g.num_vertices() as usize;
        let mut raw: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for (u, v) in g.edges() {
            if u == v {
                raw[u as usize - 1].push(u);
            } else {
                raw[u as usize - 1].push(v);
                raw[v as usize - 1].push(u);
            }
        }
        let lists = raw
            .into_iter()
            .map(|mut partners| {
                partners.sort_unstable();
                let mut agg: Vec<(VertexId, u64)> = Vec::new();
                for p in partners {
                    match agg.last_mut() {
                        Some((q, m)) if *q == p => *m += 1,
                        _ => agg.push((p, 1)),
                    }
                }
                agg
            })
            .collect();
        Self { lists }
    }

    pub fn num_vertices(&self) -> u64 {
        self.lists.len() as u64
    }

    /// `(partner, multiplicity)` pairs of `v`, sorted by partner.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, u64)] {
        &self.lists[v as usize - 1]
    }

    /// Edge multiplicity between `v` and `w`. For `v == w` this counts loop
    /// edges at `v`.
    pub fn multiplicity(&self, v: VertexId, w: VertexId) -> u64 {
        let list = self.neighbors(v);
        match list.binary_search_by_key(&w, |&(p, _)| p) {
            Ok(idx) => list[idx].1,
            Err(_) => 0,
        }
    }

    /// Number of distinct neighbors of `v`; a loop makes `v` its own
    /// neighbor, counted once.
    pub fn distinct_neighbors(&self, v: VertexId) -> u64 {
        self.neighbors(v).len() as u64
    }
}

/// Aggregates the graph into per-vertex `(partner, multiplicity)` lists.
pub fn snapshot_adjacency(g: &Multigraph) -> Adjacency {
    Adjacency::from_graph(g)
}
