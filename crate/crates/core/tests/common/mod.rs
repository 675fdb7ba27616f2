//! Test-only oracles, kept independent of the implementation paths they
//! check: percolation by definitional set scans, susceptible sets by a
//! double loop.

use edgestep::graph::Multigraph;
use edgestep::VertexId;

/// Bootstrap percolation straight from the definition: each round rescans
/// the whole edge list and infects every uninfected vertex with at least
/// `r` edges into the previously infected set. Returns the infection round
/// per vertex.
pub fn naive_bootstrap(g: &Multigraph, initial: &[VertexId], r: u32) -> Vec<Option<u32>> {
    let n = g.num_vertices() as usize;
    let mut round_of: Vec<Option<u32>> = vec![None; n];
    for &v in initial {
        round_of[v as usize - 1] = Some(0);
    }
    let mut round = 0u32;
    loop {
        round += 1;
        let previously: Vec<bool> = round_of
            .iter()
            .map(|r| r.is_some_and(|s| s < round))
            .collect();
        let mut newly = Vec::new();
        for v in 1..=n as VertexId {
            if round_of[v as usize - 1].is_some() {
                continue;
            }
            let mut count = 0u64;
            for (a, b) in g.edges() {
                if a == v && b != v && previously[b as usize - 1] {
                    count += 1;
                }
                if b == v && a != v && previously[a as usize - 1] {
                    count += 1;
                }
            }
            if count >= r as u64 {
                newly.push(v);
            }
        }
        if newly.is_empty() {
            return round_of;
        }
        for v in newly {
            round_of[v as usize - 1] = Some(round);
        }
    }
}

/// Susceptible set by the obvious double loop over (vertex, hub member).
pub fn naive_susceptible(g: &Multigraph, hub: &[VertexId], r: u32) -> Vec<VertexId> {
    let mut out = Vec::new();
    for v in 1..=g.num_vertices() as VertexId {
        if hub.contains(&v) {
            continue;
        }
        let mut count = 0u64;
        for &u in hub {
            for (a, b) in g.edges() {
                if (a == v && b == u) || (a == u && b == v) {
                    count += 1;
                }
            }
        }
        if count >= r as u64 {
            out.push(v);
        }
    }
    out
}
