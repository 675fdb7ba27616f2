//! Bootstrap percolation with an edge-multiplicity threshold.
//!
//! Round 0 infects each vertex independently with probability
//! `min(1, a / |V|)`. In round `s` every uninfected vertex connected to the
//! round-`s-1` infected set by at least `r` edges (parallel edges count with
//! multiplicity, loops never count for their own vertex) becomes infected.
//! The process stabilizes as soon as a round adds nothing, which happens
//! within `|V|` rounds.
//!
//! Rounds are driven by a frontier: only neighbors of newly infected
//! vertices are re-examined, against per-vertex running counters of
//! infected-edge multiplicity, so a full run costs O(edges) regardless of
//! the round count. Infection within a round is order-independent, so the
//! result matches the set-by-set definition exactly.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Adjacency, Multigraph, VertexId};
use crate::seeds::rng_from;

/// Round-indexed infection record.
#[derive(Debug, Clone)]
pub struct InfectionState {
    /// Round at which each vertex was infected; `None` = never.
    round_of: Vec<Option<u32>>,
    /// `|I_s|` for s = 0, 1, ... (no trailing duplicates after
    /// stabilization).
    round_sizes: Vec<u64>,
    /// Edge multiplicity from each still-uninfected vertex into the
    /// infected set.
    infected_edge_count: Vec<u64>,
    /// Vertices infected in the most recent round.
    frontier: Vec<VertexId>,
    current_round: u32,
    r: u32,
    a: f64,
    /// First round `s` with `I_{s+1} = I_s`, once known.
    stabilized_round: Option<u32>,
}

impl InfectionState {
    pub fn round_of(&self, v: VertexId) -> Option<u32> {
        self.round_of[v as usize - 1]
    }

    pub fn is_infected(&self, v: VertexId) -> bool {
        self.round_of[v as usize - 1].is_some()
    }

    pub fn round_sizes(&self) -> &[u64] {
        &self.round_sizes
    }

    pub fn infected_count(&self) -> u64 {
        *self.round_sizes.last().expect("round 0 always recorded")
    }

    pub fn threshold(&self) -> u32 {
        self.r
    }

    pub fn rate(&self) -> f64 {
        self.a
    }

    pub fn stabilized_round(&self) -> Option<u32> {
        self.stabilized_round
    }

    pub fn infected_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.round_of
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.map(|_| (i + 1) as VertexId))
    }
}

/// Samples the round-0 infection: each vertex independently with
/// probability `min(1, a / |V|)`. Rates above `|V|` are legal and clamp to
/// certain infection.
pub fn infect_initial(g: &Multigraph, a: f64, r: u32, seed: u64) -> Result<InfectionState> {
    if !(a >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "a",
            reason: format!("infection rate must be non-negative, got {a}"),
        });
    }
    let n = g.num_vertices();
    let p = (a / n as f64).min(1.0);
    let mut rng = rng_from(seed);
    // one uniform per vertex in id order, so raising `a` with the same seed
    // never shrinks the infected set (common-random-number coupling)
    let initial: Vec<VertexId> = (1..=n as VertexId)
        .filter(|_| rng.random::<f64>() < p)
        .collect();
    Ok(from_initial_set(g, &initial, r, a))
}

/// Builds the round-0 state from an explicit infected set.
pub fn from_initial_set(g: &Multigraph, initial: &[VertexId], r: u32, a: f64) -> InfectionState {
    assert!(r >= 1, "the frontier iteration needs a positive threshold");
    let n = g.num_vertices() as usize;
    let mut round_of = vec![None; n];
    let mut frontier = Vec::with_capacity(initial.len());
    for &v in initial {
        let slot = &mut round_of[v as usize - 1];
        if slot.is_none() {
            *slot = Some(0);
            frontier.push(v);
        }
    }
    InfectionState {
        round_sizes: vec![frontier.len() as u64],
        round_of,
        infected_edge_count: vec![0; n],
        frontier,
        current_round: 0,
        r,
        a,
        stabilized_round: None,
    }
}

/// Runs one round: every uninfected vertex with at least `r` edges into the
/// current infected set becomes infected. Returns how many vertices the
/// round added; at a fixed point this is 0 and the state does not change.
pub fn step(adj: &Adjacency, state: &mut InfectionState) -> u64 {
    let frontier = std::mem::take(&mut state.frontier);
    // Counters persist across rounds, so after the bumps below the counter
    // of an uninfected vertex equals its multiplicity into the whole
    // infected set, exactly the set-by-set rule. A vertex below threshold in
    // one round is re-examined whenever a later round bumps it again.
    let mut touched: Vec<VertexId> = Vec::new();
    for &u in &frontier {
        for &(w, mult) in adj.neighbors(u) {
            if w != u && state.round_of[w as usize - 1].is_none() {
                state.infected_edge_count[w as usize - 1] += mult;
                touched.push(w);
            }
        }
    }
    let round = state.current_round + 1;
    let mut newly = Vec::new();
    for &w in &touched {
        if state.infected_edge_count[w as usize - 1] >= state.r as u64
            && state.round_of[w as usize - 1].is_none()
        {
            state.round_of[w as usize - 1] = Some(round);
            newly.push(w);
        }
    }
    let added = newly.len() as u64;
    if added > 0 {
        state.current_round = round;
        let prev = *state.round_sizes.last().expect("round 0 recorded");
        state.round_sizes.push(prev + added);
        state.frontier = newly;
    } else if state.stabilized_round.is_none() {
        state.stabilized_round = Some(state.current_round);
    }
    added
}

/// First round at which the infected set reaches fraction `c`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TauRecord {
    pub c: f64,
    /// `min { s : |I_s| >= c |V| }`, `None` if never reached.
    pub tau: Option<u32>,
}

fn tau_for(round_sizes: &[u64], c: f64, n: u64) -> Option<u32> {
    let target = c * n as f64;
    round_sizes
        .iter()
        .position(|&sz| sz as f64 >= target)
        .map(|s| s as u32)
}

/// A complete percolation run plus its stopping times.
#[derive(Debug, Clone)]
pub struct PercolationRun {
    pub state: InfectionState,
    pub taus: Vec<TauRecord>,
    /// Set when the run hit `max_rounds` without stabilizing.
    pub hit_round_cap: bool,
    pub seed: u64,
}

impl PercolationRun {
    pub fn final_fraction(&self, g: &Multigraph) -> f64 {
        self.state.infected_count() as f64 / g.num_vertices() as f64
    }

    /// The JSON record emitted for a run.
    pub fn to_record(&self, g: &Multigraph) -> PercolationRecord {
        let mut tau = BTreeMap::new();
        for t in &self.taus {
            tau.insert(format!("{}", t.c), t.tau);
        }
        PercolationRecord {
            format_version: 1,
            v: g.num_vertices(),
            e: g.num_edges(),
            a: self.state.rate(),
            r: self.state.threshold(),
            seed: self.seed,
            round_sizes: self.state.round_sizes().to_vec(),
            tau,
            final_fraction: self.final_fraction(g),
            stabilized: !self.hit_round_cap,
        }
    }
}

/// Serializable summary of one run.
#[derive(Debug, Clone, Serialize)]
pub struct PercolationRecord {
    pub format_version: u32,
    #[serde(rename = "V")]
    pub v: u64,
    #[serde(rename = "E")]
    pub e: u64,
    pub a: f64,
    pub r: u32,
    pub seed: u64,
    pub round_sizes: Vec<u64>,
    pub tau: BTreeMap<String, Option<u32>>,
    pub final_fraction: f64,
    pub stabilized: bool,
}

/// Samples round 0 and iterates to stabilization (or `max_rounds`),
/// recording `tau_c` for every requested `c`.
pub fn run(
    g: &Multigraph,
    adj: &Adjacency,
    a: f64,
    r: u32,
    c_list: &[f64],
    seed: u64,
    max_rounds: u64,
) -> Result<PercolationRun> {
    if r < 2 {
        return Err(Error::InvalidParameter {
            name: "r",
            reason: format!("threshold must be at least 2, got {r}"),
        });
    }
    if max_rounds < 1 {
        return Err(Error::InvalidParameter {
            name: "max_rounds",
            reason: "at least one round is required".into(),
        });
    }
    let state = infect_initial(g, a, r, seed)?;
    Ok(run_rounds(g, adj, state, c_list, seed, max_rounds))
}

/// Iterates an already-initialized state to stabilization.
pub fn run_from_initial(
    g: &Multigraph,
    adj: &Adjacency,
    initial: &[VertexId],
    r: u32,
    c_list: &[f64],
    max_rounds: u64,
) -> PercolationRun {
    let state = from_initial_set(g, initial, r, initial.len() as f64);
    run_rounds(g, adj, state, c_list, 0, max_rounds)
}

fn run_rounds(
    g: &Multigraph,
    adj: &Adjacency,
    mut state: InfectionState,
    c_list: &[f64],
    seed: u64,
    max_rounds: u64,
) -> PercolationRun {
    let mut hit_round_cap = false;
    let mut growth_rounds = 0u64;
    loop {
        if step(adj, &mut state) == 0 {
            break; // fixed point; step recorded the stabilization round
        }
        growth_rounds += 1;
        if growth_rounds >= max_rounds {
            hit_round_cap = true;
            break;
        }
    }
    let n = g.num_vertices();
    let taus = c_list
        .iter()
        .map(|&c| TauRecord {
            c,
            tau: tau_for(state.round_sizes(), c, n),
        })
        .collect();
    PercolationRun {
        state,
        taus,
        hit_round_cap,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::snapshot_adjacency;

    fn path3() -> (Multigraph, Adjacency) {
        let g = Multigraph::from_edges(3, &[(1, 2), (2, 3)], 0).unwrap();
        let adj = snapshot_adjacency(&g);
        (g, adj)
    }

    #[test]
    fn middle_of_a_path_catches_from_both_ends() {
        let (g, adj) = path3();
        let run = run_from_initial(&g, &adj, &[1, 3], 2, &[1.0], 100);
        assert_eq!(run.state.round_of(2), Some(1));
        assert_eq!(run.state.round_sizes(), &[2, 3]);
        assert_eq!(run.taus[0].tau, Some(1));
    }

    #[test]
    fn parallel_edges_count_with_multiplicity() {
        let g = Multigraph::from_edges(2, &[(1, 2), (1, 2)], 0).unwrap();
        let adj = snapshot_adjacency(&g);
        let run = run_from_initial(&g, &adj, &[1], 2, &[], 100);
        assert_eq!(run.state.round_of(2), Some(1));
    }

    #[test]
    fn loops_never_infect_their_own_vertex() {
        let g = Multigraph::from_edges(1, &[(1, 1); 5], 0).unwrap();
        let adj = snapshot_adjacency(&g);
        let run = run_from_initial(&g, &adj, &[], 2, &[0.5], 100);
        assert!(!run.state.is_infected(1));
        assert_eq!(run.state.infected_count(), 0);
        assert_eq!(run.taus[0].tau, None);
    }

    #[test]
    fn full_rate_infects_everything_at_round_zero() {
        let (g, adj) = path3();
        let run = run(&g, &adj, 3.0, 2, &[0.25, 1.0], 99, 100).unwrap();
        assert_eq!(run.state.round_sizes(), &[3]);
        assert_eq!(run.state.stabilized_round(), Some(0));
        for t in &run.taus {
            assert_eq!(t.tau, Some(0));
        }
    }

    #[test]
    fn zero_rate_infects_nothing() {
        let (g, adj) = path3();
        let run = run(&g, &adj, 0.0, 2, &[0.1], 4, 100).unwrap();
        assert_eq!(run.state.infected_count(), 0);
        assert_eq!(run.taus[0].tau, None);
        assert_eq!(run.final_fraction(&g), 0.0);
    }

    #[test]
    fn star_center_catches_but_leaves_stay_clear() {
        // K_{1,5}: center 1, leaves 2..=6; two infected leaves reach r = 2
        let edges: Vec<(u32, u32)> = (2..=6).map(|l| (1, l)).collect();
        let g = Multigraph::from_edges(6, &edges, 0).unwrap();
        let adj = snapshot_adjacency(&g);
        let run = run_from_initial(&g, &adj, &[2, 3], 2, &[], 100);
        assert_eq!(run.state.round_of(1), Some(1));
        for leaf in 4..=6 {
            assert!(!run.state.is_infected(leaf));
        }
        assert_eq!(run.state.stabilized_round(), Some(1));
        assert_eq!(run.state.round_sizes(), &[2, 3]);
    }

    #[test]
    fn step_is_idempotent_at_the_fixed_point() {
        let (g, adj) = path3();
        let mut run = run_from_initial(&g, &adj, &[1, 3], 2, &[], 100);
        let sizes = run.state.round_sizes().to_vec();
        assert_eq!(step(&adj, &mut run.state), 0);
        assert_eq!(step(&adj, &mut run.state), 0);
        assert_eq!(run.state.round_sizes(), &sizes[..]);
    }

    #[test]
    fn infection_monotone_in_rate_under_shared_seed() {
        let f = crate::edgestep::EdgeStepFunction::power(0.5).unwrap();
        let trace = crate::generator::generate(
            &f,
            crate::edgestep::StepIndexConvention::Next,
            400,
            21,
            &[400],
            false,
        )
        .unwrap();
        let (_, g) = &trace.snapshots[0];
        let adj = snapshot_adjacency(g);
        let mut prev: Option<Vec<Option<u32>>> = None;
        for a in [0.0, 1.0, 4.0, 16.0, 1e9] {
            let run = run(g, &adj, a, 2, &[], 5, 1_000).unwrap();
            let infected: Vec<Option<u32>> =
                (1..=g.num_vertices() as u32).map(|v| run.state.round_of(v)).collect();
            if let Some(p) = &prev {
                for (lo, hi) in p.iter().zip(&infected) {
                    assert!(lo.is_none() || hi.is_some(), "raising a lost a vertex");
                }
            }
            prev = Some(infected);
        }
    }

    #[test]
    fn record_serializes_with_graph_shape() {
        let (g, adj) = path3();
        let run = run(&g, &adj, 3.0, 2, &[1.0], 7, 100).unwrap();
        let rec = run.to_record(&g);
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains("\"V\":3"));
        assert!(json.contains("\"E\":2"));
        assert!(json.contains("\"format_version\":1"));
        assert!(json.contains("\"1\":0"));
    }
}
