//! Sequential simulation of the graph process.
//!
//! From the one-vertex-one-loop start, the transition out of `G_s` draws
//! Bernoulli(f) (argument `s + 1` or `s` per the configured convention):
//!
//! * vertex-step: a new vertex `v` attaches to a degree-proportional target
//!   `u`, appending the edge `{u, v}`;
//! * edge-step: two independent degree-proportional draws `u1`, `u2` gain
//!   the edge `{u1, u2}` (loops and parallel edges allowed).
//!
//! A trajectory is strictly sequential; independent trajectories get
//! independent seeds. Everything is deterministic given the seed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::edgestep::{EdgeStepFunction, StepIndexConvention};
use crate::error::{Error, Result};
use crate::graph::{Multigraph, VertexId, MEMORY_BUDGET_BYTES};
use crate::seeds::rng_from;
use crate::stats::SampleStats;

/// One transition, as recorded in the optional step log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    Vertex { target: VertexId, new_vertex: VertexId },
    Edge { first: VertexId, second: VertexId },
}

/// A stepping trajectory: the graph plus its RNG and schedule.
pub struct Generator {
    f: EdgeStepFunction,
    convention: StepIndexConvention,
    rng: ChaCha8Rng,
    graph: Multigraph,
}

impl Generator {
    pub fn new(f: EdgeStepFunction, convention: StepIndexConvention, seed: u64) -> Self {
        Self {
            f,
            convention,
            rng: rng_from(seed),
            graph: Multigraph::initial(seed),
        }
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn time(&self) -> u64 {
        self.graph.num_edges()
    }

    /// Advances the graph by one edge and reports what happened.
    pub fn step(&mut self) -> Step {
        let s = self.graph.num_edges();
        let p = self.f.prob(self.convention.index(s));
        let step = if self.rng.random::<f64>() < p {
            let target = self.graph.sample_vertex(&mut self.rng);
            let new_vertex = self.graph.add_vertex(s + 1);
            self.graph.push_edge(target, new_vertex);
            Step::Vertex { target, new_vertex }
        } else {
            let first = self.graph.sample_vertex(&mut self.rng);
            let second = self.graph.sample_vertex(&mut self.rng);
            self.graph.push_edge(first, second);
            Step::Edge { first, second }
        };
        debug_assert_eq!(self.graph.half_edges().len() as u64, 2 * self.graph.num_edges());
        step
    }

    /// Steps until the graph has `t` edges.
    pub fn run_to(&mut self, t: u64) {
        while self.graph.num_edges() < t {
            self.step();
        }
    }
}

/// Output of [`generate`]: requested snapshots plus provenance.
pub struct GenerationTrace {
    /// Deep frozen copies at exactly the requested times, ascending.
    pub snapshots: Vec<(u64, Multigraph)>,
    /// `(t, V_t)` at each snapshot time and at the final time.
    pub vertex_counts: Vec<(u64, u64)>,
    pub seed: u64,
    /// Per-step record, populated only when asked for.
    pub steps: Option<Vec<Step>>,
}

/// Runs one trajectory to `t_final`, snapshotting at `snapshot_times`.
///
/// The memory footprint is predictable from the step count alone, so the
/// budget is enforced before anything is allocated.
pub fn generate(
    f: &EdgeStepFunction,
    convention: StepIndexConvention,
    t_final: u64,
    seed: u64,
    snapshot_times: &[u64],
    record_steps: bool,
) -> Result<GenerationTrace> {
    if t_final < 1 {
        return Err(Error::InvalidParameter {
            name: "t_final",
            reason: "the horizon must be at least 1".into(),
        });
    }
    for &ts in snapshot_times {
        if ts < 1 || ts > t_final {
            return Err(Error::InvalidParameter {
                name: "snapshot_times",
                reason: format!("snapshot time {ts} outside 1..={t_final}"),
            });
        }
    }
    let mut times: Vec<u64> = snapshot_times.to_vec();
    times.sort_unstable();
    times.dedup();

    // 2t half-edge slots (u32) + worst-case per-vertex arrays (u64 degree +
    // u64 birth), plus each snapshot copy, plus the optional step log.
    let per_step = 8 + 16;
    let mut required = t_final.saturating_mul(per_step);
    for &ts in &times {
        required = required.saturating_add(ts.saturating_mul(per_step));
    }
    if record_steps {
        required = required.saturating_add(t_final.saturating_mul(16));
    }
    if required > MEMORY_BUDGET_BYTES {
        return Err(Error::MemoryBudget {
            steps: t_final,
            required_bytes: required,
            budget_bytes: MEMORY_BUDGET_BYTES,
        });
    }

    let mut gen = Generator::new(f.clone(), convention, seed);
    let mut snapshots = Vec::with_capacity(times.len());
    let mut vertex_counts = Vec::with_capacity(times.len() + 1);
    let mut steps = record_steps.then(|| Vec::with_capacity((t_final - 1) as usize));

    let mut pending = times.iter().copied().peekable();
    loop {
        let t = gen.time();
        if pending.peek() == Some(&t) {
            pending.next();
            snapshots.push((t, gen.graph().clone()));
            vertex_counts.push((t, gen.graph().num_vertices()));
        }
        if t == t_final {
            break;
        }
        let step = gen.step();
        if let Some(log) = steps.as_mut() {
            log.push(step);
        }
    }
    if vertex_counts.last().map(|&(t, _)| t) != Some(t_final) {
        vertex_counts.push((t_final, gen.graph().num_vertices()));
    }

    Ok(GenerationTrace {
        snapshots,
        vertex_counts,
        seed,
        steps,
    })
}

/// Empirical one-step degree increment of vertex `i` from a frozen state.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IncrementEstimate {
    pub vertex: VertexId,
    pub degree: u64,
    /// The closed-form conditional mean `(1/s - f/(2s)) * d_s(i)` with `f`
    /// taken at the configured step index.
    pub theoretical_mean: f64,
    pub stats: SampleStats,
}

/// Resamples only the transition `s -> s + 1` from the frozen graph,
/// `replicas` times, and summarizes the degree increment of `i`.
pub fn one_step_increment_distribution(
    g: &Multigraph,
    i: VertexId,
    f: &EdgeStepFunction,
    convention: StepIndexConvention,
    replicas: u64,
    seed: u64,
) -> Result<IncrementEstimate> {
    if i < 1 || i as u64 > g.num_vertices() {
        return Err(Error::VertexNotBorn {
            vertex: i,
            t: g.num_edges(),
        });
    }
    if replicas < 1 {
        return Err(Error::InvalidParameter {
            name: "replicas",
            reason: "at least one replica is required".into(),
        });
    }
    let s = g.num_edges();
    let p = f.eval(convention.index(s))?;
    let degree = g.degree(i);
    let theoretical_mean = (1.0 / s as f64 - p / (2.0 * s as f64)) * degree as f64;

    let mut rng = rng_from(seed);
    // increments are 0, 1, or 2; exact counts give exact sample moments
    let mut ones = 0u64;
    let mut twos = 0u64;
    for _ in 0..replicas {
        let delta = if rng.random::<f64>() < p {
            u64::from(g.sample_vertex(&mut rng) == i)
        } else {
            u64::from(g.sample_vertex(&mut rng) == i)
                + u64::from(g.sample_vertex(&mut rng) == i)
        };
        match delta {
            1 => ones += 1,
            2 => twos += 1,
            _ => {}
        }
    }
    let n = replicas as f64;
    let mean = (ones as f64 + 2.0 * twos as f64) / n;
    let ss = ones as f64 * (1.0 - mean) * (1.0 - mean)
        + twos as f64 * (2.0 - mean) * (2.0 - mean)
        + (replicas - ones - twos) as f64 * mean * mean;
    let zero_variance = ss == 0.0;
    let stderr = if replicas == 1 {
        0.0
    } else {
        (ss / (n - 1.0) / n).sqrt()
    };
    Ok(IncrementEstimate {
        vertex: i,
        degree,
        theoretical_mean,
        stats: SampleStats {
            n: replicas,
            mean,
            stderr,
            zero_variance: zero_variance || replicas == 1,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f_const(p: f64) -> EdgeStepFunction {
        EdgeStepFunction::constant(p).unwrap()
    }

    #[test]
    fn all_vertex_steps_build_a_tree_on_a_loop() {
        let trace = generate(&f_const(1.0), StepIndexConvention::Next, 4, 7, &[4], true).unwrap();
        let (_, g) = &trace.snapshots[0];
        assert_eq!(g.num_vertices(), 4);
        assert_eq!(g.num_edges(), 4);
        assert_eq!(g.degrees().iter().sum::<u64>(), 8);
        assert_eq!(g.birth_times(), &[1, 2, 3, 4]);
        let steps = trace.steps.unwrap();
        assert_eq!(steps.len(), 3);
        assert!(steps.iter().all(|s| matches!(s, Step::Vertex { .. })));
    }

    #[test]
    fn all_edge_steps_pile_loops_on_the_root() {
        let trace = generate(&f_const(0.0), StepIndexConvention::Next, 10, 3, &[10], false).unwrap();
        let (_, g) = &trace.snapshots[0];
        assert_eq!(g.num_vertices(), 1);
        assert_eq!(g.degree(1), 20);
        assert!(g.half_edges().iter().all(|&h| h == 1));
        assert_eq!(g.half_edges().len(), 20);
    }

    #[test]
    fn fixed_seed_reproduces_the_half_edge_array() {
        let f = EdgeStepFunction::power(0.5).unwrap();
        let a = generate(&f, StepIndexConvention::Next, 1_000, 42, &[1_000], false).unwrap();
        let b = generate(&f, StepIndexConvention::Next, 1_000, 42, &[1_000], false).unwrap();
        assert_eq!(a.snapshots[0].1.half_edges(), b.snapshots[0].1.half_edges());
        let c = generate(&f, StepIndexConvention::Next, 1_000, 43, &[1_000], false).unwrap();
        assert_ne!(a.snapshots[0].1.half_edges(), c.snapshots[0].1.half_edges());
    }

    #[test]
    fn snapshots_land_on_the_requested_times() {
        let f = EdgeStepFunction::power(0.5).unwrap();
        let trace = generate(&f, StepIndexConvention::Next, 50, 1, &[1, 17, 50], false).unwrap();
        let times: Vec<u64> = trace.snapshots.iter().map(|&(t, _)| t).collect();
        assert_eq!(times, vec![1, 17, 50]);
        for (t, g) in &trace.snapshots {
            assert_eq!(g.num_edges(), *t);
            assert_eq!(g.half_edges().len() as u64, 2 * t);
        }
    }

    #[test]
    fn oversized_runs_fail_before_allocating() {
        let f = f_const(0.5);
        match generate(&f, StepIndexConvention::Next, u64::MAX / 4, 0, &[], false) {
            Err(Error::MemoryBudget { .. }) => {}
            other => panic!("expected budget error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn snapshot_times_must_lie_in_range() {
        let f = f_const(0.5);
        assert!(generate(&f, StepIndexConvention::Next, 10, 0, &[11], false).is_err());
        assert!(generate(&f, StepIndexConvention::Next, 10, 0, &[0], false).is_err());
    }

    #[test]
    fn one_step_increment_is_exactly_two_for_the_lonely_vertex() {
        // f = 0: every step is an edge-step, both endpoints the only vertex
        let trace = generate(&f_const(0.0), StepIndexConvention::Next, 5, 0, &[5], false).unwrap();
        let (_, g) = &trace.snapshots[0];
        let est =
            one_step_increment_distribution(g, 1, &f_const(0.0), StepIndexConvention::Next, 1_000, 9)
                .unwrap();
        assert_eq!(est.stats.mean, 2.0);
        assert!(est.stats.zero_variance);
        assert_eq!(est.theoretical_mean, 2.0);
    }

    #[test]
    fn one_step_increment_matches_the_recurrence_for_all_ones() {
        let f = f_const(1.0);
        let trace = generate(&f, StepIndexConvention::Next, 50, 11, &[50], false).unwrap();
        let (_, g) = &trace.snapshots[0];
        let est = one_step_increment_distribution(g, 1, &f, StepIndexConvention::Next, 200_000, 5)
            .unwrap();
        // d/(2s) is the exact mean when f = 1
        let d = g.degree(1) as f64;
        let expected = d / (2.0 * 50.0);
        assert!((est.theoretical_mean - expected).abs() < 1e-15);
        let dev = (est.stats.mean - expected).abs() / est.stats.stderr;
        assert!(dev <= 4.0, "deviation {dev} se");
    }

    #[test]
    fn unborn_vertices_are_rejected() {
        let trace = generate(&f_const(0.0), StepIndexConvention::Next, 3, 0, &[3], false).unwrap();
        let (_, g) = &trace.snapshots[0];
        assert!(matches!(
            one_step_increment_distribution(g, 2, &f_const(0.0), StepIndexConvention::Next, 10, 0),
            Err(Error::VertexNotBorn { vertex: 2, .. })
        ));
    }
}
