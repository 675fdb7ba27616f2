//! Structural witnesses behind the fast-outbreak mechanism.
//!
//! On a trajectory snapshotted at a base time `t0` and at `(r+1) t0`,
//! `(r+1)^2 t0` and `2 (r+1)^2 t0`, the graph is expected (for summable,
//! regularly varying schedules) to carry a nested structure:
//!
//! * a star `v*`: the maximum-degree vertex at the base time;
//! * a hub set `H`: vertices of degree at least `g(t0) = (1 - gamma)/f(t0)`
//!   at the base time, each later joined to the star by at least `r` edges
//!   and jointly carrying total degree at least `t0 / 8`;
//! * a susceptible set `S`: vertices outside `H` sending at least `r` edges
//!   into `H`.
//!
//! Any infection that reaches `r` distinct neighbors of the star at round 0
//! then cascades: star in round 1, `H` in round 2, `S` in round 3. The
//! verdicts here are desk-scale measurements of those properties; the
//! degree thresholds involve the envelope constants `c1, c2` of `phi` and
//! the functions
//!
//! ```text
//! g(x) = (1 - gamma) / f(x)
//! h(x) = c1 / (6 (r+1)^2 c2) * g(x) / log(x)
//! ```
//!
//! The size constants for `S` and for the star's distinct-neighbor count
//! are existential, so those verdicts use a configurable floor (default:
//! non-empty) and the achieved ratios are always reported.

use serde::Serialize;

use crate::edgestep::{EdgeStepFunction, RateSequence};
use crate::error::{Error, Result};
use crate::graph::{Adjacency, Multigraph, VertexId};
use crate::normalizer::GrowthBounds;

/// Thresholds for the witness search, anchored at a base time.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdPlan {
    /// Base time `t0` of the pipeline.
    pub base_time: u64,
    pub r: u32,
    pub gamma: f64,
    /// `a_{t0}`: the rate sequence evaluated at the base time.
    pub rate_at_base: f64,
    /// Envelope constants of `phi` over the analysis horizon.
    pub c1: f64,
    pub c2: f64,
    /// `g(t0)`.
    pub g_base: f64,
    /// `h(t0)`.
    pub h_base: f64,
    /// `h(a_{t0})`: the scale entering the star degree threshold.
    pub h_at_rate: f64,
    /// `c1 t0 / (c2 h(a_{t0}))`: degree a star must reach.
    pub star_degree_threshold: f64,
    /// Size floor for the susceptible set (existential constant; 0 means
    /// "non-empty").
    pub zeta_floor: f64,
    /// Floor for the star's distinct-neighbor count as a multiple of
    /// `f(t0) t0 / h(a_{t0})` (existential constant; 0 means "at least 1").
    pub kappa_floor: f64,
    #[serde(skip)]
    f: EdgeStepFunction,
}

impl ThresholdPlan {
    pub fn new(
        f: &EdgeStepFunction,
        bounds: GrowthBounds,
        base_time: u64,
        r: u32,
        rate: &RateSequence,
    ) -> Result<Self> {
        if base_time < 2 {
            return Err(Error::InvalidParameter {
                name: "base_time",
                reason: format!("base time must be at least 2, got {base_time}"),
            });
        }
        if r < 2 {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: format!("threshold must be at least 2, got {r}"),
            });
        }
        let gamma = f.gamma();
        if !(gamma < 1.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: "the witness thresholds need gamma < 1".into(),
            });
        }
        // thresholds use a_t <= t (the condition-L ceiling); larger or
        // infinite rates are clamped so h stays evaluable
        let rate_at_base = rate.eval(base_time).min(base_time as f64);
        let mut plan = Self {
            base_time,
            r,
            gamma,
            rate_at_base,
            c1: bounds.c1,
            c2: bounds.c2,
            g_base: 0.0,
            h_base: 0.0,
            h_at_rate: 0.0,
            star_degree_threshold: 0.0,
            zeta_floor: 0.0,
            kappa_floor: 0.0,
            f: f.clone(),
        };
        plan.g_base = plan.g(base_time as f64)?;
        plan.h_base = plan.h(base_time as f64)?;
        plan.h_at_rate = plan.h(rate_at_base)?;
        plan.star_degree_threshold =
            plan.c1 * base_time as f64 / (plan.c2 * plan.h_at_rate);
        Ok(plan)
    }

    /// `g(x) = (1 - gamma) / f(x)`; the argument is clamped to the domain
    /// floor so early rate values below 1 stay evaluable.
    pub fn g(&self, x: f64) -> Result<f64> {
        let v = self.f.value_at(x.max(1.0))?;
        if v == 0.0 {
            return Err(Error::InvalidParameter {
                name: "f",
                reason: format!("g is undefined where f vanishes (x = {x})"),
            });
        }
        Ok((1.0 - self.gamma) / v)
    }

    /// `h(x) = c1 g(x) / (6 (r+1)^2 c2 log x)`.
    pub fn h(&self, x: f64) -> Result<f64> {
        let x = x.max(1.0 + f64::EPSILON);
        let rp = (self.r as f64 + 1.0) * (self.r as f64 + 1.0);
        Ok(self.c1 / (6.0 * rp * self.c2) * self.g(x)? / x.ln())
    }

    /// `15 f(u) u / (8 (1 - gamma))`: the vertex-count ceiling at time `u`.
    pub fn vertex_count_limit(&self, u: u64) -> Result<f64> {
        let v = self.f.value_at(u as f64)?;
        Ok(15.0 * v * u as f64 / (8.0 * (1.0 - self.gamma)))
    }

    /// Susceptible-set size floor: `max(1, ceil(zeta f(t0) t0))`.
    pub fn set_size_threshold(&self) -> Result<u64> {
        let ft = self.f.value_at(self.base_time as f64)?;
        Ok(((self.zeta_floor * ft * self.base_time as f64).ceil() as u64).max(1))
    }

    /// Star distinct-neighbor floor: `max(1, ceil(kappa f(t0) t0 / h(a_t0)))`.
    pub fn neighbor_count_threshold(&self) -> Result<u64> {
        let ft = self.f.value_at(self.base_time as f64)?;
        let raw = self.kappa_floor * ft * self.base_time as f64 / self.h_at_rate;
        Ok((raw.ceil() as u64).max(1))
    }

    /// `f(t0) t0`, the density scale the measured ratios are taken against.
    pub fn density_scale(&self) -> Result<f64> {
        Ok(self.f.value_at(self.base_time as f64)? * self.base_time as f64)
    }
}

/// The maximum-degree vertex and its star property.
#[derive(Debug, Clone, Serialize)]
pub struct StarReport {
    pub vertex: VertexId,
    pub degree: u64,
    pub distinct_neighbors: u64,
    /// Degree threshold `c1 t0 / (c2 h(a_t0))` used for the verdict.
    pub degree_threshold: f64,
    /// Vertex-count ceiling at the inspected time.
    pub vertex_count_limit: f64,
    pub vertex_count: u64,
    /// Degree and count conditions both met.
    pub meets_p1: bool,
}

/// Locates the maximum-degree vertex (ties to the smallest id) and checks
/// the star property at the graph's own time.
pub fn find_star(g: &Multigraph, adj: &Adjacency, plan: &ThresholdPlan) -> Result<StarReport> {
    let mut best: VertexId = 1;
    let mut best_degree = 0u64;
    for (idx, &d) in g.degrees().iter().enumerate() {
        if d > best_degree {
            best_degree = d;
            best = (idx + 1) as VertexId;
        }
    }
    let vertex_count_limit = plan.vertex_count_limit(g.num_edges())?;
    let vertex_count = g.num_vertices();
    Ok(StarReport {
        vertex: best,
        degree: best_degree,
        distinct_neighbors: adj.distinct_neighbors(best),
        degree_threshold: plan.star_degree_threshold,
        vertex_count_limit,
        vertex_count,
        meets_p1: best_degree as f64 >= plan.star_degree_threshold
            && (vertex_count as f64) <= vertex_count_limit,
    })
}

/// The hub set at a later time of the same trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct HubReport {
    /// Vertices whose degree reached `g(t0)` in the early snapshot.
    pub members: Vec<VertexId>,
    /// The star those members must connect to.
    pub star: VertexId,
    /// Total degree of the members in the late graph.
    pub total_degree: u64,
    /// Smallest member-to-star multiplicity in the late graph.
    pub min_edges_to_star: u64,
    /// `total_degree >= t0 / 8`.
    pub degree_ok: bool,
    /// Every member joined to the star by at least `r` edges.
    pub edges_ok: bool,
    pub verdict: bool,
}

/// Finds `H` in the early snapshot and validates it against the late graph.
/// Both snapshots must come from one trajectory.
pub fn find_hub_set(
    early: &Multigraph,
    late: &Multigraph,
    late_adj: &Adjacency,
    plan: &ThresholdPlan,
) -> Result<HubReport> {
    check_same_trajectory(early, late)?;
    let early_adj = Adjacency::from_graph(early);
    let star = find_star(early, &early_adj, plan)?.vertex;
    hub_against(early, late, late_adj, star, plan)
}

/// Hub validation with the star already fixed (saves re-deriving it when
/// the caller evaluates several late graphs).
pub(crate) fn hub_against(
    early: &Multigraph,
    late: &Multigraph,
    late_adj: &Adjacency,
    star: VertexId,
    plan: &ThresholdPlan,
) -> Result<HubReport> {
    check_same_trajectory(early, late)?;
    let members: Vec<VertexId> = early
        .degrees()
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d as f64 >= plan.g_base)
        .map(|(idx, _)| (idx + 1) as VertexId)
        .collect();
    let total_degree: u64 = members.iter().map(|&v| late.degree(v)).sum();
    let min_edges_to_star = members
        .iter()
        .map(|&v| late_adj.multiplicity(v, star))
        .min()
        .unwrap_or(0);
    let degree_ok = total_degree as f64 >= plan.base_time as f64 / 8.0;
    let edges_ok = !members.is_empty() && min_edges_to_star >= plan.r as u64;
    Ok(HubReport {
        members,
        star,
        total_degree,
        min_edges_to_star,
        degree_ok,
        edges_ok,
        verdict: degree_ok && edges_ok,
    })
}

fn check_same_trajectory(early: &Multigraph, late: &Multigraph) -> Result<()> {
    if early.seed() != late.seed() {
        return Err(Error::TrajectoryMismatch {
            reason: format!("seed {} vs {}", early.seed(), late.seed()),
        });
    }
    if early.num_edges() > late.num_edges() {
        return Err(Error::TrajectoryMismatch {
            reason: format!(
                "early snapshot at t = {} is later than {}",
                early.num_edges(),
                late.num_edges()
            ),
        });
    }
    let shared = early.num_vertices() as usize;
    if late.num_vertices() < shared as u64
        || early.birth_times()[..shared] != late.birth_times()[..shared]
    {
        return Err(Error::TrajectoryMismatch {
            reason: "birth times disagree on the shared prefix".into(),
        });
    }
    Ok(())
}

/// All vertices outside the hub sending at least `r` edges (multiplicity
/// summed across hub members) into it.
pub fn find_susceptible_set(adj: &Adjacency, hub: &[VertexId], r: u32) -> Result<Vec<VertexId>> {
    if hub.is_empty() {
        return Err(Error::InvalidParameter {
            name: "hub",
            reason: "the hub set must be non-empty".into(),
        });
    }
    let n = adj.num_vertices() as usize;
    let mut in_hub = vec![false; n];
    for &v in hub {
        in_hub[v as usize - 1] = true;
    }
    let mut count = vec![0u64; n];
    for &u in hub {
        for &(w, mult) in adj.neighbors(u) {
            if !in_hub[w as usize - 1] {
                count[w as usize - 1] += mult;
            }
        }
    }
    Ok(count
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c >= r as u64)
        .map(|(idx, _)| (idx + 1) as VertexId)
        .collect())
}

/// Pointwise check of the technical rate-sequence conditions along a grid:
///
/// ```text
/// (i)   t f(t) f(a_t) log(a_t) increasing
/// (ii)  a_t <= t
/// (iii) f(a_t) log(a_t) >= f(t) log(t)
/// ```
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConditionLSample {
    pub t: u64,
    pub a_t: f64,
    /// `t f(t) f(a_t) log(a_t)`.
    pub growth_value: f64,
    /// Strictly larger than the previous grid point (first point vacuously
    /// true).
    pub holds_i: bool,
    pub holds_ii: bool,
    pub holds_iii: bool,
}

pub fn validate_condition_l(
    f: &EdgeStepFunction,
    rate: &RateSequence,
    t_grid: &[u64],
) -> Result<Vec<ConditionLSample>> {
    let mut out = Vec::with_capacity(t_grid.len());
    let mut prev: Option<f64> = None;
    for &t in t_grid {
        let a_t = rate.eval(t);
        let f_t = f.value_at(t as f64)?;
        let f_at = f.value_at(a_t.max(1.0))?;
        let log_at = a_t.max(1.0).ln();
        let growth_value = t as f64 * f_t * f_at * log_at;
        let holds_i = prev.map_or(true, |p| growth_value > p);
        prev = Some(growth_value);
        out.push(ConditionLSample {
            t,
            a_t,
            growth_value,
            holds_i,
            holds_ii: a_t <= t as f64,
            holds_iii: f_at * log_at >= f_t * (t as f64).ln(),
        });
    }
    Ok(out)
}

/// Full witness record for one trajectory, evaluated at the native time of
/// each property. The last stage is the final graph, so its measurements
/// double as the final-graph evaluation of every property.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub plan_echo: PlanEcho,
    pub stages: Vec<StageReport>,
    /// Hub members (from the base snapshot) re-used by the cascade check.
    pub hub_members: Vec<VertexId>,
    /// Susceptible set measured on the final graph.
    pub susceptible: Vec<VertexId>,
    pub verdicts: Verdicts,
    pub measured: MeasuredRatios,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanEcho {
    pub base_time: u64,
    pub r: u32,
    pub gamma: f64,
    pub rate_at_base: f64,
    pub c1: f64,
    pub c2: f64,
    pub g_threshold: f64,
    pub star_degree_threshold: f64,
    pub hub_degree_threshold: f64,
    pub set_size_threshold: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    pub time: u64,
    pub vertex_count: u64,
    pub vertex_count_limit: f64,
    pub star_vertex: VertexId,
    pub star_degree: u64,
    pub star_distinct_neighbors: u64,
    pub hub_total_degree: u64,
    pub hub_min_edges_to_star: u64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Verdicts {
    pub p1: bool,
    pub p2: bool,
    pub p3: bool,
    pub p4: bool,
}

impl Verdicts {
    pub fn all(&self) -> bool {
        self.p1 && self.p2 && self.p3 && self.p4
    }
}

impl Certificate {
    /// JSON view with the witness id lists capped at `max_ids` entries;
    /// full sizes and a truncation flag are kept alongside.
    pub fn to_truncated_value(&self, max_ids: usize) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("certificate serializes");
        let obj = v.as_object_mut().expect("certificate is an object");
        for key in ["hub_members", "susceptible"] {
            let ids = obj
                .get(key)
                .and_then(|x| x.as_array())
                .cloned()
                .unwrap_or_default();
            let total = ids.len();
            obj.insert(format!("{key}_size"), total.into());
            obj.insert(format!("{key}_truncated"), (total > max_ids).into());
            let kept: Vec<_> = ids.into_iter().take(max_ids).collect();
            obj.insert(key.to_string(), kept.into());
        }
        v
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeasuredRatios {
    /// `|S| / (f(t0) t0)` on the final graph.
    pub susceptible_density: f64,
    /// `Gamma(v*) h(a_t0) / (f(t0) t0)` on the final graph.
    pub star_neighbor_density: f64,
    /// `|S| / |V|` on the final graph.
    pub susceptible_fraction: f64,
}

/// Evaluates the four properties over the nested snapshots of one
/// trajectory: `base`, `(r+1) t0`, `(r+1)^2 t0` and the final graph.
pub fn evaluate_certificate(
    base: &Multigraph,
    mid: &Multigraph,
    late: &Multigraph,
    last: &Multigraph,
    last_adj: &Adjacency,
    plan: &ThresholdPlan,
) -> Result<Certificate> {
    let base_adj = Adjacency::from_graph(base);
    let star_report = find_star(base, &base_adj, plan)?;
    let star = star_report.vertex;

    let mid_adj = Adjacency::from_graph(mid);
    let late_adj = Adjacency::from_graph(late);

    let hub_mid = hub_against(base, mid, &mid_adj, star, plan)?;
    let hub_late = hub_against(base, late, &late_adj, star, plan)?;
    let hub_last = hub_against(base, last, last_adj, star, plan)?;

    let set_size_threshold = plan.set_size_threshold()?;
    let susceptible_late = if hub_late.members.is_empty() {
        Vec::new()
    } else {
        find_susceptible_set(&late_adj, &hub_late.members, plan.r)?
    };
    let susceptible = if hub_last.members.is_empty() {
        Vec::new()
    } else {
        find_susceptible_set(last_adj, &hub_last.members, plan.r)?
    };

    let stage = |g: &Multigraph, adj: &Adjacency, hub: &HubReport| -> Result<StageReport> {
        Ok(StageReport {
            time: g.num_edges(),
            vertex_count: g.num_vertices(),
            vertex_count_limit: plan.vertex_count_limit(g.num_edges())?,
            star_vertex: star,
            star_degree: g.degree(star),
            star_distinct_neighbors: adj.distinct_neighbors(star),
            hub_total_degree: hub.total_degree,
            hub_min_edges_to_star: hub.min_edges_to_star,
        })
    };
    let hub_base = hub_against(base, base, &base_adj, star, plan)?;
    let stages = vec![
        stage(base, &base_adj, &hub_base)?,
        stage(mid, &mid_adj, &hub_mid)?,
        stage(late, &late_adj, &hub_late)?,
        stage(last, last_adj, &hub_last)?,
    ];

    let within = |st: &StageReport| (st.vertex_count as f64) <= st.vertex_count_limit;
    let star_ok = |st: &StageReport| st.star_degree as f64 >= plan.star_degree_threshold;

    let neighbor_threshold = plan.neighbor_count_threshold()?;
    let p1 = within(&stages[0]) && star_ok(&stages[0]);
    let p2 = within(&stages[1]) && star_ok(&stages[1]) && hub_mid.verdict;
    let p3 = within(&stages[2])
        && star_ok(&stages[2])
        && hub_late.verdict
        && susceptible_late.len() as u64 >= set_size_threshold;
    let p4 = within(&stages[3])
        && star_ok(&stages[3])
        && stages[3].star_distinct_neighbors >= neighbor_threshold
        && hub_last.total_degree as f64 >= plan.base_time as f64 / 16.0
        && hub_last.edges_ok
        && susceptible.len() as u64 >= set_size_threshold;

    let density = plan.density_scale()?;
    let measured = MeasuredRatios {
        susceptible_density: susceptible.len() as f64 / density,
        star_neighbor_density: stages[3].star_distinct_neighbors as f64 * plan.h_at_rate / density,
        susceptible_fraction: susceptible.len() as f64 / last.num_vertices() as f64,
    };

    Ok(Certificate {
        plan_echo: PlanEcho {
            base_time: plan.base_time,
            r: plan.r,
            gamma: plan.gamma,
            rate_at_base: plan.rate_at_base,
            c1: plan.c1,
            c2: plan.c2,
            g_threshold: plan.g_base,
            star_degree_threshold: plan.star_degree_threshold,
            hub_degree_threshold: plan.base_time as f64 / 8.0,
            set_size_threshold,
        },
        stages,
        hub_members: hub_last.members,
        susceptible,
        verdicts: Verdicts { p1, p2, p3, p4 },
        measured,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edgestep::StepIndexConvention;
    use crate::generator::generate;
    use crate::graph::snapshot_adjacency;
    use crate::normalizer::NormalizerTable;

    fn plan_for(f: &EdgeStepFunction, base: u64, r: u32) -> ThresholdPlan {
        let table = NormalizerTable::build(f, base * 4).unwrap();
        ThresholdPlan::new(f, table.growth_bounds(), base, r, &RateSequence::Log).unwrap()
    }

    #[test]
    fn star_of_a_star_graph_is_its_center() {
        let edges: Vec<(u32, u32)> = (2..=6).map(|l| (1, l)).collect();
        let g = Multigraph::from_edges(6, &edges, 0).unwrap();
        let adj = snapshot_adjacency(&g);
        let f = EdgeStepFunction::power(0.5).unwrap();
        let star = find_star(&g, &adj, &plan_for(&f, 5, 2)).unwrap();
        assert_eq!(star.vertex, 1);
        assert_eq!(star.degree, 5);
        assert_eq!(star.distinct_neighbors, 5);
    }

    #[test]
    fn loop_vertex_is_its_own_single_neighbor() {
        let g = Multigraph::from_edges(1, &[(1, 1); 10], 0).unwrap();
        let adj = snapshot_adjacency(&g);
        let f = EdgeStepFunction::power(0.5).unwrap();
        let star = find_star(&g, &adj, &plan_for(&f, 10, 2)).unwrap();
        assert_eq!(star.vertex, 1);
        assert_eq!(star.degree, 20);
        assert_eq!(star.distinct_neighbors, 1);
    }

    #[test]
    fn degree_ties_break_to_the_smaller_id() {
        // vertices 3 and 7 both reach degree 4
        let edges = vec![(3, 1), (3, 2), (3, 4), (3, 5), (7, 1), (7, 2), (7, 4), (7, 5)];
        let g = Multigraph::from_edges(7, &edges, 0).unwrap();
        let adj = snapshot_adjacency(&g);
        let f = EdgeStepFunction::power(0.5).unwrap();
        let star = find_star(&g, &adj, &plan_for(&f, 8, 2)).unwrap();
        assert_eq!(g.degree(3), 4);
        assert_eq!(g.degree(7), 4);
        assert_eq!(star.vertex, 3);
    }

    #[test]
    fn hub_filter_is_the_degree_threshold() {
        // degrees: 1 -> 6, 2 -> 4, 3 -> 4, 4 -> 2, 5 -> 1, 6 -> 1
        let edges = vec![(1, 2), (1, 2), (1, 3), (1, 3), (1, 4), (1, 4), (2, 3), (2, 3), (5, 6)];
        let g = Multigraph::from_edges(6, &edges, 0).unwrap();
        let adj = snapshot_adjacency(&g);
        let f = EdgeStepFunction::power(0.5).unwrap();
        let mut plan = plan_for(&f, 9, 2);
        plan.g_base = 4.0;
        let hub = find_hub_set(&g, &g, &adj, &plan).unwrap();
        assert_eq!(hub.members, vec![1, 2, 3]);
        assert_eq!(hub.star, 1);
        assert_eq!(hub.total_degree, 14);
    }

    #[test]
    fn degenerate_lone_vertex_is_its_own_hub() {
        // a vanishing f makes g = (1 - gamma)/f undefined, so the plan
        // refuses it; the nearly-degenerate constant keeps the lone vertex
        // as the whole hub with degree 2t >= g(t)
        let zero = EdgeStepFunction::constant(0.0).unwrap();
        let table = NormalizerTable::build(&zero, 64).unwrap();
        assert!(ThresholdPlan::new(
            &zero,
            table.growth_bounds(),
            64,
            2,
            &RateSequence::Constant { c: 8.0 },
        )
        .is_err());

        let f = EdgeStepFunction::constant(0.01).unwrap();
        let trace = generate(&zero, StepIndexConvention::Next, 64, 5, &[64], false).unwrap();
        let (_, g) = &trace.snapshots[0];
        let adj = snapshot_adjacency(g);
        let table = NormalizerTable::build(&f, 64).unwrap();
        let plan = ThresholdPlan::new(
            &f,
            table.growth_bounds(),
            64,
            2,
            &RateSequence::Constant { c: 8.0 },
        )
        .unwrap();
        assert_eq!(plan.g_base, 100.0);
        let hub = find_hub_set(g, g, &adj, &plan).unwrap();
        assert_eq!(hub.members, vec![1]);
        assert_eq!(hub.total_degree, 128);
        assert!(hub.degree_ok, "2t beats t/8");
    }

    #[test]
    fn hub_rejects_snapshots_from_different_trajectories() {
        let f = EdgeStepFunction::power(0.5).unwrap();
        let a = generate(&f, StepIndexConvention::Next, 50, 1, &[50], false).unwrap();
        let b = generate(&f, StepIndexConvention::Next, 100, 2, &[100], false).unwrap();
        let (_, ga) = &a.snapshots[0];
        let (_, gb) = &b.snapshots[0];
        let adj = snapshot_adjacency(gb);
        let plan = plan_for(&f, 50, 2);
        assert!(matches!(
            find_hub_set(ga, gb, &adj, &plan),
            Err(Error::TrajectoryMismatch { .. })
        ));
    }

    #[test]
    fn susceptible_multiplicity_sums_across_the_hub() {
        // v4 has a triple edge to hub vertex 1; v5 has one edge to each of
        // 1 and 2; v6 reaches nothing
        let edges = vec![(1, 4), (1, 4), (1, 4), (1, 5), (2, 5), (2, 6)];
        let g = Multigraph::from_edges(6, &edges, 0).unwrap();
        let adj = snapshot_adjacency(&g);
        let s = find_susceptible_set(&adj, &[1, 2], 2).unwrap();
        assert_eq!(s, vec![4, 5]);
        let none = find_susceptible_set(&adj, &[3], 2).unwrap();
        assert!(none.is_empty());
        assert!(find_susceptible_set(&adj, &[], 2).is_err());
    }

    #[test]
    fn hub_membership_grows_as_the_threshold_drops() {
        let f = EdgeStepFunction::power(0.5).unwrap();
        let trace = generate(&f, StepIndexConvention::Next, 500, 3, &[500], false).unwrap();
        let (_, g) = &trace.snapshots[0];
        let adj = snapshot_adjacency(g);
        let mut plan = plan_for(&f, 500, 2);
        let mut prev: Option<Vec<VertexId>> = None;
        for thr in [16.0, 8.0, 4.0, 2.0, 1.0] {
            plan.g_base = thr;
            let hub = hub_against(g, g, &adj, 1, &plan).unwrap();
            if let Some(p) = &prev {
                for v in p {
                    assert!(hub.members.contains(v), "threshold drop removed {v}");
                }
            }
            prev = Some(hub.members);
        }
    }

    #[test]
    fn identity_rate_meets_l_with_equality_and_square_fails_ii() {
        let f = EdgeStepFunction::power(0.5).unwrap();
        let grid = [10, 100, 1000];
        let identity = validate_condition_l(&f, &RateSequence::Power { alpha: 1.0 }, &grid).unwrap();
        for s in &identity {
            assert!(s.holds_ii, "a_t = t is within a_t <= t");
            assert!(s.holds_iii, "equality case must pass");
        }
        let square = validate_condition_l(&f, &RateSequence::Power { alpha: 2.0 }, &grid).unwrap();
        for s in &square {
            assert!(!s.holds_ii);
        }
    }

    #[test]
    fn log_rate_growth_value_increases_for_power_half() {
        let f = EdgeStepFunction::power(0.5).unwrap();
        let grid = [1_000, 10_000, 100_000, 1_000_000];
        let samples = validate_condition_l(&f, &RateSequence::Log, &grid).unwrap();
        for s in &samples {
            assert!(s.holds_i, "growth value dipped at t = {}", s.t);
        }
    }
}
