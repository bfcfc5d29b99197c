//! Backtracking search for ordinary m-ovoids.
//!
//! The search assigns in/out status to polar points in a fixed order and
//! keeps per-generator (in, undecided) counters. A branch dies as soon as a
//! generator holds more than m chosen points or can no longer reach m.
//! Forced assignments propagate: a generator at m expels its undecided
//! points, a generator that needs all of them pulls them in. Exhaustion
//! without a budget cut is a nonexistence certificate.

use crate::bounds::best_bound;
use crate::exact::half_power;
use crate::ovoid::{validate_m_ovoid, WeightFunction};
use crate::polar::PolarSpace;
use crate::projgeom::PointIndex;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::sync::Arc;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("target size {target} exceeds the {available} polar points")]
    InfeasibleTarget { target: String, available: usize },
    #[error("target size m(q^{{r+e-1}}+1) does not fit in 64 bits")]
    TargetOverflow,
    #[error(
        "solution found at m={m} below the proven bound {bound} ({theorem}) on {space}; \
         solution: {solution:?}"
    )]
    ConsistencyViolation {
        space: String,
        m: u64,
        bound: String,
        theorem: String,
        solution: Vec<PointIndex>,
    },
    #[error(transparent)]
    Bounds(#[from] crate::bounds::BoundsError),
    #[error(transparent)]
    Ovoid(#[from] crate::ovoid::OvoidError),
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub max_solutions: usize,
    pub symmetry: bool,
    pub node_budget: u64,
    /// 0 keeps the in-first branch order; any other value permutes the
    /// per-depth branch order deterministically.
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> SearchOptions {
        SearchOptions {
            max_solutions: 1,
            symmetry: true,
            node_budget: 1_000_000_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SearchStatus {
    #[serde(rename = "SOLUTIONS_FOUND")]
    SolutionsFound,
    #[serde(rename = "EXHAUSTED_NONE")]
    ExhaustedNone,
    #[serde(rename = "BUDGET_EXCEEDED")]
    BudgetExceeded,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub m: u64,
    /// Point-index sets, each validated before being reported.
    pub solutions: Vec<Vec<PointIndex>>,
    pub nodes: u64,
    pub seconds: f64,
    /// Hash over the instance parameters and the explored result.
    pub certificate: String,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

pub struct SearchInstance {
    space: Arc<PolarSpace>,
    m: u64,
    target: u64,
    gens: Vec<Vec<PointIndex>>,
    point_gens: Vec<Vec<usize>>,
    order: Vec<PointIndex>,
    opts: SearchOptions,
}

impl SearchInstance {
    pub fn new(
        space: Arc<PolarSpace>,
        m: u64,
        opts: SearchOptions,
    ) -> Result<SearchInstance, SearchError> {
        let f = space.field();
        let x2 = 2 * space.rank() as i64 + space.kind().e2() - 2;
        let per = half_power(f.p(), f.k(), x2) + BigRational::one();
        let target_big = BigRational::from_integer(BigInt::from(m)) * per;
        debug_assert!(target_big.is_integer());
        let available = space.points().len();
        if target_big.to_integer() > BigInt::from(available) {
            return Err(SearchError::InfeasibleTarget {
                target: target_big.to_integer().to_string(),
                available,
            });
        }
        let target = target_big
            .to_integer()
            .to_u64()
            .ok_or(SearchError::TargetOverflow)?;

        let gens = space.generator_point_sets().to_vec();
        let np = space.geometry().num_points();
        let mut point_gens = vec![Vec::new(); np];
        for (gi, g) in gens.iter().enumerate() {
            for &p in g {
                point_gens[p].push(gi);
            }
        }
        // Fail-first: points on many generators go first, ties by index.
        let mut order: Vec<PointIndex> = space.points().to_vec();
        order.sort_by_key(|&p| (usize::MAX - point_gens[p].len(), p));
        Ok(SearchInstance {
            space,
            m,
            target,
            gens,
            point_gens,
            order,
            opts,
        })
    }

    pub fn space(&self) -> &Arc<PolarSpace> {
        &self.space
    }

    pub fn m(&self) -> u64 {
        self.m
    }
}

struct Dfs<'a> {
    inst: &'a SearchInstance,
    state: Vec<Option<bool>>,
    gen_in: Vec<u64>,
    gen_und: Vec<u64>,
    chosen: u64,
    decided_polar: usize,
    trail: Vec<PointIndex>,
    nodes: u64,
    budget_hit: bool,
    solutions: Vec<Vec<PointIndex>>,
    branch_flip: Vec<bool>,
}

impl<'a> Dfs<'a> {
    fn new(inst: &'a SearchInstance) -> Dfs<'a> {
        let np = inst.space.geometry().num_points();
        let depth = inst.order.len();
        let branch_flip = if inst.opts.seed == 0 {
            vec![false; depth]
        } else {
            (0..depth)
                .map(|i| splitmix64(inst.opts.seed ^ (i as u64).wrapping_mul(0x9e37)) & 1 == 1)
                .collect()
        };
        Dfs {
            inst,
            state: vec![None; np],
            gen_in: vec![0; inst.gens.len()],
            gen_und: inst.gens.iter().map(|g| g.len() as u64).collect(),
            chosen: 0,
            decided_polar: 0,
            trail: Vec::new(),
            nodes: 0,
            budget_hit: false,
            solutions: Vec::new(),
            branch_flip,
        }
    }

    /// Assigns p and updates counters; returns false on an immediate
    /// generator violation. The assignment lands on the trail either way.
    fn assign(&mut self, p: PointIndex, value: bool) -> bool {
        debug_assert!(self.state[p].is_none());
        self.state[p] = Some(value);
        self.trail.push(p);
        self.decided_polar += 1;
        if value {
            self.chosen += 1;
        }
        let mut ok = true;
        for &gi in &self.inst.point_gens[p] {
            self.gen_und[gi] -= 1;
            if value {
                self.gen_in[gi] += 1;
            }
            if self.gen_in[gi] > self.inst.m
                || self.gen_in[gi] + self.gen_und[gi] < self.inst.m
            {
                ok = false;
            }
        }
        ok
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let p = self.trail.pop().unwrap();
            let value = self.state[p].take().unwrap();
            self.decided_polar -= 1;
            if value {
                self.chosen -= 1;
            }
            for &gi in &self.inst.point_gens[p] {
                self.gen_und[gi] += 1;
                if value {
                    self.gen_in[gi] -= 1;
                }
            }
        }
    }

    /// Forces every consequence of the current counters: a full generator
    /// expels its undecided points, a tight one claims them. Returns false
    /// on contradiction.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for gi in 0..self.inst.gens.len() {
                if self.gen_und[gi] == 0 {
                    continue;
                }
                let force = if self.gen_in[gi] == self.inst.m {
                    Some(false)
                } else if self.gen_in[gi] + self.gen_und[gi] == self.inst.m {
                    Some(true)
                } else {
                    None
                };
                if let Some(value) = force {
                    let undecided: Vec<PointIndex> = self.inst.gens[gi]
                        .iter()
                        .copied()
                        .filter(|&p| self.state[p].is_none())
                        .collect();
                    for p in undecided {
                        if !self.assign(p, value) {
                            return false;
                        }
                        changed = true;
                    }
                }
            }
            if !changed {
                return self.size_feasible();
            }
        }
    }

    fn size_feasible(&self) -> bool {
        let remaining = (self.inst.order.len() - self.decided_polar) as u64;
        self.chosen <= self.inst.target && self.chosen + remaining >= self.inst.target
    }

    fn record_solution(&mut self) {
        let sol: Vec<PointIndex> = (0..self.state.len())
            .filter(|&p| self.state[p] == Some(true))
            .collect();
        let w = WeightFunction::from_point_set(Arc::clone(&self.inst.space), &sol)
            .expect("search only selects polar points");
        let cert = validate_m_ovoid(&w, self.inst.m).expect("{0,1} by construction");
        assert!(cert.valid, "search produced an invalid solution");
        self.solutions.push(sol);
    }

    /// Returns false when the traversal was cut (budget or enough
    /// solutions); true when this subtree is fully explored.
    fn run(&mut self, depth: usize) -> bool {
        if self.solutions.len() >= self.inst.opts.max_solutions {
            return false;
        }
        let next = self.inst.order[depth..]
            .iter()
            .position(|&p| self.state[p].is_none())
            .map(|i| depth + i);
        let Some(at) = next else {
            if self.chosen == self.inst.target {
                self.record_solution();
                return self.solutions.len() < self.inst.opts.max_solutions;
            }
            return true;
        };
        let p = self.inst.order[at];
        let first = !self.branch_flip[at];
        let mut complete = true;
        for value in [first, !first] {
            self.nodes += 1;
            if self.nodes > self.inst.opts.node_budget {
                self.budget_hit = true;
                return false;
            }
            let mark = self.trail.len();
            if self.assign(p, value) && self.propagate() {
                if !self.run(at + 1) {
                    if self.budget_hit || self.solutions.len() >= self.inst.opts.max_solutions
                    {
                        self.undo_to(mark);
                        return false;
                    }
                    complete = false;
                }
            }
            self.undo_to(mark);
        }
        complete
    }
}

/// Runs the search to completion, budget cut, or the solution quota.
pub fn search_m_ovoids(inst: &SearchInstance) -> SearchOutcome {
    let start = Instant::now();
    let mut dfs = Dfs::new(inst);
    let mut complete = true;
    if inst.opts.symmetry && inst.m > 0 && !inst.order.is_empty() {
        // Point-transitivity of the isometry group: if any solution
        // exists, one contains the smallest polar point.
        let p0 = *inst.space.points().first().expect("rank >= 1");
        if dfs.assign(p0, true) && dfs.propagate() {
            complete = dfs.run(0);
        }
    } else {
        complete = dfs.run(0);
    }
    let status = if !dfs.solutions.is_empty() {
        SearchStatus::SolutionsFound
    } else if dfs.budget_hit || !complete && dfs.solutions.is_empty() {
        SearchStatus::BudgetExceeded
    } else {
        SearchStatus::ExhaustedNone
    };
    let seconds = (start.elapsed().as_secs_f64() * 1000.0).round() / 1000.0;
    let mut hasher = Sha256::new();
    hasher.update(inst.space.name());
    hasher.update(format!(
        "|m={}|sym={}|budget={}|seed={}|nodes={}|status={:?}",
        inst.m, inst.opts.symmetry, inst.opts.node_budget, inst.opts.seed, dfs.nodes, status
    ));
    for sol in &dfs.solutions {
        hasher.update(format!("{sol:?}"));
    }
    SearchOutcome {
        status,
        m: inst.m,
        solutions: dfs.solutions,
        nodes: dfs.nodes,
        seconds,
        certificate: format!("{:x}", hasher.finalize()),
    }
}

/// One search per m, each cross-checked against the proven bounds: a
/// solution below the best bound is a fatal inconsistency.
pub fn nonexistence_sweep(
    space: &Arc<PolarSpace>,
    ms: &[u64],
    opts: &SearchOptions,
) -> Result<Vec<SearchOutcome>, SearchError> {
    let report = best_bound(space.kind(), space.rank(), space.field().q())?;
    let mut out = Vec::new();
    for &m in ms {
        let inst = SearchInstance::new(Arc::clone(space), m, opts.clone())?;
        let outcome = search_m_ovoids(&inst);
        if outcome.status == SearchStatus::SolutionsFound
            && m > 0
            && BigInt::from(m) < report.best.value
        {
            return Err(SearchError::ConsistencyViolation {
                space: space.name(),
                m,
                bound: report.best.threshold.clone(),
                theorem: report.best.theorem.clone(),
                solution: outcome.solutions[0].clone(),
            });
        }
        out.push(outcome);
    }
    Ok(out)
}
