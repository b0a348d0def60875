//! Search for completed boards.
//!
//! Families under `fill` or `no_overlap` are searched as labellings of
//! their base elements, a family required to have exactly one instance is
//! grown through membership bits, and any other family picks from its
//! explicit instance list. Every constraint is checked on partial boards
//! by the three-valued evaluator, and every leaf is re-checked exactly
//! before it is reported.

pub mod layout;
mod state;

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::board::{CompletedBoard, Given};
use crate::dsl::Rule;
use crate::grid::GridDims;
use crate::model::Model;
use crate::Error;
use layout::Layout;
use state::State;

/// Search nodes allowed when the caller gives no budget.
pub const DEFAULT_NODE_BUDGET: u64 = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Exhaustive,
    Constructive,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Exhaustive => "exhaustive",
            Engine::Constructive => "constructive",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(Engine::Exhaustive),
            "constructive" => Ok(Engine::Constructive),
            _ => Err(format!(
                "unknown engine `{s}` (expected exhaustive or constructive)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    pub engine: Engine,
    pub seed: u64,
    pub limit: usize,
    pub node_budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            engine: Engine::Exhaustive,
            seed: 0,
            limit: usize::MAX,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

/// Boards found by a search.
#[derive(Clone, Debug)]
pub struct Found {
    pub boards: Vec<CompletedBoard>,
    /// The constructive engine ran out of attempts or nodes before
    /// reaching its limit.
    pub partial: bool,
    pub nodes: u64,
}

/// A model prepared for search.
pub struct Solver {
    model: Model,
    layout: Layout,
}

enum Step {
    Go,
    Stop,
}

fn dfs(
    st: &mut State,
    rng: &mut Option<ChaCha8Rng>,
    cap: u64,
    leaf: &mut dyn FnMut(CompletedBoard) -> Step,
) -> Result<Step, Error> {
    if st.nodes > cap {
        return Err(Error::Budget {
            what: "search node",
            reached: st.nodes,
        });
    }
    let Some(v) = st.pick() else {
        return Ok(match st.extract() {
            Some(b) => leaf(b),
            None => Step::Go,
        });
    };
    let mut vals = st.branch_values(v);
    if let Some(r) = rng.as_mut() {
        vals.shuffle(r);
    }
    for b in vals {
        st.nodes += 1;
        let mark = st.mark();
        if st.assign(v, b) {
            if let Step::Stop = dfs(st, rng, cap, leaf)? {
                st.undo_to(mark);
                return Ok(Step::Stop);
            }
        }
        st.undo_to(mark);
    }
    Ok(Step::Go)
}

impl Solver {
    pub fn new(model: Model) -> Result<Solver, Error> {
        let layout = Layout::new(&model)?;
        Ok(Solver { model, layout })
    }

    pub fn from_rule(rule: &Rule, dims: GridDims) -> Result<Solver, Error> {
        Solver::new(Model::from_rule(rule, dims)?)
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    fn state(&self, given: &Given) -> Option<State<'_>> {
        let mut st = State::new(&self.model, &self.layout);
        (st.apply_given(given) && st.start()).then_some(st)
    }

    /// Every completed board extending `given`, in canonical order, up to
    /// `limit`.
    pub fn enumerate(&self, given: &Given, limit: usize, budget: u64) -> Result<Found, Error> {
        let mut boards = Vec::new();
        let mut nodes = 0;
        if limit > 0 {
            if let Some(mut st) = self.state(given) {
                let mut leaf = |b: CompletedBoard| {
                    if given.matches(&b) {
                        boards.push(b);
                    }
                    if boards.len() >= limit {
                        Step::Stop
                    } else {
                        Step::Go
                    }
                };
                dfs(&mut st, &mut None, budget, &mut leaf)?;
                nodes = st.nodes;
            }
        }
        boards.sort_by(|a, b| a.canonical_cmp(b));
        Ok(Found {
            boards,
            partial: false,
            nodes,
        })
    }

    /// Number of completed boards extending `given`, counting no further
    /// than `limit`.
    pub fn count(&self, given: &Given, limit: u64, budget: u64) -> Result<(u64, u64), Error> {
        let mut count = 0u64;
        let mut nodes = 0;
        if limit > 0 {
            if let Some(mut st) = self.state(given) {
                let mut leaf = |b: CompletedBoard| {
                    if given.matches(&b) {
                        count += 1;
                    }
                    if count >= limit {
                        Step::Stop
                    } else {
                        Step::Go
                    }
                };
                dfs(&mut st, &mut None, budget, &mut leaf)?;
                nodes = st.nodes;
            }
        }
        Ok((count, nodes))
    }

    /// Up to `limit` distinct completed boards from randomised restarts.
    /// The same seed always gives the same boards in the same order.
    pub fn generate(&self, seed: u64, limit: usize, budget: u64) -> Result<Found, Error> {
        let mut master = ChaCha8Rng::seed_from_u64(seed);
        let attempts = limit.saturating_mul(4).max(1);
        let per_attempt = (budget / attempts as u64).max(2_000);
        let mut seen = BTreeSet::new();
        let mut boards = Vec::new();
        let mut nodes = 0u64;
        let mut partial = false;
        for _ in 0..attempts {
            if boards.len() >= limit {
                break;
            }
            if nodes >= budget {
                partial = true;
                break;
            }
            let mut rng = Some(ChaCha8Rng::seed_from_u64(master.next_u64()));
            let Some(mut st) = self.state(&Given::default()) else {
                break;
            };
            let mut found = None;
            let mut leaf = |b: CompletedBoard| {
                found = Some(b);
                Step::Stop
            };
            let r = dfs(
                &mut st,
                &mut rng,
                per_attempt.min(budget - nodes),
                &mut leaf,
            );
            nodes += st.nodes;
            match r {
                Ok(Step::Go) if found.is_none() => break,
                Err(Error::Budget { .. }) => partial = true,
                Err(e) => return Err(e),
                _ => {}
            }
            if let Some(b) = found {
                if seen.insert(b.clone()) {
                    boards.push(b);
                }
            }
        }
        let partial = boards.len() < limit && partial;
        Ok(Found {
            boards,
            partial,
            nodes,
        })
    }

    pub fn run(&self, cfg: &SearchConfig) -> Result<Found, Error> {
        match cfg.engine {
            Engine::Exhaustive => self.enumerate(&Given::default(), cfg.limit, cfg.node_budget),
            Engine::Constructive => self.generate(cfg.seed, cfg.limit, cfg.node_budget),
        }
    }
}

/// Every completed board of `rule` at `dims`, in canonical order.
pub fn enumerate_completed(
    rule: &Rule,
    dims: GridDims,
    budget: u64,
) -> Result<Vec<CompletedBoard>, Error> {
    Ok(Solver::from_rule(rule, dims)?
        .enumerate(&Given::default(), usize::MAX, budget)?
        .boards)
}

/// Up to `limit` completed boards found by randomised search.
pub fn generate_completed(
    rule: &Rule,
    dims: GridDims,
    seed: u64,
    limit: usize,
    budget: u64,
) -> Result<Found, Error> {
    Solver::from_rule(rule, dims)?.generate(seed, limit, budget)
}

/// Number of completed boards whose assignment extends `given`.
pub fn count_consistent(
    rule: &Rule,
    dims: GridDims,
    given: &Given,
    budget: u64,
) -> Result<u64, Error> {
    Ok(Solver::from_rule(rule, dims)?
        .count(given, u64::MAX, budget)?
        .0)
}
