//! Multi-level, multi-agent tabular Q-learning over the placement environment.
//!
//! One top-level agent learns rigid group motions; one bottom-level agent per
//! group learns unit motions inside that group. Agents act in a fixed
//! round-robin rotation, one agent per time step, and each update touches only
//! the acting agent's table. State keys compress the placement: the top agent
//! sees only group anchors, a group agent sees its own translation-invariant
//! cell pattern, which keeps table growth bounded by what is actually visited.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eval::{evaluate, EvalBudget, FomSpec, GradientField};
use crate::model::{initial_placement, Agent, CircuitSpec, ModelError, MoveAction, Placement};

#[derive(Debug, Clone)]
pub struct QLearnConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub epsilon_decay: f64,
    pub episodes: u32,
    pub steps_per_episode: u32,
    pub target_cost: f64,
    pub seed: u64,
}

impl Default for QLearnConfig {
    fn default() -> Self {
        QLearnConfig {
            alpha: 0.3,
            gamma: 0.9,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_decay: 0.97,
            episodes: 200,
            steps_per_episode: 64,
            target_cost: 0.0,
            seed: 0,
        }
    }
}

impl QLearnConfig {
    pub fn validation_errors(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            errs.push(format!("qlearn.alpha: must be in (0,1] (got {})", self.alpha));
        }
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            errs.push(format!("qlearn.gamma: must be in [0,1) (got {})", self.gamma));
        }
        for (name, v) in [
            ("epsilon_start", self.epsilon_start),
            ("epsilon_end", self.epsilon_end),
        ] {
            if !(0.0..=1.0).contains(&v) {
                errs.push(format!("qlearn.{name}: must be in [0,1] (got {v})"));
            }
        }
        if self.epsilon_end > self.epsilon_start {
            errs.push("qlearn.epsilon_end: must be <= epsilon_start".to_string());
        }
        if !(self.epsilon_decay > 0.0 && self.epsilon_decay <= 1.0) {
            errs.push(format!(
                "qlearn.epsilon_decay: must be in (0,1] (got {})",
                self.epsilon_decay
            ));
        }
        if self.episodes < 1 {
            errs.push("qlearn.episodes: must be >= 1".to_string());
        }
        if self.steps_per_episode < 1 {
            errs.push("qlearn.steps_per_episode: must be >= 1".to_string());
        }
        errs
    }
}

// --- platform-stable state/action keys (FNV-1a, 64-bit) ---

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

#[derive(Clone, Copy)]
struct StableHasher(u64);

impl StableHasher {
    fn new() -> Self {
        StableHasher(FNV_OFFSET)
    }

    fn write_bytes(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(FNV_PRIME);
        }
    }

    fn write_i32(&mut self, v: i32) {
        self.write_bytes(&v.to_le_bytes());
    }

    fn write_u32(&mut self, v: u32) {
        self.write_bytes(&v.to_le_bytes());
    }

    fn finish(self) -> u64 {
        self.0
    }
}

/// State key for the top agent: hash of the ordered group anchor tuple.
pub fn encode_state_top(p: &Placement) -> u64 {
    let mut h = StableHasher::new();
    for g in 0..p.num_groups() {
        let (ax, ay) = p.group_anchor(g);
        h.write_i32(ax);
        h.write_i32(ay);
    }
    h.finish()
}

/// State key for a group agent: hash of the sorted multiset of
/// (device index, unit position relative to the group bounding-box min corner).
pub fn encode_state_group(p: &Placement, group: usize) -> u64 {
    let (ax, ay) = p.group_anchor(group);
    let mut cells: Vec<(u32, i32, i32)> = (0..p.num_devices(group))
        .flat_map(|d| {
            p.device_cells(group, d)
                .iter()
                .map(move |&(x, y)| (d as u32, x - ax, y - ay))
        })
        .collect();
    cells.sort_unstable();
    let mut h = StableHasher::new();
    for (d, rx, ry) in cells {
        h.write_u32(d);
        h.write_i32(rx);
        h.write_i32(ry);
    }
    h.finish()
}

/// Encodes an agent's view of the placement.
pub fn encode_state(p: &Placement, agent: Agent) -> u64 {
    match agent {
        Agent::Top => encode_state_top(p),
        Agent::Group(g) => encode_state_group(p, g),
    }
}

/// Action key consistent with the state encoding: top actions by
/// (group, direction), bottom actions by (device, group-relative mover
/// position, direction) so keys survive whole-group translation.
pub fn action_key(p: &Placement, m: &MoveAction) -> u64 {
    let mut h = StableHasher::new();
    match *m {
        MoveAction::Top { group, dir } => {
            h.write_bytes(&[0, dir.index()]);
            h.write_u32(group as u32);
        }
        MoveAction::Bottom { unit, dir } => {
            let (ax, ay) = p.group_anchor(unit.group);
            let (x, y) = p.position(unit);
            h.write_bytes(&[1, dir.index()]);
            h.write_u32(unit.device as u32);
            h.write_i32(x - ax);
            h.write_i32(y - ay);
        }
    }
    h.finish()
}

/// Per-agent value table; unseen (state, action) entries default to 0.
#[derive(Debug, Clone, Default)]
pub struct QTable {
    entries: HashMap<u64, Vec<(u64, f64)>>,
}

impl QTable {
    pub fn get(&self, state: u64, action: u64) -> f64 {
        self.entries
            .get(&state)
            .and_then(|v| v.iter().find(|(a, _)| *a == action))
            .map(|(_, q)| *q)
            .unwrap_or(0.0)
    }

    fn set(&mut self, state: u64, action: u64, q: f64) {
        let actions = self.entries.entry(state).or_default();
        match actions.iter_mut().find(|(a, _)| *a == action) {
            Some(slot) => slot.1 = q,
            None => actions.push((action, q)),
        }
    }

    pub fn num_states(&self) -> usize {
        self.entries.len()
    }

    pub fn num_entries(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }
}

/// One agent transition: Q-learning operates on (S_t, A_t, R_{t+1}, S_{t+1}).
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub state: u64,
    pub action: u64,
    pub reward: f64,
    pub next_state: u64,
}

/// V(s) = max over the currently legal actions of Q(s, a); 0 when empty.
pub fn state_value(table: &QTable, state: u64, legal: &[u64]) -> f64 {
    if legal.is_empty() {
        return 0.0;
    }
    legal
        .iter()
        .map(|&a| table.get(state, a))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Q(S,A) <- (1-a) Q(S,A) + a [R + g V(S')], V over the next state's legal
/// actions. Touches exactly one entry.
pub fn q_update(table: &mut QTable, rec: &StepRecord, next_legal: &[u64], cfg: &QLearnConfig) {
    let v_next = state_value(table, rec.next_state, next_legal);
    let old = table.get(rec.state, rec.action);
    let new = (1.0 - cfg.alpha) * old + cfg.alpha * (rec.reward + cfg.gamma * v_next);
    table.set(rec.state, rec.action, new);
}

/// Epsilon-greedy selection over the deterministic legal-move ordering; greedy
/// ties break toward the lowest index.
pub fn select_action_index(
    table: &QTable,
    state: u64,
    keys: &[u64],
    epsilon: f64,
    rng: &mut impl Rng,
) -> usize {
    assert!(!keys.is_empty(), "select_action requires a legal action");
    if rng.gen::<f64>() < epsilon {
        return rng.gen_range(0..keys.len());
    }
    let mut best = 0;
    let mut best_q = table.get(state, keys[0]);
    for (i, &k) in keys.iter().enumerate().skip(1) {
        let q = table.get(state, k);
        if q > best_q {
            best = i;
            best_q = q;
        }
    }
    best
}

/// Top table plus one bottom table per group.
#[derive(Debug, Clone)]
pub struct AgentSet {
    pub top: QTable,
    pub bottom: Vec<QTable>,
}

impl AgentSet {
    pub fn new(num_groups: usize) -> Self {
        AgentSet {
            top: QTable::default(),
            bottom: vec![QTable::default(); num_groups],
        }
    }

    pub fn table_mut(&mut self, agent: Agent) -> &mut QTable {
        match agent {
            Agent::Top => &mut self.top,
            Agent::Group(g) => &mut self.bottom[g],
        }
    }

    pub fn table(&self, agent: Agent) -> &QTable {
        match agent {
            Agent::Top => &self.top,
            Agent::Group(g) => &self.bottom[g],
        }
    }

    pub fn total_entries(&self) -> usize {
        self.top.num_entries() + self.bottom.iter().map(QTable::num_entries).sum::<usize>()
    }
}

#[derive(Debug, Clone)]
pub struct OptimizeResult {
    pub best_placement: Placement,
    pub best_cost: f64,
    pub evals_used: u64,
    pub episodes_run: u32,
    /// (eval_index, best-so-far cost), appended at every improvement.
    pub cost_history: Vec<(u64, f64)>,
}

struct BestTracker {
    placement: Placement,
    cost: f64,
    history: Vec<(u64, f64)>,
}

impl BestTracker {
    fn new(p: Placement, cost: f64, eval_index: u64) -> Self {
        BestTracker {
            placement: p,
            cost,
            history: vec![(eval_index, cost)],
        }
    }

    fn observe(&mut self, p: &Placement, cost: f64, eval_index: u64) {
        if cost < self.cost {
            self.placement = p.clone();
            self.cost = cost;
            self.history.push((eval_index, cost));
        }
    }
}

/// Runs the full multi-level multi-agent optimization. Fully deterministic for
/// a given seed; every episode restarts from the constructive initial
/// placement. The mandatory initial evaluation consumes one budget unit, so
/// the budget limit must be >= 1.
pub fn optimize(
    spec: &CircuitSpec,
    field: &GradientField,
    fom: &FomSpec,
    cfg: &QLearnConfig,
    budget: &mut EvalBudget,
) -> Result<OptimizeResult, ModelError> {
    let initial = initial_placement(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let num_groups = spec.groups.len();
    let mut agents = AgentSet::new(num_groups);

    let initial_cost = match evaluate(field, fom, spec, &initial, budget) {
        Ok(r) => r.fom,
        Err(_) => {
            // zero budget: nothing was ever evaluated
            return Ok(OptimizeResult {
                best_placement: initial,
                best_cost: f64::INFINITY,
                evals_used: budget.used(),
                episodes_run: 0,
                cost_history: vec![],
            });
        }
    };
    let mut best = BestTracker::new(initial.clone(), initial_cost, budget.used());
    // reward normalizer; guards against a zero-cost start
    let cost_scale = if initial_cost.abs() > 1e-12 {
        initial_cost.abs()
    } else {
        1.0
    };

    let order: Vec<Agent> = std::iter::once(Agent::Top)
        .chain((0..num_groups).map(Agent::Group))
        .collect();

    let mut episodes_run = 0;
    'outer: for ep in 0..cfg.episodes {
        episodes_run = ep + 1;
        if budget.exhausted() || best.cost <= cfg.target_cost {
            break;
        }
        let epsilon = cfg
            .epsilon_end
            .max(cfg.epsilon_start * cfg.epsilon_decay.powi(ep as i32));
        let mut p = initial.clone();
        let mut cost_prev = initial_cost;

        for step in 0..cfg.steps_per_episode {
            let agent = order[(step as usize) % order.len()];
            let legal = p.legal_moves(agent);
            if legal.is_empty() {
                continue; // forfeit the turn
            }
            let state = encode_state(&p, agent);
            let keys: Vec<u64> = legal.iter().map(|m| action_key(&p, m)).collect();
            let idx = select_action_index(agents.table(agent), state, &keys, epsilon, &mut rng);
            let next = p
                .apply_move(&legal[idx])
                .expect("legal_moves returned an illegal move");
            let report = match evaluate(field, fom, spec, &next, budget) {
                Ok(r) => r,
                Err(_) => break 'outer,
            };
            let cost_new = report.fom;
            best.observe(&next, cost_new, report.eval_index);

            let reached_target = cost_new <= cfg.target_cost;
            let reward = (cost_prev - cost_new) / cost_scale + if reached_target { 1.0 } else { 0.0 };
            let next_state = encode_state(&next, agent);
            let next_keys: Vec<u64> = next
                .legal_moves(agent)
                .iter()
                .map(|m| action_key(&next, m))
                .collect();
            q_update(
                agents.table_mut(agent),
                &StepRecord {
                    state,
                    action: keys[idx],
                    reward,
                    next_state,
                },
                &next_keys,
                cfg,
            );

            p = next;
            cost_prev = cost_new;
            if reached_target {
                break 'outer;
            }
        }
    }

    Ok(OptimizeResult {
        best_placement: best.placement,
        best_cost: best.cost,
        evals_used: budget.used(),
        episodes_run,
        cost_history: best.history,
    })
}
