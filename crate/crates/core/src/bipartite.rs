//! Distill-then-teleport strategy.
//!
//! The dealer turns each noisy N-party source state into an isotropic pair
//! shared with one partner, runs the two-pair recurrence on those pairs, and
//! finally teleports N-1 qubits of a locally prepared GHZ state through them.

use crate::error::{domain, PurifyError, Result};
use crate::states::{check_parties, check_unit, dim};

/// Below this pair deficit `1 - q` the recurrence is evaluated in deficit form.
pub const DEFICIT_SWITCH: f64 = 1e-6;

pub const DEFAULT_K_MAX: usize = 64;

/// Exponents of the printed large-N cost estimate `4 N^4.42 (delta/eps)^3.42`.
const ASYMPTOTIC_N_EXP: f64 = 4.42;
const ASYMPTOTIC_RATIO_EXP: f64 = 3.42;

/// Isotropic two-qubit state `q |Phi+><Phi+| + (1 - q) 1 / 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartitePair {
    q: f64,
}

impl BipartitePair {
    pub fn new(q: f64) -> Result<Self> {
        check_unit("pair weight", q)?;
        Ok(Self { q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Overlap with `|Phi+>`.
    pub fn fidelity(&self) -> f64 {
        (1.0 + 3.0 * self.q) / 4.0
    }
}

/// Which measurement outcomes of the two target qubits keep the surviving pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SuccessRule {
    /// Keep only the (0, 0) outcome: dealer 1/2 times partner (1 + q)/2.
    #[default]
    ZeroZero,
    /// Keep (0, 0) and (1, 1); doubles the success probability.
    Coincident,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub q_next: f64,
    pub p_success: f64,
    /// Expected input pairs consumed per surviving pair, `2 / p_success`.
    pub cost_factor: f64,
}

/// Single-copy reduction of the white-noise GHZ input onto the dealer and one
/// partner.
///
/// Every other party measures in the `|+>, |->` basis and the dealer applies
/// `Z` when the count of `|->` outcomes is odd. The white-noise weight carries
/// over unchanged, so the pair has the same `q`.
pub fn reduce_to_pair(n: u32, q: f64) -> Result<BipartitePair> {
    check_parties(n)?;
    if n < 3 {
        return Err(domain("reduce_to_pair needs n >= 3; at n = 2 the input already is a pair"));
    }
    BipartitePair::new(q)
}

fn rational_next(q: f64) -> f64 {
    (4.0 * q * q + 2.0 * q) / (3.0 * (q * q + 1.0))
}

/// `1 - q_next` as a function of the deficit `1 - q`.
pub fn deficit_next(deficit: f64) -> f64 {
    deficit * (4.0 - deficit) / (3.0 * (2.0 - 2.0 * deficit + deficit * deficit))
}

pub fn bbpssw_step(q: f64) -> Result<StepResult> {
    bbpssw_step_with(q, SuccessRule::default())
}

pub fn bbpssw_step_with(q: f64, rule: SuccessRule) -> Result<StepResult> {
    check_unit("pair weight", q)?;
    let deficit = 1.0 - q;
    let q_next = if deficit < DEFICIT_SWITCH {
        1.0 - deficit_next(deficit)
    } else {
        rational_next(q)
    };
    Ok(step_result(q_next, q, rule))
}

fn step_result(q_next: f64, q: f64, rule: SuccessRule) -> StepResult {
    let p_success = match rule {
        SuccessRule::ZeroZero => (1.0 + q) / 4.0,
        SuccessRule::Coincident => (1.0 + q) / 2.0,
    };
    StepResult {
        q_next,
        p_success,
        cost_factor: 2.0 / p_success,
    }
}

/// GHZ fidelity after teleporting N-1 qubits of a perfect GHZ state through
/// independent pairs of weight `q`: `(q^(N-1) + ((1+q)/2)^(N-1)) / 2`.
pub fn teleport_fidelity(q: f64, n: u32) -> Result<f64> {
    check_parties(n)?;
    check_unit("pair weight", q)?;
    let m = (n - 1) as i32;
    Ok(0.5 * (q.powi(m) + ((1.0 + q) / 2.0).powi(m)))
}

/// Round count from the small-error bound
/// `k >= 1 + log2[(2^N / (2^N - 1)) (delta / eps) (N - 1)] / log2(3/2)`,
/// rounded up and clamped at zero. `None` when `delta = 0`.
pub fn closed_form_rounds(n: u32, delta: f64, epsilon: f64) -> Option<u32> {
    if !(delta > 0.0) {
        return None;
    }
    let d = dim(n);
    let arg = d / (d - 1.0) * (delta / epsilon) * (n as f64 - 1.0);
    let k = 1.0 + arg.log2() / 1.5f64.log2();
    Some(k.ceil().max(0.0) as u32)
}

/// Informational large-N estimate `4 N^4.42 (delta / eps)^3.42`.
pub fn asymptotic_cost(n: u32, delta: f64, epsilon: f64) -> f64 {
    4.0 * (n as f64).powf(ASYMPTOTIC_N_EXP) * (delta / epsilon).powf(ASYMPTOTIC_RATIO_EXP)
}

/// One row of a fixed-length bipartite iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub round: usize,
    pub q: f64,
    pub deficit: f64,
    pub teleport_fidelity: f64,
    /// The step that produced this point; `None` for the input.
    pub step: Option<StepResult>,
    /// Expected N-party source states consumed up to this round.
    pub cumulative_cost: f64,
}

/// Applies `rounds` distillation rounds with no stopping target.
pub fn trajectory(n: u32, q0: f64, rounds: usize, rule: SuccessRule) -> Result<Vec<TrajectoryPoint>> {
    check_parties(n)?;
    check_unit("q0", q0)?;
    let mut q = q0;
    let mut deficit = 1.0 - q0;
    let mut cost = (n - 1) as f64;
    let mut out = vec![TrajectoryPoint {
        round: 0,
        q,
        deficit,
        teleport_fidelity: teleport_fidelity(q, n)?,
        step: None,
        cumulative_cost: cost,
    }];
    for round in 1..=rounds {
        let step = if deficit < DEFICIT_SWITCH {
            deficit = deficit_next(deficit);
            step_result(1.0 - deficit, q, rule)
        } else {
            let st = bbpssw_step_with(q, rule)?;
            deficit = 1.0 - st.q_next;
            st
        };
        q = step.q_next;
        cost *= step.cost_factor;
        out.push(TrajectoryPoint {
            round,
            q,
            deficit,
            teleport_fidelity: teleport_fidelity(q, n)?,
            step: Some(step),
            cumulative_cost: cost,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PurificationPlan {
    pub n: u32,
    pub k: usize,
    /// `q_0 ..= q_k`.
    pub trajectory: Vec<f64>,
    /// `1 - q_i`, carried separately so values below `DEFICIT_SWITCH` keep
    /// their relative precision.
    pub deficits: Vec<f64>,
    pub steps: Vec<StepResult>,
    /// Mean number of N-party source states consumed.
    pub expected_cost: f64,
    /// `4^k (N - 1)`.
    pub lower_bound_cost: f64,
    pub closed_form_k: Option<u32>,
    pub asymptotic_cost: f64,
    pub final_fidelity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteOptions {
    pub k_max: usize,
    pub rule: SuccessRule,
}

impl Default for BipartiteOptions {
    fn default() -> Self {
        Self { k_max: DEFAULT_K_MAX, rule: SuccessRule::ZeroZero }
    }
}

pub fn plan_bipartite(n: u32, q0: f64, epsilon: f64, k_max: usize) -> Result<PurificationPlan> {
    plan_bipartite_with(n, q0, epsilon, BipartiteOptions { k_max, ..Default::default() })
}

pub fn plan_bipartite_with(
    n: u32,
    q0: f64,
    epsilon: f64,
    opts: BipartiteOptions,
) -> Result<PurificationPlan> {
    check_parties(n)?;
    check_unit("q0", q0)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(domain(format!("epsilon = {epsilon} outside (0, 1)")));
    }
    let target = 1.0 - epsilon;
    let pairs = (n - 1) as f64;
    let d = dim(n);
    let delta = (d - 1.0) / d * (1.0 - q0);

    let mut q = q0;
    let mut deficit = 1.0 - q0;
    let mut trajectory = vec![q];
    let mut deficits = vec![deficit];
    let mut steps = Vec::new();
    let mut cost = pairs;
    let mut fidelity = teleport_fidelity(q, n)?;

    if fidelity < target && q0 <= 1.0 / 3.0 {
        return Err(PurifyError::Unreachable { q0, target });
    }
    while fidelity < target {
        if steps.len() >= opts.k_max {
            return Err(PurifyError::CapExceeded { rounds: opts.k_max, best_fidelity: fidelity });
        }
        let step = if deficit < DEFICIT_SWITCH {
            let next = deficit_next(deficit);
            let st = step_result(1.0 - next, q, opts.rule);
            deficit = next;
            st
        } else {
            let st = bbpssw_step_with(q, opts.rule)?;
            deficit = 1.0 - st.q_next;
            st
        };
        q = step.q_next;
        cost *= step.cost_factor;
        steps.push(step);
        trajectory.push(q);
        deficits.push(deficit);
        fidelity = teleport_fidelity(q, n)?;
    }

    let k = steps.len();
    Ok(PurificationPlan {
        n,
        k,
        trajectory,
        deficits,
        steps,
        expected_cost: cost,
        lower_bound_cost: 4f64.powi(k as i32) * pairs,
        closed_form_k: closed_form_rounds(n, delta, epsilon),
        asymptotic_cost: asymptotic_cost(n, delta, epsilon),
        final_fidelity: fidelity,
    })
}
