//! Direct multipartite purification.
//!
//! Every party applies a CNOT between its qubits of two copies and keeps the
//! control copy when all targets read 0. On the computational basis this map
//! is the entrywise product of the two density matrices, so the family
//! `q GHZ + (r/2^n) 1 + s rho_diag` is closed under it:
//!
//! ```text
//! GHZ*GHZ = GHZ/2   1*1 = 1   rho_diag*rho_diag = rho_diag/2
//! GHZ*1 = rho_diag  GHZ*rho_diag = rho_diag/2   1*rho_diag = rho_diag
//! ```

use crate::error::{domain, PurifyError, Result};
use crate::states::{check_parties, check_unit, dim, fidelity_ghz, input_state, IterationState, NORM_TOL};

pub const DEFAULT_K_MAX: usize = 64;

/// Iteration stops once the unnormalized trace drops below this.
pub const TRACE_FLOOR: f64 = 1e-300;

const BISECT_LO: f64 = 1e-12;
const BISECT_HI: f64 = 0.9;
const BISECT_MAX_ITERS: usize = 200;

fn check_weights(state: &IterationState) -> Result<()> {
    if state.q < 0.0 || state.r < 0.0 || state.s < 0.0 {
        return Err(domain(format!(
            "negative weight in ({}, {}, {})",
            state.q, state.r, state.s
        )));
    }
    Ok(())
}

/// One round on unnormalized weights. The output trace is the success
/// probability times the squared input trace.
pub fn lambda_step(state: &IterationState) -> Result<IterationState> {
    check_weights(state)?;
    let d = dim(state.n);
    let IterationState { q, r, s, .. } = *state;
    Ok(IterationState::from_parts(
        state.n,
        q * q / 2.0,
        r * r / d,
        s * s / 2.0 + q * s + 2.0 * (q + s) * r / d,
    ))
}

/// The s-update in the form `(s^2 + s q)/2 + (s r + 2 q r)/2^n`.
///
/// It agrees with [`lambda_step`] whenever `s = 0` (the first round from a
/// white-noise input) and undercounts the `q s` and `r s` cross terms by a
/// factor of two otherwise. Kept for comparison only.
pub fn lambda_step_printed(state: &IterationState) -> Result<IterationState> {
    check_weights(state)?;
    let d = dim(state.n);
    let IterationState { q, r, s, .. } = *state;
    Ok(IterationState::from_parts(
        state.n,
        q * q / 2.0,
        r * r / d,
        (s * s + s * q) / 2.0 + (s * r + 2.0 * q * r) / d,
    ))
}

/// Probability that every party reads 0, for a normalized input.
pub fn success_probability(state: &IterationState) -> Result<f64> {
    if (state.trace() - 1.0).abs() > NORM_TOL {
        return Err(domain(format!(
            "success probability needs a normalized state, trace is {}",
            state.trace()
        )));
    }
    Ok(lambda_step(state)?.trace())
}

/// `2 / (2^n - 2)`; meaningless (>= 1) for n = 2.
pub fn threshold_closed_form(n: u32) -> f64 {
    2.0 / (dim(n) - 2.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiTrajectory {
    /// `states[0]` is the white-noise input; later entries are unnormalized.
    pub states: Vec<IterationState>,
    /// `success_probs[i]` is the success probability of round `i + 1`,
    /// evaluated on the normalized output of round `i`.
    pub success_probs: Vec<f64>,
    /// GHZ fidelity of each (normalized) state.
    pub fidelities: Vec<f64>,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiPlan {
    pub n: u32,
    pub k: usize,
    /// `1 / (q + r + s)` of the final unnormalized state.
    pub cost_paper: f64,
    /// `2^k / prod(success_probs)`: mean consumption of a binary tree that
    /// retries each failed round with fresh inputs.
    pub cost_expected: f64,
    pub final_fidelity: f64,
}

/// Runs `rounds` rounds from the white-noise input without a stopping target.
///
/// Stops early (without error) if the trace underflows `TRACE_FLOOR`.
pub fn trajectory(n: u32, q0: f64, rounds: usize) -> Result<MultiTrajectory> {
    let mut traj = start(n, q0)?;
    for _ in 0..rounds {
        if !advance(&mut traj)? {
            break;
        }
    }
    Ok(traj)
}

fn start(n: u32, q0: f64) -> Result<MultiTrajectory> {
    let st = input_state(n, q0)?;
    Ok(MultiTrajectory {
        states: vec![st],
        success_probs: Vec::new(),
        fidelities: vec![fidelity_ghz(&st)?],
        k: 0,
    })
}

/// Appends one round. Returns false when the trace would fall below the floor.
fn advance(traj: &mut MultiTrajectory) -> Result<bool> {
    let cur = traj.states[traj.k];
    let next = lambda_step(&cur)?;
    if !(next.trace() >= TRACE_FLOOR) {
        return Ok(false);
    }
    let p = success_probability(&cur.normalize()?)?;
    traj.fidelities.push(fidelity_ghz(&next)?);
    traj.states.push(next);
    traj.success_probs.push(p);
    traj.k += 1;
    Ok(true)
}

pub fn plan_multipartite(
    n: u32,
    q0: f64,
    epsilon: f64,
    k_max: usize,
) -> Result<(MultiPlan, MultiTrajectory)> {
    check_parties(n)?;
    check_unit("q0", q0)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(domain(format!("epsilon = {epsilon} outside (0, 1)")));
    }
    let target = 1.0 - epsilon;
    let mut traj = start(n, q0)?;
    while traj.fidelities[traj.k] < target {
        let stalled = traj.k >= k_max || !advance(&mut traj)?;
        if stalled {
            let threshold = threshold_closed_form(n);
            if q0 <= threshold {
                return Err(PurifyError::BelowThreshold { q0, threshold });
            }
            let best = traj.fidelities.iter().cloned().fold(f64::MIN, f64::max);
            return Err(PurifyError::CapExceeded { rounds: traj.k, best_fidelity: best });
        }
    }
    let k = traj.k;
    let last = traj.states[k];
    let prod: f64 = traj.success_probs.iter().product();
    let plan = MultiPlan {
        n,
        k,
        cost_paper: 1.0 / last.trace(),
        cost_expected: 2f64.powi(k as i32) / prod,
        final_fidelity: traj.fidelities[k],
    };
    Ok((plan, traj))
}

/// Fidelity after one normalized round minus fidelity before, starting from
/// the white-noise input of weight `q`.
pub fn one_round_gain(n: u32, q: f64) -> Result<f64> {
    let st = input_state(n, q)?;
    Ok(fidelity_ghz(&lambda_step(&st)?)? - fidelity_ghz(&st)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub n: u32,
    pub closed_form: f64,
    /// Root of [`one_round_gain`] in `[1e-12, 0.9]`; `None` without a sign
    /// change in that bracket.
    pub numeric: Option<f64>,
}

pub fn distillability_threshold(n: u32, tol: f64) -> Result<Threshold> {
    check_parties(n)?;
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance {tol} must be positive")));
    }
    let closed_form = threshold_closed_form(n);
    let (mut lo, mut hi) = (BISECT_LO, BISECT_HI);
    let g_lo = one_round_gain(n, lo)?;
    let g_hi = one_round_gain(n, hi)?;
    if g_lo.signum() == g_hi.signum() || g_lo == 0.0 || g_hi == 0.0 {
        return Ok(Threshold { n, closed_form, numeric: None });
    }
    for _ in 0..BISECT_MAX_ITERS {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let g = one_round_gain(n, mid)?;
        if g.signum() == g_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Threshold { n, closed_form, numeric: Some(0.5 * (lo + hi)) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(n: u32, q: f64, r: f64, s: f64) -> IterationState {
        IterationState::new(n, q, r, s).unwrap()
    }

    #[test]
    fn lambda_examples() {
        let out = lambda_step(&st(3, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!((out.q, out.r, out.s), (0.5, 0.0, 0.0));
        let out = lambda_step(&st(3, 0.0, 1.0, 0.0)).unwrap();
        assert_eq!((out.q, out.r, out.s), (0.0, 0.125, 0.0));
        let out = lambda_step(&st(3, 0.6, 0.4, 0.0)).unwrap();
        assert!((out.q - 0.18).abs() < 1e-15);
        assert!((out.r - 0.02).abs() < 1e-15);
        assert!((out.s - 0.06).abs() < 1e-15);
        assert!((out.trace() - 0.26).abs() < 1e-15);
    }

    #[test]
    fn lambda_rejects_negative() {
        let bad = IterationState { n: 3, q: -0.1, r: 1.0, s: 0.0, normalized: false };
        assert!(lambda_step(&bad).is_err());
    }

    #[test]
    fn printed_form_differs_only_with_diag_weight() {
        let a = st(4, 0.6, 0.4, 0.0);
        assert_eq!(lambda_step(&a).unwrap(), lambda_step_printed(&a).unwrap());
        let b = st(4, 0.5, 0.3, 0.2);
        assert!((lambda_step(&b).unwrap().s - lambda_step_printed(&b).unwrap().s).abs() > 1e-3);
    }

    #[test]
    fn success_probability_examples() {
        assert_eq!(success_probability(&input_state(3, 1.0).unwrap()).unwrap(), 0.5);
        assert_eq!(success_probability(&input_state(3, 0.0).unwrap()).unwrap(), 0.125);
        let p = success_probability(&st(3, 0.6, 0.4, 0.0)).unwrap();
        assert!((p - 0.26).abs() < 1e-15);
        assert!(success_probability(&st(3, 0.3, 0.3, 0.0)).is_err());
    }

    #[test]
    fn success_probability_matches_input_formula() {
        for n in 2..=12 {
            let d = dim(n);
            for i in 0..=10 {
                let q = i as f64 / 10.0;
                let p = success_probability(&input_state(n, q).unwrap()).unwrap();
                let expect = q * q / 2.0 + 2.0 * q * (1.0 - q) / d + (1.0 - q) * (1.0 - q) / d;
                assert!((p - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn pure_ghz_trajectory() {
        let t = trajectory(6, 1.0, 4).unwrap();
        let qs: Vec<f64> = t.states.iter().map(|s| s.q).collect();
        assert_eq!(qs, vec![1.0, 0.5, 0.125, 0.5f64.powi(7), 0.5f64.powi(15)]);
        assert!(t.fidelities.iter().all(|&f| f == 1.0));
    }

    #[test]
    fn plan_examples() {
        let (p, _) = plan_multipartite(10, 1.0, 0.01, DEFAULT_K_MAX).unwrap();
        assert_eq!((p.k, p.cost_paper, p.cost_expected), (0, 1.0, 1.0));

        let q0 = crate::states::convert_noise(10, crate::states::NoiseInput::InFidelity(0.5))
            .unwrap()
            .q;
        let (p, t) = plan_multipartite(10, q0, 0.01, DEFAULT_K_MAX).unwrap();
        assert!(p.k >= 1 && p.k <= 3);
        assert!(p.final_fidelity >= 0.99);
        assert_eq!(t.k, p.k);

        assert!(matches!(
            plan_multipartite(4, 0.1, 0.01, DEFAULT_K_MAX),
            Err(PurifyError::BelowThreshold { .. })
        ));
    }

    #[test]
    fn plan_k1_costs() {
        let (p, t) = plan_multipartite(12, 0.8, 0.01, DEFAULT_K_MAX).unwrap();
        assert_eq!(p.k, 1);
        let p1 = t.success_probs[0];
        assert!((p.cost_paper - 1.0 / p1).abs() <= 1e-12 * p.cost_paper);
        assert!((p.cost_expected - 2.0 / p1).abs() <= 1e-12 * p.cost_expected);
    }

    #[test]
    fn small_n_cannot_reach_tight_target() {
        // the rho_diag weight caps the reachable fidelity below 0.99 at n = 3
        let err = plan_multipartite(3, 0.7714285714285714, 0.01, DEFAULT_K_MAX).unwrap_err();
        match err {
            PurifyError::CapExceeded { best_fidelity, .. } => {
                assert!(best_fidelity > 0.9 && best_fidelity < 0.99)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn threshold_closed_form_values() {
        assert!((threshold_closed_form(3) - 1.0 / 3.0).abs() < 1e-16);
        assert!((threshold_closed_form(4) - 2.0 / 14.0).abs() < 1e-16);
        assert!((threshold_closed_form(10) - 0.0019569471624266144).abs() < 1e-16);
        assert!(distillability_threshold(1, 1e-9).is_err());
    }

    #[test]
    fn numeric_threshold_is_gain_root() {
        for n in 3..=8 {
            let t = distillability_threshold(n, 1e-12).unwrap();
            let x = t.numeric.unwrap();
            assert!(one_round_gain(n, x * 0.99).unwrap() < 0.0);
            assert!(one_round_gain(n, x * 1.01).unwrap() > 0.0);
        }
    }
}
