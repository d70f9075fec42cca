//! Oracle-versus-formula check suites.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use super::matrix::{DensityMatrix, PureState};
use super::protocols::{
    bbpssw_step_oracle, build_state, diag_ghz, extract_weights, isotropic_pair, lambda_oracle,
    lambda_pair, prepare_pair_oracle, teleport_channel_state, teleport_explicit, teleport_oracle,
    OracleCap,
};
use crate::bipartite::{bbpssw_step, teleport_fidelity};
use crate::error::Result;
use crate::multipartite::{lambda_step, success_probability};
use crate::states::{input_state, IterationState};

pub const DEFAULT_SEED: u64 = 0x5eed_2011;
pub const RANDOM_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self { checks: Vec::new(), pass: true }
    }

    pub fn record(&mut self, name: impl Into<String>, max_error: f64, tolerance: f64) {
        // NaN errors fail
        let pass = max_error <= tolerance;
        self.pass &= pass;
        self.checks.push(Check { name: name.into(), max_error, tolerance, pass });
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.pass &= other.pass;
        self.checks.extend(other.checks);
    }
}

/// Sub-normalized random family weights: uniform simplex direction times a
/// trace drawn from (0, 1].
pub fn random_weights(rng: &mut StdRng) -> (f64, f64, f64) {
    let u: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
    let total: f64 = u.iter().sum();
    let t: f64 = 1.0 - rng.gen::<f64>();
    (t * u[0] / total, t * u[1] / total, t * u[2] / total)
}

/// All two-copy identities, the success probability on white-noise inputs,
/// and the recurrence on random family states.
pub fn verify_lambda_identities(n: usize, tol: f64, seed: u64, cap: OracleCap) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new();
    rep.extend(lambda_identity_checks(n, tol, cap)?);
    rep.extend(success_probability_checks(n, tol, cap)?);
    rep.extend(recurrence_checks(n, tol, seed, RANDOM_SAMPLES, cap)?);
    Ok(rep)
}

pub fn lambda_identity_checks(n: usize, tol: f64, cap: OracleCap) -> Result<VerificationReport> {
    let id = DensityMatrix::identity(n);
    let ghz = DensityMatrix::from_pure(&PureState::ghz(n));
    let diag = diag_ghz(n);
    let cases: [(&str, &DensityMatrix, &DensityMatrix, DensityMatrix); 9] = [
        ("1x1 -> 1", &id, &id, id.clone()),
        ("GHZxGHZ -> GHZ/2", &ghz, &ghz, ghz.scale(0.5)),
        ("GHZx1 -> diag", &ghz, &id, diag.clone()),
        ("1xGHZ -> diag", &id, &ghz, diag.clone()),
        ("1xdiag -> diag", &id, &diag, diag.clone()),
        ("diagx1 -> diag", &diag, &id, diag.clone()),
        ("GHZxdiag -> diag/2", &ghz, &diag, diag.scale(0.5)),
        ("diagxGHZ -> diag/2", &diag, &ghz, diag.scale(0.5)),
        ("diagxdiag -> diag/2", &diag, &diag, diag.scale(0.5)),
    ];
    let mut rep = VerificationReport::new();
    for (name, a, b, expect) in cases {
        let out = lambda_pair(a, b, cap)?;
        rep.record(format!("n={n} identity {name}"), out.state.max_abs_diff(&expect)?, tol);
    }
    Ok(rep)
}

pub fn success_probability_checks(n: usize, tol: f64, cap: OracleCap) -> Result<VerificationReport> {
    let mut worst = 0.0f64;
    for i in 0..=10 {
        let q = i as f64 / 10.0;
        let rho = build_state(n, q, 1.0 - q, 0.0, cap)?;
        let oracle = lambda_oracle(&rho, cap)?.trace;
        let formula = success_probability(&input_state(n as u32, q)?)?;
        worst = worst.max((oracle - formula).abs());
    }
    let mut rep = VerificationReport::new();
    rep.record(format!("n={n} success probability on q-grid"), worst, tol);
    Ok(rep)
}

pub fn recurrence_checks(
    n: usize,
    tol: f64,
    seed: u64,
    samples: usize,
    cap: OracleCap,
) -> Result<VerificationReport> {
    let mut rng = StdRng::seed_from_u64(seed ^ n as u64);
    let (mut weight_err, mut residual, mut trace_err, mut physical) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let (q, r, s) = random_weights(&mut rng);
        let rho = build_state(n, q, r, s, cap)?;
        let out = lambda_oracle(&rho, cap)?;
        let fit = extract_weights(&out.state, cap)?;
        let want = lambda_step(&IterationState::new(n as u32, q, r, s)?)?;
        weight_err = weight_err
            .max((fit.state.q - want.q).abs())
            .max((fit.state.r - want.r).abs())
            .max((fit.state.s - want.s).abs());
        residual = residual.max(fit.residual);
        trace_err = trace_err.max((out.trace - want.trace()).abs());
        physical = physical
            .max(out.state.hermiticity_error())
            .max(-out.state.min_eigenvalue());
    }
    let mut rep = VerificationReport::new();
    rep.record(format!("n={n} recurrence vs oracle weights"), weight_err, tol);
    rep.record(format!("n={n} family closure residual"), residual, tol);
    rep.record(format!("n={n} recurrence trace"), trace_err, tol);
    rep.record(format!("n={n} outputs hermitian and PSD"), physical, tol.max(1e-10));
    Ok(rep)
}

/// Isotropic-pair preparation for every measurement branch.
pub fn preparation_checks(n: usize, tol: f64, cap: OracleCap) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new();
    for q in [0.0, 0.3, 0.7, 1.0] {
        let prep = prepare_pair_oracle(n, q, cap)?;
        let expect = isotropic_pair(q)?;
        rep.record(format!("n={n} q={q} prepared pair is isotropic"), prep.pair.max_abs_diff(&expect)?, tol);
        rep.record(format!("n={n} q={q} branch independence"), prep.branch_spread, tol);
    }
    Ok(rep)
}

pub const BBPSSW_GRID: usize = 21;

/// One distillation round on a 21-point grid. The partner-side success
/// probability is compared against the `(1 + q)/4` accounting used by the
/// planner.
pub fn bbpssw_checks(tol: f64) -> Result<VerificationReport> {
    let (mut fid_err, mut p_err, mut dealer_err) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..BBPSSW_GRID {
        let q = i as f64 / (BBPSSW_GRID - 1) as f64;
        let o = bbpssw_step_oracle(q)?;
        let f = bbpssw_step(q)?;
        fid_err = fid_err.max((o.fidelity_next - (1.0 + 3.0 * f.q_next) / 4.0).abs());
        p_err = p_err.max((o.p_success - f.p_success).abs());
        dealer_err = dealer_err.max((o.dealer_zero - 0.5).abs());
    }
    let mut fixed_err = 0.0f64;
    for q in [0.0, 1.0 / 3.0, 1.0] {
        let o = bbpssw_step_oracle(q)?;
        fixed_err = fixed_err.max((o.fidelity_next - (1.0 + 3.0 * q) / 4.0).abs());
    }
    let mut rep = VerificationReport::new();
    rep.record("bbpssw fidelity vs recurrence", fid_err, tol);
    rep.record("bbpssw success probability vs (1+q)/4", p_err, tol);
    rep.record("bbpssw dealer outcome-0 probability = 1/2", dealer_err, tol);
    rep.record("bbpssw fixed points {0, 1/3, 1}", fixed_err, tol.min(1e-12));
    Ok(rep)
}

/// Closed-form teleportation fidelity against the channel simulation, and
/// the channel against explicit Bell measurements where the register fits.
pub fn teleport_checks(n: usize, tol: f64, cap: OracleCap) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new();
    let mut fid_err = 0.0f64;
    for q in [0.0, 0.5, 0.9, 1.0] {
        fid_err = fid_err.max((teleport_oracle(n, q, cap)? - teleport_fidelity(q, n as u32)?).abs());
    }
    rep.record(format!("n={n} teleport fidelity vs closed form"), fid_err, tol);
    if 3 * n - 2 <= cap.max_qubits && n <= 3 {
        let mut chan_err = 0.0f64;
        for q in [0.0, 0.5, 0.9, 1.0] {
            let explicit = teleport_explicit(n, q, cap)?;
            let channel = teleport_channel_state(n, q, cap)?;
            chan_err = chan_err
                .max(explicit.state.max_abs_diff(&channel)?)
                .max(explicit.outcome_prob_error)
                .max(explicit.outcome_spread);
        }
        rep.record(format!("n={n} Bell-measurement teleport = channel"), chan_err, tol.min(1e-12));
    }
    Ok(rep)
}
