//! Brute-force simulations of every protocol step, used as ground truth for
//! the closed-form recurrences.

use super::matrix::{hadamard, projector_x, DensityMatrix, PureState, PAULI_X, PAULI_Z};
use crate::error::{domain, PurifyError, Result};
use crate::states::{check_unit, IterationState};

/// Largest register (in qubits) any oracle operation may allocate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCap {
    pub max_qubits: usize,
}

impl OracleCap {
    pub const DEFAULT_QUBITS: usize = 10;

    pub fn new(max_qubits: usize) -> Self {
        Self { max_qubits }
    }

    fn check(&self, needed: usize) -> Result<()> {
        if needed > self.max_qubits {
            return Err(PurifyError::OracleCap { needed, cap: self.max_qubits });
        }
        Ok(())
    }
}

impl Default for OracleCap {
    fn default() -> Self {
        Self { max_qubits: Self::DEFAULT_QUBITS }
    }
}

/// `1/2 (|0..0><0..0| + |1..1><1..1|)`.
pub fn diag_ghz(n: usize) -> DensityMatrix {
    let ghz = DensityMatrix::from_pure(&PureState::ghz(n));
    let d = ghz.dim();
    let mut e = ghz.entries().clone();
    e[(0, d - 1)] = 0.0.into();
    e[(d - 1, 0)] = 0.0.into();
    DensityMatrix::from_matrix(e).expect("square")
}

/// `q |GHZ><GHZ| + (r / 2^n) 1 + s rho_diag` as an explicit matrix.
pub fn build_state(n: usize, q: f64, r: f64, s: f64, cap: OracleCap) -> Result<DensityMatrix> {
    if n < 2 {
        return Err(domain(format!("oracle states need n >= 2, got {n}")));
    }
    cap.check(n)?;
    if [q, r, s].iter().any(|w| !(*w >= 0.0)) {
        return Err(domain(format!("negative weight in ({q}, {r}, {s})")));
    }
    let ghz = DensityMatrix::from_pure(&PureState::ghz(n));
    let id = DensityMatrix::identity(n);
    let d = (1usize << n) as f64;
    ghz.scale(q).add(&id.scale(r / d))?.add(&diag_ghz(n).scale(s))
}

/// Result of the two-copy map: unnormalized output and its trace.
#[derive(Debug, Clone)]
pub struct LambdaOutput {
    pub state: DensityMatrix,
    pub trace: f64,
}

/// Two-copy map on arbitrary operators `a (x) b`.
///
/// Copy one occupies qubits `0..n`, copy two `n..2n`. Party `i` applies a
/// CNOT from qubit `i` (control) to `n + i` (target); every target is
/// projected onto `|0>` and traced out.
pub fn lambda_pair(a: &DensityMatrix, b: &DensityMatrix, cap: OracleCap) -> Result<LambdaOutput> {
    let n = a.num_qubits();
    if b.num_qubits() != n {
        return Err(PurifyError::DimensionMismatch(format!(
            "copies have {n} and {} qubits",
            b.num_qubits()
        )));
    }
    cap.check(2 * n)?;
    let mut joint = a.kron(b);
    for i in 0..n {
        joint = joint.apply_cnot(i, n + i);
    }
    for i in 0..n {
        joint = joint.project_z(n + i, 0);
    }
    let targets: Vec<usize> = (n..2 * n).collect();
    let state = joint.partial_trace(&targets)?;
    let trace = state.trace().re;
    Ok(LambdaOutput { state, trace })
}

pub fn lambda_oracle(rho: &DensityMatrix, cap: OracleCap) -> Result<LambdaOutput> {
    if !(rho.trace().re > 0.0) {
        return Err(domain("two-copy map needs an input with positive trace"));
    }
    lambda_pair(rho, rho, cap)
}

/// Weights read back from a matrix assumed to lie in the state family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyFit {
    pub state: IterationState,
    /// Max-norm distance between the matrix and the rebuilt family member.
    pub residual: f64,
}

pub fn extract_weights(rho: &DensityMatrix, cap: OracleCap) -> Result<FamilyFit> {
    let n = rho.num_qubits();
    let d = rho.dim();
    let q = 2.0 * rho.get(0, d - 1).re;
    let inner: f64 = (1..d - 1).map(|i| rho.get(i, i).re).sum::<f64>() / (d - 2) as f64;
    let r = inner * d as f64;
    let corner = 0.5 * (rho.get(0, 0).re + rho.get(d - 1, d - 1).re);
    let s = 2.0 * (corner - q / 2.0 - inner);
    let rebuilt = build_state(n, q.max(0.0), r.max(0.0), s.max(0.0), cap)?;
    let state = IterationState::from_parts(n as u32, q, r, s);
    Ok(FamilyFit { state, residual: rho.max_abs_diff(&rebuilt)? })
}

/// Dealer-partner state after every other party measured in the X basis.
#[derive(Debug, Clone)]
pub struct PairPreparation {
    pub pair: DensityMatrix,
    /// Largest max-norm deviation of any corrected branch from branch 0.
    pub branch_spread: f64,
    pub branch_probs: Vec<f64>,
}

/// Parties `2..n` measure `|+>/|->` on the white-noise input of weight `q`;
/// the dealer (qubit 0) applies `Z` when the number of `|->` outcomes is
/// odd. Every branch is enumerated.
pub fn prepare_pair_oracle(n: usize, q: f64, cap: OracleCap) -> Result<PairPreparation> {
    if n < 3 {
        return Err(domain("pair preparation needs n >= 3"));
    }
    check_unit("q", q)?;
    let rho = build_state(n, q, 1.0 - q, 0.0, cap)?;
    let others: Vec<usize> = (2..n).collect();
    let mut first: Option<DensityMatrix> = None;
    let mut spread = 0.0f64;
    let mut probs = Vec::with_capacity(1 << others.len());
    for branch in 0..(1usize << others.len()) {
        let mut m = rho.clone();
        let mut minus_count = 0;
        for (pos, &party) in others.iter().enumerate() {
            let minus = branch & (1 << pos) != 0;
            minus_count += minus as usize;
            m = m.apply_local(party, &projector_x(minus));
        }
        let reduced = m.partial_trace(&others)?;
        let p = reduced.trace().re;
        probs.push(p);
        let mut pair = reduced.scale(1.0 / p);
        if minus_count % 2 == 1 {
            pair = pair.apply_local(0, &PAULI_Z);
        }
        match &first {
            None => first = Some(pair),
            Some(f) => spread = spread.max(pair.max_abs_diff(f)?),
        }
    }
    Ok(PairPreparation { pair: first.expect("at least one branch"), branch_spread: spread, branch_probs: probs })
}

/// `q |Phi+><Phi+| + (1 - q) 1/4`.
pub fn isotropic_pair(q: f64) -> Result<DensityMatrix> {
    check_unit("q", q)?;
    build_state(2, q, 1.0 - q, 0.0, OracleCap::default())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BbpsswOutcome {
    /// `<Phi+|rho|Phi+>` of the kept pair, normalized.
    pub fidelity_next: f64,
    /// Probability both target qubits read 0.
    pub p_success: f64,
    /// Probability the dealer's target reads 0, regardless of the partner.
    pub dealer_zero: f64,
}

/// Two isotropic pairs, bilateral CNOT, keep the source pair when both
/// targets read 0.
///
/// Qubits: `[source dealer, source partner, target dealer, target partner]`.
pub fn bbpssw_step_oracle(q: f64) -> Result<BbpsswOutcome> {
    let pair = isotropic_pair(q)?;
    let joint = pair.kron(&pair).apply_cnot(0, 2).apply_cnot(1, 3);
    let dealer = joint.project_z(2, 0);
    let dealer_zero = dealer.trace().re;
    let both = dealer.project_z(3, 0);
    let kept = both.partial_trace(&[2, 3])?;
    let p_success = kept.trace().re;
    let fidelity_next = kept.fidelity(&PureState::phi_plus())? / p_success;
    Ok(BbpsswOutcome { fidelity_next, p_success, dealer_zero })
}

/// GHZ state after qubits `1..n` pass through the teleportation channel of
/// an isotropic pair of weight `q` (a depolarizing channel with the same `q`).
pub fn teleport_channel_state(n: usize, q: f64, cap: OracleCap) -> Result<DensityMatrix> {
    if n < 2 {
        return Err(domain("teleportation needs n >= 2"));
    }
    check_unit("q", q)?;
    cap.check(n)?;
    let mut rho = DensityMatrix::from_pure(&PureState::ghz(n));
    for j in 1..n {
        rho = rho.depolarize(j, q);
    }
    Ok(rho)
}

pub fn teleport_oracle(n: usize, q: f64, cap: OracleCap) -> Result<f64> {
    teleport_channel_state(n, q, cap)?.fidelity(&PureState::ghz(n))
}

#[derive(Debug, Clone)]
pub struct ExplicitTeleport {
    /// `[GHZ qubit 0, partner 1, .., partner n-1]`.
    pub state: DensityMatrix,
    /// Largest deviation of any single Bell outcome's probability from 1/4.
    pub outcome_prob_error: f64,
    /// Largest max-norm deviation between corrected, normalized outcomes.
    pub outcome_spread: f64,
}

/// Full Bell-measurement teleportation of GHZ qubits `1..n`.
///
/// Layout: `[g_0 .. g_{n-1}, d_1, p_1, .., d_{n-1}, p_{n-1}]` where `(d_j, p_j)`
/// is the pair shared with partner `j`. Outcome `(m_g, m_d)` is corrected by
/// `X^{m_d}` then `Z^{m_g}` on `p_j`.
pub fn teleport_explicit(n: usize, q: f64, cap: OracleCap) -> Result<ExplicitTeleport> {
    if n < 2 {
        return Err(domain("teleportation needs n >= 2"));
    }
    let total = 3 * n - 2;
    cap.check(total)?;
    let pair = isotropic_pair(q)?;
    let mut rho = DensityMatrix::from_pure(&PureState::ghz(n));
    for _ in 1..n {
        rho = rho.kron(&pair);
    }
    let mut prob_err = 0.0f64;
    let mut spread = 0.0f64;
    for j in 1..n {
        let g = j;
        let dq = n + 2 * (j - 1);
        let pq = dq + 1;
        let rotated = rho.apply_cnot(g, dq).apply_local(g, &hadamard());
        let mut sum: Option<DensityMatrix> = None;
        let mut reference: Option<DensityMatrix> = None;
        for m_g in 0..2u8 {
            for m_d in 0..2u8 {
                let mut branch = rotated
                    .project_z(g, m_g)
                    .project_z(dq, m_d);
                if m_d == 1 {
                    branch = branch.apply_local(pq, &PAULI_X);
                }
                if m_g == 1 {
                    branch = branch.apply_local(pq, &PAULI_Z);
                }
                let p = branch.trace().re;
                prob_err = prob_err.max((p - 0.25).abs());
                // compare outcomes on the surviving qubits only
                let reduced = branch.partial_trace(&[g, dq])?.scale(1.0 / p);
                match &reference {
                    None => reference = Some(reduced),
                    Some(r) => spread = spread.max(reduced.max_abs_diff(r)?),
                }
                sum = Some(match sum {
                    None => branch,
                    Some(acc) => acc.add(&branch)?,
                });
            }
        }
        rho = sum.expect("four outcomes");
    }
    let measured: Vec<usize> = (1..n).chain((1..n).map(|j| n + 2 * (j - 1))).collect();
    let state = rho.partial_trace(&measured)?;
    Ok(ExplicitTeleport { state, outcome_prob_error: prob_err, outcome_spread: spread })
}
