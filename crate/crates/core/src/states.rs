//! The three-weight state family shared by both protocols.
//!
//! Every state handled by the parametric code is
//!
//! ```text
//! q |GHZ><GHZ| + (r / 2^n) 1 + s rho_diag,   rho_diag = (|0..0><0..0| + |1..1><1..1|) / 2
//! ```
//!
//! Weights are not renormalized after post-selection: `q + r + s` is the
//! trace of the (possibly sub-normalized) operator.

use crate::error::{domain, Result};

pub const MIN_PARTIES: u32 = 2;
pub const MAX_PARTIES: u32 = 64;

/// Tolerance on `|q + r + s - 1|` for a state to count as normalized.
pub const NORM_TOL: f64 = 1e-12;

/// `2^n` as a double. Exact for every supported `n`.
pub fn dim(n: u32) -> f64 {
    (n as f64).exp2()
}

pub(crate) fn check_parties(n: u32) -> Result<()> {
    if !(MIN_PARTIES..=MAX_PARTIES).contains(&n) {
        return Err(domain(format!(
            "party count {n} outside {MIN_PARTIES}..={MAX_PARTIES}"
        )));
    }
    Ok(())
}

pub(crate) fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain(format!("{name} = {x} outside [0, 1]")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationState {
    pub n: u32,
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub normalized: bool,
}

impl IterationState {
    pub fn new(n: u32, q: f64, r: f64, s: f64) -> Result<Self> {
        check_parties(n)?;
        for (name, w) in [("q", q), ("r", r), ("s", s)] {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(domain(format!("weight {name} = {w} must be finite and nonnegative")));
            }
        }
        Ok(Self::from_parts(n, q, r, s))
    }

    pub(crate) fn from_parts(n: u32, q: f64, r: f64, s: f64) -> Self {
        let normalized = (q + r + s - 1.0).abs() <= NORM_TOL;
        Self { n, q, r, s, normalized }
    }

    pub fn trace(&self) -> f64 {
        self.q + self.r + self.s
    }

    /// Rescales the weights to unit trace.
    pub fn normalize(&self) -> Result<Self> {
        let t = self.trace();
        if !(t > 0.0) {
            return Err(domain("cannot normalize a zero-trace state"));
        }
        let mut out = Self::from_parts(self.n, self.q / t, self.r / t, self.s / t);
        out.normalized = true;
        Ok(out)
    }

    /// GHZ fidelity of the normalized state.
    pub fn fidelity_ghz(&self) -> Result<f64> {
        fidelity_ghz(self)
    }
}

/// The white-noise input `q |GHZ><GHZ| + (1 - q) 1 / 2^n`.
pub fn input_state(n: u32, q: f64) -> Result<IterationState> {
    check_parties(n)?;
    check_unit("q", q)?;
    let mut st = IterationState::from_parts(n, q, 1.0 - q, 0.0);
    st.normalized = true;
    Ok(st)
}

/// `<GHZ|rho|GHZ> / tr(rho)`.
///
/// The identity part contributes `r / 2^n` and `rho_diag` contributes `s / 2`
/// independently of `n`.
pub fn fidelity_ghz(state: &IterationState) -> Result<f64> {
    let t = state.trace();
    if !(t > 0.0) {
        return Err(domain("GHZ fidelity of a zero-trace state is undefined"));
    }
    Ok((state.q + state.r / dim(state.n) + state.s / 2.0) / t)
}

/// The user supplies exactly one of the GHZ weight or the input in-fidelity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseInput {
    GhzWeight(f64),
    InFidelity(f64),
}

/// Both noise parametrizations of the white-noise input, kept consistent via
/// `delta = (2^n - 1) / 2^n * (1 - q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub n: u32,
    pub q: f64,
    pub delta: f64,
}

impl NoiseSpec {
    pub fn fidelity(&self) -> f64 {
        1.0 - self.delta
    }
}

/// Largest in-fidelity a white-noise GHZ input can have (reached at `q = 0`).
pub fn max_in_fidelity(n: u32) -> f64 {
    let d = dim(n);
    (d - 1.0) / d
}

pub fn convert_noise(n: u32, input: NoiseInput) -> Result<NoiseSpec> {
    check_parties(n)?;
    let d = dim(n);
    let scale = (d - 1.0) / d;
    match input {
        NoiseInput::GhzWeight(q) => {
            check_unit("q", q)?;
            Ok(NoiseSpec { n, q, delta: scale * (1.0 - q) })
        }
        NoiseInput::InFidelity(delta) => {
            if !(0.0..=scale).contains(&delta) {
                return Err(domain(format!(
                    "in-fidelity {delta} outside [0, {scale}] for n = {n}"
                )));
            }
            // 1 - delta * 2^n / (2^n - 1), clamped against the last-ulp overshoot at delta = scale
            let q = (1.0 - delta * d / (d - 1.0)).max(0.0);
            Ok(NoiseSpec { n, q, delta })
        }
    }
}
