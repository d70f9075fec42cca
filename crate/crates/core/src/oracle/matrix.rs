//! Dense qubit density matrices.
//!
//! Qubit 0 is the most significant bit of a basis index: for `m` qubits, qubit
//! `k` sits at bit position `m - 1 - k`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{PurifyError, Result};

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub const PAULI_X: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
pub const PAULI_Y: Mat2 = [
    [ZERO, Complex64::new(0.0, -1.0)],
    [Complex64::new(0.0, 1.0), ZERO],
];
pub const PAULI_Z: Mat2 = [[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]];

pub fn hadamard() -> Mat2 {
    let h = c(std::f64::consts::FRAC_1_SQRT_2);
    [[h, h], [h, -h]]
}

/// `|b><b|` in the computational basis.
pub fn projector_z(bit: u8) -> Mat2 {
    if bit == 0 {
        [[ONE, ZERO], [ZERO, ZERO]]
    } else {
        [[ZERO, ZERO], [ZERO, ONE]]
    }
}

/// `|+><+|` for `minus = false`, `|-><-|` otherwise.
pub fn projector_x(minus: bool) -> Mat2 {
    let h = c(0.5);
    let o = if minus { -h } else { h };
    [[h, o], [o, h]]
}

fn bit_of(num_qubits: usize, qubit: usize) -> usize {
    1 << (num_qubits - 1 - qubit)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(PurifyError::DimensionMismatch(format!(
                "amplitude vector of length {len} is not a qubit register"
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(PurifyError::Domain(format!("state norm {norm} is not 1")));
        }
        Ok(Self { num_qubits: len.trailing_zeros() as usize, amplitudes })
    }

    /// `(|0..0> + |1..1>) / sqrt(2)`.
    pub fn ghz(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[0] = c(std::f64::consts::FRAC_1_SQRT_2);
        amplitudes[dim - 1] = c(std::f64::consts::FRAC_1_SQRT_2);
        Self { num_qubits, amplitudes }
    }

    /// `|Phi+>`; identical to the two-qubit GHZ state.
    pub fn phi_plus() -> Self {
        Self::ghz(2)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn zeros(num_qubits: usize) -> Self {
        let d = 1 << num_qubits;
        Self { num_qubits, entries: DMatrix::zeros(d, d) }
    }

    /// The (unnormalized) identity operator.
    pub fn identity(num_qubits: usize) -> Self {
        let d = 1 << num_qubits;
        Self { num_qubits, entries: DMatrix::identity(d, d) }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let a = psi.amplitudes();
        let d = a.len();
        Self {
            num_qubits: psi.num_qubits(),
            entries: DMatrix::from_fn(d, d, |i, j| a[i] * a[j].conj()),
        }
    }

    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        let d = entries.nrows();
        if d != entries.ncols() || d < 2 || !d.is_power_of_two() {
            return Err(PurifyError::DimensionMismatch(format!(
                "{}x{} is not a square qubit operator",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { num_qubits: d.trailing_zeros() as usize, entries })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { num_qubits: self.num_qubits, entries: &self.entries * c(factor) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self { num_qubits: self.num_qubits, entries: &self.entries + &other.entries })
    }

    /// `self (x) other`, with `self` on the leading qubits.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            num_qubits: self.num_qubits + other.num_qubits,
            entries: self.entries.kronecker(&other.entries),
        }
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(PurifyError::DimensionMismatch(format!(
                "{} vs {} qubits",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `M rho M^dagger` with the 2x2 operator `m` acting on `qubit`.
    pub fn apply_local(&self, qubit: usize, m: &Mat2) -> Self {
        let d = self.dim();
        let bit = bit_of(self.num_qubits, qubit);
        let mut rows = self.entries.clone();
        for i0 in (0..d).filter(|i| i & bit == 0) {
            let i1 = i0 | bit;
            for j in 0..d {
                let a = self.entries[(i0, j)];
                let b = self.entries[(i1, j)];
                rows[(i0, j)] = m[0][0] * a + m[0][1] * b;
                rows[(i1, j)] = m[1][0] * a + m[1][1] * b;
            }
        }
        let mut out = rows.clone();
        for j0 in (0..d).filter(|j| j & bit == 0) {
            let j1 = j0 | bit;
            for i in 0..d {
                let a = rows[(i, j0)];
                let b = rows[(i, j1)];
                out[(i, j0)] = a * m[0][0].conj() + b * m[0][1].conj();
                out[(i, j1)] = a * m[1][0].conj() + b * m[1][1].conj();
            }
        }
        Self { num_qubits: self.num_qubits, entries: out }
    }

    pub fn apply_cnot(&self, control: usize, target: usize) -> Self {
        let cb = bit_of(self.num_qubits, control);
        let tb = bit_of(self.num_qubits, target);
        // the permutation is its own inverse
        let perm: Vec<usize> = (0..self.dim()).map(|i| if i & cb != 0 { i ^ tb } else { i }).collect();
        let d = self.dim();
        Self {
            num_qubits: self.num_qubits,
            entries: DMatrix::from_fn(d, d, |i, j| self.entries[(perm[i], perm[j])]),
        }
    }

    /// `|b><b| rho |b><b|` on `qubit`; same as `apply_local` with
    /// `projector_z(bit)` but without the arithmetic.
    pub fn project_z(&self, qubit: usize, bit: u8) -> Self {
        let mask = bit_of(self.num_qubits, qubit);
        let keep = |i: usize| (i & mask != 0) == (bit == 1);
        let d = self.dim();
        Self {
            num_qubits: self.num_qubits,
            entries: DMatrix::from_fn(d, d, |i, j| {
                if keep(i) && keep(j) {
                    self.entries[(i, j)]
                } else {
                    ZERO
                }
            }),
        }
    }

    /// Traces out `traced`; the remaining qubits keep their relative order.
    pub fn partial_trace(&self, traced: &[usize]) -> Result<Self> {
        let m = self.num_qubits;
        if traced.iter().any(|&k| k >= m) {
            return Err(PurifyError::DimensionMismatch(format!(
                "cannot trace qubits {traced:?} of a {m}-qubit operator"
            )));
        }
        let kept: Vec<usize> = (0..m).filter(|k| !traced.contains(k)).collect();
        if kept.is_empty() {
            return Err(PurifyError::DimensionMismatch("cannot trace out every qubit".into()));
        }
        let traced: Vec<usize> = (0..m).filter(|k| traced.contains(k)).collect();
        let spread = |local: usize, qubits: &[usize]| -> usize {
            let w = qubits.len();
            qubits
                .iter()
                .enumerate()
                .filter(|(pos, _)| local & (1 << (w - 1 - pos)) != 0)
                .map(|(_, &q)| bit_of(m, q))
                .sum()
        };
        let dk = 1usize << kept.len();
        let dt = 1usize << traced.len();
        let kept_idx: Vec<usize> = (0..dk).map(|a| spread(a, &kept)).collect();
        let traced_idx: Vec<usize> = (0..dt).map(|t| spread(t, &traced)).collect();
        let out = DMatrix::from_fn(dk, dk, |a, b| {
            traced_idx
                .iter()
                .map(|&t| self.entries[(kept_idx[a] | t, kept_idx[b] | t)])
                .sum()
        });
        Ok(Self { num_qubits: kept.len(), entries: out })
    }

    /// Reorders qubits so that new qubit `j` is old qubit `perm[j]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        let m = self.num_qubits;
        let mut seen = vec![false; m];
        if perm.len() != m || perm.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
            return Err(PurifyError::DimensionMismatch(format!(
                "{perm:?} is not a permutation of {m} qubits"
            )));
        }
        let map = |new: usize| -> usize {
            (0..m)
                .filter(|&j| new & bit_of(m, j) != 0)
                .map(|j| bit_of(m, perm[j]))
                .sum()
        };
        let d = self.dim();
        let old: Vec<usize> = (0..d).map(map).collect();
        Ok(Self {
            num_qubits: m,
            entries: DMatrix::from_fn(d, d, |i, j| self.entries[(old[i], old[j])]),
        })
    }

    /// `q rho + (1 - q) (1/2) (x) tr_qubit(rho)`.
    pub fn depolarize(&self, qubit: usize, q: f64) -> Self {
        let mut mixed = self.clone();
        for p in [&PAULI_X, &PAULI_Y, &PAULI_Z] {
            mixed.entries += self.apply_local(qubit, p).entries;
        }
        Self {
            num_qubits: self.num_qubits,
            entries: &self.entries * c(q) + mixed.entries * c((1.0 - q) / 4.0),
        }
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.entries + self.entries.adjoint()) * c(0.5);
        herm.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Hermitian to `tol` and no eigenvalue below `-tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol && self.min_eigenvalue() >= -tol
    }

    /// Real part of `<psi|rho|psi>`.
    pub fn fidelity(&self, psi: &PureState) -> Result<f64> {
        if psi.num_qubits() != self.num_qubits {
            return Err(PurifyError::DimensionMismatch(format!(
                "{}-qubit state against {}-qubit operator",
                psi.num_qubits(),
                self.num_qubits
            )));
        }
        let a = psi.amplitudes();
        let mut acc = ZERO;
        for (i, ai) in a.iter().enumerate().filter(|(_, x)| x.norm_sqr() > 0.0) {
            for (j, aj) in a.iter().enumerate().filter(|(_, x)| x.norm_sqr() > 0.0) {
                acc += ai.conj() * self.entries[(i, j)] * aj;
            }
        }
        if acc.im.abs() > 1e-12 {
            return Err(PurifyError::Domain(format!(
                "overlap has imaginary part {}",
                acc.im
            )));
        }
        Ok(acc.re)
    }
}
