//! Small dense operators for one and two qubits, entropies in bits, partial
//! traces and projective measurements.
//!
//! Two-qubit matrices use the basis order |00>, |01>, |10>, |11>, with the
//! first factor belonging to subsystem A. Index `2 * a + b` addresses the
//! basis vector |a b>.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4, Vector2};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};

pub type C64 = Complex64;

/// Tolerance for Hermiticity and unit trace when validating a state.
pub const STATE_TOL: f64 = 1e-10;
/// Eigenvalues may dip this far below zero before a state is rejected.
pub const POSITIVITY_TOL: f64 = 1e-12;
/// Eigenvalues and probabilities below this are treated as exact zeros.
pub const ZERO_CUTOFF: f64 = 1e-14;

const PROB_CLAMP: f64 = 1e-12;

#[inline]
fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Pauli matrix by index: 0 = I, 1 = X, 2 = Y, 3 = Z.
pub fn pauli(index: usize) -> Matrix2<C64> {
    let (o, l, i) = (c(0.0), c(1.0), C64::i());
    match index {
        0 => Matrix2::new(l, o, o, l),
        1 => Matrix2::new(o, l, l, o),
        2 => Matrix2::new(o, -i, i, o),
        3 => Matrix2::new(l, o, o, -l),
        _ => panic!("pauli index {index} out of range"),
    }
}

/// -sum p log2 p over a spectrum, skipping entries below [`ZERO_CUTOFF`].
pub fn entropy_of_spectrum(spectrum: &[f64]) -> f64 {
    spectrum
        .iter()
        .filter(|&&p| p > ZERO_CUTOFF)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Shannon entropy of the distribution (p, 1 - p), in bits.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(-PROB_CLAMP..=1.0 + PROB_CLAMP).contains(&p) {
        return Err(domain("p", p, "[0, 1]"));
    }
    let p = p.clamp(0.0, 1.0);
    Ok(entropy_of_spectrum(&[p, 1.0 - p]))
}

/// Shared behaviour of the one- and two-qubit operator types.
pub trait DensityOperator {
    const DIM: usize;

    /// Largest entry of |rho - rho^dagger|.
    fn hermiticity_defect(&self) -> f64;

    fn trace(&self) -> C64;

    /// Eigenvalues of the Hermitian part, ascending.
    fn spectrum(&self) -> Vec<f64>;

    /// Hermitian with unit trace, to [`STATE_TOL`].
    fn check_normalized(&self) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr - c(1.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "trace {} + {}i differs from 1",
                tr.re, tr.im
            )));
        }
        Ok(())
    }

    /// Full state validation: normalization plus positivity.
    fn check_state(&self) -> Result<()> {
        self.check_normalized()?;
        let min = self.spectrum()[0];
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy<D: DensityOperator>(rho: &D) -> Result<f64> {
    rho.check_normalized()?;
    Ok(entropy_of_spectrum(&rho.spectrum()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitOperator(Matrix2<C64>);

impl QubitOperator {
    pub fn new(m: Matrix2<C64>) -> Self {
        Self(m)
    }

    pub fn from_real(a: f64, b: f64, c_: f64, d: f64) -> Self {
        Self(Matrix2::new(c(a), c(b), c(c_), c(d)))
    }

    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn maximally_mixed() -> Self {
        Self(Matrix2::identity() * c(0.5))
    }

    /// |v><v| for a (not necessarily normalized) vector.
    pub fn projector(v: &Vector2<C64>) -> Self {
        Self(v * v.adjoint())
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.0
    }

    pub fn entry(&self, r: usize, col: usize) -> C64 {
        self.0[(r, col)]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0 * c(s))
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Eigenvalues of a 2x2 Hermitian matrix, ascending. The smaller one is
/// recovered from the determinant to keep it accurate for near-pure states.
pub(crate) fn hermitian2_eigenvalues(a: f64, d: f64, off_norm_sqr: f64) -> [f64; 2] {
    let half_tr = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + off_norm_sqr).sqrt();
    let hi = half_tr + r;
    let det = a * d - off_norm_sqr;
    let lo = if hi > 0.0 { det / hi } else { half_tr - r };
    [lo, hi]
}

impl DensityOperator for QubitOperator {
    const DIM: usize = 2;

    fn hermiticity_defect(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn trace(&self) -> C64 {
        self.0.trace()
    }

    fn spectrum(&self) -> Vec<f64> {
        let m = &self.0;
        let off = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
        hermitian2_eigenvalues(m[(0, 0)].re, m[(1, 1)].re, off.norm_sqr()).to_vec()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitOperator(Matrix4<C64>);

impl TwoQubitOperator {
    pub fn new(m: Matrix4<C64>) -> Self {
        Self(m)
    }

    pub fn zero() -> Self {
        Self(Matrix4::zeros())
    }

    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    pub fn maximally_mixed() -> Self {
        Self(Matrix4::identity() * c(0.25))
    }

    pub fn kron(a: &QubitOperator, b: &QubitOperator) -> Self {
        Self(a.0.kronecker(&b.0).fixed_view::<4, 4>(0, 0).into_owned())
    }

    /// sigma_i (x) sigma_j with Pauli indices 0..=3.
    pub fn pauli_product(i: usize, j: usize) -> Self {
        Self::kron(&QubitOperator(pauli(i)), &QubitOperator(pauli(j)))
    }

    /// |psi><psi| for a four-component amplitude vector in |00>,|01>,|10>,|11> order.
    pub fn pure(amplitudes: [C64; 4]) -> Self {
        let v = nalgebra::Vector4::from(amplitudes);
        Self(v * v.adjoint())
    }

    /// (|01> - |10>)/sqrt(2).
    pub fn singlet() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::pure([c(0.0), c(s), c(-s), c(0.0)])
    }

    /// |ab><ab| for computational basis labels.
    pub fn basis_projector(a: usize, b: usize) -> Self {
        let mut m = Matrix4::zeros();
        m[(2 * a + b, 2 * a + b)] = c(1.0);
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }

    pub fn entry(&self, r: usize, col: usize) -> C64 {
        self.0[(r, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// (rho + rho^dagger) / 2.
    pub fn hermitian_part(&self) -> Self {
        Self((self.0 + self.0.adjoint()) * c(0.5))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0 * c(s))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0 + other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0 - other.0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    /// Re Tr[self * other].
    pub fn trace_product(&self, other: &Self) -> f64 {
        (self.0 * other.0).trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Swaps the roles of A and B.
    pub fn exchange(&self) -> Self {
        let swap = |k: usize| 2 * (k % 2) + k / 2;
        Self(Matrix4::from_fn(|r, col| self.0[(swap(r), swap(col))]))
    }

    /// Eigen-decomposition of the Hermitian part: (ascending eigenvalues, eigenvectors as columns).
    pub fn hermitian_eigen(&self) -> ([f64; 4], Matrix4<C64>) {
        let eig = self.hermitian_part().0.symmetric_eigen();
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = [0, 1, 2, 3].map(|k| eig.eigenvalues[order[k]]);
        let vectors = Matrix4::from_fn(|r, col| eig.eigenvectors[(r, order[col])]);
        (values, vectors)
    }
}

impl DensityOperator for TwoQubitOperator {
    const DIM: usize = 4;

    fn hermiticity_defect(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn trace(&self) -> C64 {
        self.0.trace()
    }

    fn spectrum(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .hermitian_part()
            .0
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

/// Reduced state on `keep`.
pub fn partial_trace(rho: &TwoQubitOperator, keep: Subsystem) -> QubitOperator {
    let m = rho.matrix();
    let mut out = Matrix2::zeros();
    for r in 0..2 {
        for col in 0..2 {
            out[(r, col)] = match keep {
                Subsystem::A => m[(2 * r, 2 * col)] + m[(2 * r + 1, 2 * col + 1)],
                Subsystem::B => m[(r, col)] + m[(2 + r, 2 + col)],
            };
        }
    }
    QubitOperator(out)
}

/// Named single-qubit Pauli eigenbases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PauliBasis {
    X,
    Y,
    Z,
}

/// Rank-1 projective measurement along the Bloch direction (theta, phi).
///
/// Outcome 0 projects onto |n> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>,
/// outcome 1 onto the orthogonal vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochProjector {
    theta: f64,
    phi: f64,
}

impl BlochProjector {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(domain("theta", theta, "[0, pi]"));
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(domain("phi", phi, "[0, 2 pi)"));
        }
        Ok(Self { theta, phi })
    }

    /// Maps arbitrary angles onto the canonical chart: the same outcome-0
    /// direction, with theta in [0, pi] and phi in [0, 2 pi).
    pub fn wrapped(theta: f64, phi: f64) -> Self {
        let mut t = theta.rem_euclid(2.0 * PI);
        let mut p = phi;
        if t > PI {
            t = 2.0 * PI - t;
            p += PI;
        }
        let mut p = p.rem_euclid(2.0 * PI);
        if p >= 2.0 * PI {
            p = 0.0;
        }
        Self { theta: t, phi: p }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// The projector pair with outcomes relabelled: direction (pi - theta, phi + pi).
    pub fn relabelled(&self) -> Self {
        Self::wrapped(PI - self.theta, self.phi + PI)
    }

    /// Orthonormal outcome vectors (|n>, |n_perp>).
    pub fn vectors(&self) -> [Vector2<C64>; 2] {
        let (s, co) = (0.5 * self.theta).sin_cos();
        let e = C64::from_polar(1.0, self.phi);
        [
            Vector2::new(c(co), e * s),
            Vector2::new(c(s), -e * co),
        ]
    }

    pub fn projectors(&self) -> [QubitOperator; 2] {
        self.vectors().map(|v| QubitOperator::projector(&v))
    }

    /// Orthogonality, rank one and completeness of the pair, to 1e-12.
    pub fn check(&self) -> Result<()> {
        let [p0, p1] = self.projectors();
        let tol = 1e-12;
        let ortho = (p0.0 * p1.0).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let complete = (p0.0 + p1.0 - Matrix2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let rank = (p0.0.trace() - c(1.0)).norm().max((p1.0.trace() - c(1.0)).norm());
        if ortho > tol || complete > tol || rank > tol {
            return Err(Error::InvalidBasis(format!(
                "projector pair defects: orthogonality {ortho:e}, completeness {complete:e}, rank {rank:e}"
            )));
        }
        Ok(())
    }
}

impl From<PauliBasis> for BlochProjector {
    fn from(b: PauliBasis) -> Self {
        match b {
            PauliBasis::Z => Self { theta: 0.0, phi: 0.0 },
            PauliBasis::X => Self { theta: PI / 2.0, phi: 0.0 },
            PauliBasis::Y => Self { theta: PI / 2.0, phi: PI / 2.0 },
        }
    }
}

/// One outcome of a local projective measurement. `state` is `None` when the
/// outcome has (numerically) zero probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementOutcome {
    pub probability: f64,
    pub state: Option<QubitOperator>,
}

/// <n|_M rho |n>_M: the unnormalized conditional state of the other party.
pub(crate) fn contract_measured(
    rho: &TwoQubitOperator,
    which: Subsystem,
    n: &Vector2<C64>,
) -> QubitOperator {
    let m = rho.matrix();
    let idx = |measured: usize, other: usize| match which {
        Subsystem::A => 2 * measured + other,
        Subsystem::B => 2 * other + measured,
    };
    let mut out = Matrix2::zeros();
    for r in 0..2 {
        for col in 0..2 {
            let mut acc = c(0.0);
            for a in 0..2 {
                for a2 in 0..2 {
                    acc += n[a].conj() * m[(idx(a, r), idx(a2, col))] * n[a2];
                }
            }
            out[(r, col)] = acc;
        }
    }
    QubitOperator(out)
}

/// Measures `which` in `basis`, returning outcome probabilities and the
/// normalized conditional states of the other subsystem.
pub fn measure_subsystem(
    rho: &TwoQubitOperator,
    which: Subsystem,
    basis: impl Into<BlochProjector>,
) -> Result<[MeasurementOutcome; 2]> {
    rho.check_state()?;
    let basis = basis.into();
    basis.check()?;
    Ok(basis.vectors().map(|v| {
        let unnormalized = contract_measured(rho, which, &v);
        let p = unnormalized.trace().re;
        if p < ZERO_CUTOFF {
            MeasurementOutcome {
                probability: 0.0,
                state: None,
            }
        } else {
            MeasurementOutcome {
                probability: p,
                state: Some(unnormalized.scale(1.0 / p)),
            }
        }
    }))
}

/// The dephased state sum_k (P_k (x) I) rho (P_k (x) I) for a measurement on `which`.
pub fn dephase(
    rho: &TwoQubitOperator,
    which: Subsystem,
    basis: impl Into<BlochProjector>,
) -> TwoQubitOperator {
    let id = QubitOperator::identity();
    basis
        .into()
        .projectors()
        .iter()
        .map(|p| {
            let k = match which {
                Subsystem::A => TwoQubitOperator::kron(p, &id),
                Subsystem::B => TwoQubitOperator::kron(&id, p),
            };
            k.mul(rho).mul(&k)
        })
        .fold(TwoQubitOperator::zero(), |acc, t| acc.add(&t))
}
