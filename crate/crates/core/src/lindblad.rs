//! Kossakowski-Lindblad generator for two co-located detectors coupled to a
//! common thermal field, its fixed points, and fixed-step RK4 trajectories.
//!
//! The generator acts on the 16 real Pauli coordinates r_ab = Tr[rho
//! sigma_a (x) sigma_b] of a Hermitian 4x4 matrix; index `4 * a + b`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, SMatrix, SVector};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::qstate::{DensityOperator, QubitOperator, TwoQubitOperator, C64};

pub type PauliCoords = SVector<f64, 16>;
pub type GeneratorMatrix = SMatrix<f64, 16, 16>;

/// Upper bound on dtau * gamma_plus accepted by [`integrate`].
pub const MAX_STEP: f64 = 0.01;
/// Samples with an eigenvalue below minus this abort the integration.
pub const POSITIVITY_GUARD: f64 = 1e-6;
const TRACE_PRESERVATION_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KossakowskiParams {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub gamma_zero: f64,
    pub omega_tilde: f64,
}

impl KossakowskiParams {
    /// Rates giving a positive semidefinite Kossakowski matrix:
    /// gamma_plus > 0, |gamma_minus| <= gamma_plus, gamma_plus/2 + gamma_zero >= 0.
    pub fn new(gamma_plus: f64, gamma_minus: f64, gamma_zero: f64, omega_tilde: f64) -> Result<Self> {
        if !(gamma_plus > 0.0) || !gamma_plus.is_finite() {
            return Err(domain("gamma_plus", gamma_plus, "gamma_plus > 0"));
        }
        if !(gamma_minus.abs() <= gamma_plus) {
            return Err(domain("gamma_minus", gamma_minus, "|gamma_minus| <= gamma_plus"));
        }
        if !(0.5 * gamma_plus + gamma_zero >= -1e-15 * gamma_plus) {
            return Err(domain("gamma_zero", gamma_zero, "gamma_plus/2 + gamma_zero >= 0"));
        }
        if !omega_tilde.is_finite() {
            return Err(domain("omega_tilde", omega_tilde, "finite"));
        }
        Ok(Self {
            gamma_plus,
            gamma_minus,
            gamma_zero,
            omega_tilde,
        })
    }

    /// gamma_minus / gamma_plus, which fixes the stationary state.
    pub fn ratio(&self) -> f64 {
        self.gamma_minus / self.gamma_plus
    }

    /// Rates from the default field model at gap `omega` and inverse temperature `beta`.
    pub fn thermal(omega: f64, beta: f64) -> Result<Self> {
        let (g_omega, g_zero) = default_wightman(omega, beta)?;
        kms_rates(omega, beta, g_omega, g_zero)
    }
}

/// Detailed-balance rates from the field spectrum at +omega and 0:
/// gamma_+- = (1 +- e^{-beta omega}) G(omega), gamma_0 = G(0) - gamma_+/2.
/// `beta` may be infinite (zero temperature).
pub fn kms_rates(omega: f64, beta: f64, g_omega: f64, g_zero: f64) -> Result<KossakowskiParams> {
    if !(omega > 0.0) {
        return Err(domain("omega", omega, "omega > 0"));
    }
    if !(beta > 0.0) {
        return Err(domain("beta", beta, "beta > 0"));
    }
    if !(g_omega > 0.0) {
        return Err(domain("G(omega)", g_omega, "G(omega) > 0"));
    }
    if !(g_zero >= 0.0) {
        return Err(domain("G(0)", g_zero, "G(0) >= 0"));
    }
    let boltzmann = (-beta * omega).exp();
    let gamma_plus = (1.0 + boltzmann) * g_omega;
    KossakowskiParams::new(
        gamma_plus,
        (1.0 - boltzmann) * g_omega,
        g_zero - 0.5 * gamma_plus,
        omega,
    )
}

/// Thermal spectrum lambda / (2 pi (1 - e^{-beta lambda})) of a massless
/// scalar field seen by a uniformly accelerated detector; 1/(2 pi beta) at 0.
pub fn wightman_spectrum(lambda: f64, beta: f64) -> f64 {
    if lambda == 0.0 {
        return 1.0 / (2.0 * PI * beta);
    }
    lambda / (2.0 * PI * -(-beta * lambda).exp_m1())
}

/// (G(omega), G(0)) of the default field model.
pub fn default_wightman(omega: f64, beta: f64) -> Result<(f64, f64)> {
    if !(omega > 0.0) {
        return Err(domain("omega", omega, "omega > 0"));
    }
    if !(beta > 0.0) {
        return Err(domain("beta", beta, "beta > 0"));
    }
    Ok((wightman_spectrum(omega, beta), wightman_spectrum(0.0, beta)))
}

/// C_ij = (gamma_+/2) delta_ij - i (gamma_-/2) eps_ij3 + gamma_0 delta_i3 delta_j3.
pub fn kossakowski_matrix(p: &KossakowskiParams) -> Matrix3<C64> {
    let mut c = Matrix3::<C64>::identity() * C64::from(0.5 * p.gamma_plus);
    c[(0, 1)] = C64::new(0.0, -0.5 * p.gamma_minus);
    c[(1, 0)] = C64::new(0.0, 0.5 * p.gamma_minus);
    c[(2, 2)] += C64::from(p.gamma_zero);
    c
}

fn collective(i: usize) -> TwoQubitOperator {
    TwoQubitOperator::pauli_product(i, 0).add(&TwoQubitOperator::pauli_product(0, i))
}

/// -i[(omega_tilde/2) Sigma_3, rho] + sum_ij sum_ab (C_ij/2)(2 s_j^b rho s_i^a - {s_i^a s_j^b, rho}).
///
/// The detector sums collapse onto the collective operators Sigma_i.
pub fn apply_master_equation(omega_tilde: f64, c: &Matrix3<C64>, rho: &TwoQubitOperator) -> TwoQubitOperator {
    let sigma: [TwoQubitOperator; 3] = [collective(1), collective(2), collective(3)];
    let r = rho.matrix();
    let h = sigma[2].matrix() * C64::from(0.5 * omega_tilde);
    let mut out = (h * r - r * h) * C64::new(0.0, -1.0);
    for i in 0..3 {
        for j in 0..3 {
            if c[(i, j)] == C64::from(0.0) {
                continue;
            }
            let (si, sj) = (sigma[i].matrix(), sigma[j].matrix());
            let sisj = si * sj;
            out += (sj * r * si * C64::from(2.0) - sisj * r - r * sisj) * (c[(i, j)] * 0.5);
        }
    }
    TwoQubitOperator::new(out)
}

fn pauli_basis() -> [TwoQubitOperator; 16] {
    std::array::from_fn(|k| TwoQubitOperator::pauli_product(k / 4, k % 4))
}

pub fn to_pauli_coords(rho: &TwoQubitOperator) -> PauliCoords {
    let basis = pauli_basis();
    PauliCoords::from_fn(|k, _| basis[k].trace_product(rho))
}

pub fn from_pauli_coords(r: &PauliCoords) -> TwoQubitOperator {
    pauli_basis()
        .iter()
        .zip(r.iter())
        .fold(TwoQubitOperator::zero(), |acc, (p, &rk)| acc.add(&p.scale(0.25 * rk)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Liouvillian {
    generator: GeneratorMatrix,
    rate_scale: f64,
}

impl Liouvillian {
    pub fn generator(&self) -> &GeneratorMatrix {
        &self.generator
    }

    /// gamma_plus, the time unit of the dynamics.
    pub fn rate_scale(&self) -> f64 {
        self.rate_scale
    }

    pub fn apply_coords(&self, r: &PauliCoords) -> PauliCoords {
        self.generator * r
    }

    pub fn apply(&self, rho: &TwoQubitOperator) -> TwoQubitOperator {
        from_pauli_coords(&self.apply_coords(&to_pauli_coords(rho)))
    }
}

/// Assembles the generator in Pauli coordinates. The rate scale is read back
/// from C_11 = gamma_plus / 2.
pub fn build_generator(omega_tilde: f64, c: &Matrix3<C64>) -> Result<Liouvillian> {
    let basis = pauli_basis();
    let mut generator = GeneratorMatrix::zeros();
    let mut hermiticity_defect: f64 = 0.0;
    for (k, pk) in basis.iter().enumerate() {
        let image = apply_master_equation(omega_tilde, c, pk);
        for (l, pl) in basis.iter().enumerate() {
            let t = pl.mul(&image).matrix().trace() * 0.25;
            generator[(l, k)] = t.re;
            hermiticity_defect = hermiticity_defect.max(t.im.abs());
        }
    }
    let rate_scale = 2.0 * c[(0, 0)].re;
    if !(rate_scale > 0.0) {
        return Err(domain("C_11", c[(0, 0)].re, "C_11 > 0"));
    }
    let trace_row = generator.row(0).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if trace_row > TRACE_PRESERVATION_TOL * rate_scale.max(1.0) {
        return Err(Error::NotTracePreserving(trace_row));
    }
    if hermiticity_defect > 1e-12 * rate_scale.max(1.0) {
        return Err(Error::Consistency(format!(
            "generator does not preserve Hermiticity (defect {hermiticity_defect:e})"
        )));
    }
    Ok(Liouvillian {
        generator,
        rate_scale,
    })
}

/// Generator for the given rates, with omega_tilde from the params.
pub fn generator_for(p: &KossakowskiParams) -> Result<Liouvillian> {
    build_generator(p.omega_tilde, &kossakowski_matrix(p))
}

/// ||L[rho]||_F / gamma_plus.
pub fn fixed_point_residual(l: &Liouvillian, rho: &TwoQubitOperator) -> f64 {
    l.apply(rho).frobenius_norm() / l.rate_scale
}

/// Tr[rho (sigma_1 (x) sigma_1 + sigma_2 (x) sigma_2 + sigma_3 (x) sigma_3)].
pub fn delta_of_state(rho: &TwoQubitOperator) -> f64 {
    (1..4)
        .map(|i| TwoQubitOperator::pauli_product(i, i).trace_product(rho))
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<(f64, TwoQubitOperator)>,
    pub step: f64,
    /// Largest |Tr rho - 1| seen before the per-step renormalization.
    pub max_trace_drift: f64,
}

impl Trajectory {
    pub fn last(&self) -> &(f64, TwoQubitOperator) {
        self.samples.last().expect("trajectory has at least the initial sample")
    }
}

/// Classical RK4 with fixed step, recording every step.
pub fn integrate(l: &Liouvillian, rho0: &TwoQubitOperator, tau_max: f64, dtau: f64) -> Result<Trajectory> {
    integrate_strided(l, rho0, tau_max, dtau, 1)
}

/// As [`integrate`], but records only every `stride`-th step (and the last one).
pub fn integrate_strided(
    l: &Liouvillian,
    rho0: &TwoQubitOperator,
    tau_max: f64,
    dtau: f64,
    stride: usize,
) -> Result<Trajectory> {
    if !(dtau > 0.0) {
        return Err(domain("dtau", dtau, "dtau > 0"));
    }
    if !(tau_max >= 0.0) || !tau_max.is_finite() {
        return Err(domain("tau_max", tau_max, "finite, >= 0"));
    }
    let scaled = dtau * l.rate_scale;
    if scaled > MAX_STEP * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge(scaled));
    }
    rho0.check_state()?;
    let stride = stride.max(1);

    let g = &l.generator;
    let steps = (tau_max / dtau).round() as usize;
    let mut r = to_pauli_coords(&rho0.hermitian_part());
    r[0] = 1.0;
    let mut samples = vec![(0.0, from_pauli_coords(&r))];
    let mut max_trace_drift: f64 = 0.0;

    for n in 1..=steps {
        let k1 = g * r;
        let k2 = g * (r + k1 * (0.5 * dtau));
        let k3 = g * (r + k2 * (0.5 * dtau));
        let k4 = g * (r + k3 * dtau);
        r += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dtau / 6.0);
        max_trace_drift = max_trace_drift.max((r[0] - 1.0).abs());
        r[0] = 1.0;

        if n % stride == 0 || n == steps {
            let tau = n as f64 * dtau;
            let rho = from_pauli_coords(&r);
            let min_eigenvalue = rho.spectrum()[0];
            if min_eigenvalue < -POSITIVITY_GUARD {
                return Err(Error::PositivityLost { tau, min_eigenvalue });
            }
            samples.push((tau, rho));
        }
    }
    Ok(Trajectory {
        samples,
        step: dtau,
        max_trace_drift,
    })
}

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
pub fn fidelity(rho: &TwoQubitOperator, sigma: &TwoQubitOperator) -> f64 {
    let (values, vectors) = rho.hermitian_eigen();
    let sqrt_diag = nalgebra::Matrix4::from_diagonal(&nalgebra::Vector4::from(
        values.map(|v| C64::from(v.max(0.0).sqrt())),
    ));
    let root = TwoQubitOperator::new(vectors * sqrt_diag * vectors.adjoint());
    let inner = root.mul(sigma).mul(&root);
    let (mu, _) = inner.hermitian_eigen();
    mu.iter().map(|m| m.max(0.0).sqrt()).sum::<f64>().powi(2)
}

/// Named initial states accepted by the dynamics driver.
pub fn named_state(name: &str) -> Option<TwoQubitOperator> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (o, h) = (C64::from(0.0), C64::from(s));
    match name {
        "singlet" => Some(TwoQubitOperator::singlet()),
        "triplet-zz" => Some(TwoQubitOperator::pure([o, h, h, o])),
        "product-00" => Some(TwoQubitOperator::basis_projector(0, 0)),
        "maximally-mixed" => Some(TwoQubitOperator::kron(
            &QubitOperator::maximally_mixed(),
            &QubitOperator::maximally_mixed(),
        )),
        _ => None,
    }
}
