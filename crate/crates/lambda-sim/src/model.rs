//! Physical parameters and generators of the driven Λ system.
//!
//! The basis ordering is fixed once here and used everywhere: index 0 is the
//! upper state |c⟩, index 1 the drive-coupled lower state |b⟩, index 2 the
//! probe-coupled lower state |a⟩. All rates and frequencies are expressed in
//! units of the |c⟩→|b⟩ decay rate γ_cb, with ħ = 1.
//!
//! The drive couples |b⟩↔|c⟩ with Rabi frequency Ω_L and phase φ_L; the probe
//! couples |a⟩↔|c⟩ with Ω_P and φ_P. Couplings enter the Hamiltonian without
//! a factor 1/2, so in the rotating frame
//!
//! ```text
//!       ⎛ 0              Ω_L e^{iφ_L}   Ω_P e^{iφ_P} ⎞
//!   H = ⎜ Ω_L e^{-iφ_L}  Δ_L            0            ⎟
//!       ⎝ Ω_P e^{-iφ_P}  0              Δ_P          ⎠
//! ```
//!
//! Dissipation is spontaneous decay out of |c⟩ into the two lower states at
//! rates γ_ca and γ_cb (population decay rates; coherences involving |c⟩ decay
//! at (γ_ca+γ_cb)/2). There is no decay or dephasing on |a⟩↔|b⟩.

use nalgebra::{Matrix3, SMatrix, SVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Basis index of the upper state |c⟩.
pub const IDX_C: usize = 0;
/// Basis index of the drive-coupled lower state |b⟩.
pub const IDX_B: usize = 1;
/// Basis index of the probe-coupled lower state |a⟩.
pub const IDX_A: usize = 2;

/// 3×3 complex matrix holding a Hamiltonian or a density matrix.
pub type ComplexMatrix3 = Matrix3<C64>;
/// 9×9 complex matrix acting on column-major vectorized density matrices.
pub type Superoperator = SMatrix<C64, 9, 9>;
/// Column-major vectorization of a 3×3 matrix.
pub type VecRho = SVector<C64, 9>;

pub(crate) const C_ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const C_ONE: C64 = C64::new(1.0, 0.0);

/// All physical inputs, in units of γ_cb.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Probe Rabi frequency Ω_P ≥ 0.
    pub omega_p: f64,
    /// Drive Rabi frequency Ω_L ≥ 0.
    pub omega_l: f64,
    /// Probe phase φ_P (radians).
    pub phi_p: f64,
    /// Drive phase φ_L (radians).
    pub phi_l: f64,
    /// Probe detuning Δ_P = ω_ac − ω_P.
    pub delta_p: f64,
    /// Drive detuning Δ_L = ω_bc − ω_L.
    pub delta_l: f64,
    /// Decay rate |c⟩→|a⟩, γ_ca ≥ 0.
    pub gamma_ca: f64,
    /// Decay rate |c⟩→|b⟩, γ_cb ≥ 0 (the frequency unit, 1 by default).
    pub gamma_cb: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            omega_p: 0.0,
            omega_l: 0.0,
            phi_p: 0.0,
            phi_l: 0.0,
            delta_p: 0.0,
            delta_l: 0.0,
            gamma_ca: 1.0,
            gamma_cb: 1.0,
        }
    }
}

impl SystemParams {
    /// Relative phase Δφ = φ_P − φ_L, the only phase combination the a→b
    /// coherence depends on (up to the diagonal-gauge covariance).
    pub fn delta_phi(&self) -> f64 {
        self.phi_p - self.phi_l
    }

    /// Total decay rate γ_ca + γ_cb out of |c⟩.
    pub fn gamma_sum(&self) -> f64 {
        self.gamma_ca + self.gamma_cb
    }

    pub fn validate(&self) -> Result<()> {
        validate_params(self)
    }
}

/// Accepts iff all fields are finite and rates/couplings are non-negative.
pub fn validate_params(p: &SystemParams) -> Result<()> {
    let fields = [
        ("omega_p", p.omega_p),
        ("omega_l", p.omega_l),
        ("phi_p", p.phi_p),
        ("phi_l", p.phi_l),
        ("delta_p", p.delta_p),
        ("delta_l", p.delta_l),
        ("gamma_ca", p.gamma_ca),
        ("gamma_cb", p.gamma_cb),
    ];
    for (name, value) in fields {
        if !value.is_finite() {
            return Err(Error::NonFiniteInput { name });
        }
    }
    let non_negative = [
        ("omega_p", p.omega_p),
        ("omega_l", p.omega_l),
        ("gamma_ca", p.gamma_ca),
        ("gamma_cb", p.gamma_cb),
    ];
    for (name, value) in non_negative {
        if value < 0.0 {
            return Err(Error::NegativeRate { name, value });
        }
    }
    Ok(())
}

/// Rotating-frame Hamiltonian of the driven Λ system (see the module docs).
pub fn build_hamiltonian(p: &SystemParams) -> ComplexMatrix3 {
    let drive = C64::from_polar(p.omega_l, p.phi_l);
    let probe = C64::from_polar(p.omega_p, p.phi_p);
    let mut h = ComplexMatrix3::zeros();
    h[(IDX_C, IDX_B)] = drive;
    h[(IDX_B, IDX_C)] = drive.conj();
    h[(IDX_C, IDX_A)] = probe;
    h[(IDX_A, IDX_C)] = probe.conj();
    h[(IDX_B, IDX_B)] = C64::from(p.delta_l);
    h[(IDX_A, IDX_A)] = C64::from(p.delta_p);
    h
}

/// Jump operators of the two decay channels with their rates:
/// |a⟩⟨c| at γ_ca and |b⟩⟨c| at γ_cb.
fn jump_operators(p: &SystemParams) -> [(f64, ComplexMatrix3); 2] {
    let mut to_a = ComplexMatrix3::zeros();
    to_a[(IDX_A, IDX_C)] = C_ONE;
    let mut to_b = ComplexMatrix3::zeros();
    to_b[(IDX_B, IDX_C)] = C_ONE;
    [(p.gamma_ca, to_a), (p.gamma_cb, to_b)]
}

/// Liouvillian L with d(vec ρ)/dt = L · vec ρ under column-major
/// vectorization:
///
/// ```text
/// L = -i(1⊗H − Hᵀ⊗1) + Σ_k γ_k ( J̄_k⊗J_k − ½ 1⊗(J_k†J_k) − ½ (J_k†J_k)ᵀ⊗1 )
/// ```
pub fn build_liouvillian(p: &SystemParams) -> Superoperator {
    let h = build_hamiltonian(p);
    let id = ComplexMatrix3::identity();
    let minus_i = C64::new(0.0, -1.0);
    let mut l: Superoperator = (id.kronecker(&h) - h.transpose().kronecker(&id)) * minus_i;
    for (rate, j) in jump_operators(p) {
        if rate == 0.0 {
            continue;
        }
        let jdj = j.adjoint() * j;
        let half = C64::from(0.5 * rate);
        l += j.conjugate().kronecker(&j) * C64::from(rate)
            - id.kronecker(&jdj) * half
            - jdj.transpose().kronecker(&id) * half;
    }
    l
}

/// Column-major vectorization (matches nalgebra's internal storage order).
pub fn vectorize(rho: &ComplexMatrix3) -> VecRho {
    VecRho::from_iterator(rho.iter().copied())
}

pub fn unvectorize(v: &VecRho) -> ComplexMatrix3 {
    ComplexMatrix3::from_iterator(v.iter().copied())
}

/// Projector |i⟩⟨i| onto one basis state.
pub fn projector(index: usize) -> ComplexMatrix3 {
    let mut m = ComplexMatrix3::zeros();
    m[(index, index)] = C_ONE;
    m
}

/// Maximally mixed state 1/3.
pub fn maximally_mixed() -> ComplexMatrix3 {
    ComplexMatrix3::identity() * C64::from(1.0 / 3.0)
}

/// Largest entry-wise deviation of `m` from its conjugate transpose.
pub fn hermiticity_defect(m: &ComplexMatrix3) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &ComplexMatrix3) -> f64 {
    let herm = (m + m.adjoint()) * C64::from(0.5);
    herm.symmetric_eigen().eigenvalues.min()
}

/// Checks the density-matrix invariants (unit trace, Hermiticity,
/// positivity) and reports the first violation, if any.
pub fn density_matrix_defect(
    rho: &ComplexMatrix3,
    tol_trace: f64,
    tol_herm: f64,
    tol_eig: f64,
) -> Option<String> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol_trace || tr.im.abs() > tol_trace {
        return Some(format!("trace = {:.6e}{:+.6e}i", tr.re, tr.im));
    }
    let herm = hermiticity_defect(rho);
    if herm > tol_herm {
        return Some(format!("hermiticity defect = {herm:.3e}"));
    }
    let lam = min_eigenvalue(rho);
    if lam < -tol_eig {
        return Some(format!("negative eigenvalue = {lam:.3e}"));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fig3_params() -> SystemParams {
        SystemParams {
            omega_p: 0.37,
            omega_l: 10.0,
            ..SystemParams::default()
        }
    }

    #[test]
    fn zero_params_give_zero_hamiltonian() {
        let p = SystemParams {
            gamma_ca: 0.0,
            gamma_cb: 0.0,
            ..SystemParams::default()
        };
        assert_eq!(build_hamiltonian(&p), ComplexMatrix3::zeros());
        assert_eq!(build_liouvillian(&p), Superoperator::zeros());
    }

    #[test]
    fn hamiltonian_entries_at_reference_parameters() {
        let h = build_hamiltonian(&fig3_params());
        assert_eq!(h[(IDX_C, IDX_B)], C64::new(10.0, 0.0));
        assert_eq!(h[(IDX_C, IDX_A)], C64::new(0.37, 0.0));
        for i in 0..3 {
            assert_eq!(h[(i, i)], C_ZERO);
        }
        assert_eq!(h[(IDX_B, IDX_A)], C_ZERO);
        assert_eq!(h[(IDX_A, IDX_B)], C_ZERO);
    }

    #[test]
    fn probe_phase_enters_as_complex_exponential() {
        let p = SystemParams {
            omega_p: 1.0,
            phi_p: std::f64::consts::FRAC_PI_2,
            ..SystemParams::default()
        };
        let h = build_hamiltonian(&p);
        assert_relative_eq!(h[(IDX_C, IDX_A)].re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(h[(IDX_C, IDX_A)].im, 1.0, epsilon = 1e-15);
        assert_relative_eq!(h[(IDX_A, IDX_C)].im, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn validate_rejects_negative_rates_and_nan() {
        let mut p = fig3_params();
        assert!(p.validate().is_ok());
        p.gamma_ca = -1.0;
        assert!(matches!(
            p.validate(),
            Err(Error::NegativeRate {
                name: "gamma_ca",
                ..
            })
        ));
        let mut q = fig3_params();
        q.delta_p = f64::NAN;
        assert!(matches!(
            q.validate(),
            Err(Error::NonFiniteInput { name: "delta_p" })
        ));
    }

    #[test]
    fn upper_state_population_decays_at_the_total_rate() {
        // fields off, γ_ca = γ_cb = 1: dρ_cc/dt = -2 ρ_cc
        let p = SystemParams::default();
        let l = build_liouvillian(&p);
        let deriv = unvectorize(&(l * vectorize(&projector(IDX_C))));
        assert_relative_eq!(deriv[(IDX_C, IDX_C)].re, -2.0, epsilon = 1e-14);
        assert_relative_eq!(deriv[(IDX_A, IDX_A)].re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(deriv[(IDX_B, IDX_B)].re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn trace_row_of_liouvillian_vanishes() {
        let l = build_liouvillian(&SystemParams {
            delta_p: 3.0,
            delta_l: -1.5,
            gamma_ca: 0.8,
            ..fig3_params()
        });
        // d(Tr ρ)/dt row = sum of the rows for ρ_cc, ρ_bb, ρ_aa
        for col in 0..9 {
            let s = l[(0, col)] + l[(4, col)] + l[(8, col)];
            assert!(s.norm() < 1e-12, "trace row entry {col} = {s}");
        }
    }

    #[test]
    fn liouvillian_spectrum_has_no_positive_real_parts() {
        // checked via the real 18x18 embedding [[Re, -Im], [Im, Re]]
        for p in [
            fig3_params(),
            SystemParams {
                omega_p: 4.5,
                delta_p: -7.0,
                delta_l: 2.0,
                gamma_ca: 0.3,
                ..fig3_params()
            },
        ] {
            let l = build_liouvillian(&p);
            let mut m = nalgebra::DMatrix::<f64>::zeros(18, 18);
            for i in 0..9 {
                for j in 0..9 {
                    m[(i, j)] = l[(i, j)].re;
                    m[(i, j + 9)] = -l[(i, j)].im;
                    m[(i + 9, j)] = l[(i, j)].im;
                    m[(i + 9, j + 9)] = l[(i, j)].re;
                }
            }
            let max_re = m
                .complex_eigenvalues()
                .iter()
                .map(|z| z.re)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(max_re < 1e-10, "max Re eigenvalue = {max_re:.3e}");
        }
    }

    #[test]
    fn vectorization_round_trips() {
        let h = build_hamiltonian(&fig3_params());
        assert_eq!(unvectorize(&vectorize(&h)), h);
        // column-major convention: vec index i + 3j
        let v = vectorize(&h);
        assert_eq!(v[IDX_C + 3 * IDX_B], h[(IDX_C, IDX_B)]);
    }

    fn params_strategy() -> impl Strategy<Value = SystemParams> {
        (
            0.0..15.0f64,
            0.0..15.0f64,
            -3.2..3.2f64,
            -3.2..3.2f64,
            -25.0..25.0f64,
            -25.0..25.0f64,
            0.0..5.0f64,
            0.01..5.0f64,
        )
            .prop_map(
                |(omega_p, omega_l, phi_p, phi_l, delta_p, delta_l, gamma_ca, gamma_cb)| {
                    SystemParams {
                        omega_p,
                        omega_l,
                        phi_p,
                        phi_l,
                        delta_p,
                        delta_l,
                        gamma_ca,
                        gamma_cb,
                    }
                },
            )
    }

    fn hermitian_strategy() -> impl Strategy<Value = ComplexMatrix3> {
        proptest::collection::vec(-1.0..1.0f64, 18).prop_map(|v| {
            let m = ComplexMatrix3::from_fn(|i, j| C64::new(v[i + 3 * j], v[9 + i + 3 * j]));
            (m + m.adjoint()) * C64::from(0.5)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn hamiltonian_is_exactly_hermitian(p in params_strategy()) {
            let h = build_hamiltonian(&p);
            prop_assert_eq!(h, h.adjoint());
        }

        #[test]
        fn liouvillian_preserves_trace_and_hermiticity(
            p in params_strategy(),
            rho in hermitian_strategy(),
        ) {
            let l = build_liouvillian(&p);
            let drho = unvectorize(&(l * vectorize(&rho)));
            let scale = 1.0 + l.iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(drho.trace().norm() <= 1e-12 * scale);
            prop_assert!(hermiticity_defect(&drho) <= 1e-12 * scale);
        }
    }
}
