//! Closed-form steady-state results: dressed states, the generalized Rabi
//! frequency, first-order (weak-probe) coherences, and their values at the
//! bare and dressed two-photon resonances.
//!
//! These expressions are evaluated independently of the numerical solvers and
//! serve as their oracles. Both weak-probe coherences come from the same 2×2
//! linear system for the first-order coherences and therefore share one
//! denominator
//!
//! ```text
//! D = (γ_ca+γ_cb)(Δ_L−Δ_P) − 2i(Δ_P(Δ_L−Δ_P) + Ω_L²)
//! ```

use nalgebra::Vector3;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{SystemParams, IDX_A, IDX_B, IDX_C};

/// Sign convention shared by every coherence this crate reports.
pub const GAIN_CONVENTION: &str = "gain = positive imaginary part";

/// A coherence value together with its sign-convention note.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceValue {
    pub value: C64,
    pub convention: &'static str,
}

impl CoherenceValue {
    pub fn new(value: C64) -> Self {
        Self {
            value,
            convention: GAIN_CONVENTION,
        }
    }

    /// Gain (positive) or absorption (negative).
    pub fn gain(&self) -> f64 {
        self.value.im
    }

    /// Dispersion.
    pub fn dispersion(&self) -> f64 {
        self.value.re
    }
}

/// Branch of the dressed two-photon resonance condition Δ_L − Δ_P = ±Ω_L.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    /// Probe detuning satisfying the resonance condition for this branch.
    /// `Plus` places the probe at Δ_P = Δ_L − Ω_L (the gain side at Δφ = 0);
    /// `Minus` at Δ_P = Δ_L + Ω_L.
    pub fn resonant_delta_p(self, params: &SystemParams) -> f64 {
        params.delta_l - self.sign() * params.omega_l
    }
}

/// Generalized Rabi frequency R = √(Ω_P² + Ω_L²), the dressed-state splitting.
pub fn generalized_rabi(omega_p: f64, omega_l: f64) -> f64 {
    omega_p.hypot(omega_l)
}

/// The semiclassical dressed doublet. The two vectors differ only in the sign
/// of their |c⟩ component and are orthonormal.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedPair {
    pub plus: Vector3<C64>,
    pub minus: Vector3<C64>,
    /// Generalized Rabi frequency (units of γ_cb).
    pub r: f64,
}

/// Dressed states for resonant drive (intended for Δ_L = 0):
///
/// ```text
/// |±⟩ = ( (Ω_P/R)|a⟩ + e^{iΔφ}(Ω_L/R)|b⟩ ± e^{−iφ_P}|c⟩ ) / √2
/// ```
pub fn dressed_states(params: &SystemParams) -> Result<DressedPair> {
    params.validate()?;
    let r = generalized_rabi(params.omega_p, params.omega_l);
    if r == 0.0 {
        return Err(Error::ZeroField);
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut plus = Vector3::from_element(C64::new(0.0, 0.0));
    plus[IDX_A] = C64::from(params.omega_p / r * inv_sqrt2);
    plus[IDX_B] = C64::from_polar(params.omega_l / r * inv_sqrt2, params.delta_phi());
    plus[IDX_C] = C64::from_polar(inv_sqrt2, -params.phi_p);
    let mut minus = plus;
    minus[IDX_C] = -plus[IDX_C];
    Ok(DressedPair { plus, minus, r })
}

const DENOMINATOR_FLOOR: f64 = 1e-14;

/// Shared first-order denominator D (see module docs). Degenerate only at
/// measure-zero parameter sets (Ω_L = 0 with Δ_P = Δ_L).
fn weak_denominator(p: &SystemParams) -> Result<C64> {
    let x = p.delta_l - p.delta_p;
    let b = p.delta_p * x + p.omega_l * p.omega_l;
    let d = C64::new(p.gamma_sum() * x, -2.0 * b);
    if d.norm() < DENOMINATOR_FLOOR {
        return Err(Error::DegenerateDenominator {
            magnitude: d.norm(),
        });
    }
    Ok(d)
}

/// Weak-probe (first order in Ω_P) coherence on the probe transition a→c:
///
/// ```text
/// ρ_ac = −2i(Δ_L−Δ_P) Ω_P e^{iφ_P} / D
/// ```
///
/// Vanishes at the bare two-photon resonance Δ_P = Δ_L — the transparency
/// point. Valid for Ω_P ≪ Ω_L.
pub fn rho_ac_weak(p: &SystemParams) -> Result<CoherenceValue> {
    p.validate()?;
    let d = weak_denominator(p)?;
    let x = p.delta_l - p.delta_p;
    let num = C64::new(0.0, -2.0 * x * p.omega_p) * C64::from_polar(1.0, p.phi_p);
    Ok(CoherenceValue::new(num / d))
}

/// Weak-probe coherence on the a→b transition:
///
/// ```text
/// ρ_ab = 2i Ω_P Ω_L e^{iΔφ} / D
/// ```
///
/// The e^{iΔφ} factor makes this coherence phase sensitive. At the bare
/// two-photon resonance it reduces to −(Ω_P/Ω_L) e^{iΔφ}.
pub fn rho_ab_weak(p: &SystemParams) -> Result<CoherenceValue> {
    p.validate()?;
    let d = weak_denominator(p)?;
    let num = C64::new(0.0, 2.0 * p.omega_p * p.omega_l) * C64::from_polar(1.0, p.delta_phi());
    Ok(CoherenceValue::new(num / d))
}

/// ρ_ac at the dressed resonance Δ_L − Δ_P = ±Ω_L:
///
/// ```text
/// ρ_ac = −2i Ω_P e^{iφ_P} / (γ_cb + γ_ca − 2iΔ_L)
/// ```
///
/// The value is the same on both branches; the caller asserts the resonance
/// condition holds.
pub fn rho_ac_dressed(p: &SystemParams, _branch: Branch) -> CoherenceValue {
    let d = C64::new(p.gamma_sum(), -2.0 * p.delta_l);
    let num = C64::new(0.0, -2.0 * p.omega_p) * C64::from_polar(1.0, p.phi_p);
    CoherenceValue::new(num / d)
}

/// ρ_ab at the dressed resonance, with the branch sign of Δ_L − Δ_P = ±Ω_L:
///
/// ```text
/// ρ_ab = ±2i Ω_P e^{iΔφ} / (γ_cb + γ_ca − 2iΔ_L)
/// ```
///
/// At Δφ = 0 and Δ_L = 0 the `Plus` branch (Δ_P = −Ω_L) gives gain and the
/// `Minus` branch (Δ_P = +Ω_L) absorption.
pub fn rho_ab_dressed(p: &SystemParams, branch: Branch) -> CoherenceValue {
    let d = C64::new(p.gamma_sum(), -2.0 * p.delta_l);
    let num = C64::new(0.0, 2.0 * branch.sign() * p.omega_p) * C64::from_polar(1.0, p.delta_phi());
    CoherenceValue::new(num / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn fig3_params() -> SystemParams {
        SystemParams {
            omega_p: 0.37,
            omega_l: 10.0,
            ..SystemParams::default()
        }
    }

    fn assert_c64_eq(z: C64, re: f64, im: f64, tol: f64) {
        assert!(
            (z.re - re).abs() <= tol && (z.im - im).abs() <= tol,
            "got {z}, want {re}+{im}i"
        );
    }

    #[test]
    fn generalized_rabi_values() {
        assert_eq!(generalized_rabi(0.0, 10.0), 10.0);
        assert_eq!(generalized_rabi(3.0, 4.0), 5.0);
        assert_relative_eq!(
            generalized_rabi(0.37, 10.0),
            10.006842658900958,
            max_relative = 1e-15
        );
    }

    #[test]
    fn drive_only_dressed_states_are_b_plus_minus_c() {
        let p = SystemParams {
            omega_p: 0.0,
            omega_l: 1.0,
            ..SystemParams::default()
        };
        let d = dressed_states(&p).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_c64_eq(d.plus[IDX_B], s, 0.0, 1e-15);
        assert_c64_eq(d.plus[IDX_C], s, 0.0, 1e-15);
        assert_c64_eq(d.plus[IDX_A], 0.0, 0.0, 1e-15);
        assert_c64_eq(d.minus[IDX_C], -s, 0.0, 1e-15);
    }

    #[test]
    fn equal_fields_dressed_amplitudes() {
        let p = SystemParams {
            omega_p: 2.0,
            omega_l: 2.0,
            ..SystemParams::default()
        };
        let d = dressed_states(&p).unwrap();
        assert_c64_eq(d.plus[IDX_A], 0.5, 0.0, 1e-15);
        assert_c64_eq(d.plus[IDX_B], 0.5, 0.0, 1e-15);
        assert_c64_eq(d.plus[IDX_C], std::f64::consts::FRAC_1_SQRT_2, 0.0, 1e-15);
    }

    #[test]
    fn probe_phase_flips_the_c_component() {
        let p = SystemParams {
            phi_p: PI,
            ..fig3_params()
        };
        let d = dressed_states(&p).unwrap();
        assert!(d.plus[IDX_C].re < 0.0);
        assert_relative_eq!(
            d.plus[IDX_C].re,
            -std::f64::consts::FRAC_1_SQRT_2,
            max_relative = 1e-12
        );
    }

    #[test]
    fn zero_field_is_rejected() {
        let p = SystemParams::default();
        assert!(matches!(dressed_states(&p), Err(Error::ZeroField)));
    }

    #[test]
    fn rho_ac_vanishes_at_bare_resonance() {
        let p = SystemParams {
            delta_p: 3.0,
            delta_l: 3.0,
            ..fig3_params()
        };
        assert_eq!(rho_ac_weak(&p).unwrap().value.norm(), 0.0);
    }

    #[test]
    fn rho_ac_weak_reference_value() {
        // Δ_L=0, Δ_P=5, Ω_P=0.37, Ω_L=10, γ = 1 each, φ_P=0:
        // numerator 3.7i, denominator −10 − 150i
        let p = SystemParams {
            delta_p: 5.0,
            ..fig3_params()
        };
        let v = rho_ac_weak(&p).unwrap().value;
        assert_c64_eq(v, -555.0 / 22600.0, -37.0 / 22600.0, 1e-15);
    }

    #[test]
    fn rho_ac_weak_matches_dressed_value_at_the_condition() {
        // Δ_L − Δ_P = +Ω_L at Δ_L = 0 gives −2iΩ_P/(γ_cb+γ_ca) = −0.37i
        let p = SystemParams {
            delta_p: -10.0,
            ..fig3_params()
        };
        let v = rho_ac_weak(&p).unwrap().value;
        assert_c64_eq(v, 0.0, -0.37, 1e-15);
    }

    #[test]
    fn rho_ab_weak_bare_resonance_value() {
        let p = fig3_params();
        let v = rho_ab_weak(&p).unwrap().value;
        assert_c64_eq(v, -0.037, 0.0, 1e-15);
    }

    #[test]
    fn rho_ab_weak_reference_value() {
        let p = SystemParams {
            delta_p: 5.0,
            ..fig3_params()
        };
        let v = rho_ab_weak(&p).unwrap().value;
        assert_c64_eq(v, -1110.0 / 22600.0, -74.0 / 22600.0, 1e-15);
    }

    #[test]
    fn phase_shift_by_pi_flips_rho_ab_sign_exactly() {
        let p = SystemParams {
            delta_p: 7.3,
            phi_p: 0.4,
            phi_l: 0.1,
            ..fig3_params()
        };
        let q = SystemParams {
            phi_p: p.phi_p + PI,
            ..p
        };
        let a = rho_ab_weak(&p).unwrap().value;
        let b = rho_ab_weak(&q).unwrap().value;
        assert!((a + b).norm() < 1e-15 * a.norm().max(1.0));
    }

    #[test]
    fn rho_ac_dressed_reference_values() {
        let v = rho_ac_dressed(&fig3_params(), Branch::Plus).value;
        assert_c64_eq(v, 0.0, -0.37, 1e-15);

        let zero_probe = SystemParams {
            omega_p: 0.0,
            ..fig3_params()
        };
        assert_eq!(rho_ac_dressed(&zero_probe, Branch::Minus).value.norm(), 0.0);

        // Δ_L=1, γ = 1 each, Ω_P=1, φ_P=0: −2i/(2 − 2i) = 0.5 − 0.5i
        let p = SystemParams {
            omega_p: 1.0,
            delta_l: 1.0,
            ..SystemParams::default()
        };
        let v = rho_ac_dressed(&p, Branch::Plus).value;
        assert_c64_eq(v, 0.5, -0.5, 1e-15);
    }

    #[test]
    fn rho_ab_dressed_branch_and_phase_structure() {
        let p = fig3_params();
        let plus = rho_ab_dressed(&p, Branch::Plus).value;
        let minus = rho_ab_dressed(&p, Branch::Minus).value;
        assert_c64_eq(plus, 0.0, 0.37, 1e-15);
        assert_c64_eq(minus, 0.0, -0.37, 1e-15);

        // Δφ = π/2 turns the gain into pure dispersion: −2Ω_P/(γ_cb+γ_ca)
        let q = SystemParams {
            phi_p: FRAC_PI_2,
            ..p
        };
        let v = rho_ab_dressed(&q, Branch::Plus).value;
        assert_c64_eq(v, -0.37, 0.0, 1e-15);
    }

    #[test]
    fn branch_maps_to_the_documented_detuning_side() {
        let p = fig3_params();
        assert_eq!(Branch::Plus.resonant_delta_p(&p), -10.0);
        assert_eq!(Branch::Minus.resonant_delta_p(&p), 10.0);
    }

    #[test]
    fn degenerate_denominator_is_reported() {
        let p = SystemParams {
            omega_p: 1.0,
            omega_l: 0.0,
            delta_p: 5.0,
            delta_l: 5.0,
            ..SystemParams::default()
        };
        assert!(matches!(
            rho_ab_weak(&p),
            Err(Error::DegenerateDenominator { .. })
        ));
    }

    fn params_strategy() -> impl Strategy<Value = SystemParams> {
        (
            0.001..5.0f64,
            0.5..15.0f64,
            -3.2..3.2f64,
            -3.2..3.2f64,
            -25.0..25.0f64,
            -10.0..10.0f64,
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

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn dressed_pair_is_orthonormal(p in params_strategy()) {
            let d = dressed_states(&p).unwrap();
            prop_assert!((d.plus.norm() - 1.0).abs() < 1e-12);
            prop_assert!((d.minus.norm() - 1.0).abs() < 1e-12);
            let overlap: C64 = d.plus.iter().zip(d.minus.iter())
                .map(|(x, y)| x.conj() * y)
                .sum();
            prop_assert!(overlap.norm() < 1e-12);
        }

        #[test]
        fn weak_formulas_reduce_to_dressed_values_on_the_resonance(
            mut p in params_strategy(),
            plus in proptest::bool::ANY,
        ) {
            let branch = if plus { Branch::Plus } else { Branch::Minus };
            p.delta_p = branch.resonant_delta_p(&p);
            let ac_weak = rho_ac_weak(&p).unwrap().value;
            let ab_weak = rho_ab_weak(&p).unwrap().value;
            let ac_dressed = rho_ac_dressed(&p, branch).value;
            let ab_dressed = rho_ab_dressed(&p, branch).value;
            let tol = 1e-11 * (1.0 + ac_dressed.norm().max(ab_dressed.norm()));
            prop_assert!((ac_weak - ac_dressed).norm() < tol,
                "ac: {ac_weak} vs {ac_dressed}");
            prop_assert!((ab_weak - ab_dressed).norm() < tol,
                "ab: {ab_weak} vs {ab_dressed}");
        }

        #[test]
        fn rho_ab_depends_on_phases_only_through_their_difference(
            p in params_strategy(),
            shift in -3.0..3.0f64,
        ) {
            let q = SystemParams {
                phi_p: p.phi_p + shift,
                phi_l: p.phi_l + shift,
                ..p
            };
            let a = rho_ab_weak(&p).unwrap().value;
            let b = rho_ab_weak(&q).unwrap().value;
            // a common phase shift changes Δφ by exactly zero, but not bitwise:
            // compare against the value rebuilt from the same Δφ
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
        }

        #[test]
        fn reflection_identity_at_zero_drive_detuning(
            mut p in params_strategy(),
        ) {
            p.delta_l = 0.0;
            p.phi_p = 0.0;
            p.phi_l = 0.0;
            let q = SystemParams { delta_p: -p.delta_p, ..p };
            let a = rho_ab_weak(&p).unwrap().value;
            let b = rho_ab_weak(&q).unwrap().value;
            prop_assert!((b - a.conj()).norm() <= 1e-12 * (1.0 + a.norm()));
        }
    }
}
