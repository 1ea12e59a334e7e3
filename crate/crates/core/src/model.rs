//! Rescaled chain parameters, the energy constraint, and the per-mode
//! constants and functions the closed-form evolution is built from.
//!
//! The chain Hamiltonian (in units of `J12`) is
//! `H = Z1 Z2 + K Z2 Z3 + B(tau) . sigma_2`. Fixing the outer qubits to a
//! joint `Z` sector `(q1, q3)` leaves a 2x2 problem for the middle qubit;
//! those four sectors are the *modes*, ordered
//! `(q1, q3) = (0,0), (0,1), (1,0), (1,1)`.

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{propagator, Error, Result};

/// Effective `Z` coupling felt by the middle qubit in each mode:
/// `+(1+K), +(1-K), -(1-K), -(1+K)`.
pub fn mode_sign(mode: usize, k_ratio: f64) -> f64 {
    match mode {
        0 => 1.0 + k_ratio,
        1 => 1.0 - k_ratio,
        2 => -(1.0 - k_ratio),
        3 => -(1.0 + k_ratio),
        _ => panic!("mode index {mode} out of range 0..4"),
    }
}

/// Outer-qubit sector `(q1, q3)` of a mode.
pub fn mode_sector(mode: usize) -> (usize, usize) {
    assert!(mode < 4, "mode index {mode} out of range 0..4");
    (mode >> 1, mode & 1)
}

/// Dimensionless chain: coupling ratio `K = J23/J12` and energy `omega_hat^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainParams {
    pub k_ratio: f64,
    pub omega_hat_sq: f64,
}

impl ChainParams {
    pub fn new(omega_hat_sq: f64, k_ratio: f64) -> Self {
        ChainParams {
            k_ratio,
            omega_hat_sq,
        }
    }

    /// Squared field magnitude allowed by the energy constraint,
    /// `omega_hat^2 - (1 + K^2)`.
    pub fn omega_k_sq(&self) -> Result<f64> {
        let v = self.omega_hat_sq - 1.0 - self.k_ratio * self.k_ratio;
        if v < 0.0 {
            Err(Error::InsufficientEnergy { omega_k_sq: v })
        } else {
            Ok(v)
        }
    }

    pub fn omega_k(&self) -> Result<f64> {
        self.omega_k_sq().map(f64::sqrt)
    }
}

/// Integration constants of the optimal field in the `(phi, Omega, theta0)`
/// chart. The magnitude is never stored: `B0 = omega_k cos(phi)` and
/// `Bz = omega_k sin(phi)` are derived from the chain, so the energy
/// constraint holds for every value of this struct.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldParams {
    pub phi: f64,
    pub omega_big: f64,
    pub theta0: f64,
}

impl FieldParams {
    pub fn new(phi: f64, omega_big: f64, theta0: f64) -> Self {
        FieldParams {
            phi,
            omega_big,
            theta0,
        }
    }

    /// Chart coordinates for a field with transverse amplitude `b0` and
    /// longitudinal component `bz`.
    pub fn from_components(b0: f64, bz: f64, omega_big: f64, theta0: f64) -> Self {
        FieldParams {
            phi: bz.atan2(b0),
            omega_big,
            theta0,
        }
    }

    pub fn resolve(&self, p: &ChainParams) -> Result<ControlField> {
        let wk = p.omega_k()?;
        let (sin, cos) = self.phi.sin_cos();
        Ok(ControlField {
            b0: wk * cos,
            bz: wk * sin,
            omega_big: self.omega_big,
            theta0: self.theta0,
        })
    }
}

/// Field components derived from [`FieldParams`] for a particular chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlField {
    pub b0: f64,
    pub bz: f64,
    pub omega_big: f64,
    pub theta0: f64,
}

impl ControlField {
    /// Azimuth of the precessing transverse component.
    pub fn theta(&self, tau: f64) -> f64 {
        self.omega_big * tau + self.theta0
    }

    pub fn vector(&self, tau: f64) -> [f64; 3] {
        let (s, c) = self.theta(tau).sin_cos();
        [self.b0 * c, self.b0 * s, self.bz]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mode {
    /// Effective detuning in the frame co-rotating with the field.
    pub beta: f64,
    /// `sqrt(B0^2 + beta^2)`.
    pub omega: f64,
}

/// Constants of the four decoupled middle-qubit problems.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeConstants {
    pub field: ControlField,
    pub modes: [Mode; 4],
}

/// `s = sin(omega tau)/omega`, `c = cos(omega tau)`, `a = c + i beta s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeFunctions {
    pub s: f64,
    pub c: f64,
    pub a: Complex64,
}

impl ModeConstants {
    pub fn new(p: &ChainParams, f: &FieldParams) -> Result<Self> {
        let field = f.resolve(p)?;
        let modes = core::array::from_fn(|i| {
            let beta = field.bz + mode_sign(i, p.k_ratio) - 0.5 * field.omega_big;
            Mode {
                beta,
                omega: field.b0.hypot(beta),
            }
        });
        Ok(ModeConstants { field, modes })
    }

    /// Mode functions of mode `i` (0-based) at rescaled time `tau`.
    pub fn functions(&self, i: usize, tau: f64) -> ModeFunctions {
        let Mode { beta, omega } = self.modes[i];
        let x = omega * tau;
        let s = if x.abs() < 1e-6 {
            let x2 = x * x;
            tau * (1.0 - x2 / 6.0 + x2 * x2 / 120.0)
        } else {
            x.sin() / omega
        };
        let c = x.cos();
        ModeFunctions {
            s,
            c,
            a: Complex64::new(c, beta * s),
        }
    }
}

/// `Tr(H^2)/8 - omega_hat^2` for the explicitly assembled Hamiltonian.
pub fn energy_check(p: &ChainParams, f: &FieldParams, tau: f64) -> Result<f64> {
    let h = propagator::hamiltonian_at(p, f, tau)?;
    Ok((h * h).trace().re / 8.0 - p.omega_hat_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
    use proptest::prelude::*;

    #[test]
    fn omega_k_sq_examples() {
        assert_eq!(ChainParams::new(6.0, 1.0).omega_k_sq().unwrap(), 4.0);
        assert_eq!(ChainParams::new(2.0, 1.0).omega_k_sq().unwrap(), 0.0);
        assert_eq!(ChainParams::new(14.0, 2.0).omega_k_sq().unwrap(), 9.0);
    }

    #[test]
    fn omega_k_sq_rejects_insufficient_energy() {
        let err = ChainParams::new(1.5, 1.0).omega_k_sq().unwrap_err();
        assert!(matches!(err, Error::InsufficientEnergy { omega_k_sq } if omega_k_sq == -0.5));
        assert!(ModeConstants::new(&ChainParams::new(1.5, 1.0), &FieldParams::new(0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn ghz_optimal_field_modes() {
        // omega_hat^2 = 14, K = 1: B0 = 2, Bz = 2 sqrt 2, Omega = 2 Bz.
        let p = ChainParams::new(14.0, 1.0);
        let bz = 2.0 * SQRT_2;
        let f = FieldParams::from_components(2.0, bz, 2.0 * bz, 0.0);
        let m = ModeConstants::new(&p, &f).unwrap();
        assert_abs_diff_eq!(m.modes[0].beta, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.modes[3].beta, -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.modes[0].omega, 2.0 * SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(m.modes[3].omega, 2.0 * SQRT_2, epsilon = 1e-14);
    }

    #[test]
    fn static_transverse_field_modes() {
        let f = FieldParams::new(0.0, 0.0, 0.0);
        let m = ModeConstants::new(&ChainParams::new(6.0, 1.0), &f).unwrap();
        assert_eq!(m.modes[1].beta, 0.0);
        assert_eq!(m.modes[2].beta, 0.0);

        let p = ChainParams::new(6.0, 1.59);
        let m = ModeConstants::new(&p, &f).unwrap();
        assert_abs_diff_eq!(m.modes[1].beta, -0.59, epsilon = 1e-14);
        assert_abs_diff_eq!(m.modes[2].beta, 0.59, epsilon = 1e-14);
        let expect = (6.0f64 - 2.0 * 1.59).sqrt();
        assert_abs_diff_eq!(expect, 1.679285562, epsilon = 1e-9);
        assert_abs_diff_eq!(m.modes[1].omega, expect, epsilon = 1e-14);
        assert_abs_diff_eq!(m.modes[2].omega, expect, epsilon = 1e-14);
    }

    #[test]
    fn mode_functions_at_origin_are_identity() {
        let p = ChainParams::new(6.0, 1.3);
        let m = ModeConstants::new(&p, &FieldParams::new(0.4, 1.1, 0.2)).unwrap();
        for i in 0..4 {
            let mf = m.functions(i, 0.0);
            assert_eq!(mf.s, 0.0);
            assert_eq!(mf.c, 1.0);
            assert_eq!(mf.a, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn mode_functions_quarter_period() {
        // omega_hat^2 = 6, K = 1, phi = 0: B0 = 2, mode 2 has beta = 0, omega = 2.
        let m = ModeConstants::new(&ChainParams::new(6.0, 1.0), &FieldParams::new(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(m.modes[1].omega, 2.0);
        let mf = m.functions(1, FRAC_PI_4);
        assert_abs_diff_eq!(mf.s, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(mf.c, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mf.a.norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mf.a.norm_sqr() + 4.0 * mf.s * mf.s, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn mode_functions_series_branch() {
        let field = ControlField {
            b0: 1e-9,
            bz: 0.0,
            omega_big: 0.0,
            theta0: 0.0,
        };
        let m = ModeConstants {
            field,
            modes: [Mode { beta: 0.0, omega: 1e-9 }; 4],
        };
        let mf = m.functions(0, 1.0);
        assert_abs_diff_eq!(mf.s, 1.0, epsilon = 1e-15);

        // Exactly zero frequency: s = tau.
        let m = ModeConstants {
            field,
            modes: [Mode { beta: 0.0, omega: 0.0 }; 4],
        };
        assert_eq!(m.functions(2, 0.75).s, 0.75);
    }

    #[test]
    fn energy_check_examples() {
        let p = ChainParams::new(6.0, 1.0);
        for &(phi, om, th, tau) in &[(0.0, 0.0, 0.0, 0.0), (1.2, -3.0, 0.5, 2.7), (FRAC_PI_2, 7.0, 1.0, 0.1)] {
            let e = energy_check(&p, &FieldParams::new(phi, om, th), tau).unwrap();
            assert!(e.abs() <= 1e-12, "{e}");
        }
        // GHZ-optimal field at K = 1.59.
        let p = ChainParams::new(14.0, 1.59);
        let bz = (14.0 - 2.0 * (1.59 * 1.59 + 1.59 + 1.0f64)).sqrt();
        let f = FieldParams::from_components(2.59, bz, 2.0 * bz, 0.0);
        assert!(energy_check(&p, &f, 0.3).unwrap().abs() <= 1e-12);
        // Boundary: no field at all.
        let p = ChainParams::new(2.0, 1.0);
        let f = FieldParams::new(0.9, 0.0, 0.0);
        assert_eq!(f.resolve(&p).unwrap().b0, 0.0);
        assert!(energy_check(&p, &f, 1.0).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn energy_check_sweep() {
        let mut count = 0;
        for i in 0..10 {
            for j in 0..12 {
                let k = -2.0 + 0.37 * i as f64;
                let p = ChainParams::new(1.0 + k * k + 0.25 + 1.3 * j as f64, k);
                let f = FieldParams::new(0.53 * j as f64, 2.0 - 0.7 * i as f64, 0.1 * (i + j) as f64);
                let e = energy_check(&p, &f, 0.41 * (i * j) as f64 / 7.0).unwrap();
                assert!(e.abs() <= 1e-12, "tuple ({i},{j}) -> {e}");
                count += 1;
            }
        }
        assert!(count >= 100);
    }

    #[test]
    fn mode_sign_structure() {
        for &k in &[-1.7, 0.0, 1.0, 1.59, 3.2] {
            assert_eq!(mode_sign(0, k) - mode_sign(3, k), 2.0 * (1.0 + k));
            assert_eq!(mode_sign(1, k) - mode_sign(2, k), 2.0 * (1.0 - k));
        }
        assert_eq!(mode_sector(1), (0, 1));
        assert_eq!(mode_sector(2), (1, 0));
        let _ = PI;
    }

    fn params() -> impl Strategy<Value = (ChainParams, FieldParams)> {
        (-2.5f64..2.5, 0.0f64..10.0, 0.0f64..(2.0 * PI), -8.0f64..8.0, 0.0f64..(2.0 * PI)).prop_map(
            |(k, excess, phi, om, th)| (ChainParams::new(1.0 + k * k + excess, k), FieldParams::new(phi, om, th)),
        )
    }

    proptest! {
        #[test]
        fn mode_level_unitarity((p, f) in params(), tau in 0.0f64..20.0) {
            let m = ModeConstants::new(&p, &f).unwrap();
            let b0 = m.field.b0;
            for i in 0..4 {
                let mf = m.functions(i, tau);
                prop_assert!((mf.a.norm_sqr() + b0 * b0 * mf.s * mf.s - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn beta_differences_and_bounds((p, f) in params()) {
            let m = ModeConstants::new(&p, &f).unwrap();
            let k = p.k_ratio;
            let b = |i: usize| m.modes[i].beta;
            prop_assert!((b(0) - b(3) - 2.0 * (1.0 + k)).abs() < 1e-12);
            prop_assert!((b(1) - b(2) - 2.0 * (1.0 - k)).abs() < 1e-12);
            for mode in m.modes {
                prop_assert!(mode.omega >= m.field.b0.abs());
                prop_assert!((mode.omega * mode.omega - m.field.b0 * m.field.b0 - mode.beta * mode.beta).abs() < 1e-10);
            }
        }

        #[test]
        fn field_magnitude_matches_constraint((p, f) in params()) {
            let c = f.resolve(&p).unwrap();
            let wk2 = p.omega_k_sq().unwrap();
            prop_assert!((c.b0 * c.b0 + c.bz * c.bz - wk2).abs() <= 1e-12 * (1.0 + wk2));
        }
    }
}
