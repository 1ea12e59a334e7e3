//! Entanglement of three-qubit pure states: Cayley hyperdeterminant,
//! single-qubit reduced determinants, the (1,3) 2-tangle and the 3-tangle,
//! plus their closed forms along the optimal trajectories.

use num_complex::Complex64;
use crate::model::{ChainParams, FieldParams, ModeConstants};
use crate::propagator::{PureState3, StateClass};
use crate::{Error, Result};

/// Round-off band below zero that is silently clamped.
pub const CLAMP_TOL: f64 = 1e-12;
/// Anything more negative than this is reported as [`Error::NegativeTangle`].
pub const NEGATIVE_TANGLE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Qubit {
    One,
    Two,
    Three,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TanglePair {
    pub tau13: f64,
    pub tau123: f64,
}

/// Cayley hyperdeterminant of the 2x2x2 amplitude tensor.
pub fn hyperdet(psi: &PureState3) -> Complex64 {
    let a = psi.amplitudes();
    let sq = |x: Complex64| x * x;
    let d1 = sq(a[0] * a[7]) + sq(a[1] * a[6]) + sq(a[2] * a[5]) + sq(a[3] * a[4]);
    let d2 = (a[0] * a[7] + a[1] * a[6]) * (a[2] * a[5] + a[3] * a[4])
        + a[0] * a[1] * a[6] * a[7]
        + a[2] * a[3] * a[4] * a[5];
    let d3 = a[0] * a[3] * a[5] * a[6] + a[1] * a[2] * a[4] * a[7];
    d1 - d2 * 2.0 + d3 * 4.0
}

/// `Det(rho_q)` from the expanded quadratic-in-pairs expressions.
pub fn det_rho(which: Qubit, psi: &PureState3) -> f64 {
    let a = psi.amplitudes();
    let p = |i: usize| a[i].norm_sqr();
    // Re(a_i a_j a_k^* a_l^*)
    let x = |i: usize, j: usize, k: usize, l: usize| (a[i] * a[j] * a[k].conj() * a[l].conj()).re;
    match which {
        Qubit::One => {
            p(0) * (p(5) + p(6) + p(7))
                + p(1) * (p(4) + p(6) + p(7))
                + p(2) * (p(4) + p(5) + p(7))
                + p(3) * (p(4) + p(5) + p(6))
                - 2.0
                    * (x(0, 5, 1, 4) + x(0, 6, 2, 4) + x(0, 7, 3, 4) + x(1, 6, 2, 5) + x(1, 7, 3, 5)
                        + x(2, 7, 3, 6))
        }
        Qubit::Two => {
            p(0) * (p(3) + p(6) + p(7))
                + p(1) * (p(2) + p(6) + p(7))
                + p(4) * (p(2) + p(3) + p(7))
                + p(5) * (p(2) + p(3) + p(6))
                - 2.0
                    * (x(0, 3, 1, 2) + x(0, 6, 2, 4) + x(0, 7, 2, 5) + x(1, 6, 3, 4) + x(1, 7, 3, 5)
                        + x(4, 7, 5, 6))
        }
        Qubit::Three => {
            p(0) * (p(3) + p(5) + p(7))
                + p(2) * (p(1) + p(5) + p(7))
                + p(4) * (p(1) + p(3) + p(7))
                + p(6) * (p(1) + p(3) + p(5))
                - 2.0
                    * (x(0, 3, 1, 2) + x(0, 5, 1, 4) + x(0, 7, 1, 6) + x(2, 5, 3, 4) + x(2, 7, 3, 6)
                        + x(4, 7, 5, 6))
        }
    }
}

/// Single-qubit reduced density matrix `[[r00, r01], [r01*, r11]]`, by explicit partial trace.
pub fn reduced_density(which: Qubit, psi: &PureState3) -> [[Complex64; 2]; 2] {
    let a = psi.amplitudes();
    let bit = match which {
        Qubit::One => 2,
        Qubit::Two => 1,
        Qubit::Three => 0,
    };
    let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..8 {
        for j in 0..8 {
            // The traced-out bits must agree.
            if (i & !(1 << bit)) != (j & !(1 << bit)) {
                continue;
            }
            rho[(i >> bit) & 1][(j >> bit) & 1] += a[i] * a[j].conj();
        }
    }
    rho
}

/// `Det(rho_q)` via [`reduced_density`].
pub fn det_rho_traced(which: Qubit, psi: &PureState3) -> f64 {
    let r = reduced_density(which, psi);
    (r[0][0] * r[1][1] - r[0][1] * r[1][0]).re
}

/// `Det(rho_1) - Det(rho_2) + Det(rho_3)` as a single expanded polynomial.
pub fn det_rho_combination(psi: &PureState3) -> f64 {
    let a = psi.amplitudes();
    let p = |i: usize| a[i].norm_sqr();
    let c = |i: usize| a[i].conj();
    2.0 * (p(0) * p(5) + p(1) * p(4) + p(2) * p(7) + p(3) * p(6))
        + (p(0) * p(7) + p(1) * p(6) + p(2) * p(5) + p(3) * p(4))
        - 2.0
            * (a[0] * a[7] * c(1) * c(6) + a[2] * a[5] * c(3) * c(4)
                - (a[0] * a[7] - a[1] * a[6]) * (c(2) * c(5) - c(3) * c(4)))
                .re
        - 4.0 * (a[0] * a[5] * c(1) * c(4) + a[2] * a[7] * c(3) * c(6)).re
}

fn clamp_unit(v: f64) -> f64 {
    if (-CLAMP_TOL..0.0).contains(&v) {
        0.0
    } else if v > 1.0 && v <= 1.0 + CLAMP_TOL {
        1.0
    } else {
        v
    }
}

/// 2-tangle between the outer qubits,
/// `2 [Det rho1 - Det rho2 + Det rho3 - |HypDet|]`.
pub fn two_tangle_13(psi: &PureState3) -> Result<f64> {
    let raw = 2.0
        * (det_rho(Qubit::One, psi) - det_rho(Qubit::Two, psi) + det_rho(Qubit::Three, psi)
            - hyperdet(psi).norm());
    if raw < -NEGATIVE_TANGLE_TOL {
        return Err(Error::NegativeTangle { value: raw });
    }
    // [-1e-9, 0) is round-off from the cancellation of the four terms.
    Ok(clamp_unit(raw.max(0.0)))
}

/// 3-tangle `4 |HypDet|`.
pub fn three_tangle(psi: &PureState3) -> f64 {
    clamp_unit(4.0 * hyperdet(psi).norm())
}

pub fn tangles(psi: &PureState3) -> Result<TanglePair> {
    Ok(TanglePair {
        tau13: two_tangle_13(psi)?,
        tau123: three_tangle(psi),
    })
}

/// Closed-form 2-tangle along the optimal trajectory of class `c`.
pub fn tau13_closed(c: StateClass, p: &ChainParams, f: &FieldParams, tau: f64) -> Result<f64> {
    let m = ModeConstants::new(p, f)?;
    Ok(tau13_from_modes(c, &m, tau))
}

pub(crate) fn tau13_from_modes(c: StateClass, m: &ModeConstants, tau: f64) -> f64 {
    let b0_sq = m.field.b0 * m.field.b0;
    let bell_13 = || {
        let m2 = m.functions(1, tau);
        let m3 = m.functions(2, tau);
        (m2.a.conj() * m3.a + b0_sq * m2.s * m3.s).norm_sqr()
    };
    match c {
        StateClass::S | StateClass::B1 | StateClass::B3 => 0.0,
        StateClass::B2 => bell_13(),
        StateClass::W => 4.0 / 9.0 * bell_13(),
        StateClass::Ghz => {
            let m1 = m.functions(0, tau);
            let m4 = m.functions(3, tau);
            b0_sq * (m1.a * m4.s - m4.a * m1.s).norm_sqr()
        }
    }
}

/// Closed-form 3-tangle: the class total minus [`tau13_closed`].
pub fn tau123_closed(c: StateClass, p: &ChainParams, f: &FieldParams, tau: f64) -> Result<f64> {
    closed_pair(c, p, f, tau).map(|t| t.tau123)
}

pub fn closed_pair(c: StateClass, p: &ChainParams, f: &FieldParams, tau: f64) -> Result<TanglePair> {
    let tau13 = tau13_closed(c, p, f, tau)?;
    let tau123 = match c {
        StateClass::S | StateClass::B1 | StateClass::B3 => 0.0,
        _ => c.tangle_total() - tau13,
    };
    Ok(TanglePair { tau13, tau123 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::evolve_class;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{PI, SQRT_2};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_states(n: usize, seed: u64) -> impl Iterator<Item = PureState3> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(move |_| {
            let amps = core::array::from_fn(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            PureState3::normalized(amps).unwrap()
        })
    }

    #[test]
    fn hyperdet_examples() {
        assert_abs_diff_eq!(hyperdet(&StateClass::Ghz.representative()).norm(), 0.25, epsilon = 1e-15);
        assert_eq!(hyperdet(&StateClass::S.representative()).norm(), 0.0);
        assert_abs_diff_eq!(hyperdet(&StateClass::W.representative()).norm(), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn det_rho_examples() {
        let ghz = StateClass::Ghz.representative();
        let w = StateClass::W.representative();
        assert_abs_diff_eq!(det_rho(Qubit::One, &ghz), 0.25, epsilon = 1e-15);
        assert_eq!(det_rho(Qubit::Two, &StateClass::S.representative()), 0.0);
        // rho_1(W) = diag(2/3, 1/3).
        assert_abs_diff_eq!(det_rho(Qubit::One, &w), 2.0 / 9.0, epsilon = 1e-15);
        let r = reduced_density(Qubit::One, &w);
        assert_abs_diff_eq!(r[0][0].re, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r[1][1].re, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn two_tangle_examples() {
        assert_abs_diff_eq!(two_tangle_13(&StateClass::Ghz.representative()).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(two_tangle_13(&StateClass::B2.representative()).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(two_tangle_13(&StateClass::W.representative()).unwrap(), 4.0 / 9.0, epsilon = 1e-15);
        for c in [StateClass::S, StateClass::B1, StateClass::B3] {
            assert_eq!(two_tangle_13(&c.representative()).unwrap(), 0.0);
        }
    }

    #[test]
    fn three_tangle_examples() {
        assert_abs_diff_eq!(three_tangle(&StateClass::Ghz.representative()), 1.0, epsilon = 1e-15);
        assert_eq!(three_tangle(&StateClass::B2.representative()), 0.0);
        assert_abs_diff_eq!(three_tangle(&StateClass::W.representative()), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn combination_is_quartic_and_never_negative() {
        // NegativeTangle is reserved for bugs: the combination is a
        // non-negative quartic form even off the unit sphere.
        for psi in random_states(200, 11) {
            let t = two_tangle_13(&psi).unwrap();
            let scaled = PureState3::from_amplitudes(psi.amplitudes().map(|x| x * 0.9));
            let ts = two_tangle_13(&scaled).unwrap();
            assert!((ts - 0.9f64.powi(4) * t).abs() < 1e-12);
        }
    }

    #[test]
    fn determinant_expansions_match_partial_trace() {
        for psi in random_states(1000, 7) {
            for q in [Qubit::One, Qubit::Two, Qubit::Three] {
                assert!((det_rho(q, &psi) - det_rho_traced(q, &psi)).abs() < 1e-12);
            }
            let combo = det_rho_traced(Qubit::One, &psi) - det_rho_traced(Qubit::Two, &psi)
                + det_rho_traced(Qubit::Three, &psi);
            assert!((det_rho_combination(&psi) - combo).abs() < 1e-12);
            // Monogamy bounds hold for every pure state.
            let t = tangles(&psi).unwrap();
            assert!((0.0..=1.0).contains(&t.tau13) && (0.0..=1.0).contains(&t.tau123));
        }
    }

    #[test]
    fn b2_closed_form_examples() {
        let p = ChainParams::new(6.0, 1.0);
        let f = FieldParams::new(0.0, 0.0, 0.0);
        for i in 0..50 {
            let tau = 0.1 * i as f64;
            assert_abs_diff_eq!(tau13_closed(StateClass::B2, &p, &f, tau).unwrap(), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(tau123_closed(StateClass::B2, &p, &f, tau).unwrap(), 0.0, epsilon = 1e-14);
        }
        // Unequal couplings: minimum at half the return time.
        let p = ChainParams::new(6.0, 1.59);
        let t_star = PI / (6.0f64 - 2.0 * 1.59).sqrt();
        let v = tau13_closed(StateClass::B2, &p, &f, 0.5 * t_star).unwrap();
        let wk2 = 6.0 - 1.0 - 1.59 * 1.59;
        let expect = 1.0 - 4.0 * 0.59f64.powi(2) * wk2 / (6.0f64 - 3.18).powi(2);
        assert_abs_diff_eq!(v, expect, epsilon = 1e-13);
        assert_abs_diff_eq!(v, 0.567, epsilon = 1e-3);
    }

    #[test]
    fn ghz_closed_form_is_sin4() {
        for &k in &[1.0, 1.59] {
            let p = ChainParams::new(14.0, k);
            let bz = (14.0 - 2.0 * (k * k + k + 1.0f64)).sqrt();
            let f = FieldParams::from_components(1.0 + k, bz, 2.0 * bz, 0.0);
            for i in 0..100 {
                let tau = 0.013 * i as f64;
                let v = tau13_closed(StateClass::Ghz, &p, &f, tau).unwrap();
                assert_abs_diff_eq!(v, (SQRT_2 * (1.0 + k) * tau).sin().powi(4), epsilon = 1e-12);
            }
        }
        let p = ChainParams::new(14.0, 1.0);
        let f = FieldParams::from_components(2.0, 2.0 * SQRT_2, 4.0 * SQRT_2, 0.0);
        assert_abs_diff_eq!(tau123_closed(StateClass::Ghz, &p, &f, 0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(tau123_closed(StateClass::B2, &p, &f, 0.0).unwrap(), 0.0);
    }

    fn params() -> impl Strategy<Value = (ChainParams, FieldParams, f64)> {
        (-2.5f64..2.5, 0.0f64..10.0, 0.0f64..(2.0 * PI), -8.0f64..8.0, 0.0f64..(2.0 * PI), 0.0f64..6.0).prop_map(
            |(k, excess, phi, om, th, tau)| {
                (ChainParams::new(1.0 + k * k + excess, k), FieldParams::new(phi, om, th), tau)
            },
        )
    }

    proptest! {
        #[test]
        fn closed_forms_match_definitions((p, f, tau) in params()) {
            for c in StateClass::ALL {
                let psi = evolve_class(c, &p, &f, tau).unwrap();
                let closed = closed_pair(c, &p, &f, tau).unwrap();
                let def = tangles(&psi).unwrap();
                prop_assert!((closed.tau13 - def.tau13).abs() < 1e-10, "{c} tau13");
                prop_assert!((closed.tau123 - def.tau123).abs() < 1e-10, "{c} tau123");
                prop_assert!((def.tau13 + def.tau123 - c.tangle_total()).abs() < 1e-10);
            }
        }

        #[test]
        fn global_phase_invariance((p, f, tau) in params(), alpha in 0.0f64..(2.0 * PI)) {
            let psi = evolve_class(StateClass::W, &p, &f, tau).unwrap();
            let rot = psi.with_global_phase(alpha);
            prop_assert!((two_tangle_13(&psi).unwrap() - two_tangle_13(&rot).unwrap()).abs() < 1e-14);
            prop_assert!((three_tangle(&psi) - three_tangle(&rot)).abs() < 1e-14);
            for q in [Qubit::One, Qubit::Two, Qubit::Three] {
                prop_assert!((det_rho(q, &psi) - det_rho(q, &rot)).abs() < 1e-14);
            }
        }
    }
}
