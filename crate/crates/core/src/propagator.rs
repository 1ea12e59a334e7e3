//! Hamiltonian, analytic time-optimal evolution operator, and the
//! closed-form evolved amplitudes of the six representative initial states.

use core::f64::consts::FRAC_1_SQRT_2;
use core::fmt;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::linalg::{Mat8, Unitary8, C64, PAULI_I, PAULI_X, PAULI_Y, PAULI_Z};
use crate::model::{mode_sector, ChainParams, FieldParams, ModeConstants};
use crate::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Tolerance on `sum |a_i|^2 = 1`.
pub const NORM_TOL: f64 = 1e-12;

/// Three-qubit pure state, amplitudes indexed by `4*q1 + 2*q2 + q3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureState3 {
    amps: [C64; 8],
}

impl PureState3 {
    pub fn new(amps: [C64; 8]) -> Result<Self> {
        let s = Self { amps };
        let norm_sqr = s.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(s)
    }

    /// Wraps amplitudes without checking the norm.
    pub fn from_amplitudes(amps: [C64; 8]) -> Self {
        Self { amps }
    }

    /// Rescales `amps` to unit norm. Returns `None` for the zero vector.
    pub fn normalized(amps: [C64; 8]) -> Option<Self> {
        let n = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        (n > 0.0).then(|| Self {
            amps: amps.map(|a| a / n),
        })
    }

    pub fn amplitudes(&self) -> &[C64; 8] {
        &self.amps
    }

    pub fn amp(&self, i: usize) -> C64 {
        self.amps[i]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn with_global_phase(&self, alpha: f64) -> Self {
        let ph = C64::from_polar(1.0, alpha);
        Self {
            amps: self.amps.map(|a| a * ph),
        }
    }

    pub fn basis(index: usize) -> Self {
        let mut amps = [ZERO; 8];
        amps[index] = C64::new(1.0, 0.0);
        Self { amps }
    }

    /// `max_i |a_i - b_i|`.
    pub fn max_abs_diff(&self, other: &PureState3) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// LOCC classes whose representatives serve as initial states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateClass {
    /// Fully separable, `|000>`.
    S,
    /// Bi-separable, pair (2,3) entangled.
    B1,
    /// Bi-separable, pair (1,3) entangled.
    B2,
    /// Bi-separable, pair (1,2) entangled.
    B3,
    W,
    Ghz,
}

impl StateClass {
    pub const ALL: [StateClass; 6] = [
        StateClass::S,
        StateClass::B1,
        StateClass::B2,
        StateClass::B3,
        StateClass::W,
        StateClass::Ghz,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StateClass::S => "S",
            StateClass::B1 => "B1",
            StateClass::B2 => "B2",
            StateClass::B3 => "B3",
            StateClass::W => "W",
            StateClass::Ghz => "GHZ",
        }
    }

    /// Case-insensitive parse of `s`, `b1`, `b2`, `b3`, `w`, `ghz`.
    pub fn parse(s: &str) -> Option<Self> {
        StateClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
    }

    pub fn representative(&self) -> PureState3 {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let t = C64::new(1.0 / 3.0f64.sqrt(), 0.0);
        let mut a = [ZERO; 8];
        match self {
            StateClass::S => a[0] = C64::new(1.0, 0.0),
            StateClass::B1 => {
                a[1] = h;
                a[2] = h;
            }
            StateClass::B2 => {
                a[1] = h;
                a[4] = h;
            }
            StateClass::B3 => {
                a[2] = h;
                a[4] = h;
            }
            StateClass::W => {
                a[1] = t;
                a[2] = t;
                a[4] = t;
            }
            StateClass::Ghz => {
                a[0] = h;
                a[7] = h;
            }
        }
        PureState3::from_amplitudes(a)
    }

    /// `tau13 + tau123`, conserved along every optimal trajectory.
    pub fn tangle_total(&self) -> f64 {
        match self {
            StateClass::S | StateClass::B1 | StateClass::B3 => 0.0,
            StateClass::B2 | StateClass::Ghz => 1.0,
            StateClass::W => 4.0 / 9.0,
        }
    }
}

impl fmt::Display for StateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Optimal field `(B0 cos theta, B0 sin theta, Bz)` with `theta = Omega tau + theta0`.
pub fn field_at(p: &ChainParams, f: &FieldParams, tau: f64) -> Result<[f64; 3]> {
    Ok(f.resolve(p)?.vector(tau))
}

/// `Z1 Z2 + K Z2 Z3 + B(tau) . sigma_2`, assembled from Pauli tensor products.
pub fn hamiltonian_at(p: &ChainParams, f: &FieldParams, tau: f64) -> Result<Mat8> {
    let [bx, by, bz] = field_at(p, f, tau)?;
    let zz12 = Mat8::kron3(&PAULI_Z, &PAULI_Z, &PAULI_I);
    let zz23 = Mat8::kron3(&PAULI_I, &PAULI_Z, &PAULI_Z);
    let x2 = Mat8::kron3(&PAULI_I, &PAULI_X, &PAULI_I);
    let y2 = Mat8::kron3(&PAULI_I, &PAULI_Y, &PAULI_I);
    let z2 = Mat8::kron3(&PAULI_I, &PAULI_Z, &PAULI_I);
    Ok(zz12 + zz23.scale_re(p.k_ratio) + x2.scale_re(bx) + y2.scale_re(by) + z2.scale_re(bz))
}

/// Analytic time-optimal evolution operator.
///
/// Within mode `i` (outer sector `(q1, q3)`) the middle qubit evolves by
///
/// ```text
/// e^{-i Omega tau/2} [ a_i*                        -i B0 e^{-i theta0} s_i ]
///                    [ -i B0 e^{i theta(tau)} s_i   e^{i Omega tau} a_i    ]
/// ```
///
/// in the `(|0>_2, |1>_2)` basis; different sectors never mix.
pub fn u_opt(p: &ChainParams, f: &FieldParams, tau: f64) -> Result<Unitary8> {
    let m = ModeConstants::new(p, f)?;
    let fld = m.field;
    let global = C64::from_polar(1.0, -0.5 * fld.omega_big * tau);
    let spin_up = C64::from_polar(1.0, fld.omega_big * tau);
    let raise = C64::new(0.0, -fld.b0) * C64::from_polar(1.0, fld.theta(tau));
    let lower = C64::new(0.0, -fld.b0) * C64::from_polar(1.0, -fld.theta0);

    let mut u = Mat8::zeros();
    for i in 0..4 {
        let mf = m.functions(i, tau);
        let (q1, q3) = mode_sector(i);
        let lo = 4 * q1 + q3;
        let hi = lo + 2;
        u[(lo, lo)] = global * mf.a.conj();
        u[(hi, hi)] = global * spin_up * mf.a;
        u[(hi, lo)] = global * raise * mf.s;
        u[(lo, hi)] = global * lower * mf.s;
    }
    Ok(u)
}

/// Closed-form evolved amplitudes of a class representative, including the
/// global phase `e^{-i Omega tau/2}`.
pub fn evolve_class(c: StateClass, p: &ChainParams, f: &FieldParams, tau: f64) -> Result<PureState3> {
    let m = ModeConstants::new(p, f)?;
    let fld = m.field;
    let [m1, m2, m3, m4] = [0, 1, 2, 3].map(|i| m.functions(i, tau));
    let b0 = fld.b0;
    let i = Complex64::i();
    let e_theta = C64::from_polar(1.0, fld.theta(tau));
    let e_theta0 = C64::from_polar(1.0, -fld.theta0);
    let e_omega = C64::from_polar(1.0, fld.omega_big * tau);

    let mut a = [ZERO; 8];
    match c {
        StateClass::S => {
            a[0] = m1.a.conj();
            a[2] = -i * b0 * e_theta * m1.s;
        }
        StateClass::B1 | StateClass::B3 | StateClass::W | StateClass::B2 => {
            let n = if c == StateClass::W { 3.0f64.sqrt() } else { 2.0f64.sqrt() };
            let with_01 = matches!(c, StateClass::B1 | StateClass::W | StateClass::B2);
            let with_010 = matches!(c, StateClass::B1 | StateClass::W | StateClass::B3);
            let with_100 = matches!(c, StateClass::B2 | StateClass::W | StateClass::B3);
            if with_010 {
                a[0] = -i * (b0 / n) * e_theta0 * m1.s;
                a[2] = e_omega * m1.a / n;
            }
            if with_01 {
                a[1] = m2.a.conj() / n;
                a[3] = -i * (b0 / n) * e_theta * m2.s;
            }
            if with_100 {
                a[4] = m3.a.conj() / n;
                a[6] = -i * (b0 / n) * e_theta * m3.s;
            }
        }
        StateClass::Ghz => {
            let n = 2.0f64.sqrt();
            a[0] = m1.a.conj() / n;
            a[2] = -i * (b0 / n) * e_theta * m1.s;
            a[5] = -i * (b0 / n) * e_theta0 * m4.s;
            a[7] = e_omega * m4.a / n;
        }
    }
    let global = C64::from_polar(1.0, -0.5 * fld.omega_big * tau);
    Ok(PureState3::from_amplitudes(a.map(|x| x * global)))
}

/// `u_opt(tau) |psi0>`.
pub fn evolve_general(psi0: &PureState3, p: &ChainParams, f: &FieldParams, tau: f64) -> Result<PureState3> {
    let u = u_opt(p, f, tau)?;
    Ok(PureState3::from_amplitudes(u.apply(psi0.amplitudes())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_2, PI, SQRT_2};
    use proptest::prelude::*;

    fn ghz_optimal(p: &ChainParams) -> FieldParams {
        let k = p.k_ratio;
        let bz = (p.omega_hat_sq - 2.0 * (k * k + k + 1.0)).sqrt();
        FieldParams::from_components((1.0 + k).abs(), bz, 2.0 * bz, 0.0)
    }

    #[test]
    fn field_examples() {
        let p = ChainParams::new(6.0, 1.0);
        for &tau in &[0.0, 1.7, 9.0] {
            let b = field_at(&p, &FieldParams::new(0.0, 0.0, 0.0), tau).unwrap();
            assert_eq!(b, [2.0, 0.0, 0.0]);
            let b = field_at(&p, &FieldParams::new(FRAC_PI_2, 3.0, 0.4), tau).unwrap();
            assert_abs_diff_eq!(b[0], 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(b[1], 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(b[2], 2.0, epsilon = 1e-15);
        }
        let p = ChainParams::new(14.0, 1.0);
        let b = field_at(&p, &ghz_optimal(&p), 0.0).unwrap();
        assert_abs_diff_eq!(b[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b[2], 2.0 * SQRT_2, epsilon = 1e-14);
        assert!(field_at(&ChainParams::new(1.0, 1.0), &FieldParams::new(0.0, 0.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn hamiltonian_without_field_is_diagonal_ising() {
        // omega_hat^2 = 2, K = 1 forces B = 0.
        let h = hamiltonian_at(&ChainParams::new(2.0, 1.0), &FieldParams::new(0.3, 1.0, 0.0), 0.5).unwrap();
        // Brute force: z1 z2 + z2 z3 with z = +1 for bit 0.
        for i in 0..8 {
            let z = |b: usize| if (i >> b) & 1 == 0 { 1.0 } else { -1.0 };
            let expect = z(2) * z(1) + z(1) * z(0);
            for j in 0..8 {
                let v = if i == j { expect } else { 0.0 };
                assert_eq!(h[(i, j)], C64::new(v, 0.0));
            }
        }
        let diag: [f64; 8] = core::array::from_fn(|i| h[(i, i)].re);
        assert_eq!(diag, [2.0, 0.0, -2.0, 0.0, 0.0, -2.0, 0.0, 2.0]);
    }

    #[test]
    fn hamiltonian_trace_and_energy() {
        let p = ChainParams::new(6.0, 1.0);
        let h = hamiltonian_at(&p, &FieldParams::new(0.7, 2.0, 0.3), 1.1).unwrap();
        assert!(h.trace().norm() < 1e-15);
        assert!(h.hermiticity_defect() < 1e-15);
        assert_abs_diff_eq!((h * h).trace().re, 48.0, epsilon = 1e-12);
    }

    #[test]
    fn u_opt_identity_at_origin() {
        let p = ChainParams::new(6.0, 1.59);
        let u = u_opt(&p, &FieldParams::new(0.9, -2.0, 1.3), 0.0).unwrap();
        assert!(u.max_abs_diff(&Mat8::identity()) < 1e-15);
    }

    #[test]
    fn u_opt_middle_zero_column() {
        // Input |000> (mode 1, middle |0>): column (a1*, -i B0 e^{i theta} s1) up to the global phase.
        let p = ChainParams::new(6.0, 1.59);
        let f = FieldParams::new(0.6, 1.7, 0.25);
        let tau = 0.83;
        let u = u_opt(&p, &f, tau).unwrap();
        let m = ModeConstants::new(&p, &f).unwrap();
        let mf = m.functions(0, tau);
        let g = C64::from_polar(1.0, 0.5 * f.omega_big * tau);
        assert!((u[(0, 0)] * g - mf.a.conj()).norm() < 1e-15);
        let expect = C64::new(0.0, -m.field.b0) * C64::from_polar(1.0, f.omega_big * tau + f.theta0) * mf.s;
        assert!((u[(2, 0)] * g - expect).norm() < 1e-15);
        for r in [1, 3, 4, 5, 6, 7] {
            assert_eq!(u[(r, 0)], ZERO);
        }
    }

    #[test]
    fn u_opt_never_mixes_sectors() {
        let p = ChainParams::new(9.0, -0.4);
        let u = u_opt(&p, &FieldParams::new(2.0, 3.3, 0.1), 2.2).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                let same = (r >> 2, r & 1) == (c >> 2, c & 1);
                if !same {
                    assert_eq!(u[(r, c)], ZERO, "({r},{c})");
                }
            }
        }
    }

    #[test]
    fn schrodinger_residual_is_second_order() {
        let p = ChainParams::new(14.0, 1.59);
        let f = FieldParams::new(0.8, 3.0, 0.4);
        let tau = 0.7;
        let residual = |h: f64| {
            let hm = hamiltonian_at(&p, &f, tau).unwrap();
            let u = u_opt(&p, &f, tau).unwrap();
            let lhs = u_opt(&p, &f, tau + h).unwrap() - u_opt(&p, &f, tau - h).unwrap();
            (lhs + (hm * u).scale(C64::new(0.0, 2.0 * h))).max_abs()
        };
        let r1 = residual(1e-2);
        let r2 = residual(5e-3);
        // Central difference: residual ~ h^3 per unit of dU/dtau, so halving h
        // shrinks it ~8x.
        assert!(r1 < 1e-3, "{r1}");
        assert!(r1 / r2 > 7.0 && r1 / r2 < 9.0, "ratio {}", r1 / r2);
    }

    #[test]
    fn representatives() {
        let s = StateClass::S.representative();
        assert_eq!(s.amp(0), C64::new(1.0, 0.0));
        let b2 = StateClass::B2.representative();
        assert_abs_diff_eq!(b2.amp(1).re, 1.0 / SQRT_2);
        assert_abs_diff_eq!(b2.amp(4).re, 1.0 / SQRT_2);
        let w = StateClass::W.representative();
        for i in [1, 2, 4] {
            assert_abs_diff_eq!(w.amp(i).re, 1.0 / 3.0f64.sqrt(), epsilon = 1e-16);
        }
        for c in StateClass::ALL {
            assert!(PureState3::new(*c.representative().amplitudes()).is_ok());
            assert_eq!(StateClass::parse(&c.name().to_ascii_lowercase()), Some(c));
        }
        assert_eq!(StateClass::parse("xyz"), None);
    }

    #[test]
    fn state_norm_is_checked() {
        let mut a = [ZERO; 8];
        a[3] = C64::new(0.9, 0.0);
        assert!(matches!(PureState3::new(a), Err(Error::NotNormalized { .. })));
        let n = PureState3::normalized(a).unwrap();
        assert_eq!(n.amp(3), C64::new(1.0, 0.0));
        assert!(PureState3::normalized([ZERO; 8]).is_none());
    }

    #[test]
    fn separable_class_table() {
        let p = ChainParams::new(6.0, 1.59);
        let f = FieldParams::new(0.2, 0.9, 0.5);
        let tau = 1.3;
        let psi = evolve_class(StateClass::S, &p, &f, tau).unwrap();
        let m = ModeConstants::new(&p, &f).unwrap();
        let mf = m.functions(0, tau);
        let g = C64::from_polar(1.0, -0.5 * f.omega_big * tau);
        assert!((psi.amp(0) - g * mf.a.conj()).norm() < 1e-15);
        let a2 = C64::new(0.0, -m.field.b0) * C64::from_polar(1.0, m.field.theta(tau)) * mf.s * g;
        assert!((psi.amp(2) - a2).norm() < 1e-15);
        for i in [1, 3, 4, 5, 6, 7] {
            assert_eq!(psi.amp(i), ZERO);
        }
    }

    #[test]
    fn ghz_at_origin_is_representative() {
        let p = ChainParams::new(14.0, 1.0);
        let psi = evolve_class(StateClass::Ghz, &p, &ghz_optimal(&p), 0.0).unwrap();
        assert!(psi.max_abs_diff(&StateClass::Ghz.representative()) < 1e-15);
    }

    #[test]
    fn evolve_general_basis_state_at_origin() {
        let p = ChainParams::new(6.0, 1.59);
        for i in 0..8 {
            let e = PureState3::basis(i);
            let out = evolve_general(&e, &p, &FieldParams::new(1.0, 2.0, 3.0), 0.0).unwrap();
            assert!(out.max_abs_diff(&e) < 1e-15);
        }
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
        fn u_opt_is_unitary((p, f, tau) in params()) {
            let u = u_opt(&p, &f, tau).unwrap();
            prop_assert!(u.unitarity_defect() < 1e-12);
        }

        #[test]
        fn class_tables_match_operator((p, f, tau) in params()) {
            for c in StateClass::ALL {
                let closed = evolve_class(c, &p, &f, tau).unwrap();
                let general = evolve_general(&c.representative(), &p, &f, tau).unwrap();
                prop_assert!(closed.max_abs_diff(&general) < 1e-12, "{c}");
                prop_assert!((closed.norm_sqr() - 1.0).abs() < 1e-12);
            }
        }
    }
}
