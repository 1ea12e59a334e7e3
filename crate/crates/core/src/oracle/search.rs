//! Deterministic search for the earliest time at which the (1,3) 2-tangle
//! reaches its class maximum, over the field constants `(phi, Omega)`.
//!
//! The objective is the first return (or first arrival) time. A coarse grid
//! over `(tau, phi, Omega)` collects candidate peaks; each is then refined by
//! golden-section passes over `phi` (outer) and `Omega` (inner), locating the
//! peak in `tau` for every trial point. `theta0` is held at zero: the
//! 2-tangle does not depend on it.

use alloc::vec::Vec;
use core::cell::Cell;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::model::{ChainParams, FieldParams, ModeConstants};
use crate::propagator::{evolve_general, StateClass};
use crate::tangle::{tau13_from_modes, two_tangle_13};
use crate::{Error, Result};

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const FIELD_TOL: f64 = 1e-9;
const TIME_TOL: f64 = 1e-10;
/// Grid peaks below `target * (1 - CANDIDATE_MARGIN)` are not refined.
const CANDIDATE_MARGIN: f64 = 0.05;
const MAX_REFINEMENTS: usize = 16;
/// Re-centred refinement passes per candidate while the optimum sits on a window edge.
const MAX_PASSES: usize = 8;
/// A refined peak within this of the target counts as reaching it.
const REACH_TOL: f64 = 1e-9;
/// Level below the peak, relative to the target, at which crossings are taken.
const CROSSING_DEPTH: f64 = 1e-3;
/// Initial values at or below this count as "starts unentangled".
const ZERO_START: f64 = 1e-12;

/// How `tau13` is evaluated during the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evaluator {
    /// Closed-form trajectory expressions.
    Closed,
    /// Analytic propagator, then reduced-density and hyperdeterminant definitions.
    Chain,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchBounds {
    pub tau_max: f64,
    pub omega_max: f64,
    pub n_tau: usize,
    pub n_phi: usize,
    pub n_omega: usize,
    /// Relative depth the trajectory must dip below the target before a
    /// return counts (only when the start is already at the target).
    pub dip: f64,
}

impl SearchBounds {
    /// 64 x 32 x 64 grid on `tau in (0, 3]`, `phi in [0, 2 pi)`, `Omega in [-2 omega_hat, 2 omega_hat)`.
    pub fn for_energy(omega_hat_sq: f64) -> Self {
        SearchBounds {
            tau_max: 3.0,
            omega_max: 2.0 * omega_hat_sq.max(0.0).sqrt(),
            n_tau: 64,
            n_phi: 32,
            n_omega: 64,
            dip: 0.05,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.tau_max > 0.0
            && self.omega_max >= 0.0
            && self.n_tau >= 3
            && self.n_phi >= 1
            && self.n_omega >= 1
            && self.tau_max.is_finite()
            && self.omega_max.is_finite()
            && (0.0..1.0).contains(&self.dip);
        if ok {
            Ok(())
        } else {
            Err(Error::EmptyBounds)
        }
    }

    fn d_tau(&self) -> f64 {
        self.tau_max / self.n_tau as f64
    }

    fn d_phi(&self) -> f64 {
        2.0 * PI / self.n_phi as f64
    }

    fn d_omega(&self) -> f64 {
        2.0 * self.omega_max / self.n_omega as f64
    }

    fn tau_at(&self, j: usize) -> f64 {
        self.tau_max * (j + 1) as f64 / self.n_tau as f64
    }

    fn phi_at(&self, i: usize) -> f64 {
        self.d_phi() * i as f64
    }

    /// `[-Omega_max, Omega_max)` in equal steps; with an even count the grid contains 0.
    fn omega_at(&self, k: usize) -> f64 {
        -self.omega_max + self.d_omega() * k as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchResult {
    pub tau_best: f64,
    pub phi_best: f64,
    pub omega_big_best: f64,
    pub value_best: f64,
    /// Value the search tried to reach: the initial 2-tangle, or 1 when the start is unentangled.
    pub target: f64,
    /// False when no trajectory in the domain left and re-reached the
    /// target; the result is then the plain grid maximum.
    pub excursion: bool,
    pub evaluations: u64,
}

impl SearchResult {
    pub fn field(&self) -> FieldParams {
        FieldParams::new(self.phi_best, self.omega_big_best, 0.0)
    }
}

struct Objective<'a> {
    class: StateClass,
    p: &'a ChainParams,
    evaluator: Evaluator,
    count: Cell<u64>,
}

impl Objective<'_> {
    fn column(&self, phi: f64, omega: f64) -> Result<Column<'_, '_>> {
        let f = FieldParams::new(phi, omega, 0.0);
        Ok(Column {
            obj: self,
            field: f,
            modes: ModeConstants::new(self.p, &f)?,
        })
    }
}

/// `tau13` along one `(phi, Omega)` trajectory.
struct Column<'a, 'b> {
    obj: &'a Objective<'b>,
    field: FieldParams,
    modes: ModeConstants,
}

impl Column<'_, '_> {
    fn at(&self, tau: f64) -> Result<f64> {
        let o = self.obj;
        o.count.set(o.count.get() + 1);
        match o.evaluator {
            Evaluator::Closed => Ok(tau13_from_modes(o.class, &self.modes, tau)),
            Evaluator::Chain => {
                let psi = evolve_general(&o.class.representative(), o.p, &self.field, tau)?;
                two_tangle_13(&psi)
            }
        }
    }
}

/// Golden-section maximization of `f` on `[lo, hi]`; returns the best sampled point.
fn golden_max<K: PartialOrd + Copy>(
    lo: f64,
    hi: f64,
    tol: f64,
    mut f: impl FnMut(f64) -> Result<K>,
) -> Result<(f64, K)> {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Bisection for the crossing of `level` between `inside` (above) and `outside` (below).
fn crossing(col: &Column, mut inside: f64, mut outside: f64, level: f64) -> Result<f64> {
    while (inside - outside).abs() > TIME_TOL {
        let mid = 0.5 * (inside + outside);
        if col.at(mid)? >= level {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(0.5 * (inside + outside))
}

#[derive(Clone, Copy, Debug)]
struct Peak {
    tau: f64,
    value: f64,
}

/// Locates the peak of `col` near `center`. The time is the midpoint of
/// the two crossings just below the peak, which is exact for trajectories
/// that are even about their extremum and robust against flat tops.
fn locate_peak(col: &Column, center: f64, half_width: f64, depth: f64) -> Result<Peak> {
    let lo = (center - half_width).max(0.0);
    let hi = center + half_width;
    let (tp, vp) = golden_max(lo, hi, TIME_TOL, |t| col.at(t))?;
    let level = vp - depth;
    let probe = half_width / 8.0;
    let mut left = None;
    let mut right = None;
    for k in 1..=16 {
        let t = tp - probe * k as f64;
        if t < 0.0 {
            break;
        }
        if col.at(t)? < level {
            left = Some(crossing(col, tp, t, level)?);
            break;
        }
    }
    for k in 1..=16 {
        let t = tp + probe * k as f64;
        if col.at(t)? < level {
            right = Some(crossing(col, tp, t, level)?);
            break;
        }
    }
    let tau = match (left, right) {
        (Some(l), Some(r)) => 0.5 * (l + r),
        _ => tp,
    };
    Ok(Peak {
        tau,
        value: col.at(tau)?,
    })
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    tau: f64,
    phi: f64,
    omega: f64,
    value: f64,
}

#[derive(Clone, Copy, Debug)]
struct Refined {
    tau: f64,
    phi: f64,
    omega: f64,
    value: f64,
}

/// `(reached, -tau)` if the peak reaches the target, `(not reached, value)` otherwise.
fn key(r: &Refined, target: f64) -> (u8, f64) {
    if r.value >= target - REACH_TOL {
        (1, -r.tau)
    } else {
        (0, r.value)
    }
}

/// Maximizes the (1,3) 2-tangle of class `class` over `(tau, phi, Omega)`,
/// preferring the earliest time at which the maximum is attained.
pub fn maximize_tau13(
    class: StateClass,
    omega_hat_sq: f64,
    k_ratio: f64,
    bounds: &SearchBounds,
    evaluator: Evaluator,
) -> Result<SearchResult> {
    bounds.validate()?;
    let p = ChainParams::new(omega_hat_sq, k_ratio);
    p.omega_k_sq()?;
    let obj = Objective {
        class,
        p: &p,
        evaluator,
        count: Cell::new(0),
    };

    let start = obj.column(0.0, 0.0)?.at(0.0)?;
    let needs_dip = start > ZERO_START;
    let target = if needs_dip { start } else { 1.0 };
    let arm_level = target * (1.0 - bounds.dip);
    let depth = CROSSING_DEPTH * target;

    let mut candidates = Vec::new();
    let mut grid_best = Refined {
        tau: 0.0,
        phi: 0.0,
        omega: 0.0,
        value: start,
    };
    let mut values = alloc::vec![0.0; bounds.n_tau];
    for i in 0..bounds.n_phi {
        for k in 0..bounds.n_omega {
            let (phi, omega) = (bounds.phi_at(i), bounds.omega_at(k));
            let col = obj.column(phi, omega)?;
            for (j, v) in values.iter_mut().enumerate() {
                *v = col.at(bounds.tau_at(j))?;
                if *v > grid_best.value {
                    grid_best = Refined {
                        tau: bounds.tau_at(j),
                        phi,
                        omega,
                        value: *v,
                    };
                }
            }
            let mut armed = !needs_dip;
            for j in 0..bounds.n_tau - 1 {
                let prev = if j == 0 { start } else { values[j - 1] };
                if armed && j > 0 && values[j] >= prev && values[j] >= values[j + 1] {
                    if values[j] >= target * (1.0 - CANDIDATE_MARGIN) {
                        candidates.push(Candidate {
                            tau: bounds.tau_at(j),
                            phi,
                            omega,
                            value: values[j],
                        });
                        break;
                    }
                }
                if values[j] < arm_level {
                    armed = true;
                }
            }
        }
    }
    // Highest grid peaks first, earlier times breaking ties. The sort is
    // stable, so equal keys keep grid order and the result is deterministic.
    candidates.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.tau.total_cmp(&b.tau)));
    // Mirror-image columns give identical peaks; refine one of each.
    candidates.dedup_by(|b, a| a.tau == b.tau && (a.value - b.value).abs() <= 1e-13);

    let (dt, dphi, domega) = (bounds.d_tau(), bounds.d_phi(), bounds.d_omega());
    let mut best: Option<Refined> = None;
    for c in candidates.iter().take(MAX_REFINEMENTS) {
        let refined = refine(&obj, c, target, depth, dt, dphi, domega)?;
        let Some(r) = refined else { continue };
        if !armed_before(&obj, &r, needs_dip, arm_level, bounds)? {
            continue;
        }
        if best.map_or(true, |b| key(&r, target) > key(&b, target)) {
            best = Some(r);
        }
    }

    let (r, excursion) = match best {
        Some(r) => (r, true),
        None => (grid_best, false),
    };
    Ok(SearchResult {
        tau_best: r.tau,
        phi_best: wrap_angle(r.phi),
        omega_big_best: r.omega,
        value_best: r.value,
        target,
        excursion,
        evaluations: obj.count.get(),
    })
}

/// Repeats [`refine_once`], re-centring the windows, until the optimum is
/// interior to them.
fn refine(
    obj: &Objective,
    c: &Candidate,
    target: f64,
    depth: f64,
    dt: f64,
    dphi: f64,
    domega: f64,
) -> Result<Option<Refined>> {
    let mut center = *c;
    let mut last = None;
    for _ in 0..MAX_PASSES {
        let r = refine_once(obj, &center, target, depth, dt, dphi, domega)?;
        if !r.value.is_finite() {
            return Ok(None);
        }
        let on_edge = (r.phi - center.phi).abs() > 1.4 * dphi || (r.omega - center.omega).abs() > 1.4 * domega;
        last = Some(r);
        if !on_edge {
            break;
        }
        center = Candidate {
            tau: r.tau,
            phi: r.phi,
            omega: r.omega,
            value: r.value,
        };
    }
    Ok(last)
}

fn refine_once(
    obj: &Objective,
    c: &Candidate,
    target: f64,
    depth: f64,
    dt: f64,
    dphi: f64,
    domega: f64,
) -> Result<Refined> {
    let peak_at = |phi: f64, omega: f64| -> Result<Refined> {
        let col = obj.column(phi, omega)?;
        let pk = locate_peak(&col, c.tau, 1.5 * dt, depth)?;
        Ok(Refined {
            tau: pk.tau,
            phi,
            omega,
            value: pk.value,
        })
    };
    let inner = |phi: f64| -> Result<Refined> {
        if domega == 0.0 {
            return peak_at(phi, c.omega);
        }
        let (omega, _) = golden_max(c.omega - 1.5 * domega, c.omega + 1.5 * domega, FIELD_TOL, |w| {
            peak_at(phi, w).map(|r| r.value)
        })?;
        peak_at(phi, omega)
    };
    let (phi, _) = golden_max(c.phi - 1.5 * dphi, c.phi + 1.5 * dphi, FIELD_TOL, |phi| {
        inner(phi).map(|r| key(&r, target))
    })?;
    inner(phi)
}

/// The trajectory at the refined point must dip below `arm_level` before its peak.
fn armed_before(obj: &Objective, r: &Refined, needs_dip: bool, arm_level: f64, bounds: &SearchBounds) -> Result<bool> {
    if !needs_dip {
        return Ok(true);
    }
    let col = obj.column(r.phi, r.omega)?;
    let n = 4 * bounds.n_tau;
    for j in 1..n {
        let t = r.tau * j as f64 / n as f64;
        if col.at(t)? < arm_level {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Maps an angle into `[0, 2 pi)`.
fn wrap_angle(x: f64) -> f64 {
    let r = x % (2.0 * PI);
    if r < 0.0 {
        r + 2.0 * PI
    } else {
        r
    }
}

/// Central-difference derivatives of `tau13` in `(tau, phi, Omega)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hessian {
    pub matrix: [[f64; 3]; 3],
    pub gradient: [f64; 3],
    pub determinant: f64,
    pub value: f64,
}

pub const HESSIAN_STEP: f64 = 1e-4;

/// Hessian of the closed-form `tau13` at `(tau, f.phi, f.omega_big)` with steps [`HESSIAN_STEP`].
pub fn hessian_at(c: StateClass, p: &ChainParams, f: &FieldParams, tau: f64) -> Result<Hessian> {
    let h = HESSIAN_STEP;
    let x0 = [tau, f.phi, f.omega_big];
    let eval = |dx: [f64; 3]| -> Result<f64> {
        let fp = FieldParams::new(x0[1] + dx[1], x0[2] + dx[2], f.theta0);
        let m = ModeConstants::new(p, &fp)?;
        Ok(tau13_from_modes(c, &m, x0[0] + dx[0]))
    };
    let unit = |i: usize, s: f64| {
        let mut d = [0.0; 3];
        d[i] = s;
        d
    };
    let add = |a: [f64; 3], b: [f64; 3]| [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
    let value = eval([0.0; 3])?;
    let mut m = [[0.0; 3]; 3];
    let mut g = [0.0; 3];
    for i in 0..3 {
        let fp = eval(unit(i, h))?;
        let fm = eval(unit(i, -h))?;
        g[i] = (fp - fm) / (2.0 * h);
        m[i][i] = (fp - 2.0 * value + fm) / (h * h);
        for j in 0..i {
            let pp = eval(add(unit(i, h), unit(j, h)))?;
            let pm = eval(add(unit(i, h), unit(j, -h)))?;
            let mp = eval(add(unit(i, -h), unit(j, h)))?;
            let mm = eval(add(unit(i, -h), unit(j, -h)))?;
            m[i][j] = (pp - pm - mp + mm) / (4.0 * h * h);
            m[j][i] = m[i][j];
        }
    }
    let determinant = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    Ok(Hessian {
        matrix: m,
        gradient: g,
        determinant,
        value,
    })
}
