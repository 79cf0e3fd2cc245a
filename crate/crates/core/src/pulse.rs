//! Lewis-Riesenfeld invariant of the effective three-level Hamiltonian and the
//! pulse pair it generates.
//!
//! The 3x3 matrices here are written on `{|Psi_1>, |Psi_D>, |Psi_2>}`. The
//! invariant is parametrized by two auxiliary angles `nu(t)` and `beta(t)`;
//! choosing those angles fixes the Rabi frequencies through the inverse of the
//! angle equations of motion.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonians::effective_three_level;
use crate::model::{Operator, StateVector};

/// Final mixing angle `beta(t_f) = arctan(sqrt 2)`.
pub fn beta_final() -> f64 {
    SQRT_2.atan()
}

/// Smallest `|sin(2 nu)|` accepted before the inverted pulses are treated as divergent.
pub const SINGULAR_TOL: f64 = 1e-9;

/// Time profile of the auxiliary angles and their derivatives on `[0, duration]`.
pub trait AuxAngles: Send + Sync {
    fn duration(&self) -> f64;
    fn nu(&self, t: f64) -> f64;
    fn nu_dot(&self, t: f64) -> f64;
    fn beta(&self, t: f64) -> f64;
    fn beta_dot(&self, t: f64) -> f64;
}

/// `nu(t) = epsilon`, `beta(t) = arctan(sqrt 2) t / t_f`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ReferenceAngles {
    pub duration: f64,
    pub epsilon: f64,
}

impl AuxAngles for ReferenceAngles {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn nu(&self, _t: f64) -> f64 {
        self.epsilon
    }

    fn nu_dot(&self, _t: f64) -> f64 {
        0.0
    }

    fn beta(&self, t: f64) -> f64 {
        beta_final() * t / self.duration
    }

    fn beta_dot(&self, _t: f64) -> f64 {
        beta_final() / self.duration
    }
}

/// The invariant `I(nu, beta)` with scale `chi`.
pub fn invariant_matrix(nu: f64, beta: f64, chi: f64) -> Operator {
    let s = chi / 5f64.sqrt();
    let (sn, cn) = nu.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let re = |x: f64| C64::from(s * x);
    let mut m = DMatrix::zeros(3, 3);
    m[(0, 1)] = re(cn * sb);
    m[(1, 0)] = re(cn * sb);
    m[(1, 2)] = re(cn * cb);
    m[(2, 1)] = re(cn * cb);
    m[(0, 2)] = C64::new(0.0, -s * sn);
    m[(2, 0)] = C64::new(0.0, s * sn);
    Operator::hermitian(m).expect("invariant is Hermitian by construction")
}

/// Equations of motion of the auxiliary angles for given pulses:
/// returns `(nu_dot, beta_dot)`.
pub fn aux_angle_rates(nu: f64, beta: f64, omega1: f64, omega2_prime: f64) -> (f64, f64) {
    let s = 5f64.sqrt();
    let (sb, cb) = beta.sin_cos();
    let nu_dot = (omega1 * cb - omega2_prime * sb) / s;
    let beta_dot = nu.tan() * (omega2_prime * cb + omega1 * sb) / s;
    (nu_dot, beta_dot)
}

fn invert(nu: f64, nu_dot: f64, beta: f64, beta_dot: f64) -> (f64, f64) {
    let s = 5f64.sqrt();
    let (sb, cb) = beta.sin_cos();
    let cot = 1.0 / nu.tan();
    let omega1 = s * (beta_dot * cot * sb + nu_dot * cb);
    let omega2p = s * (beta_dot * cot * cb - nu_dot * sb);
    (omega1, omega2p)
}

/// Rabi frequencies `(Omega_1, Omega_2')` that make `I(nu(t), beta(t))` an
/// invariant of the effective Hamiltonian.
pub fn pulses_from_aux(angles: &dyn AuxAngles, t: f64) -> Result<(f64, f64)> {
    let nu = angles.nu(t);
    if (2.0 * nu).sin().abs() < SINGULAR_TOL || !(0.0..=std::f64::consts::FRAC_PI_2).contains(&nu) {
        return Err(Error::SingularProtocol { t, nu });
    }
    Ok(invert(nu, angles.nu_dot(t), angles.beta(t), angles.beta_dot(t)))
}

/// A sample of the auxiliary angles.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct AngleSample {
    pub t: f64,
    pub nu: f64,
    pub beta: f64,
}

/// Integrates the auxiliary-angle equations of motion with RK4 under the given
/// pulses, returning `steps + 1` samples from `t = 0` to `duration`.
pub fn integrate_aux_angles<F>(pulses: F, nu0: f64, beta0: f64, duration: f64, steps: usize) -> Vec<AngleSample>
where
    F: Fn(f64) -> (f64, f64),
{
    let rhs = |t: f64, nu: f64, beta: f64| {
        let (o1, o2) = pulses(t);
        aux_angle_rates(nu, beta, o1, o2)
    };
    let dt = duration / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let (mut nu, mut beta) = (nu0, beta0);
    out.push(AngleSample { t: 0.0, nu, beta });
    for k in 0..steps {
        let t = duration * k as f64 / steps as f64;
        let th = duration * (k as f64 + 0.5) / steps as f64;
        let t1 = duration * (k + 1) as f64 / steps as f64;
        let k1 = rhs(t, nu, beta);
        let k2 = rhs(th, nu + 0.5 * dt * k1.0, beta + 0.5 * dt * k1.1);
        let k3 = rhs(th, nu + 0.5 * dt * k2.0, beta + 0.5 * dt * k2.1);
        let k4 = rhs(t1, nu + dt * k3.0, beta + dt * k3.1);
        nu += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        beta += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        out.push(AngleSample { t: t1, nu, beta });
    }
    out
}

#[derive(Clone)]
enum Shape {
    Reference { angles: ReferenceAngles, amplitude: f64 },
    Custom(Arc<dyn AuxAngles>),
}

/// A designed drive pair `(Omega_1(t), Omega_2'(t))` on `[0, duration]`.
#[derive(Clone)]
pub struct PulseProtocol {
    shape: Shape,
    duration: f64,
    peak: f64,
}

impl fmt::Debug for PulseProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("PulseProtocol");
        d.field("duration", &self.duration).field("peak", &self.peak);
        if let Shape::Reference { angles, .. } = &self.shape {
            d.field("epsilon", &angles.epsilon);
        }
        d.finish()
    }
}

impl PulseProtocol {
    /// Constant `nu = epsilon` and linear `beta`, giving sine/cosine pulses with
    /// amplitude `sqrt5 arctan(sqrt2) cot(epsilon) / t_f`.
    pub fn reference(tf: f64, epsilon: f64) -> Result<Self> {
        if !(tf > 0.0 && tf.is_finite()) {
            return Err(Error::InvalidArgument(format!("t_f must be positive, got {tf}")));
        }
        if !(epsilon > 0.0 && epsilon < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidArgument(format!("epsilon must lie in (0, pi/2), got {epsilon}")));
        }
        let amplitude = 5f64.sqrt() * beta_final() / (tf * epsilon.tan());
        Ok(Self {
            shape: Shape::Reference { angles: ReferenceAngles { duration: tf, epsilon }, amplitude },
            duration: tf,
            peak: amplitude,
        })
    }

    /// Pulses obtained by inverting arbitrary angle profiles. The profile is
    /// checked for singular points on a 2001-point grid.
    pub fn from_angles(angles: Arc<dyn AuxAngles>) -> Result<Self> {
        let duration = angles.duration();
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidArgument(format!("duration must be positive, got {duration}")));
        }
        let mut peak: f64 = 0.0;
        for k in 0..=2000 {
            let t = duration * k as f64 / 2000.0;
            let (o1, o2) = pulses_from_aux(angles.as_ref(), t)?;
            peak = peak.max(o1.abs()).max(o2.abs());
        }
        Ok(Self { shape: Shape::Custom(angles), duration, peak })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// `epsilon` of a reference protocol.
    pub fn epsilon(&self) -> Option<f64> {
        match &self.shape {
            Shape::Reference { angles, .. } => Some(angles.epsilon),
            Shape::Custom(_) => None,
        }
    }

    /// Largest `|Omega_1|` or `|Omega_2'|` over the pulse.
    pub fn peak_amplitude(&self) -> f64 {
        self.peak
    }

    pub fn angles(&self) -> Arc<dyn AuxAngles> {
        match &self.shape {
            Shape::Reference { angles, .. } => Arc::new(*angles),
            Shape::Custom(a) => a.clone(),
        }
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        if t >= 0.0 && t <= self.duration * (1.0 + 1e-12) {
            Ok(())
        } else {
            Err(Error::OutOfRange { t, duration: self.duration })
        }
    }

    fn pair(&self, t: f64) -> (f64, f64) {
        match &self.shape {
            Shape::Reference { angles, amplitude } => {
                let (s, c) = angles.beta(t).sin_cos();
                (amplitude * s, amplitude * c)
            }
            Shape::Custom(a) => invert(a.nu(t), a.nu_dot(t), a.beta(t), a.beta_dot(t)),
        }
    }

    pub fn omega1(&self, t: f64) -> f64 {
        self.pair(t).0
    }

    pub fn omega2_prime(&self, t: f64) -> f64 {
        self.pair(t).1
    }

    /// Bare atom-2 drive amplitude `Omega_2 = Omega_2' / sqrt2`.
    pub fn omega2(&self, t: f64) -> f64 {
        self.pair(t).1 / SQRT_2
    }

    /// Effective Hamiltonian `H_0(t)` of the protocol.
    pub fn h0(&self, t: f64) -> Operator {
        let (o1, o2) = self.pair(t);
        effective_three_level(o1, o2)
    }

    /// Invariant `I(t)` along the protocol with scale `chi`.
    pub fn invariant(&self, t: f64, chi: f64) -> Operator {
        let a = self.angles();
        invariant_matrix(a.nu(t), a.beta(t), chi)
    }
}

/// `F(epsilon) = [1 - sin^2(epsilon) (1 - cos(arctan(sqrt2)/sin(epsilon)))]^2`.
pub fn closed_form_fidelity(epsilon: f64) -> f64 {
    let s = epsilon.sin();
    let inner = 1.0 - s * s * (1.0 - (beta_final() / s).cos());
    inner * inner
}

/// The smallest-phase unit-fidelity angle, `arcsin(arctan(sqrt2) / 2pi)`.
pub fn epsilon_star() -> f64 {
    epsilon_branch(1).expect("n = 1 is always admissible")
}

/// Angle satisfying `arctan(sqrt2) / sin(epsilon) = 2 n pi`. Larger `n` also
/// gives unit closed-form fidelity but raises the pulse amplitude as `cot(epsilon)`.
pub fn epsilon_branch(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("branch index must be at least 1".into()));
    }
    Ok((beta_final() / (2.0 * PI * n as f64)).asin())
}

/// Eigenstates of the invariant: `[|phi_0>, |phi_+>, |phi_->]` with
/// eigenvalues `0, +chi/sqrt5, -chi/sqrt5`.
pub fn invariant_eigenstates(nu: f64, beta: f64) -> [StateVector; 3] {
    let (sn, cn) = nu.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let r = 1.0 / SQRT_2;
    let zero = StateVector::from_slice(&[C64::from(cn * cb), C64::new(0.0, -sn), C64::from(-cn * sb)]);
    let plus_minus = |sign: f64| {
        StateVector::from_slice(&[
            C64::new(r * sn * cb, sign * r * sb),
            C64::new(0.0, r * cn),
            C64::new(-r * sn * sb, sign * r * cb),
        ])
    };
    [zero, plus_minus(1.0), plus_minus(-1.0)]
}

/// `d/dnu` and `d/dbeta` of the invariant eigenstates, in the order of
/// [`invariant_eigenstates`].
fn eigenstate_partials(nu: f64, beta: f64) -> [([C64; 3], [C64; 3]); 3] {
    let (sn, cn) = nu.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let r = 1.0 / SQRT_2;
    let zero = (
        [C64::from(-sn * cb), C64::new(0.0, -cn), C64::from(sn * sb)],
        [C64::from(-cn * sb), C64::from(0.0), C64::from(-cn * cb)],
    );
    let pm = |sign: f64| {
        (
            [C64::from(r * cn * cb), C64::new(0.0, -r * sn), C64::from(-r * cn * sb)],
            [C64::new(-r * sn * sb, sign * r * cb), C64::from(0.0), C64::new(-r * sn * cb, -sign * r * sb)],
        )
    };
    [zero, pm(1.0), pm(-1.0)]
}

/// Lewis-Riesenfeld phases accumulated over the whole protocol.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct LrPhases {
    pub zero: f64,
    pub plus: f64,
    pub minus: f64,
}

/// Integrates `alpha_n = int <phi_n| i d/dt - H_0 |phi_n> dt` over `[0, t_f]`
/// with composite Simpson quadrature on `intervals` (rounded up to even) panels.
pub fn lr_phases(protocol: &PulseProtocol, intervals: usize) -> LrPhases {
    let n = intervals.max(2).next_multiple_of(2);
    let angles = protocol.angles();
    let tf = protocol.duration();
    let integrand = |t: f64| -> [f64; 3] {
        let (nu, beta) = (angles.nu(t), angles.beta(t));
        let (nu_dot, beta_dot) = (angles.nu_dot(t), angles.beta_dot(t));
        let states = invariant_eigenstates(nu, beta);
        let partials = eigenstate_partials(nu, beta);
        let h = protocol.h0(t);
        let mut out = [0.0; 3];
        for k in 0..3 {
            let phi = &states[k];
            let (dn, db) = &partials[k];
            let dphi: Vec<C64> = (0..3).map(|i| dn[i] * nu_dot + db[i] * beta_dot).collect();
            let geometric = phi.inner(&StateVector::from_slice(&dphi)).unwrap() * C64::i();
            let energy = phi.inner(&h.apply(phi).unwrap()).unwrap();
            out[k] = (geometric - energy).re;
        }
        out
    };
    let h = tf / n as f64;
    let mut acc = [0.0; 3];
    for k in 0..=n {
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let f = integrand(tf * k as f64 / n as f64);
        for j in 0..3 {
            acc[j] += w * f[j];
        }
    }
    let scale = h / 3.0;
    LrPhases { zero: acc[0] * scale, plus: acc[1] * scale, minus: acc[2] * scale }
}

/// Target `(|Psi_1> - sqrt2 |Psi_2>)/sqrt3` on the effective three-level basis.
pub fn effective_target() -> StateVector {
    let s = 1.0 / 3f64.sqrt();
    StateVector::from_slice(&[C64::from(s), C64::from(0.0), C64::from(-SQRT_2 * s)])
}
