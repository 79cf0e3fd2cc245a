//! Laser and cavity-fiber Hamiltonians, the dark-state Zeno subspace and the
//! projected effective Hamiltonians.

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{self, terms, Basis, Location, Operator, Polarization, StateVector, ZENO_BLOCK};
use crate::pulse::PulseProtocol;

/// Relative eigenvalue cutoff used to identify the null space of `H_acf`.
pub const NULL_EIGEN_TOL: f64 = 1e-9;

/// Physical constants and protocol parameters, in units where `g` carries the
/// frequency scale.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SystemParams {
    /// Atom-cavity coupling.
    pub g: f64,
    /// Cavity-fiber coupling.
    pub v: f64,
    /// Photon leakage rate per mode.
    pub kappa: f64,
    /// Spontaneous emission rate per decay channel.
    pub gamma: f64,
    /// Operation time.
    pub tf: f64,
    /// Invariant angle `nu = epsilon` of the reference protocol.
    pub epsilon: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self { g: 1.0, v: 1.0, kappa: 0.0, gamma: 0.0, tf: 90.0, epsilon: 0.153 }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
        if !(self.g > 0.0 && self.g.is_finite()) {
            return bad("g must be positive");
        }
        if !(self.v >= 0.0 && self.v.is_finite()) {
            return bad("v must be non-negative");
        }
        if !(self.kappa >= 0.0 && self.gamma >= 0.0) {
            return bad("decay rates must be non-negative");
        }
        if !(self.tf > 0.0 && self.tf.is_finite()) {
            return bad("t_f must be positive");
        }
        if !(self.epsilon > 0.0 && self.epsilon < std::f64::consts::FRAC_PI_2) {
            return bad("epsilon must lie in (0, pi/2)");
        }
        Ok(())
    }

    /// Whether `v = g` to the precision the three-level reduction needs.
    pub fn v_equals_g(&self) -> bool {
        (self.v - self.g).abs() <= 1e-12 * self.g
    }
}

/// `Omega1 |e0><g0| + Omega2 (|eL><gL| + |eR><gR|) + H.c.`
pub fn build_h_al(omega1: f64, omega2: f64, basis: &Basis) -> Operator {
    let d1 = terms::atom1_drive();
    let d2l = terms::atom2_drive(Polarization::L);
    let d2r = terms::atom2_drive(Polarization::R);
    Operator::from_transfers(
        basis,
        [(C64::from(omega1), &d1), (C64::from(omega2), &d2l), (C64::from(omega2), &d2r)],
    )
    .plus_adjoint()
}

/// Atom-cavity and cavity-fiber couplings with `g_{1,i} = g_{2,i} = g`.
pub fn build_h_acf(params: &SystemParams, basis: &Basis) -> Operator {
    let g = C64::from(params.g);
    let v = C64::from(params.v);
    let mut couplings = Vec::new();
    for p in Polarization::BOTH {
        couplings.push((g, terms::atom1_cavity(p)));
        couplings.push((g, terms::atom2_cavity(p)));
        couplings.push((v, terms::fiber_to_cavity(p, Location::Cavity1)));
        couplings.push((v, terms::fiber_to_cavity(p, Location::Cavity2)));
    }
    Operator::from_transfers(basis, couplings.iter().map(|(a, t)| (*a, t))).plus_adjoint()
}

/// `H_total(t) = H_al(Omega1(t), Omega2'(t)/sqrt2) + H_acf`.
pub fn build_h_total(
    t: f64,
    protocol: &PulseProtocol,
    params: &SystemParams,
    basis: &Basis,
) -> Result<Operator> {
    protocol.check_time(t)?;
    let h_al = build_h_al(protocol.omega1(t), protocol.omega2(t), basis);
    h_al.add(&build_h_acf(params, basis))
}

type Coefficient = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `H(t) = H_s + sum_k f_k(t) H_k` on a fixed dimension, defined on `[0, duration]`.
#[derive(Clone)]
pub struct TimeDependentHamiltonian {
    static_part: Operator,
    drives: Vec<(Operator, Coefficient)>,
    duration: f64,
}

impl std::fmt::Debug for TimeDependentHamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TimeDependentHamiltonian")
            .field("dim", &self.dim())
            .field("drives", &self.drives.len())
            .field("duration", &self.duration)
            .finish()
    }
}

impl TimeDependentHamiltonian {
    pub fn new(static_part: Operator, duration: f64) -> Self {
        Self { static_part, drives: Vec::new(), duration }
    }

    /// Adds `f(t) * op`. The operator must be Hermitian so `H(t)` stays Hermitian.
    pub fn with_drive<F>(mut self, op: Operator, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        model::check_dim(self.dim(), op.dim())?;
        if !op.is_hermitian() {
            return Err(Error::InvalidArgument("drive operators must be Hermitian".into()));
        }
        self.drives.push((op, Arc::new(f)));
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.static_part.dim()
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn static_part(&self) -> &Operator {
        &self.static_part
    }

    pub fn drive_operators(&self) -> impl Iterator<Item = &Operator> + '_ {
        self.drives.iter().map(|(op, _)| op)
    }

    pub fn coefficients(&self, t: f64) -> impl Iterator<Item = f64> + '_ {
        self.drives.iter().map(move |(_, f)| f(t))
    }

    pub fn at(&self, t: f64) -> Result<Operator> {
        if !(t >= 0.0 && t <= self.duration * (1.0 + 1e-12)) {
            return Err(Error::OutOfRange { t, duration: self.duration });
        }
        let mut m = self.static_part.matrix().clone();
        for (op, f) in &self.drives {
            m += op.matrix() * C64::from(f(t));
        }
        Operator::hermitian(m)
    }
}

/// Full-model Hamiltonian of the protocol, evaluated for `[0, protocol.duration()]`.
pub fn full_hamiltonian(
    protocol: &PulseProtocol,
    params: &SystemParams,
    basis: &Basis,
) -> Result<TimeDependentHamiltonian> {
    let d1 = build_h_al(1.0, 0.0, basis);
    let d2 = build_h_al(0.0, 1.0, basis);
    let p1 = protocol.clone();
    let p2 = protocol.clone();
    TimeDependentHamiltonian::new(build_h_acf(params, basis), protocol.duration())
        .with_drive(d1, move |t| p1.omega1(t))?
        .with_drive(d2, move |t| p2.omega2(t))
}

/// Three-level `H_0` on `{|Psi_1>, |Psi_D>, |Psi_2>}` with couplings `Omega/sqrt5`.
pub fn effective_three_level(omega1: f64, omega2_prime: f64) -> Operator {
    let s = 5f64.sqrt();
    let mut m = DMatrix::zeros(3, 3);
    m[(0, 1)] = C64::from(omega1 / s);
    m[(1, 0)] = C64::from(omega1 / s);
    m[(1, 2)] = C64::from(omega2_prime / s);
    m[(2, 1)] = C64::from(omega2_prime / s);
    Operator::hermitian(m).expect("real symmetric")
}

/// Effective three-level Hamiltonian of the protocol.
pub fn effective_hamiltonian(protocol: &PulseProtocol) -> TimeDependentHamiltonian {
    let p1 = protocol.clone();
    let p2 = protocol.clone();
    TimeDependentHamiltonian::new(Operator::zeros(3), protocol.duration())
        .with_drive(effective_three_level(1.0, 0.0), move |t| p1.omega1(t))
        .and_then(|h| h.with_drive(effective_three_level(0.0, 1.0), move |t| p2.omega2_prime(t)))
        .expect("3x3 drives are Hermitian")
}

/// Dark states of `H_acf` spanning the Zeno subspace, in the order
/// `{|phi_1>, |Psi_D>, |phi_11>, |phi_12>}`.
#[derive(Clone, Debug)]
pub struct ZenoSubspace {
    basis: Basis,
    vectors: [StateVector; 4],
    projector: Operator,
}

impl ZenoSubspace {
    pub fn vectors(&self) -> &[StateVector; 4] {
        &self.vectors
    }

    pub fn psi_d(&self) -> &StateVector {
        &self.vectors[1]
    }

    pub fn projector(&self) -> &Operator {
        &self.projector
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }
}

/// Computes the null space of `H_acf` on the twelve-state block and returns it
/// in the canonical order, embedded in `basis`.
pub fn dark_subspace(params: &SystemParams, basis: &Basis) -> Result<ZenoSubspace> {
    if params.g <= 0.0 {
        return Err(Error::Precondition("dark subspace needs g > 0".into()));
    }
    let block = Basis::zeno_block();
    let h = build_h_acf(params, &block).into_matrix();
    let eig = SymmetricEigen::new(h);
    let null: Vec<usize> = (0..ZENO_BLOCK)
        .filter(|&k| eig.eigenvalues[k].abs() < NULL_EIGEN_TOL * params.g)
        .collect();
    if null.len() != 4 {
        return Err(Error::InternalConsistency(format!(
            "H_acf null space on the 12-state block has dimension {}, expected 4",
            null.len()
        )));
    }
    let mut p = DMatrix::<C64>::zeros(ZENO_BLOCK, ZENO_BLOCK);
    for &k in &null {
        let col = eig.eigenvectors.column(k);
        p += &col * col.adjoint();
    }
    // |phi_1>, |phi_11>, |phi_12> are dark by inspection; whatever remains is |Psi_D>.
    for k in [0, 10, 11] {
        if (p[(k, k)].re - 1.0).abs() > 1e-9 {
            return Err(Error::InternalConsistency(format!(
                "|phi_{}> is not a dark state (overlap {})",
                k + 1,
                p[(k, k)].re
            )));
        }
        let mut e = DMatrix::<C64>::zeros(ZENO_BLOCK, ZENO_BLOCK);
        e[(k, k)] = C64::from(1.0);
        p -= e;
    }
    let pivot = (0..ZENO_BLOCK)
        .max_by(|&a, &b| p.column(a).norm().total_cmp(&p.column(b).norm()))
        .unwrap();
    let mut d = p.column(pivot).into_owned();
    d /= C64::from(d.norm());
    // Phase convention: the |phi_2> amplitude is real and positive.
    let anchor = d[1];
    if anchor.norm() < 1e-12 {
        return Err(Error::InternalConsistency("|Psi_D> has no |phi_2> component".into()));
    }
    d *= anchor.conj() / C64::from(anchor.norm());

    let embed = |amps: &[C64]| -> Result<StateVector> {
        let mut full = vec![C64::from(0.0); basis.len()];
        for (k, s) in block.states().iter().enumerate() {
            let i = basis
                .index_of(s)
                .ok_or_else(|| Error::InvalidArgument(format!("basis lacks {s}")))?;
            full[i] = amps[k];
        }
        Ok(StateVector::from_slice(&full))
    };
    let unit = |k: usize| {
        let mut a = vec![C64::from(0.0); ZENO_BLOCK];
        a[k] = C64::from(1.0);
        a
    };
    let vectors = [
        embed(&unit(0))?,
        embed(d.as_slice())?,
        embed(&unit(10))?,
        embed(&unit(11))?,
    ];
    let mut proj = DMatrix::<C64>::zeros(basis.len(), basis.len());
    for v in &vectors {
        proj += v.amplitudes() * v.amplitudes().adjoint();
    }
    let projector = Operator::new(proj)?;
    Ok(ZenoSubspace { basis: basis.clone(), vectors, projector })
}

/// Projection `P H_al P` expressed on the dark basis.
#[derive(Clone, Debug)]
pub struct ZenoHamiltonian {
    four_level: Operator,
    v_equals_g: bool,
}

impl ZenoHamiltonian {
    /// 4x4 matrix on `{|phi_1>, |Psi_D>, |phi_11>, |phi_12>}`.
    pub fn four_level(&self) -> &Operator {
        &self.four_level
    }

    /// 3x3 matrix on `{|Psi_1>, |Psi_D>, |Psi_2> = (|phi_11>+|phi_12>)/sqrt2}`.
    /// Only defined for `v = g`.
    pub fn three_level(&self) -> Result<Operator> {
        if !self.v_equals_g {
            return Err(Error::Precondition(
                "the three-level reduction assumes v = g".into(),
            ));
        }
        let iso = symmetric_isometry();
        Operator::hermitian(iso.adjoint() * self.four_level.matrix() * iso)
    }

    /// Largest coupling between `(|phi_11> - |phi_12>)/sqrt2` and the rest of the subspace.
    pub fn antisymmetric_coupling(&self) -> f64 {
        let s = 1.0 / SQRT_2;
        let mut a = nalgebra::DVector::<C64>::zeros(4);
        a[2] = C64::from(s);
        a[3] = C64::from(-s);
        let image = self.four_level.matrix() * &a;
        image.norm()
    }
}

fn symmetric_isometry() -> DMatrix<C64> {
    let s = C64::from(1.0 / SQRT_2);
    let mut t = DMatrix::zeros(4, 3);
    t[(0, 0)] = C64::from(1.0);
    t[(1, 1)] = C64::from(1.0);
    t[(2, 2)] = s;
    t[(3, 2)] = s;
    t
}

/// `P H_al(Omega1, Omega2) P` with `P` the Zeno projector.
pub fn zeno_effective_hamiltonian(
    omega1: f64,
    omega2: f64,
    zs: &ZenoSubspace,
    params: &SystemParams,
) -> Result<ZenoHamiltonian> {
    let h = build_h_al(omega1, omega2, zs.basis());
    let mut m = DMatrix::<C64>::zeros(4, 4);
    for (a, va) in zs.vectors().iter().enumerate() {
        let hv = h.apply(va)?;
        for (b, vb) in zs.vectors().iter().enumerate() {
            m[(b, a)] = vb.inner(&hv)?;
        }
    }
    Ok(ZenoHamiltonian { four_level: Operator::hermitian(m)?, v_equals_g: params.v_equals_g() })
}
