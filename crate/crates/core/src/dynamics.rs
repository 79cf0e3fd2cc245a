//! Fixed-step RK4 integration of the Schrödinger and Lindblad equations
//! (`hbar = 1`), populations and fidelities.
//!
//! Time-dependent Hamiltonians are handled as `H_s + sum_k f_k(t) H_k`; the
//! integrators convert each constituent to a sparse triplet list once, and
//! each right-hand-side evaluation is a handful of sparse products.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonians::{self, SystemParams, TimeDependentHamiltonian};
use crate::model::{self, terms, Atom1Level, Atom2Level, Basis, DensityMatrix, ModeId, Operator, StateVector};
use crate::pulse::{effective_target, PulseProtocol};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Method {
    Rk4,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Number of RK4 steps across the whole duration.
    pub steps: usize,
    /// Store a snapshot every this many steps (the final step is always stored).
    pub record_every: usize,
    /// Largest tolerated `|‖psi‖ - 1|`.
    pub norm_tolerance: f64,
    /// Largest tolerated `|tr rho - 1|`.
    pub trace_tolerance: f64,
    /// Largest tolerated `max |rho - rho^dag|` before re-symmetrization.
    pub hermiticity_tolerance: f64,
    /// Most negative tolerated eigenvalue of `rho`.
    pub positivity_floor: f64,
    /// Eigenvalue check interval for density matrices, in steps.
    pub positivity_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Rk4,
            steps: 20_000,
            record_every: 1,
            norm_tolerance: 1e-9,
            trace_tolerance: 1e-8,
            hermiticity_tolerance: 1e-10,
            positivity_floor: -1e-6,
            positivity_every: 500,
        }
    }
}

impl IntegratorConfig {
    pub fn with_steps(steps: usize) -> Self {
        Self { steps, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.steps == 0 || self.record_every == 0 || self.positivity_every == 0 {
            return Err(Error::InvalidArgument("step counts must be positive".into()));
        }
        Ok(())
    }
}

/// What to record along a trajectory.
#[derive(Clone, Debug, Default)]
pub struct Probe {
    /// Basis indices whose populations are recorded.
    pub tracked: Vec<usize>,
    pub target: Option<StateVector>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FinalState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

/// Worst drifts observed during a run.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub max_norm_drift: f64,
    pub max_trace_drift: f64,
    pub max_hermiticity: f64,
    pub min_eigenvalue: f64,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Self { max_norm_drift: 0.0, max_trace_drift: 0.0, max_hermiticity: 0.0, min_eigenvalue: f64::INFINITY }
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryResult {
    pub times: Vec<f64>,
    /// `populations[k][j]`: population of `probe.tracked[j]` at `times[k]`.
    pub populations: Vec<Vec<f64>>,
    /// Empty if the probe had no target.
    pub fidelity: Vec<f64>,
    pub final_state: FinalState,
    pub diagnostics: Diagnostics,
}

impl TrajectoryResult {
    pub fn final_fidelity(&self) -> Option<f64> {
        self.fidelity.last().copied()
    }

    pub fn final_populations(&self) -> &[f64] {
        self.populations.last().map(|v| v.as_slice()).unwrap_or(&[])
    }
}

/// A dissipative process `rate * D[jump]`.
#[derive(Clone, Debug)]
pub struct LindbladChannel {
    pub label: String,
    pub jump: Operator,
    pub rate: f64,
}

impl LindbladChannel {
    pub fn new(label: impl Into<String>, jump: Operator, rate: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidArgument(format!("channel rate must be non-negative, got {rate}")));
        }
        Ok(Self { label: label.into(), jump, rate })
    }
}

/// Six photon-leakage channels at `kappa` and nine spontaneous-emission
/// channels at `gamma` (`e0 -> {g0,gL,gR}` on atom 1, `e_{L,R} -> {g0,gL,gR}` on atom 2).
pub fn standard_channels(params: &SystemParams, basis: &Basis) -> Vec<LindbladChannel> {
    let one = C64::from(1.0);
    let op = |t: &model::Transfer| Operator::from_transfers(basis, [(one, t)]);
    let mut out = Vec::with_capacity(15);
    for m in ModeId::ALL {
        out.push(LindbladChannel { label: format!("leak {m}"), jump: op(&terms::mode_leak(m)), rate: params.kappa });
    }
    let g1 = [Atom1Level::G0, Atom1Level::GL, Atom1Level::GR];
    for g in g1 {
        out.push(LindbladChannel {
            label: format!("atom1 e0->{}", g.label()),
            jump: op(&terms::atom1_decay(g)),
            rate: params.gamma,
        });
    }
    let g2 = [Atom2Level::G0, Atom2Level::GL, Atom2Level::GR];
    for e in [Atom2Level::EL, Atom2Level::ER] {
        for g in g2 {
            out.push(LindbladChannel {
                label: format!("atom2 {}->{}", e.label(), g.label()),
                jump: op(&terms::atom2_decay(e, g)),
                rate: params.gamma,
            });
        }
    }
    out
}

/// Fidelity against a pure target.
pub trait Fidelity {
    fn fidelity_with(&self, target: &StateVector) -> Result<f64>;
}

impl Fidelity for StateVector {
    fn fidelity_with(&self, target: &StateVector) -> Result<f64> {
        Ok(target.inner(self)?.norm_sqr())
    }
}

impl Fidelity for DensityMatrix {
    fn fidelity_with(&self, target: &StateVector) -> Result<f64> {
        model::check_dim(self.dim(), target.dim())?;
        let t = target.amplitudes();
        Ok((t.adjoint() * self.matrix() * t)[(0, 0)].re)
    }
}

impl Fidelity for FinalState {
    fn fidelity_with(&self, target: &StateVector) -> Result<f64> {
        match self {
            FinalState::Pure(p) => p.fidelity_with(target),
            FinalState::Mixed(r) => r.fidelity_with(target),
        }
    }
}

/// `|<target|psi>|^2` for pure states, `<target|rho|target>` for mixed ones.
pub fn fidelity<S: Fidelity + ?Sized>(state: &S, target: &StateVector) -> Result<f64> {
    state.fidelity_with(target)
}

/// The entangled target `(|g0 g0> - |gL gL> - |gR gR>)/sqrt3` on the full basis.
pub fn target_state(basis: &Basis) -> StateVector {
    signed_target(basis, -1.0)
}

/// Same as [`target_state`] with `+` signs; kept to check the sign convention.
pub fn plus_sign_target(basis: &Basis) -> StateVector {
    signed_target(basis, 1.0)
}

fn signed_target(basis: &Basis, sign: f64) -> StateVector {
    let s = 1.0 / 3f64.sqrt();
    let mut a = vec![C64::from(0.0); basis.len()];
    a[basis.phi(1)] = C64::from(s);
    a[basis.phi(11)] = C64::from(sign * s);
    a[basis.phi(12)] = C64::from(sign * s);
    StateVector::from_slice(&a)
}

#[derive(Clone, Debug)]
struct Sparse {
    entries: Vec<(usize, usize, C64)>,
}

impl Sparse {
    fn from_dense(m: &DMatrix<C64>) -> Self {
        let mut entries = Vec::new();
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let z = m[(r, c)];
                if z != C64::from(0.0) {
                    entries.push((r, c, z));
                }
            }
        }
        Self { entries }
    }

    /// `y += s * A x`.
    fn mul_vec_add(&self, s: C64, x: &[C64], y: &mut [C64]) {
        for &(r, c, a) in &self.entries {
            y[r] += s * a * x[c];
        }
    }

    /// `Y += s * A X` for row-major `n x n` matrices.
    fn mul_mat_add(&self, s: C64, x: &[C64], y: &mut [C64], n: usize) {
        for &(r, c, a) in &self.entries {
            let f = s * a;
            let (src, dst) = (&x[c * n..(c + 1) * n], &mut y[r * n..(r + 1) * n]);
            for j in 0..n {
                dst[j] += f * src[j];
            }
        }
    }

    /// `Y += s * A X A^dag` for row-major `n x n` matrices.
    fn sandwich_add(&self, s: f64, x: &[C64], y: &mut [C64], n: usize) {
        for &(i, k, a) in &self.entries {
            for &(j, l, b) in &self.entries {
                y[i * n + j] += a * x[k * n + l] * b.conj() * s;
            }
        }
    }
}

struct SparseHamiltonian<'a> {
    source: &'a TimeDependentHamiltonian,
    static_part: Sparse,
    drives: Vec<Sparse>,
}

impl<'a> SparseHamiltonian<'a> {
    fn new(h: &'a TimeDependentHamiltonian, extra_static: Option<&DMatrix<C64>>) -> Self {
        let mut s = h.static_part().matrix().clone();
        if let Some(e) = extra_static {
            s += e;
        }
        Self {
            source: h,
            static_part: Sparse::from_dense(&s),
            drives: h.drive_operators().map(|op| Sparse::from_dense(op.matrix())).collect(),
        }
    }

    fn coefficients(&self, t: f64, buf: &mut Vec<f64>) {
        buf.clear();
        buf.extend(self.source.coefficients(t));
    }
}

fn step_times(duration: f64, steps: usize, k: usize) -> (f64, f64, f64) {
    let n = steps as f64;
    (duration * k as f64 / n, duration * (k as f64 + 0.5) / n, duration * (k + 1) as f64 / n)
}

fn check_duration(h: &TimeDependentHamiltonian, duration: f64) -> Result<()> {
    if !(duration > 0.0 && duration <= h.duration() * (1.0 + 1e-12)) {
        return Err(Error::OutOfRange { t: duration, duration: h.duration() });
    }
    Ok(())
}

fn axpy(out: &mut [C64], base: &[C64], s: f64, k: &[C64]) {
    for ((o, b), d) in out.iter_mut().zip(base).zip(k) {
        *o = b + d * s;
    }
}

/// Solves `i dpsi/dt = H(t) psi` from `t = 0` to `duration`.
pub fn evolve_schrodinger(
    h: &TimeDependentHamiltonian,
    psi0: &StateVector,
    duration: f64,
    cfg: &IntegratorConfig,
    probe: &Probe,
) -> Result<TrajectoryResult> {
    cfg.validate()?;
    check_duration(h, duration)?;
    model::check_dim(h.dim(), psi0.dim())?;
    if psi0.norm_drift() > cfg.norm_tolerance {
        return Err(Error::Precondition(format!("initial state is not normalized (|psi| = {})", psi0.norm())));
    }
    if let Some(t) = &probe.target {
        model::check_dim(h.dim(), t.dim())?;
    }
    let n = h.dim();
    let sh = SparseHamiltonian::new(h, None);
    let minus_i = C64::new(0.0, -1.0);
    let mut coeffs = Vec::new();
    let mut rhs = |t: f64, x: &[C64], out: &mut [C64]| {
        out.iter_mut().for_each(|z| *z = C64::from(0.0));
        sh.static_part.mul_vec_add(minus_i, x, out);
        sh.coefficients(t, &mut coeffs);
        for (d, &f) in sh.drives.iter().zip(coeffs.iter()) {
            if f != 0.0 {
                d.mul_vec_add(minus_i * f, x, out);
            }
        }
    };

    let mut psi: Vec<C64> = psi0.amplitudes().iter().copied().collect();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![C64::from(0.0); n], vec![C64::from(0.0); n], vec![C64::from(0.0); n], vec![C64::from(0.0); n], vec![C64::from(0.0); n]);
    let mut rec = Recorder::new(probe);
    let mut diag = Diagnostics::default();
    rec.record_pure(0.0, &psi);
    let dt = duration / cfg.steps as f64;
    for k in 0..cfg.steps {
        let (t0, th, t1) = step_times(duration, cfg.steps, k);
        rhs(t0, &psi, &mut k1);
        axpy(&mut tmp, &psi, 0.5 * dt, &k1);
        rhs(th, &tmp, &mut k2);
        axpy(&mut tmp, &psi, 0.5 * dt, &k2);
        rhs(th, &tmp, &mut k3);
        axpy(&mut tmp, &psi, dt, &k3);
        rhs(t1, &tmp, &mut k4);
        for i in 0..n {
            psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
        let drift = (psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs();
        diag.max_norm_drift = diag.max_norm_drift.max(drift);
        if drift > cfg.norm_tolerance {
            return Err(Error::IntegratorFailure {
                step: k + 1,
                time: t1,
                quantity: "norm",
                drift,
                tolerance: cfg.norm_tolerance,
            });
        }
        if (k + 1) % cfg.record_every == 0 || k + 1 == cfg.steps {
            rec.record_pure(t1, &psi);
        }
    }
    Ok(rec.finish(FinalState::Pure(StateVector::from_slice(&psi)), diag))
}

/// Solves `drho/dt = -i[H, rho] + sum_c rate (c rho c^dag - {c^dag c, rho}/2)`.
pub fn evolve_lindblad(
    h: &TimeDependentHamiltonian,
    rho0: &DensityMatrix,
    channels: &[LindbladChannel],
    duration: f64,
    cfg: &IntegratorConfig,
    probe: &Probe,
) -> Result<TrajectoryResult> {
    cfg.validate()?;
    check_duration(h, duration)?;
    model::check_dim(h.dim(), rho0.dim())?;
    for c in channels {
        model::check_dim(h.dim(), c.jump.dim())?;
    }
    if let Some(t) = &probe.target {
        model::check_dim(h.dim(), t.dim())?;
    }
    if rho0.hermiticity_residual() > cfg.hermiticity_tolerance
        || (rho0.trace().re - 1.0).abs() > cfg.trace_tolerance
        || rho0.min_eigenvalue() < -1e-8
    {
        return Err(Error::Precondition("initial density matrix must be Hermitian, unit-trace and positive".into()));
    }
    let n = h.dim();
    // Non-Hermitian effective Hamiltonian: H - (i/2) sum rate c^dag c.
    let mut decay = DMatrix::<C64>::zeros(n, n);
    let active: Vec<(Sparse, f64)> = channels
        .iter()
        .filter(|c| c.rate > 0.0)
        .map(|c| {
            let m = c.jump.matrix();
            decay += (m.adjoint() * m) * C64::new(0.0, -0.5 * c.rate);
            (Sparse::from_dense(m), c.rate)
        })
        .collect();
    let sh = SparseHamiltonian::new(h, Some(&decay));
    let minus_i = C64::new(0.0, -1.0);
    let mut coeffs = Vec::new();
    let mut half = vec![C64::from(0.0); n * n];
    // With rho Hermitian, -i(H_eff rho - rho H_eff^dag) = Y + Y^dag for Y = -i H_eff rho.
    let mut rhs = |t: f64, x: &[C64], out: &mut [C64]| {
        half.iter_mut().for_each(|z| *z = C64::from(0.0));
        sh.static_part.mul_mat_add(minus_i, x, &mut half, n);
        sh.coefficients(t, &mut coeffs);
        for (d, &f) in sh.drives.iter().zip(coeffs.iter()) {
            if f != 0.0 {
                d.mul_mat_add(minus_i * f, x, &mut half, n);
            }
        }
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = half[i * n + j] + half[j * n + i].conj();
            }
        }
        for (c, rate) in &active {
            c.sandwich_add(*rate, x, out, n);
        }
    };

    let mut rho: Vec<C64> = row_major(rho0.matrix());
    let zeros = || vec![C64::from(0.0); n * n];
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (zeros(), zeros(), zeros(), zeros(), zeros());
    let mut rec = Recorder::new(probe);
    let mut diag = Diagnostics::default();
    rec.record_mixed(0.0, &rho, n);
    let dt = duration / cfg.steps as f64;
    for k in 0..cfg.steps {
        let (t0, th, t1) = step_times(duration, cfg.steps, k);
        rhs(t0, &rho, &mut k1);
        axpy(&mut tmp, &rho, 0.5 * dt, &k1);
        rhs(th, &tmp, &mut k2);
        axpy(&mut tmp, &rho, 0.5 * dt, &k2);
        rhs(th, &tmp, &mut k3);
        axpy(&mut tmp, &rho, dt, &k3);
        rhs(t1, &tmp, &mut k4);
        for i in 0..n * n {
            rho[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }

        let mut herm: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let (a, b) = (rho[i * n + j], rho[j * n + i]);
                herm = herm.max((a - b.conj()).norm());
                let m = (a + b.conj()) * 0.5;
                rho[i * n + j] = m;
                rho[j * n + i] = m.conj();
            }
        }
        diag.max_hermiticity = diag.max_hermiticity.max(herm);
        if herm > cfg.hermiticity_tolerance {
            return Err(Error::IntegratorFailure {
                step: k + 1,
                time: t1,
                quantity: "hermiticity",
                drift: herm,
                tolerance: cfg.hermiticity_tolerance,
            });
        }
        let trace: f64 = (0..n).map(|i| rho[i * n + i].re).sum();
        let drift = (trace - 1.0).abs();
        diag.max_trace_drift = diag.max_trace_drift.max(drift);
        if drift > cfg.trace_tolerance {
            return Err(Error::IntegratorFailure {
                step: k + 1,
                time: t1,
                quantity: "trace",
                drift,
                tolerance: cfg.trace_tolerance,
            });
        }
        if (k + 1) % cfg.positivity_every == 0 || k + 1 == cfg.steps {
            let ev = DensityMatrix::new(from_row_major(&rho, n))?.min_eigenvalue();
            diag.min_eigenvalue = diag.min_eigenvalue.min(ev);
            if ev < cfg.positivity_floor {
                return Err(Error::IntegratorFailure {
                    step: k + 1,
                    time: t1,
                    quantity: "negative eigenvalue",
                    drift: -ev,
                    tolerance: -cfg.positivity_floor,
                });
            }
        }
        if (k + 1) % cfg.record_every == 0 || k + 1 == cfg.steps {
            rec.record_mixed(t1, &rho, n);
        }
    }
    let final_rho = DensityMatrix::new(from_row_major(&rho, n))?;
    Ok(rec.finish(FinalState::Mixed(final_rho), diag))
}

fn row_major(m: &DMatrix<C64>) -> Vec<C64> {
    let n = m.nrows();
    (0..n * n).map(|k| m[(k / n, k % n)]).collect()
}

fn from_row_major(v: &[C64], n: usize) -> DMatrix<C64> {
    DMatrix::from_row_slice(n, n, v)
}

struct Recorder<'a> {
    probe: &'a Probe,
    times: Vec<f64>,
    populations: Vec<Vec<f64>>,
    fidelity: Vec<f64>,
}

impl<'a> Recorder<'a> {
    fn new(probe: &'a Probe) -> Self {
        Self { probe, times: Vec::new(), populations: Vec::new(), fidelity: Vec::new() }
    }

    fn record_pure(&mut self, t: f64, psi: &[C64]) {
        self.times.push(t);
        self.populations.push(self.probe.tracked.iter().map(|&i| psi[i].norm_sqr()).collect());
        if let Some(target) = &self.probe.target {
            let overlap: C64 = target.amplitudes().iter().zip(psi).map(|(a, b)| a.conj() * b).sum();
            self.fidelity.push(overlap.norm_sqr());
        }
    }

    fn record_mixed(&mut self, t: f64, rho: &[C64], n: usize) {
        self.times.push(t);
        self.populations.push(self.probe.tracked.iter().map(|&i| rho[i * n + i].re).collect());
        if let Some(target) = &self.probe.target {
            let a = target.amplitudes();
            let mut f = C64::from(0.0);
            for i in 0..n {
                for j in 0..n {
                    f += a[i].conj() * rho[i * n + j] * a[j];
                }
            }
            self.fidelity.push(f.re);
        }
    }

    fn finish(self, final_state: FinalState, diagnostics: Diagnostics) -> TrajectoryResult {
        TrajectoryResult {
            times: self.times,
            populations: self.populations,
            fidelity: self.fidelity,
            final_state,
            diagnostics,
        }
    }
}

/// Trajectory probe for the full model: populations of `|phi_1>`, `|phi_11>`,
/// `|phi_12>` and the fidelity against [`target_state`].
pub fn full_model_probe(basis: &Basis) -> Probe {
    Probe { tracked: vec![basis.phi(1), basis.phi(11), basis.phi(12)], target: Some(target_state(basis)) }
}

/// Unitary evolution of `|phi_1>` under the full Hamiltonian for the protocol's duration.
pub fn simulate_full(
    protocol: &PulseProtocol,
    params: &SystemParams,
    basis: &Basis,
    cfg: &IntegratorConfig,
) -> Result<TrajectoryResult> {
    let h = hamiltonians::full_hamiltonian(protocol, params, basis)?;
    let psi0 = StateVector::basis_vector(basis.len(), basis.phi(1));
    evolve_schrodinger(&h, &psi0, protocol.duration(), cfg, &full_model_probe(basis))
}

/// Evolution of `|Psi_1>` under the effective three-level Hamiltonian. Tracks
/// `|Psi_1>`, `|Psi_D>`, `|Psi_2>` and the fidelity against the effective target.
pub fn simulate_effective(protocol: &PulseProtocol, cfg: &IntegratorConfig) -> Result<TrajectoryResult> {
    let h = hamiltonians::effective_hamiltonian(protocol);
    let probe = Probe { tracked: vec![0, 1, 2], target: Some(effective_target()) };
    evolve_schrodinger(&h, &StateVector::basis_vector(3, 0), protocol.duration(), cfg, &probe)
}

/// Master-equation evolution of `|phi_1><phi_1|` with the standard channels.
pub fn simulate_lindblad(
    protocol: &PulseProtocol,
    params: &SystemParams,
    basis: &Basis,
    cfg: &IntegratorConfig,
) -> Result<TrajectoryResult> {
    let h = hamiltonians::full_hamiltonian(protocol, params, basis)?;
    let rho0 = DensityMatrix::from_pure(&StateVector::basis_vector(basis.len(), basis.phi(1)));
    let channels = standard_channels(params, basis);
    evolve_lindblad(&h, &rho0, &channels, protocol.duration(), cfg, &full_model_probe(basis))
}

/// Maps the effective-model basis `{|Psi_1>, |Psi_D>, |Psi_2>}` into the full basis.
pub fn embed_effective(state: &StateVector, psi_d: &StateVector, basis: &Basis) -> Result<StateVector> {
    model::check_dim(3, state.dim())?;
    let s = C64::from(1.0 / SQRT_2);
    let mut a: Vec<C64> = psi_d.amplitudes().iter().map(|z| z * state.amplitude(1)).collect();
    a[basis.phi(1)] += state.amplitude(0);
    a[basis.phi(11)] += state.amplitude(2) * s;
    a[basis.phi(12)] += state.amplitude(2) * s;
    Ok(StateVector::from_slice(&a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::enumerate_basis;

    #[test]
    fn zero_hamiltonian_is_identity() {
        let h = TimeDependentHamiltonian::new(Operator::zeros(3), 5.0);
        let psi0 = StateVector::from_slice(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::from(0.0)]);
        let r = evolve_schrodinger(&h, &psi0, 5.0, &IntegratorConfig::with_steps(100), &Probe::default()).unwrap();
        match r.final_state {
            FinalState::Pure(p) => assert_eq!(p, psi0),
            _ => unreachable!(),
        }
        assert_eq!(r.times.len(), 101);
    }

    #[test]
    fn two_level_rabi_flop() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = C64::from(1.0);
        m[(1, 0)] = C64::from(1.0);
        let h = TimeDependentHamiltonian::new(Operator::hermitian(m).unwrap(), 1.0);
        let probe = Probe { tracked: vec![0, 1], target: None };
        let r = evolve_schrodinger(&h, &StateVector::basis_vector(2, 0), 1.0, &IntegratorConfig::with_steps(2000), &probe)
            .unwrap();
        let p = r.final_populations();
        assert!((p[0] - 1f64.cos().powi(2)).abs() < 1e-12);
        assert!((p[1] - 1f64.sin().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn norm_failure_is_reported() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = C64::from(50.0);
        m[(1, 0)] = C64::from(50.0);
        let h = TimeDependentHamiltonian::new(Operator::hermitian(m).unwrap(), 1.0);
        let err = evolve_schrodinger(&h, &StateVector::basis_vector(2, 0), 1.0, &IntegratorConfig::with_steps(20), &Probe::default())
            .unwrap_err();
        assert!(matches!(err, Error::IntegratorFailure { quantity: "norm", .. }));
    }

    #[test]
    fn amplitude_damping_matches_exponential() {
        let mut c = DMatrix::zeros(2, 2);
        c[(0, 1)] = C64::from(1.0);
        let ch = LindbladChannel::new("decay", Operator::new(c).unwrap(), 0.3).unwrap();
        let h = TimeDependentHamiltonian::new(Operator::zeros(2), 2.0);
        let rho0 = DensityMatrix::from_pure(&StateVector::basis_vector(2, 1));
        let probe = Probe { tracked: vec![0, 1], target: None };
        let r = evolve_lindblad(&h, &rho0, &[ch], 2.0, &IntegratorConfig::with_steps(1000), &probe).unwrap();
        let p = r.final_populations();
        assert!((p[1] - (-0.6f64).exp()).abs() < 1e-12);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn channel_catalogue() {
        let b = enumerate_basis();
        let params = SystemParams { kappa: 0.01, gamma: 0.02, ..Default::default() };
        let ch = standard_channels(&params, &b);
        assert_eq!(ch.len(), 15);
        assert_eq!(ch.iter().filter(|c| c.rate == 0.01).count(), 6);
        assert_eq!(ch.iter().filter(|c| c.rate == 0.02).count(), 9);
        let zero = standard_channels(&SystemParams::default(), &b);
        assert!(zero.iter().all(|c| c.rate == 0.0));
        for c in &ch {
            let m = c.jump.matrix();
            for col in 0..b.len() {
                for row in 0..b.len() {
                    if m[(row, col)].norm() > 0.0 {
                        assert_eq!(b.state(row).excitation() + 1, b.state(col).excitation(), "{}", c.label);
                    }
                }
            }
        }
        assert!(LindbladChannel::new("bad", Operator::zeros(2), -1.0).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let b = enumerate_basis();
        let t = target_state(&b);
        assert!((fidelity(&t, &t).unwrap() - 1.0).abs() < 1e-15);
        let orth = StateVector::basis_vector(b.len(), b.phi(2));
        assert_eq!(fidelity(&orth, &t).unwrap(), 0.0);
        let mixed = DensityMatrix::maximally_mixed(b.len());
        assert!((fidelity(&mixed, &t).unwrap() - 1.0 / b.len() as f64).abs() < 1e-15);
        let short = StateVector::basis_vector(3, 0);
        assert!(matches!(fidelity(&short, &t), Err(Error::DimensionMismatch { .. })));
        let initial = StateVector::basis_vector(b.len(), 0);
        assert!((fidelity(&initial, &t).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bad_initial_states_rejected() {
        let h = TimeDependentHamiltonian::new(Operator::zeros(2), 1.0);
        let unnormalized = StateVector::from_slice(&[C64::from(1.0), C64::from(1.0)]);
        assert!(evolve_schrodinger(&h, &unnormalized, 1.0, &IntegratorConfig::default(), &Probe::default()).is_err());
        assert!(evolve_schrodinger(&h, &StateVector::basis_vector(2, 0), 2.0, &IntegratorConfig::default(), &Probe::default())
            .is_err());
        let cfg = IntegratorConfig { steps: 0, ..Default::default() };
        assert!(evolve_schrodinger(&h, &StateVector::basis_vector(2, 0), 1.0, &cfg, &Probe::default()).is_err());
    }
}
