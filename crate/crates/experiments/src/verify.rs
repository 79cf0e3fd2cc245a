//! Property checks across the core modules, reported one line per check.

use std::collections::BTreeSet;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use sta3d_core::dynamics::{simulate_effective, simulate_full, simulate_lindblad, IntegratorConfig};
use sta3d_core::hamiltonians::{
    dark_subspace, effective_three_level, zeno_effective_hamiltonian, SystemParams,
};
use sta3d_core::model::{
    annihilation, atomic_sigma, closure_oracle, enumerate_basis, zeno_block_states, Atom, Basis, BasisState, Level,
    ModeId, ZENO_BLOCK,
};
use sta3d_core::pulse::{
    beta_final, closed_form_fidelity, epsilon_star, integrate_aux_angles, lr_phases, AuxAngles, PulseProtocol,
};

use crate::config::RunConfig;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub module: &'static str,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    fn record(&mut self, module: &'static str, name: &'static str, ok: bool, detail: String) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.checks.push(Check { module, name, status, detail });
    }

    fn info(&mut self, module: &'static str, name: &'static str, detail: String) {
        self.checks.push(Check { module, name, status: Status::Info, detail });
    }

    fn error(&mut self, module: &'static str, name: &'static str, err: impl fmt::Display) {
        self.record(module, name, false, err.to_string());
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Fail).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Tab-separated `STATUS module name detail` lines and a summary line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{}\t{}\t{}\t{}\n", c.status, c.module, c.name, c.detail));
        }
        let count = |s| self.checks.iter().filter(|c| c.status == s).count();
        out.push_str(&format!(
            "SUMMARY\tchecks={}\tpass={}\tfail={}\tinfo={}\n",
            self.checks.len(),
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Info)
        ));
        out
    }
}

/// Smooth non-reference protocol used for the pulse round trip.
struct Bulge {
    duration: f64,
    eps: f64,
}

impl AuxAngles for Bulge {
    fn duration(&self) -> f64 {
        self.duration
    }
    fn nu(&self, t: f64) -> f64 {
        self.eps + 0.2 * (PI * t / self.duration).sin().powi(2)
    }
    fn nu_dot(&self, t: f64) -> f64 {
        0.2 * PI / self.duration * (2.0 * PI * t / self.duration).sin()
    }
    fn beta(&self, t: f64) -> f64 {
        let x = t / self.duration;
        beta_final() * (x - (2.0 * PI * x).sin() / (2.0 * PI))
    }
    fn beta_dot(&self, t: f64) -> f64 {
        beta_final() / self.duration * (1.0 - (2.0 * PI * t / self.duration).cos())
    }
}

fn max_abs_diff(a: &nalgebra::DMatrix<C64>, b: &nalgebra::DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn model_checks(r: &mut Report, basis: &Basis) {
    const M: &str = "model";
    let worst = ModeId::ALL
        .iter()
        .map(|&m| {
            let a = annihilation(m, basis);
            a.mul(&a).expect("same dimension").frobenius_norm()
        })
        .fold(0.0, f64::max);
    r.record(M, "annihilation_squared_vanishes", worst == 0.0, format!("max |a^2|_F = {worst:e}"));

    let ones = [Level::G0, Level::GL, Level::GR, Level::E0];
    let twos = [Level::G0, Level::GL, Level::GR, Level::EL, Level::ER];
    let mut pairs = 0;
    let mut ok = true;
    for (atom, levels) in [(Atom::One, &ones[..]), (Atom::Two, &twos[..])] {
        for &u in levels {
            for &l in levels {
                let s = atomic_sigma(atom, u, l, basis).expect("valid levels");
                let t = atomic_sigma(atom, l, u, basis).expect("valid levels");
                ok &= s.adjoint().matrix() == t.matrix();
                pairs += 1;
            }
        }
    }
    r.record(M, "sigma_adjoint_swaps_levels", ok, format!("{pairs} level pairs"));

    let built: BTreeSet<BasisState> = basis.states().iter().copied().collect();
    let oracle = closure_oracle();
    r.record(
        M,
        "closure_matches_oracle",
        built == oracle,
        format!("enumerated {} states, oracle {}", built.len(), oracle.len()),
    );

    let prefix = zeno_block_states().iter().enumerate().all(|(i, s)| basis.state(i) == s);
    r.record(M, "zeno_block_prefix", prefix, format!("first {ZENO_BLOCK} indices hold phi_1..phi_12"));
}

fn hamiltonian_checks(r: &mut Report, cfg: &RunConfig, basis: &Basis) {
    const M: &str = "hamiltonians";
    let g = cfg.params.g;
    let mut dims = Vec::new();
    let mut prefactor_err: f64 = 0.0;
    let mut failure = None;
    for x in [0.5, 1.0, 2.0, cfg.params.v / g] {
        let params = SystemParams { v: x * g, ..cfg.params };
        match dark_subspace(&params, basis).and_then(|zs| zeno_effective_hamiltonian(1.0, 0.0, &zs, &params)) {
            Ok(zh) => {
                dims.push(format!("v/g={x}:4"));
                let want = x / (3.0 * x * x + 2.0).sqrt();
                prefactor_err = prefactor_err.max((zh.four_level().entry(1, 0).re - want).abs());
            }
            Err(e) => failure = Some(format!("v/g={x}: {e}")),
        }
    }
    match failure {
        Some(e) => {
            r.error(M, "dark_subspace_dimension", &e);
            r.error(M, "generic_v_prefactor", e);
        }
        None => {
            r.record(M, "dark_subspace_dimension", true, dims.join(" "));
            r.record(M, "generic_v_prefactor", prefactor_err <= 1e-12, format!("max error {prefactor_err:e}"));
        }
    }

    let reduction = dark_subspace(&cfg.params, basis)
        .and_then(|zs| zeno_effective_hamiltonian(0.04, 0.09, &zs, &cfg.params))
        .and_then(|zh| Ok((zh.three_level()?, zh.antisymmetric_coupling())));
    match reduction {
        Ok((h3, anti)) => {
            let d = max_abs_diff(h3.matrix(), effective_three_level(0.04, SQRT_2 * 0.09).matrix());
            r.record(
                M,
                "three_level_reduction",
                d <= 1e-12 && anti <= 1e-12,
                format!("max deviation {d:e}, antisymmetric coupling {anti:e}"),
            );
        }
        Err(e) => r.error(M, "three_level_reduction", e),
    }
}

fn pulse_checks(r: &mut Report, protocol: &PulseProtocol, cfg: &RunConfig) {
    const M: &str = "pulse";
    let tf = protocol.duration();
    let chi = cfg.params.g;

    let o1_0 = protocol.omega1(0.0);
    let ratio = protocol.omega1(tf) / protocol.omega2_prime(tf);
    r.record(
        M,
        "boundary_pulses",
        o1_0 == 0.0 && (ratio - SQRT_2).abs() <= 1e-10 * SQRT_2,
        format!("Omega1(0) = {o1_0:e}, Omega1/Omega2'(tf) = {ratio:.15}"),
    );

    let h = tf / 1e5;
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let t = tf * k as f64 / 999.0;
        let (lo, hi) = ((t - h).max(0.0), (t + h).min(tf));
        let di = (protocol.invariant(hi, chi).matrix() - protocol.invariant(lo, chi).matrix()) / C64::from(hi - lo);
        let comm = protocol.h0(t).commutator(&protocol.invariant(t, chi)).expect("3x3");
        let res = (di * C64::i() - comm.matrix()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(res);
    }
    r.record(M, "invariance_equation", worst <= 1e-6 * chi * cfg.params.g, format!("max residual {worst:e}"));

    let c0 = protocol.h0(0.0).commutator(&protocol.invariant(0.0, chi)).expect("3x3").frobenius_norm();
    let c1 = protocol.h0(tf).commutator(&protocol.invariant(tf, chi)).expect("3x3").frobenius_norm();
    r.record(
        M,
        "boundary_commutators",
        c0 <= 1e-12 && c1 <= 1e-12,
        format!("|[H0,I]|(0) = {c0:e}, |[H0,I]|(tf) = {c1:e}"),
    );

    let angles = Arc::new(Bulge { duration: tf, eps: cfg.params.epsilon });
    match PulseProtocol::from_angles(angles.clone()) {
        Ok(custom) => {
            let n = 20_000;
            let samples = integrate_aux_angles(|t| (custom.omega1(t), custom.omega2_prime(t)), angles.nu(0.0), 0.0, tf, n);
            let dt = tf / n as f64;
            let mut peak: f64 = 0.0;
            let mut err: f64 = 0.0;
            for k in 1..n {
                let (a, s, b) = (samples[k - 1], samples[k], samples[k + 1]);
                let nu_dot = (b.nu - a.nu) / (2.0 * dt);
                let beta_dot = (b.beta - a.beta) / (2.0 * dt);
                let (sb, cb) = s.beta.sin_cos();
                let cot = 1.0 / s.nu.tan();
                let o1 = 5f64.sqrt() * (beta_dot * cot * sb + nu_dot * cb);
                let o2 = 5f64.sqrt() * (beta_dot * cot * cb - nu_dot * sb);
                err = err.max((o1 - custom.omega1(s.t)).abs()).max((o2 - custom.omega2_prime(s.t)).abs());
                peak = peak.max(custom.omega1(s.t).abs()).max(custom.omega2_prime(s.t).abs());
            }
            let rel = err / peak;
            r.record(M, "pulse_round_trip", rel <= 1e-7, format!("max relative deviation {rel:e}"));
        }
        Err(e) => r.error(M, "pulse_round_trip", e),
    }

    let e = epsilon_star();
    let d = 1e-5;
    let slope = (closed_form_fidelity(e + d) - closed_form_fidelity(e - d)) / (2.0 * d);
    r.record(M, "stationary_at_eps_star", slope.abs() <= 1e-6, format!("dF/deps = {slope:e} at eps* = {e:.12}"));

    match PulseProtocol::reference(tf, e) {
        Ok(p) => {
            let ph = lr_phases(&p, 2000);
            let err = ph.zero.abs().max((ph.plus + 2.0 * PI).abs()).max((ph.minus - 2.0 * PI).abs());
            r.record(
                M,
                "lr_phases_at_eps_star",
                err <= 1e-6,
                format!("alpha0 = {:e}, alpha+ = {:.10}, alpha- = {:.10}", ph.zero, ph.plus, ph.minus),
            );
        }
        Err(err) => r.error(M, "lr_phases_at_eps_star", err),
    }

    let eps = cfg.params.epsilon;
    r.info(M, "closed_form_fidelity", format!("F(eps = {eps}) = {:.12}; equals 1 only where arctan(sqrt2)/sin(eps) = 2n pi", closed_form_fidelity(eps)));
}

fn dynamics_checks(r: &mut Report, protocol: &PulseProtocol, cfg: &RunConfig, basis: &Basis) {
    const M: &str = "dynamics";
    let p = cfg.params;
    let ic = IntegratorConfig::with_steps(cfg.steps_for(protocol.duration()));
    let full = match simulate_full(protocol, &p, basis, &ic) {
        Ok(f) => f,
        Err(e) => {
            r.error(M, "norm_preservation", e);
            return;
        }
    };
    let drift = full.diagnostics.max_norm_drift;
    r.record(M, "norm_preservation", drift <= 1e-9, format!("max |norm - 1| = {drift:e} over {} steps", ic.steps));
    let f_full = full.final_fidelity().unwrap_or(f64::NAN);
    r.info(M, "final_fidelity", format!("F(tf) = {f_full:.12}"));

    let pops = full.final_populations();
    let worst = pops.iter().map(|x| (x - 1.0 / 3.0).abs()).fold(0.0, f64::max);
    r.record(M, "population_endpoint", worst <= 0.01, format!("P(phi1, phi11, phi12) = {pops:.6?}"));

    let half = IntegratorConfig::with_steps(ic.steps / 2);
    match simulate_full(protocol, &p, basis, &half) {
        Ok(h) => {
            let d = (h.final_fidelity().unwrap_or(f64::NAN) - f_full).abs();
            r.record(M, "step_halving", d <= 1e-8, format!("|F(n) - F(n/2)| = {d:e}"));
        }
        Err(e) => r.error(M, "step_halving", e),
    }

    let gap = |tf: f64| -> sta3d_core::Result<f64> {
        let pr = PulseProtocol::reference(tf, p.epsilon)?;
        let cfg_t = IntegratorConfig::with_steps(cfg.steps_for(tf));
        let a = simulate_full(&pr, &p, basis, &cfg_t)?.final_fidelity().unwrap_or(f64::NAN);
        let b = simulate_effective(&pr, &cfg_t)?.final_fidelity().unwrap_or(f64::NAN);
        Ok((a - b).abs())
    };
    match [protocol.duration(), 40.0, 30.0, 20.0, 10.0].map(gap) {
        [Ok(g0), Ok(a), Ok(b), Ok(c), Ok(d)] => {
            let ok = g0 <= 0.01 && a < b && b < c && c < d;
            r.record(
                M,
                "zeno_agreement",
                ok,
                format!("gap {g0:.3e} at tf; {a:.3e}, {b:.3e}, {c:.3e}, {d:.3e} at tf = 40, 30, 20, 10"),
            );
        }
        results => {
            let e = results.into_iter().find_map(|x| x.err()).expect("one run failed");
            r.error(M, "zeno_agreement", e);
        }
    }

    let closed = SystemParams { kappa: 0.0, gamma: 0.0, ..p };
    match simulate_lindblad(protocol, &closed, basis, &ic) {
        Ok(l) => {
            let d = (l.final_fidelity().unwrap_or(f64::NAN) - f_full).abs();
            r.record(M, "closed_lindblad_matches_unitary", d <= 1e-8, format!("|F_rho - F_psi| = {d:e}"));
        }
        Err(e) => r.error(M, "closed_lindblad_matches_unitary", e),
    }

    let open = if p.kappa > 0.0 || p.gamma > 0.0 { p } else { SystemParams { kappa: 0.0003, gamma: 0.001, ..p } };
    match simulate_lindblad(protocol, &open, basis, &ic) {
        Ok(l) => {
            let d = l.diagnostics;
            r.record(
                M,
                "lindblad_structure",
                d.max_trace_drift <= 1e-8 && d.max_hermiticity <= 1e-10 && d.min_eigenvalue >= -1e-8,
                format!(
                    "kappa={} gamma={}: trace drift {:e}, hermiticity {:e}, min eigenvalue {:e}",
                    open.kappa, open.gamma, d.max_trace_drift, d.max_hermiticity, d.min_eigenvalue
                ),
            );
        }
        Err(e) => r.error(M, "lindblad_structure", e),
    }
}

/// Runs every check at the configured parameters.
pub fn cmd_verify(cfg: &RunConfig) -> Report {
    let mut r = Report::default();
    if let Err(e) = cfg.validate() {
        r.error("config", "valid_config", e);
        return r;
    }
    let basis = enumerate_basis();
    model_checks(&mut r, &basis);
    hamiltonian_checks(&mut r, cfg, &basis);
    match PulseProtocol::reference(cfg.params.tf, cfg.params.epsilon) {
        Ok(protocol) => {
            pulse_checks(&mut r, &protocol, cfg);
            dynamics_checks(&mut r, &protocol, cfg, &basis);
        }
        Err(e) => r.error("pulse", "reference_protocol", e),
    }
    r
}
