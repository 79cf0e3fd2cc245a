//! One function per CLI subcommand. Each returns the table it would write.

use sta3d_core::dynamics::{simulate_full, simulate_lindblad, IntegratorConfig, TrajectoryResult};
use sta3d_core::hamiltonians::SystemParams;
use sta3d_core::model::{enumerate_basis, Basis};
use sta3d_core::pulse::{closed_form_fidelity, PulseProtocol};

use crate::config::{Grid, RunConfig};
use crate::error::{Error, Result};
use crate::output::Table;
use crate::sweep::parallel_map;

pub const PULSE_ROWS: usize = 1000;
pub const EVOLVE_ROWS: usize = 1000;

pub fn default_tf_grid() -> Grid {
    Grid { start: 10.0, stop: 150.0, count: 71 }
}

pub fn default_eps_grid() -> Grid {
    Grid { start: 0.05, stop: 0.5, count: 91 }
}

pub fn default_delta_grid() -> Grid {
    Grid { start: -0.1, stop: 0.1, count: 21 }
}

pub fn default_rate_grid() -> Grid {
    Grid { start: 0.0, stop: 0.02, count: 21 }
}

fn describe_params(p: &SystemParams) -> String {
    format!("g={} v={} kappa={} gamma={} tf={} eps={}", p.g, p.v, p.kappa, p.gamma, p.tf, p.epsilon)
}

fn base_table<S: Into<String>>(command: &str, cfg: &RunConfig, header: impl IntoIterator<Item = S>) -> Table {
    Table::new(header)
        .meta("command", command)
        .meta("params", describe_params(&cfg.params))
        .meta(
            "integrator",
            format!(
                "rk4 fixed-step; steps={} for duration tf, scaled to max(steps, ceil(steps*T/tf)) for duration T",
                cfg.steps
            ),
        )
        .meta("units", "g = 1; times in 1/g, rates in g")
}

fn one_grid(cfg: &RunConfig, default: Grid) -> Result<Grid> {
    match cfg.grids.as_slice() {
        [] => Ok(default),
        [g] => Ok(*g),
        _ => Err(Error::Config("this sweep takes a single --grid".into())),
    }
}

fn two_grids(cfg: &RunConfig, default: Grid) -> Result<(Grid, Grid)> {
    match cfg.grids.as_slice() {
        [] => Ok((default, default)),
        [g] => Ok((*g, *g)),
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::Config("a 2-D sweep takes at most two --grid values".into())),
    }
}

fn integrator(cfg: &RunConfig, duration: f64) -> IntegratorConfig {
    IntegratorConfig::with_steps(cfg.steps_for(duration))
}

fn final_fidelity(r: &TrajectoryResult) -> f64 {
    r.final_fidelity().expect("full-model probes always carry a target")
}

/// Unitary final fidelity of the reference protocol at `(tf, eps)`.
fn unitary_fidelity(cfg: &RunConfig, basis: &Basis, tf: f64, eps: f64) -> Result<f64> {
    let protocol = PulseProtocol::reference(tf, eps)?;
    let r = simulate_full(&protocol, &cfg.params, basis, &integrator(cfg, tf))?;
    Ok(final_fidelity(&r))
}

/// Laser profiles of the reference protocol.
pub fn cmd_pulses(cfg: &RunConfig) -> Result<Table> {
    cfg.validate()?;
    let p = &cfg.params;
    let protocol = PulseProtocol::reference(p.tf, p.epsilon)?;
    let mut t = base_table("pulses", cfg, ["t_g", "omega1_over_g", "omega2p_over_g"])
        .meta("rows", format!("{PULSE_ROWS} evenly spaced times on [0, tf]"))
        .meta("peak_omega2p_over_g", protocol.peak_amplitude() / p.g);
    for k in 0..PULSE_ROWS {
        let time = if k == PULSE_ROWS - 1 { p.tf } else { p.tf * k as f64 / (PULSE_ROWS - 1) as f64 };
        t.push(vec![time * p.g, protocol.omega1(time) / p.g, protocol.omega2_prime(time) / p.g]);
    }
    Ok(t)
}

/// Populations of `|phi_1>`, `|phi_11>`, `|phi_12>` and the target fidelity
/// along the reference protocol. Unitary when `kappa = gamma = 0`, Lindblad
/// otherwise.
pub fn cmd_evolve(cfg: &RunConfig) -> Result<Table> {
    cfg.validate()?;
    let p = &cfg.params;
    let basis = enumerate_basis();
    let protocol = PulseProtocol::reference(p.tf, p.epsilon)?;
    let mut ic = integrator(cfg, p.tf);
    ic.record_every = (ic.steps / EVOLVE_ROWS).max(1);
    let open = p.kappa > 0.0 || p.gamma > 0.0;
    let r = if open {
        simulate_lindblad(&protocol, p, &basis, &ic)?
    } else {
        simulate_full(&protocol, p, &basis, &ic)?
    };
    let mut t = base_table("evolve", cfg, ["t_g", "p_phi1", "p_phi11", "p_phi12", "fidelity"])
        .meta("dynamics", if open { "lindblad, 15 channels" } else { "unitary" })
        .meta("record_every", ic.record_every)
        .meta("target", "(|g0g0> - |gLgL> - |gRgR>)/sqrt3");
    for (k, &time) in r.times.iter().enumerate() {
        let pops = &r.populations[k];
        t.push(vec![time * p.g, pops[0], pops[1], pops[2], r.fidelity[k]]);
    }
    Ok(t)
}

/// Final fidelity versus operation time.
pub fn cmd_sweep_tf(cfg: &RunConfig) -> Result<Table> {
    cfg.validate()?;
    let grid = one_grid(cfg, default_tf_grid())?;
    if grid.start <= 0.0 {
        return Err(Error::Config("tf grid must be positive".into()));
    }
    let basis = enumerate_basis();
    let eps = cfg.params.epsilon;
    let points = grid.points();
    let f = parallel_map(cfg.workers, &points, None, |&tf| unitary_fidelity(cfg, &basis, tf, eps))?;
    let mut t = base_table("sweep-tf", cfg, ["tf_g", "fidelity"]).meta("grid_tf", grid);
    for (tf, f) in points.iter().zip(f) {
        t.push(vec![tf * cfg.params.g, f]);
    }
    Ok(t)
}

/// Final fidelity versus `epsilon`, with the effective-model closed form alongside.
pub fn cmd_sweep_eps(cfg: &RunConfig) -> Result<Table> {
    cfg.validate()?;
    let grid = one_grid(cfg, default_eps_grid())?;
    if grid.start <= 0.0 || grid.stop >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::Config("eps grid must lie inside (0, pi/2)".into()));
    }
    let basis = enumerate_basis();
    let tf = cfg.params.tf;
    let points = grid.points();
    let f = parallel_map(cfg.workers, &points, None, |&eps| unitary_fidelity(cfg, &basis, tf, eps))?;
    let mut t = base_table("sweep-eps", cfg, ["eps", "fidelity", "closed_form"])
        .meta("grid_eps", grid)
        .meta("note", "eps window chosen to bracket the optimum; closed_form is the effective-model fidelity");
    for (eps, f) in points.iter().zip(f) {
        t.push(vec![*eps, f, closed_form_fidelity(*eps)]);
    }
    Ok(t)
}

/// Final fidelity over relative deviations of `tf` and `epsilon`.
pub fn cmd_sweep_delta(cfg: &RunConfig) -> Result<Table> {
    cfg.validate()?;
    let (gt, ge) = two_grids(cfg, default_delta_grid())?;
    if gt.start <= -1.0 || ge.start <= -1.0 {
        return Err(Error::Config("relative deviations must stay above -1".into()));
    }
    let basis = enumerate_basis();
    let (tf, eps) = (cfg.params.tf, cfg.params.epsilon);
    let points: Vec<(f64, f64)> = gt.points().into_iter().flat_map(|x| ge.points().into_iter().map(move |y| (x, y))).collect();
    let f = parallel_map(cfg.workers, &points, None, |&(dt, de)| {
        unitary_fidelity(cfg, &basis, tf * (1.0 + dt), eps * (1.0 + de))
    })?;
    let mut t = base_table("sweep-delta", cfg, ["dtf_over_tf", "deps_over_eps", "fidelity"])
        .meta("grid_dtf_over_tf", gt)
        .meta("grid_deps_over_eps", ge)
        .meta("order", "dtf outer, deps inner")
        .meta(
            "semantics",
            "protocol rebuilt with tf' = tf(1+dtf/tf) and eps' = eps(1+deps/eps); evolved for tf'; fidelity against the ideal target",
        );
    for ((dt, de), f) in points.iter().zip(f) {
        t.push(vec![*dt, *de, f]);
    }
    Ok(t)
}

/// Lindblad final fidelity over the leakage and emission rates.
pub fn cmd_sweep_decoherence(cfg: &RunConfig) -> Result<Table> {
    cfg.validate()?;
    let (gk, gg) = two_grids(cfg, default_rate_grid())?;
    if gk.start < 0.0 || gg.start < 0.0 {
        return Err(Error::Config("rates must be non-negative".into()));
    }
    let basis = enumerate_basis();
    let p = cfg.params;
    let protocol = PulseProtocol::reference(p.tf, p.epsilon)?;
    let ic = integrator(cfg, p.tf);
    let points: Vec<(f64, f64)> = gk.points().into_iter().flat_map(|k| gg.points().into_iter().map(move |g| (k, g))).collect();
    let f = parallel_map(cfg.workers, &points, None, |&(k, g)| {
        let params = SystemParams { kappa: k * p.g, gamma: g * p.g, ..p };
        Ok(final_fidelity(&simulate_lindblad(&protocol, &params, &basis, &ic)?))
    })?;
    let mut t = base_table("sweep-decoherence", cfg, ["kappa_over_g", "gamma_over_g", "fidelity"])
        .meta("grid_kappa_over_g", gk)
        .meta("grid_gamma_over_g", gg)
        .meta("order", "kappa outer, gamma inner")
        .meta("channels", "6 photon leaks at kappa, 3 atom-1 and 6 atom-2 emissions at gamma each");
    for ((k, g), f) in points.iter().zip(f) {
        t.push(vec![*k, *g, f]);
    }
    Ok(t)
}
