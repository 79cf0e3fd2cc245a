//! End-to-end acceptance criteria. Each check prints one PASS/FAIL line; the
//! process exits nonzero if any criterion fails.

use std::f64::consts::{PI, SQRT_2};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use sta3d_core::dynamics::{
    fidelity, plus_sign_target, simulate_effective, simulate_full, simulate_lindblad, target_state,
    Diagnostics, IntegratorConfig,
};
use sta3d_core::hamiltonians::SystemParams;
use sta3d_core::model::{closure_oracle, enumerate_basis, zeno_block_states, BasisState};
use sta3d_core::pulse::{
    beta_final, closed_form_fidelity, epsilon_star, integrate_aux_angles, lr_phases, AuxAngles, PulseProtocol,
};
use sta3d_experiments::commands::{cmd_sweep_decoherence, cmd_sweep_delta, cmd_sweep_eps};
use sta3d_experiments::RunConfig;

type Outcome = Result<(bool, String), String>;

const TF: f64 = 90.0;
const EPS: f64 = 0.153;

fn params() -> SystemParams {
    SystemParams { tf: TF, epsilon: EPS, ..Default::default() }
}

fn reference() -> PulseProtocol {
    PulseProtocol::reference(TF, EPS).unwrap()
}

fn cfg4() -> RunConfig {
    RunConfig { workers: 4, ..Default::default() }
}

fn structural_ok(d: &Diagnostics) -> bool {
    d.max_norm_drift <= 1e-9 && d.max_trace_drift <= 1e-8 && d.max_hermiticity <= 1e-10 && d.min_eigenvalue >= -1e-8
}

fn headline_fidelity() -> Outcome {
    let basis = enumerate_basis();
    let start = Instant::now();
    let r = simulate_full(&reference(), &params(), &basis, &IntegratorConfig::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let f = r.final_fidelity().unwrap();
    let ok = (f - 0.996).abs() <= 0.005 && elapsed < Duration::from_secs(5);
    Ok((ok, format!("F = {f:.6} (0.996 +- 0.005), {:.2} s single-threaded (< 5 s)", elapsed.as_secs_f64())))
}

fn epsilon_optimum() -> Outcome {
    let e = epsilon_star();
    let rounded = (e * 1000.0).round() / 1000.0;
    let cf = closed_form_fidelity(e);
    let t = cmd_sweep_eps(&cfg4()).map_err(|e| e.to_string())?;
    let eps = t.column("eps").unwrap();
    let f = t.column("fidelity").unwrap();
    let (i, fmax) = f.iter().enumerate().fold((0, f64::MIN), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
    let arg = eps[i];
    let ok = rounded == 0.153 && (cf - 1.0).abs() <= 1e-12 && (0.14..=0.17).contains(&arg);
    Ok((ok, format!("eps* = {e:.6}, F_closed(eps*) - 1 = {:e}, sweep argmax eps = {arg:.4} (F = {fmax:.6})", cf - 1.0)))
}

fn boundary_conditions() -> Outcome {
    let p = reference();
    let o1 = p.omega1(0.0);
    let ratio = p.omega1(TF) / p.omega2_prime(TF);
    let c0 = p.h0(0.0).commutator(&p.invariant(0.0, 1.0)).unwrap().frobenius_norm();
    let c1 = p.h0(TF).commutator(&p.invariant(TF, 1.0)).unwrap().frobenius_norm();
    let ok = o1 == 0.0 && ((ratio - SQRT_2) / SQRT_2).abs() <= 1e-10 && c0 <= 1e-12 && c1 <= 1e-12;
    Ok((
        ok,
        format!("Omega1(0) = {o1:e}, ratio - sqrt2 = {:e}, |[H0,I]|(0) = {c0:e}, |[H0,I]|(tf) = {c1:e} (<= 1e-12)", ratio - SQRT_2),
    ))
}

fn invariance_equation() -> Outcome {
    let p = reference();
    let chi = 1.0;
    let h = TF / 1e5;
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let t = TF * k as f64 / 999.0;
        let (lo, hi) = ((t - h).max(0.0), (t + h).min(TF));
        let di = (p.invariant(hi, chi).matrix() - p.invariant(lo, chi).matrix()) / C64::from(hi - lo);
        let comm = p.h0(t).commutator(&p.invariant(t, chi)).unwrap();
        let r = (di * C64::i() - comm.matrix()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(r);
    }
    Ok((worst <= 1e-6 * chi, format!("max residual {worst:e} over 1000 points (<= 1e-6)")))
}

fn lr_phase_values() -> Outcome {
    let p = PulseProtocol::reference(TF, epsilon_star()).unwrap();
    let ph = lr_phases(&p, 2000);
    let err = ph.zero.abs().max((ph.plus + 2.0 * PI).abs()).max((ph.minus - 2.0 * PI).abs());
    Ok((err <= 1e-6, format!("alpha0 = {:e}, alpha+ = {:.9}, alpha- = {:.9}, max error {err:e}", ph.zero, ph.plus, ph.minus)))
}

fn population_endpoint() -> Outcome {
    let r = simulate_full(&reference(), &params(), &enumerate_basis(), &IntegratorConfig::default())
        .map_err(|e| e.to_string())?;
    let p = r.final_populations();
    let ok = p.iter().all(|x| (x - 1.0 / 3.0).abs() <= 0.01);
    Ok((ok, format!("P(phi1, phi11, phi12) = ({:.5}, {:.5}, {:.5}) (1/3 +- 0.01)", p[0], p[1], p[2])))
}

fn robustness_map() -> Outcome {
    let start = Instant::now();
    let t = cmd_sweep_delta(&cfg4()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let rows = t.rows();
    let at = |dt: f64, de: f64| rows.iter().find(|r| (r[0] - dt).abs() < 1e-12 && (r[1] - de).abs() < 1e-12).map(|r| r[2]);
    let corner = at(-0.1, -0.1).ok_or("grid misses (-0.1, -0.1)")?;
    let line: Vec<(f64, f64)> = rows.iter().filter(|r| r[1].abs() < 1e-12).map(|r| (r[0], r[2])).collect();
    let slope = least_squares_slope(&line);
    let f_at = |dt: f64| at(dt, 0.0).ok_or(format!("grid misses ({dt}, 0)"));
    let (lo, mid, hi) = (f_at(-0.1)?, f_at(0.0)?, f_at(0.1)?);
    let increasing = slope > 0.0 && lo < mid && mid < hi;
    let dip = line.windows(2).map(|w| w[0].1 - w[1].1).fold(0.0, f64::max);
    let ok = corner >= 0.98 && increasing && elapsed < Duration::from_secs(120);
    Ok((
        ok,
        format!(
            "F(-0.1, -0.1) = {corner:.5} (>= 0.98); along +dtf at deps = 0: F = {lo:.5}, {mid:.5}, {hi:.5} at -0.1, 0, 0.1, slope {slope:.4e}, largest step-to-step dip {dip:.1e}; 21x21 in {:.1} s (< 120 s)",
            elapsed.as_secs_f64()
        ),
    ))
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn decoherence_map() -> Outcome {
    let start = Instant::now();
    let t = cmd_sweep_decoherence(&cfg4()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let corner = t
        .rows()
        .iter()
        .find(|r| (r[0] - 0.02).abs() < 1e-12 && (r[1] - 0.02).abs() < 1e-12)
        .map(|r| r[2])
        .ok_or("grid misses (0.02, 0.02)")?;
    let weak = SystemParams { kappa: 0.0003, gamma: 0.001, ..params() };
    let fw = simulate_lindblad(&reference(), &weak, &enumerate_basis(), &IntegratorConfig::default())
        .map_err(|e| e.to_string())?
        .final_fidelity()
        .unwrap();
    let ok = corner >= 0.94 && (fw - 0.993).abs() <= 0.004 && elapsed < Duration::from_secs(600);
    Ok((
        ok,
        format!(
            "F(0.02, 0.02) = {corner:.5} (>= 0.94), F(kappa 0.0003, gamma 0.001) = {fw:.5} (0.993 +- 0.004), 21x21 in {:.1} s (< 600 s)",
            elapsed.as_secs_f64()
        ),
    ))
}

struct Bulge;

impl AuxAngles for Bulge {
    fn duration(&self) -> f64 {
        TF
    }
    fn nu(&self, t: f64) -> f64 {
        EPS + 0.2 * (PI * t / TF).sin().powi(2)
    }
    fn nu_dot(&self, t: f64) -> f64 {
        0.2 * PI / TF * (2.0 * PI * t / TF).sin()
    }
    fn beta(&self, t: f64) -> f64 {
        beta_final() * (t / TF - (2.0 * PI * t / TF).sin() / (2.0 * PI))
    }
    fn beta_dot(&self, t: f64) -> f64 {
        beta_final() / TF * (1.0 - (2.0 * PI * t / TF).cos())
    }
}

/// Largest relative deviation between designed pulses and pulses rebuilt from
/// the forward-integrated angles.
fn round_trip_error(p: &PulseProtocol, nu0: f64) -> f64 {
    let n = 20_000;
    let s = integrate_aux_angles(|t| (p.omega1(t), p.omega2_prime(t)), nu0, 0.0, TF, n);
    let dt = TF / n as f64;
    let (mut err, mut peak): (f64, f64) = (0.0, 0.0);
    for k in 1..n {
        let nu_dot = (s[k + 1].nu - s[k - 1].nu) / (2.0 * dt);
        let beta_dot = (s[k + 1].beta - s[k - 1].beta) / (2.0 * dt);
        let (sb, cb) = s[k].beta.sin_cos();
        let cot = 1.0 / s[k].nu.tan();
        let o1 = 5f64.sqrt() * (beta_dot * cot * sb + nu_dot * cb);
        let o2 = 5f64.sqrt() * (beta_dot * cot * cb - nu_dot * sb);
        let t = s[k].t;
        err = err.max((o1 - p.omega1(t)).abs()).max((o2 - p.omega2_prime(t)).abs());
        peak = peak.max(p.omega1(t).abs()).max(p.omega2_prime(t).abs());
    }
    err / peak
}

fn oracle_equivalences() -> Outcome {
    let basis = enumerate_basis();
    let cfg = IntegratorConfig::default();
    let p = reference();
    let full = simulate_full(&p, &params(), &basis, &cfg).map_err(|e| e.to_string())?;
    let eff = simulate_effective(&p, &cfg).map_err(|e| e.to_string())?;
    let ff = full.final_fidelity().unwrap();
    let gap = (ff - eff.final_fidelity().unwrap()).abs();

    let custom = PulseProtocol::from_angles(Arc::new(Bulge)).map_err(|e| e.to_string())?;
    let trip = round_trip_error(&p, EPS).max(round_trip_error(&custom, Bulge.nu(0.0)));

    let closed = simulate_lindblad(&p, &params(), &basis, &cfg).map_err(|e| e.to_string())?;
    let lind = (closed.final_fidelity().unwrap() - ff).abs();

    let mut cf: f64 = 0.0;
    for eps in [0.10, 0.153, 0.25] {
        let pe = PulseProtocol::reference(TF, eps).unwrap();
        let fe = simulate_effective(&pe, &cfg).map_err(|e| e.to_string())?.final_fidelity().unwrap();
        cf = cf.max((fe - closed_form_fidelity(eps)).abs());
    }
    let ok = gap <= 0.01 && trip <= 1e-7 && lind <= 1e-8 && cf <= 1e-6;
    Ok((
        ok,
        format!(
            "(a) |F_full - F_eff| = {gap:.3e} (<= 0.01); (b) round trip {trip:.3e} (<= 1e-7); (c) closed Lindblad vs unitary {lind:.3e} (<= 1e-8); (d) closed form vs effective {cf:.3e} (<= 1e-6)"
        ),
    ))
}

fn structural_invariants() -> Outcome {
    let basis = enumerate_basis();
    let cfg = IntegratorConfig::default();
    let p = reference();
    let mut runs = vec![("unitary", simulate_full(&p, &params(), &basis, &cfg).map_err(|e| e.to_string())?.diagnostics)];
    for (k, g) in [(0.0, 0.0), (0.0003, 0.001), (0.02, 0.02)] {
        let pr = SystemParams { kappa: k, gamma: g, ..params() };
        let d = simulate_lindblad(&p, &pr, &basis, &cfg).map_err(|e| e.to_string())?.diagnostics;
        runs.push(("lindblad", d));
    }
    let drifts_ok = runs.iter().all(|(_, d)| structural_ok(d));
    let worst = runs.iter().fold(Diagnostics::default(), |a, (_, d)| Diagnostics {
        max_norm_drift: a.max_norm_drift.max(d.max_norm_drift),
        max_trace_drift: a.max_trace_drift.max(d.max_trace_drift),
        max_hermiticity: a.max_hermiticity.max(d.max_hermiticity),
        min_eigenvalue: a.min_eigenvalue.min(d.min_eigenvalue),
    });

    let built: std::collections::BTreeSet<BasisState> = basis.states().iter().copied().collect();
    let oracle_ok = built == closure_oracle();
    let prefix_ok = zeno_block_states().iter().enumerate().all(|(i, s)| basis.state(i) == s);
    let size_ok = basis.len() == 16;
    let ok = drifts_ok && oracle_ok && prefix_ok && size_ok;
    Ok((
        ok,
        format!(
            "norm {:.1e}, trace {:.1e}, hermiticity {:.1e}, min eigenvalue {:.1e}; closure {} states (expected 16), oracle agrees: {oracle_ok}, zeno block at 0-11: {prefix_ok}",
            worst.max_norm_drift,
            worst.max_trace_drift,
            worst.max_hermiticity,
            worst.min_eigenvalue,
            basis.len()
        ),
    ))
}

fn target_sign() -> Outcome {
    let basis = enumerate_basis();
    let r = simulate_full(&reference(), &params(), &basis, &IntegratorConfig::default()).map_err(|e| e.to_string())?;
    let minus = fidelity(&r.final_state, &target_state(&basis)).map_err(|e| e.to_string())?;
    let plus = fidelity(&r.final_state, &plus_sign_target(&basis)).map_err(|e| e.to_string())?;
    Ok((minus >= 0.99 && plus <= 0.2, format!("minus-sign target {minus:.5} (>= 0.99), plus-sign target {plus:.5} (<= 0.2)")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("headline_fidelity", headline_fidelity),
        ("epsilon_optimum", epsilon_optimum),
        ("boundary_conditions", boundary_conditions),
        ("invariance_equation", invariance_equation),
        ("lr_phases", lr_phase_values),
        ("population_endpoint", population_endpoint),
        ("robustness_map", robustness_map),
        ("decoherence_map", decoherence_map),
        ("oracle_equivalences", oracle_equivalences),
        ("structural_invariants", structural_invariants),
        ("target_sign", target_sign),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let (ok, detail) = match std::panic::catch_unwind(check) {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(_) => (false, "panicked".to_string()),
        };
        failed += !ok as usize;
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
