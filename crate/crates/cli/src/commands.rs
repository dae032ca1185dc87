//! One function per subcommand. Each reads a resolved [`RunConfig`] and
//! writes its data files through a [`Sink`].

use std::path::Path;

use num_complex::Complex64;
use qbpm::circuit::{Circuit, GateCounts};
use qbpm::classical::{propagate_1d_with, propagate_2d_with, Field1d, GridSpec};
use qbpm::propagator::{
    build_monomial_propagator, build_qbpm_circuit, build_qbpm_circuit_2d, PhaseAngle,
};
use qbpm::qft::{build_iqft, build_qft, FourierSign};
use qbpm::qstate::StateVector;
use qbpm::scenarios::{
    double_slit_initial, double_slit_reference, error_analysis_with, gaussian_initial_2d,
    locate_fringes, run_seed, waist_from_counts, waist_from_field, Scenario,
};
use qbpm::Execution;
use serde::Serialize;

use crate::config::{RunConfig, ScenarioKind};
use crate::output::{Sink, Table};
use crate::CliError;

/// Orders whose fringe positions are reported.
const FRINGE_ORDERS: [i32; 5] = [-2, -1, 0, 1, 2];

#[derive(Serialize)]
struct Verification {
    max_deviation: f64,
    tolerance: f64,
    passed: bool,
}

fn max_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Records the deviation and fails the run when it is above tolerance.
fn finish_verification(
    config: &RunConfig,
    sink: &mut Sink,
    deviation: f64,
) -> Result<(), CliError> {
    if !config.verify {
        return Ok(());
    }
    let passed = deviation <= config.tolerance;
    sink.json(
        "verification",
        &Verification {
            max_deviation: deviation,
            tolerance: config.tolerance,
            passed,
        },
    )?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "quantum and classical amplitudes differ by {deviation:e} (tolerance {:e})",
            config.tolerance
        )))
    }
}

fn run(circuit: &Circuit, initial: &[Complex64], exec: Execution) -> Result<StateVector, CliError> {
    let mut state = StateVector::from_amplitudes(initial.to_vec())?;
    circuit.run_with(&mut state, exec)?;
    Ok(state)
}

pub fn double_slit(config: &RunConfig, exec: Execution, sink: &mut Sink) -> Result<(), CliError> {
    let p = &config.double_slit;
    let grid = p.grid()?;
    let poly = config.polynomial()?;
    let initial = double_slit_initial(p, &grid)?;
    let xs = grid.coordinates();

    let mut summary = Table::new(&["z", "rmse_sampled", "rmse_exact"]);
    let mut fringes = Table::new(&["z", "order", "predicted_x", "measured_x", "error_cells"]);
    let mut deviation = 0.0f64;
    for (i, &z) in config.z.iter().enumerate() {
        let circuit = build_qbpm_circuit(&grid, p.wavelength, z, &poly)?;
        let state = run(&circuit, initial.values(), exec)?;
        let exact = state.probabilities();
        let sampled = state
            .sample(config.n_shots, run_seed(config.seed, i))?
            .frequencies();
        let reference = double_slit_reference(p, &grid, z)?;

        let mut curve = Table::new(&["x", "p_sampled", "p_exact", "i_analytic"]);
        for j in 0..xs.len() {
            curve.push(vec![xs[j], sampled[j], exact[j], reference[j]]);
        }
        sink.table(&format!("double_slit_z{i:02}"), &curve)?;
        summary.push(vec![
            z,
            qbpm::classical::rmse(&reference, &sampled)?,
            qbpm::classical::rmse(&reference, &exact)?,
        ]);
        if z > 0.0 {
            for m in FRINGE_ORDERS {
                // orders that leave the window at this z are skipped
                if let Ok(found) = locate_fringes(&exact, &grid, p, z, &[m]) {
                    let f = &found[0];
                    fringes.push(vec![
                        z,
                        m as f64,
                        f.predicted_x,
                        f.measured_x,
                        f.error_cells,
                    ]);
                }
            }
        }
        if config.verify {
            let oracle = propagate_1d_with(&initial, p.wavelength, z, &poly)?;
            deviation = deviation.max(max_deviation(state.amplitudes(), oracle.values()));
        }
    }
    sink.table("rmse", &summary)?;
    sink.table("fringes", &fringes)?;
    finish_verification(config, sink, deviation)
}

pub fn gaussian_2d(config: &RunConfig, exec: Execution, sink: &mut Sink) -> Result<(), CliError> {
    let p = &config.gaussian;
    let (gx, gy) = p.grids()?;
    let poly = config.polynomial()?;
    let z0 = p.rayleigh_length();
    let initial = gaussian_initial_2d(p, &gx, &gy)?;
    let w_ref_0 = waist_from_field(&initial, p.x0, p.y0)?;
    let (xs, ys) = (gx.coordinates(), gy.coordinates());

    let mut waists = Table::new(&[
        "z_r",
        "z",
        "w_q",
        "w_ref",
        "epsilon",
        "w_ref_ratio",
        "analytic_ratio",
    ]);
    let mut deviation = 0.0f64;
    for (i, &z_r) in config.z.iter().enumerate() {
        let z = z_r * z0;
        let circuit = build_qbpm_circuit_2d(&gx, &gy, p.wavelength, z, &poly)?;
        let state = run(&circuit, initial.values(), exec)?;
        let exact = state.probabilities();
        let counts = state.sample(config.n_shots, run_seed(config.seed, i))?;
        let sampled = counts.frequencies();
        let classical = propagate_2d_with(&initial, p.wavelength, z, &poly)?;
        let intensity = classical.intensities();

        let mut grid = Table::new(&["x", "y", "p_sampled", "p_exact", "i_classical"]);
        for (iy, y) in ys.iter().enumerate() {
            for (ix, x) in xs.iter().enumerate() {
                let k = ix + xs.len() * iy;
                grid.push(vec![*x, *y, sampled[k], exact[k], intensity[k]]);
            }
        }
        sink.table(&format!("gaussian_zr{i:02}"), &grid)?;

        let w_q = waist_from_counts(&counts, &gx, &gy, p.x0, p.y0)?;
        let w_ref = waist_from_field(&classical, p.x0, p.y0)?;
        waists.push(vec![
            z_r,
            z,
            w_q,
            w_ref,
            w_q - w_ref,
            w_ref / w_ref_0,
            (1.0 + z_r * z_r).sqrt(),
        ]);
        if config.verify {
            deviation = deviation.max(max_deviation(state.amplitudes(), classical.values()));
        }
    }
    sink.table("waist", &waists)?;

    if !config.shots_sweep.is_empty() && !config.z.is_empty() {
        let zs: Vec<f64> = config.z.iter().map(|z_r| z_r * z0).collect();
        let stats = error_analysis_with(
            &Scenario::Gaussian2d(p.clone()),
            &zs,
            &config.shots_sweep,
            config.n_sim,
            config.seed,
            &poly,
            exec,
        )?;
        let mut sweep = Table::new(&["z_r", "z", "n_shots", "n_sim", "mu", "sigma"]);
        for s in stats {
            sweep.push(vec![
                s.z / z0,
                s.z,
                s.n_shots as f64,
                s.n_sim as f64,
                s.mu,
                s.sigma,
            ]);
        }
        sink.table("sigma_sweep", &sweep)?;
    }
    finish_verification(config, sink, deviation)
}

pub fn error_analysis(
    config: &RunConfig,
    exec: Execution,
    sink: &mut Sink,
) -> Result<(), CliError> {
    let poly = config.polynomial()?;
    let (scenario, scale) = match config.scenario {
        ScenarioKind::DoubleSlit => (Scenario::DoubleSlit(config.double_slit.clone()), 1.0),
        ScenarioKind::Gaussian2d => (
            Scenario::Gaussian2d(config.gaussian.clone()),
            config.gaussian.rayleigh_length(),
        ),
        ScenarioKind::Custom => {
            return Err(CliError::Config(
                "error analysis needs the double-slit or gaussian-2d scenario".into(),
            ))
        }
    };
    let zs: Vec<f64> = config.z.iter().map(|z| z * scale).collect();
    let stats = error_analysis_with(
        &scenario,
        &zs,
        &config.shots_sweep,
        config.n_sim,
        config.seed,
        &poly,
        exec,
    )?;
    let mut table = Table::new(&["z", "n_shots", "n_sim", "mu", "sigma"]);
    for s in stats {
        table.push(vec![s.z, s.n_shots as f64, s.n_sim as f64, s.mu, s.sigma]);
    }
    sink.table("error_analysis", &table)
}

/// Reads a two-column `real,imaginary` CSV; a non-numeric first row is
/// taken as a header.
pub fn read_field(path: &Path) -> Result<Vec<Complex64>, CliError> {
    let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.len() != 2 {
            return Err(bad(format!(
                "line {} has {} columns, expected 2",
                line + 1,
                record.len()
            )));
        }
        let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
        match parsed {
            (Ok(re), Ok(im)) => values.push(Complex64::new(re, im)),
            _ if line == 0 => continue,
            _ => return Err(bad(format!("line {} is not numeric", line + 1))),
        }
    }
    if values.len() < 2 || !values.len().is_power_of_two() {
        return Err(bad(format!(
            "field has {} points, expected a power of two >= 2",
            values.len()
        )));
    }
    Ok(values)
}

pub fn propagate(config: &RunConfig, exec: Execution, sink: &mut Sink) -> Result<(), CliError> {
    let path = config
        .input
        .as_deref()
        .ok_or_else(|| CliError::Config("propagate needs an input field (--input)".into()))?;
    let values = read_field(path)?;
    let n = values.len().trailing_zeros() as usize;
    let grid = GridSpec::new(n, config.custom.dx)?;
    let poly = config.polynomial()?;
    let wavelength = config.custom.wavelength;
    let field = Field1d::new(grid, values)?.normalized();
    let xs = grid.coordinates();

    let mut summary = Table::new(&["z", "max_deviation"]);
    let mut deviation = 0.0f64;
    for (i, &z) in config.z.iter().enumerate() {
        let circuit = build_qbpm_circuit(&grid, wavelength, z, &poly)?;
        let state = run(&circuit, field.values(), exec)?;
        let oracle = propagate_1d_with(&field, wavelength, z, &poly)?;
        let mut table = Table::new(&[
            "x",
            "re_quantum",
            "im_quantum",
            "re_classical",
            "im_classical",
            "i_quantum",
            "i_classical",
        ]);
        for (j, (q, c)) in state.amplitudes().iter().zip(oracle.values()).enumerate() {
            table.push(vec![
                xs[j],
                q.re,
                q.im,
                c.re,
                c.im,
                q.norm_sqr(),
                c.norm_sqr(),
            ]);
        }
        sink.table(&format!("propagate_z{i:02}"), &table)?;
        let d = max_deviation(state.amplitudes(), oracle.values());
        summary.push(vec![z, d]);
        deviation = deviation.max(d);
    }
    sink.table("deviation", &summary)?;
    finish_verification(config, sink, deviation)
}

#[derive(Serialize)]
struct StageCount {
    stage: &'static str,
    #[serde(flatten)]
    counts: GateCounts,
    total: usize,
}

#[derive(Serialize)]
struct GateCountReport {
    n_qubits: usize,
    order: u32,
    stages: Vec<StageCount>,
    total: usize,
    qft_closed_form: usize,
    propagator_closed_form: usize,
    closed_forms_match: bool,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn gate_count(config: &RunConfig, sink: &mut Sink) -> Result<String, CliError> {
    let (n, p) = (config.gate_count.n_qubits, config.gate_count.order);
    let stages = [
        ("qft", build_qft(n, FourierSign::Negative)?),
        (
            "propagator",
            build_monomial_propagator(n, p, PhaseAngle(1.0))?,
        ),
        ("iqft", build_iqft(n, FourierSign::Negative)?),
    ];
    let stages: Vec<StageCount> = stages
        .iter()
        .map(|(stage, c)| {
            let counts = c.gate_count();
            StageCount {
                stage,
                total: counts.total(),
                counts,
            }
        })
        .collect();
    let qft_closed_form = n + n * (n - 1) / 2 + n / 2;
    let propagator_closed_form: usize = (1..=(p as usize).min(n)).map(|k| binomial(n, k)).sum();
    let report = GateCountReport {
        n_qubits: n,
        order: p,
        total: stages.iter().map(|s| s.total).sum(),
        closed_forms_match: stages[0].total == qft_closed_form
            && stages[2].total == qft_closed_form
            && stages[1].total == propagator_closed_form,
        stages,
        qft_closed_form,
        propagator_closed_form,
    };
    sink.json("gate_count", &report)?;

    let mut text = format!("n = {n}, p = {p}\n");
    for s in &report.stages {
        text += &format!(
            "{:<10} {:>8}  (h {}, p {}, cp {}, mcp {}, swap {})\n",
            s.stage,
            s.total,
            s.counts.hadamard,
            s.counts.phase,
            s.counts.controlled_phase,
            s.counts.multi_controlled_phase,
            s.counts.swap
        );
    }
    text += &format!("{:<10} {:>8}\n", "total", report.total);
    text += &format!(
        "closed forms: qft {qft_closed_form}, propagator {propagator_closed_form} ({})\n",
        if report.closed_forms_match {
            "match"
        } else {
            "MISMATCH"
        }
    );
    Ok(text)
}

pub fn export_qasm(config: &RunConfig, sink: &mut Sink) -> Result<(), CliError> {
    let poly = config.polynomial()?;
    for (i, &z) in config.z.iter().enumerate() {
        let circuit = match config.scenario {
            ScenarioKind::DoubleSlit => {
                let p = &config.double_slit;
                build_qbpm_circuit(&p.grid()?, p.wavelength, z, &poly)?
            }
            ScenarioKind::Gaussian2d => {
                let p = &config.gaussian;
                let (gx, gy) = p.grids()?;
                build_qbpm_circuit_2d(&gx, &gy, p.wavelength, z * p.rayleigh_length(), &poly)?
            }
            ScenarioKind::Custom => {
                let grid = GridSpec::new(config.gate_count.n_qubits, config.custom.dx)?;
                build_qbpm_circuit(&grid, config.custom.wavelength, z, &poly)?
            }
        };
        sink.text(&format!("qbpm_z{i:02}.qasm"), &circuit.to_qasm()?)?;
    }
    Ok(())
}
