//! The two experiments: a double slit on a 1D register and a Gaussian beam
//! on a 2D register, with their references, observables and the repeated
//! sampling analysis.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::{propagate_2d_with, Field1d, Field2d, GridSpec};
use crate::propagator::{
    build_qbpm_circuit, build_qbpm_circuit_2d, wavenumber, DispersionPolynomial,
};
use crate::qstate::{sample_distribution, SampleCounts, StateVector};
use crate::stats::mean_and_sigma;
use crate::{classical, error::invalid, Error, Execution, Result};

/// Minimum number of grid points each slit and each waist must span.
pub const MIN_POINTS_PER_FEATURE: f64 = 4.0;

/// Slack on window edges, in grid cells, so points that sit on an edge up
/// to rounding are counted as inside.
const EDGE_SLACK: f64 = 1e-9;

/// Two slits of width `w` centred at `+-d/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DoubleSlitParams {
    /// Slit separation in meters.
    pub d: f64,
    /// Slit width in meters.
    pub w: f64,
    pub wavelength: f64,
    pub n_qubits: usize,
    /// Length of the periodic computational domain in meters.
    pub domain_length: f64,
}

impl Default for DoubleSlitParams {
    fn default() -> Self {
        DoubleSlitParams {
            d: 0.5e-3,
            w: 0.1e-3,
            wavelength: 532e-9,
            n_qubits: 15,
            // dx = 3.125 um at 15 qubits: 33 points per slit, and the first
            // orders stay well inside the window up to z ~ 0.13 m
            domain_length: 0.1024,
        }
    }
}

impl DoubleSlitParams {
    pub fn validate(&self) -> Result<()> {
        positive("wavelength", self.wavelength)?;
        positive("slit width", self.w)?;
        positive("domain length", self.domain_length)?;
        if !(self.d > self.w) {
            return Err(invalid("slit separation must exceed slit width"));
        }
        if !(self.d + self.w < self.domain_length) {
            return Err(invalid("slits do not fit inside the domain"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<GridSpec> {
        self.validate()?;
        GridSpec::from_domain(self.n_qubits, self.domain_length)
    }

    /// Transverse position of interference order `m` at distance `z`,
    /// from `sin(theta) = m lambda / d` and `tan(theta) = x / z`.
    pub fn fringe_position(&self, z: f64, m: i32) -> Option<f64> {
        let s = m as f64 * self.wavelength / self.d;
        (s.abs() < 1.0).then(|| z * s.asin().tan())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {v}")))
    }
}

fn inside(x: f64, centre: f64, half_width: f64, dx: f64) -> bool {
    (x - centre).abs() <= half_width + EDGE_SLACK * dx
}

/// Unit-norm aperture: 1 on both closed slit windows, 0 elsewhere.
pub fn double_slit_initial(params: &DoubleSlitParams, grid: &GridSpec) -> Result<Field1d> {
    params.validate()?;
    if grid.n_qubits() != params.n_qubits {
        return Err(invalid(format!(
            "grid has {} qubits, parameters ask for {}",
            grid.n_qubits(),
            params.n_qubits
        )));
    }
    let dx = grid.dx();
    if params.w / dx + 1.0 < MIN_POINTS_PER_FEATURE {
        return Err(invalid(format!(
            "slit width {} m spans fewer than {MIN_POINTS_PER_FEATURE} points at dx = {dx} m",
            params.w
        )));
    }
    let values = grid
        .coordinates()
        .into_iter()
        .map(|x| {
            let open = inside(x, params.d / 2.0, params.w / 2.0, dx)
                || inside(x, -params.d / 2.0, params.w / 2.0, dx);
            Complex64::new(if open { 1.0 } else { 0.0 }, 0.0)
        })
        .collect();
    Ok(Field1d::new(*grid, values)?.normalized())
}

fn sinc(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        u.sin() / u
    }
}

/// Far-field two-slit intensity at the grid points, scaled to unit sum:
/// `cos^2(pi d sin(theta) / lambda) sinc^2(pi w sin(theta) / lambda)`.
pub fn double_slit_analytic(
    params: &DoubleSlitParams,
    grid: &GridSpec,
    z: f64,
) -> Result<Vec<f64>> {
    params.validate()?;
    if !(z.is_finite() && z > 0.0) {
        return Err(invalid(format!(
            "far-field pattern needs z > 0, got {z}; use the initial intensity at z = 0"
        )));
    }
    let lambda = params.wavelength;
    let mut intensity: Vec<f64> = grid
        .coordinates()
        .into_iter()
        .map(|x| {
            let s = x.atan2(z).sin();
            (PI * params.d * s / lambda).cos().powi(2) * sinc(PI * params.w * s / lambda).powi(2)
        })
        .collect();
    let total: f64 = intensity.iter().sum();
    intensity.iter_mut().for_each(|v| *v /= total);
    Ok(intensity)
}

/// Reference used for the error analysis: the far-field pattern for `z > 0`
/// and the aperture intensity at `z = 0`.
pub fn double_slit_reference(
    params: &DoubleSlitParams,
    grid: &GridSpec,
    z: f64,
) -> Result<Vec<f64>> {
    if z == 0.0 {
        Ok(double_slit_initial(params, grid)?.intensities())
    } else {
        double_slit_analytic(params, grid, z)
    }
}

/// Interference maximum found near its predicted position.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FringeMatch {
    pub order: i32,
    pub predicted_x: f64,
    pub measured_x: f64,
    /// `|measured - predicted| / dx`.
    pub error_cells: f64,
}

/// Locates each requested interference maximum as the largest value of
/// `intensity` within a third of a fringe period of the predicted position.
pub fn locate_fringes(
    intensity: &[f64],
    grid: &GridSpec,
    params: &DoubleSlitParams,
    z: f64,
    orders: &[i32],
) -> Result<Vec<FringeMatch>> {
    if intensity.len() != grid.n_points() {
        return Err(Error::LengthMismatch(grid.n_points(), intensity.len()));
    }
    if !(z > 0.0) {
        return Err(invalid("fringes are only defined for z > 0"));
    }
    let dx = grid.dx();
    let half = (grid.n_points() / 2) as f64;
    let period = params.wavelength * z / params.d;
    let reach = ((period / dx / 3.0) as i64).max(2);
    orders
        .iter()
        .map(|&m| {
            let predicted_x = params
                .fringe_position(z, m)
                .ok_or_else(|| invalid(format!("order {m} does not propagate")))?;
            let centre = (predicted_x / dx).round() as i64 + half as i64;
            let lo = centre - reach;
            let hi = centre + reach;
            if lo < 0 || hi >= grid.n_points() as i64 {
                return Err(invalid(format!(
                    "order {m} falls outside the domain at z = {z}"
                )));
            }
            let best = (lo..=hi)
                .map(|i| i as usize)
                .max_by(|&a, &b| intensity[a].total_cmp(&intensity[b]))
                .expect("window is non-empty");
            let measured_x = grid.x(best);
            Ok(FringeMatch {
                order: m,
                predicted_x,
                measured_x,
                error_cells: (measured_x - predicted_x).abs() / dx,
            })
        })
        .collect()
}

/// Gaussian beam `exp(-((x - x0)^2 + (y - y0)^2) / w0^2)` on a square
/// register pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaussianParams {
    pub w0: f64,
    pub x0: f64,
    pub y0: f64,
    pub wavelength: f64,
    pub n_qubits_per_axis: usize,
    pub domain_length_x: f64,
    pub domain_length_y: f64,
}

impl Default for GaussianParams {
    fn default() -> Self {
        GaussianParams {
            w0: 0.05,
            x0: 0.0,
            y0: 0.0,
            wavelength: 532e-9,
            n_qubits_per_axis: 5,
            // the coarsest grid that still resolves w0 with four points
            domain_length_x: 0.4,
            domain_length_y: 0.4,
        }
    }
}

impl GaussianParams {
    pub fn validate(&self) -> Result<()> {
        positive("waist", self.w0)?;
        positive("wavelength", self.wavelength)?;
        positive("domain length", self.domain_length_x)?;
        positive("domain length", self.domain_length_y)?;
        if !(self.x0.is_finite() && self.y0.is_finite()) {
            return Err(invalid("beam centre must be finite"));
        }
        Ok(())
    }

    /// `z0 = k w0^2 / 2`.
    pub fn rayleigh_length(&self) -> f64 {
        wavenumber(self.wavelength) * self.w0 * self.w0 / 2.0
    }

    pub fn grids(&self) -> Result<(GridSpec, GridSpec)> {
        self.validate()?;
        Ok((
            GridSpec::from_domain(self.n_qubits_per_axis, self.domain_length_x)?,
            GridSpec::from_domain(self.n_qubits_per_axis, self.domain_length_y)?,
        ))
    }
}

/// Unit-norm sampled Gaussian.
pub fn gaussian_initial_2d(
    params: &GaussianParams,
    grid_x: &GridSpec,
    grid_y: &GridSpec,
) -> Result<Field2d> {
    params.validate()?;
    let coarsest = grid_x.dx().max(grid_y.dx());
    if params.w0 < MIN_POINTS_PER_FEATURE * coarsest * (1.0 - EDGE_SLACK) {
        return Err(invalid(format!(
            "waist {} m is under-resolved at dx = {coarsest} m (needs {MIN_POINTS_PER_FEATURE} points)",
            params.w0
        )));
    }
    let w2 = params.w0 * params.w0;
    let xs = grid_x.coordinates();
    let mut values = Vec::with_capacity(grid_x.n_points() * grid_y.n_points());
    for y in grid_y.coordinates() {
        for &x in &xs {
            let r2 = (x - params.x0).powi(2) + (y - params.y0).powi(2);
            values.push(Complex64::new((-r2 / w2).exp(), 0.0));
        }
    }
    Ok(Field2d::new(*grid_x, *grid_y, values)?.normalized())
}

/// Second-moment radius `sqrt(sum r^2 P / sum P)` about `(x0, y0)`.
pub fn second_moment_radius(
    weights: &[f64],
    grid_x: &GridSpec,
    grid_y: &GridSpec,
    x0: f64,
    y0: f64,
) -> Result<f64> {
    let nx = grid_x.n_points();
    if weights.len() != nx * grid_y.n_points() {
        return Err(Error::LengthMismatch(nx * grid_y.n_points(), weights.len()));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(invalid("weights sum to zero"));
    }
    let dx2: Vec<f64> = grid_x
        .coordinates()
        .iter()
        .map(|x| (x - x0).powi(2))
        .collect();
    let dy2: Vec<f64> = grid_y
        .coordinates()
        .iter()
        .map(|y| (y - y0).powi(2))
        .collect();
    let moment: f64 = weights
        .iter()
        .enumerate()
        .map(|(i, p)| (dx2[i % nx] + dy2[i / nx]) * p)
        .sum();
    Ok((moment / total).sqrt())
}

/// Waist estimated from measurement counts.
pub fn waist_from_counts(
    counts: &SampleCounts,
    grid_x: &GridSpec,
    grid_y: &GridSpec,
    x0: f64,
    y0: f64,
) -> Result<f64> {
    if counts.total_shots() == 0 {
        return Err(Error::ZeroShots);
    }
    second_moment_radius(&counts.frequencies(), grid_x, grid_y, x0, y0)
}

/// Waist of the field intensity itself.
pub fn waist_from_field(field: &Field2d, x0: f64, y0: f64) -> Result<f64> {
    second_moment_radius(&field.intensities(), field.grid_x(), field.grid_y(), x0, y0)
}

/// Sampled and reference waist of one run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WaistEstimate {
    pub w_q: f64,
    pub w_ref: f64,
}

impl WaistEstimate {
    pub fn epsilon(&self) -> f64 {
        self.w_q - self.w_ref
    }
}

/// Mean and spread of the per-run error at one `(z, N_s)` point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorStats {
    pub z: f64,
    pub n_shots: u64,
    pub n_sim: usize,
    pub mu: f64,
    pub sigma: f64,
}

/// One of the two experiments with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Scenario {
    DoubleSlit(DoubleSlitParams),
    Gaussian2d(GaussianParams),
}

impl Scenario {
    fn wavelength(&self) -> f64 {
        match self {
            Scenario::DoubleSlit(p) => p.wavelength,
            Scenario::Gaussian2d(p) => p.wavelength,
        }
    }
}

/// Exact output distribution of the quantum circuit at distance `z`.
pub fn qbpm_probabilities(
    scenario: &Scenario,
    z: f64,
    polynomial: &DispersionPolynomial,
    exec: Execution,
) -> Result<Vec<f64>> {
    Ok(qbpm_state(scenario, z, polynomial, exec)?.probabilities())
}

/// Final register state of the quantum circuit at distance `z`.
pub fn qbpm_state(
    scenario: &Scenario,
    z: f64,
    polynomial: &DispersionPolynomial,
    exec: Execution,
) -> Result<StateVector> {
    let (circuit, initial) = match scenario {
        Scenario::DoubleSlit(p) => {
            let grid = p.grid()?;
            (
                build_qbpm_circuit(&grid, p.wavelength, z, polynomial)?,
                double_slit_initial(p, &grid)?.into_values(),
            )
        }
        Scenario::Gaussian2d(p) => {
            let (gx, gy) = p.grids()?;
            (
                build_qbpm_circuit_2d(&gx, &gy, p.wavelength, z, polynomial)?,
                gaussian_initial_2d(p, &gx, &gy)?.into_values(),
            )
        }
    };
    let mut state = StateVector::from_amplitudes(initial)?;
    circuit.run_with(&mut state, exec)?;
    Ok(state)
}

/// Error of one sampled run.
type RunError = Box<dyn Fn(&SampleCounts) -> Result<f64> + Sync>;

/// Seed of repetition `run` for base seed `seed`.
pub fn run_seed(seed: u64, run: usize) -> u64 {
    seed.wrapping_add(run as u64)
}

/// For each `z`, runs the circuit once, then for each shot count draws
/// `n_sim` independent sample sets and reports the mean and spread of the
/// per-run error: the intensity RMSE against the far-field pattern for the
/// double slit, and `w_Q - w_ref` against the classical field for the
/// Gaussian. Repetition `r` uses seed `seed + r`.
pub fn error_analysis(
    scenario: &Scenario,
    zs: &[f64],
    shots: &[u64],
    n_sim: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<ErrorStats>> {
    error_analysis_with(
        scenario,
        zs,
        shots,
        n_sim,
        seed,
        &DispersionPolynomial::paraxial(),
        exec,
    )
}

/// [`error_analysis`] with a chosen dispersion polynomial for the circuit
/// and, for the Gaussian, for the classical reference field.
pub fn error_analysis_with(
    scenario: &Scenario,
    zs: &[f64],
    shots: &[u64],
    n_sim: usize,
    seed: u64,
    polynomial: &DispersionPolynomial,
    exec: Execution,
) -> Result<Vec<ErrorStats>> {
    if n_sim < 2 {
        return Err(invalid(format!("need at least 2 repetitions, got {n_sim}")));
    }
    if shots.contains(&0) {
        return Err(Error::ZeroShots);
    }
    let mut table = Vec::with_capacity(zs.len() * shots.len());
    for &z in zs {
        let probs = qbpm_probabilities(scenario, z, polynomial, exec)?;
        let run_error: RunError = match scenario {
            Scenario::DoubleSlit(p) => {
                let reference = double_slit_reference(p, &p.grid()?, z)?;
                Box::new(move |counts| classical::rmse(&reference, &counts.frequencies()))
            }
            Scenario::Gaussian2d(p) => {
                let (gx, gy) = p.grids()?;
                let initial = gaussian_initial_2d(p, &gx, &gy)?;
                let field = propagate_2d_with(&initial, scenario.wavelength(), z, polynomial)?;
                let w_ref = waist_from_field(&field, p.x0, p.y0)?;
                let (x0, y0) = (p.x0, p.y0);
                Box::new(move |counts| Ok(waist_from_counts(counts, &gx, &gy, x0, y0)? - w_ref))
            }
        };
        for &n_shots in shots {
            let errors = exec
                .map_indexed(n_sim, |r| {
                    let counts = sample_distribution(&probs, n_shots, run_seed(seed, r))?;
                    run_error(&counts)
                })
                .into_iter()
                .collect::<Result<Vec<f64>>>()?;
            let (mu, sigma) = mean_and_sigma(&errors);
            table.push(ErrorStats {
                z,
                n_shots,
                n_sim,
                mu,
                sigma,
            });
        }
    }
    Ok(table)
}
