//! Classical split-step beam propagation: FFT, transfer-phase multiply,
//! inverse FFT. This is the reference the quantum pipeline is checked
//! against.
//!
//! Grid point `i` sits at `x = (i - N/2) dx`. The FFT is taken over the
//! stored array as is; the half-length shift of the origin only multiplies
//! the spectrum by `(-1)^gamma`, which the inverse transform undoes.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::propagator::{check_physical, wavenumber, DispersionPolynomial};
use crate::qft::MAX_QUBITS;
use crate::{error::invalid, Error, Result};

/// Uniform 1D grid of `2^n` points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    n_qubits: usize,
    dx: f64,
}

impl GridSpec {
    pub fn new(n_qubits: usize, dx: f64) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCount {
                n: n_qubits,
                min: 1,
                max: MAX_QUBITS,
            });
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(invalid(format!("grid spacing must be positive, got {dx}")));
        }
        Ok(GridSpec { n_qubits, dx })
    }

    /// Grid with `dx = length / 2^n`.
    pub fn from_domain(n_qubits: usize, length: f64) -> Result<Self> {
        Self::new(n_qubits, length / (1u64 << n_qubits.min(63)) as f64)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_points(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn length(&self) -> f64 {
        self.n_points() as f64 * self.dx
    }

    /// Frequency step `2 pi / (N dx)`.
    pub fn d_alpha(&self) -> f64 {
        std::f64::consts::TAU / self.length()
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - (self.n_points() / 2) as f64) * self.dx
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n_points()).map(|i| self.x(i)).collect()
    }

    /// Transverse wave number of FFT bin `b`.
    pub fn alpha(&self, b: usize) -> f64 {
        crate::propagator::signed_index(b, self.n_qubits) as f64 * self.d_alpha()
    }
}

/// Sampled complex field on one axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Field1d {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl Field1d {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch(grid.n_points(), values.len()));
        }
        Ok(Field1d { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn energy(&self) -> f64 {
        energy(&self.values)
    }

    pub fn intensities(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Scaled to unit energy; an all-zero field is returned unchanged.
    pub fn normalized(mut self) -> Self {
        normalize(&mut self.values);
        self
    }
}

/// Sampled complex field on two axes, row-major with x fastest: the value
/// at `(ix, iy)` lives at `ix + N_x iy`, the same as a register holding x on
/// its low qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Field2d {
    grid_x: GridSpec,
    grid_y: GridSpec,
    values: Vec<Complex64>,
}

impl Field2d {
    pub fn new(grid_x: GridSpec, grid_y: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        let len = grid_x.n_points() * grid_y.n_points();
        if values.len() != len {
            return Err(Error::LengthMismatch(len, values.len()));
        }
        Ok(Field2d {
            grid_x,
            grid_y,
            values,
        })
    }

    pub fn grid_x(&self) -> &GridSpec {
        &self.grid_x
    }

    pub fn grid_y(&self) -> &GridSpec {
        &self.grid_y
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[ix + self.grid_x.n_points() * iy]
    }

    pub fn energy(&self) -> f64 {
        energy(&self.values)
    }

    pub fn intensities(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn normalized(mut self) -> Self {
        normalize(&mut self.values);
        self
    }
}

fn energy(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum()
}

fn normalize(values: &mut [Complex64]) {
    let e = energy(values);
    if e > 0.0 {
        let s = 1.0 / e.sqrt();
        values.iter_mut().for_each(|v| *v *= s);
    }
}

/// Paraxial propagation over `z`; the global phase `e^{ikz}` is dropped.
pub fn propagate_1d(field: &Field1d, wavelength: f64, z: f64) -> Result<Field1d> {
    propagate_1d_with(field, wavelength, z, &DispersionPolynomial::paraxial())
}

/// Propagation with an arbitrary dispersion polynomial.
pub fn propagate_1d_with(
    field: &Field1d,
    wavelength: f64,
    z: f64,
    polynomial: &DispersionPolynomial,
) -> Result<Field1d> {
    check_physical(wavelength, z)?;
    let grid = field.grid;
    let transfer = transfer_factors(&grid, polynomial, wavelength, z);
    let mut values = field.values.clone();
    let mut planner = FftPlanner::new();
    let n = values.len();
    planner.plan_fft_forward(n).process(&mut values);
    for (v, t) in values.iter_mut().zip(&transfer) {
        *v *= t / n as f64;
    }
    planner.plan_fft_inverse(n).process(&mut values);
    Ok(Field1d { grid, values })
}

fn transfer_factors(
    grid: &GridSpec,
    polynomial: &DispersionPolynomial,
    wavelength: f64,
    z: f64,
) -> Vec<Complex64> {
    let k = wavenumber(wavelength);
    (0..grid.n_points())
        .map(|b| Complex64::from_polar(1.0, polynomial.transfer_phase(grid.alpha(b), k, z)))
        .collect()
}

/// Paraxial propagation of a 2D field.
pub fn propagate_2d(field: &Field2d, wavelength: f64, z: f64) -> Result<Field2d> {
    propagate_2d_with(field, wavelength, z, &DispersionPolynomial::paraxial())
}

/// 2D propagation with transfer phase `H(alpha) + H(beta)`. For the
/// paraxial polynomial this is exactly the `alpha^2 + beta^2` phase; for
/// higher orders it is the separable model the quantum circuit builds.
pub fn propagate_2d_with(
    field: &Field2d,
    wavelength: f64,
    z: f64,
    polynomial: &DispersionPolynomial,
) -> Result<Field2d> {
    check_physical(wavelength, z)?;
    let (nx, ny) = (field.grid_x.n_points(), field.grid_y.n_points());
    let tx = transfer_factors(&field.grid_x, polynomial, wavelength, z);
    let ty = transfer_factors(&field.grid_y, polynomial, wavelength, z);

    let mut planner = FftPlanner::new();
    let (fx, ix) = (planner.plan_fft_forward(nx), planner.plan_fft_inverse(nx));
    let (fy, iy) = (planner.plan_fft_forward(ny), planner.plan_fft_inverse(ny));

    let mut values = field.values.clone();
    for row in values.chunks_mut(nx) {
        fx.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); ny];
    let scale = 1.0 / (nx * ny) as f64;
    for x in 0..nx {
        for (y, c) in column.iter_mut().enumerate() {
            *c = values[x + nx * y];
        }
        fy.process(&mut column);
        for (y, c) in column.iter_mut().enumerate() {
            *c *= tx[x] * ty[y] * scale;
        }
        iy.process(&mut column);
        for (y, c) in column.iter().enumerate() {
            values[x + nx * y] = *c;
        }
    }
    for row in values.chunks_mut(nx) {
        ix.process(row);
    }
    Ok(Field2d {
        grid_x: field.grid_x,
        grid_y: field.grid_y,
        values,
    })
}

/// Root-mean-square deviation between two intensity profiles after each is
/// scaled to unit sum: `sqrt(sum (r - m)^2 / sum r)` with `sum r = 1`.
pub fn rmse(i_ref: &[f64], i_num: &[f64]) -> Result<f64> {
    if i_ref.len() != i_num.len() {
        return Err(Error::LengthMismatch(i_ref.len(), i_num.len()));
    }
    let total_ref: f64 = i_ref.iter().sum();
    let total_num: f64 = i_num.iter().sum();
    if !(total_ref > 0.0) {
        return Err(invalid("reference intensity sums to zero"));
    }
    if !(total_num > 0.0) {
        return Err(invalid("compared intensity sums to zero"));
    }
    let sum_sq: f64 = i_ref
        .iter()
        .zip(i_num)
        .map(|(r, m)| (r / total_ref - m / total_num).powi(2))
        .sum();
    Ok(sum_sq.sqrt())
}
