//! Named numerical checks of the grid Weyl calculus, each reported as
//! `{test, value, tolerance, pass}`.

use nalgebra::SymmetricEigen;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::weyl::{
    apply, conv_average, covariance_residual, default_family, gaussian_density, hs_norm_sq, op_quantize, operator_norm, packet, quadrature_mass,
    seminorm_vs_norm_study, wigner, Gaussian2, Grid, GridOperator, StudyRow, StudySymbol, WeylError, Window,
};

/// Grid extent used throughout.
pub const EXTENT: f64 = 16.0;

/// Seed for the random triples, overridable with `FLATORBIT_SEED`.
pub const DEFAULT_SEED: u64 = 0x5e_ed0f_f1a7;

pub fn seed_from_env() -> u64 {
    std::env::var("FLATORBIT_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericCheck {
    pub test: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl NumericCheck {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(test: &str, value: f64, tolerance: f64) -> Self {
        NumericCheck { test: test.into(), value, tolerance, pass: value <= tolerance }
    }
}

pub fn grid(n: usize) -> Result<Grid, WeylError> {
    Grid::new(n, EXTENT)
}

fn real(f: impl Fn(f64, f64) -> f64) -> impl Fn(f64, f64) -> C64 {
    move |x, xi| C64::new(f(x, xi), 0.0)
}

fn max_abs(m: &GridOperator) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |Op(1) − I|` entrywise.
pub fn op_identity(grid: &Grid) -> NumericCheck {
    let op = op_quantize(grid, &|_, _| C64::new(1.0, 0.0));
    NumericCheck::at_most("op_identity", max_abs(&(op - GridOperator::identity(grid.n(), grid.n()))), 1e-10)
}

/// `max |Op(a) − Op(a)*|` for a real non-even symbol.
pub fn self_adjoint(grid: &Grid) -> NumericCheck {
    let a = |x: f64, xi: f64| (-(x - 0.3) * (x - 0.3) / 2.0 - (xi + 0.5) * (xi + 0.5) / 3.0).exp() * (1.0 + x * xi);
    let op = op_quantize(grid, &real(a));
    NumericCheck::at_most("self_adjoint", max_abs(&(&op - op.adjoint())), 1e-10)
}

/// One random Gaussian-envelope triple `(a, φ, ψ)`.
pub struct Triple {
    pub a: Gaussian2,
    /// Plane-wave factor `e^{i(αx + βξ)}` on the symbol.
    pub wave: (f64, f64),
    pub phi: (f64, f64, f64),
    pub psi: (f64, f64, f64),
}

impl Triple {
    pub fn random(rng: &mut impl Rng) -> Self {
        let a = Gaussian2 {
            amp: rng.gen_range(0.5..2.0),
            x0: rng.gen_range(-1.5..1.5),
            xi0: rng.gen_range(-1.5..1.5),
            sx: rng.gen_range(0.6..2.0),
            sxi: rng.gen_range(0.6..2.0),
        };
        let mut wave_packet = || (rng.gen_range(-1.0..1.0), rng.gen_range(0.6..1.5), rng.gen_range(-2.0..2.0));
        let (phi, psi) = (wave_packet(), wave_packet());
        Triple { a, wave: (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), phi, psi }
    }

    pub fn symbol(&self, x: f64, xi: f64) -> C64 {
        C64::from_polar(self.a.eval(x, xi), self.wave.0 * x + self.wave.1 * xi)
    }

    /// `(Op(a)φ|ψ)` and `∬ a W(φ,ψ)`.
    pub fn both_sides(&self, grid: &Grid) -> Result<(C64, C64), WeylError> {
        let phi = packet(grid, self.phi.0, self.phi.1, self.phi.2);
        let psi = packet(grid, self.psi.0, self.psi.1, self.psi.2);
        let op = op_quantize(grid, &|x, xi| self.symbol(x, xi));
        let lhs = grid.inner(&apply(&op, &phi), &psi);
        let rhs = wigner(grid, &phi, &psi)?.pair(&|x, xi| self.symbol(x, xi));
        Ok((lhs, rhs))
    }
}

/// Largest relative pairing error over `count` random triples.
pub fn pairing(grid: &Grid, seed: u64, count: usize) -> Result<NumericCheck, WeylError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let (lhs, rhs) = Triple::random(&mut rng).both_sides(grid)?;
        worst = worst.max((lhs - rhs).norm() / lhs.norm());
    }
    Ok(NumericCheck::at_most("pairing", worst, 1e-6))
}

/// `W(φ,φ)` is real and integrates to `‖φ‖²`.
pub fn wigner_diagonal(grid: &Grid) -> Result<NumericCheck, WeylError> {
    let phi: Vec<C64> = packet(grid, 0.4, 0.9, 1.3).iter().zip(packet(grid, -1.1, 0.7, -0.5)).map(|(a, b)| a + b * 0.6).collect();
    let w = wigner(grid, &phi, &phi)?;
    let imag = w.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let peak = w.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let norm_sq = grid.norm(&phi).powi(2);
    let total_err = (w.total() - norm_sq).norm() / norm_sq;
    Ok(NumericCheck::at_most("wigner_real_and_normalized", (imag / peak).max(total_err), 1e-10))
}

/// Gaussian symbol and unit position shift used by the covariance checks.
pub fn covariance_symbol() -> Gaussian2 {
    Gaussian2 { amp: 1.0, x0: 0.2, xi0: -0.3, sx: 1.0, sxi: 1.2 }
}

pub const SHIFT: (f64, f64, f64) = (1.0, 0.7, 0.3);

pub fn covariance_at(n: usize) -> Result<f64, WeylError> {
    let a = covariance_symbol();
    covariance_residual(&grid(n)?, &real(move |x, xi| a.eval(x, xi)), SHIFT.0, SHIFT.1, SHIFT.2)
}

pub fn covariance(grid: &Grid) -> Result<NumericCheck, WeylError> {
    let a = covariance_symbol();
    let r = covariance_residual(grid, &real(move |x, xi| a.eval(x, xi)), SHIFT.0, SHIFT.1, SHIFT.2)?;
    Ok(NumericCheck::at_most("covariance", r, 1e-6))
}

/// Nominal order of the covariance residual in `h`.
pub const NOMINAL_ORDER: f64 = 2.0;

/// Residuals at `n` and `2n` and the measured order `log2(r_n / r_2n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeMeasurement {
    pub n: usize,
    pub coarse: f64,
    pub fine: f64,
    pub slope: f64,
}

pub fn covariance_slope(n: usize) -> Result<(NumericCheck, SlopeMeasurement), WeylError> {
    let (coarse, fine) = (covariance_at(n)?, covariance_at(2 * n)?);
    let slope = (coarse / fine).log2();
    let check = NumericCheck::at_most("covariance_slope", (slope - NOMINAL_ORDER).abs(), 0.3);
    Ok((check, SlopeMeasurement { n, coarse, fine, slope }))
}

/// Gaussian symbol whose operator is the trace-class surrogate for the
/// convolution checks.
pub fn convolution_symbol() -> Gaussian2 {
    Gaussian2 { amp: 1.3, x0: 0.4, xi0: -0.7, sx: 1.1, sxi: 0.8 }
}

/// `‖Op(b ∗ a) − b{Op(a)}‖ / ‖Op(b ∗ a)‖` for a unit-mass Gaussian `b`.
pub fn conv_intertwining(grid: &Grid) -> Result<NumericCheck, WeylError> {
    let a = convolution_symbol();
    let mut worst: f64 = 0.0;
    for (sq, sp) in [(0.5, 0.5), (0.3, 0.6)] {
        let c = op_quantize(grid, &real(move |x, xi| a.eval(x, xi)));
        let w = Window { q_max: 8.0 * sq, p_max: 8.0 * sp, p_step: grid.h() };
        let bc = conv_average(grid, &gaussian_density(sq, sp), &c, w)?;
        let s = a.smoothed(sq, sp);
        let want = op_quantize(grid, &real(move |x, xi| s.eval(x, xi)));
        worst = worst.max(operator_norm(&(&bc - &want)) / operator_norm(&want));
    }
    Ok(NumericCheck::at_most("conv_intertwining", worst, 1e-4))
}

/// `‖b{C} − C‖ / ‖C‖` for a bump of width `h/2`, normalized to unit mass
/// on the quadrature nodes.
pub fn approximate_identity(grid: &Grid) -> Result<NumericCheck, WeylError> {
    let a = convolution_symbol();
    let c = op_quantize(grid, &real(move |x, xi| a.eval(x, xi)));
    let s = grid.h() / 2.0;
    let w = Window { q_max: 12.0 * s, p_max: 12.0 * s, p_step: s / 4.0 };
    let raw = gaussian_density(s, s);
    let mass = quadrature_mass(grid, &raw, w);
    let bc = conv_average(grid, &|q, p| raw(q, p) / mass, &c, w)?;
    Ok(NumericCheck::at_most("approximate_identity", operator_norm(&(&bc - &c)) / operator_norm(&c), 1e-3))
}

/// `b{C}` is linear in `b` and in `C`.
pub fn conv_linearity(grid: &Grid) -> Result<NumericCheck, WeylError> {
    let (a1, a2) = (convolution_symbol(), covariance_symbol());
    let c1 = op_quantize(grid, &real(move |x, xi| a1.eval(x, xi)));
    let c2 = op_quantize(grid, &real(move |x, xi| a2.eval(x, xi) * x));
    let w = Window { q_max: 4.0, p_max: 4.0, p_step: grid.h() };
    let (b1, b2) = (gaussian_density(0.4, 0.5), gaussian_density(0.5, 0.3));
    let (s, t) = (0.7, -1.9);
    let lhs_c = conv_average(grid, &b1, &(&c1 * C64::new(s, 0.0) + &c2 * C64::new(t, 0.0)), w)?;
    let rhs_c = conv_average(grid, &b1, &c1, w)? * C64::new(s, 0.0) + conv_average(grid, &b1, &c2, w)? * C64::new(t, 0.0);
    let lhs_b = conv_average(grid, &|q, p| s * b1(q, p) + t * b2(q, p), &c1, w)?;
    let rhs_b = conv_average(grid, &b1, &c1, w)? * C64::new(s, 0.0) + conv_average(grid, &b2, &c1, w)? * C64::new(t, 0.0);
    let scale = operator_norm(&rhs_c).max(operator_norm(&rhs_b));
    let err = operator_norm(&(lhs_c - rhs_c)).max(operator_norm(&(lhs_b - rhs_b))) / scale;
    Ok(NumericCheck::at_most("conv_linearity", err, 1e-12))
}

/// `b ≥ 0` and `C ≥ 0` give `b{C} ≥ 0`: reports `−λ_min / ‖b{C}‖`.
pub fn conv_positivity(grid: &Grid) -> Result<NumericCheck, WeylError> {
    let phi = packet(grid, 0.5, 0.8, 1.0);
    let v = nalgebra::DVector::from_vec(phi);
    let c: GridOperator = &v * v.adjoint();
    let w = Window { q_max: 4.0, p_max: 4.0, p_step: grid.h() };
    let bc = conv_average(grid, &gaussian_density(0.4, 0.5), &c, w)?;
    let herm = (&bc + bc.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm).eigenvalues;
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = eig.iter().cloned().fold(0.0, f64::max);
    Ok(NumericCheck::at_most("conv_positivity", (-min / max).max(0.0), 1e-10))
}

/// Five Gaussian symbols for the Hilbert–Schmidt constant.
pub fn hs_symbols() -> [Gaussian2; 5] {
    [
        Gaussian2 { amp: 1.0, x0: 0.0, xi0: 0.0, sx: 1.0, sxi: 1.0 },
        Gaussian2 { amp: 0.7, x0: 0.5, xi0: -1.0, sx: 0.8, sxi: 1.5 },
        Gaussian2 { amp: 2.0, x0: -1.0, xi0: 2.0, sx: 1.4, sxi: 0.6 },
        Gaussian2 { amp: 1.3, x0: 1.2, xi0: 0.3, sx: 0.5, sxi: 2.0 },
        Gaussian2 { amp: 0.4, x0: -0.3, xi0: -2.5, sx: 2.0, sxi: 0.9 },
    ]
}

/// `‖Op(a)‖²_HS / ∬|a|²` per symbol.
pub fn hs_constants(grid: &Grid) -> Vec<f64> {
    hs_symbols()
        .iter()
        .map(|a| {
            let a = *a;
            hs_norm_sq(&op_quantize(grid, &real(move |x, xi| a.eval(x, xi)))) / a.l2_sq()
        })
        .collect()
}

/// Relative spread of the Hilbert–Schmidt constants.
pub fn hs_constant(grid: &Grid) -> NumericCheck {
    let c = hs_constants(grid);
    let spread = c.iter().map(|x| (x - c[0]).abs()).fold(0.0, f64::max) / c[0];
    NumericCheck::at_most("hs_constant", spread, 1e-4)
}

/// Seminorm study with its summary checks.
pub struct StudyReport {
    pub rows: Vec<StudyRow>,
    pub checks: Vec<NumericCheck>,
}

pub fn seminorm_study(grid: &Grid) -> StudyReport {
    let family = default_family();
    let rows = seminorm_vs_norm_study(grid, &family);
    let mut checks = Vec::new();

    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    checks.push(NumericCheck::at_most("ratio_bounded", max_ratio, 1.0 + 1e-9));

    let unit = &rows[0];
    checks.push(NumericCheck::at_most("unit_symbol_norm", (unit.op_norm - 1.0).abs(), 1e-10));

    let sin_norm = family
        .iter()
        .zip(&rows)
        .filter(|(s, _)| matches!(s, StudySymbol::Separable(sep) if matches!(sep.x, crate::weyl::Factor::Sin(_))))
        .map(|(_, r)| r.op_norm)
        .fold(0.0, f64::max);
    checks.push(NumericCheck::at_most("sin_norm_at_most_one", (sin_norm - 1.0).max(0.0), 1e-10));

    // chirps: sup stays 1 while the norm exceeds it and follows p1
    let chirps: Vec<&StudyRow> = family.iter().zip(&rows).filter(|(s, _)| matches!(s, StudySymbol::Chirp(_))).map(|(_, r)| r).collect();
    let sup_dev = chirps.iter().map(|r| (r.sup - 1.0).abs()).fold(0.0, f64::max);
    checks.push(NumericCheck::at_most("chirp_sup_constant", sup_dev, 1e-9));
    let increasing = chirps.windows(2).all(|w| w[1].op_norm > w[0].op_norm && w[1].seminorms[1] > w[0].seminorms[1]);
    let excess = chirps.last().map_or(0.0, |r| r.op_norm / r.sup);
    checks.push(NumericCheck { test: "chirp_norm_exceeds_sup".into(), value: excess, tolerance: 2.0, pass: increasing && excess >= 2.0 });
    let tracking: Vec<f64> = chirps.iter().map(|r| r.op_norm / r.seminorms[1]).collect();
    let (lo, hi) = tracking.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &t| (lo.min(t), hi.max(t)));
    checks.push(NumericCheck::at_most("chirp_norm_tracks_p1", hi / lo, 1.5));
    StudyReport { rows, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_checks() {
        let g = grid(64).unwrap();
        assert!(op_identity(&g).pass);
        assert!(self_adjoint(&g).pass);
        assert!(wigner_diagonal(&g).unwrap().pass);
        assert!(conv_linearity(&g).unwrap().pass);
    }
}
