//! Grid Weyl calculus for the Schrödinger representation of the
//! three-dimensional Heisenberg group.
//!
//! Conventions, fixed once here:
//! - position grid `x_j = (j − N/2)h`, `j = 0..N`, with inner product
//!   `(f|g) = h Σ f_j conj(g_j)`; operators are `N × N` matrices acting on
//!   sample vectors, so the identity operator is the identity matrix;
//! - `Op(a)` has kernel `K(x,y) = (2π)⁻¹ ∫ a((x+y)/2, ξ) e^{i(x−y)ξ} dξ`;
//!   the `ξ` integral runs over `2N` nodes `ξ_l = (l − N)π/(Nh)`, which makes
//!   `Op(1) = I` exact and reduces each midpoint to one inverse FFT;
//! - `W(φ,ψ)(x,ξ) = (2π)⁻¹ ∫ e^{iuξ} conj ψ(x+u/2) φ(x−u/2) du`, so that
//!   `(Op(a)φ|ψ) = ∬ a W(φ,ψ) dx dξ`; it is sampled on the half-step grid
//!   after spectral upsampling of `φ` and `ψ`;
//! - `π(q,p,t)f(x) = e^{it} e^{ip(x − q/2)} f(x − q)`, with `X = tZ + pY + qX`
//!   in the basis where `[Y,X] = Z`. Then `π(−X)Op(a)π(X) = Op(a(·+q, ·+p))`
//!   and `‖Op(a)‖²_HS = (2π)⁻¹ ∬|a|²`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

pub type GridOperator = DMatrix<C64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WeylError {
    #[error("grid size {0} is not a power of two ≥ 4")]
    BadGrid(usize),
    #[error("vector of length {got} on a grid of {expected} points")]
    GridMismatch { expected: usize, got: usize },
    #[error("position shift {0} is not a multiple of the grid step")]
    OffGridShift(f64),
    #[error("b is {edge:e} of its peak on the edge of the quadrature window ±({q_max}, {p_max})")]
    QuadratureWindowTooSmall { q_max: f64, p_max: f64, edge: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    n: usize,
    h: f64,
}

impl Grid {
    /// `n` points covering `[−extent/2, extent/2)`.
    pub fn new(n: usize, extent: f64) -> Result<Self, WeylError> {
        if n < 4 || !n.is_power_of_two() {
            return Err(WeylError::BadGrid(n));
        }
        Ok(Grid { n, h: extent / n as f64 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn extent(&self) -> f64 {
        self.h * self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.h
    }

    /// Half-step point `(s − N)h/2`; `s = j + k` is the midpoint of `x_j, x_k`.
    pub fn half_x(&self, s: usize) -> f64 {
        (s as f64 - self.n as f64) * self.h / 2.0
    }

    pub fn dxi(&self) -> f64 {
        PI / (self.n as f64 * self.h)
    }

    /// Frequency node `l = 0..2N`.
    pub fn xi(&self, l: usize) -> f64 {
        (l as f64 - self.n as f64) * self.dxi()
    }

    pub fn sample(&self, f: impl Fn(f64) -> C64) -> Vec<C64> {
        (0..self.n).map(|j| f(self.x(j))).collect()
    }

    fn check(&self, v: &[C64]) -> Result<(), WeylError> {
        if v.len() != self.n {
            return Err(WeylError::GridMismatch { expected: self.n, got: v.len() });
        }
        Ok(())
    }

    pub fn inner(&self, f: &[C64], g: &[C64]) -> C64 {
        f.iter().zip(g).map(|(a, b)| a * b.conj()).sum::<C64>() * self.h
    }

    pub fn norm(&self, f: &[C64]) -> f64 {
        self.inner(f, f).re.sqrt()
    }
}

/// Weyl quantization of a symbol given as a function of `(x, ξ)`.
pub fn op_quantize(grid: &Grid, a: &dyn Fn(f64, f64) -> C64) -> GridOperator {
    let n = grid.n;
    let m = 2 * n;
    let ifft = FftPlanner::new().plan_fft_inverse(m);
    let mut op = GridOperator::zeros(n, n);
    let mut buf = vec![C64::new(0.0, 0.0); m];
    for s in 0..m - 1 {
        let x = grid.half_x(s);
        for (l, b) in buf.iter_mut().enumerate() {
            *b = a(x, grid.xi(l));
        }
        // buf[r] = Σ_l a(x, ξ_l) e^{2πi r l / 2N}; the offset ξ_0 = −π/h adds (−1)^r
        ifft.process(&mut buf);
        for j in s.saturating_sub(n - 1)..=s.min(n - 1) {
            let k = s - j;
            let r = j as i64 - k as i64;
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            op[(j, k)] = buf[r.rem_euclid(m as i64) as usize] * (sign / m as f64);
        }
    }
    op
}

pub fn apply(op: &GridOperator, f: &[C64]) -> Vec<C64> {
    (op * nalgebra::DVector::from_column_slice(f)).iter().copied().collect()
}

/// Trigonometric interpolation onto the half-step grid: the result has `2N`
/// samples at `(n − N)h/2`, and its even entries reproduce `f`.
pub fn upsample(f: &[C64]) -> Vec<C64> {
    let n = f.len();
    let mut planner = FftPlanner::new();
    let mut spec = f.to_vec();
    planner.plan_fft_forward(n).process(&mut spec);
    let mut wide = vec![C64::new(0.0, 0.0); 2 * n];
    let half = n / 2;
    wide[..half].copy_from_slice(&spec[..half]);
    wide[2 * n - half + 1..].copy_from_slice(&spec[half + 1..]);
    // split the Nyquist bin so real input stays real
    wide[half] = spec[half] * 0.5;
    wide[2 * n - half] = spec[half] * 0.5;
    planner.plan_fft_inverse(2 * n).process(&mut wide);
    // entry n sits at x_0 + nh/2, which is half_x(n)
    wide.iter().map(|v| v / n as f64).collect()
}

/// Cross-Wigner function `W(φ,ψ)` on the `2N × 2N` grid of half-step
/// positions (rows) and frequency nodes (columns).
#[derive(Clone, Debug)]
pub struct Wigner {
    pub values: DMatrix<C64>,
    grid: Grid,
}

impl Wigner {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `∬ a W dx dξ` by the rectangle rule on the half-step grid.
    pub fn pair(&self, a: &dyn Fn(f64, f64) -> C64) -> C64 {
        let g = &self.grid;
        let mut acc = C64::new(0.0, 0.0);
        for n in 0..2 * g.n {
            let x = g.half_x(n);
            for l in 0..2 * g.n {
                acc += a(x, g.xi(l)) * self.values[(n, l)];
            }
        }
        acc * (g.h / 2.0 * g.dxi())
    }

    /// `∬ W dx dξ`.
    pub fn total(&self) -> C64 {
        self.values.sum() * (self.grid.h / 2.0 * self.grid.dxi())
    }
}

pub fn wigner(grid: &Grid, phi: &[C64], psi: &[C64]) -> Result<Wigner, WeylError> {
    grid.check(phi)?;
    grid.check(psi)?;
    let m = 2 * grid.n;
    let (fu, gu) = (upsample(phi), upsample(psi));
    let ifft = FftPlanner::new().plan_fft_inverse(m);
    let mut values = DMatrix::zeros(m, m);
    let mut buf = vec![C64::new(0.0, 0.0); m];
    // W(x_n, ξ_l) = π⁻¹ Σ_k (h/2) e^{2ikhξ_l/2} conj ψ(x_{n+k}) φ(x_{n−k})
    let scale = grid.h / 2.0 / PI;
    for n in 0..m {
        buf.fill(C64::new(0.0, 0.0));
        let reach = n.min(m - 1 - n) as i64;
        for k in -reach..=reach {
            let (i, j) = ((n as i64 + k) as usize, (n as i64 - k) as usize);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            buf[k.rem_euclid(m as i64) as usize] = gu[i].conj() * fu[j] * sign;
        }
        ifft.process(&mut buf);
        for l in 0..m {
            values[(n, l)] = buf[l] * scale;
        }
    }
    Ok(Wigner { values, grid: *grid })
}

/// Matrix of `π(q, p, t)`; `q` must be a multiple of the grid step.
/// Samples shifted in from outside the window are zero.
pub fn schrodinger(grid: &Grid, q: f64, p: f64, t: f64) -> Result<GridOperator, WeylError> {
    let s = shift_steps(grid, q)?;
    let n = grid.n as i64;
    let mut m = GridOperator::zeros(grid.n, grid.n);
    for j in 0..n {
        let i = j - s;
        if (0..n).contains(&i) {
            let phase = t + p * (grid.x(j as usize) - q / 2.0);
            m[(j as usize, i as usize)] = C64::from_polar(1.0, phase);
        }
    }
    Ok(m)
}

fn shift_steps(grid: &Grid, q: f64) -> Result<i64, WeylError> {
    let s = q / grid.h;
    if (s - s.round()).abs() > 1e-9 {
        return Err(WeylError::OffGridShift(q));
    }
    Ok(s.round() as i64)
}

pub fn operator_norm(op: &GridOperator) -> f64 {
    op.singular_values().max()
}

pub fn hs_norm_sq(op: &GridOperator) -> f64 {
    op.iter().map(|z| z.norm_sqr()).sum()
}

/// `‖Op(α(X)a) − π(−X)Op(a)π(X)‖ / ‖Op(a)‖` with `α(X)a = a(· + q, · + p)`.
pub fn covariance_residual(grid: &Grid, a: &dyn Fn(f64, f64) -> C64, q: f64, p: f64, t: f64) -> Result<f64, WeylError> {
    let op = op_quantize(grid, a);
    let moved = op_quantize(grid, &|x, xi| a(x + q, xi + p));
    let pi = schrodinger(grid, q, p, t)?;
    let pi_inv = schrodinger(grid, -q, -p, -t)?;
    let conj = &pi_inv * &op * &pi;
    Ok(operator_norm(&(moved - conj)) / operator_norm(&op))
}

/// Quadrature window for [`conv_average`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub q_max: f64,
    pub p_max: f64,
    pub p_step: f64,
}

/// `b{C} = ∫ b(q,p) π(X)⁻¹ C π(X) dq dp` over `X = (q, p)`, by the rectangle
/// rule with `q` on multiples of the grid step. `b` must be negligible
/// (below `1e−12` of its peak) on the edge of the window.
pub fn conv_average(grid: &Grid, b: &dyn Fn(f64, f64) -> f64, c: &GridOperator, w: Window) -> Result<GridOperator, WeylError> {
    let n = grid.n as i64;
    let sq = (w.q_max / grid.h).floor() as i64;
    let sp = (w.p_max / w.p_step).floor() as i64;
    let qs: Vec<f64> = (-sq..=sq).map(|s| s as f64 * grid.h).collect();
    let ps: Vec<f64> = (-sp..=sp).map(|i| i as f64 * w.p_step).collect();
    let peak = qs.iter().flat_map(|&q| ps.iter().map(move |&p| b(q, p).abs())).fold(0.0, f64::max);
    let edge = qs
        .iter()
        .flat_map(|&q| [b(q, ps[0]), b(q, ps[ps.len() - 1])])
        .chain(ps.iter().flat_map(|&p| [b(qs[0], p), b(qs[qs.len() - 1], p)]))
        .map(f64::abs)
        .fold(0.0, f64::max);
    if peak == 0.0 || edge > 1e-12 * peak {
        return Err(WeylError::QuadratureWindowTooSmall { q_max: w.q_max, p_max: w.p_max, edge: edge / peak.max(f64::MIN_POSITIVE) });
    }
    let mut out = GridOperator::zeros(grid.n, grid.n);
    let mut g = vec![C64::new(0.0, 0.0); 2 * grid.n];
    for (si, &q) in qs.iter().enumerate() {
        let s = si as i64 - sq;
        // G(r) = Σ_p b(q,p) e^{−iprh} dq dp
        g.fill(C64::new(0.0, 0.0));
        for &p in &ps {
            let wt = b(q, p) * grid.h * w.p_step;
            if wt == 0.0 {
                continue;
            }
            for r in -(n - 1)..n {
                g[(r + n) as usize] += C64::from_polar(wt, -p * r as f64 * grid.h);
            }
        }
        // (π(X)⁻¹Cπ(X))_{jk} = e^{−ip(j−k)h} C_{j+s,k+s}
        for j in 0..n {
            let js = j + s;
            if !(0..n).contains(&js) {
                continue;
            }
            for k in 0..n {
                let ks = k + s;
                if (0..n).contains(&ks) {
                    out[(j as usize, k as usize)] += g[(j - k + n) as usize] * c[(js as usize, ks as usize)];
                }
            }
        }
    }
    Ok(out)
}

/// One-dimensional factor of a separable symbol, with sups of its first
/// derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factor {
    One,
    /// `e^{−t²/2σ²}`
    Gauss(f64),
    /// `sin(λt)`
    Sin(f64),
    /// `cos(λt)`
    Cos(f64),
}

impl Factor {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Factor::One => 1.0,
            Factor::Gauss(s) => (-t * t / (2.0 * s * s)).exp(),
            Factor::Sin(l) => (l * t).sin(),
            Factor::Cos(l) => (l * t).cos(),
        }
    }

    /// `sup |f^{(k)}|` for `k ≤ 3`.
    pub fn derivative_sup(&self, k: u32) -> f64 {
        match *self {
            Factor::One => {
                if k == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            Factor::Sin(l) | Factor::Cos(l) => l.abs().powi(k as i32),
            Factor::Gauss(s) => {
                // f^{(k)}(t) = (−1)^k σ^{−k} He_k(t/σ) e^{−t²/2σ²}; sup over u = t/σ
                let he = |u: f64| match k {
                    0 => 1.0,
                    1 => u,
                    2 => u * u - 1.0,
                    _ => u * u * u - 3.0 * u,
                };
                let sup = (0..=20_000).map(|i| i as f64 * 1e-3).map(|u| (he(u) * (-u * u / 2.0).exp()).abs()).fold(0.0, f64::max);
                sup / s.powi(k as i32)
            }
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Factor::One => "1".into(),
            Factor::Gauss(s) => format!("gauss({s})"),
            Factor::Sin(l) => format!("sin({l}·)"),
            Factor::Cos(l) => format!("cos({l}·)"),
        }
    }
}

/// `a(x, ξ) = f(x) g(ξ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Separable {
    pub x: Factor,
    pub xi: Factor,
}

impl Separable {
    pub fn eval(&self, x: f64, xi: f64) -> C64 {
        C64::new(self.x.eval(x) * self.xi.eval(xi), 0.0)
    }

    /// `max_{|α| ≤ k} sup |∂^α a|`.
    pub fn seminorm(&self, k: u32) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..=k {
            for j in 0..=k - i {
                best = best.max(self.x.derivative_sup(i) * self.xi.derivative_sup(j));
            }
        }
        best
    }

    pub fn name(&self) -> String {
        format!("{}⊗{}", self.x.name(), self.xi.name())
    }
}

/// `a(x, ξ) = e^{iκxξ − (x² + ξ²)/2R²}`: sup 1 for every `R`, while the
/// first derivatives and the operator norm grow with `R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowedChirp {
    pub kappa: f64,
    pub r: f64,
}

/// Polynomial in `(x, ξ)` with complex coefficients, keyed by exponents.
type Poly2 = Vec<((u32, u32), C64)>;

impl WindowedChirp {
    pub fn eval(&self, x: f64, xi: f64) -> C64 {
        C64::from_polar((-(x * x + xi * xi) / (2.0 * self.r * self.r)).exp(), self.kappa * x * xi)
    }

    /// `∂_x^i ∂_ξ^j a = P e^Q`; returns `P`.
    fn derivative_poly(&self, i: u32, j: u32) -> Poly2 {
        let c = -1.0 / (2.0 * self.r * self.r);
        let ik = C64::new(0.0, self.kappa);
        // ∂_x Q = 2c·x + iκ·ξ, ∂_ξ Q = iκ·x + 2c·ξ
        let dx_q: Poly2 = vec![((1, 0), C64::new(2.0 * c, 0.0)), ((0, 1), ik)];
        let dxi_q: Poly2 = vec![((1, 0), ik), ((0, 1), C64::new(2.0 * c, 0.0))];
        let step = |p: &Poly2, in_x: bool| -> Poly2 {
            let mut out: Poly2 = Vec::new();
            let mut add = |e: (u32, u32), v: C64| match out.iter_mut().find(|t| t.0 == e) {
                Some(t) => t.1 += v,
                None => out.push((e, v)),
            };
            for &((a, b), v) in p {
                if in_x && a > 0 {
                    add((a - 1, b), v * a as f64);
                }
                if !in_x && b > 0 {
                    add((a, b - 1), v * b as f64);
                }
                for &((qa, qb), w) in if in_x { &dx_q } else { &dxi_q } {
                    add((a + qa, b + qb), v * w);
                }
            }
            out
        };
        let mut p: Poly2 = vec![((0, 0), C64::new(1.0, 0.0))];
        for _ in 0..i {
            p = step(&p, true);
        }
        for _ in 0..j {
            p = step(&p, false);
        }
        p
    }

    /// `max_{|α| ≤ k} sup |∂^α a|`, from the exact derivative polynomials
    /// sampled against the Gaussian envelope.
    pub fn seminorm(&self, k: u32) -> f64 {
        let (half, m) = (8.0 * self.r, 400);
        let mut best: f64 = 0.0;
        for i in 0..=k {
            for j in 0..=k - i {
                let p = self.derivative_poly(i, j);
                for a in 0..=2 * m {
                    let x = -half + half * a as f64 / m as f64;
                    for b in 0..=2 * m {
                        let xi = -half + half * b as f64 / m as f64;
                        let v: C64 = p.iter().map(|&((ex, exi), c)| c * x.powi(ex as i32) * xi.powi(exi as i32)).sum();
                        best = best.max(v.norm() * (-(x * x + xi * xi) / (2.0 * self.r * self.r)).exp());
                    }
                }
            }
        }
        best
    }

    pub fn name(&self) -> String {
        format!("chirp(κ={}, R={})", self.kappa, self.r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StudySymbol {
    Separable(Separable),
    Chirp(WindowedChirp),
}

impl StudySymbol {
    pub fn eval(&self, x: f64, xi: f64) -> C64 {
        match self {
            StudySymbol::Separable(s) => s.eval(x, xi),
            StudySymbol::Chirp(c) => c.eval(x, xi),
        }
    }

    pub fn seminorm(&self, k: u32) -> f64 {
        match self {
            StudySymbol::Separable(s) => s.seminorm(k),
            StudySymbol::Chirp(c) => c.seminorm(k),
        }
    }

    pub fn name(&self) -> String {
        match self {
            StudySymbol::Separable(s) => s.name(),
            StudySymbol::Chirp(c) => c.name(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct StudyRow {
    pub symbol: String,
    pub op_norm: f64,
    pub hs_norm: f64,
    pub sup: f64,
    pub seminorms: [f64; 4],
    /// `‖Op(a)‖ / max_{|α|≤3} sup |∂^α a|`
    pub ratio: f64,
}

pub fn seminorm_vs_norm_study(grid: &Grid, family: &[StudySymbol]) -> Vec<StudyRow> {
    family
        .iter()
        .map(|s| {
            let op = op_quantize(grid, &|x, xi| s.eval(x, xi));
            let seminorms = [s.seminorm(0), s.seminorm(1), s.seminorm(2), s.seminorm(3)];
            let op_norm = operator_norm(&op);
            StudyRow {
                symbol: s.name(),
                op_norm,
                hs_norm: hs_norm_sq(&op).sqrt(),
                sup: seminorms[0],
                seminorms,
                ratio: op_norm / seminorms[3],
            }
        })
        .collect()
}

/// The family used by the study: Gaussians, position oscillators of
/// growing frequency, mixed products, and windowed chirps whose sup stays
/// at 1 while their derivatives grow.
pub fn default_family() -> Vec<StudySymbol> {
    use Factor::*;
    let mut v = vec![Separable { x: One, xi: One }];
    for s in [0.5, 1.0, 2.0] {
        v.push(Separable { x: Gauss(s), xi: Gauss(s) });
    }
    for l in [1.0, 2.0, 4.0, 8.0] {
        v.push(Separable { x: Sin(l), xi: One });
    }
    for l in [1.0, 2.0, 4.0] {
        v.push(Separable { x: Cos(l), xi: Gauss(1.0) });
        v.push(Separable { x: Gauss(1.0), xi: Cos(l) });
    }
    let mut out: Vec<StudySymbol> = v.into_iter().map(StudySymbol::Separable).collect();
    for r in [1.0, 2.0, 3.0, 4.0] {
        out.push(StudySymbol::Chirp(WindowedChirp { kappa: 2.0, r }));
    }
    out
}

/// Normalized Gaussian `A e^{−(x−x0)²/2sx² − (ξ−ξ0)²/2sξ²}` with an optional
/// linear phase, used as symbol or as vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gaussian2 {
    pub amp: f64,
    pub x0: f64,
    pub xi0: f64,
    pub sx: f64,
    pub sxi: f64,
}

impl Gaussian2 {
    pub fn eval(&self, x: f64, xi: f64) -> f64 {
        let (u, v) = ((x - self.x0) / self.sx, (xi - self.xi0) / self.sxi);
        self.amp * (-(u * u + v * v) / 2.0).exp()
    }

    /// `∬ a`.
    pub fn integral(&self) -> f64 {
        self.amp * 2.0 * PI * self.sx * self.sxi
    }

    /// `∬ |a|²`.
    pub fn l2_sq(&self) -> f64 {
        self.amp * self.amp * PI * self.sx * self.sxi
    }

    /// `(b ∗ a)(x,ξ) = ∬ b(q,p) a(x+q, ξ+p)` for the unit-mass centered
    /// Gaussian `b` with widths `(σq, σp)`.
    pub fn smoothed(&self, sq: f64, sp: f64) -> Gaussian2 {
        let (nx, nxi) = ((self.sx * self.sx + sq * sq).sqrt(), (self.sxi * self.sxi + sp * sp).sqrt());
        Gaussian2 { amp: self.amp * self.sx / nx * self.sxi / nxi, x0: self.x0, xi0: self.xi0, sx: nx, sxi: nxi }
    }
}

/// Unit-mass centered Gaussian density in `(q, p)`.
pub fn gaussian_density(sq: f64, sp: f64) -> impl Fn(f64, f64) -> f64 {
    move |q, p| (-(q * q / (2.0 * sq * sq) + p * p / (2.0 * sp * sp))).exp() / (2.0 * PI * sq * sp)
}

/// `Σ b(q_i, p_k) h δp` over the quadrature nodes `conv_average` uses;
/// dividing `b` by this gives a discrete probability measure.
pub fn quadrature_mass(grid: &Grid, b: &dyn Fn(f64, f64) -> f64, w: Window) -> f64 {
    let (sq, sp) = ((w.q_max / grid.h()).floor() as i64, (w.p_max / w.p_step).floor() as i64);
    let mut mass = 0.0;
    for i in -sq..=sq {
        for k in -sp..=sp {
            mass += b(i as f64 * grid.h(), k as f64 * w.p_step);
        }
    }
    mass * grid.h() * w.p_step
}

/// Wave packet `e^{−(x−c)²/2σ²} e^{ikx}`.
pub fn packet(grid: &Grid, c: f64, sigma: f64, k: f64) -> Vec<C64> {
    grid.sample(|x| C64::from_polar((-(x - c) * (x - c) / (2.0 * sigma * sigma)).exp(), k * x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(128, 16.0).unwrap()
    }

    #[test]
    fn unit_symbol_is_identity() {
        let g = grid();
        let op = op_quantize(&g, &|_, _| C64::new(1.0, 0.0));
        let dev = (op - GridOperator::identity(g.n(), g.n())).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-12, "{dev}");
    }

    #[test]
    fn position_symbol_is_multiplication() {
        let g = grid();
        let op = op_quantize(&g, &|x, _| C64::new(x, 0.0));
        for j in 0..g.n() {
            for k in 0..g.n() {
                let want = if j == k { g.x(j) } else { 0.0 };
                assert!((op[(j, k)].re - want).abs() < 1e-10 && op[(j, k)].im.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn momentum_symbol_differentiates() {
        let g = grid();
        let op = op_quantize(&g, &|_, xi| C64::new(xi, 0.0));
        let f = packet(&g, 0.3, 1.0, 0.0);
        let out = apply(&op, &f);
        // ξ ↦ −i d/dx
        for j in 40..88 {
            let x = g.x(j) - 0.3;
            let want = C64::new(0.0, 1.0) * x * f[j];
            assert!((out[j] - want).norm() < 1e-8, "{j}");
        }
    }

    #[test]
    fn upsampling_interpolates() {
        let g = grid();
        let f = packet(&g, 0.5, 0.8, 1.5);
        let u = upsample(&f);
        for (n, &got) in u.iter().enumerate() {
            let x = g.half_x(n);
            let want = C64::from_polar((-(x - 0.5) * (x - 0.5) / (2.0 * 0.64)).exp(), 1.5 * x);
            assert!((got - want).norm() < 1e-10, "{n}");
        }
    }

    #[test]
    fn ground_state_wigner() {
        let g = grid();
        let phi = g.sample(|x| C64::new(PI.powf(-0.25) * (-x * x / 2.0).exp(), 0.0));
        let w = wigner(&g, &phi, &phi).unwrap();
        for n in (0..2 * g.n()).step_by(7) {
            for l in (0..2 * g.n()).step_by(5) {
                let (x, xi) = (g.half_x(n), g.xi(l));
                let want = (-x * x - xi * xi).exp() / PI;
                assert!((w.values[(n, l)] - want).norm() < 1e-10);
            }
        }
        assert!((w.total().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn group_law_phase() {
        let g = grid();
        let f = packet(&g, 0.0, 1.0, 0.5);
        let (a, b) = (schrodinger(&g, 0.5, 0.3, 0.0).unwrap(), schrodinger(&g, -0.25, 1.1, 0.0).unwrap());
        // θ = (p1 q2 − p2 q1)/2
        let theta = (0.3 * -0.25 - 1.1 * 0.5) / 2.0;
        let ab = schrodinger(&g, 0.25, 1.4, theta).unwrap();
        let lhs = apply(&(a * b), &f);
        let rhs = apply(&ab, &f);
        let err = lhs.iter().zip(&rhs).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
        assert!(matches!(schrodinger(&g, 0.01, 0.0, 0.0), Err(WeylError::OffGridShift(_))));
    }

    #[test]
    fn window_guard() {
        let g = grid();
        let c = GridOperator::identity(g.n(), g.n());
        let b = gaussian_density(1.0, 1.0);
        let w = Window { q_max: 1.0, p_max: 1.0, p_step: 0.1 };
        assert!(matches!(conv_average(&g, &b, &c, w), Err(WeylError::QuadratureWindowTooSmall { .. })));
    }

    #[test]
    fn gaussian_seminorms() {
        let f = Factor::Gauss(1.0);
        assert!((f.derivative_sup(1) - (-0.5f64).exp()).abs() < 1e-6);
        assert!((f.derivative_sup(2) - 1.0).abs() < 1e-12);
        assert_eq!(Factor::Sin(3.0).derivative_sup(2), 9.0);
    }

    #[test]
    fn chirp_derivatives_match_finite_differences() {
        let c = WindowedChirp { kappa: 2.0, r: 1.5 };
        let (x, xi, e) = (0.7, -0.4, 1e-5);
        let fd = (c.eval(x + e, xi) - c.eval(x - e, xi)) / (2.0 * e);
        let p = c.derivative_poly(1, 0);
        let env = c.eval(x, xi);
        let exact: C64 = p.iter().map(|&((a, b), v)| v * x.powi(a as i32) * xi.powi(b as i32)).sum::<C64>() * env;
        assert!((fd - exact).norm() < 1e-8, "{fd} {exact}");
        let fd2 = (c.eval(x, xi + e) - 2.0 * c.eval(x, xi) + c.eval(x, xi - e)) / (e * e);
        let exact2: C64 = c.derivative_poly(0, 2).iter().map(|&((a, b), v)| v * x.powi(a as i32) * xi.powi(b as i32)).sum::<C64>() * env;
        assert!((fd2 - exact2).norm() < 1e-4, "{fd2} {exact2}");
    }

    #[test]
    fn chirp_sup_is_one_and_gradient_grows() {
        for r in [1.0, 4.0] {
            let c = WindowedChirp { kappa: 2.0, r };
            assert!((c.seminorm(0) - 1.0).abs() < 1e-12);
            // for large R, |∂_x a| ≈ κ|ξ| e^{−ξ²/2R²} peaks at κR e^{−1/2}
            let p1 = c.seminorm(1);
            assert!(p1 >= 2.0 * r * (-0.5f64).exp() * 0.99, "{p1}");
        }
    }
}
