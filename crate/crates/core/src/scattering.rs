//! Radial scattering problems for non-negative, compactly supported,
//! spherically symmetric potentials.
//!
//! Everything is reduced to the half-line problem for m(r) = r f(r):
//!
//!   -m'' + (V/2) m = lambda m,   m(0) = 0,
//!
//! which is the s-wave radial form of (-Delta + V/2) f = lambda f. The
//! zero-energy solution behaves as m(r) = s (r - a0) outside the support of
//! V, which defines the scattering length a0. The Neumann variant solves the
//! lowest eigenpair on the ball of radius N*ell with f'(N ell) = 0 and
//! normalization f(N ell) = 1.

use crate::ode::integrate_dopri5;
use crate::{Error, Result};

/// Spherically symmetric potential, zero outside `support`.
#[derive(Debug, Clone)]
pub struct RadialPotential {
    kind: PotentialKind,
    support: f64,
}

#[derive(Debug, Clone)]
enum PotentialKind {
    /// V0 on [0, R], zero outside. Discontinuous at R.
    SquareWell { v0: f64 },
    /// V0 (1 - (r/R)^2)^2 on [0, R]; C^1 at the edge.
    SoftSphere { v0: f64 },
    /// Linear interpolation of samples on a uniform grid over [0, R].
    Table { samples: Vec<f64> },
    Zero,
}

impl RadialPotential {
    pub fn square_well(v0: f64, radius: f64) -> Result<Self> {
        if v0 < 0.0 || radius <= 0.0 {
            return Err(Error::domain("square_well: require V0 >= 0 and R > 0"));
        }
        if v0 == 0.0 {
            return Ok(Self::zero());
        }
        Ok(RadialPotential { kind: PotentialKind::SquareWell { v0 }, support: radius })
    }

    pub fn soft_sphere(v0: f64, radius: f64) -> Result<Self> {
        if v0 < 0.0 || radius <= 0.0 {
            return Err(Error::domain("soft_sphere: require V0 >= 0 and R > 0"));
        }
        if v0 == 0.0 {
            return Ok(Self::zero());
        }
        Ok(RadialPotential { kind: PotentialKind::SoftSphere { v0 }, support: radius })
    }

    pub fn from_samples(samples: Vec<f64>, support: f64) -> Result<Self> {
        if samples.len() < 2 || support <= 0.0 {
            return Err(Error::domain("from_samples: need >= 2 samples and positive support"));
        }
        if samples.iter().any(|&v| v < 0.0) {
            return Err(Error::domain("potential must be non-negative everywhere"));
        }
        if samples.iter().all(|&v| v == 0.0) {
            return Ok(Self::zero());
        }
        Ok(RadialPotential { kind: PotentialKind::Table { samples }, support })
    }

    pub fn zero() -> Self {
        RadialPotential { kind: PotentialKind::Zero, support: 0.0 }
    }

    pub fn support_radius(&self) -> f64 {
        self.support
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, PotentialKind::Zero)
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r > self.support || r < 0.0 {
            return 0.0;
        }
        match &self.kind {
            PotentialKind::SquareWell { v0 } => *v0,
            PotentialKind::SoftSphere { v0 } => {
                let t = 1.0 - (r / self.support) * (r / self.support);
                v0 * t * t
            }
            PotentialKind::Table { samples } => {
                let n = samples.len();
                let x = r / self.support * (n - 1) as f64;
                let i = (x.floor() as usize).min(n - 2);
                let t = x - i as f64;
                samples[i] * (1.0 - t) + samples[i + 1] * t
            }
            PotentialKind::Zero => 0.0,
        }
    }

    /// Radii where the integrand may lose smoothness; integration and
    /// quadrature split at these points.
    fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            PotentialKind::SquareWell { .. } => vec![self.support],
            PotentialKind::SoftSphere { .. } => vec![self.support],
            PotentialKind::Table { samples } => {
                let n = samples.len();
                (1..n).map(|i| self.support * i as f64 / (n - 1) as f64).collect()
            }
            PotentialKind::Zero => vec![],
        }
    }
}

/// Output of the zero-energy or Neumann radial solve.
#[derive(Debug, Clone)]
pub struct ScatteringSolution {
    /// Uniform radial grid, starting at 0.
    pub radial_grid: Vec<f64>,
    /// u(r) = r f(r), normalized so that u ~ (r - a0) outside the support
    /// (zero-energy) or f(N ell) = 1 (Neumann).
    pub u_profile: Vec<f64>,
    /// u'(r) with the same normalization.
    pub du_profile: Vec<f64>,
    /// f = u/r, with the r -> 0 limit filled in by the derivative.
    pub f_profile: Vec<f64>,
    pub a0: f64,
    /// Present only for the Neumann variant.
    pub lambda_ell: Option<f64>,
    pub n_param: Option<usize>,
    pub ell: Option<f64>,
    /// Least-squares diagnostics of the far-field fit (slope, rms residual).
    pub fit_slope: f64,
    pub fit_residual: f64,
}

impl ScatteringSolution {
    /// u at radius r via cubic Hermite interpolation on (u, u').
    pub fn u_at(&self, r: f64) -> f64 {
        let grid = &self.radial_grid;
        let n = grid.len();
        let rmax = grid[n - 1];
        if r >= rmax {
            // Linear continuation with the boundary slope.
            return self.u_profile[n - 1] + self.du_profile[n - 1] * (r - rmax);
        }
        if r <= 0.0 {
            return 0.0;
        }
        let dr = grid[1] - grid[0];
        let x = r / dr;
        let i = (x.floor() as usize).min(n - 2);
        let t = x - i as f64;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        h00 * self.u_profile[i]
            + h10 * dr * self.du_profile[i]
            + h01 * self.u_profile[i + 1]
            + h11 * dr * self.du_profile[i + 1]
    }

    /// f at radius r; constant 1 beyond the solved grid (both variants
    /// extend by 1 outside).
    pub fn f_at(&self, r: f64) -> f64 {
        let grid = &self.radial_grid;
        let n = grid.len();
        let rmax = grid[n - 1];
        if r >= rmax {
            return if self.lambda_ell.is_some() { 1.0 } else { self.f_profile[n - 1] };
        }
        let dr = grid[1] - grid[0];
        if r < dr {
            // Series limit: u(0) = 0, u''(0) = 0, so f(r) = u'(0) (1 + O(r^2)).
            return self.du_profile[0];
        }
        self.u_at(r) / r
    }

    pub fn w_at(&self, r: f64) -> f64 {
        let w = 1.0 - self.f_at(r);
        if w.abs() < 1e-15 {
            0.0
        } else {
            w
        }
    }

    pub fn w_profile(&self) -> Vec<f64> {
        self.f_profile.iter().map(|&f| 1.0 - f).collect()
    }

    /// f'(r) from the stored u, u' profiles; 0 at the origin by symmetry
    /// and beyond the solved grid.
    pub fn f_prime_at(&self, r: f64) -> f64 {
        let grid = &self.radial_grid;
        let n = grid.len();
        if r <= 1e-9 || r >= grid[n - 1] {
            return 0.0;
        }
        let dr = grid[1] - grid[0];
        let x = r / dr;
        let i = (x.floor() as usize).min(n - 2).max(1);
        let t = x - i as f64;
        let fp = |j: usize| (self.du_profile[j] - self.f_profile[j]) / grid[j].max(dr * 1e-6);
        fp(i) * (1.0 - t) + fp(i + 1) * t
    }

    pub fn w_prime_at(&self, r: f64) -> f64 {
        -self.f_prime_at(r)
    }
}

/// Sampled radial function g(r) on a uniform grid over [0, r_max], with the
/// two reductions used throughout the slab geometry:
/// the 3D radial Fourier transform and the transverse (two-axis) integral.
#[derive(Debug, Clone)]
pub struct RadialFunction {
    pub r_max: f64,
    pub samples: Vec<f64>,
}

impl RadialFunction {
    pub fn from_fn(r_max: f64, n: usize, g: impl Fn(f64) -> f64) -> Self {
        assert!(n >= 3 && n % 2 == 1, "need an odd sample count for Simpson");
        let samples = (0..n).map(|i| g(r_max * i as f64 / (n - 1) as f64)).collect();
        RadialFunction { r_max, samples }
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r >= self.r_max || r < 0.0 {
            return 0.0;
        }
        let n = self.samples.len();
        let x = r / self.r_max * (n - 1) as f64;
        let i = (x.floor() as usize).min(n - 2);
        let t = x - i as f64;
        self.samples[i] * (1.0 - t) + self.samples[i + 1] * t
    }

    fn simpson(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let n = self.samples.len();
        let h = self.r_max / (n - 1) as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let r = i as f64 * h;
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * f(r, self.samples[i]);
        }
        acc * h / 3.0
    }

    /// 3D Fourier transform of the radial function at |q|:
    /// \int g(|x|) e^{-iq.x} d^3x = 4 pi \int r^2 g(r) sinc(qr) dr.
    pub fn fourier3(&self, q: f64) -> f64 {
        4.0 * std::f64::consts::PI
            * self.simpson(|r, g| {
                let x = q * r;
                let sinc = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
                r * r * g * sinc
            })
    }

    /// Volume integral \int g(|x|) d^3x.
    pub fn volume_integral(&self) -> f64 {
        self.fourier3(0.0)
    }

    /// Transverse integral T(s) = \int g(|(s, y, z)|) dy dz
    /// = 2 pi \int_{|s|}^{r_max} r g(r) dr, precomputed on the sample grid.
    pub fn transverse_profile(&self) -> RadialFunction {
        let n = self.samples.len();
        let h = self.r_max / (n - 1) as f64;
        // Cumulative trapezoid from the outside in.
        let mut cum = vec![0.0; n];
        for i in (0..n - 1).rev() {
            let r0 = i as f64 * h;
            let r1 = (i + 1) as f64 * h;
            let seg = 0.5 * (r0 * self.samples[i] + r1 * self.samples[i + 1]) * h;
            cum[i] = cum[i + 1] + seg;
        }
        let samples = cum.iter().map(|&c| 2.0 * std::f64::consts::PI * c).collect();
        RadialFunction { r_max: self.r_max, samples }
    }
}

/// Integrate -m'' + (V/2 - lambda) m = 0 with m(0)=0, m'(0)=1, returning
/// (m, m') sampled on `outputs` (ascending). Splits at potential
/// breakpoints so the adaptive integrator only sees smooth pieces.
fn integrate_radial(
    v: &RadialPotential,
    lambda: f64,
    r_end: f64,
    outputs: &[f64],
) -> Result<Vec<[f64; 2]>> {
    let rhs = |r: f64, y: &[f64]| vec![y[1], (0.5 * v.eval(r) - lambda) * y[0]];
    let mut cuts: Vec<f64> = v.breakpoints().into_iter().filter(|&b| b < r_end).collect();
    cuts.push(r_end);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);

    let mut y = vec![0.0, 1.0];
    let mut r_lo = 0.0;
    let mut result = Vec::with_capacity(outputs.len());
    let mut oi = 0;
    while oi < outputs.len() && outputs[oi] <= 0.0 {
        result.push([y[0], y[1]]);
        oi += 1;
    }
    for &r_hi in &cuts {
        if r_hi <= r_lo {
            continue;
        }
        let mut segment_outputs: Vec<f64> = Vec::new();
        while oi < outputs.len() && outputs[oi] <= r_hi + 1e-13 {
            segment_outputs.push(outputs[oi].clamp(r_lo, r_hi));
            oi += 1;
        }
        // Record the endpoint so the state can be handed to the next segment.
        segment_outputs.push(r_hi);
        let sols = integrate_dopri5(rhs, r_lo, r_hi, y.clone(), 1e-11, 1e-13, &segment_outputs)?;
        for s in &sols[..sols.len() - 1] {
            result.push([s[0], s[1]]);
        }
        y = sols[sols.len() - 1].clone();
        r_lo = r_hi;
    }
    while oi < outputs.len() {
        result.push([y[0], y[1]]);
        oi += 1;
    }
    Ok(result)
}

fn uniform_grid(r_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| r_max * i as f64 / (n - 1) as f64).collect()
}

/// Fill f = u/r, taking the r->0 limit from u'.
fn f_from_u(grid: &[f64], states: &[[f64; 2]]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let u: Vec<f64> = states.iter().map(|s| s[0]).collect();
    let du: Vec<f64> = states.iter().map(|s| s[1]).collect();
    let mut f = Vec::with_capacity(grid.len());
    for (i, &r) in grid.iter().enumerate() {
        if r < 1e-12 {
            f.push(states[i][1]);
        } else {
            f.push(u[i] / r);
        }
    }
    (u, du, f)
}

/// Solve the zero-energy radial equation and extract the scattering length
/// from the far-field linear form fitted over the outer 10% of the grid.
pub fn solve_zero_energy(
    v: &RadialPotential,
    r_max: f64,
    grid_points: usize,
) -> Result<ScatteringSolution> {
    if grid_points < 512 {
        return Err(Error::domain("solve_zero_energy: grid_points must be >= 512"));
    }
    if !v.is_zero() && r_max <= v.support_radius() {
        return Err(Error::domain("solve_zero_energy: r_max must exceed the support of V"));
    }
    let grid = uniform_grid(r_max, grid_points);
    if v.is_zero() {
        let u = grid.clone();
        let f = vec![1.0; grid_points];
        return Ok(ScatteringSolution {
            radial_grid: grid,
            u_profile: u,
            du_profile: vec![1.0; grid_points],
            f_profile: f,
            a0: 0.0,
            lambda_ell: None,
            n_param: None,
            ell: None,
            fit_slope: 1.0,
            fit_residual: 0.0,
        });
    }
    let states = integrate_radial(v, 0.0, r_max, &grid)?;
    let (mut u, mut du, _) = f_from_u(&grid, &states);

    // Least-squares u = s (r - a0) over the outer 10% of [R_V, r_max].
    let fit_lo = v.support_radius() + 0.9 * (r_max - v.support_radius());
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .zip(&u)
        .filter(|(&r, _)| r >= fit_lo)
        .map(|(&r, &uu)| (r, uu))
        .collect();
    if pts.len() < 8 {
        return Err(Error::domain("solve_zero_energy: too few points in the fit window"));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    if slope <= 0.0 {
        return Err(Error::Internal("zero-energy solution has non-positive far slope".into()));
    }
    let a0 = -intercept / slope;
    let rms = (pts
        .iter()
        .map(|&(r, uu)| {
            let d = uu - slope * (r - a0);
            d * d
        })
        .sum::<f64>()
        / n)
        .sqrt();

    // Normalize so the far field is exactly r - a0 (unit slope).
    for x in &mut u {
        *x /= slope;
    }
    for x in &mut du {
        *x /= slope;
    }
    let mut f = Vec::with_capacity(grid_points);
    for (i, &r) in grid.iter().enumerate() {
        if r < 1e-12 {
            f.push(states[i][1] / slope);
        } else {
            f.push(u[i] / r);
        }
    }
    Ok(ScatteringSolution {
        radial_grid: grid,
        u_profile: u,
        du_profile: du,
        f_profile: f,
        a0,
        lambda_ell: None,
        n_param: None,
        ell: None,
        fit_slope: slope,
        fit_residual: rms,
    })
}

/// Composite Simpson quadrature of g on [0, hi] with panels split at the
/// potential breakpoints.
fn simpson_split(g: impl Fn(f64) -> f64, hi: f64, cuts: &[f64], panels_per_piece: usize) -> f64 {
    let mut edges: Vec<f64> = vec![0.0];
    for &c in cuts {
        if c > 1e-14 && c < hi - 1e-14 {
            edges.push(c);
        }
    }
    edges.push(hi);
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let mut total = 0.0;
    for win in edges.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        let n = panels_per_piece * 2;
        let h = (hi - lo) / n as f64;
        let mut acc = g(lo) + g(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * g(lo + i as f64 * h);
        }
        total += acc * h / 3.0;
    }
    total
}

/// Scattering length from the integral representation
/// (1/8pi) \int V f = (1/2) \int_0^inf r^2 V(r) f(r) dr.
pub fn scattering_length_integral(v: &RadialPotential, sol: &ScatteringSolution) -> Result<f64> {
    if v.is_zero() {
        return Ok(0.0);
    }
    let grid_max = *sol.radial_grid.last().unwrap();
    if grid_max + 1e-12 < v.support_radius() {
        return Err(Error::domain("scattering_length_integral: solution grid does not cover supp V"));
    }
    let cuts = v.breakpoints();
    let val = simpson_split(|r| r * r * v.eval(r) * sol.f_at(r), v.support_radius(), &cuts, 512);
    Ok(0.5 * val)
}

/// Lowest Neumann eigenpair of (-Delta + V/2) on the ball of radius N*ell,
/// normalized f(N ell) = 1 and extended by 1 outside.
pub fn solve_neumann(v: &RadialPotential, n_param: usize, ell: f64) -> Result<ScatteringSolution> {
    solve_neumann_gridded(v, n_param, ell, 4096)
}

pub fn solve_neumann_gridded(
    v: &RadialPotential,
    n_param: usize,
    ell: f64,
    grid_points: usize,
) -> Result<ScatteringSolution> {
    let big_l = n_param as f64 * ell;
    if !v.is_zero() && big_l <= v.support_radius() {
        return Err(Error::domain("solve_neumann: N*ell must exceed the support of V"));
    }
    if ell <= 0.0 || n_param == 0 {
        return Err(Error::domain("solve_neumann: require N >= 1 and ell > 0"));
    }
    let grid = uniform_grid(big_l, grid_points);
    if v.is_zero() {
        return Ok(ScatteringSolution {
            radial_grid: grid.clone(),
            u_profile: grid,
            du_profile: vec![1.0; grid_points],
            f_profile: vec![1.0; grid_points],
            a0: 0.0,
            lambda_ell: Some(0.0),
            n_param: Some(n_param),
            ell: Some(ell),
            fit_slope: 1.0,
            fit_residual: 0.0,
        });
    }

    // Neumann condition for f = m/r at r = L: L m'(L) - m(L) = 0.
    let shoot = |lambda: f64| -> Result<f64> {
        let st = integrate_radial(v, lambda, big_l, &[big_l])?;
        let m = st[0][0];
        let mp = st[0][1];
        Ok(big_l * mp - m)
    };

    // Scale guess from the zero-energy scattering length.
    let zero = solve_zero_energy(v, (10.0 * v.support_radius()).max(big_l.min(50.0)), 2048)?;
    let a0 = zero.a0;
    let lam_guess = (3.0 * a0.max(1e-8) / (big_l * big_l * big_l)).max(1e-300);

    // Bracket the smallest root by walking a geometric ladder.
    let mut lo = 0.0;
    let mut g_lo = shoot(0.0)?;
    if g_lo <= 0.0 {
        return Err(Error::Internal(
            "solve_neumann: boundary functional non-positive at lambda = 0".into(),
        ));
    }
    let mut hi = lam_guess / 64.0;
    let mut g_hi = shoot(hi)?;
    let mut found = false;
    for _ in 0..60 {
        if g_hi <= 0.0 {
            found = true;
            break;
        }
        lo = hi;
        g_lo = g_hi;
        hi *= 2.0;
        g_hi = shoot(hi)?;
    }
    if !found {
        return Err(Error::solver("solve_neumann: eigenvalue bracketing failed"));
    }
    let _ = g_lo;
    // Bisection to relative tolerance 1e-12.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) < 1e-12 * mid.max(1e-30) {
            break;
        }
        let g_mid = shoot(mid)?;
        if g_mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    if lambda < 0.0 {
        return Err(Error::Internal("solve_neumann: negative eigenvalue for V >= 0".into()));
    }

    let states = integrate_radial(v, lambda, big_l, &grid)?;
    let (mut u, mut du, _) = f_from_u(&grid, &states);
    // Normalize f(L) = 1, i.e. m(L) = L.
    let m_end = u[grid_points - 1];
    if m_end.abs() < 1e-300 {
        return Err(Error::Internal("solve_neumann: vanishing boundary value".into()));
    }
    let scale = big_l / m_end;
    for x in &mut u {
        *x *= scale;
    }
    for x in &mut du {
        *x *= scale;
    }
    let mut f = Vec::with_capacity(grid_points);
    for (i, &r) in grid.iter().enumerate() {
        if r < 1e-12 {
            f.push(states[i][1] * scale);
        } else {
            f.push(u[i] / r);
        }
    }
    Ok(ScatteringSolution {
        radial_grid: grid,
        u_profile: u,
        du_profile: du,
        f_profile: f,
        a0,
        lambda_ell: Some(lambda),
        n_param: Some(n_param),
        ell: Some(ell),
        fit_slope: scale,
        fit_residual: 0.0,
    })
}

/// Profiles of f(N x), w(N x), N^2 V(N x) f(N x) tabulated on a spatial
/// grid, plus the relative discrete-L2 residual of the rescaled radial
/// equation checked on the solver grid.
#[derive(Debug, Clone)]
pub struct RescaledProfiles {
    pub x_grid: Vec<f64>,
    pub f_scaled: Vec<f64>,
    pub w_scaled: Vec<f64>,
    pub interaction: Vec<f64>,
    pub equation_residual: f64,
}

pub fn rescaled_profiles(
    v: &RadialPotential,
    sol: &ScatteringSolution,
    n_param: usize,
    x_grid: &[f64],
) -> Result<RescaledProfiles> {
    if x_grid.is_empty() {
        return Err(Error::domain("rescaled_profiles: empty grid"));
    }
    let nf = n_param as f64;
    let f_scaled: Vec<f64> = x_grid.iter().map(|&x| sol.f_at(nf * x)).collect();
    let w_scaled: Vec<f64> = x_grid.iter().map(|&x| sol.w_at(nf * x)).collect();
    let interaction: Vec<f64> =
        x_grid.iter().map(|&x| nf * nf * v.eval(nf * x) * sol.f_at(nf * x)).collect();
    let equation_residual = radial_equation_residual(v, sol)?;
    Ok(RescaledProfiles { x_grid: x_grid.to_vec(), f_scaled, w_scaled, interaction, equation_residual })
}

/// Relative discrete-L2 residual of -m'' + (V/2 - lambda) m = 0 via 4th
/// order finite differences on the solution grid. Cells adjacent to
/// potential breakpoints are excluded (m'' jumps there for discontinuous V).
/// The rescaled equation at argument Nx differs from this by the exact
/// change of variables r = Nx, so the relative residual is the same.
pub fn radial_equation_residual(v: &RadialPotential, sol: &ScatteringSolution) -> Result<f64> {
    let grid = &sol.radial_grid;
    let u = &sol.u_profile;
    let n = grid.len();
    if n < 16 {
        return Err(Error::domain("radial_equation_residual: grid too small"));
    }
    let h = grid[1] - grid[0];
    let lambda = sol.lambda_ell.unwrap_or(0.0);
    let cuts = v.breakpoints();
    let near_cut = |r: f64| cuts.iter().any(|&c| (r - c).abs() <= 2.5 * h);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 2..n - 2 {
        let r = grid[i];
        if near_cut(r) {
            continue;
        }
        let upp = (-u[i - 2] + 16.0 * u[i - 1] - 30.0 * u[i] + 16.0 * u[i + 1] - u[i + 2])
            / (12.0 * h * h);
        let res = -upp + (0.5 * v.eval(r) - lambda) * u[i];
        let scale = (0.5 * v.eval(r) + lambda.abs() + 1.0) * u[i].abs().max(1e-3);
        num += res * res;
        den += scale * scale;
    }
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok((num / den).sqrt())
}

/// 3D volume integral \int V(|x|) f(|x|) d^3x = 4 pi \int r^2 V f dr.
pub fn v_f_volume_integral(v: &RadialPotential, sol: &ScatteringSolution) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let cuts = v.breakpoints();
    4.0 * std::f64::consts::PI
        * simpson_split(|r| r * r * v.eval(r) * sol.f_at(r), v.support_radius(), &cuts, 512)
}
