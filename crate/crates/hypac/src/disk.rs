//! Damped-Newton solver for `Δu = f(u)` on a truncated geodesic-polar disk
//! (n = 2), used to check that invariant boundary data produces solutions
//! depending only on the signed distance to the dividing geodesic.
//!
//! The Laplacian in geodesic polar coordinates is
//! `u_rr + coth r · u_r + sinh⁻²r · u_θθ`; the 5-point second-order stencil
//! discretizes it with Dirichlet data at r = R and the pole closed by
//! setting u(0) to the average of the first ring. Newton steps solve the
//! linearized system with BiCGStab, preconditioned by the exact inverse of
//! the constant-coefficient operator `Δ_h - c` (FFT in θ, one tridiagonal
//! solve per angular mode).
//!
//! The signed distance to the geodesic P = {z₂ = 0} through the origin is
//! `sinh t = sinh r · sin θ` in polar coordinates, equivalently
//! `sinh t = 2 z₂/(1 - |z|²)` in ball coordinates.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::diagnostics::{coth, interp_cubic, Profile1D};
use crate::linalg;
use crate::model::ProblemParams;

#[derive(Debug, Error)]
pub enum DiskError {
    #[error("disk solver requires n = 2, got n = {0}")]
    NotTwoDimensional(u32),
    #[error("ntheta must be even and >= 8, got {0}")]
    BadNtheta(usize),
    #[error("nr must be >= 8, got {0}")]
    BadNr(usize),
    #[error("boundary values must lie in [-1, 1]")]
    BadBoundary,
    #[error("Newton did not reduce the residual ({0:.3e}) under damping")]
    NewtonDivergence(f64),
    #[error("linear solve failed: {0}")]
    Linear(#[from] linalg::LinalgError),
    #[error("level set t = {0} is empty inside r <= R - 2")]
    EmptyLevelSet(f64),
    #[error("profile span {0:?} does not cover the sampled t-range ({1}, {2})")]
    ProfileWindow((f64, f64), f64, f64),
}

/// Geodesic-polar lattice: `r_i = i·R/nr` (i = 1..nr), `θ_j = 2πj/ntheta`.
#[derive(Clone, Debug)]
pub struct DiskGrid {
    pub r_trunc: f64,
    pub nr: usize,
    pub ntheta: usize,
}

impl DiskGrid {
    pub fn new(r_trunc: f64, nr: usize, ntheta: usize) -> Result<Self, DiskError> {
        if ntheta < 8 || ntheta % 2 != 0 {
            return Err(DiskError::BadNtheta(ntheta));
        }
        if nr < 8 {
            return Err(DiskError::BadNr(nr));
        }
        Ok(DiskGrid {
            r_trunc,
            nr,
            ntheta,
        })
    }

    pub fn dr(&self) -> f64 {
        self.r_trunc / self.nr as f64
    }

    pub fn dtheta(&self) -> f64 {
        std::f64::consts::TAU / self.ntheta as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        i as f64 * self.dr()
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.dtheta()
    }
}

/// Boundary data generators for the Dirichlet ring at r = R.
#[derive(Clone, Debug)]
pub enum BoundaryData<'a> {
    Constant(f64),
    /// ±1 two-valued data, +1 on θ ∈ (0, π), smoothed over an angular
    /// width of 2 grid cells at the jumps to avoid Gibbs artifacts.
    HhStep,
    /// Trace `U(t(R, θ))` of a signed-distance profile.
    ProfileTrace(&'a Profile1D),
}

impl BoundaryData<'_> {
    pub fn materialize(&self, grid: &DiskGrid) -> Vec<f64> {
        let w = grid.dtheta(); // half-width of the smoothing window
        (0..grid.ntheta)
            .map(|j| {
                let th = grid.theta(j);
                match self {
                    BoundaryData::Constant(c) => *c,
                    BoundaryData::HhStep => smoothed_step(th, w),
                    BoundaryData::ProfileTrace(p) => p.interp(t_of_polar(grid.r_trunc, th)),
                }
            })
            .collect()
    }
}

/// sign(sin θ) smoothed with a C¹ smoothstep across ±w around θ ∈ {0, π}.
fn smoothed_step(theta: f64, w: f64) -> f64 {
    let th = theta.rem_euclid(std::f64::consts::TAU);
    let raw = if th < std::f64::consts::PI { 1.0 } else { -1.0 };
    // Distance to the nearest jump (0, π, or 2π).
    let jumps = [0.0, std::f64::consts::PI, std::f64::consts::TAU];
    let mut best = f64::INFINITY;
    let mut sign_after = 1.0;
    for (idx, &q) in jumps.iter().enumerate() {
        let d = th - q;
        if d.abs() < best.abs() {
            best = d;
            sign_after = if idx == 1 { -1.0 } else { 1.0 };
        }
    }
    if best.abs() >= w {
        raw
    } else {
        // Smoothstep from -sign_after to sign_after over [-w, w].
        let x = 0.5 * (best / w + 1.0);
        let s = x * x * (3.0 - 2.0 * x);
        sign_after * (2.0 * s - 1.0)
    }
}

/// Signed distance to P = {z₂ = 0} in ball-model coordinates, positive in
/// the upper half-disk.
pub fn signed_distance_t(z: [f64; 2]) -> f64 {
    let norm2 = z[0] * z[0] + z[1] * z[1];
    assert!(norm2 < 1.0, "ball-model point must satisfy |z| < 1");
    (2.0 * z[1] / (1.0 - norm2)).asinh()
}

/// The same distance in geodesic polar coordinates.
pub fn t_of_polar(r: f64, theta: f64) -> f64 {
    (r.sinh() * theta.sin()).asinh()
}

/// Ball-model coordinates of a polar lattice point.
pub fn polar_to_ball(r: f64, theta: f64) -> [f64; 2] {
    let rho = (0.5 * r).tanh();
    [rho * theta.cos(), rho * theta.sin()]
}

/// A converged solution on the truncated disk.
#[derive(Clone, Debug)]
pub struct DiskSolution {
    pub grid: DiskGrid,
    /// Interior rings i = 1..nr-1, row-major `[i-1][j]`.
    pub values: Vec<f64>,
    pub pole: f64,
    pub boundary: Vec<f64>,
    pub residual_norm: f64,
    pub newton_iterations: usize,
    pub params: ProblemParams,
}

impl DiskSolution {
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        (i - 1) * self.grid.ntheta + j
    }

    /// Nodal value with i = 0 the pole and i = nr the boundary ring.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        if i == 0 {
            self.pole
        } else if i == self.grid.nr {
            self.boundary[j]
        } else {
            self.values[self.idx(i, j)]
        }
    }

    /// Bilinear interpolation in (r, θ), periodic in θ.
    pub fn interp(&self, r: f64, theta: f64) -> f64 {
        let g = &self.grid;
        let rr = r.clamp(0.0, g.r_trunc);
        let fi = rr / g.dr();
        let i0 = (fi.floor() as usize).min(g.nr - 1);
        let wr = fi - i0 as f64;
        let th = theta.rem_euclid(std::f64::consts::TAU);
        let fj = th / g.dtheta();
        let j0 = (fj.floor() as usize).min(g.ntheta - 1);
        let wt = fj - j0 as f64;
        let j1 = (j0 + 1) % g.ntheta;
        let v00 = self.value(i0, j0);
        let v01 = self.value(i0, j1);
        let v10 = self.value(i0 + 1, j0);
        let v11 = self.value(i0 + 1, j1);
        (1.0 - wr) * ((1.0 - wt) * v00 + wt * v01) + wr * ((1.0 - wt) * v10 + wt * v11)
    }

    pub fn sup_abs(&self) -> f64 {
        self.values
            .iter()
            .fold(self.pole.abs(), |m, v| m.max(v.abs()))
    }

    /// Interior hull check: all values within the hull of the boundary data
    /// united with the critical values {-1, 0, 1}, within `tol`.
    pub fn within_hull(&self, tol: f64) -> bool {
        let mut lo = -1.0f64;
        let mut hi = 1.0f64;
        for &b in &self.boundary {
            lo = lo.min(b);
            hi = hi.max(b);
        }
        self.values
            .iter()
            .chain(std::iter::once(&self.pole))
            .all(|&v| v >= lo - tol && v <= hi + tol)
    }
}

pub(crate) struct Stencil {
    nr: usize,
    ntheta: usize,
    #[allow(dead_code)]
    dr: f64,
    inv_dr2: f64,
    /// coth(r_i)/(2Δr) per interior ring.
    drift: Vec<f64>,
    /// 1/(sinh²(r_i)·Δθ²) per interior ring.
    ang: Vec<f64>,
}

impl Stencil {
    pub(crate) fn build(grid: &DiskGrid) -> Self {
        let dr = grid.dr();
        let dth = grid.dtheta();
        let drift = (1..grid.nr)
            .map(|i| coth(grid.r(i)) / (2.0 * dr))
            .collect();
        let ang = (1..grid.nr)
            .map(|i| {
                let s = grid.r(i).sinh();
                1.0 / (s * s * dth * dth)
            })
            .collect();
        Stencil {
            nr: grid.nr,
            ntheta: grid.ntheta,
            dr,
            inv_dr2: 1.0 / (dr * dr),
            drift,
            ang,
        }
    }

    pub(crate) fn rows(&self) -> usize {
        self.nr - 1
    }

    pub(crate) fn len(&self) -> usize {
        self.rows() * self.ntheta
    }

    /// y = L x with homogeneous Dirichlet at r = R and the mean-of-ring-1
    /// pole closure.
    pub(crate) fn apply_laplacian(&self, x: &[f64], y: &mut [f64]) {
        let nt = self.ntheta;
        let pole = x[..nt].iter().sum::<f64>() / nt as f64;
        for row in 0..self.rows() {
            let base = row * nt;
            let below: Option<usize> = if row > 0 { Some(base - nt) } else { None };
            let above: Option<usize> = if row + 1 < self.rows() {
                Some(base + nt)
            } else {
                None
            };
            let cm = self.inv_dr2 - self.drift[row];
            let cp = self.inv_dr2 + self.drift[row];
            let ca = self.ang[row];
            for j in 0..nt {
                let jm = if j == 0 { nt - 1 } else { j - 1 };
                let jp = if j + 1 == nt { 0 } else { j + 1 };
                let um = match below {
                    Some(b) => x[b + j],
                    None => pole,
                };
                let up = match above {
                    Some(a) => x[a + j],
                    None => 0.0,
                };
                y[base + j] = cm * um + cp * up - 2.0 * self.inv_dr2 * x[base + j]
                    + ca * (x[base + jm] - 2.0 * x[base + j] + x[base + jp]);
            }
        }
    }

    /// Boundary contribution of Dirichlet data at r = R to the affine part.
    pub(crate) fn boundary_forcing(&self, boundary: &[f64], out: &mut [f64]) {
        let nt = self.ntheta;
        let row = self.rows() - 1;
        let cp = self.inv_dr2 + self.drift[row];
        for v in out.iter_mut() {
            *v = 0.0;
        }
        for j in 0..nt {
            out[row * nt + j] = cp * boundary[j];
        }
    }
}

/// Exact inverse of (Δ_h - c) via θ-FFT and per-mode tridiagonal solves.
pub(crate) struct SpectralInverse {
    nt: usize,
    rows: usize,
    /// Per-mode factor data: (lower, diag, upper).
    tri: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)>,
    fwd: std::sync::Arc<dyn rustfft::Fft<f64>>,
    inv: std::sync::Arc<dyn rustfft::Fft<f64>>,
}

impl SpectralInverse {
    pub(crate) fn build(st: &Stencil, c: f64) -> Self {
        let nt = st.ntheta;
        let rows = st.rows();
        let dth = std::f64::consts::TAU / nt as f64;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(nt);
        let inv = planner.plan_fft_inverse(nt);
        let mut tri = Vec::with_capacity(nt);
        for m in 0..nt {
            // Discrete angular symbol of the second difference.
            let sym = (2.0 - 2.0 * (m as f64 * dth).cos()) / (dth * dth);
            let mut lower = vec![0.0; rows];
            let mut diag = vec![0.0; rows];
            let mut upper = vec![0.0; rows];
            for row in 0..rows {
                let ca = st.ang[row] * dth * dth; // = 1/sinh²(r_i)
                lower[row] = st.inv_dr2 - st.drift[row];
                upper[row] = st.inv_dr2 + st.drift[row];
                diag[row] = -2.0 * st.inv_dr2 - ca * sym - c;
            }
            // Pole closure: ghost = ring value for m = 0, zero otherwise.
            if m == 0 {
                diag[0] += lower[0];
            }
            lower[0] = 0.0;
            upper[rows - 1] = 0.0;
            tri.push((lower, diag, upper));
        }
        SpectralInverse {
            nt,
            rows,
            tri,
            fwd,
            inv,
        }
    }

    pub(crate) fn apply(&self, x: &[f64], y: &mut [f64]) {
        let nt = self.nt;
        let rows = self.rows;
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for row in 0..rows {
            self.fwd.process(&mut buf[row * nt..(row + 1) * nt]);
        }
        let mut re = vec![0.0; rows];
        let mut im = vec![0.0; rows];
        for m in 0..nt {
            for row in 0..rows {
                let z = buf[row * nt + m];
                re[row] = z.re;
                im[row] = z.im;
            }
            let (lo, di, up) = &self.tri[m];
            let sre = linalg::solve_tridiagonal(lo, di, up, &re).expect("mode solve");
            let sim = linalg::solve_tridiagonal(lo, di, up, &im).expect("mode solve");
            for row in 0..rows {
                buf[row * nt + m] = Complex64::new(sre[row], sim[row]);
            }
        }
        for row in 0..rows {
            self.inv.process(&mut buf[row * nt..(row + 1) * nt]);
        }
        let scale = 1.0 / nt as f64;
        for (o, z) in y.iter_mut().zip(&buf) {
            *o = z.re * scale;
        }
    }
}

/// Solves `Δu = f(u)` with the given Dirichlet data. Cold starts continue
/// in boundary amplitude (quarters of the full data); constant data with
/// `f(c) = 0` converges with zero Newton corrections by construction.
pub fn solve_disk(
    params: &ProblemParams,
    boundary: &BoundaryData<'_>,
    grid: &DiskGrid,
    tol: f64,
) -> Result<DiskSolution, DiskError> {
    if params.n != 2 {
        return Err(DiskError::NotTwoDimensional(params.n));
    }
    let bvals = boundary.materialize(grid);
    if bvals.iter().any(|b| !(-1.0..=1.0).contains(b) || !b.is_finite()) {
        return Err(DiskError::BadBoundary);
    }
    let st = Stencil::build(grid);
    let len = st.len();

    let constant_data = bvals.windows(2).all(|w| w[0] == w[1]);
    let stages: Vec<f64> = if constant_data {
        vec![1.0]
    } else {
        vec![0.25, 0.5, 0.75, 1.0]
    };

    let mut u = if constant_data {
        vec![bvals[0]; len]
    } else {
        vec![0.0; len]
    };
    let mut total_newton = 0usize;
    let mut residual_norm = f64::INFINITY;

    for &amp in &stages {
        let bstage: Vec<f64> = bvals.iter().map(|b| b * amp).collect();
        let mut forcing = vec![0.0; len];
        st.boundary_forcing(&bstage, &mut forcing);

        let mut res = vec![0.0; len];
        let nonlinear_residual = |u: &[f64], res: &mut [f64]| {
            st.apply_laplacian(u, res);
            for (idx, r) in res.iter_mut().enumerate() {
                *r += forcing[idx] - params.potential.f(u[idx]);
            }
        };
        nonlinear_residual(&u, &mut res);
        let mut rn = sup(&res);

        for _ in 0..40 {
            if rn < tol {
                break;
            }
            total_newton += 1;
            // J = L - diag(f'(u)); preconditioner from the f' mid-range.
            let fps: Vec<f64> = u.iter().map(|&v| params.potential.fprime(v)).collect();
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &v in &fps {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let c = (0.5 * (lo + hi)).max(-0.15);
            let minv = SpectralInverse::build(&st, c);
            let apply_a = |x: &[f64], y: &mut [f64]| {
                st.apply_laplacian(x, y);
                for (idx, o) in y.iter_mut().enumerate() {
                    *o -= fps[idx] * x[idx];
                }
            };
            let apply_m = |x: &[f64], y: &mut [f64]| minv.apply(x, y);
            let rhs: Vec<f64> = res.iter().map(|r| -r).collect();
            let (delta, _iters) =
                linalg::bicgstab(len, &apply_a, &apply_m, &rhs, None, 1e-12, 1e-300, 800)?;

            // Damping on the sup residual.
            let mut lam = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let trial: Vec<f64> = u
                    .iter()
                    .zip(&delta)
                    .map(|(&a, &d)| a + lam * d)
                    .collect();
                nonlinear_residual(&trial, &mut res);
                let rt = sup(&res);
                if rt < rn {
                    u = trial;
                    rn = rt;
                    improved = true;
                    break;
                }
                lam *= 0.5;
            }
            if !improved {
                return Err(DiskError::NewtonDivergence(rn));
            }
        }
        if rn >= tol {
            return Err(DiskError::NewtonDivergence(rn));
        }
        residual_norm = rn;
    }

    let nt = grid.ntheta;
    let pole = u[..nt].iter().sum::<f64>() / nt as f64;
    Ok(DiskSolution {
        grid: grid.clone(),
        values: u,
        pole,
        boundary: bvals,
        residual_norm,
        newton_iterations: total_newton,
        params: params.clone(),
    })
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Max over the given t-levels of the variation (max - min) of the solution
/// along the equidistant curve {t(z) = level} ∩ {r ≤ R - 2}, sampled by
/// bilinear interpolation.
pub fn symmetry_deviation(sol: &DiskSolution, t_levels: &[f64]) -> Result<f64, DiskError> {
    let r_cap = sol.grid.r_trunc - 2.0;
    let mut worst: f64 = 0.0;
    for &level in t_levels {
        let r_lo = level.abs().max(2.0 * sol.grid.dr()) + 1e-9;
        if r_lo >= r_cap {
            return Err(DiskError::EmptyLevelSet(level));
        }
        let m = 400;
        let mut min_u = f64::INFINITY;
        let mut max_u = f64::NEG_INFINITY;
        let sh = level.sinh();
        for q in 0..=m {
            let r = r_lo + (r_cap - r_lo) * q as f64 / m as f64;
            let ratio = (sh / r.sinh()).clamp(-1.0, 1.0);
            let th = ratio.asin();
            for theta in [th, std::f64::consts::PI - th] {
                let v = sol.interp(r, theta);
                min_u = min_u.min(v);
                max_u = max_u.max(v);
            }
        }
        worst = worst.max(max_u - min_u);
    }
    Ok(worst)
}

/// Sup over interior nodes with r ≤ R - 2 of |u(z) - U(t(z))|, with U given
/// by cubic interpolation of a signed-distance profile.
pub fn compare_with_profile(sol: &DiskSolution, profile: &Profile1D) -> Result<f64, DiskError> {
    let r_cap = sol.grid.r_trunc - 2.0;
    let (plo, phi) = profile.span();
    // t ranges over ±r_cap at most.
    if plo > -r_cap || phi < r_cap {
        return Err(DiskError::ProfileWindow((plo, phi), -r_cap, r_cap));
    }
    let mut worst: f64 = 0.0;
    let imax = (r_cap / sol.grid.dr()).floor() as usize;
    for i in 1..=imax.min(sol.grid.nr - 1) {
        let r = sol.grid.r(i);
        for j in 0..sol.grid.ntheta {
            let t = t_of_polar(r, sol.grid.theta(j));
            let d = (sol.value(i, j) - interp_cubic(&profile.grid, &profile.values, t)).abs();
            worst = worst.max(d);
        }
    }
    // Pole: t = 0.
    worst = worst.max((sol.pole - interp_cubic(&profile.grid, &profile.values, 0.0)).abs());
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PotentialSpec;

    fn params(k: f64) -> ProblemParams {
        ProblemParams::new(2, PotentialSpec::cubic(k).unwrap()).unwrap()
    }

    #[test]
    fn signed_distance_examples() {
        assert_eq!(signed_distance_t([0.0, 0.0]), 0.0);
        // z = (0, 0.5): sinh t = 1/0.75·... = 4/3, so t = ln 3.
        let t = signed_distance_t([0.0, 0.5]);
        assert!((t - (4.0f64 / 3.0).asinh()).abs() < 1e-14);
        assert!((t - 3.0f64.ln()).abs() < 1e-12);
        // Antipodal reflection flips the sign.
        assert_eq!(signed_distance_t([0.3, -0.4]), -signed_distance_t([0.3, 0.4]));
    }

    #[test]
    fn signed_distance_against_brute_force() {
        // Oracle: minimize the hyperbolic distance to points of P over a
        // dense sample of w = (w₁, 0).
        let dist = |z: [f64; 2], w: [f64; 2]| {
            let dz = (z[0] - w[0]) * (z[0] - w[0]) + (z[1] - w[1]) * (z[1] - w[1]);
            let den = (1.0 - z[0] * z[0] - z[1] * z[1]) * (1.0 - w[0] * w[0] - w[1] * w[1]);
            (1.0 + 2.0 * dz / den).acosh()
        };
        for z in [[0.0, 0.5], [0.3, 0.2], [-0.5, -0.6], [0.7, 0.1]] {
            let mut best = f64::INFINITY;
            for q in 0..20000 {
                let w1 = -0.9999 + 1.9998 * q as f64 / 19999.0;
                best = best.min(dist(z, [w1, 0.0]));
            }
            let t = signed_distance_t(z);
            assert!(
                (t.abs() - best).abs() < 1e-6,
                "z={z:?}: |t|={} vs brute-force {best}",
                t.abs()
            );
            assert_eq!(t.signum(), z[1].signum());
        }
    }

    #[test]
    fn polar_distance_consistency() {
        // t(r, θ) computed in polar coordinates matches the ball formula.
        for &(r, th) in &[(0.5, 0.3), (2.0, 1.2), (5.0, -0.7), (8.0, 2.9)] {
            let z = polar_to_ball(r, th);
            assert!((signed_distance_t(z) - t_of_polar(r, th)).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_boundary_gives_constant_solution() {
        let p = params(2.0 / 9.0);
        let grid = DiskGrid::new(8.0, 160, 64).unwrap();
        for c in [1.0, -1.0, 0.0] {
            let sol = solve_disk(&p, &BoundaryData::Constant(c), &grid, 1e-11).unwrap();
            assert_eq!(sol.newton_iterations, 0, "c={c}: corrections used");
            assert!(sol.values.iter().all(|&v| v == c));
            assert_eq!(sol.pole, c);
        }
    }

    #[test]
    fn step_data_solution_structure() {
        let p = params(2.0 / 9.0);
        let grid = DiskGrid::new(8.0, 200, 128).unwrap();
        let sol = solve_disk(&p, &BoundaryData::HhStep, &grid, 1e-10).unwrap();
        assert!(sol.residual_norm < 1e-10);
        // Interior strictly inside the wells and within the hull.
        assert!(sol.sup_abs() < 1.0);
        assert!(sol.within_hull(1e-8));
        // Odd symmetry across P: u(r, -θ) = -u(r, θ) approximately.
        let dev = (sol.interp(4.0, 1.0) + sol.interp(4.0, -1.0)).abs();
        assert!(dev < 1e-6, "odd-symmetry deviation {dev}");
        // u ≈ 0 along the geodesic P itself.
        let lvl0 = symmetry_deviation(&sol, &[0.0]).unwrap();
        assert!(lvl0 < 5e-3, "level-0 variation {lvl0}");
        let on_p = sol.interp(3.0, 0.0).abs().max(sol.interp(3.0, std::f64::consts::PI).abs());
        assert!(on_p < 5e-3, "|u| on P: {on_p}");
    }

    #[test]
    fn reflection_equivariance() {
        // Reflecting the boundary data θ ↦ -θ reflects the solution.
        let p = params(2.0 / 9.0);
        let grid = DiskGrid::new(8.0, 160, 128).unwrap();
        let sol = solve_disk(&p, &BoundaryData::HhStep, &grid, 1e-10).unwrap();
        let nt = grid.ntheta;
        let mut worst: f64 = 0.0;
        for i in 1..grid.nr {
            for j in 0..nt {
                let jr = (nt - j) % nt;
                worst = worst.max((sol.value(i, j) + sol.value(i, jr)).abs());
            }
        }
        // The smoothed step is exactly odd on the grid, so the discrete
        // solution is odd up to solver tolerance.
        assert!(worst < 1e-8, "reflection equivariance violation {worst}");
    }

    #[test]
    fn truncation_insensitivity_in_r() {
        let p = params(2.0 / 9.0);
        let g10 = DiskGrid::new(10.0, 250, 128).unwrap();
        let g14 = DiskGrid::new(14.0, 350, 128).unwrap();
        let s10 = solve_disk(&p, &BoundaryData::HhStep, &g10, 1e-10).unwrap();
        let s14 = solve_disk(&p, &BoundaryData::HhStep, &g14, 1e-10).unwrap();
        // Shared nodes: same Δr = 0.04, compare on r <= 6.
        let mut worst: f64 = 0.0;
        for i in 1..=150 {
            for j in 0..128 {
                worst = worst.max((s10.value(i, j) - s14.value(i, j)).abs());
            }
        }
        assert!(worst < 1e-3, "R-sensitivity {worst}");
    }

    #[test]
    fn empty_level_set_rejected() {
        let p = params(2.0 / 9.0);
        let grid = DiskGrid::new(8.0, 160, 64).unwrap();
        let sol = solve_disk(&p, &BoundaryData::Constant(0.0), &grid, 1e-11).unwrap();
        assert!(matches!(
            symmetry_deviation(&sol, &[7.5]),
            Err(DiskError::EmptyLevelSet(_))
        ));
    }

    #[test]
    fn zero_solution_matches_zero_profile() {
        let p = params(2.0 / 9.0);
        let grid = DiskGrid::new(8.0, 160, 64).unwrap();
        let sol = solve_disk(&p, &BoundaryData::Constant(0.0), &grid, 1e-11).unwrap();
        let tgrid: Vec<f64> = (0..=100).map(|i| -10.0 + 0.2 * i as f64).collect();
        let zeros = vec![0.0; tgrid.len()];
        let prof = Profile1D::new(
            crate::diagnostics::Chart::SignedDistT,
            tgrid.clone(),
            zeros.clone(),
            zeros,
            p.clone(),
        )
        .unwrap();
        assert_eq!(compare_with_profile(&sol, &prof).unwrap(), 0.0);
    }

    #[test]
    fn requires_n_two() {
        let p = ProblemParams::new(3, PotentialSpec::cubic(1.0).unwrap()).unwrap();
        let grid = DiskGrid::new(8.0, 160, 64).unwrap();
        assert!(matches!(
            solve_disk(&p, &BoundaryData::Constant(0.0), &grid, 1e-10),
            Err(DiskError::NotTwoDimensional(3))
        ));
    }
}
