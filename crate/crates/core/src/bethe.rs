//! Bethe equations of the XYZ chain and of the Gaudin model, Newton solvers,
//! and the eigenvalues predicted by the functional equations.
//!
//! Root sets are compared modulo permutations and shifts by 1. A shift of one
//! root by `tau` is not a symmetry at fixed `nu`: it maps a solution at `nu`
//! to one at `nu - 2`. [`canonical_form`] folds that into the pair `(nu, roots)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elliptic::{theta, theta11_log_derivative, theta_jet, ModulusContext, ThetaChar};
use crate::error::{Error, Result};
use crate::gaudin::GaudinSpec;
use crate::lattice::{delta_pm, ChainSpec, Site};
use crate::linalg::{condition_number, eigen_decomposition};
use crate::{CMatrix, CVector};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const PI: f64 = std::f64::consts::PI;

/// Which Bethe equations a solution solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Gaudin,
    Xyz,
}

/// A converged and verified root set.
#[derive(Clone, Debug, PartialEq)]
pub struct BetheSolution {
    pub model: Model,
    pub nu: i64,
    pub roots: Vec<Complex64>,
    /// Largest component of the verification residual.
    pub residual: f64,
    /// Condition number of the Newton Jacobian at the solution.
    pub jacobian_cond: f64,
    /// Anisotropy for XYZ solutions.
    pub eta: Option<Complex64>,
}

/// Solver settings; every random choice is driven by `seed`.
#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub starts: usize,
    pub seed: u64,
    pub tol: f64,
    pub collision_tol: f64,
    pub dedup_tol: f64,
    pub pole_exclusion: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
    pub homotopy_steps: usize,
    pub max_jacobian_cond: f64,
    /// Roots with `|Im w|` above this multiple of `Im tau` are rejected: far
    /// from the real axis the equations degenerate and Newton can stall there.
    pub max_root_height: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            starts: 64,
            seed: 1,
            tol: 1e-10,
            collision_tol: 1e-6,
            dedup_tol: 1e-7,
            pole_exclusion: 0.05,
            max_iter: 100,
            max_halvings: 40,
            homotopy_steps: 32,
            max_jacobian_cond: 1e12,
            max_root_height: 3.0,
        }
    }
}

fn rho(x: Complex64, ctx: &ModulusContext) -> Result<(Complex64, Complex64)> {
    theta11_log_derivative(x, ctx)
}

/// Gaudin Bethe equations: component `j` is
/// `sum_n ell_n rho(w_j - z_n) + pi i nu - sum_{k != j} rho(w_j - w_k)` with `rho = theta_11'/theta_11`.
pub fn gaudin_residual(roots: &[Complex64], nu: i64, spec: &GaudinSpec) -> Result<CVector> {
    Ok(gaudin_system(roots, nu, spec.sites(), spec.ctx())?.0)
}

fn gaudin_system(roots: &[Complex64], nu: i64, sites: &[Site], ctx: &ModulusContext) -> Result<(CVector, CMatrix)> {
    let m = roots.len();
    let mut f = CVector::from_element(m, I * (PI * nu as f64));
    let mut jac = CMatrix::zeros(m, m);
    for j in 0..m {
        for site in sites {
            let (r, dr) = rho(roots[j] - site.z, ctx)?;
            f[j] += r * site.spin.ell();
            jac[(j, j)] += dr * site.spin.ell();
        }
        for k in 0..m {
            if k == j {
                continue;
            }
            let (r, dr) = rho(roots[j] - roots[k], ctx)?;
            f[j] -= r;
            jac[(j, j)] -= dr;
            jac[(j, k)] += dr;
        }
    }
    Ok((f, jac))
}

/// Ratio form of the XYZ Bethe equations, `LHS_j / RHS_j` with
/// `LHS_j = Delta_+(w_j) / Delta_-(w_j)` and
/// `RHS_j = exp(-4 pi i nu eta) prod_{k != j} theta_11(w_j - w_k + 2 eta) / theta_11(w_j - w_k - 2 eta)`.
fn xyz_sides(roots: &[Complex64], nu: i64, spec: &ChainSpec) -> Result<Vec<(Complex64, Complex64)>> {
    let ctx = spec.ctx();
    let eta = spec.eta();
    let mut out = Vec::with_capacity(roots.len());
    for (j, &w) in roots.iter().enumerate() {
        let dm = delta_pm(-1, w, spec.sites(), eta, ctx)?;
        if dm.norm() < 1e-300 {
            return Err(Error::Pole { what: "Delta_- vanishes at a root", at: w, guard: 0.0 });
        }
        let lhs = delta_pm(1, w, spec.sites(), eta, ctx)? / dm;
        let mut rhs = (-I * (4.0 * PI * nu as f64) * eta).exp();
        for (k, &wk) in roots.iter().enumerate() {
            if k == j {
                continue;
            }
            let x = w - wk;
            let den = theta(ThetaChar::C11, x - eta * 2.0, ctx);
            if den.norm() < 1e-300 {
                return Err(Error::Pole { what: "xyz Bethe equation", at: x, guard: 0.0 });
            }
            rhs *= theta(ThetaChar::C11, x + eta * 2.0, ctx) / den;
        }
        out.push((lhs, rhs));
    }
    Ok(out)
}

/// XYZ Bethe equations as `(LHS_j - RHS_j) / |RHS_j|`.
pub fn xyz_residual(roots: &[Complex64], nu: i64, spec: &ChainSpec) -> Result<CVector> {
    let sides = xyz_sides(roots, nu, spec)?;
    Ok(CVector::from_iterator(sides.len(), sides.iter().map(|(l, r)| (l - r) / r.norm())))
}

// log(LHS_j / RHS_j) / (4 eta): tends to the Gaudin residual as eta -> 0.
fn xyz_system(roots: &[Complex64], nu: i64, spec: &ChainSpec) -> Result<(CVector, CMatrix)> {
    let ctx = spec.ctx();
    let eta = spec.eta();
    let m = roots.len();
    let scale = eta * 4.0;
    let sides = xyz_sides(roots, nu, spec)?;
    let f = CVector::from_iterator(m, sides.iter().map(|(l, r)| (l / r).ln() / scale));
    let mut jac = CMatrix::zeros(m, m);
    for j in 0..m {
        for site in spec.sites() {
            let shift = eta * site.spin.twice() as f64;
            let x = roots[j] - site.z;
            jac[(j, j)] += rho(x + shift, ctx)?.0 - rho(x - shift, ctx)?.0;
        }
        for k in 0..m {
            if k == j {
                continue;
            }
            let x = roots[j] - roots[k];
            let d = rho(x + eta * 2.0, ctx)?.0 - rho(x - eta * 2.0, ctx)?.0;
            jac[(j, j)] -= d;
            jac[(j, k)] += d;
        }
    }
    Ok((f, jac / scale))
}

/// Outcome of a damped Newton run.
#[derive(Clone, Debug)]
pub struct NewtonResult {
    pub roots: Vec<Complex64>,
    pub residual: f64,
    pub jacobian_cond: f64,
    pub iterations: usize,
}

// NaN-propagating maximum, so that a non-finite entry never reads as small.
fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, x| if x.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(x) })
}

fn max_abs(v: &CVector) -> f64 {
    worst(v.iter().map(|x| x.norm()))
}

/// Damped Newton iteration for an analytic system `F(w) = 0` with Jacobian.
pub fn newton<F>(system: F, start: &[Complex64], opts: &SolverOptions) -> Result<NewtonResult>
where
    F: Fn(&[Complex64]) -> Result<(CVector, CMatrix)>,
{
    let mut w = start.to_vec();
    let (mut f, mut jac) = system(&w)?;
    let mut norm = max_abs(&f);
    for iter in 0..opts.max_iter {
        if norm < opts.tol * 1e-3 {
            return Ok(NewtonResult { jacobian_cond: condition_number(&jac), roots: w, residual: norm, iterations: iter });
        }
        let step = jac.clone().lu().solve(&(-&f)).ok_or(Error::Singular { what: "Newton Jacobian" })?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<Complex64> = w.iter().zip(step.iter()).map(|(x, d)| x + d * t).collect();
            if let Ok((ft, jt)) = system(&trial) {
                let nt = max_abs(&ft);
                if nt.is_finite() && nt < norm {
                    w = trial;
                    f = ft;
                    jac = jt;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm < opts.tol {
        Ok(NewtonResult { jacobian_cond: condition_number(&jac), roots: w, residual: norm, iterations: opts.max_iter })
    } else {
        Err(Error::NoConvergence { what: "Newton" })
    }
}

/// Distance modulo the period lattice.
fn lattice_gap(a: Complex64, b: Complex64, ctx: &ModulusContext) -> f64 {
    ctx.lattice_distance(a - b)
}

fn admissible(roots: &[Complex64], sites: &[Site], ctx: &ModulusContext, opts: &SolverOptions) -> bool {
    let height = opts.max_root_height * ctx.tau().im;
    roots.iter().all(|w| w.re.is_finite() && w.im.abs() <= height) && !collides(roots, sites, ctx, opts.collision_tol)
}

fn collides(roots: &[Complex64], sites: &[Site], ctx: &ModulusContext, tol: f64) -> bool {
    for (j, &w) in roots.iter().enumerate() {
        if sites.iter().any(|s| lattice_gap(w, s.z, ctx) <= tol) {
            return true;
        }
        if roots[j + 1..].iter().any(|&v| lattice_gap(w, v, ctx) <= tol) {
            return true;
        }
    }
    false
}

/// Distance modulo shifts by 1.
fn gap_mod_one(a: Complex64, b: Complex64) -> f64 {
    let d = a - b;
    Complex64::new(d.re - d.re.round(), d.im).norm()
}

/// True when the two root sets agree up to permutation and shifts by 1.
pub fn same_roots(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    for &x in a {
        match (0..b.len()).find(|&k| !used[k] && gap_mod_one(x, b[k]) < tol) {
            Some(k) => used[k] = true,
            None => return false,
        }
    }
    true
}

/// Representative of `(nu, roots)`: every root moved into
/// `-1/2 <= Re < 1/2`, `0 <= Im < Im tau` (along `tau`). Moving a root down by
/// `tau` lowers `nu` by 2.
pub fn canonical_form(nu: i64, roots: &[Complex64], ctx: &ModulusContext) -> (i64, Vec<Complex64>) {
    let tau = ctx.tau();
    let mut nu = nu;
    let mut out: Vec<Complex64> = roots
        .iter()
        .map(|&w| {
            // roots on the cell edge sit a rounding error below it
            let k = (w.im / tau.im + 1e-9).floor();
            nu -= 2 * k as i64;
            let x = w - tau * k;
            Complex64::new(x.re - (x.re + 0.5).floor(), x.im)
        })
        .collect();
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    (nu, out)
}

fn random_start(
    rng: &mut ChaCha8Rng,
    m: usize,
    sites: &[Site],
    ctx: &ModulusContext,
    exclusion: f64,
) -> Vec<Complex64> {
    let mut roots: Vec<Complex64> = Vec::with_capacity(m);
    while roots.len() < m {
        let s: f64 = rng.random_range(-0.5..0.5);
        let t: f64 = rng.random_range(0.0..1.0);
        let w = ctx.tau() * t + s;
        let clear = sites.iter().all(|site| lattice_gap(w, site.z, ctx) > exclusion)
            && roots.iter().all(|&v| lattice_gap(w, v, ctx) > exclusion);
        if clear {
            roots.push(w);
        }
    }
    roots
}

fn push_unique(found: &mut Vec<BetheSolution>, sol: BetheSolution, tol: f64) {
    if !found.iter().any(|s| s.nu == sol.nu && same_roots(&s.roots, &sol.roots, tol)) {
        found.push(sol);
    }
}

fn sort_solutions(found: &mut [BetheSolution]) {
    found.sort_by(|a, b| {
        a.nu.cmp(&b.nu).then_with(|| {
            for (x, y) in a.roots.iter().zip(&b.roots) {
                let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
                if o != std::cmp::Ordering::Equal {
                    return o;
                }
            }
            std::cmp::Ordering::Equal
        })
    });
}

fn finalize_roots(mut roots: Vec<Complex64>) -> Vec<Complex64> {
    for w in roots.iter_mut() {
        *w = Complex64::new(w.re - (w.re + 0.5).floor(), w.im);
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

/// Multistart Newton for the Gaudin Bethe equations at fixed `nu` with `M` roots.
pub fn solve_gaudin(spec: &GaudinSpec, nu: i64, m: usize, opts: &SolverOptions) -> Result<Vec<BetheSolution>> {
    let ctx = spec.ctx();
    let sites = spec.sites();
    if m == 0 {
        return Ok(vec![BetheSolution {
            model: Model::Gaudin,
            nu,
            roots: vec![],
            residual: 0.0,
            jacobian_cond: 1.0,
            eta: None,
        }]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (nu as u64).wrapping_mul(0xA24B_AED4_963E_E407));
    let mut found = Vec::new();
    for _ in 0..opts.starts {
        let start = random_start(&mut rng, m, sites, ctx, opts.pole_exclusion);
        let Ok(res) = newton(|w| gaudin_system(w, nu, sites, ctx), &start, opts) else {
            continue;
        };
        if !admissible(&res.roots, sites, ctx, opts) || !(res.jacobian_cond < opts.max_jacobian_cond) {
            continue;
        }
        let roots = finalize_roots(res.roots);
        let residual = match gaudin_residual(&roots, nu, spec) {
            Ok(r) => max_abs(&r),
            Err(_) => continue,
        };
        if residual < opts.tol {
            let sol = BetheSolution {
                model: Model::Gaudin,
                nu,
                roots,
                residual,
                jacobian_cond: res.jacobian_cond,
                eta: None,
            };
            push_unique(&mut found, sol, opts.dedup_tol);
        }
    }
    sort_solutions(&mut found);
    Ok(found)
}

/// Solutions over a range of `nu`, dropping those equivalent (by [`canonical_form`])
/// to one already found at an earlier `nu` of the scan.
pub fn solve_gaudin_scan(spec: &GaudinSpec, nus: &[i64], m: usize, opts: &SolverOptions) -> Result<Vec<BetheSolution>> {
    let mut out: Vec<BetheSolution> = Vec::new();
    let mut seen: Vec<(i64, Vec<Complex64>)> = Vec::new();
    for &nu in nus {
        for sol in solve_gaudin(spec, nu, m, opts)? {
            let canon = canonical_form(sol.nu, &sol.roots, spec.ctx());
            if seen.iter().any(|(n, r)| *n == canon.0 && same_roots(r, &canon.1, opts.dedup_tol * 10.0)) {
                continue;
            }
            // report the cell representative when its nu is in the scan
            let sol = if nus.contains(&canon.0) {
                BetheSolution { nu: canon.0, roots: canon.1.clone(), ..sol }
            } else {
                sol
            };
            seen.push(canon);
            out.push(sol);
        }
    }
    Ok(out)
}

fn xyz_newton(spec: &ChainSpec, nu: i64, start: &[Complex64], opts: &SolverOptions) -> Result<NewtonResult> {
    newton(|w| xyz_system(w, nu, spec), start, opts)
}

fn verify_xyz(spec: &ChainSpec, nu: i64, res: NewtonResult, opts: &SolverOptions) -> Option<BetheSolution> {
    if !admissible(&res.roots, spec.sites(), spec.ctx(), opts) || !(res.jacobian_cond < opts.max_jacobian_cond) {
        return None;
    }
    let roots = finalize_roots(res.roots);
    let residual = max_abs(&xyz_residual(&roots, nu, spec).ok()?);
    (residual < opts.tol).then(|| BetheSolution {
        model: Model::Xyz,
        nu,
        roots,
        residual,
        jacobian_cond: res.jacobian_cond,
        eta: Some(spec.eta()),
    })
}

/// Continues a Gaudin solution in `eta` from 0 to the chain's `eta`.
pub fn continue_from_gaudin(spec: &ChainSpec, seed: &BetheSolution, opts: &SolverOptions) -> Result<BetheSolution> {
    let steps = opts.homotopy_steps.max(1);
    let mut roots = seed.roots.clone();
    for k in 1..=steps {
        let eta = spec.eta() * (k as f64 / steps as f64);
        let res = xyz_newton(&spec.with_eta(eta), seed.nu, &roots, opts)?;
        roots = res.roots;
    }
    let res = xyz_newton(spec, seed.nu, &roots, opts)?;
    verify_xyz(spec, seed.nu, res, opts).ok_or(Error::NoConvergence { what: "xyz homotopy" })
}

/// Solutions of the XYZ Bethe equations at fixed `nu`: continuation from the
/// given (or freshly computed) Gaudin solutions, multistart if that finds nothing.
pub fn solve_xyz(
    spec: &ChainSpec,
    nu: i64,
    m: usize,
    seeds: Option<&[BetheSolution]>,
    opts: &SolverOptions,
) -> Result<Vec<BetheSolution>> {
    let gaudin_spec = GaudinSpec::from(spec);
    let computed;
    let seeds = match seeds {
        Some(s) => s,
        None => {
            computed = solve_gaudin(&gaudin_spec, nu, m, opts)?;
            &computed
        }
    };
    let mut found = Vec::new();
    for seed in seeds.iter().filter(|s| s.nu == nu && s.roots.len() == m) {
        if let Ok(sol) = continue_from_gaudin(spec, seed, opts) {
            push_unique(&mut found, sol, opts.dedup_tol);
        }
    }
    if found.is_empty() && m > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5851_F42D_4C95_7F2D ^ (nu as u64));
        for _ in 0..opts.starts {
            let start = random_start(&mut rng, m, spec.sites(), spec.ctx(), opts.pole_exclusion);
            if let Some(sol) = xyz_newton(spec, nu, &start, opts).ok().and_then(|r| verify_xyz(spec, nu, r, opts)) {
                push_unique(&mut found, sol, opts.dedup_tol);
            }
        }
    }
    sort_solutions(&mut found);
    Ok(found)
}

/// `q(u) = exp(-pi i nu u) prod_m theta_11(u - w_m)` with its first two derivatives.
pub fn q_jet(u: Complex64, roots: &[Complex64], nu: i64, ctx: &ModulusContext) -> [Complex64; 3] {
    let s = -I * (PI * nu as f64);
    let e = (s * u).exp();
    // running product (p, p', p'')
    let mut p = [e, e * s, e * s * s];
    for &w in roots {
        let t = theta_jet(ThetaChar::C11, u - w, ctx);
        p = [p[0] * t[0], p[1] * t[0] + p[0] * t[1], p[2] * t[0] + p[1] * t[1] * 2.0 + p[0] * t[2]];
    }
    p
}

/// `Z(u) = sum_n ell_n rho(u - z_n)` and its derivative.
pub fn z_function(u: Complex64, sites: &[Site], ctx: &ModulusContext) -> Result<(Complex64, Complex64)> {
    let mut z = Complex64::new(0.0, 0.0);
    let mut dz = Complex64::new(0.0, 0.0);
    for site in sites {
        let (r, dr) = rho(u - site.z, ctx)?;
        z += r * site.spin.ell();
        dz += dr * site.spin.ell();
    }
    Ok((z, dz))
}

/// `chi(u) = q'(u)/q(u) = -pi i nu + sum_m rho(u - w_m)` and its derivative.
pub fn chi_function(u: Complex64, roots: &[Complex64], nu: i64, ctx: &ModulusContext) -> Result<(Complex64, Complex64)> {
    let mut chi = -I * (PI * nu as f64);
    let mut dchi = Complex64::new(0.0, 0.0);
    for &w in roots {
        let (r, dr) = rho(u - w, ctx)?;
        chi += r;
        dchi += dr;
    }
    Ok((chi, dchi))
}

/// `tau(u) = (chi - Z)^2 + (chi - Z)'`.
pub fn gaudin_eigenvalue(u: Complex64, sol: &BetheSolution, spec: &GaudinSpec) -> Result<Complex64> {
    let (chi, dchi) = chi_function(u, &sol.roots, sol.nu, spec.ctx())?;
    let (z, dz) = z_function(u, spec.sites(), spec.ctx())?;
    Ok((chi - z) * (chi - z) + dchi - dz)
}

/// Relative residual of `q'' - 2 Z q' + (Z^2 - Z') q = tau q`, with `q` and
/// its derivatives evaluated directly from theta series.
pub fn gaudin_functional_residual(u: Complex64, sol: &BetheSolution, spec: &GaudinSpec) -> Result<f64> {
    let [q, dq, ddq] = q_jet(u, &sol.roots, sol.nu, spec.ctx());
    let (z, dz) = z_function(u, spec.sites(), spec.ctx())?;
    let tau = gaudin_eigenvalue(u, sol, spec)?;
    let terms = [ddq, dq * z * 2.0, (z * z - dz) * q, tau * q];
    let scale = terms.iter().map(|t| t.norm()).fold(f64::MIN_POSITIVE, f64::max);
    Ok((ddq - dq * z * 2.0 + (z * z - dz) * q - tau * q).norm() / scale)
}

/// `t(u) = [Delta_+(u) q(u - 2 eta) + Delta_-(u) q(u + 2 eta)] / q(u)`.
pub fn xyz_eigenvalue(u: Complex64, sol: &BetheSolution, spec: &ChainSpec) -> Result<Complex64> {
    let (plus, minus, q) = xyz_terms(u, sol, spec)?;
    Ok((plus + minus) / q)
}

fn xyz_terms(u: Complex64, sol: &BetheSolution, spec: &ChainSpec) -> Result<(Complex64, Complex64, Complex64)> {
    let ctx = spec.ctx();
    let eta = spec.eta();
    let q = |x: Complex64| q_jet(x, &sol.roots, sol.nu, ctx)[0];
    let plus = delta_pm(1, u, spec.sites(), eta, ctx)? * q(u - eta * 2.0);
    let minus = delta_pm(-1, u, spec.sites(), eta, ctx)? * q(u + eta * 2.0);
    Ok((plus, minus, q(u)))
}

/// Pseudo-random probe points in the fundamental cell, at distance greater
/// than `exclusion` from every site (mod the lattice) and from each other.
pub fn probe_points(sites: &[Site], ctx: &ModulusContext, seed: u64, count: usize, exclusion: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Complex64> = Vec::with_capacity(count);
    while out.len() < count {
        let s: f64 = rng.random_range(-0.5..0.5);
        let t: f64 = rng.random_range(0.05..0.95);
        let u = ctx.tau() * t + s;
        let clear = sites.iter().all(|site| lattice_gap(u, site.z, ctx) > exclusion)
            && out.iter().all(|&v| lattice_gap(u, v, ctx) > exclusion);
        if clear {
            out.push(u);
        }
    }
    out
}

/// Eigenvalue curves of a commuting family sampled at probe points.
///
/// A generic combination of the sampled operators is diagonalized once; the
/// curve of each eigenvector is its Rayleigh quotient at every probe.
#[derive(Clone, Debug)]
pub struct SpectralCurves {
    pub probes: Vec<Complex64>,
    /// `values[slot][probe]`.
    pub values: Vec<Vec<Complex64>>,
    pub vectors: Vec<CVector>,
    /// Largest `|X v - lambda v| / |X|` over slots and probes.
    pub eigen_residual: f64,
}

impl SpectralCurves {
    pub fn new(probes: Vec<Complex64>, ops: &[CMatrix], seed: u64) -> Result<Self> {
        let n = ops[0].nrows();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut combo = CMatrix::zeros(n, n);
        for op in ops {
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            combo += op * (c / op.norm().max(f64::MIN_POSITIVE));
        }
        let mut vectors = Vec::with_capacity(n);
        for (_, vs) in eigen_decomposition(&combo, 1e-9)? {
            vectors.extend(vs);
        }
        let mut values = Vec::with_capacity(vectors.len());
        let mut eigen_residual: f64 = 0.0;
        for v in &vectors {
            let mut curve = Vec::with_capacity(ops.len());
            for op in ops {
                let xv = op * v;
                let lambda = v.dotc(&xv) / v.dotc(v);
                eigen_residual = eigen_residual.max((xv - v * lambda).norm() / (op.norm() * v.norm()).max(f64::MIN_POSITIVE));
                curve.push(lambda);
            }
            values.push(curve);
        }
        Ok(SpectralCurves { probes, values, vectors, eigen_residual })
    }

    /// Slot whose curve is closest (in max relative error over probes) to `curve`.
    pub fn best_match(&self, curve: &[Complex64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (slot, values) in self.values.iter().enumerate() {
            let err = worst(values.iter().zip(curve).map(|(a, b)| (a - b).norm() / a.norm().max(1.0)));
            if err < best.1 {
                best = (slot, err);
            }
        }
        best
    }

    /// Distinct curves (up to `tol`), in slot order.
    pub fn distinct_curves(&self, tol: f64) -> usize {
        let mut reps: Vec<&Vec<Complex64>> = Vec::new();
        for c in &self.values {
            let dup = reps.iter().any(|r| {
                r.iter().zip(c.iter()).all(|(a, b)| (a - b).norm() / a.norm().max(1.0) < tol)
            });
            if !dup {
                reps.push(c);
            }
        }
        reps.len()
    }
}

/// Result of matching a solution's eigenvalue curve against exact diagonalization.
#[derive(Clone, Debug)]
pub struct EigenvalueMatch {
    pub slot: usize,
    /// Max relative distance between the predicted curve and the slot's curve.
    pub mismatch: f64,
    /// Max functional-equation residual over the probes.
    pub functional_residual: f64,
}

/// Matches a Gaudin solution against `tau_hat` curves.
pub fn match_gaudin(sol: &BetheSolution, spec: &GaudinSpec, curves: &SpectralCurves) -> Result<EigenvalueMatch> {
    let predicted: Vec<Complex64> =
        curves.probes.iter().map(|&u| gaudin_eigenvalue(u, sol, spec)).collect::<Result<_>>()?;
    let functional_residual =
        worst(curves.probes.iter().map(|&u| gaudin_functional_residual(u, sol, spec)).collect::<Result<Vec<_>>>()?);
    let (slot, mismatch) = curves.best_match(&predicted);
    Ok(EigenvalueMatch { slot, mismatch, functional_residual })
}

/// Relative residual of `t(u) q(u) = Delta_+(u) q(u - 2 eta) + Delta_-(u) q(u + 2 eta)`
/// with `t(u)` taken from the closest transfer-matrix eigenvalue at `u`.
pub fn xyz_eigenvalue_check(u: Complex64, sol: &BetheSolution, spec: &ChainSpec, transfer: &CMatrix) -> Result<f64> {
    let (plus, minus, q) = xyz_terms(u, sol, spec)?;
    let scale = plus.norm().max(minus.norm()).max(f64::MIN_POSITIVE);
    let values = crate::linalg::eigenvalues(transfer)?;
    let best = values.iter().map(|t| (t * q - plus - minus).norm() / scale).fold(f64::INFINITY, f64::min);
    Ok(if best.is_finite() { best } else { f64::INFINITY })
}

/// Matches an XYZ solution against transfer-matrix curves.
pub fn match_xyz(sol: &BetheSolution, spec: &ChainSpec, curves: &SpectralCurves) -> Result<EigenvalueMatch> {
    let predicted: Vec<Complex64> = curves.probes.iter().map(|&u| xyz_eigenvalue(u, sol, spec)).collect::<Result<_>>()?;
    let (slot, mismatch) = curves.best_match(&predicted);
    let mut functional_residual: f64 = 0.0;
    for (&u, &t) in curves.probes.iter().zip(&curves.values[slot]) {
        let (plus, minus, q) = xyz_terms(u, sol, spec)?;
        let scale = plus.norm().max(minus.norm()).max(f64::MIN_POSITIVE);
        functional_residual = worst([functional_residual, (t * q - plus - minus).norm() / scale]);
    }
    Ok(EigenvalueMatch { slot, mismatch, functional_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::theta_deriv;
    use crate::gaudin::GaudinModel;
    use crate::sklyanin::Spin;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn desk() -> GaudinSpec {
        let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
        GaudinSpec::new(vec![Site::new(Spin::HALF, c(0.13, 0.0)), Site::new(Spin::HALF, c(-0.21, 0.0))], ctx).unwrap()
    }

    #[test]
    fn symmetric_root_solves_gaudin() {
        let spec = desk();
        let r = gaudin_residual(&[c(-0.04, 0.0)], 0, &spec).unwrap();
        assert!(r[0].norm() < 1e-13);
    }

    #[test]
    fn gaudin_residual_by_composition() {
        let spec = desk();
        let ctx = spec.ctx();
        let roots = [c(0.3, 0.4), c(-0.1, 0.2)];
        let r = gaudin_residual(&roots, 1, &spec).unwrap();
        let rho = |x: Complex64| theta_deriv(ThetaChar::C11, 1, x, ctx).unwrap() / theta(ThetaChar::C11, x, ctx);
        let expected = rho(roots[0] - c(0.13, 0.0)) * 0.5 + rho(roots[0] - c(-0.21, 0.0)) * 0.5 + I * PI
            - rho(roots[0] - roots[1]);
        assert!((r[0] - expected).norm() < 1e-12);
        let shift = c(0.07, 0.05);
        let moved = GaudinSpec::new(
            spec.sites().iter().map(|s| Site::new(s.spin, s.z + shift)).collect(),
            ctx.clone(),
        )
        .unwrap();
        let r2 = gaudin_residual(&[roots[0] + shift, roots[1] + shift], 1, &moved).unwrap();
        assert!((r - r2).norm() < 1e-12);
    }

    #[test]
    fn xyz_log_form_tends_to_gaudin() {
        let spec = desk();
        let roots = [c(0.3, 0.4), c(-0.1, 0.2)];
        let g = gaudin_residual(&roots, 1, &spec).unwrap();
        let mut errs = vec![];
        let etas = [1e-2, 5e-3, 2.5e-3];
        for &e in &etas {
            let chain = spec.chain_spec(c(e, 0.0)).unwrap();
            let (f, _) = xyz_system(&roots, 1, &chain).unwrap();
            errs.push((f - &g).norm());
        }
        assert!(crate::linalg::loglog_slope(&etas, &errs) > 0.9);
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let spec = desk();
        let chain = spec.chain_spec(c(0.1, 0.0)).unwrap();
        let roots = vec![c(0.3, 0.4), c(-0.1, 0.2)];
        let h = 1e-6;
        for which in 0..2 {
            let (f, jac) = if which == 0 {
                gaudin_system(&roots, 1, spec.sites(), spec.ctx()).unwrap()
            } else {
                xyz_system(&roots, 1, &chain).unwrap()
            };
            for k in 0..2 {
                let mut moved = roots.clone();
                moved[k] += h;
                let (f2, _) = if which == 0 {
                    gaudin_system(&moved, 1, spec.sites(), spec.ctx()).unwrap()
                } else {
                    xyz_system(&moved, 1, &chain).unwrap()
                };
                let fd = (f2 - &f) / c(h, 0.0);
                assert!((fd - jac.column(k)).norm() < 1e-4, "model {which} column {k}");
            }
        }
    }

    #[test]
    fn solver_finds_symmetric_root() {
        let spec = desk();
        let sols = solve_gaudin(&spec, 0, 1, &SolverOptions::default()).unwrap();
        assert!(sols.iter().any(|s| gap_mod_one(s.roots[0], c(-0.04, 0.0)) < 1e-8));
        for s in &sols {
            assert!(s.residual < 1e-10);
        }
    }

    #[test]
    fn canonical_form_shifts_nu() {
        let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
        let (nu, roots) = canonical_form(0, &[c(1.3, 1.2)], &ctx);
        assert_eq!(nu, -2);
        assert!((roots[0] - c(0.3, 0.2)).norm() < 1e-14);
        // the pair (0, w + tau) solves the same equations as (-2, w)
        let spec = desk();
        let w = c(0.2, 0.3);
        let a = gaudin_residual(&[w + c(0.0, 1.0)], 0, &spec).unwrap();
        let b = gaudin_residual(&[w], -2, &spec).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn functional_equation_and_q_periodicity() {
        let spec = desk();
        let sol = BetheSolution { model: Model::Gaudin, nu: 0, roots: vec![c(-0.04, 0.0)], residual: 0.0, jacobian_cond: 1.0, eta: None };
        for u in probe_points(spec.sites(), spec.ctx(), 3, 10, 0.1) {
            assert!(gaudin_functional_residual(u, &sol, &spec).unwrap() < 1e-8);
        }
        let u = c(0.31, 0.2);
        let m = sol.roots.len() as i32;
        let nu = 3;
        let q0 = q_jet(u, &sol.roots, nu, spec.ctx())[0];
        let q1 = q_jet(u + 1.0, &sol.roots, nu, spec.ctx())[0];
        let factor = (-I * (PI * nu as f64)).exp() * (-1.0f64).powi(m);
        assert!((q1 - q0 * factor).norm() < 1e-12 * q0.norm());
    }

    #[test]
    fn eigenvalue_double_pole_is_casimir() {
        // tau(u) - ell(ell+1) p(u - z) keeps only the simple pole h / (u - z)
        let spec = desk();
        let sol = BetheSolution { model: Model::Gaudin, nu: 0, roots: vec![c(-0.04, 0.0)], residual: 0.0, jacobian_cond: 1.0, eta: None };
        let z = c(0.13, 0.0);
        let residues: Vec<Complex64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&d| {
                let x = c(d, d);
                let tau = gaudin_eigenvalue(z + x, &sol, &spec).unwrap();
                let p = crate::elliptic::weierstrass_p(x, spec.ctx()).unwrap();
                (tau - p * 0.75) * x
            })
            .collect();
        assert!((residues[1] - residues[2]).norm() < 1e-2 * residues[2].norm().max(1.0));
        assert!((residues[0] - residues[2]).norm() < 1e-1 * residues[2].norm().max(1.0));
    }

    #[test]
    fn desk_spectrum_is_matched() {
        let spec = desk();
        let model = GaudinModel::standard(spec.clone());
        let probes = probe_points(spec.sites(), spec.ctx(), 7, 10, 0.1);
        let ops: Vec<CMatrix> = probes.iter().map(|&u| model.tau_hat(u).unwrap()).collect();
        let curves = SpectralCurves::new(probes, &ops, 1).unwrap();
        assert!(curves.eigen_residual < 1e-10);
        let sol = BetheSolution { model: Model::Gaudin, nu: 0, roots: vec![c(-0.04, 0.0)], residual: 0.0, jacobian_cond: 1.0, eta: None };
        let m = match_gaudin(&sol, &spec, &curves).unwrap();
        assert!(m.mismatch < 1e-8, "{m:?}");
    }
}
