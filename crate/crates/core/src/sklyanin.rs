//! Spin-`ell` representations of the Sklyanin algebra as explicit matrices.
//!
//! The representation space is the `(2 ell + 1)`-dimensional space of even
//! theta functions `f(z)` with `f(z + 1) = f(-z) = f(z)` and
//! `f(z + tau) = exp(-4 ell pi i (2z + tau)) f(z)`. The generators act as
//! difference operators
//!
//! ```text
//! (S^a f)(z) = [s_a(z - ell eta) f(z + eta) - s_a(-z - ell eta) f(z - eta)] / theta_11(2z),
//! ```
//!
//! and their matrices are read off by interpolation: the images of the basis
//! functions are sampled at the basis sample points and solved against the
//! evaluation (Gram) matrix.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elliptic::{theta, theta_jet, ModulusContext, ThetaChar, POLE_GUARD};
use crate::error::{Error, Result};
use crate::linalg::{anticommutator, commutator, condition_number};
use crate::{CMatrix, CVector};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Condition-number ceiling for the Gram matrix of a basis.
pub const DEFAULT_COND_BOUND: f64 = 1e6;
/// Relative residual allowed when a function is expanded in the basis.
pub const INTERPOLATION_TOL: f64 = 1e-9;

const MIN_SEPARATION: f64 = 0.05;
const MAX_RESEEDS: usize = 64;
const CHECK_POINTS: usize = 3;

/// Spin stored as the integer `2 ell`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin(u32);

impl Spin {
    pub fn from_twice(two_ell: i64) -> Result<Self> {
        if !(0..=64).contains(&two_ell) {
            return Err(Error::InvalidSpin(two_ell));
        }
        Ok(Spin(two_ell as u32))
    }

    pub const HALF: Spin = Spin(1);
    pub const ONE: Spin = Spin(2);

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn ell(self) -> f64 {
        self.0 as f64 * 0.5
    }

    /// `ell (ell + 1)`.
    pub fn casimir(self) -> f64 {
        self.ell() * (self.ell() + 1.0)
    }

    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }
}

/// A basis of the theta-function space carrying the spin-`ell` representation.
///
/// Basis function `k` is `prod_j theta_10(z + c_kj) theta_10(z - c_kj)` over
/// `2 ell` seeded shifts `c_kj`.
#[derive(Clone, Debug)]
pub struct ThetaBasis {
    spin: Spin,
    shifts: Vec<Vec<Complex64>>,
    sample_points: Vec<Complex64>,
    check_points: Vec<Complex64>,
    gram: CMatrix,
    gram_inverse: CMatrix,
    condition: f64,
    cond_bound: f64,
    ctx: ModulusContext,
}

fn random_cell_point(rng: &mut ChaCha8Rng, ctx: &ModulusContext) -> Complex64 {
    let s: f64 = rng.random_range(-0.5..0.5);
    let t: f64 = rng.random_range(0.0..1.0);
    ctx.tau() * t + s
}

// Far from the zeros of theta_11(2z), i.e. from the half-lattice.
fn clear_of_half_lattice(z: Complex64, ctx: &ModulusContext) -> bool {
    ctx.lattice_distance(z * 2.0) > 2.0 * MIN_SEPARATION
}

impl ThetaBasis {
    /// Seeded construction with the default condition bound.
    pub fn build(spin: Spin, ctx: &ModulusContext, seed: u64) -> Result<Self> {
        Self::build_with_bound(spin, ctx, seed, DEFAULT_COND_BOUND)
    }

    pub fn build_with_bound(spin: Spin, ctx: &ModulusContext, seed: u64, cond_bound: f64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..MAX_RESEEDS {
            if let Some(basis) = Self::attempt(spin, ctx, &mut rng, cond_bound) {
                return Ok(basis);
            }
        }
        Err(Error::BasisConditioning { two_ell: spin.twice(), attempts: MAX_RESEEDS })
    }

    fn attempt(spin: Spin, ctx: &ModulusContext, rng: &mut ChaCha8Rng, cond_bound: f64) -> Option<Self> {
        let dim = spin.dim();
        let shifts: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| (0..spin.twice()).map(|_| random_cell_point(rng, ctx)).collect())
            .collect();
        let mut points: Vec<Complex64> = Vec::with_capacity(dim + CHECK_POINTS);
        let mut tries = 0;
        while points.len() < dim + CHECK_POINTS {
            tries += 1;
            if tries > 10_000 {
                return None;
            }
            let z = random_cell_point(rng, ctx);
            let separated = points.iter().all(|p| {
                ctx.lattice_distance(z - p) > MIN_SEPARATION && ctx.lattice_distance(z + p) > MIN_SEPARATION
            });
            if clear_of_half_lattice(z, ctx) && separated {
                points.push(z);
            }
        }
        let check_points = points.split_off(dim);
        let mut basis = ThetaBasis {
            spin,
            shifts,
            sample_points: points,
            check_points,
            gram: CMatrix::zeros(dim, dim),
            gram_inverse: CMatrix::zeros(dim, dim),
            condition: f64::INFINITY,
            cond_bound,
            ctx: ctx.clone(),
        };
        basis.gram = CMatrix::from_fn(dim, dim, |j, k| basis.eval(k, basis.sample_points[j]));
        basis.condition = condition_number(&basis.gram);
        if !(basis.condition < cond_bound) {
            return None;
        }
        basis.gram_inverse = basis.gram.clone().try_inverse()?;
        Some(basis)
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn ctx(&self) -> &ModulusContext {
        &self.ctx
    }

    pub fn shifts(&self) -> &[Vec<Complex64>] {
        &self.shifts
    }

    pub fn sample_points(&self) -> &[Complex64] {
        &self.sample_points
    }

    /// Evaluation matrix: entry `(j, k)` is basis function `k` at sample point `j`.
    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn cond_bound(&self) -> f64 {
        self.cond_bound
    }

    /// Basis function `k` at `z`.
    pub fn eval(&self, k: usize, z: Complex64) -> Complex64 {
        self.eval_with_derivative(k, z).0
    }

    /// Basis function `k` and its derivative at `z`.
    pub fn eval_with_derivative(&self, k: usize, z: Complex64) -> (Complex64, Complex64) {
        let mut value = Complex64::new(1.0, 0.0);
        let mut log_deriv = Complex64::new(0.0, 0.0);
        let mut deriv_terms: Vec<(Complex64, Complex64)> = Vec::with_capacity(2 * self.shifts[k].len());
        for &c in &self.shifts[k] {
            for arg in [z + c, z - c] {
                let jet = theta_jet(ThetaChar::C10, arg, &self.ctx);
                deriv_terms.push((jet[0], jet[1]));
                value *= jet[0];
            }
        }
        // product rule without dividing by possibly vanishing factors
        let mut deriv = Complex64::new(0.0, 0.0);
        for i in 0..deriv_terms.len() {
            let mut term = deriv_terms[i].1;
            for (j, t) in deriv_terms.iter().enumerate() {
                if j != i {
                    term *= t.0;
                }
            }
            deriv += term;
        }
        log_deriv += deriv;
        (value, log_deriv)
    }

    /// Coordinates of the function with the given values at the sample points.
    pub fn coordinates_from_samples(&self, samples: &CVector) -> CVector {
        &self.gram_inverse * samples
    }

    /// Expands `f` in the basis and checks the expansion at independent points.
    pub fn expand<F>(&self, f: F, what: &'static str) -> Result<CVector>
    where
        F: Fn(Complex64) -> Complex64,
    {
        let samples = CVector::from_iterator(self.dim(), self.sample_points.iter().map(|&x| f(x)));
        let coords = self.coordinates_from_samples(&samples);
        let residual = self.expansion_residual(&coords, &f);
        if !(residual < INTERPOLATION_TOL) {
            return Err(Error::InterpolationResidual { what, residual, threshold: INTERPOLATION_TOL });
        }
        Ok(coords)
    }

    /// Largest relative mismatch between `f` and its expansion at the check points.
    pub fn expansion_residual<F>(&self, coords: &CVector, f: F) -> f64
    where
        F: Fn(Complex64) -> Complex64,
    {
        let mut worst: f64 = 0.0;
        for &x in &self.check_points {
            let exact = f(x);
            let mut approx = Complex64::new(0.0, 0.0);
            let mut scale = exact.norm();
            for (k, ck) in coords.iter().enumerate() {
                let term = ck * self.eval(k, x);
                scale = scale.max(term.norm());
                approx += term;
            }
            if scale > 0.0 {
                worst = worst.max((exact - approx).norm() / scale);
            }
        }
        worst
    }

    /// Relative residual of the automorphy conditions of basis function `k` at `z`.
    pub fn automorphy_residual(&self, k: usize, z: Complex64) -> f64 {
        automorphy_residual(|x| self.eval(k, x), self.spin, z, &self.ctx)
    }
}

/// Relative residual of `f(z+1) = f(-z) = f(z)` and
/// `f(z + tau) = exp(-4 ell pi i (2z + tau)) f(z)`.
pub fn automorphy_residual<F>(f: F, spin: Spin, z: Complex64, ctx: &ModulusContext) -> f64
where
    F: Fn(Complex64) -> Complex64,
{
    let tau = ctx.tau();
    let fz = f(z);
    let factor = (-I * (4.0 * spin.ell() * std::f64::consts::PI) * (z * 2.0 + tau)).exp();
    let scale = fz.norm().max(f64::MIN_POSITIVE);
    let r1 = (f(z + 1.0) - fz).norm() / scale;
    let r2 = (f(-z) - fz).norm() / scale;
    let r3 = (f(z + tau) - factor * fz).norm() / (factor * fz).norm().max(f64::MIN_POSITIVE);
    r1.max(r2).max(r3)
}

/// `s_a(z)`: `theta_11(eta) theta_11(2z)`, `theta_10(eta) theta_10(2z)`,
/// `i theta_00(eta) theta_00(2z)`, `theta_01(eta) theta_01(2z)`.
pub fn s_coeff(a: usize, z: Complex64, eta: Complex64, ctx: &ModulusContext) -> Result<Complex64> {
    let ch = ThetaChar::for_component(a)?;
    let value = theta(ch, eta, ctx) * theta(ch, z * 2.0, ctx);
    Ok(if a == 2 { value * I } else { value })
}

/// `(rho^ell(S^a) f)(z)` for an evaluable `f`.
pub fn apply_difference_operator<F>(
    a: usize,
    f: F,
    z: Complex64,
    spin: Spin,
    eta: Complex64,
    ctx: &ModulusContext,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    if ctx.lattice_distance(z * 2.0) < POLE_GUARD {
        return Err(Error::Pole { what: "difference operator (zero of theta_11(2z))", at: z, guard: POLE_GUARD });
    }
    let ell = spin.ell();
    let numerator = s_coeff(a, z - eta * ell, eta, ctx)? * f(z + eta) - s_coeff(a, -z - eta * ell, eta, ctx)? * f(z - eta);
    Ok(numerator / theta(ThetaChar::C11, z * 2.0, ctx))
}

/// Spin-`ell` representation: the four generator matrices in a theta basis.
#[derive(Clone, Debug)]
pub struct SklyaninRep {
    spin: Spin,
    eta: Complex64,
    generators: [CMatrix; 4],
    basis: Arc<ThetaBasis>,
    interpolation_residual: f64,
}

impl SklyaninRep {
    /// Matrices of `rho^ell(S^a)` in `basis`; column `k` holds the coordinates
    /// of the image of basis function `k`.
    pub fn new(basis: Arc<ThetaBasis>, eta: Complex64) -> Result<Self> {
        let dim = basis.dim();
        let spin = basis.spin();
        let ctx = basis.ctx().clone();
        let mut generators: [CMatrix; 4] = std::array::from_fn(|_| CMatrix::zeros(dim, dim));
        let mut worst: f64 = 0.0;
        for (a, generator) in generators.iter_mut().enumerate() {
            for k in 0..dim {
                let image = |x: Complex64| {
                    apply_difference_operator(a, |y| basis.eval(k, y), x, spin, eta, &ctx)
                        .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
                };
                let samples = CVector::from_iterator(dim, basis.sample_points().iter().map(|&x| image(x)));
                let coords = basis.coordinates_from_samples(&samples);
                worst = worst.max(basis.expansion_residual(&coords, image));
                generator.set_column(k, &coords);
            }
        }
        if !(worst < INTERPOLATION_TOL) {
            return Err(Error::InterpolationResidual {
                what: "sklyanin generator matrices",
                residual: worst,
                threshold: INTERPOLATION_TOL,
            });
        }
        Ok(SklyaninRep { spin, eta, generators, basis, interpolation_residual: worst })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn eta(&self) -> Complex64 {
        self.eta
    }

    pub fn generator(&self, a: usize) -> &CMatrix {
        &self.generators[a]
    }

    pub fn generators(&self) -> &[CMatrix; 4] {
        &self.generators
    }

    pub fn basis(&self) -> &Arc<ThetaBasis> {
        &self.basis
    }

    pub fn interpolation_residual(&self) -> f64 {
        self.interpolation_residual
    }
}

/// Seeded basis of the spin-`ell` theta-function space.
pub fn build_basis(spin: Spin, ctx: &ModulusContext, seed: u64) -> Result<ThetaBasis> {
    ThetaBasis::build(spin, ctx, seed)
}

/// Builds a seeded basis and the representation on it.
pub fn rep_matrices(spin: Spin, eta: Complex64, ctx: &ModulusContext, seed: u64) -> Result<SklyaninRep> {
    let basis = Arc::new(ThetaBasis::build(spin, ctx, seed)?);
    SklyaninRep::new(basis, eta)
}

/// Structure constants `J_12, J_23, J_31` of the quadratic relations.
#[derive(Clone, Copy, Debug)]
pub struct StructureConstants {
    pub j12: Complex64,
    pub j23: Complex64,
    pub j31: Complex64,
}

impl StructureConstants {
    pub fn new(eta: Complex64, ctx: &ModulusContext) -> Self {
        let t00 = theta(ThetaChar::C00, eta, ctx).powi(2);
        let t01 = theta(ThetaChar::C01, eta, ctx).powi(2);
        let t10 = theta(ThetaChar::C10, eta, ctx).powi(2);
        let t11 = theta(ThetaChar::C11, eta, ctx).powi(2);
        StructureConstants {
            j12: t01 * t11 / (t00 * t10),
            j23: t10 * t11 / (t00 * t01),
            j31: -t00 * t11 / (t01 * t10),
        }
    }

    /// `J` paired with `(beta, gamma)` for a cyclic triple starting at `alpha`.
    pub fn for_alpha(&self, alpha: usize) -> Complex64 {
        match alpha {
            1 => self.j23,
            2 => self.j31,
            _ => self.j12,
        }
    }
}

/// Residuals of the six quadratic relations, relative to `max_a |S^a|^2`.
#[derive(Clone, Debug)]
pub struct QuadraticRelationReport {
    /// `[S^a, S^0] + i J_{bc} {S^b, S^c}` for `a = 1, 2, 3`.
    pub mixed: [f64; 3],
    /// `[S^a, S^b] - i {S^0, S^c}` for `a = 1, 2, 3`.
    pub spatial: [f64; 3],
}

impl QuadraticRelationReport {
    pub fn max(&self) -> f64 {
        self.mixed.iter().chain(self.spatial.iter()).cloned().fold(0.0, f64::max)
    }
}

/// Evaluates the quadratic relations on the generator matrices.
pub fn check_quadratic_relations(rep: &SklyaninRep) -> QuadraticRelationReport {
    let j = StructureConstants::new(rep.eta, rep.basis.ctx());
    let s = &rep.generators;
    let scale = s.iter().map(|m| m.norm().powi(2)).fold(f64::MIN_POSITIVE, f64::max);
    let mut report = QuadraticRelationReport { mixed: [0.0; 3], spatial: [0.0; 3] };
    for alpha in 1..=3 {
        let beta = alpha % 3 + 1;
        let gamma = beta % 3 + 1;
        let mixed = commutator(&s[alpha], &s[0]) + anticommutator(&s[beta], &s[gamma]) * (I * j.for_alpha(alpha));
        let spatial = commutator(&s[alpha], &s[beta]) - anticommutator(&s[0], &s[gamma]) * I;
        report.mixed[alpha - 1] = mixed.norm() / scale;
        report.spatial[alpha - 1] = spatial.norm() / scale;
    }
    report
}
