//! Quasiclassical limit: classical spins, the Gaudin L-operator, `tau_hat(u)`
//! and the Hamiltonians `H_0, H_1 .. H_N`.
//!
//! Every operator can be built either in the standard spin basis or in the
//! theta-interpolation basis of [`crate::sklyanin`]. The latter is what the
//! finite-`eta` comparisons use, since the chain operators live there.

use std::sync::Arc;

use num_complex::Complex64;

use crate::elliptic::{
    branch_points, theta, theta_jet, w_coeff, weierstrass_p, weierstrass_zeta, zeta_shift_coeff, ModulusContext,
    ThetaChar,
};
use crate::error::{Error, Result};
use crate::lattice::{
    magnon_count, pauli, r_matrix, validate_sites, AuxBlocks, Chain, ChainSpec, Site, DEFAULT_DIM_CAP,
};
use crate::linalg::{commutator, embed_site, flatten, identity, kron, loglog_slope, polyfit};
use crate::sklyanin::{Spin, ThetaBasis};
use crate::{CMatrix, CVector};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default `eta` ladder for quasiclassical fits.
pub const ETA_LADDER: [f64; 4] = [1e-2, 5e-3, 2.5e-3, 1.25e-3];

/// Sites and modulus of a Gaudin model.
#[derive(Clone, Debug)]
pub struct GaudinSpec {
    sites: Vec<Site>,
    ctx: ModulusContext,
    dim_cap: usize,
}

impl GaudinSpec {
    pub fn new(sites: Vec<Site>, ctx: ModulusContext) -> Result<Self> {
        Self::with_dim_cap(sites, ctx, DEFAULT_DIM_CAP)
    }

    pub fn with_dim_cap(sites: Vec<Site>, ctx: ModulusContext, dim_cap: usize) -> Result<Self> {
        validate_sites(&sites, &ctx, dim_cap)?;
        Ok(GaudinSpec { sites, ctx, dim_cap })
    }

    /// The finite-`eta` chain with the same sites.
    pub fn chain_spec(&self, eta: Complex64) -> Result<ChainSpec> {
        ChainSpec::with_dim_cap(self.sites.clone(), eta, self.ctx.clone(), self.dim_cap)
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn ctx(&self) -> &ModulusContext {
        &self.ctx
    }

    pub fn dims(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s.spin.dim()).collect()
    }

    pub fn dim(&self) -> usize {
        self.dims().iter().product()
    }

    /// `ell_total` as a float.
    pub fn total_spin(&self) -> f64 {
        self.sites.iter().map(|s| s.spin.ell()).sum()
    }

    pub fn magnon_count(&self) -> Result<usize> {
        magnon_count(self.sites.iter().map(|s| s.spin.twice()).sum())
    }
}

impl From<&ChainSpec> for GaudinSpec {
    fn from(spec: &ChainSpec) -> Self {
        GaudinSpec { sites: spec.sites().to_vec(), ctx: spec.ctx().clone(), dim_cap: spec.dim_cap() }
    }
}

/// Spin-`ell` generators `S^1, S^2, S^3` of sl(2) with `[S^a, S^b] = i S^c`.
#[derive(Clone, Debug)]
pub struct ClassicalSpin {
    pub spin: Spin,
    pub s: [CMatrix; 3],
}

impl ClassicalSpin {
    pub fn casimir(&self) -> CMatrix {
        self.s.iter().map(|m| m * m).fold(CMatrix::zeros(self.spin.dim(), self.spin.dim()), |acc, m| acc + m)
    }

    /// Largest residual of `[S^a, S^b] - i S^c` over cyclic triples.
    pub fn algebra_residual(&self) -> f64 {
        (0..3)
            .map(|a| {
                let b = (a + 1) % 3;
                let c = (a + 2) % 3;
                (commutator(&self.s[a], &self.s[b]) - &self.s[c] * I).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Standard basis: `S^3` diagonal with entries `ell, ell - 1, .., -ell`.
pub fn classical_spin(spin: Spin) -> ClassicalSpin {
    let d = spin.dim();
    let ell = spin.ell();
    let mut raise = CMatrix::zeros(d, d);
    let mut s3 = CMatrix::zeros(d, d);
    for k in 0..d {
        let m = ell - k as f64;
        s3[(k, k)] = Complex64::new(m, 0.0);
        if k > 0 {
            raise[(k - 1, k)] = Complex64::new((ell * (ell + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let lower = raise.adjoint();
    let s1 = (&raise + &lower) * Complex64::new(0.5, 0.0);
    let s2 = (&raise - &lower) * Complex64::new(0.0, -0.5);
    ClassicalSpin { spin, s: [s1, s2, s3] }
}

/// Generators in a theta basis: the first-order `eta` coefficient of the
/// difference operators, normalized so that `W^L_a S^a = 2 eta w_a S^a_cl + O(eta^2)`.
///
/// `(X^a f)(z) = 2 theta_a(0) [theta_a(2z) f'(z) - 2 ell theta_a'(2z) f(z)] / theta_11(2z)`
/// (times `i` for `a = 2`), and `S^a_cl = X^a / (4 theta_11'(0))`.
pub fn classical_spin_theta(basis: &ThetaBasis) -> Result<ClassicalSpin> {
    let ctx = basis.ctx();
    let ell = basis.spin().ell();
    let d = basis.dim();
    let norm = ctx.theta11_prime() * 4.0;
    let mut s: [CMatrix; 3] = std::array::from_fn(|_| CMatrix::zeros(d, d));
    for (idx, m) in s.iter_mut().enumerate() {
        let a = idx + 1;
        let ch = ThetaChar::for_component(a)?;
        let null = ctx.theta_null(ch);
        let prefactor = if a == 2 { I } else { Complex64::new(1.0, 0.0) };
        for k in 0..d {
            let image = |z: Complex64| {
                let (f, df) = basis.eval_with_derivative(k, z);
                let jet = theta_jet(ch, z * 2.0, ctx);
                prefactor * null * 2.0 * (jet[0] * df - jet[1] * f * (2.0 * ell))
                    / (theta(ThetaChar::C11, z * 2.0, ctx) * norm)
            };
            let coords = basis.expand(image, "classical generator in theta basis")?;
            m.set_column(k, &coords);
        }
    }
    Ok(ClassicalSpin { spin: basis.spin(), s })
}

/// Cross-check of [`classical_spin_theta`] by fitting the finite-`eta`
/// representation matrices over an `eta` ladder.
pub fn classical_spin_theta_fit(basis: &Arc<ThetaBasis>, etas: &[f64]) -> Result<ClassicalSpin> {
    let ctx = basis.ctx();
    let d = basis.dim();
    let mut s: [CMatrix; 3] = std::array::from_fn(|_| CMatrix::zeros(d, d));
    let reps = etas
        .iter()
        .map(|&e| crate::sklyanin::SklyaninRep::new(basis.clone(), Complex64::new(e, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    for (idx, m) in s.iter_mut().enumerate() {
        let a = idx + 1;
        let ch = ThetaChar::for_component(a)?;
        let samples: Vec<CVector> = reps
            .iter()
            .zip(etas)
            .map(|(rep, &e)| {
                let eta = Complex64::new(e, 0.0);
                let scale = ctx.theta_null(ch) / (theta(ch, eta, ctx) * ctx.theta11_prime() * 4.0 * eta);
                flatten(&(rep.generator(a) * scale))
            })
            .collect();
        let coeffs = polyfit(etas, &samples, etas.len().min(4) - 1)?;
        *m = CMatrix::from_column_slice(d, d, coeffs[0].as_slice());
    }
    Ok(ClassicalSpin { spin: basis.spin(), s })
}

/// `r(u) = -(1/2) sum_a w_a(u) sigma^a (x) sigma^a`.
pub fn classical_r(u: Complex64, ctx: &ModulusContext) -> Result<CMatrix> {
    let s = pauli();
    let mut r = CMatrix::zeros(4, 4);
    for a in 1..=3 {
        r += kron(&s[a], &s[a]) * (w_coeff(a, u, ctx)? * -0.5);
    }
    Ok(r)
}

/// Residual of the classical Yang-Baxter equation on `(C^2)^{(x)3}`.
pub fn classical_yang_baxter_residual(u: Complex64, v: Complex64, ctx: &ModulusContext) -> Result<f64> {
    let s = pauli();
    let one = identity(2);
    let mut r12 = CMatrix::zeros(8, 8);
    let mut r13 = CMatrix::zeros(8, 8);
    let mut r23 = CMatrix::zeros(8, 8);
    for a in 1..=3 {
        r12 += kron(&kron(&s[a], &s[a]), &one) * (w_coeff(a, u - v, ctx)? * -0.5);
        r13 += kron(&kron(&s[a], &one), &s[a]) * (w_coeff(a, u, ctx)? * -0.5);
        r23 += kron(&kron(&one, &s[a]), &s[a]) * (w_coeff(a, v, ctx)? * -0.5);
    }
    let res = commutator(&r12, &r13) + commutator(&r12, &r23) + commutator(&r13, &r23);
    Ok(res.norm() / (r12.norm() * r13.norm()).max(f64::MIN_POSITIVE))
}

/// Relative residual of `[X_1(u), X_2(v)] = [r(u - v), X_1(u) + X_2(v)]`
/// for operator-valued 2x2 matrices `X`.
pub fn linear_relation_residual(r: &CMatrix, xu: &AuxBlocks, xv: &AuxBlocks) -> f64 {
    let n = xu.dim();
    let r_full = kron(r, &identity(n));
    let x1 = xu.in_double_aux(0);
    let x2 = xv.in_double_aux(1);
    let lhs = commutator(&x1, &x2);
    let rhs = commutator(&r_full, &(&x1 + &x2));
    (lhs - rhs).norm() / (x1.norm() * x2.norm()).max(f64::MIN_POSITIVE)
}

fn l_blocks(w: [Complex64; 3], s: &[CMatrix; 3]) -> AuxBlocks {
    let s1 = &s[0] * w[0];
    let s2 = &s[1] * (w[1] * I);
    let s3 = &s[2] * w[2];
    AuxBlocks { a: s3.clone(), b: &s1 - &s2, c: &s1 + &s2, d: -s3 }
}

/// Gaudin model with generators fixed in one basis per site.
#[derive(Clone, Debug)]
pub struct GaudinModel {
    spec: GaudinSpec,
    spins: Vec<ClassicalSpin>,
    embedded: Vec<[CMatrix; 3]>,
}

impl GaudinModel {
    /// Standard spin basis at every site.
    pub fn standard(spec: GaudinSpec) -> Self {
        let spins = spec.sites().iter().map(|s| classical_spin(s.spin)).collect();
        Self::from_spins(spec, spins).expect("standard spins match the spec")
    }

    /// Theta bases given per site.
    pub fn theta(spec: GaudinSpec, bases: &[Arc<ThetaBasis>]) -> Result<Self> {
        let spins = bases.iter().map(|b| classical_spin_theta(b)).collect::<Result<Vec<_>>>()?;
        Self::from_spins(spec, spins)
    }

    /// Theta bases of an existing chain, for direct comparison with it.
    pub fn for_chain(chain: &Chain) -> Result<Self> {
        Self::theta(GaudinSpec::from(chain.spec()), &chain.bases())
    }

    pub fn from_spins(spec: GaudinSpec, spins: Vec<ClassicalSpin>) -> Result<Self> {
        if spins.len() != spec.len() {
            return Err(Error::InvalidArgument(format!("{} spins for {} sites", spins.len(), spec.len())));
        }
        for (n, (s, site)) in spins.iter().zip(spec.sites()).enumerate() {
            if s.spin != site.spin {
                return Err(Error::SpinMismatch { site: n, expected: site.spin.twice(), found: s.spin.twice() });
            }
        }
        let dims = spec.dims();
        let embedded = spins
            .iter()
            .enumerate()
            .map(|(n, s)| std::array::from_fn(|a| embed_site(&s.s[a], n, &dims)))
            .collect();
        Ok(GaudinModel { spec, spins, embedded })
    }

    pub fn spec(&self) -> &GaudinSpec {
        &self.spec
    }

    pub fn ctx(&self) -> &ModulusContext {
        self.spec.ctx()
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn spins(&self) -> &[ClassicalSpin] {
        &self.spins
    }

    /// `S^a` (a = 1..3) of site `n` embedded in the chain space.
    pub fn embedded_spin(&self, n: usize, a: usize) -> &CMatrix {
        &self.embedded[n][a - 1]
    }

    /// `sum_n S^3_n`.
    pub fn total_s3(&self) -> CMatrix {
        self.embedded.iter().fold(CMatrix::zeros(self.dim(), self.dim()), |acc, s| acc + &s[2])
    }

    /// `L_n(u) = sum_a w_a(u) S^a_n (x) sigma^a`; the argument is not shifted by `z_n`.
    pub fn classical_l(&self, n: usize, u: Complex64) -> Result<AuxBlocks> {
        if n >= self.spec.len() {
            return Err(Error::IndexOutOfRange { what: "site", index: n });
        }
        let ctx = self.ctx();
        let w = [w_coeff(1, u, ctx)?, w_coeff(2, u, ctx)?, w_coeff(3, u, ctx)?];
        Ok(l_blocks(w, &self.embedded[n]))
    }

    /// `T(u) = sum_n L_n(u - z_n)`.
    pub fn classical_t(&self, u: Complex64) -> Result<AuxBlocks> {
        let d = self.dim();
        let zero = CMatrix::zeros(d, d);
        let mut t = AuxBlocks { a: zero.clone(), b: zero.clone(), c: zero.clone(), d: zero };
        for (n, site) in self.spec.sites().iter().enumerate() {
            let l = self.classical_l(n, u - site.z)?;
            t = AuxBlocks::from_fn(|i, j| t.get(i, j) + l.get(i, j));
        }
        Ok(t)
    }

    /// `tau_hat(u) = (1/2) tr T(u)^2`.
    pub fn tau_hat(&self, u: Complex64) -> Result<CMatrix> {
        let t = self.classical_t(u)?;
        let sq = t.mul(&t);
        Ok(sq.trace() * Complex64::new(0.5, 0.0))
    }

    /// `H_n = 2 sum_{m != n} sum_a w_a(z_n - z_m) S^a_n S^a_m` (0-based `n`).
    pub fn hamiltonian_n(&self, n: usize) -> Result<CMatrix> {
        let sites = self.spec.sites();
        if n >= sites.len() {
            return Err(Error::IndexOutOfRange { what: "site", index: n });
        }
        let mut h = CMatrix::zeros(self.dim(), self.dim());
        for m in 0..sites.len() {
            if m == n {
                continue;
            }
            let d = sites[n].z - sites[m].z;
            for a in 1..=3 {
                h += (&self.embedded[n][a - 1] * &self.embedded[m][a - 1]) * (w_coeff(a, d, self.ctx())? * 2.0);
            }
        }
        Ok(h)
    }

    /// `H_1 .. H_N`.
    pub fn hamiltonians(&self) -> Result<Vec<CMatrix>> {
        (0..self.spec.len()).map(|n| self.hamiltonian_n(n)).collect()
    }

    /// `H_0 = sum_n sum_a ( -e_a (S^a_n)^2 + sum_{m != n} w_a(z_nm) (zeta(z_nm + w/2) - zeta(w/2)) S^a_n S^a_m )`.
    pub fn hamiltonian_0(&self) -> Result<CMatrix> {
        let ctx = self.ctx();
        let e = branch_points(ctx);
        let sites = self.spec.sites();
        let mut h = CMatrix::zeros(self.dim(), self.dim());
        for n in 0..sites.len() {
            for a in 1..=3 {
                let sa = &self.embedded[n][a - 1];
                h -= (sa * sa) * e[a - 1];
                for m in 0..sites.len() {
                    if m == n {
                        continue;
                    }
                    let d = sites[n].z - sites[m].z;
                    let coeff = w_coeff(a, d, ctx)? * zeta_shift_coeff(a, d, ctx)?;
                    h += (sa * &self.embedded[m][a - 1]) * coeff;
                }
            }
        }
        Ok(h)
    }

    /// `sum_n p(u - z_n) ell_n (ell_n + 1) + sum_n H_n zeta(u - z_n) + H_0`.
    pub fn tau_from_hamiltonians(&self, u: Complex64, hams: &[CMatrix], h0: &CMatrix) -> Result<CMatrix> {
        let ctx = self.ctx();
        let mut out = h0.clone();
        for (site, h) in self.spec.sites().iter().zip(hams) {
            let x = u - site.z;
            out += identity(self.dim()) * (weierstrass_p(x, ctx)? * site.spin.casimir());
            out += h * weierstrass_zeta(x, ctx)?;
        }
        Ok(out)
    }

    /// Relative residual of the pole decomposition of `tau_hat(u)`.
    pub fn tau_decomposition_residual(&self, u: Complex64) -> Result<f64> {
        let hams = self.hamiltonians()?;
        let h0 = self.hamiltonian_0()?;
        let tau = self.tau_hat(u)?;
        let rebuilt = self.tau_from_hamiltonians(u, &hams, &h0)?;
        Ok((&tau - rebuilt).norm() / tau.norm().max(1.0))
    }
}

/// Fitted orders and coefficients of the quasiclassical expansions.
#[derive(Clone, Debug)]
pub struct LimitReport {
    pub etas: Vec<f64>,
    /// `|(L_n(u) - 1)/(2 eta) - L_cl(u)|` per `eta`, and its log-log slope.
    pub l_errors: Vec<f64>,
    pub l_slope: f64,
    /// `|(T(u) - 1)/(2 eta) - T_cl(u)|` and slope.
    pub t_errors: Vec<f64>,
    pub t_slope: f64,
    /// `|(R(u) - 1)/(-2 eta) - r(u)|` and slope.
    pub r_errors: Vec<f64>,
    pub r_slope: f64,
    /// Largest entry of the fitted `eta^1` coefficient of `t(u)`.
    pub transfer_linear_coeff: f64,
    /// `|t(u) - Delta(u) - 1 - 4 eta^2 tau_hat(u)|` and slope.
    pub tau_errors: Vec<f64>,
    pub tau_slope: f64,
}

/// Compares a chain with its Gaudin limit at `u` over an `eta` ladder, on the
/// bases of `chain` (whose own `eta` is ignored).
pub fn quasiclassical_report(chain: &Chain, u: Complex64, etas: &[f64]) -> Result<LimitReport> {
    let model = GaudinModel::for_chain(chain)?;
    let ctx = chain.ctx().clone();
    let dim = chain.dim();
    let one_chain = identity(dim);
    let l_cl = model.classical_l(0, u - chain.spec().sites()[0].z)?.to_full();
    let t_cl = model.classical_t(u)?.to_full();
    let r_cl = classical_r(u, &ctx)?;
    let tau = model.tau_hat(u)?;
    let mut report = LimitReport {
        etas: etas.to_vec(),
        l_errors: vec![],
        l_slope: 0.0,
        t_errors: vec![],
        t_slope: 0.0,
        r_errors: vec![],
        r_slope: 0.0,
        transfer_linear_coeff: 0.0,
        tau_errors: vec![],
        tau_slope: 0.0,
    };
    let mut transfer_samples = Vec::with_capacity(etas.len());
    for &e in etas {
        let eta = Complex64::new(e, 0.0);
        let at = chain.at_eta(eta)?;
        let one_aux = identity(2 * dim);
        let l = at.site_l_operator(0, u - chain.spec().sites()[0].z)?.to_full();
        report.l_errors.push(((l - &one_aux) / (eta * 2.0) - &l_cl).norm());
        let t = at.monodromy(u)?.to_full();
        report.t_errors.push(((t - &one_aux) / (eta * 2.0) - &t_cl).norm());
        let r = r_matrix(u, eta, &ctx)?;
        report.r_errors.push(((r - identity(4)) / (eta * -2.0) - &r_cl).norm());
        let transfer = at.transfer(u)?;
        let qdet = at.quantum_determinant(u)?;
        let lhs = &transfer - qdet - &one_chain;
        report.tau_errors.push((lhs - &tau * (eta * eta * 4.0)).norm());
        let mirrored = chain.at_eta(-eta)?.transfer(u)?;
        transfer_samples.push(flatten(&((transfer - mirrored) / (eta * 2.0))));
    }
    report.l_slope = loglog_slope(etas, &report.l_errors);
    report.t_slope = loglog_slope(etas, &report.t_errors);
    report.r_slope = loglog_slope(etas, &report.r_errors);
    report.tau_slope = loglog_slope(etas, &report.tau_errors);
    // the odd part (t(eta) - t(-eta)) / (2 eta) is a series in eta^2 whose
    // constant term is the eta^1 coefficient of t
    let squares: Vec<f64> = etas.iter().map(|e| e * e).collect();
    let coeffs = polyfit(&squares, &transfer_samples, etas.len() - 1)?;
    report.transfer_linear_coeff = coeffs[0].iter().map(|x| x.norm()).fold(0.0, f64::max);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::weierstrass_p;
    use crate::linalg::eigenvalues;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ctx() -> ModulusContext {
        ModulusContext::new(c(0.0, 1.0)).unwrap()
    }

    fn spec3() -> GaudinSpec {
        let sites = vec![
            Site::new(Spin::HALF, c(0.13, 0.0)),
            Site::new(Spin::HALF, c(-0.21, 0.0)),
            Site::new(Spin::ONE, c(0.02, 0.17)),
        ];
        GaudinSpec::new(sites, ModulusContext::new(c(0.1, 0.9)).unwrap()).unwrap()
    }

    #[test]
    fn standard_spins() {
        let half = classical_spin(Spin::HALF);
        let s = pauli();
        for a in 0..3 {
            assert!((&half.s[a] - &s[a + 1] * c(0.5, 0.0)).norm() < 1e-15);
        }
        let one = classical_spin(Spin::ONE);
        assert!((one.casimir() - identity(3) * c(2.0, 0.0)).norm() < 1e-14);
        assert!(one.algebra_residual() < 1e-14);
    }

    #[test]
    fn theta_basis_spins_form_sl2() {
        let ctx = ctx();
        for two_ell in 1..=3 {
            let spin = Spin::from_twice(two_ell).unwrap();
            let basis = Arc::new(ThetaBasis::build(spin, &ctx, 9).unwrap());
            let s = classical_spin_theta(&basis).unwrap();
            assert!(s.algebra_residual() < 1e-8, "{}", s.algebra_residual());
            let cas = s.casimir() - identity(spin.dim()) * c(spin.casimir(), 0.0);
            assert!(cas.norm() < 1e-8);
            let mut ev: Vec<f64> = eigenvalues(&s.s[2]).unwrap().iter().map(|x| x.re).collect();
            ev.sort_by(f64::total_cmp);
            for (k, x) in ev.iter().enumerate() {
                assert!((x - (k as f64 - spin.ell())).abs() < 1e-8);
            }
            let fit = classical_spin_theta_fit(&basis, &ETA_LADDER).unwrap();
            for a in 0..3 {
                assert!((&fit.s[a] - &s.s[a]).norm() / s.s[a].norm() < 1e-5);
            }
        }
    }

    #[test]
    fn l_operator_residue() {
        let spec = GaudinSpec::new(vec![Site::new(Spin::HALF, c(0.0, 0.0))], ctx()).unwrap();
        let model = GaudinModel::standard(spec);
        let s = pauli();
        let mut perm_like = CMatrix::zeros(4, 4);
        for a in 1..=3 {
            perm_like += kron(&s[a], &(&s[a] * c(0.5, 0.0)));
        }
        let small = [1e-3, 5e-4];
        let vals: Vec<CMatrix> =
            small.iter().map(|&h| model.classical_l(0, c(h, 0.0)).unwrap().to_full() * c(h, 0.0)).collect();
        let extrapolated = (&vals[1] * c(4.0, 0.0) - &vals[0]) / c(3.0, 0.0);
        assert!((extrapolated - perm_like).norm() < 1e-6);
    }

    #[test]
    fn classical_r_relations() {
        let ctx = ModulusContext::new(c(0.1, 0.9)).unwrap();
        let (u, v) = (c(0.31, 0.12), c(-0.07, 0.33));
        assert!(classical_yang_baxter_residual(u, v, &ctx).unwrap() < 1e-8);
        let model = GaudinModel::standard(spec3());
        let r = classical_r(u - v, &ctx).unwrap();
        let res = linear_relation_residual(&r, &model.classical_t(u).unwrap(), &model.classical_t(v).unwrap());
        assert!(res < 1e-8, "{res}");
    }

    #[test]
    fn hamiltonians_commute_and_sum_to_zero() {
        let model = GaudinModel::standard(spec3());
        let hams = model.hamiltonians().unwrap();
        let h0 = model.hamiltonian_0().unwrap();
        let total = hams.iter().fold(CMatrix::zeros(12, 12), |acc, h| acc + h);
        assert!(total.norm() < 1e-10);
        let mut all = hams.clone();
        all.push(h0);
        for i in 0..all.len() {
            for j in 0..all.len() {
                assert!(commutator(&all[i], &all[j]).norm() < 1e-8);
            }
        }
        assert!(commutator(&model.total_s3(), &hams[0]).norm() > 1e-6);
    }

    #[test]
    fn tau_decomposition_and_commutation() {
        let model = GaudinModel::standard(spec3());
        for u in [c(0.31, 0.12), c(-0.37, 0.41), c(0.05, -0.2)] {
            assert!(model.tau_decomposition_residual(u).unwrap() < 1e-7);
        }
        let a = model.tau_hat(c(0.31, 0.12)).unwrap();
        let b = model.tau_hat(c(-0.07, 0.33)).unwrap();
        assert!(commutator(&a, &b).norm() < 1e-8);
        let h1 = model.hamiltonian_n(0).unwrap();
        assert!(commutator(&a, &h1).norm() < 1e-8);
    }

    #[test]
    fn single_site_h0_vanishes_for_spin_half() {
        let spec = GaudinSpec::new(vec![Site::new(Spin::HALF, c(0.1, 0.0))], ctx()).unwrap();
        assert!(GaudinModel::standard(spec).hamiltonian_0().unwrap().norm() < 1e-12);
    }

    #[test]
    fn zeta_shift_is_minus_integral_of_p() {
        let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
        let d = c(0.34, 0.0);
        for a in 1..=3 {
            let start = ctx.half_period(a).unwrap();
            let n = 400;
            let h = d / n as f64;
            let mut acc = c(0.0, 0.0);
            for k in 0..=n {
                let wgt = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
                acc += weierstrass_p(start + h * k as f64, &ctx).unwrap() * wgt;
            }
            let integral = acc * h / 3.0;
            assert!((zeta_shift_coeff(a, d, &ctx).unwrap() + integral).norm() < 1e-7);
        }
    }

    #[test]
    fn two_site_h1_by_hand() {
        let ctx = ctx();
        let (z1, z2) = (c(0.13, 0.0), c(-0.21, 0.0));
        let spec = GaudinSpec::new(vec![Site::new(Spin::HALF, z1), Site::new(Spin::HALF, z2)], ctx.clone()).unwrap();
        let model = GaudinModel::standard(spec);
        let s = pauli();
        let mut hand = CMatrix::zeros(4, 4);
        for a in 1..=3 {
            hand += kron(&s[a], &s[a]) * (w_coeff(a, z1 - z2, &ctx).unwrap() * 0.5);
        }
        let h1 = model.hamiltonian_n(0).unwrap();
        assert!((&h1 - &hand).norm() < 1e-13);
        assert!((h1 + model.hamiltonian_n(1).unwrap()).norm() < 1e-13);
    }

    #[test]
    fn quasiclassical_orders() {
        let sites = vec![Site::new(Spin::HALF, c(0.13, 0.0)), Site::new(Spin::HALF, c(-0.21, 0.0))];
        let chain = Chain::new(ChainSpec::new(sites, c(0.1, 0.0), ctx()).unwrap(), 1).unwrap();
        let rep = quasiclassical_report(&chain, c(0.31, 0.12), &ETA_LADDER).unwrap();
        assert!(rep.l_slope > 0.9, "{:?}", rep);
        assert!(rep.t_slope > 0.9, "{:?}", rep);
        assert!(rep.r_slope > 0.9, "{:?}", rep);
        assert!(rep.transfer_linear_coeff < 1e-8, "{:?}", rep);
        assert!(rep.tau_slope > 2.7, "{:?}", rep);
    }
}
