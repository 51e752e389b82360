//! Finite-`eta` chain operators: R-matrix, L-operators, monodromy, transfer
//! matrix and quantum determinant.
//!
//! Auxiliary 2x2 structure is kept as four separate operator blocks
//! ([`AuxBlocks`]). In the full matrix form the auxiliary index is the most
//! significant one, and for two auxiliary spaces the first one comes first.

use std::sync::Arc;

use num_complex::Complex64;

use crate::elliptic::{theta, ModulusContext, ThetaChar, POLE_GUARD};
use crate::error::{Error, Result};
use crate::linalg::{embed_site, identity, kron};
use crate::sklyanin::{Spin, SklyaninRep, ThetaBasis};
use crate::CMatrix;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default cap on the Hilbert-space dimension.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// One site of the chain: its spin and inhomogeneity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Site {
    pub spin: Spin,
    pub z: Complex64,
}

impl Site {
    pub fn new(spin: Spin, z: Complex64) -> Self {
        Site { spin, z }
    }
}

/// Sites, anisotropy and modulus of an inhomogeneous chain.
#[derive(Clone, Debug)]
pub struct ChainSpec {
    sites: Vec<Site>,
    eta: Complex64,
    ctx: ModulusContext,
    dim_cap: usize,
}

/// Checks site count, distinct inhomogeneities and the dimension cap.
pub(crate) fn validate_sites(sites: &[Site], ctx: &ModulusContext, dim_cap: usize) -> Result<()> {
    if sites.is_empty() {
        return Err(Error::InvalidArgument("a chain needs at least one site".into()));
    }
    for i in 0..sites.len() {
        for j in i + 1..sites.len() {
            if ctx.lattice_distance(sites[i].z - sites[j].z) < POLE_GUARD {
                return Err(Error::CoincidentSites(i, j));
            }
        }
    }
    let dim = sites
        .iter()
        .try_fold(1usize, |acc, s| acc.checked_mul(s.spin.dim()))
        .unwrap_or(usize::MAX);
    if dim > dim_cap {
        return Err(Error::DimensionCap { dim, cap: dim_cap });
    }
    Ok(())
}

impl ChainSpec {
    pub fn new(sites: Vec<Site>, eta: Complex64, ctx: ModulusContext) -> Result<Self> {
        Self::with_dim_cap(sites, eta, ctx, DEFAULT_DIM_CAP)
    }

    pub fn with_dim_cap(sites: Vec<Site>, eta: Complex64, ctx: ModulusContext, dim_cap: usize) -> Result<Self> {
        validate_sites(&sites, &ctx, dim_cap)?;
        if !(eta.re.is_finite() && eta.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("eta must be finite, got {eta}")));
        }
        Ok(ChainSpec { sites, eta, ctx, dim_cap })
    }

    /// Same sites and modulus with a different anisotropy.
    pub fn with_eta(&self, eta: Complex64) -> Self {
        ChainSpec { eta, ..self.clone() }
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

    pub fn eta(&self) -> Complex64 {
        self.eta
    }

    pub fn ctx(&self) -> &ModulusContext {
        &self.ctx
    }

    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    pub fn dims(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s.spin.dim()).collect()
    }

    pub fn dim(&self) -> usize {
        self.dims().iter().product()
    }

    /// `2 ell_total`.
    pub fn total_twice_spin(&self) -> u32 {
        self.sites.iter().map(|s| s.spin.twice()).sum()
    }

    /// Number of Bethe roots `M = ell_total`, which must be an integer.
    pub fn magnon_count(&self) -> Result<usize> {
        magnon_count(self.total_twice_spin())
    }
}

pub(crate) fn magnon_count(total_twice: u32) -> Result<usize> {
    if total_twice % 2 != 0 {
        return Err(Error::NonIntegerTotalSpin(total_twice));
    }
    Ok((total_twice / 2) as usize)
}

/// Pauli matrices `sigma^0 .. sigma^3`.
pub fn pauli() -> [CMatrix; 4] {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    [
        CMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        CMatrix::from_row_slice(2, 2, &[o, -I, I, o]),
        CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    ]
}

/// Swap of the two factors of `C^2 (x) C^2`.
pub fn swap() -> CMatrix {
    let mut p = CMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            p[(2 * i + j, 2 * j + i)] = Complex64::new(1.0, 0.0);
        }
    }
    p
}

/// Projector onto antisymmetric tensors in `C^2 (x) C^2`.
pub fn antisymmetrizer() -> CMatrix {
    (identity(4) - swap()) * Complex64::new(0.5, 0.0)
}

/// `W^L_a(u)`: `1 / (2 theta_11(eta))` for `a = 0`, otherwise
/// `theta_ab(u) / (2 theta_11(u) theta_ab(eta))` with the component's characteristic.
pub fn weight_l(a: usize, u: Complex64, eta: Complex64, ctx: &ModulusContext) -> Result<Complex64> {
    let ch = ThetaChar::for_component(a)?;
    if a == 0 {
        ctx.guard(eta, "L-operator weight (theta_11(eta) = 0)")?;
        return Ok(Complex64::new(0.5, 0.0) / theta(ThetaChar::C11, eta, ctx));
    }
    ctx.guard(u, "L-operator weight")?;
    Ok(theta(ch, u, ctx) / (theta(ThetaChar::C11, u, ctx) * theta(ch, eta, ctx) * 2.0))
}

/// `W^R_a(u) = W^L_a(u + eta) / W^L_0(u + eta)`.
pub fn weight_r(a: usize, u: Complex64, eta: Complex64, ctx: &ModulusContext) -> Result<Complex64> {
    Ok(weight_l(a, u + eta, eta, ctx)? / weight_l(0, u + eta, eta, ctx)?)
}

/// Baxter's R-matrix `sum_a W^R_a(u) sigma^a (x) sigma^a`.
pub fn r_matrix(u: Complex64, eta: Complex64, ctx: &ModulusContext) -> Result<CMatrix> {
    let s = pauli();
    let mut r = CMatrix::zeros(4, 4);
    for (a, sa) in s.iter().enumerate() {
        r += kron(sa, sa) * weight_r(a, u, eta, ctx)?;
    }
    Ok(r)
}

/// A 2x2 matrix of operators.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxBlocks {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
}

impl AuxBlocks {
    pub fn identity(dim: usize) -> Self {
        AuxBlocks { a: identity(dim), b: CMatrix::zeros(dim, dim), c: CMatrix::zeros(dim, dim), d: identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> &CMatrix {
        match (i, j) {
            (0, 0) => &self.a,
            (0, 1) => &self.b,
            (1, 0) => &self.c,
            _ => &self.d,
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> CMatrix>(mut f: F) -> Self {
        AuxBlocks { a: f(0, 0), b: f(0, 1), c: f(1, 0), d: f(1, 1) }
    }

    pub fn mul(&self, rhs: &AuxBlocks) -> AuxBlocks {
        AuxBlocks::from_fn(|i, j| self.get(i, 0) * rhs.get(0, j) + self.get(i, 1) * rhs.get(1, j))
    }

    /// `m^{-1}`-style conjugation by scalar 2x2 matrices: `left * self * right`.
    pub fn sandwich(&self, left: &[[Complex64; 2]; 2], right: &[[Complex64; 2]; 2]) -> AuxBlocks {
        let inner = AuxBlocks::from_fn(|i, j| self.get(i, 0) * right[0][j] + self.get(i, 1) * right[1][j]);
        AuxBlocks::from_fn(|i, j| inner.get(0, j) * left[i][0] + inner.get(1, j) * left[i][1])
    }

    pub fn trace(&self) -> CMatrix {
        &self.a + &self.d
    }

    /// The operator on `C^2 (x) H`, auxiliary index most significant.
    pub fn to_full(&self) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(2 * n, 2 * n);
        for i in 0..2 {
            for j in 0..2 {
                out.view_mut((i * n, j * n), (n, n)).copy_from(self.get(i, j));
            }
        }
        out
    }

    /// Embedding into `C^2 (x) C^2 (x) H` acting on auxiliary factor `slot` (0 or 1).
    pub fn in_double_aux(&self, slot: usize) -> CMatrix {
        let mut out = CMatrix::zeros(4 * self.dim(), 4 * self.dim());
        for i in 0..2 {
            for j in 0..2 {
                let mut unit = CMatrix::zeros(2, 2);
                unit[(i, j)] = Complex64::new(1.0, 0.0);
                let aux = if slot == 0 { kron(&unit, &identity(2)) } else { kron(&identity(2), &unit) };
                out += kron(&aux, self.get(i, j));
            }
        }
        out
    }
}

/// `L(u)` of a single representation, acting on `C^2 (x) V`.
pub fn local_l_operator(generators: &[CMatrix; 4], u: Complex64, eta: Complex64, ctx: &ModulusContext) -> Result<AuxBlocks> {
    let w: Vec<Complex64> = (0..4).map(|a| weight_l(a, u, eta, ctx)).collect::<Result<_>>()?;
    let s0 = &generators[0] * w[0];
    let s1 = &generators[1] * w[1];
    let s2 = &generators[2] * (w[2] * I);
    let s3 = &generators[3] * w[3];
    Ok(AuxBlocks { a: &s0 + &s3, b: &s1 - &s2, c: &s1 + &s2, d: &s0 - &s3 })
}

/// An inhomogeneous chain with a representation at every site.
#[derive(Clone, Debug)]
pub struct Chain {
    spec: ChainSpec,
    reps: Vec<SklyaninRep>,
    embedded: Vec<[CMatrix; 4]>,
}

/// Seed used for the basis of site `n` when a chain is built from one seed.
pub fn site_seed(seed: u64, n: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(n as u64)
}

impl Chain {
    /// Builds seeded bases and representations for every site.
    pub fn new(spec: ChainSpec, seed: u64) -> Result<Self> {
        let bases = spec
            .sites()
            .iter()
            .enumerate()
            .map(|(n, s)| ThetaBasis::build(s.spin, spec.ctx(), site_seed(seed, n)).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        Self::with_bases(spec, bases)
    }

    /// Representations on given bases; lets chains at several `eta` share bases.
    pub fn with_bases(spec: ChainSpec, bases: Vec<Arc<ThetaBasis>>) -> Result<Self> {
        let reps = bases
            .into_iter()
            .map(|b| SklyaninRep::new(b, spec.eta()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_reps(spec, reps)
    }

    pub fn from_reps(spec: ChainSpec, reps: Vec<SklyaninRep>) -> Result<Self> {
        if reps.len() != spec.len() {
            return Err(Error::InvalidArgument(format!("{} representations for {} sites", reps.len(), spec.len())));
        }
        for (n, (rep, site)) in reps.iter().zip(spec.sites()).enumerate() {
            if rep.spin() != site.spin {
                return Err(Error::SpinMismatch { site: n, expected: site.spin.twice(), found: rep.spin().twice() });
            }
        }
        let dims = spec.dims();
        let embedded = reps
            .iter()
            .enumerate()
            .map(|(n, rep)| std::array::from_fn(|a| embed_site(rep.generator(a), n, &dims)))
            .collect();
        Ok(Chain { spec, reps, embedded })
    }

    /// The same chain at another anisotropy, on the same bases.
    pub fn at_eta(&self, eta: Complex64) -> Result<Self> {
        Self::with_bases(self.spec.with_eta(eta), self.bases())
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn eta(&self) -> Complex64 {
        self.spec.eta()
    }

    pub fn ctx(&self) -> &ModulusContext {
        self.spec.ctx()
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn reps(&self) -> &[SklyaninRep] {
        &self.reps
    }

    pub fn bases(&self) -> Vec<Arc<ThetaBasis>> {
        self.reps.iter().map(|r| r.basis().clone()).collect()
    }

    /// Generator `S^a` of site `n` embedded in the chain space.
    pub fn embedded_generator(&self, n: usize, a: usize) -> &CMatrix {
        &self.embedded[n][a]
    }

    /// `L_n(u)` on `C^2 (x) H`; the argument is not shifted by `z_n`.
    pub fn site_l_operator(&self, n: usize, u: Complex64) -> Result<AuxBlocks> {
        if n >= self.spec.len() {
            return Err(Error::IndexOutOfRange { what: "site", index: n });
        }
        local_l_operator(&self.embedded[n], u, self.eta(), self.ctx())
    }

    /// `T(u) = L_N(u - z_N) ... L_1(u - z_1)`.
    pub fn monodromy(&self, u: Complex64) -> Result<AuxBlocks> {
        let mut t = AuxBlocks::identity(self.dim());
        for (n, site) in self.spec.sites().iter().enumerate() {
            t = self.site_l_operator(n, u - site.z)?.mul(&t);
        }
        Ok(t)
    }

    /// `t(u) = A(u) + D(u)`.
    pub fn transfer(&self, u: Complex64) -> Result<CMatrix> {
        Ok(self.monodromy(u)?.trace())
    }

    /// `(A^- D^+ + D^- A^+ - B^- C^+ - C^- B^+) / 2` with `T^\mp = T(u \mp eta)`.
    pub fn quantum_determinant(&self, u: Complex64) -> Result<CMatrix> {
        let tm = self.monodromy(u - self.eta())?;
        let tp = self.monodromy(u + self.eta())?;
        Ok((&tm.a * &tp.d + &tm.d * &tp.a - &tm.b * &tp.c - &tm.c * &tp.b) * Complex64::new(0.5, 0.0))
    }

    /// Same quantity as a partial trace of `P^- T_1(u - eta) T_2(u + eta)`.
    pub fn quantum_determinant_by_antisymmetrizer(&self, u: Complex64) -> Result<CMatrix> {
        let n = self.dim();
        let t1 = self.monodromy(u - self.eta())?.in_double_aux(0);
        let t2 = self.monodromy(u + self.eta())?.in_double_aux(1);
        let full = kron(&antisymmetrizer(), &identity(n)) * t1 * t2;
        let mut out = CMatrix::zeros(n, n);
        for k in 0..4 {
            out += full.view((k * n, k * n), (n, n));
        }
        Ok(out)
    }

    /// `Delta_+` (`sign > 0`) or `Delta_-` at `u`.
    pub fn delta_pm(&self, sign: i32, u: Complex64) -> Result<Complex64> {
        delta_pm(sign, u, self.spec.sites(), self.eta(), self.ctx())
    }

    /// `Delta_-(u - eta) Delta_+(u + eta)`.
    pub fn quantum_determinant_value(&self, u: Complex64) -> Result<Complex64> {
        Ok(self.delta_pm(-1, u - self.eta())? * self.delta_pm(1, u + self.eta())?)
    }
}

/// `Delta_\pm(u) = prod_n theta_11(u - z_n \pm 2 ell_n eta) / theta_11(u - z_n)`.
pub fn delta_pm(sign: i32, u: Complex64, sites: &[Site], eta: Complex64, ctx: &ModulusContext) -> Result<Complex64> {
    let s = if sign >= 0 { 1.0 } else { -1.0 };
    let mut out = Complex64::new(1.0, 0.0);
    for site in sites {
        let x = u - site.z;
        ctx.guard(x, "Delta_pm")?;
        out *= theta(ThetaChar::C11, x + eta * (s * site.spin.twice() as f64), ctx) / theta(ThetaChar::C11, x, ctx);
    }
    Ok(out)
}

/// Relative residual of `R_12(u - v) T_1(u) T_2(v) = T_2(v) T_1(u) R_12(u - v)`.
pub fn fundamental_relation_residual(r: &CMatrix, tu: &AuxBlocks, tv: &AuxBlocks) -> f64 {
    let n = tu.dim();
    let r_full = kron(r, &identity(n));
    let t1 = tu.in_double_aux(0);
    let t2 = tv.in_double_aux(1);
    let lhs = &r_full * &t1 * &t2;
    let rhs = &t2 * &t1 * &r_full;
    (lhs - &rhs).norm() / (r_full.norm() * t1.norm() * t2.norm())
}

/// Single-site RLL residual for `rep`; the R-matrix is built with `r_eta`
/// (equal to the representation's `eta` unless a corrupted value is probed).
pub fn rll_residual(rep: &SklyaninRep, u: Complex64, v: Complex64, r_eta: Complex64) -> Result<f64> {
    let ctx = rep.basis().ctx();
    let lu = local_l_operator(rep.generators(), u, rep.eta(), ctx)?;
    let lv = local_l_operator(rep.generators(), v, rep.eta(), ctx)?;
    let r = r_matrix(u - v, r_eta, ctx)?;
    Ok(fundamental_relation_residual(&r, &lu, &lv))
}

/// Relative residual of the Yang-Baxter equation on `(C^2)^{(x)3}`.
pub fn yang_baxter_residual(u: Complex64, v: Complex64, eta: Complex64, ctx: &ModulusContext) -> Result<f64> {
    let s = pauli();
    let one = identity(2);
    let mut r12 = CMatrix::zeros(8, 8);
    let mut r13 = CMatrix::zeros(8, 8);
    let mut r23 = CMatrix::zeros(8, 8);
    for (a, sa) in s.iter().enumerate() {
        r12 += kron(&kron(sa, sa), &one) * weight_r(a, u - v, eta, ctx)?;
        r13 += kron(&kron(sa, &one), sa) * weight_r(a, u, eta, ctx)?;
        r23 += kron(&kron(&one, sa), sa) * weight_r(a, v, eta, ctx)?;
    }
    let lhs = &r12 * &r13 * &r23;
    let rhs = &r23 * &r13 * &r12;
    Ok((&lhs - &rhs).norm() / lhs.norm())
}

/// Off-scalar part `|X - (tr X / n) 1|` relative to `|X|`.
pub fn off_scalar_part(x: &CMatrix) -> f64 {
    let n = x.nrows();
    let mean = x.trace() / n as f64;
    (x - identity(n) * mean).norm() / x.norm().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::commutator;
    use crate::sklyanin::rep_matrices;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ctx() -> ModulusContext {
        ModulusContext::new(c(0.0, 1.0)).unwrap()
    }

    fn two_site(eta: f64) -> Chain {
        let sites = vec![Site::new(Spin::HALF, c(0.13, 0.0)), Site::new(Spin::ONE, c(-0.21, 0.05))];
        Chain::new(ChainSpec::new(sites, c(eta, 0.0), ctx()).unwrap(), 3).unwrap()
    }

    #[test]
    fn aux_constants() {
        let s = pauli();
        let p = antisymmetrizer();
        assert!((&p * &p - &p).norm() < 1e-15);
        assert!((p.trace() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((&s[1] * &s[2] - &s[3] * I).norm() < 1e-15);
        assert!((&s[2] * &s[2] - &s[0]).norm() < 1e-15);
    }

    #[test]
    fn weight_zero_is_constant() {
        let ctx = ctx();
        let eta = c(0.1, 0.0);
        let w: Vec<Complex64> = (0..10).map(|k| weight_l(0, c(0.05 * k as f64 + 0.03, 0.1), eta, &ctx).unwrap()).collect();
        assert!(w.iter().all(|x| (x - w[0]).norm() < 1e-15));
        let u = c(0.21, 0.17);
        let ratio = weight_l(1, u, eta, &ctx).unwrap() / weight_l(0, u, eta, &ctx).unwrap();
        let direct = theta(ThetaChar::C11, eta, &ctx) * theta(ThetaChar::C10, u, &ctx)
            / (theta(ThetaChar::C10, eta, &ctx) * theta(ThetaChar::C11, u, &ctx));
        assert!((ratio - direct).norm() < 1e-13);
        assert!(weight_l(2, c(1.0, 1.0), eta, &ctx).is_err());
    }

    #[test]
    fn r_matrix_weights_and_yang_baxter() {
        let ctx = ModulusContext::new(c(0.1, 0.8)).unwrap();
        let eta = c(0.07, 0.0);
        assert!((weight_r(0, c(0.3, 0.2), eta, &ctx).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(yang_baxter_residual(c(0.23, 0.11), c(-0.17, 0.3), eta, &ctx).unwrap() < 1e-9);
    }

    #[test]
    fn rll_single_site() {
        let ctx = ctx();
        let eta = c(0.1, 0.0);
        for two_ell in 1..=2 {
            let rep = rep_matrices(Spin::from_twice(two_ell).unwrap(), eta, &ctx, 2).unwrap();
            let r = rll_residual(&rep, c(0.31, 0.12), c(-0.07, 0.33), eta).unwrap();
            assert!(r < 1e-8, "2ell={two_ell}: {r}");
            let bad = rll_residual(&rep, c(0.31, 0.12), c(-0.07, 0.33), -eta).unwrap();
            assert!(bad > 1e-3, "corrupted eta passes: {bad}");
        }
    }

    #[test]
    fn single_site_monodromy_is_shifted_l() {
        let sites = vec![Site::new(Spin::HALF, c(0.2, 0.1))];
        let chain = Chain::new(ChainSpec::new(sites, c(0.1, 0.0), ctx()).unwrap(), 1).unwrap();
        let u = c(0.37, 0.2);
        let t = chain.monodromy(u).unwrap();
        let l = chain.site_l_operator(0, u - c(0.2, 0.1)).unwrap();
        assert!((t.to_full() - l.to_full()).norm() < 1e-14);
    }

    #[test]
    fn fundamental_relation_for_chain() {
        let chain = two_site(0.1);
        let u = c(0.31, 0.12);
        let v = c(-0.07, 0.33);
        let r = r_matrix(u - v, chain.eta(), chain.ctx()).unwrap();
        let res = fundamental_relation_residual(&r, &chain.monodromy(u).unwrap(), &chain.monodromy(v).unwrap());
        assert!(res < 1e-8, "{res}");
    }

    #[test]
    fn transfer_matrices_commute() {
        let chain = two_site(0.1);
        let t1 = chain.transfer(c(0.31, 0.12)).unwrap();
        let t2 = chain.transfer(c(-0.07, 0.33)).unwrap();
        assert!(commutator(&t1, &t2).norm() / (t1.norm() * t2.norm()) < 1e-8);
    }

    #[test]
    fn quantum_determinant_is_the_scalar() {
        let chain = two_site(0.1);
        let u = c(0.27, 0.19);
        let q = chain.quantum_determinant(u).unwrap();
        assert!(off_scalar_part(&q) < 1e-8);
        let value = chain.quantum_determinant_value(u).unwrap();
        assert!((q[(0, 0)] - value).norm() / value.norm() < 1e-8);
        let literal = chain.quantum_determinant_by_antisymmetrizer(u).unwrap();
        assert!((literal - q).norm() / value.norm() < 1e-10);
        for n in 0..2 {
            for a in 0..4 {
                let s = chain.embedded_generator(n, a);
                assert!(commutator(&chain.quantum_determinant(u).unwrap(), s).norm() / s.norm() < 1e-8);
            }
        }
    }

    #[test]
    fn delta_at_zero_eta_is_one() {
        let sites = vec![Site::new(Spin::HALF, c(0.13, 0.0)), Site::new(Spin::ONE, c(-0.21, 0.0))];
        let v = delta_pm(1, c(0.3, 0.2), &sites, c(0.0, 0.0), &ctx()).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        let ctx = ctx();
        let dup = vec![Site::new(Spin::HALF, c(0.1, 0.0)), Site::new(Spin::HALF, c(1.1, 0.0))];
        assert!(matches!(ChainSpec::new(dup, c(0.1, 0.0), ctx.clone()), Err(Error::CoincidentSites(0, 1))));
        let big: Vec<Site> = (0..13).map(|k| Site::new(Spin::HALF, c(0.07 * k as f64, 0.0))).collect();
        assert!(matches!(ChainSpec::new(big, c(0.1, 0.0), ctx.clone()), Err(Error::DimensionCap { .. })));
        let odd = ChainSpec::new(vec![Site::new(Spin::HALF, c(0.0, 0.0))], c(0.1, 0.0), ctx).unwrap();
        assert!(matches!(odd.magnon_count(), Err(Error::NonIntegerTotalSpin(1))));
    }
}
