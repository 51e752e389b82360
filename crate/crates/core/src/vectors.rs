//! Bethe vectors: gauge matrices, twisted monodromy, pseudovacua, the XYZ
//! states `Phi_lambda` and `Psi_nu`, and the Gaudin eigenvector `psi_nu`.
//!
//! Gaudin vectors are obtained from the XYZ construction: `Phi_lambda / eta^M`
//! is fitted over an `eta` ladder on shared bases, and the leading coefficient
//! `phi_lambda` is integrated against `exp(pi i nu lambda)` over one period.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bethe::{gaudin_eigenvalue, xyz_eigenvalue, BetheSolution};
use crate::elliptic::{theta, ModulusContext, ThetaChar};
use crate::error::{Error, Result};
use crate::gaudin::{GaudinModel, GaudinSpec};
use crate::lattice::{AuxBlocks, Chain, ChainSpec};
use crate::linalg::{line_angle, polyfit, product_state};
use crate::CVector;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const PI: f64 = std::f64::consts::PI;

/// Geometric `eta` ladder for extracting `phi_lambda`.
pub const VECTOR_ETA_LADDER: [f64; 4] = [2e-3, 1e-3, 5e-4, 2.5e-4];

/// Smallest admissible `|det M_lambda(u)|`.
pub const GAUGE_DET_GUARD: f64 = 1e-8;

/// Modulus data for gauge matrices (they mix `tau` and `tau / 2` thetas).
#[derive(Clone, Debug)]
pub struct Gauge {
    ctx: ModulusContext,
    half: ModulusContext,
}

impl Gauge {
    pub fn new(ctx: &ModulusContext) -> Result<Self> {
        Ok(Gauge { ctx: ctx.clone(), half: ctx.halved()? })
    }

    /// `M_lambda(u)`: rows `(-theta_01(x; tau/2), -theta_01(y; tau/2))` and
    /// `(theta_00(x; tau/2), theta_00(y; tau/2))` with `x = (lambda - u)/2`,
    /// `y = (lambda + u)/2`, second column divided by `theta_11(lambda; tau)`.
    pub fn matrix(&self, lambda: Complex64, u: Complex64) -> Result<[[Complex64; 2]; 2]> {
        self.ctx.guard(lambda, "gauge normalization theta_11(lambda)")?;
        let norm = theta(ThetaChar::C11, lambda, &self.ctx);
        let x = (lambda - u) * 0.5;
        let y = (lambda + u) * 0.5;
        let m = [
            [-theta(ThetaChar::C01, x, &self.half), -theta(ThetaChar::C01, y, &self.half) / norm],
            [theta(ThetaChar::C00, x, &self.half), theta(ThetaChar::C00, y, &self.half) / norm],
        ];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if !(det.norm() > GAUGE_DET_GUARD) {
            return Err(Error::Singular { what: "gauge matrix" });
        }
        Ok(m)
    }

    pub fn inverse(&self, lambda: Complex64, u: Complex64) -> Result<[[Complex64; 2]; 2]> {
        let m = self.matrix(lambda, u)?;
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        Ok([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
    }
}

/// `M_lambda(u)` for a single evaluation.
pub fn gauge_matrix(lambda: Complex64, u: Complex64, ctx: &ModulusContext) -> Result<[[Complex64; 2]; 2]> {
    Gauge::new(ctx)?.matrix(lambda, u)
}

/// `T_{lambda, lambda'}(u; v) = M_lambda(u + v)^{-1} T(u) M_lambda'(u + v)`.
pub fn twisted_monodromy(
    chain: &Chain,
    gauge: &Gauge,
    lambda: Complex64,
    lambda_prime: Complex64,
    u: Complex64,
    v: Complex64,
) -> Result<AuxBlocks> {
    let left = gauge.inverse(lambda, u + v)?;
    let right = gauge.matrix(lambda_prime, u + v)?;
    Ok(chain.monodromy(u)?.sandwich(&left, &right))
}

/// Coordinates of `omega_lambda(v; y) = prod_{j=1}^{2 ell} theta_10(y + lambda/2 - v/2 + s_j)
/// theta_10(y - lambda/2 + v/2 - s_j)`, `s_j = (2j - 3 ell - 1) eta`, in the basis of site `n`.
pub fn local_pseudovacuum(chain: &Chain, n: usize, lambda: Complex64, v: Complex64) -> Result<CVector> {
    let rep = chain.reps().get(n).ok_or(Error::IndexOutOfRange { what: "site", index: n })?;
    let basis = rep.basis();
    let ctx = basis.ctx();
    let spin = rep.spin();
    let eta = chain.eta();
    let ell = spin.ell();
    let omega = |y: Complex64| {
        let mut p = Complex64::new(1.0, 0.0);
        for j in 1..=spin.twice() {
            let s = eta * (2.0 * j as f64 - 3.0 * ell - 1.0);
            let a = (lambda - v) * 0.5;
            p *= theta(ThetaChar::C10, y + a + s, ctx) * theta(ThetaChar::C10, y - a - s, ctx);
        }
        p
    };
    basis.expand(omega, "local pseudovacuum")
}

/// `Omega^lambda(v) = omega_{lambda + 4 (ell_1 + .. + ell_N) eta}(v + z_N) (x) .. (x) omega_{lambda + 4 ell_1 eta}(v + z_1)`.
pub fn global_pseudovacuum(chain: &Chain, lambda: Complex64, v: Complex64) -> Result<CVector> {
    let eta = chain.eta();
    let mut cumulative = 0.0;
    let mut factors = Vec::with_capacity(chain.spec().len());
    for (n, site) in chain.spec().sites().iter().enumerate() {
        cumulative += site.spin.ell();
        factors.push(local_pseudovacuum(chain, n, lambda + eta * (4.0 * cumulative), v + site.z)?);
    }
    Ok(product_state(&factors))
}

/// `|C_{lambda + 4 ell_total eta, lambda}(u; v) Omega^lambda(v)| / (|C| |Omega|)`.
pub fn pseudovacuum_annihilation(chain: &Chain, lambda: Complex64, u: Complex64, v: Complex64) -> Result<f64> {
    let gauge = Gauge::new(chain.ctx())?;
    let total = chain.spec().total_twice_spin() as f64 * 0.5;
    let t = twisted_monodromy(chain, &gauge, lambda + chain.eta() * (4.0 * total), lambda, u, v)?;
    let omega = global_pseudovacuum(chain, lambda, v)?;
    Ok((&t.c * &omega).norm() / (t.c.norm() * omega.norm()))
}

/// Twist indices of the `j`-th B-operator (1-based) in `Phi_lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexPattern {
    /// `B_{lambda + 2 j eta, lambda - 2 j eta}` for every `j`.
    Symmetric,
    /// As printed: the second factor is `B_{lambda + 4 eta, lambda + 4 eta}`.
    Literal,
}

impl IndexPattern {
    fn indices(self, lambda: Complex64, j: usize, eta: Complex64) -> (Complex64, Complex64) {
        let shift = eta * (2.0 * j as f64);
        match self {
            IndexPattern::Literal if j == 2 => (lambda + shift, lambda + shift),
            _ => (lambda + shift, lambda - shift),
        }
    }
}

/// `Phi_lambda(w; v) = B_1(w_1) .. B_M(w_M) Omega^{lambda - 2 M eta}(v)`.
pub fn bethe_state_phi(
    chain: &Chain,
    gauge: &Gauge,
    lambda: Complex64,
    roots: &[Complex64],
    v: Complex64,
    pattern: IndexPattern,
) -> Result<CVector> {
    let eta = chain.eta();
    let m = roots.len();
    let mut state = global_pseudovacuum(chain, lambda - eta * (2.0 * m as f64), v)?;
    for j in (1..=m).rev() {
        let (a, b) = pattern.indices(lambda, j, eta);
        let t = twisted_monodromy(chain, gauge, a, b, roots[j - 1], v)?;
        state = &t.b * state;
    }
    Ok(state)
}

fn theta11(x: Complex64, ctx: &ModulusContext) -> Complex64 {
    theta(ThetaChar::C11, x, ctx)
}

/// `Lambda(u; w; s eta) = Delta_s(u) prod_m theta_11(u - w_m - 2 s eta) / theta_11(u - w_m)`.
pub fn lambda_coeff(chain: &Chain, u: Complex64, roots: &[Complex64], sign: i32) -> Result<Complex64> {
    let ctx = chain.ctx();
    let e = chain.eta() * sign as f64;
    let mut p = chain.delta_pm(sign, u)?;
    for &w in roots {
        ctx.guard(u - w, "Lambda coefficient")?;
        p *= theta11(u - w - e * 2.0, ctx) / theta11(u - w, ctx);
    }
    Ok(p)
}

/// `Lambda_j^lambda(u; w; s eta)` for the term where `w_j` is replaced by `u`.
pub fn lambda_j_coeff(
    chain: &Chain,
    lambda: Complex64,
    u: Complex64,
    roots: &[Complex64],
    j: usize,
    sign: i32,
) -> Result<Complex64> {
    let ctx = chain.ctx();
    let e = chain.eta() * sign as f64;
    let wj = roots[j];
    ctx.guard(u - wj, "Lambda_j coefficient")?;
    ctx.guard(lambda - e * 2.0, "Lambda_j coefficient")?;
    let mut p = theta11(-e * 2.0, ctx) * theta11(u - wj - (lambda - e * 2.0), ctx)
        / (theta11(u - wj, ctx) * theta11(lambda - e * 2.0, ctx));
    p *= chain.delta_pm(sign, wj)?;
    for (k, &wk) in roots.iter().enumerate() {
        if k != j {
            ctx.guard(wj - wk, "Lambda_j coefficient")?;
            p *= theta11(wj - wk - e * 2.0, ctx) / theta11(wj - wk, ctx);
        }
    }
    Ok(p)
}

/// Relative residual of the exact identity for `t(u) Phi_lambda(w)`.
pub fn t_phi_identity_residual(
    chain: &Chain,
    u: Complex64,
    lambda: Complex64,
    roots: &[Complex64],
    v: Complex64,
    pattern: IndexPattern,
) -> Result<f64> {
    let gauge = Gauge::new(chain.ctx())?;
    let eta2 = chain.eta() * 2.0;
    let phi = |l: Complex64, w: &[Complex64]| bethe_state_phi(chain, &gauge, l, w, v, pattern);
    let base = phi(lambda, roots)?;
    let lhs = chain.transfer(u)? * &base;
    let mut rhs = phi(lambda - eta2, roots)? * lambda_coeff(chain, u, roots, 1)?
        + phi(lambda + eta2, roots)? * lambda_coeff(chain, u, roots, -1)?;
    for j in 0..roots.len() {
        let mut swapped = roots.to_vec();
        swapped[j] = u;
        rhs += phi(lambda - eta2, &swapped)? * lambda_j_coeff(chain, lambda, u, roots, j, 1)?;
        rhs += phi(lambda + eta2, &swapped)? * lambda_j_coeff(chain, lambda, u, roots, j, -1)?;
    }
    Ok((lhs - rhs).norm() / base.norm())
}

/// Seeded base point for `lambda`, kept away from the lattice (and its half points).
pub fn pick_lambda(ctx: &ModulusContext, seed: u64) -> Complex64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let s: f64 = rng.random_range(-0.5..0.5);
        let t: f64 = rng.random_range(0.1..0.9);
        let l = ctx.tau() * t + s;
        if ctx.lattice_distance(l * 2.0) > 0.1 {
            return l;
        }
    }
}

/// A state together with the quantities used to judge it.
#[derive(Clone, Debug)]
pub struct VerifiedVector {
    pub state: CVector,
    /// `|X v - x v| / |v|` at each probe.
    pub eigen_residuals: Vec<f64>,
    /// Norm of the state relative to the size of its building blocks; small
    /// values mean the construction cancelled to (numerically) zero.
    pub null_ratio: f64,
}

fn eta_denominator(eta: Complex64, r: usize) -> Result<()> {
    let x = eta * r as f64;
    if r == 0 || x.im.abs() > 1e-12 || (x.re - x.re.round()).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("eta = {eta} is not a multiple of 1/{r}")));
    }
    Ok(())
}

/// `Psi_nu = sum_{a=0}^{r-1} exp(2 pi i nu a eta) Phi_{lambda + 2 a eta}(w)` for
/// `eta` a multiple of `1/r`, checked against `t(u)` at the probes.
pub fn xyz_eigenvector(
    chain: &Chain,
    sol: &BetheSolution,
    lambda: Complex64,
    v: Complex64,
    r: usize,
    probes: &[Complex64],
) -> Result<VerifiedVector> {
    let eta = chain.eta();
    eta_denominator(eta, r)?;
    let gauge = Gauge::new(chain.ctx())?;
    let mut psi = CVector::zeros(chain.dim());
    let mut scale = 0.0;
    for a in 0..r {
        let phase = (I * (2.0 * PI * sol.nu as f64 * a as f64) * eta).exp();
        let phi = bethe_state_phi(chain, &gauge, lambda + eta * (2.0 * a as f64), &sol.roots, v, IndexPattern::Symmetric)?;
        scale += phi.norm() * phase.norm();
        psi += phi * phase;
    }
    let spec = chain.spec();
    let mut eigen_residuals = Vec::with_capacity(probes.len());
    for &u in probes {
        let t = xyz_eigenvalue(u, sol, spec)?;
        eigen_residuals.push((chain.transfer(u)? * &psi - &psi * t).norm() / psi.norm());
    }
    Ok(VerifiedVector { null_ratio: psi.norm() / scale, state: psi, eigen_residuals })
}

/// Chains on shared bases at every `eta` of a ladder.
#[derive(Clone, Debug)]
pub struct EtaLadder {
    etas: Vec<f64>,
    chains: Vec<Chain>,
    gauge: Gauge,
}

impl EtaLadder {
    /// Ladder built on the bases of `chain`.
    pub fn new(chain: &Chain, etas: &[f64]) -> Result<Self> {
        if etas.len() < 3 {
            return Err(Error::InvalidArgument("an eta ladder needs at least 3 values".into()));
        }
        let chains = etas.iter().map(|&e| chain.at_eta(Complex64::new(e, 0.0))).collect::<Result<Vec<_>>>()?;
        Ok(EtaLadder { etas: etas.to_vec(), chains, gauge: Gauge::new(chain.ctx())? })
    }

    /// Seeded bases for a Gaudin spec with [`VECTOR_ETA_LADDER`].
    pub fn for_gaudin(spec: &GaudinSpec, seed: u64) -> Result<Self> {
        Self::for_gaudin_with(spec, seed, &VECTOR_ETA_LADDER)
    }

    pub fn for_gaudin_with(spec: &GaudinSpec, seed: u64, etas: &[f64]) -> Result<Self> {
        let first = *etas.first().ok_or_else(|| Error::InvalidArgument("empty eta ladder".into()))?;
        let chain = Chain::new(spec.chain_spec(Complex64::new(first, 0.0))?, seed)?;
        Self::new(&chain, etas)
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn chain_spec(&self) -> &ChainSpec {
        self.chains[0].spec()
    }

    /// The Gaudin model in the same theta bases.
    pub fn gaudin_model(&self) -> Result<GaudinModel> {
        GaudinModel::for_chain(&self.chains[0])
    }

    /// `Phi_lambda(w; v) / eta^M` at every rung.
    pub fn scaled_phis(&self, lambda: Complex64, roots: &[Complex64], v: Complex64) -> Result<Vec<CVector>> {
        let m = roots.len() as i32;
        self.chains
            .iter()
            .zip(&self.etas)
            .map(|(chain, &e)| {
                Ok(bethe_state_phi(chain, &self.gauge, lambda, roots, v, IndexPattern::Symmetric)? / Complex64::new(e.powi(m), 0.0))
            })
            .collect()
    }
}

/// Relative disagreement tolerated between fit orders in [`gaudin_phi`].
pub const FIT_STABILITY_TOL: f64 = 1e-5;

/// Leading coefficient of `Phi_lambda / eta^M` and the relative change when
/// the fit order is lowered by one.
#[derive(Clone, Debug)]
pub struct PhiExtraction {
    pub phi: CVector,
    pub disagreement: f64,
}

/// Polynomial fit of `Phi_lambda / eta^M` over the ladder (order `min(3, len - 1)`).
pub fn extract_phi(ladder: &EtaLadder, lambda: Complex64, roots: &[Complex64], v: Complex64) -> Result<PhiExtraction> {
    let samples = ladder.scaled_phis(lambda, roots, v)?;
    let etas = ladder.etas();
    let order = (etas.len() - 1).min(3);
    let phi = polyfit(etas, &samples, order)?.swap_remove(0);
    let low = polyfit(etas, &samples, order - 1)?.swap_remove(0);
    let disagreement = (&phi - &low).norm() / phi.norm().max(f64::MIN_POSITIVE);
    Ok(PhiExtraction { phi, disagreement })
}

/// `phi_lambda(w; v)`: the `eta -> 0` limit of `Phi_lambda / eta^M`, rejected
/// when the fit is not stable to [`FIT_STABILITY_TOL`].
pub fn gaudin_phi(ladder: &EtaLadder, lambda: Complex64, roots: &[Complex64], v: Complex64) -> Result<CVector> {
    let ex = extract_phi(ladder, lambda, roots, v)?;
    if !(ex.disagreement < FIT_STABILITY_TOL) {
        return Err(Error::UnstableExtraction { what: "phi_lambda", disagreement: ex.disagreement });
    }
    Ok(ex.phi)
}

/// Richardson table for `phi_lambda` from `Phi_lambda / eta^M` at `eta, eta/2, .., eta/2^(levels-1)`.
pub fn richardson_phi(
    chain: &Chain,
    eta: f64,
    levels: usize,
    lambda: Complex64,
    roots: &[Complex64],
    v: Complex64,
) -> Result<CVector> {
    if levels < 2 {
        return Err(Error::InvalidArgument("Richardson extrapolation needs at least 2 levels".into()));
    }
    let etas: Vec<f64> = (0..levels).map(|k| eta / f64::powi(2.0, k as i32)).collect();
    let chains = etas.iter().map(|&e| chain.at_eta(Complex64::new(e, 0.0))).collect::<Result<Vec<_>>>()?;
    let ladder = EtaLadder { etas, chains, gauge: Gauge::new(chain.ctx())? };
    let mut row = ladder.scaled_phis(lambda, roots, v)?;
    for k in 1..levels {
        let f = f64::powi(2.0, k as i32);
        row = row.windows(2).map(|w| (&w[1] * Complex64::new(f, 0.0) - &w[0]) / Complex64::new(f - 1.0, 0.0)).collect();
    }
    Ok(row.swap_remove(0))
}

/// Gaudin eigenvector with its quadrature diagnostics.
#[derive(Clone, Debug)]
pub struct GaudinVector {
    pub vector: VerifiedVector,
    /// `|psi_K - psi_2K| / |psi_2K|`.
    pub quadrature_change: f64,
    /// Largest fit-order disagreement of `phi_lambda` over the nodes.
    pub fit_disagreement: f64,
}

/// `psi_nu(w) = int exp(pi i nu lambda) phi_lambda(w; v) d lambda` over one
/// period, on the line `Im lambda = Im tau / 2` (`phi_lambda` has poles on the
/// real axis), by the `K`-point trapezoid rule; also evaluated with `2K` points.
/// The fit stability of `phi_lambda` is reported, not enforced: for spurious
/// roots `phi_lambda` cancels to rounding level and the relative disagreement
/// is meaningless.
pub fn gaudin_eigenvector(
    ladder: &EtaLadder,
    sol: &BetheSolution,
    v: Complex64,
    nodes: usize,
    probes: &[Complex64],
) -> Result<GaudinVector> {
    if nodes < 16 {
        return Err(Error::InvalidArgument(format!("at least 16 quadrature nodes are required, got {nodes}")));
    }
    let kappa = ladder.chains[0].ctx().tau().im * 0.5;
    let integrate = |k: usize| -> Result<(CVector, f64, f64)> {
        let mut psi = CVector::zeros(ladder.chains[0].dim());
        let mut scale = 0.0;
        let mut worst: f64 = 0.0;
        let h = 2.0 / k as f64;
        for i in 0..k {
            let lambda = Complex64::new(-1.0 + h * i as f64, kappa);
            let phase = (I * (PI * sol.nu as f64) * lambda).exp();
            let ex = extract_phi(ladder, lambda, &sol.roots, v)?;
            worst = if ex.disagreement.is_nan() { f64::NAN } else { worst.max(ex.disagreement) };
            let phi = ex.phi;
            scale += phi.norm() * phase.norm() * h;
            psi += phi * (phase * h);
        }
        Ok((psi, scale, worst))
    };
    let (coarse, _, _) = integrate(nodes)?;
    let (fine, scale, fit_disagreement) = integrate(2 * nodes)?;
    let quadrature_change = (&coarse - &fine).norm() / fine.norm().max(f64::MIN_POSITIVE);
    let model = ladder.gaudin_model()?;
    let spec = model.spec().clone();
    let mut eigen_residuals = Vec::with_capacity(probes.len());
    for &u in probes {
        let tau = gaudin_eigenvalue(u, sol, &spec)?;
        eigen_residuals.push((model.tau_hat(u)? * &fine - &fine * tau).norm() / fine.norm());
    }
    Ok(GaudinVector {
        vector: VerifiedVector { null_ratio: fine.norm() / scale, state: fine, eigen_residuals },
        quadrature_change,
        fit_disagreement,
    })
}

/// Sine of the angle between two state directions.
pub fn direction_gap(a: &CVector, b: &CVector) -> f64 {
    line_angle(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Site;
    use crate::sklyanin::Spin;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn chain(sites: Vec<Site>, eta: f64) -> Chain {
        let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
        Chain::new(ChainSpec::new(sites, c(eta, 0.0), ctx).unwrap(), 1).unwrap()
    }

    fn desk(eta: f64) -> Chain {
        chain(vec![Site::new(Spin::HALF, c(0.13, 0.0)), Site::new(Spin::HALF, c(-0.21, 0.0))], eta)
    }

    #[test]
    fn gauge_entries_and_determinant() {
        let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
        let half = ModulusContext::new(c(0.0, 0.5)).unwrap();
        let (l, u) = (c(0.3, 0.4), c(-0.2, 0.1));
        let m = gauge_matrix(l, u, &ctx).unwrap();
        assert!((m[1][0] - theta(ThetaChar::C00, (l - u) * 0.5, &half)).norm() < 1e-14);
        let raw = -theta(ThetaChar::C01, (l + u) * 0.5, &half);
        assert!((m[0][1] * theta(ThetaChar::C11, l, &ctx) - raw).norm() < 1e-13);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let l = c(rng.random_range(-0.5..0.5), rng.random_range(0.1..0.9));
            let u = c(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
            let m = gauge_matrix(l, u, &ctx).unwrap();
            assert!((m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm() > 1e-8);
        }
    }

    #[test]
    fn twisted_trace_is_transfer() {
        let ch = desk(0.1);
        let gauge = Gauge::new(ch.ctx()).unwrap();
        let (l, u, v) = (c(0.3, 0.4), c(0.27, 0.11), c(0.05, 0.02));
        let t = twisted_monodromy(&ch, &gauge, l, l, u, v).unwrap();
        assert!((t.trace() - ch.transfer(u).unwrap()).norm() < 1e-10 * t.trace().norm());
    }

    #[test]
    fn pseudovacuum_is_annihilated() {
        for sites in [
            vec![Site::new(Spin::HALF, c(0.13, 0.0))],
            vec![Site::new(Spin::ONE, c(0.13, 0.0))],
            vec![Site::new(Spin::HALF, c(0.13, 0.0)), Site::new(Spin::ONE, c(-0.21, 0.0))],
        ] {
            let ch = chain(sites, 0.1);
            let r = pseudovacuum_annihilation(&ch, c(0.3, 0.4), c(0.27, 0.11), c(0.05, 0.02)).unwrap();
            assert!(r < 1e-7, "{r}");
        }
    }

    #[test]
    fn t_phi_identity_one_root() {
        let ch = desk(1.0 / 7.0);
        let r = t_phi_identity_residual(&ch, c(0.27, 0.11), c(0.3, 0.4), &[c(0.07, 0.21)], c(0.05, 0.02), IndexPattern::Symmetric)
            .unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn t_phi_identity_two_roots_pins_pattern() {
        let ch = chain(vec![Site::new(Spin::ONE, c(0.13, 0.0)), Site::new(Spin::ONE, c(-0.21, 0.0))], 0.1);
        let args = (c(0.27, 0.11), c(0.3, 0.4), [c(0.07, 0.21), c(-0.33, 0.35)], c(0.05, 0.02));
        let good = t_phi_identity_residual(&ch, args.0, args.1, &args.2, args.3, IndexPattern::Symmetric).unwrap();
        let bad = t_phi_identity_residual(&ch, args.0, args.1, &args.2, args.3, IndexPattern::Literal).unwrap();
        assert!(good < 1e-6, "{good}");
        assert!(bad > 1e-2, "{bad}");
    }

    #[test]
    fn rational_eta_eigenvector() {
        let ch = desk(0.2);
        let spec = ch.spec().clone();
        let sols = crate::bethe::solve_xyz(&spec, 0, 1, None, &crate::bethe::SolverOptions::default()).unwrap();
        let probes = [c(0.31, 0.2), c(-0.17, 0.43), c(0.02, 0.71)];
        let mut best: f64 = f64::INFINITY;
        for sol in &sols {
            let v = xyz_eigenvector(&ch, sol, c(0.3, 0.4), c(0.05, 0.02), 5, &probes).unwrap();
            if v.null_ratio > 1e-6 {
                best = best.min(v.eigen_residuals.iter().cloned().fold(0.0, f64::max));
            }
        }
        assert!(best < 1e-7, "{best}");
    }
}
