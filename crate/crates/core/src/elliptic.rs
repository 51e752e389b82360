//! Theta functions and the Weierstrass functions built from them.
//!
//! Everything here is evaluated from a single truncated q-series,
//!
//! ```text
//! theta_ab(z; tau) = sum_n exp(pi i (n + a/2)^2 tau + 2 pi i (n + a/2)(z + b/2)),
//! ```
//!
//! after reducing `z` into the cell `|Re z| <= 1/2`, `|Im z| <= Im(tau)/2`
//! with the exact quasi-periodicity factors. The Weierstrass functions use the
//! lattice `Z + tau Z` (periods `1` and `tau`).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Evaluations closer than this to a pole are rejected.
pub const POLE_GUARD: f64 = 1e-8;

/// Default absolute accuracy of the theta series.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_TERM_BOUND: i64 = 400;

/// Characteristic `ab` of `theta_ab`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ThetaChar {
    C00,
    C01,
    C10,
    C11,
}

impl ThetaChar {
    pub const ALL: [ThetaChar; 4] = [ThetaChar::C00, ThetaChar::C01, ThetaChar::C10, ThetaChar::C11];

    pub fn new(a: u8, b: u8) -> Result<Self> {
        match (a, b) {
            (0, 0) => Ok(ThetaChar::C00),
            (0, 1) => Ok(ThetaChar::C01),
            (1, 0) => Ok(ThetaChar::C10),
            (1, 1) => Ok(ThetaChar::C11),
            _ => Err(Error::InvalidCharacteristic { a, b }),
        }
    }

    pub fn a(self) -> u8 {
        matches!(self, ThetaChar::C10 | ThetaChar::C11) as u8
    }

    pub fn b(self) -> u8 {
        matches!(self, ThetaChar::C01 | ThetaChar::C11) as u8
    }

    /// `theta_11` is odd, the other three are even.
    pub fn is_odd(self) -> bool {
        self == ThetaChar::C11
    }

    /// Characteristic attached to the index `a = 1, 2, 3` of the structure
    /// functions `w_a` and of the Sklyanin generators: `10`, `00`, `01`.
    pub fn for_component(a: usize) -> Result<Self> {
        match a {
            0 => Ok(ThetaChar::C11),
            1 => Ok(ThetaChar::C10),
            2 => Ok(ThetaChar::C00),
            3 => Ok(ThetaChar::C01),
            _ => Err(Error::IndexOutOfRange { what: "component index", index: a }),
        }
    }
}

#[derive(Clone, Debug)]
struct ThetaConstants {
    /// `theta_ab(0)` indexed as `ThetaChar as usize`.
    null_values: [Complex64; 4],
    theta11_d1: Complex64,
    theta11_d3: Complex64,
    /// `e_1, e_2, e_3`.
    branch_points: [Complex64; 3],
    /// `zeta(omega_abar / 2)` for `a = 1, 2, 3`.
    zeta_half_periods: [Complex64; 3],
}

/// Elliptic modulus together with the truncation policy of the q-series.
#[derive(Clone, Debug)]
pub struct ModulusContext {
    tau: Complex64,
    term_bound: i64,
    tol: f64,
    consts: ThetaConstants,
}

impl ModulusContext {
    pub fn new(tau: Complex64) -> Result<Self> {
        Self::with_tolerance(tau, DEFAULT_TOL)
    }

    pub fn with_tolerance(tau: Complex64, tol: f64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() {
            return Err(Error::InvalidModulus(tau));
        }
        if !(tol >= 1e-16 && tol < 1.0) {
            return Err(Error::ToleranceUnreachable { tau, tol });
        }
        // After reduction |exp(2 pi i m z)| <= |q|^{-|m|}, so the m-th term is
        // bounded by |q|^{m^2 - |m|}; the margin of 2 covers the polynomial
        // growth of differentiated terms.
        let log_q = -PI * tau.im;
        let span = tol.ln() / log_q;
        let m = 0.5 * (1.0 + (1.0 + 4.0 * span).sqrt());
        let term_bound = m.ceil() as i64 + 2;
        if term_bound > MAX_TERM_BOUND {
            return Err(Error::ToleranceUnreachable { tau, tol });
        }
        let placeholder = ThetaConstants {
            null_values: [Complex64::new(0.0, 0.0); 4],
            theta11_d1: Complex64::new(0.0, 0.0),
            theta11_d3: Complex64::new(0.0, 0.0),
            branch_points: [Complex64::new(0.0, 0.0); 3],
            zeta_half_periods: [Complex64::new(0.0, 0.0); 3],
        };
        let mut ctx = ModulusContext { tau, term_bound, tol, consts: placeholder };
        let zero = Complex64::new(0.0, 0.0);
        for ch in ThetaChar::ALL {
            ctx.consts.null_values[ch as usize] = theta(ch, zero, &ctx);
        }
        let jet = theta_jet(ThetaChar::C11, zero, &ctx);
        ctx.consts.theta11_d1 = jet[1];
        ctx.consts.theta11_d3 = jet[3];
        for a in 1..=3 {
            let half = ctx.half_period(a)?;
            ctx.consts.branch_points[a - 1] = weierstrass_p(half, &ctx)?;
            ctx.consts.zeta_half_periods[a - 1] = weierstrass_zeta(half, &ctx)?;
        }
        Ok(ctx)
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn term_bound(&self) -> i64 {
        self.term_bound
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `|q|` with `q = exp(pi i tau)`.
    pub fn nome_abs(&self) -> f64 {
        (-PI * self.tau.im).exp()
    }

    /// Periods `omega_1 = 1`, `omega_2 = tau`, `omega_3 = 1 + tau`.
    pub fn period(&self, index: usize) -> Result<Complex64> {
        match index {
            1 => Ok(Complex64::new(1.0, 0.0)),
            2 => Ok(self.tau),
            3 => Ok(self.tau + 1.0),
            _ => Err(Error::IndexOutOfRange { what: "period index", index }),
        }
    }

    /// Half period `omega_abar / 2` paired with `a = 1, 2, 3`
    /// (`abar = 1, 3, 2`).
    pub fn half_period(&self, a: usize) -> Result<Complex64> {
        let bar = match a {
            1 => 1,
            2 => 3,
            3 => 2,
            _ => return Err(Error::IndexOutOfRange { what: "half period index", index: a }),
        };
        Ok(self.period(bar)? * 0.5)
    }

    /// Context for the modulus `tau / 2` with the same tolerance.
    pub fn halved(&self) -> Result<ModulusContext> {
        ModulusContext::with_tolerance(self.tau * 0.5, self.tol)
    }

    /// `theta_ab(0)`.
    pub fn theta_null(&self, ch: ThetaChar) -> Complex64 {
        self.consts.null_values[ch as usize]
    }

    /// `theta_11'(0)`.
    pub fn theta11_prime(&self) -> Complex64 {
        self.consts.theta11_d1
    }

    /// Distance from `u` to the nearest point of `Z + tau Z`.
    pub fn lattice_distance(&self, u: Complex64) -> f64 {
        let k0 = (u.im / self.tau.im).round();
        let mut best = f64::INFINITY;
        for dk in -1..=1 {
            let w = u - self.tau * (k0 + dk as f64);
            let m0 = w.re.round();
            for dm in -1..=1 {
                best = best.min((w - (m0 + dm as f64)).norm());
            }
        }
        best
    }

    pub(crate) fn guard(&self, u: Complex64, what: &'static str) -> Result<()> {
        if self.lattice_distance(u) < POLE_GUARD || !u.re.is_finite() || !u.im.is_finite() {
            Err(Error::Pole { what, at: u, guard: POLE_GUARD })
        } else {
            Ok(())
        }
    }
}

fn series_jet(ch: ThetaChar, z: Complex64, tau: Complex64, bound: i64) -> [Complex64; 4] {
    let a = ch.a() as f64 * 0.5;
    let b = ch.b() as f64 * 0.5;
    let mut out = [Complex64::new(0.0, 0.0); 4];
    let lo = if ch.a() == 1 { -bound - 1 } else { -bound };
    for n in lo..=bound {
        let m = n as f64 + a;
        let term = (I * PI * (tau * (m * m) + (z + b) * (2.0 * m))).exp();
        let k = I * (2.0 * PI * m);
        out[0] += term;
        out[1] += k * term;
        out[2] += k * k * term;
        out[3] += k * k * k * term;
    }
    out
}

/// Value and first three derivatives of `theta_ab` at `z`.
pub fn theta_jet(ch: ThetaChar, z: Complex64, ctx: &ModulusContext) -> [Complex64; 4] {
    let tau = ctx.tau;
    let k = (z.im / tau.im).round();
    let z1 = z - tau * k;
    let m = z1.re.round();
    let z0 = z1 - m;
    let base = series_jet(ch, z0, tau, ctx.term_bound);
    if k == 0.0 && m == 0.0 {
        return base;
    }
    let parity = (ch.a() as i64 * m as i64 + ch.b() as i64 * k as i64).rem_euclid(2);
    let sign = if parity == 0 { 1.0 } else { -1.0 };
    let prefactor = (-I * PI * (tau * (k * k) + z0 * (2.0 * k))).exp() * sign;
    // d/dz [exp(s z0) f(z0)] expanded with the binomial rule
    let s = -I * (2.0 * PI * k);
    let s2 = s * s;
    [
        prefactor * base[0],
        prefactor * (base[1] + s * base[0]),
        prefactor * (base[2] + s * base[1] * 2.0 + s2 * base[0]),
        prefactor * (base[3] + s * base[2] * 3.0 + s2 * base[1] * 3.0 + s2 * s * base[0]),
    ]
}

/// `theta_ab(z; tau)`.
pub fn theta(ch: ThetaChar, z: Complex64, ctx: &ModulusContext) -> Complex64 {
    theta_jet(ch, z, ctx)[0]
}

/// Derivative of order 1, 2 or 3 of `theta_ab` at `z`.
pub fn theta_deriv(ch: ThetaChar, order: u32, z: Complex64, ctx: &ModulusContext) -> Result<Complex64> {
    match order {
        1..=3 => Ok(theta_jet(ch, z, ctx)[order as usize]),
        _ => Err(Error::UnsupportedDerivativeOrder(order)),
    }
}

/// Logarithmic derivative `theta_11'(u) / theta_11(u)` and its derivative.
pub fn theta11_log_derivative(u: Complex64, ctx: &ModulusContext) -> Result<(Complex64, Complex64)> {
    ctx.guard(u, "theta_11 log-derivative")?;
    let jet = theta_jet(ThetaChar::C11, u, ctx);
    let rho = jet[1] / jet[0];
    Ok((rho, jet[2] / jet[0] - rho * rho))
}

/// Structure function `w_a(u) = theta_11' theta_ab(u) / (theta_ab theta_11(u))`
/// for `a = 1, 2, 3`; simple pole of residue 1 at the origin.
pub fn w_coeff(a: usize, u: Complex64, ctx: &ModulusContext) -> Result<Complex64> {
    if !(1..=3).contains(&a) {
        return Err(Error::IndexOutOfRange { what: "w_a index", index: a });
    }
    ctx.guard(u, "w_a")?;
    let ch = ThetaChar::for_component(a)?;
    Ok(ctx.theta11_prime() / ctx.theta_null(ch) * theta(ch, u, ctx) / theta(ThetaChar::C11, u, ctx))
}

// zeta(u) = theta_11'/theta_11 (u) + c u with c = -theta_11'''(0) / (3 theta_11'(0)),
// which removes the linear term of the Laurent expansion at 0.
fn zeta_linear_coeff(ctx: &ModulusContext) -> Complex64 {
    -ctx.consts.theta11_d3 / (ctx.consts.theta11_d1 * 3.0)
}

/// Weierstrass `zeta` for the lattice `Z + tau Z`.
pub fn weierstrass_zeta(u: Complex64, ctx: &ModulusContext) -> Result<Complex64> {
    ctx.guard(u, "weierstrass zeta")?;
    let jet = theta_jet(ThetaChar::C11, u, ctx);
    Ok(jet[1] / jet[0] + zeta_linear_coeff(ctx) * u)
}

/// Weierstrass `p` for the lattice `Z + tau Z`.
pub fn weierstrass_p(u: Complex64, ctx: &ModulusContext) -> Result<Complex64> {
    ctx.guard(u, "weierstrass p")?;
    let jet = theta_jet(ThetaChar::C11, u, ctx);
    let rho = jet[1] / jet[0];
    Ok(rho * rho - jet[2] / jet[0] - zeta_linear_coeff(ctx))
}

/// Derivative `p'(u)`.
pub fn weierstrass_p_deriv(u: Complex64, ctx: &ModulusContext) -> Result<Complex64> {
    ctx.guard(u, "weierstrass p'")?;
    let jet = theta_jet(ThetaChar::C11, u, ctx);
    let rho = jet[1] / jet[0];
    Ok(-(jet[3] / jet[0] - rho * jet[2] / jet[0] * 3.0 + rho * rho * rho * 2.0))
}

/// `(e_1, e_2, e_3)` with `e_a = p(omega_abar / 2)`.
pub fn branch_points(ctx: &ModulusContext) -> [Complex64; 3] {
    ctx.consts.branch_points
}

/// Invariants `(g2, g3)` assembled from the branch points.
pub fn invariants(ctx: &ModulusContext) -> (Complex64, Complex64) {
    let [e1, e2, e3] = ctx.consts.branch_points;
    (-(e1 * e2 + e2 * e3 + e3 * e1) * 4.0, e1 * e2 * e3 * 4.0)
}

/// `zeta(d + omega_abar/2) - zeta(omega_abar/2)`.
pub fn zeta_shift_coeff(a: usize, d: Complex64, ctx: &ModulusContext) -> Result<Complex64> {
    let half = ctx.half_period(a)?;
    ctx.guard(d + half, "zeta shift")?;
    Ok(weierstrass_zeta(d + half, ctx)? - ctx.consts.zeta_half_periods[a - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Plain summation in the original argument, no reduction.
    fn direct(ch: ThetaChar, z: Complex64, tau: Complex64, bound: i64) -> Complex64 {
        series_jet(ch, z, tau, bound)[0]
    }

    #[test]
    fn characteristic_validation() {
        assert!(ThetaChar::new(1, 1).is_ok());
        assert!(matches!(ThetaChar::new(2, 0), Err(Error::InvalidCharacteristic { .. })));
        assert_eq!(ThetaChar::C01.a(), 0);
        assert_eq!(ThetaChar::C01.b(), 1);
    }

    #[test]
    fn rejects_bad_modulus_and_tolerance() {
        assert!(matches!(ModulusContext::new(c(0.3, -1.0)), Err(Error::InvalidModulus(_))));
        assert!(matches!(
            ModulusContext::with_tolerance(c(0.0, 1.0), 1e-20),
            Err(Error::ToleranceUnreachable { .. })
        ));
        assert!(matches!(
            ModulusContext::new(c(0.0, 1e-5)),
            Err(Error::ToleranceUnreachable { .. })
        ));
    }

    #[test]
    fn tail_bound_holds() {
        for tau in [c(0.0, 1.0), c(0.2, 0.8), c(0.0, 0.5)] {
            let ctx = ModulusContext::new(tau).unwrap();
            let n = ctx.term_bound() as f64;
            assert!(ctx.nome_abs().powf(n * n) < ctx.tol());
        }
    }

    #[test]
    fn theta11_vanishes_at_origin() {
        let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
        assert!(theta(ThetaChar::C11, c(0.0, 0.0), &ctx).norm() < 1e-15);
    }

    #[test]
    fn matches_doubled_direct_sum() {
        let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
        let z = c(0.3, 0.0);
        let reference = direct(ThetaChar::C00, z, ctx.tau(), 2 * ctx.term_bound());
        assert!((theta(ThetaChar::C00, z, &ctx) - reference).norm() < 1e-13);
    }

    #[test]
    fn argument_reduction_agrees_with_direct_sum() {
        let ctx = ModulusContext::new(c(0.1, 0.9)).unwrap();
        for z in [c(2.3, 1.7), c(-1.4, -2.2), c(0.7, 3.1)] {
            for ch in ThetaChar::ALL {
                let reference = direct(ch, z, ctx.tau(), 60);
                let got = theta(ch, z, &ctx);
                assert!((got - reference).norm() <= 1e-10 * reference.norm().max(1.0), "{ch:?} {z}");
            }
        }
    }

    #[test]
    fn derivative_parities_at_origin() {
        let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
        let zero = c(0.0, 0.0);
        assert!(theta_deriv(ThetaChar::C00, 1, zero, &ctx).unwrap().norm() < 1e-14);
        assert!(theta_deriv(ThetaChar::C11, 2, zero, &ctx).unwrap().norm() < 1e-13);
        assert!(matches!(
            theta_deriv(ThetaChar::C11, 4, zero, &ctx),
            Err(Error::UnsupportedDerivativeOrder(4))
        ));
    }

    #[test]
    fn theta11_prime_matches_finite_difference() {
        let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
        let h = 1e-5;
        let fd = (theta(ThetaChar::C11, c(h, 0.0), &ctx) - theta(ThetaChar::C11, c(-h, 0.0), &ctx)) / (2.0 * h);
        let exact = theta_deriv(ThetaChar::C11, 1, c(0.0, 0.0), &ctx).unwrap();
        assert!((fd - exact).norm() < 1e-8);
        // real multiple of pi: 2 pi q^{1/4} prod(...), nonzero and real for tau = i
        assert!(exact.im.abs() < 1e-14 && exact.re.abs() > 1.0);
    }

    #[test]
    fn w_residue_is_one() {
        let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
        for a in 1..=3 {
            // u w(u) = 1 + O(u^2): Richardson on two step sizes
            let r1 = w_coeff(a, c(1e-3, 0.0), &ctx).unwrap() * 1e-3;
            let r2 = w_coeff(a, c(1e-4, 0.0), &ctx).unwrap() * 1e-4;
            let extrapolated = (r2 * 100.0 - r1) / 99.0;
            assert!((extrapolated - 1.0).norm() < 1e-9, "a = {a}");
        }
    }

    #[test]
    fn w1_composition() {
        let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
        let u = c(0.3, 0.0);
        let reference = theta_deriv(ThetaChar::C11, 1, c(0.0, 0.0), &ctx).unwrap()
            * direct(ThetaChar::C10, u, ctx.tau(), 40)
            / (direct(ThetaChar::C10, c(0.0, 0.0), ctx.tau(), 40) * direct(ThetaChar::C11, u, ctx.tau(), 40));
        assert!((w_coeff(1, u, &ctx).unwrap() - reference).norm() < 1e-12);
    }

    #[test]
    fn w3_flips_sign_under_unit_shift() {
        let ctx = ModulusContext::new(c(0.1, 1.1)).unwrap();
        for u in [c(0.21, 0.13), c(-0.33, 0.4)] {
            let lhs = w_coeff(3, u + 1.0, &ctx).unwrap();
            let rhs = -w_coeff(3, u, &ctx).unwrap();
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn poles_are_errors() {
        let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
        assert!(matches!(w_coeff(1, c(1.0, 1.0), &ctx), Err(Error::Pole { .. })));
        assert!(matches!(weierstrass_p(c(1e-9, 0.0), &ctx), Err(Error::Pole { .. })));
        assert!(matches!(weierstrass_zeta(ctx.tau(), &ctx), Err(Error::Pole { .. })));
        assert!(matches!(zeta_shift_coeff(1, c(0.5, 0.0), &ctx), Err(Error::Pole { .. })));
    }

    #[test]
    fn laurent_normalization() {
        let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
        // p(u) - 1/u^2 = g2 u^2 / 20 + ..., zeta(u) - 1/u = -g2 u^3 / 60 + ...
        for h in [1e-2, 1e-3] {
            let u = c(h, 0.0);
            let p = weierstrass_p(u, &ctx).unwrap() - 1.0 / (u * u);
            let z = weierstrass_zeta(u, &ctx).unwrap() - 1.0 / u;
            assert!(p.norm() < 2.0 * h * h * 20.0, "p remainder {p}");
            assert!(z.norm() < 2.0 * h * h * h * 10.0, "zeta remainder {z}");
        }
    }

    #[test]
    fn branch_points_sum_to_zero_and_are_distinct() {
        for tau in [c(0.0, 1.0), c(0.0, 0.8), c(0.3, 0.9)] {
            let ctx = ModulusContext::new(tau).unwrap();
            let [e1, e2, e3] = branch_points(&ctx);
            assert!((e1 + e2 + e3).norm() < 1e-10);
            if tau == c(0.0, 0.8) {
                assert!((e1 - e2).norm() > 1e-3 && (e2 - e3).norm() > 1e-3 && (e1 - e3).norm() > 1e-3);
            }
        }
    }

    #[test]
    fn branch_points_match_half_period_values() {
        let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
        let e = branch_points(&ctx);
        assert!((e[0] - weierstrass_p(c(0.5, 0.0), &ctx).unwrap()).norm() < 1e-12);
        assert!((e[1] - weierstrass_p(c(0.5, 0.5), &ctx).unwrap()).norm() < 1e-12);
        assert!((e[2] - weierstrass_p(c(0.0, 0.5), &ctx).unwrap()).norm() < 1e-12);
        // square lattice: e_2 = 0 and e_3 = -e_1
        assert!(e[1].norm() < 1e-10);
        assert!((e[0] + e[2]).norm() < 1e-10);
    }

    #[test]
    fn zeta_shift_is_odd_in_the_offset() {
        let ctx = ModulusContext::new(c(0.1, 0.9)).unwrap();
        for a in 1..=3 {
            assert!(zeta_shift_coeff(a, c(0.0, 0.0), &ctx).unwrap().norm() < 1e-14);
            let d = c(0.17, -0.08);
            let plus = zeta_shift_coeff(a, d, &ctx).unwrap();
            let minus = zeta_shift_coeff(a, -d, &ctx).unwrap();
            // direct evaluation of zeta(w/2 + d) + zeta(w/2 - d) - 2 zeta(w/2)
            let half = ctx.half_period(a).unwrap();
            let direct = weierstrass_zeta(half + d, &ctx).unwrap() + weierstrass_zeta(half - d, &ctx).unwrap()
                - weierstrass_zeta(half, &ctx).unwrap() * 2.0;
            assert!((plus + minus - direct).norm() < 1e-12);
            assert!((plus + minus).norm() < 1e-10);
        }
    }

    #[test]
    fn halved_context() {
        let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
        let half = ctx.halved().unwrap();
        assert_eq!(half.tau(), c(0.0, 0.5));
        assert!(half.term_bound() >= ctx.term_bound());
    }

    #[test]
    fn p_prime_satisfies_cubic() {
        let ctx = ModulusContext::new(c(0.1, 0.9)).unwrap();
        let (g2, g3) = invariants(&ctx);
        for u in [c(0.21, 0.13), c(-0.37, 0.41), c(0.05, -0.3)] {
            let p = weierstrass_p(u, &ctx).unwrap();
            let dp = weierstrass_p_deriv(u, &ctx).unwrap();
            let r = dp * dp - (p * p * p * 4.0 - g2 * p - g3);
            assert!(r.norm() < 1e-9 * (dp * dp).norm().max(1.0));
            let h = 1e-5;
            let fd = (weierstrass_p(u + h, &ctx).unwrap() - weierstrass_p(u - h, &ctx).unwrap()) / (2.0 * h);
            assert!((fd - dp).norm() < 1e-5 * dp.norm());
        }
    }
}
