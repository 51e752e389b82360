//! Verification suites. Each returns measured values against thresholds.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xyz_gaudin::bethe::{BetheSolution, SolverOptions, SpectralCurves};
use xyz_gaudin::elliptic::{
    branch_points, invariants, theta, weierstrass_p, weierstrass_p_deriv, weierstrass_zeta, ModulusContext, ThetaChar,
};
use xyz_gaudin::gaudin::{quasiclassical_report, GaudinModel, GaudinSpec, ETA_LADDER};
use xyz_gaudin::lattice::{
    fundamental_relation_residual, off_scalar_part, r_matrix, rll_residual, yang_baxter_residual, Chain,
};
use xyz_gaudin::linalg::{commutator, line_angle};
use xyz_gaudin::sklyanin::{check_quadratic_relations, rep_matrices, Spin};
use xyz_gaudin::vectors::{
    gaudin_eigenvector, pick_lambda, t_phi_identity_residual, xyz_eigenvector, EtaLadder, IndexPattern, FIT_STABILITY_TOL,
};
use xyz_gaudin::Result;

use crate::pipeline::{gaudin_solutions, rational_denominator, xyz_solutions, GAUGE_SHIFT, GAUGE_SHIFT_ALT, NULL_TOL};
use crate::record::{Check, SolutionClass, SolutionRecord};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const PI: f64 = std::f64::consts::PI;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

fn cell_point(rng: &mut ChaCha8Rng, ctx: &ModulusContext) -> Complex64 {
    let s: f64 = rng.random_range(-0.5..0.5);
    let t: f64 = rng.random_range(-0.5..0.5);
    ctx.tau() * t + s
}

/// Quasi-periodicity and parity of the four thetas, `zeta' = -p`, the
/// differential equation of `p` and `e_1 + e_2 + e_3 = 0`.
pub fn theta_suite(ctx: &ModulusContext, seed: u64, points: usize) -> Vec<Check> {
    const S: &str = "theta";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zs: Vec<Complex64> = (0..points).map(|_| cell_point(&mut rng, ctx)).collect();
    let tau = ctx.tau();
    let mut out = Vec::new();
    for ch in ThetaChar::ALL {
        let sign = |k: u8| if k == 0 { 1.0 } else { -1.0 };
        let (mut period, mut parity): (f64, f64) = (0.0, 0.0);
        for &z in &zs {
            let t = theta(ch, z, ctx);
            period = period.max(rel(theta(ch, z + 1.0, ctx), t * sign(ch.a())));
            let factor = (-I * PI * (tau + z * 2.0)).exp() * sign(ch.b());
            period = period.max(rel(theta(ch, z + tau, ctx), t * factor));
            let odd = if ch.is_odd() { -1.0 } else { 1.0 };
            parity = parity.max(rel(theta(ch, -z, ctx), t * odd));
        }
        out.push(Check::below(S, format!("quasi_periodicity_{ch:?}"), period, 1e-10));
        out.push(Check::below(S, format!("parity_{ch:?}"), parity, 1e-10));
    }
    let (g2, g3) = invariants(ctx);
    let (mut zeta_fd, mut cubic): (f64, f64) = (0.0, 0.0);
    let mut failure = None;
    for &z in zs.iter().filter(|z| ctx.lattice_distance(**z) > 0.05) {
        let h = 1e-3;
        let f = |x: Complex64| weierstrass_zeta(x, ctx);
        let p = weierstrass_p(z, ctx);
        let dp = weierstrass_p_deriv(z, ctx);
        match (f(z - h * 2.0), f(z - h), f(z + h), f(z + h * 2.0), p, dp) {
            (Ok(a), Ok(b), Ok(c), Ok(d), Ok(p), Ok(dp)) => {
                let deriv = (a - b * 8.0 + c * 8.0 - d) / (12.0 * h);
                zeta_fd = zeta_fd.max(rel(deriv, -p));
                let rhs = p * p * p * 4.0 - g2 * p - g3;
                cubic = cubic.max((dp * dp - rhs).norm() / (dp * dp).norm().max(rhs.norm()).max(1.0));
            }
            (a, ..) => failure = a.err().or(Some(xyz_gaudin::Error::NoConvergence { what: "weierstrass evaluation" })),
        }
    }
    if let Some(e) = failure {
        out.push(Check::error(S, "weierstrass_evaluation", e));
    }
    out.push(Check::below(S, "zeta_derivative_is_minus_p", zeta_fd, 1e-6));
    out.push(Check::below(S, "p_differential_equation", cubic, 1e-9));
    let e = branch_points(ctx);
    let scale = e.iter().map(|x| x.norm()).fold(0.0, f64::max);
    out.push(Check::below(S, "branch_point_sum", (e[0] + e[1] + e[2]).norm() / scale, 1e-10));
    out
}

/// Quadratic Sklyanin relations and single-site RLL for each spin; with
/// `corrupt` the R-matrix is built with `-eta`.
pub fn sklyanin_suite(spins: &[Spin], ctx: &ModulusContext, eta: Complex64, seed: u64, corrupt: bool) -> Vec<Check> {
    const S: &str = "sklyanin";
    let mut out = Vec::new();
    let r_eta = if corrupt { -eta } else { eta };
    for &spin in spins {
        let tag = format!("2l={},tau={},eta={}", spin.twice(), ctx.tau(), eta);
        let rep = match rep_matrices(spin, eta, ctx, seed) {
            Ok(r) => r,
            Err(e) => {
                out.push(Check::error(S, format!("representation[{tag}]"), e));
                continue;
            }
        };
        out.push(Check::below(S, format!("quadratic_relations[{tag}]"), check_quadratic_relations(&rep).max(), 1e-8));
        let mut worst: f64 = 0.0;
        for (u, v) in [(Complex64::new(0.23, 0.17), Complex64::new(-0.31, 0.29)), (Complex64::new(0.41, -0.12), Complex64::new(0.07, 0.33))] {
            match rll_residual(&rep, u, v, r_eta) {
                Ok(r) => worst = worst.max(r),
                Err(e) => {
                    out.push(Check::error(S, format!("rll[{tag}]"), e));
                    worst = f64::NAN;
                }
            }
        }
        let check = Check::below(S, format!("rll[{tag}]"), worst, 1e-8);
        out.push(if corrupt { check.with_note("R built with -eta (negative control)") } else { check });
    }
    out
}

pub fn yang_baxter_suite(ctx: &ModulusContext, eta: Complex64) -> Vec<Check> {
    let pts = [(Complex64::new(0.23, 0.17), Complex64::new(-0.31, 0.29)), (Complex64::new(0.41, -0.12), Complex64::new(0.07, 0.33))];
    let mut worst: f64 = 0.0;
    for (u, v) in pts {
        match yang_baxter_residual(u, v, eta, ctx) {
            Ok(r) => worst = worst.max(r),
            Err(e) => return vec![Check::error("yang_baxter", "yang_baxter", e)],
        }
    }
    vec![Check::below("yang_baxter", "yang_baxter", worst, 1e-10)]
}

/// Commuting transfer matrices, RTT relation and quantum determinant.
pub fn commutativity_suite(chain: &Chain, probes: &[Complex64]) -> Vec<Check> {
    const S: &str = "commutativity";
    let run = || -> Result<Vec<Check>> {
        let us = &probes[..probes.len().min(3)];
        let ts = us.iter().map(|&u| chain.transfer(u)).collect::<Result<Vec<_>>>()?;
        let ms = us.iter().map(|&u| chain.monodromy(u)).collect::<Result<Vec<_>>>()?;
        let (mut comm, mut rtt, mut off, mut value, mut anti): (f64, f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..us.len() {
            for j in i + 1..us.len() {
                comm = comm.max(commutator(&ts[i], &ts[j]).norm() / (ts[i].norm() * ts[j].norm()));
                let r = r_matrix(us[i] - us[j], chain.eta(), chain.ctx())?;
                rtt = rtt.max(fundamental_relation_residual(&r, &ms[i], &ms[j]));
            }
            let qdet = chain.quantum_determinant(us[i])?;
            off = off.max(off_scalar_part(&qdet));
            let n = qdet.nrows() as f64;
            let diag = qdet.trace() / n;
            value = value.max(rel(diag, chain.quantum_determinant_value(us[i])?));
            let alt = chain.quantum_determinant_by_antisymmetrizer(us[i])?;
            anti = anti.max((&alt - &qdet).norm() / qdet.norm());
        }
        Ok(vec![
            Check::below(S, "transfer_commutator", comm, 1e-8),
            Check::below(S, "rtt_relation", rtt, 1e-8),
            Check::below(S, "qdet_off_scalar", off, 1e-8),
            Check::below(S, "qdet_value", value, 1e-8),
            Check::below(S, "qdet_antisymmetrizer", anti, 1e-8),
        ])
    };
    run().unwrap_or_else(|e| vec![Check::error(S, "commutativity", e)])
}

/// Fitted orders of the quasiclassical expansions, on the bases of `chain`.
pub fn limits_suite(chain: &Chain, u: Complex64) -> Vec<Check> {
    const S: &str = "limits";
    match quasiclassical_report(chain, u, &ETA_LADDER) {
        Ok(rep) => vec![
            Check::above(S, "l_operator_slope", rep.l_slope, 0.9),
            Check::above(S, "monodromy_slope", rep.t_slope, 0.9),
            Check::above(S, "r_matrix_slope", rep.r_slope, 0.9),
            Check::below(S, "transfer_linear_coefficient", rep.transfer_linear_coeff, 1e-8),
            Check::above(S, "tau_hat_slope", rep.tau_slope, 2.7),
        ],
        Err(e) => vec![Check::error(S, "quasiclassical_report", e)],
    }
}

/// Sum rule and commutativity of the Gaudin Hamiltonians, pole decomposition of `tau_hat`.
pub fn gaudin_suite(spec: &GaudinSpec, probes: &[Complex64]) -> Vec<Check> {
    const S: &str = "gaudin";
    let run = || -> Result<Vec<Check>> {
        let model = GaudinModel::standard(spec.clone());
        let mut hams = model.hamiltonians()?;
        let scale = hams.iter().map(|h| h.norm()).fold(0.0, f64::max).max(1.0);
        let sum = hams.iter().skip(1).fold(hams[0].clone(), |acc, h| acc + h);
        hams.push(model.hamiltonian_0()?);
        let mut comm: f64 = 0.0;
        for i in 0..hams.len() {
            for j in i + 1..hams.len() {
                comm = comm.max(commutator(&hams[i], &hams[j]).norm() / (hams[i].norm() * hams[j].norm()).max(1.0));
            }
        }
        let mut decomposition: f64 = 0.0;
        for &u in probes {
            decomposition = decomposition.max(model.tau_decomposition_residual(u)?);
        }
        Ok(vec![
            Check::below(S, "hamiltonian_sum", sum.norm() / scale, 1e-10),
            Check::below(S, "hamiltonian_commutators", comm, 1e-8),
            Check::below(S, "tau_decomposition", decomposition, 1e-7),
        ])
    };
    run().unwrap_or_else(|e| vec![Check::error(S, "gaudin", e)])
}

fn solution_checks(suite: &'static str, records: &[SolutionRecord], curves: &SpectralCurves, tol: f64) -> Vec<Check> {
    let mut out = Vec::new();
    let matched: Vec<_> = records.iter().filter(|r| r.class == SolutionClass::Matched).collect();
    out.push(Check::above(suite, "matched_solutions", matched.len() as f64, 0.5));
    let worst_mismatch = matched.iter().map(|r| r.mismatch).fold(0.0, f64::max);
    out.push(Check::below(suite, "matched_eigenvalue_mismatch", worst_mismatch, tol));
    let worst_functional = matched.iter().map(|r| r.functional_residual).fold(0.0, f64::max);
    out.push(Check::below(suite, "functional_equation", worst_functional, tol));
    let unmatched = records.iter().filter(|r| r.class == SolutionClass::Unmatched).count();
    let slots: std::collections::BTreeSet<usize> = matched.iter().map(|r| r.slot).collect();
    out.push(
        Check::below(suite, "unmatched_solutions", unmatched as f64, 0.5)
            .with_note(format!("{} of {} distinct spectral curves reached", slots.len(), curves.distinct_curves(1e-8))),
    );
    out
}

/// Gaudin Bethe solutions against exact diagonalization of `tau_hat`.
pub fn bethe_suite(
    spec: &GaudinSpec,
    nus: &[i64],
    opts: &SolverOptions,
    curves: &SpectralCurves,
    ladder: &EtaLadder,
    nodes: usize,
) -> (Vec<Check>, Vec<BetheSolution>, Vec<SolutionRecord>) {
    const S: &str = "bethe";
    let (sols, records) = match gaudin_solutions(spec, nus, opts, curves, Some(ladder), nodes) {
        Ok(x) => x,
        Err(e) => return (vec![Check::error(S, "solve", e)], Vec::new(), Vec::new()),
    };
    let mut out = solution_checks(S, &records, curves, 1e-8);
    let sites = spec.sites();
    if sites.len() == 2 && sites.iter().all(|s| s.spin == Spin::HALF) && nus.contains(&0) {
        let target = (sites[0].z + sites[1].z) * 0.5;
        let found = sols.iter().filter(|s| s.nu == 0).map(|s| gap_mod_lattice(s.roots[0], target, spec.ctx())).fold(f64::INFINITY, f64::min);
        out.push(Check::below(S, "symmetric_root_at_nu_0", found, 1e-8));
    }
    (out, sols, records)
}

fn gap_mod_lattice(a: Complex64, b: Complex64, ctx: &ModulusContext) -> f64 {
    ctx.lattice_distance(a - b)
}

/// XYZ Bethe solutions against exact diagonalization of the transfer matrix.
pub fn xyz_bethe_suite(
    chain: &Chain,
    nus: &[i64],
    seeds: Option<&[BetheSolution]>,
    opts: &SolverOptions,
    curves: &SpectralCurves,
    max_denominator: usize,
    seed: u64,
) -> (Vec<Check>, Vec<BetheSolution>, Vec<SolutionRecord>) {
    match xyz_solutions(chain, nus, seeds, opts, curves, max_denominator, seed) {
        Ok((sols, records)) => (solution_checks("xyz_bethe", &records, curves, 1e-8), sols, records),
        Err(e) => (vec![Check::error("xyz_bethe", "solve", e)], Vec::new(), Vec::new()),
    }
}

/// Exact `t(u) Phi_lambda` identity at seeded generic roots and three `lambda`;
/// for two or more roots the printed index pattern must fail.
pub fn tphi_suite(chain: &Chain, u: Complex64, seed: u64) -> Vec<Check> {
    const S: &str = "tphi";
    let m = match chain.spec().magnon_count() {
        Ok(m) if m > 0 => m,
        Ok(_) => return vec![Check::error(S, "t_phi_identity", "no magnons (M = 0)")],
        Err(e) => return vec![Check::error(S, "t_phi_identity", e)],
    };
    let ctx = chain.ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let roots: Vec<Complex64> = (0..m).map(|_| cell_point(&mut rng, ctx)).collect();
    let (mut good, mut bad): (f64, f64) = (0.0, f64::INFINITY);
    for k in 0..3 {
        let lambda = pick_lambda(ctx, seed.wrapping_add(k));
        match t_phi_identity_residual(chain, u, lambda, &roots, GAUGE_SHIFT, IndexPattern::Symmetric) {
            Ok(r) => good = good.max(r),
            Err(e) => return vec![Check::error(S, "t_phi_identity", e)],
        }
        if m >= 2 {
            match t_phi_identity_residual(chain, u, lambda, &roots, GAUGE_SHIFT, IndexPattern::Literal) {
                Ok(r) => bad = bad.min(r),
                Err(e) => return vec![Check::error(S, "printed_pattern_control", e)],
            }
        }
    }
    let mut out = vec![Check::below(S, "t_phi_identity", good, 1e-6)];
    if m >= 2 {
        out.push(Check::above(S, "printed_pattern_control", bad, 1e-2).with_note("index pattern B(lambda+4eta, lambda+4eta) at j = 2"));
    }
    out
}

/// `Psi_nu` at rational `eta` for every matched XYZ solution.
pub fn xyz_vectors_suite(
    chain: &Chain,
    sols: &[BetheSolution],
    records: &[SolutionRecord],
    probes: &[Complex64],
    max_denominator: usize,
    seed: u64,
) -> Vec<Check> {
    const S: &str = "xyz_vectors";
    let Some(r) = rational_denominator(chain.eta(), max_denominator) else {
        return vec![Check::error(S, "rational_eta", format!("eta = {} has no denominator <= {max_denominator}", chain.eta()))];
    };
    let probes = &probes[..probes.len().min(3)];
    let (mut residual, mut angle, mut null): (f64, f64, f64) = (0.0, 0.0, f64::INFINITY);
    let mut count = 0;
    for (sol, rec) in sols.iter().zip(records).filter(|(_, r)| r.class == SolutionClass::Matched) {
        let mut built = None;
        for k in 0..3 {
            let lambda = pick_lambda(chain.ctx(), seed.wrapping_add(k));
            if let Ok(v) = xyz_eigenvector(chain, sol, lambda, GAUGE_SHIFT, r, probes) {
                if v.null_ratio > NULL_TOL {
                    built = Some((lambda, v));
                    break;
                }
            }
        }
        let Some((lambda, v)) = built else {
            null = 0.0;
            continue;
        };
        count += 1;
        null = null.min(v.null_ratio);
        residual = residual.max(v.eigen_residuals.iter().copied().fold(0.0, f64::max));
        residual = residual.max(rec.functional_residual);
        match xyz_eigenvector(chain, sol, lambda, GAUGE_SHIFT_ALT, r, &[]) {
            Ok(w) => angle = angle.max(line_angle(&v.state, &w.state)),
            Err(_) => angle = f64::NAN,
        }
    }
    vec![
        Check::above(S, "eigenvectors_built", count as f64, 0.5),
        Check::above(S, "null_ratio", null, NULL_TOL),
        Check::below(S, "eigen_residual", residual, 1e-7).with_note(format!("r = {r} terms")),
        Check::below(S, "gauge_independence", angle, 1e-6),
    ]
}

/// `psi_nu` for every matched Gaudin solution.
pub fn gaudin_vectors_suite(
    ladder: &EtaLadder,
    sols: &[BetheSolution],
    records: &[SolutionRecord],
    probes: &[Complex64],
    nodes: usize,
) -> Vec<Check> {
    const S: &str = "gaudin_vectors";
    let probes = &probes[..probes.len().min(3)];
    let (mut residual, mut quadrature, mut fit, mut angle, mut null): (f64, f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0, f64::INFINITY);
    let mut count = 0;
    let mut failures = Vec::new();
    for (sol, _) in sols.iter().zip(records).filter(|(_, r)| r.class == SolutionClass::Matched) {
        let (a, b) = match (
            gaudin_eigenvector(ladder, sol, GAUGE_SHIFT, nodes, probes),
            gaudin_eigenvector(ladder, sol, GAUGE_SHIFT_ALT, nodes, &[]),
        ) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                failures.push(Check::error(S, format!("psi[nu={}]", sol.nu), e));
                continue;
            }
        };
        count += 1;
        residual = residual.max(a.vector.eigen_residuals.iter().copied().fold(0.0, f64::max));
        quadrature = quadrature.max(a.quadrature_change);
        fit = fit.max(a.fit_disagreement);
        null = null.min(a.vector.null_ratio);
        angle = angle.max(line_angle(&a.vector.state, &b.vector.state));
    }
    let mut out = vec![
        Check::above(S, "eigenvectors_built", count as f64, 0.5),
        Check::above(S, "null_ratio", null, NULL_TOL),
        Check::below(S, "eigen_residual", residual, 1e-6),
        Check::below(S, "quadrature_doubling", quadrature, 1e-8),
        Check::below(S, "fit_order_stability", fit, FIT_STABILITY_TOL),
        Check::below(S, "gauge_independence", angle, 1e-5),
    ];
    out.extend(failures);
    out
}
