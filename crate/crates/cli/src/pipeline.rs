//! Solving and classifying Bethe solutions against exact diagonalization.

use num_complex::Complex64;
use xyz_gaudin::bethe::{
    gaudin_eigenvalue, match_gaudin, match_xyz, solve_gaudin_scan, solve_xyz, xyz_eigenvalue, BetheSolution, SolverOptions,
    SpectralCurves,
};
use xyz_gaudin::gaudin::{GaudinModel, GaudinSpec};
use xyz_gaudin::lattice::{Chain, ChainSpec};
use xyz_gaudin::vectors::{gaudin_eigenvector, pick_lambda, xyz_eigenvector, EtaLadder};
use xyz_gaudin::Result;

use crate::record::{pair, SolutionClass, SolutionRecord};

/// A solution counts as matched when its curve is this close to a slot.
pub const MATCH_TOL: f64 = 1e-6;
/// Below this null ratio an unmatched solution is spurious.
pub const NULL_TOL: f64 = 1e-5;
/// Gauge parameter of the Bethe vectors, and a second value for independence checks.
pub const GAUGE_SHIFT: Complex64 = Complex64::new(0.05, 0.02);
pub const GAUGE_SHIFT_ALT: Complex64 = Complex64::new(-0.11, 0.07);

pub fn gaudin_curves(spec: &GaudinSpec, probes: &[Complex64], seed: u64) -> Result<SpectralCurves> {
    let model = GaudinModel::standard(spec.clone());
    let ops = probes.iter().map(|&u| model.tau_hat(u)).collect::<Result<Vec<_>>>()?;
    SpectralCurves::new(probes.to_vec(), &ops, seed)
}

pub fn xyz_curves(chain: &Chain, probes: &[Complex64], seed: u64) -> Result<SpectralCurves> {
    let ops = probes.iter().map(|&u| chain.transfer(u)).collect::<Result<Vec<_>>>()?;
    SpectralCurves::new(probes.to_vec(), &ops, seed)
}

fn classify(mismatch: f64, null_ratio: Option<f64>) -> SolutionClass {
    if mismatch < MATCH_TOL {
        SolutionClass::Matched
    } else if null_ratio.is_some_and(|r| r < NULL_TOL) {
        SolutionClass::Spurious
    } else {
        SolutionClass::Unmatched
    }
}

/// Gaudin solutions over `nus`, classified against `tau_hat` curves; null
/// ratios are computed on `ladder` when given.
pub fn gaudin_solutions(
    spec: &GaudinSpec,
    nus: &[i64],
    opts: &SolverOptions,
    curves: &SpectralCurves,
    ladder: Option<&EtaLadder>,
    nodes: usize,
) -> Result<(Vec<BetheSolution>, Vec<SolutionRecord>)> {
    let m = spec.magnon_count()?;
    let sols = solve_gaudin_scan(spec, nus, m, opts)?;
    let mut records = Vec::with_capacity(sols.len());
    for sol in &sols {
        let matched = match_gaudin(sol, spec, curves)?;
        let null_ratio = match ladder {
            Some(l) if m > 0 => gaudin_eigenvector(l, sol, GAUGE_SHIFT, nodes, &[]).ok().map(|v| v.vector.null_ratio),
            _ => None,
        };
        let eigenvalues = curves.probes.iter().map(|&u| gaudin_eigenvalue(u, sol, spec).map(pair)).collect::<Result<_>>()?;
        records.push(SolutionRecord {
            model: "gaudin",
            nu: sol.nu,
            roots: sol.roots.iter().copied().map(pair).collect(),
            eta: None,
            bethe_residual: sol.residual,
            jacobian_cond: sol.jacobian_cond,
            slot: matched.slot,
            mismatch: matched.mismatch,
            functional_residual: matched.functional_residual,
            null_ratio,
            class: classify(matched.mismatch, null_ratio),
            eigenvalues,
        });
    }
    Ok((sols, records))
}

/// `r` with `eta r` an integer, if `eta` is real and rational with denominator at most `max_denominator`.
pub fn rational_denominator(eta: Complex64, max_denominator: usize) -> Option<usize> {
    if eta.im.abs() > 1e-14 {
        return None;
    }
    (1..=max_denominator).find(|&r| {
        let x = eta.re * r as f64;
        x.round() != 0.0 && (x - x.round()).abs() < 1e-12
    })
}

/// XYZ solutions over `nus` (continued from `seeds` when given), classified
/// against transfer-matrix curves; null ratios need a rational `eta`.
pub fn xyz_solutions(
    chain: &Chain,
    nus: &[i64],
    seeds: Option<&[BetheSolution]>,
    opts: &SolverOptions,
    curves: &SpectralCurves,
    max_denominator: usize,
    seed: u64,
) -> Result<(Vec<BetheSolution>, Vec<SolutionRecord>)> {
    let spec: &ChainSpec = chain.spec();
    let m = spec.magnon_count()?;
    let r = rational_denominator(spec.eta(), max_denominator);
    let lambda = pick_lambda(spec.ctx(), seed);
    let mut sols = Vec::new();
    let mut records = Vec::new();
    for &nu in nus {
        for sol in solve_xyz(spec, nu, m, seeds, opts)? {
            let matched = match_xyz(&sol, spec, curves)?;
            let null_ratio = match r {
                Some(r) if m > 0 => xyz_eigenvector(chain, &sol, lambda, GAUGE_SHIFT, r, &[]).ok().map(|v| v.null_ratio),
                _ => None,
            };
            let eigenvalues = curves.probes.iter().map(|&u| xyz_eigenvalue(u, &sol, spec).map(pair)).collect::<Result<_>>()?;
            records.push(SolutionRecord {
                model: "xyz",
                nu: sol.nu,
                roots: sol.roots.iter().copied().map(pair).collect(),
                eta: Some(pair(spec.eta())),
                bethe_residual: sol.residual,
                jacobian_cond: sol.jacobian_cond,
                slot: matched.slot,
                mismatch: matched.mismatch,
                functional_residual: matched.functional_residual,
                null_ratio,
                class: classify(matched.mismatch, null_ratio),
                eigenvalues,
            });
            sols.push(sol);
        }
    }
    Ok((sols, records))
}

/// Sample points `x + 0.3 tau` across one real period, for plotting.
pub fn plot_path(tau: Complex64, points: usize) -> Vec<Complex64> {
    let n = points.max(2);
    (0..n).map(|k| tau * 0.3 + (-0.5 + (k as f64 + 0.5) / n as f64)).collect()
}
