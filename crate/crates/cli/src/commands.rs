//! `spectrum`, `bethe` and `verify`.

use num_complex::Complex64;
use xyz_gaudin::bethe::{gaudin_eigenvalue, xyz_eigenvalue, BetheSolution, SpectralCurves};
use xyz_gaudin::elliptic::{weierstrass_p, weierstrass_zeta};
use xyz_gaudin::gaudin::{GaudinModel, ETA_LADDER};
use xyz_gaudin::lattice::Chain;
use xyz_gaudin::vectors::EtaLadder;
use xyz_gaudin::{CMatrix, Result};

use crate::config::{Job, Suite};
use crate::pipeline::{gaudin_curves, gaudin_solutions, plot_path, xyz_curves, xyz_solutions};
use crate::record::{pair, Check, CsvTable, EigenstateRecord, ResultRecord, SolutionClass, SpectrumRecord, Status};
use crate::suites;

/// A finished command: the record, and the CSV curves.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub record: ResultRecord,
    pub csv: CsvTable,
}

fn finish(mut record: ResultRecord, csv: CsvTable) -> Outcome {
    let failed = record.checks.iter().filter(|c| !c.passed).count();
    record.summary.checks_failed = failed;
    record.summary.checks_passed = record.checks.len() - failed;
    record.summary.solutions = record.solutions.len();
    for (class, slot) in [
        (SolutionClass::Matched, &mut record.summary.matched),
        (SolutionClass::Spurious, &mut record.summary.spurious),
        (SolutionClass::Unmatched, &mut record.summary.unmatched),
    ] {
        *slot = record.solutions.iter().filter(|s| s.class == class).count();
    }
    if failed > 0 {
        record.status = Status::VerificationFailed;
    }
    Outcome { record, csv }
}

fn rayleigh(op: &CMatrix, v: &xyz_gaudin::CVector) -> Complex64 {
    v.dotc(&(op * v)) / v.dotc(v)
}

/// Joint spectrum of `H_1 .. H_N, H_0` and `tau_hat(u)` per eigenvector.
pub fn cmd_spectrum(job: &Job) -> Result<Outcome> {
    let spec = &job.gaudin;
    let ctx = spec.ctx();
    let model = GaudinModel::standard(spec.clone());
    let mut ops = model.hamiltonians()?;
    ops.push(model.hamiltonian_0()?);
    let curves = SpectralCurves::new(Vec::new(), &ops, job.seed)?;
    let taus = job.probes.iter().map(|&u| model.tau_hat(u)).collect::<Result<Vec<_>>>()?;
    let n = spec.len();
    let mut states = Vec::with_capacity(curves.vectors.len());
    let (mut sum_rule, mut recombination): (f64, f64) = (0.0, 0.0);
    let scale = curves.values.iter().flatten().map(|x| x.norm()).fold(1.0, f64::max);
    for (v, values) in curves.vectors.iter().zip(&curves.values) {
        let h = &values[..n];
        let h0 = values[n];
        let sum: Complex64 = h.iter().sum();
        sum_rule = sum_rule.max(sum.norm() / scale);
        let mut tau = Vec::with_capacity(taus.len());
        let mut worst: f64 = 0.0;
        for (&u, op) in job.probes.iter().zip(&taus) {
            let t = rayleigh(op, v);
            let mut rebuilt = h0;
            for (site, hn) in spec.sites().iter().zip(h) {
                rebuilt += weierstrass_p(u - site.z, ctx)? * site.spin.casimir() + hn * weierstrass_zeta(u - site.z, ctx)?;
            }
            worst = worst.max((t - rebuilt).norm() / t.norm().max(1.0));
            tau.push(pair(t));
        }
        recombination = recombination.max(worst);
        states.push(EigenstateRecord {
            hamiltonians: h.iter().copied().map(pair).collect(),
            h0: pair(h0),
            sum_h: pair(sum),
            tau,
            recombination_residual: worst,
        });
    }
    let mut record = ResultRecord::new(job, "spectrum");
    record.checks = vec![
        Check::below("spectrum", "joint_eigen_residual", curves.eigen_residual, 1e-8),
        Check::below("spectrum", "hamiltonian_sum", sum_rule, 1e-10),
        Check::below("spectrum", "tau_recombination", recombination, 1e-7),
    ];
    record.spectrum = Some(SpectrumRecord { eigen_residual: curves.eigen_residual, states });
    let mut csv = CsvTable::default();
    for u in plot_path(ctx.tau(), job.config.outputs.csv_points) {
        let op = model.tau_hat(u)?;
        for (k, v) in curves.vectors.iter().enumerate() {
            csv.rows.push((format!("state{k}"), u, rayleigh(&op, v)));
        }
    }
    Ok(finish(record, csv))
}

/// Bethe roots over the configured `nu` range, matched against exact diagonalization.
pub fn cmd_bethe(job: &Job, strict: bool) -> Result<Outcome> {
    let mut record = ResultRecord::new(job, "bethe");
    let mut csv = CsvTable::default();
    let path = plot_path(job.gaudin.ctx().tau(), job.config.outputs.csv_points);
    let nodes = job.config.verify.quadrature_nodes;
    let mut gaudin_sols: Option<Vec<BetheSolution>> = None;
    if job.model().gaudin() {
        let curves = gaudin_curves(&job.gaudin, &job.probes, job.seed)?;
        let ladder = if job.nus.is_empty() { None } else { Some(EtaLadder::for_gaudin(&job.gaudin, job.seed)?) };
        let (sols, records) = gaudin_solutions(&job.gaudin, &job.nus, &job.solver, &curves, ladder.as_ref(), nodes)?;
        for (k, sol) in sols.iter().enumerate() {
            for &u in &path {
                if let Ok(t) = gaudin_eigenvalue(u, sol, &job.gaudin) {
                    csv.rows.push((format!("gaudin{k}_nu{}", sol.nu), u, t));
                }
            }
        }
        record.solutions.extend(records);
        gaudin_sols = Some(sols);
    }
    if job.model().xyz() {
        let spec = job.chain.clone().expect("validated: xyz model has eta");
        let chain = Chain::new(spec, job.seed)?;
        let curves = xyz_curves(&chain, &job.probes, job.seed)?;
        let (sols, records) = xyz_solutions(
            &chain,
            &job.nus,
            gaudin_sols.as_deref(),
            &job.solver,
            &curves,
            job.config.verify.max_denominator,
            job.seed,
        )?;
        for (k, sol) in sols.iter().enumerate() {
            for &u in &path {
                if let Ok(t) = xyz_eigenvalue(u, sol, chain.spec()) {
                    csv.rows.push((format!("xyz{k}_nu{}", sol.nu), u, t));
                }
            }
        }
        record.solutions.extend(records);
    }
    let mut out = finish(record, csv);
    let summary = &out.record.summary;
    if !job.nus.is_empty() && summary.solutions == 0 {
        out.record.status = Status::NoSolutions;
    } else if strict && summary.unmatched > 0 {
        out.record.status = Status::VerificationFailed;
    }
    Ok(out)
}

/// Runs the configured verification suites.
pub fn cmd_verify(job: &Job) -> Result<Outcome> {
    let mut record = ResultRecord::new(job, "verify");
    let suites_to_run = job.suites();
    let has = |s: Suite| suites_to_run.contains(&s);
    let spec = &job.gaudin;
    let ctx = spec.ctx();
    let nodes = job.config.verify.quadrature_nodes;
    let max_den = job.config.verify.max_denominator;
    let u0 = job.probes[0];
    let mut checks = Vec::new();

    if has(Suite::Theta) {
        checks.extend(suites::theta_suite(ctx, job.seed, 50));
    }
    let chain = match &job.chain {
        Some(cs) => Some(Chain::new(cs.clone(), job.seed)?),
        None => None,
    };
    if let Some(chain) = &chain {
        let mut spins: Vec<_> = spec.sites().iter().map(|s| s.spin).collect();
        spins.sort();
        spins.dedup();
        if has(Suite::Sklyanin) {
            checks.extend(suites::sklyanin_suite(&spins, ctx, chain.eta(), job.seed, job.config.verify.corrupt_eta_sign));
        }
        if has(Suite::YangBaxter) {
            checks.extend(suites::yang_baxter_suite(ctx, chain.eta()));
        }
        if has(Suite::Commutativity) {
            checks.extend(suites::commutativity_suite(chain, &job.probes));
        }
        if has(Suite::Tphi) {
            checks.extend(suites::tphi_suite(chain, u0, job.seed));
        }
    }
    if has(Suite::Limits) {
        let chain = Chain::new(spec.chain_spec(Complex64::new(ETA_LADDER[0], 0.0))?, job.seed)?;
        checks.extend(suites::limits_suite(&chain, u0));
    }
    if has(Suite::Gaudin) {
        checks.extend(suites::gaudin_suite(spec, &job.probes));
    }
    let mut gaudin_sols = None;
    if has(Suite::Bethe) || has(Suite::GaudinVectors) {
        let curves = gaudin_curves(spec, &job.probes, job.seed)?;
        let ladder = EtaLadder::for_gaudin(spec, job.seed)?;
        let (bethe_checks, sols, records) = suites::bethe_suite(spec, &job.nus, &job.solver, &curves, &ladder, nodes);
        if has(Suite::Bethe) {
            checks.extend(bethe_checks);
        }
        if has(Suite::GaudinVectors) {
            checks.extend(suites::gaudin_vectors_suite(&ladder, &sols, &records, &job.probes, nodes));
        }
        record.solutions.extend(records);
        gaudin_sols = Some(sols);
    }
    if let Some(chain) = &chain {
        if has(Suite::XyzBethe) || has(Suite::XyzVectors) {
            let curves = xyz_curves(chain, &job.probes, job.seed)?;
            let (bethe_checks, sols, records) =
                suites::xyz_bethe_suite(chain, &job.nus, gaudin_sols.as_deref(), &job.solver, &curves, max_den, job.seed);
            if has(Suite::XyzBethe) {
                checks.extend(bethe_checks);
            }
            if has(Suite::XyzVectors) {
                checks.extend(suites::xyz_vectors_suite(chain, &sols, &records, &job.probes, max_den, job.seed));
            }
            record.solutions.extend(records);
        }
    }
    record.checks = checks;
    Ok(finish(record, CsvTable::default()))
}
