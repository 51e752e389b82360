use num_complex::Complex64;
use proptest::prelude::*;
use xyz_gaudin::elliptic::ModulusContext;
use xyz_gaudin::gaudin::{
    classical_spin, classical_yang_baxter_residual, quasiclassical_report, GaudinModel, GaudinSpec, ETA_LADDER,
};
use xyz_gaudin::lattice::{Chain, Site};
use xyz_gaudin::sklyanin::Spin;
use xyz_gaudin::CMatrix;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn spec(twos: &[i64], zs: &[Complex64], tau: Complex64) -> GaudinSpec {
    let sites = twos.iter().zip(zs).map(|(&t, &z)| Site::new(Spin::from_twice(t).unwrap(), z)).collect();
    GaudinSpec::new(sites, ModulusContext::new(tau).unwrap()).unwrap()
}

fn mixed() -> GaudinSpec {
    spec(&[1, 1, 2], &[c(0.13, 0.0), c(-0.21, 0.0), c(0.31, 0.05)], c(0.0, 1.0))
}

fn rel_commutator(a: &CMatrix, b: &CMatrix) -> f64 {
    (a * b - b * a).norm() / (a.norm() * b.norm()).max(1.0)
}

#[test]
fn classical_spins_satisfy_su2() {
    for t in 1..=4 {
        let s = classical_spin(Spin::from_twice(t).unwrap());
        assert!(s.algebra_residual() < 1e-13);
    }
}

#[test]
fn hamiltonians_sum_to_zero_and_commute() {
    let model = GaudinModel::standard(mixed());
    let mut hams = model.hamiltonians().unwrap();
    let sum = hams.iter().skip(1).fold(hams[0].clone(), |acc, h| acc + h);
    assert!(sum.norm() < 1e-10);
    hams.push(model.hamiltonian_0().unwrap());
    for i in 0..hams.len() {
        for j in i + 1..hams.len() {
            assert!(rel_commutator(&hams[i], &hams[j]) < 1e-8, "[H_{i}, H_{j}]");
        }
    }
}

#[test]
fn tau_hat_is_recovered_from_its_poles() {
    let model = GaudinModel::standard(mixed());
    for u in [c(0.02, 0.41), c(-0.37, 0.22), c(0.44, 0.77)] {
        assert!(model.tau_decomposition_residual(u).unwrap() < 1e-7);
    }
}

#[test]
fn quasiclassical_orders() {
    let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
    let sites = vec![Site::new(Spin::HALF, c(0.13, 0.0)), Site::new(Spin::ONE, c(-0.21, 0.0))];
    let gspec = GaudinSpec::new(sites, ctx).unwrap();
    let chain = Chain::new(gspec.chain_spec(c(ETA_LADDER[0], 0.0)).unwrap(), 2).unwrap();
    let rep = quasiclassical_report(&chain, c(0.07, 0.29), &ETA_LADDER).unwrap();
    assert!(rep.l_slope >= 0.9, "{}", rep.l_slope);
    assert!(rep.t_slope >= 0.9, "{}", rep.t_slope);
    assert!(rep.r_slope >= 0.9, "{}", rep.r_slope);
    assert!(rep.transfer_linear_coeff < 1e-8, "{}", rep.transfer_linear_coeff);
    assert!(rep.tau_slope >= 2.7, "{}", rep.tau_slope);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classical_yang_baxter(u in (-0.5f64..0.5, 0.05f64..0.45), v in (-0.5f64..0.5, 0.05f64..0.45)) {
        let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
        prop_assume!((u.0 - v.0).abs() > 0.05 || (u.1 - v.1).abs() > 0.05);
        let r = classical_yang_baxter_residual(c(u.0, u.1), c(v.0, v.1), &ctx).unwrap();
        prop_assert!(r < 1e-9, "{}", r);
    }

    #[test]
    fn sum_rule_for_random_sites(
        z in proptest::collection::vec((-0.5f64..0.5, 0.0f64..0.9), 2..=3),
        twos in proptest::collection::vec(1i64..=2, 3),
    ) {
        let zs: Vec<Complex64> = z.iter().map(|&(a, b)| c(a, b)).collect();
        let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
        for i in 0..zs.len() {
            for j in i + 1..zs.len() {
                prop_assume!(ctx.lattice_distance(zs[i] - zs[j]) > 0.1);
            }
        }
        let model = GaudinModel::standard(spec(&twos[..zs.len()], &zs, c(0.0, 1.0)));
        let hams = model.hamiltonians().unwrap();
        let scale = hams.iter().map(|h| h.norm()).fold(1.0, f64::max);
        let sum = hams.iter().skip(1).fold(hams[0].clone(), |acc, h| acc + h);
        prop_assert!(sum.norm() / scale < 1e-10);
    }
}
