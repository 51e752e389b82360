use num_complex::Complex64;
use proptest::prelude::*;
use xyz_gaudin::elliptic::ModulusContext;
use xyz_gaudin::lattice::{off_scalar_part, yang_baxter_residual, Chain, ChainSpec, Site};
use xyz_gaudin::sklyanin::Spin;
use xyz_gaudin::CMatrix;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn chain(twos: &[i64], zs: &[f64], eta: f64) -> Chain {
    let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
    let sites = twos.iter().zip(zs).map(|(&t, &z)| Site::new(Spin::from_twice(t).unwrap(), c(z, 0.0))).collect();
    Chain::new(ChainSpec::new(sites, c(eta, 0.0), ctx).unwrap(), 5).unwrap()
}

fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    (a * b - b * a).norm() / (a.norm() * b.norm())
}

#[test]
fn transfer_matrices_commute_on_mixed_chains() {
    for (twos, zs) in [(&[1, 1][..], &[0.13, -0.21][..]), (&[1, 2, 1][..], &[0.11, -0.19, 0.31][..])] {
        let ch = chain(twos, zs, 0.1);
        let t1 = ch.transfer(c(0.21, 0.17)).unwrap();
        let t2 = ch.transfer(c(-0.12, 0.33)).unwrap();
        assert!(commutator_norm(&t1, &t2) < 1e-10);
    }
}

#[test]
fn quantum_determinant_is_the_scalar_delta_product() {
    let ch = chain(&[1, 2], &[0.13, -0.21], 0.1);
    let u = c(0.21, 0.17);
    let d = ch.quantum_determinant(u).unwrap();
    assert!(off_scalar_part(&d) < 1e-9);
    let value = ch.quantum_determinant_value(u).unwrap();
    assert!((d[(0, 0)] - value).norm() / value.norm() < 1e-9);
    let anti = ch.quantum_determinant_by_antisymmetrizer(u).unwrap();
    assert!((&anti - &d).norm() / d.norm() < 1e-9);
}

#[test]
fn dimension_cap_is_enforced() {
    let ctx = ModulusContext::new(c(0.0, 1.0)).unwrap();
    let sites = vec![Site::new(Spin::from_twice(3).unwrap(), c(0.1, 0.0)); 3];
    assert!(ChainSpec::with_dim_cap(sites, c(0.1, 0.0), ctx, 32).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn yang_baxter_holds(
        u in (-0.5f64..0.5, -0.5f64..0.5),
        v in (-0.5f64..0.5, -0.5f64..0.5),
        eta in 0.02f64..0.3,
        tau_im in 0.7f64..1.4,
    ) {
        let ctx = ModulusContext::new(c(0.0, tau_im)).unwrap();
        let r = yang_baxter_residual(c(u.0, u.1), c(v.0, v.1), c(eta, 0.0), &ctx).unwrap();
        prop_assert!(r < 1e-10, "{}", r);
    }
}
