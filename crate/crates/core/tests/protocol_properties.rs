//! Protocol-chain properties: reversibility of the lifted chain across the
//! mixing grid, the affinity-implies-silence law, and the decoupling of
//! noncommutativity from drive.

mod common;

use common::*;
use macroscope_core::cycles::{affinities, cycle_basis, one_form, support_graph};
use macroscope_core::kernel::{check_detailed_balance, commutator_max_abs, stationary};
use macroscope_core::paths::sigma_t;
use macroscope_core::protocol::{lift_protocol, trap_audit, ProtocolFamily};
use macroscope_core::{Dist, Kernel, DEFAULT_PATH_CAP};

fn unbiased_two_phase() -> Kernel {
    Kernel::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap()
}

fn product_measure(pi: &Dist, s: &Dist) -> Dist {
    let mut w = Vec::with_capacity(pi.len() * s.len());
    for x in 0..pi.len() {
        for phi in 0..s.len() {
            w.push(pi.weight(x) * s.weight(phi));
        }
    }
    Dist::normalized(w).unwrap()
}

#[test]
fn lifted_chain_reversible_across_alpha_grid() {
    let (k0, k1) = noncommuting_state_kernels();
    let s = unbiased_two_phase();
    let pi = Dist::uniform(3);
    let s_stat = Dist::uniform(2);
    for &alpha in &[0.0, 0.25, 0.5, 0.75, 1.0] {
        let fam = ProtocolFamily::new(alpha, s.clone(), vec![k0.clone(), k1.clone()]).unwrap();
        let lifted = lift_protocol(&fam).unwrap();
        let mu = product_measure(&pi, &s_stat);
        let db = check_detailed_balance(&lifted.kernel, &mu, 1e-10).unwrap();
        assert!(db.reversible, "alpha {alpha}: violation {}", db.max_violation);
    }
}

#[test]
fn zero_affinities_imply_zero_sigma_at_stationarity() {
    // All cycle affinities of the lifted chain vanish, so the asymmetry at
    // any stationary distribution must vanish too.
    let (k0, k1) = noncommuting_state_kernels();
    let fam = ProtocolFamily::new(0.5, unbiased_two_phase(), vec![k0, k1]).unwrap();
    let lifted = lift_protocol(&fam).unwrap();

    let g = support_graph(&lifted.kernel, 1e-15);
    assert!(g.rev_ok);
    let a = one_form(&lifted.kernel, &g).unwrap();
    let basis = cycle_basis(&g);
    let aff = affinities(&a, &basis).unwrap();
    assert!(aff.all_within(1e-10), "affinities {:?}", aff.0);

    let pi = stationary(&lifted.kernel, &cfg()).unwrap().pi;
    for horizon in 1..=3 {
        let sigma = sigma_t(&lifted.kernel, &pi, horizon, DEFAULT_PATH_CAP).unwrap();
        assert!(sigma.value.abs() < 1e-10, "horizon {horizon}: sigma {}", sigma.value);
    }
    let product = product_measure(&Dist::uniform(3), &Dist::uniform(2));
    let sigma = sigma_t(&lifted.kernel, &product, 3, DEFAULT_PATH_CAP).unwrap();
    assert!(sigma.value.abs() < 1e-10);
}

#[test]
fn noncommuting_kernels_do_not_create_drive() {
    let (k0, k1) = noncommuting_state_kernels();
    assert!(commutator_max_abs(&k0, &k1).unwrap() > 0.1);
    let fam = ProtocolFamily::new(0.5, unbiased_two_phase(), vec![k0, k1]).unwrap();
    let audit = trap_audit(&fam, 3, DEFAULT_PATH_CAP, &cfg()).unwrap();
    assert!(audit.hypotheses.all_hold());
    assert!(audit.reversible_cert);
    assert!(audit.lifted_sigma.value.abs() < 1e-10);
    assert!(audit.projected_sigma.value.abs() < 1e-10);
}

#[test]
fn phase_bias_shows_up_in_the_lifted_audit() {
    let (k0, k1) = noncommuting_state_kernels();
    let biased = Kernel::from_rows(vec![
        vec![0.1, 0.7, 0.2],
        vec![0.2, 0.1, 0.7],
        vec![0.7, 0.2, 0.1],
    ])
    .unwrap();
    let fam = ProtocolFamily::new(0.5, biased, vec![k0.clone(), k1, k0]).unwrap();
    let audit = trap_audit(&fam, 2, DEFAULT_PATH_CAP, &cfg()).unwrap();
    assert!(!audit.hypotheses.phase_reversible);
    assert!(audit.lifted_sigma.value > 1e-4);
}
