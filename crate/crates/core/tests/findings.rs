//! Counterexamples found by the scans, pinned so they stay reproducible.

use npure_core::oracle::{oracle_replay_quotient, OracleModule};
use npure_core::purity::{
    check_product_characterization, is_fully_n_pure, is_n_pure, product_identity, product_identity_proper_tail,
    witness_breaks_identity, PurityLevel,
};
use npure_core::{Ideal, ModulePresentation, QuantificationPolicy, Ring};

const EX: QuantificationPolicy = QuantificationPolicy::Exhaustive;

fn level(n: u32) -> PurityLevel {
    PurityLevel::new(n).unwrap()
}

#[test]
fn n_purity_does_not_pass_to_quotients() {
    let ring = Ring::modular(8).unwrap();
    let m = ModulePresentation::direct_sum(ring, &[4, 8]);
    let n = m.span([[2, 0]]).unwrap();
    let k = m.span([[1, 2], [0, 4]]).unwrap();
    assert!(n.is_contained_in(&k).unwrap());
    assert!(is_n_pure(&k, level(2), EX).unwrap().is_holds());

    let q = m.quotient(&n).unwrap();
    assert_eq!(q.to_string(), "Z/2 ⊕ Z/8 over Z/8");
    let kq = k.image_in(&q).unwrap();
    let v = is_n_pure(&kq, level(2), EX).unwrap();
    assert!(v.is_fails());
    let two = Ideal::new(ring, 2);
    assert_eq!(v.witness().unwrap().ideals, vec![two.clone(), two.clone()]);
    assert!(witness_breaks_identity(&kq, &[two.clone(), two.clone()]).unwrap());

    // IJ(K/N) = 0 while the right-hand side is {0, (0,4)}
    assert!(kq.scale(&two).unwrap().scale(&two).unwrap().is_zero());
    let rhs = kq
        .scale(&two)
        .unwrap()
        .intersect(&q.whole().scale(&Ideal::new(ring, 4)).unwrap())
        .unwrap();
    assert_eq!(rhs, q.span([[0, 4]]).unwrap());

    let oracle = OracleModule::new(&m).unwrap();
    let (ks, ns) = (oracle.from_submodule(&k).unwrap(), oracle.from_submodule(&n).unwrap());
    assert!(oracle_replay_quotient(&ks, &ns, &[two.clone(), two]));
}

#[test]
fn level_three_localization_loses_a_coprime_ideal() {
    let ring = Ring::modular(24).unwrap();
    let m = ModulePresentation::cyclic(ring, 24);
    let n = m.span([[2]]).unwrap();
    let global = is_n_pure(&n, level(3), EX).unwrap();
    assert!(global.is_fails());
    let ideals = &global.witness().unwrap().ideals;
    assert!(witness_breaks_identity(&n, ideals).unwrap());
    for p in [2, 3] {
        let local = m.localize(p).unwrap();
        let np = local.transfer(&n).unwrap();
        assert!(is_n_pure(&np, level(3), EX).unwrap().is_holds(), "p = {p}");
    }
    // the same module agrees at level 2
    assert!(is_n_pure(&n, level(2), EX).unwrap().is_fails());
    let local2 = m.localize(2).unwrap();
    assert!(is_n_pure(&local2.transfer(&n).unwrap(), level(2), EX)
        .unwrap()
        .is_fails());
}

#[test]
fn product_identity_with_the_whole_module_in_the_tail() {
    for order in [8, 27] {
        let m = ModulePresentation::cyclic(Ring::modular(order).unwrap(), order);
        assert!(is_fully_n_pure(&m, level(3), EX).unwrap().is_holds());
        assert!(product_identity(&m, level(3)).unwrap().is_fails());
        assert!(check_product_characterization(&m, level(3)).unwrap().is_fails());
        assert!(product_identity_proper_tail(&m, level(3)).unwrap().is_holds());
    }
}
