use npure_core::oracle::{oracle_intersect, oracle_is_n_pure, oracle_scale, oracle_sum, OracleModule};
use npure_core::purity::{is_multiplication_module, is_n_pure, is_pure, PurityLevel};
use npure_core::{Ideal, ModulePresentation, QuantificationPolicy, Ring, Submodule};
use num_integer::Integer;
use proptest::prelude::*;

const EX: QuantificationPolicy = QuantificationPolicy::Exhaustive;

fn module(orders: &[u64]) -> ModulePresentation {
    let m = orders.iter().fold(1u64, |a, &b| a.lcm(&b));
    ModulePresentation::direct_sum(Ring::modular(m).unwrap(), orders)
}

/// A diagonal module of rank 1 or 2 and a few generators inside it.
fn instance() -> impl Strategy<Value = (Vec<u64>, Vec<Vec<u64>>)> {
    prop::collection::vec(2u64..=12, 1..=2).prop_flat_map(|orders| {
        let k = orders.len();
        let gen = prop::collection::vec(0u64..24, k);
        (Just(orders), prop::collection::vec(gen, 0..=2))
    })
}

fn span(m: &ModulePresentation, gens: &[Vec<u64>]) -> Submodule {
    m.span(gens.iter().map(|g| g.iter().copied())).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn lattice_and_oracle_verdicts_agree((orders, gens) in instance(), n in 1u32..=3) {
        let m = module(&orders);
        let sub = span(&m, &gens);
        let oracle = OracleModule::new(&m).unwrap();
        let set = oracle.from_submodule(&sub).unwrap();
        let level = PurityLevel::new(n).unwrap();
        let lattice = is_n_pure(&sub, level, EX).unwrap();
        let elementwise = oracle_is_n_pure(&set, level, EX).unwrap();
        prop_assert_eq!(lattice.outcome(), elementwise.outcome());
    }

    #[test]
    fn pure_implies_two_pure((orders, gens) in instance()) {
        let m = module(&orders);
        let sub = span(&m, &gens);
        if is_pure(&sub, EX).unwrap().is_holds() {
            prop_assert!(is_n_pure(&sub, PurityLevel::TWO, EX).unwrap().is_holds());
        }
    }

    #[test]
    fn lattice_operations_match_element_sets((orders, a) in instance(), b in prop::collection::vec(0u64..24, 1..=2), g in 0u64..24) {
        let m = module(&orders);
        let b: Vec<Vec<u64>> = vec![b.iter().copied().cycle().take(orders.len()).collect()];
        let (x, y) = (span(&m, &a), span(&m, &b));
        let oracle = OracleModule::new(&m).unwrap();
        let (sx, sy) = (oracle.from_submodule(&x).unwrap(), oracle.from_submodule(&y).unwrap());
        prop_assert!(oracle.from_submodule(&x.intersect(&y).unwrap()).unwrap() == oracle_intersect(&sx, &sy));
        prop_assert!(oracle.from_submodule(&x.sum(&y).unwrap()).unwrap() == oracle_sum(&sx, &sy));
        let ideal = Ideal::new(m.ring(), g);
        prop_assert!(oracle.from_submodule(&x.scale(&ideal).unwrap()).unwrap() == oracle_scale(&ideal, &sx));
        prop_assert_eq!(oracle.from_submodule(&x).unwrap().to_submodule().unwrap(), x);
    }

    #[test]
    fn cyclic_products_are_commutative_and_inside_the_intersection(m in 2u64..=48, a in 0u64..48, b in 0u64..48) {
        let z = module(&[m]);
        prop_assert!(is_multiplication_module(&z).unwrap().is_holds());
        let (x, y) = (z.span([[a]]).unwrap(), z.span([[b]]).unwrap());
        let xy = x.product(&y).unwrap();
        prop_assert_eq!(&xy, &y.product(&x).unwrap());
        prop_assert!(xy.is_contained_in(&x.intersect(&y).unwrap()).unwrap());
    }
}
