mod common;

use common::props::{exact_invariants, heuristic_invariants, location_invariant, setups};
use ponvm_core::Scenario;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn exact_solutions_conserve_flow_and_respect_capacity(setup in setups()) {
        exact_invariants(&setup)?;
    }

    #[test]
    fn heuristic_keeps_one_instance_per_network(setup in setups()) {
        heuristic_invariants(&setup)?;
    }

    #[test]
    fn vm_power_does_not_depend_on_location(s in 0usize..3, v in 0usize..4) {
        location_invariant(Scenario::ALL[s], v)?;
    }
}
