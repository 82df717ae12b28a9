use eqgh_core::prelude::*;

#[test]
fn example_family_holds_for_n_up_to_ten() {
    for n in 1..=10 {
        let e = example_family(n, 32, &ExampleDynamics::paper_pair()).unwrap();
        assert!(e.measured.max() <= e.bound + e.slack + 1e-9, "n = {n}");
        assert_eq!(e.measured.h_net_defect, 0.0);
    }
}
