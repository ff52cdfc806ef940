mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lane_emden_iterates_decrease(dim in 1usize..5, (p, q) in exponents()) {
        monotone_iterates(dim, p, q)?;
    }

    #[test]
    fn eigenvalue_scales_with_radius(dim in 1usize..5, (p, q) in exponents(), radius in 0.2..5.0f64) {
        radius_scaling(dim, p, q, radius)?;
    }

    #[test]
    fn upper_estimate_is_homogeneous(
        values in source(21),
        dim in 1usize..5,
        (p, q) in exponents(),
        c in 0.01..100.0f64,
    ) {
        upper_estimate_scaling(values, dim, p, q, c)?;
    }

    #[test]
    fn residual_is_the_energy_gradient(
        p in 1.3..4.5f64,
        state in prop::collection::vec(-1.0..1.0f64, 36),
        direction in prop::collection::vec(-1.0..1.0f64, 36),
    ) {
        residual_is_energy_gradient(p, state, direction)?;
    }

    #[test]
    fn green_operator_is_order_preserving(
        dim in 1usize..5,
        p in 1.2..5.0f64,
        f in source(31),
        extra in source(31),
    ) {
        maximum_principle(dim, p, f, extra)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn square_eigenfunction_is_symmetric((p, q) in exponents()) {
        square_symmetry(p, q)?;
    }
}
