mod suites;

macro_rules! suite_tests {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                if let Err(e) = suites::$name() {
                    panic!("{e}");
                }
            }
        )*
    };
}

suite_tests!(
    newton_above_hodge,
    snf_agrees_with_minors,
    block_multiplicativity,
    conjugation_invariance,
    valuation_pairs,
    quaternion_norm_counts,
    idempotent_families,
    split_isolates_m3,
    adjunction_implies_hodge_duality,
    truncation_stability_builtin,
    synthetic_error_decomposition,
);
