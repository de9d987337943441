#[path = "common/random_eq.rs"]
mod random_eq;

use proptest::prelude::*;
use random_eq::{check_equation, equation};

proptest! {
    #![proptest_config(ProptestConfig { cases: 30, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn random_equations_verify((p, shape) in equation()) {
        check_equation(p, &shape)?;
    }
}
