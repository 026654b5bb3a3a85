mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use fpdim::closed_form::rho_closed_form;
use fpdim::lr::schur_product;
use fpdim::partition::{hook_dimension, hook_dimension_f64};
use fpdim::Partition;

use common::{quantum_dimension, schur_dimension, schur_expansion};

fn partition(rows: usize, max_part: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..=max_part, rows).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        common::trim(&v)
    })
}

#[test]
fn schur_oracle_on_known_products() {
    let e = schur_expansion(&[1], &[1], 2);
    assert_eq!(
        e.into_iter().collect::<Vec<_>>(),
        [(vec![1, 1], 1), (vec![2], 1)]
    );
    let e = schur_expansion(&[2, 1], &[2, 1], 3);
    assert_eq!(e[&vec![3, 2, 1]], 2);
    assert_eq!(e.values().sum::<i64>(), 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lr_expansion_matches_schur_polynomials(
        m in 1usize..=3,
        lambda in partition(3, 3),
        mu in partition(3, 3),
    ) {
        prop_assume!(lambda.len() <= m && mu.len() <= m);
        let library: BTreeMap<Vec<usize>, i64> =
            schur_product(&Partition::new(lambda.clone()).unwrap(), &Partition::new(mu.clone()).unwrap(), m, usize::MAX)
                .into_iter()
                .map(|(nu, c)| (nu.parts().to_vec(), c as i64))
                .collect();
        let oracle = schur_expansion(&lambda, &mu, m);
        prop_assert_eq!(library, oracle);
    }

    #[test]
    fn closed_form_matches_hook_content_product(
        k in 1usize..=5,
        lambda in partition(5, 6),
        extra in 0.01f64..200.0,
    ) {
        prop_assume!(lambda.len() <= k);
        let x = (k + lambda.first().copied().unwrap_or(0)) as f64 - 1.0 + extra;
        let p = Partition::new(lambda.clone()).unwrap();
        let library = rho_closed_form(&p, k, x).unwrap();
        let oracle = quantum_dimension(&lambda, k, x);
        prop_assert!((library - oracle).abs() <= 1e-9 * oracle.abs().max(1.0), "{} vs {}", library, oracle);
    }

    #[test]
    fn hook_dimension_matches_hook_content_formula(k in 1usize..=6, lambda in partition(6, 8)) {
        prop_assume!(lambda.len() <= k);
        let p = Partition::new(lambda.clone()).unwrap();
        let oracle = schur_dimension(&lambda, k);
        let exact: f64 = hook_dimension(&p, k).unwrap().to_string().parse().unwrap();
        prop_assert!((exact - oracle).abs() <= 1e-9 * oracle);
        prop_assert!((hook_dimension_f64(&p, k).unwrap() - oracle).abs() <= 1e-9 * oracle);
    }
}
