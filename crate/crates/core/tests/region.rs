use binomoment::classify::{hankel2_binomial, hankel2_raney};
use binomoment::{classify_binomial, classify_raney, ExactRational, Scalar};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Scalar> {
    (-120i64..=120, 1i64..=24).prop_map(|(n, d)| Scalar::Exact(ExactRational::new(n, d)))
}

proptest! {
    #[test]
    fn binomial_region_is_point_symmetric(p in rational(), r in rational()) {
        let one = Scalar::int(1);
        let a = classify_binomial(&p, &r);
        let b = classify_binomial(&(&one - &p), &(&-&one - &r));
        prop_assert_eq!(a.positive_definite, b.positive_definite);
    }

    #[test]
    fn raney_region_is_point_symmetric(p in rational(), r in rational()) {
        let one = Scalar::int(1);
        let a = classify_raney(&p, &r);
        let b = classify_raney(&(&one - &p), &-&r);
        prop_assert_eq!(a.positive_definite, b.positive_definite);
    }

    #[test]
    fn region_implies_nonnegative_hankel2(p in rational(), r in rational()) {
        let zero = Scalar::int(0);
        if classify_binomial(&p, &r).positive_definite {
            prop_assert!(hankel2_binomial(&p, &r).cmp_value(&zero) != Some(std::cmp::Ordering::Less));
        }
        if classify_raney(&p, &r).positive_definite {
            prop_assert!(hankel2_raney(&p, &r).cmp_value(&zero) != Some(std::cmp::Ordering::Less));
        }
    }

    #[test]
    fn float_and_exact_inputs_agree(p in rational(), r in rational()) {
        let exact = classify_binomial(&p, &r);
        let float = classify_binomial(&p.to_float(), &r.to_float());
        prop_assert_eq!(exact, float);
    }
}

#[test]
fn dense_grid_hankel2_consistency() {
    let zero = Scalar::int(0);
    for i in -80..=100 {
        for j in -100..=80 {
            let (p, r) = (Scalar::ratio(i, 20), Scalar::ratio(j, 20));
            if classify_binomial(&p, &r).positive_definite {
                assert!(hankel2_binomial(&p, &r).cmp_value(&zero) != Some(std::cmp::Ordering::Less), "({p}, {r})");
            }
        }
    }
}
