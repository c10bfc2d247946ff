//! Exhaustive metric-structure checks for the boundary model with the
//! dyadic gauge: the chain construction really is a metric, the sandwich
//! holds pair by pair, and the cylinder algebra is clopen.

use hypact_core::boundary::Cylinder;
use hypact_core::clopen::ClopenSet;
use hypact_core::free::{reduced_words_of_length, FreeWord};
use hypact_core::gen;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

#[test]
fn chain_metric_is_a_metric_at_depth_four() {
    let model = gen::f2_boundary(4, 8);
    let pts = model.points().to_vec();
    let n = pts.len();
    // All-pairs chain metric via Floyd-Warshall over the gauge weights; the
    // chain infimum over the model's points is exactly this shortest path.
    let mut d: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::zero()
                    } else {
                        model.visual_metric(&pts[i], &pts[j])
                    }
                })
                .collect()
        })
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &d[i][k] + &d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let two = BigRational::from(BigInt::from(2));
    for i in 0..n {
        assert!(d[i][i].is_zero());
        for j in 0..n {
            // symmetry and positivity
            assert_eq!(d[i][j], d[j][i]);
            if i != j {
                assert!(d[i][j] > BigRational::zero());
            }
            // triangle inequality is exact by construction; spot-assert it
            for k in (0..n).step_by(13) {
                assert!(d[i][j] <= &d[i][k] + &d[k][j]);
            }
            // sandwich against the gauge
            if i != j {
                let gauge = model.visual_metric(&pts[i], &pts[j]);
                assert!(d[i][j] <= gauge);
                assert!(&d[i][j] * &two >= gauge);
            }
        }
    }
    // Spot-check agreement with the per-pair chain computation.
    for (i, j) in [(0usize, 1usize), (3, 77), (50, 90), (10, 107)] {
        assert_eq!(model.chain_metric(&pts[i], &pts[j], n), d[i][j]);
    }
}

#[test]
fn sandwich_margins_are_reported() {
    let model = gen::f2_boundary(3, 6);
    let report = model.verify_sandwich();
    assert_eq!(report.pairs, 36 * 35 / 2);
    assert!(report.violations.is_empty());
    // In the word model the gauge is an ultrametric, so the chain metric
    // never undercuts it at all.
    assert_eq!(report.min_ratio.unwrap(), BigRational::from(BigInt::from(1)));
}

#[test]
fn cylinder_algebra_is_clopen_at_small_depth() {
    // Complement of every cylinder of depth <= 3 is a finite union of
    // cylinders covering exactly the other rays.
    for len in 0..=3usize {
        for p in reduced_words_of_length(2, len) {
            let c = ClopenSet::cylinder(p.clone());
            let comp = c.complement();
            assert!(c.union(&comp).is_full());
            assert!(!c.intersects(&comp));
            for w in reduced_words_of_length(2, 4) {
                assert_eq!(comp.contains_word(&w), !p.is_prefix_of(&w));
            }
        }
    }
}

#[test]
fn cylinder_nesting_matches_prefix_order() {
    let a = Cylinder::new(FreeWord::parse_f2("ab").unwrap());
    let b = Cylinder::new(FreeWord::parse_f2("a").unwrap());
    assert!(a.is_subset_of(&b));
    assert!(!b.is_subset_of(&a));
}
