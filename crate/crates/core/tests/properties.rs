mod common;

use proptest::prelude::*;

use common::*;
use reebli::graph::GraphPoint;
use reebli::interleave::{
    classify_essential, decide_at, event_values, label_lower_bound, labeled_distance_contour, Distance, Labeling,
};
use reebli::merge::{merge_labeled_distance, with_common_sentinel};
use reebli::par::Mode;
use reebli::smoothing::n_eps_region;
use reebli::{function_preserving_isomorphic, smooth, Rational};

fn quarter(k: u8) -> Rational {
    Rational::new(k as i128, 4)
}

fn rotate(l: &Labeling, by: usize) -> Labeling {
    let mut v = l.nodes().to_vec();
    let by = by % v.len().max(1);
    v.rotate_left(by);
    Labeling::new(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn smoothing_composes(seed: u64, n in 2usize..16, extra in 0usize..3, e in 1u8..8, d in 1u8..8) {
        let mut rng = rng(seed);
        let g = random_graph(&mut rng, n, extra);
        let twice = smooth(smooth(&g, quarter(e)).unwrap().graph(), quarter(d)).unwrap();
        let once = smooth(&g, quarter(e) + quarter(d)).unwrap();
        prop_assert!(function_preserving_isomorphic(twice.graph(), once.graph()).unwrap());
    }

    #[test]
    fn shifted_region_stays_in_path_neighborhood(seed: u64, n in 2usize..10, e in 1u8..12) {
        let mut rng = rng(seed);
        let g = random_graph(&mut rng, n, 1);
        let eps = quarter(e);
        let sm = smooth(&g, eps).unwrap();
        for u in g.nodes() {
            let region = n_eps_region(&g, u, eps).unwrap();
            for p in region.sample_points(&g, 3) {
                let y = sm.shift_eta(p).unwrap();
                prop_assert!(sm.on_path_neighborhood(GraphPoint::Node(u), y).unwrap());
            }
        }
    }

    #[test]
    fn contour_distance_is_a_metric(seed: u64, n in 4usize..8) {
        let mut rng = rng(seed);
        let a = random_contour_tree(&mut rng, n);
        let b = perturb(&mut rng, &a, 2);
        let c = perturb(&mut rng, &a, 2);
        let l = sorted_leaf_labels(&a);
        let d = |x, y| labeled_distance_contour(x, &l, y, &l).unwrap().distance.finite().unwrap();
        prop_assert_eq!(d(&a, &a), Rational::from(0));
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
        prop_assert!(d(&a, &b) >= label_lower_bound(&a, &l, &b, &l));
    }

    #[test]
    fn distance_ignores_label_names(seed: u64, n in 4usize..8, by in 0usize..6) {
        let mut rng = rng(seed);
        let a = random_contour_tree(&mut rng, n);
        let b = perturb(&mut rng, &a, 2);
        let l = sorted_leaf_labels(&a);
        let r = rotate(&l, by);
        let plain = labeled_distance_contour(&a, &l, &b, &l).unwrap().distance;
        let rotated = labeled_distance_contour(&a, &r, &b, &r).unwrap().distance;
        prop_assert_eq!(plain, rotated);
    }

    #[test]
    fn feasibility_is_constant_between_events(seed: u64, n in 4usize..7) {
        let mut rng = rng(seed);
        let a = random_contour_tree(&mut rng, n);
        let b = perturb(&mut rng, &a, 2);
        let l = sorted_leaf_labels(&a);
        let events = event_values(&a, &b, Mode::Sequential);
        for w in events.windows(2).take(6) {
            let step = (w[1] - w[0]) / Rational::from(3);
            let lo = decide_at(&a, &l, &b, &l, w[0] + step, Mode::Sequential).unwrap().feasible;
            let hi = decide_at(&a, &l, &b, &l, w[1] - step, Mode::Sequential).unwrap().feasible;
            prop_assert_eq!(lo, hi, "between {} and {}", w[0], w[1]);
        }
    }

    #[test]
    fn merge_matrix_matches_contour_distance(seed: u64, k in 2usize..10) {
        let mut rng = rng(seed);
        let (t1, l1) = random_merge_tree(&mut rng, k);
        let (t2, l2) = random_merge_tree(&mut rng, k);
        let matrix = merge_labeled_distance(&t1, &l1, &t2, &l2).unwrap();
        let (a, b) = with_common_sentinel(&t1, &t2).unwrap();
        let (la, lb) = (l1.with_label(a.root()), l2.with_label(b.root()));
        let general = labeled_distance_contour(a.graph(), &la, b.graph(), &lb).unwrap().distance;
        prop_assert_eq!(general, Distance::Finite(matrix));
    }

    #[test]
    fn essential_matches_path_enumeration(seed: u64, n in 3usize..9, extra in 0usize..3, e in 1u8..16) {
        let mut rng = rng(seed);
        let g = random_graph(&mut rng, n, extra);
        let eps = quarter(e);
        for v in g.nodes() {
            prop_assert_eq!(classify_essential(&g, v, eps).unwrap(), essential_oracle::classify(&g, v, eps));
        }
    }
}

#[test]
fn swapped_extremum_labels_are_infinitely_far() {
    let mut rng = rng(3);
    let a = random_contour_tree(&mut rng, 6);
    let l = sorted_leaf_labels(&a);
    let mut nodes = l.nodes().to_vec();
    let last = nodes.len() - 1;
    nodes.swap(0, last);
    let swapped = Labeling::new(nodes);
    let d = labeled_distance_contour(&a, &l, &a, &swapped).unwrap();
    assert_eq!(d.distance, Distance::Infinite);
}
