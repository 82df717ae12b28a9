use eqgh_core::action::{ActionMode, FiniteAction};
use eqgh_core::group::{GeneratedGroup, GroupKind};
use eqgh_core::linalg::IntMatrix2;
use eqgh_core::metric::{
    approx_inverse, distortion, gh_exact, FiniteMetricSpace, GhaCertificate, MetricSpace, PointMap,
};
use eqgh_core::shadowing::{make_pseudo_orbit, shadow_hyperbolic_toral, z_window, ToralSystem};
use eqgh_core::systems::CircleGrid;
use eqgh_core::wasserstein::{
    contraction_check, folner_average, invariance_defect, mass_shift_bound, pushforward, w_p, DiscreteMeasure,
    FolnerSequence,
};
use proptest::prelude::*;

fn closure(mut d: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = d.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    d
}

/// Finite metric spaces with `1..=max` points and integer edge lengths.
fn space(max: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(1u8..=4, n * n).prop_map(move |w| {
            let d = (0..n)
                .map(|i| (0..n).map(|j| if i == j { 0.0 } else { w[i.min(j) * n + i.max(j)] as f64 }).collect())
                .collect();
            FiniteMetricSpace::from_matrix(closure(d)).unwrap()
        })
    })
}

/// Probability weights that are multiples of `1/64`.
fn dyadic(n: usize) -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec(0..n, 64).prop_map(move |hits| {
        let mut w = vec![0.0; n];
        for h in hits {
            w[h] += 1.0 / 64.0;
        }
        DiscreteMeasure::new(w).unwrap()
    })
}

fn permuted(x: &FiniteMetricSpace, perm: &[usize]) -> FiniteMetricSpace {
    let n = x.len();
    FiniteMetricSpace::from_matrix((0..n).map(|i| (0..n).map(|j| x.dist(perm[i], perm[j])).collect()).collect())
        .unwrap()
}

fn isometric(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> bool {
    fn go(x: &FiniteMetricSpace, y: &FiniteMetricSpace, img: &mut Vec<usize>) -> bool {
        let k = img.len();
        if k == x.len() {
            return true;
        }
        for t in 0..y.len() {
            if !img.contains(&t) && img.iter().enumerate().all(|(i, &s)| x.dist(i, k) == y.dist(s, t)) {
                img.push(t);
                if go(x, y, img) {
                    return true;
                }
                img.pop();
            }
        }
        false
    }
    x.len() == y.len() && go(x, y, &mut Vec::new())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_spaces_are_metrics(x in space(6)) {
        for i in 0..x.len() {
            for j in 0..x.len() {
                prop_assert_eq!(x.dist(i, j), x.dist(j, i));
                for k in 0..x.len() {
                    prop_assert!(x.dist(i, k) <= x.dist(i, j) + x.dist(j, k));
                }
            }
        }
    }

    #[test]
    fn gh_is_symmetric_and_zero_exactly_on_isometric_pairs(x in space(4), y in space(4)) {
        let a = gh_exact(&x, &y, None).unwrap().exact().unwrap();
        let b = gh_exact(&y, &x, None).unwrap().exact().unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(a == 0.0, isometric(&x, &y));
        prop_assert!(a >= (x.diameter() - y.diameter()).abs() / 2.0 - 1e-12);
        prop_assert!(a <= x.diameter().max(y.diameter()) / 2.0 + 1e-12);
    }

    #[test]
    fn gh_vanishes_under_relabelling(x in space(5), seed in any::<u64>()) {
        let n = x.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(gh_exact(&x, &permuted(&x, &perm), None).unwrap().exact(), Some(0.0));
    }

    #[test]
    fn gh_triangle_inequality(x in space(3), y in space(3), z in space(3)) {
        let g = |a: &FiniteMetricSpace, b: &FiniteMetricSpace| gh_exact(a, b, None).unwrap().exact().unwrap();
        prop_assert!(g(&x, &z) <= g(&x, &y) + g(&y, &z) + 1e-12);
    }

    #[test]
    fn approximate_inverse_bounds(x in space(6), y in space(6), raw in prop::collection::vec(any::<usize>(), 6)) {
        let f = PointMap::from_fn(x.len(), y.len(), |i| raw[i] % y.len()).unwrap();
        let c = GhaCertificate::measure(&x, &y, &f).unwrap();
        let eps = c.distortion.max(c.net_defect);
        let g = approx_inverse(&x, &y, &f, eps).unwrap();
        prop_assert!(distortion(&y, &x, &g).unwrap() <= 3.0 * eps + 1e-12);
        for i in 0..x.len() {
            prop_assert!(x.dist(i, g.apply(f.apply(i))) <= 2.0 * eps + 1e-12);
        }
        for t in 0..y.len() {
            prop_assert!(y.dist(t, f.apply(g.apply(t))) <= eps + 1e-12);
        }
    }

    #[test]
    fn wasserstein_is_a_metric(x in space(6), seeds in prop::collection::vec(any::<u64>(), 3), p in 1u8..=2) {
        let n = x.len();
        let ms: Vec<DiscreteMeasure> = seeds.iter().map(|&s| {
            let mut w: Vec<f64> = (0..n).map(|i| ((s >> (i * 5)) & 31) as f64).collect();
            w[(s as usize) % n] += 1.0;
            let t: f64 = w.iter().sum();
            DiscreteMeasure::new(w.into_iter().map(|v| v / t).collect()).unwrap()
        }).collect();
        let p = p as f64;
        let d = |a: &DiscreteMeasure, b: &DiscreteMeasure| w_p(&x, a, b, p).unwrap();
        prop_assert_eq!(d(&ms[0], &ms[0]), 0.0);
        prop_assert!((d(&ms[0], &ms[1]) - d(&ms[1], &ms[0])).abs() <= 1e-9);
        prop_assert!(d(&ms[0], &ms[2]) <= d(&ms[0], &ms[1]) + d(&ms[1], &ms[2]) + 1e-9);
        prop_assert!(w_p(&x, &ms[0], &ms[1], 1.0).unwrap() <= w_p(&x, &ms[0], &ms[1], 2.0).unwrap() + 1e-9);
    }

    #[test]
    fn pushforward_keeps_dyadic_mass_exactly(mu in dyadic(7), raw in prop::collection::vec(0usize..5, 7)) {
        let f = PointMap::new(7, 5, raw).unwrap();
        let img = pushforward(&f, &mu).unwrap();
        prop_assert_eq!(img.weights().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn contraction_holds(y in space(6), mu in dyadic(5), a in prop::collection::vec(any::<usize>(), 5),
                         b in prop::collection::vec(any::<usize>(), 5), p in 1u8..=2) {
        let f = PointMap::from_fn(5, y.len(), |i| a[i] % y.len()).unwrap();
        let g = PointMap::from_fn(5, y.len(), |i| b[i] % y.len()).unwrap();
        let c = contraction_check(&y, &f, &g, &mu, p as f64).unwrap();
        prop_assert!(c.holds && c.lhs <= c.rhs + 1e-9);
    }

    #[test]
    fn folner_averages_keep_mass_and_approach_invariance(m in 3usize..40, step in 1i64..40, n in 1usize..40, at in 0usize..40) {
        let c = CircleGrid::new(1.0, m).unwrap();
        let action = FiniteAction::new(GeneratedGroup::z(), c.clone(), vec![c.rotation(step)], ActionMode::Group).unwrap();
        let mu = DiscreteMeasure::dirac(m, at % m).unwrap();
        let avg = folner_average(&mu, &action, None, n).unwrap();
        prop_assert!((avg.total() - 1.0).abs() <= 1e-12);
        let seq = FolnerSequence::new(GroupKind::Z).unwrap();
        let t = seq.boundary_ratio(n);
        prop_assert!(invariance_defect(&avg, &action, 1.0).unwrap() <= mass_shift_bound(c.diameter(), t, 1.0) + 1e-9);
        prop_assert!(seq.boundary_ratio(n + 1) <= t);
    }

    #[test]
    fn cat_map_pseudo_orbits_are_traced(delta_exp in 2i32..6, seed in any::<u64>(), r in 5i64..40) {
        let a = IntMatrix2([[2, 1], [1, 1]]);
        let sys = ToralSystem::z(a).unwrap();
        let po = make_pseudo_orbit(&sys, 10f64.powi(-delta_exp), &[0], z_window(r), seed).unwrap();
        let t = shadow_hyperbolic_toral(&po, &a).unwrap();
        let eps = t.verify(&sys, &po).unwrap();
        prop_assert!(eps <= t.bound + 1e-9);
    }
}
