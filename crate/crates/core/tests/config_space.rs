use num_complex::Complex64;
use proptest::prelude::*;

use cslab::config_space::{
    build_config_complex, check_action_consistency, cn_graphs, components, has_n_cycle, sn_action_on_components,
    PointCloud, DEFAULT_NODE_BUDGET,
};
use cslab::Exec;

fn counts(cloud: &PointCloud, n: usize) -> (u64, Vec<u64>) {
    let cx = build_config_complex(cloud, n, DEFAULT_NODE_BUDGET).unwrap();
    let d = components(&cx, Exec::default());
    let mut sizes = d.sizes();
    sizes.sort_unstable();
    (cx.node_count(), sizes)
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

#[test]
fn closed_form_component_counts() {
    let circle = PointCloud::circle(36).unwrap();
    let interval = PointCloud::interval(30).unwrap();
    for n in 2..=4 {
        assert_eq!(counts(&circle, n).1.len(), factorial(n - 1), "circle n = {n}");
        assert_eq!(counts(&interval, n).1.len(), factorial(n), "interval n = {n}");
    }
    assert_eq!(counts(&PointCloud::disk(40).unwrap(), 3).1.len(), 1);
}

#[test]
fn action_consistent_on_sampled_nodes() {
    for (cloud, n) in [
        (PointCloud::circle(48).unwrap(), 4),
        (PointCloud::interval(40).unwrap(), 4),
        (PointCloud::disk(40).unwrap(), 3),
    ] {
        let cx = build_config_complex(&cloud, n, DEFAULT_NODE_BUDGET).unwrap();
        let d = components(&cx, Exec::default());
        let a = sn_action_on_components(&cx, &d).unwrap();
        assert_eq!(check_action_consistency(&cx, &d, &a, 1000, 7), 0);
    }
}

#[test]
fn sequential_and_parallel_components_agree() {
    let cx = build_config_complex(&PointCloud::circle(40).unwrap(), 4, DEFAULT_NODE_BUDGET).unwrap();
    let a = components(&cx, Exec::Sequential);
    let b = components(&cx, Exec::Parallel);
    assert_eq!(a.labels(), b.labels());
}

#[test]
fn circle_four_graphs_are_four_cycles() {
    let cx = build_config_complex(&PointCloud::circle(48).unwrap(), 4, DEFAULT_NODE_BUDGET).unwrap();
    let d = components(&cx, Exec::default());
    let graphs = cn_graphs(&cx, &d, Exec::default()).unwrap();
    assert_eq!(graphs.len(), 6);
    for g in graphs {
        assert!(g.is_cycle() && g.edges.len() == 4);
        assert!(has_n_cycle(&g).unwrap());
    }
}

#[test]
fn fewer_points_than_slots_gives_empty_complex() {
    let cloud = PointCloud::interval(3).unwrap();
    let cx = build_config_complex(&cloud, 4, DEFAULT_NODE_BUDGET).unwrap();
    assert_eq!(cx.node_count(), 0);
    assert_eq!(components(&cx, Exec::default()).count(), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn relabeling_points_keeps_counts(seed in any::<u64>(), n in 2usize..=3) {
        let base = PointCloud::disk(24).unwrap();
        let mut pts: Vec<Complex64> = base.points().to_vec();
        let mut s = seed | 1;
        for i in (1..pts.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            pts.swap(i, (s >> 33) as usize % (i + 1));
        }
        let shuffled = PointCloud::new(pts, base.epsilon(), base.delta()).unwrap();
        prop_assert_eq!(counts(&base, n), counts(&shuffled, n));
    }

    #[test]
    fn growing_delta_only_adds_graph_edges(d0 in 0.05f64..0.3, extra in 0.0f64..0.5) {
        let base = PointCloud::disk(18).unwrap();
        let small = base.with_delta(d0).unwrap();
        let large = base.with_delta(d0 + extra).unwrap();
        let cx_s = build_config_complex(&small, 3, DEFAULT_NODE_BUDGET).unwrap();
        let cx_l = build_config_complex(&large, 3, DEFAULT_NODE_BUDGET).unwrap();
        let gs = cn_graphs(&cx_s, &components(&cx_s, Exec::default()), Exec::default()).unwrap();
        let gl = cn_graphs(&cx_l, &components(&cx_l, Exec::default()), Exec::default()).unwrap();
        for (a, b) in gs.iter().zip(&gl) {
            prop_assert!(a.edges.is_subset(&b.edges));
        }
    }
}
