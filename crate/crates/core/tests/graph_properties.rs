#![allow(clippy::needless_range_loop)]

use cascade_grid::attacks::{sample_attack, AttackKind, AttackSpec};
use cascade_grid::cascade::{prune_to_giant, run_cascade, CascadeOptions};
use cascade_grid::graph::Graph;
use cascade_grid::netgen::{assign_support_links, InterdependentGrid};
use proptest::prelude::*;

fn arb_graph(max_nodes: usize) -> impl Strategy<Value = Graph> {
    (1..=max_nodes).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let len = pairs.len();
        proptest::collection::vec(any::<bool>(), len).prop_map(move |keep| {
            let edges = pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e);
            Graph::new(n, edges).unwrap()
        })
    })
}

fn arb_grid() -> impl Strategy<Value = InterdependentGrid> {
    (arb_graph(10), arb_graph(5), any::<u64>())
        .prop_map(|(comm, power, seed)| assign_support_links(comm, power, seed).unwrap())
}

/// Component id of every alive node by plain DFS; dead nodes get `None`.
fn dfs_components(g: &Graph) -> Vec<Option<usize>> {
    let mut label = vec![None; g.node_count()];
    let mut next = 0;
    for s in 0..g.node_count() {
        if !g.is_alive(s) || label[s].is_some() {
            continue;
        }
        let mut stack = vec![s];
        label[s] = Some(next);
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if g.is_alive(w) && label[w].is_none() {
                    label[w] = Some(next);
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    label
}

#[test]
fn components_match_dfs_on_every_small_graph() {
    // Every labelled graph on up to 5 nodes, with every alive mask.
    for n in 1..=5usize {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        for edge_mask in 0u32..(1 << pairs.len()) {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| edge_mask & (1 << i) != 0)
                .map(|(_, &e)| e);
            let base = Graph::new(n, edges).unwrap();
            for dead in 0u32..(1 << n) {
                let mut g = base.clone();
                (0..n).filter(|v| dead & (1 << v) != 0).for_each(|v| {
                    g.remove(v);
                });
                let labels = g.components();
                let reference = dfs_components(&g);
                for u in 0..n {
                    assert_eq!(labels.component_of(u).is_some(), reference[u].is_some());
                    for v in 0..n {
                        let same = labels.component_of(u).is_some()
                            && labels.component_of(u) == labels.component_of(v);
                        let same_ref = reference[u].is_some() && reference[u] == reference[v];
                        assert_eq!(same, same_ref, "n={n} edges={edge_mask:b} dead={dead:b}");
                    }
                }
                let largest = (0..n)
                    .filter_map(|v| reference[v])
                    .map(|c| reference.iter().filter(|&&l| l == Some(c)).count())
                    .max()
                    .unwrap_or(0);
                assert_eq!(labels.largest_size(), largest);
            }
        }
    }
}

#[test]
fn seven_node_components() {
    let g = Graph::new(7, [(0, 1), (1, 2), (3, 4), (5, 6), (4, 5)]).unwrap();
    let labels = g.components();
    assert_eq!(labels.component_count(), 2);
    assert_eq!(labels.largest_size(), 4);
    assert!(labels.in_giant(3) && labels.in_giant(6) && !labels.in_giant(0));
}

proptest! {
    #[test]
    fn handshake(g in arb_graph(12)) {
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
    }

    #[test]
    fn pruning_is_idempotent(g in arb_graph(12)) {
        let mut g = g;
        prune_to_giant(&mut g);
        let alive = g.alive_count();
        prop_assert!(prune_to_giant(&mut g).is_empty());
        prop_assert_eq!(g.alive_count(), alive);
        prop_assert!(g.components().component_count() <= 1);
    }

    #[test]
    fn removal_never_grows_the_giant(g in arb_graph(12), v in 0usize..12) {
        let mut g = g;
        let before = g.components().largest_size();
        g.remove(v % g.node_count());
        prop_assert!(g.components().largest_size() <= before);
    }

    #[test]
    fn samplers_pick_distinct_alive_nodes(
        g in arb_graph(12),
        dead in proptest::collection::vec(any::<bool>(), 12),
        count in 0usize..12,
        seed in any::<u64>(),
    ) {
        let mut g = g;
        for v in 0..g.node_count() {
            if dead[v] {
                g.remove(v);
            }
        }
        let count = count.min(g.alive_count());
        for kind in AttackKind::ALL {
            let picked = sample_attack(&g, &AttackSpec::new(kind, count, seed)).unwrap().attacked;
            prop_assert_eq!(picked.len(), count);
            let mut sorted = picked.clone();
            sorted.sort_unstable();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), count);
            prop_assert!(picked.iter().all(|&v| g.is_alive(v)));
            let again = sample_attack(&g, &AttackSpec::new(kind, count, seed)).unwrap().attacked;
            prop_assert_eq!(picked, again);
        }
    }

    #[test]
    fn support_maps_agree(grid in arb_grid()) {
        prop_assert!(grid.support_maps_consistent());
        let total: usize = (0..grid.power().node_count()).map(|b| grid.supporters_of(b).len()).sum();
        prop_assert_eq!(total, grid.comm().node_count());
    }

    #[test]
    fn cascade_reaches_a_sound_fixpoint(grid in arb_grid(), mask in any::<u16>()) {
        let attacked: Vec<usize> =
            (0..grid.comm().node_count()).filter(|a| mask & (1 << a) != 0).collect();
        let mut run = grid.clone();
        let trace = run_cascade(&mut run, &attacked, CascadeOptions::default()).unwrap();
        prop_assert!(trace.converged);
        // Every alive comm node has an alive supporter, every alive power
        // node an alive supporter, and each side is one component.
        for a in run.comm().alive_nodes() {
            prop_assert!(run.power().is_alive(run.support_of(a)));
        }
        for b in run.power().alive_nodes() {
            prop_assert!(run.supporters_of(b).iter().any(|&a| run.comm().is_alive(a)));
        }
        prop_assert!(run.comm().components().component_count() <= 1);
        prop_assert!(run.power().components().component_count() <= 1);
        for a in &attacked {
            prop_assert!(!run.comm().is_alive(*a));
        }
    }

    #[test]
    fn same_seed_same_cascade(grid in arb_grid(), seed in any::<u64>()) {
        let count = grid.comm().node_count() / 2;
        let spec = AttackSpec::new(AttackKind::Targeted, count, seed);
        let attacked = sample_attack(grid.comm(), &spec).unwrap().attacked;
        let (mut a, mut b) = (grid.clone(), grid.clone());
        let ta = run_cascade(&mut a, &attacked, CascadeOptions::default()).unwrap();
        let tb = run_cascade(&mut b, &attacked, CascadeOptions::default()).unwrap();
        prop_assert_eq!(ta, tb);
    }
}

/// Enlarging the attacked set never increases the final functional
/// fractions, checked by enumerating nested pairs on small grids. Ties
/// between equal-size components can break this, so the grids are kept
/// connected and every attack set is compared with its one-node supersets.
#[test]
fn attack_monotonicity_on_small_grids() {
    let comm = Graph::new(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]).unwrap();
    let power = Graph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
    let grid = InterdependentGrid::new(comm, power, vec![0, 0, 1, 1, 2, 2]).unwrap();
    let outcome = |mask: u32| {
        let attacked: Vec<usize> = (0..6).filter(|a| mask & (1 << a) != 0).collect();
        let mut run = grid.clone();
        let t = run_cascade(&mut run, &attacked, CascadeOptions::default()).unwrap();
        (t.final_mu_a, t.final_mu_b)
    };
    for mask in 0u32..64 {
        let (a, b) = outcome(mask);
        for extra in (0..6).filter(|v| mask & (1 << v) == 0) {
            let (a2, b2) = outcome(mask | 1 << extra);
            assert!(a2 <= a && b2 <= b, "mask {mask:b} + {extra}");
        }
    }
}
