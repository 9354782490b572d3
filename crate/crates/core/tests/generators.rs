use cascade_grid::analytic::DegreeDistribution;
use cascade_grid::attacks::{sample_mixed, sample_random, sample_targeted, AttackKind, AttackSpec};
use cascade_grid::graph::Graph;
use cascade_grid::netgen::{
    assign_support_links, generate_grid, generate_network, structural_cutoff, InterdependentGrid,
    NetworkRecipe,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn chi_square_p(observed: &[u64], expected: &[f64]) -> f64 {
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    1.0 - ChiSquared::new((observed.len() - 1) as f64)
        .unwrap()
        .cdf(stat)
}

#[test]
fn erdos_renyi_edge_count() {
    let expected = 1000.0 * 999.0 / 2.0 * 0.005;
    assert_eq!(expected, 2497.5);
    for seed in 0..20 {
        let g = generate_network(&NetworkRecipe::erdos_renyi(1000, 0.005, seed)).unwrap();
        let m = g.edge_count() as f64;
        assert!((m - expected).abs() <= 0.05 * expected, "seed {seed}: {m}");
    }
}

#[test]
fn erdos_renyi_degrees_are_poisson_like() {
    let g = generate_network(&NetworkRecipe::erdos_renyi(20_000, 4.0 / 19_999.0, 3)).unwrap();
    let d = g.degree_distribution().unwrap();
    assert!((d.mean_degree() - 4.0).abs() < 0.1);
    assert!((d.variance() - 4.0).abs() < 0.2);
    assert!(d.total_variation(&DegreeDistribution::poisson(4.0)) < 0.02);
}

#[test]
fn scale_free_tail_slope() {
    let n = 20_000;
    let g = generate_network(&NetworkRecipe::scale_free(n, 2.5, 2, 11)).unwrap();
    let degrees = g.degrees();
    let kmax = structural_cutoff(n);
    assert!(degrees.iter().all(|&k| (2..=kmax).contains(&k)));
    // Least-squares slope of log CCDF against log k, over the tail below
    // the cutoff.
    let points: Vec<(f64, f64)> = (2..kmax / 2)
        .filter_map(|k| {
            let tail = degrees.iter().filter(|&&d| d >= k).count();
            (tail > 0).then(|| ((k as f64).ln(), (tail as f64 / n as f64).ln()))
        })
        .collect();
    let len = points.len() as f64;
    let (mx, my) = (
        points.iter().map(|p| p.0).sum::<f64>() / len,
        points.iter().map(|p| p.1).sum::<f64>() / len,
    );
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((-1.9..=-1.1).contains(&slope), "slope {slope}");
}

#[test]
fn scale_free_is_simple_and_deterministic() {
    let recipe = NetworkRecipe::scale_free(3000, 2.5, 2, 5);
    let a = generate_network(&recipe).unwrap();
    let b = generate_network(&recipe).unwrap();
    assert_eq!(a.edges(), b.edges());
    // Graph::new rejects self-loops and duplicates, so rebuilding succeeds.
    Graph::new(a.node_count(), a.edges().iter().copied()).unwrap();
    let c = generate_network(&recipe.with_seed(6)).unwrap();
    assert_ne!(a.edges(), c.edges());
}

#[test]
fn support_counts_follow_the_binomial() {
    let grid = assign_support_links(
        Graph::new(10_000, []).unwrap(),
        Graph::new(1000, []).unwrap(),
        9,
    )
    .unwrap();
    let empirical = grid.support_degree_distribution();
    let exact = DegreeDistribution::binomial(10_000, 1e-3);
    assert!((empirical.mean_degree() - 10.0).abs() < 1e-9);
    assert!((empirical.variance() - 9.99).abs() < 0.1 * 9.99);
    assert!(empirical.total_variation(&exact) < 0.06);
    // Cells 4..=15 against the exact pmf, tails pooled into the end cells.
    let counts: Vec<usize> = (0..1000).map(|b| grid.supporters_of(b).len()).collect();
    let mut observed = vec![0u64; 12];
    for c in counts {
        observed[c.clamp(4, 15) - 4] += 1;
    }
    let mut expected: Vec<f64> = (4..=15).map(|k| 1000.0 * exact.probability(k)).collect();
    expected[0] = 1000.0 * (0..=4).map(|k| exact.probability(k)).sum::<f64>();
    expected[11] = 1000.0 * (1.0 - (0..15).map(|k| exact.probability(k)).sum::<f64>());
    assert!(chi_square_p(&observed, &expected) > 0.001);
}

#[test]
fn grid_files_round_trip() {
    let grid = generate_grid(
        &NetworkRecipe::scale_free(500, 2.5, 2, 1),
        &NetworkRecipe::erdos_renyi(80, 0.05, 2),
        3,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    grid.save(dir.path()).unwrap();
    let loaded = InterdependentGrid::load(dir.path()).unwrap();
    assert_eq!(loaded.comm().edges(), grid.comm().edges());
    assert_eq!(loaded.power().edges(), grid.power().edges());
    assert_eq!(loaded.support_map(), grid.support_map());
}

#[test]
fn random_sampler_is_uniform() {
    let g = Graph::new(10, (1..10).map(|v| (0, v))).unwrap();
    let mut counts = vec![0u64; 10];
    for seed in 0..20_000 {
        for v in sample_random(&g, &AttackSpec::new(AttackKind::Random, 3, seed))
            .unwrap()
            .attacked
        {
            counts[v] += 1;
        }
    }
    assert!(chi_square_p(&counts, &[6000.0; 10]) > 0.01);
}

#[test]
fn first_targeted_pick_is_degree_proportional() {
    // Degrees 4, 2, 2, 1, 2, 2, 1.
    let g = Graph::new(7, [(0, 1), (0, 2), (0, 3), (0, 4), (4, 5), (5, 6), (1, 2)]).unwrap();
    let degrees = g.degrees();
    let total: usize = degrees.iter().sum();
    let draws = 40_000;
    let mut counts = vec![0u64; 7];
    for seed in 0..draws {
        let first = sample_targeted(&g, &AttackSpec::new(AttackKind::Targeted, 1, seed))
            .unwrap()
            .attacked[0];
        counts[first] += 1;
    }
    let expected: Vec<f64> = degrees
        .iter()
        .map(|&d| draws as f64 * d as f64 / total as f64)
        .collect();
    assert!(chi_square_p(&counts, &expected) > 0.01);
}

#[test]
fn mixed_sampler_on_a_star() {
    // Hub 0 with three leaves, x = 2: one weighted pick then one uniform.
    // P(hub) = 1/2 + 1/2 * 1/3 = 2/3.
    let g = Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
    let draws = 60_000;
    let hub = (0..draws)
        .filter(|&s| {
            sample_mixed(&g, &AttackSpec::new(AttackKind::Mixed, 2, s))
                .unwrap()
                .attacked
                .contains(&0)
        })
        .count();
    assert!((hub as f64 / draws as f64 - 2.0 / 3.0).abs() < 0.01);
}
