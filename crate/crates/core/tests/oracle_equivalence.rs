//! Engine output versus the brute-force oracles on randomized worlds.

use voxshift_core::isovist::{
    compute_isovist, enumerate_headspaces, visible, Headspace, IsovistSets, LineIter,
};
use voxshift_core::metrics::compute_metrics;
use voxshift_core::rng::SeededRng;
use voxshift_core::world::Coord;
use voxshift_testkit::oracle::{
    bf_headspaces, bf_isovist, bf_line, bf_reachable, bf_visible, oracle_metrics,
};
use voxshift_testkit::worlds::{default_classification, random_world};

fn assert_sets_equal(label: &str, got: &IsovistSets, want: &IsovistSets) {
    assert_eq!(
        got.visible_headspaces, want.visible_headspaces,
        "{label}: visible headspaces"
    );
    assert_eq!(got.support_blocks, want.support_blocks, "{label}: supports");
    assert_eq!(got.perimeter, want.perimeter, "{label}: perimeter");
    assert_eq!(
        got.real_perimeter, want.real_perimeter,
        "{label}: real perimeter"
    );
    assert_eq!(got.reachable, want.reachable, "{label}: reachable");
    assert_eq!(
        got.sky_radial_count, want.sky_radial_count,
        "{label}: sky rays"
    );
    assert_eq!(got.radials.len(), want.radials.len(), "{label}: radials");
    for (a, b) in got.radials.iter().zip(&want.radials) {
        assert_eq!(a, b, "{label}: radial length");
    }
    assert_eq!(
        got.radial_endpoints, want.radial_endpoints,
        "{label}: endpoints"
    );
}

#[test]
fn line_walker_matches_materialized_lines() {
    let mut rng = SeededRng::new(77);
    for _ in 0..500 {
        let r = |rng: &mut SeededRng| rng.below(41) as i32 - 20;
        let a = Coord::new(r(&mut rng), r(&mut rng), r(&mut rng));
        let b = Coord::new(r(&mut rng), r(&mut rng), r(&mut rng));
        let (lo, hi) = voxshift_core::isovist::canonical(a, b);
        let walked: Vec<Coord> = LineIter::new(lo, hi).collect();
        assert_eq!(walked, bf_line(a, b), "{a} -> {b}");
    }
}

#[test]
fn visibility_matches_oracle_on_random_pairs() {
    let cls = default_classification();
    for seed in 0..12 {
        let world = random_world(seed, 12);
        let lo = world.min_corner();
        let hi = world.max_corner();
        let mut rng = SeededRng::new(seed ^ 0xABCD);
        let sample = |rng: &mut SeededRng| {
            Coord::new(
                lo.x + rng.below((hi.x - lo.x + 1) as u64) as i32,
                lo.y + rng.below((hi.y - lo.y + 1) as u64) as i32,
                lo.z + rng.below((hi.z - lo.z + 1) as u64) as i32,
            )
        };
        for _ in 0..60 {
            let a = sample(&mut rng);
            let b = sample(&mut rng);
            for d in [2u32, 6, 300] {
                assert_eq!(
                    visible(&world, a, b, &cls, d),
                    bf_visible(&world, &cls, a, b, d),
                    "world {seed}: {a} -> {b} at d={d}"
                );
            }
        }
    }
}

#[test]
fn flat_world_yields_one_headspace_per_column() {
    let cls = default_classification();
    let world = voxshift_core::world::generate_flat_world((64, 32, 64), 4, "grass", 0).unwrap();
    let heads = enumerate_headspaces(&world, &cls);
    assert_eq!(heads.len(), 64 * 64);
    // Ground fills y 0..4, so the support is y=3 and the head is y=5.
    assert!(heads.iter().all(|h| h.head.y == 5));
    let bf: Vec<Coord> = bf_headspaces(&world, &cls);
    assert_eq!(bf.len(), heads.len());
}

#[test]
fn headspace_enumeration_matches_exhaustive_scan() {
    let cls = default_classification();
    for seed in 0..16 {
        let world = random_world(seed, 14);
        let got: Vec<Coord> = enumerate_headspaces(&world, &cls)
            .iter()
            .map(|h| h.head)
            .collect();
        assert_eq!(got, bf_headspaces(&world, &cls), "world {seed}");
    }
}

#[test]
fn reachability_matches_column_scanning_oracle() {
    let cls = default_classification();
    for seed in 0u64..10 {
        let world = random_world(seed.wrapping_mul(31), 12);
        let heads = enumerate_headspaces(&world, &cls);
        for hs in heads.iter().take(4) {
            for budget in [0u32, 1, 3, 8] {
                let got = voxshift_core::isovist::reachable_set(&world, hs.support(), &cls, budget);
                let want = bf_reachable(&world, &cls, hs.support(), budget);
                assert_eq!(
                    got,
                    want,
                    "world {seed}, start {}, n={budget}",
                    hs.support()
                );
            }
        }
    }
}

#[test]
fn isovists_match_brute_force_on_random_worlds() {
    let cls = default_classification();
    let mut checked = 0;
    for seed in 0u64..10 {
        let world = random_world(seed.wrapping_add(1000), 12);
        let heads = enumerate_headspaces(&world, &cls);
        // Every headspace on small worlds, mixing clipped and unclipped
        // view distances.
        for (i, hs) in heads.iter().enumerate().take(6) {
            let d = [4u32, 7, 300][i % 3];
            let got = compute_isovist(&world, *hs, &cls, d, 5);
            let want = bf_isovist(&world, &cls, hs.head, d, 5);
            assert_sets_equal(
                &format!("world {seed}, head {}, d={d}", hs.head),
                &got,
                &want,
            );
            checked += 1;
        }
    }
    assert!(checked > 20, "corpus too small ({checked} isovists)");
}

#[test]
fn metrics_match_straight_from_definition_recomputation() {
    let cls = default_classification();
    for seed in 0u64..8 {
        let world = random_world(seed.wrapping_add(500), 12);
        let heads = enumerate_headspaces(&world, &cls);
        for hs in heads.iter().take(5) {
            let sets = compute_isovist(&world, *hs, &cls, 9, 6);
            let bf_sets = bf_isovist(&world, &cls, hs.head, 9, 6);
            let got = compute_metrics(&sets);
            let want = oracle_metrics(&bf_sets);

            assert_eq!(got.area, want.area);
            assert_eq!(got.perimeter, want.perimeter);
            assert_eq!(got.diversity, want.diversity);
            assert_eq!(got.reachability, want.reachability);
            assert_eq!(got.real_perimeter_size, want.real_perimeter_size);
            let close = |a: f64, b: f64, what: &str| {
                let diff = (a - b).abs();
                let rel = if b == 0.0 { diff } else { diff / b.abs() };
                assert!(rel <= 1e-9, "world {seed} {}: {what} {a} vs {b}", hs.head);
            };
            close(got.var_radials, want.var_radials, "var_radials");
            close(got.mean_radials, want.mean_radials, "mean_radials");
            close(got.roundness, want.roundness, "roundness");
            close(got.openness, want.openness, "openness");
            close(got.clutter, want.clutter, "clutter");
            close(got.occlusivity, want.occlusivity, "occlusivity");
            close(got.drift_length, want.drift_length, "drift_length");
            close(got.vista_length, want.vista_length, "vista_length");
        }
    }
}

#[test]
fn sealed_cavity_matches_oracle_exactly() {
    use voxshift_core::world::VoxelWorld;
    let palette = vec!["stone".to_string(), "air".to_string()];
    let mut grid = vec![0u16; 3 * 4 * 3];
    let w0 = VoxelWorld::new((3, 4, 3), (0, 0, 0), palette.clone(), grid.clone()).unwrap();
    for c in [Coord::new(1, 1, 1), Coord::new(1, 2, 1)] {
        grid[w0.index_of(c).unwrap()] = 1;
    }
    let world = VoxelWorld::new((3, 4, 3), (0, 0, 0), palette, grid).unwrap();
    let cls = default_classification();
    let hs = Headspace::new(Coord::new(1, 2, 1));
    let got = compute_isovist(&world, hs, &cls, 256, 32);
    let want = bf_isovist(&world, &cls, hs.head, 256, 32);
    assert_sets_equal("sealed cavity", &got, &want);
    assert_eq!(got.visible_headspaces, vec![hs.head]);
}
