//! Property tests for the pipeline invariants.

use proptest::prelude::*;

use voxshift_core::isovist::{
    compute_isovist, enumerate_headspaces, reachable_set, subsample_headspaces, visible,
};
use voxshift_core::metrics::{compute_metrics, METRIC_COUNT};
use voxshift_core::pca::fit_pca;
use voxshift_core::rng::SeededRng;
use voxshift_core::world::{load_world, save_world, Coord};
use voxshift_testkit::worlds::{default_classification, random_world};

fn sample_coord(rng: &mut SeededRng, lo: Coord, hi: Coord, slack: i32) -> Coord {
    let span = |a: i32, b: i32| (b - a + 1 + 2 * slack) as u64;
    Coord::new(
        lo.x - slack + rng.below(span(lo.x, hi.x)) as i32,
        lo.y - slack + rng.below(span(lo.y, hi.y)) as i32,
        lo.z - slack + rng.below(span(lo.z, hi.z)) as i32,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn voxgrid_round_trips(seed in any::<u64>()) {
        let world = random_world(seed, 10);
        let bytes = save_world(&world);
        let back = load_world(&bytes).unwrap();
        prop_assert_eq!(&back, &world);
        prop_assert_eq!(save_world(&back), bytes);
    }

    #[test]
    fn block_at_never_faults_and_matches_direct_indexing(seed in any::<u64>()) {
        let world = random_world(seed, 10);
        let (sx, _, sz) = world.dims();
        let lo = world.min_corner();
        let hi = world.max_corner();
        let mut rng = SeededRng::new(seed ^ 0x51ab);
        for _ in 0..200 {
            // Fuzz far outside the bounds as well as inside.
            let c = sample_coord(&mut rng, lo, hi, 2 * hi.x.abs_diff(lo.x) as i32 + 4);
            let got = world.block_at(c);
            let inside = c.x >= lo.x && c.x <= hi.x
                && c.y >= lo.y && c.y <= hi.y
                && c.z >= lo.z && c.z <= hi.z;
            if !inside {
                prop_assert!(got.is_none());
            } else {
                // Independent index arithmetic.
                let i = (c.x - lo.x) as usize
                    + sx as usize * ((c.z - lo.z) as usize + sz as usize * (c.y - lo.y) as usize);
                let want = world.palette()[world.grid()[i] as usize].as_str();
                prop_assert_eq!(got, Some(want));
            }
        }
    }

    #[test]
    fn visibility_is_symmetric(seed in any::<u64>()) {
        let world = random_world(seed, 10);
        let cls = default_classification();
        let mut rng = SeededRng::new(seed ^ 0x7777);
        for _ in 0..40 {
            let a = sample_coord(&mut rng, world.min_corner(), world.max_corner(), 1);
            let b = sample_coord(&mut rng, world.min_corner(), world.max_corner(), 1);
            prop_assert_eq!(
                visible(&world, a, b, &cls, 300),
                visible(&world, b, a, &cls, 300)
            );
        }
    }

    #[test]
    fn reachable_grows_monotonically_with_budget(seed in any::<u64>()) {
        let world = random_world(seed, 10);
        let cls = default_classification();
        let heads = enumerate_headspaces(&world, &cls);
        if let Some(hs) = heads.first() {
            let mut prev_len = 0usize;
            let mut prev: Vec<Coord> = Vec::new();
            for n in 0..5 {
                let cur = reachable_set(&world, hs.support(), &cls, n);
                prop_assert!(cur.len() >= prev_len);
                for c in &prev {
                    prop_assert!(cur.contains(c));
                }
                prev_len = cur.len();
                prev = cur;
            }
        }
    }

    #[test]
    fn ratio_metrics_stay_in_bounds(seed in any::<u64>()) {
        let world = random_world(seed, 10);
        let cls = default_classification();
        let heads = enumerate_headspaces(&world, &cls);
        for hs in heads.iter().take(3) {
            let sets = compute_isovist(&world, *hs, &cls, 8, 5);
            let m = compute_metrics(&sets);
            prop_assert!(m.area >= 1, "self-visibility");
            prop_assert!((0.0..=1.0).contains(&m.clutter));
            prop_assert!((0.0..=1.0).contains(&m.occlusivity));
            prop_assert!(m.real_perimeter_size <= m.perimeter);
            prop_assert!(m.diversity <= m.perimeter);
            prop_assert!(m.diversity <= world.palette().len());
            prop_assert!(m.vista_length >= m.mean_radials);
            prop_assert!(m.vista_length <= 8.0 + 1e-12);
            // Population variance identity.
            let mut rays: Vec<f64> = sets.radials.clone();
            rays.resize(rays.len() + sets.sky_radial_count, sets.sky_radial_length);
            if !rays.is_empty() {
                let mean = rays.iter().sum::<f64>() / rays.len() as f64;
                let mean_sq = rays.iter().map(|r| r * r).sum::<f64>() / rays.len() as f64;
                let ident = mean_sq - mean * mean;
                let rel = if ident == 0.0 {
                    (m.var_radials - ident).abs()
                } else {
                    ((m.var_radials - ident) / ident).abs()
                };
                prop_assert!(rel < 1e-9, "variance identity: {} vs {}", m.var_radials, ident);
            }
        }
    }

    #[test]
    fn subsampling_selects_the_ceiling_per_level(
        seed in any::<u64>(),
        fraction in 0.01f64..=1.0,
    ) {
        let world = random_world(seed, 10);
        let cls = default_classification();
        let heads = enumerate_headspaces(&world, &cls);
        let picked = subsample_headspaces(&heads, fraction, seed).unwrap();
        let count_at = |list: &[voxshift_core::isovist::Headspace], y: i32| {
            list.iter().filter(|h| h.head.y == y).count()
        };
        let mut levels: Vec<i32> = heads.iter().map(|h| h.head.y).collect();
        levels.sort_unstable();
        levels.dedup();
        for y in levels {
            let total = count_at(&heads, y);
            let want = voxshift_core::rng::ceil_fraction(total, fraction);
            prop_assert_eq!(count_at(&picked, y), want, "level {}", y);
        }
    }

    #[test]
    fn pca_loadings_orthonormal_on_random_matrices(seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let rows: Vec<[f64; METRIC_COUNT]> = (0..40)
            .map(|_| {
                let mut row = [0.0; METRIC_COUNT];
                for v in &mut row {
                    *v = (rng.next_u64() % 10_000) as f64 / 100.0;
                }
                row
            })
            .collect();
        let model = fit_pca(&rows, METRIC_COUNT).unwrap();
        for i in 0..METRIC_COUNT {
            for j in i..METRIC_COUNT {
                let dot: f64 = model.loadings[i]
                    .iter()
                    .zip(&model.loadings[j])
                    .map(|(a, b)| a * b)
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - expect).abs() < 1e-9);
            }
        }
        for pair in model.explained_variance_ratio.windows(2) {
            prop_assert!(pair[0] >= pair[1] - 1e-12);
        }
        let sum: f64 = model.explained_variance_ratio.iter().sum();
        prop_assert!(sum <= 1.0 + 1e-9);
    }

    #[test]
    fn pairing_respects_the_radius_bound_and_stays_injective(
        seed in any::<u64>(),
        fraction in 0.05f64..=1.0,
        radius in 0.0f64..6.0,
    ) {
        use voxshift_core::isovist::Headspace;
        use voxshift_core::shift::pair_locations;

        let blank = voxshift_core::metrics::IsovistMetrics {
            area: 1, perimeter: 1, diversity: 1,
            var_radials: 0.0, mean_radials: 1.0, roundness: 1.0, openness: 1.0,
            clutter: 0.0, reachability: 1, occlusivity: 0.0,
            drift_length: 0.0, vista_length: 1.0, real_perimeter_size: 1,
            degenerate: false,
        };
        let mut rng = SeededRng::new(seed);
        let mut make = |count: usize| -> Vec<(Headspace, voxshift_core::metrics::IsovistMetrics)> {
            let mut seen = std::collections::HashSet::new();
            let mut out = Vec::new();
            while out.len() < count {
                let c = Coord::new(
                    rng.below(12) as i32,
                    2 + rng.below(4) as i32,
                    rng.below(12) as i32,
                );
                if seen.insert(c) {
                    out.push((Headspace::new(c), blank.clone()));
                }
            }
            out
        };
        let base = make(40);
        let gen = make(30);
        let outcome = pair_locations(&base, &gen, fraction, radius, seed).unwrap();
        prop_assert_eq!(
            outcome.pairs.len() + outcome.dropped,
            outcome.sampled
        );
        prop_assert_eq!(outcome.sampled, voxshift_core::rng::ceil_fraction(40, fraction));
        let mut used_gen = std::collections::HashSet::new();
        let mut used_base = std::collections::HashSet::new();
        for p in &outcome.pairs {
            prop_assert!(used_gen.insert(p.gen_head), "gen head reused");
            prop_assert!(used_base.insert(p.base_head), "base head reused");
            let same_column =
                p.base_head.x == p.gen_head.x && p.base_head.z == p.gen_head.z;
            let dist = p.base_head.dist(p.gen_head);
            prop_assert!(
                same_column || (radius > 0.0 && dist <= radius),
                "pair {} -> {} violates the match rule (radius {})",
                p.base_head, p.gen_head, radius
            );
        }
    }

    #[test]
    fn shift_magnitude_is_rotation_and_flip_invariant(
        angle in 0.0f64..std::f64::consts::TAU,
        dx in -5.0f64..5.0,
        dy in -5.0f64..5.0,
    ) {
        let (sin, cos) = angle.sin_cos();
        let rotate = |p: [f64; 2]| [p[0] * cos - p[1] * sin, p[0] * sin + p[1] * cos];
        let pre = [1.25, -0.5];
        let post = [pre[0] + dx, pre[1] + dy];
        let mag = (dx * dx + dy * dy).sqrt();
        let (rp, rq) = (rotate(pre), rotate(post));
        let rmag = ((rq[0] - rp[0]).powi(2) + (rq[1] - rp[1]).powi(2)).sqrt();
        prop_assert!((mag - rmag).abs() < 1e-9);
        // A loading sign flip negates one coordinate of both points.
        for flip in 0..2 {
            let f = |mut p: [f64; 2]| { p[flip] = -p[flip]; p };
            let (fp, fq) = (f(pre), f(post));
            let fmag = ((fq[0] - fp[0]).powi(2) + (fq[1] - fp[1]).powi(2)).sqrt();
            prop_assert!((mag - fmag).abs() < 1e-12);
        }
    }
}
