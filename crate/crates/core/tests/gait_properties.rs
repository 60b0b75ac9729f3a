use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gaitscope::gait::{self, GaitConfig, Outcome};
use gaitscope::geometry::{self, LanePair, Point2};
use gaitscope::pipeline::{self, fixtures, AnnotationDocument};
use gaitscope::synth::{self, GroundLanes, WalkerSpec};

fn map_points(doc: &AnnotationDocument, f: impl Fn(Point2) -> Point2) -> AnnotationDocument {
    let mut out = doc.clone();
    if let Some(l) = &mut out.lane_calibration {
        *l = LanePair {
            line_a: l.line_a.map(&f),
            line_b: l.line_b.map(&f),
        };
    }
    for s in &mut out.sequences {
        for fr in &mut s.frames {
            fr.head = f(fr.head);
            fr.left_foot = f(fr.left_foot);
            fr.right_foot = f(fr.right_foot);
        }
    }
    out
}

fn features(doc: &AnnotationDocument) -> Vec<(u32, f64, f64)> {
    let out = pipeline::run_extract(doc, &GaitConfig::default()).unwrap();
    assert!(out.skipped.is_empty(), "{:?}", out.skipped);
    out.table
        .rows()
        .iter()
        .map(|r| (r.person_id, r.stride_length, r.head_range))
        .collect()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn image_similarity_scales_l_and_keeps_h() {
    let doc = fixtures::synthetic_walks();
    let base = features(&doc);
    for (angle, scale, shift) in [
        (0.3, 1.0, (40.0, -25.0)),
        (-1.1, 2.5, (0.0, 300.0)),
        (0.0, 0.4, (-7.0, 0.0)),
    ] {
        let (c, s) = (f64::cos(angle), f64::sin(angle));
        let moved = map_points(&doc, |p| {
            Point2::new(
                scale * (c * p.x - s * p.y) + shift.0,
                scale * (s * p.x + c * p.y) + shift.1,
            )
        });
        for ((id, l, h), (id2, l2, h2)) in base.iter().zip(features(&moved)) {
            assert_eq!(*id, id2);
            assert!(close(l2, scale * l, 1e-9), "L {l2} vs {}", scale * l);
            assert!(close(h2, *h, 1e-9), "H {h2} vs {h}");
        }
    }
}

#[test]
fn vertical_image_translation_keeps_h() {
    let doc = fixtures::synthetic_walks();
    let base = features(&doc);
    let moved = map_points(&doc, |p| Point2::new(p.x, p.y + 123.0));
    for ((_, l, h), (_, l2, h2)) in base.iter().zip(features(&moved)) {
        assert!(close(l2, *l, 1e-9));
        assert!(close(h2, *h, 1e-9));
    }
}

#[test]
fn mirrored_video_gives_same_features() {
    let doc = fixtures::synthetic_walks();
    let base = features(&doc);
    let mirrored = map_points(&doc, |p| Point2::new(1280.0 - p.x, p.y));
    for ((_, l, h), (_, l2, h2)) in base.iter().zip(features(&mirrored)) {
        assert!(close(l2, *l, 1e-9), "L {l2} vs {l}");
        assert!(close(h2, *h, 1e-9), "H {h2} vs {h}");
    }
}

#[test]
fn extraction_ignores_sequence_order_and_is_repeatable() {
    let doc = fixtures::synthetic_walks();
    let first = pipeline::run_extract(&doc, &GaitConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let mut shuffled = doc.clone();
        shuffled.sequences.shuffle(&mut rng);
        assert_eq!(
            pipeline::run_extract(&shuffled, &GaitConfig::default()).unwrap(),
            first
        );
    }
}

/// Ground truth of the bundled synthetic document: rectified footfalls are
/// the true ground footfalls pushed through ground -> image -> top view.
#[test]
fn synthetic_document_matches_ground_truth() {
    let mut rng = ChaCha8Rng::seed_from_u64(fixtures::SYNTHETIC_SEED);
    let scene = synth::demo_scene(&mut rng);
    let doc = fixtures::synthetic_walks();
    let config = GaitConfig::default();
    let h_top = geometry::top_view_homography(doc.lane_calibration.as_ref().unwrap()).unwrap();
    let ground_to_top = h_top.compose(&scene.camera.ground_homography()).unwrap();
    let out = pipeline::run_extract(&doc, &config).unwrap();
    assert_eq!(out.table.len(), 3);
    assert!(out.warnings.is_empty(), "{:?}", out.warnings);

    for (spec, walk) in scene.walkers.iter().zip(&doc.sequences) {
        let truth: Vec<Point2> = spec
            .footfalls()
            .iter()
            .map(|g| ground_to_top.apply(Point2::new(g[0], g[1])).unwrap())
            .collect();
        let stances = gait::extract_stances(walk, &h_top).unwrap();
        assert_eq!(stances.len(), truth.len());
        // Compared in the image, where the jitter bound (0.4 px per axis) applies.
        let top_to_image = h_top.invert().unwrap();
        for (s, t) in stances.iter().zip(&truth) {
            let got = top_to_image.apply(s.footfall).unwrap();
            let want = top_to_image.apply(*t).unwrap();
            assert!(
                got.distance(&want) < 0.4 * 2f64.sqrt(),
                "person {}: {got:?} vs {want:?}",
                walk.person_id
            );
        }
        let expected_l =
            truth.windows(2).map(|w| w[0].distance(&w[1])).sum::<f64>() / (truth.len() - 1) as f64;
        let row = out.table.get(spec.person_id).unwrap();
        assert!(
            close(row.stride_length, expected_l, 0.01),
            "L {} vs {expected_l}",
            row.stride_length
        );
        assert_eq!(row.stride_count, spec.steps);

        // Smoothing gain at the bob period; the remaining slack covers the
        // 0.4 px annotation jitter and less attenuation at the track ends.
        let gain = (-2.0 * (PI * config.sigma / spec.bob_period).powi(2)).exp();
        let expected_h = spec.true_head_range() * gain;
        assert!(
            (row.head_range - expected_h).abs() < 0.5,
            "H {} vs {expected_h}",
            row.head_range
        );
    }
}

#[test]
fn noise_free_footfalls_are_exact() {
    let camera = synth::orbit_camera([175.0, 300.0], 0.4, 1100.0, 500.0, 900.0);
    let lanes = GroundLanes::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let spec = WalkerSpec::new(1, [200.0, 50.0], PI / 2.0);
    let walk = spec.simulate(&camera, 0.0, &mut rng);
    let h_top = geometry::top_view_homography(&lanes.image(&camera).unwrap()).unwrap();
    let ground_to_top = h_top.compose(&camera.ground_homography()).unwrap();
    let stances = gait::extract_stances(&walk, &h_top).unwrap();
    for (s, g) in stances.iter().zip(spec.footfalls()) {
        let t = ground_to_top.apply(Point2::new(g[0], g[1])).unwrap();
        assert!(s.footfall.distance(&t) < 1e-8);
    }
    // Lane-parallel walking: rectified stride along the lanes is the
    // ground step in lane lengths.
    let f = gait::extract_features(&walk, &h_top, &GaitConfig::default()).unwrap();
    assert_eq!(f.stride_count, spec.steps as usize);
    assert!(f.head_range > 0.0);
}

#[test]
fn longer_strides_rank_higher_under_any_camera() {
    let lanes = GroundLanes::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let camera = synth::random_oblique_camera(&mut rng, [175.0, 300.0]);
        let h_top = geometry::top_view_homography(&lanes.image(&camera).unwrap()).unwrap();
        let ls: Vec<f64> = [45.0, 60.0, 80.0]
            .iter()
            .map(|&step| {
                let mut spec = WalkerSpec::new(1, [175.0, 40.0], PI / 2.0);
                spec.step_length = step;
                let walk = spec.simulate(&camera, 0.2, &mut rng);
                gait::extract_features(&walk, &h_top, &GaitConfig::default())
                    .unwrap()
                    .stride_length
            })
            .collect();
        assert!(ls[0] < ls[1] && ls[1] < ls[2], "{ls:?}");
        // Ratios follow the ground truth (step width 10 on both).
        let truth = |s: f64| s.hypot(10.0);
        assert!(close(ls[2] / ls[0], truth(80.0) / truth(45.0), 0.02));
    }
}

#[test]
fn feature_outcome_carried_through() {
    let doc = fixtures::synthetic_walks();
    let out = pipeline::run_extract(&doc, &GaitConfig::default()).unwrap();
    let outcomes: Vec<Outcome> = out.table.rows().iter().map(|r| r.outcome).collect();
    assert_eq!(outcomes, [Outcome::Fall, Outcome::NoFall, Outcome::Fall]);
}
