//! Property tests for the algebraic invariants the toolkit is built on:
//! norm preservation, inverse round trips, oracle agreement between the
//! quaternion and matrix transform paths, and lossless file round trips.

use navtrace::geometry::{
    apply_scene_init, apply_scene_init_with, handedness_flip, head_pose, ipd, undo_scene_init,
    undo_scene_init_with, Mat4, ScaleDirection, UnitQuat, Vec3,
};
use navtrace::io::{csv_to_json, json_to_csv, parse_trace_csv, trace_to_csv_string};
use navtrace::model::{CoordinateSpace, Eye, EyeView, FovAngles, Frame, Pose, Trace};
use navtrace::scene::{scene_registry, SceneInit};
use navtrace::synth::{generate_trace, MotionSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_unit_quat<R: Rng>(rng: &mut R) -> UnitQuat {
    loop {
        let c: [f64; 4] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        if let Ok(q) = UnitQuat::new(c[0], c[1], c[2], c[3]) {
            if c.iter().map(|x| x * x).sum::<f64>() > 1e-3 {
                return q;
            }
        }
    }
}

fn random_vec3<R: Rng>(rng: &mut R, extent: f64) -> Vec3 {
    Vec3::new(
        rng.gen_range(-extent..extent),
        rng.gen_range(-extent..extent),
        rng.gen_range(-extent..extent),
    )
}

fn random_stage_pose<R: Rng>(rng: &mut R) -> Pose {
    Pose::new(
        random_vec3(rng, 1.5),
        random_unit_quat(rng),
        CoordinateSpace::PhysicalStage,
    )
}

fn to_na(q: &UnitQuat) -> nalgebra::UnitQuaternion<f64> {
    nalgebra::UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(q.w(), q.x(), q.y(), q.z()))
}

#[test]
fn rotation_preserves_vector_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let q = random_unit_quat(&mut rng);
        let v = random_vec3(&mut rng, 100.0);
        let rotated = q.rotate(v);
        assert!((rotated.norm() - v.norm()).abs() <= 1e-9 * v.norm().max(1.0));
    }
}

#[test]
fn rotation_agrees_with_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..2_000 {
        let q = random_unit_quat(&mut rng);
        let v = random_vec3(&mut rng, 10.0);
        let ours = q.rotate(v);
        let theirs = to_na(&q).transform_vector(&nalgebra::Vector3::new(v.x, v.y, v.z));
        assert!((ours.x - theirs.x).abs() < 1e-12);
        assert!((ours.y - theirs.y).abs() < 1e-12);
        assert!((ours.z - theirs.z).abs() < 1e-12);
    }
}

#[test]
fn multiplication_is_associative_and_matches_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..2_000 {
        let (a, b, c) = (
            random_unit_quat(&mut rng),
            random_unit_quat(&mut rng),
            random_unit_quat(&mut rng),
        );
        let left = (a * b) * c;
        let right = a * (b * c);
        assert!(left.approx_eq(&right, 1e-9));

        let ours = a * b;
        let theirs = to_na(&a) * to_na(&b);
        let t = theirs.quaternion();
        let theirs_q = UnitQuat::new(t.i, t.j, t.k, t.w).unwrap();
        assert!(ours.approx_eq(&theirs_q, 1e-12));
    }
}

#[test]
fn quat_matrix_round_trip_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..2_000 {
        let q = random_unit_quat(&mut rng);
        let back = Mat4::from_quat(&q).rotation_quat(1e-9).unwrap();
        assert!(q.approx_eq(&back, 1e-9));
    }
}

#[test]
fn handedness_flip_is_involutive_and_matches_matrix_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let flip_mat = {
        let mut m = Mat4::IDENTITY;
        m.m[1][1] = -1.0;
        m.m[2][2] = -1.0;
        m
    };
    for _ in 0..2_000 {
        let p = Pose::new(
            random_vec3(&mut rng, 10.0),
            random_unit_quat(&mut rng),
            CoordinateSpace::VirtualWorld,
        );
        let once = handedness_flip(&p);
        let twice = handedness_flip(&once);
        assert_eq!(twice.position, p.position);
        assert_eq!(twice.orientation.as_xyzw(), p.orientation.as_xyzw());

        // matrix oracle: F * M * F
        let conjugated = flip_mat.mul(&p.camera_to_world()).mul(&flip_mat);
        assert!(conjugated.max_abs_diff(&once.camera_to_world()) < 1e-12);
    }
}

#[test]
fn scene_init_inverse_round_trips_for_all_scenes() {
    let registry = scene_registry();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for (scene, init) in registry.iter() {
        for _ in 0..200 {
            let p = random_stage_pose(&mut rng);
            let there = apply_scene_init(&p, init).unwrap();
            let back = undo_scene_init(&there, init).unwrap();
            assert!(
                back.position.distance(p.position) < 1e-9,
                "{scene}: position drifted"
            );
            assert!(
                back.orientation.approx_eq(&p.orientation, 1e-9),
                "{scene}: orientation drifted"
            );
        }
    }
}

#[test]
fn scene_init_round_trips_under_reciprocal_scale_reading() {
    let registry = scene_registry();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (_, init) in registry.iter() {
        for dir in [
            ScaleDirection::VirtualPerMeter,
            ScaleDirection::MeterPerVirtual,
        ] {
            let p = random_stage_pose(&mut rng);
            let there = apply_scene_init_with(&p, init, dir).unwrap();
            let back = undo_scene_init_with(&there, init, dir).unwrap();
            assert!(back.position.distance(p.position) < 1e-9);
            assert!(back.orientation.approx_eq(&p.orientation, 1e-9));
        }
    }
}

/// The scene transform expressed as a matrix product:
/// translate(init_pos) * rotate(q_init) * scale(s) applied to the pose's
/// camera-to-world matrix. Independent route for the oracle check.
fn scene_init_matrix(init: &SceneInit) -> Mat4 {
    Mat4::translation(init.init_pos)
        .mul(&Mat4::from_quat(&init.q_init))
        .mul(&Mat4::uniform_scale(init.scale))
}

#[test]
fn quaternion_path_matches_matrix_composition_oracle() {
    let registry = scene_registry();
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for (scene, init) in registry.iter() {
        let m_init = scene_init_matrix(init);
        for _ in 0..200 {
            let p = random_stage_pose(&mut rng);
            let there = apply_scene_init(&p, init).unwrap();

            let composed = m_init.mul(&p.camera_to_world());
            let oracle_pos = composed.translation_part();
            assert!(
                there.position.distance(oracle_pos) < 1e-9,
                "{scene}: positions disagree"
            );
            // rotation block is scale * R; divide the scale back out
            let mut rot = composed;
            for i in 0..3 {
                for j in 0..3 {
                    rot.m[i][j] /= init.scale;
                }
            }
            rot.m[0][3] = 0.0;
            rot.m[1][3] = 0.0;
            rot.m[2][3] = 0.0;
            let oracle_q = rot.rotation_quat(1e-7).unwrap();
            assert!(
                there.orientation.approx_eq(&oracle_q, 1e-9),
                "{scene}: orientations disagree"
            );
        }
    }
}

#[test]
fn ipd_scales_by_exactly_the_scene_factor() {
    let registry = scene_registry();
    let spec = MotionSpec::circle(1.0, 1.0, 5.0, 20.0);
    for (scene, init) in registry.iter() {
        let stage = generate_trace(&spec, "u1", scene, None).unwrap();
        let virt = generate_trace(&spec, "u1", scene, Some(init)).unwrap();
        for (sf, vf) in stage.frames.iter().zip(&virt.frames) {
            let ratio = ipd(vf) / ipd(sf);
            assert!(
                (ratio - init.scale).abs() <= 1e-9 * init.scale,
                "{scene}: ipd ratio {ratio} vs scale {}",
                init.scale
            );
        }
    }
}

#[test]
fn distance_ratio_is_scale_invariant() {
    let registry = scene_registry();
    let init = registry.get("treehill").unwrap();
    let spec = MotionSpec::circle(1.0, 2.0, 10.0, 30.0);
    let virt = generate_trace(&spec, "u1", "treehill", Some(init)).unwrap();

    // virtual-space head polyline length
    let mut virtual_distance = 0.0;
    let heads: Vec<Vec3> = virt
        .frames
        .iter()
        .map(|f| head_pose(f).unwrap().position)
        .collect();
    for pair in heads.windows(2) {
        virtual_distance += pair[1].distance(pair[0]);
    }

    let stats = navtrace::analytics::trace_stats(&virt, init).unwrap();
    assert!(
        (virtual_distance / init.scale - stats.distance_m).abs() < 1e-9,
        "similarity transform must preserve distance ratios"
    );
}

#[test]
fn fps_times_duration_is_frame_count_minus_one() {
    let spec = MotionSpec::circle(0.8, 1.5, 7.0, 24.0);
    let trace = generate_trace(&spec, "u1", "synthetic", None).unwrap();
    let stats = navtrace::analytics::trace_stats(&trace, &SceneInit::identity()).unwrap();
    assert_eq!(
        stats.fps * stats.duration_s,
        (stats.n_frames - 1) as f64,
        "definitional identity"
    );
}

// ---------------------------------------------------------------------------
// file-format round trips
// ---------------------------------------------------------------------------

prop_compose! {
    fn arb_finite(extent: f64)(v in -1.0f64..1.0) -> f64 { v * extent }
}

prop_compose! {
    fn arb_quat()(c in prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("non-degenerate", |c| c.iter().map(|x| x * x).sum::<f64>() > 1e-3))
        -> UnitQuat {
        UnitQuat::new(c[0], c[1], c[2], c[3]).unwrap()
    }
}

prop_compose! {
    fn arb_view(eye: Eye)(
        pos in prop::array::uniform3(-100.0f64..100.0),
        q in arb_quat(),
        gq in arb_quat(),
        dt in 0.0f64..50.0,
    ) -> EyeView {
        let position = Vec3::new(pos[0], pos[1], pos[2]);
        EyeView {
            eye,
            fov: match eye {
                Eye::Left => FovAngles::new(-0.942478, 0.698132, -0.942478, 0.733038),
                Eye::Right => FovAngles::new(-0.698132, 0.942478, -0.942478, 0.733038),
            },
            eye_pose: Pose::new(position, q, CoordinateSpace::VirtualWorld),
            gaze: Some(Pose::new(
                position + Vec3::new(0.001, 0.0, 0.0),
                gq,
                CoordinateSpace::VirtualWorld,
            )),
            timestamp_ms: dt,
            source: None,
        }
    }
}

prop_compose! {
    fn arb_trace()(
        n in 1usize..12,
        views in prop::collection::vec((arb_view(Eye::Left), arb_view(Eye::Right)), 12),
    ) -> Trace {
        let mut t = 0.0;
        let frames = views.into_iter().take(n).map(|(mut l, mut r)| {
            // make timestamps non-decreasing and shared within the frame
            t += l.timestamp_ms;
            l.timestamp_ms = t;
            r.timestamp_ms = t;
            // share the head orientation, as recorded frames do
            r.eye_pose.orientation = l.eye_pose.orientation;
            Frame::new(l, r).unwrap()
        }).collect();
        Trace::new("user1", "synthetic", frames, CoordinateSpace::VirtualWorld).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip_is_value_exact(trace in arb_trace()) {
        let text = trace_to_csv_string(&trace);
        let parsed = parse_trace_csv(text.as_bytes(), "user1", "synthetic").unwrap();
        prop_assert!(parsed.findings.is_empty());
        prop_assert_eq!(parsed.trace.n_frames(), trace.n_frames());
        for (a, b) in trace.eye_views().zip(parsed.trace.eye_views()) {
            prop_assert_eq!(a.eye_pose.position, b.eye_pose.position);
            prop_assert_eq!(a.eye_pose.orientation.as_xyzw(), b.eye_pose.orientation.as_xyzw());
            prop_assert_eq!(a.gaze.unwrap().position, b.gaze.unwrap().position);
            prop_assert_eq!(
                a.gaze.unwrap().orientation.as_xyzw(),
                b.gaze.unwrap().orientation.as_xyzw()
            );
            prop_assert_eq!(a.timestamp_ms, b.timestamp_ms);
            prop_assert_eq!(a.fov, b.fov);
        }
    }

    #[test]
    fn json_round_trip_stays_within_tolerance(trace in arb_trace(), flip in any::<bool>()) {
        let doc = csv_to_json(&trace, flip);
        let back = json_to_csv(&doc).unwrap();
        prop_assert_eq!(back.n_frames(), trace.n_frames());
        for (a, b) in trace.eye_views().zip(back.eye_views()) {
            prop_assert!(a.eye_pose.position.distance(b.eye_pose.position) < 1e-9);
            prop_assert!(a.eye_pose.orientation.approx_eq(&b.eye_pose.orientation, 1e-9));
            prop_assert_eq!(a.timestamp_ms, b.timestamp_ms);
        }
    }

    #[test]
    fn double_flip_through_the_pipeline_is_identity(trace in arb_trace()) {
        // flip on export, flip again on a second export of the re-import
        let once = json_to_csv(&csv_to_json(&trace, true)).unwrap();
        let twice = json_to_csv(&csv_to_json(&once, true)).unwrap();
        for (a, b) in trace.eye_views().zip(twice.eye_views()) {
            prop_assert!(a.eye_pose.position.distance(b.eye_pose.position) < 1e-9);
            prop_assert!(a.eye_pose.orientation.approx_eq(&b.eye_pose.orientation, 1e-9));
        }
    }
}

#[test]
fn column_permutation_parses_identically() {
    // write canonically, then shuffle the columns and re-parse
    let trace = generate_trace(
        &MotionSpec::circle(1.0, 1.0, 2.0, 10.0),
        "user1",
        "synthetic",
        None,
    )
    .unwrap();
    let text = trace_to_csv_string(&trace);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();

    let mut order: Vec<usize> = (0..header.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }

    let mut shuffled = String::new();
    shuffled.push_str(
        &order
            .iter()
            .map(|&i| header[i])
            .collect::<Vec<_>>()
            .join(","),
    );
    shuffled.push('\n');
    for row in rows {
        shuffled.push_str(&order.iter().map(|&i| row[i]).collect::<Vec<_>>().join(","));
        shuffled.push('\n');
    }

    let a = parse_trace_csv(text.as_bytes(), "user1", "synthetic").unwrap();
    let b = parse_trace_csv(shuffled.as_bytes(), "user1", "synthetic").unwrap();
    for (va, vb) in a.trace.eye_views().zip(b.trace.eye_views()) {
        assert_eq!(va.eye_pose, vb.eye_pose);
        assert_eq!(va.gaze, vb.gaze);
        assert_eq!(va.fov, vb.fov);
        assert_eq!(va.timestamp_ms, vb.timestamp_ms);
    }
}
