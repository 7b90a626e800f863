use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hybridrt::math::Vec3;
use hybridrt::rng::Rng;
use hybridrt::volume::io::read_sdfgrid;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hybridrt"));
    c.env_remove("HYBRIDRT_THREADS");
    c
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], cwd: &Path) -> Output {
    let out = run(args, cwd);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Parses the single JSON error line and returns its exit code.
fn error_line(out: &Output) -> (i32, Value) {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    let line = text.lines().last().expect("an error line");
    let v: Value = serde_json::from_str(line).unwrap_or_else(|e| panic!("{line}: {e}"));
    (out.status.code().unwrap(), v)
}

#[test]
fn render_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen-assets", "scenes", "--out", "scenes"], d);
    let args = |out: &'static str| {
        [
            "render",
            "--scene",
            "scenes/two_room.json",
            "--out",
            out,
            "--width",
            "24",
            "--height",
            "16",
            "--spp",
            "2",
            "--seed",
            "5",
        ]
    };
    ok(&args("a.ppm"), d);
    ok(&args("b.ppm"), d);
    let mut threaded = args("c.ppm").to_vec();
    threaded.extend(["--threads", "3"]);
    ok(&threaded, d);
    bin()
        .args(args("e.ppm"))
        .env("HYBRIDRT_THREADS", "2")
        .current_dir(d)
        .status()
        .unwrap();
    let a = fs::read(d.join("a.ppm")).unwrap();
    assert!(a.starts_with(b"P6\n24 16\n255\n"));
    for other in ["b.ppm", "c.ppm", "e.ppm"] {
        assert_eq!(a, fs::read(d.join(other)).unwrap(), "{other}");
    }
    ok(
        &[
            "render",
            "--scene",
            "scenes/slab.json",
            "--out",
            "slab.pfm",
            "--hdr",
        ],
        d,
    );
    assert!(fs::read(d.join("slab.pfm"))
        .unwrap()
        .starts_with(b"PF\n8 8\n"));
}

#[test]
fn zero_frames_writes_only_the_initial_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen-assets", "scenes", "--out", "scenes"], d);
    ok(
        &[
            "simulate",
            "--scene",
            "scenes/ball_hits_field.json",
            "--out",
            "sim",
            "--frames",
            "0",
        ],
        d,
    );
    let mut names: Vec<String> = fs::read_dir(d.join("sim"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["frame_0000.json", "frame_0000_mesh00.obj"]);
    let snap: Value =
        serde_json::from_str(&fs::read_to_string(d.join("sim/frame_0000.json")).unwrap()).unwrap();
    assert_eq!(snap["time"], 0.0);
    assert_eq!(snap["bodies"].as_array().unwrap().len(), 2);
    assert_eq!(
        snap["bodies"][1]["lin_vel"],
        serde_json::json!([4.0, 0.0, 0.0])
    );
}

#[test]
fn simulated_collision_exchanges_momentum_and_renders_frames() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen-assets", "scenes", "--out", "scenes"], d);
    ok(
        &[
            "simulate",
            "--scene",
            "scenes/ball_hits_field.json",
            "--out",
            "sim",
            "--frames",
            "40",
            "--render",
            "--width",
            "16",
            "--height",
            "12",
            "--spp",
            "1",
        ],
        d,
    );
    let snap: Value =
        serde_json::from_str(&fs::read_to_string(d.join("sim/frame_0040.json")).unwrap()).unwrap();
    let vx = |b: usize| snap["bodies"][b]["lin_vel"][0].as_f64().unwrap();
    // Field of mass 1 at rest, ball of mass 0.5 at 4 m/s, restitution 0.8.
    assert!((vx(0) - 2.4).abs() < 1e-6, "{}", vx(0));
    assert!((vx(1) + 0.8).abs() < 1e-6, "{}", vx(1));
    let first = fs::read(d.join("sim/frame_0000.ppm")).unwrap();
    let last = fs::read(d.join("sim/frame_0040.ppm")).unwrap();
    assert_ne!(first, last, "moving field changes the picture");
}

#[test]
fn sphere_sdf_asset_matches_exact_distance() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        &[
            "gen-assets",
            "sphere-sdf",
            "--res",
            "64",
            "--radius",
            "0.8",
            "--out",
            "s.sdfgrid",
        ],
        d,
    );
    let sdf = read_sdfgrid::<f64>(&d.join("s.sdfgrid")).unwrap();
    assert_eq!(sdf.res(), [64; 3]);
    let lat = sdf.lattice();
    let h = lat.spacing().max_component();
    for idx in (0..lat.len()).step_by(37) {
        let [i, j, k] = lat.coords(idx);
        let p = lat.node_position(i, j, k);
        // Stored as f32.
        assert!((sdf.values()[idx] - (p.length() - 0.8)).abs() < 1e-6);
    }
    // Between nodes, trilinear interpolation of a 1-Lipschitz function.
    let mut rng = Rng::new(3);
    for _ in 0..500 {
        let p =
            Vec3::new(rng.uniform::<f64>(), rng.uniform(), rng.uniform()) * 2.2 - Vec3::splat(1.1);
        assert!((sdf.distance(p) - (p.length() - 0.8)).abs() < h, "{p:?}");
    }
}

#[test]
fn hdr_commands_round_trip_a_bracket() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        &[
            "gen-assets",
            "hdr-bracket",
            "--out",
            "br",
            "--res",
            "48",
            "--spp",
            "2",
        ],
        d,
    );
    ok(
        &[
            "hdr-recover",
            "--bracket",
            "br/manifest.json",
            "--out",
            "crf.csv",
        ],
        d,
    );
    let csv = fs::read_to_string(d.join("crf.csv")).unwrap();
    assert_eq!(csv.lines().count(), 257);
    ok(
        &[
            "hdr-merge",
            "--bracket",
            "br/manifest.json",
            "--crf",
            "crf.csv",
            "--out",
            "m.pfm",
            "--normalize",
        ],
        d,
    );
    let m = hybridrt::HdrImage::read_pfm(&d.join("m.pfm")).unwrap();
    assert_eq!((m.width(), m.height()), (48, 48));
    assert!((m.max_value() - 255.0).abs() < 1e-3);
    // Too few samples for 256 unknowns is a numeric failure.
    let out = run(
        &[
            "hdr-recover",
            "--bracket",
            "br/manifest.json",
            "--out",
            "x.csv",
            "--samples",
            "10",
        ],
        d,
    );
    assert_eq!(error_line(&out).0, 3);
}

#[test]
fn estimate_emitters_finds_the_lit_faces() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        &[
            "gen-assets",
            "toy-room",
            "--out",
            "room",
            "--res",
            "12",
            "--spp",
            "4",
        ],
        d,
    );
    ok(
        &[
            "estimate-emitters",
            "--scene",
            "room/scene.json",
            "--targets",
            "room/targets.json",
            "--out",
            "est",
        ],
        d,
    );
    let em: Value =
        serde_json::from_str(&fs::read_to_string(d.join("est/emitters.json")).unwrap()).unwrap();
    assert_eq!(em["emitters"].as_array().unwrap().len(), 2);
    let faces: Value =
        serde_json::from_str(&fs::read_to_string(d.join("est/emission.json")).unwrap()).unwrap();
    let truth: Value =
        serde_json::from_str(&fs::read_to_string(d.join("room/truth.json")).unwrap()).unwrap();
    let lit: Vec<u64> = truth["emitting"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["face"].as_u64().unwrap())
        .collect();
    for f in faces["faces"].as_array().unwrap() {
        let r = f["rgb"][0].as_f64().unwrap();
        if lit.contains(&f["face"].as_u64().unwrap()) {
            assert!((r - 5.0).abs() < 0.25, "{f}");
        } else {
            assert!(r < 0.2, "{f}");
        }
    }
    assert!(fs::read_to_string(d.join("est/loss.csv"))
        .unwrap()
        .starts_with("epoch,"));
    // The recovered emitters plug back into a scene.
    let scene = r#"{"emitters_file": "est/emitters.json", "meshes": [{"path": "room/room.obj"}],
                    "camera": {"position": [0, 0, 0], "target": [1, 0, 0], "width": 8, "height": 8}}"#;
    fs::write(d.join("relit.json"), scene).unwrap();
    ok(
        &[
            "render",
            "--scene",
            "relit.json",
            "--out",
            "relit.ppm",
            "--spp",
            "1",
        ],
        d,
    );
}

#[test]
fn help_lists_every_command_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let top = String::from_utf8(ok(&["--help"], dir.path()).stdout).unwrap();
    for c in [
        "render",
        "simulate",
        "hdr-recover",
        "hdr-merge",
        "estimate-emitters",
        "gen-assets",
        "--threads",
    ] {
        assert!(top.contains(c), "{c} missing from\n{top}");
    }
    let render = String::from_utf8(ok(&["render", "--help"], dir.path()).stdout).unwrap();
    for f in [
        "--scene",
        "--out",
        "--spp",
        "--seed",
        "--width",
        "--height",
        "--hdr",
        "--threads",
    ] {
        assert!(render.contains(f), "{f}");
    }
    let sim = String::from_utf8(ok(&["simulate", "--help"], dir.path()).stdout).unwrap();
    for f in [
        "--scene", "--out", "--frames", "--render", "--spp", "--seed",
    ] {
        assert!(sim.contains(f), "{f}");
    }
    assert!(ok(&["--version"], dir.path()).status.success());
}

#[test]
fn failures_print_one_json_line_with_a_class_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen-assets", "scenes", "--out", "scenes"], d);

    let (code, v) = error_line(&run(
        &["render", "--scene", "missing.json", "--out", "x.ppm"],
        d,
    ));
    assert_eq!(
        (code, v["error"].as_str(), v["command"].as_str()),
        (4, Some("io"), Some("render"))
    );

    let (code, v) = error_line(&run(
        &[
            "render",
            "--scene",
            "scenes/slab.json",
            "--out",
            "x.ppm",
            "--spp",
            "0",
        ],
        d,
    ));
    assert_eq!((code, v["error"].as_str()), (2, Some("config")));
    assert!(v["message"].as_str().unwrap().contains("render.spp"));

    fs::write(d.join("bad.json"), r#"{"camera": {"position": [0,0,0], "target": [1,0,0], "width": 4, "height": 4}, "colour": 1}"#).unwrap();
    let (code, _) = error_line(&run(
        &["render", "--scene", "bad.json", "--out", "x.ppm"],
        d,
    ));
    assert_eq!(code, 2);

    let (code, v) = error_line(&run(&["render", "--no-such-flag"], d));
    assert_eq!((code, v["command"].as_str()), (2, Some("args")));

    // A speed cap below the launch speed aborts the run.
    let fast = r#"{"meshes": [{"shape": {"kind": "icosphere", "center": [0,0,0], "radius": 0.1},
                               "dynamic": {"mass": 1, "velocity": [50, 0, 0], "collider": "sphere"}}],
                   "camera": {"position": [0,-3,0], "target": [0,0,0], "width": 4, "height": 4},
                   "sim": {"max_speed": 10}}"#;
    fs::write(d.join("fast.json"), fast).unwrap();
    let (code, v) = error_line(&run(
        &[
            "simulate",
            "--scene",
            "fast.json",
            "--out",
            "sim",
            "--frames",
            "3",
        ],
        d,
    ));
    assert_eq!((code, v["error"].as_str()), (3, Some("numeric")));
}
