use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mmwave_planner::io::rows_from_csv;
use mmwave_planner::{
    evaluate_coverage, generate_venue, ChannelParams, Deployment, GeneratorOverrides, Instance,
    Venue, VenueKind,
};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmwplan"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generated(dir: &TempDir, kind: &str) -> PathBuf {
    let path = dir.path().join(format!("{kind}.json"));
    let out = run(&["generate", kind, "-o", s(&path)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    path
}

#[test]
fn generate_round_trips_every_kind() {
    let dir = TempDir::new().unwrap();
    for (name, kind) in [
        ("hall", VenueKind::Hall),
        ("airport", VenueKind::Airport),
        ("stadium", VenueKind::Stadium),
        ("toy", VenueKind::Toy),
    ] {
        let path = generated(&dir, name);
        let text = std::fs::read_to_string(&path).unwrap();
        let v = Venue::from_json(&text).unwrap();
        assert_eq!(v, generate_venue(kind, &GeneratorOverrides::default()));
        assert_eq!(v.to_json().unwrap(), text);
    }
}

#[test]
fn toy_plan_revalidates() {
    let dir = TempDir::new().unwrap();
    let venue = generated(&dir, "toy");
    let plan = dir.path().join("plan.json");
    let trace = dir.path().join("trace.json");
    let out = run(&[
        "plan",
        s(&venue),
        "--alpha",
        "0.5",
        "--beta",
        "0.7",
        "--capacity",
        "3",
        "--trace",
        s(&trace),
        "-o",
        s(&plan),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(trace.exists());

    let v = Venue::load(&venue).unwrap();
    let params = ChannelParams {
        capacity_per_beam: 3,
        ..ChannelParams::default()
    };
    let inst = Instance::with_beta(&v, &params, 0.7).unwrap();
    let d = Deployment::load(&plan).unwrap();
    let r = evaluate_coverage(&inst, &d).unwrap();
    assert!(r.normalized_coverage >= 0.5 - 1e-12);

    let report = dir.path().join("mc.json");
    let out = run(&[
        "validate",
        s(&venue),
        "--deployment",
        s(&plan),
        "--beta",
        "0.7",
        "--capacity",
        "3",
        "--samples",
        "5000",
        "-o",
        s(&report),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["format_version"], 1);
    assert!((json["analytic_coverage"].as_f64().unwrap() - r.coverage).abs() < 1e-12);
}

#[test]
fn zero_target_places_nothing() {
    let dir = TempDir::new().unwrap();
    let venue = generated(&dir, "toy");
    let plan = dir.path().join("plan.json");
    for solver in ["greedy", "exact"] {
        let out = run(&[
            "plan",
            s(&venue),
            "--alpha",
            "0",
            "--solver",
            solver,
            "-o",
            s(&plan),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        assert_eq!(Deployment::load(&plan).unwrap().ap_count(), 0);
    }
}

#[test]
fn exact_on_hall_is_refused() {
    let dir = TempDir::new().unwrap();
    let venue = generated(&dir, "hall");
    let plan = dir.path().join("plan.json");
    let out = run(&["plan", s(&venue), "--solver", "exact", "-o", s(&plan)]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("max_L"), "{}", stderr(&out));
    assert!(!plan.exists());
}

#[test]
fn unreachable_target_writes_partial_plan() {
    let dir = TempDir::new().unwrap();
    let venue = generated(&dir, "toy");
    let plan = dir.path().join("plan.json");
    let out = run(&[
        "plan",
        s(&venue),
        "--alpha",
        "1",
        "--beta",
        "1",
        "--capacity",
        "1",
        "-o",
        s(&plan),
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    let d = Deployment::load(&plan).unwrap();
    assert!(d.normalized_coverage < 1.0);
}

#[test]
fn bad_input_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.json");
    let plan = dir.path().join("plan.json");
    assert_eq!(code(&run(&["plan", s(&missing), "-o", s(&plan)])), 3);

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{\"grid_positions\": 7}").unwrap();
    assert_eq!(code(&run(&["plan", s(&garbage), "-o", s(&plan)])), 3);

    let venue = generated(&dir, "toy");
    assert_eq!(
        code(&run(&["plan", s(&venue), "--beta", "1.5", "-o", s(&plan)])),
        3
    );
    assert_eq!(
        code(&run(&[
            "plan",
            s(&venue),
            "--capacity",
            "0",
            "-o",
            s(&plan)
        ])),
        3
    );
    assert_eq!(code(&run(&["generate", "arena", "-o", s(&plan)])), 3);
    assert_eq!(code(&run(&["plan", s(&venue), "--no-such-flag"])), 3);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn render_wedges_follow_steering() {
    let dir = TempDir::new().unwrap();
    let venue = generated(&dir, "toy");
    let plan = dir.path().join("plan.json");
    let out = run(&[
        "plan",
        s(&venue),
        "--alpha",
        "0.5",
        "--beta",
        "0.7",
        "--capacity",
        "3",
        "-o",
        s(&plan),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let svg_path = dir.path().join("plan.svg");
    let out = run(&[
        "render",
        s(&venue),
        "--deployment",
        s(&plan),
        "-o",
        s(&svg_path),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    let d = Deployment::load(&plan).unwrap();
    let wedges: Vec<(usize, f64)> = svg
        .lines()
        .filter(|l| l.contains(r#"class="wedge""#))
        .map(|l| {
            let get = |k: &str| {
                let start = l.find(&format!("{k}=\"")).unwrap() + k.len() + 2;
                l[start..].split('"').next().unwrap().to_string()
            };
            (
                get("data-ap").parse().unwrap(),
                get("data-azimuth").parse().unwrap(),
            )
        })
        .collect();
    assert_eq!(wedges.len(), d.ap_count());
    for ap in &d.selected {
        let (_, az) = wedges.iter().find(|w| w.0 == ap.loc).unwrap();
        assert!((az - ap.phi).abs() <= 0.005);
    }
}

#[test]
fn compare_writes_one_row_per_target() {
    let dir = TempDir::new().unwrap();
    let venue = generated(&dir, "toy");
    let csv = dir.path().join("cmp.csv");
    let out = run(&[
        "compare",
        s(&venue),
        "--alpha",
        "0.55,0.65,0.75,0.85,0.95",
        "--beta",
        "0.7",
        "--capacity",
        "3",
        "-o",
        s(&csv),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 6);
    let rows = rows_from_csv(&text).unwrap();
    assert_eq!(rows.len(), 5);
    for r in &rows {
        if let (Some(o), Some(a)) = (r.observed_ratio, r.analytic_ratio) {
            assert!(o <= a * (1.0 + 1e-9), "{r:?}");
        }
    }
}

#[test]
fn seeded_toys_repeat() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        assert_eq!(
            code(&run(&["generate", "toy", "--seed", "17", "-o", s(p)])),
            0
        );
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        code(&run(&["generate", "hall", "--seed", "17", "-o", s(&a)])),
        3
    );
}
