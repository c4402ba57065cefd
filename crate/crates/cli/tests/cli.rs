use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use polyflow::geometry::io::read_poly;
use polyflow::geometry::{reconcile_vertex_counts, ReconcileStrategy};
use polyflow::oracle::{final_state, ForcedSystem};
use polyflow::{Polygon, Trajectory};
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn polyflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyflow")).args(args).env_remove("POLYFLOW_SEED").output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = polyflow(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Exit code and the single error line.
fn fails(args: &[&str]) -> (i32, String) {
    let out = polyflow(args);
    assert!(!out.status.success(), "{args:?} succeeded");
    let err = String::from_utf8(out.stderr).unwrap();
    let first = err.lines().next().unwrap_or_default().to_string();
    assert!(first.starts_with("error: "), "{first}");
    (out.status.code().unwrap(), first)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_traj(p: &Path) -> Trajectory {
    Trajectory::parse_csv(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn frame_at(traj: &Trajectory, t: f64) -> &Polygon {
    let i = traj.times.iter().position(|x| *x == t).unwrap_or_else(|| panic!("no frame at t={t}"));
    &traj.frames[i]
}

/// Attributes of every `<tag .../>` element, in document order.
fn elements(svg: &str, tag: &str) -> Vec<Vec<(String, String)>> {
    let open = format!("<{tag} ");
    svg.match_indices(&open)
        .map(|(i, _)| {
            let body = &svg[i + open.len()..];
            let body = &body[..body.find('>').unwrap()];
            let mut attrs = Vec::new();
            let mut rest = body;
            while let Some(eq) = rest.find("=\"") {
                let name = rest[..eq].trim().to_string();
                let after = &rest[eq + 2..];
                let end = after.find('"').unwrap();
                attrs.push((name, after[..end].to_string()));
                rest = &after[end + 1..];
            }
            attrs
        })
        .collect()
}

fn attr<'a>(el: &'a [(String, String)], name: &str) -> Option<&'a str> {
    el.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
}

fn lambda(n: usize, m: i32, k: usize) -> f64 {
    let s = (std::f64::consts::PI * k as f64 / n as f64).sin();
    -(4.0 * s * s).powi(m)
}

fn eigen_rows(out: &str) -> Vec<(usize, f64)> {
    out.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect()
}

#[test]
fn eigen_pentagon_table() {
    let rows = eigen_rows(&ok(&["eigen", "-n", "5", "-m", "1"]));
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0], (0, 0.0));
    for (k, l) in &rows {
        assert!((l - lambda(5, 1, *k)).abs() < 1e-12);
    }
    assert!((rows[1].1 + 1.381966).abs() < 1e-6);
    assert_eq!(rows[1].1, rows[4].1);
}

#[test]
fn eigen_square_biharmonic() {
    let rows = eigen_rows(&ok(&["eigen", "-n", "4", "-m", "2"]));
    assert!((rows[1].1 + 4.0).abs() < 1e-12);
    assert!((rows[2].1 + 16.0).abs() < 1e-12);
    let with_beta = ok(&["eigen", "-n", "4", "-m", "2", "-b", "1"]);
    assert!(with_beta.lines().skip(1).all(|l| l.contains("underdamped") || l.contains("zero-mode")));
}

#[test]
fn eigen_rejects_digon() {
    let (code, line) = fails(&["eigen", "-n", "2"]);
    assert_eq!(code, 1);
    assert!(line.starts_with("error: DOMAIN:"));
}

#[test]
fn bad_arguments_are_usage_errors() {
    let (code, line) = fails(&["eigen"]);
    assert_eq!(code, 2);
    assert!(line.starts_with("error: USAGE:"));
    let (code, _) = fails(&["evolve", "-i", s(&fixture("pentagon.poly")), "--closure", "sideways"]);
    assert_eq!(code, 2);
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.poly");
    std::fs::write(&bad, "poly 3 2\n0 0\n1 oops\n0 1\n").unwrap();
    let (code, line) = fails(&["evolve", "-i", s(&bad)]);
    assert_eq!(code, 1);
    assert!(line.starts_with("error: PARSE:") && line.contains("line 3"), "{line}");
    let (_, line) = fails(&["evolve", "-i", s(&dir.path().join("missing.poly"))]);
    assert!(line.starts_with("error: IO:"));
}

#[test]
fn damped_pentagon_shrinks_to_a_point() {
    let dir = TempDir::new().unwrap();
    let input = fixture("pentagon.poly");
    // the slowest mode of m = 1 decays like e^{-0.382 t}, so it needs longer
    for (m, t_end) in [("1", "45"), ("2", "30"), ("3", "30")] {
        let out = dir.path().join(format!("m{m}.csv"));
        ok(&["evolve", "-i", s(&input), "-m", m, "-b", "4", "--closure", "zero-velocity", "--t-end", t_end, "-o", s(&out)]);
        let traj = read_traj(&out);
        assert_eq!(traj.len(), 60);
        assert!(traj.last().unwrap().diameter() < 1e-6, "m={m}");
        assert!(traj.last().unwrap().diameter() < 1e-5 * traj.first().unwrap().diameter());
    }
}

#[test]
fn two_point_closure_hits_the_fixture() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fig.csv");
    let svg = dir.path().join("fig.svg");
    let through = fixture("pentagon_3p1.poly");
    ok(&[
        "evolve", "-i", s(&fixture("pentagon.poly")), "-m", "1", "-b", "4", "--closure", "two-point", "--at", "1.2",
        "--through", s(&through), "-o", s(&out), "--svg", s(&svg),
    ]);
    let traj = read_traj(&out);
    assert_eq!(traj.len(), 61);
    assert!(frame_at(&traj, 1.2).sup_distance(&read_poly(&through).unwrap()).unwrap() < 1e-9);
    let text = std::fs::read_to_string(&svg).unwrap();
    let way: Vec<_> = elements(&text, "path").into_iter().filter(|e| attr(e, "class") == Some("waypoint")).collect();
    assert_eq!(way.len(), 1);
    assert_eq!(attr(&way[0], "data-t"), Some("1.2"));
}

#[test]
fn undamped_mode_oscillates() {
    let dir = TempDir::new().unwrap();
    let p1 = dir.path().join("p1.poly");
    let mut text = String::from("poly 5 2\n");
    for j in 0..5 {
        let a = 2.0 * std::f64::consts::PI * j as f64 / 5.0;
        text.push_str(&format!("{:?} {:?}\n", a.cos(), a.sin()));
    }
    std::fs::write(&p1, &text).unwrap();
    let x0 = read_poly(&p1).unwrap();
    let period = 2.0 * std::f64::consts::PI / (-lambda(5, 1, 1)).sqrt();
    let out = dir.path().join("osc.csv");
    let t_end = format!("{period:?}");
    ok(&["evolve", "-i", s(&p1), "-m", "1", "-b", "0", "--t-end", &t_end, "--samples", "3", "-o", s(&out)]);
    let traj = read_traj(&out);
    assert!(traj.frames[1].sup_distance(&x0.scaled(-1.0)).unwrap() < 1e-9);
    assert!(traj.frames[2].sup_distance(&x0).unwrap() < 1e-9);

    let out = dir.path().join("rk.csv");
    ok(&["evolve", "-i", s(&p1), "-m", "1", "-b", "0", "--t-end", "3", "-o", s(&out)]);
    let sys = ForcedSystem::homogeneous(5, 2, 1, 0.0);
    let (x3, _) = final_state(&sys, &x0, &Polygon::zeros(5, 2).unwrap(), 3.0, 1e-4).unwrap();
    assert!(read_traj(&out).last().unwrap().sup_distance(&x3).unwrap() < 1e-6);
}

#[test]
fn rescaled_frames_and_limit_report() {
    let dir = TempDir::new().unwrap();
    let (out, report) = (dir.path().join("r.csv"), dir.path().join("r.txt"));
    ok(&[
        "evolve", "-i", s(&fixture("pentagon.poly")), "-m", "1", "-b", "4", "--closure", "zero-constants", "--rescale",
        "--report", s(&report), "-o", s(&out),
    ]);
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("kind: affine-regular"));
    assert!(text.contains("dominant_mode: 1"));
    let residual: f64 = text.lines().find_map(|l| l.strip_prefix("residual: ")).unwrap().parse().unwrap();
    assert!(residual < 1e-8);
    let traj = read_traj(&out);
    assert_eq!(traj.len(), 59);
    assert!(traj.times[0] > 0.0);
    let shape = polyflow::geometry::io::parse_poly(text.split_once("shape:\n").unwrap().1).unwrap();
    assert!(traj.last().unwrap().sup_distance(&shape).unwrap() < 1e-6);
}

fn distances(p: &Path) -> Vec<(f64, f64)> {
    std::fs::read_to_string(p)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect()
}

#[test]
fn yau_flow_reaches_regular_pentagon() {
    let dir = TempDir::new().unwrap();
    let (out, dist) = (dir.path().join("y.csv"), dir.path().join("d.csv"));
    ok(&[
        "yau", "-i", s(&fixture("pentagon.poly")), "--target", s(&fixture("regular5.poly")), "-m", "1", "-b", "4",
        "--distance", s(&dist), "-o", s(&out),
    ]);
    let d = distances(&dist);
    let after: Vec<f64> = d.iter().filter(|(t, _)| *t >= 2.0).map(|x| x.1).collect();
    // once at rounding level the series may flatten
    assert!(after.windows(2).all(|w| w[1] <= w[0] || w[1] < 1e-15));
    assert!(d.last().unwrap().1 < 1e-6);
    let target = read_poly(fixture("regular5.poly")).unwrap();
    assert!(read_traj(&out).last().unwrap().sup_distance(&target).unwrap() < 1e-6);
}

#[test]
fn yau_waypoint_frame_is_exact() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("w.csv");
    let way = fixture("pentagon_3p1.poly");
    ok(&[
        "yau", "-i", s(&fixture("pentagon.poly")), "--target", s(&fixture("regular5.poly")), "--waypoint", s(&way),
        "--at", "1.2", "-o", s(&out),
    ]);
    let traj = read_traj(&out);
    assert_eq!(traj.metadata.get("waypoint_t").map(String::as_str), Some("1.2"));
    assert!(frame_at(&traj, 1.2).sup_distance(&read_poly(&way).unwrap()).unwrap() < 1e-9);
}

fn on_segment(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let s = (((x[0] - a[0]) * dx + (x[1] - a[1]) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    ((x[0] - a[0] - s * dx).powi(2) + (x[1] - a[1] - s * dy).powi(2)).sqrt()
}

#[test]
fn pentagon_to_triangle_reconciled() {
    let dir = TempDir::new().unwrap();
    let pentagon = read_poly(fixture("pentagon.poly")).unwrap();
    let triangle = read_poly(fixture("triangle.poly")).unwrap();
    let (code, line) = fails(&["yau", "-i", s(&fixture("pentagon.poly")), "--target", s(&fixture("triangle.poly"))]);
    assert_eq!(code, 1);
    assert!(line.starts_with("error: INVALID_STRATEGY:"));

    for (flag, strategy) in [("duplicate", ReconcileStrategy::Duplicate), ("subdivide", ReconcileStrategy::Subdivide)] {
        let out = dir.path().join(format!("{flag}.csv"));
        ok(&[
            "yau", "-i", s(&fixture("pentagon.poly")), "--target", s(&fixture("triangle.poly")), "--reconcile", flag,
            "--t-end", "40", "-o", s(&out),
        ]);
        let last = read_traj(&out).last().unwrap().clone();
        let (_, expected) = reconcile_vertex_counts(&pentagon, &triangle, strategy).unwrap();
        assert_eq!(last.n(), 5);
        assert!(last.sup_distance(&expected).unwrap() < 1e-6, "{flag}");
        let corners = last.vertices().filter(|v| triangle.vertices().any(|c| (v[0] - c[0]).hypot(v[1] - c[1]) < 1e-6)).count();
        for v in last.vertices() {
            let d = (0..3).map(|e| on_segment(v, triangle.vertex(e), triangle.vertex((e + 1) % 3))).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-6);
        }
        match strategy {
            ReconcileStrategy::Duplicate => assert_eq!(corners, 5),
            ReconcileStrategy::Subdivide => assert_eq!(corners, 3),
        }
    }
}

#[test]
fn selfsim_scaling_and_rotation_residuals() {
    let out = ok(&["selfsim", "scale", "-k", "1", "-n", "5", "-m", "1", "-b", "4"]);
    let max: f64 = out.lines().find_map(|l| l.strip_prefix("scaling residual max: ")).unwrap().parse().unwrap();
    assert!(max < 1e-6);
    let out = ok(&["selfsim", "rotate", "-n", "7", "-k", "2", "-m", "3", "-b", "0", "--sign", "-1"]);
    let max: f64 = out.lines().find_map(|l| l.strip_prefix("rotation residual max: ")).unwrap().parse().unwrap();
    assert!(max < 1e-6);
    ok(&["selfsim", "rotate", "-n", "6", "-k", "1", "--plane", "1,3", "--dim", "4"]);
}

#[test]
fn selfsim_nonexistence() {
    let (code, line) = fails(&["selfsim", "rotate", "-b", "1"]);
    assert_eq!(code, 3);
    assert!(line.starts_with("error: NO_SUCH_SOLUTION:"));
    let (usage, _) = fails(&["selfsim", "spin"]);
    assert_ne!(code, usage);

    let out = ok(&["selfsim", "translate", "-b", "2"]);
    assert!(out.contains("no nontrivial polygon evolves by pure translation"));
    assert!(out.contains("point path: q(t) = q(0) + (1 - exp(-2 t)) / 2 d"));
    let (code, line) = fails(&["selfsim", "translate", "-i", s(&fixture("pentagon.poly"))]);
    assert_eq!(code, 3);
    assert!(line.starts_with("error: NO_SUCH_SOLUTION:"));
}

#[test]
fn selfsim_point_translates() {
    let dir = TempDir::new().unwrap();
    let point = dir.path().join("pt.poly");
    std::fs::write(&point, "poly 4 2\n0.5 -1\n0.5 -1\n0.5 -1\n0.5 -1\n").unwrap();
    let out = ok(&["selfsim", "translate", "-b", "1", "--direction", "0,-2", "-i", s(&point)]);
    let max: f64 = out.lines().find_map(|l| l.strip_prefix("translation residual max: ")).unwrap().parse().unwrap();
    assert!(max < 1e-6);
}

#[test]
fn verify_passes_and_is_reproducible() {
    let out = ok(&["verify"]);
    assert!(out.contains("threshold: 1e-6"));
    assert!(out.contains("verify: PASS"));
    let a = ok(&["verify", "--seed", "7", "--dt", "1e-3"]);
    let b = ok(&["verify", "--seed", "7", "--dt", "1e-3"]);
    assert_eq!(a, b);
    let env = Command::new(env!("CARGO_BIN_EXE_polyflow"))
        .args(["verify", "--seed", "3", "--dt", "1e-3"])
        .env("POLYFLOW_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(env.stdout).unwrap(), a);
}

#[test]
fn coarse_verify_scales_threshold() {
    let out = ok(&["verify", "--dt", "1e-2"]);
    assert!(out.contains("threshold: 1e2"));
    let flow: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("flow: max discrepancy "))
        .and_then(|r| r.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(flow > 1e-9);
}

#[test]
fn render_counts_paths_and_fits_first_frame() {
    let dir = TempDir::new().unwrap();
    let (csv, svg) = (dir.path().join("t.csv"), dir.path().join("t.svg"));
    ok(&["evolve", "-i", s(&fixture("pentagon.poly")), "-b", "4", "--t-end", "5", "--samples", "6", "-o", s(&csv)]);
    ok(&["render", "-i", s(&csv), "-o", s(&svg)]);
    let text = std::fs::read_to_string(&svg).unwrap();
    let paths = elements(&text, "path");
    assert_eq!(paths.len(), 6);
    assert_eq!(paths.iter().filter(|p| attr(p, "class") == Some("initial")).count(), 1);
    assert!(paths.iter().all(|p| attr(p, "d").unwrap().ends_with('Z')));
    // frame 0 spans x in [-0.8, 1.0], y in [-0.8, 0.9]; 5% of 1.8 on each side
    let root = &elements(&text, "svg")[0];
    let vb: Vec<f64> = attr(root, "viewBox").unwrap().split(' ').map(|v| v.parse().unwrap()).collect();
    let want = [-0.89, -0.99, 1.98, 1.88];
    assert!(vb.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-6), "{vb:?}");

    let again = dir.path().join("again.svg");
    ok(&["render", "-i", s(&csv), "-o", s(&again)]);
    assert_eq!(std::fs::read(&svg).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn render_projects_spatial_trajectory() {
    let dir = TempDir::new().unwrap();
    let (input, csv, svg) = (dir.path().join("c.poly"), dir.path().join("c.csv"), dir.path().join("c.svg"));
    std::fs::write(&input, "poly 4 3\n1 5 0\n0 5 2\n-1 5 0\n0 5 -2\n").unwrap();
    ok(&["evolve", "-i", s(&input), "-b", "1", "--t-end", "1", "--samples", "2", "-o", s(&csv)]);
    ok(&["render", "-i", s(&csv), "-o", s(&svg), "--project", "1,3"]);
    let text = std::fs::read_to_string(&svg).unwrap();
    let paths = elements(&text, "path");
    let initial = paths.iter().find(|e| attr(e, "class") == Some("initial")).unwrap();
    // x against z, with z flipped to screen coordinates
    assert_eq!(attr(initial, "d"), Some("M1.000000,-0.000000 L0.000000,-2.000000 L-1.000000,-0.000000 L0.000000,2.000000 Z"));
    let (code, _) = fails(&["render", "-i", s(&csv), "-o", s(&svg), "--project", "1,4"]);
    assert_eq!(code, 1);
}

#[test]
fn runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let run = |tag: &str| {
        let (csv, svg) = (dir.path().join(format!("{tag}.csv")), dir.path().join(format!("{tag}.svg")));
        ok(&[
            "yau", "-i", s(&fixture("pentagon.poly")), "--target", s(&fixture("triangle.poly")), "--reconcile",
            "subdivide", "-o", s(&csv), "--svg", s(&svg),
        ]);
        (std::fs::read(csv).unwrap(), std::fs::read(svg).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn moving_target_from_frames() {
    let dir = TempDir::new().unwrap();
    let (frames, out, dist) = (dir.path().join("m.poly"), dir.path().join("m.csv"), dir.path().join("d.csv"));
    let mut text = String::from("poly 5 2\nframes 3 1.0\n");
    for scale in [1.0, 1.5, 2.0] {
        for j in 0..5 {
            let a = 2.0 * std::f64::consts::PI * j as f64 / 5.0;
            text.push_str(&format!("{:?} {:?}\n", scale * a.cos(), scale * a.sin()));
        }
    }
    std::fs::write(&frames, text).unwrap();
    ok(&[
        "yau", "-i", s(&fixture("pentagon.poly")), "--moving", s(&frames), "-b", "4", "--t-end", "20", "-o", s(&out),
        "--distance", s(&dist),
    ]);
    let traj = read_traj(&out);
    assert!(traj.first().unwrap().sup_distance(&read_poly(fixture("pentagon.poly")).unwrap()).unwrap() < 1e-12);
    let d = distances(&dist);
    assert!(d.last().unwrap().1 < d[0].1);
}
