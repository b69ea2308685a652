use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hdinpaint::imageio::{read_mask, read_pnm, write_mask, write_pnm, ImageFile, REPORT_HEADER};
use hdinpaint::{compute_metrics_multi, MaskGrid};

fn hdinpaint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdinpaint"))
        .args(args)
        .env("INPAINT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = hdinpaint(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn textured(dir: &Path, w: usize, h: usize, channels: usize) -> PathBuf {
    let samples = (0..w * h * channels)
        .map(|i| ((i * 37 + i / w * 11) % 256) as u8)
        .collect();
    let path = dir.join(if channels == 1 { "in.pgm" } else { "in.ppm" });
    write_pnm(&path, &ImageFile::new(w, h, channels, samples).unwrap()).unwrap();
    path
}

fn field(report: &str, key: &str) -> f64 {
    report
        .split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {report:?}"))
        .parse()
        .unwrap()
}

#[test]
fn full_mask_reproduces_input() {
    let dir = tempfile::tempdir().unwrap();
    let image = textured(dir.path(), 40, 24, 3);
    let mask = dir.path().join("full.pbm");
    write_mask(&mask, &MaskGrid::full(40, 24)).unwrap();
    for solver in ["cg", "oras", "ml-cg", "ml-oras", "mg-cg", "mg-oras"] {
        let out = dir.path().join(format!("{solver}.ppm"));
        ok(&[
            "inpaint",
            s(&image),
            s(&mask),
            "--solver",
            solver,
            "--out",
            s(&out),
        ]);
        assert_eq!(
            read_pnm(&out).unwrap(),
            read_pnm(&image).unwrap(),
            "{solver}"
        );
    }
}

#[test]
fn mg_oras_meets_default_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let image = textured(dir.path(), 256, 256, 1);
    let mask = dir.path().join("m.pbm");
    let out = dir.path().join("out.pgm");
    ok(&[
        "gen-mask",
        "256",
        "256",
        "0.05",
        "--seed",
        "4",
        "--out",
        s(&mask),
    ]);
    let report = ok(&[
        "inpaint",
        s(&image),
        s(&mask),
        "--solver",
        "mg-oras",
        "--out",
        s(&out),
    ]);
    assert!(field(&report, "rel_residual") <= 1e-3, "{report}");
    assert_eq!(read_pnm(&out).unwrap().dims(), (256, 256));
}

#[test]
fn cg_and_mg_oras_agree_when_converged() {
    let dir = tempfile::tempdir().unwrap();
    let image = textured(dir.path(), 96, 80, 1);
    let mask = dir.path().join("m.pbm");
    ok(&[
        "gen-mask",
        "96",
        "80",
        "0.04",
        "--seed",
        "9",
        "--out",
        s(&mask),
    ]);
    let outputs: Vec<ImageFile> = ["cg", "mg-oras"]
        .iter()
        .map(|solver| {
            let out = dir.path().join(format!("{solver}.pgm"));
            ok(&[
                "inpaint",
                s(&image),
                s(&mask),
                "--solver",
                solver,
                "--tol",
                "1e-8",
                "--out",
                s(&out),
            ]);
            read_pnm(&out).unwrap()
        })
        .collect();
    let mse = compute_metrics_multi(&outputs[0].to_fields(), &outputs[1].to_fields())
        .unwrap()
        .mse;
    assert!(mse <= 1e-10, "{mse:e}");
}

#[test]
fn mode_flag_switches_level_structure() {
    let dir = tempfile::tempdir().unwrap();
    let image = textured(dir.path(), 64, 64, 1);
    let mask = dir.path().join("m.pbm");
    let out = dir.path().join("o.pgm");
    ok(&["gen-mask", "64", "64", "0.05", "--out", s(&mask)]);
    let report = ok(&[
        "inpaint",
        s(&image),
        s(&mask),
        "--solver",
        "cg",
        "--mode",
        "multigrid",
        "--out",
        s(&out),
    ]);
    assert!(report.starts_with("solver=mg-cg "), "{report}");
}

#[test]
fn gen_mask_counts_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.pbm");
    let b = dir.path().join("b.pbm");
    let c = dir.path().join("c.pbm");
    ok(&[
        "gen-mask",
        "100",
        "100",
        "0.05",
        "--seed",
        "7",
        "--out",
        s(&a),
    ]);
    ok(&[
        "gen-mask",
        "100",
        "100",
        "0.05",
        "--seed",
        "7",
        "--out",
        s(&b),
    ]);
    ok(&[
        "gen-mask",
        "100",
        "100",
        "0.05",
        "--seed",
        "8",
        "--out",
        s(&c),
    ]);
    assert_eq!(read_mask(&a).unwrap().count(), 500);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());

    ok(&["gen-mask", "30", "20", "1.0", "--out", s(&a)]);
    assert_eq!(read_mask(&a).unwrap(), MaskGrid::full(30, 20));
    ok(&[
        "gen-mask",
        "100",
        "100",
        "0.04",
        "--kind",
        "grid",
        "--out",
        s(&a),
    ]);
    assert_eq!(read_mask(&a).unwrap().count(), 400);
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let image = textured(dir.path(), 20, 10, 1);
    let mask = dir.path().join("m.pbm");
    write_mask(&mask, &MaskGrid::full(10, 20)).unwrap();
    let out = dir.path().join("o.pgm");
    let cases: Vec<Vec<&str>> = vec![
        vec!["inpaint", s(&image), s(&mask), "--out", s(&out)],
        vec![
            "inpaint",
            s(&image),
            s(&mask),
            "--solver",
            "sor",
            "--out",
            s(&out),
        ],
        vec!["gen-mask", "10", "10", "0", "--out", s(&out)],
        vec!["gen-mask", "10", "10", "1.5", "--out", s(&out)],
        vec!["compare", "missing.pgm", s(&mask)],
        vec![
            "bench",
            "density",
            "--image",
            "nowhere.ppm",
            "--image",
            "gone.pgm",
        ],
    ];
    for args in &cases {
        let result = hdinpaint(args);
        assert!(!result.status.success(), "{args:?}");
        assert!(!result.stderr.is_empty(), "{args:?}");
    }
    let stderr = String::from_utf8(hdinpaint(&cases[5]).stderr).unwrap();
    assert!(
        stderr.contains("nowhere.ppm") && stderr.contains("gone.pgm"),
        "{stderr}"
    );
    let stderr = String::from_utf8(hdinpaint(&cases[0]).stderr).unwrap();
    assert!(
        stderr.contains("20x10") && stderr.contains("10x20"),
        "{stderr}"
    );
}

#[test]
fn compare_ranks_all_solvers() {
    let dir = tempfile::tempdir().unwrap();
    let image = textured(dir.path(), 48, 40, 1);
    let mask = dir.path().join("m.pbm");
    let csv = dir.path().join("c.csv");
    ok(&[
        "gen-mask",
        "48",
        "40",
        "0.05",
        "--seed",
        "2",
        "--out",
        s(&mask),
    ]);
    let stdout = ok(&["compare", s(&image), s(&mask), "--csv", s(&csv)]);
    assert_eq!(stdout.lines().count(), 6);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), REPORT_HEADER);
    assert_eq!(text.lines().count(), 7);
}

fn csv_without_time(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.rsplit_once(',').unwrap().0.to_string())
        .collect()
}

#[test]
fn resolution_bench_rows_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let out = hdinpaint(&[
            "bench",
            "resolution",
            "--sizes",
            "24,32,48,64",
            "--csv",
            s(&csv),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(String::from_utf8_lossy(&out.stderr).contains("mg-oras: log-log runtime slope"));
        std::fs::read_to_string(csv).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a.lines().count(), 1 + 4 * 6);
    assert_eq!(csv_without_time(&a), csv_without_time(&run("b.csv")));
}

#[test]
fn density_bench_labels_increase() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    ok(&[
        "bench",
        "density",
        "--width",
        "40",
        "--height",
        "40",
        "--solver",
        "mg-oras",
        "--csv",
        s(&csv),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let densities: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(densities.len(), 7);
    assert!(densities.windows(2).all(|w| w[0] < w[1]), "{densities:?}");
}

#[test]
fn alpha_and_downsampling_suites_emit_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    ok(&[
        "bench",
        "alpha-sweep",
        "--width",
        "48",
        "--height",
        "48",
        "--csv",
        s(&csv),
    ]);
    assert_eq!(
        std::fs::read_to_string(&csv).unwrap().lines().count(),
        1 + 6 * 2
    );
    ok(&[
        "bench",
        "downsampling",
        "--width",
        "48",
        "--height",
        "48",
        "--csv",
        s(&csv),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 2);
    assert!(text.contains("\nmg-oras:naive,") && text.contains("\nmg-oras:modified,"));
}
