use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_casimir-scatter"));
    c.env_remove("CASIMIR_CACHE_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn columns(csv: &str) -> Vec<String> {
    csv.lines().nth(1).unwrap().split(',').map(str::to_string).collect()
}

#[test]
fn energy_json_record() {
    let o = run(&["energy", "--radius-nm", "10", "--distance-nm", "100", "--no-cache"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "casimir-scatter.v1");
    let row = &v["rows"][0];
    assert!(row["E_eV"].as_f64().unwrap() < 0.0);
    assert_eq!(row["converged"], true);
    assert!(row["rel_err_estimate"].as_f64().unwrap() < 1e-4);
    assert_eq!(v["provenance"]["command"], "energy");
    assert!(v["provenance"]["version"].is_string());
}

#[test]
fn curve_csv_schema() {
    let o = run(&["curve", "--radius-nm", "2", "--points", "5", "--no-cache"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# schema=casimir-scatter.v1;"));
    assert!(text.lines().next().unwrap().contains("cache_hits=0"));
    assert_eq!(
        columns(&text),
        ["L_nm", "R_nm", "E_eV", "F_eV_per_nm", "nu", "converged"]
    );
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').take(5).map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    assert_eq!((rows[0][0], rows[4][0]), (1.0, 500.0));
    for r in &rows {
        assert!(r[2] < 0.0 && r[3] < 0.0 && r[4] > 0.0);
    }
}

#[test]
fn json_mirrors_csv() {
    let csv = stdout(&run(&["curve", "--radius-nm", "2", "--points", "4", "--no-cache"]));
    let json = stdout(&run(&[
        "curve",
        "--radius-nm",
        "2",
        "--points",
        "4",
        "--no-cache",
        "--format",
        "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let cols: Vec<String> = v["columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap().to_string())
        .collect();
    assert_eq!(cols, columns(&csv));
    let first: Vec<&str> = csv.lines().nth(2).unwrap().split(',').collect();
    let e: f64 = first[2].parse().unwrap();
    assert_eq!(v["rows"][0]["E_eV"].as_f64().unwrap().to_bits(), e.to_bits());
}

#[test]
fn warm_cache_reproduces_rows() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = [
        "ratios",
        "--radius-nm",
        "10",
        "--l-min-nm",
        "20",
        "--l-max-nm",
        "400",
        "--points",
        "4",
        "--cache-dir",
        d,
    ];
    let cold = stdout(&run(&args));
    let warm = stdout(&run(&args));
    assert!(cold.lines().next().unwrap().contains("cache_misses=4"));
    assert!(warm.lines().next().unwrap().contains("cache_hits=4"));
    assert_eq!(
        cold.lines().skip(1).collect::<Vec<_>>(),
        warm.lines().skip(1).collect::<Vec<_>>()
    );
    let o = run(&["cache-clear", "--cache-dir", d]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .env("CASIMIR_CACHE_DIR", dir.path())
        .args(["energy", "--radius-nm", "1", "--distance-nm", "50"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn config_file_sets_materials() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "material.sphere.terms = 2.0,80\nnumerics.xi_nodes = 24\n").unwrap();
    let o = run(&[
        "energy",
        "--distance-nm",
        "50",
        "--no-cache",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["provenance"]["sphere"], "sellmeier(2:80)");
    assert_eq!(v["rows"][0]["nodes_used"], 24);

    std::fs::write(&cfg, "material.sphere.colour = blue\n").unwrap();
    assert_eq!(
        run(&["energy", "--no-cache", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["energy", "--no-cache", "--config", "/nonexistent/run.cfg"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn exit_codes() {
    assert_eq!(
        run(&["energy", "--radius-nm", "0", "--no-cache"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["curve", "--l-min-nm", "10", "--l-max-nm", "5", "--no-cache"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let o = run(&["energy", "--no-cache", "--output", "/nonexistent/dir/out.json"]);
    assert_eq!(o.status.code(), Some(3));

    // an unreachable tolerance: outputs are still written, flagged unconverged
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.csv");
    let o = run(&[
        "energy",
        "--no-cache",
        "--rel-tol",
        "1e-15",
        "--format",
        "csv",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().nth(2).unwrap().ends_with(",false"));
}

#[test]
fn asymptotics_numbers() {
    let text = stdout(&run(&["asymptotics"]));
    let row: Vec<f64> = text
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    let cols = columns(&text);
    let get = |name: &str| row[cols.iter().position(|c| c == name).unwrap()];
    assert!((get("L_star_nm") - 39.15).abs() < 0.1);
    assert!((get("c3_prime_over_c3") - 0.84).abs() < 0.01);
}

#[test]
fn figure_layouts() {
    let fig1 = stdout(&run(&["figures", "fig1", "--points", "6"]));
    assert_eq!(
        columns(&fig1),
        ["xi_over_omega_p", "xi_hat_per_nm", "eps_plane", "eps_sphere"]
    );
    let first: Vec<f64> = fig1
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    let last: Vec<f64> = fig1
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    assert_eq!((first[0], last[0]), (1e-3, 1e2));
    // copper diverges at low frequency while diamond stays near 5.91
    assert!(first[2] > 1e5 && (first[3] - 5.91).abs() < 1e-3);

    let fig2 = stdout(&run(&[
        "figures",
        "fig2",
        "--points",
        "3",
        "--no-cache",
        "--radii-nm",
        "2,5",
    ]));
    assert_eq!(columns(&fig2), ["L_nm", "absE_eV_R2nm", "absE_eV_R5nm", "converged"]);
    let fig3 = stdout(&run(&[
        "figures",
        "fig3",
        "--points",
        "3",
        "--no-cache",
        "--radii-nm",
        "2",
        "--l-min-nm",
        "50",
    ]));
    assert_eq!(columns(&fig3), ["L_nm", "nu_R2nm", "nu_atom", "converged"]);
    let fig5 = stdout(&run(&[
        "figures",
        "fig5",
        "--points",
        "3",
        "--no-cache",
        "--l-min-nm",
        "100",
    ]));
    assert!(fig5.lines().next().unwrap().contains("radius_nm=10"));
    assert_eq!(
        run(&["figures", "fig5", "--radii-nm", "2,5", "--no-cache"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn block_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("block.csv");
    let o = run(&[
        "energy",
        "--radius-nm",
        "2",
        "--distance-nm",
        "10",
        "--no-cache",
        "--dump-block",
        path.to_str().unwrap(),
        "--dump-m",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(Path::new(&path)).unwrap();
    assert!(text.starts_with("# m=1"));
    // ℓ = 1..12 in both polarizations
    assert_eq!(text.lines().count(), 2 + 24 * 24);
}
