//! Black-box tests of the `nucsp` binary.

use std::path::Path;
use std::process::{Command, Output};

use nucsp::cli::ResultTable;

fn nucsp(args: &[&str], data_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nucsp"));
    cmd.args(args).env_remove("NUCSP_DATA_DIR");
    if let Some(d) = data_dir {
        cmd.env("NUCSP_DATA_DIR", d);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn nuclide_info_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "scenario = \"nuclide-info\"\nnuclide = \"Fe-57\"\n[probe]\nspecies = \"electron\"\nbeta = 0.9\n");
    let out = dir.path().join("o");
    let o = nucsp(&["run", &cfg, "--out", out.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = ResultTable::parse(&std::fs::read_to_string(out.join("nuclide-info.csv")).unwrap()).unwrap();
    assert_eq!(table.get_meta("scenario"), Some("nuclide-info"));
    assert_eq!(table.get_meta("coherent_fraction_exact"), Some("2/3"));
    assert!(table.get_meta("config_sha256").is_some_and(|h| h.len() == 64));
    let tau = table.column("radiative_lifetime[s]").unwrap()[0];
    assert!((tau / 2.03e-6 - 1.0).abs() < 5e-3);
}

#[test]
fn invalid_config_reports_every_issue_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        "scenario = \"single-sweep\"\nnuclide = \"Xx-1\"\n[probe]\nspecies = \"electron\"\nbeta_grid = []\n[geometry]\nr_perp_nm = -1.0\n",
    );
    let out = dir.path().join("o");
    let o = nucsp(&["run", &cfg, "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("nuclide"), "{err}");
    assert!(err.contains("probe.beta_grid"), "{err}");
    assert!(err.contains("geometry.r_perp_nm"), "{err}");
    assert!(!out.exists() || std::fs::read_dir(&out).unwrap().next().is_none());

    let o = nucsp(&["validate", &cfg], None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unphysical_beta_is_rejected_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "scenario = \"array-pattern\"\n[probe]\nspecies = \"electron\"\nbeta = 1.0\n",
    );
    let o = nucsp(&["validate", &cfg], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("probe.beta"));
}

#[test]
fn syntax_errors_point_at_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "scenario = \"nuclide-info\"\n[probe\n");
    let o = nucsp(&["validate", &cfg], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn missing_config_file_is_invalid() {
    let o = nucsp(&["validate", "/nonexistent/config.toml"], None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_arguments_are_rejected() {
    let o = nucsp(&["run", "x.toml", "--threads", "0"], None);
    assert!(!o.status.success());
    let o = nucsp(&["frobnicate"], None);
    assert!(!o.status.success());
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let cfg = write(dir.path(), "c.toml", "scenario = \"nuclide-info\"\n[probe]\nspecies = \"electron\"\nbeta = 0.9\n");
    let o = nucsp(&["run", &cfg, "--out", blocker.join("sub").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn data_dir_extends_registries() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "nuclides.kv",
        "name = Sn-119\ne0_keV = 23.87\nlifetime_s = 25.7e-9\nalpha_ic = 5.1\njg2 = 1\nje2 = 3\n",
    );
    write(
        dir.path(),
        "lattices.kv",
        "preset = bcc-w\na_nm = 0.3165\nb_par_x = 0.15825\nb_par_y = 0.15825\nb_z_nm = 0.15825\n",
    );
    let o = nucsp(&["list-nuclides"], Some(dir.path()));
    assert!(o.status.success());
    let listing = String::from_utf8_lossy(&o.stdout);
    assert!(listing.contains("Sn-119") && listing.contains("Fe-57"));
    let o = nucsp(&["list-lattices"], Some(dir.path()));
    assert!(String::from_utf8_lossy(&o.stdout).contains("bcc-w"));

    let cfg = write(
        dir.path(),
        "c.toml",
        "scenario = \"crystal-yield\"\nnuclide = \"Sn-119\"\n[probe]\nspecies = \"electron\"\nbeta = 0.9\n\
         [geometry]\nlattice = \"bcc-w\"\nn_layers = 100\nr_min_nm = 0.002\n",
    );
    let out = dir.path().join("o");
    let o = nucsp(&["run", &cfg, "--out", out.to_str().unwrap()], Some(dir.path()));
    assert!(o.status.success(), "{}", stderr(&o));
    let o = nucsp(&["validate", &cfg], None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn broken_data_file_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "nuclides.kv", "name = Q-1\ne0_keV = nope\n");
    let o = nucsp(&["list-nuclides"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nuclides.kv"));
}

#[test]
fn crystal_yield_has_total_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "scenario = \"crystal-yield\"\n[probe]\nspecies = \"electron\"\nbeta_grid = [0.9, 0.94]\n\
         [geometry]\nlattice = \"bcc100\"\nn_layers = 10\nr_min_nm = 0.004\n[output]\npath = \"y.csv\"\n",
    );
    let out = dir.path().join("o");
    let o = nucsp(&["run", &cfg, "--out", out.to_str().unwrap(), "--seed", "9"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = ResultTable::parse(&std::fs::read_to_string(out.join("y.csv")).unwrap()).unwrap();
    assert_eq!(t.get_meta("seed"), Some("9"));
    let order = t.column("order[integer]").unwrap();
    let per_layer = t.column("yield_per_layer_per_Z2[dimensionless]").unwrap();
    let beta = t.column("beta[dimensionless]").unwrap();
    for b in [0.9, 0.94] {
        let rows: Vec<usize> = (0..beta.len()).filter(|&i| beta[i] == b).collect();
        let total: Vec<usize> = rows.iter().copied().filter(|&i| order[i] == 0.0).collect();
        assert_eq!(total.len(), 1);
        let sum: f64 = rows.iter().filter(|&&i| order[i] > 0.0).map(|&i| per_layer[i]).sum();
        assert!((sum / per_layer[total[0]] - 1.0).abs() < 1e-12);
    }
}
