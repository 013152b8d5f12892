use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "\
q_list = 0.5, 0.9
n_list = 3, 6
t_list = 0, 0.4
a_coeffs = 1; 1, 1
x_step = 0.25
sweep_n_list = 5, 10, 20
grid_points = 5
functions = sin, square
horizon = 4000
";

fn run(args: &[&str], config: &str, envs: &[(&str, &str)]) -> (Output, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.conf");
    fs::write(&path, config).unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qszasz"));
    cmd.args(args).arg("--config").arg(&path);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    (cmd.output().unwrap(), dir)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn moments_to_stdout() {
    let (o, _d) = run(&["moments"], SMALL, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout.clone()).unwrap();
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("# table: moments"));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!(header.starts_with(&[
        "q",
        "n",
        "t",
        "alpha",
        "beta",
        "a_coeffs",
        "x",
        "v",
        "oracle",
        "closed_form",
        "abs_diff"
    ]));
    // 2 q x 2 n x 2 t x 2 stancu x 2 A x 3 x x 3 v
    assert_eq!(lines.count(), 2 * 2 * 2 * 2 * 2 * 3 * 3);
    assert!(stderr(&o).contains("PASS moments v=1"));
}

#[test]
fn zero_generator_is_config_error() {
    let (o, _d) = run(&["moments"], "n_list = 3\na_coeffs = 0, 0\n", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("config line 2"), "{}", stderr(&o));
}

#[test]
fn lipschitz_without_constants_is_config_error() {
    let (o, _d) = run(&["bounds"], "checks = lipschitz\nlipschitz =\n", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no Lipschitz constants"));
}

#[test]
fn divergent_custom_sequence_rejected() {
    let cfg = "sweep_n_list = 5, 10\nq_sequence = custom\nq_values = 0.1, 0.2\ninterval = 1.5\n";
    let (o, _d) = run(&["statconv"], cfg, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("config line"), "{}", stderr(&o));
}

#[test]
fn bad_arguments() {
    let (o, _d) = run(&["nonsense"], SMALL, &[]);
    assert_eq!(o.status.code(), Some(2));
    let (o, _d) = run(&["moments", "--tol", "-1"], SMALL, &[]);
    assert_eq!(o.status.code(), Some(2));
    let (o, _d) = run(&["moments"], SMALL, &[("QSZASZ_THREADS", "zero")]);
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_qszasz"))
        .args(["moments", "--config", "/nonexistent/exp.conf"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tight_tolerance_fails_verification() {
    // --tol also tightens the first-moment agreement; 1e-300 is below rounding
    let (o, _d) = run(&["moments", "--tol", "1e-300"], SMALL, &[]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("FAIL moments v=1"));
}

fn table_names(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> =
        fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    names
}

#[test]
fn thread_count_does_not_change_results() {
    let base = tempfile::tempdir().unwrap();
    let mut contents = Vec::new();
    for threads in ["1", "3"] {
        let out = base.path().join(threads);
        let (o, _d) = run(&["bounds", "--out", out.to_str().unwrap()], SMALL, &[("QSZASZ_THREADS", threads)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(o.stdout.is_empty());
        let names = table_names(&out);
        assert_eq!(names, ["bounds.csv", "bounds_summary.csv", "local_constants.csv"]);
        contents.push(names.iter().map(|n| fs::read(out.join(n)).unwrap()).collect::<Vec<_>>());
    }
    assert_eq!(contents[0], contents[1]);
}

#[test]
fn every_command_runs_on_a_small_config() {
    for cmd in ["statconv", "sweep", "verify-all"] {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let (o, _d) = run(&[cmd, "--out", out.to_str().unwrap()], SMALL, &[]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", stderr(&o));
        let names = table_names(&out);
        match cmd {
            "statconv" => assert_eq!(
                names,
                ["admissibility.csv", "density.csv", "korovkin.csv", "korovkin_density.csv", "korovkin_functions.csv"]
            ),
            "sweep" => assert_eq!(names, ["classical.csv", "sweep.csv"]),
            _ => assert_eq!(names.len(), 11),
        }
        for n in names {
            let text = fs::read_to_string(out.join(&n)).unwrap();
            let widths: Vec<usize> = text.lines().map(|l| l.split(',').count()).collect();
            assert!(widths.len() > 1 && widths.iter().all(|&w| w == widths[0]), "{n} is ragged");
        }
    }
}
