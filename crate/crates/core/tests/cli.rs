use std::path::Path;
use std::process::Command;

fn fixture(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel).display().to_string()
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kleinsig")).args(args).output().unwrap();
    let mut text = String::from_utf8(out.stdout).unwrap();
    text.push_str(&String::from_utf8(out.stderr).unwrap());
    (out.status.code().unwrap(), text)
}

fn set_args(name: &str) -> Vec<String> {
    vec![
        "invariants".into(),
        "--diagram".into(),
        fixture(&format!("diagrams/{name}.kd")),
        "--movie".into(),
        fixture(&format!("movies/{name}.km")),
        "--lift".into(),
        fixture(&format!("lifts/{name}.kl")),
        "--relations".into(),
        fixture(&format!("relations/{name}.kr")),
    ]
}

fn run_owned(args: &[String]) -> (i32, String) {
    run(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

fn value_line<'a>(text: &'a str, name: &str) -> Option<&'a str> {
    text.lines().find_map(|l| {
        let mut it = l.split_whitespace();
        (it.next() == Some(name)).then(|| it.next()).flatten()
    })
}

#[test]
fn validate_exit_codes() {
    assert_eq!(run(&["validate", &fixture("diagrams/kinoshita.kd")]).0, 0);
    assert_eq!(run(&["validate", &fixture("graphs/theta.kg")]).0, 0);
    assert_eq!(run(&["validate", &fixture("movies/kinoshita.km")]).0, 0);
    let (code, out) = run(&["validate", &fixture("graphs/color_clash.kg")]);
    assert_eq!(code, 1);
    assert!(out.contains("ColorClash"), "{out}");
    assert!(out.contains("v0"), "{out}");
    assert_eq!(run(&["validate", "/nonexistent/file.kg"]).0, 64);
    assert_eq!(run(&["validate", &fixture("lifts/kinoshita.kl")]).0, 64);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["frobnicate"]).0, 64);
    assert_eq!(run(&["signature"]).0, 64);
    assert_eq!(run(&["--format", "yaml", "signature", &fixture("diagrams/unknot.kd")]).0, 64);
    assert_eq!(run(&["py", "--g", "1/2", "--v", "3,4"]).0, 64);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn invariants_kinoshita() {
    let (code, out) = run_owned(&set_args("kinoshita"));
    assert_eq!(code, 0, "{out}");
    assert_eq!(value_line(&out, "sigma"), Some("0"));
    assert_eq!(value_line(&out, "sigma_tilde"), Some("24"));
    for p in ["delta_ab", "delta_bc", "delta_ca"] {
        assert_eq!(value_line(&out, p), Some("8"), "{p}");
    }
}

#[test]
fn invariants_trefoil_theta() {
    let (code, out) = run_owned(&set_args("trefoil_theta"));
    assert_eq!(code, 0, "{out}");
    assert_eq!(value_line(&out, "sigma"), Some("-2"));
    assert_eq!(value_line(&out, "sigma_tilde"), Some("14/3"));
}

#[test]
fn invariants_underdetermined_and_inconsistent() {
    let mut args = set_args("kinoshita");
    args.extend(["--drop".into(), "e_tilde_c".into()]);
    let (code, out) = run_owned(&args);
    assert_eq!(code, 3, "{out}");
    let closing = out.lines().find(|l| l.contains("would close the system")).unwrap();
    assert!(closing.contains("e_tilde_c"), "{out}");

    let mut args = set_args("kinoshita");
    args.extend(["--known".into(), "sigma_tilde = 25".into()]);
    let (code, out) = run_owned(&args);
    assert_eq!(code, 2, "{out}");
    assert!(out.contains("known sigma_tilde"), "{out}");

    let mut args = set_args("kinoshita");
    args.extend(["--symmetry".into(), "xi_a = e_ab".into()]);
    assert_eq!(run_owned(&args).0, 1);
    let mut args = set_args("kinoshita");
    args.extend(["--known".into(), "zeta = 1".into()]);
    assert_eq!(run_owned(&args).0, 64);
}

#[test]
fn invariants_bad_inputs() {
    let mut args = set_args("kinoshita");
    args[2] = fixture("diagrams/theta.kd");
    assert_eq!(run_owned(&args).0, 1);
    args[2] = fixture("diagrams/missing.kd");
    assert_eq!(run_owned(&args).0, 64);
}

#[test]
fn strict_escalates_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let lift = dir.path().join("even.kl");
    std::fs::write(&lift, "clasp sign=+ framing=1 lk_with_branch=1 color=a\nclasp sign=+ framing=1 lk_with_branch=1 color=a\n").unwrap();
    let lift = lift.display().to_string();
    let base = ["invariants", "--diagram", &fixture("diagrams/theta.kd"), "--lift", &lift];
    let (code, out) = run(&base);
    assert_eq!(code, 3, "{out}");
    assert!(out.contains("warning"), "{out}");
    let mut strict = base.to_vec();
    strict.insert(0, "--strict");
    assert_eq!(run(&strict).0, 1);
}

#[test]
fn tools() {
    assert_eq!(run(&["py", "--g", "1/2", "--v", "3", "--lk0", "0"]), (0, "-18\n".into()));
    assert_eq!(run(&["py", "--g", "-3/2", "--v", "1"]), (0, "2/3\n".into()));
    assert_eq!(run(&["py", "--surgery", &fixture("surgery/kinoshita_c.ks"), "--v", "3"]), (0, "-18\n".into()));
    assert_eq!(run(&["py", "--g", "0", "--v", "1"]).0, 1);
    assert_eq!(run(&["hamiltonian", &fixture("graphs/theta.kg")]), (0, "true\n".into()));
    assert_eq!(run(&["hamiltonian", &fixture("diagrams/kinoshita.kd")]), (0, "true\n".into()));
    assert_eq!(run(&["signature", &fixture("diagrams/unknot.kd")]), (0, "0\n".into()));
    assert_eq!(run(&["signature", &fixture("diagrams/mirror_10_124.kd")]), (0, "8\n".into()));
    assert_eq!(run(&["signature", &fixture("diagrams/trefoil_theta.kd"), "--pair", "bc"]), (0, "-2\n".into()));
    let (code, out) = run(&["euler", &fixture("movies/kinoshita.km")]);
    assert_eq!(code, 0);
    assert!(out.contains("e_ab -4") && out.contains("closed c [2]"), "{out}");
    let (code, out) = run(&["euler", &fixture("diagrams/kinoshita.kd")]);
    assert_eq!(code, 0);
    assert!(out.contains("e_ab -4"), "{out}");
}

#[test]
fn machine_output_is_stable_json() {
    let mut args = vec!["--format".to_string(), "machine".to_string()];
    args.extend(set_args("trefoil_theta"));
    let (c1, a) = run_owned(&args);
    let (c2, b) = run_owned(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["values"]["sigma_tilde"], "14/3");
    assert_eq!(v["values"]["delta_ab"], "4/3");
    assert_eq!(v["status"]["kind"], "solved");
    assert_eq!(v["strong_euler"]["a"]["boundary_lk"], "2/3");
}

/// Copies a fixture set into `dir`, pointing the movie at absolute diagram paths.
fn copy_set(name: &str, dir: &Path) {
    std::fs::create_dir_all(dir).unwrap();
    let movie = std::fs::read_to_string(fixture(&format!("movies/{name}.km"))).unwrap();
    let movie = movie.replace("../diagrams/", &format!("{}/", fixture("diagrams")));
    std::fs::write(dir.join(format!("{name}.km")), movie).unwrap();
    for (sub, ext) in [("diagrams", "kd"), ("lifts", "kl"), ("relations", "kr")] {
        std::fs::copy(fixture(&format!("{sub}/{name}.{ext}")), dir.join(format!("{name}.{ext}"))).unwrap();
    }
}

#[test]
fn batch_runs_every_set() {
    let root = tempfile::tempdir().unwrap();
    copy_set("kinoshita", &root.path().join("kinoshita"));
    copy_set("trefoil_theta", &root.path().join("trefoil_theta"));
    let dir = root.path().display().to_string();
    let (code, out) = run(&["--batch", &dir, "invariants"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.find("== kinoshita").unwrap() < out.find("== trefoil_theta").unwrap());
    let (_, m1) = run(&["--batch", &dir, "--format", "machine", "invariants"]);
    let (_, m2) = run(&["--batch", &dir, "--format", "machine", "invariants"]);
    assert_eq!(m1, m2);
    let v: serde_json::Value = serde_json::from_str(&m1).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);

    std::fs::remove_file(root.path().join("kinoshita/kinoshita.kr")).unwrap();
    let (code, _) = run(&["--batch", &dir, "invariants"]);
    assert_eq!(code, 3);

    let (code, out) = run(&["--batch", &fixture("graphs"), "validate"]);
    assert_eq!(code, 1, "{out}");
    assert_eq!(out.lines().filter(|l| l.contains(": valid")).count(), 4, "{out}");
    let (code, out) = run(&["--batch", &fixture("graphs"), "hamiltonian"]);
    assert_eq!(code, 1, "{out}");
    assert_eq!(run(&["--batch", &fixture("graphs"), "py", "--g", "1", "--v", "1"]).0, 64);
}
