use std::process::{Command, Output};

fn hashgrover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hashgrover")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn hash_prints_digest() {
    let o = hashgrover(&["hash", "--kind", "sponge", "--message", "0x5A"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "0x62");
}

#[test]
fn estimate_prints_full_size_blake_row() {
    let o = hashgrover(&["estimate", "--kind", "blake", "--n", "1024", "--s", "16", "--rho", "12"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,n,s,rho,source,toffoli,cnot,single,total,depth,qubits"));
    assert_eq!(lines.next(), Some("blake,1024,16,12,formula,157384,414208,150018,721610,64622,2053"));
}

#[test]
fn estimate_table_has_every_source() {
    let o = hashgrover(&["estimate", "--kind", "sponge", "--table"]);
    let text = stdout(&o);
    for source in [",formula,", ",measured,", ",published,"] {
        assert!(text.contains(source), "{text}");
    }
    assert!(text.contains("sponge,16,4,0,published,1000,3200,706,4906,1248,19"));
}

#[test]
fn blake_statevector_run_is_refused() {
    let o = hashgrover(&["grover", "--kind", "blake"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--reversible-check"));
}

#[test]
fn reversible_check_passes() {
    let o = hashgrover(&["grover", "--digest", "0x05", "--reversible-check"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("sponge,5,256,2,2,0,true"));
}

#[test]
fn grover_run_is_seeded() {
    let a = hashgrover(&["grover", "--digest", "0x05", "--mode", "unknown", "--seed", "11"]);
    let b = hashgrover(&["grover", "--digest", "0x05", "--mode", "unknown", "--seed", "11"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn error_paths_have_distinct_codes() {
    assert_eq!(hashgrover(&["bogus"]).status.code(), Some(2));
    assert_eq!(hashgrover(&["hash", "--message", "0x1FF"]).status.code(), Some(3));
    assert_eq!(hashgrover(&["estimate", "--n", "16"]).status.code(), Some(3));
    assert_eq!(hashgrover(&["grover", "--digest", "0x02"]).status.code(), Some(5));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "not a circuit\n").unwrap();
    assert_eq!(hashgrover(&["build-circuit", "--from", bad.to_str().unwrap()]).status.code(), Some(7));
    let missing = dir.path().join("missing.txt");
    assert_eq!(hashgrover(&["build-circuit", "--from", missing.to_str().unwrap()]).status.code(), Some(6));
}

#[test]
fn circuit_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("step.txt");
    let p = path.to_str().unwrap();
    assert!(hashgrover(&["build-circuit", "--part", "step", "-o", p]).status.success());
    let direct = hashgrover(&["build-circuit", "--part", "step", "--resources"]);
    let reread = hashgrover(&["build-circuit", "--from", p, "--resources"]);
    assert_eq!(stdout(&direct), stdout(&reread));
    assert!(stdout(&direct).contains("1032,3200,682,4914,1429,19"));
}

#[test]
fn help_lists_subcommands_and_defaults() {
    let text = stdout(&hashgrover(&["--help"]));
    for sub in ["hash", "preimages", "build-circuit", "estimate", "grover", "experiments"] {
        assert!(text.contains(sub), "{sub}");
    }
    let text = stdout(&hashgrover(&["grover", "--help"]));
    for default in ["[default: sponge]", "[default: 0]", "[default: 10]", "[default: 12]"] {
        assert!(text.contains(default), "{default}");
    }
}

#[test]
fn experiment_writes_to_env_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_hashgrover"))
        .args(["experiments", "run", "unknown-m", "--seed", "4", "--trials", "20"])
        .env("HASHGROVER_OUT", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("unknown-m.csv").exists());
    let manifest = std::fs::read_to_string(dir.path().join("unknown-m.json")).unwrap();
    assert!(manifest.contains("\"seed\": 4"));
}

#[test]
fn preimage_histogram_covers_all_digests() {
    let o = hashgrover(&["preimages", "--histogram"]);
    let total: usize = stdout(&o).lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 256);
}
