use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphon-lab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn sample_then_count() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let lat = dir.path().join("lat.csv");
    let o = bin(&["sample", "--graphon", "constant:1", "--n", "7", "--seed", "9", "--out", g.to_str().unwrap(), "--latent-out", lat.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&g).unwrap();
    assert_eq!(text.lines().next().unwrap(), "7 21");
    assert_eq!(std::fs::read_to_string(&lat).unwrap().lines().count(), 8);

    // K_7: |Inj(K3,K7)| = 7·6·5
    let o = bin(&["density", "--motif", "K3", "--host", g.to_str().unwrap(), "--mode", "inj"]);
    assert_eq!(stdout(&o).trim(), "mode=inj count=210 density=1");
    let o = bin(&["density", "--motif", "P3", "--host", g.to_str().unwrap(), "--mode", "ind"]);
    assert!(stdout(&o).starts_with("mode=ind count=0 "));
    let o = bin(&["density", "--motif", "K3", "--host", g.to_str().unwrap(), "--mode", "rooted", "--labels", "1,2", "--root", "3,5"]);
    assert!(stdout(&o).starts_with("mode=rooted count=5 "), "{}", stdout(&o));
}

#[test]
fn motif_from_edge_list_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.txt");
    let h = dir.path().join("h.txt");
    std::fs::write(&f, "3 2\n1 2\n2 3\n").unwrap();
    std::fs::write(&h, "5 5\n1 2\n2 3\n3 4\n4 5\n5 1\n").unwrap();
    let o = bin(&["density", "--motif", f.to_str().unwrap(), "--host", h.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "mode=inj count=10 density=0.16666666666666666");
}

#[test]
fn experiment_reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = bin(&["degree-cdf", "--y", "0.3,0.6", "--n", "40,80", "--reps", "60", "--seed", "5", "--out", out.to_str().unwrap()]);
        assert!(o.status.code().unwrap() < 2, "{}", String::from_utf8_lossy(&o.stderr));
        let csv = std::fs::read_to_string(&out).unwrap();
        assert!(out.with_extension("svg").exists());
        csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect::<Vec<_>>()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("clt.cfg");
    std::fs::write(&cfg, "graphon.kind = affine\ngraphon.params = 0,1\nmotif = K2\nn_list = 30\nreps = 40\nz_max = 0\nfloor = 0\n").unwrap();
    let out = dir.path().to_str().unwrap();
    let o = bin(&["clt", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("gate breach"));
    assert!(dir.path().join("clt.csv").exists());

    let o = bin(&["binom-check", "--n-list", "64,256", "--sweep", "edgeworth", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    std::fs::write(&cfg, "reps = 10\nbogus = 1\n").unwrap();
    let o = bin(&["clt", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = bin(&["clt", "--reps", "1", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["er-scaling", "--graphon", "affine:0,1", "--n", "20", "--reps", "5", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
}
