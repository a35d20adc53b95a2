use graphon_lab::degree_cdf::{pair_indicator_mc, DegreeCdfKernel};
use graphon_lab::experiments::{run_lln, ExperimentConfig, Kind};
use graphon_lab::Graphon;

#[test]
fn lln_median_error_decreases() {
    let mut c = ExperimentConfig::new(Kind::Lln);
    c.motifs = vec!["P3".into()];
    c.labels = "1".into();
    c.g = "poly:0,1,1".into();
    c.n_list = vec![50, 100, 200, 400];
    c.reps = 50;
    c.seed = 3;
    let rep = run_lln(&c).unwrap();
    let med: Vec<f64> = c.n_list.iter().map(|&n| rep.row(n, "median_abs_error").unwrap().empirical).collect();
    assert!(med.windows(2).all(|w| w[1] < w[0]), "{med:?}");
}

#[test]
fn pair_indicator_limit_is_sigma2() {
    for (w, y1, y2) in [
        (Graphon::affine(0.0, 1.0).unwrap(), 0.3, 0.6),
        (Graphon::affine(0.0, 1.0).unwrap(), 0.5, 0.5),
        (Graphon::product(0.1).unwrap(), 0.4, 0.7),
    ] {
        let target = DegreeCdfKernel::new(&w).unwrap().sigma2(y1, y2).unwrap();
        let est = pair_indicator_mc(&w, y1, y2, 400, 200_000, 11).unwrap();
        assert!((est.mean - target).abs() <= 3.0 * est.se, "{} ({y1},{y2}): {} ± {} vs {target}", w.name(), est.mean, est.se);
    }
}
