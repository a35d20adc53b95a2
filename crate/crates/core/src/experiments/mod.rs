//! Seeded replicate runs of the limit theorems and their reports.

mod config;
mod emit;

pub use config::{parse_motif, ExperimentConfig, Kind, Sweep};
pub use emit::{emit, render_csv, render_svg, CSV_HEADER};

use std::time::Instant;

use rayon::prelude::*;

use crate::binom::{self, ApproxDomain};
use crate::degree_cdf;
use crate::fluctuation::{self, AlphaBudget, TestFunction};
use crate::graph::MotifFamily;
use crate::graphon::{Family, Graphon, QuadratureSpec};
use crate::hom;
use crate::rng;
use crate::sampler;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct ReportRow {
    pub n: usize,
    pub statistic: String,
    pub empirical: f64,
    pub target: f64,
    pub se: f64,
    pub z: f64,
    pub runtime_ms: u128,
    /// Whether the row takes part in the pass/fail decision.
    pub gated: bool,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub kind: Kind,
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| !r.gated || r.pass)
    }

    pub fn row(&self, n: usize, statistic: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.n == n && r.statistic == statistic)
    }
}

/// Seed of replicate `r` at size `n`.
pub fn replicate_seed(master: u64, n: usize, r: usize) -> u64 {
    rng::derive(rng::derive(master, n as u64), r as u64)
}

fn replicate<T: Send, F: Fn(usize) -> Result<T> + Sync + Send>(cfg: &ExperimentConfig, f: F) -> Result<Vec<T>> {
    let run = || (0..cfg.reps).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
    if cfg.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Config(format!("threads: {e}")))?;
        pool.install(run)
    } else {
        run()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Moments {
    pub mean: f64,
    pub var: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub anderson_darling: f64,
}

/// Sample moments (unbiased variance) and the Anderson–Darling statistic
/// against a normal law with estimated parameters.
pub fn moments(xs: &[f64]) -> Moments {
    let r = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / r;
    let c = |p: i32| xs.iter().map(|x| (x - mean).powi(p)).sum::<f64>() / r;
    let (m2, m3, m4) = (c(2), c(3), c(4));
    let var = m2 * r / (r - 1.0);
    let sd = var.sqrt();
    let (skewness, excess_kurtosis, anderson_darling) = if m2 > 0.0 {
        let mut z: Vec<f64> = xs.iter().map(|x| (x - mean) / sd).collect();
        z.sort_by(f64::total_cmp);
        let k = z.len();
        let s: f64 = (0..k)
            .map(|i| {
                let lo = binom::norm_cdf(z[i]).max(1e-300).ln();
                let hi = binom::norm_cdf(-z[k - 1 - i]).max(1e-300).ln();
                (2 * i + 1) as f64 * (lo + hi)
            })
            .sum();
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0, -r - s / r)
    } else {
        (0.0, 0.0, 0.0)
    };
    Moments { mean, var, skewness, excess_kurtosis, anderson_darling }
}

fn ungated(n: usize, statistic: &str, empirical: f64, target: f64, se: f64) -> ReportRow {
    let z = if se > 0.0 { (empirical - target) / se } else { f64::NAN };
    ReportRow { n, statistic: statistic.into(), empirical, target, se, z, runtime_ms: 0, gated: false, pass: true }
}

/// |empirical − target| ≤ z_max·se + floor·|target|.
fn gated(cfg: &ExperimentConfig, n: usize, statistic: &str, empirical: f64, target: f64, se: f64) -> ReportRow {
    let mut row = ungated(n, statistic, empirical, target, se);
    row.gated = true;
    row.pass = (empirical - target).abs() <= cfg.z_max * se + cfg.floor * target.abs();
    row
}

fn variance_se(target: f64, reps: usize) -> f64 {
    target * (2.0 / (reps as f64 - 1.0)).sqrt()
}

fn quadrature(cfg: &ExperimentConfig) -> QuadratureSpec {
    QuadratureSpec { nodes_per_dim: cfg.nodes, ..Default::default() }
}

fn stamp(rows: &mut [ReportRow], t0: Instant) {
    let ms = t0.elapsed().as_millis();
    for r in rows {
        r.runtime_ms = ms;
    }
}

fn diagnostics(n: usize, m: &Moments, reps: usize) -> Vec<ReportRow> {
    let r = reps as f64;
    vec![
        ungated(n, "mean", m.mean, 0.0, (m.var / r).sqrt()),
        ungated(n, "skewness", m.skewness, 0.0, (6.0 / r).sqrt()),
        ungated(n, "excess_kurtosis", m.excess_kurtosis, 0.0, (24.0 / r).sqrt()),
        ungated(n, "anderson_darling", m.anderson_darling, f64::NAN, f64::NAN),
    ]
}

fn gamma_n_at(fam: &MotifFamily, g: &TestFunction, w: &Graphon, cfg: &ExperimentConfig, n: usize, r: usize) -> Result<f64> {
    let seed = replicate_seed(cfg.seed, n, r);
    let s = sampler::sample(w, n, seed)?;
    let budget = AlphaBudget::Sample { max_words: cfg.alpha_budget, seed: rng::derive(seed, 0xa1fa) };
    Ok(fluctuation::gamma_n(fam, g, &s.graph, budget)?.value)
}

/// R replicates of √n(Γ_n(g) − Γ(g)) against σ^{F,ℓ}(g)².
pub fn run_clt(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let fam = cfg.family()?;
    let w = cfg.graphon()?;
    let g = TestFunction::parse(&cfg.g)?;
    let q = quadrature(cfg);
    let target = fluctuation::sigma2_clt(&fam, &g, &w, &q)?.sigma2;
    let center = fluctuation::gamma_limit(&fam, &g, &w, &q)?;
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let t0 = Instant::now();
        let xs = replicate(cfg, |r| Ok((n as f64).sqrt() * (gamma_n_at(&fam, &g, &w, cfg, n, r)? - center)))?;
        let m = moments(&xs);
        let mut block = vec![if target > 0.0 {
            gated(cfg, n, "var", m.var, target, variance_se(target, cfg.reps))
        } else {
            ungated(n, "var", m.var, target, variance_se(m.var, cfg.reps))
        }];
        block.extend(diagnostics(n, &m, cfg.reps));
        stamp(&mut block, t0);
        rows.extend(block);
    }
    Ok(ExperimentReport { kind: Kind::Clt, rows })
}

/// R replicates of |Γ_n(g) − Γ(g)|.
pub fn run_lln(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let fam = cfg.family()?;
    let w = cfg.graphon()?;
    let g = TestFunction::parse(&cfg.g)?;
    let center = fluctuation::gamma_limit(&fam, &g, &w, &quadrature(cfg))?;
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let t0 = Instant::now();
        let mut xs = replicate(cfg, |r| Ok((gamma_n_at(&fam, &g, &w, cfg, n, r)? - center).abs()))?;
        let m = moments(&xs);
        xs.sort_by(f64::total_cmp);
        let median = if xs.len() % 2 == 1 {
            xs[xs.len() / 2]
        } else {
            0.5 * (xs[xs.len() / 2 - 1] + xs[xs.len() / 2])
        };
        let mut block = vec![
            ungated(n, "mean_abs_error", m.mean, 0.0, (m.var / cfg.reps as f64).sqrt()),
            ungated(n, "median_abs_error", median, 0.0, f64::NAN),
        ];
        stamp(&mut block, t0);
        rows.extend(block);
    }
    Ok(ExperimentReport { kind: Kind::Lln, rows })
}

/// Constant graphon: n(t_inj − p^e) against 2e²p^{2e−1}(1−p), and the
/// degenerate √n scaling.
pub fn run_er_scaling(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let w = cfg.graphon()?;
    let Family::Constant(p) = w.family() else {
        return Err(Error::Precondition(format!("n-scaling needs a constant graphon, got {}", w.name())));
    };
    if cfg.motifs.len() != 1 {
        return Err(Error::Config("motif: n-scaling takes a single motif".into()));
    }
    let f = parse_motif(&cfg.motifs[0])?;
    let q = quadrature(cfg);
    let target_n = fluctuation::er_scaling_variance(&f, p);
    let fam = MotifFamily::single(crate::graph::LabeledMotif::unlabeled(f.clone()));
    let target_sqrt = fluctuation::sigma2_clt(&fam, &TestFunction::identity(), &w, &q)?.sigma2;
    let t = w.t_graphon(&f, &q);
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let t0 = Instant::now();
        let xs = replicate(cfg, |r| {
            let s = sampler::sample(&w, n, replicate_seed(cfg.seed, n, r))?;
            Ok(hom::t_inj(&f, &s.graph)? - t)
        })?;
        let scaled: Vec<f64> = xs.iter().map(|x| x * n as f64).collect();
        let m = moments(&scaled);
        let v_sqrt = m.var / n as f64;
        let mut sq = ungated(n, "var_sqrt_n", v_sqrt, target_sqrt, variance_se(v_sqrt, cfg.reps));
        sq.gated = true;
        sq.pass = (v_sqrt - target_sqrt).abs() <= cfg.degenerate_tol;
        let mut block = vec![gated(cfg, n, "var_n", m.var, target_n, variance_se(target_n, cfg.reps)), sq];
        block.extend(diagnostics(n, &m, cfg.reps));
        stamp(&mut block, t0);
        rows.extend(block);
    }
    Ok(ExperimentReport { kind: Kind::ErScaling, rows })
}

/// √n(Π_n(y) − y) on the y-grid: covariance against Σ, and the centering
/// Π_n(y) − c_{n−1}(y).
pub fn run_degree_cdf(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let w = cfg.graphon()?;
    w.require_regular()?;
    let ys = &cfg.y_grid;
    if ys.is_empty() || ys.iter().any(|y| !(*y > 0.0 && *y < 1.0)) {
        return Err(Error::Config("y_grid: points must lie in (0,1)".into()));
    }
    let k = ys.len();
    let mut sigma = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            sigma[i][j] = degree_cdf::sigma_kernel(&w, ys[i], ys[j])?.total;
        }
    }
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let t0 = Instant::now();
        let centers: Vec<f64> = ys.iter().map(|&y| degree_cdf::c_n_exact(&w, (n - 1) as u64, y)).collect::<Result<_>>()?;
        let samples = replicate(cfg, |r| {
            let s = sampler::sample(&w, n, replicate_seed(cfg.seed, n, r))?;
            degree_cdf::empirical_cdf_grid(&s.graph, &w, ys)
        })?;
        let rn = (n as f64).sqrt();
        let scaled: Vec<Vec<f64>> = samples.iter().map(|v| v.iter().zip(ys).map(|(p, y)| rn * (p - y)).collect()).collect();
        let reps = cfg.reps as f64;
        let means: Vec<f64> = (0..k).map(|i| scaled.iter().map(|v| v[i]).sum::<f64>() / reps).collect();
        let mut block = Vec::new();
        for i in 0..k {
            for j in i..k {
                let cov = scaled.iter().map(|v| (v[i] - means[i]) * (v[j] - means[j])).sum::<f64>() / (reps - 1.0);
                let se = ((sigma[i][i] * sigma[j][j] + sigma[i][j] * sigma[i][j]) / (reps - 1.0)).sqrt();
                block.push(gated(cfg, n, &format!("cov({},{})", ys[i], ys[j]), cov, sigma[i][j], se));
            }
        }
        for i in 0..k {
            let xs: Vec<f64> = samples.iter().map(|v| v[i] - centers[i]).collect();
            let m = moments(&xs);
            let mut row = ungated(n, &format!("center({})", ys[i]), m.mean, 0.0, (m.var / reps).sqrt());
            row.gated = true;
            row.pass = row.z.is_nan() || row.z.abs() <= cfg.z_max;
            block.push(row);
        }
        stamp(&mut block, t0);
        rows.extend(block);
    }
    Ok(ExperimentReport { kind: Kind::DegreeCdf, rows })
}

fn linspace(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()
}

/// Residual sweeps of the binomial expansions over the n-list.
pub fn run_binom_sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let p = cfg.p;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Config(format!("p: {p} outside (0,1)")));
    }
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let t0 = Instant::now();
        let nu = n as u64;
        let mut row = match cfg.sweep {
            config::Sweep::Edgeworth => {
                let mut worst: f64 = 0.0;
                let mut bound = 0.0;
                let mut region = false;
                for x in linspace(-3.0, 3.0, 121) {
                    let e = binom::edgeworth_cdf(nu, p, x);
                    worst = worst.max((binom::edgeworth_target(nu, p, x) - e.value).abs());
                    bound = e.bound;
                    region = e.in_region;
                }
                let mut row = ungated(n, "edgeworth", worst, bound, f64::NAN);
                row.z = worst / bound;
                row.gated = region;
                row.pass = worst <= bound;
                row
            }
            config::Sweep::Approx => {
                let dom = ApproxDomain { eps0: 0.01, alpha: 1.0 };
                let reach = dom.alpha * (n as f64).ln().sqrt();
                let mut worst: f64 = 0.0;
                let mut env = 0.0;
                for s in linspace(-reach, reach, 41) {
                    let Ok(a) = binom::cdf_approx(nu, p, 0.0, s, dom) else { continue };
                    let exact = binom::h(nu, p, 0.0, p + s / (n as f64).sqrt());
                    worst = worst.max((a.value - exact).abs());
                    env = a.envelope;
                }
                let mut row = ungated(n, "approx", worst, env, f64::NAN);
                row.z = worst / env;
                row
            }
            config::Sweep::Tail => {
                let alpha = 3.0;
                let mut fails = 0.0;
                for u in linspace(0.005, 0.995, 199) {
                    if let Ok(ok) = binom::tail_bound_check(nu, p, 0.0, u, alpha) {
                        fails += (!ok) as u8 as f64;
                    }
                }
                let mut row = ungated(n, "tail_violations", fails, 0.0, f64::NAN);
                row.gated = true;
                row.pass = fails == 0.0;
                row
            }
        };
        row.runtime_ms = t0.elapsed().as_millis();
        rows.push(row);
    }
    Ok(ExperimentReport { kind: Kind::BinomSweep, rows })
}

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    match cfg.kind {
        Kind::Lln => run_lln(cfg),
        Kind::Clt => run_clt(cfg),
        Kind::ErScaling => run_er_scaling(cfg),
        Kind::DegreeCdf => run_degree_cdf(cfg),
        Kind::BinomSweep => run_binom_sweep(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_of_symmetric_sample() {
        let xs: Vec<f64> = (-50..=50).map(|i| i as f64).collect();
        let m = moments(&xs);
        assert_eq!(m.mean, 0.0);
        assert!(m.skewness.abs() < 1e-12);
        assert!((m.var - 101.0 * 102.0 / 12.0).abs() < 1e-9);
        assert!(m.anderson_darling > 0.0);
    }

    #[test]
    fn config_errors() {
        let mut c = ExperimentConfig::new(Kind::Clt);
        c.reps = 1;
        assert!(matches!(run_clt(&c), Err(Error::Config(_))));
        let mut c = ExperimentConfig::new(Kind::ErScaling);
        c.reps = 10;
        assert!(matches!(run_er_scaling(&c), Err(Error::Precondition(_))));
        let mut c = ExperimentConfig::new(Kind::DegreeCdf);
        c.graphon = "constant:0.5".into();
        assert!(matches!(run_degree_cdf(&c), Err(Error::Regularity(_))));
    }

    #[test]
    fn small_runs_are_deterministic() {
        let mut c = ExperimentConfig::new(Kind::Clt);
        c.n_list = vec![20, 40];
        c.reps = 30;
        c.nodes = 16;
        let a = run_clt(&c).unwrap();
        c.threads = 1;
        let b = run_clt(&c).unwrap();
        assert_eq!(render_csv(&a, false).unwrap(), render_csv(&b, false).unwrap());
        assert_eq!(a.rows.len(), 2 * 5);
    }
}
