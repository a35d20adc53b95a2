use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graphon_lab::experiments::{self, parse_motif, ExperimentConfig, ExperimentReport, Kind};
use graphon_lab::hom::{self, Mode};
use graphon_lab::{sampler, Error, Graphon, LabeledMotif, SimpleGraph, Word};

#[derive(Parser)]
#[command(name = "graphon-lab", version, about = "W-random graphs, motif densities and their fluctuations")]
struct Cli {
    /// Experiment config file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory, or a file path ending in .csv / .txt.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a W-random graph.
    Sample {
        #[arg(long, default_value = "affine:0,1")]
        graphon: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        latent_out: Option<PathBuf>,
    },
    /// Motif counts and densities in a host graph.
    Density {
        /// Edge-list file or a name such as K3, P4, C5.
        #[arg(long)]
        motif: String,
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        labels: Option<String>,
        #[arg(long)]
        root: Option<String>,
        #[arg(long, default_value = "inj")]
        mode: String,
    },
    /// Fluctuations of Γ_n(g) against σ²(g).
    Clt(CltArgs),
    /// Law of large numbers for Γ_n(g).
    Lln(CltArgs),
    /// n-scaling on a constant graphon.
    ErScaling {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        motif: Option<String>,
    },
    /// Covariance of the empirical degree CDF.
    DegreeCdf {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        y: Option<String>,
        #[arg(long)]
        epsilon0: Option<f64>,
    },
    /// Residual sweeps of the binomial expansions.
    BinomCheck {
        #[arg(long)]
        n_list: Option<String>,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        sweep: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    graphon: Option<String>,
    /// Comma-separated list of graph sizes.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    reps: Option<String>,
}

#[derive(Args)]
struct CltArgs {
    #[command(flatten)]
    common: Common,
    /// File with one motif per line, or a `;`-separated list.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    labels: Option<String>,
    #[arg(long)]
    g: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    match &cli.cmd {
        Cmd::Sample { graphon, n, latent_out } => {
            let w = Graphon::from_spec(graphon)?;
            let s = sampler::sample(&w, *n, cli.seed.unwrap_or(1))?;
            match &cli.out {
                Some(p) => sampler::write_edge_list(&s.graph, p)?,
                None => print!("{}", s.graph.to_edge_list()),
            }
            if let Some(p) = latent_out {
                sampler::write_latents(&s.latent, p)?;
            }
            Ok(true)
        }
        Cmd::Density { motif, host, labels, root, mode } => {
            density(motif, host, labels.as_deref(), root.as_deref(), mode)?;
            Ok(true)
        }
        _ => experiment(&cli),
    }
}

fn load_graph(spec: &str) -> Result<SimpleGraph, Error> {
    let path = Path::new(spec);
    if path.exists() {
        SimpleGraph::parse_edge_list(&std::fs::read_to_string(path)?)
    } else {
        parse_motif(spec)
    }
}

fn word(s: Option<&str>) -> Result<Word, Error> {
    match s {
        Some(s) if !s.trim().is_empty() => Word::parse(s),
        _ => Ok(Word::empty()),
    }
}

fn density(motif: &str, host: &Path, labels: Option<&str>, root: Option<&str>, mode: &str) -> Result<(), Error> {
    let f = load_graph(motif)?;
    let g = SimpleGraph::parse_edge_list(&std::fs::read_to_string(host)?)?;
    match mode {
        "hom" => println!("mode=hom count={} density={}", hom::count(&f, &g, Mode::Hom), hom::t_hom(&f, &g)),
        "inj" => println!("mode=inj count={} density={}", hom::count(&f, &g, Mode::Inj), hom::t_inj(&f, &g)?),
        "ind" => println!("mode=ind count={} density={}", hom::count(&f, &g, Mode::Ind), hom::t_ind(&f, &g)?),
        "rooted" => {
            let m = LabeledMotif::new(f, word(labels)?)?;
            let r = hom::t_inj_rooted(&m, &g, &word(root)?)?;
            println!(
                "mode=rooted count={} tilde_count={} hat={} normalizer={} density={} tilde_density={}",
                r.inj_count, r.tilde_count, r.hat as u8, r.normalizer, r.density, r.tilde_density
            );
        }
        other => return Err(Error::Config(format!("mode: expected hom|inj|ind|rooted, got '{other}'"))),
    }
    Ok(())
}

fn apply_common(cfg: &mut ExperimentConfig, c: &Common) -> Result<(), Error> {
    if let Some(v) = &c.graphon {
        cfg.set("graphon", v)?;
    }
    if let Some(v) = &c.n {
        cfg.set("n_list", v)?;
    }
    if let Some(v) = &c.reps {
        cfg.set("reps", v)?;
    }
    Ok(())
}

fn apply_clt(cfg: &mut ExperimentConfig, a: &CltArgs) -> Result<(), Error> {
    apply_common(cfg, &a.common)?;
    if let Some(f) = &a.family {
        let text = if Path::new(f).exists() {
            let body = std::fs::read_to_string(f)?;
            body.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .collect::<Vec<_>>()
                .join(";")
        } else {
            f.clone()
        };
        cfg.set("motif", &text)?;
    }
    if let Some(v) = &a.labels {
        cfg.set("labels", v)?;
    }
    if let Some(v) = &a.g {
        cfg.set("g", v)?;
    }
    Ok(())
}

fn experiment(cli: &Cli) -> Result<bool, Error> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p).map_err(|e| match e {
            Error::Io(io) => Error::Config(format!("{}: {io}", p.display())),
            other => other,
        })?,
        None => ExperimentConfig::default(),
    };
    let defaults = ExperimentConfig::default();
    let kind = match &cli.cmd {
        Cmd::Clt(a) => {
            apply_clt(&mut cfg, a)?;
            Kind::Clt
        }
        Cmd::Lln(a) => {
            apply_clt(&mut cfg, a)?;
            Kind::Lln
        }
        Cmd::ErScaling { common, motif } => {
            if cfg.graphon == defaults.graphon {
                cfg.graphon = "constant:0.5".into();
            }
            apply_common(&mut cfg, common)?;
            if let Some(m) = motif {
                cfg.set("motif", m)?;
            }
            Kind::ErScaling
        }
        Cmd::DegreeCdf { common, y, epsilon0 } => {
            apply_common(&mut cfg, common)?;
            if let Some(v) = y {
                cfg.set("y_grid", v)?;
            }
            if let Some(e) = epsilon0 {
                cfg.graphon_epsilon0 = Some(*e);
            }
            Kind::DegreeCdf
        }
        Cmd::BinomCheck { n_list, p, sweep } => {
            for (k, v) in [("n_list", n_list), ("p", p), ("sweep", sweep)] {
                if let Some(v) = v {
                    cfg.set(k, v)?;
                }
            }
            Kind::BinomSweep
        }
        Cmd::Sample { .. } | Cmd::Density { .. } => unreachable!(),
    };
    cfg.kind = kind;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    let (dir, stem) = match &cli.out {
        Some(p) if p.extension().is_some_and(|e| e == "csv") => (
            p.parent().map(Path::to_path_buf).unwrap_or_default(),
            p.file_stem().unwrap().to_string_lossy().into_owned(),
        ),
        Some(p) => (p.clone(), cfg.file_stem()),
        None => (cfg.out_dir.clone(), cfg.file_stem()),
    };
    let dir = if dir.as_os_str().is_empty() { PathBuf::from(".") } else { dir };
    let report = experiments::run(&cfg)?;
    let (csv, svg) = experiments::emit(&report, &dir, &stem)?;
    summarize(&report);
    println!("wrote {} and {}", csv.display(), svg.display());
    Ok(report.pass())
}

fn summarize(report: &ExperimentReport) {
    for r in report.rows.iter().filter(|r| r.gated) {
        println!(
            "{} n={} {}: empirical {:.6} target {:.6} z {:.2}",
            if r.pass { "PASS" } else { "FAIL" },
            r.n,
            r.statistic,
            r.empirical,
            r.target,
            r.z
        );
    }
    println!("{}: {}", report.kind.name(), if report.pass() { "all gates passed" } else { "gate breach" });
}
