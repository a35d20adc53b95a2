//! Flat `key = value` experiment configuration.

use std::path::PathBuf;
use std::str::FromStr;

use crate::graph::{LabeledMotif, MotifFamily, SimpleGraph, Word};
use crate::graphon::Graphon;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Lln,
    Clt,
    ErScaling,
    DegreeCdf,
    BinomSweep,
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lln" => Kind::Lln,
            "clt" => Kind::Clt,
            "er-scaling" => Kind::ErScaling,
            "degree-cdf" => Kind::DegreeCdf,
            "binom-sweep" => Kind::BinomSweep,
            _ => return Err(Error::Config(format!("kind: unknown experiment '{s}'"))),
        })
    }
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Lln => "lln",
            Kind::Clt => "clt",
            Kind::ErScaling => "er-scaling",
            Kind::DegreeCdf => "degree-cdf",
            Kind::BinomSweep => "binom-sweep",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sweep {
    Edgeworth,
    Approx,
    Tail,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub graphon: String,
    pub graphon_epsilon0: Option<f64>,
    /// Motif specs, one per family member.
    pub motifs: Vec<String>,
    pub labels: String,
    pub g: String,
    pub n_list: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub y_grid: Vec<f64>,
    pub p: f64,
    pub sweep: Sweep,
    pub out_dir: PathBuf,
    pub stem: String,
    pub threads: usize,
    pub z_max: f64,
    pub floor: f64,
    pub degenerate_tol: f64,
    pub alpha_budget: u128,
    pub nodes: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: Kind::Clt,
            graphon: "affine:0,1".into(),
            graphon_epsilon0: None,
            motifs: vec!["K2".into()],
            labels: String::new(),
            g: "id".into(),
            n_list: vec![200],
            reps: 2000,
            seed: 1,
            y_grid: vec![0.5],
            p: 0.5,
            sweep: Sweep::Edgeworth,
            out_dir: PathBuf::from("out"),
            stem: String::new(),
            threads: 0,
            z_max: 3.0,
            floor: 0.02,
            degenerate_tol: 0.02,
            alpha_budget: 1_000_000,
            nodes: 64,
        }
    }
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<T>().map_err(|_| Error::Config(format!("{key}: bad entry '{}'", s.trim()))))
        .collect()
}

fn one<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>().map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
}

impl ExperimentConfig {
    pub fn new(kind: Kind) -> Self {
        Self { kind, ..Default::default() }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "kind" => self.kind = v.parse()?,
            "graphon" => self.graphon = v.to_string(),
            "graphon.kind" => {
                let params = self.graphon.split_once(':').map(|(_, p)| p.to_string());
                self.graphon = match params {
                    Some(p) => format!("{v}:{p}"),
                    None => v.to_string(),
                };
            }
            "graphon.params" => {
                let kind = self.graphon.split(':').next().unwrap_or("").to_string();
                self.graphon = format!("{kind}:{v}");
            }
            "graphon.epsilon0" => self.graphon_epsilon0 = Some(one(key, v)?),
            "motif" | "motifs" => self.motifs = v.split(';').map(|s| s.trim().to_string()).collect(),
            "labels" => self.labels = v.to_string(),
            "g" => self.g = v.to_string(),
            "n_list" | "n" => self.n_list = list(key, v)?,
            "reps" => self.reps = one(key, v)?,
            "seed" => self.seed = one(key, v)?,
            "y_grid" | "y" => self.y_grid = list(key, v)?,
            "p" => self.p = one(key, v)?,
            "sweep" => {
                self.sweep = match v {
                    "edgeworth" => Sweep::Edgeworth,
                    "approx" => Sweep::Approx,
                    "tail" => Sweep::Tail,
                    _ => return Err(Error::Config(format!("sweep: unknown sweep '{v}'"))),
                }
            }
            "out_dir" | "out" => self.out_dir = PathBuf::from(v),
            "stem" => self.stem = v.to_string(),
            "threads" => self.threads = one(key, v)?,
            "z_max" => self.z_max = one(key, v)?,
            "floor" => self.floor = one(key, v)?,
            "degenerate_tol" => self.degenerate_tol = one(key, v)?,
            "alpha_budget" => self.alpha_budget = one(key, v)?,
            "nodes" => self.nodes = one(key, v)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            cfg.set(k, v).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("line {}: {m}", i + 1)),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 2 {
            return Err(Error::Config(format!("reps: need at least 2 replicates, got {}", self.reps)));
        }
        if self.n_list.is_empty() || self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n_list: must be non-empty and strictly increasing".into()));
        }
        if self.nodes < 2 {
            return Err(Error::Config("nodes: need at least 2".into()));
        }
        Ok(())
    }

    pub fn file_stem(&self) -> String {
        if self.stem.is_empty() {
            self.kind.name().to_string()
        } else {
            self.stem.clone()
        }
    }

    pub fn graphon(&self) -> Result<Graphon> {
        let w = Graphon::from_spec(&self.graphon)?;
        match self.graphon_epsilon0 {
            Some(e) => w.with_epsilon0(e),
            None => Ok(w),
        }
    }

    pub fn family(&self) -> Result<MotifFamily> {
        let labels = if self.labels.trim().is_empty() || self.labels.trim() == "none" {
            Word::empty()
        } else {
            Word::parse(&self.labels)?
        };
        let motifs = self
            .motifs
            .iter()
            .map(|m| LabeledMotif::new(parse_motif(m)?, labels.clone()))
            .collect::<Result<Vec<_>>>()?;
        MotifFamily::new(motifs)
    }
}

/// `K<p>`, `P<p>`, `C<p>`, `E<p>` (empty) or `<p>:a-b,c-d,...`.
pub fn parse_motif(spec: &str) -> Result<SimpleGraph> {
    let s = spec.trim();
    if let Some((p, edges)) = s.split_once(':') {
        let p: usize = p.trim().parse().map_err(|_| Error::Parse(format!("bad vertex count in '{s}'")))?;
        let mut list = Vec::new();
        for e in edges.split(',').filter(|e| !e.trim().is_empty()) {
            let (a, b) = e.split_once('-').ok_or_else(|| Error::Parse(format!("bad edge '{e}'")))?;
            let a = a.trim().parse().map_err(|_| Error::Parse(format!("bad edge '{e}'")))?;
            let b = b.trim().parse().map_err(|_| Error::Parse(format!("bad edge '{e}'")))?;
            list.push((a, b));
        }
        return SimpleGraph::new(p, &list);
    }
    let (head, num) = s.split_at(1.min(s.len()));
    let p: usize = num.parse().map_err(|_| Error::Parse(format!("unknown motif '{s}'")))?;
    match head {
        "K" => SimpleGraph::complete(p),
        "P" => SimpleGraph::path(p),
        "C" => SimpleGraph::cycle(p),
        "E" => SimpleGraph::empty(p),
        _ => Err(Error::Parse(format!("unknown motif '{s}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let c = ExperimentConfig::parse("kind = degree-cdf\n# comment\ny_grid = 0.25, 0.5\nn_list=100,200\nreps = 10\n").unwrap();
        assert_eq!(c.kind, Kind::DegreeCdf);
        assert_eq!(c.y_grid, vec![0.25, 0.5]);
        c.validate().unwrap();
        let mut bad = c.clone();
        bad.reps = 1;
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        bad.reps = 5;
        bad.n_list = vec![200, 100];
        assert!(bad.validate().is_err());
        match ExperimentConfig::parse("reps = 3\nfoo = 1\n") {
            Err(Error::Config(m)) => assert!(m.starts_with("line 2")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn motifs() {
        assert_eq!(parse_motif("K3").unwrap(), SimpleGraph::complete(3).unwrap());
        assert_eq!(parse_motif("3:1-2,2-3").unwrap(), SimpleGraph::path(3).unwrap());
        assert!(parse_motif("Q3").is_err());
        let mut c = ExperimentConfig::default();
        c.set("labels", "1").unwrap();
        assert_eq!(c.family().unwrap().k(), 1);
        let c = ExperimentConfig::parse("graphon.kind = affine\ngraphon.params = 0.1,0.5\n").unwrap();
        assert_eq!(c.graphon, "affine:0.1,0.5");
        assert!(c.graphon().is_ok());
    }
}
