//! W-random graphs with their latent coordinates.
//!
//! Latent X_i is word pair i of the latent stream; the edge {i,j}, i<j, is
//! decided by 32-bit word j of stream i. Both are addressed by position, so
//! a graph does not depend on the order in which rows are generated.

use std::fmt::Write as _;
use std::path::Path;

use crate::graph::SimpleGraph;
use crate::graphon::Graphon;
use crate::rng::{self, Streams, LATENT_STREAM};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct SampledGraph {
    pub graph: SimpleGraph,
    pub latent: Vec<f64>,
    pub seed: u64,
}

impl SampledGraph {
    pub fn n(&self) -> usize {
        self.graph.order()
    }
}

pub fn latents(n: usize, seed: u64) -> Vec<f64> {
    let mut r = Streams::new(seed).stream(LATENT_STREAM);
    (0..n).map(|_| rng::next_unit(&mut r)).collect()
}

/// G_n(W) with fresh latents drawn from `seed`.
pub fn sample(w: &Graphon, n: usize, seed: u64) -> Result<SampledGraph> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    sample_with_latent(w, latents(n, seed), seed)
}

/// G_n(W) conditional on the given latents; edge draws still come from `seed`.
pub fn sample_with_latent(w: &Graphon, latent: Vec<f64>, seed: u64) -> Result<SampledGraph> {
    let n = latent.len();
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if let Some(bad) = latent.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::Domain(format!("latent {bad} outside [0,1]")));
    }
    let st = Streams::new(seed);
    let wpr = n.div_ceil(64);
    let mut rows = vec![0u64; n * wpr];
    for i in 0..n {
        let mut r = st.at(i as u64, (i + 1) as u128);
        let xi = latent[i];
        for j in i + 1..n {
            let t = rng::bernoulli_threshold(w.w(xi, latent[j]));
            if (rng::next_u32(&mut r) as u64) < t {
                rows[i * wpr + j / 64] |= 1 << (j % 64);
                rows[j * wpr + i / 64] |= 1 << (i % 64);
            }
        }
    }
    Ok(SampledGraph { graph: SimpleGraph::from_rows(n, rows), latent, seed })
}

/// D_i = deg(i)/(n−1).
pub fn degree_sequence(g: &SimpleGraph) -> Result<Vec<f64>> {
    let n = g.order();
    if n < 2 {
        return Err(Error::Domain("degree sequence needs n ≥ 2".into()));
    }
    Ok((0..n).map(|i| g.degree0(i) as f64 / (n - 1) as f64).collect())
}

pub fn write_edge_list(g: &SimpleGraph, path: &Path) -> Result<()> {
    std::fs::write(path, g.to_edge_list())?;
    Ok(())
}

pub fn write_latents(latent: &[f64], path: &Path) -> Result<()> {
    let mut s = String::from("vertex,x\n");
    for (i, x) in latent.iter().enumerate() {
        writeln!(s, "{},{:.17}", i + 1, x).unwrap();
    }
    std::fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hom;

    #[test]
    fn extreme_graphons() {
        let one = Graphon::constant(1.0).unwrap();
        let zero = Graphon::constant(0.0).unwrap();
        let g = sample(&one, 4, 9).unwrap();
        assert_eq!(g.graph, SimpleGraph::complete(4).unwrap());
        let g = sample(&zero, 4, 9).unwrap();
        assert_eq!(g.graph.num_edges(), 0);
        assert!(sample(&one, 0, 1).is_err());
    }

    #[test]
    fn half_density_concentrates() {
        let w = Graphon::constant(0.5).unwrap();
        let g = sample(&w, 1000, 42).unwrap();
        let pairs = 1000.0 * 999.0 / 2.0;
        let dens = g.graph.num_edges() as f64 / pairs;
        let sd = 1.0 / (2.0 * f64::sqrt(pairs));
        assert!((dens - 0.5).abs() < 4.0 * sd, "density {dens}");
    }

    #[test]
    fn reproducible() {
        let w = Graphon::affine(0.0, 1.0).unwrap();
        let a = sample(&w, 130, 5).unwrap();
        let b = sample(&w, 130, 5).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.latent, b.latent);
        let c = sample(&w, 130, 6).unwrap();
        assert_ne!(a.graph, c.graph);
        assert!(a.latent.iter().all(|x| (0.0..1.0).contains(x)));
    }

    #[test]
    fn degree_examples() {
        let k3 = SimpleGraph::complete(3).unwrap();
        assert_eq!(degree_sequence(&k3).unwrap(), vec![1.0; 3]);
        assert_eq!(degree_sequence(&SimpleGraph::empty(3).unwrap()).unwrap(), vec![0.0; 3]);
        assert!(degree_sequence(&SimpleGraph::empty(1).unwrap()).is_err());
        let w = Graphon::affine(0.0, 1.0).unwrap();
        let g = sample(&w, 77, 3).unwrap();
        let d = degree_sequence(&g.graph).unwrap();
        let mean = d.iter().sum::<f64>() / 77.0;
        let k2 = SimpleGraph::complete(2).unwrap();
        assert!((mean - hom::t_inj(&k2, &g.graph).unwrap()).abs() < 1e-14);
    }
}
